//! JSON-lines transcripts.
//!
//! A transcript file holds one header record, one record per claim and a
//! trailing outcome record:
//!
//! ```text
//! {"type":"header","board":"reduced-k-partite","n":12,"k":3,"a":1,"b":1,"board_size":48,"seed":7}
//! {"type":"move","round":1,"player":"M","elements":[5],"orientation":[[0,4]]}
//! {"type":"move","round":1,"player":"B","elements":[0]}
//! {"type":"outcome","outcome":"MakerWin"}
//! ```

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{BoardKind, ElementId, Player, Vertex};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Outcome {
    MakerWin,
    BreakerWin,
    Incomplete,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TranscriptHeader {
    pub board: BoardKind,
    pub n: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub k: Option<usize>,
    pub a: u32,
    pub b: u32,
    pub board_size: usize,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MoveRecord {
    pub round: u32,
    pub player: Player,
    pub elements: Vec<ElementId>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub orientation: Option<Vec<(Vertex, Vertex)>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transcript {
    pub header: TranscriptHeader,
    pub records: Vec<MoveRecord>,
    pub outcome: Outcome,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
enum Line {
    Header(TranscriptHeader),
    Move(MoveRecord),
    Outcome { outcome: Outcome },
}

impl Transcript {
    pub fn write_jsonl<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(
            out,
            "{}",
            serde_json::to_string(&Line::Header(self.header.clone()))?
        )?;
        for r in &self.records {
            writeln!(out, "{}", serde_json::to_string(&Line::Move(r.clone()))?)?;
        }
        writeln!(
            out,
            "{}",
            serde_json::to_string(&Line::Outcome {
                outcome: self.outcome
            })?
        )?;
        Ok(())
    }

    pub fn to_jsonl(&self) -> String {
        let mut buf = Vec::new();
        self.write_jsonl(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("JSON is UTF-8")
    }

    pub fn read_jsonl<R: BufRead>(input: R) -> Result<Self> {
        let mut header = None;
        let mut records = Vec::new();
        let mut outcome = None;
        for (no, line) in input.lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            if outcome.is_some() {
                return Err(Error::Parse(format!(
                    "line {}: record after the outcome",
                    no + 1
                )));
            }
            match serde_json::from_str::<Line>(&line)
                .map_err(|e| Error::Parse(format!("line {}: {e}", no + 1)))?
            {
                Line::Header(h) if header.is_none() && records.is_empty() => header = Some(h),
                Line::Header(_) => {
                    return Err(Error::Parse(format!("line {}: unexpected header", no + 1)))
                }
                Line::Move(_) if header.is_none() => {
                    return Err(Error::Parse(format!("line {}: move before header", no + 1)))
                }
                Line::Move(m) => records.push(m),
                Line::Outcome { outcome: o } => outcome = Some(o),
            }
        }
        Ok(Transcript {
            header: header.ok_or_else(|| Error::Parse("missing header record".into()))?,
            records,
            outcome: outcome.ok_or_else(|| Error::Parse("missing outcome record".into()))?,
        })
    }

    pub fn from_jsonl(s: &str) -> Result<Self> {
        Self::read_jsonl(s.as_bytes())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Transcript {
        Transcript {
            header: TranscriptHeader {
                board: BoardKind::CompleteGraphEdges,
                n: 3,
                k: Some(2),
                a: 1,
                b: 1,
                board_size: 3,
                seed: 7,
            },
            records: vec![
                MoveRecord {
                    round: 1,
                    player: Player::Maker,
                    elements: vec![ElementId(0)],
                    orientation: Some(vec![(1, 0)]),
                },
                MoveRecord {
                    round: 1,
                    player: Player::Breaker,
                    elements: vec![ElementId(2)],
                    orientation: None,
                },
            ],
            outcome: Outcome::MakerWin,
        }
    }

    #[test]
    fn json_lines_layout() {
        let text = sample().to_jsonl();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines.len(), 4);
        assert!(lines[0].starts_with(r#"{"type":"header","board":"complete-graph-edges""#));
        assert_eq!(
            lines[1],
            r#"{"type":"move","round":1,"player":"M","elements":[0],"orientation":[[1,0]]}"#
        );
        assert_eq!(
            lines[2],
            r#"{"type":"move","round":1,"player":"B","elements":[2]}"#
        );
        assert_eq!(lines[3], r#"{"type":"outcome","outcome":"MakerWin"}"#);
        assert_eq!(Transcript::from_jsonl(&text).unwrap(), sample());
    }

    #[test]
    fn malformed_transcripts_are_rejected() {
        let text = sample().to_jsonl();
        let no_header: String = text.lines().skip(1).map(|l| format!("{l}\n")).collect();
        assert!(Transcript::from_jsonl(&no_header).is_err());
        let no_outcome: String = text.lines().take(3).map(|l| format!("{l}\n")).collect();
        assert!(Transcript::from_jsonl(&no_outcome).is_err());
        assert!(Transcript::from_jsonl("{\"type\":\"bogus\"}\n").is_err());
    }
}
