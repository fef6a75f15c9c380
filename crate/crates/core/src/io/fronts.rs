use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::FrontContour;
use crate::filter::{validate_observations, Observation};

/// Role of a front in an output file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum FrontTag {
    Truth,
    Forecast,
    Analysis,
    Mean,
    Member(usize),
}

impl fmt::Display for FrontTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FrontTag::Truth => f.write_str("truth"),
            FrontTag::Forecast => f.write_str("forecast"),
            FrontTag::Analysis => f.write_str("analysis"),
            FrontTag::Mean => f.write_str("mean"),
            FrontTag::Member(k) => write!(f, "member-{k}"),
        }
    }
}

impl FromStr for FrontTag {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Ok(match s {
            "truth" => FrontTag::Truth,
            "forecast" => FrontTag::Forecast,
            "analysis" => FrontTag::Analysis,
            "mean" => FrontTag::Mean,
            _ => {
                let k = s
                    .strip_prefix("member-")
                    .and_then(|k| k.parse().ok())
                    .ok_or_else(|| format!("unknown front tag `{s}`"))?;
                FrontTag::Member(k)
            }
        })
    }
}

impl TryFrom<String> for FrontTag {
    type Error = String;

    fn try_from(s: String) -> std::result::Result<Self, String> {
        s.parse()
    }
}

impl From<FrontTag> for String {
    fn from(t: FrontTag) -> String {
        t.to_string()
    }
}

/// One front in a fronts file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrontRecord {
    pub time_s: f64,
    pub polygons: Vec<Vec<(f64, f64)>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tag: Option<FrontTag>,
}

impl FrontRecord {
    pub fn new(front: &FrontContour, tag: FrontTag) -> Self {
        FrontRecord {
            time_s: front.time,
            polygons: front.polylines.clone(),
            tag: Some(tag),
        }
    }

    pub fn front(&self) -> FrontContour {
        FrontContour::new(self.polygons.clone(), self.time_s)
    }
}

/// Reads every record of a fronts file; times may repeat.
pub fn load_front_records(path: &Path) -> Result<Vec<FrontRecord>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let de = &mut serde_json::Deserializer::from_str(&text);
    let records: Vec<FrontRecord> = serde_path_to_error::deserialize(de)
        .map_err(|e| Error::format(path, format!("{}: {}", e.path(), e.inner())))?;
    for (k, r) in records.iter().enumerate() {
        if !r.time_s.is_finite() {
            return Err(Error::format(path, format!("record {k}: time is not finite")));
        }
        r.front()
            .validate()
            .map_err(|e| Error::format(path, format!("record {k}: {e}")))?;
    }
    Ok(records)
}

/// Reads observed fronts; times must be strictly increasing.
pub fn load_fronts_json(path: &Path) -> Result<Vec<Observation>> {
    let obs: Vec<Observation> = load_front_records(path)?
        .iter()
        .map(|r| Observation {
            time: r.time_s,
            front: r.front(),
        })
        .collect();
    validate_observations(&obs).map_err(|e| Error::format(path, e.to_string()))?;
    Ok(obs)
}

pub fn write_fronts_json(records: &[FrontRecord], path: &Path) -> Result<()> {
    let mut text = serde_json::to_string_pretty(records).expect("records serialise");
    text.push('\n');
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use std::io::Write;

    use super::*;

    fn square(t: f64) -> FrontContour {
        FrontContour::new(vec![vec![(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]], t)
    }

    fn file(text: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(text.as_bytes()).unwrap();
        f
    }

    #[test]
    fn one_square() {
        let f = file(r#"[{"time_s": 10, "polygons": [[[0,0],[1,0],[1,1],[0,1]]]}]"#);
        let obs = load_fronts_json(f.path()).unwrap();
        assert_eq!(obs.len(), 1);
        assert_eq!(obs[0].time, 10.0);
        assert_eq!(obs[0].front.vertex_count(), 4);
    }

    #[test]
    fn empty_and_invalid() {
        assert!(load_fronts_json(file("[]").path()).unwrap().is_empty());
        let dup = r#"[{"time_s": 10, "polygons": []}, {"time_s": 10, "polygons": []}]"#;
        assert!(load_fronts_json(file(dup).path()).is_err());
        assert_eq!(load_front_records(file(dup).path()).unwrap().len(), 2);
        let small = r#"[{"time_s": 1, "polygons": [[[0,0],[1,0]]]}]"#;
        assert!(load_fronts_json(file(small).path()).is_err());
        let msg = load_fronts_json(file(r#"[{"time_s": "x", "polygons": []}]"#).path())
            .unwrap_err()
            .to_string();
        assert!(msg.contains("time_s"), "{msg}");
    }

    #[test]
    fn write_read_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("fronts.json");
        write_fronts_json(&[], &path).unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap().trim(), "[]");

        let mut odd = square(12.5);
        odd.polylines[0][2] = (1.0 / 3.0, std::f64::consts::PI);
        let records = vec![
            FrontRecord::new(&square(10.0), FrontTag::Truth),
            FrontRecord::new(&odd, FrontTag::Member(7)),
            FrontRecord::new(&square(12.5), FrontTag::Analysis),
        ];
        write_fronts_json(&records, &path).unwrap();
        let back = load_front_records(&path).unwrap();
        assert_eq!(back, records);
        assert_eq!(back[1].tag, Some(FrontTag::Member(7)));
    }

    #[test]
    fn tags_parse() {
        for t in ["truth", "forecast", "analysis", "mean", "member-0", "member-19"] {
            assert_eq!(t.parse::<FrontTag>().unwrap().to_string(), t);
        }
        assert!("member-x".parse::<FrontTag>().is_err());
        assert!("best".parse::<FrontTag>().is_err());
    }

    #[test]
    fn unwritable_path() {
        let err = write_fronts_json(&[], Path::new("/nonexistent/dir/f.json")).unwrap_err();
        assert_eq!(err.kind(), crate::ErrorKind::Io);
    }
}
