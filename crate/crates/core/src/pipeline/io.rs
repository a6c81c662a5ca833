use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::ball::CenterSet;
use crate::error::{Error, Result};
use crate::geom::{Point3, Tolerance};

/// On-disk form of a center set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CenterFile {
    pub centers: Vec<[f64; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<Tolerance>,
}

impl CenterFile {
    pub fn of(c: &CenterSet) -> Self {
        CenterFile {
            centers: c.centers().iter().map(|p| [p.x, p.y, p.z]).collect(),
            labels: Some(c.labels().to_vec()),
            tolerance: Some(*c.tolerance()),
        }
    }

    pub fn into_centers(self) -> Result<CenterSet> {
        let pts = self.centers.iter().map(|p| Point3::new(p[0], p[1], p[2])).collect();
        CenterSet::new(pts, self.labels, self.tolerance.unwrap_or_default()).map_err(|e| Error::Format(e.to_string()))
    }
}

pub fn parse_centers(json: &str) -> Result<CenterSet> {
    let file: CenterFile = serde_json::from_str(json).map_err(|e| Error::Format(e.to_string()))?;
    file.into_centers()
}

pub fn read_centers(path: impl AsRef<Path>) -> Result<CenterSet> {
    parse_centers(&std::fs::read_to_string(path)?)
}

pub fn centers_to_json(c: &CenterSet) -> String {
    serde_json::to_string_pretty(&CenterFile::of(c)).expect("center files serialize")
}

pub fn write_centers(c: &CenterSet, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, centers_to_json(c) + "\n")?;
    Ok(())
}

/// SHA-256 of the canonical JSON form of the center set.
pub fn input_hash(c: &CenterSet) -> String {
    let canonical = serde_json::to_string(&CenterFile::of(c)).expect("center files serialize");
    let digest = Sha256::digest(canonical.as_bytes());
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

/// `x` rounded to 15 significant digits.
pub fn round_sig15(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.14e}").parse().expect("formatted float parses")
}
