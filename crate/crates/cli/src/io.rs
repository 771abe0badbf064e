//! Sample files: CSV with the fixed header `s,x,y,u,v,kappa`, or JSON
//! holding the same rows plus the run configuration that produced them.

use std::path::Path;

use l2curves::{numeric_curvature, CausalSign, CurveSamples, PlanePoint};
use serde::{Deserialize, Serialize};

use crate::config::RunConfig;

pub const HEADER: &str = "s,x,y,u,v,kappa";
const COLUMNS: [&str; 6] = ["s", "x", "y", "u", "v", "kappa"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    /// `.json` files are JSON, everything else CSV.
    pub fn from_path(path: &Path) -> Format {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("json") => Format::Json,
            _ => Format::Csv,
        }
    }
}

#[derive(Debug)]
pub enum ReadError {
    Io(std::io::Error),
    Malformed(String),
}

impl std::fmt::Display for ReadError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ReadError::Io(e) => write!(f, "{e}"),
            ReadError::Malformed(m) => f.write_str(m),
        }
    }
}

fn malformed(msg: impl Into<String>) -> ReadError {
    ReadError::Malformed(msg.into())
}

/// The κ column: the attached law if any, else the finite-difference value.
fn kappa_column(samples: &CurveSamples) -> Vec<f64> {
    match samples.kappa() {
        Some(k) => k.to_vec(),
        None => numeric_curvature(samples).unwrap_or_else(|_| vec![f64::NAN; samples.len()]),
    }
}

fn rows(samples: &CurveSamples) -> Vec<[f64; 6]> {
    let kappa = kappa_column(samples);
    samples
        .s()
        .iter()
        .zip(samples.points())
        .zip(samples.uv())
        .zip(kappa)
        .map(|(((&s, p), &(u, v)), k)| [s, p.x, p.y, u, v, k])
        .collect()
}

/// 17 significant digits: enough to round-trip any binary64.
fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn to_csv(samples: &CurveSamples) -> String {
    let mut out = String::with_capacity(samples.len() * 150);
    out.push_str(HEADER);
    out.push('\n');
    for row in rows(samples) {
        let fields: Vec<String> = row.iter().map(|&x| fmt_f64(x)).collect();
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}

#[derive(Debug, Serialize, Deserialize)]
struct JsonFile {
    metadata: Option<RunConfig>,
    #[serde(default)]
    epsilon: Option<i8>,
    columns: Vec<String>,
    samples: Vec<[Option<f64>; 6]>,
}

pub fn to_json(samples: &CurveSamples, metadata: Option<&RunConfig>) -> String {
    let file = JsonFile {
        metadata: metadata.cloned(),
        epsilon: Some(samples.epsilon().value() as i8),
        columns: COLUMNS.iter().map(|c| c.to_string()).collect(),
        samples: rows(samples)
            .into_iter()
            .map(|r| r.map(|x| x.is_finite().then_some(x)))
            .collect(),
    };
    let mut s = serde_json::to_string_pretty(&file).expect("serializable");
    s.push('\n');
    s
}

pub fn render(samples: &CurveSamples, format: Format, metadata: Option<&RunConfig>) -> String {
    match format {
        Format::Csv => to_csv(samples),
        Format::Json => to_json(samples, metadata),
    }
}

/// Samples read back from a file, with whatever provenance it carried.
#[derive(Debug, Clone)]
pub struct Loaded {
    pub samples: CurveSamples,
    pub metadata: Option<RunConfig>,
}

/// Sign of `g(γ', γ')` along the data: the majority sign of `Δu Δv`.
fn infer_epsilon(uv: &[(f64, f64)]) -> CausalSign {
    let votes: i64 = uv
        .windows(2)
        .map(|w| {
            let p = (w[1].0 - w[0].0) * (w[1].1 - w[0].1);
            (p > 0.0) as i64 - (p < 0.0) as i64
        })
        .sum();
    if votes >= 0 {
        CausalSign::Spacelike
    } else {
        CausalSign::Timelike
    }
}

fn assemble(table: Vec<[f64; 6]>, epsilon: Option<CausalSign>) -> Result<CurveSamples, ReadError> {
    let s: Vec<f64> = table.iter().map(|r| r[0]).collect();
    let points: Vec<PlanePoint> = table.iter().map(|r| PlanePoint::new(r[1], r[2])).collect();
    let uv: Vec<(f64, f64)> = table.iter().map(|r| (r[3], r[4])).collect();
    let kappa: Vec<f64> = table.iter().map(|r| r[5]).collect();
    let eps = epsilon.unwrap_or_else(|| infer_epsilon(&uv));
    let samples = CurveSamples::from_parts(s, points, uv, eps).map_err(|e| malformed(format!("invalid samples: {e}")))?;
    if kappa.iter().all(|k| k.is_finite()) {
        samples.with_kappa(kappa).map_err(|e| malformed(e.to_string()))
    } else {
        Ok(samples)
    }
}

pub fn parse_csv(text: &str, epsilon: Option<CausalSign>) -> Result<CurveSamples, ReadError> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let Some((_, header)) = lines.next() else {
        return Err(malformed("empty file"));
    };
    let cols: Vec<&str> = header.split(',').map(str::trim).collect();
    if cols != COLUMNS {
        return Err(malformed(format!("expected header `{HEADER}`, found `{header}`")));
    }
    let mut table = Vec::new();
    for (n, line) in lines {
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 6 {
            return Err(malformed(format!("line {}: expected 6 fields, found {}", n + 1, fields.len())));
        }
        let mut row = [0.0; 6];
        for (slot, f) in row.iter_mut().zip(&fields) {
            *slot = f
                .parse::<f64>()
                .map_err(|_| malformed(format!("line {}: `{f}` is not a number", n + 1)))?;
        }
        table.push(row);
    }
    assemble(table, epsilon)
}

pub fn parse_json(text: &str, epsilon: Option<CausalSign>) -> Result<Loaded, ReadError> {
    let file: JsonFile = serde_json::from_str(text).map_err(|e| malformed(format!("invalid JSON: {e}")))?;
    if file.columns != COLUMNS {
        return Err(malformed(format!("expected columns {COLUMNS:?}, found {:?}", file.columns)));
    }
    let stored = match file.epsilon {
        Some(1) => Some(CausalSign::Spacelike),
        Some(-1) => Some(CausalSign::Timelike),
        Some(e) => return Err(malformed(format!("epsilon must be 1 or -1, found {e}"))),
        None => None,
    };
    let table = file
        .samples
        .iter()
        .map(|r| r.map(|x| x.unwrap_or(f64::NAN)))
        .collect();
    let samples = assemble(table, epsilon.or(stored))?;
    Ok(Loaded {
        samples,
        metadata: file.metadata,
    })
}

/// Reads a sample file; `epsilon` overrides what the file says or implies.
pub fn read_samples(path: &Path, epsilon: Option<CausalSign>) -> Result<Loaded, ReadError> {
    let text = std::fs::read_to_string(path).map_err(ReadError::Io)?;
    match Format::from_path(path) {
        Format::Json => parse_json(&text, epsilon),
        Format::Csv => Ok(Loaded {
            samples: parse_csv(&text, epsilon)?,
            metadata: None,
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use l2curves::catalog::{sample_family, FamilyDescriptor, FamilyId};

    fn curve_n(eps: CausalSign, n: usize) -> CurveSamples {
        sample_family(&FamilyDescriptor::new(FamilyId::SturmExtended, eps).with("mu", -0.5), n, None).unwrap()
    }

    fn curve(eps: CausalSign) -> CurveSamples {
        curve_n(eps, 64)
    }

    #[test]
    fn csv_round_trip_is_byte_identical() {
        for eps in [CausalSign::Spacelike, CausalSign::Timelike] {
            let a = to_csv(&curve(eps));
            let back = parse_csv(&a, None).unwrap();
            assert_eq!(back.epsilon(), eps);
            assert_eq!(to_csv(&back), a);
        }
    }

    #[test]
    fn json_round_trip_keeps_values() {
        let c = curve(CausalSign::Timelike);
        let j = to_json(&c, None);
        let back = parse_json(&j, None).unwrap().samples;
        assert_eq!(back.epsilon(), CausalSign::Timelike);
        assert_eq!(back.s(), c.s());
        assert_eq!(back.uv(), c.uv());
        assert_eq!(to_json(&back, None), j);
    }

    #[test]
    fn missing_kappa_is_filled_numerically() {
        let c = curve_n(CausalSign::Spacelike, 512);
        let bare = CurveSamples::from_uv(c.s().to_vec(), c.u(), c.v(), c.epsilon()).unwrap();
        let text = to_csv(&bare);
        let back = parse_csv(&text, None).unwrap();
        let k = back.kappa().unwrap();
        assert!((k[256] - c.kappa().unwrap()[256]).abs() < 1e-6);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(parse_csv("", None).is_err());
        assert!(parse_csv("a,b\n1,2\n", None).is_err());
        assert!(parse_csv(&format!("{HEADER}\n1,2,3\n"), None).is_err());
        assert!(parse_csv(&format!("{HEADER}\n1,2,3,4,5,x\n"), None).is_err());
        // x, y inconsistent with u, v
        let bad = format!("{HEADER}\n0,0,0,1,1,0\n1,0,0,2,2,0\n");
        assert!(parse_csv(&bad, None).is_err());
    }

    #[test]
    fn format_from_extension() {
        assert_eq!(Format::from_path(Path::new("a/b.JSON")), Format::Json);
        assert_eq!(Format::from_path(Path::new("a/b.csv")), Format::Csv);
        assert_eq!(Format::from_path(Path::new("b")), Format::Csv);
    }
}
