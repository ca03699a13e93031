//! Point-set files.
//!
//! JSON: `{"d": int, "n": int, "points": [[f64; d+1], ...]}` with an optional
//! `"label"`. CSV: headerless, one point per row, `d+1` columns.
//! Floats are written with 17 significant digits.

use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{PointSet, SpherePoint};
use crate::error::{Error, Result};
use crate::format::{fmt_f64, to_json_string};

#[derive(Serialize, Deserialize)]
struct PointSetFile {
    d: u64,
    n: usize,
    points: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    label: Option<String>,
}

fn rows_to_set(d: u64, rows: Vec<Vec<f64>>) -> Result<PointSet> {
    let pts = rows
        .into_iter()
        .map(SpherePoint::from_unit)
        .collect::<Result<Vec<_>>>()?;
    PointSet::new(d, pts)
}

/// Parses the JSON point-set format.
pub fn read_point_set_json(text: &str) -> Result<PointSet> {
    let file: PointSetFile =
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("point-set JSON: {e}")))?;
    if file.n != file.points.len() {
        return Err(Error::Parse(format!(
            "point-set JSON declares n={} but lists {} points",
            file.n,
            file.points.len()
        )));
    }
    let set = rows_to_set(file.d, file.points)?;
    Ok(match file.label {
        Some(l) => set.with_label(l),
        None => set,
    })
}

/// Parses the headerless CSV format; `d` is inferred from the column count.
pub fn read_point_set_csv<R: Read>(reader: R) -> Result<PointSet> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(reader);
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| Error::Parse(format!("point-set CSV: {e}")))?;
        let row = rec
            .iter()
            .map(|f| f.parse::<f64>().map_err(|e| Error::Parse(format!("point-set CSV field {f:?}: {e}"))))
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    let cols = rows
        .first()
        .map(Vec::len)
        .ok_or_else(|| Error::Parse("point-set CSV is empty".into()))?;
    if cols < 2 {
        return Err(Error::Parse("point-set CSV needs at least 2 columns".into()));
    }
    rows_to_set(cols as u64 - 1, rows)
}

/// Reads a point set, choosing the format from the extension (`.csv` is CSV,
/// anything else JSON).
pub fn read_point_set(path: &Path) -> Result<PointSet> {
    let is_csv = path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("csv"));
    let with_path = |e: std::io::Error| std::io::Error::new(e.kind(), format!("{}: {e}", path.display()));
    if is_csv {
        read_point_set_csv(fs::File::open(path).map_err(with_path)?)
    } else {
        read_point_set_json(&fs::read_to_string(path).map_err(with_path)?)
    }
}

pub fn write_point_set_json(p: &PointSet) -> String {
    let file = PointSetFile {
        d: p.d(),
        n: p.len(),
        points: p.points().iter().map(|x| x.coords().to_vec()).collect(),
        label: p.label().map(str::to_owned),
    };
    to_json_string(&file)
}

pub fn write_point_set_csv<W: Write>(p: &PointSet, mut out: W) -> Result<()> {
    for x in p.points() {
        let row: Vec<String> = x.coords().iter().map(|&c| fmt_f64(c)).collect();
        writeln!(out, "{}", row.join(","))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sphere_geom::{uniform_points, Seed};

    #[test]
    fn json_round_trip_is_exact() {
        let p = uniform_points(3, 7, Seed(42)).unwrap().with_label("demo");
        let text = write_point_set_json(&p);
        assert_eq!(read_point_set_json(&text).unwrap(), p);
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let p = uniform_points(2, 5, Seed(1)).unwrap();
        let mut buf = Vec::new();
        write_point_set_csv(&p, &mut buf).unwrap();
        assert_eq!(read_point_set_csv(buf.as_slice()).unwrap(), p);
    }

    #[test]
    fn rejects_bad_files() {
        assert!(read_point_set_json(r#"{"d":2,"n":2,"points":[[1,0,0]]}"#).is_err());
        assert!(read_point_set_json(r#"{"d":2,"n":1,"points":[[1,0]]}"#).is_err());
        assert!(read_point_set_json(r#"{"d":2,"n":1,"points":[[2,0,0]]}"#).is_err());
        assert!(read_point_set_csv("1,0,0\n0,1\n".as_bytes()).is_err());
        assert!(read_point_set_csv("".as_bytes()).is_err());
    }

    #[test]
    fn accepts_hand_written_unit_vectors() {
        let p = read_point_set_json(r#"{"d":1,"n":2,"points":[[0.6,0.8],[-1,0]]}"#).unwrap();
        assert_eq!(p.len(), 2);
        assert_eq!(p.d(), 1);
    }
}
