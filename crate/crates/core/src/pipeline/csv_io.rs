use serde::Deserialize;

use crate::dsp::ScheduleEntry;
use crate::error::{Error, Result};
use crate::geometry::Vec3;

fn check_header(reader: &mut csv::Reader<&[u8]>, expected: &[&str]) -> Result<()> {
    let header = reader.headers()?;
    let got: Vec<&str> = header.iter().map(str::trim).collect();
    if got != expected {
        return Err(Error::Parse { line: 1, message: format!("expected header `{}`, got `{}`", expected.join(","), got.join(",")) });
    }
    Ok(())
}

fn parse_rows<T: for<'de> Deserialize<'de>>(text: &str, header: &[&str]) -> Result<Vec<T>> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    check_header(&mut reader, header)?;
    reader
        .deserialize()
        .enumerate()
        .map(|(i, row)| row.map_err(|e| Error::Parse { line: i + 2, message: e.to_string() }))
        .collect()
}

/// Listener positions from a `x,y,z` CSV (metres).
pub fn read_path_csv(text: &str) -> Result<Vec<Vec3>> {
    #[derive(Deserialize)]
    struct Row {
        x: f64,
        y: f64,
        z: f64,
    }
    let rows: Vec<Row> = parse_rows(text, &["x", "y", "z"])?;
    let points: Vec<Vec3> = rows.into_iter().map(|r| Vec3::new(r.x, r.y, r.z)).collect();
    if let Some(i) = points.iter().position(|p| !p.is_finite()) {
        return Err(Error::Parse { line: i + 2, message: "non-finite coordinate".into() });
    }
    Ok(points)
}

/// Listener schedule from a `t_start_s,sample_index` CSV.
pub fn read_schedule_csv(text: &str) -> Result<Vec<ScheduleEntry>> {
    parse_rows(text, &["t_start_s", "sample_index"])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn path_csv() {
        let pts = read_path_csv("x,y,z\n1,2,3\n0.5, -1, 2\n").unwrap();
        assert_eq!(pts, vec![Vec3::new(1.0, 2.0, 3.0), Vec3::new(0.5, -1.0, 2.0)]);
        assert!(matches!(read_path_csv("a,b,c\n1,2,3\n"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(read_path_csv("x,y,z\n1,2,3\n1,two,3\n"), Err(Error::Parse { line: 3, .. })));
    }

    #[test]
    fn schedule_csv() {
        let s = read_schedule_csv("t_start_s,sample_index\n0,0\n1.5,12\n").unwrap();
        assert_eq!(s[1], ScheduleEntry { t_start_s: 1.5, sample_index: 12 });
        assert!(read_schedule_csv("t,i\n0,0\n").is_err());
    }
}
