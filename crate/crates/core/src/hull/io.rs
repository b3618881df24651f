//! Plain-text point clouds (one point per line, whitespace separated) and
//! facet lists (one facet per line, vertex indices).

use std::io::{BufRead, Write};

use super::HullResult;
use crate::error::{Error, Result};

/// Blank lines and lines starting with `#` are skipped.
pub fn read_points<R: BufRead>(reader: R) -> Result<Vec<Vec<f64>>> {
    let mut out: Vec<Vec<f64>> = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::Parse { line: i + 1, message: e.to_string() })?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let point = trimmed
            .split_whitespace()
            .map(|tok| tok.parse::<f64>().map_err(|e| Error::Parse { line: i + 1, message: format!("{tok:?}: {e}") }))
            .collect::<Result<Vec<f64>>>()?;
        if let Some(first) = out.first() {
            if first.len() != point.len() {
                return Err(Error::Parse {
                    line: i + 1,
                    message: format!("expected {} columns, found {}", first.len(), point.len()),
                });
            }
        }
        out.push(point);
    }
    Ok(out)
}

pub fn write_points<W: Write>(mut w: W, points: &[Vec<f64>]) -> std::io::Result<()> {
    for p in points {
        let line: Vec<String> = p.iter().map(|x| format!("{x:.16e}")).collect();
        writeln!(w, "{}", line.join(" "))?;
    }
    Ok(())
}

pub fn write_facets<W: Write>(mut w: W, hull: &HullResult) -> std::io::Result<()> {
    for f in &hull.facets {
        let line: Vec<String> = f.vertex_ids.iter().map(|v| v.to_string()).collect();
        writeln!(w, "{}", line.join(" "))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hull::convex_hull;

    #[test]
    fn round_trip_and_errors() {
        let pts = vec![vec![0.1, -2.5], vec![1.0 / 3.0, 7.0], vec![-4.0, 0.0]];
        let mut buf = Vec::new();
        write_points(&mut buf, &pts).unwrap();
        let back = read_points(&buf[..]).unwrap();
        assert_eq!(back, pts);

        let text = "# comment\n0 0\n\n1 0\n0 1\n";
        assert_eq!(read_points(text.as_bytes()).unwrap().len(), 3);
        assert!(matches!(read_points("0 0\n1\n".as_bytes()), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(read_points("0 x\n".as_bytes()), Err(Error::Parse { line: 1, .. })));

        let h = convex_hull(&back).unwrap();
        let mut out = Vec::new();
        write_facets(&mut out, &h).unwrap();
        assert_eq!(String::from_utf8(out).unwrap().lines().count(), 3);
    }
}
