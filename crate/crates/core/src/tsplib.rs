//! Reader and writer for the TSPLIB subset used here: `NAME`, `TYPE: TSP`,
//! `DIMENSION`, `EDGE_WEIGHT_TYPE: EUC_2D`, a 1-based `NODE_COORD_SECTION`
//! and `EOF`.
//!
//! The grid size is not a TSPLIB field. The writer records it as a
//! `grid=<size>` token in the `COMMENT` line; the reader falls back to the
//! default 400 grid (or the smallest grid that fits) when it is absent.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::instance::{Instance, Point, DEFAULT_GRID};

/// Serializes an instance. `comment` is appended after the grid token.
pub fn write_string(instance: &Instance, comment: &str) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "NAME : {}", instance.id());
    let _ = writeln!(
        out,
        "COMMENT : grid={}{}{}",
        instance.grid_size(),
        if comment.is_empty() { "" } else { " " },
        comment
    );
    let _ = writeln!(out, "TYPE : TSP");
    let _ = writeln!(out, "DIMENSION : {}", instance.len());
    let _ = writeln!(out, "EDGE_WEIGHT_TYPE : EUC_2D");
    let _ = writeln!(out, "NODE_COORD_SECTION");
    for (i, p) in instance.cities().iter().enumerate() {
        let _ = writeln!(out, "{} {} {}", i + 1, p.x, p.y);
    }
    out.push_str("EOF\n");
    out
}

pub fn write_file(path: &Path, instance: &Instance, comment: &str) -> Result<()> {
    std::fs::write(path, write_string(instance, comment))?;
    Ok(())
}

pub fn read_file(path: &Path) -> Result<Instance> {
    if !path.exists() {
        return Err(Error::MissingFiles(vec![path.to_path_buf()]));
    }
    let text = std::fs::read_to_string(path)?;
    parse(&text)
}

fn parse_coord(tok: &str, line: usize) -> Result<u32> {
    if let Ok(v) = tok.parse::<u32>() {
        return Ok(v);
    }
    let v: f64 = tok
        .parse()
        .map_err(|_| Error::parse(line, format!("bad coordinate `{tok}`")))?;
    if v < 0.0 || v.fract() != 0.0 || v > f64::from(u32::MAX) {
        return Err(Error::parse(
            line,
            format!("coordinate `{tok}` is not a non-negative integer"),
        ));
    }
    Ok(v as u32)
}

pub fn parse(text: &str) -> Result<Instance> {
    let mut name: Option<String> = None;
    let mut dimension: Option<usize> = None;
    let mut grid: Option<u32> = None;
    let mut coords: Vec<Option<Point>> = Vec::new();
    let mut in_coords = false;
    let mut saw_eof = false;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if line == "EOF" {
            saw_eof = true;
            break;
        }
        if in_coords {
            let toks: Vec<&str> = line.split_whitespace().collect();
            if toks.len() != 3 {
                return Err(Error::parse(line_no, "expected `<index> <x> <y>`"));
            }
            let dim = coords.len();
            let k: usize = toks[0]
                .parse()
                .map_err(|_| Error::parse(line_no, format!("bad node index `{}`", toks[0])))?;
            if k == 0 || k > dim {
                return Err(Error::parse(
                    line_no,
                    format!("node index {k} outside 1..={dim}"),
                ));
            }
            if coords[k - 1].is_some() {
                return Err(Error::parse(line_no, format!("node {k} listed twice")));
            }
            let x = parse_coord(toks[1], line_no)?;
            let y = parse_coord(toks[2], line_no)?;
            coords[k - 1] = Some(Point::new(x, y));
            continue;
        }
        if line.starts_with("NODE_COORD_SECTION") {
            let dim = dimension
                .ok_or_else(|| Error::parse(line_no, "NODE_COORD_SECTION before DIMENSION"))?;
            coords = vec![None; dim];
            in_coords = true;
            continue;
        }
        let (key, value) = match line.split_once(':') {
            Some((k, v)) => (k.trim(), v.trim()),
            None => return Err(Error::parse(line_no, format!("unrecognized line `{line}`"))),
        };
        match key {
            "NAME" => name = Some(value.to_string()),
            "COMMENT" => {
                grid = value
                    .split_whitespace()
                    .find_map(|t| t.strip_prefix("grid="))
                    .map(|g| {
                        g.parse::<u32>()
                            .map_err(|_| Error::parse(line_no, format!("bad grid size `{g}`")))
                    })
                    .transpose()?;
            }
            "TYPE" => {
                if value != "TSP" {
                    return Err(Error::parse(line_no, format!("unsupported TYPE `{value}`")));
                }
            }
            "DIMENSION" => {
                dimension = Some(
                    value
                        .parse()
                        .map_err(|_| Error::parse(line_no, format!("bad DIMENSION `{value}`")))?,
                )
            }
            "EDGE_WEIGHT_TYPE" => {
                if value != "EUC_2D" {
                    return Err(Error::parse(
                        line_no,
                        format!("unsupported EDGE_WEIGHT_TYPE `{value}` (only EUC_2D)"),
                    ));
                }
            }
            _ => {
                return Err(Error::parse(
                    line_no,
                    format!("unsupported keyword `{key}`"),
                ))
            }
        }
    }

    let last = text.lines().count();
    if !in_coords {
        return Err(Error::parse(last, "missing NODE_COORD_SECTION"));
    }
    if !saw_eof {
        return Err(Error::parse(last, "missing EOF"));
    }
    if let Some(k) = coords.iter().position(Option::is_none) {
        return Err(Error::parse(
            last,
            format!("node {} has no coordinates", k + 1),
        ));
    }
    let cities: Vec<Point> = coords.into_iter().flatten().collect();
    let fit = cities.iter().map(|p| p.x.max(p.y) + 1).max().unwrap_or(1);
    let grid = grid.unwrap_or(DEFAULT_GRID.max(fit));
    Instance::new(name.unwrap_or_default(), grid, cities).map_err(|e| match e {
        Error::Usage(m) => Error::parse(last, m),
        other => other,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::rng_from_seed;

    #[test]
    fn round_trip() {
        let inst = Instance::random("abc", 20, 400, &mut rng_from_seed(1)).unwrap();
        let text = write_string(&inst, "seed=1");
        assert_eq!(parse(&text).unwrap(), inst);
    }

    #[test]
    fn rejects_other_metrics() {
        let text = "NAME : x\nTYPE : TSP\nDIMENSION : 3\nEDGE_WEIGHT_TYPE : GEO\nNODE_COORD_SECTION\n1 0 0\n2 1 1\n3 2 2\nEOF\n";
        match parse(text) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 4),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn reports_line_of_bad_coordinate() {
        let text = "NAME : x\nTYPE : TSP\nDIMENSION : 3\nEDGE_WEIGHT_TYPE : EUC_2D\nNODE_COORD_SECTION\n1 0 0\n2 1.5 1\n3 2 2\nEOF\n";
        match parse(text) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 7),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn accepts_integral_floats_and_any_node_order() {
        let text = "NAME: y\nTYPE: TSP\nDIMENSION: 3\nEDGE_WEIGHT_TYPE: EUC_2D\nNODE_COORD_SECTION\n2 1.0 1\n1 0 0\n3 2e0 2\nEOF\n";
        let inst = parse(text).unwrap();
        assert_eq!(inst.cities()[0], Point::new(0, 0));
        assert_eq!(inst.cities()[2], Point::new(2, 2));
        assert_eq!(inst.grid_size(), 400);
    }

    #[test]
    fn missing_node_and_missing_eof() {
        let text = "NAME : x\nTYPE : TSP\nDIMENSION : 3\nEDGE_WEIGHT_TYPE : EUC_2D\nNODE_COORD_SECTION\n1 0 0\n2 1 1\nEOF\n";
        assert!(matches!(parse(text), Err(Error::Parse { .. })));
        let text = "NAME : x\nTYPE : TSP\nDIMENSION : 3\nEDGE_WEIGHT_TYPE : EUC_2D\nNODE_COORD_SECTION\n1 0 0\n2 1 1\n3 2 2\n";
        assert!(matches!(parse(text), Err(Error::Parse { .. })));
    }
}
