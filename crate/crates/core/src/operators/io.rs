//! Plain-text operator files.
//!
//! ```text
//! fsbp v1 N=3 space=poly:d=2
//! nodes
//! -1.0000000000000000e0 0.0000000000000000e0 1.0000000000000000e0
//! P
//! <N rows>
//! Q
//! ...
//! ```
//! Sections `nodes`, `P`, `Q`, `D1`, `D2`, `S`; matrices row-major with 17
//! significant digits. `P` may also be given as a single row (its diagonal).

use std::fs;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use nalgebra::{DMatrix, DVector};

use super::{boundary_matrix, FsbpOperatorSet};
use crate::error::{FsbpError, Result};
use crate::funcspace::{with_derivatives, FunctionSpace, Interval, SpaceKind};

fn write_row(out: &mut impl Write, row: impl Iterator<Item = f64>) -> std::io::Result<()> {
    let items: Vec<String> = row.map(|v| format!("{v:.16e}")).collect();
    writeln!(out, "{}", items.join(" "))
}

fn write_matrix(out: &mut impl Write, name: &str, m: &DMatrix<f64>) -> std::io::Result<()> {
    writeln!(out, "{name}")?;
    for row in m.row_iter() {
        write_row(out, row.iter().copied())?;
    }
    Ok(())
}

pub fn write_operator(set: &FsbpOperatorSet, out: &mut impl Write) -> Result<()> {
    writeln!(out, "fsbp v1 N={} space={}", set.n(), set.tag)?;
    writeln!(out, "nodes")?;
    write_row(out, set.nodes.iter().copied())?;
    write_matrix(out, "P", &set.p_matrix())?;
    write_matrix(out, "Q", &set.q)?;
    write_matrix(out, "D1", &set.d1)?;
    if let Some(d2) = &set.d2 {
        write_matrix(out, "D2", d2)?;
    }
    write_matrix(out, "S", &set.s)?;
    Ok(())
}

pub fn write_operator_file(set: &FsbpOperatorSet, path: &Path) -> Result<()> {
    let mut file = std::io::BufWriter::new(fs::File::create(path)?);
    write_operator(set, &mut file)?;
    file.flush()?;
    Ok(())
}

fn parse_err(line: usize, msg: impl std::fmt::Display) -> FsbpError {
    FsbpError::Parse(format!("line {line}: {msg}"))
}

fn parse_row(line: usize, text: &str, n: usize) -> Result<Vec<f64>> {
    let row = text
        .split_whitespace()
        .map(|t| t.parse::<f64>().map_err(|_| parse_err(line, format!("bad number `{t}`"))))
        .collect::<Result<Vec<f64>>>()?;
    if row.len() != n {
        return Err(parse_err(line, format!("expected {n} entries, found {}", row.len())));
    }
    Ok(row)
}

/// Parses an operator file. Spaces are rebuilt from the tag when it names
/// a built-in kind.
pub fn read_operator(input: impl Read) -> Result<FsbpOperatorSet> {
    let lines: Vec<(usize, String)> = BufReader::new(input)
        .lines()
        .enumerate()
        .map(|(i, l)| l.map(|l| (i + 1, l)))
        .collect::<std::io::Result<Vec<_>>>()?
        .into_iter()
        .filter(|(_, l)| !l.trim().is_empty())
        .collect();
    let (_, header) = lines.first().ok_or_else(|| parse_err(1, "empty file"))?;
    let mut parts = header.split_whitespace();
    if parts.next() != Some("fsbp") || parts.next() != Some("v1") {
        return Err(parse_err(1, "expected header `fsbp v1 N=<n> space=<tag>`"));
    }
    let mut n = None;
    let mut tag = String::from("custom");
    for p in parts {
        if let Some(v) = p.strip_prefix("N=") {
            n = Some(v.parse::<usize>().map_err(|_| parse_err(1, format!("bad size `{v}`")))?);
        } else if let Some(v) = p.strip_prefix("space=") {
            tag = v.to_string();
        }
    }
    let n = n.ok_or_else(|| parse_err(1, "header lacks N=<n>"))?;
    if n < 2 {
        return Err(parse_err(1, "operators need at least two nodes"));
    }

    let mut nodes = None;
    let mut matrices: Vec<(String, DMatrix<f64>)> = Vec::new();
    let mut i = 1;
    while i < lines.len() {
        let (lno, name) = (&lines[i].0, lines[i].1.trim());
        match name {
            "nodes" => {
                let (l, text) = lines.get(i + 1).ok_or_else(|| parse_err(*lno, "missing node row"))?;
                nodes = Some(parse_row(*l, text, n)?);
                i += 2;
            }
            "P" | "Q" | "D1" | "D2" | "S" => {
                let mut rows = Vec::with_capacity(n);
                let mut j = i + 1;
                while rows.len() < n {
                    let Some((l, text)) = lines.get(j) else {
                        return Err(parse_err(*lno, format!("section {name} ends early")));
                    };
                    if name == "P" && rows.is_empty() && matches!(lines.get(j + 1), Some((_, t)) if t.trim() == "Q") {
                        // single-row diagonal form
                        let diag = parse_row(*l, text, n)?;
                        rows = (0..n).map(|r| (0..n).map(|c| if r == c { diag[r] } else { 0.0 }).collect()).collect();
                        j += 1;
                        break;
                    }
                    rows.push(parse_row(*l, text, n)?);
                    j += 1;
                }
                let flat: Vec<f64> = rows.into_iter().flatten().collect();
                matrices.push((name.to_string(), DMatrix::from_row_slice(n, n, &flat)));
                i = j;
            }
            other => return Err(parse_err(*lno, format!("unknown section `{other}`"))),
        }
    }
    let take = |key: &str| matrices.iter().find(|(k, _)| k == key).map(|(_, m)| m.clone());
    let nodes = nodes.ok_or_else(|| parse_err(1, "missing section nodes"))?;
    let p_full = take("P").ok_or_else(|| parse_err(1, "missing section P"))?;
    let q = take("Q").ok_or_else(|| parse_err(1, "missing section Q"))?;
    let d1 = take("D1").ok_or_else(|| parse_err(1, "missing section D1"))?;
    let s = take("S").unwrap_or_else(|| d1.clone());
    let d2 = take("D2");
    let off_diagonal = (&p_full - DMatrix::from_diagonal(&p_full.diagonal())).amax();
    if off_diagonal != 0.0 {
        return Err(FsbpError::Parse("P must be diagonal".into()));
    }
    let p: DVector<f64> = p_full.diagonal();
    let element = Interval::new(nodes[0], nodes[n - 1]).map_err(|e| FsbpError::Parse(e.to_string()))?;
    for k in 1..n {
        if !(nodes[k] > nodes[k - 1]) {
            return Err(FsbpError::Parse(format!("nodes not increasing at index {k}")));
        }
    }
    let (exactness_space, target_space) = match tag.parse::<SpaceKind>() {
        Ok(SpaceKind::Custom) | Err(_) => (None, None),
        Ok(kind) => {
            let f = FunctionSpace::from_kind(&kind, Interval::reference())
                .map_err(|e| FsbpError::Parse(e.to_string()))?
                .mapped(element);
            (Some(with_derivatives(&f)?), Some(f))
        }
    };
    Ok(FsbpOperatorSet {
        nodes,
        p,
        q,
        b: boundary_matrix(n),
        d1,
        s,
        d2,
        element,
        exactness_space,
        target_space,
        tag,
    })
}

pub fn read_operator_file(path: &Path) -> Result<FsbpOperatorSet> {
    read_operator(fs::File::open(path)?)
}
