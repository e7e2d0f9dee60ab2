use thiserror::Error;

use super::complex::{CellComplex, CellId, ComplexBuilder};

/// Plain-text complex format, round-trip exact:
///
/// ```text
/// complex v1
/// dim 2
/// cells 0 4
/// cells 1 6
/// cells 2 4
/// boundary 1:0 = 0:-1 1:1
/// label 0:0 north pole
/// ```
///
/// `#` starts a comment; blank lines are ignored. Boundary entries are
/// `face_index:coefficient` pairs kept in stored order. Cells without a
/// `boundary` line have empty boundary chains.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum TextFormatError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("label of cell {0} contains a line break and cannot be serialized")]
    UnserializableLabel(CellId),
}

fn perr<T>(line: usize, msg: impl Into<String>) -> Result<T, TextFormatError> {
    Err(TextFormatError::Parse {
        line,
        msg: msg.into(),
    })
}

pub fn write_complex(c: &CellComplex) -> Result<String, TextFormatError> {
    let mut out = String::from("complex v1\n");
    let Some(top) = c.dim() else {
        out.push_str("empty\n");
        return Ok(out);
    };
    out.push_str(&format!("dim {top}\n"));
    for d in 0..=top {
        out.push_str(&format!("cells {d} {}\n", c.cell_count(d)));
    }
    for d in 1..=top {
        for idx in 0..c.cell_count(d) {
            let id = CellId::new(d, idx);
            let entries: Vec<String> = c
                .boundary_of(id)
                .map(|(f, coeff)| format!("{f}:{coeff}"))
                .collect();
            if !entries.is_empty() {
                out.push_str(&format!("boundary {id} = {}\n", entries.join(" ")));
            }
        }
    }
    for d in 0..=top {
        for idx in 0..c.cell_count(d) {
            let id = CellId::new(d, idx);
            if let Some(label) = c.label(id) {
                // a newline breaks the line format; a trailing \r would be
                // stripped on reparse
                if label.contains('\n') || label.ends_with('\r') {
                    return Err(TextFormatError::UnserializableLabel(id));
                }
                out.push_str(&format!("label {id} {label}\n"));
            }
        }
    }
    Ok(out)
}

pub fn parse_complex(text: &str) -> Result<CellComplex, TextFormatError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .filter(|(_, l)| {
            let t = l.trim();
            !t.is_empty() && !t.starts_with('#')
        });

    let (hline, header) = match lines.next() {
        Some(x) => x,
        None => return perr(0, "empty document"),
    };
    if header.trim() != "complex v1" {
        return perr(hline, format!("expected header 'complex v1', got {header:?}"));
    }

    let mut top: Option<usize> = None;
    let mut counts: Vec<usize> = Vec::new();
    let mut boundaries: Vec<(usize, CellId, Vec<(usize, i64)>)> = Vec::new();
    let mut labels: Vec<(CellId, String)> = Vec::new();
    let mut empty = false;

    for (ln, raw) in lines {
        let line = raw.trim();
        let (directive, rest) = line.split_once(' ').unwrap_or((line, ""));
        match directive {
            "empty" => {
                empty = true;
            }
            "dim" => {
                if top.is_some() {
                    return perr(ln, "duplicate dim line");
                }
                top = Some(parse_usize(ln, rest.trim())?);
            }
            "cells" => {
                let mut it = rest.split_whitespace();
                let d = parse_usize(ln, it.next().unwrap_or(""))?;
                let n = parse_usize(ln, it.next().unwrap_or(""))?;
                if it.next().is_some() {
                    return perr(ln, "trailing tokens after cells line");
                }
                if d != counts.len() {
                    return perr(ln, format!("cells lines out of order at dimension {d}"));
                }
                counts.push(n);
            }
            "boundary" => {
                let (id_part, entries_part) = match rest.split_once('=') {
                    Some((a, b)) => (a.trim(), b.trim()),
                    None => return perr(ln, "boundary line is missing '='"),
                };
                let id = parse_cell_id(ln, id_part)?;
                let mut chain = Vec::new();
                for tok in entries_part.split_whitespace() {
                    let (f, coeff) = match tok.split_once(':') {
                        Some((f, c)) => (f, c),
                        None => return perr(ln, format!("bad boundary entry {tok:?}")),
                    };
                    let f = parse_usize(ln, f)?;
                    let coeff: i64 = coeff
                        .parse()
                        .map_err(|_| TextFormatError::Parse {
                            line: ln,
                            msg: format!("bad coefficient {coeff:?}"),
                        })?;
                    chain.push((f, coeff));
                }
                boundaries.push((ln, id, chain));
            }
            "label" => {
                let (id_part, text) = rest.split_once(' ').unwrap_or((rest, ""));
                let id = parse_cell_id(ln, id_part)?;
                labels.push((id, text.to_string()));
            }
            other => return perr(ln, format!("unknown directive {other:?}")),
        }
    }

    if empty {
        if top.is_some() || !counts.is_empty() || !boundaries.is_empty() {
            return perr(0, "'empty' document must carry no other sections");
        }
        return Ok(CellComplex::empty());
    }
    let top = match top {
        Some(t) => t,
        None => return perr(0, "missing dim line"),
    };
    if counts.len() != top + 1 {
        return perr(
            0,
            format!("expected cells lines for dimensions 0..={top}, got {}", counts.len()),
        );
    }

    let mut chains: Vec<Vec<Option<Vec<(usize, i64)>>>> =
        counts.iter().map(|&n| vec![None; n]).collect();
    for (ln, id, chain) in boundaries {
        if id.dim == 0 {
            return perr(ln, "vertices cannot carry boundary lines");
        }
        if id.dim > top || id.idx >= counts[id.dim] {
            return perr(ln, format!("boundary for nonexistent cell {id}"));
        }
        if chains[id.dim][id.idx].is_some() {
            return perr(ln, format!("duplicate boundary line for cell {id}"));
        }
        chains[id.dim][id.idx] = Some(chain);
    }
    let mut label_of: Vec<Vec<Option<String>>> =
        counts.iter().map(|&n| vec![None; n]).collect();
    for (id, text) in labels {
        if id.dim > top || id.idx >= counts[id.dim] {
            return perr(0, format!("label for nonexistent cell {id}"));
        }
        label_of[id.dim][id.idx] = Some(text);
    }

    let mut b = ComplexBuilder::new();
    for d in 0..=top {
        for idx in 0..counts[d] {
            let chain = chains[d][idx].take().unwrap_or_default();
            b.add_cell(d, &chain, label_of[d][idx].take());
        }
    }
    Ok(b.build())
}

fn parse_usize(line: usize, s: &str) -> Result<usize, TextFormatError> {
    s.parse().map_err(|_| TextFormatError::Parse {
        line,
        msg: format!("expected a non-negative integer, got {s:?}"),
    })
}

fn parse_cell_id(line: usize, s: &str) -> Result<CellId, TextFormatError> {
    let (d, i) = match s.split_once(':') {
        Some(x) => x,
        None => return perr(line, format!("bad cell id {s:?} (expected dim:idx)")),
    };
    Ok(CellId::new(parse_usize(line, d)?, parse_usize(line, i)?))
}
