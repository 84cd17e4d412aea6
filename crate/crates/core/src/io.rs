//! Plain-text formats for chains, forms and cells.
//!
//! All formats are line based; `#` starts a comment and blank lines are
//! ignored. Index sets are written 1-based.
//!
//! Chain files start with a header `n k`, followed by one term per line:
//!
//! ```text
//! 2 1
//! 0.1 0   | 1 0
//! 0 0     | [1]=-1
//! 0.5 0.5 | 0 1 | 1 0; 0 1
//! ```
//!
//! The first field is the point, the second the k-vector (either all C(n,k)
//! coefficients in lexicographic basis order, or sparse `[i,j]=c` entries,
//! `[]=c` for k = 0), and the optional third field lists dipole directions
//! separated by `;`.
//!
//! Form files list atoms, optionally after an `n k` header:
//!
//! ```text
//! trig 0.5 1 2 sin+0.3 1
//! poly 1 1 0 2
//! ```
//!
//! `trig c ξ1..ξn phase I` is `c·trig(ξ·x + φ) dx_I` with phase `sin`, `cos`,
//! `sin+φ` or `cos-φ`; `poly c e1..en I` is `c·x^e dx_I`. `I` is a comma
//! separated index set, or `-` for 0-forms.
//!
//! Cell files give the kind (`segment`, `simplex`, `box`, `curve`), one
//! vertex per line, and an optional `orientation ±1` line. For boxes the
//! rows are a corner followed by its k adjacent corners.

use std::fmt::Write as _;
use std::path::Path;

use crate::approx::{Cell, CellKind};
use crate::chains::{DipoleChain, PointedChain, DEFAULT_R_MAX};
use crate::error::{Error, Result};
use crate::exterior::{basis, binomial, KVector};
use crate::forms::{Atom, FormSpec, Phase, TrigKind};
use crate::norms::DifferenceCell;

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

/// Non-empty, comment-stripped lines with 1-based line numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let line = raw.split('#').next().unwrap_or("").trim();
        (!line.is_empty()).then_some((i + 1, line))
    })
}

fn parse_f64(tok: &str, line: usize) -> Result<f64> {
    let x: f64 = tok.parse().map_err(|_| parse_err(line, format!("expected a number, found `{tok}`")))?;
    if !x.is_finite() {
        return Err(parse_err(line, format!("non-finite number `{tok}`")));
    }
    Ok(x)
}

fn parse_usize(tok: &str, line: usize) -> Result<usize> {
    tok.parse().map_err(|_| parse_err(line, format!("expected a non-negative integer, found `{tok}`")))
}

fn parse_numbers(field: &str, line: usize) -> Result<Vec<f64>> {
    field.split_whitespace().map(|t| parse_f64(t, line)).collect()
}

fn parse_header(line_no: usize, line: &str) -> Result<(usize, usize)> {
    let toks: Vec<&str> = line.split_whitespace().collect();
    if toks.len() != 2 {
        return Err(parse_err(line_no, "header must be `n k`"));
    }
    let (n, k) = (parse_usize(toks[0], line_no)?, parse_usize(toks[1], line_no)?);
    if k > n {
        return Err(parse_err(line_no, format!("grade {k} exceeds dimension {n}")));
    }
    Ok((n, k))
}

/// 1-based, comma separated index set (`-` or empty for the empty set).
fn parse_index_set(tok: &str, line: usize) -> Result<Vec<usize>> {
    let tok = tok.trim();
    if tok.is_empty() || tok == "-" {
        return Ok(Vec::new());
    }
    tok.split(',')
        .map(|t| {
            let i = parse_usize(t.trim(), line)?;
            if i == 0 {
                return Err(parse_err(line, "index sets are 1-based"));
            }
            Ok(i - 1)
        })
        .collect()
}

fn format_index_set(set: &[usize]) -> String {
    if set.is_empty() {
        "-".into()
    } else {
        set.iter().map(|i| (i + 1).to_string()).collect::<Vec<_>>().join(",")
    }
}

fn parse_kvector(field: &str, n: usize, k: usize, line: usize) -> Result<KVector> {
    let wrap = |e: Error| parse_err(line, e.to_string());
    if field.contains('[') {
        let mut pairs = Vec::new();
        for tok in field.split_whitespace() {
            let (set, value) =
                tok.split_once('=').ok_or_else(|| parse_err(line, format!("expected `[I]=c`, found `{tok}`")))?;
            let inner = set
                .strip_prefix('[')
                .and_then(|s| s.strip_suffix(']'))
                .ok_or_else(|| parse_err(line, format!("malformed index set `{set}`")))?;
            pairs.push((parse_index_set(inner, line)?, parse_f64(value, line)?));
        }
        KVector::from_pairs(n, k, &pairs).map_err(wrap)
    } else {
        let coeffs = parse_numbers(field, line)?;
        if coeffs.len() != binomial(n, k) {
            return Err(parse_err(
                line,
                format!("expected {} k-vector coefficients, found {}", binomial(n, k), coeffs.len()),
            ));
        }
        KVector::new(n, k, coeffs).map_err(wrap)
    }
}

fn format_kvector(a: &KVector) -> String {
    let n = a.dim();
    let parts: Vec<String> = basis(n, a.grade())
        .iter()
        .zip(a.coeffs())
        .filter(|(_, c)| **c != 0.0)
        .map(|(set, c)| {
            let inner = set.iter().map(|i| (i + 1).to_string()).collect::<Vec<_>>().join(",");
            format!("[{inner}]={c}")
        })
        .collect();
    if parts.is_empty() {
        format!("[{}]=0", (1..=a.grade()).map(|i| i.to_string()).collect::<Vec<_>>().join(","))
    } else {
        parts.join(" ")
    }
}

fn format_point(p: &[f64]) -> String {
    p.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

/// Parses a chain file. Terms with directions make it a dipole chain.
pub fn parse_dipole_chain(text: &str) -> Result<DipoleChain> {
    let mut lines = content_lines(text);
    let (hline, header) = lines.next().ok_or_else(|| parse_err(1, "missing `n k` header"))?;
    let (n, k) = parse_header(hline, header)?;
    let mut rows = Vec::new();
    for (line, text) in lines {
        let fields: Vec<&str> = text.split('|').collect();
        if fields.len() < 2 || fields.len() > 3 {
            return Err(parse_err(line, "term must be `point | k-vector [| directions]`"));
        }
        let point = parse_numbers(fields[0], line)?;
        if point.len() != n {
            return Err(parse_err(line, format!("point has {} coordinates, expected {n}", point.len())));
        }
        let vector = parse_kvector(fields[1], n, k, line)?;
        let mut dirs = Vec::new();
        if let Some(d) = fields.get(2) {
            for dir in d.split(';').filter(|s| !s.trim().is_empty()) {
                let v = parse_numbers(dir, line)?;
                if v.len() != n {
                    return Err(parse_err(line, format!("direction has {} coordinates, expected {n}", v.len())));
                }
                dirs.push(v);
            }
        }
        rows.push((line, point, vector, dirs));
    }
    let r_max = rows.iter().map(|r| r.3.len()).max().unwrap_or(0).max(DEFAULT_R_MAX);
    let mut chain = DipoleChain::new(n, k, r_max).map_err(|e| parse_err(hline, e.to_string()))?;
    for (line, point, vector, dirs) in rows {
        chain.push(&point, vector, dirs).map_err(|e| parse_err(line, e.to_string()))?;
    }
    Ok(chain)
}

/// Parses a chain file that must not contain dipole directions.
pub fn parse_chain(text: &str) -> Result<PointedChain> {
    let chain = parse_dipole_chain(text)?;
    match chain.to_pointed() {
        Some(a) => Ok(a),
        None => {
            let line = content_lines(text)
                .skip(1)
                .find(|(_, l)| l.split('|').nth(2).is_some_and(|d| !d.trim().is_empty()))
                .map_or(1, |(i, _)| i);
            Err(parse_err(line, "dipole directions are not allowed here; expected a pointed chain"))
        }
    }
}

pub fn format_chain(a: &PointedChain) -> String {
    let mut out = format!("{} {}\n", a.dim(), a.grade());
    for t in a.terms() {
        let _ = writeln!(out, "{} | {}", format_point(&t.point), format_kvector(&t.vector));
    }
    out
}

pub fn format_dipole_chain(a: &DipoleChain) -> String {
    let mut out = format!("{} {}\n", a.dim(), a.grade());
    for t in a.terms() {
        let dirs: Vec<String> = t.dirs.iter().map(|d| format_point(d)).collect();
        let _ = write!(out, "{} | {}", format_point(&t.point), format_kvector(&t.vector));
        if !dirs.is_empty() {
            let _ = write!(out, " | {}", dirs.join("; "));
        }
        out.push('\n');
    }
    out
}

fn parse_phase(tok: &str, line: usize) -> Result<Phase> {
    let (name, rest) = tok.split_at(tok.len().min(3));
    let kind = match name {
        "sin" => TrigKind::Sin,
        "cos" => TrigKind::Cos,
        _ => return Err(parse_err(line, format!("phase must start with `sin` or `cos`, found `{tok}`"))),
    };
    let offset = if rest.is_empty() {
        0.0
    } else if rest.starts_with('+') || rest.starts_with('-') {
        parse_f64(rest, line)?
    } else {
        return Err(parse_err(line, format!("malformed phase `{tok}`")));
    };
    Ok(Phase { kind, offset })
}

fn format_phase(p: &Phase) -> String {
    let name = match p.kind {
        TrigKind::Sin => "sin",
        TrigKind::Cos => "cos",
    };
    if p.offset == 0.0 {
        name.into()
    } else if p.offset > 0.0 {
        format!("{name}+{}", p.offset)
    } else {
        format!("{name}{}", p.offset)
    }
}

fn parse_atom(toks: &[&str], line: usize) -> Result<Atom> {
    let bad = |what: &str| parse_err(line, format!("malformed {what} atom"));
    match toks.first().copied() {
        Some("trig") => {
            if toks.len() < 5 {
                return Err(bad("trig"));
            }
            let n = toks.len() - 4;
            Ok(Atom::Trig {
                amplitude: parse_f64(toks[1], line)?,
                frequency: toks[2..2 + n].iter().map(|t| parse_f64(t, line)).collect::<Result<_>>()?,
                phase: parse_phase(toks[2 + n], line)?,
                index: parse_index_set(toks[3 + n], line)?,
            })
        }
        Some("poly") => {
            if toks.len() < 4 {
                return Err(bad("poly"));
            }
            let n = toks.len() - 3;
            let exponents = toks[2..2 + n]
                .iter()
                .map(|t| t.parse::<u32>().map_err(|_| parse_err(line, format!("bad exponent `{t}`"))))
                .collect::<Result<_>>()?;
            Ok(Atom::Poly { coeff: parse_f64(toks[1], line)?, exponents, index: parse_index_set(toks[2 + n], line)? })
        }
        Some(other) => Err(parse_err(line, format!("unknown atom kind `{other}`"))),
        None => Err(parse_err(line, "empty atom")),
    }
}

fn atom_dim(atom: &Atom) -> usize {
    match atom {
        Atom::Trig { frequency, .. } => frequency.len(),
        Atom::Poly { exponents, .. } => exponents.len(),
    }
}

pub fn parse_form(text: &str) -> Result<FormSpec> {
    let mut header = None;
    let mut atoms = Vec::new();
    for (line, l) in content_lines(text) {
        let toks: Vec<&str> = l.split_whitespace().collect();
        if header.is_none() && atoms.is_empty() && toks.len() == 2 && toks[0].parse::<usize>().is_ok() {
            header = Some(parse_header(line, l)?);
            continue;
        }
        atoms.push((line, parse_atom(&toks, line)?));
    }
    let (n, k) = match header {
        Some(h) => h,
        None => {
            let (_, first) = atoms.first().ok_or_else(|| parse_err(1, "empty form needs an `n k` header"))?;
            (atom_dim(first), first.index().len())
        }
    };
    let mut form = FormSpec::new(n, k).map_err(|e| parse_err(1, e.to_string()))?;
    for (line, atom) in atoms {
        form.push(atom).map_err(|e| parse_err(line, e.to_string()))?;
    }
    Ok(form)
}

pub fn format_form(w: &FormSpec) -> String {
    let mut out = format!("{} {}\n", w.dim(), w.grade());
    for atom in w.atoms() {
        match atom {
            Atom::Trig { amplitude, frequency, phase, index } => {
                let _ = writeln!(
                    out,
                    "trig {amplitude} {} {} {}",
                    format_point(frequency),
                    format_phase(phase),
                    format_index_set(index)
                );
            }
            Atom::Poly { coeff, exponents, index } => {
                let e: Vec<String> = exponents.iter().map(|x| x.to_string()).collect();
                let _ = writeln!(out, "poly {coeff} {} {}", e.join(" "), format_index_set(index));
            }
        }
    }
    out
}

pub fn parse_cell(text: &str) -> Result<Cell> {
    let mut lines = content_lines(text);
    let (kline, kind) = lines.next().ok_or_else(|| parse_err(1, "missing cell kind"))?;
    let kind: CellKind = kind.parse().map_err(|e: Error| parse_err(kline, e.to_string()))?;
    let mut vertices = Vec::new();
    let mut orientation = 1.0;
    let mut last = kline;
    for (line, l) in lines {
        last = line;
        if let Some(rest) = l.strip_prefix("orientation") {
            orientation = parse_f64(rest.trim(), line)?;
            continue;
        }
        let v = parse_numbers(l, line)?;
        if let Some(first) = vertices.first() {
            let first: &Vec<f64> = first;
            if v.len() != first.len() {
                return Err(parse_err(line, format!("vertex has {} coordinates, expected {}", v.len(), first.len())));
            }
        }
        vertices.push(v);
    }
    Cell::new(kind, vertices, orientation).map_err(|e| parse_err(last, e.to_string()))
}

pub fn format_cell(c: &Cell) -> String {
    let mut out = format!("{}\n", c.kind().name());
    for v in c.vertices() {
        let _ = writeln!(out, "{}", format_point(v));
    }
    let _ = writeln!(out, "orientation {}", c.orientation());
    out
}

/// Writes difference cells as a chain file: each cell is a comment line
/// followed by its 2^j signed corner terms, so reading the file back yields
/// the chain the cells decompose.
pub fn format_cells(n: usize, k: usize, cells: &[DifferenceCell]) -> String {
    let mut out = format!("{n} {k}\n");
    for (i, c) in cells.iter().enumerate() {
        let steps: Vec<String> = c.steps.iter().map(|s| format_point(s)).collect();
        let _ = writeln!(out, "# cell {i}: order {} weight {} steps [{}]", c.order(), c.weight(), steps.join("; "));
        for (p, a) in c.expand() {
            let _ = writeln!(out, "{} | {}", format_point(&p), format_kvector(&a));
        }
    }
    out
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::InvalidArgument(format!("cannot read {}: {e}", path.display())))
}

pub fn read_chain(path: &Path) -> Result<PointedChain> {
    parse_chain(&read(path)?)
}

pub fn read_dipole_chain(path: &Path) -> Result<DipoleChain> {
    parse_dipole_chain(&read(path)?)
}

pub fn read_form(path: &Path) -> Result<FormSpec> {
    parse_form(&read(path)?)
}

pub fn read_cell(path: &Path) -> Result<Cell> {
    parse_cell(&read(path)?)
}
