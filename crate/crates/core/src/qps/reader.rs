use std::collections::HashMap;

use log::warn;

use crate::error::{Error, Result};
use crate::model::{RawProblem, SparseMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Section {
    None,
    Rows,
    Columns,
    Rhs,
    Ranges,
    Bounds,
    QuadObj,
    QMatrix,
    ObjSense,
    End,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum RowKind {
    L,
    G,
    E,
}

struct Builder {
    name: Option<String>,
    objective: Option<String>,
    dropped_free_rows: Vec<String>,
    rows: HashMap<String, usize>,
    row_names: Vec<String>,
    row_kinds: Vec<RowKind>,
    rhs: Vec<f64>,
    ranges: Vec<Option<f64>>,
    cols: HashMap<String, usize>,
    col_names: Vec<String>,
    c: Vec<f64>,
    a: Vec<(usize, usize, f64)>,
    q: Vec<(usize, usize, f64)>,
    var_lower: Vec<f64>,
    var_upper: Vec<f64>,
    objective_constant: f64,
}

fn err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, message: message.into() }
}

fn number(tok: &str, line: usize) -> Result<f64> {
    let v: f64 = tok.parse().map_err(|_| err(line, format!("invalid number '{tok}'")))?;
    if v.is_nan() {
        return Err(err(line, "NaN value"));
    }
    Ok(v)
}

impl Builder {
    fn col(&self, name: &str, line: usize) -> Result<usize> {
        self.cols.get(name).copied().ok_or_else(|| err(line, format!("undeclared column '{name}'")))
    }

    /// `Ok(None)` for the objective and dropped free rows.
    fn row(&self, name: &str, line: usize) -> Result<Option<usize>> {
        if self.objective.as_deref() == Some(name) || self.dropped_free_rows.iter().any(|r| r == name) {
            return Ok(None);
        }
        self.rows.get(name).copied().map(Some).ok_or_else(|| err(line, format!("undeclared row '{name}'")))
    }

    /// Row/value pairs from a COLUMNS, RHS or RANGES line; `skip` leading
    /// tokens are names.
    fn pairs<'t>(&self, toks: &'t [&'t str], skip: usize, line: usize) -> Result<Vec<(&'t str, f64)>> {
        let rest = &toks[skip..];
        if rest.is_empty() || rest.len() % 2 != 0 {
            return Err(err(line, "expected row/value pairs"));
        }
        rest.chunks(2).map(|p| Ok((p[0], number(p[1], line)?))).collect()
    }
}

/// Parses QPS text (free-format MPS plus `QUADOBJ`/`QMATRIX`).
///
/// The objective is `½xᵀQx + cᵀx + constant`. `QUADOBJ` lists the lower
/// triangle of `Q` and is mirrored; `QMATRIX` lists every entry. The
/// constant is the negated RHS of the objective row. Without a `BOUNDS`
/// entry a column is `x ≥ 0`.
pub fn parse_qps(text: &str) -> Result<RawProblem> {
    let mut b = Builder {
        name: None,
        objective: None,
        dropped_free_rows: Vec::new(),
        rows: HashMap::new(),
        row_names: Vec::new(),
        row_kinds: Vec::new(),
        rhs: Vec::new(),
        ranges: Vec::new(),
        cols: HashMap::new(),
        col_names: Vec::new(),
        c: Vec::new(),
        a: Vec::new(),
        q: Vec::new(),
        var_lower: Vec::new(),
        var_upper: Vec::new(),
        objective_constant: 0.0,
    };
    let mut section = Section::None;
    let mut saw_name = false;

    for (idx, raw_line) in text.lines().enumerate() {
        let line = idx + 1;
        if raw_line.trim().is_empty() || raw_line.starts_with('*') {
            continue;
        }
        let toks: Vec<&str> = raw_line.split_whitespace().collect();
        let header = !raw_line.starts_with(|c: char| c.is_whitespace());
        if header {
            let keyword = toks[0].to_ascii_uppercase();
            section = match keyword.as_str() {
                "NAME" => {
                    if saw_name {
                        return Err(err(line, "duplicate NAME section"));
                    }
                    saw_name = true;
                    b.name = toks.get(1).map(|s| s.to_string());
                    Section::None
                }
                "ROWS" => Section::Rows,
                "COLUMNS" => Section::Columns,
                "RHS" => Section::Rhs,
                "RANGES" => Section::Ranges,
                "BOUNDS" => Section::Bounds,
                "QUADOBJ" | "QSECTION" => Section::QuadObj,
                "QMATRIX" => Section::QMatrix,
                "OBJSENSE" => {
                    if let Some(sense) = toks.get(1) {
                        check_sense(sense, line)?;
                    }
                    Section::ObjSense
                }
                "ENDATA" => Section::End,
                other => return Err(err(line, format!("unknown section '{other}'"))),
            };
            if section == Section::End {
                break;
            }
            continue;
        }

        match section {
            Section::None | Section::End => return Err(err(line, "data line outside of a section")),
            Section::ObjSense => check_sense(toks[0], line)?,
            Section::Rows => {
                if toks.len() != 2 {
                    return Err(err(line, "ROWS entry needs a type and a name"));
                }
                let name = toks[1].to_string();
                if b.rows.contains_key(&name) || b.objective.as_deref() == Some(&name) {
                    return Err(err(line, format!("duplicate row '{name}'")));
                }
                let kind = match toks[0].to_ascii_uppercase().as_str() {
                    "N" => {
                        if b.objective.is_none() {
                            b.objective = Some(name);
                        } else {
                            b.dropped_free_rows.push(name);
                        }
                        continue;
                    }
                    "L" => RowKind::L,
                    "G" => RowKind::G,
                    "E" => RowKind::E,
                    other => return Err(err(line, format!("unknown row type '{other}'"))),
                };
                b.rows.insert(name.clone(), b.row_names.len());
                b.row_names.push(name);
                b.row_kinds.push(kind);
                b.rhs.push(0.0);
                b.ranges.push(None);
            }
            Section::Columns => {
                if toks.iter().any(|t| t.eq_ignore_ascii_case("'MARKER'")) {
                    continue;
                }
                let name = toks[0];
                let j = match b.cols.get(name) {
                    Some(&j) => j,
                    None => {
                        let j = b.col_names.len();
                        b.cols.insert(name.to_string(), j);
                        b.col_names.push(name.to_string());
                        b.c.push(0.0);
                        b.var_lower.push(0.0);
                        b.var_upper.push(f64::INFINITY);
                        j
                    }
                };
                for (row, v) in b.pairs(&toks, 1, line)? {
                    if b.objective.as_deref() == Some(row) {
                        b.c[j] += v;
                    } else if let Some(i) = b.row(row, line)? {
                        b.a.push((i, j, v));
                    }
                }
            }
            Section::Rhs | Section::Ranges => {
                let skip = if toks.len() % 2 == 1 { 1 } else { 0 };
                for (row, v) in b.pairs(&toks, skip, line)? {
                    if b.objective.as_deref() == Some(row) {
                        if section == Section::Rhs {
                            b.objective_constant = -v;
                        }
                        continue;
                    }
                    if let Some(i) = b.row(row, line)? {
                        if section == Section::Rhs {
                            b.rhs[i] = v;
                        } else {
                            b.ranges[i] = Some(v);
                        }
                    }
                }
            }
            Section::Bounds => {
                let kind = toks[0].to_ascii_uppercase();
                let needs_value = matches!(kind.as_str(), "UP" | "LO" | "FX");
                let (col, value) = match (needs_value, toks.len()) {
                    (true, 4) => (toks[2], Some(number(toks[3], line)?)),
                    (true, 3) => (toks[1], Some(number(toks[2], line)?)),
                    (false, 3) => (toks[2], None),
                    (false, 2) => (toks[1], None),
                    _ => return Err(err(line, "malformed BOUNDS entry")),
                };
                let j = b.col(col, line)?;
                match (kind.as_str(), value) {
                    ("UP", Some(v)) => {
                        if v < 0.0 && b.var_lower[j] == 0.0 {
                            warn!("line {line}: negative upper bound on '{col}' with default lower bound; lower set to -inf");
                            b.var_lower[j] = f64::NEG_INFINITY;
                        }
                        b.var_upper[j] = v;
                    }
                    ("LO", Some(v)) => b.var_lower[j] = v,
                    ("FX", Some(v)) => {
                        b.var_lower[j] = v;
                        b.var_upper[j] = v;
                    }
                    ("FR", None) => {
                        b.var_lower[j] = f64::NEG_INFINITY;
                        b.var_upper[j] = f64::INFINITY;
                    }
                    ("MI", None) => b.var_lower[j] = f64::NEG_INFINITY,
                    ("PL", None) => b.var_upper[j] = f64::INFINITY,
                    ("BV" | "LI" | "UI" | "SC", _) => {
                        return Err(err(line, format!("integer bound type '{kind}' is not supported")))
                    }
                    _ => return Err(err(line, format!("unknown bound type '{kind}'"))),
                }
            }
            Section::QuadObj | Section::QMatrix => {
                if toks.len() != 3 {
                    return Err(err(line, "quadratic entry needs two columns and a value"));
                }
                let i = b.col(toks[0], line)?;
                let j = b.col(toks[1], line)?;
                let v = number(toks[2], line)?;
                b.q.push((i, j, v));
                if section == Section::QuadObj && i != j {
                    b.q.push((j, i, v));
                }
            }
        }
    }

    if b.objective.is_none() && b.col_names.is_empty() && b.row_names.is_empty() {
        return Err(err(text.lines().count().max(1), "no problem data"));
    }

    let n = b.col_names.len();
    let m = b.row_names.len();
    let mut row_lower = vec![f64::NEG_INFINITY; m];
    let mut row_upper = vec![f64::INFINITY; m];
    for i in 0..m {
        let rhs = b.rhs[i];
        let (lo, hi) = match (b.row_kinds[i], b.ranges[i]) {
            (RowKind::L, None) => (f64::NEG_INFINITY, rhs),
            (RowKind::G, None) => (rhs, f64::INFINITY),
            (RowKind::E, None) => (rhs, rhs),
            (RowKind::L, Some(r)) => (rhs - r.abs(), rhs),
            (RowKind::G, Some(r)) => (rhs, rhs + r.abs()),
            (RowKind::E, Some(r)) if r >= 0.0 => (rhs, rhs + r),
            (RowKind::E, Some(r)) => (rhs + r, rhs),
        };
        row_lower[i] = lo;
        row_upper[i] = hi;
    }

    Ok(RawProblem {
        name: b.name.unwrap_or_default(),
        var_names: b.col_names,
        row_names: b.row_names,
        q: SparseMatrix::from_triplets(n, n, &b.q)?,
        c: b.c,
        objective_constant: b.objective_constant,
        a: SparseMatrix::from_triplets(m, n, &b.a)?,
        row_lower,
        row_upper,
        var_lower: b.var_lower,
        var_upper: b.var_upper,
    })
}

fn check_sense(sense: &str, line: usize) -> Result<()> {
    match sense.to_ascii_uppercase().as_str() {
        "MIN" | "MINIMIZE" => Ok(()),
        other => Err(err(line, format!("objective sense '{other}' is not supported"))),
    }
}
