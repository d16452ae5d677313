use std::fmt::Write;

use crate::model::QuadraticProgram;

const OBJ: &str = "OBJ";

fn num(v: f64) -> String {
    // Rust's shortest round-trip formatting; exponent form keeps extreme
    // magnitudes short.
    let a = v.abs();
    if v == 0.0 || (1e-4..1e15).contains(&a) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

/// Writes `p` in canonical form: `L` rows `R<i>` for `A_ineq`, `E` rows
/// `E<i>` for `A_eq`, every column free, `Q` as a lower-triangle `QUADOBJ`.
pub fn write_qps(p: &QuadraticProgram) -> String {
    let names: Vec<String> = match &p.var_names {
        Some(v) => v.clone(),
        None => (0..p.n()).map(|j| format!("X{j}")).collect(),
    };
    let ineq_name = |i: usize| format!("R{i}");
    let eq_name = |i: usize| format!("E{i}");
    let mut out = String::new();
    let name = if p.name.trim().is_empty() { "UNNAMED".to_string() } else { p.name.split_whitespace().collect::<Vec<_>>().join("_") };
    writeln!(out, "NAME {name}").unwrap();
    out.push_str("ROWS\n");
    writeln!(out, " N {OBJ}").unwrap();
    for i in 0..p.m_ineq() {
        writeln!(out, " L {}", ineq_name(i)).unwrap();
    }
    for i in 0..p.m_eq() {
        writeln!(out, " E {}", eq_name(i)).unwrap();
    }

    out.push_str("COLUMNS\n");
    for (j, col) in names.iter().enumerate() {
        let mut wrote = false;
        if p.c[j] != 0.0 {
            writeln!(out, " {col} {OBJ} {}", num(p.c[j])).unwrap();
            wrote = true;
        }
        for (i, v) in p.a_ineq.col(j) {
            writeln!(out, " {col} {} {}", ineq_name(i), num(v)).unwrap();
            wrote = true;
        }
        for (i, v) in p.a_eq.col(j) {
            writeln!(out, " {col} {} {}", eq_name(i), num(v)).unwrap();
            wrote = true;
        }
        if !wrote {
            writeln!(out, " {col} {OBJ} 0").unwrap();
        }
    }

    out.push_str("RHS\n");
    if p.objective_constant != 0.0 {
        writeln!(out, " RHS {OBJ} {}", num(-p.objective_constant)).unwrap();
    }
    for (i, v) in p.b_ineq.iter().enumerate().filter(|(_, v)| **v != 0.0) {
        writeln!(out, " RHS {} {}", ineq_name(i), num(*v)).unwrap();
    }
    for (i, v) in p.b_eq.iter().enumerate().filter(|(_, v)| **v != 0.0) {
        writeln!(out, " RHS {} {}", eq_name(i), num(*v)).unwrap();
    }

    out.push_str("BOUNDS\n");
    for col in &names {
        writeln!(out, " FR BND {col}").unwrap();
    }

    if !p.q.is_empty() {
        out.push_str("QUADOBJ\n");
        for j in 0..p.n() {
            for (i, v) in p.q.col(j).filter(|(i, _)| *i >= j) {
                writeln!(out, " {} {} {}", names[i], names[j], num(v)).unwrap();
            }
        }
    }
    out.push_str("ENDATA\n");
    out
}
