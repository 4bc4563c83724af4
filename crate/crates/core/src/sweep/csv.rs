//! Plain-text table output: `#` header lines, one column-name line, one
//! line per row.

use std::io::{self, Write};

use super::{Row, SweepResult};
use crate::scalar::Real;

/// Per-state column families, suffixed with the branch index.
pub const COLUMN_PREFIX: [&str; 3] = ["eps_", "p_", "szavg_"];

pub fn format_value<T: Real>(x: T) -> String {
    let v = x.as_f64();
    if v.is_nan() {
        "nan".into()
    } else {
        format!("{v:.16e}")
    }
}

fn nan() -> String {
    "nan".into()
}

pub fn column_names(dim: usize) -> Vec<String> {
    let mut cols = vec![
        "f_over_omega".to_string(),
        "density_kind".into(),
        "beta_hbar_omega".into(),
    ];
    for prefix in COLUMN_PREFIX {
        cols.extend((0..dim).map(|m| format!("{prefix}{m}")));
    }
    cols.extend(["m_quasithermal", "m_equilibrium", "skipped_terms"].map(String::from));
    cols
}

fn row_fields<T: Real>(row: &Row<T>, dim: usize) -> Vec<String> {
    let mut out = vec![format_value(row.f_over_omega)];
    match &row.bath {
        Some(b) => {
            out.push(b.density.kind().into());
            out.push(format_value(b.beta_hbar_omega));
        }
        None => {
            out.push("none".into());
            out.push(nan());
        }
    }
    let per_state = |v: Option<&Vec<T>>| -> Vec<String> {
        match v {
            Some(v) => v.iter().map(|x| format_value(*x)).collect(),
            None => vec![nan(); dim],
        }
    };
    let d = row.data();
    out.extend(per_state(d.map(|d| &d.quasienergies)));
    out.extend(per_state(d.and_then(|d| d.occupations.as_ref())));
    out.extend(per_state(d.map(|d| &d.time_averaged_sz)));
    let opt = |x: Option<T>| x.map(format_value).unwrap_or_else(nan);
    out.push(opt(d.and_then(|d| d.m_quasithermal)));
    out.push(opt(d.and_then(|d| d.m_equilibrium)));
    out.push(
        d.and_then(|d| d.diagnostics.as_ref())
            .map(|g| g.skipped_terms.to_string())
            .unwrap_or_else(|| "0".into()),
    );
    out
}

/// Write the header, the column line and all rows. Failed rows appear with
/// `nan` fields and a `# failed:` comment; rate diagnostics follow as
/// `# diag:` comments after the table.
pub fn write_csv<T: Real, W: Write>(
    result: &SweepResult<T>,
    extra_header: &[(String, String)],
    mut w: W,
) -> io::Result<()> {
    for (k, v) in result.header.iter().chain(extra_header) {
        writeln!(w, "# {k} = {v}")?;
    }
    for n in &result.notices {
        writeln!(w, "# notice: {n}")?;
    }
    writeln!(w, "{}", column_names(result.dim).join(","))?;
    for (i, row) in result.rows.iter().enumerate() {
        writeln!(w, "{}", row_fields(row, result.dim).join(","))?;
        if let Err(e) = &row.outcome {
            writeln!(w, "# failed: row {i}: {e}")?;
        }
    }
    for (i, row) in result.rows.iter().enumerate() {
        if let Some(g) = row.data().and_then(|d| d.diagnostics.as_ref()) {
            let l = g
                .contributing_l
                .map(|(a, b)| format!("{a}..{b}"))
                .unwrap_or_else(|| "none".into());
            writeln!(
                w,
                "# diag: row {i}: skipped_terms={} max_partial_rate={:e} contributing_l={l}",
                g.skipped_terms, g.max_partial_rate
            )?;
        }
    }
    Ok(())
}
