//! CSV emission. Bodies are deterministic functions of the inputs; floats
//! use the shortest round-trip representation.

use nsn_ddu_core::{LqGameSpec, ParetoPoint, SweepRow, TraceRow};

/// Column names for the concatenated strategy vector: x1_1, x1_2, ...
pub fn strategy_columns(spec: &LqGameSpec) -> Vec<String> {
    let mut cols = Vec::with_capacity(spec.strategy_dim());
    for (i, l) in spec.leaders.iter().enumerate() {
        for k in 0..l.dim() {
            cols.push(format!("x{}_{}", i + 1, k + 1));
        }
    }
    cols
}

fn fmt(v: f64) -> String {
    format!("{v}")
}

fn join_floats(vals: &[f64]) -> String {
    vals.iter().map(|v| fmt(*v)).collect::<Vec<_>>().join(",")
}

pub fn trace_csv(spec: &LqGameSpec, trace: &[TraceRow]) -> String {
    let mut out = String::from("iter,");
    out.push_str(&strategy_columns(spec).join(","));
    out.push_str(",w,displacement\n");
    for row in trace {
        out.push_str(&row.iter.to_string());
        out.push(',');
        out.push_str(&join_floats(&row.x));
        out.push(',');
        out.push_str(&fmt(row.w));
        out.push(',');
        if let Some(d) = row.displacement {
            out.push_str(&fmt(d));
        }
        out.push('\n');
    }
    out
}

/// Sweep table; `ddu_ge_diu` compares the weighted sums of the paired rows
/// at the same weight and is only present when both regimes were swept.
pub fn sweep_csv(spec: &LqGameSpec, rows: &[SweepRow], both: bool) -> String {
    let n = spec.n_leaders();
    let m = spec.n_followers();
    let mut header = String::from("lambda,regime,");
    header.push_str(&strategy_columns(spec).join(","));
    header.push_str(",w");
    for j in 0..m {
        header.push_str(&format!(",y{}", j + 1));
    }
    for i in 0..n {
        header.push_str(&format!(",f{}", i + 1));
    }
    header.push_str(",weighted,verdict");
    if both {
        header.push_str(",ddu_ge_diu");
    }
    header.push('\n');

    let mut out = header;
    let blank_numeric = spec.strategy_dim() + 1 + m + n + 1;
    for row in rows {
        out.push_str(&fmt(row.lambda));
        out.push(',');
        out.push_str(&row.regime.to_string());
        match &row.solution {
            Some(sol) => {
                out.push(',');
                out.push_str(&join_floats(&sol.x));
                out.push(',');
                out.push_str(&fmt(sol.w));
                out.push(',');
                out.push_str(&join_floats(&sol.y));
                out.push(',');
                out.push_str(&join_floats(&sol.payoffs));
                out.push(',');
                out.push_str(&fmt(sol.weighted));
                out.push(',');
                out.push_str(&sol.verdict.to_string());
            }
            None => {
                for _ in 0..blank_numeric {
                    out.push(',');
                }
                out.push(',');
                let msg = row.error.clone().unwrap_or_else(|| "error".into());
                out.push_str(&format!("error({})", msg.replace(',', ";")));
            }
        }
        if both {
            out.push(',');
            let pair = rows.iter().find(|r| {
                r.lambda == row.lambda && r.regime != row.regime
            });
            if let (Some(a), Some(b)) = (
                row.solution.as_ref(),
                pair.and_then(|p| p.solution.as_ref()),
            ) {
                let (ddu_w, diu_w) = if row.regime == nsn_ddu_core::Regime::Ddu {
                    (a.weighted, b.weighted)
                } else {
                    (b.weighted, a.weighted)
                };
                out.push_str(if ddu_w >= diu_w - 1e-9 { "true" } else { "false" });
            }
        }
        out.push('\n');
    }
    out
}

pub fn pareto_csv(spec: &LqGameSpec, points: &[ParetoPoint]) -> String {
    let mut out = String::from("w");
    for i in 0..spec.n_leaders() {
        out.push_str(&format!(",f{}", i + 1));
    }
    out.push_str(",nondominated\n");
    for p in points {
        out.push_str(&fmt(p.w));
        out.push(',');
        out.push_str(&join_floats(&p.f));
        out.push(',');
        out.push_str(if p.nondominated { "true" } else { "false" });
        out.push('\n');
    }
    out
}
