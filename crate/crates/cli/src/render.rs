//! Plain-text rendering of reports.

use std::fmt::Write;

use serde_json::Value;

use crate::report::{CheckResult, MatrixRow, Report, Status};

fn cell(v: Option<bool>) -> &'static str {
    match v {
        Some(true) => "yes",
        Some(false) => "no",
        None => "-",
    }
}

fn row(r: &MatrixRow) -> [&'static str; 5] {
    [
        cell(r.sure),
        cell(r.almost_sure),
        cell(r.limit_sure),
        cell(r.positive),
        cell(r.bounded),
    ]
}

fn check_line(out: &mut String, c: &CheckResult) {
    let mark = match c.status {
        Status::Pass => "PASS",
        Status::Fail => "FAIL",
        Status::Skipped => "SKIP",
    };
    let _ = write!(out, "  {mark}  {}", c.name);
    if let Some(i) = c.index {
        let _ = write!(out, " [at {i}]");
    }
    if let Some(g) = c.gap {
        let _ = write!(out, " gap {g:.6}");
    }
    if let Some(e) = c.epsilon_log10 {
        let _ = write!(out, " eps 10^{e:.2}");
    }
    if let Some(n) = &c.note {
        let _ = write!(out, " ({n})");
    }
    out.push('\n');
}

fn names(v: &[String]) -> String {
    format!("{{{}}}", v.join(", "))
}

pub fn text(r: &Report) -> String {
    let mut out = String::new();
    let s = &r.model;
    let _ = writeln!(
        out,
        "model: {} states, {} actions, alpha = {}, alpha0 = {}",
        s.states, s.actions, s.alpha, s.alpha0
    );
    let _ = writeln!(out, "initial support: {}", names(&s.initial));
    if let (Some(t), Some(ts)) = (&s.target, &s.target_states) {
        let _ = writeln!(out, "target {t}: {}", names(ts));
    }
    let ecs: Vec<String> = s.end_components.iter().map(|c| names(c)).collect();
    let _ = writeln!(out, "end components: [{}]", ecs.join(", "));
    let _ = writeln!(
        out,
        "support lasso: loop start {}, period {}",
        s.lasso.loop_start, s.lasso.period
    );
    if !r.matrix.is_empty() {
        let _ = writeln!(
            out,
            "\n{:<12}{:>6}{:>13}{:>12}{:>10}{:>9}",
            "", "sure", "almost-sure", "limit-sure", "positive", "bounded"
        );
        for m in &r.matrix {
            let c = row(m);
            let _ = writeln!(
                out,
                "{:<12}{:>6}{:>13}{:>12}{:>10}{:>9}",
                m.mode, c[0], c[1], c[2], c[3], c[4]
            );
        }
    }
    let bounded: Vec<_> = r.queries.iter().filter(|q| !q.bounds.is_empty()).collect();
    if !bounded.is_empty() {
        out.push_str("\nbounds:\n");
        for q in bounded {
            for b in &q.bounds {
                let value = match &b["exact"] {
                    Value::String(s) if s.len() <= 40 => s.clone(),
                    _ if b.get("pair").is_some() => format!("(first, gap) = {}", b["pair"]),
                    _ => match b["log10"].as_f64() {
                        Some(l) => format!("10^{l:.2}"),
                        None => "-".into(),
                    },
                };
                let _ = writeln!(
                    out,
                    "  {} {}: {} = {}",
                    q.win,
                    q.mode,
                    b["kind"].as_str().unwrap_or("?"),
                    value
                );
            }
        }
    }
    if let Some(reg) = &r.regions {
        let _ = write!(out, "\n{}", reg.which);
        if let Some(set) = &reg.set {
            let _ = write!(out, " of {set:?}");
        }
        let _ = writeln!(out, ": {}", reg.result);
    }
    if !r.oracle.is_empty() {
        out.push_str("\nchecks:\n");
        for c in &r.oracle {
            check_line(&mut out, c);
        }
        let failed = r.failed_checks().count();
        let _ = writeln!(out, "{} checks, {failed} failed", r.oracle.len());
    }
    out
}
