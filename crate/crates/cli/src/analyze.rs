use std::path::Path;

use syncmdp::adversarial::support_lasso_capped;
use syncmdp::bounds::attach_bounds;
use syncmdp::mdp::{min_initial_probability, min_positive_probability};
use syncmdp::oracle::default_horizon;
use syncmdp::rational::format_rational;
use syncmdp::region::mec_decomposition;
use syncmdp::{decide, parse_model, Limits, Model, SupportSet, SyncMode, Verdict, WinMode};

use crate::error::CliError;
use crate::gate::{self, Table};
use crate::report::{LassoSummary, MatrixRow, ModelSummary, Report, REPORT_VERSION};
use crate::{encode, witness};

pub fn load(path: &Path) -> Result<Model, CliError> {
    let shown = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: shown.clone(),
        source,
    })?;
    parse_model(&text).map_err(|source| CliError::Model {
        path: shown,
        source,
    })
}

pub fn target(model: &Model, name: &str) -> Result<SupportSet, CliError> {
    if name.is_empty() {
        return Err(CliError::Input("target name is empty".into()));
    }
    model.target(name).cloned().ok_or_else(|| {
        CliError::Input(format!(
            "unknown target {name:?}; the model defines {:?}",
            model.target_names()
        ))
    })
}

pub fn summary(
    model: &Model,
    target: Option<(&str, &SupportSet)>,
    limits: &Limits,
) -> Result<ModelSummary, CliError> {
    let m = &model.mdp;
    let s0 = model.initial.support();
    let lasso = support_lasso_capped(m, &s0, limits.max_lasso)?;
    Ok(ModelSummary {
        states: m.num_states(),
        actions: m.num_actions(),
        alpha: format_rational(&min_positive_probability(m)),
        alpha0: format_rational(&min_initial_probability(&model.initial, None).expect("nonempty")),
        initial: m.set_names(&s0),
        target: target.map(|(name, _)| name.to_string()),
        target_states: target.map(|(_, t)| m.set_names(t)),
        end_components: mec_decomposition(m)
            .components
            .iter()
            .map(|c| m.set_names(c))
            .collect(),
        lasso: LassoSummary {
            loop_start: lasso.loop_start,
            period: lasso.period,
        },
    })
}

/// Decides the requested cells, or the full matrix, with bounds attached.
pub fn verdicts(
    model: &Model,
    t: &SupportSet,
    query: Option<(SyncMode, WinMode)>,
    limits: &Limits,
) -> Result<Vec<Verdict>, CliError> {
    let m = &model.mdp;
    let s0 = model.initial.support();
    let cells: Vec<(SyncMode, WinMode)> = match query {
        Some(q) => vec![q],
        None => SyncMode::ALL
            .into_iter()
            .flat_map(|s| WinMode::ALL.into_iter().map(move |w| (s, w)))
            .collect(),
    };
    cells
        .into_iter()
        .map(|(s, w)| {
            let v = decide(m, s, w, t, &s0, limits)?;
            Ok(attach_bounds(v, m, &model.initial, limits))
        })
        .collect()
}

pub fn table(verdicts: &[Verdict]) -> Table {
    verdicts
        .iter()
        .map(|v| ((v.query.sync, v.query.win), v.answer))
        .collect()
}

/// Fails with the list of broken identities when the matrix is complete and
/// inconsistent.
pub fn gate(verdicts: &[Verdict]) -> Result<(), CliError> {
    if verdicts.len() < SyncMode::ALL.len() * WinMode::ALL.len() {
        return Ok(());
    }
    let bad = gate::violations(&table(verdicts));
    if bad.is_empty() {
        Ok(())
    } else {
        Err(CliError::Gate(bad))
    }
}

fn matrix(verdicts: &[Verdict]) -> Vec<MatrixRow> {
    let t = table(verdicts);
    let cell = |s, w| t.get(&(s, w)).copied();
    SyncMode::ALL
        .into_iter()
        .map(|s| MatrixRow {
            mode: s.name().to_string(),
            sure: cell(s, WinMode::Sure),
            almost_sure: cell(s, WinMode::AlmostSure),
            limit_sure: cell(s, WinMode::LimitSure),
            positive: cell(s, WinMode::Positive),
            bounded: cell(s, WinMode::Bounded),
        })
        .collect()
}

pub struct AnalyzeOptions {
    pub query: Option<(SyncMode, WinMode)>,
    pub horizon: Option<usize>,
    pub limits: Limits,
}

pub fn analyze(
    model: &Model,
    target_name: &str,
    opts: &AnalyzeOptions,
) -> Result<Report, CliError> {
    let t = target(model, target_name)?;
    let summary = summary(model, Some((target_name, &t)), &opts.limits)?;
    let vs = verdicts(model, &t, opts.query, &opts.limits)?;
    gate(&vs)?;
    let horizon = opts
        .horizon
        .unwrap_or_else(|| default_horizon(summary.lasso.loop_start + summary.lasso.period));
    let m = &model.mdp;
    Ok(Report {
        report_version: REPORT_VERSION,
        command: "analyze".into(),
        model: summary,
        matrix: matrix(&vs),
        queries: vs.iter().map(|v| encode::verdict(m, v)).collect(),
        oracle: witness::checks(m, &model.initial, &t, &vs, horizon),
        regions: None,
    })
}
