use std::fmt;
use std::str::FromStr;

use serde_json::{json, Value};
use syncmdp::adversarial::support_lasso_capped;
use syncmdp::region::{
    almost_sure_reach_region, mec_decomposition, pre, pre_lasso_capped, sure_reach_region,
    sure_safety_region,
};
use syncmdp::{Limits, Model, SupportSet};

use crate::analyze;
use crate::encode::set;
use crate::error::CliError;
use crate::report::{RegionReport, Report, REPORT_VERSION};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Region {
    Pre,
    PreLasso,
    Mec,
    Safety,
    Reach,
    AlmostSure,
    SupportLasso,
}

impl Region {
    pub const ALL: [Region; 7] = [
        Region::Pre,
        Region::PreLasso,
        Region::Mec,
        Region::Safety,
        Region::Reach,
        Region::AlmostSure,
        Region::SupportLasso,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Region::Pre => "pre",
            Region::PreLasso => "pre-lasso",
            Region::Mec => "mec",
            Region::Safety => "safety",
            Region::Reach => "reach",
            Region::AlmostSure => "almost-sure",
            Region::SupportLasso => "support-lasso",
        }
    }

    fn needs_set(self) -> bool {
        !matches!(self, Region::Mec | Region::SupportLasso)
    }
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Region {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Region::ALL
            .into_iter()
            .find(|r| r.name() == s)
            .ok_or_else(|| {
                let known: Vec<&str> = Region::ALL.iter().map(|r| r.name()).collect();
                format!(
                    "unknown region kind {s:?}; expected one of {}",
                    known.join(", ")
                )
            })
    }
}

/// A named target set; the empty name stands for the empty set.
fn named_set(model: &Model, name: &str) -> Result<SupportSet, CliError> {
    if name.is_empty() {
        Ok(model.mdp.empty_set())
    } else {
        analyze::target(model, name)
    }
}

pub fn regions(
    model: &Model,
    set_name: Option<&str>,
    which: Region,
    limits: &Limits,
) -> Result<Report, CliError> {
    let m = &model.mdp;
    let y = match (which.needs_set(), set_name) {
        (true, None) => return Err(CliError::Usage(format!("region {which} needs --set NAME"))),
        (true, Some(name)) => Some(named_set(model, name)?),
        (false, _) => None,
    };
    let result: Value = match which {
        Region::Pre => set(m, &pre(m, y.as_ref().unwrap())),
        Region::PreLasso => {
            let lasso = pre_lasso_capped(m, y.as_ref().unwrap(), limits.max_lasso)?;
            let supports: Vec<Value> = lasso.supports.iter().map(|s| set(m, s)).collect();
            json!({"supports": supports, "k": lasso.k, "r": lasso.r})
        }
        Region::Mec => {
            let ec = mec_decomposition(m);
            Value::Array(ec.components.iter().map(|c| set(m, c)).collect())
        }
        Region::Safety => set(m, &sure_safety_region(m, y.as_ref().unwrap())),
        Region::Reach => set(m, &sure_reach_region(m, y.as_ref().unwrap())),
        Region::AlmostSure => set(m, &almost_sure_reach_region(m, y.as_ref().unwrap())),
        Region::SupportLasso => {
            let lasso = support_lasso_capped(m, &model.initial.support(), limits.max_lasso)?;
            let supports: Vec<Value> = lasso.supports.iter().map(|s| set(m, s)).collect();
            json!({"supports": supports, "loop-start": lasso.loop_start, "period": lasso.period})
        }
    };
    Ok(Report {
        report_version: REPORT_VERSION,
        command: "regions".into(),
        model: analyze::summary(model, None, limits)?,
        matrix: Vec::new(),
        queries: Vec::new(),
        oracle: Vec::new(),
        regions: Some(RegionReport {
            which: which.name().to_string(),
            set: if which.needs_set() {
                set_name.map(str::to_string)
            } else {
                None
            },
            result,
        }),
    })
}
