//! Internal consistency gate over a full verdict matrix.

use std::collections::HashMap;

use syncmdp::{SyncMode, WinMode};

pub type Table = HashMap<(SyncMode, WinMode), bool>;

/// Every identity and inclusion the matrix breaks; empty when consistent.
pub fn violations(table: &Table) -> Vec<String> {
    use SyncMode::*;
    use WinMode::*;
    let at = |s: SyncMode, w: WinMode| table[&(s, w)];
    let mut out = Vec::new();
    let mut need = |ok: bool, what: String| {
        if !ok {
            out.push(what);
        }
    };
    for w in WinMode::ALL {
        need(
            !at(Always, w) || at(Strongly, w),
            format!("{w}: always implies strongly"),
        );
        need(
            !at(Strongly, w) || at(Weakly, w),
            format!("{w}: strongly implies weakly"),
        );
        need(
            !at(Weakly, w) || at(Eventually, w),
            format!("{w}: weakly implies eventually"),
        );
    }
    for s in SyncMode::ALL {
        need(
            !at(s, Sure) || at(s, AlmostSure),
            format!("{s}: sure implies almost-sure"),
        );
        need(
            !at(s, AlmostSure) || at(s, LimitSure),
            format!("{s}: almost-sure implies limit-sure"),
        );
        need(
            !at(s, LimitSure) || at(s, Positive),
            format!("{s}: limit-sure implies positive"),
        );
        need(
            !at(s, Bounded) || at(s, Positive),
            format!("{s}: bounded implies positive"),
        );
    }
    need(
        at(Eventually, Positive) == at(Eventually, Bounded),
        "eventually: positive equals bounded".into(),
    );
    need(
        at(Always, Bounded) == (at(Always, Positive) && at(Strongly, Bounded)),
        "always: bounded equals positive always and bounded strongly".into(),
    );
    for s in [Weakly, Strongly] {
        need(
            at(s, LimitSure) == at(s, AlmostSure),
            format!("{s}: limit-sure equals almost-sure"),
        );
    }
    need(
        at(Always, Sure) == at(Always, AlmostSure)
            && at(Always, AlmostSure) == at(Always, LimitSure),
        "always: sure, almost-sure and limit-sure agree".into(),
    );
    need(
        at(Eventually, AlmostSure) == (at(Eventually, Sure) || at(Weakly, AlmostSure)),
        "eventually: almost-sure equals sure eventually or almost-sure weakly".into(),
    );
    out
}
