//! Statistical self-checks of a campaign against the model it simulates.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use super::{Campaign, RateReport, SystemConfig};
use crate::error::{invalid, Result};
use crate::irs::EventLabel;

/// Outcome of one named check.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl CheckResult {
    fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            passed,
            detail: detail.into(),
        }
    }
}

/// Distribution of the number of successes among independent trials with the
/// given success probabilities.
pub fn poisson_binomial_pmf(probs: &[f64]) -> Vec<f64> {
    let mut pmf = vec![1.0];
    for &p in probs {
        let mut next = vec![0.0; pmf.len() + 1];
        for (k, &q) in pmf.iter().enumerate() {
            next[k] += q * (1.0 - p);
            next[k + 1] += q * p;
        }
        pmf = next;
    }
    pmf
}

/// Per-slot event law of one operator's scheduled UE.
fn slot_event_law(cfg: &SystemConfig, t: u64, op: usize) -> BTreeMap<EventLabel, f64> {
    let ue_of = |o: usize| (t % cfg.ues_per_operator[o] as u64) as usize;
    let hit = |o: usize, p: usize| cfg.paths[o][ue_of(o)][p] as f64 / cfg.elements_per_irs[p] as f64;
    let m = cfg.num_operators;
    if m == 2 {
        if let Some(ev) = cfg.condition {
            return BTreeMap::from([(ev, 1.0)]);
        }
        let (pk, pq) = (hit(0, 1), hit(1, 0));
        return BTreeMap::from([
            (EventLabel::A, pk * pq),
            (EventLabel::B, (1.0 - pk) * pq),
            (EventLabel::C, pk * (1.0 - pq)),
            (EventLabel::D, (1.0 - pk) * (1.0 - pq)),
        ]);
    }
    let probs: Vec<f64> = (0..m).filter(|&p| p != op).map(|p| hit(op, p)).collect();
    poisson_binomial_pmf(&probs)
        .into_iter()
        .enumerate()
        .map(|(k, p)| (EventLabel::Multi(k), p))
        .collect()
}

/// Every event count within `sigmas` binomial standard deviations of its expectation.
pub fn event_frequency_check(cfg: &SystemConfig, report: &RateReport, sigmas: f64) -> CheckResult {
    let mut worst: f64 = 0.0;
    let mut worst_at = String::new();
    let mut passed = true;
    for op in 0..cfg.num_operators {
        let mut mean: BTreeMap<EventLabel, f64> = BTreeMap::new();
        let mut var: BTreeMap<EventLabel, f64> = BTreeMap::new();
        for t in 0..cfg.slots {
            for (e, p) in slot_event_law(cfg, t, op) {
                *mean.entry(e).or_default() += p;
                *var.entry(e).or_default() += p * (1.0 - p);
            }
        }
        let counts = &report.per_event_counts[op];
        for e in mean.keys().chain(counts.keys()) {
            let c = counts.get(e).copied().unwrap_or(0) as f64;
            let mu = mean.get(e).copied().unwrap_or(0.0);
            let sd = var.get(e).copied().unwrap_or(0.0).sqrt();
            let dev = (c - mu).abs();
            // Deterministic categories must match to rounding.
            let ok = if sd > 0.0 { dev <= sigmas * sd } else { dev < 1e-6 * (1.0 + mu) };
            let z = if sd > 0.0 { dev / sd } else if ok { 0.0 } else { f64::INFINITY };
            passed &= ok;
            if z > worst {
                worst = z;
                worst_at = format!("operator {op} event {}", e.name());
            }
        }
    }
    let detail = if worst_at.is_empty() {
        "all counts exact".to_string()
    } else {
        format!("largest deviation {worst:.2} sd at {worst_at}")
    };
    CheckResult::new("event_frequencies", passed, detail)
}

/// Kolmogorov–Smirnov distance of a sample from the uniform law on `[−π, π)`.
pub fn ks_uniform_statistic(samples: &[f64]) -> f64 {
    let mut xs: Vec<f64> = samples.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    xs.iter()
        .enumerate()
        .map(|(i, &x)| {
            let cdf = ((x + PI) / (2.0 * PI)).clamp(0.0, 1.0);
            (cdf - i as f64 / n).abs().max((((i + 1) as f64) / n - cdf).abs())
        })
        .fold(0.0, f64::max)
}

/// Asymptotic 1% critical value of the one-sample KS statistic.
pub fn ks_critical_1pct(n: usize) -> f64 {
    1.6276 / (n as f64).sqrt()
}

/// Collects at least `samples` OOB phase offsets from successive slots and tests
/// them for uniformity at the 1% level.
pub fn phase_uniformity_check(campaign: &Campaign, samples: usize) -> Result<CheckResult> {
    if samples == 0 {
        return Err(invalid("samples", "need at least one"));
    }
    let mut offsets = Vec::with_capacity(samples);
    let limit = 1000 * samples as u64;
    let mut t = 0;
    while offsets.len() < samples && t < limit {
        let s = campaign.run_slot(t)?;
        offsets.extend(s.ues.iter().flat_map(|u| u.offsets.values().copied()));
        t += 1;
    }
    if offsets.len() < samples {
        return Ok(CheckResult::new(
            "phase_uniformity",
            false,
            format!("only {} aligned offsets in {limit} slots", offsets.len()),
        ));
    }
    let d = ks_uniform_statistic(&offsets);
    let crit = ks_critical_1pct(offsets.len());
    Ok(CheckResult::new(
        "phase_uniformity",
        d <= crit,
        format!("KS D = {d:.5}, 1% critical {crit:.5}, n = {}", offsets.len()),
    ))
}

/// Mean SE with the OOB IRSs is at least the mean without them, less two standard errors.
pub fn oob_non_degradation_check(report: &RateReport) -> CheckResult {
    let mut passed = true;
    let mut parts = Vec::new();
    for (op, (&se, &no)) in report
        .per_operator_se
        .iter()
        .zip(&report.per_operator_no_oob_se)
        .enumerate()
    {
        let floor = no - 2.0 * report.per_operator_se_stderr[op];
        passed &= se >= floor;
        parts.push(format!("op{op}: {se:.4} vs {no:.4}"));
    }
    CheckResult::new("oob_non_degradation", passed, parts.join("; "))
}

/// Jensen-level simulated SE against the closed form, per operator and event,
/// pooled over UEs and phase owners by slot count.
///
/// Event A may deviate by `tol_a` (relative), the others by `tol_other`.
pub fn closed_form_check(report: &RateReport, tol_other: f64, tol_a: f64) -> Vec<CheckResult> {
    let mut pooled: BTreeMap<(usize, EventLabel), (u64, f64, f64)> = BTreeMap::new();
    for c in &report.comparisons {
        if let Some(cf) = c.closed_form_se {
            let e = pooled.entry((c.key.op, c.key.event)).or_default();
            e.0 += c.count;
            e.1 += c.count as f64 * c.jensen_se;
            e.2 += c.count as f64 * cf;
        }
    }
    pooled
        .into_iter()
        .map(|((op, ev), (n, sim, cf))| {
            let (sim, cf) = (sim / n as f64, cf / n as f64);
            let rel = if cf > 0.0 { (sim - cf).abs() / cf } else { (sim - cf).abs() };
            let tol = if ev == EventLabel::A { tol_a } else { tol_other };
            CheckResult::new(
                format!("closed_form_op{op}_{}", ev.name()),
                rel <= tol,
                format!("jensen-level sim {sim:.4}, closed form {cf:.4}, rel {rel:.4}, n = {n}"),
            )
        })
        .collect()
}

/// Slot count, residual, standard error and gain scale of one cell.
type CellResidual = (u64, f64, f64, f64);

/// Empirical cross term against `2c·E[a]·E[g]` with empirical moments, pooled per
/// operator and event; passes within `sigmas` standard errors.
///
/// Pooling weights each cell by its slot share, so the pooled residual is a linear
/// combination of independent cell residuals.
pub fn factorization_check(report: &RateReport, sigmas: f64) -> Vec<CheckResult> {
    let mut pooled: BTreeMap<(usize, EventLabel), Vec<CellResidual>> = BTreeMap::new();
    for c in &report.comparisons {
        if let Some((r, se)) = c.factorization {
            let cell = &report.cells[&c.key];
            let scale = cell.gain.mean();
            pooled
                .entry((c.key.op, c.key.event))
                .or_default()
                .push((c.count, r, se, scale));
        }
    }
    pooled
        .into_iter()
        .filter(|((_, ev), _)| *ev != EventLabel::D && *ev != EventLabel::Multi(0))
        .map(|((op, ev), cells)| {
            let total: u64 = cells.iter().map(|c| c.0).sum();
            let (mut r, mut var, mut scale) = (0.0, 0.0, 0.0);
            for &(n, ri, si, sc) in &cells {
                let w = n as f64 / total as f64;
                r += w * ri;
                var += w * w * si * si;
                scale += w * sc;
            }
            let sd = var.sqrt();
            let z = if sd > 0.0 { r.abs() / sd } else if r == 0.0 { 0.0 } else { f64::INFINITY };
            CheckResult::new(
                format!("factorization_op{op}_{}", ev.name()),
                z <= sigmas,
                format!("residual {:.3e} of mean gain {scale:.3e}, {z:.2} sd", r),
            )
        })
        .collect()
}

/// Re-runs a campaign on thread pools of each size and compares the reports exactly.
pub fn determinism_check(cfg: &SystemConfig, workers: &[usize]) -> Result<CheckResult> {
    let mut reports = Vec::with_capacity(workers.len());
    for &w in workers {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build()
            .map_err(|e| invalid("workers", e.to_string()))?;
        reports.push(pool.install(|| super::run_campaign(cfg))?);
    }
    let same = reports.windows(2).all(|w| w[0] == w[1]);
    Ok(CheckResult::new(
        "determinism",
        same,
        format!("{} runs with workers {workers:?}", reports.len()),
    ))
}
