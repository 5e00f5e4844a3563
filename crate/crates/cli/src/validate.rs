//! The `validate` preset: model self-checks gathered into one table.

use irscoop::rates::theorem2_oob_gain;
use irscoop::sim::checks::{
    closed_form_check, determinism_check, event_frequency_check, factorization_check,
    oob_non_degradation_check, phase_uniformity_check, CheckResult,
};
use irscoop::specfun::{f_mean_max, f_mean_max_series, g_mean_max_sq, g_mean_max_sq_series};
use irscoop::{run_campaign, Campaign, SchemePolicy, SideBudget, SystemConfig};

use crate::config::{corner_ring, two_operator_square};
use crate::RunError;

const KS_SAMPLES: usize = 10_000;
const DETERMINISM_SLOTS: u64 = 5000;

fn check(name: &str, passed: bool, detail: String) -> CheckResult {
    CheckResult {
        name: name.into(),
        passed,
        detail,
    }
}

fn config(m: usize, n: usize, per_op: Vec<Vec<usize>>, scheme: SchemePolicy, slots: u64, seed: u64) -> SystemConfig {
    let ues = vec![10; m];
    SystemConfig {
        num_operators: m,
        elements_per_irs: vec![n; m],
        paths: SystemConfig::uniform_paths(&per_op, &ues),
        ues_per_operator: ues,
        snr: 1e21,
        scheme,
        geometry: if m == 2 { two_operator_square() } else { corner_ring(m).expect("at most four operators") },
        slots,
        seed,
        campaign_id: 0,
        condition: None,
    }
}

/// `g(n)` against harmonic numbers for `n ≤ 64`, and both order-statistic
/// means against their alternating sums for `n ≤ 12`.
fn order_statistic_checks() -> Result<Vec<CheckResult>, RunError> {
    let mut h = 0.0;
    let mut worst_h: f64 = 0.0;
    for n in 1..=64 {
        h += 1.0 / n as f64;
        worst_h = worst_h.max((g_mean_max_sq(n)? - h).abs());
    }
    let mut worst_s: f64 = 0.0;
    for n in 1..=12 {
        worst_s = worst_s
            .max((f_mean_max(n)? - f_mean_max_series(n)?).abs())
            .max((g_mean_max_sq(n)? - g_mean_max_sq_series(n)?).abs());
    }
    Ok(vec![
        check("harmonic_identity", worst_h <= 1e-12, format!("max |g(n) − H_n| = {worst_h:.2e}, n ≤ 64")),
        check("series_forms", worst_s <= 1e-9, format!("max deviation {worst_s:.2e}, n ≤ 12")),
    ])
}

/// The OOB gain is non-negative over a grid of budgets and SNRs.
fn oob_gain_sign_check() -> Result<CheckResult, RunError> {
    let mut min = f64::INFINITY;
    let mut count = 0;
    for snr_db in [-60.0, -20.0, 0.0, 40.0, 80.0, 120.0] {
        for n in [8, 64, 512] {
            for l_in in [1, 2, 5] {
                for l_oob in [1, 4, 8] {
                    for beta_ratio in [1e-3, 1.0, 1e3] {
                        let s = SideBudget {
                            snr: 10f64.powf(snr_db / 10.0),
                            n_in: n,
                            n_oob: n / 2,
                            l_in,
                            l_oob: l_oob.min(n / 2),
                            beta_in: 1e-12,
                            beta_oob: 1e-12 * beta_ratio,
                        };
                        for co in [false, true] {
                            min = min.min(theorem2_oob_gain(&[s], co)?);
                            count += 1;
                        }
                    }
                }
            }
        }
    }
    Ok(check("oob_gain_non_negative", min >= 0.0, format!("minimum {min:.3e} over {count} budgets")))
}

/// Every suite, with campaigns of `slots` slots.
pub fn validation_checks(seed: u64, slots: u64) -> Result<Vec<CheckResult>, RunError> {
    let mut out = order_statistic_checks()?;
    out.push(oob_gain_sign_check()?);

    let two = config(2, 16, vec![vec![1, 6], vec![3, 1]], SchemePolicy::no_coop(), slots, seed);
    let r = run_campaign(&two)?;
    out.push(rename(event_frequency_check(&two, &r, 3.0), "event_frequencies_2mo"));
    out.push(rename(oob_non_degradation_check(&r), "oob_non_degradation_2mo"));

    let four = config(4, 16, vec![vec![4; 4]; 4], SchemePolicy::no_coop(), slots, seed);
    let r = run_campaign(&four)?;
    out.push(rename(event_frequency_check(&four, &r, 3.0), "event_frequencies_4mo"));
    out.push(rename(oob_non_degradation_check(&r), "oob_non_degradation_4mo"));

    let ks = config(2, 16, vec![vec![2, 3], vec![3, 2]], SchemePolicy::no_coop(), 1, seed);
    out.push(phase_uniformity_check(&Campaign::new(ks)?, KS_SAMPLES)?);

    // One in-band path keeps the order-statistic factors exact.
    let schemes = [
        ("ts1", SchemePolicy::time_share(1.0)?),
        ("ts_half", SchemePolicy::time_share(0.5)?),
        ("no_coop", SchemePolicy::no_coop()),
    ];
    for (label, scheme) in schemes {
        let cfg = config(2, 32, vec![vec![1, 8], vec![8, 1]], scheme, slots, seed);
        let r = run_campaign(&cfg)?;
        for c in closed_form_check(&r, 0.05, 0.15).into_iter().chain(factorization_check(&r, 3.0)) {
            let name = format!("{}_{label}", c.name);
            out.push(rename(c, &name));
        }
    }

    let det = config(2, 16, vec![vec![1, 4], vec![4, 1]], SchemePolicy::joint_opt(0.3, 0.7)?, slots.min(DETERMINISM_SLOTS), seed);
    out.push(determinism_check(&det, &[1, 2, 7])?);
    Ok(out)
}

fn rename(mut c: CheckResult, name: &str) -> CheckResult {
    c.name = name.into();
    c
}
