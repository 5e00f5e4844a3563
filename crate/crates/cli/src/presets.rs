//! Figure-reproduction setups.
//!
//! Every preset uses seed 0 unless `--seed` overrides it, and the 200 m square
//! geometry: BS-X at (0, 200), BS-Y at (200, 0), IRS-X at (0, 0), IRS-Y at
//! (200, 200), UEs uniform over the square. The four-operator preset puts the BSs
//! at the corners and the IRSs on a 5 m circle around (100, 100).
//!
//! | preset   | what it sweeps                                                       |
//! |----------|----------------------------------------------------------------------|
//! | fig3     | N ∈ {16..1024}, event A, L = (1, 10 / 10, 1), four schemes            |
//! | fig4     | N₂ ∈ {1..256} at N₁ = 64, L_k2 ∈ {4, 8, 16}, K = 1000, 20000 slots    |
//! | fig5     | ζ and w_k over [0, 1] at N = 256, L = (1, 5 / 8, 1), plus points A–E  |
//! | fig6     | N ∈ {16..1024}, four operators, L = 5, time sharing and no cooperation |
//! | validate | model self-checks at 10⁵ slots                                        |

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use irscoop::{PhaseSolver, SchemePolicy, SweepAxis, SystemConfig};

use crate::config::{
    corner_ring, two_operator_square, ConfigError, ExperimentSpec, SweepSpec, DEFAULT_C0_GAMMA_DB,
    DEFAULT_GRID_POINTS,
};

pub const PRESET_SEED: u64 = 0;
pub const FIGURE_SLOTS: u64 = 1000;
pub const VALIDATION_SLOTS: u64 = 100_000;
pub const FIG4_SLOTS: u64 = 20_000;
pub const FIG4_UES: usize = 1000;
pub const FIG4_LK2: [usize; 3] = [4, 8, 16];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    Fig3,
    Fig4,
    Fig5,
    Fig6,
    Validate,
}

impl Preset {
    pub const ALL: [Preset; 5] = [Self::Fig3, Self::Fig4, Self::Fig5, Self::Fig6, Self::Validate];

    pub fn name(&self) -> &'static str {
        match self {
            Self::Fig3 => "fig3",
            Self::Fig4 => "fig4",
            Self::Fig5 => "fig5",
            Self::Fig6 => "fig6",
            Self::Validate => "validate",
        }
    }

    /// Spec standing for the preset in a config file: the first job's base system.
    pub fn summary_spec(self, name: String, outputs: PathBuf) -> ExperimentSpec {
        let first = self
            .jobs(PRESET_SEED, None)
            .into_iter()
            .next()
            .unwrap_or_else(validation_stub);
        ExperimentSpec {
            name,
            outputs,
            preset: Some(self),
            ..first
        }
    }

    /// The sweeps this preset runs; `outputs` holds each file name.
    ///
    /// `validate` has no sweeps; its checks live in [`crate::validate`].
    pub fn jobs(self, seed: u64, slots: Option<u64>) -> Vec<ExperimentSpec> {
        let mut jobs = match self {
            Self::Fig3 => fig3(),
            Self::Fig4 => fig4(),
            Self::Fig5 => fig5(),
            Self::Fig6 => fig6(),
            Self::Validate => Vec::new(),
        };
        for j in &mut jobs {
            j.base.seed = seed;
            if let Some(s) = slots {
                j.base.slots = s;
            }
        }
        jobs
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, ConfigError> {
        Self::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| ConfigError::new("preset", format!("unknown preset `{s}`; expected fig3, fig4, fig5, fig6 or validate")))
    }
}

/// Tx SNR of the figures: `C₀γ = 150 dB` with `C₀ = −60 dB`.
fn figure_tx_snr_db() -> f64 {
    DEFAULT_C0_GAMMA_DB - two_operator_square().c0_db
}

fn pow2(lo: u32, hi: u32) -> Vec<f64> {
    (lo..=hi).map(|k| (1u64 << k) as f64).collect()
}

fn unit_steps() -> Vec<f64> {
    (0..=10).map(|i| i as f64 / 10.0).collect()
}

fn two_operator(n: [usize; 2], paths: [[usize; 2]; 2], ues: usize, scheme: SchemePolicy, slots: u64) -> SystemConfig {
    let ues = vec![ues; 2];
    let per_op: Vec<Vec<usize>> = paths.iter().map(|r| r.to_vec()).collect();
    let tx = figure_tx_snr_db();
    SystemConfig {
        num_operators: 2,
        elements_per_irs: n.to_vec(),
        paths: SystemConfig::uniform_paths(&per_op, &ues),
        ues_per_operator: ues,
        snr: 10f64.powf(tx / 10.0),
        scheme,
        geometry: two_operator_square(),
        slots,
        seed: PRESET_SEED,
        campaign_id: 0,
        condition: None,
    }
}

fn job(file: &str, base: SystemConfig, sweep: Option<(SweepAxis, Vec<f64>)>) -> ExperimentSpec {
    ExperimentSpec {
        name: file.trim_end_matches(".csv").to_string(),
        base,
        tx_snr_db: figure_tx_snr_db(),
        sweep: sweep.map(|(axis, values)| SweepSpec { axis, values }),
        outputs: PathBuf::from(file),
        preset: None,
    }
}

fn ts(zeta: f64) -> SchemePolicy {
    SchemePolicy::time_share(zeta).expect("zeta in range")
}

fn jo(w_k: f64) -> SchemePolicy {
    SchemePolicy::joint_opt(w_k, 1.0 - w_k).expect("weights in range")
}

fn fig3() -> Vec<ExperimentSpec> {
    let schemes = [
        ("fig3_ts.csv", ts(1.0)),
        ("fig3_jo_newton.csv", jo(0.5)),
        ("fig3_jo_grid.csv", jo(0.5).with_solver(PhaseSolver::Grid(DEFAULT_GRID_POINTS))),
        ("fig3_no_coop.csv", SchemePolicy::no_coop()),
    ];
    schemes
        .into_iter()
        .map(|(file, scheme)| {
            let mut base = two_operator([1024, 1024], [[1, 10], [10, 1]], 10, scheme, FIGURE_SLOTS);
            base.condition = Some(irscoop::EventLabel::A);
            job(file, base, Some((SweepAxis::N, pow2(4, 10))))
        })
        .collect()
}

fn fig4() -> Vec<ExperimentSpec> {
    FIG4_LK2
        .iter()
        .map(|&l| {
            let base = two_operator([64, 256], [[1, l], [1, 1]], FIG4_UES, ts(1.0), FIG4_SLOTS);
            job(&format!("fig4_lk2_{l}.csv"), base, Some((SweepAxis::N2, pow2(0, 8))))
        })
        .collect()
}

const FIG5_PATHS: [[usize; 2]; 2] = [[1, 5], [8, 1]];

fn fig5_base(scheme: SchemePolicy) -> SystemConfig {
    two_operator([256, 256], FIG5_PATHS, 10, scheme, FIGURE_SLOTS)
}

fn fig5() -> Vec<ExperimentSpec> {
    vec![
        job("fig5_ts.csv", fig5_base(ts(1.0)), Some((SweepAxis::Zeta, unit_steps()))),
        job("fig5_jo.csv", fig5_base(jo(0.5)), Some((SweepAxis::Weights, unit_steps()))),
        job("fig5_no_coop.csv", fig5_base(SchemePolicy::no_coop()), None),
    ]
}

/// The labelled points of the rate region: A no cooperation, B and D the
/// time-sharing endpoints ζ = 0 and ζ = 1, C ζ = 1/2, E joint optimization at equal weights.
pub fn fig5_points() -> Vec<(&'static str, SystemConfig)> {
    vec![
        ("A", fig5_base(SchemePolicy::no_coop())),
        ("B", fig5_base(ts(0.0))),
        ("C", fig5_base(ts(0.5))),
        ("D", fig5_base(ts(1.0))),
        ("E", fig5_base(jo(0.5))),
    ]
}

fn fig6() -> Vec<ExperimentSpec> {
    let geometry = corner_ring(4).expect("four operators fit the ring");
    [("fig6_ts.csv", ts(1.0)), ("fig6_no_coop.csv", SchemePolicy::no_coop())]
        .into_iter()
        .map(|(file, scheme)| {
            let ues = vec![10; 4];
            let base = SystemConfig {
                num_operators: 4,
                elements_per_irs: vec![1024; 4],
                paths: SystemConfig::uniform_paths(&vec![vec![5; 4]; 4], &ues),
                ues_per_operator: ues,
                geometry: geometry.clone(),
                ..two_operator([1024, 1024], [[1, 1], [1, 1]], 10, scheme, FIGURE_SLOTS)
            };
            job(file, base, Some((SweepAxis::N, pow2(4, 10))))
        })
        .collect()
}

fn validation_stub() -> ExperimentSpec {
    let mut base = two_operator([16, 16], [[1, 8], [8, 1]], 10, ts(1.0), VALIDATION_SLOTS);
    base.seed = PRESET_SEED;
    job("validate.csv", base, None)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_job_validates_at_every_sweep_value() {
        for p in Preset::ALL {
            for j in p.jobs(3, Some(10)) {
                assert_eq!(j.base.seed, 3);
                assert_eq!(j.base.slots, 10);
                j.base.validate().unwrap();
                if let Some(s) = &j.sweep {
                    for v in s.core_values() {
                        irscoop::sim::apply_axis(&j.base, s.axis, v).unwrap().validate().unwrap();
                    }
                }
            }
        }
        for (_, c) in fig5_points() {
            c.validate().unwrap();
        }
    }

    #[test]
    fn figure_snr_is_210_db() {
        assert_eq!(figure_tx_snr_db(), 210.0);
        assert_eq!(fig3()[0].base.snr, 1e21);
    }

    #[test]
    fn names_round_trip() {
        for p in Preset::ALL {
            assert_eq!(p.name().parse::<Preset>().unwrap(), p);
        }
    }
}
