//! TOML experiment files.
//!
//! ```toml
//! name = "small"
//! outputs = "small.csv"
//!
//! [system]
//! elements_per_irs = 16          # one value for every IRS, or a list
//! paths = [[1, 10], [10, 1]]     # [operator][irs], or [operator][ue][irs]
//! c0_gamma_db = 150.0            # or tx_snr_db, not both
//!
//! [scheme]
//! kind = "time_share"
//! zeta = 1.0
//!
//! [sweep]
//! axis = "N"
//! values = [16, 32, 64]
//! ```
//!
//! Every dB quantity is converted to linear here and nowhere else.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};
use std::path::PathBuf;
use std::str::FromStr;

use irscoop::channel::Rect;
use irscoop::{
    EventLabel, Geometry, PhaseSolver, Point, SchemeKind, SchemePolicy, SweepAxis, SystemConfig,
};
use serde::{Deserialize, Serialize};

use crate::presets::Preset;

pub const DEFAULT_SLOTS: u64 = 1000;
pub const DEFAULT_SEED: u64 = 0;
pub const DEFAULT_UES: usize = 10;
/// `C₀γ` used when neither SNR key is given.
pub const DEFAULT_C0_GAMMA_DB: f64 = 150.0;
pub const DEFAULT_GRID_POINTS: usize = 10_000;

/// A configuration problem, naming the offending key.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("{key}: {reason}")]
pub struct ConfigError {
    pub key: String,
    pub reason: String,
}

impl ConfigError {
    pub fn new(key: impl Into<String>, reason: impl Into<String>) -> Self {
        Self {
            key: key.into(),
            reason: reason.into(),
        }
    }
}

/// Sweep axis and its values as written; SNR values are in dB.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub axis: SweepAxis,
    pub values: Vec<f64>,
}

impl SweepSpec {
    /// Values in the units the core expects.
    pub fn core_values(&self) -> Vec<f64> {
        match self.axis {
            SweepAxis::Snr => self.values.iter().map(|&db| db_to_linear(db)).collect(),
            _ => self.values.clone(),
        }
    }
}

/// One experiment: a base system, an optional sweep, and where its CSV goes.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub name: String,
    pub base: SystemConfig,
    /// `10 log₁₀` of `base.snr`, kept as written so rendering round-trips.
    pub tx_snr_db: f64,
    pub sweep: Option<SweepSpec>,
    /// CSV file, or output directory when `preset` is set.
    pub outputs: PathBuf,
    pub preset: Option<Preset>,
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
enum OneOrMany {
    One(usize),
    Many(Vec<usize>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
enum PathTable {
    PerOperator(Vec<Vec<usize>>),
    PerUe(Vec<Vec<Vec<usize>>>),
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFile {
    #[serde(skip_serializing_if = "Option::is_none")]
    name: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    outputs: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    preset: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    geometry: Option<RawGeometry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    system: Option<RawSystem>,
    #[serde(skip_serializing_if = "Option::is_none")]
    scheme: Option<RawScheme>,
    #[serde(skip_serializing_if = "Option::is_none")]
    sweep: Option<RawSweep>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGeometry {
    bs_positions: Option<Vec<[f64; 2]>>,
    irs_positions: Option<Vec<[f64; 2]>>,
    ue_region: Option<[[f64; 2]; 2]>,
    c0_db: Option<f64>,
    d0: Option<f64>,
    alpha: Option<f64>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSystem {
    num_operators: Option<usize>,
    elements_per_irs: Option<OneOrMany>,
    ues_per_operator: Option<OneOrMany>,
    paths: Option<PathTable>,
    #[serde(skip_serializing_if = "Option::is_none")]
    tx_snr_db: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    c0_gamma_db: Option<f64>,
    slots: Option<u64>,
    seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    condition: Option<String>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScheme {
    kind: Option<String>,
    zeta: Option<f64>,
    weights: Option<[f64; 2]>,
    solver: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    grid_points: Option<usize>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSweep {
    axis: String,
    values: Vec<f64>,
}

fn pt(p: [f64; 2]) -> Point {
    Point::new(p[0], p[1])
}

/// BSs at (0,200) and (200,0), IRSs at (0,0) and (200,200), UEs in the square between.
pub fn two_operator_square() -> Geometry {
    Geometry {
        bs_positions: vec![Point::new(0.0, 200.0), Point::new(200.0, 0.0)],
        irs_positions: vec![Point::new(0.0, 0.0), Point::new(200.0, 200.0)],
        ue_region: Rect {
            min: Point::new(0.0, 0.0),
            max: Point::new(200.0, 200.0),
        },
        c0_db: -60.0,
        d0: 1.0,
        alpha: 2.0,
    }
}

/// Up to four BSs at the corners of the 200 m square and their IRSs on a 5 m circle
/// around its center, at 45° + k·90°.
pub fn corner_ring(m: usize) -> Option<Geometry> {
    if !(2..=4).contains(&m) {
        return None;
    }
    let corners = [(0.0, 0.0), (200.0, 0.0), (200.0, 200.0), (0.0, 200.0)];
    let irs = (0..m)
        .map(|k| {
            let th = FRAC_PI_4 + k as f64 * FRAC_PI_2;
            Point::new(100.0 + 5.0 * th.cos(), 100.0 + 5.0 * th.sin())
        })
        .collect();
    Some(Geometry {
        bs_positions: corners[..m].iter().map(|&(x, y)| Point::new(x, y)).collect(),
        irs_positions: irs,
        ..two_operator_square()
    })
}

fn expand(v: &Option<OneOrMany>, m: usize, default: usize, key: &str) -> Result<Vec<usize>, ConfigError> {
    match v {
        None => Ok(vec![default; m]),
        Some(OneOrMany::One(x)) => Ok(vec![*x; m]),
        Some(OneOrMany::Many(xs)) if xs.len() == m => Ok(xs.clone()),
        Some(OneOrMany::Many(xs)) => Err(ConfigError::new(
            key,
            format!("expected {m} entries, got {}", xs.len()),
        )),
    }
}

fn parse_condition(s: &str) -> Result<EventLabel, ConfigError> {
    match s {
        "A" => Ok(EventLabel::A),
        "B" => Ok(EventLabel::B),
        "C" => Ok(EventLabel::C),
        "D" => Ok(EventLabel::D),
        _ => Err(ConfigError::new("system.condition", format!("expected A, B, C or D, got `{s}`"))),
    }
}

fn parse_scheme(raw: &RawScheme) -> Result<SchemePolicy, ConfigError> {
    let kind = raw.kind.as_deref().unwrap_or("time_share");
    let mut policy = match kind {
        "time_share" => SchemePolicy::time_share(raw.zeta.unwrap_or(1.0))
            .map_err(|e| ConfigError::new("scheme.zeta", e.to_string()))?,
        "joint_opt" => {
            let w = raw.weights.unwrap_or([0.5, 0.5]);
            SchemePolicy::joint_opt(w[0], w[1])
                .map_err(|e| ConfigError::new("scheme.weights", e.to_string()))?
        }
        "no_coop" => SchemePolicy::no_coop(),
        other => {
            return Err(ConfigError::new(
                "scheme.kind",
                format!("expected time_share, joint_opt or no_coop, got `{other}`"),
            ))
        }
    };
    if kind != "time_share" && raw.zeta.is_some() {
        return Err(ConfigError::new("scheme.zeta", "only meaningful for time_share"));
    }
    if kind != "joint_opt" && (raw.weights.is_some() || raw.solver.is_some()) {
        return Err(ConfigError::new("scheme", "weights and solver need kind = joint_opt"));
    }
    match raw.solver.as_deref() {
        None | Some("newton") => {
            if raw.grid_points.is_some() {
                return Err(ConfigError::new("scheme.grid_points", "needs solver = grid"));
            }
        }
        Some("grid") => {
            let points = raw.grid_points.unwrap_or(DEFAULT_GRID_POINTS);
            if points == 0 {
                return Err(ConfigError::new("scheme.grid_points", "must be at least 1"));
            }
            policy = policy.with_solver(PhaseSolver::Grid(points));
        }
        Some(other) => {
            return Err(ConfigError::new("scheme.solver", format!("expected newton or grid, got `{other}`")))
        }
    }
    Ok(policy)
}

fn core_error_key(e: &irscoop::Error) -> &'static str {
    use irscoop::Error::*;
    match e {
        PathsExceedElements { .. } => "system.paths",
        ZeroCount(_) => "system.elements_per_irs",
        EmptyUeList => "system.ues_per_operator",
        Geometry(_) | ZeroDistance => "geometry",
        Invalid { name, .. } => match *name {
            "slots" => "system.slots",
            "snr" => "system.tx_snr_db",
            "zeta" => "scheme.zeta",
            "weights" => "scheme.weights",
            "condition" => "system.condition",
            "paths" => "system.paths",
            "sweep" | "axis" => "sweep",
            _ => "system",
        },
        _ => "system",
    }
}

/// Parses and validates an experiment file.
pub fn parse_config(text: &str) -> Result<ExperimentSpec, ConfigError> {
    let raw: RawFile = toml::from_str(text).map_err(|e| ConfigError::new("toml", e.message().to_string()))?;
    let name = raw.name.clone().unwrap_or_else(|| "experiment".into());
    if let Some(p) = &raw.preset {
        let preset = Preset::from_str(p)?;
        if raw.geometry.is_some() || raw.system.is_some() || raw.scheme.is_some() || raw.sweep.is_some() {
            return Err(ConfigError::new(
                "preset",
                format!("preset `{p}` fixes the whole experiment; remove the other sections"),
            ));
        }
        let outputs = PathBuf::from(raw.outputs.unwrap_or_else(|| p.clone()));
        return Ok(preset.summary_spec(name, outputs));
    }

    let sys = raw.system.unwrap_or_default();
    let m = sys
        .num_operators
        .or(match &sys.elements_per_irs {
            Some(OneOrMany::Many(v)) => Some(v.len()),
            _ => None,
        })
        .unwrap_or(2);
    if m < 2 {
        return Err(ConfigError::new("system.num_operators", "need at least 2"));
    }
    let elements = match &sys.elements_per_irs {
        Some(v) => expand(&Some(v.clone()), m, 0, "system.elements_per_irs")?,
        None => return Err(ConfigError::new("system.elements_per_irs", "required")),
    };
    let ues = expand(&sys.ues_per_operator, m, DEFAULT_UES, "system.ues_per_operator")?;
    let paths = match &sys.paths {
        None => SystemConfig::uniform_paths(&vec![vec![1; m]; m], &ues),
        Some(PathTable::PerOperator(rows)) => SystemConfig::uniform_paths(rows, &ues),
        Some(PathTable::PerUe(t)) => t.clone(),
    };

    let g = raw.geometry.unwrap_or_default();
    let default_geometry = if m == 2 { Some(two_operator_square()) } else { corner_ring(m) };
    let need = |key: &str| ConfigError::new(format!("geometry.{key}"), format!("required with {m} operators"));
    let base_geo = default_geometry.clone();
    let geometry = Geometry {
        bs_positions: match g.bs_positions {
            Some(v) => v.into_iter().map(pt).collect(),
            None => base_geo.as_ref().ok_or_else(|| need("bs_positions"))?.bs_positions.clone(),
        },
        irs_positions: match g.irs_positions {
            Some(v) => v.into_iter().map(pt).collect(),
            None => base_geo.as_ref().ok_or_else(|| need("irs_positions"))?.irs_positions.clone(),
        },
        ue_region: match g.ue_region {
            Some([a, b]) => Rect { min: pt(a), max: pt(b) },
            None => two_operator_square().ue_region,
        },
        c0_db: g.c0_db.unwrap_or(-60.0),
        d0: g.d0.unwrap_or(1.0),
        alpha: g.alpha.unwrap_or(2.0),
    };

    let tx_snr_db = match (sys.tx_snr_db, sys.c0_gamma_db) {
        (Some(_), Some(_)) => {
            return Err(ConfigError::new(
                "system.tx_snr_db",
                "give either tx_snr_db or c0_gamma_db, not both",
            ))
        }
        (Some(t), None) => t,
        (None, Some(c)) => c - geometry.c0_db,
        (None, None) => DEFAULT_C0_GAMMA_DB - geometry.c0_db,
    };
    if !tx_snr_db.is_finite() && tx_snr_db != f64::NEG_INFINITY {
        return Err(ConfigError::new("system.tx_snr_db", "must be finite"));
    }

    let scheme = parse_scheme(&raw.scheme.unwrap_or_default())?;
    let condition = sys.condition.as_deref().map(parse_condition).transpose()?;
    let base = SystemConfig {
        num_operators: m,
        elements_per_irs: elements,
        ues_per_operator: ues,
        paths,
        snr: db_to_linear(tx_snr_db),
        scheme,
        geometry,
        slots: sys.slots.unwrap_or(DEFAULT_SLOTS),
        seed: sys.seed.unwrap_or(DEFAULT_SEED),
        campaign_id: 0,
        condition,
    };
    base.validate()
        .map_err(|e| ConfigError::new(core_error_key(&e), e.to_string()))?;

    let sweep = match raw.sweep {
        None => None,
        Some(s) => {
            let axis = SweepAxis::from_str(&s.axis).map_err(|e| ConfigError::new("sweep.axis", e.to_string()))?;
            if s.values.is_empty() {
                return Err(ConfigError::new("sweep.values", "must not be empty"));
            }
            let spec = SweepSpec { axis, values: s.values };
            for v in spec.core_values() {
                irscoop::sim::apply_axis(&base, axis, v)
                    .and_then(|c| c.validate())
                    .map_err(|e| ConfigError::new("sweep.values", e.to_string()))?;
            }
            Some(spec)
        }
    };
    let outputs = PathBuf::from(raw.outputs.unwrap_or_else(|| format!("{name}.csv")));
    Ok(ExperimentSpec {
        name,
        base,
        tx_snr_db,
        sweep,
        outputs,
        preset: None,
    })
}

fn solver_fields(p: &SchemePolicy) -> (Option<String>, Option<usize>) {
    if p.kind != SchemeKind::JointOpt {
        return (None, None);
    }
    match p.solver {
        PhaseSolver::Newton => (Some("newton".into()), None),
        PhaseSolver::Grid(n) => (Some("grid".into()), Some(n)),
    }
}

/// Writes a spec back as an experiment file that parses to the same spec.
pub fn render(spec: &ExperimentSpec) -> String {
    let b = &spec.base;
    let raw = if let Some(p) = spec.preset {
        RawFile {
            name: Some(spec.name.clone()),
            outputs: Some(spec.outputs.display().to_string()),
            preset: Some(p.name().into()),
            ..Default::default()
        }
    } else {
        let uniform = b.paths.iter().all(|rows| rows.windows(2).all(|w| w[0] == w[1]));
        let paths = if uniform {
            PathTable::PerOperator(b.paths.iter().map(|rows| rows[0].clone()).collect())
        } else {
            PathTable::PerUe(b.paths.clone())
        };
        let p = &b.scheme;
        let (solver, grid_points) = solver_fields(p);
        let (zeta, weights) = match p.kind {
            SchemeKind::TimeShare => (Some(p.zeta), None),
            SchemeKind::JointOpt => (None, Some([p.weights.0, p.weights.1])),
            SchemeKind::NoCoop => (None, None),
        };
        let g = &b.geometry;
        RawFile {
            name: Some(spec.name.clone()),
            outputs: Some(spec.outputs.display().to_string()),
            preset: None,
            geometry: Some(RawGeometry {
                bs_positions: Some(g.bs_positions.iter().map(|p| [p.x, p.y]).collect()),
                irs_positions: Some(g.irs_positions.iter().map(|p| [p.x, p.y]).collect()),
                ue_region: Some([
                    [g.ue_region.min.x, g.ue_region.min.y],
                    [g.ue_region.max.x, g.ue_region.max.y],
                ]),
                c0_db: Some(g.c0_db),
                d0: Some(g.d0),
                alpha: Some(g.alpha),
            }),
            system: Some(RawSystem {
                num_operators: Some(b.num_operators),
                elements_per_irs: Some(OneOrMany::Many(b.elements_per_irs.clone())),
                ues_per_operator: Some(OneOrMany::Many(b.ues_per_operator.clone())),
                paths: Some(paths),
                tx_snr_db: Some(spec.tx_snr_db),
                c0_gamma_db: None,
                slots: Some(b.slots),
                seed: Some(b.seed),
                condition: b.condition.map(|e| e.name()),
            }),
            scheme: Some(RawScheme {
                kind: Some(
                    match p.kind {
                        SchemeKind::TimeShare => "time_share",
                        SchemeKind::JointOpt => "joint_opt",
                        SchemeKind::NoCoop => "no_coop",
                    }
                    .into(),
                ),
                zeta,
                weights,
                solver,
                grid_points,
            }),
            sweep: spec.sweep.as_ref().map(|s| RawSweep {
                axis: s.axis.name().into(),
                values: s.values.clone(),
            }),
        }
    };
    toml::to_string(&raw).expect("experiment specs always serialize")
}

/// Key-value summary of a spec for logs.
pub fn describe(spec: &ExperimentSpec) -> BTreeMap<&'static str, String> {
    let b = &spec.base;
    BTreeMap::from([
        ("name", spec.name.clone()),
        ("operators", b.num_operators.to_string()),
        ("elements", format!("{:?}", b.elements_per_irs)),
        ("tx_snr_db", spec.tx_snr_db.to_string()),
        ("slots", b.slots.to_string()),
        ("seed", b.seed.to_string()),
    ])
}
