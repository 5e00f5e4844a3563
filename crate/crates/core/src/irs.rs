//! IRS phase states, alignment events and overall-phase selection.
//!
//! Each operator steers its IRS to the dominant cascaded path of its scheduled UE
//! with the conjugate phase of that path, leaving one free overall phase `φ` per IRS.
//! Cooperation schemes differ only in how they pick these overall phases.

use std::collections::BTreeMap;
use std::f64::consts::{PI, TAU};

use crate::channel::{IrsId, UeChannel};
use crate::error::{invalid, Error, Result};

/// Wraps an angle in radians into `[−π, π)`.
pub fn wrap_phase(x: f64) -> f64 {
    if (-PI..PI).contains(&x) {
        return x;
    }
    let mut r = (x + PI).rem_euclid(TAU);
    if r >= TAU {
        r -= TAU;
    }
    r - PI
}

/// Phase state of one IRS.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IrsSetting {
    pub irs_id: IrsId,
    pub aligned_angle_index: usize,
    /// `−(∠γ_bs + ∠γ_ue)` of the targeted path.
    pub conj_phase: f64,
    /// Extra common phase `φ`, in `[−π, π)`.
    pub overall_phase: f64,
}

/// Steers `irs_id` to the UE's dominant in-band path.
pub fn configure_inband(ue: &UeChannel, irs_id: IrsId, overall_phase: f64) -> Result<IrsSetting> {
    if irs_id != ue.in_band {
        return Err(Error::UnknownIrs(irs_id));
    }
    let path = ue.dominant_path();
    Ok(IrsSetting {
        irs_id,
        aligned_angle_index: path.angle_index,
        conj_phase: wrap_phase(-path.product().arg()),
        overall_phase: wrap_phase(overall_phase),
    })
}

/// Alignment event of a scheduled UE (or UE pair).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EventLabel {
    /// Both OOB IRSs align (two operators).
    A,
    /// Only IRS-X aligns to UE-q.
    B,
    /// Only IRS-Y aligns to UE-k.
    C,
    /// Neither aligns.
    D,
    /// Exactly `m` OOB IRSs align to the UE (M operators).
    Multi(usize),
}

impl EventLabel {
    /// Two-operator label from whether UE-k (via IRS-Y) and UE-q (via IRS-X) are hit.
    pub fn from_pair(k_aligned: bool, q_aligned: bool) -> Self {
        match (k_aligned, q_aligned) {
            (true, true) => Self::A,
            (false, true) => Self::B,
            (true, false) => Self::C,
            (false, false) => Self::D,
        }
    }

    /// Histogram slot: A–D map to 0–3, `Multi(m)` to `m`.
    pub fn index(&self) -> usize {
        match self {
            Self::A => 0,
            Self::B => 1,
            Self::C => 2,
            Self::D => 3,
            Self::Multi(m) => *m,
        }
    }

    pub fn name(&self) -> String {
        match self {
            Self::A => "A".into(),
            Self::B => "B".into(),
            Self::C => "C".into(),
            Self::D => "D".into(),
            Self::Multi(m) => format!("E{m}"),
        }
    }
}

/// Which OOB IRSs hit a UE's path set, and the phase each induces.
#[derive(Debug, Clone, PartialEq)]
pub struct AlignmentOutcome {
    /// OOB IRS id → index of the matched path.
    pub aligned_oob: BTreeMap<IrsId, usize>,
    /// OOB IRS id → phase of the matched path relative to the in-band one, in `[−π, π)`.
    pub phase_offsets: BTreeMap<IrsId, f64>,
    pub event_label: EventLabel,
}

impl AlignmentOutcome {
    pub fn count(&self) -> usize {
        self.aligned_oob.len()
    }

    pub fn offset(&self, irs: IrsId) -> Option<f64> {
        self.phase_offsets.get(&irs).copied()
    }
}

/// Finds OOB IRSs steered onto one of the UE's paths.
///
/// The offset of a matched path is `∠(γ_bs γ_ue)` plus the OOB IRS's own conjugate
/// reference; the label counts matches (`Multi(m)`).
pub fn detect_alignment(ue: &UeChannel, oob_settings: &[IrsSetting]) -> AlignmentOutcome {
    let mut aligned_oob = BTreeMap::new();
    let mut phase_offsets = BTreeMap::new();
    for s in oob_settings {
        if s.irs_id == ue.in_band {
            continue;
        }
        let Some(link) = ue.links.get(s.irs_id) else {
            continue;
        };
        if let Some(l) = link.find_angle(s.aligned_angle_index) {
            aligned_oob.insert(s.irs_id, l);
            phase_offsets.insert(s.irs_id, wrap_phase(link.paths[l].product().arg() + s.conj_phase));
        }
    }
    let event_label = EventLabel::Multi(aligned_oob.len());
    AlignmentOutcome {
        aligned_oob,
        phase_offsets,
        event_label,
    }
}

/// Two-operator detection: returns outcomes for UE-k and UE-q labelled A–D.
pub fn detect_alignment_pair(
    ue_k: &UeChannel,
    ue_q: &UeChannel,
    setting_x: &IrsSetting,
    setting_y: &IrsSetting,
) -> (AlignmentOutcome, AlignmentOutcome) {
    let mut k = detect_alignment(ue_k, std::slice::from_ref(setting_y));
    let mut q = detect_alignment(ue_q, std::slice::from_ref(setting_x));
    let label = EventLabel::from_pair(k.count() > 0, q.count() > 0);
    k.event_label = label;
    q.event_label = label;
    (k, q)
}

/// Magnitudes and phase offsets of the two-operator effective channels
/// `h_k = α e^{jφ₁} + γ e^{j(φ₂+φ_a)}` and `h_q = β e^{j(φ₁+φ_b)} + δ e^{jφ₂}`.
///
/// `x + v cos(φ+φ_a)` equals `1 + snr |h_k|²` with `φ = φ₂ − φ₁`, and likewise for
/// `y, z` at UE-q, so `v = 2·snr·αγ` and `z = 2·snr·βδ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectiveChannelTerms {
    pub alpha: f64,
    pub gamma: f64,
    pub beta: f64,
    pub delta: f64,
    pub x: f64,
    pub y: f64,
    pub v: f64,
    pub z: f64,
    pub phi_a: f64,
    pub phi_b: f64,
}

impl EffectiveChannelTerms {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        alpha: f64,
        gamma: f64,
        beta: f64,
        delta: f64,
        phi_a: f64,
        phi_b: f64,
        snr: f64,
    ) -> Result<Self> {
        let vals = [alpha, gamma, beta, delta, phi_a, phi_b, snr];
        if vals.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        if [alpha, gamma, beta, delta, snr].iter().any(|&v| v < 0.0) {
            return Err(invalid("terms", "magnitudes and snr must be non-negative"));
        }
        Ok(Self {
            alpha,
            gamma,
            beta,
            delta,
            x: 1.0 + snr * (alpha * alpha + gamma * gamma),
            y: 1.0 + snr * (beta * beta + delta * delta),
            v: 2.0 * snr * alpha * gamma,
            z: 2.0 * snr * beta * delta,
            phi_a: wrap_phase(phi_a),
            phi_b: wrap_phase(phi_b),
        })
    }

    fn is_finite(&self) -> bool {
        [self.x, self.y, self.v, self.z, self.phi_a, self.phi_b]
            .iter()
            .all(|v| v.is_finite())
    }

    /// `1 + snr|h_k|²` at relative phase `φ = φ₂ − φ₁`.
    pub fn snr_term_k(&self, phi: f64) -> f64 {
        self.x + self.v * (phi + self.phi_a).cos()
    }

    /// `1 + snr|h_q|²` at relative phase `φ`.
    pub fn snr_term_q(&self, phi: f64) -> f64 {
        self.y + self.z * (phi - self.phi_b).cos()
    }

    pub fn se_k(&self, phi: f64) -> f64 {
        self.snr_term_k(phi).log2()
    }

    pub fn se_q(&self, phi: f64) -> f64 {
        self.snr_term_q(phi).log2()
    }

    /// Weighted sum-SE `w_k R_k(φ) + w_q R_q(φ)` in bits/s/Hz.
    pub fn weighted_se(&self, phi: f64, weights: (f64, f64)) -> f64 {
        weights.0 * self.se_k(phi) + weights.1 * self.se_q(phi)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchemeKind {
    JointOpt,
    TimeShare,
    NoCoop,
}

/// How joint optimization picks the relative phase.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhaseSolver {
    /// Single Newton iteration from the better coherent endpoint.
    Newton,
    /// Exhaustive search over a uniform grid of the given size.
    Grid(usize),
}

/// Cooperation scheme and its parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchemePolicy {
    pub kind: SchemeKind,
    /// `(w_k, w_q)`, summing to 1.
    pub weights: (f64, f64),
    /// Fraction of slots in which operator 0 owns the overall phases.
    pub zeta: f64,
    pub solver: PhaseSolver,
}

impl SchemePolicy {
    pub fn joint_opt(w_k: f64, w_q: f64) -> Result<Self> {
        if !(w_k >= 0.0 && w_q >= 0.0 && w_k + w_q > 0.0) || !(w_k + w_q).is_finite() {
            return Err(invalid("weights", "must be non-negative with a positive sum"));
        }
        let s = w_k + w_q;
        Ok(Self {
            kind: SchemeKind::JointOpt,
            weights: (w_k / s, w_q / s),
            zeta: 0.5,
            solver: PhaseSolver::Newton,
        })
    }

    pub fn time_share(zeta: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&zeta) {
            return Err(invalid("zeta", format!("must lie in [0, 1], got {zeta}")));
        }
        Ok(Self {
            kind: SchemeKind::TimeShare,
            weights: (0.5, 0.5),
            zeta,
            solver: PhaseSolver::Newton,
        })
    }

    pub fn no_coop() -> Self {
        Self {
            kind: SchemeKind::NoCoop,
            weights: (0.5, 0.5),
            zeta: 0.5,
            solver: PhaseSolver::Newton,
        }
    }

    pub fn with_solver(mut self, solver: PhaseSolver) -> Self {
        self.solver = solver;
        self
    }

    /// Whether cross terms add coherently in owned slots.
    pub fn cooperates(&self) -> bool {
        self.kind != SchemeKind::NoCoop
    }
}

/// Operator owning the overall phases in slot `t` under time sharing.
///
/// Operator 0 gets slot `t` whenever `⌊(t+1)ζ⌋ > ⌊tζ⌋`, which spreads its `ζ` share
/// evenly; the remaining slots rotate over operators `1..m_ops`.
pub fn time_share_owner(zeta: f64, t: u64, m_ops: usize) -> usize {
    let before = (t as f64 * zeta).floor();
    let after = ((t + 1) as f64 * zeta).floor();
    if after > before || m_ops < 2 {
        return 0;
    }
    let others_before = t - before as u64;
    1 + (others_before % (m_ops as u64 - 1)) as usize
}

/// Overall phases `(φ₁, φ₂)` of IRS-X and IRS-Y for a two-operator slot.
pub fn choose_overall_phases(
    policy: &SchemePolicy,
    event: EventLabel,
    terms: &EffectiveChannelTerms,
    slot_owner: usize,
) -> Result<(f64, f64)> {
    if let EventLabel::Multi(_) = event {
        return Err(Error::Unsupported(format!(
            "two-operator phase rule called with event {}",
            event.name()
        )));
    }
    if !terms.is_finite() {
        return Err(Error::NonFinite);
    }
    let (phi_a, phi_b) = (terms.phi_a, terms.phi_b);
    let phases = match policy.kind {
        SchemeKind::NoCoop => (0.0, 0.0),
        SchemeKind::TimeShare => match (slot_owner, event) {
            (0, EventLabel::A | EventLabel::C) => (phi_a, 0.0),
            (1, EventLabel::A | EventLabel::B) => (0.0, phi_b),
            (0 | 1, _) => (0.0, 0.0),
            _ => {
                return Err(Error::Unsupported(format!(
                    "slot owner {slot_owner} in a two-operator system"
                )))
            }
        },
        SchemeKind::JointOpt => match event {
            EventLabel::A => {
                let phi = match policy.solver {
                    PhaseSolver::Newton => newton_phase(terms, policy.weights)?,
                    PhaseSolver::Grid(points) => grid_search_phase(terms, policy.weights, points)?,
                };
                (0.0, phi)
            }
            EventLabel::B => (0.0, phi_b),
            EventLabel::C => (0.0, wrap_phase(-phi_a)),
            _ => (0.0, 0.0),
        },
    };
    Ok((wrap_phase(phases.0), wrap_phase(phases.1)))
}

/// Overall phases of all `M` IRSs for one slot of an `M`-operator system.
///
/// `owner_offsets[p]` is the phase offset induced by IRS `p` at the slot owner's UE
/// (`None` when IRS `p` misses it). Under time sharing every aligned OOB IRS rotates
/// into phase with the owner's in-band path.
pub fn multi_operator_phases(
    policy: &SchemePolicy,
    owner: usize,
    owner_offsets: &[Option<f64>],
) -> Result<Vec<f64>> {
    let m = owner_offsets.len();
    if owner >= m {
        return Err(invalid("owner", format!("operator {owner} of {m}")));
    }
    match policy.kind {
        SchemeKind::NoCoop => Ok(vec![0.0; m]),
        SchemeKind::TimeShare => Ok(owner_offsets
            .iter()
            .enumerate()
            .map(|(p, off)| match off {
                Some(o) if p != owner => wrap_phase(-o),
                _ => 0.0,
            })
            .collect()),
        SchemeKind::JointOpt => Err(Error::Unsupported(
            "joint optimization is defined for two operators; use time sharing with zeta = 1 as its bound"
                .into(),
        )),
    }
}

fn weighted_ln(terms: &EffectiveChannelTerms, phi: f64, w: (f64, f64)) -> f64 {
    w.0 * terms.snr_term_k(phi).ln() + w.1 * terms.snr_term_q(phi).ln()
}

fn normalized(weights: (f64, f64)) -> Result<(f64, f64)> {
    let s = weights.0 + weights.1;
    if !(weights.0 >= 0.0 && weights.1 >= 0.0 && s > 0.0 && s.is_finite()) {
        return Err(invalid("weights", "must be non-negative with a positive sum"));
    }
    Ok((weights.0 / s, weights.1 / s))
}

/// Single-iteration Newton–Raphson maximizer of
/// `f(φ) = (x + v cos(φ+φ_a))^{w_k} (y + z cos(φ−φ_b))^{w_q}`.
///
/// Starts from whichever of `−φ_a` (coherent at UE-k) and `φ_b` (coherent at UE-q)
/// scores higher, ties going to `−φ_a`, and takes one step `φ − f′/f″`. The step is
/// kept only if it does not lower the objective and `|f″| ≥ 1e-12`.
pub fn newton_phase(terms: &EffectiveChannelTerms, weights: (f64, f64)) -> Result<f64> {
    if !terms.is_finite() {
        return Err(Error::NonFinite);
    }
    let w = normalized(weights)?;
    let start_k = wrap_phase(-terms.phi_a);
    let start_q = wrap_phase(terms.phi_b);
    let init = if weighted_ln(terms, start_k, w) >= weighted_ln(terms, start_q, w) {
        start_k
    } else {
        start_q
    };

    let (ck, sk) = {
        let u = init + terms.phi_a;
        (u.cos(), u.sin())
    };
    let (cq, sq) = {
        let u = init - terms.phi_b;
        (u.cos(), u.sin())
    };
    let den_k = terms.x + terms.v * ck;
    let den_q = terms.y + terms.z * cq;
    let f = (w.0 * den_k.ln() + w.1 * den_q.ln()).exp();
    let d1 = -(w.0 * terms.v * sk / den_k + w.1 * terms.z * sq / den_q);
    let d2 = -(w.0 * terms.v * (terms.x * ck + terms.v) / (den_k * den_k)
        + w.1 * terms.z * (terms.y * cq + terms.z) / (den_q * den_q));
    let f1 = f * d1;
    let f2 = f1 * f1 / f + f * d2;
    if !f2.is_finite() || f2.abs() < 1e-12 {
        return Ok(init);
    }
    let stepped = wrap_phase(init - f1 / f2);
    if weighted_ln(terms, stepped, w) >= weighted_ln(terms, init, w) {
        Ok(stepped)
    } else {
        Ok(init)
    }
}

/// Best phase on the uniform grid `−π + 2πi/points`.
pub fn grid_search_phase(
    terms: &EffectiveChannelTerms,
    weights: (f64, f64),
    points: usize,
) -> Result<f64> {
    if points == 0 {
        return Err(invalid("points", "grid must be non-empty"));
    }
    if !terms.is_finite() {
        return Err(Error::NonFinite);
    }
    let w = normalized(weights)?;
    let mut best = (f64::NEG_INFINITY, -PI);
    for i in 0..points {
        let phi = -PI + TAU * i as f64 / points as f64;
        let val = weighted_ln(terms, phi, w);
        if val > best.0 {
            best = (val, phi);
        }
    }
    Ok(best.1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{sample_link, sample_ue_channel, scalar_channel, AngleConstraint, UeChannel};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn terms(seed: u64) -> EffectiveChannelTerms {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let snr = 10f64.powf(rng.random_range(-2.0..4.0));
        EffectiveChannelTerms::new(
            rng.random_range(0.0..1.0),
            rng.random_range(0.0..1.0),
            rng.random_range(0.0..1.0),
            rng.random_range(0.0..1.0),
            rng.random_range(-PI..PI),
            rng.random_range(-PI..PI),
            snr,
        )
        .unwrap()
    }

    #[test]
    fn wrap_phase_range() {
        assert_eq!(wrap_phase(PI), -PI);
        assert_eq!(wrap_phase(-PI), -PI);
        assert!((wrap_phase(3.0 * PI + 0.5) - (-PI + 0.5)).abs() < 1e-12);
        assert!((wrap_phase(0.3) - 0.3).abs() < 1e-15);
    }

    #[test]
    fn overall_phase_rotates_channel() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let ue = sample_ue_channel(&mut rng, &[16], &[1], &[1.0], 0).unwrap();
        let h0 = scalar_channel(&ue, &[configure_inband(&ue, 0, 0.0).unwrap()]).unwrap();
        assert!(h0.arg().abs() < 1e-12 && h0.re > 0.0);
        let h1 = scalar_channel(&ue, &[configure_inband(&ue, 0, 0.9).unwrap()]).unwrap();
        assert!((h1.arg() - 0.9).abs() < 1e-12);
        assert!((h1.norm() - h0.norm()).abs() < 1e-12 * h0.norm());
        assert!(configure_inband(&ue, 1, 0.0).is_err());
    }

    #[test]
    fn non_dominant_inband_path_is_rejected_by_the_grid() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let ue = sample_ue_channel(&mut rng, &[16], &[2], &[1.0], 0).unwrap();
        let h = scalar_channel(&ue, &[configure_inband(&ue, 0, 0.0).unwrap()]).unwrap();
        let expect = 16.0 / 2f64.sqrt() * ue.dominant_path().product().norm();
        assert!((h.norm() - expect).abs() < 1e-12 * expect);
    }

    /// Builds a two-operator event-A pair with the given gains drawn randomly.
    fn event_a_pair(rng: &mut ChaCha8Rng) -> (UeChannel, UeChannel) {
        let k_in = sample_link(rng, 8, 1, 1.0, AngleConstraint::Free).unwrap();
        let q_in = sample_link(rng, 8, 1, 1.0, AngleConstraint::Free).unwrap();
        let k_oob = sample_link(rng, 8, 3, 1.0, AngleConstraint::Include(q_in.paths[0].angle_index))
            .unwrap();
        let q_oob = sample_link(rng, 8, 3, 1.0, AngleConstraint::Include(k_in.paths[0].angle_index))
            .unwrap();
        (
            UeChannel::new(vec![k_in, k_oob], 0).unwrap(),
            UeChannel::new(vec![q_oob, q_in], 1).unwrap(),
        )
    }

    #[test]
    fn event_a_timeshare_gives_coherent_sum() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for _ in 0..50 {
            let (k, q) = event_a_pair(&mut rng);
            let sx = configure_inband(&k, 0, 0.0).unwrap();
            let sy = configure_inband(&q, 1, 0.0).unwrap();
            let (ok, oq) = detect_alignment_pair(&k, &q, &sx, &sy);
            assert_eq!(ok.event_label, EventLabel::A);
            assert_eq!(oq.event_label, EventLabel::A);
            let phi_a = ok.offset(1).unwrap();
            let alpha = k.links[0].amplitude() * k.dominant_path().product().norm();
            let l = ok.aligned_oob[&1];
            let gamma = k.links[1].amplitude() * k.links[1].paths[l].product().norm();
            let settings = [
                IrsSetting { overall_phase: phi_a, ..sx },
                IrsSetting { overall_phase: 0.0, ..sy },
            ];
            let h = scalar_channel(&k, &settings).unwrap();
            assert!((h.norm() - (alpha + gamma)).abs() < 1e-9 * (alpha + gamma));
        }
    }

    #[test]
    fn event_labels_cover_all_pairs() {
        assert_eq!(EventLabel::from_pair(true, true), EventLabel::A);
        assert_eq!(EventLabel::from_pair(false, true), EventLabel::B);
        assert_eq!(EventLabel::from_pair(true, false), EventLabel::C);
        assert_eq!(EventLabel::from_pair(false, false), EventLabel::D);
    }

    #[test]
    fn phase_rules() {
        let t = EffectiveChannelTerms::new(1.0, 0.5, 0.4, 1.0, 1.2, -0.7, 10.0).unwrap();
        let nco = SchemePolicy::no_coop();
        let ts = SchemePolicy::time_share(0.5).unwrap();
        for ev in [EventLabel::A, EventLabel::B, EventLabel::C, EventLabel::D] {
            assert_eq!(choose_overall_phases(&nco, ev, &t, 0).unwrap(), (0.0, 0.0));
        }
        assert_eq!(choose_overall_phases(&ts, EventLabel::A, &t, 0).unwrap(), (1.2, 0.0));
        assert_eq!(choose_overall_phases(&ts, EventLabel::B, &t, 1).unwrap(), (0.0, -0.7));
        assert_eq!(choose_overall_phases(&ts, EventLabel::D, &t, 1).unwrap(), (0.0, 0.0));
        assert!(choose_overall_phases(&ts, EventLabel::Multi(1), &t, 0).is_err());
        assert!(choose_overall_phases(&ts, EventLabel::A, &t, 2).is_err());
        let jo = SchemePolicy::joint_opt(1.0, 1.0).unwrap();
        let (p1, _) = choose_overall_phases(&jo, EventLabel::A, &t, 0).unwrap();
        assert_eq!(p1, 0.0);
        assert!(SchemePolicy::time_share(1.5).is_err());
        assert!(SchemePolicy::joint_opt(-1.0, 1.0).is_err());
        assert_eq!(SchemePolicy::joint_opt(3.0, 1.0).unwrap().weights, (0.75, 0.25));
    }

    #[test]
    fn newton_at_stationary_start() {
        let t = EffectiveChannelTerms::new(1.0, 0.7, 0.6, 1.0, 0.8, -0.8, 100.0).unwrap();
        let phi = newton_phase(&t, (0.5, 0.5)).unwrap();
        assert!((phi - (-0.8)).abs() < 1e-12);
    }

    #[test]
    fn newton_single_user_is_coherent() {
        for seed in 0..100 {
            let t = terms(seed);
            let phi = newton_phase(&t, (1.0, 0.0)).unwrap();
            assert_eq!(phi, wrap_phase(-t.phi_a));
        }
    }

    /// Event-A magnitudes as the channel model produces them: products of two unit
    /// Rayleigh hops, uniform offsets, and a log-uniform SNR.
    fn model_terms(seed: u64) -> EffectiveChannelTerms {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
        let mut mag = || {
            (crate::channel::sample_cn(&mut rng) * crate::channel::sample_cn(&mut rng)).norm()
        };
        let (a, g, b, d) = (mag(), mag(), mag(), mag());
        let snr = 10f64.powf(rng.random_range(-2.0..6.0));
        EffectiveChannelTerms::new(
            a,
            g,
            b,
            d,
            rng.random_range(-PI..PI),
            rng.random_range(-PI..PI),
            snr,
        )
        .unwrap()
    }

    #[test]
    fn newton_matches_grid_search() {
        let trials = 1000;
        let close = (0..trials)
            .filter(|&seed| {
                let t = model_terms(seed);
                let w = (0.5, 0.5);
                let best = t.weighted_se(grid_search_phase(&t, w, 10_000).unwrap(), w);
                t.weighted_se(newton_phase(&t, w).unwrap(), w) >= 0.99 * best
            })
            .count();
        assert!(close >= 950, "{close} of {trials} instances within 1% of the grid optimum");
    }

    #[test]
    fn individual_optima_sit_at_offsets() {
        for seed in 0..50 {
            let t = terms(seed);
            let k_best = grid_search_phase(&t, (1.0, 0.0), 10_000).unwrap();
            let q_best = grid_search_phase(&t, (0.0, 1.0), 10_000).unwrap();
            let step = TAU / 10_000.0;
            if t.v > 0.0 {
                assert!(wrap_phase(k_best + t.phi_a).abs() <= step);
            }
            if t.z > 0.0 {
                assert!(wrap_phase(q_best - t.phi_b).abs() <= step);
                // Both maxima coincide only when φ_a + φ_b ≡ 0.
                if t.v > 0.0 && wrap_phase(t.phi_a + t.phi_b).abs() > 2.0 * step {
                    assert!(wrap_phase(k_best - q_best).abs() > step);
                }
            }
        }
    }

    #[test]
    fn time_share_owner_interleaves() {
        let owners: Vec<_> = (0..8).map(|t| time_share_owner(0.5, t, 2)).collect();
        assert_eq!(owners, vec![1, 0, 1, 0, 1, 0, 1, 0]);
        assert!((0..100).all(|t| time_share_owner(1.0, t, 3) == 0));
        let three: Vec<_> = (0..6).map(|t| time_share_owner(0.0, t, 3)).collect();
        assert_eq!(three, vec![1, 2, 1, 2, 1, 2]);
        let n = 10_000u64;
        let x = (0..n).filter(|&t| time_share_owner(0.3, t, 2) == 0).count();
        assert!((x as i64 - 3000).abs() <= 1);
    }

    #[test]
    fn multi_operator_time_share_coheres_owner() {
        let p = SchemePolicy::time_share(1.0).unwrap();
        let phases = multi_operator_phases(&p, 0, &[None, Some(0.4), None, Some(-2.0)]).unwrap();
        assert_eq!(phases, vec![0.0, -0.4, 0.0, 2.0]);
        let jo = SchemePolicy::joint_opt(1.0, 1.0).unwrap();
        assert!(multi_operator_phases(&jo, 0, &[None, None, None]).is_err());
        assert_eq!(
            multi_operator_phases(&SchemePolicy::no_coop(), 2, &[Some(1.0), None, None]).unwrap(),
            vec![0.0; 3]
        );
    }

    proptest! {
        #[test]
        fn newton_never_lowers_objective(seed in any::<u64>(), wk in 0.0f64..1.0) {
            let t = terms(seed);
            let w = (wk, 1.0 - wk);
            let phi = newton_phase(&t, w).unwrap();
            let start = if t.weighted_se(-t.phi_a, w) >= t.weighted_se(t.phi_b, w) {
                -t.phi_a
            } else {
                t.phi_b
            };
            prop_assert!(t.weighted_se(phi, w) >= t.weighted_se(start, w) - 1e-9);
            prop_assert!((-PI..PI).contains(&phi));
        }

        #[test]
        fn all_rules_return_wrapped_phases(seed in any::<u64>(), owner in 0usize..2, ev in 0usize..4) {
            let t = terms(seed);
            let event = [EventLabel::A, EventLabel::B, EventLabel::C, EventLabel::D][ev];
            for p in [
                SchemePolicy::no_coop(),
                SchemePolicy::time_share(0.5).unwrap(),
                SchemePolicy::joint_opt(0.3, 0.7).unwrap(),
            ] {
                let (a, b) = choose_overall_phases(&p, event, &t, owner).unwrap();
                prop_assert!((-PI..PI).contains(&a) && (-PI..PI).contains(&b));
            }
        }
    }
}
