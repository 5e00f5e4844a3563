//! Closed-form ergodic spectral efficiencies.
//!
//! All expressions are Jensen-type approximations `E[log₂(1+X)] ≈ log₂(1+E[X])` in
//! which the dominant in-band cascaded magnitude is summarized by the Rayleigh
//! order statistics `f(L)` and `g(L)`. They are evaluated exactly as written; their
//! accuracy is checked against the simulator, not assumed.
//!
//! Most two-operator formulas are symmetric under exchanging the operators, so they
//! are written once for a [`SideBudget`], the view of one UE: its in-band IRS, the
//! out-of-band IRS, and the path counts and losses through each.

use std::f64::consts::{LN_2, PI};

use crate::error::{invalid, Error, Result};
use crate::irs::{EventLabel, SchemeKind, SchemePolicy};
use crate::specfun::{check_paths, f_mean_max, g_mean_max_sq, psi, EventModel};

/// `log₂(1 + x)`, accurate for small `x`.
pub fn log2_1p(x: f64) -> f64 {
    x.ln_1p() / LN_2
}

/// Link budget of one two-operator UE pair: UE-k of operator X and UE-q of operator Y.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkBudget {
    /// Transmit SNR `P/σ²`, linear.
    pub snr: f64,
    pub n1: usize,
    pub n2: usize,
    pub l_k1: usize,
    pub l_k2: usize,
    pub l_q1: usize,
    pub l_q2: usize,
    pub beta_xk1: f64,
    pub beta_xk2: f64,
    pub beta_yq1: f64,
    pub beta_yq2: f64,
}

impl LinkBudget {
    pub fn validate(&self) -> Result<()> {
        check_paths(self.l_k1, self.n1)?;
        check_paths(self.l_q1, self.n1)?;
        check_paths(self.l_k2, self.n2)?;
        check_paths(self.l_q2, self.n2)?;
        let pos = [self.snr, self.beta_xk1, self.beta_xk2, self.beta_yq1, self.beta_yq2];
        if pos.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(invalid("budget", "snr and path losses must be positive and finite"));
        }
        Ok(())
    }

    /// UE-k's view: in-band IRS-X, out-of-band IRS-Y.
    pub fn side_k(&self) -> SideBudget {
        SideBudget {
            snr: self.snr,
            n_in: self.n1,
            n_oob: self.n2,
            l_in: self.l_k1,
            l_oob: self.l_k2,
            beta_in: self.beta_xk1,
            beta_oob: self.beta_xk2,
        }
    }

    /// UE-q's view: in-band IRS-Y, out-of-band IRS-X.
    pub fn side_q(&self) -> SideBudget {
        SideBudget {
            snr: self.snr,
            n_in: self.n2,
            n_oob: self.n1,
            l_in: self.l_q2,
            l_oob: self.l_q1,
            beta_in: self.beta_yq2,
            beta_oob: self.beta_yq1,
        }
    }

    /// `Pr(A), Pr(B), Pr(C), Pr(D)`.
    pub fn event_probabilities(&self) -> [f64; 4] {
        let pq = self.l_q1 as f64 / self.n1 as f64;
        let pk = self.l_k2 as f64 / self.n2 as f64;
        [pq * pk, pq * (1.0 - pk), (1.0 - pq) * pk, (1.0 - pq) * (1.0 - pk)]
    }
}

/// One UE's view of a two-operator system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SideBudget {
    pub snr: f64,
    pub n_in: usize,
    pub n_oob: usize,
    pub l_in: usize,
    pub l_oob: usize,
    pub beta_in: f64,
    pub beta_oob: f64,
}

impl SideBudget {
    pub fn validate(&self) -> Result<()> {
        check_paths(self.l_in, self.n_in)?;
        check_paths(self.l_oob, self.n_oob)?;
        if [self.snr, self.beta_in, self.beta_oob]
            .iter()
            .any(|v| !(v.is_finite() && *v > 0.0))
        {
            return Err(invalid("budget", "snr and path losses must be positive and finite"));
        }
        Ok(())
    }

    /// Probability that the OOB IRS aligns to this UE.
    pub fn align_prob(&self) -> f64 {
        self.l_oob as f64 / self.n_oob as f64
    }

    /// Mean in-band channel gain `N²/L · g(L)² · β` (without SNR).
    pub fn inband_gain(&self) -> Result<f64> {
        let g = g_mean_max_sq(self.l_in)?;
        Ok(sq(self.n_in) / self.l_in as f64 * g * g * self.beta_in)
    }

    /// Mean OOB channel gain `N_o²/L_o · β_o`.
    pub fn oob_gain(&self) -> f64 {
        sq(self.n_oob) / self.l_oob as f64 * self.beta_oob
    }

    /// Coherent cross term `π N N_o f(L)² √(β β_o) / (2√(L L_o))`.
    pub fn cross_gain(&self) -> Result<f64> {
        let f = f_mean_max(self.l_in)?;
        Ok(PI * self.n_in as f64 * self.n_oob as f64 * f * f * (self.beta_in * self.beta_oob).sqrt()
            / (2.0 * ((self.l_in * self.l_oob) as f64).sqrt()))
    }

    /// SE with only the in-band IRS contributing.
    pub fn se_inband_only(&self) -> Result<f64> {
        Ok(log2_1p(self.snr * self.inband_gain()?))
    }

    /// SE with the OOB IRS aligned but adding with random phase.
    pub fn se_incoherent(&self) -> Result<f64> {
        Ok(log2_1p(self.snr * (self.inband_gain()? + self.oob_gain())))
    }

    /// SE with the OOB IRS aligned and phased coherently.
    pub fn se_coherent(&self) -> Result<f64> {
        Ok(log2_1p(
            self.snr * (self.inband_gain()? + self.oob_gain() + self.cross_gain()?),
        ))
    }
}

fn sq(n: usize) -> f64 {
    (n as f64) * (n as f64)
}

/// Event-A SEs `(R_k, R_q)` under time sharing with operator X owning a `ζ` share.
pub fn rate_event_a_timeshare(b: &LinkBudget, zeta: f64) -> Result<(f64, f64)> {
    b.validate()?;
    if !(0.0..=1.0).contains(&zeta) {
        return Err(invalid("zeta", format!("must lie in [0, 1], got {zeta}")));
    }
    let (k, q) = (b.side_k(), b.side_q());
    Ok((
        (1.0 - zeta) * k.se_incoherent()? + zeta * k.se_coherent()?,
        zeta * q.se_incoherent()? + (1.0 - zeta) * q.se_coherent()?,
    ))
}

/// SE of one UE conditioned on whether its OOB IRS is aligned.
///
/// `own_share` is the fraction of aligned slots in which the UE's operator controls
/// the phases; it only matters for time sharing. Joint optimization is credited with
/// the coherent value, which is exact for events B and C and an upper bound for A.
pub fn ue_event_se(s: &SideBudget, aligned: bool, kind: SchemeKind, own_share: f64) -> Result<f64> {
    if !aligned {
        return s.se_inband_only();
    }
    match kind {
        SchemeKind::NoCoop => s.se_incoherent(),
        SchemeKind::JointOpt => s.se_coherent(),
        SchemeKind::TimeShare => {
            Ok(own_share * s.se_coherent()? + (1.0 - own_share) * s.se_incoherent()?)
        }
    }
}

/// Conditional SE pair `(R_k | event, R_q | event)` for a scheme.
///
/// For time sharing, `owner = Some(op)` gives the SE in slots owned by `op` and
/// `None` the `ζ`-blend over slots. Joint optimization under event A has no closed
/// form and is rejected.
pub fn rate_event_conditionals(
    b: &LinkBudget,
    event: EventLabel,
    scheme: &SchemePolicy,
    owner: Option<usize>,
) -> Result<(f64, f64)> {
    b.validate()?;
    let (k_aligned, q_aligned) = match event {
        EventLabel::A => (true, true),
        EventLabel::B => (false, true),
        EventLabel::C => (true, false),
        EventLabel::D => (false, false),
        EventLabel::Multi(_) => {
            return Err(Error::Unsupported("M-operator event in a two-operator budget".into()))
        }
    };
    if scheme.kind == SchemeKind::JointOpt && event == EventLabel::A {
        return Err(Error::Unsupported(
            "joint optimization under event A has no closed form".into(),
        ));
    }
    let zeta_x = match owner {
        None => scheme.zeta,
        Some(0) => 1.0,
        Some(1) => 0.0,
        Some(op) => return Err(invalid("owner", format!("operator {op} of 2"))),
    };
    Ok((
        ue_event_se(&b.side_k(), k_aligned, scheme.kind, zeta_x)?,
        ue_event_se(&b.side_q(), q_aligned, scheme.kind, 1.0 - zeta_x)?,
    ))
}

/// Ergodic SE of one UE: law of total expectation over whether its OOB IRS aligns.
///
/// In aligned slots the UE's operator owns the phases for a share `own_share`;
/// `co = false` drops the coherent cross term.
pub fn ue_ergodic_se(s: &SideBudget, own_share: f64, co: bool) -> Result<f64> {
    s.validate()?;
    let p = s.align_prob();
    let aligned = if co {
        own_share * s.se_coherent()? + (1.0 - own_share) * s.se_incoherent()?
    } else {
        s.se_incoherent()?
    };
    Ok((1.0 - p) * s.se_inband_only()? + p * aligned)
}

/// Ergodic SE of one UE when no OOB IRS is deployed.
pub fn ue_no_oob_se(s: &SideBudget) -> Result<f64> {
    s.validate()?;
    s.se_inband_only()
}

fn mean_over(sides: &[SideBudget], f: impl Fn(&SideBudget) -> Result<f64>) -> Result<f64> {
    if sides.is_empty() {
        return Err(Error::EmptyUeList);
    }
    let mut acc = 0.0;
    for s in sides {
        acc += f(s)?;
    }
    Ok(acc / sides.len() as f64)
}

/// Operator sum-SE `(1/K) Σ_k ⟨R_k⟩` for a given phase-ownership share.
pub fn operator_se(sides: &[SideBudget], own_share: f64, co: bool) -> Result<f64> {
    mean_over(sides, |s| ue_ergodic_se(s, own_share, co))
}

/// Operator sum-SE without any OOB IRS.
pub fn operator_no_oob_se(sides: &[SideBudget]) -> Result<f64> {
    mean_over(sides, ue_no_oob_se)
}

/// Round-robin sum-SEs `(R_X, R_Y)` of both operators.
///
/// `k_sides` and `q_sides` are the per-UE budgets of operators X and Y. Time sharing
/// gives X a `ζ` share and Y `1 − ζ`; joint optimization returns its upper bound,
/// time sharing with every aligned slot owned by the UE's operator.
pub fn theorem1_sum_se(
    scheme: &SchemePolicy,
    k_sides: &[SideBudget],
    q_sides: &[SideBudget],
) -> Result<(f64, f64)> {
    let (share_x, share_y, co) = match scheme.kind {
        SchemeKind::TimeShare => (scheme.zeta, 1.0 - scheme.zeta, true),
        SchemeKind::JointOpt => (1.0, 1.0, true),
        SchemeKind::NoCoop => (0.0, 0.0, false),
    };
    Ok((
        operator_se(k_sides, share_x, co)?,
        operator_se(q_sides, share_y, co)?,
    ))
}

/// Gain of operator X from the OOB IRS (time sharing at `ζ = 1` when `co`).
pub fn theorem2_oob_gain(sides: &[SideBudget], co: bool) -> Result<f64> {
    mean_over(sides, |s| {
        s.validate()?;
        let extra = s.oob_gain() + if co { s.cross_gain()? } else { 0.0 };
        Ok(s.align_prob() * log2_1p(extra / (1.0 / s.snr + s.inband_gain()?)))
    })
}

/// Low-SNR form of [`theorem2_oob_gain`], linear in the SNR.
pub fn theorem2_oob_gain_low_snr(sides: &[SideBudget], co: bool) -> Result<f64> {
    mean_over(sides, |s| {
        s.validate()?;
        let mut g = s.n_oob as f64 * s.beta_oob;
        if co {
            let f = f_mean_max(s.l_in)?;
            g += PI * s.n_in as f64 * f * f * (s.beta_in * s.beta_oob).sqrt() / 2.0
                * (s.l_oob as f64 / s.l_in as f64).sqrt();
        }
        Ok(g * s.snr / LN_2)
    })
}

/// High-SNR form of [`theorem2_oob_gain`], independent of the SNR.
pub fn theorem2_oob_gain_high_snr(sides: &[SideBudget], co: bool) -> Result<f64> {
    mean_over(sides, |s| {
        s.validate()?;
        let g = g_mean_max_sq(s.l_in)?;
        let ratio = s.n_oob as f64 / s.n_in as f64;
        let lr = s.l_in as f64 / s.l_oob as f64;
        let mut x = ratio * ratio * lr * s.beta_oob / (g * g * s.beta_in);
        if co {
            let f = f_mean_max(s.l_in)?;
            x += PI * ratio / 2.0 * f * f * (s.beta_oob * s.l_in as f64).sqrt()
                / (g * g * (s.beta_in * s.l_oob as f64).sqrt());
        }
        Ok(s.align_prob() * log2_1p(x))
    })
}

/// Upper bound on the cooperation gain `(1/K) Σ (L_o/N_o) log₂(1 + Ψ(L) π/4)`.
pub fn theorem2_coop_gain_bound(sides: &[SideBudget]) -> Result<f64> {
    mean_over(sides, |s| {
        s.validate()?;
        Ok(s.align_prob() * log2_1p(psi(s.l_in)? * PI / 4.0))
    })
}

/// Budget of one UE of operator 1 among `M` operators with common `N` and `L`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MultiMoBudget {
    pub m_ops: usize,
    pub n: usize,
    pub l: usize,
    pub beta: f64,
    pub snr: f64,
    pub zeta1: f64,
    pub co: bool,
}

impl MultiMoBudget {
    pub fn validate(&self) -> Result<()> {
        if self.m_ops < 2 {
            return Err(invalid("num_operators", "need at least 2 operators"));
        }
        check_paths(self.l, self.n)?;
        if !(0.0..=1.0).contains(&self.zeta1) {
            return Err(invalid("zeta", format!("must lie in [0, 1], got {}", self.zeta1)));
        }
        if ![self.beta, self.snr].iter().all(|v| v.is_finite() && *v > 0.0) {
            return Err(invalid("budget", "snr and path loss must be positive and finite"));
        }
        Ok(())
    }

    fn event_model(&self) -> EventModel {
        EventModel {
            num_oob_irs: self.m_ops - 1,
            align_prob: self.l as f64 / self.n as f64,
        }
    }

    /// Normalized coherent gain `m + CO·m(π/2)(f² + π(m−1)/8)` added by `m` aligned IRSs.
    fn oob_terms(&self, m: usize, f2: f64) -> (f64, f64) {
        let m = m as f64;
        let cross = if self.co {
            m * PI / 2.0 * (f2 + PI * (m - 1.0) / 8.0)
        } else {
            0.0
        };
        (m, cross)
    }
}

/// Ergodic SE of one UE of operator 1 among `M` operators under time sharing
/// (`co = true`, operator 1 owning a `ζ₁` share) or no cooperation (`co = false`).
pub fn theorem3_multi_mo_rate(b: &MultiMoBudget) -> Result<f64> {
    b.validate()?;
    let f = f_mean_max(b.l)?;
    let g = g_mean_max_sq(b.l)?;
    let scale = b.snr * sq(b.n) / b.l as f64 * b.beta;
    let pmf = b.event_model().pmf();
    let mut r = 0.0;
    for (m, p) in pmf.iter().enumerate() {
        let (inc, cross) = b.oob_terms(m, f * f);
        r += p
            * (b.zeta1 * log2_1p(scale * (g * g + inc + cross))
                + (1.0 - b.zeta1) * log2_1p(scale * (g * g + inc)));
    }
    Ok(r)
}

/// Single-operator SE `log₂(1 + snr N²/L g(L)² β)` with no OOB IRS.
pub fn multi_mo_no_oob_rate(b: &MultiMoBudget) -> Result<f64> {
    b.validate()?;
    let g = g_mean_max_sq(b.l)?;
    Ok(log2_1p(b.snr * sq(b.n) / b.l as f64 * g * g * b.beta))
}

/// High-SNR gains `(ΔR_oob, ΔR_co bound)` of operator 1 among `M` operators.
pub fn theorem4_multi_mo_gains(b: &MultiMoBudget) -> Result<(f64, f64)> {
    b.validate()?;
    let f = f_mean_max(b.l)?;
    let g = g_mean_max_sq(b.l)?;
    let ps = psi(b.l)?;
    let pmf = b.event_model().pmf();
    let (mut oob, mut co) = (0.0, 0.0);
    for (m, p) in pmf.iter().enumerate().skip(1) {
        let (inc, cross) = b.oob_terms(m, f * f);
        oob += p * log2_1p((inc + cross) / (g * g));
        let mf = m as f64;
        co += p * log2_1p(PI * mf.sqrt() / 4.0 * (ps + PI * (mf - 1.0) / (8.0 * g)));
    }
    Ok((oob, co))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn budget(snr: f64) -> LinkBudget {
        LinkBudget {
            snr,
            n1: 16,
            n2: 16,
            l_k1: 1,
            l_k2: 4,
            l_q1: 3,
            l_q2: 2,
            beta_xk1: 2e-10,
            beta_xk2: 1e-10,
            beta_yq1: 3e-10,
            beta_yq2: 5e-11,
        }
    }

    #[test]
    fn log2_1p_small_argument() {
        assert!((log2_1p(1e-20) - 1e-20 / LN_2).abs() < 1e-35);
        assert_eq!(log2_1p(1.0), 1.0);
    }

    #[test]
    fn zeta_one_keeps_k_cross_term_only() {
        let b = budget(1e8);
        let (k, q) = rate_event_a_timeshare(&b, 1.0).unwrap();
        assert_eq!(k, b.side_k().se_coherent().unwrap());
        assert_eq!(q, b.side_q().se_incoherent().unwrap());
        let (k0, q0) = rate_event_a_timeshare(&b, 0.0).unwrap();
        assert_eq!(k0, b.side_k().se_incoherent().unwrap());
        assert_eq!(q0, b.side_q().se_coherent().unwrap());
        assert!(k > k0 && q0 > q);
    }

    #[test]
    fn vanishing_snr_gives_zero_rate() {
        let (k, q) = rate_event_a_timeshare(&budget(1e-300), 0.3).unwrap();
        assert!(k < 1e-280 && q < 1e-280);
    }

    #[test]
    fn event_d_is_scheme_independent() {
        let b = budget(1e8);
        let schemes = [
            SchemePolicy::no_coop(),
            SchemePolicy::time_share(0.3).unwrap(),
            SchemePolicy::joint_opt(1.0, 2.0).unwrap(),
        ];
        let first = rate_event_conditionals(&b, EventLabel::D, &schemes[0], None).unwrap();
        for s in &schemes[1..] {
            assert_eq!(rate_event_conditionals(&b, EventLabel::D, s, None).unwrap(), first);
        }
    }

    #[test]
    fn event_mappings() {
        let b = budget(1e8);
        let (_, q) = rate_event_conditionals(&b, EventLabel::B, &SchemePolicy::no_coop(), None)
            .unwrap();
        assert_eq!(q, b.side_q().se_incoherent().unwrap());
        let jo = SchemePolicy::joint_opt(1.0, 1.0).unwrap();
        let (k, q) = rate_event_conditionals(&b, EventLabel::C, &jo, None).unwrap();
        assert_eq!(k, b.side_k().se_coherent().unwrap());
        assert_eq!(q, b.side_q().se_inband_only().unwrap());
        assert!(rate_event_conditionals(&b, EventLabel::A, &jo, None).is_err());
        let ts = SchemePolicy::time_share(0.25).unwrap();
        let (k, q) = rate_event_conditionals(&b, EventLabel::A, &ts, None).unwrap();
        let (k2, q2) = rate_event_a_timeshare(&b, 0.25).unwrap();
        assert!((k - k2).abs() < 1e-12 && (q - q2).abs() < 1e-12);
        let (kx, qx) = rate_event_conditionals(&b, EventLabel::A, &ts, Some(0)).unwrap();
        assert_eq!(kx, b.side_k().se_coherent().unwrap());
        assert_eq!(qx, b.side_q().se_incoherent().unwrap());
    }

    #[test]
    fn theorem1_is_event_average() {
        // Averaging the per-event conditionals with Pr(A..D) reproduces Theorem 1.
        let b = budget(1e9);
        let probs = b.event_probabilities();
        assert!((probs.iter().sum::<f64>() - 1.0).abs() < 1e-15);
        for scheme in [SchemePolicy::no_coop(), SchemePolicy::time_share(0.4).unwrap()] {
            let mut rk = 0.0;
            let mut rq = 0.0;
            for (e, p) in [EventLabel::A, EventLabel::B, EventLabel::C, EventLabel::D]
                .iter()
                .zip(probs)
            {
                let (k, q) = rate_event_conditionals(&b, *e, &scheme, None).unwrap();
                rk += p * k;
                rq += p * q;
            }
            let (rx, ry) = theorem1_sum_se(&scheme, &[b.side_k()], &[b.side_q()]).unwrap();
            assert!((rx - rk).abs() < 1e-12 && (ry - rq).abs() < 1e-12);
        }
    }

    #[test]
    fn theorem1_rejects_empty() {
        let b = budget(1.0);
        assert_eq!(
            theorem1_sum_se(&SchemePolicy::no_coop(), &[], &[b.side_q()]),
            Err(Error::EmptyUeList)
        );
    }

    #[test]
    fn large_oob_array_removes_oob_effect() {
        let mut s = budget(1e8).side_k();
        s.n_oob = 1 << 40;
        s.beta_oob = 1e-30;
        let ts = operator_se(&[s], 1.0, true).unwrap();
        let none = operator_no_oob_se(&[s]).unwrap();
        assert!((ts - none).abs() < 1e-9);
    }

    // The tabulated value of psi(1) is pi/4 to six places.
    #[allow(clippy::approx_constant)]
    #[test]
    fn coop_bound_example() {
        let mut s = budget(1e8).side_k();
        s.l_in = 1;
        s.l_oob = s.n_oob;
        let expect = log2_1p(psi(1).unwrap() * PI / 4.0);
        assert!((theorem2_coop_gain_bound(&[s]).unwrap() - expect).abs() < 1e-15);
        assert!((expect - log2_1p(0.785_398 * PI / 4.0)).abs() < 1e-5);
    }

    #[test]
    fn multi_mo_zero_alignment_is_single_operator() {
        let b = MultiMoBudget {
            m_ops: 4,
            n: 1 << 30,
            l: 1,
            beta: 1e-10,
            snr: 1e14,
            zeta1: 1.0,
            co: true,
        };
        let r = theorem3_multi_mo_rate(&b).unwrap();
        assert!((r - multi_mo_no_oob_rate(&b).unwrap()).abs() < 1e-6);
        let (oob, co) = theorem4_multi_mo_gains(&b).unwrap();
        assert!(oob < 1e-8 && co < 1e-8);
    }

    #[test]
    fn multi_mo_bound_matches_two_operator_bound_at_m2() {
        let b = MultiMoBudget {
            m_ops: 2,
            n: 64,
            l: 5,
            beta: 1e-10,
            snr: 1e8,
            zeta1: 1.0,
            co: true,
        };
        let side = SideBudget {
            snr: 1e8,
            n_in: 64,
            n_oob: 64,
            l_in: 5,
            l_oob: 5,
            beta_in: 1e-10,
            beta_oob: 1e-10,
        };
        let (_, co) = theorem4_multi_mo_gains(&b).unwrap();
        assert!((co - theorem2_coop_gain_bound(&[side]).unwrap()).abs() < 1e-15);
    }

    fn arb_side() -> impl Strategy<Value = SideBudget> {
        (
            0u32..11,
            0u32..11,
            1usize..64,
            1usize..64,
            -14.0f64..-6.0,
            -14.0f64..-6.0,
            4.0f64..16.0,
        )
            .prop_map(|(a, b, l1, l2, bi, bo, snr)| {
                let (n_in, n_oob) = (1usize << a, 1usize << b);
                SideBudget {
                    snr: 10f64.powf(snr),
                    n_in,
                    n_oob,
                    l_in: 1 + l1 % n_in,
                    l_oob: 1 + l2 % n_oob,
                    beta_in: 10f64.powf(bi),
                    beta_oob: 10f64.powf(bo),
                }
            })
    }

    proptest! {
        #[test]
        fn scheme_ordering(s in arb_side()) {
            let ts1 = operator_se(&[s], 1.0, true).unwrap();
            let jo = theorem1_sum_se(&SchemePolicy::joint_opt(1.0, 1.0).unwrap(), &[s], &[s]).unwrap().0;
            let nco = operator_se(&[s], 0.0, false).unwrap();
            let none = operator_no_oob_se(&[s]).unwrap();
            prop_assert!(ts1 >= jo && jo >= nco && nco >= none);
        }

        #[test]
        fn time_share_is_affine_in_zeta(s in arb_side(), z in 0.0f64..1.0) {
            let r0 = operator_se(&[s], 0.0, true).unwrap();
            let r1 = operator_se(&[s], 1.0, true).unwrap();
            let rz = operator_se(&[s], z, true).unwrap();
            prop_assert!((rz - ((1.0 - z) * r0 + z * r1)).abs() < 1e-9 * (1.0 + r1));
        }

        #[test]
        fn oob_gain_is_nonnegative(s in arb_side(), co in any::<bool>()) {
            prop_assert!(theorem2_oob_gain(&[s], co).unwrap() >= 0.0);
        }

        #[test]
        fn cooperation_gain_respects_bound(s in arb_side()) {
            let gain = operator_se(&[s], 1.0, true).unwrap() - operator_se(&[s], 0.0, false).unwrap();
            prop_assert!(gain <= theorem2_coop_gain_bound(&[s]).unwrap() + 1e-12);
        }

        #[test]
        fn co_flag_only_drops_cross_term(s in arb_side()) {
            let p = s.align_prob();
            let expect = (1.0 - p) * s.se_inband_only().unwrap() + p * s.se_incoherent().unwrap();
            for share in [0.0, 0.5, 1.0] {
                prop_assert!((operator_se(&[s], share, false).unwrap() - expect).abs() < 1e-12);
            }
        }
    }
}
