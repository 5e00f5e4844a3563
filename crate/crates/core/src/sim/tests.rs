use super::checks::*;
use super::*;
use crate::channel::Rect;

fn square() -> Geometry {
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

fn ring(m: usize) -> Geometry {
    let corners = [(0.0, 0.0), (200.0, 0.0), (200.0, 200.0), (0.0, 200.0)];
    let irs = (0..m)
        .map(|k| {
            let th = std::f64::consts::FRAC_PI_4 + k as f64 * std::f64::consts::FRAC_PI_2;
            Point::new(100.0 + 5.0 * th.cos(), 100.0 + 5.0 * th.sin())
        })
        .collect();
    Geometry {
        bs_positions: corners[..m].iter().map(|&(x, y)| Point::new(x, y)).collect(),
        irs_positions: irs,
        ..square()
    }
}

/// Two operators, `L = (l_k1, l_k2, l_q1, l_q2)`, SNR referenced to `C₀γ = 150 dB`.
fn two_op(n: usize, l: [usize; 4], scheme: SchemePolicy, slots: u64) -> SystemConfig {
    let ues = vec![10, 10];
    SystemConfig {
        num_operators: 2,
        elements_per_irs: vec![n, n],
        paths: SystemConfig::uniform_paths(&[vec![l[0], l[1]], vec![l[2], l[3]]], &ues),
        ues_per_operator: ues,
        snr: 1e21,
        scheme,
        geometry: square(),
        slots,
        seed: 7,
        campaign_id: 0,
        condition: None,
    }
}

fn multi_op(m: usize, n: usize, l: usize, scheme: SchemePolicy, slots: u64) -> SystemConfig {
    let ues = vec![10; m];
    SystemConfig {
        num_operators: m,
        elements_per_irs: vec![n; m],
        paths: SystemConfig::uniform_paths(&vec![vec![l; m]; m], &ues),
        ues_per_operator: ues,
        snr: 1e21,
        scheme,
        geometry: ring(m),
        slots,
        seed: 11,
        campaign_id: 0,
        condition: None,
    }
}

fn ts1() -> SchemePolicy {
    SchemePolicy::time_share(1.0).unwrap()
}

#[test]
fn rejects_paths_beyond_elements() {
    let cfg = two_op(8, [1, 9, 1, 1], ts1(), 10);
    assert!(matches!(
        Campaign::new(cfg),
        Err(Error::PathsExceedElements { paths: 9, elements: 8 })
    ));
}

#[test]
fn rejects_joint_opt_beyond_two_operators() {
    let cfg = multi_op(3, 16, 2, SchemePolicy::joint_opt(1.0, 1.0).unwrap(), 10);
    assert!(matches!(run_campaign(&cfg), Err(Error::Unsupported(_))));
}

#[test]
fn rejects_unavoidable_exclusion() {
    let mut cfg = two_op(8, [1, 8, 1, 1], ts1(), 10);
    cfg.condition = Some(EventLabel::D);
    assert!(cfg.validate().is_err());
}

#[test]
fn slots_repeat_bit_for_bit() {
    let c = Campaign::new(two_op(32, [2, 4, 4, 2], SchemePolicy::joint_opt(1.0, 1.0).unwrap(), 10))
        .unwrap();
    for t in [0, 1, 17, 1 << 40] {
        assert_eq!(c.run_slot(t).unwrap(), c.run_slot(t).unwrap());
    }
    assert_ne!(c.run_slot(0).unwrap().se(), c.run_slot(1).unwrap().se());
}

#[test]
fn reports_do_not_depend_on_thread_count() {
    for cfg in [
        two_op(16, [1, 4, 4, 1], ts1(), 3000),
        two_op(16, [1, 4, 4, 1], SchemePolicy::joint_opt(0.3, 0.7).unwrap(), 3000),
        multi_op(4, 16, 3, SchemePolicy::time_share(0.4).unwrap(), 3000),
    ] {
        let r = determinism_check(&cfg, &[1, 2, 7]).unwrap();
        assert!(r.passed, "{}", r.detail);
    }
}

#[test]
fn zero_snr_gives_zero_rate() {
    let mut cfg = two_op(16, [1, 2, 2, 1], ts1(), 200);
    cfg.snr = 0.0;
    let r = run_campaign(&cfg).unwrap();
    assert!(r.per_operator_se.iter().all(|&s| s == 0.0));
    assert!(r.analytic_se.iter().all(|&s| s == 0.0));
}

#[test]
fn event_counts_cover_every_scheduled_ue() {
    let r = run_campaign(&two_op(16, [1, 4, 4, 1], ts1(), 1234)).unwrap();
    assert_eq!(r.total_event_count(), 1234 * 2);
    let r = run_campaign(&multi_op(3, 16, 2, ts1(), 777)).unwrap();
    assert_eq!(r.total_event_count(), 777 * 3);
}

#[test]
fn two_operator_events_follow_alignment_law() {
    let cfg = two_op(16, [1, 6, 3, 1], SchemePolicy::no_coop(), 100_000);
    let r = run_campaign(&cfg).unwrap();
    let check = event_frequency_check(&cfg, &r, 3.0);
    assert!(check.passed, "{}", check.detail);
    // Pr(A) = (3/16)(6/16).
    let fa = r.event_frequencies(0)[&EventLabel::A];
    assert!((fa - 18.0 / 256.0).abs() < 0.004, "{fa}");
}

#[test]
fn four_operator_events_are_binomial() {
    let cfg = multi_op(4, 16, 4, ts1(), 100_000);
    let r = run_campaign(&cfg).unwrap();
    let check = event_frequency_check(&cfg, &r, 3.0);
    assert!(check.passed, "{}", check.detail);
}

#[test]
fn conditioned_campaign_sees_only_its_event() {
    for ev in [EventLabel::A, EventLabel::B, EventLabel::C, EventLabel::D] {
        let mut cfg = two_op(16, [1, 4, 4, 1], ts1(), 500);
        cfg.condition = Some(ev);
        let r = run_campaign(&cfg).unwrap();
        assert_eq!(r.per_event_counts[0].get(&ev), Some(&500), "{ev:?}");
        assert_eq!(r.per_event_counts[1].get(&ev), Some(&500), "{ev:?}");
    }
}

#[test]
fn oob_phase_offsets_are_uniform() {
    let mut cfg = two_op(16, [2, 3, 3, 2], SchemePolicy::no_coop(), 1);
    cfg.condition = Some(EventLabel::A);
    let r = phase_uniformity_check(&Campaign::new(cfg).unwrap(), 10_000).unwrap();
    assert!(r.passed, "{}", r.detail);
}

#[test]
fn no_coop_never_degrades_the_mean() {
    for l in [[1, 4, 4, 1], [3, 8, 8, 3]] {
        let r = run_campaign(&two_op(16, l, SchemePolicy::no_coop(), 20_000)).unwrap();
        let c = oob_non_degradation_check(&r);
        assert!(c.passed, "{}", c.detail);
    }
    let r = run_campaign(&multi_op(4, 16, 4, SchemePolicy::no_coop(), 20_000)).unwrap();
    assert!(oob_non_degradation_check(&r).passed);
}

#[test]
fn unaligned_no_coop_slot_is_in_band_only() {
    let mut cfg = two_op(32, [2, 4, 4, 2], SchemePolicy::no_coop(), 1);
    cfg.condition = Some(EventLabel::D);
    let c = Campaign::new(cfg).unwrap();
    for t in 0..50 {
        for u in c.run_slot(t).unwrap().ues {
            assert_eq!(u.event, EventLabel::D);
            assert!((u.gain - u.inband_mag * u.inband_mag).abs() <= 1e-12 * u.gain);
            assert!((u.se - u.no_oob_se).abs() < 1e-12);
        }
    }
}

#[test]
fn owned_event_a_slot_adds_magnitudes() {
    let mut cfg = two_op(32, [1, 4, 4, 1], ts1(), 1);
    cfg.condition = Some(EventLabel::A);
    let c = Campaign::new(cfg).unwrap();
    for t in 0..50 {
        let s = c.run_slot(t).unwrap();
        assert_eq!(s.owner, Some(0));
        let k = &s.ues[0];
        let full = k.inband_mag + k.oob_mags[&1];
        assert!((k.gain.sqrt() - full).abs() <= 1e-9 * full);
        assert!(k.coherent);
        // The other operator's UE gets no such alignment.
        let q = &s.ues[1];
        assert!(q.gain.sqrt() <= q.inband_mag + q.oob_mags[&0] + 1e-12);
    }
}

#[test]
fn time_sharing_analytic_is_affine_in_zeta() {
    let template = two_op(64, [1, 8, 8, 1], ts1(), 10);
    let pts = sweep(&template, SweepAxis::Zeta, &[0.0, 0.5, 1.0]).unwrap();
    for op in 0..2 {
        let a: Vec<f64> = pts.iter().map(|p| p.report.analytic_se[op]).collect();
        assert!((a[1] - 0.5 * (a[0] + a[2])).abs() < 1e-12);
    }
}

#[test]
fn sweep_over_n_adds_two_bits_per_doubling() {
    let template = two_op(16, [1, 4, 4, 1], SchemePolicy::no_coop(), 4000);
    let pts = sweep(&template, SweepAxis::N, &[32.0, 64.0, 128.0]).unwrap();
    for w in pts.windows(2) {
        let d = w[1].report.per_operator_se[0] - w[0].report.per_operator_se[0];
        assert!((1.7..2.3).contains(&d), "{d}");
    }
}

#[test]
fn sweep_clamps_paths_through_the_second_irs() {
    let template = two_op(64, [1, 16, 16, 1], ts1(), 10);
    let c = apply_axis(&template, SweepAxis::N2, 4.0).unwrap();
    assert_eq!(c.paths[0][0], vec![1, 4]);
    assert_eq!(c.paths[1][3], vec![16, 1]);
    assert!("foo".parse::<SweepAxis>().is_err());
    assert!(apply_axis(&template, SweepAxis::Weights, 0.5).is_err());
    let m = apply_axis(&multi_op(4, 16, 2, ts1(), 10), SweepAxis::M, 3.0).unwrap();
    assert!(m.validate().is_ok());
    assert_eq!(m.paths[2][0].len(), 3);
}

#[test]
fn campaigns_of_a_sweep_share_ue_positions() {
    let a = Campaign::new(two_op(16, [1, 2, 2, 1], ts1(), 10)).unwrap();
    let mut cfg = two_op(64, [1, 2, 2, 1], ts1(), 10);
    cfg.campaign_id = 5;
    let b = Campaign::new(cfg).unwrap();
    assert_eq!(a.ue_positions(), b.ue_positions());
    assert_ne!(a.run_slot(0).unwrap().se(), b.run_slot(0).unwrap().se());
}

#[test]
fn closed_forms_track_the_simulation() {
    // Single in-band path: the order-statistics factors are exact.
    for scheme in [ts1(), SchemePolicy::no_coop(), SchemePolicy::time_share(0.5).unwrap()] {
        let r = run_campaign(&two_op(32, [1, 8, 8, 1], scheme, 100_000)).unwrap();
        for c in closed_form_check(&r, 0.05, 0.15) {
            assert!(c.passed, "{}: {}", c.name, c.detail);
        }
        for c in factorization_check(&r, 3.0) {
            assert!(c.passed, "{}: {}", c.name, c.detail);
        }
    }
}
