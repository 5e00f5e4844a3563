use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use irscoop::channel::Rect;
use irscoop::irs::{grid_search_phase, newton_phase, EffectiveChannelTerms};
use irscoop::specfun::{f_mean_max, psi};
use irscoop::{Campaign, Geometry, Point, SchemePolicy, SystemConfig};

fn config(n: usize, scheme: SchemePolicy) -> SystemConfig {
    let ues = vec![10, 10];
    SystemConfig {
        num_operators: 2,
        elements_per_irs: vec![n, n],
        paths: SystemConfig::uniform_paths(&[vec![1, 10], vec![10, 1]], &ues),
        ues_per_operator: ues,
        snr: 1e21,
        scheme,
        geometry: Geometry {
            bs_positions: vec![Point::new(0.0, 200.0), Point::new(200.0, 0.0)],
            irs_positions: vec![Point::new(0.0, 0.0), Point::new(200.0, 200.0)],
            ue_region: Rect {
                min: Point::new(0.0, 0.0),
                max: Point::new(200.0, 200.0),
            },
            c0_db: -60.0,
            d0: 1.0,
            alpha: 2.0,
        },
        slots: 1,
        seed: 0,
        campaign_id: 0,
        condition: None,
    }
}

fn specfun(c: &mut Criterion) {
    c.bench_function("f_mean_max(10)", |b| b.iter(|| f_mean_max(black_box(10))));
    c.bench_function("f_mean_max(1024)", |b| b.iter(|| f_mean_max(black_box(1024))));
    c.bench_function("psi(25)", |b| b.iter(|| psi(black_box(25))));
}

fn phase(c: &mut Criterion) {
    let terms = EffectiveChannelTerms::new(3.0, 0.8, 2.5, 1.1, 0.7, -1.9, 1e3).unwrap();
    c.bench_function("newton_phase", |b| b.iter(|| newton_phase(black_box(&terms), (0.5, 0.5))));
    c.bench_function("grid_search_phase(10000)", |b| {
        b.iter(|| grid_search_phase(black_box(&terms), (0.5, 0.5), 10_000))
    });
}

fn slots(c: &mut Criterion) {
    for (label, scheme) in [
        ("time_share", SchemePolicy::time_share(1.0).unwrap()),
        ("joint_opt", SchemePolicy::joint_opt(0.5, 0.5).unwrap()),
    ] {
        for n in [64, 1024] {
            let campaign = Campaign::new(config(n, scheme)).unwrap();
            let mut t = 0u64;
            c.bench_function(&format!("run_slot/{label}/N={n}"), |b| {
                b.iter(|| {
                    t += 1;
                    campaign.run_slot(black_box(t))
                })
            });
        }
    }
}

criterion_group!(benches, specfun, phase, slots);
criterion_main!(benches);
