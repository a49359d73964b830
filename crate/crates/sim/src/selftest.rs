//! Fast invariant checks behind `isi-sim selftest`.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use isi_core::channel::{
    assemble_channel, raised_cosine_pulse, steering_vector, ArrayGeometry, Path, PathSet, PulseShape,
};
use isi_core::combining::{beam_combine, mrc_gramian, mrc_statistic, zeta_closed_form, zeta_empirical};
use isi_core::metrics::{normalized_isi_power, rms_delay_spread, tap_isi_ratio, IsiSource};
use isi_core::montecarlo::{run_antenna_sweep, Combiner, ExperimentConfig, Sequential};
use isi_core::stochastic::{complex_normal, derive_trial_seed, gen_wssus, StochasticSpec};
use isi_core::C64;
use rand::Rng;

use crate::executor::RayonExecutor;
use crate::pathlist::{read_pathlist, write_pathlist};

#[derive(Debug, Clone)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &'static str, worst: f64, tol: f64) -> Check {
    Check {
        name,
        passed: worst <= tol,
        detail: format!("worst {worst:.3e}, tolerance {tol:.0e}"),
    }
}

fn random_paths<R: Rng>(rng: &mut R, count: usize) -> PathSet {
    let paths = (0..count)
        .map(|_| Path::new(complex_normal(rng), rng.random::<f64>() * 4.0, rng.random::<f64>() * PI).unwrap())
        .collect();
    PathSet::new(paths).unwrap()
}

pub fn run_selftest(threads: usize) -> Vec<Check> {
    let mut rng = derive_trial_seed(0x5e1f, 0).rng();
    let mut out = Vec::new();

    let mut worst = 0.0f64;
    for beta in [0.0, 0.1, 0.25, 0.5, 1.0] {
        let pulse = PulseShape::new(beta, 1.0, 8).unwrap();
        for k in 1..20 {
            worst = worst.max(raised_cosine_pulse(k as f64, &pulse).abs());
            worst = worst.max(raised_cosine_pulse(-(k as f64), &pulse).abs());
        }
    }
    out.push(check("raised cosine zeros at nonzero symbol instants", worst, 0.0));

    let mut worst = 0.0f64;
    for m in [1, 7, 64, 513] {
        let geom = ArrayGeometry::new(m, 0.5).unwrap();
        let a = steering_vector(&geom, rng.random::<f64>() * PI);
        worst = worst.max((a.iter().map(|z| z.norm_sqr()).sum::<f64>() - m as f64).abs() / m as f64);
    }
    out.push(check("steering vector norm equals M", worst, 1e-12));

    let (mut herm, mut quad, mut eq8) = (0.0f64, 0.0f64, 0.0f64);
    for t in 0..50u64 {
        let h = gen_wssus(
            &StochasticSpec::rayleigh(1 + t as usize % 16, 1 + t as usize % 6).unwrap(),
            derive_trial_seed(1, t),
        )
        .unwrap();
        let g = mrc_gramian(&h);
        let l = h.num_taps();
        for i in 0..l {
            for j in 0..l {
                herm = herm.max((g.entries()[(i, j)] - g.entries()[(j, i)].conj()).norm());
            }
        }
        let x: Vec<C64> = (0..l).map(|_| complex_normal(&mut rng)).collect();
        let gx = g.entries().mul_vec(&x).unwrap();
        let form: C64 = x.iter().zip(&gx).map(|(a, b)| a.conj() * b).sum();
        quad = quad.max(-form.re);
        let y = h.entries().mul_vec(&x).unwrap();
        let r = mrc_statistic(h.entries(), &y).unwrap();
        for (a, b) in r.iter().zip(&gx) {
            eq8 = eq8.max((a - b).norm() / (1.0 + b.norm()));
        }
    }
    out.push(check("Gramian is Hermitian", herm, 1e-12));
    out.push(check("Gramian quadratic forms are non-negative", quad, 1e-9));
    out.push(check(
        "matched filter of noiseless signal equals Gramian times symbols",
        eq8,
        1e-12,
    ));

    let mut worst = 0.0f64;
    let pulse = PulseShape::default();
    for _ in 0..100 {
        let count = rng.random_range(1..=8);
        let paths = random_paths(&mut rng, count);
        let geom = ArrayGeometry::new(rng.random_range(1..=256), 0.5).unwrap();
        let (h, f) = assemble_channel(&paths, &geom, &pulse, 5).unwrap();
        let look = rng.random::<f64>() * PI;
        let n = rng.random_range(0..5);
        if let (Ok(a), Ok(b)) = (zeta_empirical(&h, &geom, look, n), zeta_closed_form(&f, &geom, look, n)) {
            worst = worst.max((a - b).norm());
        }
    }
    out.push(check("beam correlation closed form matches direct sum", worst, 1e-10));

    let mut worst = 0.0f64;
    for _ in 0..50 {
        let aoa = rng.random::<f64>() * PI;
        let path = Path::new(complex_normal(&mut rng), rng.random_range(0..4) as f64, aoa).unwrap();
        let geom = ArrayGeometry::new(rng.random_range(1..=128), 0.5).unwrap();
        let (h, _) = assemble_channel(&PathSet::new(vec![path]).unwrap(), &geom, &pulse, 6).unwrap();
        let taps = beam_combine(&h, &geom, aoa).unwrap();
        worst = worst.max(rms_delay_spread(&taps.taps, 1.0).unwrap().value);
        worst = worst.max(tap_isi_ratio(&taps).unwrap().rho);
    }
    out.push(check(
        "single on-grid path has zero delay spread after beam steering",
        worst,
        1e-12,
    ));

    let mut worst = 0.0f64;
    for t in 0..20u64 {
        let h = gen_wssus(&StochasticSpec::rice(8, 4, 0.5).unwrap(), derive_trial_seed(2, t)).unwrap();
        let g = mrc_gramian(&h);
        let a = normalized_isi_power(g.entries(), IsiSource::GramianMrc).unwrap().rho;
        let b = normalized_isi_power(&g.entries().scale(C64::new(-2.0, 3.0)), IsiSource::GramianMrc)
            .unwrap()
            .rho;
        if !(0.0..=1.0).contains(&a) {
            worst = f64::INFINITY;
        }
        worst = worst.max((a - b).abs());
    }
    out.push(check(
        "normalized ISI power is bounded and scale invariant",
        worst,
        1e-12,
    ));

    let mut config = ExperimentConfig::rayleigh(vec![4, 16, 64], vec![2, 5], 40, 7);
    config.combiners = vec![Combiner::Mrc, Combiner::Egc, Combiner::EgcCophased];
    let sequential = run_antenna_sweep(&config, &Sequential);
    let parallel = RayonExecutor::new(threads.max(2))
        .map_err(|e| e.to_string())
        .and_then(|exec| run_antenna_sweep(&config, &exec).map_err(|e| e.to_string()));
    out.push(Check {
        name: "sweep results independent of thread count",
        passed: matches!((&sequential, &parallel), (Ok(a), Ok(b)) if a == b),
        detail: format!("sequential vs {} threads", threads.max(2)),
    });

    let drops: BTreeMap<u64, PathSet> = (0..5)
        .map(|d| (d * 3, random_paths(&mut rng, 1 + d as usize)))
        .collect();
    let mut buf = Vec::new();
    let round = write_pathlist(&mut buf, &drops)
        .map_err(|e| e.to_string())
        .and_then(|_| read_pathlist(buf.as_slice()).map_err(|e| e.to_string()));
    let mut worst = 0.0f64;
    match round {
        Ok(back) if back.len() == drops.len() => {
            for (a, b) in drops.values().zip(back.values()) {
                for (p, q) in a.paths().iter().zip(b.paths()) {
                    worst = worst.max((p.gain() - q.gain()).norm() / p.gain().norm());
                    worst = worst.max((p.delay() - q.delay()).abs() / p.delay().max(1e-300));
                    worst = worst.max((p.aoa() - q.aoa()).abs() / p.aoa().max(1e-300));
                }
            }
        }
        _ => worst = f64::INFINITY,
    }
    out.push(check("path list round trip", worst, 1e-12));
    out
}
