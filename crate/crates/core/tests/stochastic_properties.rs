use isi_core::stochastic::{
    build_convolution_matrix, complex_normal, derive_trial_seed, gen_rayleigh_wssus, gen_rice_wssus, StochasticSpec,
};
use isi_core::C64;
use rand::Rng;

/// Independent O(N·L) linear convolution.
fn convolve(taps: &[C64], symbols: &[C64]) -> Vec<C64> {
    let mut out = vec![C64::new(0.0, 0.0); taps.len() + symbols.len() - 1];
    for (i, t) in taps.iter().enumerate() {
        for (j, s) in symbols.iter().enumerate() {
            out[i + j] += t * s;
        }
    }
    out
}

#[test]
fn convolution_matrix_matches_direct_convolution() {
    let mut rng = derive_trial_seed(0xC0DE, 0).rng();
    for _ in 0..100 {
        let l = rng.random_range(1..=8);
        let n = rng.random_range(1..=32);
        let taps: Vec<C64> = (0..l).map(|_| complex_normal(&mut rng)).collect();
        let x: Vec<C64> = (0..n).map(|_| complex_normal(&mut rng)).collect();
        let conv = build_convolution_matrix(&taps, n).unwrap();
        let y = conv.entries().mul_vec(&x).unwrap();
        let want = convolve(&taps, &x);
        assert_eq!(y.len(), want.len());
        for (a, b) in y.iter().zip(&want) {
            assert!((a - b).norm() < 1e-12);
        }
        for k in 0..conv.block_rows() {
            for c in 0..n {
                let expect = if k >= c && k - c < l {
                    taps[k - c]
                } else {
                    C64::new(0.0, 0.0)
                };
                assert_eq!(conv.entries()[(k, c)], expect);
            }
        }
    }
}

/// 10⁶ entries: mean within 5 standard errors of its target, variance within
/// 5 standard errors of 1. For CN(0,1), SE(mean re/im) = sqrt(0.5/n) and
/// SE(var) = sqrt((E|z|⁴ − 1)/n) = sqrt(1/n).
#[test]
fn desk_scale_moments() {
    let n = 1_000_000usize;
    let se_mean = (0.5 / n as f64).sqrt();
    let se_var = (1.0 / n as f64).sqrt();

    let ray = gen_rayleigh_wssus(&StochasticSpec::rayleigh(250_000, 4).unwrap(), derive_trial_seed(1, 0)).unwrap();
    let vals = ray.entries().as_slice();
    assert_eq!(vals.len(), n);
    let mean: C64 = vals.iter().sum::<C64>() / n as f64;
    let var = vals.iter().map(|z| (z - mean).norm_sqr()).sum::<f64>() / (n as f64 - 1.0);
    assert!(mean.re.abs() < 5.0 * se_mean && mean.im.abs() < 5.0 * se_mean, "{mean}");
    assert!((var - 1.0).abs() < 5.0 * se_var, "{var}");

    let rice = gen_rice_wssus(&StochasticSpec::rice(n, 1, 1.5).unwrap(), derive_trial_seed(1, 1)).unwrap();
    let vals = rice.entries().as_slice();
    let mean: C64 = vals.iter().sum::<C64>() / n as f64;
    let var = vals.iter().map(|z| (z - mean).norm_sqr()).sum::<f64>() / (n as f64 - 1.0);
    assert!(
        (mean.re - 1.5).abs() < 5.0 * se_mean && mean.im.abs() < 5.0 * se_mean,
        "{mean}"
    );
    assert!((var - 1.0).abs() < 5.0 * se_var, "{var}");
}

#[test]
fn real_and_imaginary_parts_have_half_variance() {
    let h = gen_rayleigh_wssus(&StochasticSpec::rayleigh(200_000, 1).unwrap(), derive_trial_seed(3, 3)).unwrap();
    let n = 200_000.0;
    let vr = h.entries().as_slice().iter().map(|z| z.re * z.re).sum::<f64>() / n;
    let vi = h.entries().as_slice().iter().map(|z| z.im * z.im).sum::<f64>() / n;
    // SE of each ≈ sqrt(2·0.25/n) ≈ 1.6e-3.
    assert!((vr - 0.5).abs() < 8e-3 && (vi - 0.5).abs() < 8e-3, "{vr} {vi}");
}

#[test]
fn generator_is_pure_in_its_seed() {
    let spec = StochasticSpec::rice(32, 5, 0.5).unwrap();
    let a = gen_rice_wssus(&spec, derive_trial_seed(u64::MAX, 12)).unwrap();
    let b = gen_rice_wssus(&spec, derive_trial_seed(u64::MAX, 12)).unwrap();
    assert_eq!(a, b);
    let handle = std::thread::spawn(move || gen_rice_wssus(&spec, derive_trial_seed(u64::MAX, 12)).unwrap());
    assert_eq!(handle.join().unwrap(), a);
}
