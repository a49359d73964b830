use isi_core::metrics::empirical_cdf;
use isi_core::montecarlo::{
    run_antenna_sweep, CdfCurve, CdfResult, Combiner, ExperimentConfig, Sequential, SweepResult, SweepRow,
};
use isi_core::stochastic::RNG_NAME;
use isi_sim::results::{write_cdf, write_sweep, write_to};

const SWEEP_HEADER: &str = "experiment_id,M,L,combiner,statistic,value,trials,master_seed,rng_name\n";

fn sweep_text(id: &str, r: &SweepResult) -> String {
    let mut buf = Vec::new();
    write_sweep(&mut buf, id, r).unwrap();
    String::from_utf8(buf).unwrap()
}

#[test]
fn empty_sweep_is_header_only() {
    let empty = SweepResult {
        rows: vec![],
        fits: vec![],
        master_seed: 1,
        trials: 1,
    };
    assert_eq!(sweep_text("x", &empty), SWEEP_HEADER);
}

#[test]
fn single_row_sweep() {
    let r = SweepResult {
        rows: vec![SweepRow {
            num_antennas: 64,
            num_taps: 4,
            combiner: Combiner::EgcCophased,
            mean_rho: 0.125,
            std_rho: 0.0,
            trials: 3,
        }],
        fits: vec![],
        master_seed: 42,
        trials: 3,
    };
    let want = format!(
        "{SWEEP_HEADER}e1,64,4,EGC_cophased,mean_rho,0.125,3,42,{RNG_NAME}\ne1,64,4,EGC_cophased,std_rho,0,3,42,{RNG_NAME}\n"
    );
    assert_eq!(sweep_text("e1", &r), want);
}

#[test]
fn sweep_rows_sorted_and_fits_appended() {
    let mut config = ExperimentConfig::rayleigh(vec![32, 8, 16], vec![4, 2], 10, 5);
    config.combiners = vec![Combiner::Egc, Combiner::Mrc];
    let text = sweep_text("s", &run_antenna_sweep(&config, &Sequential).unwrap());
    let lines: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(lines.len(), 3 * 2 * 2 * 2 + 2 * 2 * 3);
    let keys: Vec<(usize, usize, String)> = lines[..24]
        .iter()
        .step_by(2)
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (f[1].parse().unwrap(), f[2].parse().unwrap(), f[3].to_string())
        })
        .collect();
    assert_eq!(keys[0], (8, 2, "MRC".into()));
    assert_eq!(keys[1], (8, 2, "EGC".into()));
    assert_eq!(keys[2], (8, 4, "MRC".into()));
    assert_eq!(keys[11], (32, 4, "EGC".into()));
    assert!(lines[24..].iter().all(|l| l.starts_with("s,fit,")));
    for line in &lines {
        let value: f64 = line.split(',').nth(5).unwrap().parse().unwrap();
        assert!(value.is_finite());
    }
}

#[test]
fn rewriting_is_byte_identical() {
    let config = ExperimentConfig::rayleigh(vec![4, 8], vec![3], 25, 77);
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    for p in [&a, &b] {
        let r = run_antenna_sweep(&config, &Sequential).unwrap();
        write_to(Some(p), |w| write_sweep(w, "same", &r)).unwrap();
    }
    assert_eq!(std::fs::read(a).unwrap(), std::fs::read(b).unwrap());
    assert!(
        write_to(Some(&dir.path().join("missing").join("x.csv")), |w| write_sweep(
            w,
            "x",
            &SweepResult {
                rows: vec![],
                fits: vec![],
                master_seed: 0,
                trials: 1
            }
        ))
        .is_err()
    );
}

#[test]
fn cdf_file_layout() {
    let samples: Vec<f64> = (1..=200).map(|i| i as f64 * 1e-9).collect();
    let r = CdfResult {
        curves: vec![CdfCurve {
            num_antennas: 16,
            combiner: Combiner::Mrc,
            cdf: empirical_cdf(&samples).unwrap(),
        }],
        drops: 200,
        master_seed: 8,
    };
    let mut buf = Vec::new();
    write_cdf(&mut buf, "c", &r).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(
        lines[0],
        format!("# experiment_id=c master_seed=8 rng_name={RNG_NAME} drops=200")
    );
    assert_eq!(lines[1], "M,combiner,percentile,rms_ds_seconds");
    assert_eq!(lines.len(), 102);
    // 7% of 200 samples is exactly the 14th.
    assert_eq!(lines[2 + 6], format!("16,MRC,7,{}", 14.0 * 1e-9));
    assert_eq!(lines[101], format!("16,MRC,100,{}", 200.0 * 1e-9));
}
