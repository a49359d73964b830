use isi_core::montecarlo::{Combiner, EgcRhoMode, MrcResponse};
use isi_core::stochastic::FadingKind;
use isi_sim::{load_config, CdfSource, ConfigError};

fn field_of(text: &str) -> &'static str {
    match load_config(text) {
        Err(ConfigError::Field { field, .. }) => field,
        other => panic!("expected a field error, got {other:?}"),
    }
}

fn parse_line(text: &str) -> usize {
    match load_config(text) {
        Err(ConfigError::Parse { line, .. }) => line,
        other => panic!("expected a parse error, got {other:?}"),
    }
}

#[test]
fn minimal_config_fills_defaults() {
    let c = load_config("[experiment]\nmaster_seed = 9\n").unwrap();
    assert_eq!(c.pulse.rolloff(), 0.25);
    assert_eq!(c.pulse.span(), 8);
    assert_eq!(c.sweep.trials, 1000);
    assert_eq!(c.sweep.egc_mode, EgcRhoMode::TapLimit);
    assert_eq!(c.sweep.fading, FadingKind::RayleighWssus);
    assert_eq!(c.sweep.master_seed, 9);
    assert_eq!(c.cdf.master_seed, 9);
    assert_eq!(c.cdf.mrc_response, MrcResponse::GramianPeakRow);
    assert_eq!(c.spacing_ratio, 0.5);
    assert!(matches!(c.cdf_source, CdfSource::Synthetic(s) if s.drops == 10_000));
    assert_eq!(load_config("").unwrap().experiment_id, "experiment");
}

#[test]
fn full_config() {
    let c = load_config(
        r#"
[experiment]
id = "fig2"
master_seed = 7
trials = 50

[channel]
kind = "rice"
los_mean = 0.5

[pulse]
rolloff = 0.5
symbol_period_ns = 50.0
span = 6

[sweep]
antenna_counts = { start = 16, stop = 64, step = 16 }
tap_lengths = [2, 4]
combiners = ["egc", "MRC"]
egc_rho = "matrix"
egc_symbols = 128

[cdf]
antenna_counts = [8]
combiners = ["BeamSteer"]
num_taps = 4
mrc_response = "autocorrelation"
pathlist = "drops.csv"

[zeta]
antenna_counts = [16, 32]
paths = [
  { gain_re = 1.0, gain_im = 0.0, aoa_deg = 30.0 },
  { gain_re = 0.0, gain_im = 1.0, delay_ns = 25.0, aoa_deg = 120.0 },
]
"#,
    )
    .unwrap();
    assert_eq!(c.experiment_id, "fig2");
    assert_eq!(c.sweep.antenna_counts, vec![16, 32, 48, 64]);
    assert_eq!(c.sweep.combiners, vec![Combiner::Egc, Combiner::Mrc]);
    assert_eq!(c.sweep.egc_mode, EgcRhoMode::Matrix { num_symbols: 128 });
    assert_eq!(c.sweep.los_mean, 0.5);
    assert!((c.pulse.symbol_period() - 50e-9).abs() < 1e-20);
    assert!(matches!(&c.cdf_source, CdfSource::PathList(p) if p.to_str() == Some("drops.csv")));
    assert_eq!(c.zeta.paths.len(), 2);
    assert!((c.zeta.paths.paths()[1].delay() - 25e-9).abs() < 1e-20);
    assert_eq!(c.with_seed(3).sweep.master_seed, 3);
}

#[test]
fn semantic_errors_name_the_field() {
    assert_eq!(field_of("[experiment]\ntrials = 0\n"), "experiment.trials");
    assert_eq!(field_of("[channel]\nkind = \"nakagami\"\n"), "channel.kind");
    assert_eq!(
        field_of("[channel]\nkind = \"rice\"\nlos_mean = 0.0\n"),
        "channel.los_mean"
    );
    assert_eq!(field_of("[pulse]\nrolloff = 1.5\n"), "pulse.rolloff");
    assert_eq!(field_of("[sweep]\nantenna_counts = []\n"), "sweep.antenna_counts");
    assert_eq!(field_of("[sweep]\ntap_lengths = [4, 4]\n"), "sweep.tap_lengths");
    assert_eq!(field_of("[sweep]\ncombiners = [\"ZF\"]\n"), "sweep.combiners");
    assert_eq!(field_of("[sweep]\ncombiners = [\"BeamSteer\"]\n"), "sweep.combiners");
    assert_eq!(field_of("[sweep]\negc_rho = \"matrix\"\n"), "sweep.egc_symbols");
    assert_eq!(field_of("[cdf]\nmin_paths = 5\nmax_paths = 2\n"), "cdf.min_paths");
    assert_eq!(
        field_of("[zeta]\npaths = [{ gain_re = 1.0, gain_im = 0.0, aoa_deg = 40.0 }, { gain_re = 2.0, gain_im = 0.0, aoa_deg = 40.0 }]\n"),
        "zeta.paths"
    );
}

#[test]
fn parse_errors_carry_line_numbers() {
    assert_eq!(parse_line("[experiment]\ntrials = 5\ntrials = 6\n"), 3);
    assert_eq!(
        parse_line("[experiment]\nmaster_seed = 1\n\n[sweep]\ntap_length = [2]\n"),
        5
    );
    assert_eq!(parse_line("[unknown]\n"), 1);
    assert_eq!(parse_line("[experiment]\ntrials = \"many\"\n"), 2);
    let err = load_config("[experiment]\ntrials = 5\ntrials = 6\n")
        .unwrap_err()
        .to_string();
    assert!(err.starts_with("line 3:"), "{err}");
}
