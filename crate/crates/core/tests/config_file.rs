use std::path::Path;

use qfilter::cli::ExperimentConfig;

fn repo_file(rel: &str) -> std::path::PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..").join(rel)
}

#[test]
fn shipped_default_config_matches_builtin_defaults() {
    let cfg = ExperimentConfig::load(&repo_file("configs/default.toml")).unwrap();
    assert_eq!(cfg, ExperimentConfig::default());
    assert_eq!(cfg.hash().unwrap(), ExperimentConfig::default().hash().unwrap());
}

#[test]
fn hash_ignores_output_directory_only() {
    let a = ExperimentConfig::default();
    let mut b = a.clone();
    b.out_dir = "/elsewhere".into();
    assert_eq!(a.hash().unwrap(), b.hash().unwrap());
    b.seed += 1;
    assert_ne!(a.hash().unwrap(), b.hash().unwrap());
    assert_eq!(a.hash().unwrap().len(), 16);
}

#[test]
fn unknown_keys_and_bad_values_are_rejected() {
    assert!(ExperimentConfig::from_toml("[sim]\nkapa = 0.1\n").is_err());
    assert!(ExperimentConfig::from_toml("format_version = 2\n").is_err());
    assert!(ExperimentConfig::from_toml("[sim]\nsteps_per_period = 10\n").is_err());
    let partial = ExperimentConfig::from_toml("seed = 9\n[sim]\nkappa = 0.01\n").unwrap();
    assert_eq!((partial.seed, partial.sim.kappa), (9, 0.01));
    assert_eq!(partial.sweep, ExperimentConfig::default().sweep);
}
