//! Every shipped config parses and runs a handful of trials.

use jumpmart::config::Config;
use jumpmart::generators::Generator;
use jumpmart::montecarlo::run_trials;

#[test]
fn shipped_configs_load() {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut seen = 0;
    for entry in std::fs::read_dir(&dir).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().and_then(|e| e.to_str()) != Some("toml") {
            continue;
        }
        let cfg = Config::load(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        Generator::new(cfg.generator.clone()).unwrap();
        let mut spec = cfg.experiment();
        spec.validate().unwrap();
        spec.trials = 4;
        run_trials(&spec, Some(1)).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        seen += 1;
    }
    assert!(seen >= 5, "only {seen} configs");
}
