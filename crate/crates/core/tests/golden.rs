//! Regression against the checked-in golden files; `examples/write_goldens.rs`
//! regenerates them.

use std::path::{Path, PathBuf};

use gwpi::cli::{cmd_exact, RunFlags};
use gwpi::exact::{enumerate_tiny, iterate_survival, single_clan_bound, GoldenFile, DEFAULT_HISTORY_CAP};
use gwpi::validate_model;

fn golden(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(rel)
}

fn read_golden(rel: &str) -> GoldenFile {
    serde_json::from_str(&std::fs::read_to_string(golden(rel)).unwrap()).unwrap()
}

#[test]
fn enumerations_match_golden_files() {
    for (dir, max_n) in [("default", 3), ("second", 2)] {
        for n in 1..=max_n {
            let file = read_golden(&format!("{dir}/exact_n{n}.json"));
            let params = validate_model(&file.params.offspring, &file.params.immigration).unwrap();
            let fresh = GoldenFile::from_table(&params, &enumerate_tiny(&params, n, DEFAULT_HISTORY_CAP).unwrap());
            assert_eq!(fresh.targets.keys().collect::<Vec<_>>(), file.targets.keys().collect::<Vec<_>>());
            for (name, value) in &file.targets {
                assert!((fresh.targets[name] - value).abs() <= 1e-12, "{dir} n={n} {name}");
            }
        }
    }
}

#[test]
fn n1_golden_pair_value_is_two_thirds() {
    let file = read_golden("default/exact_n1.json");
    assert!((file.targets["pair_finite"] - 2.0 / 3.0).abs() < 1e-15);
    assert!((file.targets["pair_window_k0"] - 2.0 / 3.0).abs() < 1e-15);
}

#[test]
fn survival_golden_matches_iteration() {
    let text = std::fs::read_to_string(golden("default/survival.json")).unwrap();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    let q: Vec<f64> = serde_json::from_value(v["q"].clone()).unwrap();
    let params = validate_model(&[0.5, 0.0, 0.5], &[0.5, 0.5]).unwrap();
    let fresh = iterate_survival(&params.offspring, q.len() - 1);
    for (j, value) in q.iter().enumerate() {
        assert!((fresh.q(j) - value).abs() <= 1e-15, "j={j}");
    }
    for pair in v["single_clan"].as_array().unwrap() {
        let n = pair[0].as_u64().unwrap() as usize;
        assert!((single_clan_bound(&params, n).unwrap() - pair[1].as_f64().unwrap()).abs() <= 1e-15);
    }
}

#[test]
fn exact_command_reproduces_golden_bytes() {
    let out = tempfile::tempdir().unwrap();
    let config = out.path().join("config.json");
    std::fs::write(&config, r#"{"exact_n": 3}"#).unwrap();
    cmd_exact(&RunFlags { config: Some(config), out: Some(out.path().join("g")), ..Default::default() }).unwrap();
    for name in ["exact_n1.json", "exact_n2.json", "exact_n3.json", "survival.json"] {
        let fresh = std::fs::read(out.path().join("g").join(name)).unwrap();
        assert!(fresh == std::fs::read(golden(&format!("default/{name}"))).unwrap(), "{name} differs");
    }
}
