//! Entry points shared by the fuzz targets and the corpus replay test. Each
//! accepts arbitrary bytes and panics only on a broken invariant.

use clap::Parser;

use crate::args::Cli;
use crate::record::ResultRecord;
use crate::scenario::ScenarioFile;

/// A scenario that parses must either resolve cleanly or fail with a
/// diagnostic, and must survive a serialize/parse cycle.
pub fn scenario_parse(data: &[u8]) {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(scenario) = ScenarioFile::from_toml_str(text) else { return };
    let _ = scenario.to_config();
    let _ = scenario.sweep_axes();
    let again = ScenarioFile::from_toml_str(&scenario.to_toml_string()).expect("serialized scenario re-parses");
    assert_eq!(again.to_toml_string(), scenario.to_toml_string());
}

/// An accepted record is finite everywhere and round-trips exactly.
pub fn record_parse(data: &[u8]) {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(record) = ResultRecord::from_json(text) else { return };
    let back = ResultRecord::from_json(&record.to_json()).expect("re-parse");
    assert_eq!(back, record);
    let _ = record.to_csv();
    let _ = record.render_table();
}

/// NUL-separated argument vector.
pub fn cli_args(data: &[u8]) {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let argv = std::iter::once("weakconc").chain(text.split('\0'));
    let _ = Cli::try_parse_from(argv);
}

#[cfg(test)]
mod tests {
    use std::path::PathBuf;

    fn corpus(target: &str) -> Vec<(PathBuf, Vec<u8>)> {
        let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus").join(target);
        let mut files: Vec<_> = std::fs::read_dir(&dir)
            .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
            .map(|e| e.unwrap().path())
            .collect();
        files.sort();
        assert!(!files.is_empty(), "empty corpus {}", dir.display());
        files.into_iter().map(|p| (p.clone(), std::fs::read(p).unwrap())).collect()
    }

    #[test]
    fn replay_corpora() {
        for (_, data) in corpus("scenario_parse") {
            super::scenario_parse(&data);
        }
        for (path, data) in corpus("record_parse") {
            let text = std::str::from_utf8(&data).unwrap();
            assert!(crate::record::ResultRecord::from_json(text).is_ok(), "{}", path.display());
            super::record_parse(&data);
        }
        for (_, data) in corpus("cli_args") {
            super::cli_args(&data);
        }
    }

    #[test]
    fn survives_garbage() {
        for data in
            [&b""[..], b"\xff\xfe", b"[protocol]\nlambda = nan\nkappa_t = inf", b"{\"lambda\": 1e999}", b"\0\0--format"]
        {
            super::scenario_parse(data);
            super::record_parse(data);
            super::cli_args(data);
        }
    }

    use proptest::prelude::*;

    fn number() -> impl Strategy<Value = String> {
        prop_oneof![
            any::<f64>().prop_map(|v| format!("{v:?}")),
            Just("nan".to_string()),
            Just("-inf".to_string()),
            (-5i64..5000).prop_map(|v| v.to_string()),
            (-2.0f64..2.0).prop_map(|v| format!("{v:?}")),
        ]
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(256))]

        /// Every numeric literal of a seed scenario replaced by an arbitrary
        /// value.
        #[test]
        fn mutated_scenarios_never_panic(seed in 0usize..7, values in prop::collection::vec(number(), 16)) {
            let (_, data) = corpus("scenario_parse").swap_remove(seed);
            let text = String::from_utf8(data).unwrap();
            let mut k = 0;
            let mutated: String = text
                .lines()
                .map(|line| match line.split_once(" = ") {
                    Some((key, val)) if val.parse::<f64>().is_ok() => {
                        k += 1;
                        format!("{key} = {}", values[k % values.len()])
                    }
                    _ => line.to_string(),
                })
                .collect::<Vec<_>>()
                .join("\n");
            super::scenario_parse(mutated.as_bytes());
        }
    }
}
