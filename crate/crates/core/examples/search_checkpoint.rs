//! Exhaustive search of the genus-4 normal form over F_3, interrupted and resumed
//! through a checkpoint file.

use ekedahl_oort::cli::{cmd_search, format_search, Predicate, SearchSpec};

fn main() {
    let dir = std::env::temp_dir().join(format!("eo-search-{}", std::process::id()));
    std::fs::create_dir_all(&dir).expect("temp dir");
    let mut spec = SearchSpec::new(3, 1, Predicate { delta: Some(vec![2, 1]), ..Default::default() });
    spec.checkpoint = Some(dir.join("checkpoint.json"));
    spec.max_prefixes = Some(3);

    let report = loop {
        match cmd_search(&spec) {
            Ok(r) => break r,
            Err(e) if e.kind == "InterruptedCheckpointWritten" => println!("interrupted: {}", e.message),
            Err(e) => panic!("{e}"),
        }
    };
    print!("{}", format_search(&report));
    std::fs::remove_dir_all(&dir).ok();
}
