//! Parsing a run configuration, reporting schema errors by path, and
//! emitting the fully resolved document.
//!
//! ```bash
//! cargo run --example run_config
//! ```

use hvzlab::config::RunConfig;

fn main() {
    let text = include_str!("../configs/classic2d.json");
    let cfg = RunConfig::from_json(text).unwrap();
    println!("{}", serde_json::to_string_pretty(&cfg.resolved().unwrap()).unwrap());

    let bad = r#"{"schema_version": 1, "dim": 2,
        "potential": {"terms": [{"factors": [{"subspace": [[1, 0, 0]], "radial": {}}]}]}}"#;
    println!("error: {}", RunConfig::from_json(bad).unwrap_err());
}
