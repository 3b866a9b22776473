//! End-to-end run through the command layer: write an experiment config,
//! then synthesize, characterize, analyze and verify, exactly as the
//! `cvchannel` binary would.
//!
//! ```bash
//! cargo run --release --example experiment_files -- /tmp/cvchannel-demo
//! ```

use std::path::PathBuf;

use cvchannel::cli::run;

fn main() {
    let dir = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("cvchannel-demo"));
    std::fs::create_dir_all(&dir).expect("output directory");
    let config = dir.join("experiment.json");
    std::fs::write(
        &config,
        r#"{
  "channel": {
    "constructor": "sequence",
    "stages": [
      {"constructor": "dfg", "modes": 4, "squeeze": 0.4},
      {"constructor": "loss", "transmissivities": [0.9, 0.7, 0.8, 0.6],
       "rotation": {"elements": [{"kind": "beam_splitter", "a": 0, "b": 1, "theta": 0.4}]}}
    ]
  },
  "protocol": {"q_amplitude": 10.0, "shots_mean_stage": 100000, "shots_vacuum_stage": 100000, "seed": 11},
  "outputs": {"emit_figures": true}
}
"#,
    )
    .expect("write config");

    let d = dir.to_str().expect("utf-8 path");
    let c = config.to_str().expect("utf-8 path");
    let steps: [&[&str]; 4] = [
        &["synthesize", "--config", c, "--out", d],
        &["characterize", "--config", c, "--out", d],
        &[
            "analyze",
            &format!("{d}/result.json"),
            "--out",
            &format!("{d}/analysis"),
            "--partition",
            "0,1",
        ],
        &[
            "verify",
            &format!("{d}/result.json"),
            &format!("{d}/truth.json"),
        ],
    ];
    for args in steps {
        println!("$ cvchannel {}", args.join(" "));
        let code = run(std::iter::once("cvchannel").chain(args.iter().copied()));
        println!("exit {code}\n");
    }
}
