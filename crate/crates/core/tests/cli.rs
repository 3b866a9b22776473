use std::path::Path;
use std::process::Command;

use cvchannel::channels::{lossy_dfg_array, DfgSpec};
use cvchannel::io::ChannelFile;

fn cvchannel(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_cvchannel"))
        .args(args)
        .output()
        .unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_owned()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn channel_file_round_trips_bit_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let ch = lossy_dfg_array(&DfgSpec::uniform(4, 0.37), 0.713).unwrap();
    let path = dir.path().join("c.json");
    ChannelFile::from_channel(&ch).write(&path).unwrap();
    let back = ChannelFile::read(&path).unwrap().to_channel().unwrap();
    let bits = |m: &nalgebra::DMatrix<f64>| m.iter().map(|x| x.to_bits()).collect::<Vec<_>>();
    assert_eq!(bits(ch.amp()), bits(back.amp()));
    assert_eq!(bits(ch.noise()), bits(back.noise()));
}

#[test]
fn synthesize_reports_margin_and_warns_when_unphysical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "dfg.json",
        r#"{"channel": {"constructor": "dfg", "modes": 4, "squeeze": 0.5}}"#,
    );
    let (code, stdout, _) = cvchannel(&["synthesize", "--config", &cfg, "--out", s(dir.path())]);
    assert_eq!(code, 0);
    assert!(stdout.contains("margin 0.000e0"), "{stdout}");
    let ch = ChannelFile::read(&dir.path().join("channel.json"))
        .unwrap()
        .to_channel()
        .unwrap();
    assert_eq!(ch.modes(), 4);

    let cfg = write(
        dir.path(),
        "bad.json",
        r#"{"channel": {"constructor": "explicit", "amp": [[2, 0], [0, 2]], "noise": [[0, 0], [0, 0]]}}"#,
    );
    let out = dir.path().join("bad");
    let (code, _, stderr) = cvchannel(&["synthesize", "--config", &cfg, "--out", s(&out)]);
    assert_eq!(code, 0);
    assert!(stderr.contains("warning"), "{stderr}");
    assert!(out.join("channel.json").exists());

    let cfg = write(
        dir.path(),
        "eta.json",
        r#"{"channel": {"constructor": "loss", "transmissivities": [0.5, 1.2]}}"#,
    );
    let (code, _, stderr) = cvchannel(&["synthesize", "--config", &cfg]);
    assert_eq!(code, 2);
    assert!(stderr.contains("transmissivities"), "{stderr}");
}

#[test]
fn characterize_identity_with_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "id.json",
        r#"{"channel": {"constructor": "identity", "modes": 2}}"#,
    );
    let (code, _, stderr) = cvchannel(&[
        "characterize",
        "--config",
        &cfg,
        "--out",
        s(dir.path()),
        "--emit-figures",
    ]);
    assert_eq!(code, 0, "{stderr}");
    let res = ChannelFile::read(&dir.path().join("result.json")).unwrap();
    let diag = res.diagnostics.clone().unwrap();
    assert!(diag.converged && diag.margin >= -1e-8);
    assert!(res.to_channel().unwrap().noise().amax() < 0.05);
    assert!(dir.path().join("figures/result_noise_matrix.csv").exists());
}

#[test]
fn characterize_input_errors_and_non_convergence() {
    let dir = tempfile::tempdir().unwrap();
    let missing = write(
        dir.path(),
        "m.json",
        r#"{"channel": {"constructor": "file", "path": "nowhere.json"}}"#,
    );
    assert_eq!(cvchannel(&["characterize", "--config", &missing]).0, 2);
    let cfg = write(
        dir.path(),
        "z.json",
        r#"{"channel": {"constructor": "identity", "modes": 1}}"#,
    );
    assert_eq!(
        cvchannel(&["characterize", "--config", &cfg, "--shots", "0"]).0,
        2
    );

    let cfg = write(
        dir.path(),
        "short.json",
        r#"{"channel": {"constructor": "lossy_dfg", "modes": 2, "squeeze": 0.5, "eta": 0.5},
            "protocol": {"shots_mean_stage": 1000, "shots_vacuum_stage": 1000, "max_iter": 1}}"#,
    );
    let (code, stdout, _) = cvchannel(&["characterize", "--config", &cfg, "--out", s(dir.path())]);
    assert_eq!(code, 3, "{stdout}");
    assert!(dir.path().join("result.json").exists());
}

#[test]
fn analyze_outputs_and_errors() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "dfg.json",
        r#"{"channel": {"constructor": "dfg", "modes": 4, "squeeze": 0.5}}"#,
    );
    assert_eq!(
        cvchannel(&["synthesize", "--config", &cfg, "--out", s(dir.path())]).0,
        0
    );
    let chan = dir.path().join("channel.json");
    let out = dir.path().join("analysis");
    let (code, _, stderr) = cvchannel(&[
        "analyze",
        s(&chan),
        "--out",
        s(&out),
        "--partition",
        "0,1",
        "--partition",
        "3",
    ]);
    assert_eq!(code, 0, "{stderr}");
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("analysis.json")).unwrap()).unwrap();
    let d: Vec<f64> = serde_json::from_value(report["singular_values"].clone()).unwrap();
    assert_eq!(d.len(), 8);
    assert!(d.iter().take(4).all(|x| (x - 0.5f64.exp()).abs() < 1e-12));
    assert!(report["pair_ppt"]
        .as_array()
        .unwrap()
        .iter()
        .all(|p| p["ppt_min_eigenvalue"].as_f64().unwrap() < 0.0));
    for f in [
        "singular_values.csv",
        "input_eigenquadratures.csv",
        "noise_eigenvalues.csv",
        "pair_ppt.csv",
        "amp_matrix.csv",
    ] {
        assert!(out.join(f).exists(), "{f}");
    }
    assert_eq!(
        cvchannel(&["analyze", s(&chan), "--out", s(&out), "--partition", "9"]).0,
        2
    );
    let junk = write(dir.path(), "junk.json", "{ not json");
    assert_eq!(cvchannel(&["analyze", &junk, "--out", s(&out)]).0, 2);
}

#[test]
fn verify_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let ch = lossy_dfg_array(&DfgSpec::uniform(2, 0.3), 0.8).unwrap();
    let truth = d.join("truth.json");
    ChannelFile::from_channel(&ch).write(&truth).unwrap();
    let (code, stdout, _) = cvchannel(&["verify", s(&truth), s(&truth)]);
    assert_eq!(code, 0);
    assert!(stdout.contains("max abs error 0.000e0"), "{stdout}");

    let mut bad = ChannelFile::from_channel(&ch);
    // extra noise keeps the channel physical, so only the tolerance decides
    bad.noise[0][0] += 0.5;
    let corrupted = d.join("bad.json");
    bad.write(&corrupted).unwrap();
    assert_eq!(cvchannel(&["verify", s(&corrupted), s(&truth)]).0, 1);
    assert_eq!(
        cvchannel(&["verify", s(&corrupted), s(&truth), "--noise-tol", "1"]).0,
        0
    );
    let mut unphysical = ChannelFile::from_channel(&ch);
    unphysical.amp[0][0] += 0.5;
    unphysical.write(&corrupted).unwrap();
    assert_eq!(
        cvchannel(&["verify", s(&corrupted), s(&truth), "--amp-tol", "1"]).0,
        1
    );

    let other = d.join("other.json");
    ChannelFile::from_channel(&cvchannel::GaussianChannel::identity(3))
        .write(&other)
        .unwrap();
    assert_eq!(cvchannel(&["verify", s(&other), s(&truth)]).0, 2);
    assert_eq!(
        cvchannel(&["verify", s(&d.join("absent.json")), s(&truth)]).0,
        2
    );
    assert_eq!(cvchannel(&["frobnicate"]).0, 2);
}
