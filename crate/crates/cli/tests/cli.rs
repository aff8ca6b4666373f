use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn ptlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ptlab"))
        .args(args)
        .env_remove("PTLAB_SEED")
        .output()
        .expect("run ptlab")
}

fn ok_json(args: &[&str]) -> Value {
    let out = ptlab(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("json output")
}

fn ok(args: &[&str]) {
    let out = ptlab(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
}

fn code(args: &[&str]) -> i32 {
    ptlab(args).status.code().expect("exit code")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

fn golden(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}

const SIGMA3: &str = r#"{"rows":2,"cols":2,"data":[[[1,0],[0,0]],[[0,0],[-1,0]]]}"#;

#[test]
fn construct_output_classifies_as_advertised() {
    let dir = TempDir::new().unwrap();
    let cases: &[(&str, &str)] = &[
        ("pt2", r#"{"e":0.3,"gamma":2,"rho":1,"delta":0.4,"u":1,"v":0.5}"#),
        ("pt2", r#"{"gamma":1,"rho":2,"delta":0.4}"#),
        ("pt2-r1", r#"{"gamma":1.5,"rho":0.7,"delta":-0.4,"theta":0.8,"phi":0.3}"#),
        ("pt2-r2", r#"{"gamma":1.5,"rho":0.7,"delta":-0.4,"theta":0.8,"phi":0.3}"#),
        ("pseudo2", r#"{"gamma":1.2,"rho":0.4,"delta":1.1,"theta":0.5,"phi":-0.6}"#),
        ("genpt2", r#"{"theta":0.7,"delta":0.2,"phi":0.4,"alpha":1.1}"#),
        ("cross", r#"{"case":"delta1","gamma":1.2,"rho":0.4,"delta":1.1,"theta":0.5,"phi":-0.6}"#),
        ("cross", r#"{"case":"delta2","gamma":1.2,"rho":0.4,"delta":1.1,"theta":0.5,"phi":-0.6}"#),
        ("cross", r#"{"case":"delta3","gamma":1.2,"rho":0.4,"delta":1.1,"theta":0.5,"phi":-0.6}"#),
        ("cross", r#"{"case":"p-for-htilde0","gamma":1.2,"rho":0.4,"delta":1.1}"#),
        ("pt-block", r#"{"a":[[1,2],[0,1]],"b":[[0.5],[1]],"c":[[2,-1]],"d":[[3]]}"#),
        ("pseudo-block", r#"{"a":[[[1,0]]],"b":[[[0.5,0.2],[1,0]]],"d":[[[2,0],[0.3,0.1]],[[0.3,-0.1],[-1,0]]]}"#),
        ("pt-jordan", r#"{"m":2,"n":1,"lambda":3}"#),
        ("pt2-jordan", r#"{"e":0.5,"gamma":1.3,"delta":0.4,"alpha":[0.7,0]}"#),
        ("pseudo2-jordan", r#"{"e":0.5,"gamma":1.3,"delta":0.4}"#),
        ("gen-pt-diag", r#"{"phases":[0.3,1.2,-0.4],"r":[[1,2,0.5],[0.1,-1,2],[1,1,0]]}"#),
        ("self-adjoint-diag", r#"{"omegas":[1,2.5,0.4],"a":[[1,2,0.5],[0,-1,2],[0,0,3]],"b":[[0,0.3,1],[0,0,-0.2],[0,0,0]]}"#),
        ("rotated-hermitian", r#"{"a":[[1,2,5],[0.5,7,0],[3,0,0]],"b":[[0.2,0,0],[0,0,0],[0,0,0]]}"#),
        ("sip", r#"{"n":4,"lambda":-2}"#),
    ];
    for (k, (family, params)) in cases.iter().enumerate() {
        let file = dir.path().join(format!("{k}.json"));
        let file = file.to_str().unwrap();
        let out = ptlab(&["construct", family, "--params", params, "--out", file]);
        assert!(out.status.success(), "{family}: {}", String::from_utf8_lossy(&out.stderr));
        let doc: Value = serde_json::from_str(&std::fs::read_to_string(file).unwrap()).unwrap();
        for (name, r) in doc["residuals"].as_object().unwrap() {
            assert!(r.as_f64().unwrap() < 1e-9, "{family}: residual {name} = {r}");
        }
        let h = format!("{file}#h");
        let kind = doc["kind"].as_str().unwrap();
        if kind == "self-adjoint" {
            let rep = ok_json(&["classify", "--matrix", &h]);
            assert_eq!(rep["metric"]["exists"], true, "{family}");
            assert_eq!(rep["gen_pt"]["status"], "found", "{family}");
        } else {
            let op = format!("{file}#operator");
            let rep = ok_json(&["classify", "--matrix", &h, "--operator", &op, "--kind", kind]);
            assert_eq!(rep["spectrum"]["symmetry"]["holds"], true, "{family} {params}");
        }
    }
}

#[test]
fn classify_examples() {
    let dir = TempDir::new().unwrap();
    let s3 = write(dir.path(), "s3.json", SIGMA3);
    let rep = ok_json(&["classify", "--matrix", &s3, "--operator", &s3, "--kind", "pt"]);
    assert_eq!(rep["spectrum"]["unbroken"], true);
    assert_eq!(rep["metric"]["exists"], true);

    let h = dir.path().join("h.json");
    let h = h.to_str().unwrap();
    ok(&["construct", "pt2", "--params", r#"{"gamma":1,"rho":2}"#, "--out", h]);
    let rep = ok_json(&["classify", "--matrix", &format!("{h}#h"), "--operator", &s3, "--kind", "pt"]);
    assert_eq!(rep["spectrum"]["unbroken"], false);
    assert_eq!(rep["spectrum"]["reality_class"], "ConjugatePairs");
    let ev = rep["spectrum"]["eigenvalues"].as_array().unwrap();
    let ims: Vec<f64> = ev.iter().map(|z| z[1].as_f64().unwrap()).collect();
    for (im, want) in ims.iter().zip([-3f64.sqrt(), 3f64.sqrt()]) {
        assert!((im - want).abs() < 1e-12);
    }

    let j2 = write(dir.path(), "j2.json", r#"{"rows":2,"cols":2,"data":[[[0,0],[1,0]],[[0,0],[0,0]]]}"#);
    let rep = ok_json(&["classify", "--matrix", &j2]);
    assert_eq!(rep["spectrum"]["reality_class"], "AllRealDefective");
    assert_eq!(rep["spectrum"]["segre"][0]["blocks"], serde_json::json!([2]));
    assert_eq!(rep["metric"]["exists"], false);
}

#[test]
fn construct_examples() {
    let out = ptlab(&["construct", "pt2", "--params", r#"{"e":0,"gamma":2,"rho":1,"delta":0}"#]);
    assert!(out.status.success());
    assert_eq!(out.stdout, std::fs::read(golden("construct_pt2.json")).unwrap());

    let rep = ok_json(&["construct", "pt-jordan", "--params", r#"{"m":2,"n":1,"lambda":3}"#]);
    assert_eq!(rep["h"]["rows"], 3);
    assert_eq!(rep["lambda"]["rows"], 3);

    let rep = ok_json(&["construct", "genpt2", "--params", r#"{"theta":0,"delta":0,"phi":0,"alpha":0}"#]);
    assert_eq!(rep["operator"]["data"], serde_json::json!([[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [1.0, 0.0]]]));
}

#[test]
fn sweep_examples() {
    let out = ptlab(&["sweep", "pt2", "--grid", r#"{"gamma":{"start":0,"stop":2,"num":21},"rho":1}"#, "--format", "csv"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let gi = header.iter().position(|h| *h == "gamma").unwrap();
    let ui = header.iter().position(|h| *h == "unbroken").unwrap();
    for line in lines {
        let f: Vec<&str> = line.split(',').collect();
        let gamma: f64 = f[gi].parse().unwrap();
        assert_eq!(f[ui], if gamma >= 1.0 { "true" } else { "false" }, "{line}");
    }

    let grid = r#"{"u":2,"gamma":0.5,"epsilon":{"start":1e-6,"stop":1e-2,"num":17,"log":true}}"#;
    for family in ["pt2-degeneration", "pseudo2-degeneration"] {
        let rep = ok_json(&["sweep", family, "--grid", grid]);
        let slope = rep["fitted_exponents"]["omega_small"].as_f64().unwrap();
        let pref = rep["fitted_prefactors"]["omega_small"].as_f64().unwrap();
        assert!((slope - 1.0).abs() < 0.05);
        assert!((pref - 0.5).abs() < 0.025);
    }
}

#[test]
fn count_examples() {
    let rep = ok_json(&["count", "--max-dim", "3"]);
    assert_eq!(rep["all_match"], true);
    assert_eq!(rep["columns"][1], serde_json::json!({"dim": 2, "values": [3, 4, 6, 6]}));
    assert_eq!(rep["columns"][2], serde_json::json!({"dim": 3, "values": [6, 9, 13, 15]}));
    let out = ptlab(&["count", "--max-dim", "3", "--format", "csv"]);
    assert_eq!(out.stdout, std::fs::read(golden("count_3.csv")).unwrap());
    assert_eq!(code(&["count", "--max-dim", "6"]), 0);
}

#[test]
fn convert_examples() {
    let dir = TempDir::new().unwrap();
    let s3 = write(dir.path(), "s3.json", SIGMA3);
    let f = dir.path().join("pt.json");
    let f = f.to_str().unwrap();
    ok(&["construct", "pt2", "--params", r#"{"e":0.2,"gamma":1.5,"rho":0.8,"delta":0}"#, "--out", f]);
    let rep = ok_json(&["convert", "pt-to-pseudo", "--operator", &s3, "--matrix", &format!("{f}#h")]);
    assert_eq!(rep["q"]["data"], serde_json::json!([[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [-1.0, 0.0]]]));
    for flag in ["hermitian", "real", "involutory", "target_kind_satisfied"] {
        assert_eq!(rep[flag], true, "{flag}");
    }

    let (g, r, d) = (1.0f64, 0.5f64, 0.3f64);
    let f = dir.path().join("ps.json");
    let f = f.to_str().unwrap();
    ok(&["construct", "pseudo2", "--params", &format!(r#"{{"gamma":{g},"rho":{r},"delta":{d}}}"#), "--out", f]);
    let rep = ok_json(&["convert", "pseudo-to-pt", "--operator", &s3, "--matrix", &format!("{f}#h0")]);
    let norm = (g * g - r * r * d.cos().powi(2)).sqrt();
    let want = [[g / norm, r * d.cos() / norm], [-r * d.cos() / norm, -g / norm]];
    for i in 0..2 {
        for j in 0..2 {
            let z = &rep["q"]["data"][i][j];
            assert!((z[0].as_f64().unwrap() - want[i][j]).abs() < 1e-10);
            assert!(z[1].as_f64().unwrap().abs() < 1e-10);
        }
    }

    // γ² = ρ²cos²δ: the normalizer vanishes
    let params = format!(r#"{{"gamma":0.5,"rho":1,"delta":{}}}"#, std::f64::consts::FRAC_PI_3);
    ok(&["construct", "pseudo2", "--params", &params, "--out", f]);
    let rep = ok_json(&["convert", "pseudo-to-pt", "--operator", &s3, "--matrix", &format!("{f}#h0")]);
    assert_eq!(rep["degenerate"], true);
}

#[test]
fn jordan_extracts_chains() {
    let dir = TempDir::new().unwrap();
    let f = dir.path().join("j.json");
    let f = f.to_str().unwrap();
    ok(&["construct", "pt-jordan", "--params", r#"{"m":2,"n":1,"lambda":3}"#, "--out", f]);
    let rep = ok_json(&["jordan", "--matrix", &format!("{f}#h")]);
    let chains = rep["chains"].as_array().unwrap();
    assert_eq!(chains.len(), 1);
    assert_eq!(chains[0]["vectors"].as_array().unwrap().len(), 3);
    assert!((chains[0]["eigenvalue"][0].as_f64().unwrap() - 3.0).abs() < 1e-4);
    for r in chains[0]["residuals"].as_array().unwrap() {
        assert!(r.as_f64().unwrap() < 1e-6);
    }
    let s3 = write(dir.path(), "s3.json", SIGMA3);
    assert_eq!(code(&["jordan", "--matrix", &s3]), 3);
}

#[test]
fn outputs_are_deterministic() {
    let params = r#"{"theta":0.7,"delta":0.2,"phi":0.4,"alpha":1.1}"#;
    let a = ptlab(&["construct", "genpt2", "--params", params]).stdout;
    let b = ptlab(&["construct", "genpt2", "--params", params]).stdout;
    assert_eq!(a, b);
    let c = ptlab(&["construct", "genpt2", "--params", params, "--seed", "7"]).stdout;
    assert_ne!(a, c);
    let d = Command::new(env!("CARGO_BIN_EXE_ptlab"))
        .args(["construct", "genpt2", "--params", params])
        .env("PTLAB_SEED", "7")
        .output()
        .unwrap()
        .stdout;
    assert_eq!(c, d);

    let grid = r#"{"e":[0,0.5],"gamma":{"start":0.1,"stop":2,"num":7},"rho":[-1,0.3,1],"delta":{"start":-3,"stop":3,"num":5}}"#;
    let par = ptlab(&["sweep", "pt2", "--grid", grid, "--format", "csv"]).stdout;
    let seq = ptlab(&["sweep", "pt2", "--grid", grid, "--format", "csv", "--sequential"]).stdout;
    assert_eq!(par, seq);
    assert_eq!(par, ptlab(&["sweep", "pt2", "--grid", grid, "--format", "csv"]).stdout);
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    let s3 = write(dir.path(), "s3.json", SIGMA3);
    let bad = write(dir.path(), "bad.json", r#"{"rows":2,"cols":2,"data":[[[1,0]"#);
    let ragged = write(dir.path(), "ragged.json", r#"{"rows":2,"cols":2,"data":[[[1,0]]]}"#);
    let bom = write(dir.path(), "bom.json", &format!("\u{feff}{SIGMA3}"));
    let i3 = write(
        dir.path(),
        "i3.json",
        r#"{"rows":3,"cols":3,"data":[[[1,0],[0,0],[0,0]],[[0,0],[1,0],[0,0]],[[0,0],[0,0],[1,0]]]}"#,
    );
    assert_eq!(code(&["classify", "--matrix", &bad]), 2);
    assert_eq!(code(&["classify", "--matrix", &ragged]), 2);
    assert_eq!(code(&["classify", "--matrix", &bom]), 2);
    assert_eq!(code(&["classify", "--matrix", "/nonexistent/m.json"]), 2);
    assert_eq!(code(&["construct", "pt2", "--params", "{\"gamma\":"]), 2);
    assert_eq!(code(&["construct", "pt2", "--params", r#"{"gama":1}"#]), 2);
    assert_eq!(code(&["classify", "--matrix", &i3, "--operator", &s3, "--kind", "pt"]), 3);

    let out = ptlab(&["construct", "pt2", "--params", r#"{"gamma":1,"rho":0.5,"v":0.9}"#]);
    assert_eq!(out.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&out.stderr).contains("v² < γ² − ρ² violated"));
    let out = ptlab(&["construct", "pt2", "--params", r#"{"gamma":1,"u":-1}"#]);
    assert_eq!(out.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&out.stderr).contains("u·γ > 0 violated"));

    assert_eq!(code(&["sweep", "pt2", "--grid", r#"{"gamma":{"start":0,"stop":1,"num":0}}"#]), 4);
    assert_eq!(code(&["sweep", "pt2-degeneration", "--grid", r#"{"epsilon":[]}"#]), 4);
    assert_eq!(code(&["count", "--max-dim", "9"]), 4);
    assert_eq!(code(&["count", "--max-dim", "1"]), 4);

    // σ1 is a real involution, but σ1·H ≠ H*·σ1 for this H
    let s1 = write(dir.path(), "s1.json", r#"{"rows":2,"cols":2,"data":[[[0,0],[1,0]],[[1,0],[0,0]]]}"#);
    let h = write(dir.path(), "h.json", r#"{"rows":2,"cols":2,"data":[[[1,0],[0,1]],[[2,0],[0,0]]]}"#);
    assert_eq!(code(&["convert", "pt-to-pseudo", "--operator", &s1, "--matrix", &h]), 3);
    // not an involution at all
    let two = write(dir.path(), "two.json", r#"{"rows":2,"cols":2,"data":[[[2,0],[0,0]],[[0,0],[2,0]]]}"#);
    assert_eq!(code(&["convert", "pseudo-to-pt", "--operator", &two, "--matrix", &h]), 3);
}

#[test]
fn csv_floats_carry_17_digits() {
    let out = ptlab(&["sweep", "pt2", "--grid", r#"{"gamma":0.1,"rho":0.7}"#, "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(row[1], "1.0000000000000001e-1");
    assert_eq!(row[1].parse::<f64>().unwrap(), 0.1);
}
