use std::path::Path;
use std::process::{Command, Output};

fn cscoh(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cscoh")).args(args).output().expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = cscoh(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

/// Set CSCOH_BLESS=1 to rewrite the golden files.
fn golden(name: &str, args: &[&str]) {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name);
    let got = stdout(args);
    if std::env::var_os("CSCOH_BLESS").is_some() {
        std::fs::write(&path, &got).unwrap();
        return;
    }
    let want = std::fs::read_to_string(&path).unwrap_or_else(|_| panic!("missing golden {}", path.display()));
    assert_eq!(got, want, "output of {args:?} differs from {name}");
}

#[test]
fn golden_outputs() {
    golden("kt_bc.txt", &["cohomology", "--catalog", "kodaira-thurston", "--flavor", "bc"]);
    golden("kt_bc.json", &["cohomology", "--catalog", "kodaira-thurston", "--flavor", "bc", "--format", "json"]);
    golden("kt_validate.txt", &["validate", "--catalog", "kodaira-thurston"]);
    golden("iwasawa_lemma.txt", &["lemma", "--catalog", "iwasawa"]);
    golden("iwasawa_hlc.txt", &["hlc", "--catalog", "iwasawa", "--flavor", "dolbeault"]);
    golden("nakamura_scan.txt", &["scan", "--catalog", "nakamura", "--param", "t=0,1/2,1,-1/3"]);
    golden(
        "nakamura_massey.json",
        &[
            "massey",
            "--catalog",
            "nakamura",
            "--param",
            "t=1/2",
            "--a",
            "Phi1",
            "--b",
            "Phib2",
            "--c",
            "Phib2",
            "--format",
            "json",
        ],
    );
}

#[test]
fn repeated_runs_are_identical() {
    let args = ["harmonic", "--catalog", "iwasawa", "--format", "json"];
    assert_eq!(stdout(&args), stdout(&args));
}

#[test]
fn frames_share_tables() {
    let dims = |name: &str| {
        let v: serde_json::Value =
            serde_json::from_str(&stdout(&["cohomology", "--catalog", name, "--format", "json"])).unwrap();
        let mut out = Vec::new();
        for (f, cells) in v["cohomology"]["flavors"].as_object().unwrap() {
            for (bd, cell) in cells.as_object().unwrap() {
                out.push((f.clone(), bd.clone(), cell["dim"].as_u64().unwrap()));
            }
        }
        out
    };
    assert_eq!(dims("kodaira-thurston"), dims("kodaira-thurston-xi"));
}

#[test]
fn spec_file_round_trip() {
    let doc = stdout(&["catalog", "show", "iwasawa"]);
    let path = std::env::temp_dir().join(format!("cscoh-iwasawa-{}.spec", std::process::id()));
    std::fs::write(&path, doc).unwrap();
    let from_file = stdout(&["lemma", "--spec", path.to_str().unwrap()]);
    std::fs::remove_file(&path).unwrap();
    assert_eq!(from_file, stdout(&["lemma", "--catalog", "iwasawa"]));
}

#[test]
fn omega_scan_keeps_rows() {
    let out = stdout(&[
        "scan",
        "--catalog",
        "nakamura",
        "--omega-direction",
        "Phi2^Phib2",
        "--eps",
        "0,1/3",
        "--what",
        "hlc",
    ]);
    assert!(out.contains("eps = 0: HOLDS"), "{out}");
    assert!(out.contains("eps = 1/3"), "{out}");
}

#[test]
fn exit_codes() {
    assert_eq!(cscoh(&["lemma", "--catalog", "nope"]).status.code(), Some(1));
    assert_eq!(cscoh(&["lemma", "--catalog", "nakamura", "--param", "s=1"]).status.code(), Some(1));
    assert_eq!(cscoh(&["lemma"]).status.code(), Some(1));
    assert_eq!(cscoh(&["--help"]).status.code(), Some(0));

    let path = std::env::temp_dir().join(format!("cscoh-bad-{}.spec", std::process::id()));
    std::fs::write(
        &path,
        "[manifold]\nname = bad\nn = 1\ngenerators_10 = a\ngenerators_01 = b\n\n[dbar]\na = a^b\n\n[omega]\n0\n",
    )
    .unwrap();
    let out = cscoh(&["validate", "--spec", path.to_str().unwrap()]);
    std::fs::remove_file(&path).unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));
}

#[test]
fn massey_needs_closed_inputs() {
    let out =
        cscoh(&["massey", "--catalog", "nakamura", "--param", "t=1/2", "--a", "Phi3", "--b", "Phib2", "--c", "Phib2"]);
    assert_eq!(out.status.code(), Some(1));
}
