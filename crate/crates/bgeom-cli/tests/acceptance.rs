//! CLI acceptance: round-trip determinism over the corpus and the exact
//! reports of the documented invocations.

use std::path::{Path, PathBuf};

use bgeom_cli::run::run;
use bgeom_cli::surface_file::SurfaceFile;
use serde_json::Value;

fn corpus_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/corpus")
}

fn corpus_files() -> Vec<PathBuf> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(corpus_dir())
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "json"))
        .collect();
    files.sort();
    assert!(files.len() >= 10, "corpus shrank unexpectedly");
    files
}

fn path_str(p: &Path) -> String {
    p.to_str().unwrap().to_string()
}

fn parse_report(out: &str) -> Value {
    serde_json::from_str(out).expect("reports are valid JSON")
}

#[test]
fn criterion_9_round_trip_and_determinism() {
    let mut checked = 0;
    for file in corpus_files() {
        let bytes = std::fs::read(&file).unwrap();

        // parse ∘ serialize ∘ parse is the identity on every corpus file.
        let once = SurfaceFile::parse(&bytes).unwrap();
        let canonical = once.to_canonical_json();
        let twice = SurfaceFile::parse(canonical.as_bytes()).unwrap();
        assert_eq!(once, twice, "round-trip changed {file:?}");
        assert_eq!(canonical, twice.to_canonical_json());

        // Identical input bytes and flags give identical output bytes.
        let args = ["check".to_string(), path_str(&file)];
        let first = run(&args);
        let second = run(&args);
        assert_eq!(first.stdout, second.stdout);
        assert_eq!(first.code, second.code);

        // Reports always carry the command, the input hash and exactness.
        let report = parse_report(&first.stdout);
        assert_eq!(report["command"], "check");
        assert_eq!(report["exact"], true);
        assert!(report["input_hash"]
            .as_str()
            .unwrap()
            .starts_with("sha256:"));
        checked += 1;
    }
    println!("acceptance 9a (corpus round-trip determinism over {checked} files): PASS");
}

#[test]
fn criterion_9_documented_invocations() {
    // volume -D "piL + E" on the blown-up plane.
    let blp = path_str(&corpus_dir().join("blp_p2.json"));
    let out = run(&["volume".into(), blp.clone(), "-D".into(), "piL + E".into()]);
    assert_eq!(out.code, 0);
    let report = parse_report(&out.stdout);
    assert_eq!(report["result"], "1/1");

    // discrepancies on the degree-3 cone.
    let cone = path_str(&corpus_dir().join("cone_n3.json"));
    let out = run(&["discrepancies".into(), cone.clone()]);
    assert_eq!(out.code, 0);
    let report = parse_report(&out.stdout);
    assert_eq!(report["result"]["C0"], "-1/1");

    // intersect -D1 L -D2 L on the plane.
    let p2 = path_str(&corpus_dir().join("p2.json"));
    let out = run(&[
        "intersect".into(),
        p2.clone(),
        "-D1".into(),
        "L".into(),
        "-D2".into(),
        "L".into(),
    ]);
    assert_eq!(out.code, 0);
    let report = parse_report(&out.stdout);
    assert_eq!(report["result"], "1/1");

    // K resolves to the canonical class: K² = 8 on a Hirzebruch surface.
    let f2 = path_str(&corpus_dir().join("f2.json"));
    let out = run(&[
        "intersect".into(),
        f2,
        "-D1".into(),
        "K".into(),
        "-D2".into(),
        "K".into(),
    ]);
    assert_eq!(out.code, 0);
    assert_eq!(parse_report(&out.stdout)["result"], "8/1");

    println!("acceptance 9b (documented invocations exact): PASS");
}

#[test]
fn zariski_and_descend_reports() {
    let blp = path_str(&corpus_dir().join("blp_p2.json"));
    let out = run(&["zariski".into(), blp.clone(), "-D".into(), "piL + E".into()]);
    assert_eq!(out.code, 0);
    let report = parse_report(&out.stdout);
    assert_eq!(report["result"]["P"]["piL"], "1/1");
    assert_eq!(report["result"]["N"]["E1"], "1/1");
    assert_eq!(report["result"]["support"][0], "E1");

    let out = run(&["descend".into(), blp.clone(), "-M".into(), "2*piL".into()]);
    assert_eq!(out.code, 0);
    let report = parse_report(&out.stdout);
    assert_eq!(report["result"]["blowup_count"], 0);
    assert_eq!(report["result"]["contracted"][0], "E1");
    assert_eq!(report["result"]["m_prime"]["L"], "2/1");
    assert_eq!(report["result"]["rank"], 1);

    // A non-pseudoeffective input is a domain error with a stable code.
    let out = run(&["zariski".into(), blp, "-D".into(), "piL - 2*E1".into()]);
    assert_eq!(out.code, 1);
    let report = parse_report(&out.stdout);
    assert_eq!(report["error"]["code"], "NotPseudoeffective");
}

#[test]
fn pair_commands() {
    let pair = path_str(&corpus_dir().join("p2_pair.json"));
    let out = run(&["pair-volume".into(), pair.clone()]);
    assert_eq!(out.code, 0);
    // vol(K + L/2 + 4L) = vol(3L/2) = 9/4.
    assert_eq!(parse_report(&out.stdout)["result"], "9/4");

    let out = run(&["classify".into(), pair.clone()]);
    assert_eq!(parse_report(&out.stdout)["result"]["verdict"], "gklt");

    let tower = path_str(&corpus_dir().join("tower_f1.json"));
    let out = run(&["pair-volume".into(), tower]);
    assert_eq!(out.code, 0);
    assert_eq!(parse_report(&out.stdout)["result"], "3/4");

    let cone = path_str(&corpus_dir().join("cone_n3.json"));
    let out = run(&["classify".into(), cone.clone()]);
    assert_eq!(out.code, 0);
    assert_eq!(parse_report(&out.stdout)["result"]["verdict"], "glc");
    let out = run(&["classify".into(), cone, "--strict".into()]);
    assert_eq!(out.code, 0, "glc passes strict mode");

    // Strict mode turns a not-glc verdict into exit 1.
    let bad = path_str(&corpus_dir().join("p2_notglc.json"));
    let out = run(&["classify".into(), bad.clone()]);
    assert_eq!(out.code, 0);
    assert_eq!(parse_report(&out.stdout)["result"]["verdict"], "not_glc");
    let out = run(&["classify".into(), bad, "--strict".into()]);
    assert_eq!(out.code, 1);
    assert_eq!(parse_report(&out.stdout)["error"]["code"], "NotGlc");

    // pair-volume needs a pair section.
    let p2 = path_str(&corpus_dir().join("p2.json"));
    let out = run(&["pair-volume".into(), p2]);
    assert_eq!(out.code, 1);
    assert_eq!(
        parse_report(&out.stdout)["error"]["code"],
        "PreconditionUnmet"
    );
}

#[test]
fn bounds_command() {
    let pair = path_str(&corpus_dir().join("p2_pair.json"));
    let out = run(&[
        "bounds".into(),
        "hm".into(),
        pair.clone(),
        "-H".into(),
        "2*L".into(),
        "--m0".into(),
        "1".into(),
        "--birational".into(),
    ]);
    assert_eq!(out.code, 0);
    let report = parse_report(&out.stdout);
    // lhs = 2L·(4L + 6L) = 20; rhs = (49/2)·(9/4).
    assert_eq!(report["result"]["lhs"], "20/1");
    assert_eq!(report["result"]["rhs"], "441/8");
    assert_eq!(report["result"]["holds"], true);

    let out = run(&[
        "bounds".into(),
        "m2".into(),
        pair.clone(),
        "-H".into(),
        "2*L".into(),
        "--e".into(),
        "1/2".into(),
    ]);
    assert_eq!(out.code, 1);
    // K + (B + M)/2 = -3L + L/4 + 2L is not big: e is rejected.
    assert_eq!(parse_report(&out.stdout)["error"]["code"], "EParamInvalid");

    let out = run(&["bounds".into(), "zz".into(), pair]);
    assert_eq!(out.code, 2);
}

#[test]
fn validation_and_parse_errors() {
    let bad = path_str(&corpus_dir().join("bad_mult.json"));
    let out = run(&["check".into(), bad]);
    assert_eq!(out.code, 1);
    let report = parse_report(&out.stdout);
    assert_eq!(report["error"]["code"], "InvalidMultiplicity");

    // Unknown flags and missing files are usage errors.
    let out = run(&["check", "/nonexistent.json"]);
    assert_eq!(out.code, 2);
    let p2 = path_str(&corpus_dir().join("p2.json"));
    let out = run(&["volume".into(), p2.clone(), "--wat".into()]);
    assert_eq!(out.code, 2);

    // Unparseable JSON bytes are parse errors (exit 2).
    let dir = std::env::temp_dir().join("bgeom-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let garbled = dir.join("garbled.json");
    std::fs::write(&garbled, b"{\"version\": 1,").unwrap();
    let out = run(&["check".into(), path_str(&garbled)]);
    assert_eq!(out.code, 2);
    assert_eq!(parse_report(&out.stdout)["error"]["code"], "ParseError");
}

#[test]
fn rank_cap_via_env() {
    // The cap is read per invocation from BGEOM_MAX_RANK; exercise it
    // through the real binary to keep this test process env-clean.
    let tower = path_str(&corpus_dir().join("tower_f1.json"));
    let bin = env!("CARGO_BIN_EXE_bgeom");

    let ok = std::process::Command::new(bin)
        .args(["check", &tower])
        .output()
        .unwrap();
    assert!(ok.status.success());

    let capped = std::process::Command::new(bin)
        .args(["check", &tower])
        .env("BGEOM_MAX_RANK", "4")
        .output()
        .unwrap();
    assert_eq!(capped.status.code(), Some(1));
    let report: Value = serde_json::from_slice(&capped.stdout).unwrap();
    assert_eq!(report["error"]["code"], "RankLimitExceeded");
}

#[test]
fn binary_output_matches_library_route() {
    let p2 = path_str(&corpus_dir().join("p2.json"));
    let bin = env!("CARGO_BIN_EXE_bgeom");
    let process = std::process::Command::new(bin)
        .args(["intersect", &p2, "-D1", "L", "-D2", "L"])
        .output()
        .unwrap();
    assert!(process.status.success());
    let lib = run(&[
        "intersect".into(),
        p2,
        "-D1".into(),
        "L".into(),
        "-D2".into(),
        "L".into(),
    ]);
    assert_eq!(
        String::from_utf8(process.stdout).unwrap().trim(),
        lib.stdout
    );
}
