//! End-to-end tests of the `pss` binary: exit codes, artifacts, the help
//! text, and determinism under a fixed PSS_SEED.

use std::path::Path;
use std::process::{Command, Output};

fn pss(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pss"))
        .args(args)
        .current_dir(dir)
        .env_remove("PSS_SEED")
        .output()
        .expect("binary runs")
}

fn pss_seeded(dir: &Path, seed: &str, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pss"))
        .args(args)
        .current_dir(dir)
        .env("PSS_SEED", seed)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

#[test]
fn help_documents_every_flag() {
    let dir = tempfile::tempdir().unwrap();
    let top = pss(dir.path(), &["--help"]);
    assert_eq!(code(&top), 0);
    let text = String::from_utf8_lossy(&top.stdout).to_string();
    for sub in ["generate", "verify", "lax", "solve", "immerse", "builtin"] {
        assert!(text.contains(sub), "top help missing `{sub}`");
    }
    let documented: &[(&str, &[&str])] = &[
        ("generate", &["--prop1", "--cor1", "--psi", "--m1", "--m2", "--lambda", "--out", "--json"]),
        ("verify", &["--system", "--immersion", "--no-subst", "--samples", "--seed", "--out"]),
        ("lax", &["--system", "--size", "--samples", "--seed"]),
        ("solve", &["--builtin", "--m1", "--m2", "--N", "--L", "--dt", "--T", "--z0", "--x0", "--store-every", "--eta", "--x1", "--t0", "--nt", "--out"]),
        ("immerse", &["--system", "--field", "--mask-eps", "--mask-threshold", "--out-obj", "--out-csv"]),
        ("builtin", &["--list", "--name", "--eta", "--lambda", "--m1", "--m2", "--alpha", "--beta", "--sign", "--out"]),
    ];
    for (sub, flags) in documented {
        let out = pss(dir.path(), &[sub, "--help"]);
        assert_eq!(code(&out), 0);
        let text = String::from_utf8_lossy(&out.stdout).to_string();
        for flag in *flags {
            assert!(text.contains(flag), "`{sub} --help` missing `{flag}`");
        }
    }
}

#[test]
fn builtin_list_prints_the_catalog() {
    let dir = tempfile::tempdir().unwrap();
    let out = pss(dir.path(), &["builtin", "--list"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8_lossy(&out.stdout).to_string();
    for name in ["sine_gordon", "short_pulse", "family_sp", "example_4param"] {
        assert!(text.contains(name));
    }
}

#[test]
fn usage_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&pss(dir.path(), &["no-such-command"])), 2);
    assert_eq!(code(&pss(dir.path(), &["verify"])), 2); // missing --system
    assert_eq!(code(&pss(dir.path(), &["generate"])), 2); // neither mode
    assert_eq!(
        code(&pss(dir.path(), &["builtin", "--name", "unknown_system"])),
        2
    );
}

#[test]
fn verify_passes_builtins_and_catches_tampering() {
    let dir = tempfile::tempdir().unwrap();
    let out = pss(
        dir.path(),
        &["builtin", "--name", "short_pulse", "--lambda", "1", "--out", "sp.json"],
    );
    assert_eq!(code(&out), 0);

    let ok = pss(
        dir.path(),
        &["verify", "--system", "sp.json", "--immersion", "--json"],
    );
    assert_eq!(code(&ok), 0, "{}", String::from_utf8_lossy(&ok.stderr));
    let report: serde_json::Value =
        serde_json::from_slice(&ok.stdout).expect("report is JSON");
    assert_eq!(report["all_pass"], serde_json::Value::Bool(true));

    // tamper with the connection form
    let text = std::fs::read_to_string(dir.path().join("sp.json")).unwrap();
    let tampered = text.replace("\"dt\": \"z\"", "\"dt\": \"2 * z\"");
    assert_ne!(text, tampered, "tampering target not found");
    std::fs::write(dir.path().join("bad.json"), tampered).unwrap();
    let bad = pss(
        dir.path(),
        &["verify", "--system", "bad.json", "--json"],
    );
    assert_eq!(code(&bad), 1);
    let report: serde_json::Value = serde_json::from_slice(&bad.stdout).unwrap();
    assert_eq!(report["all_pass"], serde_json::Value::Bool(false));
    // a witness point is reported for the failing residual
    let has_witness = report["residuals"]
        .as_array()
        .unwrap()
        .iter()
        .any(|r| !r["pass"].as_bool().unwrap() && r["witness"].is_object());
    assert!(has_witness);
}

#[test]
fn generate_then_verify_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let gen = pss(
        dir.path(),
        &[
            "generate", "--cor1", "--psi", "z", "--m1", "1", "--m2", "0", "--lambda", "1",
            "--out", "gen.json",
        ],
    );
    assert_eq!(code(&gen), 0, "{}", String::from_utf8_lossy(&gen.stderr));
    let verify = pss(
        dir.path(),
        &["verify", "--system", "gen.json", "--immersion"],
    );
    assert_eq!(code(&verify), 0);

    // the four-function generator from a spec file
    std::fs::write(
        dir.path().join("quartet.json"),
        r#"{
            "psi21": "z^2",
            "psi22": "1",
            "psi31": "z",
            "psi32": "0.5"
        }"#,
    )
    .unwrap();
    let gen4 = pss(
        dir.path(),
        &["generate", "--prop1", "quartet.json", "--out", "gen4.json"],
    );
    assert_eq!(code(&gen4), 0, "{}", String::from_utf8_lossy(&gen4.stderr));
    let verify4 = pss(dir.path(), &["verify", "--system", "gen4.json"]);
    assert_eq!(code(&verify4), 0, "{}", String::from_utf8_lossy(&verify4.stderr));

    let lax = pss(dir.path(), &["lax", "--system", "gen4.json", "--size", "2"]);
    assert_eq!(code(&lax), 0);
}

#[test]
fn solve_writes_field_and_rejects_bad_data() {
    let dir = tempfile::tempdir().unwrap();
    let ok = pss(
        dir.path(),
        &[
            "solve", "--builtin", "short_pulse", "--N", "64", "--dt", "2e-3", "--T", "0.1",
            "--z0", "0.1*sin(x)", "--out", "field.csv",
        ],
    );
    assert_eq!(code(&ok), 0, "{}", String::from_utf8_lossy(&ok.stderr));
    assert!(dir.path().join("field.csv").exists());
    assert!(dir.path().join("field.meta.json").exists());

    // non-zero-mean data is a precondition failure
    let mean = pss(
        dir.path(),
        &[
            "solve", "--builtin", "short_pulse", "--N", "64", "--dt", "2e-3", "--T", "0.1",
            "--z0", "0.1 + 0.1*sin(x)", "--out", "bad.csv",
        ],
    );
    assert_eq!(code(&mean), 2);

    // numerical breakdown exits 3
    let blow = pss(
        dir.path(),
        &[
            "solve", "--builtin", "short_pulse", "--N", "64", "--dt", "2e-3", "--T", "0.1",
            "--z0", "1100*sin(x)", "--out", "blow.csv",
        ],
    );
    assert_eq!(code(&blow), 3);
    let message = String::from_utf8_lossy(&blow.stderr).to_string();
    assert!(message.contains("blow-up"), "stderr: {message}");
}

#[test]
fn immerse_pipeline_writes_mesh_and_curvature() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(
        code(&pss(
            dir.path(),
            &["builtin", "--name", "sine_gordon", "--eta", "1", "--out", "sg.json"],
        )),
        0
    );
    assert_eq!(
        code(&pss(
            dir.path(),
            &[
                "solve", "--builtin", "sine_gordon_kink", "--eta", "1", "--x0", "0.1", "--x1",
                "3.1", "--t0", "0.1", "--T", "3.1", "--N", "61", "--out", "kink.csv",
            ],
        )),
        0
    );
    let out = pss(
        dir.path(),
        &[
            "immerse", "--system", "sg.json", "--field", "kink.csv", "--out-obj", "kink.obj",
            "--json",
        ],
    );
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert!(dir.path().join("kink.obj").exists());
    assert!(dir.path().join("kink.curvature.csv").exists());
    let obj = std::fs::read_to_string(dir.path().join("kink.obj")).unwrap();
    assert!(obj.starts_with("v "));
    assert!(obj.contains("\nf "));
    let csv = std::fs::read_to_string(dir.path().join("kink.curvature.csv")).unwrap();
    assert!(csv.starts_with("vertex_index,K,mask_flag\n"));

    // an oversized mask is a usage-level failure, not a crash
    let empty = pss(
        dir.path(),
        &[
            "immerse", "--system", "sg.json", "--field", "kink.csv", "--mask-eps", "99",
            "--out-obj", "none.obj",
        ],
    );
    assert_eq!(code(&empty), 2);
}

#[test]
fn reports_are_byte_identical_under_a_fixed_seed() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(
        code(&pss(
            dir.path(),
            &["builtin", "--name", "family_sp", "--m1", "2", "--m2", "1", "--out", "fam.json"],
        )),
        0
    );
    for (name, seed) in [("a.json", "12345"), ("b.json", "12345"), ("c.json", "999")] {
        let out = pss_seeded(
            dir.path(),
            seed,
            &["verify", "--system", "fam.json", "--immersion", "--out", name],
        );
        assert_eq!(code(&out), 0);
    }
    let a = std::fs::read(dir.path().join("a.json")).unwrap();
    let b = std::fs::read(dir.path().join("b.json")).unwrap();
    let c = std::fs::read(dir.path().join("c.json")).unwrap();
    assert_eq!(a, b, "same seed must give identical reports");
    assert_ne!(a, c, "different seeds must sample differently");

    // --seed takes precedence over the environment
    let flagged = pss_seeded(
        dir.path(),
        "999",
        &[
            "verify", "--system", "fam.json", "--immersion", "--seed", "12345", "--out",
            "d.json",
        ],
    );
    assert_eq!(code(&flagged), 0);
    let d = std::fs::read(dir.path().join("d.json")).unwrap();
    assert_eq!(a, d);
}
