use std::path::PathBuf;
use std::process::{Command, Output};

use covadj::criteria::{adjustment_criterion, backdoor_criterion, theorem7_report};
use covadj::{parse_graph, AdjustmentQuery, Admg, CriterionName, Mode, VerdictReport};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
}

fn load(name: &str) -> Admg {
    parse_graph(&std::fs::read_to_string(fixture(name)).unwrap()).unwrap()
}

fn covadj(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_covadj"))
        .args(args)
        .output()
        .unwrap()
}

fn code(args: &[&str]) -> i32 {
    covadj(args).status.code().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn g(name: &str) -> String {
    fixture(name).to_string_lossy().into_owned()
}

#[test]
fn verdict_exit_codes_on_the_fixtures() {
    let (a, b, c) = (g("fig1a.g"), g("fig1b.g"), g("fig1c.g"));
    assert_eq!(
        code(&[
            "check-backdoor",
            "--graph",
            &a,
            "-X",
            "X",
            "-Y",
            "Y",
            "-Z",
            "Z"
        ]),
        0
    );
    assert_eq!(
        code(&["check-backdoor", "--graph", &a, "-X", "X", "-Y", "Y"]),
        1
    );
    assert_eq!(
        code(&[
            "check-backdoor",
            "--graph",
            &b,
            "-X",
            "X",
            "-Y",
            "Y",
            "-Z",
            "Z"
        ]),
        1
    );
    assert_eq!(
        code(&[
            "check-adjust",
            "--graph",
            &b,
            "-X",
            "X",
            "-Y",
            "Y",
            "-Z",
            "Z"
        ]),
        0
    );
    for mode in ["fast", "reference"] {
        assert_eq!(
            code(&[
                "check-adjust",
                "--graph",
                &c,
                "-X",
                "X",
                "-Y",
                "Y",
                "-Z",
                "Z",
                "--mode",
                mode
            ]),
            1
        );
    }
    assert_eq!(
        code(&["check-t7", "--graph", &b, "-X", "X", "-Y", "Y", "-Z", "Z"]),
        0
    );
    assert_eq!(
        code(&["check-t7", "--graph", &c, "-X", "X", "-Y", "Y", "-Z", "Z"]),
        1
    );
    assert_eq!(
        code(&["exists-set", "--graph", &b, "-X", "X", "-Y", "Y"]),
        0
    );
    assert_eq!(
        code(&["exists-set", "--graph", &c, "-X", "X", "-Y", "Y"]),
        1
    );
    assert_eq!(code(&["find-sets", "--graph", &c, "-X", "X", "-Y", "Y"]), 1);
}

#[test]
fn input_errors_exit_2() {
    let a = g("fig1a.g");
    let unknown = covadj(&[
        "check-adjust",
        "--graph",
        &a,
        "-X",
        "X",
        "-Y",
        "Y",
        "-Z",
        "W",
    ]);
    assert_eq!(unknown.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&unknown.stderr).contains('W'));
    assert_eq!(
        code(&[
            "check-adjust",
            "--graph",
            "/nonexistent.g",
            "-X",
            "X",
            "-Y",
            "Y"
        ]),
        2
    );
    assert_eq!(code(&["check-adjust", "--graph", &a, "-X", "X"]), 2);
    assert_eq!(
        code(&["check-adjust", "--graph", &a, "-X", "X", "-Y", "X"]),
        2
    );
    assert_eq!(code(&["no-such-command"]), 2);
    // preconditions of the oracles
    assert_eq!(
        code(&[
            "verify",
            "--graph",
            &g("fig1c.g"),
            "-X",
            "X",
            "-Y",
            "Y",
            "-Z",
            "Z"
        ]),
        2
    );
    assert_eq!(
        code(&["refute", "--graph", &a, "-X", "X", "-Y", "Y", "-Z", "Z"]),
        2
    );
    assert_eq!(
        code(&[
            "find-sets",
            "--graph",
            &a,
            "-X",
            "X",
            "-Y",
            "Y",
            "--limit",
            "0"
        ]),
        2
    );
}

#[test]
fn json_verdicts_match_the_library() {
    let cases = [
        ("fig1a.g", &["Z"][..]),
        ("fig1a.g", &[][..]),
        ("fig1b.g", &["Z"][..]),
        ("fig1c.g", &["Z"][..]),
        ("fig1c.g", &[][..]),
    ];
    for (file, z) in cases {
        let graph = load(file);
        let q = AdjustmentQuery::from_names(&["X"], &["Y"], z);
        let zs = z.join(",");
        let mut base = vec!["--json", "--graph", &g(file), "-X", "X", "-Y", "Y"]
            .into_iter()
            .map(String::from)
            .collect::<Vec<_>>();
        if !z.is_empty() {
            base.extend(["-Z".to_string(), zs]);
        }
        let run = |cmd: &str| -> VerdictReport {
            let mut args = vec![cmd.to_string()];
            args.extend(base.iter().cloned());
            let args: Vec<&str> = args.iter().map(String::as_str).collect();
            serde_json::from_str(&stdout(&covadj(&args))).unwrap()
        };
        let adj = adjustment_criterion(&graph, &q, Mode::Fast).unwrap();
        assert_eq!(
            run("check-adjust"),
            VerdictReport::from_verdict(CriterionName::Adjustment, &adj)
        );
        assert_eq!(run("check-adjust").to_verdict(), Some(adj));
        let bd = backdoor_criterion(&graph, &q).unwrap();
        assert_eq!(
            run("check-backdoor"),
            VerdictReport::from_verdict(CriterionName::Backdoor, &bd)
        );
        let t7 = theorem7_report(&graph, &q).unwrap();
        assert_eq!(run("check-t7"), VerdictReport::from_theorem7(&t7));
    }
}

#[test]
fn fig1c_empty_set_witness_in_json() {
    let out = covadj(&[
        "--json",
        "check-adjust",
        "--graph",
        &g("fig1c.g"),
        "-X",
        "X",
        "-Y",
        "Y",
    ]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["criterion"], "adjustment");
    assert_eq!(v["holds"], false);
    assert_eq!(v["failure"]["kind"], "condition2");
    assert_eq!(v["witness_path"], "X <-> Y");
}

#[test]
fn human_readable_output() {
    let out = covadj(&[
        "check-adjust",
        "--graph",
        &g("fig1c.g"),
        "-X",
        "X",
        "-Y",
        "Y",
    ]);
    let text = stdout(&out);
    assert!(text.contains("fails"), "{text}");
    assert!(text.contains("X <-> Y"), "{text}");
    let out = covadj(&["find-sets", "--graph", &g("fig1b.g"), "-X", "X", "-Y", "Y"]);
    assert_eq!(stdout(&out).lines().collect::<Vec<_>>(), ["{}", "{Z}"]);
    let out = covadj(&[
        "canonical-set",
        "--graph",
        &g("fig1a.g"),
        "-X",
        "X",
        "-Y",
        "Y",
    ]);
    assert_eq!(stdout(&out).trim(), "{Z}");
}

#[test]
fn graph_transforms_reparse() {
    let out = covadj(&["magnify", "--graph", &g("fig1c.g")]);
    let m = parse_graph(&stdout(&out)).unwrap();
    assert!(m.has_directed("__W_X_Y", "X") && m.has_directed("__W_X_Y", "Y"));
    assert_eq!(m.num_bidirected(), 0);
    let out = covadj(&["project", "--graph", &g("fig1c.g"), "--latent", "Z"]);
    let p = parse_graph(&stdout(&out)).unwrap();
    assert!(p.has_directed("X", "Y") && p.has_bidirected("X", "Y"));
    let out = covadj(&["magnify", "--graph", &g("fig1a.g"), "--edge", "X->Q"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn oracles_from_the_command_line() {
    let a = g("fig1a.g");
    let c = g("fig1c.g");
    assert_eq!(
        code(&["verify", "--graph", &a, "-X", "X", "-Y", "Y", "-Z", "Z", "--trials", "20"]),
        0
    );
    let dir = std::env::temp_dir().join(format!("covadj-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let scm_path = dir.join("cx.json");
    let out = covadj(&[
        "--json",
        "refute",
        "--graph",
        &c,
        "-X",
        "X",
        "-Y",
        "Y",
        "-Z",
        "Z",
        "--scm-out",
        scm_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["found"], true);
    assert!(v["counterexample"]["gap"].as_f64().unwrap() > 0.01);
    let scm: covadj::DiscreteScm =
        serde_json::from_str(&std::fs::read_to_string(&scm_path).unwrap()).unwrap();
    assert_eq!(scm.graph(), &load("fig1c.g"));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn route_reduction() {
    let out = covadj(&[
        "--json",
        "paths",
        "--graph",
        &g("fig1a.g"),
        "--route",
        "X <- Z -> X -> Y",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["direct_route"], "X -> Y");
}
