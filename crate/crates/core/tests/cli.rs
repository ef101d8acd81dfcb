use cayley_lab::cli::{run_captured, EXIT_FAILED, EXIT_OK, EXIT_REFUSED, EXIT_USAGE};
use cayley_lab::report::parse_json;

fn run(args: &[&str]) -> (String, String, i32) {
    let mut argv = vec!["cayley-lab"];
    argv.extend_from_slice(args);
    run_captured(argv)
}

#[test]
fn diameter_of_twelve_cycle() {
    let (out, _, code) = run(&["diam", "-g", "cyclic:12", "--format", "json"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(parse_json(&out).unwrap()["diameter"], 6);
}

#[test]
fn spectral_suite_json() {
    let (out, _, code) = run(&["verify", "spectral", "-g", "cyclic:12", "--format", "json"]);
    assert_eq!(code, EXIT_OK);
    let v = parse_json(&out).unwrap();
    assert_eq!(v["holds"], true);
    let l1 = v["report"]["spectrum"]["lambda1"].as_f64().unwrap();
    assert!((l1 - 0.2679491924311228).abs() < 1e-12);
}

#[test]
fn nesting_suite() {
    let (out, _, code) = run(&[
        "nilprog", "nest", "-r", "2", "-s", "2", "-L", "1,1", "--format", "json",
    ]);
    assert_eq!(code, EXIT_OK);
    let v = parse_json(&out).unwrap();
    assert_eq!(v["cardinalities"]["nilcomplete"], 81);
}

#[test]
fn growth_csv_rows() {
    let (out, _, code) = run(&["grow", "-g", "cyclic:12", "--format", "csv"]);
    assert_eq!(code, EXIT_OK);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "n,sphere,ball,ratio_2n1,ratio_5n");
    assert_eq!(lines.len(), 8);
    assert!(lines[7].starts_with("6,1,12"));
}

#[test]
fn falsified_inequality_never_exits_zero() {
    let (out, err, code) = run(&[
        "verify",
        "spectral",
        "-g",
        "heis:3",
        "--falsify",
        "--format",
        "json",
    ]);
    assert_eq!(code, EXIT_FAILED);
    assert!(err.contains("check failed"));
    let v = parse_json(&out).unwrap();
    assert_eq!(v["holds"], false);
    assert!(!v["failures"].as_array().unwrap().is_empty());
}

#[test]
fn usage_and_refusal_codes() {
    assert_eq!(run(&["diam"]).2, EXIT_USAGE);
    assert_eq!(run(&["diam", "-g", "heis:6"]).2, EXIT_USAGE);
    assert_eq!(run(&["mix", "-g", "cyclic:8", "--p", "3"]).2, EXIT_USAGE);
    assert_eq!(run(&["grow", "-g", "freenil:r=2,s=2"]).2, EXIT_USAGE);
    assert_eq!(run(&["diam", "-g", "lamplighter:40"]).2, EXIT_REFUSED);
    let (_, err, _) = run(&["diam", "-g", "lamplighter:40"]);
    assert_eq!(parse_json(&err).unwrap()["exit_code"], EXIT_REFUSED);
    assert_eq!(run(&["--help"]).2, EXIT_OK);
}

#[test]
fn every_verb_runs() {
    for args in [
        vec!["grow", "-g", "freenil:r=2,s=2", "-r", "3"],
        vec!["spectrum", "-g", "lamplighter:3", "--solver", "iterative"],
        vec!["cheeger", "-g", "cyclic:16"],
        vec!["mix", "-g", "cyclic:16", "--p", "inf", "--format", "csv"],
        vec!["nilprog", "basis", "-r", "2", "-s", "3"],
        vec!["nilprog", "gen", "-r", "2", "-s", "2"],
        vec![
            "nilprog",
            "enum",
            "-r",
            "2",
            "-s",
            "2",
            "-L",
            "2,1",
            "--kind",
            "nilcomplete",
        ],
        vec!["nilprog", "proper", "-r", "2", "-s", "2", "-L", "2,3"],
        vec!["nilprog", "powers", "-r", "2", "-s", "2", "-L", "1,1"],
        vec!["zoo", "list"],
        vec!["zoo", "lgg", "-n", "3", "-p", "5"],
        vec!["verify", "growth", "-g", "heis:7"],
        vec!["verify", "nesting", "-r", "2", "-s", "2", "-L", "1,1"],
        vec!["verify", "powers", "-r", "2", "-s", "2", "-L", "1,1"],
        vec!["verify", "mixing", "-g", "lamplighter:4"],
        vec!["verify", "lgg", "-n", "3", "-p", "5"],
        vec!["verify", "commdepth", "-p", "11"],
    ] {
        let (out, err, code) = run(&args);
        assert_eq!(code, EXIT_OK, "{args:?}: {err}");
        assert!(!out.is_empty());
    }
}

#[test]
fn reports_are_byte_stable_across_workers() {
    let dir = std::env::temp_dir().join(format!("cayley-lab-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let mut files = Vec::new();
    for w in ["1", "2", "8"] {
        let path = dir.join(format!("w{w}.json"));
        let p = path.to_str().unwrap();
        let (_, _, code) = run(&[
            "verify",
            "mixing",
            "-g",
            "heis:5",
            "--workers",
            w,
            "--format",
            "json",
            "-o",
            p,
        ]);
        assert_eq!(code, EXIT_OK);
        files.push(std::fs::read(&path).unwrap());
    }
    assert!(files.windows(2).all(|w| w[0] == w[1]));
    std::fs::remove_dir_all(&dir).unwrap();
}
