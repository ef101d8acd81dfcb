//! Driving the command line in-process and round-tripping its JSON reports.

use cayley_lab::cli::run_captured;
use cayley_lab::report::parse_json;

fn main() {
    for argv in [
        vec!["cayley-lab", "diam", "-g", "cyclic:12"],
        vec!["cayley-lab", "grow", "-g", "cyclic:12", "--format", "csv"],
        vec![
            "cayley-lab",
            "spectrum",
            "-g",
            "cyclic:12",
            "--format",
            "json",
        ],
        vec!["cayley-lab", "nilprog", "basis", "-r", "2", "-s", "3"],
        vec![
            "cayley-lab",
            "verify",
            "spectral",
            "-g",
            "heis:3",
            "--format",
            "json",
        ],
        vec!["cayley-lab", "diam", "-g", "cyclic:0"],
    ] {
        let (out, err, code) = run_captured(argv.iter().copied());
        println!("$ {}   [exit {code}]", argv[1..].join(" "));
        print!("{out}{err}");
        if argv.contains(&"json") {
            let v = parse_json(&out).expect("valid JSON");
            println!(
                "  re-parsed {} top-level keys",
                v.as_object().map_or(0, |m| m.len())
            );
        }
    }
}
