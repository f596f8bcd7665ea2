mod common;

use std::io::Write;
use std::process::{Command, Output, Stdio};

use debcheck_cli::JsonReport;

fn debcheck(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_debcheck")).args(args).output().unwrap()
}

fn debcheck_stdin(args: &[&str], input: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_debcheck"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn path(name: &str) -> String {
    common::fixture(name).display().to_string()
}

#[test]
fn versioned_repository_is_all_installable() {
    let out = debcheck(&[&path("versioned.Packages")]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "7 packages, 0 non-installable (0.00%), weather: clear\n");
}

#[test]
fn successes_only_lists_everything_installable() {
    let out = debcheck(&["--successes-only", &path("versioned.Packages")]);
    let lines: Vec<String> = stdout(&out).lines().map(String::from).collect();
    assert_eq!(lines[0], "a (= 1): OK");
    assert_eq!(lines.len(), 8);
}

#[test]
fn empty_input_reports_zero_packages() {
    let out = debcheck_stdin(&[], "");
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).starts_with("0 packages"));
}

#[test]
fn failures_set_exit_status_one() {
    let out = debcheck(&[&path("camping.Packages")]);
    assert_eq!(out.status.code(), Some(1));
    let text = stdout(&out);
    for broken in ["camping", "rails", "rdoc ", "rdoc1.8", "libgems-ruby1.8", "shoes"] {
        assert!(text.contains(broken), "{broken} missing from {text}");
    }
    assert!(!text.contains("libc6"));
    assert!(text.ends_with("8 packages, 6 non-installable (75.00%), weather: storm\n"));
}

#[test]
fn explanation_follows_the_chain() {
    let out = debcheck(&["--explain", "--check", "shoes=0.r396-4", &path("camping.Packages")]);
    assert_eq!(
        stdout(&out),
        "shoes (= 0.r396-4): FAILED\n\
         \x20 shoes (= 0.r396-4) depends on libgems-ruby1.8 {libgems-ruby1.8 (= 1.1.1-1)}\n\
         \x20 libgems-ruby1.8 (= 1.1.1-1) depends on rdoc1.8 {rdoc1.8 (= 1.8.7.22-1)}\n\
         \x20 rdoc1.8 (= 1.8.7.22-1) depends on ruby1.8 (>= 1.8.7.22-1) {NOT AVAILABLE}\n\
         1 packages, 1 non-installable (100.00%), weather: storm\n"
    );
}

#[test]
fn unknown_selector_is_an_input_error() {
    let out = debcheck(&["--check", "nonesuch", &path("versioned.Packages")]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown package nonesuch"));
}

#[test]
fn unreadable_input_is_an_input_error() {
    let out = debcheck(&["/nonexistent/Packages"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("cannot read"));
}

#[test]
fn bad_stanzas_warn_but_do_not_stop() {
    let input = "Package: ok\nVersion: 1\n\nPackage: bad\nDepends: x\n\nPackage: also\nVersion: 2\nDepends: ok\n";
    let out = debcheck_stdin(&[], input);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).starts_with("2 packages"));
    assert!(String::from_utf8_lossy(&out.stderr).contains("warning"));
}

#[test]
fn output_is_deterministic() {
    let args = ["--explain", "--format=json", &path("camping.Packages")];
    let (a, b) = (debcheck(&args), debcheck(&args));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn json_report_shape() {
    let out = debcheck(&["--format=json", &path("camping.Packages")]);
    let report: JsonReport = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!((report.total_packages, report.non_installable), (8, 6));
    assert_eq!(report.results.len(), 8);
    assert_eq!(report.architecture.as_deref(), Some("i386"));
    assert!(report.timings.is_none());
    let camping = report.results.iter().find(|r| r.package == "camping").unwrap();
    assert_eq!(camping.architecture.as_deref(), Some("all"));
    assert_eq!(camping.explanation.as_ref().unwrap()[0].len(), 4);

    let timed = debcheck(&["--format=json", "--timings", "--failures-only", &path("camping.Packages")]);
    let report: JsonReport = serde_json::from_slice(&timed.stdout).unwrap();
    assert!(report.timings.is_some());
    assert_eq!(report.results.len(), 6);
}

#[test]
fn expanded_dump_lists_versions() {
    let out = debcheck(&["--dump-expanded", &path("versioned.Packages")]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("Depends: b (= 3) | b (= 2), c (= 3) | d (= 3) | d (= 2)\n"), "{text}");
    assert!(text.contains("Conflicts: b (= 3), b (= 2)\n"), "{text}");
}

#[test]
fn dimacs_dump() {
    let out = debcheck(&["--dump-dimacs", &path("versioned.Packages")]);
    let text = stdout(&out);
    assert!(text.contains("c 1 a 1\n"));
    assert!(text.contains("p cnf 7 "));
    assert!(text.contains("-1 3 2 0\n") || text.contains("-1 2 3 0\n"), "{text}");
}

#[test]
fn conflicts_subcommand() {
    let out = debcheck(&[
        "conflicts",
        "--contents",
        &path("funnel.Contents"),
        "--packages",
        &path("funnel.Packages"),
    ]);
    assert_eq!(out.status.code(), Some(1));
    let text = stdout(&out);
    assert!(text.starts_with(
        "10 pairs share files\n3 not co-installable\n2 excused by Replaces\n5 candidates\n"
    ));
    // cand1 shares eight paths; five are shown.
    let block: Vec<&str> = text
        .lines()
        .skip_while(|l| *l != "cand1-left cand1-right")
        .skip(1)
        .take_while(|l| l.starts_with("  "))
        .collect();
    assert_eq!(block.len(), 6);
    assert_eq!(block[5], "  ... 3 more");

    let json = debcheck(&[
        "conflicts",
        "--format=json",
        "--contents",
        &path("funnel.Contents"),
        "--packages",
        &path("funnel.Packages"),
    ]);
    let value: serde_json::Value = serde_json::from_slice(&json.stdout).unwrap();
    assert_eq!(value["candidates"], 5);
    assert_eq!(value["pairs"].as_array().unwrap().len(), 10);
}

#[test]
fn aggregate_subcommand() {
    let dir = std::path::Path::new(env!("CARGO_TARGET_TMPDIR")).join("aggregate");
    std::fs::create_dir_all(&dir).unwrap();
    let i386 = dir.join("i386.json");
    let out = debcheck(&["--format=json", &path("camping.Packages")]);
    std::fs::write(&i386, &out.stdout).unwrap();
    let amd64 = dir.join("amd64.json");
    let text = common::read_fixture("camping.Packages")
        .replace("Architecture: i386", "Architecture: amd64")
        .replace("Depends: ruby1.8 (>= 1.8.7.22-1)", "Depends: ruby1.8");
    let out = debcheck_stdin(&["--format=json"], &text);
    std::fs::write(&amd64, &out.stdout).unwrap();

    let out = debcheck(&["aggregate", i386.to_str().unwrap(), amd64.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "i386: 6 (2)\namd64: 0 (0)\nsome: 6 (2)\nevery: 0 (0)\n");

    let out = debcheck(&["aggregate", "--format=json", i386.to_str().unwrap(), i386.to_str().unwrap()]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["every"]["broken"], 6);
}
