use std::io::Write as _;
use std::process::{Command, Output};

fn ssg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ssg"))
        .args(args)
        .env("SSG_COLOR", "0")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn temp_file(contents: &str) -> tempfile::NamedTempFile {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    f.write_all(contents.as_bytes()).unwrap();
    f
}

const REMARK: &str = "\
rn h over reflection
row 0 -> 01 act a
row 10 -> 00 act id
row 11 -> 1 act id
";

#[test]
fn nucleus_lists_elements() {
    let o = ssg(&["nucleus", "grigorchuk"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.starts_with("nucleus of grigorchuk (5 elements"));
    for name in ["id", "a", "b", "c", "d"] {
        assert!(out.lines().any(|l| l == name), "{out}");
    }
}

#[test]
fn nucleus_bounds_exit_code() {
    let lamplighter = temp_file(
        "group lamplighter\nalphabet 2\nstate a perm 1 0 -> b a\nstate b perm 0 1 -> b a\n",
    );
    let o = ssg(&[
        "nucleus",
        lamplighter.path().to_str().unwrap(),
        "--max-size",
        "20",
        "--max-depth",
        "20",
    ]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    assert!(stderr(&o).contains("not contracting"));
}

#[test]
fn group_file_parse_error_names_position() {
    let bad = temp_file("group g\nalphabet 2\nstate a perm 1 1 -> id id\n");
    let o = ssg(&["wp", bad.path().to_str().unwrap(), "a"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("line 3"), "{}", stderr(&o));
}

#[test]
fn germ_of_file_element() {
    let h = temp_file(REMARK);
    let o = ssg(&["germ", "reflection", h.path().to_str().unwrap(), "(01)"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(
        stdout(&o).trim(),
        "germ(point=01(01), n=a, delta=1, depth=2)"
    );

    let o = ssg(&["--format", "json", "germ", "reflection", "id", "(01)"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["n"], "id");
    assert_eq!(v["delta"], 0);
}

#[test]
fn germ_not_stabilized_is_a_bounds_error() {
    let shift = temp_file("rn s over reflection\nrow 00 -> 00 act id\nrow 0100 -> 10 act id\nrow 0101 -> 01 act id\nrow 011 -> 110 act id\nrow 1 -> 111 act id\n");
    let o = ssg(&[
        "germ",
        "reflection",
        shift.path().to_str().unwrap(),
        "(01)",
        "--cap",
        "0",
    ]);
    assert_eq!(o.status.code(), Some(2), "{}{}", stdout(&o), stderr(&o));
}

#[test]
fn eval_inline_and_file() {
    assert_eq!(
        stdout(&ssg(&["eval", "odometer", "a", "(1)"])).trim(),
        "(0)"
    );
    let h = temp_file(REMARK);
    let o = ssg(&["eval", "reflection", h.path().to_str().unwrap(), "(01)"]);
    assert_eq!(stdout(&o).trim(), "(01)");
}

#[test]
fn phi_reports_e_prime() {
    let o = ssg(&["phi", "grigorchuk", "a", "(1)"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.starts_with("# E' = 1\n"), "{out}");
    assert!(out.contains("row 1 -> 1 act id"));
}

#[test]
fn verify_suites_pass_and_are_deterministic() {
    for suite in ["oligo", "germ", "stab", "laws"] {
        let a = ssg(&[
            "--format", "json", "verify", suite, "--cases", "12", "--seed", "9",
        ]);
        assert_eq!(a.status.code(), Some(0), "{suite}: {}", stdout(&a));
        let b = ssg(&[
            "--format", "json", "verify", suite, "--cases", "12", "--seed", "9",
        ]);
        assert_eq!(a.stdout, b.stdout);
        let v: serde_json::Value = serde_json::from_str(&stdout(&a)).unwrap();
        assert_eq!(v["suite"], suite);
        assert_eq!(v["exit_code"], 0);
    }
}

#[test]
fn verify_germ_reports_both_components() {
    let o = ssg(&["verify", "germ"]);
    assert!(
        stdout(&o).contains("nucleus components realized: {a, id}"),
        "{}",
        stdout(&o)
    );
}

#[test]
fn verify_oligo_on_a_chosen_group() {
    let o = ssg(&[
        "verify",
        "oligo",
        "--cases",
        "25",
        "--group",
        "gupta_sidki_3",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("group gupta_sidki_3"));
}

#[test]
fn color_only_when_requested() {
    let plain = ssg(&["verify", "laws", "--cases", "3"]);
    assert!(!stdout(&plain).contains('\x1b'));
    let colored = Command::new(env!("CARGO_BIN_EXE_ssg"))
        .args(["verify", "laws", "--cases", "3"])
        .env("SSG_COLOR", "1")
        .output()
        .unwrap();
    assert!(stdout(&colored).contains("\x1b[32m"));
}
