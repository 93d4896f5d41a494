use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

const CANONICAL: &str = include_str!("../data/canonical.json");

fn dnadm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dnadm"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write_problem(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

fn out_dir(dir: &TempDir, name: &str) -> String {
    dir.path().join(name).to_str().unwrap().to_string()
}

#[test]
fn fixture_fasta_carries_published_option_strand() {
    let dir = TempDir::new().unwrap();
    let input = write_problem(dir.path(), "p.json", CANONICAL);
    let out = out_dir(&dir, "out");
    let o = dnadm(&["compile", "--input", &input, "--fixture", "--out", &out]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let fasta = fs::read_to_string(Path::new(&out).join("strands.fasta")).unwrap();
    let lines: Vec<&str> = fasta.lines().collect();
    let k = lines.iter().position(|l| *l == ">O_1").expect("O_1 record");
    assert_eq!(lines[k + 1], "TCTGACTCAGCTGAGATCCA");
    assert!(stdout(&o).contains(" warning(s)"));
    assert!(!stdout(&o).contains(", 0 warning(s)"));
    assert!(stderr(&o).contains("warning: SiteCount"));
    assert!(Path::new(&out).join("plan.txt").exists());
    assert!(Path::new(&out).join("protocol.txt").exists());
}

#[test]
fn generated_compile_has_no_warnings() {
    let dir = TempDir::new().unwrap();
    let out = out_dir(&dir, "out");
    let o = dnadm(&["compile", "--out", &out]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("compiled 3 options x 3 outcomes, 0 warning(s)"));
    let protocol = fs::read_to_string(Path::new(&out).join("protocol.txt")).unwrap();
    assert!(protocol.contains("PCR, 5 cycles"));
}

#[test]
fn malformed_probability_names_the_field() {
    let dir = TempDir::new().unwrap();
    let input = write_problem(dir.path(), "bad.json", &CANONICAL.replace("\"4/9\"", "\"4/0\""));
    let o = dnadm(&["compile", "--input", &input, "--out", &out_dir(&dir, "out")]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("line 3: outcomes[0].probability"), "{}", stderr(&o));
}

#[test]
fn too_many_options_exhaust_the_library() {
    let dir = TempDir::new().unwrap();
    let text = CANONICAL.replace(
        "{\"label\": \"option 3\", \"favorable\": [\"B\", \"W\"]}",
        "{\"label\": \"option 3\", \"favorable\": [\"B\", \"W\"]},\n    {\"label\": \"option 4\", \"favorable\": [\"R\"]}",
    );
    let input = write_problem(dir.path(), "four.json", &text);
    let o = dnadm(&["compile", "--input", &input, "--out", &out_dir(&dir, "out")]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).to_lowercase().contains("library"), "{}", stderr(&o));
    let o = dnadm(&["run", "--input", &input, "--library", "extended", "--out", &out_dir(&dir, "ext")]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
}

#[test]
fn canonical_run_chooses_option_one() {
    let dir = TempDir::new().unwrap();
    let out = out_dir(&dir, "out");
    let o = dnadm(&["run", "--out", &out, "--format", "tsv,text,svg"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("chosen: option 1; oracle: option 1; agree"));
    let tsv = fs::read_to_string(Path::new(&out).join("bands.tsv")).unwrap();
    assert!(tsv.contains("1\t147\t4\t"));
    assert!(tsv.contains("3\t174\t2\t"));
    let svg = fs::read_to_string(Path::new(&out).join("gel.svg")).unwrap();
    assert_eq!(svg.matches("class=\"band\"").count(), 6);
}

#[test]
fn uniform_probabilities_tie() {
    let dir = TempDir::new().unwrap();
    let input = write_problem(dir.path(), "uniform.json", &CANONICAL.replace("\"4/9\"", "\"1/3\"").replace("\"3/9\"", "\"1/3\"").replace("\"2/9\"", "\"1/3\""));
    let o = dnadm(&["run", "--input", &input, "--out", &out_dir(&dir, "out")]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("chosen: option 1, option 2, option 3; oracle: option 1, option 2, option 3; agree"));
}

#[test]
fn zero_cycles_pick_the_same_option() {
    let dir = TempDir::new().unwrap();
    let a = dnadm(&["run", "--cycles", "0", "--out", &out_dir(&dir, "a")]);
    let b = dnadm(&["run", "--cycles", "5", "--out", &out_dir(&dir, "b")]);
    assert_eq!(a.status.code(), Some(0));
    let last = |o: &Output| stdout(o).lines().last().unwrap().to_string();
    assert_eq!(last(&a), last(&b));
}

#[test]
fn negative_cycles_are_rejected() {
    let dir = TempDir::new().unwrap();
    let o = dnadm(&["run", "--cycles", "-1", "--out", &out_dir(&dir, "out")]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn fixture_run_falls_back_with_a_warning() {
    let dir = TempDir::new().unwrap();
    let o = dnadm(&["run", "--fixture", "--out", &out_dir(&dir, "out")]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stderr(&o).contains("warning: fixture sequences"));
    assert!(stdout(&o).contains("agree"));
}

#[test]
fn runs_are_deterministic() {
    let dir = TempDir::new().unwrap();
    for name in ["a", "b"] {
        let o = dnadm(&["run", "--seed", "11", "--out", &out_dir(&dir, name), "--format", "fasta,tsv,text,svg"]);
        assert_eq!(o.status.code(), Some(0));
    }
    for file in ["bands.tsv", "report.txt", "gel.txt", "gel.svg", "audit.json", "strands.fasta"] {
        let a = fs::read(dir.path().join("a").join(file)).unwrap();
        let b = fs::read(dir.path().join("b").join(file)).unwrap();
        assert_eq!(a, b, "{file}");
    }
}

#[test]
fn verify_default_count_passes() {
    let o = dnadm(&["verify"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("verify: 200/200 agree, 0 failed"));
}

#[test]
fn verify_zero_is_vacuous() {
    let o = dnadm(&["verify", "--count", "0"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("0/0"));
}

#[test]
fn verify_is_deterministic() {
    let a = dnadm(&["verify", "--count", "20", "--seed", "3"]);
    let b = dnadm(&["verify", "--count", "20", "--seed", "3"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(dnadm(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(dnadm(&["run", "--format", "pdf"]).status.code(), Some(1));
    assert_eq!(dnadm(&["--help"]).status.code(), Some(0));
}
