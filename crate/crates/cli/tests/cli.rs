//! End-to-end tests of the `episolve` binary: exit-code contract (0 =
//! decided either way, 2 = resource bound hit, 1 = bad invocation or
//! input), human-readable output shapes, and the JSON round trip — a
//! machine-readable witness must re-verify against an independently
//! recovered target structure.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use episolve::decide::{Answer, Verdict};
use episolve::linalg::vec_from_strings;
use episolve::vab::{ext_eval, ext_identity, vab_structure, ExtElement, StructureSearch,
    WordProblemConfig};
use episolve::words::Presentation;

fn fixtures() -> PathBuf {
    let dir = Path::new(env!("CARGO_TARGET_TMPDIR")).join("cli-fixtures");
    fs::create_dir_all(&dir).unwrap();
    let write = |name: &str, body: &str| fs::write(dir.join(name), body).unwrap();
    write("klein.pres", "gens: a, b\nrel: a b a b^-1\n");
    write("dinf.pres", "gens: s, t\nrel: s^2\nrel: t^2\n");
    write("z.pres", "gens: a\n");
    write("z2.pres", "gens: a, b\nrel: a b a^-1 b^-1\n");
    write("f2.pres", "gens: a, b\n");
    write("bad.pres", "gens a b\n");
    write(
        "z2.json",
        r#"{"elements":["0","1"],"identity":0,"table":[[0,1],[1,0]]}"#,
    );
    write(
        "matrix.json",
        r#"{"rows":2,"cols":2,"entries":[["4","2"],["2","8"]]}"#,
    );
    write(
        "odd.json",
        r#"{"ambient":2,"vectors":[["2","0"],["0","3"]],"offset":["0","0"]}"#,
    );
    write(
        "even.json",
        r#"{"ambient":2,"vectors":[["2","0"],["0","2"]],"offset":["0","0"]}"#,
    );
    dir
}

fn run(dir: &Path, args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_episolve"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs");
    (
        out.status.code().expect("no signal"),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

#[test]
fn parse_and_symmetrize_echo_the_presentation() {
    let dir = fixtures();
    let (code, stdout, _) = run(&dir, &["parse", "klein.pres"]);
    assert_eq!(code, 0);
    assert!(stdout.contains("gens: a, b"));
    assert!(stdout.contains("a b a b^-1"));
    assert!(stdout.contains("symmetric: false"));

    let (code, stdout, _) = run(&dir, &["symmetrize", "klein.pres"]);
    assert_eq!(code, 0);
    assert!(stdout.contains("gens: a_p, a_m, b_p, b_m"));
    assert!(stdout.contains("rel: a_p a_m"));
}

#[test]
fn abelianize_reports_rank_and_torsion() {
    let dir = fixtures();
    let (code, stdout, _) = run(&dir, &["abelianize", "klein.pres"]);
    assert_eq!(code, 0);
    assert!(stdout.contains("invariant factors: 2"));
    assert!(stdout.contains("free rank: 1"));
    assert!(stdout.contains("torsion: 2"));
}

#[test]
fn epis_and_kernel_enumerate_consistently() {
    let dir = fixtures();
    let (code, stdout, _) = run(&dir, &["epis", "klein.pres", "--finite", "z2.json"]);
    assert_eq!(code, 0);
    assert!(stdout.contains("3 epimorphisms"));

    let (code, stdout, _) = run(
        &dir,
        &["kernel", "klein.pres", "--finite", "z2.json", "--epi", "0"],
    );
    assert_eq!(code, 0);
    assert!(stdout.contains("kernel generators:"));
    assert!(stdout.contains("t1"));

    // An out-of-range index is an input error, not a mathematical "no".
    let (code, _, stderr) = run(
        &dir,
        &["kernel", "klein.pres", "--finite", "z2.json", "--epi", "99"],
    );
    assert_eq!(code, 1);
    assert!(stderr.contains("out of range"));
}

#[test]
fn snf_prints_invariant_factors() {
    let dir = fixtures();
    let (code, stdout, _) = run(&dir, &["snf", "matrix.json"]);
    assert_eq!(code, 0);
    assert!(stdout.contains("invariant factors: 2, 14"));
}

#[test]
fn colgen1d_answers_both_ways() {
    let dir = fixtures();
    let (code, stdout, _) = run(&dir, &["colgen1d", "odd.json"]);
    assert_eq!(code, 0);
    assert!(stdout.starts_with("yes"));
    let witness = stdout
        .lines()
        .find(|l| l.starts_with("witness: "))
        .expect("witness line");
    let entries: Vec<i64> = witness["witness: ".len()..]
        .split(", ")
        .map(|t| t.parse().unwrap())
        .collect();
    let gcd = entries.iter().fold(0i64, |acc, &e| {
        fn g(a: i64, b: i64) -> i64 {
            if b == 0 { a.abs() } else { g(b, a % b) }
        }
        g(acc, e)
    });
    assert_eq!(gcd, 1);

    // Every point of 2Z x 2Z has even coordinates.
    let (code, stdout, _) = run(&dir, &["colgen1d", "even.json"]);
    assert_eq!(code, 0);
    assert!(stdout.starts_with("no"));
}

#[test]
fn vab_structure_found_versus_bounds_exhausted() {
    let dir = fixtures();
    let (code, stdout, _) = run(&dir, &["vab-structure", "dinf.pres"]);
    assert_eq!(code, 0);
    assert!(stdout.contains("structure found"));
    assert!(stdout.contains("translation rank: 1"));
    assert!(stdout.contains("action[g1] = [[-1]]"));

    // A free group of rank two has no such structure; the search must
    // report that it ran out of bounds rather than inventing an answer.
    let (code, stdout, _) = run(&dir, &["vab-structure", "f2.pres", "--max-order", "2"]);
    assert_eq!(code, 2);
    assert!(stdout.contains("no structure found"));
}

#[test]
fn decide_prod_exit_zero_for_both_verdicts() {
    let dir = fixtures();
    let (code, stdout, _) = run(
        &dir,
        &["decide-prod", "klein.pres", "--d", "1", "--finite", "z2.json"],
    );
    assert_eq!(code, 0);
    assert!(stdout.contains("verdict: yes"));
    assert!(stdout.contains("witness:"));

    let (code, stdout, _) = run(
        &dir,
        &["decide-prod", "z.pres", "--d", "1", "--finite", "z2.json"],
    );
    assert_eq!(code, 0);
    assert!(stdout.contains("verdict: no"));
}

#[test]
fn decide_vz_exit_codes_cover_the_contract() {
    let dir = fixtures();
    // Decided yes.
    let (code, stdout, _) = run(&dir, &["decide-vz", "klein.pres", "--target", "dinf.pres"]);
    assert_eq!(code, 0);
    assert!(stdout.contains("verdict: yes"));

    // Decided no: an abelian group has no epimorphism onto the infinite
    // dihedral group.
    let (code, stdout, _) = run(&dir, &["decide-vz", "z2.pres", "--target", "dinf.pres"]);
    assert_eq!(code, 0);
    assert!(stdout.contains("verdict: no"));

    // Bounds exhausted on the target's structure: exit 2.
    let (code, _, _) = run(
        &dir,
        &["decide-vz", "f2.pres", "--target", "f2.pres", "--max-order", "2"],
    );
    assert_eq!(code, 2);

    // A rank-two target is outside this procedure: usage error.
    let (code, _, stderr) = run(&dir, &["decide-vz", "z.pres", "--target", "klein.pres"]);
    assert_eq!(code, 1);
    assert!(stderr.contains("rank"));
}

#[test]
fn bad_inputs_exit_one() {
    let dir = fixtures();
    let (code, _, stderr) = run(&dir, &["parse", "missing.pres"]);
    assert_eq!(code, 1);
    assert!(stderr.contains("cannot read"));

    let (code, _, stderr) = run(&dir, &["parse", "bad.pres"]);
    assert_eq!(code, 1);
    assert!(stderr.contains("cannot parse"));

    let (code, _, _) = run(&dir, &["frobnicate"]);
    assert_eq!(code, 1);

    let (code, _, _) = run(&dir, &["--help"]);
    assert_eq!(code, 0);
}

#[test]
fn json_witness_reverifies_against_recovered_structure() {
    let dir = fixtures();
    let (code, stdout, _) = run(
        &dir,
        &["decide-vz", "klein.pres", "--target", "dinf.pres", "--json"],
    );
    assert_eq!(code, 0);
    let answer: Answer = serde_json::from_str(&stdout).expect("well-formed answer JSON");
    assert_eq!(answer.verdict, Verdict::Yes);
    let witness = answer.witness.expect("yes carries a witness");

    // Recover the target's structure independently and replay the witness:
    // the assignment it describes must send every source relator to the
    // identity of the reconstructed extension.
    let source =
        Presentation::parse(&fs::read_to_string(dir.join("klein.pres")).unwrap()).unwrap();
    let target =
        Presentation::parse(&fs::read_to_string(dir.join("dinf.pres")).unwrap()).unwrap();
    let found = match vab_structure(&target, 24, &WordProblemConfig::default()) {
        StructureSearch::Found(s) => s,
        StructureSearch::NotFound { .. } => panic!("target structure must be recoverable"),
    };
    let data = &found.data;
    let images: Vec<ExtElement> = source
        .generators()
        .iter()
        .map(|g| {
            let t = &witness[g.as_str()];
            ExtElement {
                vec: vec_from_strings(&t.vec).unwrap(),
                fin: t.fin,
            }
        })
        .collect();
    for r in source.relators() {
        assert_eq!(
            ext_eval(data, &source, &images, r),
            ext_identity(data),
            "witness must satisfy relator {r}",
        );
    }
}
