use std::path::PathBuf;

use purity_lab_cli::fixtures::{E1, E2};
use purity_lab_cli::run_text;

const CASES: &[(&str, &str, &str, &[&str])] = &[
    ("eval_pp_z4", "eval-pp", "e1", &["E y: x1 = y*2", "M4"]),
    ("eval_pp_lattice", "eval-pp", "e1", &["tmult", "R2"]),
    ("pp_leq", "pp-leq", "e1", &["ann2", "twice"]),
    ("pptype_gen", "pptype-gen", "e1", &["M4", "2"]),
    ("chi_alpha", "chi-alpha", "e1", &["pi", "id4", "1"]),
    ("hom_lattice", "hom", "e1", &["Lambda", "R1"]),
    ("end_finite", "end", "e1", &["M42"]),
    ("endolength", "endolength", "e1", &["M42"]),
    ("ext1", "ext1", "e1", &["R1", "R2"]),
    ("iso", "iso", "e1", &["R1", "R2"]),
    ("indec", "indec", "e1", &["M42"]),
    ("reduce", "reduce", "e1", &["Lambda", "2"]),
    ("k0", "k0", "e1", &[]),
    ("maranda", "maranda-check", "e1", &[]),
    ("psel", "psel", "e1", &["R1", "2"]),
    ("interval", "interval-lattice", "e1", &["Lambda", "1"]),
    ("interp_validate", "interp-validate", "e1", &["F"]),
    ("interp_apply", "interp-apply", "e1", &["F", "Lambda"]),
    ("interp_full", "interp-full", "e1", &["F"]),
    ("interp_present", "interp-present", "e1", &["Red"]),
    ("rr_build_d", "rr-build-d", "e1", &[]),
    ("rr_apply", "rr-apply", "e1", &["L=Lambda"]),
    ("rr_ppspec", "rr-ppspec", "e1", &[]),
    ("rr_indclass", "rr-indclass", "e1", &[]),
    ("rr_realize", "rr-realize", "e1", &["index=3"]),
    ("ldim", "ldim", "e1", &["N5"]),
    ("mdim", "mdim", "e1", &["M3"]),
    ("breadth", "breadth", "e2", &["C3"]),
    ("ord_bounds", "ord-bounds", "", &["2", "0"]),
    ("zg_closure", "zg-closure", "e2", &["Tame", "E1[2..]"]),
    ("zg_closed", "zg-closed", "e2", &["Tame", "E1^"]),
    ("zg_barv", "zg-barv", "e2", &["Tame", "G(1)"]),
    ("zg_cbrank", "zg-cbrank", "e2", &["Tame", "all"]),
];

fn session(key: &str) -> Option<&'static str> {
    match key {
        "e1" => Some(E1),
        "e2" => Some(E2),
        _ => None,
    }
}

fn args(a: &[&str]) -> Vec<String> {
    a.iter().map(|s| s.to_string()).collect()
}

/// Outputs are compared with tests/golden/NAME.out; set UPDATE_GOLDEN=1 to rewrite them.
#[test]
fn golden_outputs() {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden");
    let update = std::env::var("UPDATE_GOLDEN").is_ok();
    let mut mismatches = Vec::new();
    for (name, cmd, sess, a) in CASES {
        let out = run_text(cmd, session(sess), &args(a));
        let text = format!("exit {}\n{}\n", out.code, out.text);
        let path = dir.join(format!("{name}.out"));
        if update {
            std::fs::write(&path, &text).unwrap();
            continue;
        }
        let want = std::fs::read_to_string(&path).unwrap_or_default();
        if want != text {
            mismatches.push(format!("{name}:\n--- want\n{want}--- got\n{text}"));
        }
    }
    assert!(mismatches.is_empty(), "{}", mismatches.join("\n"));
}

#[test]
fn output_is_deterministic() {
    for (_, cmd, sess, a) in CASES.iter().filter(|c| matches!(c.1, "maranda-check" | "rr-indclass" | "zg-cbrank")) {
        let x = run_text(cmd, session(sess), &args(a));
        let y = run_text(cmd, session(sess), &args(a));
        assert_eq!(x, y);
    }
}
