mod common;

use std::fs;
use std::process::Command;

use common::*;
use ctl_infer::checker::holds;
use ctl_infer::ctl::enf;
use ctl_infer::{parse_kripke, print_kripke, KripkeStructure};

fn load(name: &str) -> KripkeStructure {
    parse_kripke(&fs::read_to_string(fixture(name)).unwrap()).unwrap()
}

fn cases() -> Vec<(String, String, bool)> {
    fs::read_to_string(fixture("formulas.txt"))
        .unwrap()
        .lines()
        .filter(|l| !l.trim().is_empty() && !l.starts_with('#'))
        .map(|l| {
            let parts: Vec<&str> = l.split(" ; ").collect();
            assert_eq!(parts.len(), 3, "{l}");
            (
                parts[0].to_string(),
                parts[1].to_string(),
                parts[2] == "holds",
            )
        })
        .collect()
}

#[test]
fn corpus_is_large_enough() {
    let models = fs::read_dir(fixture(""))
        .unwrap()
        .filter(|e| {
            e.as_ref()
                .unwrap()
                .path()
                .extension()
                .is_some_and(|x| x == "kripke")
        })
        .count();
    assert!(models >= 10);
    assert!(cases().len() >= 20);
}

#[test]
fn every_fixture_round_trips() {
    for entry in fs::read_dir(fixture("")).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_none_or(|x| x != "kripke") {
            continue;
        }
        let m = parse_kripke(&fs::read_to_string(&path).unwrap()).unwrap();
        let text = print_kripke(&m);
        let back = parse_kripke(&text).unwrap();
        assert_eq!(back, m, "{}", path.display());
        assert_eq!(print_kripke(&back), text);
    }
}

#[test]
fn formula_verdicts() {
    for (model, formula, expected) in cases() {
        let m = load(&model);
        let f = parse(&formula);
        assert_eq!(holds(&m, &f).unwrap(), expected, "{model}: {formula}");
        assert_eq!(
            holds(&m, &enf(&f)).unwrap(),
            expected,
            "{model}: enf of {formula}"
        );
        assert_eq!(
            naive_holds(&m, &enf(&f)),
            expected,
            "{model}: oracle on {formula}"
        );
    }
}

#[test]
fn verdicts_through_the_binary() {
    for (model, formula, expected) in cases() {
        let out = Command::new(env!("CARGO_BIN_EXE_ctl-infer"))
            .arg("check")
            .arg(fixture(&model))
            .arg(&formula)
            .output()
            .unwrap();
        let stdout = String::from_utf8(out.stdout).unwrap();
        let want = if expected {
            "result: holds"
        } else {
            "result: fails"
        };
        assert_eq!(stdout.lines().last(), Some(want), "{model}: {formula}");
        assert_eq!(out.status.code(), Some(if expected { 0 } else { 1 }));
    }
}
