use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use opberg_core::{AlignmentResult, Alphabet, GapModel, OpbergParams, ScoringScheme};
use serde_json::Value;

fn opberg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_opberg")).args(args).output().unwrap()
}

fn stdout(out: &Output) -> String {
    assert!(out.status.success(), "exit {:?}: {}", out.status.code(), String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn align_json(args: &[&str]) -> AlignmentResult {
    let mut full = vec!["align"];
    full.extend_from_slice(args);
    serde_json::from_str(stdout(&opberg(&full)).trim()).unwrap()
}

fn tags(s: &str) -> Vec<&str> {
    s.split(',').filter(|t| !t.is_empty()).collect()
}

#[test]
fn sw_perfect_match() {
    let r = align_json(&["--mode", "sw", "--a", "A,B,C", "--b", "A,B,C", "--match", "2", "--mismatch", "-1"]);
    assert_eq!(r.total_score, 6);
    assert_eq!(r.k, 1);
    let s = &r.segments[0];
    assert_eq!((s.a_start, s.a_end, s.b_start, s.b_end), (1, 3, 1, 3));
}

#[test]
fn two_segment_report_reparses_and_verifies() {
    let (a, b) = ("A,A,C,C", "A,A,B,B,B,C,C");
    let r = align_json(&[
        "--mode",
        "opberg",
        "--a",
        a,
        "--b",
        b,
        "--gap-open",
        "0",
        "--gap-extend",
        "-1",
        "--jump-penalty",
        "-1",
        "--alpha",
        "inf",
        "--beta",
        "-inf",
        "--gamma",
        "identity",
    ]);
    assert_eq!((r.total_score, r.k), (7, 2));
    let spans: Vec<_> = r.segments.iter().map(|s| (s.a_start, s.a_end, s.b_start, s.b_end)).collect();
    assert_eq!(spans, [(1, 2, 1, 2), (3, 4, 6, 7)]);
    assert_eq!(r.breakpoints, [(2, 2), (3, 6), (4, 7)]);

    let mut abc = Alphabet::new();
    let (sa, sb) = (abc.intern(&tags(a)), abc.intern(&tags(b)));
    let params = OpbergParams::unconstrained(-1);
    r.verify(&sa, &sb, &ScoringScheme::uniform(2, -1), &GapModel::affine(0, -1), Some(&params)).unwrap();
}

#[test]
fn every_mode_emits_verifiable_reports() {
    let (a, b) = ("N,V,D,N,P,N,V", "D,N,V,N,P,D,N,N,V");
    let mut abc = Alphabet::new();
    let (sa, sb) = (abc.intern(&tags(a)), abc.intern(&tags(b)));
    let scheme = ScoringScheme::uniform(2, -1);
    for mode in ["sw", "naive", "opberg"] {
        let r = align_json(&["--mode", mode, "--a", a, "--b", b]);
        let gaps = if mode == "naive" { GapModel::linear(-1) } else { GapModel::default() };
        let params = (mode != "sw").then(OpbergParams::default);
        r.verify(&sa, &sb, &scheme, &gaps, params.as_ref()).unwrap_or_else(|e| panic!("{mode}: {e}"));
    }
}

#[test]
fn empty_sequence() {
    let r = align_json(&["--a", "A", "--b", ""]);
    assert_eq!((r.total_score, r.k), (0, 0));
    assert!(r.segments.is_empty());
}

#[test]
fn tsv_report() {
    let text = stdout(&opberg(&["align", "--mode", "sw", "--a", "A,B,C", "--b", "A,B,C", "--emit", "tsv"]));
    assert!(text.contains("total_score\t6\n"));
    assert!(text.contains("segment\t1\t3\t1\t3\t6\t6\tfresh\tfalse\t3M\n"));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(opberg(&["align", "--bogus"]).status.code(), Some(2));
    assert_eq!(opberg(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(opberg(&["align", "--mode", "nope", "--a", "A", "--b", "A"]).status.code(), Some(2));
}

#[test]
fn config_errors_exit_1() {
    assert_eq!(opberg(&["align", "--a", "A", "--b", "A", "--alpha", "-1"]).status.code(), Some(1));
    assert_eq!(opberg(&["align", "--a", "A", "--b", "A", "--jump-penalty", "inf"]).status.code(), Some(1));
}

#[test]
fn matrix_mismatch_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let m = dir.path().join("m.txt");
    std::fs::write(&m, "A B\nA 2 -1\nB -1 2\n").unwrap();
    let m = m.to_str().unwrap();
    let ok = align_json(&["--a", "A,B", "--b", "A,B", "--matrix", m]);
    assert_eq!(ok.total_score, 4);
    assert_eq!(opberg(&["align", "--a", "A,Z", "--b", "A", "--matrix", m]).status.code(), Some(1));
}

fn corpus(dir: &Path, name: &str, lines: &[(&str, Option<&str>, &str)]) -> PathBuf {
    let path = dir.join(name);
    let text: String = lines
        .iter()
        .map(|(id, label, pos)| {
            let pos: Vec<&str> = pos.split(' ').collect();
            let mut v = serde_json::json!({"id": id, "pos": pos});
            if let Some(l) = label {
                v["label"] = (*l).into();
            }
            v.to_string() + "\n"
        })
        .collect();
    std::fs::write(&path, text).unwrap();
    path
}

fn decisions(out: &str) -> Vec<(String, String)> {
    out.lines()
        .map(|l| {
            let v: Value = serde_json::from_str(l).unwrap();
            (v["id"].as_str().unwrap().to_owned(), v["label"].as_str().unwrap().to_owned())
        })
        .collect()
}

#[test]
fn align_by_record_id() {
    let dir = tempfile::tempdir().unwrap();
    let c = corpus(dir.path(), "c.jsonl", &[("x", None, "A B C"), ("y", None, "A B C")]);
    let r = align_json(&["--mode", "sw", "--input", c.to_str().unwrap(), "--a-id", "x", "--b-id", "y"]);
    assert_eq!(r.total_score, 6);
    assert_eq!(opberg(&["align", "--input", c.to_str().unwrap(), "--a-id", "x", "--b-id", "q"]).status.code(), Some(1));
}

/// Jumps disabled and thresholds open, so each similarity is the plain
/// local alignment score.
fn hand_flags<'a>() -> Vec<&'a str> {
    vec!["--jump-penalty", "-inf", "--alpha", "inf", "--beta", "-inf", "--gamma", "identity", "--normalize", "none"]
}

#[test]
fn hand_corpus_decisions() {
    let dir = tempfile::tempdir().unwrap();
    let train =
        corpus(dir.path(), "train.jsonl", &[("p1", Some("causal"), "A B C"), ("n1", Some("noncausal"), "D E F")]);
    let input = corpus(
        dir.path(),
        "input.jsonl",
        &[
            ("i1", None, "A B C"),       // pos 6, neg 0
            ("i2", None, "D E"),         // pos 0, neg 4
            ("i3", None, "A X"),         // pos 2, neg 0, clears 1
            ("i4", None, "X Y"),         // 0 = 0
            ("i5", None, "A B D E F"),   // pos 4 < neg 6
            ("i6", None, "A B C D E F"), // 6 = 6
        ],
    );
    let mut args =
        vec!["classify", "--train", train.to_str().unwrap(), "--input", input.to_str().unwrap(), "--delta", "1"];
    args.extend(hand_flags());
    let got = decisions(&stdout(&opberg(&args)));
    let want = [
        ("i1", "causal"),
        ("i2", "noncausal"),
        ("i3", "causal"),
        ("i4", "noncausal"),
        ("i5", "noncausal"),
        ("i6", "noncausal"),
    ];
    assert_eq!(got, want.map(|(a, b)| (a.to_owned(), b.to_owned())));

    // Raising the threshold above 2 turns i3 into an abstention.
    let mut args =
        vec!["classify", "--train", train.to_str().unwrap(), "--input", input.to_str().unwrap(), "--delta", "3"];
    args.extend(hand_flags());
    args.extend(["--abstain-as-negative", "false"]);
    let got = decisions(&stdout(&opberg(&args)));
    assert_eq!(got[2].1, "abstain");
    assert_eq!(got[0].1, "causal");
}

#[test]
fn classify_needs_both_classes() {
    let dir = tempfile::tempdir().unwrap();
    let train = corpus(dir.path(), "train.jsonl", &[("p1", Some("causal"), "A B C")]);
    let input = corpus(dir.path(), "input.jsonl", &[("i1", None, "A B C")]);
    let out = opberg(&["classify", "--train", train.to_str().unwrap(), "--input", input.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn eval_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let rows = [
        ("p1", Some("causal"), "NN VBZ NN"),
        ("p2", Some("causal"), "DT NN VBZ DT NN"),
        ("p3", Some("causal"), "NN VBD IN NN"),
        ("n1", Some("noncausal"), "DT JJ NN"),
        ("n2", Some("noncausal"), "PRP VBD RB"),
        ("n3", Some("noncausal"), "NN NN NN"),
    ];
    let train = corpus(dir.path(), "train.jsonl", &rows);
    let t = train.to_str().unwrap();
    let out = stdout(&opberg(&["eval", "--train", t, "--test", t, "--delta", "-inf"]));
    let m: Value = serde_json::from_str(out.trim()).unwrap();
    assert!(m["accuracy"].as_f64().unwrap() >= 0.5);
    assert_eq!(m["accuracy"].as_f64().unwrap(), 1.0);

    let table = stdout(&opberg(&["eval", "--train", t, "--test", t, "--delta", "-inf", "--emit", "tsv"]));
    assert!(table.contains("accuracy\t1.0000"));

    let far = corpus(dir.path(), "far.jsonl", &[("x1", Some("causal"), "UH SYM"), ("x2", Some("noncausal"), "LS UH")]);
    let out = stdout(&opberg(&["eval", "--train", t, "--test", far.to_str().unwrap(), "--delta", "0.5"]));
    let m: Value = serde_json::from_str(out.trim()).unwrap();
    assert_eq!(m["recall"].as_f64().unwrap(), 0.0);

    let empty = dir.path().join("empty.jsonl");
    std::fs::write(&empty, "").unwrap();
    assert_eq!(opberg(&["eval", "--train", t, "--test", empty.to_str().unwrap()]).status.code(), Some(1));
    let unlabeled = corpus(dir.path(), "u.jsonl", &[("u", None, "NN")]);
    assert_eq!(opberg(&["eval", "--train", t, "--test", unlabeled.to_str().unwrap()]).status.code(), Some(1));
}

#[test]
fn strict_mode_names_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let train = corpus(dir.path(), "train.jsonl", &[("p", Some("causal"), "A"), ("n", Some("noncausal"), "B")]);
    let bad = dir.path().join("bad.jsonl");
    std::fs::write(&bad, "{\"id\":\"a\",\"pos\":[\"A\"]}\n{\"id\":\"b\",\"tokens\":[\"x\"],\"pos\":[\"A\",\"B\"]}\n")
        .unwrap();
    let args = ["classify", "--train", train.to_str().unwrap(), "--input", bad.to_str().unwrap()];
    let lenient = stdout(&opberg(&args));
    assert_eq!(lenient.lines().count(), 1);
    let mut strict = args.to_vec();
    strict.push("--strict");
    let out = opberg(&strict);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains(":2"));
}

#[test]
fn bench_csv() {
    let text = stdout(&opberg(&["bench", "--modes", "naive,opberg", "--sizes", "16,32", "--seed", "3"]));
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "mode,n,wall_time,peak_bytes");
    assert_eq!(lines.len(), 5);
    let keys: Vec<String> = lines[1..].iter().map(|l| l.split(',').take(2).collect::<Vec<_>>().join(",")).collect();
    assert_eq!(keys, ["naive,16", "naive,32", "opberg,16", "opberg,32"]);
    for l in &lines[1..] {
        let peak: usize = l.rsplit(',').next().unwrap().parse().unwrap();
        assert!(peak > 0);
    }
}
