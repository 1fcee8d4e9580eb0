use std::path::Path;
use std::process::Command;

use eeht::cli::{file_digest, main_with_args, read_index_file};
use eeht::datagen::{read_indices, read_matrix};
use eeht::IndexSet;

fn run(args: &[&str]) -> i32 {
    main_with_args(std::iter::once("eeht").chain(args.iter().copied()))
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn synth(dir: &Path, d: &str, n: &str, r: &str, nu: &str, seed: &str) {
    assert_eq!(run(&["synth", "--d", d, "--n", n, "--r", r, "--nu", nu, "--seed", seed, "--out", s(dir)]), 0);
}

#[test]
fn synth_writes_every_file_and_is_deterministic() {
    let tmp = tempfile::tempdir().unwrap();
    let (a, b) = (tmp.path().join("t"), tmp.path().join("u"));
    synth(&a, "50", "500", "10", "0.1", "7");
    for f in ["A.dmat", "W.dmat", "H.dmat", "V.dmat", "pure.json", "manifest.json"] {
        assert!(a.join(f).exists(), "{f} missing");
    }
    synth(&b, "50", "500", "10", "0.1", "7");
    assert_eq!(file_digest(&a.join("A.dmat")).unwrap(), file_digest(&b.join("A.dmat")).unwrap());
    let m: serde_json::Value = serde_json::from_slice(&std::fs::read(a.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(m["command"], "synth");
    assert_eq!(m["seed"], 7);

    let z = tmp.path().join("z");
    synth(&z, "8", "20", "3", "0", "1");
    assert_eq!(read_matrix(z.join("V.dmat")).unwrap().max_abs(), 0.0);
}

#[test]
fn extract_eval_abundance_pipeline() {
    let tmp = tempfile::tempdir().unwrap();
    let t = tmp.path().join("t");
    synth(&t, "20", "120", "5", "0", "3");
    let pure = read_indices(t.join("pure.json")).unwrap();
    let input = t.join("A.dmat");
    for method in ["eeht-a", "eeht-b", "eeht-c", "spa"] {
        let out = tmp.path().join(format!("{method}.json"));
        assert_eq!(run(&["extract", "--input", s(&input), "--r", "5", "--method", method, "--out", s(&out)]), 0);
        let got = read_index_file(&out).unwrap();
        assert!(got.same_elements(&pure), "{method}: {got:?} vs {pure:?}");
        let v: serde_json::Value = serde_json::from_slice(&std::fs::read(&out).unwrap()).unwrap();
        if method == "spa" {
            assert!(v["objective"].is_null());
        } else {
            assert!(v["objective"].as_f64().unwrap().abs() < 1e-6);
            assert!(!v["trace"]["rounds"].as_array().unwrap().is_empty());
        }
        assert!(tmp.path().join(format!("{method}.json.manifest.json")).exists());
    }
    let out = tmp.path().join("big.json");
    assert_eq!(
        run(&["extract", "--input", s(&input), "--r", "5", "--method", "eeht-c", "--lambda", "50", "--mu", "300", "--out", s(&out)]),
        0
    );

    let report = tmp.path().join("report.csv");
    assert_eq!(run(&["eval", "--est", s(&t.join("pure.json")), "--input", s(&input), "--refs", s(&t.join("W.dmat")), "--out", s(&report)]), 0);
    let text = std::fs::read_to_string(&report).unwrap();
    assert_eq!(text.lines().count(), 7);
    for line in text.lines().skip(1) {
        assert_eq!(line.rsplit(',').next().unwrap().parse::<f64>().unwrap(), 0.0, "{line}");
    }

    let h = tmp.path().join("H.dmat");
    let maps = tmp.path().join("maps");
    assert_eq!(
        run(&["abundance", "--input", s(&input), "--indices", s(&t.join("pure.json")), "--width", "12", "--height", "10", "--out", s(&h), "--maps", s(&maps)]),
        0
    );
    let hm = read_matrix(&h).unwrap();
    for c in hm.columns() {
        assert!((c.iter().sum::<f64>() - 1.0).abs() < 1e-8);
    }
    for (k, j) in pure.iter().enumerate() {
        assert!((hm.get(k, j) - 1.0).abs() < 1e-8);
    }
    for k in 0..5 {
        let bytes = std::fs::read(maps.join(format!("endmember_{k}.pgm"))).unwrap();
        assert!(bytes.starts_with(b"P5\n12 10\n255\n"));
        assert_eq!(bytes.len(), b"P5\n12 10\n255\n".len() + 120);
    }
}

#[test]
fn density_outputs() {
    let tmp = tempfile::tempdir().unwrap();
    let t = tmp.path().join("t");
    synth(&t, "10", "60", "3", "0.05", "2");
    let (hist, keep) = (tmp.path().join("hist.csv"), tmp.path().join("kept.json"));
    let input = t.join("A.dmat");
    assert_eq!(run(&["density", "--input", s(&input), "--phi", "0.4", "--omega", "0", "--hist", s(&hist), "--keep", s(&keep)]), 0);
    assert_eq!(read_indices(&keep).unwrap(), IndexSet::full(60));
    let text = std::fs::read_to_string(&hist).unwrap();
    assert_eq!(text.lines().count(), 101);
    let total: usize = text.lines().skip(1).map(|l| l.rsplit(',').next().unwrap().parse::<usize>().unwrap()).sum();
    assert_eq!(total, 60);
}

#[test]
fn bench_has_one_row_per_size() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("timings.csv");
    assert_eq!(
        run(&["bench", "--sizes", "12,16", "--d", "6", "--r", "3", "--trials", "2", "--lambda", "2", "--mu", "2", "--out", s(&out)]),
        0
    );
    let text = std::fs::read_to_string(&out).unwrap();
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows.len(), 3);
    for row in &rows[1..] {
        let gap: f64 = row.rsplit(',').next().unwrap().parse().unwrap();
        assert!(gap <= 1e-6, "{row}");
    }
}

#[test]
fn exit_codes() {
    let bin = env!("CARGO_BIN_EXE_eeht");
    let tmp = tempfile::tempdir().unwrap();
    let code = |args: &[&str]| Command::new(bin).args(args).output().unwrap().status.code().unwrap();
    assert_eq!(code(&["synth", "--d", "5", "--n", "3", "--r", "9", "--out", s(tmp.path())]), 2);
    assert_eq!(code(&["synth", "--d", "five"]), 2);
    assert_eq!(code(&["no-such-command"]), 2);
    assert_eq!(code(&["extract", "--input", s(&tmp.path().join("missing.dmat")), "--r", "2", "--out", s(&tmp.path().join("o.json"))]), 1);
    assert_eq!(code(&["--help"]), 0);
}
