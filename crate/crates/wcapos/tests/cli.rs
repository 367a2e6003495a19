use std::path::PathBuf;
use std::process::{Command, Output};

fn data(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "data", name].iter().collect();
    p.display().to_string()
}

fn wcapos(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wcapos"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn rank_prints_score_table() {
    let o = wcapos(&[
        "rank",
        &data("watermelon.csv"),
        "--decision",
        "good",
        "--id",
        "id",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let rows: Vec<Vec<String>> = text
        .lines()
        .skip(1)
        .map(|l| l.split_whitespace().map(str::to_string).collect())
        .collect();
    assert_eq!(
        rows[0],
        ["clear", "0.125", "0.889", "0.141", "1.962", "0.877"]
    );
    assert_eq!(
        rows[5],
        ["hard", "slippery", "0.600", "0.500", "1.200", "0.182", "0.545"]
    );
}

#[test]
fn binarize_reports_extent_sizes() {
    let o = wcapos(&["binarize", &data("balloons.csv"), "--decision", "inflated"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let count = |attr: &str| {
        text.lines()
            .find(|l| l.starts_with(attr))
            .and_then(|l| l.split_whitespace().nth(2))
            .unwrap()
            .to_string()
    };
    assert_eq!(count("color_YELLOW"), "12");
    assert_eq!(count("size_LARGE"), "8");
    assert_eq!(count("act_STRETCH"), "10");
    assert_eq!(count("age_ADULT"), "10");
}

#[test]
fn binary_balloons_map_is_identity() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("ctx.csv");
    let o = wcapos(&[
        "binarize",
        &data("balloons_binary.csv"),
        "--decision",
        "inflated",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let report = stdout(&o);
    assert_eq!(report.matches("identity").count(), 4);
    for (attr, n) in [("yellow", 12), ("large", 8), ("stretch", 10), ("adult", 10)] {
        let line = report.lines().find(|l| l.starts_with(attr)).unwrap();
        assert_eq!(line.split_whitespace().nth(2).unwrap(), n.to_string());
    }
    let ctx = std::fs::read_to_string(out).unwrap();
    assert_eq!(
        ctx.lines().next().unwrap(),
        "object,yellow,large,stretch,adult,inflated"
    );
    assert_eq!(ctx.lines().count(), 21);
}

#[test]
fn build_writes_dot_and_json_then_predicts() {
    let dir = tempfile::tempdir().unwrap();
    let dot = dir.path().join("s.dot");
    let json = dir.path().join("s.json");
    let o = wcapos(&[
        "build",
        &data("balloons.csv"),
        "--decision",
        "inflated",
        "--dot",
        dot.to_str().unwrap(),
        "--json",
        json.to_str().unwrap(),
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    assert!(stdout(&o).contains("split on 'color_YELLOW'"));
    assert!(std::fs::read_to_string(&dot)
        .unwrap()
        .starts_with("digraph structure {"));

    let input = dir.path().join("rows.csv");
    std::fs::write(&input, "color,size,act,age\nYELLOW,SMALL,DIP,CHILD\nPURPLE,SMALL,STRETCH,ADULT\nYELLOW,LARGE,DIP,ADULT\n").unwrap();
    let o = wcapos(&[
        "predict",
        "--model",
        json.to_str().unwrap(),
        "--input",
        input.to_str().unwrap(),
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let labels: Vec<String> = stdout(&o)
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().to_string())
        .collect();
    assert_eq!(labels, ["1", "0", "0"]);
}

#[test]
fn cart_model_predicts_too() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("c.json");
    let o = wcapos(&[
        "build",
        &data("balloons.csv"),
        "--decision",
        "inflated",
        "--baseline",
        "cart",
        "--json",
        json.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(std::fs::read_to_string(&json)
        .unwrap()
        .contains("\"model\": \"cart\""));
    let input = dir.path().join("rows.csv");
    std::fs::write(
        &input,
        "color,size,act,age\nYELLOW,SMALL,DIP,CHILD\nPURPLE,LARGE,DIP,CHILD\n",
    )
    .unwrap();
    let o = wcapos(&[
        "predict",
        "--model",
        json.to_str().unwrap(),
        "--input",
        input.to_str().unwrap(),
    ]);
    let labels: Vec<String> = stdout(&o)
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().to_string())
        .collect();
    assert_eq!(labels, ["1", "0"]);
}

#[test]
fn stamp_only_when_asked() {
    let dir = tempfile::tempdir().unwrap();
    let plain = dir.path().join("a.json");
    let stamped = dir.path().join("b.json");
    for (path, stamp) in [(&plain, false), (&stamped, true)] {
        let mut args = vec![
            "build".to_string(),
            data("watermelon.csv"),
            "--decision".into(),
            "good".into(),
            "--id".into(),
            "id".into(),
            "--json".into(),
            path.display().to_string(),
        ];
        if stamp {
            args.push("--stamp".into());
        }
        let a: Vec<&str> = args.iter().map(String::as_str).collect();
        assert_eq!(wcapos(&a).status.code(), Some(0));
    }
    let a = std::fs::read_to_string(plain).unwrap();
    let b = std::fs::read_to_string(stamped).unwrap();
    assert!(!a.contains("stamp"));
    assert!(b.contains("\"stamp\""));
    let b_doc: serde_json::Value = serde_json::from_str(&b).unwrap();
    let mut a_doc: serde_json::Value = serde_json::from_str(&a).unwrap();
    a_doc["stamp"] = b_doc["stamp"].clone();
    assert_eq!(a_doc, b_doc);
}

#[test]
fn evaluate_writes_fold_traces() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("eval.json");
    let o = wcapos(&[
        "evaluate",
        &data("watermelon.csv"),
        "--decision",
        "good",
        "--id",
        "id",
        "--loocv",
        "--baseline",
        "cart",
        "--json",
        json.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(json).unwrap()).unwrap();
    for model in ["3wcapos", "cart"] {
        assert_eq!(doc[model]["folds"].as_array().unwrap().len(), 17);
        assert_eq!(doc[model]["protocol"], "loocv");
    }
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let one_row = dir.path().join("one.csv");
    std::fs::write(&one_row, "a,y\n1,1\n").unwrap();
    let o = wcapos(&["build", one_row.to_str().unwrap(), "--decision", "y"]);
    assert_eq!(o.status.code(), Some(2));

    let o = wcapos(&["rank", &data("watermelon.csv"), "--decision", "nope"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("unknown column"));

    let o = wcapos(&["rank", "/nonexistent/file.csv", "--decision", "y"]);
    assert_eq!(o.status.code(), Some(1));

    let o = wcapos(&[
        "build",
        &data("watermelon.csv"),
        "--decision",
        "good",
        "--alpha",
        "0.1",
        "--beta",
        "0.5",
    ]);
    assert_eq!(o.status.code(), Some(1));

    let o = wcapos(&["frobnicate"]);
    assert_eq!(o.status.code(), Some(1));

    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\"format\": 3}").unwrap();
    let o = wcapos(&[
        "predict",
        "--model",
        bad.to_str().unwrap(),
        "--input",
        &data("balloons.csv"),
    ]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn strict_purity_preset() {
    let o = wcapos(&[
        "build",
        &data("watermelon.csv"),
        "--decision",
        "good",
        "--id",
        "id",
        "--strict-purity",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    // the 8-object negative side now splits further
    assert!(text.contains("node 1: 8 objects, positive fraction 0.125, BOUNDARY; split on"));
}
