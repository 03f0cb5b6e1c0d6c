use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::{Command, Output};
use std::sync::atomic::{AtomicUsize, Ordering};

use workbench::cli::{gallery, run_source, tasks::Status, CliError};
use workbench::im::Probes;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_workbench"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn temp(name: &str, contents: &str) -> PathBuf {
    static N: AtomicUsize = AtomicUsize::new(0);
    let k = N.fetch_add(1, Ordering::SeqCst);
    let p = std::env::temp_dir().join(format!("workbench-{}-{k}-{name}", std::process::id()));
    std::fs::write(&p, contents).unwrap();
    p
}

fn so3() -> &'static str {
    gallery::source("so3star").unwrap()
}

/// The canonical triple with `l(dx1) = 2 dx1`, and no `expect-fail` to cover it.
fn so3_mutated() -> String {
    let src = so3().replacen("l dx1 = dx1", "l dx1 = 2*dx1", 1);
    assert_ne!(src, so3());
    src
}

#[test]
fn canonical_so3_file_passes() {
    let p = temp("so3_canonical.alg", so3());
    let o = run(&["run", p.to_str().unwrap(), "--task", "check-im CAN"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert!(stdout(&o).contains("task check-im CAN: pass"));
}

#[test]
fn rescaled_l_exits_4_and_names_im2() {
    let p = temp("so3_mutated.alg", &so3_mutated());
    let o = run(&["run", p.to_str().unwrap()]);
    assert_eq!(code(&o), 4);
    let out = stdout(&o);
    assert!(out.contains("task check-im CAN: fail"), "{out}");
    assert!(out.contains("  [IM2] a=dx2, b=dx3 => (1)*dx1"), "{out}");
    assert!(out.contains("  [IM4] a=dx1, b=dx2 => (-x3)"), "{out}");
}

#[test]
fn usage_errors_exit_1() {
    assert_eq!(code(&run(&["run", "/nonexistent/problem.alg"])), 1);
    assert_eq!(code(&run(&["run"])), 1);
    assert_eq!(code(&run(&["frobnicate"])), 1);
    assert_eq!(code(&run(&["run", "gallery:so3star", "--probes", "all"])), 1);
    assert_eq!(code(&run(&["run", "gallery:so3star", "--task", "no-such-task"])), 1);
    let o = run(&["gallery", "unknown"]);
    assert_eq!(code(&o), 1);
    for name in gallery::names() {
        assert!(stderr(&o).contains(name), "{}", stderr(&o));
    }
}

#[test]
fn parse_errors_exit_2_with_position() {
    let p = temp("bad.alg", "chart M vars x\nendo K on M = [[1, x +]]\n");
    let o = run(&["run", p.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("parse error at 2:"), "{}", stderr(&o));
    let p = temp("bad2.alg", "chart M vars x\nwhatever\n");
    let o = run(&["run", p.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("2:1"), "{}", stderr(&o));
}

#[test]
fn semantic_errors_exit_3() {
    let cases = [
        // unknown variable
        "chart M vars x\nendo K on M = [[z]]\n",
        // unknown reference in a task
        "chart M vars x\nalgebroid T = tangent M\ntask check-algebroid U\n",
        // degree mismatch: q-differentials need p = 0
        "chart M vars x y\nalgebroid T = tangent M\ntensor F on T type (p=1, q=0) { dx = x }\nim C = coboundary F on T\ntask qdiff-roundtrip C\n",
        // (1,1) tasks on a (0,1) triple
        "chart M vars x y\nalgebroid T = tangent M\ntensor F on T type (p=1, q=0) { dx = x }\nim C = coboundary F on T\ntask im11 C\n",
        // duplicate name
        "chart M vars x\nchart M vars y\n",
        // bracket value not linear in the frame
        "chart M vars x\nalgebroid A over M rank 2 frame e1 e2 { bracket [e1,e2] = e1*e2 }\n",
        // division by zero
        "chart M vars x\nendo K on M = [[1/(x-x)]]\n",
        // unknown task command
        "chart M vars x\nalgebroid T = tangent M\ntask frobnicate T\n",
    ];
    for src in cases {
        let p = temp("sem.alg", src);
        let o = run(&["run", p.to_str().unwrap()]);
        assert_eq!(code(&o), 3, "{src}\n{}", stderr(&o));
        assert!(stderr(&o).starts_with("error: line "), "{}", stderr(&o));
    }
}

#[test]
fn failed_check_exits_4() {
    let src = "chart M vars x y\nalgebroid A over M rank 2 frame e1 e2 {\n  anchor e1 = [1, 0]\n  bracket [e1,e2] = e1\n}\ntask check-algebroid A\n";
    let p = temp("fail.alg", src);
    let o = run(&["run", p.to_str().unwrap()]);
    assert_eq!(code(&o), 4);
    assert!(stdout(&o).contains("  [anchor] (e1, e2) => [1, 0]"), "{}", stdout(&o));
}

#[test]
fn unmet_expectation_fails() {
    let src = "chart M vars x\nalgebroid T = tangent M\ntask check-algebroid T expect-fail jacobi\n";
    let outcomes = run_source(src, None, Probes::Scaled).unwrap();
    assert_eq!(outcomes[0].status, Status::Fail);
    assert_eq!(outcomes[0].report.residuals[0].check, "expectation");
    let src = "chart R3 vars x1 x2 x3\nalgebroid B over R3 rank 3 frame e1 e2 e3 { anchor e3 = [x2, -x1, 0]; bracket [e1,e2] = x1*e3; bracket [e2,e3] = e1; bracket [e3,e1] = e2 }\ntask check-algebroid B expect-fail skew\n";
    let outcomes = run_source(src, None, Probes::Scaled).unwrap();
    assert_eq!(outcomes[0].status, Status::Fail);
    assert!(outcomes[0].report.first("expectation").unwrap().value.to_string().contains("skew"));
}

/// `task id -> set of (check, probe, value)` from the text report.
fn text_residuals(out: &str) -> BTreeMap<String, Vec<(String, String, String)>> {
    let mut map: BTreeMap<String, Vec<_>> = BTreeMap::new();
    let mut cur = None;
    for line in out.lines() {
        if let Some(rest) = line.strip_prefix("task ") {
            let id = rest.rsplit_once(": ").unwrap().0.to_string();
            map.entry(id.clone()).or_default();
            cur = Some(id);
        } else if let Some(rest) = line.strip_prefix("  [") {
            let (check, rest) = rest.split_once("] ").unwrap();
            let (probe, value) = rest.split_once(" => ").unwrap();
            map.get_mut(cur.as_ref().unwrap()).unwrap().push((check.into(), probe.into(), value.into()));
        }
    }
    map
}

fn json_residuals(v: &serde_json::Value) -> BTreeMap<String, Vec<(String, String, String)>> {
    let s = |x: &serde_json::Value| x.as_str().unwrap().to_string();
    v["tasks"]
        .as_array()
        .unwrap()
        .iter()
        .map(|t| {
            let rs = t["residuals"].as_array().unwrap().iter().map(|r| (s(&r["check"]), s(&r["probe"]), s(&r["value"]))).collect();
            (s(&t["task"]), rs)
        })
        .collect()
}

#[test]
fn json_and_text_carry_the_same_residuals() {
    for (name, src) in [("mutated", so3_mutated()), ("projection", gallery::source("projection-matched-pair").unwrap().to_string())] {
        let p = temp(&format!("{name}.alg"), &src);
        let j = temp(&format!("{name}.json"), "");
        let o = run(&["run", p.to_str().unwrap(), "--json", j.to_str().unwrap()]);
        let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&j).unwrap()).unwrap();
        let (from_text, from_json) = (text_residuals(&stdout(&o)), json_residuals(&v));
        assert_eq!(from_text, from_json);
        assert!(from_json.values().any(|r| !r.is_empty()));
        for t in v["tasks"].as_array().unwrap() {
            assert!(t["elapsed_ms"].is_u64());
            let st = t["status"].as_str().unwrap();
            assert!(["pass", "fail", "error"].contains(&st));
            if st == "fail" {
                assert!(!t["residuals"].as_array().unwrap().is_empty());
            }
        }
        let want = if name == "mutated" { "fail" } else { "pass" };
        assert_eq!(v["status"], want);
    }
}

#[test]
fn gallery_command_prints_and_emits() {
    let o = run(&["gallery", "list"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).lines().count(), gallery::ENTRIES.len());
    let o = run(&["gallery", "so3star"]);
    assert_eq!(stdout(&o), so3());
    let p = temp("emit.alg", "");
    let o = run(&["gallery", "tangent-plane", "--emit", p.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert_eq!(std::fs::read_to_string(&p).unwrap(), gallery::source("tangent-plane").unwrap());
}

#[test]
fn every_gallery_entry_passes_its_own_tasks() {
    for (name, _, _) in gallery::ENTRIES {
        let o = run(&["run", &format!("gallery:{name}")]);
        assert_eq!(code(&o), 0, "{name}:\n{}{}", stdout(&o), stderr(&o));
    }
}

#[test]
fn gallery_algebroids_have_the_expected_structure() {
    use workbench::cli::{dsl, resolve::Model};
    use workbench::kernel::{rf, RatFn};
    let m = Model::build(&dsl::parse(so3()).unwrap()).unwrap();
    let (s, so3) = (&m.algebroids["S"], &m.algebroids["SO3"]);
    assert_eq!(s.table, so3.table);
    assert_eq!(s.anchor, so3.anchor);
    let e3 = vec![RatFn::zero(), RatFn::zero(), RatFn::one()];
    assert_eq!(so3.table[0][1], e3);
    assert_eq!(so3.table[1][2][0], RatFn::one());
    assert_eq!(so3.table[2][0][1], RatFn::one());
    let bad = &m.algebroids["BAD"];
    assert_eq!(bad.table[0][1][2], rf("x1"));

    let m = Model::build(&dsl::parse(gallery::source("tangent-plane").unwrap()).unwrap()).unwrap();
    let t = &m.algebroids["T"];
    assert_eq!(t.anchor, workbench::geometry::Matrix::identity(2));
    assert!(t.table.iter().flatten().flatten().all(RatFn::is_zero));
}

#[test]
fn check_command() {
    let o = run(&["check", "(x^2 - 1)/(x - 1)"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).trim(), "x + 1");
    assert_eq!(code(&run(&["check", "x +"])), 2);
    assert_eq!(code(&run(&["check", "1/(y - y)"])), 3);
}

#[test]
fn task_filter_and_probe_sets() {
    let o = run(&["run", "gallery:so3star", "--task", "check-algebroid", "--probes", "frames"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).lines().filter(|l| l.starts_with("task ")).count(), 3);
    let frames = run_source(so3(), Some("check-im MUT"), Probes::Frames).unwrap();
    let scaled = run_source(so3(), Some("check-im MUT"), Probes::Scaled).unwrap();
    assert!(frames[0].report.residuals.len() < scaled[0].report.residuals.len());
    assert!(frames[0].report.fails("IM2") && !frames[0].report.fails("IM1"));
}

#[test]
fn report_order_follows_declaration_order() {
    let src = gallery::source("coboundary").unwrap();
    let ids: Vec<String> = run_source(src, None, Probes::Frames).unwrap().into_iter().map(|o| o.id).collect();
    assert_eq!(ids, ["CF", "CV", "CK", "CB", "CG", "CH", "CU"].map(|n| format!("check-im {n}")));
}

#[test]
fn dsl_shorthands_agree_with_explicit_bases() {
    let short = "chart M vars x y\nalgebroid A over M rank 2 frame e1 e2 { anchor e1 = [1, 0]; bracket [e2,e1] = x*e2 - e1 }\n";
    let long = "chart M vars x y\nalgebroid A over M rank 2 frame e1 e2 { anchor e1 = [1, 0]; bracket [e1,e2] = [1, -x] }\n";
    let build = |s: &str| workbench::cli::resolve::Model::build(&workbench::cli::dsl::parse(s).unwrap()).unwrap();
    assert_eq!(build(short).algebroids["A"].table, build(long).algebroids["A"].table);

    let a = "chart M vars x y\nalgebroid T = tangent M\nim I on T type (q=1, p=1) { l d_x = x*d_y; r dy = 2*dx - dy }\n";
    let b = "chart M vars x y\nalgebroid T = tangent M\nim I on T type (q=1, p=1) { l d_x : d_y = x; r dy : dx = 2; r dy : dy = -1 }\n";
    assert_eq!(build(a).ims["I"], build(b).ims["I"]);
    // swapping wedge factors flips the sign
    let c = "chart M vars x y\nalgebroid T = tangent M\ntensor W on T type (p=2, q=0) { dy^dx = x }\ntensor V on T type (p=2, q=0) { dx^dy = -x }\n";
    let m = build(c);
    assert_eq!(m.tensors["W"].1, m.tensors["V"].1);
}

#[test]
fn errors_carry_lines() {
    let err = run_source("chart M vars x\n\nendo K on M = [[y]]\n", None, Probes::Frames).unwrap_err();
    assert!(matches!(&err, CliError::Semantic { line: 3, msg } if msg.contains("unknown variable `y`")), "{err:?}");
    assert_eq!(err.exit_code(), 3);
}
