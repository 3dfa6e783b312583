use std::process::Command;

use gridstab::aut::engine_calls;
use gridstab_cli::{run, Outcome, EXIT_DISAGREEMENT, EXIT_ENGINE_LIMIT, EXIT_OK, EXIT_USAGE};
use serde_json::Value;

fn gs(args: &str) -> Outcome {
    run(std::iter::once("gridstab").chain(args.split_whitespace()))
}

fn json(out: &Outcome) -> Value {
    assert_eq!(out.code, EXIT_OK, "stderr: {}", out.stderr);
    serde_json::from_str(&out.stdout).expect("stdout is JSON")
}

#[test]
fn classify_tr_4_2_1() {
    let before = engine_calls();
    let v = json(&gs("classify tr 4 2 1"));
    assert_eq!(engine_calls(), before);
    assert_eq!(v["verdict"], "NontriviallyUnstable");
    assert_eq!(v["clause"], "Thm1.5(6)");
    assert_eq!((v["kind"].as_str(), v["m"].as_u64()), (Some("tr"), Some(4)));
}

#[test]
fn check_qd_2_8_2() {
    let before = engine_calls();
    let v = json(&gs("check qd 2 8 2"));
    assert!(engine_calls() > before);
    assert_eq!(v["verdict"], "TriviallyUnstable");
    assert_eq!(v["trivial_reason"], "Bipartite");
    assert!(v["aut_order"].is_string());
}

#[test]
fn bounds_are_usage_errors() {
    let out = gs("classify qd 2 0 0");
    assert_eq!(out.code, EXIT_USAGE);
    assert!(out.stderr.contains("n must be >= 2"), "{}", out.stderr);
    assert_eq!(out.stderr.lines().count(), 1);
    assert!(out.stdout.is_empty());
    for bad in [
        "classify qd 1 4 0",
        "classify tr 3 3",
        "classify val4 --moduli 8 -a 1",
        "classify val4 --moduli 8,2 -a 1 -b 2",
        "check",
        "sweep qd --max-m 1 --max-n 4 --out x.csv",
        "sweep val4 --out x.csv",
        "frobnicate",
    ] {
        assert_eq!(gs(bad).code, EXIT_USAGE, "{bad}");
    }
}

#[test]
fn classify_never_runs_the_engine_and_agrees_with_check() {
    let fixtures = [
        "qd 2 4 1", "qd 6 3 0", "qd 3 3 0", "qd 2 5 1", "qd 4 4 1", "qd 5 10 0",
        "tr 4 2 1", "tr 2 8 5", "tr 3 3 0", "tr 2 4 3", "tr 4 3 2", "tr 5 5 1",
    ];
    for f in fixtures {
        let before = engine_calls();
        let c = json(&gs(&format!("classify {f}")));
        assert_eq!(engine_calls(), before, "classify {f}");
        let k = json(&gs(&format!("check {f}")));
        assert!(engine_calls() > before, "check {f}");
        assert_eq!(c["verdict"], k["verdict"], "{f}");
        assert_eq!(c["trivial_reason"], k["trivial_reason"], "{f}");
    }
}

#[test]
fn group_subjects() {
    let v = json(&gs("classify val6 --moduli 12 -a 1 -b 4"));
    assert_eq!(v["clause"], "Thm4.1(4)");
    assert_eq!(v["group"], "Z_12");
    let v = json(&gs("check val6 --moduli 3,3 -a 1,0 -b 0,1"));
    assert_eq!(v["trivial_reason"], "TwinVertices");
    let v = json(&gs("classify val4 --moduli 8 -a 1 -b 2"));
    assert_eq!(v["clause"], "Thm3.1(1)");
}

#[test]
fn witness_maps_edges_to_edges() {
    let v = json(&gs("witness qd 2 4 1"));
    assert_eq!(v["verified"], true);
    assert_eq!(v["construction"], "Thm3.1(1)");
    let elements: Vec<String> = serde_json::from_value(v["elements"].clone()).unwrap();
    let s: Vec<String> = serde_json::from_value(v["connection_set"].clone()).unwrap();
    let map: Vec<usize> = serde_json::from_value(v["vertex_map"].clone()).unwrap();
    let z: u64 = v["shift"].as_str().unwrap().parse().unwrap();
    // Z_8 here, so elements are plain residues
    let n = elements.len() as u64;
    let s: Vec<u64> = s.iter().map(|x| x.parse().unwrap()).collect();
    let shifted: Vec<u64> = s.iter().map(|x| (x + z) % n).collect();
    for x in 0..n {
        for &d in &s {
            let y = (x + d) % n;
            let diff = (map[y as usize] as u64 + n - map[x as usize] as u64) % n;
            assert!(shifted.contains(&diff));
        }
    }
    let v = json(&gs("witness val6 --moduli 8 -a 1 -b 2"));
    assert_eq!(v["construction"], "shift-isomorphism");
    let none = gs("witness tr 3 3 0");
    assert_eq!((none.code, none.stdout.trim()), (EXIT_OK, "null"));
}

#[test]
fn export_and_check_graph6() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.g6");
    let out = gs(&format!("export qd 3 4 1 --out {}", path.display()));
    assert_eq!(out.code, EXIT_OK, "{}", out.stderr);
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.ends_with('\n') && text.lines().count() == 1);
    let from_file = json(&gs(&format!("check --graph6 {}", path.display())));
    let direct = json(&gs("check qd 3 4 1"));
    assert_eq!(from_file["verdict"], direct["verdict"]);
    assert_eq!(from_file["aut_order"], direct["aut_order"]);
    assert_eq!(from_file["vertices"], 12);

    let cover = dir.path().join("b.g6");
    assert_eq!(gs(&format!("export qd 3 4 1 --cover --out {}", cover.display())).code, EXIT_OK);
    let b = json(&gs(&format!("check --graph6 {}", cover.display())));
    assert_eq!(b["vertices"], 24);
    // Qd(3,4,1) is bipartite, so its cover splits in two
    assert_eq!(b["trivial_reason"], "Disconnected");
}

#[test]
fn sweep_reports_and_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("qd.csv");
    let out = gs(&format!("sweep qd --max-m 4 --max-n 4 --out {}", csv.display()));
    let summary = json(&out);
    assert_eq!(summary["disagreements"], 0);
    assert_eq!(summary["total"], 27);
    let text = std::fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("kind,m,n,r,vertices,aut_order,baut_order,oracle,predicted,clause,agrees\n"));
    assert_eq!(text.lines().count(), 28);

    let js = dir.path().join("z.json");
    let summary = json(&gs(&format!("sweep znxzk --format json --out {}", js.display())));
    assert_eq!(summary["disagreements"], 0);
    let report: Value = serde_json::from_slice(&std::fs::read(&js).unwrap()).unwrap();
    assert_eq!(report["rows"].as_array().unwrap().len(), summary["total"].as_u64().unwrap() as usize);

    let limited = gs(&format!("sweep qd --max-m 3 --max-n 3 --node-budget 1 --out {}", csv.display()));
    assert_eq!(limited.code, EXIT_ENGINE_LIMIT);

    // a doctored row kept by --resume is reported as a disagreement
    let csv2 = dir.path().join("doctored.csv");
    assert_eq!(gs(&format!("sweep qd --max-m 2 --max-n 3 --out {}", csv2.display())).code, EXIT_OK);
    let text = std::fs::read_to_string(&csv2).unwrap();
    let mut lines: Vec<String> = text.lines().map(str::to_string).collect();
    lines[1] = lines[1].replace(",true", ",false");
    lines.truncate(3);
    std::fs::write(&csv2, lines.join("\n") + "\n").unwrap();
    let out = gs(&format!("sweep qd --max-m 2 --max-n 3 --resume --out {}", csv2.display()));
    assert_eq!(out.code, EXIT_DISAGREEMENT, "{}", out.stderr);
    assert!(out.stderr.contains("qd:2,2,0"), "{}", out.stderr);
    assert_eq!(std::fs::read_to_string(&csv2).unwrap().lines().count(), 6);
}

#[test]
fn node_budget_env_in_the_binary() {
    let bin = env!("CARGO_BIN_EXE_gridstab");
    let out = Command::new(bin)
        .args(["check", "qd", "4", "4", "0"])
        .env("GRIDSTAB_NODE_BUDGET", "1")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(EXIT_ENGINE_LIMIT));
    assert!(out.stdout.is_empty());
    assert_eq!(String::from_utf8_lossy(&out.stderr).lines().count(), 1);
    let out = Command::new(bin)
        .args(["check", "qd", "4", "4", "0"])
        .env_remove("GRIDSTAB_NODE_BUDGET")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(EXIT_OK));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["aut_order"], "384");
}
