use std::path::Path;
use std::process::Command;

use grds::Topology;
use grds_cli::{preset, run_experiment, ExperimentConfig};

fn quick(topology: Topology) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::new("quick", topology, 3, 4);
    cfg.optimizer.iterations = 200;
    cfg
}

fn read_dir_sorted(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (
                e.file_name().to_string_lossy().into_owned(),
                std::fs::read(e.path()).unwrap(),
            )
        })
        .collect();
    files.sort();
    files
}

#[test]
fn identical_configs_give_identical_files() {
    let cfg = quick(Topology::small_world_default());
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    run_experiment(&cfg)
        .unwrap()
        .write_outputs(a.path())
        .unwrap();
    run_experiment(&cfg)
        .unwrap()
        .write_outputs(b.path())
        .unwrap();
    let fa = read_dir_sorted(a.path());
    let fb = read_dir_sorted(b.path());
    let names: Vec<&str> = fa.iter().map(|f| f.0.as_str()).collect();
    for expected in [
        "report.csv",
        "report.json",
        "spectrum.csv",
        "trace_sigma0.csv",
        "trace_q_greedy.csv",
        "residual_eta_extended.csv",
        "optimizer_trace.csv",
        "optimizer_q.csv",
    ] {
        assert!(names.contains(&expected), "missing {expected}");
    }
    assert_eq!(fa, fb);

    let other = run_experiment(&cfg.clone().with_seed(99)).unwrap();
    let mut x = Vec::new();
    let mut y = Vec::new();
    run_experiment(&cfg)
        .unwrap()
        .write_report_csv(&mut x)
        .unwrap();
    other.write_report_csv(&mut y).unwrap();
    assert_ne!(x, y);
}

#[test]
fn extended_rows_never_worse_than_classic() {
    let mut graphs = vec![
        Topology::small_world_default(),
        Topology::Friendship { k: 4 },
        Topology::Path { n: 6 },
        Topology::Star { n: 7 },
        Topology::Circulant {
            n: 16,
            offsets: vec![1, 3],
        },
    ];
    graphs.push(Topology::RandomRegular {
        n: 12,
        c: 3,
        seed: 2,
    });
    for t in graphs {
        let r = run_experiment(&quick(t.clone())).unwrap();
        for family in ["eta", "rho"] {
            let c = r.row(&format!("{family}_classic")).unwrap().cri;
            let e = r.row(&format!("{family}_extended")).unwrap().cri;
            assert!(e <= c + 1e-12, "{t} {family}: {e} > {c}");
        }
    }
}

#[test]
fn report_is_self_consistent() {
    for name in ["friendship19", "smallworld22", "ramanujan16"] {
        let mut cfg = preset(name).unwrap();
        cfg.optimizer.iterations = 300;
        let r = run_experiment(&cfg).unwrap();
        assert_eq!(r.rows.len(), 8);
        assert!(r.bounds.is_some());
        for row in &r.rows {
            assert!((0.0..=1.0).contains(&row.cri), "{name} {}", row.label);
            if row.converged {
                assert!(row.relative_diff_error <= 1e-6);
                assert_eq!(row.rate_matches_cri(), Some(true), "{name} {}", row.label);
            }
        }
        let json: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(json["rows"].as_array().unwrap().len(), 8);
        assert!(json["spectral"]["mu"].is_number());
    }
}

#[test]
fn two_nodes_oscillate_without_regularization() {
    let r = run_experiment(&quick(Topology::Complete { n: 2 })).unwrap();
    assert!(r.spectral.bipartite);
    let s0 = r.row("sigma0").unwrap();
    assert!(!s0.converged && !s0.spectral_convergent);
    assert!(r.row("q_random").unwrap().converged);
    assert!(r.row("q_greedy").unwrap().converged);
}

fn grds() -> Command {
    Command::new(env!("CARGO_BIN_EXE_grds"))
}

#[test]
fn binary_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("exp.toml");
    std::fs::write(
        &cfg,
        "topology = \"cycle:5\"\nmeasurement_seed = 1\noptimizer_seed = 1\noptimizer_iterations = 20\n",
    )
    .unwrap();
    let out = dir.path().join("out");
    let status = grds()
        .args([
            "run",
            cfg.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
            "--stride",
            "10",
        ])
        .output()
        .unwrap();
    assert!(
        status.status.success(),
        "{}",
        String::from_utf8_lossy(&status.stderr)
    );
    let report = std::fs::read_to_string(out.join("report.csv")).unwrap();
    assert_eq!(report.lines().count(), 9);

    std::fs::write(
        &cfg,
        "topology = \"cycle:5\"\nmeasurement_seed = 1\nbogus = 2\n",
    )
    .unwrap();
    let bad = grds()
        .args(["run", cfg.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("line 3"));

    let bad = grds().args(["preset", "torus"]).output().unwrap();
    assert_eq!(bad.status.code(), Some(2));

    let edges = dir.path().join("g.txt");
    std::fs::write(&edges, "n 4\n1 2\n3 4\n").unwrap();
    let bad = grds()
        .args(["spectral", edges.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));

    std::fs::write(&edges, "n 4\n1 2\n2 3\n3 4\n4 1\n").unwrap();
    let ok = grds()
        .args([
            "spectral",
            edges.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(ok.status.success());
    let json: serde_json::Value = serde_json::from_slice(&ok.stdout).unwrap();
    assert_eq!(json["spectral"]["bipartite"], true);
    assert!(out.join("laplacian_spectrum.csv").exists());
}

#[test]
fn edge_list_topology_in_config() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("g.txt"), "n 4\n1 2\n2 3\n3 4\n4 1\n1 3\n").unwrap();
    let cfg_path = dir.path().join("exp.toml");
    std::fs::write(
        &cfg_path,
        "edge_list = \"g.txt\"\nmeasurement_seed = 1\noptimizer_seed = 1\nschemes = [\"sigma0\", \"eta\"]\n",
    )
    .unwrap();
    let cfg = ExperimentConfig::load(&cfg_path).unwrap();
    let r = run_experiment(&cfg).unwrap();
    assert_eq!(r.nodes, 4);
    assert_eq!(r.edges, 5);
    assert_eq!(r.rows.len(), 3);
}
