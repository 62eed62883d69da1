//! Command-line interface contract: subcommands, flags, and exit codes
//! (0 success, 1 usage, 2 compile error, 3 simulation error).

use diamondc::cli::{run_cli, EXIT_COMPILE, EXIT_OK, EXIT_SIM, EXIT_USAGE};

fn args(list: &[&str]) -> Vec<String> {
    list.iter().map(|s| s.to_string()).collect()
}

fn tempdir() -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("diamondc-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn compile_simulate_pipeline() {
    let dir = tempdir();
    let circuit = dir.join("bell.dqc");
    let asm = dir.join("bell.dasm");
    let json = dir.join("bell.json");
    std::fs::write(
        &circuit,
        "qubits 2\ncreg a\ncreg b\ninit q1\nh q0\ncx q0 q1\nmeasure q0 -> a\nmeasure q1 -> b",
    )
    .unwrap();
    let code = run_cli(&args(&[
        "compile",
        circuit.to_str().unwrap(),
        "--topology",
        "nodes=1,per_node=2",
        "--out",
        asm.to_str().unwrap(),
    ]));
    assert_eq!(code, EXIT_OK);
    let text = std::fs::read_to_string(&asm).unwrap();
    assert!(text.contains("crot"));
    assert!(text.starts_with(".topology nodes=1,per_node=2"));

    let code = run_cli(&args(&[
        "simulate",
        asm.to_str().unwrap(),
        "--exact",
        "--noise",
        "p=0,t=inf",
        "--out",
        json.to_str().unwrap(),
    ]));
    assert_eq!(code, EXIT_OK);
    let parsed: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(parsed["exact"], true);
    assert!(parsed["paths"].as_array().unwrap().len() >= 2);
}

#[test]
fn compile_with_diagnostics_and_baseline_flags() {
    let dir = tempdir();
    let circuit = dir.join("small.dqc");
    std::fs::write(&circuit, "qubits 2\nh q1").unwrap();
    let out = dir.join("small.dasm");
    let code = run_cli(&args(&[
        "compile",
        circuit.to_str().unwrap(),
        "--topology",
        "nodes=1,per_node=2",
        "--no-diamond-opts",
        "--diagnostics",
        "--out",
        out.to_str().unwrap(),
    ]));
    assert_eq!(code, EXIT_OK);
    let text = std::fs::read_to_string(&out).unwrap();
    let first_ops: Vec<&str> = text
        .lines()
        .filter(|l| !l.starts_with('.'))
        .take(5)
        .map(|l| l.split_whitespace().next().unwrap())
        .collect();
    assert_eq!(
        first_ops,
        vec!["larmor_e", "rabi_e", "larmor_c", "rabi_c", "crc"]
    );
    assert!(text.trim_end().ends_with("crc q0"));
}

#[test]
fn tomography_flags_produce_loop() {
    let dir = tempdir();
    let circuit = dir.join("tomo.dqc");
    std::fs::write(&circuit, "qubits 2\ninit q0\nh q0").unwrap();
    let out = dir.join("tomo.dasm");
    let code = run_cli(&args(&[
        "compile",
        circuit.to_str().unwrap(),
        "--topology",
        "nodes=1,per_node=2",
        "--tomography",
        "10",
        "--measure",
        "q0",
        "--out",
        out.to_str().unwrap(),
    ]));
    assert_eq!(code, EXIT_OK);
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.contains("LDi 10 RepetitionAmount"));
    assert!(text.contains("ST MeasureResultRegister0"));
}

#[test]
fn tomography_without_measures_emits_loop_skeleton() {
    let dir = tempdir();
    let circuit = dir.join("empty.dqc");
    std::fs::write(&circuit, "qubits 1").unwrap();
    let out = dir.join("empty.dasm");
    let code = run_cli(&args(&[
        "compile",
        circuit.to_str().unwrap(),
        "--topology",
        "nodes=1,per_node=1",
        "--tomography",
        "10",
        "--out",
        out.to_str().unwrap(),
    ]));
    assert_eq!(code, EXIT_OK);
    let text = std::fs::read_to_string(&out).unwrap();
    let ops: Vec<&str> = text
        .lines()
        .filter(|l| !l.starts_with('.'))
        .map(|l| l.split_whitespace().next().unwrap())
        .collect();
    assert_eq!(
        ops,
        vec!["LDi", "LDi", "label", "ADDi", "BR"],
        "loop skeleton only"
    );
}

#[test]
fn topology_from_config_file() {
    let dir = tempdir();
    let conf = dir.join("nv.topology");
    std::fs::write(
        &conf,
        "# two-node testbed\nnum_nodes = 2\nqubits_per_node = 2\n",
    )
    .unwrap();
    let circuit = dir.join("t.dqc");
    std::fs::write(&circuit, "qubits 4\ncx q1 q3").unwrap();
    let out = dir.join("t.dasm");
    let code = run_cli(&args(&[
        "compile",
        circuit.to_str().unwrap(),
        "--topology",
        conf.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]));
    assert_eq!(code, EXIT_OK);
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.starts_with(".topology nodes=2,per_node=2"));
    assert!(text.contains("entangle q0 q2"));
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(run_cli(&args(&[])), EXIT_USAGE);
    assert_eq!(run_cli(&args(&["frobnicate"])), EXIT_USAGE);
    assert_eq!(run_cli(&args(&["compile"])), EXIT_USAGE);
    assert_eq!(
        run_cli(&args(&["experiment", "--name", "bogus"])),
        EXIT_USAGE
    );
    let dir = tempdir();
    let circuit = dir.join("u.dqc");
    std::fs::write(&circuit, "qubits 1\nh q0").unwrap();
    assert_eq!(
        run_cli(&args(&[
            "compile",
            circuit.to_str().unwrap(),
            "--topology",
            "nodes=0,per_node=1"
        ])),
        EXIT_USAGE
    );
}

#[test]
fn compile_errors_exit_two() {
    let dir = tempdir();
    let bad = dir.join("bad.dqc");
    std::fs::write(&bad, "qubits 1\nbadgate q0").unwrap();
    assert_eq!(
        run_cli(&args(&["compile", bad.to_str().unwrap()])),
        EXIT_COMPILE
    );

    // Unroutable: inter-node gate with an electron operand.
    let unroutable = dir.join("unroutable.dqc");
    std::fs::write(&unroutable, "qubits 4\ncx q0 q3").unwrap();
    assert_eq!(
        run_cli(&args(&[
            "compile",
            unroutable.to_str().unwrap(),
            "--topology",
            "nodes=2,per_node=2"
        ])),
        EXIT_COMPILE
    );

    // Malformed assembly.
    let badasm = dir.join("bad.dasm");
    std::fs::write(
        &badasm,
        ".topology nodes=1,per_node=1\nLDi 0 x\nBR x < 0 nowhere",
    )
    .unwrap();
    assert_eq!(
        run_cli(&args(&["simulate", badasm.to_str().unwrap()])),
        EXIT_COMPILE
    );
}

#[test]
fn simulation_errors_exit_three() {
    let dir = tempdir();
    // Exact-mode branch explosion: a loop of coin flips.
    let asm = dir.join("explode.dasm");
    std::fs::write(
        &asm,
        "\
.topology nodes=1,per_node=1
LDi 0 k
label top
inite q0
qgatee q0 y 1570796
meas q0 m
ADDi k 1
BR k < 64 top",
    )
    .unwrap();
    assert_eq!(
        run_cli(&args(&["simulate", asm.to_str().unwrap(), "--exact"])),
        EXIT_SIM
    );
}

#[test]
fn experiment_writes_csv_and_json() {
    let dir = tempdir();
    let base = dir.join("ghz");
    let code = run_cli(&args(&[
        "experiment",
        "--name",
        "ghz-swap",
        "--p-grid",
        "0,0.001",
        "--t-grid",
        "0.1",
        "--exact",
        "--out",
        base.to_str().unwrap(),
    ]));
    assert_eq!(code, EXIT_OK);
    let csv = std::fs::read_to_string(format!("{}.csv", base.display())).unwrap();
    assert!(csv.starts_with("p_depol,T_coh,variant,expectation,stderr,shots"));
    assert_eq!(csv.lines().count(), 5, "header plus 2 points x 2 variants");
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(format!("{}.json", base.display())).unwrap())
            .unwrap();
    assert_eq!(summary["experiment"], "ghz-swap");
    assert!(summary["duration_table_hash"].as_str().unwrap().len() == 16);
}
