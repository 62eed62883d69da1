//! Command-line entry points: `compile`, `simulate`, `experiment`.
//!
//! Exit codes: 0 success, 1 usage error, 2 compile error, 3 simulation
//! error. Argument parsing is hand-rolled so the exit-code contract stays
//! exact.

use crate::circuit::parse_circuit;
use crate::codegen::{
    self, assemble, disassemble, emit, emit_repetition_loop, emit_tomography, TomographySpec,
};
use crate::experiments::{run_experiment, ExperimentName, ExperimentSpec};
use crate::passes::{compile, DiagnosticsConfig, PipelineConfig};
use crate::simulator::{run_with_options, DurationTable, NoiseParams, RunOptions};
use crate::topology::{QubitId, TopologyConfig};
use std::path::PathBuf;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_COMPILE: i32 = 2;
pub const EXIT_SIM: i32 = 3;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Compile(String),
    Sim(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Compile(_) => EXIT_COMPILE,
            CliError::Sim(_) => EXIT_SIM,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Compile(m) | CliError::Sim(m) => m,
        }
    }
}

const USAGE: &str = "\
diamondc: compiler and noisy simulator for diamond NV-center quantum computers

USAGE:
  diamondc compile <circuit.dqc> [--topology nodes=N,per_node=M]
           [--no-diamond-opts] [--diagnostics] [--tomography R]
           [--measure q1,q2,...] [--out FILE]
  diamondc simulate <program.dasm> [--noise p=P,t=T|inf] [--shots N | --exact]
           [--seed S] [--check-physicality] [--out FILE]
  diamondc experiment --name telecnot|meas-x|ghz-swap|ghz-direct
           [--p-grid P1,P2,...] [--t-grid T1,T2,...] [--shots N | --exact]
           [--seed S] [--out BASE]

Exit codes: 0 success, 1 usage, 2 compile error, 3 simulation error.";

struct Args {
    positional: Vec<String>,
    flags: std::collections::BTreeMap<String, String>,
    switches: std::collections::BTreeSet<String>,
}

fn parse_args(args: &[String], switch_names: &[&str]) -> Result<Args, CliError> {
    let mut positional = Vec::new();
    let mut flags = std::collections::BTreeMap::new();
    let mut switches = std::collections::BTreeSet::new();
    let mut it = args.iter().peekable();
    while let Some(a) = it.next() {
        if let Some(name) = a.strip_prefix("--") {
            if switch_names.contains(&name) {
                switches.insert(name.to_string());
            } else {
                let value = it
                    .next()
                    .ok_or_else(|| CliError::Usage(format!("flag --{name} needs a value")))?;
                flags.insert(name.to_string(), value.clone());
            }
        } else {
            positional.push(a.clone());
        }
    }
    Ok(Args {
        positional,
        flags,
        switches,
    })
}

fn parse_topology(args: &Args) -> Result<TopologyConfig, CliError> {
    let Some(s) = args.flags.get("topology") else {
        return Ok(TopologyConfig::new(1, 5).unwrap());
    };
    // Inline `nodes=N,per_node=M`, or a path to a key-value file with
    // `num_nodes = N` and `qubits_per_node = M` lines.
    if s.contains('=') {
        return TopologyConfig::parse_flag(s).map_err(CliError::Usage);
    }
    let text = std::fs::read_to_string(s)
        .map_err(|e| CliError::Usage(format!("cannot read topology file {s}: {e}")))?;
    let mut nodes = None;
    let mut per_node = None;
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("{s}:{}: expected key = value", lineno + 1)))?;
        let v: usize = value.trim().parse().map_err(|_| {
            CliError::Usage(format!("{s}:{}: bad value `{}`", lineno + 1, value.trim()))
        })?;
        match key.trim() {
            "num_nodes" | "nodes" => nodes = Some(v),
            "qubits_per_node" | "per_node" => per_node = Some(v),
            other => {
                return Err(CliError::Usage(format!(
                    "{s}:{}: unknown topology key `{other}`",
                    lineno + 1
                )))
            }
        }
    }
    match (nodes, per_node) {
        (Some(n), Some(m)) => {
            TopologyConfig::new(n, m).map_err(|e| CliError::Usage(format!("{s}: {e}")))
        }
        _ => Err(CliError::Usage(format!(
            "{s}: topology file must set num_nodes and qubits_per_node"
        ))),
    }
}

fn parse_noise(args: &Args) -> Result<NoiseParams, CliError> {
    let mut noise = NoiseParams::noiseless();
    if let Some(s) = args.flags.get("noise") {
        for part in s.split(',') {
            let (k, v) = part
                .split_once('=')
                .ok_or_else(|| CliError::Usage(format!("bad noise component `{part}`")))?;
            match k.trim() {
                "p" => {
                    noise.p_depol = v
                        .trim()
                        .parse()
                        .map_err(|_| CliError::Usage(format!("bad p `{v}`")))?;
                }
                "t" => {
                    noise.t_coh = if v.trim() == "inf" {
                        None
                    } else {
                        Some(
                            v.trim()
                                .parse()
                                .map_err(|_| CliError::Usage(format!("bad t `{v}`")))?,
                        )
                    };
                }
                other => return Err(CliError::Usage(format!("unknown noise key `{other}`"))),
            }
        }
    }
    Ok(noise)
}

fn write_or_print(out: Option<&String>, content: &str) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, content)
            .map_err(|e| CliError::Sim(format!("cannot write {path}: {e}"))),
        None => {
            println!("{content}");
            Ok(())
        }
    }
}

/// `compile`: circuit text in, assembly text out.
pub fn cmd_compile(args: &[String]) -> Result<(), CliError> {
    let args = parse_args(args, &["no-diamond-opts", "diagnostics"])?;
    let input: &String = args
        .positional
        .first()
        .ok_or_else(|| CliError::Usage("compile needs an input file".into()))?;
    let text = std::fs::read_to_string(PathBuf::from(input))
        .map_err(|e| CliError::Usage(format!("cannot read {input}: {e}")))?;
    let topology = parse_topology(&args)?;
    let mut circuit =
        parse_circuit(&text).map_err(|e| CliError::Compile(format!("{input}: {e}")))?;
    let config = if args.switches.contains("no-diamond-opts") {
        PipelineConfig::baseline()
    } else {
        PipelineConfig::optimized()
    };
    let diag = if args.switches.contains("diagnostics") {
        DiagnosticsConfig::full()
    } else {
        DiagnosticsConfig::disabled()
    };
    let tomography: Option<u32> = match args.flags.get("tomography") {
        Some(s) => Some(
            s.parse()
                .map_err(|_| CliError::Usage(format!("bad repetition count `{s}`")))?,
        ),
        None => None,
    };
    let measured: Vec<QubitId> = match args.flags.get("measure") {
        Some(s) => s
            .split(',')
            .map(|tok| {
                tok.trim()
                    .trim_start_matches('q')
                    .parse::<usize>()
                    .map(QubitId)
                    .map_err(|_| CliError::Usage(format!("bad measured qubit `{tok}`")))
            })
            .collect::<Result<_, _>>()?,
        None => Vec::new(),
    };
    // Tomography readouts are appended at the source level so carbon
    // measurements are routed like any other.
    for (k, q) in measured.iter().enumerate() {
        let reg = codegen::result_register(k);
        if !circuit.classical_registers.contains(&reg) {
            circuit.classical_registers.push(reg.clone());
        }
        circuit.instructions.push(crate::circuit::Instruction {
            kind: crate::circuit::GateKind::Measure,
            qubits: vec![*q],
            register: Some(reg),
            condition: None,
        });
    }
    let native = compile(&circuit, &topology, &config, &diag)
        .map_err(|e| CliError::Compile(e.to_string()))?;
    let program = match tomography {
        Some(reps) if measured.is_empty() => {
            // No readout targets: emit the bare loop skeleton.
            emit_repetition_loop(&native, reps).map_err(|e| CliError::Compile(e.to_string()))?
        }
        Some(reps) => emit_tomography(
            &native,
            &TomographySpec {
                repetitions: reps,
                measured_qubits: measured,
            },
        )
        .map_err(|e| CliError::Compile(e.to_string()))?,
        None => emit(&native).map_err(|e| CliError::Compile(e.to_string()))?,
    };
    write_or_print(args.flags.get("out"), &disassemble(&program))
}

/// `simulate`: assembly in, RunResult JSON out.
pub fn cmd_simulate(args: &[String]) -> Result<(), CliError> {
    let args = parse_args(args, &["exact", "check-physicality"])?;
    let input: &String = args
        .positional
        .first()
        .ok_or_else(|| CliError::Usage("simulate needs an input file".into()))?;
    let text = std::fs::read_to_string(PathBuf::from(input))
        .map_err(|e| CliError::Usage(format!("cannot read {input}: {e}")))?;
    let program = assemble(&text).map_err(|e| CliError::Compile(format!("{input}: {e}")))?;
    let noise = parse_noise(&args)?;
    let seed: u64 = match args.flags.get("seed") {
        Some(s) => s
            .parse()
            .map_err(|_| CliError::Usage(format!("bad seed `{s}`")))?,
        None => 0,
    };
    let shots: u64 = match args.flags.get("shots") {
        Some(s) => s
            .parse()
            .map_err(|_| CliError::Usage(format!("bad shot count `{s}`")))?,
        None => 1000,
    };
    let opts = RunOptions {
        seed,
        shots,
        exact: args.switches.contains("exact"),
        check_physicality: args.switches.contains("check-physicality"),
        capture_final_state: args.switches.contains("exact"),
    };
    let result = run_with_options(&program, &noise, &DurationTable::default(), &opts)
        .map_err(|e| CliError::Sim(e.to_string()))?;
    let json = serde_json::to_string_pretty(&result).map_err(|e| CliError::Sim(e.to_string()))?;
    write_or_print(args.flags.get("out"), &json)
}

/// `experiment`: canned circuits swept over a noise grid; CSV rows plus a
/// JSON summary.
pub fn cmd_experiment(args: &[String]) -> Result<(), CliError> {
    let args = parse_args(args, &["exact"])?;
    let name = args
        .flags
        .get("name")
        .ok_or_else(|| CliError::Usage("experiment needs --name".into()))?;
    let name = ExperimentName::parse(name).map_err(|e| CliError::Usage(e.to_string()))?;
    let parse_list = |key: &str| -> Result<Option<Vec<f64>>, CliError> {
        match args.flags.get(key) {
            None => Ok(None),
            Some(s) => s
                .split(',')
                .map(|tok| {
                    tok.trim()
                        .parse::<f64>()
                        .map_err(|_| CliError::Usage(format!("bad {key} entry `{tok}`")))
                })
                .collect::<Result<Vec<_>, _>>()
                .map(Some),
        }
    };
    let p_grid = parse_list("p-grid")?;
    let t_grid = parse_list("t-grid")?;
    let grid = match (p_grid, t_grid) {
        (None, None) => ExperimentSpec::default_grid(),
        (p, t) => {
            let p = p.unwrap_or_else(|| vec![0.0]);
            let t = t.unwrap_or_else(|| vec![f64::INFINITY]);
            let mut grid = Vec::new();
            for &pp in &p {
                for &tt in &t {
                    grid.push((pp, if tt.is_finite() { Some(tt) } else { None }));
                }
            }
            grid
        }
    };
    for (p, t) in &grid {
        if !(0.0..=1.0).contains(p) {
            return Err(CliError::Usage(format!("p_depol {p} outside [0, 1]")));
        }
        if let Some(t) = t {
            if *t <= 0.0 {
                return Err(CliError::Usage(format!("T_coh {t} must be positive")));
            }
        }
    }
    let seed: u64 = match args.flags.get("seed") {
        Some(s) => s
            .parse()
            .map_err(|_| CliError::Usage(format!("bad seed `{s}`")))?,
        None => 0,
    };
    let shots: u64 = match args.flags.get("shots") {
        Some(s) => s
            .parse()
            .map_err(|_| CliError::Usage(format!("bad shot count `{s}`")))?,
        None => 1000,
    };
    let spec = ExperimentSpec {
        name,
        grid,
        shots,
        exact: args.switches.contains("exact"),
        seed,
    };
    let output = run_experiment(&spec).map_err(|e| CliError::Sim(e.to_string()))?;
    let csv = output.to_csv();
    let json = serde_json::to_string_pretty(&output).map_err(|e| CliError::Sim(e.to_string()))?;
    match args.flags.get("out") {
        Some(base) => {
            std::fs::write(format!("{base}.csv"), &csv)
                .map_err(|e| CliError::Sim(format!("cannot write {base}.csv: {e}")))?;
            std::fs::write(format!("{base}.json"), &json)
                .map_err(|e| CliError::Sim(format!("cannot write {base}.json: {e}")))?;
            println!("wrote {base}.csv and {base}.json");
            Ok(())
        }
        None => {
            println!("{csv}");
            Ok(())
        }
    }
}

/// Dispatch; returns the process exit code.
pub fn run_cli(args: &[String]) -> i32 {
    let Some(cmd) = args.first() else {
        eprintln!("{USAGE}");
        return EXIT_USAGE;
    };
    let rest = &args[1..];
    let result = match cmd.as_str() {
        "compile" => cmd_compile(rest),
        "simulate" => cmd_simulate(rest),
        "experiment" => cmd_experiment(rest),
        "--help" | "-h" | "help" => {
            println!("{USAGE}");
            return EXIT_OK;
        }
        other => Err(CliError::Usage(format!(
            "unknown command `{other}`\n{USAGE}"
        ))),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {}", e.message());
            e.exit_code()
        }
    }
}
