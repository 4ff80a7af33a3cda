use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use coopex::coding::{generate_scheme, load_scheme, scheme_to_json, verify_recovery};
use coopex::experiments::{run_campaign, Campaign, CampaignKind};
use coopex::feasibility::{load_schedule, FeasibilityChecker};
use coopex::galois::{Elem, FieldMatrix, GaloisField};
use coopex::instance::load_instance;
use coopex::lp::LpSolution;
use coopex::secrecy::{generate_key, node_views, verify_secrecy, SecrecySetup};
use coopex::solver::{
    lp_cutset, lp_dregular, solve_clique, solve_exhaustive, solve_t_divisible, solve_weighted_clique,
    EXHAUSTIVE_CAP_LIMIT, EXHAUSTIVE_ROUND_LIMIT,
};
use coopex::{Error, NetworkInstance, Result, Subset, Topology};

#[derive(Parser)]
#[command(name = "coopex", version, about = "Coded cooperative data exchange solver")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Certify that a schedule permits universal recovery.
    Feasible {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        schedule: PathBuf,
        /// Round count; shorter schedules get leading silent rounds.
        #[arg(short, long)]
        r: Option<usize>,
    },
    /// Compute the minimum number of transmissions or a lower bound.
    Solve {
        #[arg(long)]
        instance: PathBuf,
        /// JSON array of per-node weights.
        #[arg(long)]
        weights: Option<PathBuf>,
        /// Chunks per packet.
        #[arg(long)]
        t: Option<usize>,
        #[arg(long, value_enum)]
        method: Option<Method>,
        /// Rounds for exhaustive search.
        #[arg(long, default_value_t = EXHAUSTIVE_ROUND_LIMIT)]
        rounds: usize,
        /// Per-entry cap for exhaustive search.
        #[arg(long, default_value_t = EXHAUSTIVE_CAP_LIMIT)]
        cap: u64,
    },
    /// Build a random linear coding scheme for a schedule.
    Code {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        schedule: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Field exponent m for GF(2^m).
        #[arg(long, default_value_t = 8)]
        field_bits: u32,
    },
    /// Replay a scheme and check universal recovery.
    Verify {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        scheme: PathBuf,
    },
    /// Secret-key or private-key capacity, optionally with a key.
    Secrecy {
        #[arg(long)]
        instance: PathBuf,
        /// Comma-separated 1-based compromised nodes.
        #[arg(long, value_delimiter = ',')]
        compromised: Vec<usize>,
        #[arg(long)]
        extract: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 8)]
        field_bits: u32,
    },
    /// Run a seeded experiment campaign.
    Experiment {
        #[arg(long)]
        kind: String,
        #[arg(long, default_value_t = 4)]
        n: usize,
        #[arg(long, default_value_t = 0.5)]
        q: f64,
        #[arg(long, value_delimiter = ',', default_value = "50")]
        k: Vec<usize>,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "clique")]
        topology: String,
        /// Random weights for ilp-validate.
        #[arg(long)]
        weighted: bool,
        /// CSV path; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Summary JSON path; defaults to the CSV path with a .json extension.
        #[arg(long)]
        summary: Option<PathBuf>,
        /// Directory for failing inputs.
        #[arg(long)]
        failures_dir: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Clique,
    Exhaustive,
    LpCutset,
    LpDreg,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

/// 1 for outcomes the input admits but fails (infeasible, unrecoverable,
/// property violations), 2 for bad input.
fn exit_code(e: &Error) -> u8 {
    match e {
        Error::InfeasibleSchedule
        | Error::CodingFailed { .. }
        | Error::NoRecovery(_)
        | Error::PropertyViolation(_)
        | Error::SfmNoConvergence(_) => 1,
        _ => 2,
    }
}

fn print(v: &Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("JSON values serialize"));
}

fn field(bits: u32) -> Result<GaloisField> {
    GaloisField::with_default_poly(bits)
}

fn run(command: Command) -> Result<u8> {
    match command {
        Command::Feasible { instance, schedule, r } => feasible(&instance, &schedule, r),
        Command::Solve {
            instance,
            weights,
            t,
            method,
            rounds,
            cap,
        } => solve(&instance, weights.as_deref(), t, method, rounds, cap),
        Command::Code {
            instance,
            schedule,
            seed,
            field_bits,
        } => {
            let inst = load_instance(instance)?;
            let sched = load_schedule(schedule)?;
            let scheme = generate_scheme(&inst, &sched, &field(field_bits)?, seed)?;
            println!("{}", scheme_to_json(&scheme)?);
            Ok(0)
        }
        Command::Verify { instance, scheme } => {
            let inst = load_instance(instance)?;
            let scheme = load_scheme(scheme)?;
            let report = verify_recovery(&inst, &scheme)?;
            print(&serde_json::to_value(&report)?);
            Ok(if report.recovered { 0 } else { 1 })
        }
        Command::Secrecy {
            instance,
            compromised,
            extract,
            seed,
            field_bits,
        } => secrecy(&instance, &compromised, extract, seed, field_bits),
        Command::Experiment {
            kind,
            n,
            q,
            k,
            trials,
            seed,
            topology,
            weighted,
            out,
            summary,
            failures_dir,
        } => {
            let campaign = Campaign {
                kind: kind.parse::<CampaignKind>()?,
                n,
                k,
                q,
                topology: topology.parse::<Topology>()?,
                trials,
                seed,
                weighted,
            };
            experiment(&campaign, out, summary, failures_dir)
        }
    }
}

fn feasible(instance: &Path, schedule: &Path, r: Option<usize>) -> Result<u8> {
    let inst = load_instance(instance)?;
    let mut sched = load_schedule(schedule)?;
    if let Some(r) = r {
        if r < sched.rounds() {
            return Err(Error::InvalidParameter(format!(
                "-r {r} is shorter than the schedule's {} rounds",
                sched.rounds()
            )));
        }
        while sched.rounds() < r {
            sched = sched.with_leading_silent_round();
        }
    }
    let report = FeasibilityChecker::new(&inst, sched.rounds())?.check(&sched)?;
    let mut out = json!({
        "feasible": report.feasible,
        "rounds": sched.rounds(),
        "flows": report.flows,
    });
    if let Some(w) = &report.witness {
        out["witness"] = w.to_json();
    }
    print(&out);
    Ok(if report.feasible { 0 } else { 1 })
}

fn lp_json(method: &str, lp: &LpSolution) -> Value {
    json!({
        "method": method,
        "value": lp.value.to_string(),
        "x": lp.x.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
    })
}

fn solve(
    instance: &Path,
    weights: Option<&Path>,
    t: Option<usize>,
    method: Option<Method>,
    rounds: usize,
    cap: u64,
) -> Result<u8> {
    let inst = load_instance(instance)?;
    let method = method.unwrap_or(if inst.is_complete() { Method::Clique } else { Method::Exhaustive });
    let report = match method {
        Method::LpCutset => {
            print(&lp_json("lp-cutset", &lp_cutset(&inst)?));
            return Ok(0);
        }
        Method::LpDreg => {
            print(&lp_json("lp-dregular", &lp_dregular(&inst)?));
            return Ok(0);
        }
        Method::Clique => match (weights, t) {
            (Some(_), Some(_)) => {
                return Err(Error::InvalidParameter("--weights and --t cannot be combined".into()))
            }
            (Some(path), None) => {
                let w: Vec<u64> = serde_json::from_str(&fs::read_to_string(path)?)?;
                solve_weighted_clique(&inst, &w)?
            }
            (None, Some(t)) => solve_t_divisible(&inst, t)?,
            (None, None) => solve_clique(&inst)?,
        },
        Method::Exhaustive => {
            if weights.is_some() {
                return Err(Error::InvalidParameter("weights need the clique method".into()));
            }
            match t {
                Some(t) => solve_t_divisible(&inst, t)?,
                None => solve_exhaustive(&inst, rounds, cap)?,
            }
        }
    };
    let report = report.with_bounds(&inst)?;
    print(&serde_json::to_value(&report)?);
    Ok(0)
}

fn hex_rows(m: &FieldMatrix, width: usize) -> Vec<Vec<String>> {
    m.to_rows()
        .iter()
        .map(|r| r.iter().map(|c: &Elem| format!("{c:0width$x}")).collect())
        .collect()
}

fn parse_compromised(inst: &NetworkInstance, nodes: &[usize]) -> Result<Subset> {
    nodes
        .iter()
        .map(|&i| {
            if i == 0 || i > inst.n() {
                Err(Error::InvalidParameter(format!("node {i} is not in 1..={}", inst.n())))
            } else {
                Ok(i - 1)
            }
        })
        .collect()
}

fn secrecy(instance: &Path, compromised: &[usize], extract: bool, seed: u64, bits: u32) -> Result<u8> {
    let inst = load_instance(instance)?;
    let d = parse_compromised(&inst, compromised)?;
    let setup = SecrecySetup::new(inst, d)?;
    let capacity = setup.capacity()?;
    let mut out = if setup.is_private() {
        json!({ "c_pk": capacity, "compromised": d.to_one_based() })
    } else {
        json!({ "c_sk": capacity })
    };
    if extract {
        let f = field(bits)?;
        let keymap = generate_key(&setup, &f, seed)?;
        let certs = verify_secrecy(&keymap, &node_views(&setup))?;
        let width = if bits <= 8 { 2 } else { 4 };
        out["keymap"] = json!({
            "field": { "m": f.exponent(), "poly": f.poly() },
            "key": hex_rows(&keymap.key, width),
            "transcript": hex_rows(&keymap.transcript, width),
            "shortfall": keymap.shortfall(),
        });
        out["certificates"] = serde_json::to_value(&certs)?;
        print(&out);
        return Ok(if certs.all() { 0 } else { 1 });
    }
    print(&out);
    Ok(0)
}

fn experiment(
    campaign: &Campaign,
    out: Option<PathBuf>,
    summary: Option<PathBuf>,
    failures_dir: Option<PathBuf>,
) -> Result<u8> {
    let report = run_campaign(campaign)?;
    let summary_text = serde_json::to_string_pretty(&report.summary)?;
    match &out {
        Some(path) => {
            fs::write(path, &report.csv)?;
            let summary_path = summary.unwrap_or_else(|| path.with_extension("json"));
            fs::write(summary_path, &summary_text)?;
        }
        None => {
            print!("{}", report.csv);
            match summary {
                Some(path) => fs::write(path, &summary_text)?,
                None => eprintln!("{summary_text}"),
            }
        }
    }
    if let Some(dir) = failures_dir {
        fs::create_dir_all(&dir)?;
        for (i, f) in report.failures.iter().enumerate() {
            fs::write(dir.join(format!("failure-{i}.json")), serde_json::to_string_pretty(f)?)?;
        }
    }
    for c in report.checks.iter().filter(|c| !c.passed) {
        eprintln!("check failed: {} {}", c.name, c.detail);
    }
    Ok(report.exit_code() as u8)
}
