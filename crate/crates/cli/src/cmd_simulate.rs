//! `simulate`: Monte Carlo sweep over (flip probability, abandonment) cells.

use grandsim_core::sim::{run_sweep, Abandonment, NoiseKind, PointAggregate, SweepConfig};

use crate::cli::{Cli, CliError};
use crate::cmd_exponents::load_config;
use crate::config::{ConfigFile, ManifestWriter};
use crate::output::{fmt_f64, fmt_opt_f64, fmt_opt_u64, write_atomic, CsvBuilder};

const KNOWN_KEYS: &[&str] = &[
    "command",
    "name",
    "n",
    "k",
    "noise",
    "burst_persistence",
    "p_grid",
    "p_min",
    "p_max",
    "p_points",
    "abandonment",
    "trials",
    "master_seed",
    "code_seed",
];

pub const CSV_HEADER: [&str; 18] = [
    "p",
    "neglog10_p",
    "a",
    "max_queries",
    "trials",
    "successes",
    "wrong",
    "abandoned",
    "bler",
    "bler_se",
    "success_prob",
    "success_prob_se",
    "cond_success_prob",
    "cond_success_prob_se",
    "frac_decoded",
    "frac_decoded_se",
    "mean_queries",
    "mean_queries_per_success",
];

#[derive(Debug, Clone)]
pub struct SimulateSpec {
    pub name: String,
    pub config: SweepConfig,
}

fn require<T>(value: Option<T>, key: &str) -> Result<T, CliError> {
    value.ok_or_else(|| CliError::Config(format!("missing required field {key:?}")))
}

fn parse_abandonment(raw: &str) -> Result<Vec<Abandonment>, CliError> {
    raw.split(',')
        .map(|t| t.trim())
        .filter(|t| !t.is_empty())
        .map(|t| {
            if t.eq_ignore_ascii_case("unbounded") {
                Ok(Abandonment::Unbounded)
            } else {
                t.parse::<u32>()
                    .map(Abandonment::AtExponent)
                    .map_err(|_| CliError::Config(format!("bad abandonment entry {t:?}")))
            }
        })
        .collect()
}

pub fn resolve(cli: &Cli) -> Result<SimulateSpec, CliError> {
    if cli.config.is_none() {
        return Err(CliError::Config(
            "simulate needs --config (a path or a bundled name such as fig2_rlc_128_116)".into(),
        ));
    }
    let file = load_config(cli, "simulate", KNOWN_KEYS)?;
    resolve_from(&file, cli)
}

pub fn resolve_from(file: &ConfigFile, cli: &Cli) -> Result<SimulateSpec, CliError> {
    let n = require(file.get_parsed::<usize>("n")?, "n")?;
    let k = require(file.get_parsed::<usize>("k")?, "k")?;
    let noise = match file.get("noise").unwrap_or("bsc") {
        "bsc" => NoiseKind::Bsc,
        "markov-burst" => NoiseKind::MarkovBurst {
            persistence: require(
                file.get_parsed::<f64>("burst_persistence")?,
                "burst_persistence",
            )?,
        },
        other => {
            return Err(CliError::Config(format!(
                "noise must be \"bsc\" or \"markov-burst\", got {other:?}"
            )))
        }
    };
    let p_grid = match file.get_list::<f64>("p_grid")? {
        Some(grid) => grid,
        None => {
            let p_min = require(file.get_parsed::<f64>("p_min")?, "p_min")?;
            let p_max = require(file.get_parsed::<f64>("p_max")?, "p_max")?;
            let points = cli
                .points
                .or(file.get_parsed::<usize>("p_points")?)
                .unwrap_or(13);
            if !(p_min > 0.0 && p_min < p_max) {
                return Err(CliError::Config(format!(
                    "need 0 < p_min < p_max, got {p_min} and {p_max}"
                )));
            }
            crate::grids::log_spaced(p_min, p_max, points)
        }
    };
    let abandonments = parse_abandonment(require(file.get("abandonment"), "abandonment")?)?;
    let config = SweepConfig {
        n,
        k,
        p_grid,
        abandonments,
        trials: cli
            .trials
            .or(file.get_parsed::<u64>("trials")?)
            .unwrap_or(1000),
        master_seed: cli
            .seed
            .or(file.get_parsed::<u64>("master_seed")?)
            .unwrap_or(1),
        code_seed: cli
            .code_seed
            .or(file.get_parsed::<u64>("code_seed")?)
            .unwrap_or(2),
        noise,
    };
    config
        .validate()
        .map_err(|e| CliError::Config(e.to_string()))?;
    let name = file.get("name").unwrap_or("sweep").to_string();
    Ok(SimulateSpec { name, config })
}

pub fn render_csv(rows: &[PointAggregate]) -> String {
    let mut csv = CsvBuilder::new(&CSV_HEADER);
    for r in rows {
        let bler = r.bler();
        let succ = r.success_prob();
        let frac = r.frac_decoded();
        let decoded = r.successes + r.wrong;
        let cond = r.cond_success_prob();
        let cond_se = cond.map(|c| PointAggregate::binomial_se(c, decoded));
        csv.row(&[
            fmt_f64(r.p),
            fmt_f64(-r.p.log10()),
            fmt_opt_u64(r.abandonment.exponent().map(u64::from)),
            fmt_opt_u64(r.abandonment.max_queries()),
            r.trials.to_string(),
            r.successes.to_string(),
            r.wrong.to_string(),
            r.abandoned.to_string(),
            fmt_f64(bler),
            fmt_f64(PointAggregate::binomial_se(bler, r.trials)),
            fmt_f64(succ),
            fmt_f64(PointAggregate::binomial_se(succ, r.trials)),
            fmt_opt_f64(cond),
            fmt_opt_f64(cond_se),
            fmt_f64(frac),
            fmt_f64(PointAggregate::binomial_se(frac, r.trials)),
            fmt_f64(r.mean_queries()),
            fmt_opt_f64(r.mean_queries_per_success()),
        ]);
    }
    csv.finish()
}

pub fn manifest_text(spec: &SimulateSpec) -> String {
    let cfg = &spec.config;
    let mut m = ManifestWriter::new("grandsim", "simulate");
    m.field("name", &spec.name)
        .field("n", cfg.n)
        .field("k", cfg.k);
    match cfg.noise {
        NoiseKind::Bsc => {
            m.field("noise", "bsc");
        }
        NoiseKind::MarkovBurst { persistence } => {
            m.field("noise", "markov-burst")
                .field("burst_persistence", persistence);
        }
    }
    m.field(
        "p_grid",
        cfg.p_grid
            .iter()
            .map(|p| p.to_string())
            .collect::<Vec<_>>()
            .join(","),
    )
    .field(
        "abandonment",
        cfg.abandonments
            .iter()
            .map(|a| match a {
                Abandonment::AtExponent(e) => e.to_string(),
                Abandonment::Unbounded => "unbounded".to_string(),
            })
            .collect::<Vec<_>>()
            .join(","),
    )
    .field("trials", cfg.trials)
    .field("master_seed", cfg.master_seed)
    .field("code_seed", cfg.code_seed);
    m.finish()
}

pub fn run(cli: &Cli) -> Result<(), CliError> {
    let spec = resolve(cli)?;
    let out_dir = cli.out.clone().unwrap_or_else(|| ".".into());
    let output = run_sweep(&spec.config).map_err(|e| CliError::Config(e.to_string()))?;

    let csv_path = out_dir.join(format!("{}.csv", spec.name));
    write_atomic(&csv_path, &render_csv(&output.rows))?;
    write_atomic(
        &out_dir.join(format!("{}.manifest.cfg", spec.name)),
        &manifest_text(&spec),
    )?;
    println!(
        "simulate: wrote {} rows to {}",
        output.rows.len(),
        csv_path.display()
    );
    if !output.failures.is_empty() {
        for f in &output.failures {
            eprintln!(
                "point failed: p = {}, abandonment = {:?}: {}",
                f.p, f.abandonment, f.error
            );
        }
        return Err(CliError::Partial(format!(
            "{} of {} points failed",
            output.failures.len(),
            output.failures.len() + output.rows.len()
        )));
    }
    Ok(())
}
