//! `thresholds`: per-p comparison of the theoretical confident-query
//! exponent `n g*` with the empirical abandonment exponent at which half of
//! the non-abandoned decodings are still correct.

use grandsim_core::exponents::confident_query_exponent;
use grandsim_core::noise::{BscNoise, NoiseModel};
use grandsim_core::sim::{derive_point_seed, empirical_confidence_threshold};
use grandsim_core::LinearCode;
use rand::SeedableRng;

use crate::cli::{Cli, CliError, Command};
use crate::cmd_exponents::load_config;
use crate::config::ManifestWriter;
use crate::grids;
use crate::output::{fmt_f64, fmt_opt_f64, fmt_opt_u64, write_atomic, CsvBuilder};

const KNOWN_KEYS: &[&str] = &[
    "command",
    "name",
    "n",
    "k",
    "p_grid",
    "p_min",
    "p_max",
    "p_points",
    "trials",
    "target",
    "master_seed",
    "code_seed",
];

pub const CSV_HEADER: [&str; 5] = ["p", "n_g_star_theory", "a_empirical_50pct", "trials", "seed"];

#[derive(Debug, Clone)]
pub struct ThresholdsSpec {
    pub name: String,
    pub n: usize,
    pub k: usize,
    pub p_grid: Vec<f64>,
    pub trials: u64,
    pub target: f64,
    pub master_seed: u64,
    pub code_seed: u64,
}

pub fn resolve(cli: &Cli) -> Result<ThresholdsSpec, CliError> {
    let (n_arg, k_arg, grid_arg, p_min_arg, p_max_arg, target_arg) = match &cli.command {
        Command::Thresholds {
            n,
            k,
            p_grid,
            p_min,
            p_max,
            target,
        } => (*n, *k, p_grid.clone(), *p_min, *p_max, *target),
        _ => unreachable!("dispatched on the thresholds variant"),
    };
    let file = load_config(cli, "thresholds", KNOWN_KEYS)?;
    let n = n_arg.or(file.get_parsed::<usize>("n")?).unwrap_or(128);
    let k = k_arg.or(file.get_parsed::<usize>("k")?).unwrap_or(116);
    if k == 0 || k >= n {
        return Err(CliError::Config(format!("need 1 <= k < n, got n={n} k={k}")));
    }
    let rate = k as f64 / n as f64;
    let p_grid = match grid_arg.or(file.get_list::<f64>("p_grid")?) {
        Some(grid) => grid,
        None => {
            let p_min = p_min_arg
                .or(file.get_parsed::<f64>("p_min")?)
                .unwrap_or_else(|| grids::bsc_capacity_point(rate) * 1.05);
            let p_max = p_max_arg
                .or(file.get_parsed::<f64>("p_max")?)
                .unwrap_or_else(|| grids::bsc_min_capacity_point(rate) * 0.95);
            let points = cli
                .points
                .or(file.get_parsed::<usize>("p_points")?)
                .unwrap_or(8);
            grids::log_spaced(p_min, p_max, points)
        }
    };
    if p_grid.iter().any(|&p| !(p > 0.0 && p < 0.5)) {
        return Err(CliError::Config("p values must lie in (0, 0.5)".into()));
    }
    let target = target_arg
        .or(file.get_parsed::<f64>("target")?)
        .unwrap_or(0.5);
    if !(target > 0.0 && target < 1.0) {
        return Err(CliError::Config(format!("target {target} outside (0, 1)")));
    }
    Ok(ThresholdsSpec {
        name: file.get("name").unwrap_or("thresholds").to_string(),
        n,
        k,
        p_grid,
        trials: cli
            .trials
            .or(file.get_parsed::<u64>("trials")?)
            .unwrap_or(1000),
        target,
        master_seed: cli
            .seed
            .or(file.get_parsed::<u64>("master_seed")?)
            .unwrap_or(1),
        code_seed: cli
            .code_seed
            .or(file.get_parsed::<u64>("code_seed")?)
            .unwrap_or(2),
    })
}

pub struct ThresholdRow {
    pub p: f64,
    pub n_g_star_theory: Option<f64>,
    pub a_empirical: Option<u32>,
    pub seed: u64,
}

pub fn compute_rows(spec: &ThresholdsSpec) -> Result<Vec<ThresholdRow>, CliError> {
    let mut code_rng = rand_chacha::ChaCha8Rng::seed_from_u64(spec.code_seed);
    let code = LinearCode::sample_rlc(spec.n, spec.k, &mut code_rng)
        .map_err(|e| CliError::Config(e.to_string()))?;
    let rate = spec.k as f64 / spec.n as f64;
    let mut rows = Vec::new();
    for (i, &p) in spec.p_grid.iter().enumerate() {
        let model = NoiseModel::Bsc(
            BscNoise::new(p).map_err(|e| CliError::Config(e.to_string()))?,
        );
        let theory = confident_query_exponent(&model, rate).map(|g| g * spec.n as f64);
        let seed = derive_point_seed(spec.master_seed, i);
        let empirical =
            empirical_confidence_threshold(&code, &model, spec.target, spec.trials, seed)
                .map_err(|e| CliError::Partial(e.to_string()))?;
        rows.push(ThresholdRow {
            p,
            n_g_star_theory: theory,
            a_empirical: empirical,
            seed,
        });
    }
    Ok(rows)
}

pub fn render_csv(spec: &ThresholdsSpec, rows: &[ThresholdRow]) -> String {
    let mut csv = CsvBuilder::new(&CSV_HEADER);
    for r in rows {
        csv.row(&[
            fmt_f64(r.p),
            fmt_opt_f64(r.n_g_star_theory),
            fmt_opt_u64(r.a_empirical.map(u64::from)),
            spec.trials.to_string(),
            r.seed.to_string(),
        ]);
    }
    csv.finish()
}

pub fn run(cli: &Cli) -> Result<(), CliError> {
    let spec = resolve(cli)?;
    let rows = compute_rows(&spec)?;
    let out_dir = cli.out.clone().unwrap_or_else(|| ".".into());
    let csv_path = out_dir.join(format!("{}.csv", spec.name));
    write_atomic(&csv_path, &render_csv(&spec, &rows))?;

    let mut m = ManifestWriter::new("grandsim", "thresholds");
    m.field("name", &spec.name)
        .field("n", spec.n)
        .field("k", spec.k)
        .field(
            "p_grid",
            spec.p_grid
                .iter()
                .map(|p| p.to_string())
                .collect::<Vec<_>>()
                .join(","),
        )
        .field("trials", spec.trials)
        .field("target", spec.target)
        .field("master_seed", spec.master_seed)
        .field("code_seed", spec.code_seed);
    write_atomic(&out_dir.join(format!("{}.manifest.cfg", spec.name)), &m.finish())?;
    println!(
        "thresholds: wrote {} rows to {}",
        rows.len(),
        csv_path.display()
    );
    Ok(())
}
