//! `exponents`: analytic curves on a BSC grid between the capacity point
//! and the min-capacity point of the chosen code rate.

use grandsim_core::exponents::{
    channel_summary, confident_query_exponent, rate_function, success_probability_estimate,
};
use grandsim_core::noise::{BscNoise, NoiseModel};

use crate::cli::{Cli, CliError, Command};
use crate::config::{ConfigFile, ManifestWriter};
use crate::grids;
use crate::output::{fmt_f64, fmt_opt_f64, write_atomic, CsvBuilder};
use crate::svg::{Plot, Series};

const KNOWN_KEYS: &[&str] = &[
    "command", "name", "rate", "lengths", "p_min", "p_max", "p_points", "svg",
];

#[derive(Debug, Clone)]
pub struct ExponentsSpec {
    pub name: String,
    pub rate: f64,
    pub lengths: Vec<usize>,
    pub p_min: f64,
    pub p_max: f64,
    pub p_points: usize,
    pub svg: bool,
}

pub struct ExponentRow {
    pub p: f64,
    pub shannon_rate: f64,
    pub capacity: f64,
    pub min_capacity: f64,
    pub rate_fn_value: f64,
    pub success_estimates: Vec<f64>,
    pub g_star: Option<f64>,
}

pub fn resolve(cli: &Cli) -> Result<ExponentsSpec, CliError> {
    let (rate_arg, lengths_arg, p_min_arg, p_max_arg) = match &cli.command {
        Command::Exponents {
            rate,
            lengths,
            p_min,
            p_max,
        } => (*rate, lengths.clone(), *p_min, *p_max),
        _ => unreachable!("dispatched on the exponents variant"),
    };
    let file = load_config(cli, "exponents", KNOWN_KEYS)?;
    let rate = rate_arg
        .or(file.get_parsed::<f64>("rate")?)
        .unwrap_or(116.0 / 128.0);
    if !(rate > 0.0 && rate < 1.0) {
        return Err(CliError::Config(format!("rate {rate} outside (0, 1)")));
    }
    let lengths = lengths_arg
        .or(file.get_list::<usize>("lengths")?)
        .unwrap_or_else(|| vec![64, 128, 192, 256]);
    if lengths.is_empty() || lengths.contains(&0) {
        return Err(CliError::Config("lengths must be positive".into()));
    }
    let p_min = p_min_arg
        .or(file.get_parsed::<f64>("p_min")?)
        .unwrap_or_else(|| grids::bsc_capacity_point(rate));
    let p_max = p_max_arg
        .or(file.get_parsed::<f64>("p_max")?)
        .unwrap_or_else(|| grids::bsc_min_capacity_point(rate));
    if !(p_min > 0.0 && p_min < p_max && p_max < 0.5) {
        return Err(CliError::Config(format!(
            "need 0 < p_min < p_max < 0.5, got {p_min} and {p_max}"
        )));
    }
    let p_points = cli
        .points
        .or(file.get_parsed::<usize>("p_points")?)
        .unwrap_or(100);
    if p_points < 2 {
        return Err(CliError::Config("p_points must be at least 2".into()));
    }
    let svg = cli
        .svg
        .or(file.get_parsed::<bool>("svg")?)
        .unwrap_or(false);
    let name = file.get("name").unwrap_or("exponents").to_string();
    Ok(ExponentsSpec {
        name,
        rate,
        lengths,
        p_min,
        p_max,
        p_points,
        svg,
    })
}

pub fn compute_rows(spec: &ExponentsSpec) -> Vec<ExponentRow> {
    let grid = grids::log_spaced(spec.p_min, spec.p_max, spec.p_points);
    grid.iter()
        .map(|&p| {
            let model = NoiseModel::Bsc(BscNoise::new(p).expect("grid stays inside (0, 0.5)"));
            let summary = channel_summary(&model).expect("BSC summary is infallible");
            let value = rate_function(&model, 1.0 - spec.rate).value;
            let success_estimates = spec
                .lengths
                .iter()
                .map(|&n| success_probability_estimate(&model, n, spec.rate))
                .collect();
            let g_star = confident_query_exponent(&model, spec.rate);
            ExponentRow {
                p,
                shannon_rate: summary.shannon_entropy_rate,
                capacity: summary.capacity,
                min_capacity: summary.min_capacity,
                rate_fn_value: value,
                success_estimates,
                g_star,
            }
        })
        .collect()
}

pub fn render_csv(spec: &ExponentsSpec, rows: &[ExponentRow]) -> String {
    let mut header: Vec<String> = ["p", "neglog10_p", "H", "C", "C_min", "I_of_1_minus_R"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    for n in &spec.lengths {
        header.push(format!("succ_prob_est_n{n}"));
    }
    header.push("g_star".into());
    for n in &spec.lengths {
        header.push(format!("n_g_star_n{n}"));
    }
    let header_refs: Vec<&str> = header.iter().map(|s| s.as_str()).collect();
    let mut csv = CsvBuilder::new(&header_refs);
    for row in rows {
        let mut fields = vec![
            fmt_f64(row.p),
            fmt_f64(-row.p.log10()),
            fmt_f64(row.shannon_rate),
            fmt_f64(row.capacity),
            fmt_f64(row.min_capacity),
            fmt_f64(row.rate_fn_value),
        ];
        for est in &row.success_estimates {
            fields.push(fmt_f64(*est));
        }
        fields.push(fmt_opt_f64(row.g_star));
        for n in &spec.lengths {
            fields.push(fmt_opt_f64(row.g_star.map(|g| g * *n as f64)));
        }
        csv.row(&fields);
    }
    csv.finish()
}

pub fn run(cli: &Cli) -> Result<(), CliError> {
    let spec = resolve(cli)?;
    let rows = compute_rows(&spec);
    let out_dir = cli.out.clone().unwrap_or_else(|| ".".into());

    let csv_path = out_dir.join(format!("{}.csv", spec.name));
    write_atomic(&csv_path, &render_csv(&spec, &rows))?;

    let mut manifest = ManifestWriter::new("grandsim", "exponents");
    manifest
        .field("name", &spec.name)
        .field("rate", spec.rate)
        .field(
            "lengths",
            spec.lengths
                .iter()
                .map(|n| n.to_string())
                .collect::<Vec<_>>()
                .join(","),
        )
        .field("p_min", spec.p_min)
        .field("p_max", spec.p_max)
        .field("p_points", spec.p_points)
        .field("svg", spec.svg);
    write_atomic(
        &out_dir.join(format!("{}.manifest.cfg", spec.name)),
        &manifest.finish(),
    )?;

    if spec.svg {
        let success = Plot {
            title: format!("ML success probability estimate, R = {:.5}", spec.rate),
            x_label: "-log10 p".into(),
            y_label: "2^(-n I(1-R))".into(),
            series: spec
                .lengths
                .iter()
                .enumerate()
                .map(|(i, n)| Series {
                    label: format!("n = {n}"),
                    points: rows
                        .iter()
                        .map(|r| (-r.p.log10(), Some(r.success_estimates[i])))
                        .collect(),
                })
                .collect(),
        };
        write_atomic(
            &out_dir.join(format!("{}_success.svg", spec.name)),
            &success.render(),
        )?;
        let queries = Plot {
            title: format!("log2 of the confident query budget, R = {:.5}", spec.rate),
            x_label: "-log10 p".into(),
            y_label: "n g*".into(),
            series: spec
                .lengths
                .iter()
                .map(|&n| Series {
                    label: format!("n = {n}"),
                    points: rows
                        .iter()
                        .map(|r| (-r.p.log10(), r.g_star.map(|g| g * n as f64)))
                        .collect(),
                })
                .collect(),
        };
        write_atomic(
            &out_dir.join(format!("{}_queries.svg", spec.name)),
            &queries.render(),
        )?;
    }
    println!(
        "exponents: wrote {} rows to {}",
        rows.len(),
        csv_path.display()
    );
    Ok(())
}

pub fn load_config(cli: &Cli, command: &str, known: &[&str]) -> Result<ConfigFile, CliError> {
    let Some(path) = &cli.config else {
        return Ok(ConfigFile::default());
    };
    let file = if path.exists() {
        ConfigFile::load(path)?
    } else if let Some(text) = crate::builtin_config(&path.to_string_lossy()) {
        ConfigFile::parse(text)?
    } else {
        return Err(CliError::Config(format!(
            "no config file or bundled config named {}",
            path.display()
        )));
    };
    file.check_known(known)?;
    if let Some(cmd) = file.get("command") {
        if cmd != command {
            return Err(CliError::Config(format!(
                "config is for command {cmd:?}, not {command:?}"
            )));
        }
    }
    Ok(file)
}
