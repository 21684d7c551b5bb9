//! Experiment runner CLI: parse a config or preset, execute the pipeline
//! (PSWF → data matrix → noise → scan), and emit scan.csv + summary.json.

use std::path::PathBuf;
use std::process::ExitCode;

use prolate_lsm::config::{apply_key, list_presets, preset, ExperimentConfig};
use prolate_lsm::runner::{load_config, run, write_plot_script};
use prolate_lsm::Error;

const USAGE: &str = "\
prolate-lsm: prolate-based linear sampling experiments

USAGE:
    prolate-lsm [--preset NAME | --config PATH] [OPTIONS]
    prolate-lsm --list-presets

OPTIONS:
    --preset NAME     run a named preset (see --list-presets)
    --config PATH     run a key=value config file, a JSON config, or replay a
                      summary.json from an earlier run
    --out DIR         output directory (default: out)
    --seed INT        override the noise seed
    --reg KIND        override the regularization: cutoff | tikhonov
    --alpha FLOAT     override the regularization parameter
    --quad INT        override the LGL quadrature size N_q
    --plot-script     also write a gnuplot companion script (plot.gp)
    --list-presets    list preset names and exit
    --help            show this message
";

struct CliArgs {
    preset: Option<String>,
    config: Option<PathBuf>,
    out: PathBuf,
    seed: Option<u64>,
    reg: Option<String>,
    alpha: Option<String>,
    quad: Option<String>,
    plot_script: bool,
    list: bool,
}

fn parse_args(args: &[String]) -> Result<CliArgs, String> {
    let mut out = CliArgs {
        preset: None,
        config: None,
        out: PathBuf::from("out"),
        seed: None,
        reg: None,
        alpha: None,
        quad: None,
        plot_script: false,
        list: false,
    };
    let mut it = args.iter();
    while let Some(arg) = it.next() {
        let mut value = |flag: &str| {
            it.next()
                .cloned()
                .ok_or_else(|| format!("{flag} expects a value"))
        };
        match arg.as_str() {
            "--preset" => out.preset = Some(value("--preset")?),
            "--config" => out.config = Some(PathBuf::from(value("--config")?)),
            "--out" => out.out = PathBuf::from(value("--out")?),
            "--seed" => {
                out.seed = Some(
                    value("--seed")?
                        .parse()
                        .map_err(|e| format!("--seed: {e}"))?,
                )
            }
            "--reg" => out.reg = Some(value("--reg")?),
            "--alpha" => out.alpha = Some(value("--alpha")?),
            "--quad" => out.quad = Some(value("--quad")?),
            "--plot-script" => out.plot_script = true,
            "--list-presets" => out.list = true,
            "--help" | "-h" => return Err(String::new()),
            other => return Err(format!("unknown argument {other:?}")),
        }
    }
    Ok(out)
}

fn build_config(args: &CliArgs) -> Result<ExperimentConfig, Error> {
    let mut cfg = match (&args.preset, &args.config) {
        (Some(name), None) => preset(name)?,
        (None, Some(path)) => load_config(path)?,
        (Some(_), Some(_)) => {
            return Err(Error::Config("--preset and --config are mutually exclusive".into()))
        }
        (None, None) => {
            return Err(Error::Config("one of --preset or --config is required".into()))
        }
    };
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(reg) = &args.reg {
        apply_key(&mut cfg, "reg", reg)?;
    }
    if let Some(alpha) = &args.alpha {
        apply_key(&mut cfg, "alpha", alpha)?;
    }
    if let Some(quad) = &args.quad {
        apply_key(&mut cfg, "n_q", quad)?;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn main() -> ExitCode {
    let raw: Vec<String> = std::env::args().skip(1).collect();
    let args = match parse_args(&raw) {
        Ok(a) => a,
        Err(msg) => {
            if msg.is_empty() {
                print!("{USAGE}");
                return ExitCode::SUCCESS;
            }
            eprintln!("error: {msg}\n\n{USAGE}");
            return ExitCode::from(2);
        }
    };

    if args.list {
        for (name, desc) in list_presets() {
            println!("{name:<16} {desc}");
        }
        return ExitCode::SUCCESS;
    }

    let cfg = match build_config(&args) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };

    match run(&cfg, &args.out) {
        Ok(artifacts) => {
            if args.plot_script {
                if let Err(e) = write_plot_script(&args.out) {
                    eprintln!("error: plot script: {e}");
                    return ExitCode::FAILURE;
                }
            }
            println!(
                "wrote {} and {} (dim J = {}, {} sampling points, {} ms)",
                artifacts.scan_csv.display(),
                artifacts.summary_json.display(),
                artifacts.summary.dim_j,
                artifacts.scan.records.len(),
                artifacts.summary.wall_time_ms,
            );
            ExitCode::SUCCESS
        }
        Err(e @ Error::Config(_)) | Err(e @ Error::InvalidInput(_)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
