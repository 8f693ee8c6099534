use std::path::PathBuf;
use std::process::ExitCode;

use reinforced::harness::{
    cmd_compare, cmd_generate, cmd_report, cmd_train, HarnessError,
};

const USAGE: &str = "usage: reinforced <generate|train|compare|report> --config <path> [--seed <int>] [--out <dir>]

  generate   write a synthetic dataset (data.csv) from a config
  train      train one model; writes curves.csv, checkpoint.txt, manifest.txt
  compare    train every method over several splits; writes report.csv
  report     re-render the optimal-epoch error row of a finished train run
             (--config is the run's manifest.txt)

  --config   config file (flat key=value lines; # comments)
  --seed     override the config's seed
  --out      output directory (default: out)";

struct Args {
    command: String,
    config: PathBuf,
    out: PathBuf,
    seed: Option<u64>,
}

fn parse_args(argv: &[String]) -> Result<Args, String> {
    let mut command = None;
    let mut config = None;
    let mut out = PathBuf::from("out");
    let mut seed = None;
    let mut iter = argv.iter();
    while let Some(arg) = iter.next() {
        match arg.as_str() {
            "--config" => {
                let v = iter.next().ok_or("--config needs a path")?;
                config = Some(PathBuf::from(v));
            }
            "--out" => {
                let v = iter.next().ok_or("--out needs a directory")?;
                out = PathBuf::from(v);
            }
            "--seed" => {
                let v = iter.next().ok_or("--seed needs an integer")?;
                seed = Some(v.parse::<u64>().map_err(|_| format!("bad seed {v:?}"))?);
            }
            "--help" | "-h" => return Err(String::new()),
            other if command.is_none() && !other.starts_with('-') => {
                command = Some(other.to_string());
            }
            other => return Err(format!("unexpected argument {other:?}")),
        }
    }
    Ok(Args {
        command: command.ok_or("missing command")?,
        config: config.ok_or("missing --config")?,
        out,
        seed,
    })
}

fn run(args: &Args) -> Result<(), HarnessError> {
    match args.command.as_str() {
        "generate" => {
            let path = cmd_generate(&args.config, &args.out, args.seed)?;
            println!("wrote {}", path.display());
        }
        "train" => {
            let summary = cmd_train(&args.config, &args.out, args.seed)?;
            println!(
                "optimal epoch {} | method,train_error,val_error,test_error | {}",
                summary.optimal_epoch,
                summary.row()
            );
        }
        "compare" => {
            let summary = cmd_compare(&args.config, &args.out, args.seed)?;
            println!("{} training runs", summary.runs);
            for row in &summary.rows {
                println!(
                    "{}: {:.2} +- {:.2} (median {:.2})",
                    row.method, row.mean, row.sd, row.median
                );
            }
            for (a, b, p) in &summary.pairs {
                println!("p[{a} vs {b}] = {p}");
            }
        }
        "report" => {
            let summary = cmd_report(&args.config, &args.out)?;
            println!("{}", summary.row());
        }
        other => {
            return Err(HarnessError::Usage(format!("unknown command {other:?}")));
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().skip(1).collect();
    let args = match parse_args(&argv) {
        Ok(args) => args,
        Err(msg) => {
            if !msg.is_empty() {
                eprintln!("error: {msg}");
            }
            eprintln!("{USAGE}");
            return ExitCode::from(2);
        }
    };
    if let Err(e) = run(&args) {
        eprintln!("error: {e}");
        return ExitCode::FAILURE;
    }
    ExitCode::SUCCESS
}
