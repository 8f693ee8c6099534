//! The four harness commands: generate, train, compare, report.
//!
//! Every command reads a flat key=value config, writes its outputs under one
//! directory, and records a manifest that doubles as a config able to
//! reproduce the run byte for byte.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use super::config::Config;
use super::manifest::{save_params, write_manifest, write_text};
use super::stats::{mean, median, paired_permutation_test, sample_sd};
use super::HarnessError;
use crate::data::{generate_synthetic, load_csv, save_csv, split_311, Family, LabeledDataset, Split};
use crate::nn::{LayerSpec, NetworkSpec};
use crate::trainer::{
    select_optimal_epoch, train_reinforced, train_supervised, EpochMetrics, Method,
    SupervisedTermWeighting, TrainConfig, TrainRun,
};

const GENERATE_KEYS: &[&str] = &["command", "family", "counts", "shape", "noise", "seed"];

const DATA_KEYS: &[&str] = &[
    "data_file",
    "family",
    "counts",
    "shape",
    "noise",
    "data_seed",
];

const HYPER_KEYS: &[&str] = &[
    "epochs",
    "seed",
    "supervised_rate",
    "policy_rate",
    "tilt_rate",
    "value_rate",
    "c",
    "gamma",
    "epsilon_start",
    "epsilon_end",
    "minibatch",
    "lambda",
    "keep_prob",
    "workers",
    "supervised_term",
    "reinforced_weight",
    "evaluate_test",
];

const COMPARE_ONLY_KEYS: &[&str] = &[
    "methods",
    "splits",
    "split_seed_base",
    "permutation_iterations",
    "permutation_seed",
    "compare_workers",
    "epochs_reinforced",
    "epochs_supervised",
    "epochs_dropout",
    "epochs_dropout+l2",
];

fn train_keys() -> Vec<&'static str> {
    let mut keys = vec!["command", "split_seed", "method", "network"];
    keys.extend_from_slice(DATA_KEYS);
    keys.extend_from_slice(HYPER_KEYS);
    keys
}

fn compare_keys() -> Vec<&'static str> {
    let mut keys = vec!["command", "split_seed", "network"];
    keys.extend_from_slice(DATA_KEYS);
    keys.extend_from_slice(HYPER_KEYS);
    keys.extend_from_slice(COMPARE_ONLY_KEYS);
    keys
}

/// Classification error in percent.
fn error_pct(accuracy: f64) -> f64 {
    (1.0 - accuracy) * 100.0
}

/// Render one optimal-epoch error row: method label plus train, validation,
/// and test error percentages with two decimals. A withheld test set yields
/// an empty final cell.
pub fn format_error_row(
    method: &str,
    train_error: f64,
    val_error: f64,
    test_error: Option<f64>,
) -> String {
    match test_error {
        Some(e) => format!("{method},{train_error:.2},{val_error:.2},{e:.2}"),
        None => format!("{method},{train_error:.2},{val_error:.2},"),
    }
}

fn display_name(method: Method) -> &'static str {
    match method {
        Method::Reinforced => "Reinforced",
        Method::Supervised => "Supervised",
        Method::Dropout => "Dropout",
        Method::DropoutL2 => "Dropout+L2",
    }
}

/// Insert an inverted-dropout layer in front of every dense layer except one
/// that starts the network, i.e. on the hidden activations of the dense
/// stack.
pub fn insert_dropout(spec: &NetworkSpec, keep_prob: f64) -> Result<NetworkSpec, HarnessError> {
    let mut layers = Vec::with_capacity(spec.layers().len() + 2);
    for layer in spec.layers() {
        if matches!(layer, LayerSpec::Dense { .. }) && !layers.is_empty() {
            layers.push(LayerSpec::Dropout { keep_prob });
        }
        layers.push(layer.clone());
    }
    Ok(NetworkSpec::new(layers)?)
}

fn ensure_command(cfg: &Config, expected: &str) -> Result<(), HarnessError> {
    if let Some(cmd) = cfg.get("command") {
        if cmd != expected {
            return Err(HarnessError::Config {
                path: cfg.path().to_path_buf(),
                message: format!("config is for command {cmd:?}, not {expected:?}"),
            });
        }
    }
    Ok(())
}

fn parse_shape(cfg: &Config) -> Result<Vec<usize>, HarnessError> {
    cfg.require_usize_list("shape")
}

fn ensure_out_dir(out_dir: &Path) -> Result<(), HarnessError> {
    fs::create_dir_all(out_dir).map_err(|source| HarnessError::Io {
        path: out_dir.to_path_buf(),
        source,
    })
}

/// Generate a synthetic dataset and write `data.csv` plus its manifest.
pub fn cmd_generate(
    config_path: &Path,
    out_dir: &Path,
    seed_override: Option<u64>,
) -> Result<PathBuf, HarnessError> {
    let cfg = Config::load(config_path)?;
    cfg.ensure_keys(GENERATE_KEYS)?;
    ensure_command(&cfg, "generate")?;

    let family: Family = cfg
        .require("family")?
        .parse()
        .map_err(|e: crate::data::DataError| HarnessError::Config {
            path: config_path.to_path_buf(),
            message: e.to_string(),
        })?;
    let counts = cfg.require_usize_list("counts")?;
    let shape = parse_shape(&cfg)?;
    let noise = cfg.get_f64("noise", 0.0)?;
    let seed = seed_override.unwrap_or(cfg.get_u64("seed", 0)?);

    let dataset = generate_synthetic(family, &counts, &shape, noise, seed)?;

    ensure_out_dir(out_dir)?;
    let data_path = out_dir.join("data.csv");
    save_csv(&dataset, &data_path)?;

    let counts_text: Vec<String> = counts.iter().map(|c| c.to_string()).collect();
    let shape_text: Vec<String> = shape.iter().map(|d| d.to_string()).collect();
    let entries = vec![
        ("command".to_string(), "generate".to_string()),
        ("family".to_string(), family.to_string()),
        ("counts".to_string(), counts_text.join(",")),
        ("shape".to_string(), shape_text.join(",")),
        ("noise".to_string(), format!("{noise}")),
        ("seed".to_string(), format!("{seed}")),
        ("result.rows".to_string(), format!("{}", dataset.len())),
        ("result.artifacts".to_string(), "data.csv".to_string()),
    ];
    write_manifest(&out_dir.join("manifest.txt"), &entries)?;
    Ok(data_path)
}

/// Dataset descriptor: a file path or an inline synthetic recipe. The
/// returned key/value pairs echo the resolved descriptor into manifests.
fn load_dataset(cfg: &Config) -> Result<(LabeledDataset, Vec<(String, String)>), HarnessError> {
    if let Some(file) = cfg.get("data_file") {
        for key in ["family", "counts", "shape", "noise", "data_seed"] {
            if cfg.get(key).is_some() {
                return Err(HarnessError::Config {
                    path: cfg.path().to_path_buf(),
                    message: format!("data_file and {key} are mutually exclusive"),
                });
            }
        }
        // Resolve relative to the config file so manifests stay runnable.
        let base = cfg.path().parent().unwrap_or(Path::new("."));
        let resolved = if Path::new(file).is_absolute() {
            PathBuf::from(file)
        } else {
            base.join(file)
        };
        let dataset = load_csv(&resolved)?;
        let echo = vec![(
            "data_file".to_string(),
            resolved.to_string_lossy().into_owned(),
        )];
        Ok((dataset, echo))
    } else {
        let family: Family = cfg
            .require("family")?
            .parse()
            .map_err(|e: crate::data::DataError| HarnessError::Config {
                path: cfg.path().to_path_buf(),
                message: e.to_string(),
            })?;
        let counts = cfg.require_usize_list("counts")?;
        let shape = parse_shape(cfg)?;
        let noise = cfg.get_f64("noise", 0.0)?;
        let data_seed = cfg.get_u64("data_seed", 0)?;
        let dataset = generate_synthetic(family, &counts, &shape, noise, data_seed)?;
        let counts_text: Vec<String> = counts.iter().map(|c| c.to_string()).collect();
        let shape_text: Vec<String> = shape.iter().map(|d| d.to_string()).collect();
        let echo = vec![
            ("family".to_string(), family.to_string()),
            ("counts".to_string(), counts_text.join(",")),
            ("shape".to_string(), shape_text.join(",")),
            ("noise".to_string(), format!("{noise}")),
            ("data_seed".to_string(), format!("{data_seed}")),
        ];
        Ok((dataset, echo))
    }
}

fn train_config_from(
    cfg: &Config,
    method: Method,
    epochs: usize,
    seed: u64,
) -> Result<TrainConfig, HarnessError> {
    let mut tc = TrainConfig::new(method);
    tc.max_epochs = epochs;
    tc.seed = seed;
    tc.supervised_rate = cfg.get_f64("supervised_rate", tc.supervised_rate)?;
    tc.policy_rate = cfg.get_f64("policy_rate", tc.policy_rate)?;
    tc.tilt_rate = cfg.get_f64("tilt_rate", tc.tilt_rate)?;
    tc.value_rate = cfg.get_f64("value_rate", tc.value_rate)?;
    tc.dampening = cfg.get_f64("c", tc.dampening)?;
    tc.discount = cfg.get_f64("gamma", tc.discount)?;
    tc.epsilon_start = cfg.get_f64("epsilon_start", tc.epsilon_start)?;
    tc.epsilon_end = cfg.get_f64("epsilon_end", tc.epsilon_end)?;
    tc.minibatch_size = cfg.get_usize("minibatch", tc.minibatch_size)?;
    tc.l2_scale = cfg.get_f64("lambda", tc.l2_scale)?;
    tc.keep_prob = cfg.get_f64("keep_prob", tc.keep_prob)?;
    tc.workers = cfg.get_usize("workers", tc.workers)?;
    tc.reinforced_weight = cfg.get_f64("reinforced_weight", tc.reinforced_weight)?;
    tc.evaluate_test = cfg.get_bool("evaluate_test", tc.evaluate_test)?;
    tc.supervised_term = match cfg.get("supervised_term").unwrap_or("unit") {
        "unit" => SupervisedTermWeighting::Unit,
        "advantage" => SupervisedTermWeighting::Advantage,
        other => {
            return Err(HarnessError::Config {
                path: cfg.path().to_path_buf(),
                message: format!("supervised_term must be unit or advantage, got {other:?}"),
            })
        }
    };
    Ok(tc)
}

/// The network actually trained for a method: dropout methods get dropout
/// layers inserted at the configured keep probability.
fn effective_network(
    configured: &NetworkSpec,
    method: Method,
    keep_prob: f64,
) -> Result<NetworkSpec, HarnessError> {
    match method {
        Method::Dropout | Method::DropoutL2 => insert_dropout(configured, keep_prob),
        Method::Reinforced | Method::Supervised => Ok(configured.clone()),
    }
}

fn run_training(
    split: &Split,
    spec: &NetworkSpec,
    tc: &TrainConfig,
) -> Result<TrainRun, HarnessError> {
    let run = match tc.method {
        Method::Reinforced => train_reinforced(split, spec, tc)?,
        _ => train_supervised(split, spec, tc)?,
    };
    Ok(run)
}

fn hyper_entries(tc: &TrainConfig, epochs: usize) -> Vec<(String, String)> {
    let term = match tc.supervised_term {
        SupervisedTermWeighting::Unit => "unit",
        SupervisedTermWeighting::Advantage => "advantage",
    };
    vec![
        ("epochs".to_string(), format!("{epochs}")),
        ("seed".to_string(), format!("{}", tc.seed)),
        ("supervised_rate".to_string(), format!("{}", tc.supervised_rate)),
        ("policy_rate".to_string(), format!("{}", tc.policy_rate)),
        ("tilt_rate".to_string(), format!("{}", tc.tilt_rate)),
        ("value_rate".to_string(), format!("{}", tc.value_rate)),
        ("c".to_string(), format!("{}", tc.dampening)),
        ("gamma".to_string(), format!("{}", tc.discount)),
        ("epsilon_start".to_string(), format!("{}", tc.epsilon_start)),
        ("epsilon_end".to_string(), format!("{}", tc.epsilon_end)),
        ("minibatch".to_string(), format!("{}", tc.minibatch_size)),
        ("lambda".to_string(), format!("{}", tc.l2_scale)),
        ("keep_prob".to_string(), format!("{}", tc.keep_prob)),
        ("workers".to_string(), format!("{}", tc.workers)),
        ("supervised_term".to_string(), term.to_string()),
        ("reinforced_weight".to_string(), format!("{}", tc.reinforced_weight)),
        ("evaluate_test".to_string(), format!("{}", tc.evaluate_test)),
    ]
}

fn curves_to_string(metrics: &[EpochMetrics]) -> String {
    let mut out = String::from("epoch,train_acc,val_acc,test_acc,train_loss,val_loss,test_loss\n");
    for m in metrics {
        let test_acc = m.test_acc.map(|v| format!("{v}")).unwrap_or_default();
        let test_loss = m.test_loss.map(|v| format!("{v}")).unwrap_or_default();
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            m.epoch, m.train_acc, m.val_acc, test_acc, m.train_loss, m.val_loss, test_loss
        );
    }
    out
}

/// Parse a curves.csv written by [`cmd_train`].
pub(crate) fn read_curves(path: &Path) -> Result<Vec<EpochMetrics>, HarnessError> {
    let text = fs::read_to_string(path).map_err(|source| HarnessError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let bad = |line: usize, message: String| HarnessError::Config {
        path: path.to_path_buf(),
        message: format!("line {line}: {message}"),
    };
    let mut metrics = Vec::new();
    for (idx, line) in text.lines().enumerate().skip(1) {
        let line_no = idx + 1;
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 7 {
            return Err(bad(line_no, format!("expected 7 columns, got {}", fields.len())));
        }
        let num = |f: &str| -> Result<f64, HarnessError> {
            f.parse().map_err(|_| bad(line_no, format!("bad number {f:?}")))
        };
        let opt = |f: &str| -> Result<Option<f64>, HarnessError> {
            if f.is_empty() {
                Ok(None)
            } else {
                num(f).map(Some)
            }
        };
        metrics.push(EpochMetrics {
            epoch: fields[0]
                .parse()
                .map_err(|_| bad(line_no, format!("bad epoch {:?}", fields[0])))?,
            train_acc: num(fields[1])?,
            val_acc: num(fields[2])?,
            test_acc: opt(fields[3])?,
            train_loss: num(fields[4])?,
            val_loss: num(fields[5])?,
            test_loss: opt(fields[6])?,
        });
    }
    Ok(metrics)
}

/// Outcome summary of a training run.
#[derive(Debug, Clone)]
pub struct TrainSummary {
    pub method: Method,
    pub optimal_epoch: usize,
    pub train_error: f64,
    pub val_error: f64,
    pub test_error: Option<f64>,
}

impl TrainSummary {
    pub fn row(&self) -> String {
        format_error_row(
            display_name(self.method),
            self.train_error,
            self.val_error,
            self.test_error,
        )
    }
}

/// Train one model from a config: writes `curves.csv`, the optimal-epoch
/// `checkpoint.txt`, and `manifest.txt`. Nothing is written if the run fails.
pub fn cmd_train(
    config_path: &Path,
    out_dir: &Path,
    seed_override: Option<u64>,
) -> Result<TrainSummary, HarnessError> {
    let cfg = Config::load(config_path)?;
    cfg.ensure_keys(&train_keys())?;
    ensure_command(&cfg, "train")?;

    let (dataset, data_echo) = load_dataset(&cfg)?;
    let split_seed = cfg.get_u64("split_seed", 0)?;
    let split = split_311(&dataset, split_seed)?;

    let method: Method = cfg.require("method")?.parse()?;
    let configured: NetworkSpec = cfg.require("network")?.parse()?;
    let epochs = cfg.get_usize("epochs", 100)?;
    let seed = seed_override.unwrap_or(cfg.get_u64("seed", 0)?);
    let tc = train_config_from(&cfg, method, epochs, seed)?;
    let spec = effective_network(&configured, method, tc.keep_prob)?;

    let run = run_training(&split, &spec, &tc)?;
    let optimal = select_optimal_epoch(&run.metrics)?;
    let at_optimal = &run.metrics[optimal];
    let summary = TrainSummary {
        method,
        optimal_epoch: optimal,
        train_error: error_pct(at_optimal.train_acc),
        val_error: error_pct(at_optimal.val_acc),
        test_error: at_optimal.test_acc.map(error_pct),
    };

    ensure_out_dir(out_dir)?;
    write_text(&out_dir.join("curves.csv"), &curves_to_string(&run.metrics))?;
    save_params(&run.checkpoints[optimal], &out_dir.join("checkpoint.txt"))?;

    let mut entries = vec![("command".to_string(), "train".to_string())];
    entries.extend(data_echo);
    entries.push(("split_seed".to_string(), format!("{split_seed}")));
    entries.push(("method".to_string(), method.to_string()));
    entries.push(("network".to_string(), configured.to_string()));
    entries.extend(hyper_entries(&tc, epochs));
    entries.push((
        "result.effective_network".to_string(),
        spec.to_string(),
    ));
    entries.push((
        "result.optimal_epoch".to_string(),
        format!("{}", summary.optimal_epoch),
    ));
    entries.push((
        "result.error_row".to_string(),
        summary.row(),
    ));
    entries.push((
        "result.artifacts".to_string(),
        "curves.csv,checkpoint.txt".to_string(),
    ));
    write_manifest(&out_dir.join("manifest.txt"), &entries)?;
    Ok(summary)
}

/// One per-method row of a comparison report.
#[derive(Debug, Clone)]
pub struct MethodRow {
    pub method: Method,
    pub errors: Vec<f64>,
    pub mean: f64,
    pub sd: f64,
    pub median: f64,
}

/// Outcome of a comparison study.
#[derive(Debug, Clone)]
pub struct CompareSummary {
    pub rows: Vec<MethodRow>,
    pub pairs: Vec<(Method, Method, f64)>,
    pub runs: usize,
}

struct CompareRun {
    method: Method,
    split_seed: u64,
    optimal_epoch: usize,
    test_error: f64,
    gap: f64,
}

/// Train every method over a series of dataset splits; write `report.csv`
/// (per-split errors, summary statistics, pairwise p-values) and the
/// manifest. A failed run aborts the whole report.
pub fn cmd_compare(
    config_path: &Path,
    out_dir: &Path,
    seed_override: Option<u64>,
) -> Result<CompareSummary, HarnessError> {
    let cfg = Config::load(config_path)?;
    cfg.ensure_keys(&compare_keys())?;
    ensure_command(&cfg, "compare")?;

    let methods: Vec<Method> = cfg
        .require("methods")?
        .split(',')
        .map(|m| m.trim().parse())
        .collect::<Result<_, _>>()?;
    if methods.len() < 2 {
        return Err(HarnessError::Config {
            path: config_path.to_path_buf(),
            message: "compare needs at least 2 methods".to_string(),
        });
    }
    let splits = cfg.get_usize("splits", 10)?;
    if splits < 2 {
        return Err(HarnessError::Config {
            path: config_path.to_path_buf(),
            message: "compare needs at least 2 splits".to_string(),
        });
    }
    let split_seed_base = cfg.get_u64("split_seed_base", 1000)?;
    let perm_iterations = cfg.get_usize("permutation_iterations", 10_000)?;
    let perm_seed = cfg.get_u64("permutation_seed", 0)?;
    let compare_workers = cfg.get_usize("compare_workers", 1)?;

    let (dataset, data_echo) = load_dataset(&cfg)?;
    let configured: NetworkSpec = cfg.require("network")?.parse()?;
    let base_epochs = cfg.get_usize("epochs", 100)?;
    let seed = seed_override.unwrap_or(cfg.get_u64("seed", 0)?);

    // (method, split seed) job list, methods major so the report groups rows.
    let mut jobs = Vec::with_capacity(methods.len() * splits);
    for &method in &methods {
        let epochs = cfg.get_usize(&format!("epochs_{method}"), base_epochs)?;
        for s in 0..splits {
            jobs.push((method, epochs, split_seed_base + s as u64));
        }
    }

    let run_one = |&(method, epochs, split_seed): &(Method, usize, u64)| -> Result<CompareRun, HarnessError> {
        let split = split_311(&dataset, split_seed)?;
        let tc = train_config_from(&cfg, method, epochs, seed)?;
        let spec = effective_network(&configured, method, tc.keep_prob)?;
        let run = run_training(&split, &spec, &tc)?;
        let optimal = select_optimal_epoch(&run.metrics)?;
        let at_optimal = &run.metrics[optimal];
        let test_acc = at_optimal.test_acc.ok_or_else(|| HarnessError::Config {
            path: cfg.path().to_path_buf(),
            message: "compare requires evaluate_test=true".to_string(),
        })?;
        Ok(CompareRun {
            method,
            split_seed,
            optimal_epoch: optimal,
            test_error: error_pct(test_acc),
            gap: at_optimal.train_acc - test_acc,
        })
    };
    let runs: Vec<CompareRun> = if compare_workers > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(compare_workers)
            .build()
            .map_err(|e| HarnessError::Config {
                path: config_path.to_path_buf(),
                message: format!("worker pool: {e}"),
            })?;
        pool.install(|| jobs.par_iter().map(run_one).collect::<Result<Vec<_>, _>>())?
    } else {
        jobs.iter().map(run_one).collect::<Result<Vec<_>, _>>()?
    };

    let rows: Vec<MethodRow> = methods
        .iter()
        .map(|&method| {
            let errors: Vec<f64> = runs
                .iter()
                .filter(|r| r.method == method)
                .map(|r| r.test_error)
                .collect();
            MethodRow {
                method,
                mean: mean(&errors),
                sd: sample_sd(&errors),
                median: median(&errors),
                errors,
            }
        })
        .collect();

    let mut pairs = Vec::new();
    for i in 0..rows.len() {
        for j in i + 1..rows.len() {
            let p = paired_permutation_test(
                &rows[i].errors,
                &rows[j].errors,
                perm_iterations,
                perm_seed,
            )?;
            pairs.push((rows[i].method, rows[j].method, p));
        }
    }

    let mut report = String::from("# per-split test error (%)\nmethod,split_seed,test_error\n");
    for r in &runs {
        let _ = writeln!(report, "{},{},{}", r.method, r.split_seed, r.test_error);
    }
    report.push_str("\n# summary over splits\nmethod,mean,sd,median\n");
    for row in &rows {
        let _ = writeln!(report, "{},{},{},{}", row.method, row.mean, row.sd, row.median);
    }
    report.push_str("\n# pairwise significance\nmethod_a,method_b,p_value\n");
    for (a, b, p) in &pairs {
        let _ = writeln!(report, "{a},{b},{p}");
    }

    ensure_out_dir(out_dir)?;
    write_text(&out_dir.join("report.csv"), &report)?;

    let mut entries = vec![("command".to_string(), "compare".to_string())];
    entries.extend(data_echo);
    entries.push((
        "methods".to_string(),
        methods
            .iter()
            .map(Method::to_string)
            .collect::<Vec<_>>()
            .join(","),
    ));
    entries.push(("splits".to_string(), format!("{splits}")));
    entries.push(("split_seed_base".to_string(), format!("{split_seed_base}")));
    entries.push(("network".to_string(), configured.to_string()));
    let tc_echo = train_config_from(&cfg, methods[0], base_epochs, seed)?;
    entries.extend(hyper_entries(&tc_echo, base_epochs));
    for &method in &methods {
        let key = format!("epochs_{method}");
        if let Some(v) = cfg.get(&key) {
            entries.push((key, v.to_string()));
        }
    }
    entries.push((
        "permutation_iterations".to_string(),
        format!("{perm_iterations}"),
    ));
    entries.push(("permutation_seed".to_string(), format!("{perm_seed}")));
    entries.push(("compare_workers".to_string(), format!("{compare_workers}")));
    entries.push(("result.runs".to_string(), format!("{}", runs.len())));
    for (i, r) in runs.iter().enumerate() {
        entries.push((format!("result.run.{i}.method"), r.method.to_string()));
        entries.push((format!("result.run.{i}.split_seed"), format!("{}", r.split_seed)));
        entries.push((
            format!("result.run.{i}.optimal_epoch"),
            format!("{}", r.optimal_epoch),
        ));
        entries.push((
            format!("result.run.{i}.test_error"),
            format!("{:.2}", r.test_error),
        ));
        entries.push((format!("result.run.{i}.gap"), format!("{:.4}", r.gap)));
    }
    for row in &rows {
        entries.push((
            format!("result.{}.summary", row.method),
            format!("{:.2} +- {:.2}, median {:.2}", row.mean, row.sd, row.median),
        ));
    }
    for (a, b, p) in &pairs {
        entries.push((format!("result.p.{a}.vs.{b}"), format!("{p}")));
    }
    entries.push(("result.artifacts".to_string(), "report.csv".to_string()));
    write_manifest(&out_dir.join("manifest.txt"), &entries)?;

    Ok(CompareSummary {
        rows,
        pairs,
        runs: runs.len(),
    })
}

/// Re-render the optimal-epoch error row of a finished training run. The
/// config argument is the run's manifest; curves.csv is read from the
/// manifest's directory and the row written to `<out>/report.csv`.
pub fn cmd_report(manifest_path: &Path, out_dir: &Path) -> Result<TrainSummary, HarnessError> {
    let cfg = Config::load(manifest_path)?;
    ensure_command(&cfg, "train")?;
    let method: Method = cfg.require("method")?.parse()?;
    let run_dir = manifest_path.parent().unwrap_or(Path::new("."));
    let metrics = read_curves(&run_dir.join("curves.csv"))?;
    let optimal = select_optimal_epoch(&metrics)?;
    let at_optimal = &metrics[optimal];
    let summary = TrainSummary {
        method,
        optimal_epoch: optimal,
        train_error: error_pct(at_optimal.train_acc),
        val_error: error_pct(at_optimal.val_acc),
        test_error: at_optimal.test_acc.map(error_pct),
    };
    ensure_out_dir(out_dir)?;
    let text = format!("method,train_error,val_error,test_error\n{}\n", summary.row());
    write_text(&out_dir.join("report.csv"), &text)?;
    Ok(summary)
}
