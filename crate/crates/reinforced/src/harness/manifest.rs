//! Manifest and checkpoint files.
//!
//! Manifests are ordered key=value text with `result.*` keys for outcomes,
//! so every manifest doubles as a config file that reproduces its run.
//! Checkpoints store one parameter tensor per line: name, x-separated shape,
//! then values in shortest round-trip form.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::HarnessError;
use crate::nn::{ParameterSet, Tensor};

pub(crate) fn write_text(path: &Path, text: &str) -> Result<(), HarnessError> {
    fs::write(path, text).map_err(|source| HarnessError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub(crate) fn write_manifest(path: &Path, entries: &[(String, String)]) -> Result<(), HarnessError> {
    let mut out = String::new();
    for (key, value) in entries {
        let _ = writeln!(out, "{key}={value}");
    }
    write_text(path, &out)
}

/// Save a parameter set; values round-trip exactly.
pub fn save_params(params: &ParameterSet, path: &Path) -> Result<(), HarnessError> {
    let mut out = String::new();
    for (name, tensor) in params.iter() {
        let dims: Vec<String> = tensor.shape().iter().map(|d| d.to_string()).collect();
        let _ = write!(out, "{name} {}", dims.join("x"));
        for v in tensor.values() {
            let _ = write!(out, " {v}");
        }
        out.push('\n');
    }
    write_text(path, &out)
}

/// Load a parameter set saved by [`save_params`].
pub fn load_params(path: &Path) -> Result<ParameterSet, HarnessError> {
    let text = fs::read_to_string(path).map_err(|source| HarnessError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let bad = |line: usize, message: String| HarnessError::Config {
        path: path.to_path_buf(),
        message: format!("line {line}: {message}"),
    };
    let mut params = ParameterSet::new();
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let mut fields = line.split_whitespace();
        let name = fields
            .next()
            .ok_or_else(|| bad(line_no, "missing parameter name".to_string()))?;
        let shape: Vec<usize> = fields
            .next()
            .ok_or_else(|| bad(line_no, "missing shape".to_string()))?
            .split('x')
            .map(|d| {
                d.parse::<usize>()
                    .map_err(|_| bad(line_no, format!("bad dimension {d:?}")))
            })
            .collect::<Result<_, _>>()?;
        let values: Vec<f64> = fields
            .map(|f| {
                f.parse::<f64>()
                    .map_err(|_| bad(line_no, format!("bad value {f:?}")))
            })
            .collect::<Result<_, _>>()?;
        let tensor = Tensor::from_values(&shape, values)
            .map_err(|e| bad(line_no, e.to_string()))?;
        params
            .push(name, tensor)
            .map_err(|e| bad(line_no, e.to_string()))?;
    }
    Ok(params)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nn::{build_network, NetworkSpec};

    #[test]
    fn checkpoint_round_trip_is_exact() {
        let spec: NetworkSpec = "dense(4,6)|relu|dense(6,3)|softmax(3)".parse().unwrap();
        let params = build_network(&spec, 123);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("checkpoint.txt");
        save_params(&params, &path).unwrap();
        let back = load_params(&path).unwrap();
        assert_eq!(params, back);
    }

    #[test]
    fn corrupt_checkpoints_are_rejected_with_line_numbers() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("broken.txt");
        fs::write(&path, "layer0.weight 2x2 0.5 0.5 0.5\n").unwrap();
        match load_params(&path) {
            Err(HarnessError::Config { message, .. }) => assert!(message.starts_with("line 1")),
            other => panic!("expected config error, got {other:?}"),
        }
    }
}
