//! CSV dataset files.
//!
//! Format: UTF-8, comma-separated, header `label,f0,...,fN`; labels are
//! 0-based integers, features decimal floats. Image-shaped datasets flatten
//! row-major and record their shape in a `# shape=H,W,C` line directly after
//! the header. Values are written in shortest round-trip form, so
//! save-then-load reproduces a dataset exactly.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::{DataError, LabeledDataset};
use crate::nn::Tensor;

pub fn save_csv(dataset: &LabeledDataset, path: &Path) -> Result<(), DataError> {
    let mut out = String::new();
    let width = dataset.input_shape().iter().product::<usize>();
    out.push_str("label");
    for i in 0..width {
        let _ = write!(out, ",f{i}");
    }
    out.push('\n');
    if dataset.input_shape().len() > 1 {
        let dims: Vec<String> = dataset.input_shape().iter().map(|d| d.to_string()).collect();
        let _ = writeln!(out, "# shape={}", dims.join(","));
    }
    for (input, label) in dataset.iter() {
        let _ = write!(out, "{label}");
        for v in input.values() {
            let _ = write!(out, ",{v}");
        }
        out.push('\n');
    }
    fs::write(path, out).map_err(|source| DataError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn load_csv(path: &Path) -> Result<LabeledDataset, DataError> {
    let text = fs::read_to_string(path).map_err(|source| DataError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut lines = text.lines().enumerate();

    let (_, header) = lines.next().ok_or(DataError::EmptyFile)?;
    let cols: Vec<&str> = header.split(',').collect();
    if cols.first() != Some(&"label") || cols.len() < 2 {
        return Err(DataError::Parse {
            line: 1,
            message: format!("expected header label,f0,..., got {header:?}"),
        });
    }
    for (i, col) in cols[1..].iter().enumerate() {
        if *col != format!("f{i}") {
            return Err(DataError::Parse {
                line: 1,
                message: format!("feature column {} named {col:?}, expected f{i}", i + 1),
            });
        }
    }
    let width = cols.len() - 1;

    let mut shape = vec![width];
    let mut rows: Vec<(usize, &str)> = Vec::new();
    for (idx, line) in lines {
        let line_no = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('#') {
            let rest = rest.trim();
            if line_no == 2 {
                if let Some(dims) = rest.strip_prefix("shape=") {
                    shape = dims
                        .split(',')
                        .map(|d| {
                            d.trim().parse::<usize>().map_err(|_| DataError::Parse {
                                line: line_no,
                                message: format!("bad shape dimension {d:?}"),
                            })
                        })
                        .collect::<Result<Vec<usize>, _>>()?;
                    if shape.iter().product::<usize>() != width {
                        return Err(DataError::Parse {
                            line: line_no,
                            message: format!(
                                "shape {shape:?} does not match {width} feature columns"
                            ),
                        });
                    }
                    continue;
                }
            }
            return Err(DataError::Parse {
                line: line_no,
                message: "unexpected comment line".to_string(),
            });
        }
        rows.push((line_no, line));
    }
    if rows.is_empty() {
        return Err(DataError::Parse {
            line: 1,
            message: "file has a header but no samples".to_string(),
        });
    }

    let mut samples = Vec::with_capacity(rows.len());
    let mut max_label = 0usize;
    for (line_no, line) in rows {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != width + 1 {
            return Err(DataError::Parse {
                line: line_no,
                message: format!(
                    "row has {} fields, expected {} (label + {width} features)",
                    fields.len(),
                    width + 1
                ),
            });
        }
        let label: usize = fields[0].trim().parse().map_err(|_| DataError::Parse {
            line: line_no,
            message: format!("unknown label value {:?}", fields[0]),
        })?;
        max_label = max_label.max(label);
        let mut values = Vec::with_capacity(width);
        for f in &fields[1..] {
            let v: f64 = f.trim().parse().map_err(|_| DataError::Parse {
                line: line_no,
                message: format!("bad feature value {f:?}"),
            })?;
            if !v.is_finite() {
                return Err(DataError::Parse {
                    line: line_no,
                    message: format!("non-finite feature value {f:?}"),
                });
            }
            values.push(v);
        }
        samples.push((
            Tensor::from_values(&shape, values).expect("width checked against shape"),
            label,
        ));
    }

    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "dataset".to_string());
    LabeledDataset::new(stem, max_label + 1, samples)
}
