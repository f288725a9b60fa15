//! State specification files.
//!
//! A state file is a JSON document with the local dimension `d`, the factor
//! count `n`, a scheme tag ("small", "sigma" or "xi" with an optional digit
//! position `k`, defaulting to the last digit), the normalization flag and a
//! label-to-block map. Blocks are row-major arrays of `[re, im]` pairs;
//! labels are base-`d` digit strings ("01") for small families and a single
//! class digit ("0") for big ones. Omitted labels mean zero blocks. Values
//! are parsed as IEEE doubles; exporting uses shortest round-trip notation,
//! so export followed by import reproduces the dense matrix exactly.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::assembly::{BigBlockFamily, BlockFamily, CirculantState, SmallBlockFamily};
use crate::dense::{ComplexMatrix, DimsProfile, C64};
use crate::error::{Error, Result};
use crate::geometry::{DigitVector, Scheme};

/// Serialized form of a circulant state.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StateFile {
    pub d: usize,
    pub n: usize,
    /// "small" | "sigma" | "xi"
    pub scheme: String,
    /// Digit position for the "xi" scheme (1-based); defaults to `n - 1`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(default)]
    pub normalized: bool,
    /// Label -> row-major `[re, im]` entries.
    pub blocks: BTreeMap<String, Vec<[f64; 2]>>,
}

fn matrix_to_pairs(m: &ComplexMatrix) -> Vec<[f64; 2]> {
    m.data().iter().map(|z| [z.re, z.im]).collect()
}

fn pairs_to_matrix(label: &str, pairs: &[[f64; 2]], size: usize) -> Result<ComplexMatrix> {
    if pairs.len() != size * size {
        return Err(Error::BlockShape {
            label: label.to_string(),
            expected: size,
            rows: pairs.len(),
            cols: 1,
        });
    }
    let data: Vec<C64> = pairs.iter().map(|&[re, im]| C64::new(re, im)).collect();
    ComplexMatrix::new(size, size, data)
}

/// Serializes a state; zero blocks are omitted.
pub fn state_to_file(state: &CirculantState) -> StateFile {
    let dims = state.dims();
    let mut blocks = BTreeMap::new();
    let scheme;
    let mut k = None;
    match state.family() {
        BlockFamily::Small(f) => {
            scheme = "small".to_string();
            for (idx, block) in f.blocks().iter().enumerate() {
                if block.max_abs() > 0.0 {
                    let label = DigitVector::from_index(dims.d(), dims.n() - 1, idx);
                    blocks.insert(label.to_string(), matrix_to_pairs(block));
                }
            }
        }
        BlockFamily::Big(f) => {
            match f.scheme() {
                Scheme::Sigma => scheme = "sigma".to_string(),
                Scheme::Xi { k: pos } => {
                    scheme = "xi".to_string();
                    k = Some(pos);
                }
            }
            for (alpha, block) in f.blocks().iter().enumerate() {
                if block.max_abs() > 0.0 {
                    blocks.insert(alpha.to_string(), matrix_to_pairs(block));
                }
            }
        }
    }
    StateFile {
        d: dims.d(),
        n: dims.n(),
        scheme,
        k,
        normalized: state.is_normalized(),
        blocks,
    }
}

/// Deserializes a state, validating labels, shapes and Hermiticity.
pub fn file_to_state(file: &StateFile) -> Result<CirculantState> {
    let dims = DimsProfile::new(file.d, file.n)?;
    if dims.n() < 2 {
        return Err(Error::InvalidDims {
            d: file.d,
            n: file.n,
        });
    }
    let family = match file.scheme.as_str() {
        "small" => {
            if file.k.is_some() {
                return Err(Error::StateFile(
                    "the small scheme takes no digit position k".to_string(),
                ));
            }
            let mut labeled = Vec::new();
            for (label, pairs) in &file.blocks {
                let digits = DigitVector::parse(dims.d(), label)?;
                if digits.len() != dims.n() - 1 {
                    return Err(Error::BadBlockLabel {
                        label: label.clone(),
                        reason: format!("expected {} digits", dims.n() - 1),
                    });
                }
                labeled.push((digits, pairs_to_matrix(label, pairs, dims.d())?));
            }
            BlockFamily::Small(SmallBlockFamily::from_labeled(dims, labeled)?)
        }
        "sigma" | "xi" => {
            let scheme = match file.scheme.as_str() {
                "sigma" => {
                    if file.k.is_some() {
                        return Err(Error::StateFile(
                            "the sigma scheme takes no digit position k".to_string(),
                        ));
                    }
                    Scheme::Sigma
                }
                _ => Scheme::Xi {
                    k: file.k.unwrap_or(dims.n() - 1),
                },
            };
            scheme.validate(dims)?;
            let size = dims.total() / dims.d();
            let mut blocks = vec![ComplexMatrix::zeros(size, size); dims.d()];
            let mut seen = vec![false; dims.d()];
            for (label, pairs) in &file.blocks {
                let alpha: usize = label.parse().map_err(|_| Error::BadBlockLabel {
                    label: label.clone(),
                    reason: "expected a class digit".to_string(),
                })?;
                if alpha >= dims.d() {
                    return Err(Error::InvalidDigit {
                        digit: alpha,
                        base: dims.d(),
                    });
                }
                if seen[alpha] {
                    return Err(Error::DuplicateBlock {
                        label: label.clone(),
                    });
                }
                seen[alpha] = true;
                blocks[alpha] = pairs_to_matrix(label, pairs, size)?;
            }
            BlockFamily::Big(BigBlockFamily::new(dims, scheme, blocks)?)
        }
        other => {
            return Err(Error::StateFile(format!(
                "unknown scheme {other:?}; expected \"small\", \"sigma\" or \"xi\""
            )))
        }
    };
    if file.normalized {
        let trace = family.total_trace();
        if (trace - 1.0).abs() > 1e-9 {
            return Err(Error::StateFile(format!(
                "file claims a normalized state but the total trace is {trace}"
            )));
        }
    }
    Ok(CirculantState::new(family, file.normalized))
}

/// Parses a state file from JSON text.
pub fn state_from_json(text: &str) -> Result<CirculantState> {
    let file: StateFile =
        serde_json::from_str(text).map_err(|e| Error::StateFile(e.to_string()))?;
    file_to_state(&file)
}

/// Serializes a state to pretty JSON.
pub fn state_to_json(state: &CirculantState) -> String {
    serde_json::to_string_pretty(&state_to_file(state)).expect("state files always serialize")
}
