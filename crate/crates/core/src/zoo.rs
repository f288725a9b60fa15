//! Named parametric state families.
//!
//! Each constructor returns the block form of a well-known state, normalized
//! to unit trace, with its admissible parameter range enforced. The one
//! non-circulant fixture (the three-qubit W state) is exposed as a dense
//! matrix only. Families with a single sharp PPT threshold carry that value
//! as metadata so threshold searches can be checked against it.

use std::collections::BTreeMap;

use crate::assembly::{CirculantState, SmallBlockFamily};
use crate::dense::{ComplexMatrix, DimsProfile, C64};
use crate::error::{Error, Result};
use crate::geometry::{ones_matrix, phase_ones_matrix, DigitVector};

/// Either a block-form state or a dense fixture.
#[derive(Debug, Clone)]
pub enum ZooState {
    Circulant(CirculantState),
    Dense(ComplexMatrix),
}

/// A family's sharp PPT threshold in one parameter.
#[derive(Debug, Clone, Copy)]
pub struct ThresholdInfo {
    pub param: &'static str,
    pub bracket: (f64, f64),
    pub expected: f64,
}

const RANGE_SLACK: f64 = 1e-12;

fn check_range(param: &str, value: f64, min: f64, max: f64) -> Result<()> {
    if !value.is_finite() || value < min - RANGE_SLACK || value > max + RANGE_SLACK {
        return Err(Error::ParamOutOfRange {
            param: param.to_string(),
            value,
            min,
            max,
        });
    }
    Ok(())
}

fn real2(rows: [[f64; 2]; 2]) -> ComplexMatrix {
    ComplexMatrix::from_real_rows(&[&rows[0], &rows[1]])
}

fn normalized_small(dims: DimsProfile, blocks: Vec<ComplexMatrix>) -> Result<CirculantState> {
    let family = SmallBlockFamily::new(dims, blocks)?;
    Ok(CirculantState::new(
        crate::assembly::BlockFamily::Small(family),
        true,
    ))
}

/// Two-qubit state with uniform diagonal inside each subspace and a `-2p`
/// coupling on the off-diagonal pair; PPT exactly for `p <= 1/3`.
pub fn werner(p: f64) -> Result<CirculantState> {
    check_range("p", p, -1.0 / 3.0, 1.0)?;
    let dims = DimsProfile::new(2, 2)?;
    let a = real2([[(1.0 - p) / 4.0, 0.0], [0.0, (1.0 - p) / 4.0]]);
    let b = real2([
        [(1.0 + p) / 4.0, -2.0 * p / 4.0],
        [-2.0 * p / 4.0, (1.0 + p) / 4.0],
    ]);
    normalized_small(dims, vec![a, b])
}

/// Two-qubit state with the `2p` coupling on the diagonal subspace;
/// PPT exactly for `p <= 1/3`.
pub fn isotropic2(p: f64) -> Result<CirculantState> {
    check_range("p", p, -1.0 / 3.0, 1.0)?;
    let dims = DimsProfile::new(2, 2)?;
    let a = real2([
        [(1.0 + p) / 4.0, 2.0 * p / 4.0],
        [2.0 * p / 4.0, (1.0 + p) / 4.0],
    ]);
    let b = real2([[(1.0 - p) / 4.0, 0.0], [0.0, (1.0 - p) / 4.0]]);
    normalized_small(dims, vec![a, b])
}

/// Two-qubit rotation-invariant state on the `(a, b, c)` simplex;
/// PPT exactly on `b <= 1/2` and `c <= 1/2`.
pub fn o2_state(a: f64, b: f64, c: f64) -> Result<CirculantState> {
    for (name, value) in [("a", a), ("b", b), ("c", c)] {
        check_range(name, value, 0.0, 1.0)?;
    }
    if (a + b + c - 1.0).abs() > 1e-9 {
        return Err(Error::BadParam {
            param: "a+b+c".to_string(),
            reason: format!("must sum to 1, got {}", a + b + c),
        });
    }
    let dims = DimsProfile::new(2, 2)?;
    let block_a = real2([
        [(a + 2.0 * b) / 4.0, (2.0 * b - a) / 4.0],
        [(2.0 * b - a) / 4.0, (a + 2.0 * b) / 4.0],
    ]);
    let block_b = real2([
        [(a + 2.0 * c) / 4.0, (a - 2.0 * c) / 4.0],
        [(a - 2.0 * c) / 4.0, (a + 2.0 * c) / 4.0],
    ]);
    normalized_small(dims, vec![block_a, block_b])
}

/// The `n`-fold qudit GHZ projector: a single all-ones block over `d` on the
/// zero label.
pub fn ghz(d: usize, n: usize) -> Result<CirculantState> {
    let dims = DimsProfile::new(d, n)?;
    let block = ones_matrix(d).scaled(1.0 / d as f64);
    let family = SmallBlockFamily::from_labeled(dims, vec![(DigitVector::zero(d, n - 1), block)])?;
    Ok(CirculantState::new(
        crate::assembly::BlockFamily::Small(family),
        true,
    ))
}

/// Generalized Bell projector: the GHZ projector twisted by the `alpha`-th
/// phase power and shifted onto the `nu` subspace. The `d^n` states over all
/// `(alpha, nu)` form an orthonormal basis.
pub fn bell_state(d: usize, n: usize, alpha: usize, nu: &DigitVector) -> Result<CirculantState> {
    let dims = DimsProfile::new(d, n)?;
    if alpha >= d {
        return Err(Error::ParamOutOfRange {
            param: "alpha".to_string(),
            value: alpha as f64,
            min: 0.0,
            max: (d - 1) as f64,
        });
    }
    if nu.base() != d || nu.len() != n - 1 {
        return Err(Error::BadParam {
            param: "nu".to_string(),
            reason: format!("expected {} base-{} digits", n - 1, d),
        });
    }
    let block = phase_ones_matrix(d, alpha).scaled(1.0 / d as f64);
    let family = SmallBlockFamily::from_labeled(dims, vec![(nu.clone(), block)])?;
    Ok(CirculantState::new(
        crate::assembly::BlockFamily::Small(family),
        true,
    ))
}

/// Mixture of white noise and the GHZ projector,
/// `(1-s)/d^n * 1 + s |GHZ><GHZ|`; PPT exactly for
/// `s <= 1/(d^(n-1) + 1)`.
pub fn ghz_isotropic(d: usize, n: usize, s: f64) -> Result<CirculantState> {
    let dims = DimsProfile::new(d, n)?;
    let min = -1.0 / (dims.total() as f64 - 1.0);
    check_range("s", s, min, 1.0)?;
    let noise = 1.0 / dims.total() as f64 * (1.0 - s);
    let count = dims.total() / d;
    let mut blocks = vec![ComplexMatrix::identity(d).scaled(noise); count];
    blocks[0] = blocks[0]
        .add(&ones_matrix(d).scaled(s / d as f64))
        .expect("same shape");
    normalized_small(dims, blocks)
}

/// Expected PPT threshold of [`ghz_isotropic`] in `s`.
pub fn ghz_isotropic_threshold(d: usize, n: usize) -> f64 {
    1.0 / (d.pow(n as u32 - 1) as f64 + 1.0)
}

/// Two-parameter `n`-qubit family: every block is `[[1, e], [e, 1]] / 2^n`
/// with `e = 1` on labels below `2^(n-2)`, `e = c` on the next labels, and
/// `e = d` on the all-ones label. Partial transposes permute the couplings
/// `e` among the blocks while every diagonal stays `1/2^n`, so the whole
/// admissible square is PPT.
pub fn two_param(n: usize, c: f64, d: f64) -> Result<CirculantState> {
    if n < 3 {
        return Err(Error::InvalidDims { d: 2, n });
    }
    let dims = DimsProfile::new(2, n)?;
    let bound = 1.0 / dims.total() as f64;
    check_range("c", c, -bound, bound)?;
    check_range("d", d, -bound, bound)?;
    let scale = 1.0 / dims.total() as f64;
    let label_count = dims.total() / 2;
    let blocks = (0..label_count)
        .map(|l| {
            let e = if l < label_count / 2 {
                1.0
            } else if l < label_count - 1 {
                c
            } else {
                d
            };
            real2([[scale, e * scale], [e * scale, scale]])
        })
        .collect();
    normalized_small(dims, blocks)
}

/// The three-qubit W density matrix, which is not supported on any
/// shifted-diagonal decomposition; provided dense as a counterexample
/// fixture.
pub fn w_state() -> ComplexMatrix {
    let mut rho = ComplexMatrix::zeros(8, 8);
    for &r in &[1usize, 2, 4] {
        for &c in &[1usize, 2, 4] {
            rho.set(r, c, C64::new(1.0 / 3.0, 0.0));
        }
    }
    rho
}

/// Registry of the named families.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FamilyKind {
    Werner,
    Isotropic2,
    O2,
    Ghz,
    Bell,
    GhzIsotropic,
    TwoParam,
    W,
}

impl FamilyKind {
    pub fn all() -> &'static [FamilyKind] {
        &[
            FamilyKind::Werner,
            FamilyKind::Isotropic2,
            FamilyKind::O2,
            FamilyKind::Ghz,
            FamilyKind::Bell,
            FamilyKind::GhzIsotropic,
            FamilyKind::TwoParam,
            FamilyKind::W,
        ]
    }

    pub fn name(&self) -> &'static str {
        match self {
            FamilyKind::Werner => "werner",
            FamilyKind::Isotropic2 => "isotropic2",
            FamilyKind::O2 => "o2",
            FamilyKind::Ghz => "ghz",
            FamilyKind::Bell => "bell",
            FamilyKind::GhzIsotropic => "ghz-isotropic",
            FamilyKind::TwoParam => "two-param",
            FamilyKind::W => "w",
        }
    }

    pub fn lookup(name: &str) -> Result<FamilyKind> {
        FamilyKind::all()
            .iter()
            .copied()
            .find(|k| k.name() == name)
            .ok_or_else(|| Error::UnknownFamily(name.to_string()))
    }

    pub fn summary(&self) -> &'static str {
        match self {
            FamilyKind::Werner => "2-qubit state, PPT iff p <= 1/3 (param p)",
            FamilyKind::Isotropic2 => "2-qubit state, PPT iff p <= 1/3 (param p)",
            FamilyKind::O2 => {
                "2-qubit simplex family, PPT iff b <= 1/2 and c <= 1/2 (params a, b, c)"
            }
            FamilyKind::Ghz => "n-qudit GHZ projector",
            FamilyKind::Bell => "generalized Bell projector (params alpha, nu)",
            FamilyKind::GhzIsotropic => "GHZ/noise mixture, PPT iff s <= 1/(d^(n-1)+1) (param s)",
            FamilyKind::TwoParam => {
                "n-qubit two-coupling family, PPT everywhere on its admissible square (params c, d)"
            }
            FamilyKind::W => "3-qubit W state, dense non-circulant fixture",
        }
    }

    /// Default `(d, n)`; families with fixed dimensions reject overrides.
    pub fn default_dims(&self) -> (usize, usize) {
        match self {
            FamilyKind::Werner | FamilyKind::Isotropic2 | FamilyKind::O2 => (2, 2),
            FamilyKind::Ghz | FamilyKind::Bell | FamilyKind::GhzIsotropic => (2, 3),
            FamilyKind::TwoParam | FamilyKind::W => (2, 3),
        }
    }

    pub fn dims_are_free(&self) -> bool {
        matches!(
            self,
            FamilyKind::Ghz | FamilyKind::Bell | FamilyKind::GhzIsotropic
        )
    }

    pub fn param_names(&self) -> &'static [&'static str] {
        match self {
            FamilyKind::Werner | FamilyKind::Isotropic2 => &["p"],
            FamilyKind::O2 => &["a", "b", "c"],
            FamilyKind::Ghz => &[],
            FamilyKind::Bell => &["alpha", "nu"],
            FamilyKind::GhzIsotropic => &["s"],
            FamilyKind::TwoParam => &["c", "d"],
            FamilyKind::W => &[],
        }
    }

    /// Sharp single-parameter PPT threshold, when the family has one.
    pub fn threshold_info(&self, d: usize, n: usize) -> Option<ThresholdInfo> {
        match self {
            FamilyKind::Werner | FamilyKind::Isotropic2 => Some(ThresholdInfo {
                param: "p",
                bracket: (0.0, 1.0),
                expected: 1.0 / 3.0,
            }),
            FamilyKind::GhzIsotropic => Some(ThresholdInfo {
                param: "s",
                bracket: (0.0, 1.0),
                expected: ghz_isotropic_threshold(d, n),
            }),
            _ => None,
        }
    }

    /// Builds the family at the given dimensions and parameters. Parameter
    /// values arrive as strings (the CLI surface); unknown names are
    /// rejected.
    pub fn build(&self, d: usize, n: usize, params: &BTreeMap<String, String>) -> Result<ZooState> {
        let (fixed_d, fixed_n) = self.default_dims();
        if !self.dims_are_free() {
            let n_ok = matches!(self, FamilyKind::TwoParam) || n == fixed_n;
            if d != fixed_d || !n_ok {
                return Err(Error::BadParam {
                    param: "dims".to_string(),
                    reason: format!(
                        "family {} is defined for d = {fixed_d}{}",
                        self.name(),
                        if matches!(self, FamilyKind::TwoParam) {
                            String::new()
                        } else {
                            format!(", n = {fixed_n}")
                        }
                    ),
                });
            }
        }
        for key in params.keys() {
            if !self.param_names().contains(&key.as_str()) {
                return Err(Error::BadParam {
                    param: key.clone(),
                    reason: format!(
                        "family {} accepts parameters {:?}",
                        self.name(),
                        self.param_names()
                    ),
                });
            }
        }
        match self {
            FamilyKind::Werner => Ok(ZooState::Circulant(werner(float_param(params, "p")?)?)),
            FamilyKind::Isotropic2 => {
                Ok(ZooState::Circulant(isotropic2(float_param(params, "p")?)?))
            }
            FamilyKind::O2 => {
                let b = float_param(params, "b")?;
                let c = float_param(params, "c")?;
                let a = match params.get("a") {
                    Some(_) => float_param(params, "a")?,
                    None => 1.0 - b - c,
                };
                Ok(ZooState::Circulant(o2_state(a, b, c)?))
            }
            FamilyKind::Ghz => Ok(ZooState::Circulant(ghz(d, n)?)),
            FamilyKind::Bell => {
                let alpha = match params.get("alpha") {
                    Some(text) => text.parse::<usize>().map_err(|_| Error::BadParam {
                        param: "alpha".to_string(),
                        reason: format!("expected a non-negative integer, got {text:?}"),
                    })?,
                    None => 0,
                };
                let nu = match params.get("nu") {
                    Some(text) => DigitVector::parse(d, text)?,
                    None => DigitVector::zero(d, n - 1),
                };
                Ok(ZooState::Circulant(bell_state(d, n, alpha, &nu)?))
            }
            FamilyKind::GhzIsotropic => Ok(ZooState::Circulant(ghz_isotropic(
                d,
                n,
                float_param(params, "s")?,
            )?)),
            FamilyKind::TwoParam => Ok(ZooState::Circulant(two_param(
                n,
                float_param(params, "c")?,
                float_param(params, "d")?,
            )?)),
            FamilyKind::W => Ok(ZooState::Dense(w_state())),
        }
    }

    /// Builds with a single named parameter overriding `params`; the hook
    /// used by threshold bisection and sweeps.
    pub fn build_with(
        &self,
        d: usize,
        n: usize,
        params: &BTreeMap<String, String>,
        name: &str,
        value: f64,
    ) -> Result<ZooState> {
        let mut merged = params.clone();
        merged.insert(name.to_string(), format!("{value:.17e}"));
        self.build(d, n, &merged)
    }
}

fn float_param(params: &BTreeMap<String, String>, name: &str) -> Result<f64> {
    let text = params.get(name).ok_or_else(|| Error::BadParam {
        param: name.to_string(),
        reason: "missing (pass --param name=value)".to_string(),
    })?;
    text.parse::<f64>().map_err(|_| Error::BadParam {
        param: name.to_string(),
        reason: format!("expected a number, got {text:?}"),
    })
}
