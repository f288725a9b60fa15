//! Cyclic subspace machinery.
//!
//! A composite space of `n` factors with local dimension `d` splits into
//! `d^(n-1)` shifted-diagonal subspaces of dimension `d`, one per base-`d`
//! digit string of length `n-1`. Grouping those labels by digit sum or by a
//! fixed digit yields the coarser split into `d` subspaces of dimension
//! `d^(n-1)`. This module generates the structural matrices (cyclic shift,
//! reflection, phase, all-ones and phase-twisted all-ones) and the bases of
//! all of those subspaces, including the reflected bases that support
//! partially transposed operators.

use std::fmt;

use crate::dense::{ComplexMatrix, DimsProfile, C64};
use crate::error::{Error, Result};

/// A string of `len` base-`d` digits, leftmost digit most significant.
///
/// Labels the shifted-diagonal subspaces and the blocks of a block family.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DigitVector {
    base: usize,
    digits: Vec<usize>,
}

impl DigitVector {
    pub fn new(base: usize, digits: Vec<usize>) -> Result<Self> {
        if base < 2 {
            return Err(Error::InvalidDims { d: base, n: 1 });
        }
        for &digit in &digits {
            if digit >= base {
                return Err(Error::InvalidDigit { digit, base });
            }
        }
        Ok(Self { base, digits })
    }

    pub fn zero(base: usize, len: usize) -> Self {
        Self {
            base,
            digits: vec![0; len],
        }
    }

    /// Decodes `index` into `len` digits (bijective on `[0, base^len)`).
    pub fn from_index(base: usize, len: usize, mut index: usize) -> Self {
        let mut digits = vec![0; len];
        for slot in (0..len).rev() {
            digits[slot] = index % base;
            index /= base;
        }
        Self { base, digits }
    }

    pub fn to_index(&self) -> usize {
        self.digits.iter().fold(0, |acc, &x| acc * self.base + x)
    }

    pub fn base(&self) -> usize {
        self.base
    }

    pub fn len(&self) -> usize {
        self.digits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.digits.is_empty()
    }

    pub fn digit(&self, i: usize) -> usize {
        self.digits[i]
    }

    pub fn digits(&self) -> &[usize] {
        &self.digits
    }

    pub fn is_zero(&self) -> bool {
        self.digits.iter().all(|&x| x == 0)
    }

    pub fn digit_sum_mod_base(&self) -> usize {
        self.digits.iter().sum::<usize>() % self.base
    }

    /// Digit-wise addition mod base.
    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.base != other.base {
            return Err(Error::BaseMismatch {
                left: self.base,
                right: other.base,
            });
        }
        if self.len() != other.len() {
            return Err(Error::LengthMismatch {
                left: self.len(),
                right: other.len(),
            });
        }
        let digits = self
            .digits
            .iter()
            .zip(&other.digits)
            .map(|(a, b)| (a + b) % self.base)
            .collect();
        Ok(Self {
            base: self.base,
            digits,
        })
    }

    /// Digit-wise multiplication by `k` mod base.
    pub fn scaled(&self, k: usize) -> Self {
        Self {
            base: self.base,
            digits: self.digits.iter().map(|&x| (x * k) % self.base).collect(),
        }
    }

    /// All `base^len` digit vectors in index order.
    pub fn all(base: usize, len: usize) -> impl Iterator<Item = DigitVector> {
        (0..base.pow(len as u32)).map(move |i| DigitVector::from_index(base, len, i))
    }

    /// Parses a label like "012" with one decimal digit per slot.
    pub fn parse(base: usize, text: &str) -> Result<Self> {
        let mut digits = Vec::with_capacity(text.len());
        for ch in text.chars() {
            let digit = ch.to_digit(10).ok_or_else(|| Error::BadBlockLabel {
                label: text.to_string(),
                reason: format!("invalid digit character {ch:?}"),
            })? as usize;
            if digit >= base {
                return Err(Error::InvalidDigit { digit, base });
            }
            digits.push(digit);
        }
        Ok(Self { base, digits })
    }
}

impl fmt::Display for DigitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &d in &self.digits {
            write!(f, "{d}")?;
        }
        Ok(())
    }
}

/// Selects which of the last `n-1` factors a partial transposition touches;
/// the first factor is never transposed. Bit `t` acts on factor `t+1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TransposeMask {
    bits: Vec<bool>,
}

impl TransposeMask {
    pub fn new(bits: Vec<bool>) -> Self {
        Self { bits }
    }

    pub fn zero(len: usize) -> Self {
        Self {
            bits: vec![false; len],
        }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn bit(&self, i: usize) -> bool {
        self.bits[i]
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn is_zero(&self) -> bool {
        self.bits.iter().all(|&b| !b)
    }

    pub fn xor(&self, other: &Self) -> Result<Self> {
        if self.len() != other.len() {
            return Err(Error::LengthMismatch {
                left: self.len(),
                right: other.len(),
            });
        }
        Ok(Self {
            bits: self
                .bits
                .iter()
                .zip(&other.bits)
                .map(|(a, b)| a ^ b)
                .collect(),
        })
    }

    /// All `2^len` masks, in the index order of their bit strings.
    pub fn all(len: usize) -> Vec<TransposeMask> {
        (0..1usize << len)
            .map(|idx| {
                let bits = (0..len).map(|t| (idx >> (len - 1 - t)) & 1 == 1).collect();
                TransposeMask::new(bits)
            })
            .collect()
    }

    /// Full per-factor mask of length `n` with the leading factor fixed off.
    pub fn to_factor_mask(&self) -> Vec<bool> {
        let mut full = Vec::with_capacity(self.bits.len() + 1);
        full.push(false);
        full.extend_from_slice(&self.bits);
        full
    }

    /// Parses a bit string like "01".
    pub fn parse(text: &str) -> Result<Self> {
        let mut bits = Vec::with_capacity(text.len());
        for ch in text.chars() {
            match ch {
                '0' => bits.push(false),
                '1' => bits.push(true),
                _ => {
                    return Err(Error::BadBlockLabel {
                        label: text.to_string(),
                        reason: format!("mask characters must be 0 or 1, got {ch:?}"),
                    })
                }
            }
        }
        Ok(Self { bits })
    }
}

impl fmt::Display for TransposeMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            write!(f, "{}", if b { '1' } else { '0' })?;
        }
        Ok(())
    }
}

/// `omega^k` for `omega = exp(2 pi i / d)`, exact on the quarter points.
pub fn root_of_unity(d: usize, k: usize) -> C64 {
    let k = k % d;
    if (4 * k).is_multiple_of(d) {
        return match (4 * k / d) % 4 {
            0 => C64::new(1.0, 0.0),
            1 => C64::new(0.0, 1.0),
            2 => C64::new(-1.0, 0.0),
            _ => C64::new(0.0, -1.0),
        };
    }
    C64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / d as f64)
}

/// Cyclic shift to the `m`-th power: `S^m e_i = e_{i+m mod d}`.
pub fn shift_matrix(d: usize, m: usize) -> ComplexMatrix {
    let m = m % d;
    ComplexMatrix::from_fn(d, d, |i, j| {
        if i == (j + m) % d {
            C64::new(1.0, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    })
}

/// Involutive reflection: `e_0 -> e_0`, `e_k -> e_{d-k}`.
pub fn reflection_matrix(d: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(d, d, |i, j| {
        if (i + j) % d == 0 {
            C64::new(1.0, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    })
}

/// Diagonal phase operator to the `alpha`-th power: `e_k -> omega^{alpha k} e_k`.
pub fn phase_matrix(d: usize, alpha: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(d, d, |i, j| {
        if i == j {
            root_of_unity(d, (alpha * i) % d)
        } else {
            C64::new(0.0, 0.0)
        }
    })
}

/// All-ones d x d matrix (the sum of all cyclic shift powers); rank 1 with
/// eigenvalue `d` once and 0 otherwise.
pub fn ones_matrix(d: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(d, d, |_, _| C64::new(1.0, 0.0))
}

/// Phase-twisted all-ones matrix with entries `omega^{alpha (j - i)}`;
/// Hermitian, rank 1, eigenvalue `d` once and 0 otherwise.
pub fn phase_ones_matrix(d: usize, alpha: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(d, d, |i, j| {
        let diff = (alpha * ((j + d) - i)) % d;
        root_of_unity(d, diff)
    })
}

/// Ordered basis of a subspace, stored as composite indices of computational
/// basis vectors. The canonical order is ascending composite index, which for
/// the shifted-diagonal subspaces coincides with ascending leading digit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubspaceBasis {
    dims: DimsProfile,
    vectors: Vec<usize>,
}

impl SubspaceBasis {
    pub fn dims(&self) -> DimsProfile {
        self.dims
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn vectors(&self) -> &[usize] {
        &self.vectors
    }

    pub fn vector(&self, i: usize) -> usize {
        self.vectors[i]
    }

    /// Rank of a composite index within the basis, if present.
    pub fn position(&self, composite: usize) -> Option<usize> {
        self.vectors.binary_search(&composite).ok()
    }
}

fn check_label(dims: DimsProfile, label: &DigitVector) -> Result<()> {
    if label.base() != dims.d() {
        return Err(Error::BaseMismatch {
            left: dims.d(),
            right: label.base(),
        });
    }
    if label.len() != dims.n() - 1 {
        return Err(Error::LengthMismatch {
            left: dims.n() - 1,
            right: label.len(),
        });
    }
    Ok(())
}

fn check_mask(dims: DimsProfile, mask: &TransposeMask) -> Result<()> {
    if mask.len() != dims.n() - 1 {
        return Err(Error::LengthMismatch {
            left: dims.n() - 1,
            right: mask.len(),
        });
    }
    Ok(())
}

/// Basis of the shifted-diagonal subspace with the given shift label:
/// vector `k` is `e_k (x) e_{k + shift_1} (x) ... (x) e_{k + shift_{n-1}}`.
pub fn diagonal_basis(dims: DimsProfile, shift: &DigitVector) -> Result<SubspaceBasis> {
    transposed_diagonal_basis(dims, shift, &TransposeMask::zero(dims.n() - 1))
}

/// Basis of the reflected shifted-diagonal subspace that supports the
/// partial transposition selected by `mask`: on masked factors the running
/// index enters reflected, so vector `k` has component `shift_t + (d - k)`
/// there instead of `shift_t + k`. With the zero mask this is
/// [`diagonal_basis`]; for `d = 2` the reflection is the identity and every
/// mask yields the same basis.
pub fn transposed_diagonal_basis(
    dims: DimsProfile,
    shift: &DigitVector,
    mask: &TransposeMask,
) -> Result<SubspaceBasis> {
    check_label(dims, shift)?;
    check_mask(dims, mask)?;
    let d = dims.d();
    let mut vectors = Vec::with_capacity(d);
    let mut digits = vec![0usize; dims.n()];
    for k in 0..d {
        digits[0] = k;
        for t in 0..dims.n() - 1 {
            let run = if mask.bit(t) { (d - k) % d } else { k };
            digits[t + 1] = (shift.digit(t) + run) % d;
        }
        vectors.push(dims.compose(&digits));
    }
    Ok(SubspaceBasis { dims, vectors })
}

/// How shift labels group into `d` classes of `d^(n-2)` labels each.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    /// Class of a label is its digit sum mod `d`.
    Sigma,
    /// Class of a label is its `k`-th digit, `k` in `1..=n-1`.
    Xi { k: usize },
}

impl Scheme {
    /// The default grouping: fix the last digit.
    pub fn xi_last(dims: DimsProfile) -> Scheme {
        Scheme::Xi { k: dims.n() - 1 }
    }

    pub fn validate(&self, dims: DimsProfile) -> Result<()> {
        match *self {
            Scheme::Sigma => Ok(()),
            Scheme::Xi { k } => {
                if k == 0 || k > dims.n() - 1 {
                    Err(Error::InvalidScheme {
                        reason: format!(
                            "digit position k = {k} outside 1..={} for n = {}",
                            dims.n() - 1,
                            dims.n()
                        ),
                    })
                } else {
                    Ok(())
                }
            }
        }
    }

    pub fn class_of(&self, label: &DigitVector) -> usize {
        match *self {
            Scheme::Sigma => label.digit_sum_mod_base(),
            Scheme::Xi { k } => label.digit(k - 1),
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Scheme::Sigma => write!(f, "sigma"),
            Scheme::Xi { k } => write!(f, "xi({k})"),
        }
    }
}

/// Partitions all shift labels into the `d` classes of the scheme,
/// class 0 first, labels in index order within each class.
pub fn grouping(dims: DimsProfile, scheme: Scheme) -> Result<Vec<Vec<DigitVector>>> {
    scheme.validate(dims)?;
    let mut classes = vec![Vec::new(); dims.d()];
    for label in DigitVector::all(dims.d(), dims.n() - 1) {
        classes[scheme.class_of(&label)].push(label);
    }
    Ok(classes)
}

/// Canonical basis of the `class`-th grouped subspace under `mask`: the
/// union of the reflected shifted-diagonal bases of the class labels,
/// sorted by composite index.
pub fn class_subspace(
    dims: DimsProfile,
    scheme: Scheme,
    class: usize,
    mask: &TransposeMask,
) -> Result<SubspaceBasis> {
    scheme.validate(dims)?;
    check_mask(dims, mask)?;
    if class >= dims.d() {
        return Err(Error::InvalidScheme {
            reason: format!("class {class} out of range for d = {}", dims.d()),
        });
    }
    let mut vectors = Vec::with_capacity(dims.total() / dims.d());
    for label in DigitVector::all(dims.d(), dims.n() - 1) {
        if scheme.class_of(&label) == class {
            vectors.extend_from_slice(transposed_diagonal_basis(dims, &label, mask)?.vectors());
        }
    }
    vectors.sort_unstable();
    Ok(SubspaceBasis { dims, vectors })
}

/// Shift label of the shifted-diagonal subspace containing a computational
/// basis vector, under `mask`: the inverse of the vector map used by
/// [`transposed_diagonal_basis`].
pub fn label_of_vector(
    dims: DimsProfile,
    composite: usize,
    mask: &TransposeMask,
) -> Result<(DigitVector, usize)> {
    check_mask(dims, mask)?;
    let d = dims.d();
    let digits = dims.decompose(composite);
    let k = digits[0];
    let mut label = Vec::with_capacity(dims.n() - 1);
    for t in 0..dims.n() - 1 {
        let run = if mask.bit(t) { (d - k) % d } else { k };
        label.push(((digits[t + 1] + d) - run) % d);
    }
    Ok((DigitVector::new(d, label)?, k))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense::kron;

    fn dims(d: usize, n: usize) -> DimsProfile {
        DimsProfile::new(d, n).unwrap()
    }

    fn dv(base: usize, digits: &[usize]) -> DigitVector {
        DigitVector::new(base, digits.to_vec()).unwrap()
    }

    #[test]
    fn shift_matrix_base_cases() {
        assert_eq!(
            shift_matrix(2, 1),
            ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]])
        );
        assert_eq!(shift_matrix(3, 3), ComplexMatrix::identity(3));
        // Columns of S_3 are e1, e2, e0.
        assert_eq!(
            shift_matrix(3, 1),
            ComplexMatrix::from_real_rows(&[&[0.0, 0.0, 1.0], &[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0]])
        );
    }

    #[test]
    fn reflection_matrix_cases() {
        assert_eq!(reflection_matrix(2), ComplexMatrix::identity(2));
        assert_eq!(
            reflection_matrix(3),
            ComplexMatrix::from_real_rows(&[&[1.0, 0.0, 0.0], &[0.0, 0.0, 1.0], &[0.0, 1.0, 0.0]])
        );
        assert_eq!(
            reflection_matrix(4),
            ComplexMatrix::from_real_rows(&[
                &[1.0, 0.0, 0.0, 0.0],
                &[0.0, 0.0, 0.0, 1.0],
                &[0.0, 0.0, 1.0, 0.0],
                &[0.0, 1.0, 0.0, 0.0]
            ])
        );
        for d in 2..=5 {
            let pi = reflection_matrix(d);
            assert_eq!(pi.matmul(&pi).unwrap(), ComplexMatrix::identity(d));
        }
    }

    #[test]
    fn phase_matrix_cases() {
        assert_eq!(
            phase_matrix(2, 1),
            ComplexMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, -1.0]])
        );
        assert_eq!(phase_matrix(3, 0), ComplexMatrix::identity(3));
        assert_eq!(
            phase_matrix(4, 2),
            ComplexMatrix::from_real_rows(&[
                &[1.0, 0.0, 0.0, 0.0],
                &[0.0, -1.0, 0.0, 0.0],
                &[0.0, 0.0, 1.0, 0.0],
                &[0.0, 0.0, 0.0, -1.0]
            ])
        );
        for d in 2..=5 {
            let mut m = ComplexMatrix::identity(d);
            for _ in 0..d {
                m = m.matmul(&phase_matrix(d, 1)).unwrap();
            }
            assert!(m.max_abs_diff(&ComplexMatrix::identity(d)).unwrap() < 1e-14);
        }
    }

    #[test]
    fn ones_and_phase_ones_base_cases() {
        assert_eq!(
            ones_matrix(2),
            ComplexMatrix::from_real_rows(&[&[1.0, 1.0], &[1.0, 1.0]])
        );
        assert_eq!(
            phase_ones_matrix(2, 1),
            ComplexMatrix::from_real_rows(&[&[1.0, -1.0], &[-1.0, 1.0]])
        );
        // Sum of all shift powers equals the all-ones matrix.
        for d in 2..=4 {
            let mut sum = ComplexMatrix::zeros(d, d);
            for m in 0..d {
                sum = sum.add(&shift_matrix(d, m)).unwrap();
            }
            assert_eq!(sum, ones_matrix(d));
        }
    }

    #[test]
    fn phase_ones_is_rank_one() {
        use crate::dense::hermitian_eigenvalues;
        for d in 2..=4usize {
            for alpha in 1..d {
                let eigs = hermitian_eigenvalues(&phase_ones_matrix(d, alpha)).unwrap();
                for eig in &eigs[..d - 1] {
                    assert!(eig.abs() < 1e-12);
                }
                assert!((eigs[d - 1] - d as f64).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn diagonal_basis_examples() {
        // d=2, n=3, shift (0,1): {e0 e0 e1, e1 e1 e0} = composites {1, 6}.
        let b = diagonal_basis(dims(2, 3), &dv(2, &[0, 1])).unwrap();
        assert_eq!(b.vectors(), &[1, 6]);
        // d=2, n=2, shift (0): {e0 e0, e1 e1} = {0, 3}.
        let b = diagonal_basis(dims(2, 2), &dv(2, &[0])).unwrap();
        assert_eq!(b.vectors(), &[0, 3]);
        // d=3, n=2, shift (2): {e0 e2, e1 e0, e2 e1} = {2, 3, 7}.
        let b = diagonal_basis(dims(3, 2), &dv(3, &[2])).unwrap();
        assert_eq!(b.vectors(), &[2, 3, 7]);
    }

    #[test]
    fn transposed_diagonal_basis_examples() {
        let p = dims(3, 2);
        let zero_mask = TransposeMask::zero(1);
        let full_mask = TransposeMask::new(vec![true]);
        // Zero mask reproduces the plain basis.
        for label in DigitVector::all(3, 1) {
            assert_eq!(
                transposed_diagonal_basis(p, &label, &zero_mask).unwrap(),
                diagonal_basis(p, &label).unwrap()
            );
        }
        // d=3, shift (0), mask (1): {e0 e0, e1 e2, e2 e1} = {0, 5, 7}.
        let b = transposed_diagonal_basis(p, &dv(3, &[0]), &full_mask).unwrap();
        assert_eq!(b.vectors(), &[0, 5, 7]);
        // For d=2 the reflection is trivial, any mask gives the plain basis.
        let q = dims(2, 3);
        for label in DigitVector::all(2, 2) {
            for mask in TransposeMask::all(2) {
                assert_eq!(
                    transposed_diagonal_basis(q, &label, &mask).unwrap(),
                    diagonal_basis(q, &label).unwrap()
                );
            }
        }
    }

    #[test]
    fn basis_matches_permutation_action() {
        // The basis of (shift, mask) equals the image of the base diagonal
        // under 1 (x) S^{mu_1} Pi^{s_1} (x) ...
        for (d, n) in [(2usize, 3usize), (3, 2), (3, 3), (4, 2)] {
            let p = dims(d, n);
            let base = diagonal_basis(p, &DigitVector::zero(d, n - 1)).unwrap();
            for label in DigitVector::all(d, n - 1) {
                for mask in TransposeMask::all(n - 1) {
                    let mut op = ComplexMatrix::identity(d);
                    for t in 0..n - 1 {
                        let mut factor = shift_matrix(d, label.digit(t));
                        if mask.bit(t) {
                            factor = factor.matmul(&reflection_matrix(d)).unwrap();
                        }
                        op = kron(&op, &factor);
                    }
                    let expected: Vec<usize> = base
                        .vectors()
                        .iter()
                        .map(|&v| {
                            let mut input = vec![C64::new(0.0, 0.0); p.total()];
                            input[v] = C64::new(1.0, 0.0);
                            let out = op.apply(&input).unwrap();
                            out.iter().position(|z| z.norm() > 0.5).unwrap()
                        })
                        .collect();
                    let got = transposed_diagonal_basis(p, &label, &mask).unwrap();
                    let mut sorted = expected.clone();
                    sorted.sort_unstable();
                    assert_eq!(got.vectors(), sorted.as_slice());
                    // And the canonical order is by leading digit, which the
                    // permutation action preserves as a set.
                    assert_eq!(
                        got.vectors()
                            .iter()
                            .collect::<std::collections::BTreeSet<_>>(),
                        expected.iter().collect()
                    );
                }
            }
        }
    }

    #[test]
    fn grouping_examples() {
        let classes = grouping(dims(2, 3), Scheme::Sigma).unwrap();
        assert_eq!(classes[0], vec![dv(2, &[0, 0]), dv(2, &[1, 1])]);
        assert_eq!(classes[1], vec![dv(2, &[0, 1]), dv(2, &[1, 0])]);

        let classes = grouping(dims(2, 3), Scheme::Xi { k: 2 }).unwrap();
        assert_eq!(classes[0], vec![dv(2, &[0, 0]), dv(2, &[1, 0])]);
        assert_eq!(classes[1], vec![dv(2, &[0, 1]), dv(2, &[1, 1])]);

        let classes = grouping(dims(3, 2), Scheme::Sigma).unwrap();
        for (alpha, class) in classes.iter().enumerate() {
            assert_eq!(class, &vec![dv(3, &[alpha])]);
        }
    }

    #[test]
    fn grouping_rejects_bad_digit_position() {
        assert!(grouping(dims(2, 3), Scheme::Xi { k: 0 }).is_err());
        assert!(grouping(dims(2, 3), Scheme::Xi { k: 3 }).is_err());
    }

    #[test]
    fn class_subspace_spans_expected_vectors() {
        // d=2, n=3 Sigma class 0 = {000, 111, 011, 100} sorted.
        let b = class_subspace(dims(2, 3), Scheme::Sigma, 0, &TransposeMask::zero(2)).unwrap();
        assert_eq!(b.vectors(), &[0, 3, 4, 7]);
        let b =
            class_subspace(dims(2, 3), Scheme::Xi { k: 2 }, 0, &TransposeMask::zero(2)).unwrap();
        assert_eq!(b.vectors(), &[0, 2, 5, 7]);
    }

    #[test]
    fn label_of_vector_inverts_basis_construction() {
        for (d, n) in [(2usize, 3usize), (3, 2), (3, 3), (4, 2)] {
            let p = dims(d, n);
            for mask in TransposeMask::all(n - 1) {
                for label in DigitVector::all(d, n - 1) {
                    let basis = transposed_diagonal_basis(p, &label, &mask).unwrap();
                    for (k, &v) in basis.vectors().iter().enumerate() {
                        let (got_label, got_k) = label_of_vector(p, v, &mask).unwrap();
                        assert_eq!(got_label, label);
                        assert_eq!(got_k, k);
                    }
                }
            }
        }
    }

    #[test]
    fn digit_vector_roundtrip_and_arithmetic() {
        for idx in 0..27 {
            let v = DigitVector::from_index(3, 3, idx);
            assert_eq!(v.to_index(), idx);
        }
        let a = dv(3, &[1, 2]);
        let b = dv(3, &[2, 2]);
        assert_eq!(a.add(&b).unwrap(), dv(3, &[0, 1]));
        assert_eq!(a.scaled(2), dv(3, &[2, 1]));
        assert!(DigitVector::new(3, vec![3]).is_err());
        assert_eq!(DigitVector::parse(3, "12").unwrap(), a);
        assert!(DigitVector::parse(2, "12").is_err());
    }

    #[test]
    fn mask_parsing_and_xor() {
        let m = TransposeMask::parse("01").unwrap();
        assert!(!m.bit(0));
        assert!(m.bit(1));
        assert_eq!(m.to_string(), "01");
        let x = m.xor(&m).unwrap();
        assert!(x.is_zero());
        assert_eq!(TransposeMask::all(2).len(), 4);
        assert_eq!(m.to_factor_mask(), vec![false, false, true]);
    }
}
