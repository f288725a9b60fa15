//! Block families and their dense realizations.
//!
//! States are stored as block families; dense matrices are always derived
//! from them, never the other way around. A small family keeps one `d x d`
//! block per shift label and is supported on the shifted-diagonal
//! decomposition; a big family keeps one `d^(n-1) x d^(n-1)` block per
//! grouping class. Each family carries the transposition mask of the
//! decomposition it lives on (the zero mask for ordinary states), so the
//! same assembly code realizes both states and their transformed images.

use crate::dense::{ComplexMatrix, DimsProfile};
use crate::error::{Error, Result};
use crate::geometry::{
    class_subspace, label_of_vector, transposed_diagonal_basis, DigitVector, Scheme, TransposeMask,
};

/// Entries at or below `STRUCTURE_ZERO_REL_TOL * max|rho|` count as zero
/// during structure detection.
pub const STRUCTURE_ZERO_REL_TOL: f64 = 1e-13;

fn check_block(label: String, block: &ComplexMatrix, expected: usize) -> Result<()> {
    if block.rows() != expected || block.cols() != expected {
        return Err(Error::BlockShape {
            label,
            expected,
            rows: block.rows(),
            cols: block.cols(),
        });
    }
    if !block.is_hermitian() {
        return Err(Error::BlockNotHermitian {
            label,
            deviation: block.hermitian_deviation(),
        });
    }
    Ok(())
}

/// One Hermitian `d x d` block per shift label, indexed by label value.
#[derive(Debug, Clone, PartialEq)]
pub struct SmallBlockFamily {
    dims: DimsProfile,
    mask: TransposeMask,
    blocks: Vec<ComplexMatrix>,
}

impl SmallBlockFamily {
    pub fn new(dims: DimsProfile, blocks: Vec<ComplexMatrix>) -> Result<Self> {
        Self::with_mask(dims, TransposeMask::zero(dims.n() - 1), blocks)
    }

    pub fn with_mask(
        dims: DimsProfile,
        mask: TransposeMask,
        blocks: Vec<ComplexMatrix>,
    ) -> Result<Self> {
        if mask.len() != dims.n() - 1 {
            return Err(Error::LengthMismatch {
                left: dims.n() - 1,
                right: mask.len(),
            });
        }
        let expected = dims.total() / dims.d();
        if blocks.len() != expected {
            return Err(Error::BlockCount {
                expected,
                got: blocks.len(),
            });
        }
        for (idx, block) in blocks.iter().enumerate() {
            let label = DigitVector::from_index(dims.d(), dims.n() - 1, idx);
            check_block(label.to_string(), block, dims.d())?;
        }
        Ok(Self { dims, mask, blocks })
    }

    /// Builds a family from labeled blocks; omitted labels become zero blocks.
    pub fn from_labeled(
        dims: DimsProfile,
        labeled: impl IntoIterator<Item = (DigitVector, ComplexMatrix)>,
    ) -> Result<Self> {
        let count = dims.total() / dims.d();
        let mut blocks = vec![ComplexMatrix::zeros(dims.d(), dims.d()); count];
        let mut seen = vec![false; count];
        for (label, block) in labeled {
            if label.base() != dims.d() || label.len() != dims.n() - 1 {
                return Err(Error::BadBlockLabel {
                    label: label.to_string(),
                    reason: format!("expected {} base-{} digits", dims.n() - 1, dims.d()),
                });
            }
            let idx = label.to_index();
            if seen[idx] {
                return Err(Error::DuplicateBlock {
                    label: label.to_string(),
                });
            }
            seen[idx] = true;
            blocks[idx] = block;
        }
        Self::new(dims, blocks)
    }

    pub fn dims(&self) -> DimsProfile {
        self.dims
    }

    pub fn mask(&self) -> &TransposeMask {
        &self.mask
    }

    pub fn blocks(&self) -> &[ComplexMatrix] {
        &self.blocks
    }

    pub fn block_at(&self, index: usize) -> &ComplexMatrix {
        &self.blocks[index]
    }

    pub fn block(&self, label: &DigitVector) -> &ComplexMatrix {
        &self.blocks[label.to_index()]
    }

    pub fn label_count(&self) -> usize {
        self.blocks.len()
    }

    pub fn total_trace(&self) -> f64 {
        self.blocks.iter().map(|b| b.trace().re).sum()
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            dims: self.dims,
            mask: self.mask.clone(),
            blocks: self.blocks.iter().map(|b| b.scaled(factor)).collect(),
        }
    }
}

/// One Hermitian `d^(n-1) x d^(n-1)` block per grouping class.
#[derive(Debug, Clone, PartialEq)]
pub struct BigBlockFamily {
    dims: DimsProfile,
    scheme: Scheme,
    mask: TransposeMask,
    blocks: Vec<ComplexMatrix>,
}

impl BigBlockFamily {
    pub fn new(dims: DimsProfile, scheme: Scheme, blocks: Vec<ComplexMatrix>) -> Result<Self> {
        Self::with_mask(dims, scheme, TransposeMask::zero(dims.n() - 1), blocks)
    }

    pub fn with_mask(
        dims: DimsProfile,
        scheme: Scheme,
        mask: TransposeMask,
        blocks: Vec<ComplexMatrix>,
    ) -> Result<Self> {
        scheme.validate(dims)?;
        if mask.len() != dims.n() - 1 {
            return Err(Error::LengthMismatch {
                left: dims.n() - 1,
                right: mask.len(),
            });
        }
        if blocks.len() != dims.d() {
            return Err(Error::BlockCount {
                expected: dims.d(),
                got: blocks.len(),
            });
        }
        let expected = dims.total() / dims.d();
        for (alpha, block) in blocks.iter().enumerate() {
            check_block(alpha.to_string(), block, expected)?;
        }
        Ok(Self {
            dims,
            scheme,
            mask,
            blocks,
        })
    }

    pub fn dims(&self) -> DimsProfile {
        self.dims
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn mask(&self) -> &TransposeMask {
        &self.mask
    }

    pub fn blocks(&self) -> &[ComplexMatrix] {
        &self.blocks
    }

    pub fn block(&self, class: usize) -> &ComplexMatrix {
        &self.blocks[class]
    }

    pub fn total_trace(&self) -> f64 {
        self.blocks.iter().map(|b| b.trace().re).sum()
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            dims: self.dims,
            scheme: self.scheme,
            mask: self.mask.clone(),
            blocks: self.blocks.iter().map(|b| b.scaled(factor)).collect(),
        }
    }
}

/// Payload of a circulant state.
#[derive(Debug, Clone, PartialEq)]
pub enum BlockFamily {
    Small(SmallBlockFamily),
    Big(BigBlockFamily),
}

impl BlockFamily {
    pub fn dims(&self) -> DimsProfile {
        match self {
            BlockFamily::Small(f) => f.dims(),
            BlockFamily::Big(f) => f.dims(),
        }
    }

    pub fn mask(&self) -> &TransposeMask {
        match self {
            BlockFamily::Small(f) => f.mask(),
            BlockFamily::Big(f) => f.mask(),
        }
    }

    pub fn total_trace(&self) -> f64 {
        match self {
            BlockFamily::Small(f) => f.total_trace(),
            BlockFamily::Big(f) => f.total_trace(),
        }
    }

    pub fn assemble(&self) -> ComplexMatrix {
        match self {
            BlockFamily::Small(f) => assemble_small(f),
            BlockFamily::Big(f) => assemble_big(f),
        }
    }
}

/// A state stored block-wise on a circulant decomposition.
#[derive(Debug, Clone, PartialEq)]
pub struct CirculantState {
    family: BlockFamily,
    normalized: bool,
}

impl CirculantState {
    pub fn new(family: BlockFamily, normalized: bool) -> Self {
        Self { family, normalized }
    }

    pub fn small(family: SmallBlockFamily) -> Self {
        Self::new(BlockFamily::Small(family), false)
    }

    pub fn big(family: BigBlockFamily) -> Self {
        Self::new(BlockFamily::Big(family), false)
    }

    pub fn family(&self) -> &BlockFamily {
        &self.family
    }

    pub fn dims(&self) -> DimsProfile {
        self.family.dims()
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn total_trace(&self) -> f64 {
        self.family.total_trace()
    }

    pub fn assemble(&self) -> ComplexMatrix {
        self.family.assemble()
    }
}

/// Dense realization of a small family: block entries land on the
/// Gram positions of the (reflected) shifted-diagonal bases, so every
/// nonzero entry couples two vectors of the same subspace.
pub fn assemble_small(family: &SmallBlockFamily) -> ComplexMatrix {
    let dims = family.dims();
    let total = dims.total();
    let mut out = ComplexMatrix::zeros(total, total);
    for (idx, block) in family.blocks().iter().enumerate() {
        let label = DigitVector::from_index(dims.d(), dims.n() - 1, idx);
        let basis = transposed_diagonal_basis(dims, &label, family.mask())
            .expect("family invariants guarantee a valid basis");
        for i in 0..dims.d() {
            for j in 0..dims.d() {
                out.add_assign_at(basis.vector(i), basis.vector(j), block.get(i, j));
            }
        }
    }
    out
}

/// Dense realization of a big family against the canonical class bases.
pub fn assemble_big(family: &BigBlockFamily) -> ComplexMatrix {
    let dims = family.dims();
    let total = dims.total();
    let mut out = ComplexMatrix::zeros(total, total);
    for (alpha, block) in family.blocks().iter().enumerate() {
        let basis = class_subspace(dims, family.scheme(), alpha, family.mask())
            .expect("family invariants guarantee a valid basis");
        for p in 0..basis.len() {
            for q in 0..basis.len() {
                out.add_assign_at(basis.vector(p), basis.vector(q), block.get(p, q));
            }
        }
    }
    out
}

fn structure_threshold(rho: &ComplexMatrix) -> f64 {
    STRUCTURE_ZERO_REL_TOL * rho.max_abs()
}

/// Reads a small family back from a dense matrix supported on the
/// shifted-diagonal decomposition of the zero mask. Fails with
/// [`Error::NotCirculant`] at the first entry coupling two different
/// subspaces; supported entries are copied verbatim, so
/// `extract_small(assemble_small(f)) == f` bit for bit.
pub fn extract_small(rho: &ComplexMatrix, dims: DimsProfile) -> Result<SmallBlockFamily> {
    extract_small_tagged(rho, dims, &TransposeMask::zero(dims.n() - 1))
}

/// [`extract_small`] against the decomposition selected by `mask`.
pub fn extract_small_tagged(
    rho: &ComplexMatrix,
    dims: DimsProfile,
    mask: &TransposeMask,
) -> Result<SmallBlockFamily> {
    if rho.rows() != dims.total() || rho.cols() != dims.total() {
        return Err(Error::DimensionMismatch {
            expected: dims.total(),
            rows: rho.rows(),
            cols: rho.cols(),
        });
    }
    let total = dims.total();
    let mut membership = Vec::with_capacity(total);
    for v in 0..total {
        let (label, pos) = label_of_vector(dims, v, mask)?;
        membership.push((label.to_index(), pos));
    }
    let threshold = structure_threshold(rho);
    let d = dims.d();
    let mut blocks = vec![ComplexMatrix::zeros(d, d); total / d];
    for r in 0..total {
        for c in 0..total {
            let value = rho.get(r, c);
            let (label_r, i) = membership[r];
            let (label_c, j) = membership[c];
            if label_r == label_c {
                blocks[label_r].set(i, j, value);
            } else if value.norm() > threshold {
                return Err(Error::NotCirculant {
                    row: r,
                    col: c,
                    magnitude: value.norm(),
                });
            }
        }
    }
    SmallBlockFamily::with_mask(dims, mask.clone(), blocks)
}

/// Reads a big family back from a dense matrix supported on the grouped
/// decomposition of `scheme` under `mask`.
pub fn extract_big(
    rho: &ComplexMatrix,
    dims: DimsProfile,
    scheme: Scheme,
    mask: &TransposeMask,
) -> Result<BigBlockFamily> {
    if rho.rows() != dims.total() || rho.cols() != dims.total() {
        return Err(Error::DimensionMismatch {
            expected: dims.total(),
            rows: rho.rows(),
            cols: rho.cols(),
        });
    }
    scheme.validate(dims)?;
    let total = dims.total();
    let block_dim = total / dims.d();
    let mut membership: Vec<(usize, usize)> = vec![(0, 0); total];
    for alpha in 0..dims.d() {
        let basis = class_subspace(dims, scheme, alpha, mask)?;
        for (pos, &v) in basis.vectors().iter().enumerate() {
            membership[v] = (alpha, pos);
        }
    }
    let threshold = structure_threshold(rho);
    let mut blocks = vec![ComplexMatrix::zeros(block_dim, block_dim); dims.d()];
    for r in 0..total {
        for c in 0..total {
            let value = rho.get(r, c);
            let (class_r, p) = membership[r];
            let (class_c, q) = membership[c];
            if class_r == class_c {
                blocks[class_r].set(p, q, value);
            } else if value.norm() > threshold {
                return Err(Error::NotCirculant {
                    row: r,
                    col: c,
                    magnitude: value.norm(),
                });
            }
        }
    }
    BigBlockFamily::with_mask(dims, scheme, mask.clone(), blocks)
}

/// Scales the blocks by the reciprocal of the total trace and sets the
/// normalized flag. PSD verdicts are scale invariant, so states may be kept
/// unnormalized until a trace-1 matrix is actually needed.
pub fn normalize(state: &CirculantState) -> Result<CirculantState> {
    let trace = state.total_trace();
    #[allow(clippy::neg_cmp_op_on_partial_ord)] // NaN traces must be rejected
    if !(trace > 0.0) {
        return Err(Error::NonPositiveTrace { trace });
    }
    let family = match state.family() {
        BlockFamily::Small(f) => BlockFamily::Small(f.scaled(1.0 / trace)),
        BlockFamily::Big(f) => BlockFamily::Big(f.scaled(1.0 / trace)),
    };
    Ok(CirculantState::new(family, true))
}

/// Partial trace over middle factors of a last-digit-grouped big family,
/// performed block-wise. Factors are 0-based; only `1..=n-2` may be
/// dropped (tracing the first or the last factor destroys the circulant
/// structure). The result is the `(n - L)`-factor circulant state whose
/// blocks are the partial traces of the original blocks, and its dense
/// realization equals the dense partial trace of the original.
pub fn reduce_middle_factors(state: &CirculantState, drop: &[usize]) -> Result<CirculantState> {
    let family = match state.family() {
        BlockFamily::Big(f) => f,
        BlockFamily::Small(_) => {
            return Err(Error::InvalidScheme {
                reason: "block-wise reduction needs a big-block family".into(),
            })
        }
    };
    let dims = family.dims();
    if family.scheme() != Scheme::xi_last(dims) {
        return Err(Error::InvalidScheme {
            reason: format!(
                "block-wise reduction needs the last-digit grouping, got {}",
                family.scheme()
            ),
        });
    }
    if !family.mask().is_zero() {
        return Err(Error::TransformedFamily);
    }
    let mut dropped = drop.to_vec();
    dropped.sort_unstable();
    dropped.dedup();
    if dropped.is_empty() {
        return Ok(state.clone());
    }
    for &f in &dropped {
        if f >= dims.n() {
            return Err(Error::FactorOutOfRange {
                index: f,
                n: dims.n(),
            });
        }
        if f == 0 || f == dims.n() - 1 {
            return Err(Error::NotMiddleFactor { index: f });
        }
    }
    let remaining = dims.n() - dropped.len();
    if remaining < 2 {
        return Err(Error::TooFewFactorsLeft);
    }

    // Block slot t corresponds to factor t for t in 0..n-1; the last factor
    // is the cycled copy and has no slot of its own.
    let block_profile = DimsProfile::new(dims.d(), dims.n() - 1)?;
    let new_dims = DimsProfile::new(dims.d(), remaining)?;
    let mut new_blocks = Vec::with_capacity(dims.d());
    for block in family.blocks() {
        new_blocks.push(crate::dense::partial_trace(block, block_profile, &dropped)?);
    }
    let reduced = BigBlockFamily::new(new_dims, Scheme::xi_last(new_dims), new_blocks)?;
    Ok(CirculantState::new(
        BlockFamily::Big(reduced),
        state.is_normalized(),
    ))
}

/// Re-expresses a small family as a big family of the given scheme: each
/// small block lands on the Gram positions of its subspace inside the class
/// basis. The dense realizations agree exactly.
pub fn embed_small_in_big(family: &SmallBlockFamily, scheme: Scheme) -> Result<BigBlockFamily> {
    let dims = family.dims();
    scheme.validate(dims)?;
    let block_dim = dims.total() / dims.d();
    let mut class_bases = Vec::with_capacity(dims.d());
    for alpha in 0..dims.d() {
        class_bases.push(class_subspace(dims, scheme, alpha, family.mask())?);
    }
    let mut blocks = vec![ComplexMatrix::zeros(block_dim, block_dim); dims.d()];
    for (idx, small) in family.blocks().iter().enumerate() {
        let label = DigitVector::from_index(dims.d(), dims.n() - 1, idx);
        let alpha = scheme.class_of(&label);
        let basis = transposed_diagonal_basis(dims, &label, family.mask())?;
        let class = &class_bases[alpha];
        for i in 0..dims.d() {
            let p = class
                .position(basis.vector(i))
                .expect("subspace vectors lie inside their class");
            for j in 0..dims.d() {
                let q = class
                    .position(basis.vector(j))
                    .expect("subspace vectors lie inside their class");
                blocks[alpha].set(p, q, small.get(i, j));
            }
        }
    }
    BigBlockFamily::with_mask(dims, scheme, family.mask().clone(), blocks)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense::{kron, partial_trace, C64};

    fn dims(d: usize, n: usize) -> DimsProfile {
        DimsProfile::new(d, n).unwrap()
    }

    fn real_block(rows: &[&[f64]]) -> ComplexMatrix {
        ComplexMatrix::from_real_rows(rows)
    }

    fn werner_family(p: f64) -> SmallBlockFamily {
        let a = real_block(&[&[(1.0 - p) / 4.0, 0.0], &[0.0, (1.0 - p) / 4.0]]);
        let b = real_block(&[
            &[(1.0 + p) / 4.0, -2.0 * p / 4.0],
            &[-2.0 * p / 4.0, (1.0 + p) / 4.0],
        ]);
        SmallBlockFamily::new(dims(2, 2), vec![a, b]).unwrap()
    }

    #[test]
    fn assemble_small_reproduces_werner_matrix() {
        let p = 0.4;
        let rho = assemble_small(&werner_family(p));
        let expected = real_block(&[
            &[(1.0 - p) / 4.0, 0.0, 0.0, 0.0],
            &[0.0, (1.0 + p) / 4.0, -2.0 * p / 4.0, 0.0],
            &[0.0, -2.0 * p / 4.0, (1.0 + p) / 4.0, 0.0],
            &[0.0, 0.0, 0.0, (1.0 - p) / 4.0],
        ]);
        assert_eq!(rho, expected);
    }

    #[test]
    fn assemble_small_ghz_is_projector() {
        // Single all-ones/2 block at the zero label gives the 3-qubit GHZ
        // projector: entries 1/2 on the corner positions {0,7} x {0,7}.
        let p = dims(2, 3);
        let ghz_block = real_block(&[&[0.5, 0.5], &[0.5, 0.5]]);
        let labeled = vec![(DigitVector::zero(2, 2), ghz_block)];
        let fam = SmallBlockFamily::from_labeled(p, labeled).unwrap();
        let rho = assemble_small(&fam);
        let mut expected = ComplexMatrix::zeros(8, 8);
        for &r in &[0usize, 7] {
            for &c in &[0usize, 7] {
                expected.set(r, c, C64::new(0.5, 0.0));
            }
        }
        assert_eq!(rho, expected);
    }

    #[test]
    fn assemble_small_diagonal_family_is_diagonal_on_support() {
        let p = dims(2, 3);
        let mut blocks = vec![ComplexMatrix::zeros(2, 2); 4];
        blocks[0] = ComplexMatrix::identity(2).scaled(0.125);
        let fam = SmallBlockFamily::new(p, blocks).unwrap();
        let rho = assemble_small(&fam);
        for r in 0..8 {
            for c in 0..8 {
                let expected = if r == c && (r == 0 || r == 7) {
                    0.125
                } else {
                    0.0
                };
                assert_eq!(rho.get(r, c), C64::new(expected, 0.0));
            }
        }
    }

    #[test]
    fn big_family_layout_matches_interleaved_pattern() {
        // d=2, n=3, last-digit grouping: class bases are {0,2,5,7} and
        // {1,3,4,6}; the two 4x4 blocks tile the dense matrix on exactly
        // those index pairs.
        let p = dims(2, 3);
        let c_block = ComplexMatrix::from_fn(4, 4, |i, j| {
            C64::new(1.0 + (i * 4 + j) as f64, (i as f64) - (j as f64))
        });
        let c_block = c_block.add(&c_block.dagger()).unwrap().scaled(0.5);
        let d_block = ComplexMatrix::from_fn(4, 4, |i, j| {
            C64::new(-(1.0 + (i * 4 + j) as f64), 2.0 * (i as f64 - j as f64))
        });
        let d_block = d_block.add(&d_block.dagger()).unwrap().scaled(0.5);
        let fam = BigBlockFamily::new(
            p,
            Scheme::xi_last(p),
            vec![c_block.clone(), d_block.clone()],
        )
        .unwrap();
        let rho = assemble_big(&fam);
        let class0 = [0usize, 2, 5, 7];
        let class1 = [1usize, 3, 4, 6];
        for (pi, &r) in class0.iter().enumerate() {
            for (qi, &c) in class0.iter().enumerate() {
                assert_eq!(rho.get(r, c), c_block.get(pi, qi));
            }
        }
        for (pi, &r) in class1.iter().enumerate() {
            for (qi, &c) in class1.iter().enumerate() {
                assert_eq!(rho.get(r, c), d_block.get(pi, qi));
            }
        }
        // Everything off the two class supports is zero.
        for r in 0..8 {
            for c in 0..8 {
                let same_class = (class0.contains(&r) && class0.contains(&c))
                    || (class1.contains(&r) && class1.contains(&c));
                if !same_class {
                    assert_eq!(rho.get(r, c), C64::new(0.0, 0.0));
                }
            }
        }
    }

    #[test]
    fn big_block_rank_one_projector_is_pure_state() {
        let p = dims(2, 3);
        let mut c_block = ComplexMatrix::zeros(4, 4);
        c_block.set(1, 1, C64::new(1.0, 0.0));
        let fam = BigBlockFamily::new(
            p,
            Scheme::xi_last(p),
            vec![c_block, ComplexMatrix::zeros(4, 4)],
        )
        .unwrap();
        let rho = assemble_big(&fam);
        // Position 1 of class 0 is composite 2 = e0 e1 e0.
        let mut expected = ComplexMatrix::zeros(8, 8);
        expected.set(2, 2, C64::new(1.0, 0.0));
        assert_eq!(rho, expected);
    }

    #[test]
    fn extract_small_roundtrip_is_bit_exact() {
        let fam = werner_family(0.37);
        let rho = assemble_small(&fam);
        let back = extract_small(&rho, dims(2, 2)).unwrap();
        assert_eq!(back, fam);
    }

    #[test]
    fn extract_small_rejects_w_state() {
        // The 3-qubit W density matrix couples different subspaces.
        let mut rho = ComplexMatrix::zeros(8, 8);
        for &r in &[1usize, 2, 4] {
            for &c in &[1usize, 2, 4] {
                rho.set(r, c, C64::new(1.0 / 3.0, 0.0));
            }
        }
        match extract_small(&rho, dims(2, 3)) {
            Err(Error::NotCirculant {
                row,
                col,
                magnitude,
            }) => {
                assert_eq!((row, col), (1, 2));
                assert!((magnitude - 1.0 / 3.0).abs() < 1e-15);
            }
            other => panic!("expected NotCirculant, got {other:?}"),
        }
    }

    #[test]
    fn extract_small_of_qutrit_ghz() {
        // d=3, n=2 GHZ projector: all-ones/3 on {0, 4, 8}.
        let p = dims(3, 2);
        let mut rho = ComplexMatrix::zeros(9, 9);
        for &r in &[0usize, 4, 8] {
            for &c in &[0usize, 4, 8] {
                rho.set(r, c, C64::new(1.0 / 3.0, 0.0));
            }
        }
        let fam = extract_small(&rho, p).unwrap();
        let expected = ComplexMatrix::from_fn(3, 3, |_, _| C64::new(1.0 / 3.0, 0.0));
        assert_eq!(fam.block_at(0), &expected);
        for idx in 1..3 {
            assert_eq!(fam.block_at(idx), &ComplexMatrix::zeros(3, 3));
        }
    }

    #[test]
    fn normalize_scales_and_flags() {
        let p = dims(2, 2);
        let fam = SmallBlockFamily::new(
            p,
            vec![ComplexMatrix::identity(2), ComplexMatrix::zeros(2, 2)],
        )
        .unwrap();
        let state = CirculantState::small(fam);
        assert!((state.total_trace() - 2.0).abs() < 1e-15);
        let normed = normalize(&state).unwrap();
        assert!(normed.is_normalized());
        assert!((normed.total_trace() - 1.0).abs() < 1e-15);
        let again = normalize(&normed).unwrap();
        assert!((again.total_trace() - 1.0).abs() < 1e-15);

        let zero = CirculantState::small(
            SmallBlockFamily::new(
                p,
                vec![ComplexMatrix::zeros(2, 2), ComplexMatrix::zeros(2, 2)],
            )
            .unwrap(),
        );
        assert!(matches!(
            normalize(&zero),
            Err(Error::NonPositiveTrace { .. })
        ));
    }

    #[test]
    fn reduce_drops_middle_factor_blockwise() {
        // A 3-factor big state reduced over its middle factor matches the
        // dense partial trace, and its blocks are the slot-1 traces.
        let p = dims(2, 3);
        let c_block = random_hermitian_4x4(3);
        let d_block = random_hermitian_4x4(7);
        let fam = BigBlockFamily::new(p, Scheme::xi_last(p), vec![c_block, d_block]).unwrap();
        let state = CirculantState::big(fam.clone());
        let reduced = reduce_middle_factors(&state, &[1]).unwrap();
        let dense_direct = partial_trace(&state.assemble(), p, &[1]).unwrap();
        assert!(reduced.assemble().max_abs_diff(&dense_direct).unwrap() < 1e-14);
        let block_profile = dims(2, 2);
        for (alpha, block) in match reduced.family() {
            BlockFamily::Big(f) => f.blocks().iter().enumerate(),
            _ => unreachable!(),
        } {
            let expected = partial_trace(&fam.blocks()[alpha], block_profile, &[1]).unwrap();
            assert!(block.max_abs_diff(&expected).unwrap() < 1e-15);
        }
    }

    #[test]
    fn reduce_rejects_outer_factors_and_empty_is_identity() {
        let p = dims(2, 3);
        let fam = BigBlockFamily::new(
            p,
            Scheme::xi_last(p),
            vec![random_hermitian_4x4(1), random_hermitian_4x4(2)],
        )
        .unwrap();
        let state = CirculantState::big(fam);
        assert!(matches!(
            reduce_middle_factors(&state, &[0]),
            Err(Error::NotMiddleFactor { index: 0 })
        ));
        assert!(matches!(
            reduce_middle_factors(&state, &[2]),
            Err(Error::NotMiddleFactor { index: 2 })
        ));
        let unchanged = reduce_middle_factors(&state, &[]).unwrap();
        assert_eq!(&unchanged, &state);
    }

    #[test]
    fn embedding_small_family_preserves_dense_matrix() {
        let p = dims(2, 3);
        let blocks: Vec<ComplexMatrix> = (0..4).map(random_hermitian_2x2).collect();
        let fam = SmallBlockFamily::new(p, blocks).unwrap();
        for scheme in [Scheme::Sigma, Scheme::xi_last(p)] {
            let big = embed_small_in_big(&fam, scheme).unwrap();
            let diff = assemble_big(&big)
                .max_abs_diff(&assemble_small(&fam))
                .unwrap();
            assert_eq!(diff, 0.0);
        }
    }

    #[test]
    fn embedding_matches_printed_checkerboard_layout() {
        // For d=2, n=3 and digit-sum grouping, the class-0 block carries the
        // 00-block on its corners and the 11-block in its center, with the
        // complementary pattern zero.
        let p = dims(2, 3);
        let blocks: Vec<ComplexMatrix> = (0..4).map(|i| random_hermitian_2x2(10 + i)).collect();
        let fam = SmallBlockFamily::new(p, blocks.clone()).unwrap();
        let big = embed_small_in_big(&fam, Scheme::Sigma).unwrap();
        let a = big.block(0);
        let x00 = &blocks[0];
        let x11 = &blocks[3];
        let zero = C64::new(0.0, 0.0);
        assert_eq!(a.get(0, 0), x00.get(0, 0));
        assert_eq!(a.get(0, 3), x00.get(0, 1));
        assert_eq!(a.get(3, 0), x00.get(1, 0));
        assert_eq!(a.get(3, 3), x00.get(1, 1));
        assert_eq!(a.get(1, 1), x11.get(0, 0));
        assert_eq!(a.get(1, 2), x11.get(0, 1));
        assert_eq!(a.get(2, 1), x11.get(1, 0));
        assert_eq!(a.get(2, 2), x11.get(1, 1));
        assert_eq!(a.get(0, 1), zero);
        assert_eq!(a.get(1, 0), zero);
        assert_eq!(a.get(2, 3), zero);
        let b = big.block(1);
        let x01 = &blocks[1];
        let x10 = &blocks[2];
        assert_eq!(b.get(0, 0), x01.get(0, 0));
        assert_eq!(b.get(0, 3), x01.get(0, 1));
        assert_eq!(b.get(1, 1), x10.get(0, 0));
        assert_eq!(b.get(1, 2), x10.get(0, 1));
    }

    #[test]
    fn assembly_is_linear_in_the_family() {
        let p = dims(2, 3);
        let f: Vec<ComplexMatrix> = (0..4).map(|i| random_hermitian_2x2(20 + i)).collect();
        let g: Vec<ComplexMatrix> = (0..4).map(|i| random_hermitian_2x2(30 + i)).collect();
        let sum: Vec<ComplexMatrix> = f.iter().zip(&g).map(|(a, b)| a.add(b).unwrap()).collect();
        let fam_f = SmallBlockFamily::new(p, f).unwrap();
        let fam_g = SmallBlockFamily::new(p, g).unwrap();
        let fam_sum = SmallBlockFamily::new(p, sum).unwrap();
        let lhs = assemble_small(&fam_sum);
        let rhs = assemble_small(&fam_f).add(&assemble_small(&fam_g)).unwrap();
        assert!(lhs.max_abs_diff(&rhs).unwrap() < 1e-15);
    }

    fn random_hermitian_2x2(seed: usize) -> ComplexMatrix {
        let s = seed as f64;
        ComplexMatrix::from_fn(2, 2, |i, j| match (i, j) {
            (0, 0) => C64::new(0.3 + 0.1 * s, 0.0),
            (1, 1) => C64::new(0.7 - 0.05 * s, 0.0),
            (0, 1) => C64::new(0.11 * s, 0.23 - 0.02 * s),
            _ => C64::new(0.11 * s, -(0.23 - 0.02 * s)),
        })
    }

    fn random_hermitian_4x4(seed: usize) -> ComplexMatrix {
        let s = seed as f64;
        let raw = ComplexMatrix::from_fn(4, 4, |i, j| {
            C64::new(
                (1.0 + s) / (1.0 + (i + 2 * j) as f64),
                0.1 * s * (i as f64 - j as f64),
            )
        });
        raw.add(&raw.dagger()).unwrap().scaled(0.5)
    }

    #[test]
    fn kron_identity_sanity_for_class_layout() {
        // Cross-check one class basis against an explicit tensor action.
        let p = dims(2, 3);
        let basis = class_subspace(p, Scheme::xi_last(p), 1, &TransposeMask::zero(2)).unwrap();
        assert_eq!(basis.vectors(), &[1, 3, 4, 6]);
        let s = crate::geometry::shift_matrix(2, 1);
        let i4 = ComplexMatrix::identity(4);
        let op = kron(&i4, &s);
        for &v in basis.vectors() {
            let mut input = vec![C64::new(0.0, 0.0); 8];
            input[v] = C64::new(1.0, 0.0);
            let out = op.apply(&input).unwrap();
            let target = out.iter().position(|z| z.norm() > 0.5).unwrap();
            // Applying 1 (x) 1 (x) S maps class 1 back onto class 0.
            let class0 = class_subspace(p, Scheme::xi_last(p), 0, &TransposeMask::zero(2)).unwrap();
            assert!(class0.position(target).is_some());
        }
    }
}
