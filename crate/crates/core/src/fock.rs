//! Truncated-Fock-space linear algebra.
//!
//! Basis convention, frozen for the whole crate: the single-photon
//! subspace of two cavities and two mechanical modes is indexed by
//! `index = c * n_b^2 + n1 * n_b + n2`, where `c = 0` means the photon is
//! in cavity 1 (`|1>_{a1}|0>_{a2}`), `c = 1` means cavity 2, and `n1`,
//! `n2` are the Fock numbers of mechanical modes `b1`, `b2`.
//!
//! Finite truncation necessarily breaks the ladder algebra at the edge of
//! the Fock space, so algebraic checks (commutators, unitarity) are
//! asserted on the interior projection: Fock levels below `n_b - 2` on
//! each mechanical mode.

use nalgebra::{DMatrix, DVector};

use crate::{C64, Error, Result};

/// Max entrywise Hermitian deviation accepted by [`Propagator::new`].
pub const HERMITICITY_TOL: f64 = 1e-9;

/// Max entrywise Hermitian deviation for operators carrying the
/// `hermitian_hint` flag.
pub const HERMITIAN_HINT_TOL: f64 = 1e-12;

/// Norm drift tolerated after a propagation step.
pub const NORM_TOL: f64 = 1e-10;

/// Truncation and basis layout for the single-photon x two-mechanical-mode
/// space.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HilbertSpec {
    n_b: usize,
}

impl HilbertSpec {
    pub fn new(n_b: usize) -> Result<Self> {
        if n_b < 2 {
            return Err(Error::TruncationTooSmall(n_b));
        }
        Ok(Self { n_b })
    }

    /// Fock truncation per mechanical mode; kept states are `|0>..|n_b-1>`.
    pub fn n_b(&self) -> usize {
        self.n_b
    }

    /// Dimension of the two-mechanical-mode space, `n_b^2`.
    pub fn mech_dim(&self) -> usize {
        self.n_b * self.n_b
    }

    /// Dimension of the single-photon subspace, `2 n_b^2`.
    pub fn dim(&self) -> usize {
        2 * self.mech_dim()
    }

    /// Flat index of `|c; n1, n2>`.
    pub fn index(&self, c: usize, n1: usize, n2: usize) -> usize {
        debug_assert!(c < 2 && n1 < self.n_b && n2 < self.n_b);
        c * self.mech_dim() + n1 * self.n_b + n2
    }

    /// Inverse of [`HilbertSpec::index`].
    pub fn unpack(&self, index: usize) -> (usize, usize, usize) {
        let c = index / self.mech_dim();
        let rem = index % self.mech_dim();
        (c, rem / self.n_b, rem % self.n_b)
    }

    /// True when both mechanical Fock numbers are below `n_b - 2`.
    pub fn is_interior(&self, index: usize) -> bool {
        let (_, n1, n2) = self.unpack(index);
        n1 + 2 < self.n_b && n2 + 2 < self.n_b
    }
}

/// Dense complex square matrix with a Hermiticity marker.
#[derive(Clone, Debug)]
pub struct Operator {
    entries: DMatrix<C64>,
    hermitian_hint: bool,
}

impl Operator {
    /// Wraps a square matrix without claiming Hermiticity.
    pub fn new(entries: DMatrix<C64>) -> Result<Self> {
        if entries.nrows() != entries.ncols() {
            return Err(Error::NotSquare {
                rows: entries.nrows(),
                cols: entries.ncols(),
            });
        }
        Ok(Self { entries, hermitian_hint: false })
    }

    /// Wraps a matrix asserting Hermiticity; rejects deviations above
    /// [`HERMITIAN_HINT_TOL`].
    pub fn hermitian(entries: DMatrix<C64>) -> Result<Self> {
        let mut op = Self::new(entries)?;
        let dev = op.hermitian_deviation();
        if dev > HERMITIAN_HINT_TOL {
            return Err(Error::NotHermitian(dev));
        }
        op.hermitian_hint = true;
        Ok(op)
    }

    pub fn identity(dim: usize) -> Self {
        Self { entries: DMatrix::identity(dim, dim), hermitian_hint: true }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.entries
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.entries
    }

    pub fn hermitian_hint(&self) -> bool {
        self.hermitian_hint
    }

    pub fn adjoint(&self) -> Self {
        Self { entries: self.entries.adjoint(), hermitian_hint: self.hermitian_hint }
    }

    /// Max entrywise magnitude of `M - M^dagger`.
    pub fn hermitian_deviation(&self) -> f64 {
        let diff = &self.entries - self.entries.adjoint();
        max_entry(&diff)
    }

    /// `A * B`; the result carries no Hermiticity claim.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch(self.dim(), other.dim()));
        }
        Operator::new(&self.entries * &other.entries)
    }

    /// Max entrywise deviation from the identity, on the interior block of
    /// `spec` when given. Used for unitarity checks of truncated
    /// transformations.
    pub fn deviation_from_identity(&self, spec: Option<&HilbertSpec>) -> f64 {
        let id = DMatrix::<C64>::identity(self.dim(), self.dim());
        let diff = &self.entries - id;
        match spec {
            Some(s) => max_entry_interior(&diff, s),
            None => max_entry(&diff),
        }
    }
}

/// Largest entrywise magnitude of a matrix.
pub fn max_entry(m: &DMatrix<C64>) -> f64 {
    m.iter().fold(0.0_f64, |acc, z| acc.max(z.norm()))
}

/// Largest entrywise magnitude over rows and columns in the interior of
/// `spec` (both mechanical Fock numbers below `n_b - 2`).
pub fn max_entry_interior(m: &DMatrix<C64>, spec: &HilbertSpec) -> f64 {
    let mut acc = 0.0_f64;
    for i in 0..m.nrows() {
        if !spec.is_interior(i) {
            continue;
        }
        for j in 0..m.ncols() {
            if spec.is_interior(j) {
                acc = acc.max(m[(i, j)].norm());
            }
        }
    }
    acc
}

/// Largest entrywise magnitude over rows and columns whose total
/// mechanical occupation `n1 + n2` is at most `max_total`. Similarity
/// transforms by the truncated beam-splitter and displacement operators
/// are faithful only well below the truncation edge (the beam splitter
/// mixes states of equal total occupation, which can reach `2 n_b - 2`
/// even when each mode is individually interior), so operator-identity
/// checks compare on a low-total-occupation block.
pub fn max_entry_block(m: &DMatrix<C64>, spec: &HilbertSpec, max_total: usize) -> f64 {
    let low = |index: usize| {
        let (_, n1, n2) = spec.unpack(index);
        n1 + n2 <= max_total
    };
    let mut acc = 0.0_f64;
    for i in 0..m.nrows() {
        if !low(i) {
            continue;
        }
        for j in 0..m.ncols() {
            if low(j) {
                acc = acc.max(m[(i, j)].norm());
            }
        }
    }
    acc
}

/// Complex amplitude vector over a declared basis; either the full
/// single-photon subspace of `spec` or its mechanical factor.
#[derive(Clone, Debug)]
pub struct StateVector {
    spec: HilbertSpec,
    amplitudes: DVector<C64>,
}

impl StateVector {
    pub fn new(spec: HilbertSpec, amplitudes: DVector<C64>) -> Result<Self> {
        if amplitudes.len() != spec.dim() && amplitudes.len() != spec.mech_dim() {
            return Err(Error::DimensionMismatch(amplitudes.len(), spec.dim()));
        }
        Ok(Self { spec, amplitudes })
    }

    /// Full-space basis ket `|c; n1, n2>`.
    pub fn basis_state(spec: HilbertSpec, c: usize, n1: usize, n2: usize) -> Self {
        let mut v = DVector::zeros(spec.dim());
        v[spec.index(c, n1, n2)] = C64::new(1.0, 0.0);
        Self { spec, amplitudes: v }
    }

    pub fn spec(&self) -> HilbertSpec {
        self.spec
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amplitudes
    }

    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }
}

/// Bosonic annihilation operator on the `n_b`-level truncated mode:
/// entry `(n-1, n) = sqrt(n)`.
pub fn annihilation(n_b: usize) -> Result<Operator> {
    if n_b < 2 {
        return Err(Error::TruncationTooSmall(n_b));
    }
    let mut m = DMatrix::<C64>::zeros(n_b, n_b);
    for n in 1..n_b {
        m[(n - 1, n)] = C64::new((n as f64).sqrt(), 0.0);
    }
    Operator::new(m)
}

pub fn creation(n_b: usize) -> Result<Operator> {
    Ok(annihilation(n_b)?.adjoint())
}

/// Number operator `diag(0, 1, ..., n_b - 1)`.
pub fn number(n_b: usize) -> Result<Operator> {
    if n_b < 2 {
        return Err(Error::TruncationTooSmall(n_b));
    }
    let m = DMatrix::from_fn(n_b, n_b, |i, j| {
        if i == j { C64::new(i as f64, 0.0) } else { C64::new(0.0, 0.0) }
    });
    Operator::hermitian(m)
}

/// Kronecker product with the slowest index first, matching the frozen
/// basis layout.
pub fn tensor(a: &Operator, b: &Operator) -> Operator {
    Operator {
        entries: a.matrix().kronecker(b.matrix()),
        hermitian_hint: a.hermitian_hint() && b.hermitian_hint(),
    }
}

/// `exp(G)` for an anti-Hermitian generator `G`, via eigendecomposition
/// of the Hermitian matrix `iG`.
pub fn expm_antihermitian(gen: &DMatrix<C64>) -> Result<DMatrix<C64>> {
    if gen.nrows() != gen.ncols() {
        return Err(Error::NotSquare { rows: gen.nrows(), cols: gen.ncols() });
    }
    let h = gen.map(|z| C64::new(0.0, 1.0) * z);
    let dev = max_entry(&(&h - h.adjoint()));
    if dev > HERMITICITY_TOL {
        return Err(Error::NotHermitian(dev));
    }
    let se = h.symmetric_eigen();
    let phases = DVector::from_iterator(
        se.eigenvalues.len(),
        se.eigenvalues.iter().map(|&l| C64::from_polar(1.0, -l)),
    );
    let mut scaled = se.eigenvectors.clone();
    for (k, mut col) in scaled.column_iter_mut().enumerate() {
        col *= phases[k];
    }
    Ok(&scaled * se.eigenvectors.adjoint())
}

/// Displacement operator `D(alpha) = exp(alpha b^dag - alpha^* b)` on the
/// truncated mode. Exact within the truncation; the caller is responsible
/// for `|alpha|^2 << n_b`.
pub fn displacement(alpha: C64, n_b: usize) -> Result<Operator> {
    let b = annihilation(n_b)?;
    let gen = b.adjoint().matrix() * alpha - b.matrix() * alpha.conj();
    Operator::new(expm_antihermitian(&gen)?)
}

/// Cached eigendecomposition of a Hermitian operator, for repeated
/// `exp(-iht)` applications across a time sweep.
pub struct Propagator {
    eigenvalues: DVector<f64>,
    eigenvectors: DMatrix<C64>,
}

impl Propagator {
    /// Rejects operators whose Hermitian deviation exceeds
    /// [`HERMITICITY_TOL`].
    pub fn new(h: &Operator) -> Result<Self> {
        let dev = h.hermitian_deviation();
        if dev > HERMITICITY_TOL {
            return Err(Error::NotHermitian(dev));
        }
        let se = h.matrix().clone().symmetric_eigen();
        Ok(Self { eigenvalues: se.eigenvalues, eigenvectors: se.eigenvectors })
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// `exp(-iht) psi` on a raw amplitude vector.
    pub fn apply_raw(&self, t: f64, psi: &DVector<C64>) -> DVector<C64> {
        let mut c = self.eigenvectors.adjoint() * psi;
        for (k, ck) in c.iter_mut().enumerate() {
            *ck *= C64::from_polar(1.0, -self.eigenvalues[k] * t);
        }
        &self.eigenvectors * c
    }

    /// `exp(-iht) psi`, checking dimension and norm preservation.
    pub fn apply(&self, t: f64, psi: &StateVector) -> Result<StateVector> {
        if psi.len() != self.dim() {
            return Err(Error::DimensionMismatch(psi.len(), self.dim()));
        }
        let out = self.apply_raw(t, psi.amplitudes());
        let drift = (out.norm() - psi.norm()).abs();
        if drift > NORM_TOL {
            return Err(Error::TruncationLeakage(drift));
        }
        StateVector::new(psi.spec(), out)
    }
}

/// One-shot `exp(-iht) psi`. Use [`Propagator`] directly when sweeping
/// over `t`.
pub fn expm_apply(h: &Operator, t: f64, psi: &StateVector) -> Result<StateVector> {
    Propagator::new(h)?.apply(t, psi)
}

/// `<a|b>` with conjugation on `a`.
pub fn inner(a: &StateVector, b: &StateVector) -> Result<C64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch(a.len(), b.len()));
    }
    Ok(a.amplitudes().dotc(b.amplitudes()))
}

/// Max entrywise magnitude of `AB - BA`.
pub fn commutator_norm(a: &Operator, b: &Operator) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch(a.dim(), b.dim()));
    }
    let comm = a.matrix() * b.matrix() - b.matrix() * a.matrix();
    Ok(max_entry(&comm))
}

/// [`commutator_norm`] restricted to the interior rows and columns of
/// `spec`.
pub fn commutator_norm_interior(a: &Operator, b: &Operator, spec: &HilbertSpec) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch(a.dim(), b.dim()));
    }
    let comm = a.matrix() * b.matrix() - b.matrix() * a.matrix();
    Ok(max_entry_interior(&comm, spec))
}
