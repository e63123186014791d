//! Entanglement and state-comparison measures.
//!
//! The generated mechanical states live on `{|00>, |01>, |10>}` of two
//! qubits, where the pure-state concurrence applies directly. The
//! displaced states leave the qubit subspace, so the local-operation
//! invariance of their entanglement is stated through the logarithmic
//! negativity, which is defined in any dimension.

use nalgebra::{DMatrix, DVector};

use crate::analytic::MechPairState;
use crate::fock::{inner, max_entry, StateVector};
use crate::{C64, Error, Result};

/// Eigenvalues of reduced or partial-transposed matrices above this
/// (negative) floor are numerical dust and get clipped to zero; anything
/// below it is a hard error.
pub const EIG_CLIP: f64 = -1e-9;

/// Density matrix over an ordered list of subsystem dimensions, laid out
/// with the first subsystem slowest.
#[derive(Clone, Debug)]
pub struct DensityMatrix {
    dims: Vec<usize>,
    entries: DMatrix<C64>,
}

impl DensityMatrix {
    pub fn new(dims: Vec<usize>, entries: DMatrix<C64>) -> Result<Self> {
        let total: usize = dims.iter().product();
        if entries.nrows() != total || entries.ncols() != total {
            return Err(Error::DimensionMismatch(entries.nrows(), total));
        }
        let herm_dev = max_entry(&(&entries - entries.adjoint()));
        if herm_dev > 1e-10 {
            return Err(Error::NotPhysical(format!("Hermitian deviation {herm_dev:.3e}")));
        }
        let tr: C64 = entries.diagonal().iter().sum();
        if (tr.re - 1.0).abs() > 1e-10 || tr.im.abs() > 1e-10 {
            return Err(Error::NotPhysical(format!("trace {tr} != 1")));
        }
        let min_eig = entries
            .clone()
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .fold(f64::INFINITY, |a, &b| a.min(b));
        if min_eig < EIG_CLIP {
            return Err(Error::NotPhysical(format!("negative eigenvalue {min_eig:.3e}")));
        }
        Ok(Self { dims, entries })
    }

    /// `|psi><psi|` over the given subsystem dimensions.
    pub fn from_pure(dims: Vec<usize>, amplitudes: &DVector<C64>) -> Result<Self> {
        let ket = amplitudes / C64::new(amplitudes.norm(), 0.0);
        let rho = &ket * ket.adjoint();
        Self::new(dims, rho)
    }

    pub fn from_mech_pair(st: &MechPairState) -> Result<Self> {
        let v = DVector::from_vec(vec![st.c00, st.c01, st.c10, C64::new(0.0, 0.0)]);
        Self::from_pure(vec![2, 2], &v)
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn entries(&self) -> &DMatrix<C64> {
        &self.entries
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn trace(&self) -> C64 {
        self.entries.diagonal().iter().sum()
    }
}

fn decode(mut flat: usize, dims: &[usize]) -> Vec<usize> {
    let mut digits = vec![0; dims.len()];
    for k in (0..dims.len()).rev() {
        digits[k] = flat % dims[k];
        flat /= dims[k];
    }
    digits
}

fn encode(digits: &[usize], dims: &[usize]) -> usize {
    digits.iter().zip(dims).fold(0, |acc, (&d, &n)| acc * n + d)
}

/// Reduced density matrix over the kept subsystems (indices into
/// `rho.dims()`, in their original order).
pub fn partial_trace(rho: &DensityMatrix, keep: &[usize]) -> Result<DensityMatrix> {
    let n_sub = rho.dims().len();
    let mut seen = vec![false; n_sub];
    for &k in keep {
        if k >= n_sub || seen[k] {
            return Err(Error::InvalidParams(format!("invalid keep set {keep:?}")));
        }
        seen[k] = true;
    }
    let kept: Vec<usize> = (0..n_sub).filter(|i| seen[*i]).collect();
    let traced: Vec<usize> = (0..n_sub).filter(|i| !seen[*i]).collect();
    let kept_dims: Vec<usize> = kept.iter().map(|&i| rho.dims()[i]).collect();
    let traced_dims: Vec<usize> = traced.iter().map(|&i| rho.dims()[i]).collect();
    let dim_keep: usize = kept_dims.iter().product();
    let dim_trace: usize = traced_dims.iter().product::<usize>().max(1);

    let mut out = DMatrix::<C64>::zeros(dim_keep, dim_keep);
    let mut full_row = vec![0usize; n_sub];
    let mut full_col = vec![0usize; n_sub];
    for a in 0..dim_keep {
        let da = decode(a, &kept_dims);
        for b in 0..dim_keep {
            let db = decode(b, &kept_dims);
            let mut acc = C64::new(0.0, 0.0);
            for t in 0..dim_trace {
                let dt = decode(t, &traced_dims);
                for (pos, &sub) in kept.iter().enumerate() {
                    full_row[sub] = da[pos];
                    full_col[sub] = db[pos];
                }
                for (pos, &sub) in traced.iter().enumerate() {
                    full_row[sub] = dt[pos];
                    full_col[sub] = dt[pos];
                }
                acc += rho.entries()[(encode(&full_row, rho.dims()), encode(&full_col, rho.dims()))];
            }
            out[(a, b)] = acc;
        }
    }
    DensityMatrix::new(kept_dims, out)
}

/// Transposes the first `n_left` subsystems.
fn partial_transpose(rho: &DensityMatrix, n_left: usize) -> Result<DMatrix<C64>> {
    if n_left == 0 || n_left >= rho.dims().len() {
        return Err(Error::InvalidParams(format!(
            "bipartition split {n_left} out of range for {} subsystems",
            rho.dims().len()
        )));
    }
    let dim_a: usize = rho.dims()[..n_left].iter().product();
    let dim_b: usize = rho.dims()[n_left..].iter().product();
    let mut out = DMatrix::<C64>::zeros(rho.dim(), rho.dim());
    for ia in 0..dim_a {
        for ib in 0..dim_b {
            for ja in 0..dim_a {
                for jb in 0..dim_b {
                    out[(ia * dim_b + ib, ja * dim_b + jb)] =
                        rho.entries()[(ja * dim_b + ib, ia * dim_b + jb)];
                }
            }
        }
    }
    Ok(out)
}

/// Logarithmic negativity `log2 ||rho^{T_A}||_1` across the bipartition
/// that puts the first `n_left` subsystems on side A.
pub fn log_negativity(rho: &DensityMatrix, n_left: usize) -> Result<f64> {
    let pt = partial_transpose(rho, n_left)?;
    let eig = pt.symmetric_eigen().eigenvalues;
    let trace_norm: f64 = eig.iter().map(|l| l.abs()).sum();
    Ok(trace_norm.log2())
}

/// Pure-state concurrence of a mechanical pair state: with the `|11>`
/// amplitude identically zero this is `2 |c01| |c10|`.
pub fn concurrence_pure(st: &MechPairState) -> f64 {
    2.0 * st.c01.norm() * st.c10.norm()
}

fn sigma_yy() -> DMatrix<C64> {
    // sigma_y (x) sigma_y = antidiag(-1, 1, 1, -1)
    let z = C64::new(0.0, 0.0);
    let p = C64::new(1.0, 0.0);
    let m = C64::new(-1.0, 0.0);
    DMatrix::from_row_slice(4, 4, &[
        z, z, z, m,
        z, z, p, z,
        z, p, z, z,
        m, z, z, z,
    ])
}

fn clipped_sqrt_eigen(m: &DMatrix<C64>) -> Result<(DVector<f64>, DMatrix<C64>)> {
    let se = m.clone().symmetric_eigen();
    // eigenvalues that vanish in exact arithmetic come back as O(eps)
    // noise, which the square root would amplify to ~1e-8; snap them to
    // zero relative to the largest eigenvalue
    let lmax = se.eigenvalues.iter().fold(0.0_f64, |a, &l| a.max(l));
    let dust = lmax * 1e-12;
    let mut vals = DVector::zeros(se.eigenvalues.len());
    for (k, &l) in se.eigenvalues.iter().enumerate() {
        if l < EIG_CLIP {
            return Err(Error::NotPhysical(format!("negative eigenvalue {l:.3e}")));
        }
        vals[k] = if l <= dust { 0.0 } else { l.sqrt() };
    }
    Ok((vals, se.eigenvectors))
}

/// Wootters concurrence of a two-qubit density matrix:
/// `max(0, l1 - l2 - l3 - l4)` where the `l_i` are the decreasingly
/// ordered square roots of the eigenvalues of
/// `rho (sy x sy) rho^* (sy x sy)`.
///
/// Evaluated through the Hermitian product `sqrt(rho) rho_tilde
/// sqrt(rho)`, which shares those eigenvalues; relative eigenvalue noise
/// is snapped to zero before the square root so rank-deficient inputs
/// (pure states in particular) do not lose precision.
pub fn concurrence_mixed(rho: &DensityMatrix) -> Result<f64> {
    if rho.dims() != [2, 2] {
        return Err(Error::InvalidParams(format!("expected two qubits, got dims {:?}", rho.dims())));
    }
    let yy = sigma_yy();
    let rho_tilde = &yy * rho.entries().map(|z| z.conj()) * &yy;
    // eigenvalues of rho * rho_tilde via the Hermitian product
    // sqrt(rho) rho_tilde sqrt(rho)
    let (sq_vals, vecs) = clipped_sqrt_eigen(rho.entries())?;
    let mut sqrt_rho = vecs.clone();
    for (k, mut col) in sqrt_rho.column_iter_mut().enumerate() {
        col *= C64::new(sq_vals[k], 0.0);
    }
    let sqrt_rho = &sqrt_rho * vecs.adjoint();
    let herm = &sqrt_rho * rho_tilde * &sqrt_rho;
    let (lambdas, _) = clipped_sqrt_eigen(&herm)?;
    let mut l: Vec<f64> = lambdas.iter().copied().collect();
    l.sort_by(|a, b| b.partial_cmp(a).unwrap());
    Ok((l[0] - l[1] - l[2] - l[3]).max(0.0))
}

/// `|<a|b>|^2`.
pub fn fidelity_pure(a: &StateVector, b: &StateVector) -> Result<f64> {
    Ok(inner(a, b)?.norm_sqr())
}

/// Projects a normalized mechanical state (over `n_b^2` amplitudes) onto
/// the qubit span `{|00>, |01>, |10>}`, returning the renormalized pair
/// state and the leakage `1 - captured probability`. Leakage at or above
/// one half makes the projection meaningless and is an error.
pub fn qubit_project(mech: &StateVector) -> Result<(MechPairState, f64)> {
    let s = mech.spec();
    if mech.len() != s.mech_dim() {
        return Err(Error::DimensionMismatch(mech.len(), s.mech_dim()));
    }
    let n_b = s.n_b();
    let at = |n1: usize, n2: usize| mech.amplitudes()[n1 * n_b + n2];
    let (c00, c01, c10) = (at(0, 0), at(0, 1), at(1, 0));
    let captured = c00.norm_sqr() + c01.norm_sqr() + c10.norm_sqr();
    let leakage = (1.0 - captured).max(0.0);
    if leakage >= 0.5 {
        return Err(Error::ProjectionLeakage(leakage));
    }
    let n = captured.sqrt();
    Ok((MechPairState { c00: c00 / n, c01: c01 / n, c10: c10 / n }, leakage))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{displacement, tensor, HilbertSpec};
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    pub(crate) fn random_pair_state(rng: &mut impl Rng) -> MechPairState {
        let raw: Vec<C64> = (0..3).map(|_| c(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)).collect();
        let n = raw.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        MechPairState { c00: raw[0] / n, c01: raw[1] / n, c10: raw[2] / n }
    }

    #[test]
    fn partial_trace_of_product_state() {
        let a = DVector::from_vec(vec![c(0.6, 0.0), c(0.0, 0.8)]);
        let b = DVector::from_vec(vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]).normalize();
        let joint = a.kronecker(&b);
        let rho = DensityMatrix::from_pure(vec![2, 3], &joint).unwrap();
        let red = partial_trace(&rho, &[0]).unwrap();
        let rho_a = DensityMatrix::from_pure(vec![2], &a).unwrap();
        let diff = red.entries() - rho_a.entries();
        assert!(max_entry(&diff) < 1e-12);
        assert!((red.trace().re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn partial_trace_of_bell_state() {
        let r = 0.5_f64.sqrt();
        let bell = DVector::from_vec(vec![c(r, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(r, 0.0)]);
        let rho = DensityMatrix::from_pure(vec![2, 2], &bell).unwrap();
        for keep in [[0usize], [1usize]] {
            let red = partial_trace(&rho, &keep).unwrap();
            let diff = red.entries() - DMatrix::<C64>::identity(2, 2) * c(0.5, 0.0);
            assert!(max_entry(&diff) < 1e-12);
        }
    }

    #[test]
    fn partial_trace_rejects_bad_keep_set() {
        let rho = DensityMatrix::from_pure(
            vec![2, 2],
            &DVector::from_vec(vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]),
        )
        .unwrap();
        assert!(partial_trace(&rho, &[2]).is_err());
        assert!(partial_trace(&rho, &[0, 0]).is_err());
    }

    #[test]
    fn concurrence_pure_landmarks() {
        let sep = MechPairState { c00: c(1.0, 0.0), c01: c(0.0, 0.0), c10: c(0.0, 0.0) };
        assert_abs_diff_eq!(concurrence_pure(&sep), 0.0, epsilon = 1e-15);
        let r = 0.5_f64.sqrt();
        let bell = MechPairState { c00: c(0.0, 0.0), c01: c(r, 0.0), c10: c(-r, 0.0) };
        assert_abs_diff_eq!(concurrence_pure(&bell), 1.0, epsilon = 1e-14);
        // the tau = pi/2 generated state
        let st = MechPairState { c00: c(0.0, -r), c01: c(0.0, 0.5), c10: c(0.0, -0.5) };
        assert_abs_diff_eq!(concurrence_pure(&st), 0.5, epsilon = 1e-14);
    }

    #[test]
    fn concurrence_mixed_matches_pure_on_random_states() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let st = random_pair_state(&mut rng);
            let rho = DensityMatrix::from_mech_pair(&st).unwrap();
            let mixed = concurrence_mixed(&rho).unwrap();
            assert!((mixed - concurrence_pure(&st)).abs() < 1e-10);
        }
    }

    #[test]
    fn concurrence_mixed_landmarks() {
        let rho = DensityMatrix::new(vec![2, 2], DMatrix::identity(4, 4) * c(0.25, 0.0)).unwrap();
        assert_abs_diff_eq!(concurrence_mixed(&rho).unwrap(), 0.0, epsilon = 1e-12);
        // Werner state at the separability boundary p = 1/3
        let r = 0.5_f64.sqrt();
        let singlet = DVector::from_vec(vec![c(0.0, 0.0), c(r, 0.0), c(-r, 0.0), c(0.0, 0.0)]);
        let pure = &singlet * singlet.adjoint();
        let p = 1.0 / 3.0;
        let werner = pure * c(p, 0.0) + DMatrix::identity(4, 4) * c((1.0 - p) / 4.0, 0.0);
        let rho = DensityMatrix::new(vec![2, 2], werner).unwrap();
        assert_abs_diff_eq!(concurrence_mixed(&rho).unwrap(), 0.0, epsilon = 1e-10);
        // just above the boundary it turns on
        let p = 0.4;
        let pure = &singlet * singlet.adjoint();
        let werner = pure * c(p, 0.0) + DMatrix::identity(4, 4) * c((1.0 - p) / 4.0, 0.0);
        let rho = DensityMatrix::new(vec![2, 2], werner).unwrap();
        assert!(concurrence_mixed(&rho).unwrap() > 0.0);
    }

    #[test]
    fn log_negativity_landmarks() {
        let a = DVector::from_vec(vec![c(0.6, 0.0), c(0.8, 0.0)]);
        let joint = a.kronecker(&a);
        let rho = DensityMatrix::from_pure(vec![2, 2], &joint).unwrap();
        assert_abs_diff_eq!(log_negativity(&rho, 1).unwrap(), 0.0, epsilon = 1e-12);
        let r = 0.5_f64.sqrt();
        let bell = DVector::from_vec(vec![c(r, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(r, 0.0)]);
        let rho = DensityMatrix::from_pure(vec![2, 2], &bell).unwrap();
        assert_abs_diff_eq!(log_negativity(&rho, 1).unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn log_negativity_relates_to_concurrence_on_pure_states() {
        // E_N = log2(1 + C) for pure two-qubit states
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..50 {
            let st = random_pair_state(&mut rng);
            let rho = DensityMatrix::from_mech_pair(&st).unwrap();
            let en = log_negativity(&rho, 1).unwrap();
            let cc = concurrence_pure(&st);
            assert!((en - (1.0 + cc).log2()).abs() < 1e-10);
        }
    }

    #[test]
    fn log_negativity_invariant_under_local_displacement() {
        // the computable form of "local operations preserve entanglement":
        // displacing each mechanical mode leaves E_N unchanged
        let s = HilbertSpec::new(12).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let st = random_pair_state(&mut rng);
        let n_b = s.n_b();
        let mut mech = DVector::<C64>::zeros(s.mech_dim());
        mech[0] = st.c00;
        mech[1] = st.c01;
        mech[n_b] = st.c10;
        let rho = DensityMatrix::from_pure(vec![n_b, n_b], &mech).unwrap();
        let base = log_negativity(&rho, 1).unwrap();
        let alpha = c(0.08, -0.05);
        let d = displacement(alpha, n_b).unwrap();
        let local = tensor(&d, &d);
        let displaced = local.matrix() * &mech;
        let rho_d = DensityMatrix::from_pure(vec![n_b, n_b], &displaced).unwrap();
        let shifted = log_negativity(&rho_d, 1).unwrap();
        assert!((base - shifted).abs() < 1e-6, "{base} vs {shifted}");
    }

    #[test]
    fn qubit_project_behaviour() {
        let s = HilbertSpec::new(6).unwrap();
        let n_b = s.n_b();
        // state already in the span
        let mut v = DVector::<C64>::zeros(s.mech_dim());
        v[0] = c(0.6, 0.0);
        v[1] = c(0.0, 0.48);
        v[n_b] = c(-0.64, 0.0);
        let st = StateVector::new(s, v).unwrap();
        let (m, leak) = qubit_project(&st).unwrap();
        assert!(leak < 1e-12);
        assert_abs_diff_eq!(m.norm_sqr(), 1.0, epsilon = 1e-12);
        // coherent tail: displaced vacuum at alpha = 0.1 has Poisson-tail
        // weight outside the span below 1e-2
        let alpha = c(0.1, 0.0);
        let d = displacement(alpha, n_b).unwrap();
        let local = tensor(&d, &d);
        let mut vac = DVector::<C64>::zeros(s.mech_dim());
        vac[0] = c(1.0, 0.0);
        let coh = StateVector::new(s, local.matrix() * vac).unwrap();
        let (_, leak) = qubit_project(&coh).unwrap();
        assert!(leak < 1e-2, "leak = {leak:.3e}");
        // overwhelming leakage is an error
        let mut far = DVector::<C64>::zeros(s.mech_dim());
        far[2 * n_b + 2] = c(1.0, 0.0);
        let far = StateVector::new(s, far).unwrap();
        assert!(matches!(qubit_project(&far), Err(Error::ProjectionLeakage(_))));
    }

    #[test]
    fn density_matrix_rejects_unphysical_input() {
        let mut m = DMatrix::<C64>::zeros(2, 2);
        m[(0, 0)] = c(1.5, 0.0);
        m[(1, 1)] = c(-0.5, 0.0);
        assert!(DensityMatrix::new(vec![2], m).is_err());
        let mut m = DMatrix::<C64>::identity(2, 2) * c(0.5, 0.0);
        m[(0, 1)] = c(0.3, 0.0); // not Hermitian vs the zero at (1,0)
        assert!(DensityMatrix::new(vec![2], m).is_err());
    }
}
