//! Brute-force numeric propagation and cross-validation.
//!
//! Three independent routes to the evolved state:
//!
//! 1. direct exponentiation of the system Hamiltonian (`exact`);
//! 2. the transformation chain with the exact qubit-oscillator part
//!    (`chain exact`) -- an algebraic identity with route 1, so their
//!    fidelity certifies the transformation algebra;
//! 3. the chain with the Jaynes-Cummings part (`chain RWA`) -- exactly
//!    reproduced by the closed form, so their fidelity certifies the
//!    analytic solution given the rotating-wave approximation.
//!
//! The only approximation in the derivation is the RWA, so any
//! exact-vs-analytic disagreement is attributable to it; `rwa_scan`
//! quantifies how that error shrinks as `omega_m / g_mag` grows.

use nalgebra::{DMatrix, DVector};

use crate::analytic::{
    beta_of, concurrence_closed, evolve_analytic, postselect_analytic, to_full_ket, Outcome,
    MechPairState, PROB_FLOOR,
};
use crate::entanglement::{concurrence_pure, fidelity_pure, qubit_project};
use crate::fock::{displacement, tensor, HilbertSpec, Operator, Propagator, StateVector, NORM_TOL};
use crate::model::{
    build_hii_exact, build_hii_rwa, build_hs, build_v1, build_v2, build_v3, h3_diagonal,
    ModelParams, XI_MATCH_RTOL,
};
use crate::{C64, Error, Result};

/// Lower fidelity bound certifying the transformation algebra
/// (exact vs chain-exact) and the closed form (chain-RWA vs analytic).
pub const LAYERED_FIDELITY_MIN: f64 = 1.0 - 1e-9;

/// Which qubit-oscillator part the chain propagator exponentiates.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ChainMode {
    ExactHii,
    RwaHii,
}

/// Per-time cross-validation record. All times are reported as the
/// scaled time `tau = g_mag * t`.
#[derive(Clone, Copy, Debug)]
pub struct ComparisonReport {
    pub tau: f64,
    pub fidelity_exact_vs_chain_exact: f64,
    pub fidelity_exact_vs_analytic: f64,
    pub fidelity_chain_rwa_vs_analytic: f64,
    /// Max over outcomes of |P_l numeric - P_l analytic|.
    pub prob_delta: f64,
    /// Max over defined outcomes of |C_l numeric - C_l closed-form|.
    pub concurrence_delta: f64,
    /// Max probability mass left outside the qubit span while reducing
    /// numeric branches, weighted by the branch probability so that
    /// near-empty branches do not dominate.
    pub leakage: f64,
}

impl ComparisonReport {
    /// Violations of the approximation-free layers; empty means the
    /// transformation algebra and the closed form both check out at this
    /// time.
    pub fn layered_violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.fidelity_exact_vs_chain_exact < LAYERED_FIDELITY_MIN {
            out.push(format!(
                "tau {:.6}: exact vs chain-exact fidelity {:.12} below {LAYERED_FIDELITY_MIN}",
                self.tau, self.fidelity_exact_vs_chain_exact
            ));
        }
        if self.fidelity_chain_rwa_vs_analytic < LAYERED_FIDELITY_MIN {
            out.push(format!(
                "tau {:.6}: chain-RWA vs analytic fidelity {:.12} below {LAYERED_FIDELITY_MIN}",
                self.tau, self.fidelity_chain_rwa_vs_analytic
            ));
        }
        out
    }
}

/// The three chain unitaries as truncated matrices. Kept as a separate
/// struct so tests can substitute a deliberately corrupted member and
/// watch the layered checks catch it.
pub struct TransformChain {
    pub v1: Operator,
    pub v2: Operator,
    pub v3: Operator,
}

impl TransformChain {
    pub fn build(p: &ModelParams, s: HilbertSpec) -> Result<Self> {
        Ok(Self { v1: build_v1(s)?, v2: build_v2(s)?, v3: build_v3(p, s)? })
    }
}

/// Evolution through the transformation chain:
/// `U(t) = V1' V2' V3' e^{-iH3 t} V3 e^{-iH_II t} V2 V1` applied to the
/// initial state `|c=0; 0, 0>`. The pieces that do not depend on `t` are
/// precomputed once.
pub struct ChainPropagator {
    spec: HilbertSpec,
    /// `V2 V1 |psi0>`.
    psi_in: DVector<C64>,
    hii_prop: Propagator,
    v3: DMatrix<C64>,
    h3_diag: Vec<f64>,
    /// `V1^dag V2^dag V3^dag`.
    w: DMatrix<C64>,
}

impl ChainPropagator {
    pub fn new(p: &ModelParams, s: HilbertSpec, mode: ChainMode) -> Result<Self> {
        Self::with_chain(p, s, mode, TransformChain::build(p, s)?)
    }

    pub fn with_chain(
        p: &ModelParams,
        s: HilbertSpec,
        mode: ChainMode,
        chain: TransformChain,
    ) -> Result<Self> {
        p.validate()?;
        let hii = match mode {
            ChainMode::ExactHii => build_hii_exact(p, s)?,
            ChainMode::RwaHii => {
                let mismatch = p.xi_mismatch();
                if mismatch > XI_MATCH_RTOL {
                    return Err(Error::XiMismatch(mismatch));
                }
                build_hii_rwa(p, s)?
            }
        };
        let psi0 = StateVector::basis_state(s, 0, 0, 0);
        let psi_in = chain.v2.matrix() * (chain.v1.matrix() * psi0.amplitudes());
        let w = chain.v1.matrix().adjoint()
            * chain.v2.matrix().adjoint()
            * chain.v3.matrix().adjoint();
        Ok(Self {
            spec: s,
            psi_in,
            hii_prop: Propagator::new(&hii)?,
            v3: chain.v3.into_matrix(),
            h3_diag: h3_diagonal(p, s),
            w,
        })
    }

    pub fn propagate(&self, t: f64) -> Result<StateVector> {
        let mut phi = self.hii_prop.apply_raw(t, &self.psi_in);
        phi = &self.v3 * phi;
        for (k, amp) in phi.iter_mut().enumerate() {
            *amp *= C64::from_polar(1.0, -self.h3_diag[k] * t);
        }
        let out = &self.w * phi;
        let drift = (out.norm() - 1.0).abs();
        if drift > NORM_TOL {
            return Err(Error::TruncationLeakage(drift));
        }
        StateVector::new(self.spec, out)
    }
}

/// Direct exponentiation of the system Hamiltonian from `|c=0; 0, 0>`.
pub struct ExactPropagator {
    spec: HilbertSpec,
    prop: Propagator,
    psi0: StateVector,
}

impl ExactPropagator {
    pub fn new(p: &ModelParams, s: HilbertSpec) -> Result<Self> {
        let hs = build_hs(p, s)?;
        Ok(Self { spec: s, prop: Propagator::new(&hs)?, psi0: StateVector::basis_state(s, 0, 0, 0) })
    }

    pub fn spec(&self) -> HilbertSpec {
        self.spec
    }

    pub fn propagate(&self, t: f64) -> Result<StateVector> {
        self.prop.apply(t, &self.psi0)
    }
}

/// One-shot direct propagation; use [`ExactPropagator`] for sweeps.
pub fn propagate_exact(p: &ModelParams, s: HilbertSpec, t: f64) -> Result<StateVector> {
    ExactPropagator::new(p, s)?.propagate(t)
}

/// One-shot chain propagation; use [`ChainPropagator`] for sweeps.
pub fn propagate_chain(p: &ModelParams, s: HilbertSpec, t: f64, mode: ChainMode) -> Result<StateVector> {
    ChainPropagator::new(p, s, mode)?.propagate(t)
}

/// Projects onto the requested cavity block, returning the renormalized
/// mechanical ket and the block probability. A vanishing-probability
/// branch has no conditional state and is an error.
pub fn postselect_numeric(psi: &StateVector, outcome: Outcome) -> Result<(StateVector, f64)> {
    let s = psi.spec();
    if psi.len() != s.dim() {
        return Err(Error::DimensionMismatch(psi.len(), s.dim()));
    }
    let offset = outcome.c_index() * s.mech_dim();
    let block = psi.amplitudes().rows(offset, s.mech_dim()).clone_owned();
    let prob = block.norm().powi(2);
    if prob < PROB_FLOOR {
        return Err(Error::UndefinedState(prob));
    }
    let mech = block / C64::new(prob.sqrt(), 0.0);
    Ok((StateVector::new(s, mech)?, prob))
}

/// Inverts the local displacements (`D(-beta/sqrt(2))` on each mode) and
/// projects onto the qubit span.
pub fn undisplace_and_project(mech: &StateVector, beta: C64) -> Result<(MechPairState, f64)> {
    let s = mech.spec();
    if mech.len() != s.mech_dim() {
        return Err(Error::DimensionMismatch(mech.len(), s.mech_dim()));
    }
    let d = displacement(-beta / 2.0_f64.sqrt(), s.n_b())?;
    let local = tensor(&d, &d);
    let undone = local.matrix() * mech.amplitudes();
    qubit_project(&StateVector::new(s, undone)?)
}

/// All three propagators plus the analytic reference, with every
/// eigendecomposition done once. Rows of a time sweep are independent;
/// the engine is `Sync` and `compare_grid` fans them out.
pub struct OracleEngine {
    params: ModelParams,
    spec: HilbertSpec,
    exact: ExactPropagator,
    chain_exact: ChainPropagator,
    chain_rwa: ChainPropagator,
}

impl OracleEngine {
    /// Requires `omega_m = 2 xi`: the RWA chain and the closed form are
    /// only defined on the solvability condition.
    pub fn new(p: &ModelParams, s: HilbertSpec) -> Result<Self> {
        Ok(Self {
            params: *p,
            spec: s,
            exact: ExactPropagator::new(p, s)?,
            chain_exact: ChainPropagator::new(p, s, ChainMode::ExactHii)?,
            chain_rwa: ChainPropagator::new(p, s, ChainMode::RwaHii)?,
        })
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn spec(&self) -> HilbertSpec {
        self.spec
    }

    pub fn propagate_exact(&self, t: f64) -> Result<StateVector> {
        self.exact.propagate(t)
    }

    pub fn propagate_chain(&self, t: f64, mode: ChainMode) -> Result<StateVector> {
        match mode {
            ChainMode::ExactHii => self.chain_exact.propagate(t),
            ChainMode::RwaHii => self.chain_rwa.propagate(t),
        }
    }

    /// Runs the three propagators and the closed form at time `t`,
    /// post-selects both cavity outcomes, and reports fidelities and
    /// deviations. Probability and concurrence deltas compare the exact
    /// propagator against the closed forms, so they measure the RWA
    /// error; the displacement removed before the qubit reduction is
    /// always the analytic `beta(t)`, so residual mismatch is reported
    /// rather than absorbed.
    pub fn compare(&self, t: f64) -> Result<ComparisonReport> {
        let p = &self.params;
        let psi_exact = self.exact.propagate(t)?;
        let psi_chain = self.chain_exact.propagate(t)?;
        let psi_rwa = self.chain_rwa.propagate(t)?;
        let analytic = evolve_analytic(p, t)?;
        let psi_analytic = to_full_ket(&analytic, self.spec)?;

        let beta = beta_of(p, t);
        let mut prob_delta = 0.0_f64;
        let mut concurrence_delta = 0.0_f64;
        let mut leakage = 0.0_f64;
        for outcome in Outcome::both() {
            let p_analytic = postselect_analytic(&analytic, outcome).prob;
            match postselect_numeric(&psi_exact, outcome) {
                Ok((mech, p_num)) => {
                    prob_delta = prob_delta.max((p_num - p_analytic).abs());
                    if let Some(c_closed) = concurrence_closed(p, t, outcome) {
                        let (pair, leak) = undisplace_and_project(&mech, beta)?;
                        // weight by the branch probability: the normalized
                        // leakage blows up on near-empty branches
                        leakage = leakage.max(p_num * leak);
                        concurrence_delta =
                            concurrence_delta.max((concurrence_pure(&pair) - c_closed).abs());
                    }
                }
                Err(Error::UndefinedState(p_num)) => {
                    prob_delta = prob_delta.max((p_num - p_analytic).abs());
                }
                Err(e) => return Err(e),
            }
        }

        Ok(ComparisonReport {
            tau: p.g_mag() * t,
            fidelity_exact_vs_chain_exact: fidelity_pure(&psi_exact, &psi_chain)?,
            fidelity_exact_vs_analytic: fidelity_pure(&psi_exact, &psi_analytic)?,
            fidelity_chain_rwa_vs_analytic: fidelity_pure(&psi_rwa, &psi_analytic)?,
            prob_delta,
            concurrence_delta,
            leakage,
        })
    }

    /// [`OracleEngine::compare`] over a grid of scaled times, fanned out
    /// per the `parallel` feature.
    pub fn compare_grid(&self, taus: &[f64]) -> Result<Vec<ComparisonReport>> {
        let g = self.params.g_mag();
        crate::par::map(taus, |&tau| self.compare(tau / g)).into_iter().collect()
    }

    /// Sequential twin of [`OracleEngine::compare_grid`], kept unconditionally
    /// for benchmarking the parallel speedup.
    pub fn compare_grid_sequential(&self, taus: &[f64]) -> Result<Vec<ComparisonReport>> {
        let g = self.params.g_mag();
        taus.iter().map(|&tau| self.compare(tau / g)).collect()
    }
}

/// Cross-validation over several `omega_m / g_mag` ratios on a shared
/// scaled-time grid; used to demonstrate monotone RWA convergence.
/// Ratios below 2 are rejected.
pub fn rwa_scan(
    ratios: &[f64],
    tau_grid: &[f64],
    n_b: usize,
) -> Result<Vec<(f64, Vec<ComparisonReport>)>> {
    for &r in ratios {
        if r < 2.0 {
            return Err(Error::InvalidParams(format!("ratio {r} below 2")));
        }
    }
    let s = HilbertSpec::new(n_b)?;
    ratios
        .iter()
        .map(|&ratio| {
            let p = ModelParams::from_ratio(ratio, 0.5, 0.0)?;
            let engine = OracleEngine::new(&p, s)?;
            Ok((ratio, engine.compare_grid(tau_grid)?))
        })
        .collect()
}

/// Uniform grid of `steps` points over `[0, tau_max]`, endpoints
/// included.
pub fn tau_grid(tau_max: f64, steps: usize) -> Vec<f64> {
    assert!(steps >= 2);
    (0..steps).map(|k| tau_max * k as f64 / (steps - 1) as f64).collect()
}
