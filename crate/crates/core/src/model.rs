//! System Hamiltonians and unitary transformations in the single-photon
//! subspace.
//!
//! The photon-location degree of freedom is a qubit: `c = 0` means the
//! photon sits in cavity 1, `c = 1` in cavity 2. The transformation chain
//!
//! ```text
//! H_S --V1--> H_1 --V2--> H_I + H_II --V3--> H_3 (+ H_II)
//! ```
//!
//! rotates the mechanical modes (`V1`), the photon-location qubit (`V2`),
//! and displaces mode `b1` (`V3`), after which `H_3` is diagonal and
//! `H_II` is a quantum-Rabi-type qubit-oscillator coupling that becomes
//! Jaynes-Cummings under the rotating-wave approximation at
//! `omega_m = 2 xi`.
//!
//! Basis images of the qubit rotation `V2 = exp[(pi/4)(|0><1| - |1><0|)]`
//! in the photon-location basis, frozen here as the crate convention:
//!
//! ```text
//! V2 |c=0> = (|c=0> - |c=1>) / sqrt(2)
//! V2 |c=1> = (|c=0> + |c=1>) / sqrt(2)
//! ```

use nalgebra::DMatrix;

use crate::fock::{annihilation, expm_antihermitian, number, HilbertSpec, Operator};
use crate::{C64, Error, Result};

/// Physical frequencies and couplings of the two-cavity optomechanical
/// system. The decay rates enter only the regime checker, never any
/// propagator.
#[derive(Clone, Copy, Debug)]
pub struct ModelParams {
    /// Cavity resonance frequency.
    pub omega_c: f64,
    /// Mechanical resonance frequency.
    pub omega_m: f64,
    /// Single-photon optomechanical coupling, positive.
    pub g0: f64,
    /// Photon-hopping strength between the cavities.
    pub xi: f64,
    /// Cavity decay rate, regime checks only.
    pub gamma_c: Option<f64>,
    /// Mechanical decay rate, regime checks only.
    pub gamma_m: Option<f64>,
}

impl ModelParams {
    pub fn new(omega_c: f64, omega_m: f64, g0: f64, xi: f64) -> Result<Self> {
        let p = Self { omega_c, omega_m, g0, xi, gamma_c: None, gamma_m: None };
        p.validate()?;
        Ok(p)
    }

    /// Scale-free construction: fixes `g_mag = g0/sqrt(2) = 1`, so time
    /// equals the scaled time `tau = g_mag * t`. `ratio` is
    /// `omega_m / g_mag`, `xi_over_omega_m` defaults to the solvability
    /// point `1/2`, and `omega_c = omega_c_over_g * g_mag` contributes a
    /// global phase only.
    pub fn from_ratio(ratio: f64, xi_over_omega_m: f64, omega_c_over_g: f64) -> Result<Self> {
        let omega_m = ratio;
        Self::new(omega_c_over_g, omega_m, 2.0_f64.sqrt(), xi_over_omega_m * omega_m)
    }

    pub fn with_decay(mut self, gamma_c: f64, gamma_m: f64) -> Self {
        self.gamma_c = Some(gamma_c);
        self.gamma_m = Some(gamma_m);
        self
    }

    // negated comparisons are deliberate: NaN must fail every check
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    pub fn validate(&self) -> Result<()> {
        if !(self.omega_m > 0.0) {
            return Err(Error::InvalidParams(format!("omega_m must be positive, got {}", self.omega_m)));
        }
        if !(self.g0 > 0.0) {
            return Err(Error::InvalidParams(format!("g0 must be positive, got {}", self.g0)));
        }
        if !(self.xi >= 0.0) {
            return Err(Error::InvalidParams(format!("xi must be non-negative, got {}", self.xi)));
        }
        if !(self.omega_c >= 0.0) {
            return Err(Error::InvalidParams(format!("omega_c must be non-negative, got {}", self.omega_c)));
        }
        Ok(())
    }

    /// The coupling of the rotated frame, `g = -g0/sqrt(2)`. Hamiltonians
    /// and the displacement parameter use this signed value.
    pub fn g_signed(&self) -> f64 {
        -self.g0 / 2.0_f64.sqrt()
    }

    /// `|g| = g0/sqrt(2)`; user-facing ratios and the scaled time use
    /// this magnitude.
    pub fn g_mag(&self) -> f64 {
        self.g0 / 2.0_f64.sqrt()
    }

    /// Relative deviation from the solvability condition `omega_m = 2 xi`.
    pub fn xi_mismatch(&self) -> f64 {
        (self.omega_m - 2.0 * self.xi).abs() / self.omega_m
    }
}

/// Relative tolerance on `omega_m = 2 xi` for the closed form and the
/// Jaynes-Cummings builder.
pub const XI_MATCH_RTOL: f64 = 1e-9;

/// Thresholds giving "much greater than" a concrete reading; one order of
/// magnitude by default.
#[derive(Clone, Copy, Debug)]
pub struct RegimeThresholds {
    pub strong_coupling_ratio: f64,
    pub sideband_ratio: f64,
    pub rwa_ratio: f64,
    pub xi_match_rtol: f64,
}

impl Default for RegimeThresholds {
    fn default() -> Self {
        Self {
            strong_coupling_ratio: 10.0,
            sideband_ratio: 10.0,
            rwa_ratio: 10.0,
            xi_match_rtol: XI_MATCH_RTOL,
        }
    }
}

/// Static operating-regime report. Decay-dependent flags are `None` when
/// the corresponding rate was not supplied.
#[derive(Clone, Copy, Debug)]
pub struct RegimeReport {
    /// `g_mag >> gamma_c`; ratio `g_mag / gamma_c`.
    pub single_photon_strong_coupling: Option<bool>,
    pub g_over_gamma_c: Option<f64>,
    /// `omega_m >> gamma_c`; ratio `omega_m / gamma_c`.
    pub deep_resolved_sideband: Option<bool>,
    pub omega_m_over_gamma_c: Option<f64>,
    /// `omega_m = 2 xi` within tolerance and `omega_m >> g_mag`.
    pub rwa_valid: bool,
    pub omega_m_over_g: f64,
    pub xi_mismatch: f64,
}

pub fn check_regime(p: &ModelParams) -> RegimeReport {
    check_regime_with(p, RegimeThresholds::default())
}

pub fn check_regime_with(p: &ModelParams, th: RegimeThresholds) -> RegimeReport {
    let g = p.g_mag();
    let (spsc, g_ratio, drs, m_ratio) = match p.gamma_c {
        Some(gc) if gc > 0.0 => (
            Some(g >= th.strong_coupling_ratio * gc),
            Some(g / gc),
            Some(p.omega_m >= th.sideband_ratio * gc),
            Some(p.omega_m / gc),
        ),
        _ => (None, None, None, None),
    };
    let mismatch = p.xi_mismatch();
    RegimeReport {
        single_photon_strong_coupling: spsc,
        g_over_gamma_c: g_ratio,
        deep_resolved_sideband: drs,
        omega_m_over_gamma_c: m_ratio,
        rwa_valid: p.omega_m >= th.rwa_ratio * g && mismatch <= th.xi_match_rtol,
        omega_m_over_g: p.omega_m / g,
        xi_mismatch: mismatch,
    }
}

fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Building blocks on the photon-location qubit and the two mechanical
/// modes, lifted into the frozen basis layout (qubit slowest, then b1,
/// then b2).
struct Blocks {
    id2: DMatrix<C64>,
    proj0: DMatrix<C64>,
    proj1: DMatrix<C64>,
    sigx: DMatrix<C64>,
    /// `|c=0><c=1|`, the subspace image of `a1^dag a2`.
    e01: DMatrix<C64>,
    id_b: DMatrix<C64>,
    b: DMatrix<C64>,
    num: DMatrix<C64>,
    /// `b^dag + b`.
    x: DMatrix<C64>,
}

impl Blocks {
    fn new(s: HilbertSpec) -> Result<Self> {
        let zero = C64::new(0.0, 0.0);
        let one = C64::new(1.0, 0.0);
        let b = annihilation(s.n_b())?.into_matrix();
        let num = number(s.n_b())?.into_matrix();
        let x = &b + b.adjoint();
        Ok(Self {
            id2: DMatrix::identity(2, 2),
            proj0: DMatrix::from_row_slice(2, 2, &[one, zero, zero, zero]),
            proj1: DMatrix::from_row_slice(2, 2, &[zero, zero, zero, one]),
            sigx: DMatrix::from_row_slice(2, 2, &[zero, one, one, zero]),
            e01: DMatrix::from_row_slice(2, 2, &[zero, one, zero, zero]),
            id_b: DMatrix::identity(s.n_b(), s.n_b()),
            b,
            num,
            x,
        })
    }

    fn lift(&self, c: &DMatrix<C64>, b1: &DMatrix<C64>, b2: &DMatrix<C64>) -> DMatrix<C64> {
        c.kronecker(b1).kronecker(b2)
    }
}

/// The system Hamiltonian restricted to the single-photon subspace: free
/// cavity and mechanical terms, radiation pressure on the mirror facing
/// the photon, and photon hopping between the cavities.
pub fn build_hs(p: &ModelParams, s: HilbertSpec) -> Result<Operator> {
    p.validate()?;
    let bl = Blocks::new(s)?;
    let mut h = DMatrix::<C64>::identity(s.dim(), s.dim()) * re(p.omega_c);
    h += (bl.lift(&bl.id2, &bl.num, &bl.id_b) + bl.lift(&bl.id2, &bl.id_b, &bl.num)) * re(p.omega_m);
    h -= (bl.lift(&bl.proj0, &bl.x, &bl.id_b) + bl.lift(&bl.proj1, &bl.id_b, &bl.x)) * re(p.g0);
    h -= bl.lift(&bl.sigx, &bl.id_b, &bl.id_b) * re(p.xi);
    Operator::hermitian(h)
}

/// The rotated-mechanical-frame Hamiltonian `H_1 = V1 H_S V1^dag` in the
/// single-photon subspace, where the photon-number factor of the `b1`
/// coupling collapses to one.
pub fn build_h1(p: &ModelParams, s: HilbertSpec) -> Result<Operator> {
    p.validate()?;
    let bl = Blocks::new(s)?;
    let g = p.g_signed();
    let mut h = DMatrix::<C64>::identity(s.dim(), s.dim()) * re(p.omega_c);
    h += (bl.lift(&bl.id2, &bl.num, &bl.id_b) + bl.lift(&bl.id2, &bl.id_b, &bl.num)) * re(p.omega_m);
    h += bl.lift(&bl.id2, &bl.x, &bl.id_b) * re(g);
    h += bl.lift(&(&bl.proj1 - &bl.proj0), &bl.id_b, &bl.x) * re(g);
    h -= bl.lift(&bl.sigx, &bl.id_b, &bl.id_b) * re(p.xi);
    Operator::hermitian(h)
}

/// The commuting part acting on mode `b1` only:
/// `H_I = omega_c + omega_m b1^dag b1 + g (b1^dag + b1)`.
pub fn build_hi(p: &ModelParams, s: HilbertSpec) -> Result<Operator> {
    p.validate()?;
    let bl = Blocks::new(s)?;
    let mut h = DMatrix::<C64>::identity(s.dim(), s.dim()) * re(p.omega_c);
    h += bl.lift(&bl.id2, &bl.num, &bl.id_b) * re(p.omega_m);
    h += bl.lift(&bl.id2, &bl.x, &bl.id_b) * re(p.g_signed());
    Operator::hermitian(h)
}

/// The quantum-Rabi-type part acting on the photon-location qubit and
/// mode `b2`, with no rotating-wave approximation.
pub fn build_hii_exact(p: &ModelParams, s: HilbertSpec) -> Result<Operator> {
    p.validate()?;
    let bl = Blocks::new(s)?;
    let mut h = bl.lift(&(&bl.proj1 - &bl.proj0), &bl.id_b, &bl.id_b) * re(p.xi);
    h += bl.lift(&bl.id2, &bl.id_b, &bl.num) * re(p.omega_m);
    h += bl.lift(&bl.sigx, &bl.id_b, &bl.x) * re(p.g_signed());
    Operator::hermitian(h)
}

/// The Jaynes-Cummings form of the qubit-oscillator part: detuning
/// `omega_m/2` on the photon-location qubit, free `b2` term, and the
/// excitation-conserving coupling `g(|c=0><c=1| b2^dag + h.c.)`.
///
/// Warns (non-fatal, stderr) when `omega_m != 2 xi` beyond tolerance,
/// since the rotating-wave step assumes that resonance.
pub fn build_hii_rwa(p: &ModelParams, s: HilbertSpec) -> Result<Operator> {
    p.validate()?;
    if p.xi_mismatch() > XI_MATCH_RTOL {
        eprintln!(
            "warning: omega_m = 2*xi violated (relative mismatch {:.3e}); Jaynes-Cummings form is off-resonance",
            p.xi_mismatch()
        );
    }
    let bl = Blocks::new(s)?;
    let g = p.g_signed();
    let mut h = bl.lift(&(&bl.proj1 - &bl.proj0), &bl.id_b, &bl.id_b) * re(p.omega_m / 2.0);
    h += bl.lift(&bl.id2, &bl.id_b, &bl.num) * re(p.omega_m);
    let coupling =
        bl.lift(&bl.e01, &bl.id_b, &bl.b.adjoint()) + bl.lift(&bl.e01.transpose(), &bl.id_b, &bl.b);
    h += coupling * re(g);
    Operator::hermitian(h)
}

/// Beam-splitter rotation of the mechanical modes,
/// `V1 = exp[(pi/4)(b1^dag b2 - b2^dag b1)]`.
pub fn build_v1(s: HilbertSpec) -> Result<Operator> {
    let bl = Blocks::new(s)?;
    let gen = (bl.lift(&bl.id2, &bl.b.adjoint(), &bl.b)
        - bl.lift(&bl.id2, &bl.b, &bl.b.adjoint()))
        * re(std::f64::consts::FRAC_PI_4);
    Operator::new(expm_antihermitian(&gen)?)
}

/// Rotation of the photon-location qubit,
/// `V2 = exp[(pi/4)(a1^dag a2 - a2^dag a1)]` restricted to the subspace.
pub fn build_v2(s: HilbertSpec) -> Result<Operator> {
    let bl = Blocks::new(s)?;
    let gen = bl.lift(&(&bl.e01 - bl.e01.transpose()), &bl.id_b, &bl.id_b)
        * re(std::f64::consts::FRAC_PI_4);
    Operator::new(expm_antihermitian(&gen)?)
}

/// Displacement of mode `b1` that diagonalizes `H_I`,
/// `V3 = exp[(g/omega_m)(b1^dag - b1)]` with the signed `g`.
pub fn build_v3(p: &ModelParams, s: HilbertSpec) -> Result<Operator> {
    p.validate()?;
    let bl = Blocks::new(s)?;
    let gen = (bl.lift(&bl.id2, &bl.b.adjoint(), &bl.id_b) - bl.lift(&bl.id2, &bl.b, &bl.id_b))
        * re(p.g_signed() / p.omega_m);
    Operator::new(expm_antihermitian(&gen)?)
}

/// Diagonal of `H_3 = V3 H_I V3^dag` in the frozen basis:
/// `omega_c - g^2/omega_m + omega_m * n1`.
pub fn h3_diagonal(p: &ModelParams, s: HilbertSpec) -> Vec<f64> {
    let g = p.g_signed();
    let shift = p.omega_c - g * g / p.omega_m;
    (0..s.dim())
        .map(|i| {
            let (_, n1, _) = s.unpack(i);
            shift + p.omega_m * n1 as f64
        })
        .collect()
}
