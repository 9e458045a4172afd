//! Per-agent linear dynamics, disturbance exosystems, controller gains and
//! the equilibrium-seeking condition verifier.
//!
//! Each agent is a SISO linear system `x' = A x + B (u + d)`, `y = C x`
//! disturbed by a marginally stable exosystem `nu' = S nu`, `d = U nu`.
//! The strategy-updating rule closes the loop with state feedback K, a
//! proportional-integral gradient channel (kp, ki) and an internal-model
//! disturbance observer with gain ko. Collecting the plant state and the
//! gradient integral into one vector gives the augmented loop
//!
//! ```text
//! chi' = calA chi + calB e + calD rho,    y = calC chi,
//! ```
//!
//! whose blocks are assembled by [`augment`]. [`verify_agent_conditions`]
//! checks the design conditions the convergence argument rests on: Kalman
//! controllability/observability of (calA, calB, calC), a Hurwitz observer
//! error matrix S - ko B^T B U, and nonpositive poles of the loop transfer
//! function, plus a strict positive-realness frequency sweep reported as a
//! diagnostic.

use crate::linalg::{
    controllable, is_hurwitz, observable, spectral_abscissa, LinalgError, Matrix,
};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PlantError {
    #[error("state matrix must be square, got {0}x{1}")]
    NotSquare(usize, usize),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("disturbance frequency must be positive, got {0}")]
    NonPositiveFrequency(f64),
    #[error("gain invariant violated: {0}")]
    GainInvariant(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// SISO plant (A, B, C): A is n x n, B is n x 1, C is 1 x n.
#[derive(Debug, Clone, PartialEq)]
pub struct AgentPlant {
    pub a: Matrix,
    pub b: Matrix,
    pub c: Matrix,
}

impl AgentPlant {
    pub fn new(a: Matrix, b: Matrix, c: Matrix) -> Result<Self, PlantError> {
        if !a.is_square() {
            return Err(PlantError::NotSquare(a.rows(), a.cols()));
        }
        if b.rows() != a.rows() || b.cols() != 1 {
            return Err(PlantError::DimensionMismatch(format!(
                "input matrix must be {}x1, got {}x{}",
                a.rows(),
                b.rows(),
                b.cols()
            )));
        }
        if c.cols() != a.rows() || c.rows() != 1 {
            return Err(PlantError::DimensionMismatch(format!(
                "output matrix must be 1x{}, got {}x{}",
                a.rows(),
                c.rows(),
                c.cols()
            )));
        }
        Ok(AgentPlant { a, b, c })
    }

    /// State dimension n.
    pub fn order(&self) -> usize {
        self.a.rows()
    }

    /// Chain of two integrators with position output.
    pub fn double_integrator() -> Self {
        AgentPlant {
            a: Matrix::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 0.0]),
            b: Matrix::column(&[0.0, 1.0]),
            c: Matrix::row(&[1.0, 0.0]),
        }
    }

    /// Third-order turbine-generator model with states
    /// (output power, valve opening, relative speed) and power output.
    pub fn turbine_generator(p: &TurbineParams) -> Self {
        AgentPlant {
            a: Matrix::from_row_slice(
                3,
                3,
                &[
                    -1.0 / p.t_m,
                    p.k_m / p.t_m,
                    0.0,
                    0.0,
                    -1.0 / p.t_e,
                    -p.k_e / (p.t_e * p.r * p.w0),
                    0.0,
                    0.0,
                    -p.d / (2.0 * p.h),
                ],
            ),
            b: Matrix::column(&[0.0, 1.0 / p.t_e, 0.0]),
            c: Matrix::row(&[1.0, 0.0, 0.0]),
        }
    }
}

/// Physical parameters of the turbine-generator preset.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct TurbineParams {
    /// turbine time constant (s)
    pub t_m: f64,
    /// turbine gain
    pub k_m: f64,
    /// speed governor time constant (s)
    pub t_e: f64,
    /// speed governor gain
    pub k_e: f64,
    /// regulation constant (p.u.)
    pub r: f64,
    /// synchronous speed (rad/s)
    pub w0: f64,
    /// damping constant (p.u.)
    pub d: f64,
    /// inertia constant (s)
    pub h: f64,
}

/// Known-model disturbance generator: nu' = S nu, d = U nu.
#[derive(Debug, Clone, PartialEq)]
pub struct Exosystem {
    pub s: Matrix,
    pub u: Matrix,
    pub nu0: Vec<f64>,
}

impl Exosystem {
    pub fn order(&self) -> usize {
        self.s.rows()
    }

    /// True iff all eigenvalues of S sit on the imaginary axis (within
    /// 1e-9) and are pairwise distinct.
    pub fn is_marginal(&self) -> Result<bool, LinalgError> {
        let eigs = self.s.eigenvalues()?;
        let scale = self.s.max_abs().max(1.0);
        for (i, e) in eigs.iter().enumerate() {
            if e.re.abs() > 1e-9 * scale {
                return Ok(false);
            }
            for other in &eigs[i + 1..] {
                if (e - other).norm() <= 1e-9 * scale {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

/// Harmonic exosystem generating `d(t) = amplitude * sin(2 pi f t + phase)`.
///
/// S = [[0, w], [-w, 0]] with w = 2 pi f, U = [amplitude, 0] and
/// nu0 = [sin(phase), cos(phase)].
pub fn sinusoid_exosystem(
    freq_hz: f64,
    amplitude: f64,
    phase: f64,
) -> Result<Exosystem, PlantError> {
    if freq_hz <= 0.0 {
        return Err(PlantError::NonPositiveFrequency(freq_hz));
    }
    let w = 2.0 * std::f64::consts::PI * freq_hz;
    Ok(Exosystem {
        s: Matrix::from_row_slice(2, 2, &[0.0, w, -w, 0.0]),
        u: Matrix::row(&[amplitude, 0.0]),
        nu0: vec![phase.sin(), phase.cos()],
    })
}

/// Controller gains: state feedback K (1 x n), proportional and integral
/// gradient gains kp, ki > 0, observer gain ko (length q).
#[derive(Debug, Clone, PartialEq)]
pub struct Gains {
    pub k: Vec<f64>,
    pub kp: f64,
    pub ki: f64,
    pub ko: Vec<f64>,
}

/// Augmented loop blocks for chi = [x; gamma]:
///
/// ```text
/// calA = [ H   B ki ]   calB = [ B kp ]   calC = [ C  0 ]
///        [ 0    0   ]          [  1   ]
/// calD = [ B U ]
///        [  0  ]
/// ```
///
/// with H = A - B K.
#[derive(Debug, Clone, PartialEq)]
pub struct AugmentedAgent {
    pub cal_a: Matrix,
    pub cal_b: Matrix,
    pub cal_c: Matrix,
    pub cal_d: Matrix,
    pub h: Matrix,
}

/// Assemble the augmented loop blocks from plant, gains and exosystem.
pub fn augment(
    plant: &AgentPlant,
    gains: &Gains,
    exo: &Exosystem,
) -> Result<AugmentedAgent, PlantError> {
    let n = plant.order();
    let q = exo.order();
    if gains.k.len() != n {
        return Err(PlantError::DimensionMismatch(format!(
            "state feedback needs {n} entries, got {}",
            gains.k.len()
        )));
    }
    if gains.ko.len() != q {
        return Err(PlantError::DimensionMismatch(format!(
            "observer gain needs {q} entries, got {}",
            gains.ko.len()
        )));
    }
    if gains.kp <= 0.0 || gains.ki <= 0.0 {
        return Err(PlantError::GainInvariant(format!(
            "kp and ki must be positive, got kp={} ki={}",
            gains.kp, gains.ki
        )));
    }
    let bk = &plant.b * &Matrix::row(&gains.k);
    let h = &plant.a - &bk;

    let mut cal_a = Matrix::zeros(n + 1, n + 1);
    cal_a.set_block(0, 0, &h);
    cal_a.set_block(0, n, &plant.b.scale(gains.ki));

    let mut cal_b = Matrix::zeros(n + 1, 1);
    cal_b.set_block(0, 0, &plant.b.scale(gains.kp));
    cal_b[(n, 0)] = 1.0;

    let mut cal_c = Matrix::zeros(1, n + 1);
    cal_c.set_block(0, 0, &plant.c);

    let mut cal_d = Matrix::zeros(n + 1, q);
    cal_d.set_block(0, 0, &(&plant.b * &exo.u));

    Ok(AugmentedAgent {
        cal_a,
        cal_b,
        cal_c,
        cal_d,
        h,
    })
}

/// Observer error matrix S - ko B^T B U; the observation error
/// rho = nu - (z + ko B^T x) decays iff this is Hurwitz.
pub fn observer_error_matrix(plant: &AgentPlant, gains: &Gains, exo: &Exosystem) -> Matrix {
    let btb: f64 = (0..plant.b.rows())
        .map(|i| plant.b[(i, 0)] * plant.b[(i, 0)])
        .sum();
    let ko = Matrix::column(&gains.ko);
    &exo.s - &(&ko * &exo.u).scale(btb)
}

/// Frequency-sweep settings for the strict positive-realness diagnostic.
#[derive(Debug, Clone, Copy)]
pub struct SweepSettings {
    pub omega_min: f64,
    pub omega_max: f64,
    pub points: usize,
    /// Re G(i omega) may dip this far below zero before the sweep fails.
    pub re_tolerance: f64,
    /// pole real parts may exceed zero by this much
    pub pole_tolerance: f64,
}

impl Default for SweepSettings {
    fn default() -> Self {
        SweepSettings {
            omega_min: 1e-3,
            omega_max: 1e4,
            points: 1000,
            re_tolerance: 1e-7,
            pole_tolerance: 1e-9,
        }
    }
}

/// Per-agent condition report produced by [`verify_agent_conditions`].
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionReport {
    /// plant-level standing assumptions
    pub plant_controllable: bool,
    pub plant_observable: bool,
    pub exosystem_marginal: bool,
    pub exosystem_observable: bool,
    /// gains are positive and H = A - B K is Hurwitz
    pub gains_positive: bool,
    pub h_hurwitz: bool,
    /// condition 1: the augmented pair is controllable and observable
    pub augmented_controllable: bool,
    pub augmented_observable: bool,
    /// condition 2: the observer error matrix is Hurwitz
    pub observer_hurwitz: bool,
    pub observer_abscissa: f64,
    /// condition 3: poles of the loop transfer function G(s) have
    /// nonpositive real parts
    pub poles_nonpositive: bool,
    pub pole_abscissa: f64,
    /// strict positive-realness sweep: min over the grid of Re G(i omega);
    /// reported as a diagnostic, not gating (relative degree two plants
    /// can satisfy the pole condition yet fail the sweep everywhere)
    pub sweep_min_re: f64,
    pub strictly_positive_real: bool,
}

impl ConditionReport {
    /// Condition 1: minimality of the augmented loop.
    pub fn condition1(&self) -> bool {
        self.augmented_controllable && self.augmented_observable && self.gains_positive
    }

    /// Condition 2: disturbance observation error decays.
    pub fn condition2(&self) -> bool {
        self.observer_hurwitz
    }

    /// Condition 3: loop transfer poles confined to the closed left
    /// half-plane.
    pub fn condition3(&self) -> bool {
        self.poles_nonpositive
    }

    pub fn passes(&self) -> bool {
        self.plant_controllable
            && self.plant_observable
            && self.exosystem_marginal
            && self.h_hurwitz
            && self.condition1()
            && self.condition2()
            && self.condition3()
    }

    /// Human-readable names of everything that failed.
    pub fn failures(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        if !self.plant_controllable {
            out.push("plant pair (A, B) not controllable");
        }
        if !self.plant_observable {
            out.push("plant pair (A, C) not observable");
        }
        if !self.exosystem_marginal {
            out.push("exosystem eigenvalues not distinct on the imaginary axis");
        }
        if !self.exosystem_observable {
            out.push("exosystem pair (S, U) not observable");
        }
        if !self.gains_positive {
            out.push("gradient gains kp, ki not positive");
        }
        if !self.h_hurwitz {
            out.push("state feedback leaves A - B K unstable");
        }
        if !self.augmented_controllable {
            out.push("augmented pair (calA, calB) not controllable");
        }
        if !self.augmented_observable {
            out.push("augmented pair (calA, calC) not observable");
        }
        if !self.observer_hurwitz {
            out.push("observer error matrix S - ko B^T B U not Hurwitz");
        }
        if !self.poles_nonpositive {
            out.push("loop transfer function has poles in the right half-plane");
        }
        out
    }
}

/// Run every per-agent design condition with default sweep settings.
pub fn verify_agent_conditions(
    plant: &AgentPlant,
    gains: &Gains,
    exo: &Exosystem,
) -> Result<ConditionReport, PlantError> {
    verify_agent_conditions_with(plant, gains, exo, &SweepSettings::default())
}

pub fn verify_agent_conditions_with(
    plant: &AgentPlant,
    gains: &Gains,
    exo: &Exosystem,
    sweep: &SweepSettings,
) -> Result<ConditionReport, PlantError> {
    let aug = augment(plant, gains, exo)?;
    let observer = observer_error_matrix(plant, gains, exo);
    let observer_abscissa = spectral_abscissa(&observer)?;
    let pole_abscissa = spectral_abscissa(&aug.cal_a)?;
    let sweep_min_re = positive_real_sweep(&aug.cal_a, &aug.cal_b, &aug.cal_c, sweep)?;
    Ok(ConditionReport {
        plant_controllable: controllable(&plant.a, &plant.b),
        plant_observable: observable(&plant.a, &plant.c),
        exosystem_marginal: exo.is_marginal()?,
        exosystem_observable: observable(&exo.s, &exo.u),
        gains_positive: gains.kp > 0.0 && gains.ki > 0.0,
        h_hurwitz: is_hurwitz(&aug.h, 1e-9)?,
        augmented_controllable: controllable(&aug.cal_a, &aug.cal_b),
        augmented_observable: observable(&aug.cal_a, &aug.cal_c),
        observer_hurwitz: observer_abscissa < -1e-9,
        observer_abscissa,
        poles_nonpositive: pole_abscissa <= sweep.pole_tolerance,
        pole_abscissa,
        sweep_min_re,
        strictly_positive_real: pole_abscissa <= sweep.pole_tolerance
            && sweep_min_re >= -sweep.re_tolerance,
    })
}

/// Minimum of Re G(i omega) over a log-spaced grid plus a near-zero
/// frequency standing in for the omega -> 0 limit, where
/// G(s) = calC (s I - calA)^(-1) calB.
pub fn positive_real_sweep(
    cal_a: &Matrix,
    cal_b: &Matrix,
    cal_c: &Matrix,
    sweep: &SweepSettings,
) -> Result<f64, LinalgError> {
    let mut min_re = f64::INFINITY;
    let m = cal_a.rows();
    let log_min = sweep.omega_min.log10();
    let log_max = sweep.omega_max.log10();
    // omega = 0 limit proxy: three orders of magnitude below the grid
    let zero_proxy = sweep.omega_min * 1e-3;
    for k in 0..=sweep.points {
        let omega = if k == sweep.points {
            zero_proxy
        } else {
            let f = k as f64 / (sweep.points - 1) as f64;
            10f64.powf(log_min + f * (log_max - log_min))
        };
        // solve (i omega I - calA) v = calB through the real 2m x 2m form
        let mut sys = Matrix::zeros(2 * m, 2 * m);
        for i in 0..m {
            for j in 0..m {
                sys[(i, j)] = -cal_a[(i, j)];
                sys[(m + i, m + j)] = -cal_a[(i, j)];
            }
            sys[(i, m + i)] = -omega;
            sys[(m + i, i)] = omega;
        }
        let mut rhs = vec![0.0; 2 * m];
        for i in 0..m {
            rhs[i] = cal_b[(i, 0)];
        }
        let v = sys.solve(&rhs)?;
        let re: f64 = (0..m).map(|i| cal_c[(0, i)] * v[i]).sum();
        min_re = min_re.min(re);
    }
    Ok(min_re)
}

/// Storage-function candidate for the augmented loop.
///
/// P is the symmetric minimizer of ||P calA + calA^T P||_F subject to
/// P calB = calC^T. The candidate is usable for a passivity argument only
/// when the Lyapunov residual is negative semidefinite and P is positive
/// definite; `feasible()` reports that verdict.
#[derive(Debug, Clone)]
pub struct StorageCandidate {
    pub p: Matrix,
    /// eigenvalues of P calA + calA^T P, ascending
    pub residual_eigs: Vec<f64>,
    /// eigenvalues of P, ascending
    pub p_eigs: Vec<f64>,
    /// max |(P calB - calC^T)_i|
    pub constraint_residual: f64,
}

impl StorageCandidate {
    pub fn feasible(&self) -> bool {
        let tol = 1e-7;
        self.constraint_residual <= 1e-9
            && self.residual_eigs.last().copied().unwrap_or(0.0) <= tol
            && self.p_eigs.first().copied().unwrap_or(0.0) > 0.0
    }
}

/// Construct the storage-function candidate for one augmented agent.
pub fn construct_storage(aug: &AugmentedAgent) -> Result<StorageCandidate, PlantError> {
    let m = aug.cal_a.rows();
    // symmetric parametrization: one unknown per upper-triangle entry
    let pairs: Vec<(usize, usize)> = (0..m)
        .flat_map(|i| (i..m).map(move |j| (i, j)))
        .collect();
    let np = pairs.len();
    // objective rows: vec(E_k calA + calA^T E_k); constraints: E_k calB
    let mut g = vec![vec![0.0; np]; m * m];
    let mut aeq = vec![vec![0.0; np]; m];
    for (k, &(i, j)) in pairs.iter().enumerate() {
        let mut e = Matrix::zeros(m, m);
        e[(i, j)] = 1.0;
        e[(j, i)] = 1.0;
        let s = &(&e * &aug.cal_a) + &(&aug.cal_a.transpose() * &e);
        for r in 0..m {
            for c in 0..m {
                g[r * m + c][k] = s[(r, c)];
            }
        }
        let eb = &e * &aug.cal_b;
        for r in 0..m {
            aeq[r][k] = eb[(r, 0)];
        }
    }
    // KKT system for min ||G p||^2 s.t. Aeq p = calC^T
    let dim = np + m;
    let mut kkt = Matrix::zeros(dim, dim);
    for r in 0..np {
        for c in 0..np {
            let mut v = 0.0;
            for row in &g {
                v += row[r] * row[c];
            }
            kkt[(r, c)] = 2.0 * v;
        }
        // tiny ridge keeps the KKT system invertible when the objective
        // is flat along constraint-compatible directions
        kkt[(r, r)] += 1e-12;
    }
    for r in 0..m {
        for c in 0..np {
            kkt[(np + r, c)] = aeq[r][c];
            kkt[(c, np + r)] = aeq[r][c];
        }
    }
    let mut rhs = vec![0.0; dim];
    for r in 0..m {
        rhs[np + r] = aug.cal_c[(0, r)];
    }
    let sol = kkt.solve(&rhs)?;
    let mut p = Matrix::zeros(m, m);
    for (k, &(i, j)) in pairs.iter().enumerate() {
        p[(i, j)] = sol[k];
        p[(j, i)] = sol[k];
    }
    let residual = &(&p * &aug.cal_a) + &(&aug.cal_a.transpose() * &p);
    let mut residual_eigs: Vec<f64> = residual.eigenvalues()?.iter().map(|e| e.re).collect();
    residual_eigs.sort_by(f64::total_cmp);
    let mut p_eigs: Vec<f64> = p.eigenvalues()?.iter().map(|e| e.re).collect();
    p_eigs.sort_by(f64::total_cmp);
    let pb = &p * &aug.cal_b;
    let constraint_residual = (0..m)
        .map(|i| (pb[(i, 0)] - aug.cal_c[(0, i)]).abs())
        .fold(0.0_f64, f64::max);
    Ok(StorageCandidate {
        p,
        residual_eigs,
        p_eigs,
        constraint_residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    pub(crate) fn demo_gains() -> Gains {
        Gains {
            k: vec![1.0, 10.0],
            kp: 12.0,
            ki: 2.0,
            ko: vec![12.0, 15.0],
        }
    }

    fn demo_setup() -> (AgentPlant, Gains, Exosystem) {
        (
            AgentPlant::double_integrator(),
            demo_gains(),
            sinusoid_exosystem(1.0, 1.0, 0.0).unwrap(),
        )
    }

    #[test]
    fn sinusoid_zero_amplitude_silent() {
        let exo = sinusoid_exosystem(2.0, 0.0, 0.3).unwrap();
        // d = U nu = 0 whatever the internal state does
        assert_eq!(exo.u, Matrix::row(&[0.0, 0.0]));
    }

    #[test]
    fn sinusoid_structure_and_eigenvalues() {
        let m = 3.0;
        let exo = sinusoid_exosystem(500.0, m, 0.0).unwrap();
        let w = 2.0 * std::f64::consts::PI * 500.0;
        assert_eq!(exo.s, Matrix::from_row_slice(2, 2, &[0.0, w, -w, 0.0]));
        assert_eq!(exo.u, Matrix::row(&[m, 0.0]));
        assert_eq!(exo.nu0, vec![0.0, 1.0]);
        let eigs = exo.s.eigenvalues().unwrap();
        for e in eigs {
            assert_relative_eq!(e.re, 0.0, epsilon = 1e-9 * w);
            assert_relative_eq!(e.im.abs(), w, epsilon = 1e-9 * w);
        }
        assert!(exo.is_marginal().unwrap());
    }

    #[test]
    fn sinusoid_rejects_nonpositive_frequency() {
        assert!(matches!(
            sinusoid_exosystem(0.0, 1.0, 0.0),
            Err(PlantError::NonPositiveFrequency(_))
        ));
    }

    #[test]
    fn augment_double_integrator_blocks() {
        let (plant, gains, exo) = demo_setup();
        let aug = augment(&plant, &gains, &exo).unwrap();
        let want_a =
            Matrix::from_row_slice(3, 3, &[0.0, 1.0, 0.0, -1.0, -10.0, 2.0, 0.0, 0.0, 0.0]);
        assert_eq!(aug.cal_a, want_a);
        assert_eq!(aug.cal_b, Matrix::column(&[0.0, 12.0, 1.0]));
        assert_eq!(aug.cal_c, Matrix::row(&[1.0, 0.0, 0.0]));
        // calD = [B U; 0] for the unit-amplitude sinusoid
        let want_d = Matrix::from_row_slice(3, 2, &[0.0, 0.0, 1.0, 0.0, 0.0, 0.0]);
        assert_eq!(aug.cal_d, want_d);
        assert_eq!(
            aug.h,
            Matrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, -10.0])
        );
    }

    #[test]
    fn augment_eigenvalue_structure() {
        let (plant, gains, exo) = demo_setup();
        let aug = augment(&plant, &gains, &exo).unwrap();
        let mut eigs = aug.cal_a.eigenvalues().unwrap();
        eigs.sort_by(|a, b| a.re.total_cmp(&b.re));
        assert_relative_eq!(eigs[0].re, -5.0 - 24.0_f64.sqrt(), epsilon = 1e-9);
        assert_relative_eq!(eigs[1].re, -5.0 + 24.0_f64.sqrt(), epsilon = 1e-9);
        assert_relative_eq!(eigs[2].re, 0.0, epsilon = 1e-12);
        // exactly one eigenvalue at zero, the rest strictly stable
        let near_zero = eigs.iter().filter(|e| e.norm() <= 1e-9).count();
        assert_eq!(near_zero, 1);
        assert!(eigs.iter().filter(|e| e.norm() > 1e-9).all(|e| e.re <= -1e-6));
    }

    #[test]
    fn augment_amplitude_scales_cal_d() {
        let plant = AgentPlant::double_integrator();
        let gains = demo_gains();
        let exo = sinusoid_exosystem(1.0, 4.5, 0.0).unwrap();
        let aug = augment(&plant, &gains, &exo).unwrap();
        assert_eq!(aug.cal_d[(1, 0)], 4.5);
    }

    #[test]
    fn conditions_pass_for_demo_agent() {
        let (plant, gains, exo) = demo_setup();
        let report = verify_agent_conditions(&plant, &gains, &exo).unwrap();
        assert!(report.plant_controllable);
        assert!(report.plant_observable);
        assert!(report.condition1(), "augmented pair should be minimal");
        assert!(report.condition2(), "observer should be Hurwitz");
        assert!(report.condition3(), "poles should be nonpositive");
        assert!(report.passes(), "failures: {:?}", report.failures());
        // the strict sweep is expected to fail for this relative-degree-2
        // loop; the analytic omega -> 0 limit of Re G is -8
        assert!(!report.strictly_positive_real);
        assert_relative_eq!(report.sweep_min_re, -8.0, epsilon = 1e-3);
    }

    #[test]
    fn conditions_flag_unstable_feedback() {
        let (plant, mut gains, exo) = demo_setup();
        gains.k = vec![-1.0, -1.0]; // destabilizes H
        let report = verify_agent_conditions(&plant, &gains, &exo).unwrap();
        assert!(!report.h_hurwitz);
        assert!(!report.condition3(), "unstable poles must fail the pole test");
        assert!(report.pole_abscissa > 0.0);
        assert!(!report.passes());
        assert!(report
            .failures()
            .iter()
            .any(|f| f.contains("right half-plane")));
    }

    #[test]
    fn conditions_flag_zero_observer_gain() {
        let (plant, mut gains, exo) = demo_setup();
        gains.ko = vec![0.0, 0.0];
        let report = verify_agent_conditions(&plant, &gains, &exo).unwrap();
        assert!(!report.condition2());
        assert!(report.condition1() && report.condition3());
        assert!(report
            .failures()
            .iter()
            .any(|f| f.contains("observer error matrix")));
    }

    #[test]
    fn observer_error_matrix_demo_values() {
        let (plant, gains, exo) = demo_setup();
        let m = observer_error_matrix(&plant, &gains, &exo);
        let w = 2.0 * std::f64::consts::PI;
        let want = Matrix::from_row_slice(2, 2, &[-12.0, w, -w - 15.0, 0.0]);
        for i in 0..2 {
            for j in 0..2 {
                assert_relative_eq!(m[(i, j)], want[(i, j)], epsilon = 1e-12);
            }
        }
        assert!(is_hurwitz(&m, 1e-9).unwrap());
    }

    /// A first-order lag with kp = 2, ki = 1 yields the strictly positive
    /// real loop G(s) = (2s + 1) / (s (s + 1)).
    fn positive_real_agent() -> AugmentedAgent {
        let plant = AgentPlant::new(
            Matrix::from_row_slice(1, 1, &[-1.0]),
            Matrix::column(&[1.0]),
            Matrix::row(&[1.0]),
        )
        .unwrap();
        let gains = Gains {
            k: vec![0.0],
            kp: 2.0,
            ki: 1.0,
            ko: vec![1.0, 1.0],
        };
        let exo = sinusoid_exosystem(1.0, 1.0, 0.0).unwrap();
        augment(&plant, &gains, &exo).unwrap()
    }

    #[test]
    fn sweep_accepts_positive_real_loop() {
        let aug = positive_real_agent();
        let min_re =
            positive_real_sweep(&aug.cal_a, &aug.cal_b, &aug.cal_c, &SweepSettings::default())
                .unwrap();
        assert!(min_re >= -1e-7, "min Re G = {min_re}");
    }

    #[test]
    fn sweep_invariant_under_similarity() {
        let aug = positive_real_agent();
        let settings = SweepSettings::default();
        let base =
            positive_real_sweep(&aug.cal_a, &aug.cal_b, &aug.cal_c, &settings).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..10 {
            let n = aug.cal_a.rows();
            let t = Matrix::from_fn(n, n, |i, j| {
                let v: f64 = rng.gen_range(-1.0..1.0);
                if i == j {
                    v + 3.0
                } else {
                    v
                }
            });
            let mut t_inv = Matrix::zeros(n, n);
            for j in 0..n {
                let mut e = vec![0.0; n];
                e[j] = 1.0;
                let col = t.solve(&e).unwrap();
                for i in 0..n {
                    t_inv[(i, j)] = col[i];
                }
            }
            let a2 = &(&t * &aug.cal_a) * &t_inv;
            let b2 = &t * &aug.cal_b;
            let c2 = &aug.cal_c * &t_inv;
            let transformed = positive_real_sweep(&a2, &b2, &c2, &settings).unwrap();
            assert_relative_eq!(base, transformed, epsilon = 1e-6, max_relative = 1e-6);
        }
    }

    #[test]
    fn storage_feasible_for_positive_real_loop() {
        let aug = positive_real_agent();
        let cand = construct_storage(&aug).unwrap();
        // analytic feasible point: P = [[1, -1], [-1, 2]] is the unique
        // solution, so the constrained minimizer must land on it
        assert!(cand.constraint_residual <= 1e-9);
        assert!(
            cand.feasible(),
            "residual eigs {:?}, P eigs {:?}",
            cand.residual_eigs,
            cand.p_eigs
        );
        assert_relative_eq!(cand.p[(0, 0)], 1.0, epsilon = 1e-5);
        assert_relative_eq!(cand.p[(0, 1)], -1.0, epsilon = 1e-5);
        assert_relative_eq!(cand.p[(1, 1)], 2.0, epsilon = 1e-5);
    }

    #[test]
    fn storage_infeasible_for_relative_degree_two() {
        let (plant, gains, exo) = demo_setup();
        let aug = augment(&plant, &gains, &exo).unwrap();
        let cand = construct_storage(&aug).unwrap();
        assert!(cand.constraint_residual <= 1e-9);
        assert!(
            !cand.feasible(),
            "no storage function with P calB = calC^T exists for this loop"
        );
        assert!(cand.residual_eigs.last().unwrap() > &1e-3);
    }

    #[test]
    fn turbine_preset_matches_parameters() {
        let p = TurbineParams {
            t_m: 0.35,
            k_m: 1.0,
            t_e: 0.10,
            k_e: 1.0,
            r: 0.05,
            w0: 100.0 * std::f64::consts::PI,
            d: 5.0,
            h: 4.0,
        };
        let plant = AgentPlant::turbine_generator(&p);
        assert_relative_eq!(plant.a[(0, 0)], -1.0 / 0.35, epsilon = 1e-12);
        assert_relative_eq!(plant.a[(1, 2)], -1.0 / (0.10 * 0.05 * p.w0), epsilon = 1e-12);
        assert_relative_eq!(plant.a[(2, 2)], -0.625, epsilon = 1e-12);
        assert_relative_eq!(plant.b[(1, 0)], 10.0, epsilon = 1e-12);
        // the relative-speed mode is decoupled from the input
        assert!(!controllable(&plant.a, &plant.b));
        assert!(observable(&plant.a, &plant.c));
    }
}
