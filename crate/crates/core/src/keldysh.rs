//! Frequency-doubled Keldysh action of the coupled photon/quasiparticle
//! system and its inversion.
//!
//! The counter-rotating coupling mixes `a(ω)` with `c*(−ω)`, so the field
//! vector is `(a(ω), ā(−ω), c(ω), c̄(−ω))` with `x̄(ω) ≡ x*(−ω)`. In the
//! (classical, quantum) basis the inverse action is the 8×8 block matrix
//! `[[0, D^A], [D^R, D^K]]` whose inverse is `[[G^K, G^R], [G^A, 0]]`, so
//! only the 4×4 blocks need to be inverted.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{Matrix4, Matrix8};
use crate::model::ModelParams;
use crate::selfenergy::{SelfEnergyModel, SelfEnergyTriple};

pub const A: usize = 0;
pub const A_BAR: usize = 1;
pub const C: usize = 2;
pub const C_BAR: usize = 3;

/// Largest 1-norm condition number of `D^R` accepted by [`invert_action`].
pub const CONDITION_LIMIT: f64 = 1e12;

/// Relative imaginary residue of `i·G^K_xx` tolerated before it is
/// reported as a sign-convention bug.
pub const RESIDUE_LIMIT: f64 = 1e-8;

const SCAN_POINTS: usize = 200;
const SCAN_MAX: f64 = 2.0;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Retarded, advanced and Keldysh blocks of the inverse action at one
/// frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KeldyshMatrices {
    pub omega: f64,
    pub retarded: Matrix4,
    pub advanced: Matrix4,
    pub keldysh: Matrix4,
}

impl KeldyshMatrices {
    /// `[[0, D^A], [D^R, D^K]]`, rows and columns ordered (classical, quantum).
    pub fn assemble(&self) -> Matrix8 {
        let mut m = Matrix8::zeros();
        for i in 0..4 {
            for j in 0..4 {
                m[(i, j + 4)] = self.advanced[(i, j)];
                m[(i + 4, j)] = self.retarded[(i, j)];
                m[(i + 4, j + 4)] = self.keldysh[(i, j)];
            }
        }
        m
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GreenComponents {
    pub retarded: Matrix4,
    pub advanced: Matrix4,
    pub keldysh: Matrix4,
    /// 1-norm condition number of `D^R`.
    pub condition: f64,
}

impl GreenComponents {
    /// `i·G^K_xx`, checked to be real.
    pub fn correlation(&self, omega: f64, index: usize) -> Result<f64> {
        let c = I * self.keldysh[(index, index)];
        if c.im.abs() > RESIDUE_LIMIT * c.re.abs() + f64::MIN_POSITIVE {
            return Err(Error::ConventionViolation {
                omega,
                value: c.re,
                residue: c.im,
            });
        }
        Ok(c.re)
    }
}

/// Fills the 4×4 blocks at frequency `omega` from the self-energies of
/// the `c` mode at `+omega` and `−omega`.
pub fn build_inverse_action(
    omega: f64,
    params: &ModelParams,
    sigma_plus: &SelfEnergyTriple,
    sigma_minus: &SelfEnergyTriple,
) -> KeldyshMatrices {
    let (delta, kappa, eps) = (params.detuning, params.kappa, params.epsilon);
    let g = Complex64::new(-0.5 * params.coupling, 0.0);

    let mut dr = Matrix4::from_diagonal([
        Complex64::new(omega + delta, kappa),
        Complex64::new(-omega + delta, -kappa),
        omega - 1.0 - sigma_plus.retarded + I * eps,
        -omega - 1.0 - sigma_minus.advanced - I * eps,
    ]);
    for x in [A, A_BAR] {
        for y in [C, C_BAR] {
            dr[(x, y)] = g;
            dr[(y, x)] = g;
        }
    }
    let dk = Matrix4::from_diagonal([
        Complex64::new(0.0, 2.0 * kappa),
        Complex64::new(0.0, 2.0 * kappa),
        -sigma_plus.keldysh + I * (2.0 * eps),
        -sigma_minus.keldysh + I * (2.0 * eps),
    ]);
    KeldyshMatrices {
        omega,
        retarded: dr,
        advanced: dr.adjoint(),
        keldysh: dk,
    }
}

/// `G^R = (D^R)⁻¹`, `G^A = (D^A)⁻¹`, `G^K = −G^R D^K (G^R)†`.
pub fn invert_action(k: &KeldyshMatrices) -> Result<GreenComponents> {
    let (gr, condition) = k.retarded.inverse_with_condition()?;
    if condition > CONDITION_LIMIT {
        return Err(Error::NearSingular { condition });
    }
    let ga = k.advanced.inverse()?;
    // (G^R)† rather than the separately inverted G^A keeps G^K
    // anti-Hermitian to rounding.
    let gk = -(gr * k.keldysh * gr.adjoint());
    Ok(GreenComponents {
        retarded: gr,
        advanced: ga,
        keldysh: gk,
        condition,
    })
}

/// A pole of the retarded propagator: `G^R ∝ 1/(ω − center + i·width)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Resonance {
    pub center: f64,
    pub width: f64,
}

/// The coupled photon/quasiparticle system with a fixed self-energy model.
#[derive(Debug, Clone)]
pub struct TwoModeSystem {
    params: ModelParams,
    sigma: SelfEnergyModel,
}

impl TwoModeSystem {
    /// Sharp-limit square-root bath described by `params`.
    pub fn new(params: ModelParams) -> Result<Self> {
        params.validate()?;
        Ok(TwoModeSystem {
            sigma: SelfEnergyModel::sharp(&params),
            params,
        })
    }

    pub fn with_self_energy(params: ModelParams, sigma: SelfEnergyModel) -> Result<Self> {
        params.validate()?;
        Ok(TwoModeSystem { params, sigma })
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn self_energy(&self) -> &SelfEnergyModel {
        &self.sigma
    }

    pub fn inverse_action(&self, omega: f64) -> Result<KeldyshMatrices> {
        let plus = self.sigma.evaluate(omega)?;
        let minus = self.sigma.evaluate(-omega)?;
        Ok(build_inverse_action(omega, &self.params, &plus, &minus))
    }

    pub fn green(&self, omega: f64) -> Result<GreenComponents> {
        invert_action(&self.inverse_action(omega)?)
    }

    /// `(C_a(ω), C_c(ω))`.
    pub fn correlation(&self, omega: f64) -> Result<(f64, f64)> {
        let g = self.green(omega)?;
        Ok((g.correlation(omega, A)?, g.correlation(omega, C)?))
    }

    pub fn det_retarded(&self, omega: f64) -> Result<Complex64> {
        Ok(self.inverse_action(omega)?.retarded.determinant())
    }

    /// Coupling at which the static polariton frequency vanishes,
    /// `y_c·√(1 + Re Σ^R(0))`. Equal to the closed-form `y_c` when the
    /// Lamb shift is pinned at zero frequency.
    pub fn critical_coupling(&self) -> Result<f64> {
        let y_c = self.params.critical_coupling()?;
        let stiffness = 1.0 + self.sigma.evaluate(0.0)?.retarded.re;
        Ok(y_c * stiffness.max(0.0).sqrt())
    }

    /// Fails with [`Error::AboveThreshold`] unless `y` is below
    /// [`Self::critical_coupling`].
    pub fn ensure_below_threshold(&self) -> Result<()> {
        let y_c = self.critical_coupling()?;
        if self.params.coupling >= y_c {
            return Err(Error::AboveThreshold {
                y: self.params.coupling,
                y_c,
            });
        }
        Ok(())
    }

    /// Diagonal entries `(A, Ā, C, C̄)` of `D^R` continued to complex `z`.
    fn diagonal_at(&self, z: Complex64) -> Result<[Complex64; 4]> {
        let (delta, kappa, eps) = (self.params.detuning, self.params.kappa, self.params.epsilon);
        Ok([
            z + Complex64::new(delta, kappa),
            -z + Complex64::new(delta, -kappa),
            z - 1.0 - self.sigma.retarded_continued(z)? + I * eps,
            -z - 1.0 - self.sigma.advanced_reflected(z)? - I * eps,
        ])
    }

    /// Polariton factor of `det D^R = A·Ā·P`:
    /// `P = C·C̄ − q(C + C̄)` with `q = (y²/4)(1/A + 1/Ā)`.
    pub fn polariton_factor(&self, z: Complex64) -> Result<Complex64> {
        let [a, ab, c, cb] = self.diagonal_at(z)?;
        let y = self.params.coupling;
        let q = 0.25 * y * y * (a.inv() + ab.inv());
        Ok(c * cb - q * (c + cb))
    }

    /// `det D^R = A·Ā·C·C̄ − (y²/4)(A + Ā)(C + C̄)`, continued to `z`.
    fn det_complex(&self, z: Complex64) -> Result<Complex64> {
        let [a, ab, c, cb] = self.diagonal_at(z)?;
        let y = self.params.coupling;
        Ok(a * ab * c * cb - 0.25 * y * y * (a + ab) * (c + cb))
    }

    /// Complex pole of the polariton branch with the smallest non-negative
    /// real part in `(0, 2]`.
    pub fn soft_root(&self) -> Result<Complex64> {
        self.ensure_below_threshold()?;
        let h = SCAN_MAX / SCAN_POINTS as f64;
        let grid: Vec<f64> = (0..=SCAN_POINTS).map(|i| i as f64 * h).collect();
        let values = grid
            .iter()
            .map(|&w| Ok(self.polariton_factor(Complex64::new(w, 0.0))?.norm()))
            .collect::<Result<Vec<f64>>>()?;

        let mut seeds = Vec::new();
        if values[0] <= values[1] {
            seeds.push(grid[0]);
        }
        for i in 1..SCAN_POINTS {
            if values[i] <= values[i - 1] && values[i] <= values[i + 1] {
                seeds.push(grid[i]);
            }
        }
        if values[SCAN_POINTS] < values[SCAN_POINTS - 1] {
            seeds.push(grid[SCAN_POINTS]);
        }

        let mut best: Option<Complex64> = None;
        for &w in &seeds {
            let z0 = Complex64::new(w, -self.params.epsilon);
            let z1 = z0 + Complex64::new(0.25 * h, -0.25 * h);
            let Some(z) = secant(|z| self.polariton_factor(z), z0, z1)? else {
                continue;
            };
            let tol = 1e-9 * (1.0 + z.norm());
            if z.im > tol || z.re < -tol || z.re > SCAN_MAX + h {
                continue;
            }
            if best.is_none_or(|b| z.re < b.re) {
                best = Some(z);
            }
        }
        if let Some(z) = best {
            return Ok(Complex64::new(z.re.max(0.0), z.im));
        }
        // A polariton pinned to the threshold has no pole on the physical
        // sheet; its spectral peak is the minimum of |P| on the real axis.
        let Some(&w) = seeds.iter().find(|&&w| w > 0.0 && w < SCAN_MAX) else {
            return Err(Error::RootNotBracketed { lo: 0.0, hi: SCAN_MAX });
        };
        let p = |w: f64| self.polariton_factor(Complex64::new(w, 0.0)).map(|v| v.norm());
        let w = golden_minimum(p, w - h, w + h)?;
        let delta = 1e-6;
        let slope = (p(w + delta)? - p(w)?).abs() / delta;
        let width = (p(w)? / slope).max(self.params.epsilon);
        Ok(Complex64::new(w, -width))
    }

    /// Real part of [`Self::soft_root`].
    pub fn soft_mode(&self) -> Result<f64> {
        Ok(self.soft_root()?.re)
    }

    /// Poles of `G^R` on both sides of the spectrum: the two cavity poles
    /// near `∓Δ_C` and the polariton pair near `±ω_soft`. Poles that fail to
    /// converge are skipped.
    pub fn resonances(&self) -> Result<Vec<Resonance>> {
        let (delta, kappa) = (self.params.detuning, self.params.kappa);
        let mut out = Vec::new();
        let mut push = |z: Complex64| {
            let width = (-z.im).max(1e-3 * self.params.epsilon);
            for center in [z.re, -z.re] {
                if !out.iter().any(|r: &Resonance| (r.center - center).abs() <= 1e-12 * (1.0 + center.abs())) {
                    out.push(Resonance { center, width });
                }
            }
        };
        let z0 = Complex64::new(-delta, -kappa);
        let step = Complex64::new(0.1 * kappa.max(1e-3), 0.0);
        if let Some(z) = secant(|z| self.det_complex(z), z0, z0 + step)? {
            push(z);
        }
        match self.soft_root() {
            Ok(z) => push(z),
            Err(Error::RootNotBracketed { .. }) => {}
            Err(e) => return Err(e),
        }
        if let Some(z) = self.cutoff_state()? {
            push(z);
        }
        out.sort_by(|a, b| a.center.total_cmp(&b.center));
        Ok(out)
    }

    /// The hard cutoff makes `Re Σ^R` diverge logarithmically at `Λ`, which
    /// pulls an undamped state out of the continuum just above it. Its
    /// weight is exponentially small for `ϱ ≲ 0.1` but not for `ϱ ~ 1`,
    /// and the sum rule needs it.
    fn cutoff_state(&self) -> Result<Option<Complex64>> {
        if !self.sigma.is_sharp() {
            return Ok(None);
        }
        let cutoff = self.params.cutoff;
        let f = |w: f64| -> Result<f64> { Ok(w - 1.0 - self.sigma.evaluate(w)?.retarded.re) };
        let mut lo = cutoff * (1.0 + 4.0 * f64::EPSILON);
        if f(lo)? >= 0.0 {
            return Ok(None);
        }
        let mut hi = cutoff + 1.0;
        while f(hi)? < 0.0 {
            hi = cutoff + 2.0 * (hi - cutoff);
            if hi > 1e6 * cutoff {
                return Ok(None);
            }
        }
        while hi - lo > 4.0 * f64::EPSILON * hi {
            let mid = 0.5 * (lo + hi);
            if f(mid)? < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let w = 0.5 * (lo + hi);
        let z0 = Complex64::new(w, -self.params.epsilon);
        let z1 = z0 + Complex64::new(1e-6 * (hi - cutoff), 0.0);
        Ok(secant(|z| self.polariton_factor(z), z0, z1)?
            .filter(|z| z.re > cutoff)
            .or(Some(z0)))
    }
}

fn golden_minimum(mut f: impl FnMut(f64) -> Result<f64>, mut lo: f64, mut hi: f64) -> Result<f64> {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - r * (hi - lo);
    let mut x2 = lo + r * (hi - lo);
    let (mut f1, mut f2) = (f(x1)?, f(x2)?);
    while hi - lo > 1e-13 * (1.0 + hi.abs()) {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - r * (hi - lo);
            f1 = f(x1)?;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + r * (hi - lo);
            f2 = f(x2)?;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Complex secant iteration; `None` if it stalls or wanders off.
///
/// Converged when the step falls below `1e-13·(1 + |z|)`; if rounding noise
/// prevents that, the best iterate is kept provided `|f|` dropped by at
/// least ten orders of magnitude.
fn secant(
    mut f: impl FnMut(Complex64) -> Result<Complex64>,
    mut z0: Complex64,
    mut z1: Complex64,
) -> Result<Option<Complex64>> {
    let mut f0 = f(z0)?;
    let mut f1 = f(z1)?;
    let start = f0.norm().max(f1.norm());
    let mut best = if f1.norm() < f0.norm() { (z1, f1.norm()) } else { (z0, f0.norm()) };
    for _ in 0..100 {
        let df = f1 - f0;
        if df.norm() == 0.0 {
            break;
        }
        let z2 = z1 - f1 * (z1 - z0) / df;
        if !(z2.re.is_finite() && z2.im.is_finite()) {
            break;
        }
        let done = (z2 - z1).norm() <= 1e-13 * (1.0 + z2.norm());
        z0 = z1;
        f0 = f1;
        z1 = z2;
        f1 = f(z1)?;
        if f1.norm() < best.1 {
            best = (z1, f1.norm());
        }
        if done || f1.norm() == 0.0 {
            return Ok(Some(z1));
        }
    }
    Ok((best.1 <= 1e-10 * start).then_some(best.0))
}
