//! The hyperbola Fourier layer: Fourier transforms of measures carried by
//! the hyperbola x₁x₂ = M²/(4π²) recovered from their axis compressions,
//! lattice-cross residual scans, the critical density f₀ and its vanishing
//! structure, the sici-spiral evaluation of the one-extra-point mechanism,
//! and the Bessel-ratio Fourier identity.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hilbert::{DecayClass, LineFunction};
use crate::quad::{self, PvConfig};
use crate::special::{self, sum_inv_pow};

const PI: f64 = std::f64::consts::PI;

/// A measure on the hyperbola of mass parameter M, carried by the density
/// of its compression to the x₁-axis.
#[derive(Clone)]
pub struct HyperbolaMeasure {
    pub density: LineFunction,
    pub mass: f64,
}

impl HyperbolaMeasure {
    pub fn new(density: LineFunction, mass: f64) -> Result<HyperbolaMeasure> {
        if !(mass > 0.0) {
            return Err(Error::InvalidInput("mass must be positive".into()));
        }
        Ok(HyperbolaMeasure { density, mass })
    }

    /// The measure whose compression is C₀·f₀ at the critical normalization
    /// (mass 2π): the one-dimensional kernel of the critical lattice-cross
    /// system on the positive branch.
    pub fn critical(c0: f64) -> HyperbolaMeasure {
        HyperbolaMeasure {
            density: LineFunction::new(DecayClass::InverseSquare, move |t| c0 * f0_normalized(t)),
            mass: 2.0 * PI,
        }
    }

    /// Poisson-kernel density restricted to the positive half-line; a
    /// generic measure whose transform does not vanish on the cross.
    pub fn poisson_halfline(eps: f64) -> HyperbolaMeasure {
        HyperbolaMeasure {
            density: LineFunction::new(DecayClass::InverseSquare, move |t| {
                if t > 0.0 {
                    eps / (PI * (eps * eps + t * t))
                } else {
                    0.0
                }
            }),
            mass: 2.0 * PI,
        }
    }
}

/// The normalized critical density (α = 2 scaling):
/// f₀(t) = 1/(1+t) on (0,1], -1/(t(1+t)) on (1,∞).
pub fn f0_normalized(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else if t <= 1.0 {
        1.0 / (1.0 + t)
    } else {
        -1.0 / (t * (1.0 + t))
    }
}

/// The general-α critical density of the one-branch uniqueness threshold:
/// 1_{[0,2/α]}/(2(2+αt)) - 1_{(2/α,∞)}/(αt(2+αt)).
///
/// At α = 2 this is f₀/4; the scale is tied to `f0_normalized` through the
/// scaling-covariance property rather than by a separate convention.
pub fn critical_f0(t: f64, alpha: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else if alpha * t <= 2.0 {
        1.0 / (2.0 * (2.0 + alpha * t))
    } else {
        -1.0 / (alpha * t * (2.0 + alpha * t))
    }
}

/// û(ξ) = ∫_{ℝ^×} exp(iπ[ξ₁ t + M² ξ₂/(4π² t)]) dπ₁μ(t).
///
/// The integral is split at |t| = 1; the inner part is mapped by t -> 1/s
/// so both pieces are half-line integrals with asymptotically linear phase,
/// handled by adaptive cores and phase-panel Euler tails.
pub fn hyperbola_ft(mu: &HyperbolaMeasure, xi: (f64, f64), cfg: &PvConfig) -> Result<Complex64> {
    let (xi1, xi2) = xi;
    let c = mu.mass * mu.mass * xi2 / (4.0 * PI); // full phase: π ξ₁ t + c / t
    let rho = mu.density.clone();

    // Outer piece over t in [1, ∞) and its mirror over (-∞, -1] (the
    // substitution t -> -u flips both orientation and bounds, so no sign):
    // weight ρ(±t) e^{i c/(±t)}, linear oscillation e^{±iπξ₁ t}.
    let outer = |sign: f64| -> Result<Complex64> {
        let rho = rho.clone();
        let amp = move |t: f64| Complex64::new(0.0, c / (sign * t)).exp() * rho.eval(sign * t);
        half_line_osc(&amp, sign * PI * xi1, cfg)
    };
    // Inner piece via t = sign/s, s in [1, ∞):
    // ∫ e^{iπξ₁ sign/s + i c sign s} ρ(sign/s) s^{-2} ds.
    let inner = |sign: f64| -> Result<Complex64> {
        let rho = rho.clone();
        let amp = move |s: f64| {
            Complex64::new(0.0, PI * xi1 * sign / s).exp() * rho.eval(sign / s) / (s * s)
        };
        half_line_osc(&amp, sign * c, cfg)
    };

    Ok(outer(1.0)? + inner(1.0)? + outer(-1.0)? + inner(-1.0)?)
}

/// ∫₁^∞ amp(t) e^{i ω t} dt for a decaying amplitude: adaptive core plus an
/// Euler-accelerated oscillatory tail (plain compactified quadrature when
/// ω = 0).
fn half_line_osc(
    amp: &(dyn Fn(f64) -> Complex64 + Sync),
    omega: f64,
    cfg: &PvConfig,
) -> Result<Complex64> {
    if omega == 0.0 {
        return quad::integrate_halfline_decaying(|t| amp(t), 1.0, cfg.quad_tol.max(1e-11));
    }
    let r0 = 1.0 + 16.0 / omega.abs().max(0.5);
    let core = quad::integrate(
        |t| amp(t) * Complex64::new(0.0, omega * t).exp(),
        1.0,
        r0,
        cfg.quad_tol.max(1e-12),
    )?;
    let aw = omega.abs();
    let tail = {
        let v = quad::oscillatory_tail(
            &|t| if omega > 0.0 { amp(t) } else { amp(t).conj() },
            &|t| aw * t,
            &|_| aw,
            r0,
            cfg.osc_tail_panels.max(48),
        )?;
        if omega > 0.0 {
            v
        } else {
            v.conj()
        }
    };
    Ok(core + tail)
}

/// Residuals of the two halves of the periodized vanishing system for a
/// half-line density f and inner parameter γ:
/// r1 = max over samples of |Σ_{j≥0} f(t+j)|,
/// r2 = max of |Σ_{j≥0} (t+j)^{-2} f(γ/(t+j))|.
pub fn periodized_vanishing_residual(
    f: &LineFunction,
    gamma: f64,
    samples: &[f64],
) -> Result<(f64, f64)> {
    if !(gamma > 0.0 && gamma <= 1.0) {
        return Err(Error::InvalidInput("gamma must be in (0,1]".into()));
    }
    let cap = 2000usize;
    let mut r1 = 0.0f64;
    let mut r2 = 0.0f64;
    for &t in samples {
        if !(t > 0.0 && t < 1.0) {
            return Err(Error::InvalidInput("samples must lie in (0,1)".into()));
        }
        // Direct periodization with an algebraic tail fitted past the cap.
        let mut s1 = 0.0;
        for j in 0..=cap {
            s1 += f.eval(t + j as f64);
        }
        let far = t + (cap + 1) as f64;
        let c2 = f.eval(far) * far * far;
        s1 += c2 * sum_inv_pow(2, far);
        r1 = r1.max(s1.abs());

        // Second sum: arguments γ/(t+j) -> 0⁺; fit f near 0 as a + b·u.
        let mut s2 = 0.0;
        for j in 0..=cap {
            let d = t + j as f64;
            s2 += f.eval(gamma / d) / (d * d);
        }
        let u0 = gamma / far;
        let (fa, fb) = (f.eval(u0), f.eval(0.5 * u0));
        let slope = (fa - fb) / (0.5 * u0);
        let a0 = fb - slope * 0.5 * u0;
        s2 += a0 * sum_inv_pow(2, far) + slope * gamma * sum_inv_pow(3, far);
        r2 = r2.max(s2.abs());
    }
    Ok((r1, r2))
}

/// Portions of the lattice-cross.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quadrant {
    Full,
    /// Nonnegative m, positive n.
    PlusPlus,
    /// Nonpositive m, negative n.
    MinusMinus,
    /// Nonnegative m, negative n.
    PlusMinus,
    /// Nonpositive m, positive n.
    MinusPlus,
}

/// The lattice-cross (αℤ × {0}) ∪ ({0} × βℤ), truncated for scans.
#[derive(Debug, Clone, Copy)]
pub struct LatticeCross {
    pub alpha: f64,
    pub beta: f64,
    pub m_max: usize,
    pub n_max: usize,
    pub quadrant: Quadrant,
}

impl LatticeCross {
    pub fn new(alpha: f64, beta: f64, m_max: usize, n_max: usize) -> Result<LatticeCross> {
        if !(alpha > 0.0 && beta > 0.0) {
            return Err(Error::InvalidInput(
                "lattice spacings must be positive".into(),
            ));
        }
        Ok(LatticeCross {
            alpha,
            beta,
            m_max,
            n_max,
            quadrant: Quadrant::Full,
        })
    }

    pub fn with_quadrant(mut self, q: Quadrant) -> LatticeCross {
        self.quadrant = q;
        self
    }

    fn m_range(&self) -> Vec<i64> {
        let m = self.m_max as i64;
        match self.quadrant {
            Quadrant::Full => (-m..=m).collect(),
            Quadrant::PlusPlus | Quadrant::PlusMinus => (0..=m).collect(),
            Quadrant::MinusMinus | Quadrant::MinusPlus => (-m..=0).collect(),
        }
    }

    fn n_range(&self) -> Vec<i64> {
        let n = self.n_max as i64;
        match self.quadrant {
            Quadrant::Full => (-n..=n).filter(|&k| k != 0).collect(),
            Quadrant::PlusPlus | Quadrant::MinusPlus => (1..=n).collect(),
            Quadrant::MinusMinus | Quadrant::PlusMinus => (-n..=-1).collect(),
        }
    }
}

/// One row of a lattice scan.
#[derive(Debug, Clone)]
pub struct LatticeEntry {
    /// The lattice point (ξ₁, ξ₂).
    pub point: (f64, f64),
    pub value: Option<Complex64>,
    pub error: Option<String>,
}

/// Scan result: |û| at the truncated cross.
#[derive(Debug, Clone)]
pub struct LatticeScan {
    pub entries: Vec<LatticeEntry>,
    pub max_residual: f64,
}

/// Evaluates |û| on the truncated lattice cross. Per-point failures are
/// recorded in the entry rather than aborting the scan.
pub fn lattice_residual_scan(
    mu: &HyperbolaMeasure,
    cross: &LatticeCross,
    cfg: &PvConfig,
) -> LatticeScan {
    let mut entries = Vec::new();
    let mut max_residual = 0.0f64;
    let mut push = |point: (f64, f64)| {
        let entry = match hyperbola_ft(mu, point, cfg) {
            Ok(v) => {
                max_residual = max_residual.max(v.norm());
                LatticeEntry {
                    point,
                    value: Some(v),
                    error: None,
                }
            }
            Err(e) => LatticeEntry {
                point,
                value: None,
                error: Some(e.to_string()),
            },
        };
        entries.push(entry);
    };
    for m in cross.m_range() {
        push((cross.alpha * m as f64, 0.0));
    }
    for n in cross.n_range() {
        push((0.0, cross.beta * n as f64));
    }
    LatticeScan {
        entries,
        max_residual,
    }
}

/// Closed form of the critical transform along the ξ₁-axis:
/// û(ξ₁, 0) = C₀ (e^{-iπξ₁} - 1) ∫₁^∞ e^{iπξ₁ t}/t dt.
/// The prefactor vanishes exactly at even integers; elsewhere the
/// half-line integral is a point on the sici spiral and never vanishes.
pub fn cross_ft_closed_form(xi1: f64, c0: Complex64, cfg: &PvConfig) -> Result<Complex64> {
    if xi1 == 0.0 || (xi1 / 2.0 - (xi1 / 2.0).round()).abs() < 1e-14 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let prefactor = Complex64::new(0.0, -PI * xi1).exp() - 1.0;
    let spiral = quad::integrate_osc_halfline(xi1, cfg)?;
    Ok(c0 * prefactor * spiral)
}

/// The sici-spiral point ci(πx) + i si(πx).
pub fn spiral_point(x: f64) -> Result<Complex64> {
    let (si, ci) = special::sici(PI * x)?;
    Ok(Complex64::new(ci, si))
}

/// Both routes of the Bessel-ratio Fourier identity at a point y in the
/// upper half-plane: lhs = ∫₀^∞ e^{iπxy} x^{-1/2} J₁(2√x) dx by quadrature,
/// rhs = 1 - e^{-i/(πy)}; returns (lhs, rhs, |lhs - rhs|).
pub fn ft_exp_inv_t_check(y: Complex64, cfg: &PvConfig) -> Result<(Complex64, Complex64, f64)> {
    if y.im <= 0.0 {
        return Err(Error::InvalidInput("need Im y > 0".into()));
    }
    // |e^{iπxy}| = e^{-π x Im y}: cut where it underflows the tolerance.
    let cut = 45.0 / (PI * y.im);
    let iy = Complex64::new(0.0, 1.0) * PI * y;
    let lhs = quad::integrate(
        |x: f64| (iy * x).exp() * special::bessel_j1_ratio(x).unwrap_or(f64::NAN),
        0.0,
        cut,
        cfg.quad_tol.max(1e-11),
    )?;
    let rhs = 1.0 - (-Complex64::new(0.0, 1.0) / (PI * y)).exp();
    Ok((lhs, rhs, (lhs - rhs).norm()))
}

/// One entry of the regularized line-integral check.
#[derive(Debug, Clone)]
pub struct RegularizedEntry {
    pub x: f64,
    /// (1/2π) ∫ e^{i/t + itx - ε|t|} dt by oscillatory quadrature.
    pub lhs: f64,
    /// The mollified target: P_ε(x) - (H₁ * P_ε)(x) with
    /// H₁(u) = 1_{u>0} u^{-1/2} J₁(2√u).
    pub target: f64,
    pub gap: f64,
}

/// Regularized Fourier check of the e^{i/t} transform away from the origin:
/// compares the ε-damped oscillatory line integral against the Poisson
/// mollification of δ₀ - H₁ at samples x > 0; the contract is gap <= 5ε.
pub fn regularized_ft_exp_check(
    x_samples: &[f64],
    eps: f64,
    cfg: &PvConfig,
) -> Result<Vec<RegularizedEntry>> {
    if !(1e-3..=1e-1).contains(&eps) {
        return Err(Error::InvalidInput("eps must be in [1e-3, 1e-1]".into()));
    }
    let mut out = Vec::with_capacity(x_samples.len());
    for &x in x_samples {
        if x <= 0.5 {
            return Err(Error::InvalidInput(
                "samples must stay away from the point mass at the origin".into(),
            ));
        }
        let lhs = regularized_line_integral(x, eps, cfg)?;
        let target = mollified_target(x, eps)?;
        out.push(RegularizedEntry {
            x,
            lhs,
            target,
            gap: (lhs - target).abs(),
        });
    }
    Ok(out)
}

/// (1/2π) ∫_ℝ e^{i/t + itx - ε|t|} dt = (1/π) Re ∫₀^∞ e^{i(1/t + tx)} e^{-εt} dt.
///
/// The phase 1/t + tx has its stationary point at t* = x^{-1/2}; the region
/// around it is integrated adaptively, and the far regimes (phase ≈ tx and,
/// after t -> 1/s, phase ≈ s) go through monotone-phase Euler tails.
fn regularized_line_integral(x: f64, eps: f64, cfg: &PvConfig) -> Result<f64> {
    let t_star = x.sqrt().recip();
    let lo = t_star / 8.0;
    let hi = 8.0 * t_star;
    let phase = move |t: f64| 1.0 / t + t * x;
    let core = quad::integrate(
        |t: f64| Complex64::new(0.0, phase(t)).exp() * (-eps * t).exp(),
        lo,
        hi,
        1e-11,
    )?;
    // Upper tail: phase' = x - 1/t² > 0 beyond t*.
    let upper = quad::oscillatory_tail(
        &|t| Complex64::new((-eps * t).exp(), 0.0),
        &phase,
        &move |t| x - 1.0 / (t * t),
        hi,
        cfg.osc_tail_panels.max(64),
    )?;
    // Lower tail via s = 1/t: ∫ e^{i(s + x/s)} e^{-ε/s} s^{-2} ds from 1/lo.
    let lower = quad::oscillatory_tail(
        &move |s: f64| Complex64::new((-eps / s).exp() / (s * s), 0.0),
        &move |s: f64| s + x / s,
        &move |s: f64| 1.0 - x / (s * s),
        1.0 / lo,
        cfg.osc_tail_panels.max(64),
    )?;
    Ok((core + upper + lower).re / PI)
}

fn mollified_target(x: f64, eps: f64) -> Result<f64> {
    let poisson = move |u: f64| eps / (PI * (eps * eps + u * u));
    // The point mass at 0 mollifies to P_ε(x): tiny away from 0 but kept.
    let delta_part = poisson(x);
    // (H₁ * P_ε)(x) = ∫₀^∞ b(u) P_ε(x-u) du, refined around the kernel peak.
    let b = |u: f64| special::bessel_j1_ratio(u).unwrap_or(f64::NAN);
    let w = (20.0 * eps).min(0.4 * x);
    let near = quad::integrate(|u| b(u) * poisson(x - u), x - w, x + w, 1e-11)?;
    let left = quad::integrate(|u| b(u) * poisson(x - u), 0.0, x - w, 1e-10)?;
    // Beyond the cutoff: |b| <= envelope(far) and ∫ P <= (ε/π)/(far-x).
    let far_end = x + 600.0;
    let right = quad::integrate(|u| b(u) * poisson(x - u), x + w, far_end, 1e-10)?;
    Ok(delta_part - (near + left + right))
}

/// Rescales a measure of mass M to the reference mass 2π:
/// û_M(ξ₁, ξ₂) = û_{2π}[ρ̃](s ξ₁, s ξ₂) with s = M/(2π) and ρ̃(u) = s ρ(s u).
pub fn rescale_to_reference(mu: &HyperbolaMeasure) -> (HyperbolaMeasure, f64) {
    let s = mu.mass / (2.0 * PI);
    let rho = mu.density.clone();
    let scaled = HyperbolaMeasure {
        density: LineFunction::new(mu.density.decay(), move |u| s * rho.eval(s * u)),
        mass: 2.0 * PI,
    };
    (scaled, s)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> PvConfig {
        PvConfig::default()
    }

    #[test]
    fn f0_values() {
        assert!((f0_normalized(0.5) - 2.0 / 3.0).abs() < 1e-15);
        assert!((f0_normalized(1.0) - 0.5).abs() < 1e-15);
        assert!((f0_normalized(1.0 + 1e-12) + 0.5).abs() < 1e-9);
        assert_eq!(f0_normalized(-1.0), 0.0);
        // General-α display: at t = 1/α the first branch gives 1/6.
        for &alpha in &[0.5, 1.0, 2.0, 3.0] {
            assert!((critical_f0(1.0 / alpha, alpha) - 1.0 / 6.0).abs() < 1e-15);
        }
        // α = 2 relates to the normalized form by the factor 4.
        for &t in &[0.2, 0.9, 1.5, 7.0] {
            assert!((4.0 * critical_f0(t, 2.0) - f0_normalized(t)).abs() < 1e-15);
        }
    }

    #[test]
    fn f0_telescopes_in_both_sums() {
        let f = LineFunction::new(DecayClass::InverseSquare, f0_normalized);
        let samples = [0.1, 0.3, 0.5, 0.7, 0.9];
        let (r1, r2) = periodized_vanishing_residual(&f, 1.0, &samples).unwrap();
        assert!(r1 < 1e-5, "{r1}");
        assert!(r2 < 1e-5, "{r2}");
    }

    #[test]
    fn lambda1_alone_does_not_solve_the_system() {
        let f = LineFunction::new(DecayClass::InverseSquare, |t: f64| {
            if t > 0.0 && t < 1.0 {
                1.0 / (1.0 + t)
            } else {
                0.0
            }
        });
        let (r1, _r2) = periodized_vanishing_residual(&f, 1.0, &[0.5]).unwrap();
        assert!(r1 > 0.3, "{r1}");
    }

    #[test]
    fn hyperbola_ft_total_mass_at_origin() {
        let mu = HyperbolaMeasure::poisson_halfline(1.0);
        let v = hyperbola_ft(&mu, (0.0, 0.0), &cfg()).unwrap();
        // ∫₀^∞ P₁ = 1/2.
        assert!((v.re - 0.5).abs() < 1e-8, "{v}");
        assert!(v.im.abs() < 1e-8);
    }

    #[test]
    fn critical_measure_vanishes_on_the_cross() {
        let mu = HyperbolaMeasure::critical(1.0);
        let cross = LatticeCross::new(2.0, 2.0, 5, 5).unwrap();
        let scan = lattice_residual_scan(&mu, &cross, &cfg());
        for e in &scan.entries {
            assert!(e.error.is_none(), "{:?}", e.error);
        }
        assert!(scan.max_residual < 1e-4, "{}", scan.max_residual);
    }

    #[test]
    fn poisson_measure_fails_on_the_cross() {
        let mu = HyperbolaMeasure::poisson_halfline(1.0);
        let cross = LatticeCross::new(2.0, 2.0, 3, 3).unwrap();
        let scan = lattice_residual_scan(&mu, &cross, &cfg());
        assert!(scan.max_residual > 1e-2, "{}", scan.max_residual);
    }

    #[test]
    fn trivial_scan_is_total_mass() {
        let mu = HyperbolaMeasure::poisson_halfline(1.0);
        let cross = LatticeCross::new(2.0, 2.0, 0, 0).unwrap();
        let scan = lattice_residual_scan(&mu, &cross, &cfg());
        assert_eq!(scan.entries.len(), 1);
        assert!((scan.max_residual - 0.5).abs() < 1e-8);
    }

    #[test]
    fn closed_form_matches_direct_transform_off_lattice() {
        let mu = HyperbolaMeasure::critical(1.0);
        for k in 0..10 {
            let xi1 = 0.3 + 0.37 * k as f64; // avoids even integers
            let direct = hyperbola_ft(&mu, (xi1, 0.0), &cfg()).unwrap();
            let closed = cross_ft_closed_form(xi1, Complex64::new(1.0, 0.0), &cfg()).unwrap();
            assert!(
                (direct - closed).norm() < 1e-4,
                "xi1={xi1}: {direct} vs {closed}"
            );
        }
    }

    #[test]
    fn closed_form_vanishes_only_on_even_integers() {
        let c0 = Complex64::new(1.0, 0.0);
        assert_eq!(
            cross_ft_closed_form(4.0, c0, &cfg()).unwrap(),
            Complex64::new(0.0, 0.0)
        );
        // ξ₁ = 1: C₀ (e^{-iπ}-1)(-ci(π) - i si(π)) = 2(ci(π) + i si(π)).
        let v = cross_ft_closed_form(1.0, c0, &cfg()).unwrap();
        let expect = Complex64::new(
            2.0 * 0.073_667_912_046_425_5,
            2.0 * 0.281_140_725_187_569_6,
        );
        assert!((v - expect).norm() < 1e-8, "{v} vs {expect}");
        // Off-lattice samples are bounded away from zero.
        let mut min = f64::INFINITY;
        for k in 0..40 {
            let xi1 = 0.05 + 9.85 * k as f64 / 39.0;
            if (xi1 / 2.0 - (xi1 / 2.0).round()).abs() < 0.02 {
                continue;
            }
            min = min.min(cross_ft_closed_form(xi1, c0, &cfg()).unwrap().norm());
        }
        assert!(min >= 1e-3, "{min}");
    }

    #[test]
    fn spiral_never_hits_origin() {
        let mut min = f64::INFINITY;
        for k in 0..100 {
            let x = 0.1 + 9.9 * k as f64 / 99.0;
            min = min.min(spiral_point(x).unwrap().norm());
        }
        assert!(min >= 1e-3, "{min}");
    }

    #[test]
    fn bessel_ft_identity_at_test_points() {
        let (l1, r1, g1) = ft_exp_inv_t_check(Complex64::new(0.0, 1.0), &cfg()).unwrap();
        assert!(g1 < 1e-5, "{l1} vs {r1}");
        assert!((r1.re - 0.272_622_650_704_783_5).abs() < 1e-9, "{}", r1.re);
        let (_, r2, g2) = ft_exp_inv_t_check(Complex64::new(0.0, 2.0), &cfg()).unwrap();
        assert!(g2 < 1e-5);
        assert!((r2.re - 0.147_135_796_685_535_36).abs() < 1e-9, "{}", r2.re);
        let (_, _, g3) = ft_exp_inv_t_check(Complex64::new(1.0, 1.0), &cfg()).unwrap();
        assert!(g3 < 1e-5, "{g3}");
        assert!(ft_exp_inv_t_check(Complex64::new(0.0, -1.0), &cfg()).is_err());
    }

    #[test]
    fn regularized_check_near_and_far() {
        let eps = 1e-2;
        let entries = regularized_ft_exp_check(&[2.0, 5.0, 20.0], eps, &cfg()).unwrap();
        for e in &entries {
            assert!(e.gap <= 5.0 * eps, "x={}: gap {}", e.x, e.gap);
        }
        // At x = 2 the value is near -b(2); at x = 20 the envelope is small.
        assert!((entries[0].lhs + 0.282_979_986_880_542_5).abs() < 5.0 * eps);
        assert!(entries[2].lhs.abs() < 0.15, "{}", entries[2].lhs);
        // At a zero of the ratio the mollified value is small.
        let at_zero = regularized_ft_exp_check(&[3.670_6], eps, &cfg()).unwrap();
        assert!(at_zero[0].lhs.abs() <= 5.0 * eps, "{}", at_zero[0].lhs);
    }

    #[test]
    fn scaling_covariance() {
        // A measure with mass M vs the rescaled reference-mass measure.
        let density = LineFunction::new(DecayClass::InverseSquare, |t: f64| {
            if t > 0.0 {
                t / (1.0 + t * t).powi(2)
            } else {
                0.0
            }
        });
        let mu = HyperbolaMeasure::new(density, 3.0).unwrap();
        let (reference, s) = rescale_to_reference(&mu);
        for &(x1, x2) in &[(0.7, 0.0), (1.3, 0.4), (0.0, 2.0)] {
            let lhs = hyperbola_ft(&mu, (x1, x2), &cfg()).unwrap();
            let rhs = hyperbola_ft(&reference, (s * x1, s * x2), &cfg()).unwrap();
            assert!((lhs - rhs).norm() < 1e-6, "({x1},{x2}): {lhs} vs {rhs}");
        }
    }
}
