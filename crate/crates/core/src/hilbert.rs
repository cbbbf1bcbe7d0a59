//! The Hilbert-transform family: the principal-value transform on the line,
//! the modified transform with the added kernel t/(1+t²) (normalized so the
//! harmonic extension vanishes at i), the 2-periodic transform with the
//! cotangent kernel, Szegő projections, the involutions J_β and J*_β, the
//! periodization operator, and the valeur-au-point evaluation of f + Hg.

use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{Grid, GridFunction};
use crate::maps::frac2;
use crate::quad::{self, PvConfig};
use crate::special::sum_inv_pow;

const PI: f64 = std::f64::consts::PI;

/// Declared decay class of a line function. Tail handling keys off the
/// declaration; `verify_decay` spot-checks it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecayClass {
    Compact,
    /// O(1/t²) at infinity.
    InverseSquare,
    /// O(1/t) at infinity.
    Inverse,
    /// Bounded, possibly with nonzero limits at ±infinity.
    Bounded,
}

/// A function on the real line with a declared decay class.
#[derive(Clone)]
pub struct LineFunction {
    f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    decay: DecayClass,
    support: Option<(f64, f64)>,
}

impl LineFunction {
    pub fn new(decay: DecayClass, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> LineFunction {
        LineFunction {
            f: Arc::new(f),
            decay,
            support: None,
        }
    }

    pub fn compact(a: f64, b: f64, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> LineFunction {
        LineFunction {
            f: Arc::new(move |t| if t >= a && t <= b { f(t) } else { 0.0 }),
            decay: DecayClass::Compact,
            support: Some((a, b)),
        }
    }

    /// The Poisson kernel P_ε(t) = ε / (π (ε² + t²)).
    pub fn poisson(eps: f64) -> LineFunction {
        LineFunction::new(DecayClass::InverseSquare, move |t| {
            eps / (PI * (eps * eps + t * t))
        })
    }

    pub fn indicator(a: f64, b: f64) -> LineFunction {
        LineFunction::compact(a, b, |_| 1.0)
    }

    /// C^∞ bump supported on (a, b), peak value 1 at the midpoint.
    pub fn smooth_bump(a: f64, b: f64) -> LineFunction {
        let mid = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        LineFunction::compact(a, b, move |t| {
            let u = (t - mid) / half;
            if u.abs() >= 1.0 {
                0.0
            } else {
                (1.0 - 1.0 / (1.0 - u * u)).exp() * std::f64::consts::E
            }
        })
    }

    pub fn eval(&self, t: f64) -> f64 {
        (self.f)(t)
    }

    pub fn decay(&self) -> DecayClass {
        self.decay
    }

    pub fn support(&self) -> Option<(f64, f64)> {
        self.support
    }

    /// Spot-check of the declared decay at |t| in {1e2, 1e3, 1e4}: the
    /// scaled samples must agree within a factor of 10 (or all vanish).
    pub fn verify_decay(&self) -> Result<()> {
        let power = match self.decay {
            DecayClass::Compact => {
                if let Some((a, b)) = self.support {
                    for &t in &[a.min(-1e2) * 1.5, b.max(1e2) * 1.5] {
                        if self.eval(t) != 0.0 {
                            return Err(Error::InvalidInput(
                                "compact support violated at sample point".into(),
                            ));
                        }
                    }
                }
                return Ok(());
            }
            DecayClass::InverseSquare => 2,
            DecayClass::Inverse => 1,
            DecayClass::Bounded => 0,
        };
        // Faster decay than declared is harmless; growth of the scaled
        // samples means the class was underdeclared.
        for sign in [-1.0, 1.0] {
            let scaled: Vec<f64> = [1e2, 1e3, 1e4]
                .iter()
                .map(|&t| (self.eval(sign * t) * t.powi(power)).abs())
                .collect();
            for w in scaled.windows(2) {
                if w[1] > 10.0 * w[0] + 1e-12 {
                    return Err(Error::InvalidInput(format!(
                        "decay class {:?} not confirmed by ratio test: {scaled:?}",
                        self.decay
                    )));
                }
            }
        }
        Ok(())
    }
}

/// ∫_R^∞ t^{-m} / (x - t) dt, |x| < R.
fn right_tail_kernel(m: u32, x: f64, r: f64) -> f64 {
    let mut acc = 0.0;
    let mut xk = 1.0;
    for k in 0..30 {
        acc -= xk / ((m as f64 + k as f64) * r.powi(m as i32 + k));
        xk *= x;
        if (xk / r.powi(m as i32 + k + 1)).abs() < 1e-18 {
            break;
        }
    }
    acc
}

/// ∫_R^∞ u^{-m} / (x + u) du, |x| < R.
fn left_tail_kernel(m: u32, x: f64, r: f64) -> f64 {
    let mut acc = 0.0;
    let mut xk = 1.0;
    for k in 0..30 {
        let term = xk / ((m as f64 + k as f64) * r.powi(m as i32 + k));
        acc += if k % 2 == 0 { term } else { -term };
        xk *= x;
        if (xk / r.powi(m as i32 + k + 1)).abs() < 1e-18 {
            break;
        }
    }
    acc
}

/// H f(x) = (1/π) pv ∫ f(t)/(x-t) dt.
///
/// Principal value over a window around x by symmetric excision with
/// Richardson extrapolation, adaptive quadrature on the rest, and
/// coefficient-fitted algebraic tail corrections per decay class.
pub fn hilbert(f: &LineFunction, x: f64, cfg: &PvConfig) -> Result<f64> {
    if f.decay == DecayClass::Bounded {
        return Err(Error::InvalidInput(
            "plain Hilbert transform needs decay; use the modified transform".into(),
        ));
    }
    let w = 1.0;
    let pv_core = quad::integrate_pv(|t| f.eval(t) / (x - t), x, (x - w, x + w), cfg)?;

    let mut acc = pv_core;
    match f.decay {
        DecayClass::Compact => {
            let (a, b) = f.support.unwrap_or((-1e3, 1e3));
            if a < x - w {
                acc += quad::integrate(|t| f.eval(t) / (x - t), a, x - w, cfg.quad_tol)?;
            }
            if b > x + w {
                acc += quad::integrate(|t| f.eval(t) / (x - t), x + w, b, cfg.quad_tol)?;
            }
        }
        _ => {
            let r = 1e4f64.max(8.0 * (x.abs() + 1.0));
            acc += quad::integrate_longrange(|t| f.eval(t) / (x - t), x + w, r, cfg.quad_tol)?;
            acc -= quad::integrate_longrange(|t| f.eval(t) / (x - t), x - w, -r, cfg.quad_tol)?;
            // Tail coefficients sampled at R and 2R: f ≈ c/t^m + c'/t^{m+1}.
            let m: u32 = if f.decay == DecayClass::Inverse { 1 } else { 2 };
            // Right side: f(t) t^m -> c_p + c_p'/t.
            let v1 = f.eval(r) * r.powi(m as i32);
            let v2 = f.eval(2.0 * r) * (2.0 * r).powi(m as i32);
            let cp_next = 2.0 * r * (v1 - v2);
            let cp = v2 - cp_next / (2.0 * r);
            // Left side: f(-u) u^m -> c_m + c_m'/u.
            let u1 = f.eval(-r) * r.powi(m as i32);
            let u2 = f.eval(-2.0 * r) * (2.0 * r).powi(m as i32);
            let cm_next = 2.0 * r * (u1 - u2);
            let cm = u2 - cm_next / (2.0 * r);
            acc += cp * right_tail_kernel(m, x, r) + cp_next * right_tail_kernel(m + 1, x, r);
            acc += cm * left_tail_kernel(m, x, r) + cm_next * left_tail_kernel(m + 1, x, r);
        }
    }
    Ok(acc / PI)
}

/// H f as a reusable line function: pointwise transforms cached on a graded
/// grid, plus the algebraic tail (∫f)/(πt) + (∫ t f)/(π t²) beyond it.
pub fn hilbert_as_line(f: &LineFunction, cfg: &PvConfig) -> Result<LineFunction> {
    let l = 400.0;
    let grid = Arc::new(Grid::from_sections(
        &[(-l, -8.0, 36), (-8.0, 8.0, 64), (8.0, l, 36)],
        6,
    )?);
    let values: Vec<f64> = grid
        .nodes()
        .par_iter()
        .map(|&t| hilbert(f, t, cfg))
        .collect::<Result<Vec<f64>>>()?;
    let core = GridFunction::from_values(grid, values)?;
    let mass = line_integral(f, cfg)?;
    let first_moment = {
        let (a, b) = f.support.unwrap_or((-1e4, 1e4));
        quad::integrate(|t| t * f.eval(t), a.max(-1e4), b.min(1e4), 1e-10)?
    };
    let decay = if mass.abs() > 1e-9 {
        DecayClass::Inverse
    } else {
        DecayClass::InverseSquare
    };
    Ok(LineFunction::new(decay, move |t| {
        if t.abs() < l {
            core.eval(t)
        } else {
            (mass / t + first_moment / (t * t)) / PI
        }
    }))
}

/// ∫_ℝ f dt with decay-class-aware tails.
pub fn line_integral(f: &LineFunction, cfg: &PvConfig) -> Result<f64> {
    match f.decay {
        DecayClass::Compact => {
            let (a, b) = f.support.unwrap_or((-1e3, 1e3));
            quad::integrate(|t| f.eval(t), a, b, cfg.quad_tol)
        }
        DecayClass::InverseSquare => {
            let r = 50.0;
            Ok(quad::integrate(|t| f.eval(t), -r, r, cfg.quad_tol)?
                + quad::integrate_halfline_decaying(|t| f.eval(t), r, cfg.quad_tol)?
                + quad::integrate_halfline_decaying(|t| f.eval(-t), r, cfg.quad_tol)?)
        }
        _ => Err(Error::InvalidInput(
            "line integral needs compact support or 1/t² decay".into(),
        )),
    }
}

/// The modified Hilbert transform
/// H̃f(x) = (1/π) pv ∫ f(t) [1/(x-t) + t/(1+t²)] dt for bounded f.
pub fn hilbert_modified(f: &LineFunction, x: f64, cfg: &PvConfig) -> Result<f64> {
    let w = 1.0;
    let kernel = move |t: f64| 1.0 / (x - t) + t / (1.0 + t * t);
    let pv_core = quad::integrate_pv(|t| f.eval(t) * kernel(t), x, (x - w, x + w), cfg)?;
    let r = 3e6f64.max(100.0 * (x.abs() + 1.0));
    let mid_right = quad::integrate_longrange(|t| f.eval(t) * kernel(t), x + w, r, cfg.quad_tol)?;
    let mid_left = -quad::integrate_longrange(|t| f.eval(t) * kernel(t), x - w, -r, cfg.quad_tol)?;
    // The kernel has antiderivative ln(sqrt(1+t²)/|x-t|) which tends to 0 at
    // ±infinity; the residual tails use the one-sided limits of f.
    let fp = f.eval(4.0 * r);
    let fm = f.eval(-4.0 * r);
    // ∫_R^∞ kernel = ln((R-x)/sqrt(1+R²)), ∫_{-∞}^{-R} = ln(sqrt(1+R²)/(R+x)).
    let tail_right = fp * ((r - x) / (1.0 + r * r).sqrt()).ln();
    let tail_left = fm * ((1.0 + r * r).sqrt() / (r + x)).ln();
    Ok((pv_core + mid_right + mid_left + tail_right + tail_left) / PI)
}

/// Harmonic extension of the modified transform to the upper half-plane:
/// H̃f(z) = (1/π) ∫ [ (Re z - t)/|z - t|² + t/(1+t²) ] f(t) dt.
/// By construction H̃f(i) = 0 for every f.
pub fn hilbert_modified_upper(f: &LineFunction, z: (f64, f64), cfg: &PvConfig) -> Result<f64> {
    let (xr, yi) = z;
    if yi <= 0.0 {
        return Err(Error::InvalidInput("need Im z > 0".into()));
    }
    let kern = move |t: f64| {
        let dx = xr - t;
        dx / (dx * dx + yi * yi) + t / (1.0 + t * t)
    };
    let r = 3e6f64;
    let core = quad::integrate_longrange(|t| f.eval(t) * kern(t), xr, r, cfg.quad_tol)?
        - quad::integrate_longrange(|t| f.eval(t) * kern(t), xr, -r, cfg.quad_tol)?;
    Ok(core / PI)
}

/// c(f) = (1/π) ∫ f/(1+t²) dt, the constant in H̃²f = -f + c(f).
pub fn c_of(f: &LineFunction, cfg: &PvConfig) -> Result<f64> {
    let g = |t: f64| f.eval(t) / (1.0 + t * t);
    let r = 50.0;
    let v = quad::integrate(g, -r, r, cfg.quad_tol)?
        + quad::integrate_halfline_decaying(g, r, cfg.quad_tol)?
        + quad::integrate_halfline_decaying(|t| g(-t), r, cfg.quad_tol)?;
    Ok(v / PI)
}

/// max over the samples of |H̃(H̃f)(x) + f(x) - c(f)|.
///
/// The inner transform is cached on a graded grid with a C + a/t tail model
/// fitted from samples, so the outer transform sees a cheap integrand.
pub fn double_modified_residual(f: &LineFunction, samples: &[f64], cfg: &PvConfig) -> Result<f64> {
    let c = c_of(f, cfg)?;
    let l = 300.0;
    let grid = Arc::new(Grid::from_sections(
        &[(-l, -8.0, 32), (-8.0, 8.0, 56), (8.0, l, 32)],
        6,
    )?);
    let values: Vec<f64> = grid
        .nodes()
        .par_iter()
        .map(|&t| hilbert_modified(f, t, cfg))
        .collect::<Result<Vec<f64>>>()?;
    let core = GridFunction::from_values(grid, values)?;
    // Tail model per side: H̃f(t) ≈ C + a/t from samples at L and 2L.
    let fit = |v1: f64, v2: f64, t1: f64, t2: f64| -> (f64, f64) {
        let a = (v1 - v2) / (1.0 / t1 - 1.0 / t2);
        (v2 - a / t2, a)
    };
    let (cp, ap) = fit(
        hilbert_modified(f, l, cfg)?,
        hilbert_modified(f, 2.0 * l, cfg)?,
        l,
        2.0 * l,
    );
    let (cm, am) = fit(
        hilbert_modified(f, -l, cfg)?,
        hilbert_modified(f, -2.0 * l, cfg)?,
        -l,
        -2.0 * l,
    );
    let cached = LineFunction::new(DecayClass::Bounded, move |t| {
        if t.abs() < l {
            core.eval(t)
        } else if t > 0.0 {
            cp + ap / t
        } else {
            cm + am / t
        }
    });
    let mut worst = 0.0f64;
    for &x in samples {
        let outer = hilbert_modified(&cached, x, cfg)?;
        worst = worst.max((outer + f.eval(x) - c).abs());
    }
    Ok(worst)
}

/// A 2-periodic function given by its values on the fundamental domain.
#[derive(Clone)]
pub struct PeriodicFunction {
    f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl PeriodicFunction {
    /// Wraps the callable (defined on (-1, 1]) periodically.
    pub fn new(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> PeriodicFunction {
        PeriodicFunction { f: Arc::new(f) }
    }

    pub fn eval(&self, x: f64) -> f64 {
        (self.f)(frac2(x))
    }
}

/// H₂f(x) = (1/2) pv ∫_{I₁} f(t) cot(π(x-t)/2) dt.
///
/// The window is re-centered at x, so the only cotangent pole in range is
/// the one at t = x; by periodicity the value is unchanged.
pub fn hilbert_periodic(f: &PeriodicFunction, x: f64, cfg: &PvConfig) -> Result<f64> {
    let integrand = |t: f64| 0.5 * f.eval(t) / (PI * (x - t) / 2.0).tan();
    quad::integrate_pv(integrand, x, (x - 1.0, x + 1.0), cfg)
}

/// The symmetric-window line route to the periodic transform:
/// (1/π) pv ∫_{|t| < 2N+1} f(x-t)/t dt.
pub fn hilbert_periodic_window(
    f: &PeriodicFunction,
    x: f64,
    n_window: usize,
    cfg: &PvConfig,
) -> Result<f64> {
    let pv_core = quad::integrate_pv(|t| f.eval(x - t) / t, 0.0, (-1.0, 1.0), cfg)?;
    let upper = 2.0 * n_window as f64 + 1.0;
    let rest = quad::integrate(
        |t| (f.eval(x - t) - f.eval(x + t)) / t,
        1.0,
        upper,
        cfg.quad_tol.max(1e-10),
    )?;
    Ok((pv_core + rest) / PI)
}

/// Szegő projection P₊ f = (f + i H f)/2.
pub fn szego_plus(f: &LineFunction, x: f64, cfg: &PvConfig) -> Result<Complex64> {
    let h = hilbert(f, x, cfg)?;
    Ok(0.5 * Complex64::new(f.eval(x), h))
}

/// Szegő projection P₋ f = (f - i H f)/2.
pub fn szego_minus(f: &LineFunction, x: f64, cfg: &PvConfig) -> Result<Complex64> {
    let h = hilbert(f, x, cfg)?;
    Ok(0.5 * Complex64::new(f.eval(x), -h))
}

/// J_β f(x) = (β/x²) f(-β/x), the density-level involution.
pub fn j_density_point(beta: f64, f: &LineFunction, x: f64) -> Result<f64> {
    if x == 0.0 {
        return Err(Error::InvalidInput("J_β is undefined at x = 0".into()));
    }
    Ok(beta / (x * x) * f.eval(-beta / x))
}

/// J_β f as a line function. The image of a compactly supported function
/// avoiding 0 is again compactly supported (on the reflected interval);
/// otherwise the image is O(1/x²) at infinity.
pub fn j_density(beta: f64, f: &LineFunction) -> LineFunction {
    let inner = f.clone();
    let (decay, support) = match (f.decay, f.support) {
        (DecayClass::Compact, Some((a, b))) if a * b > 0.0 => {
            let (ia, ib) = (-beta / a, -beta / b);
            (DecayClass::Compact, Some((ia.min(ib), ia.max(ib))))
        }
        _ => (DecayClass::InverseSquare, None),
    };
    let mut out = LineFunction::new(decay, move |x: f64| {
        if x == 0.0 {
            0.0
        } else {
            beta / (x * x) * inner.eval(-beta / x)
        }
    });
    out.support = support;
    out
}

/// J*_β g(x) = g(-β/x), the composition-only adjoint.
pub fn j_star_point(beta: f64, g: &LineFunction, x: f64) -> Result<f64> {
    if x == 0.0 {
        return Err(Error::InvalidInput("J*_β is undefined at x = 0".into()));
    }
    Ok(g.eval(-beta / x))
}

/// J*_β g as a line function. A compactly supported g avoiding 0 maps to a
/// compactly supported image; a decaying g maps to something bounded with
/// limits g(0∓) at ±infinity.
pub fn j_star(beta: f64, g: &LineFunction) -> LineFunction {
    let inner = g.clone();
    let (decay, support) = match (g.decay, g.support) {
        (DecayClass::Compact, Some((a, b))) if a * b > 0.0 => {
            let (ia, ib) = (-beta / a, -beta / b);
            (DecayClass::Compact, Some((ia.min(ib), ia.max(ib))))
        }
        _ => (DecayClass::Bounded, None),
    };
    let mut out = LineFunction::new(decay, move |x: f64| {
        if x == 0.0 {
            0.0
        } else {
            inner.eval(-beta / x)
        }
    });
    out.support = support;
    out
}

/// max over samples of |H(J*_β φ)(x) - J*_β(Hφ)(x) - ⟨φ, 1/(πt)⟩| for a
/// test function φ supported away from 0. The sign of the correction term
/// follows from -x/(β+tx) = β/(t(β+tx)) - 1/t applied under the integral;
/// both sides are checked here by independent principal-value quadratures.
pub fn commutator_jstar_residual(
    beta: f64,
    phi: &LineFunction,
    samples: &[f64],
    cfg: &PvConfig,
) -> Result<f64> {
    let (a, b) = phi
        .support
        .ok_or_else(|| Error::InvalidInput("φ must be compactly supported".into()))?;
    if a <= 0.0 && b >= 0.0 {
        for &t in &[-1e-3, 1e-3, -1e-2, 1e-2] {
            if phi.eval(t) != 0.0 {
                return Err(Error::InvalidInput(
                    "φ must vanish in a neighborhood of 0".into(),
                ));
            }
        }
    }
    // The image J*φ(x) = φ(-β/x) is compact because φ has a hole around 0:
    // estimate the hole radius from a probe grid, then bound the image by
    // ±[β/sup|supp φ|, β/hole].
    let mut hole = a.abs().max(b.abs());
    let probes = 512;
    for i in 0..=probes {
        let t = a + (b - a) * i as f64 / probes as f64;
        if phi.eval(t) != 0.0 {
            hole = hole.min(t.abs());
        }
    }
    let hole = (0.75 * hole).max(1e-3);
    let outer = beta / hole;
    let phi2 = phi.clone();
    let jphi = LineFunction::compact(-outer, outer, move |x| {
        if x == 0.0 {
            0.0
        } else {
            phi2.eval(-beta / x)
        }
    });
    let pairing = quad::integrate(
        |t| if t == 0.0 { 0.0 } else { phi.eval(t) / (PI * t) },
        a,
        b,
        cfg.quad_tol,
    )?;
    let mut worst = 0.0f64;
    for &x in samples {
        if x == 0.0 {
            continue;
        }
        let lhs = hilbert(&jphi, x, cfg)?;
        let rhs = hilbert(phi, -beta / x, cfg)? + pairing;
        worst = worst.max((lhs - rhs).abs());
    }
    Ok(worst)
}

/// c_β(f) = H̃f(iβ) = ((β² - 1)/π) ∫ t f(t) / ((1+t²)(β²+t²)) dt.
///
/// The prefactor 1/π comes from the harmonic-extension normalization of
/// the modified transform; `hilbert_modified_upper(f, (0, β))` computes the
/// same constant by a second route.
pub fn c_beta(beta: f64, f: &LineFunction, cfg: &PvConfig) -> Result<f64> {
    if beta == 1.0 {
        return Ok(0.0);
    }
    let g = move |t: f64| t * f.eval(t) / ((1.0 + t * t) * (beta * beta + t * t));
    let r = 50.0;
    let v = quad::integrate(g, -r, r, cfg.quad_tol)?
        + quad::integrate_halfline_decaying(g, r, cfg.quad_tol)?
        + quad::integrate_halfline_decaying(move |t| g(-t), r, cfg.quad_tol)?;
    Ok((beta * beta - 1.0) * v / PI)
}

/// max over samples of |J*_β(H̃f)(x) - H̃(J*_β f)(x) - c_β(f)|.
pub fn modified_commutator_residual(
    beta: f64,
    f: &LineFunction,
    samples: &[f64],
    cfg: &PvConfig,
) -> Result<f64> {
    let c = c_beta(beta, f, cfg)?;
    let jf = j_star(beta, f);
    let mut worst = 0.0f64;
    for &x in samples {
        if x == 0.0 {
            continue;
        }
        let lhs = hilbert_modified(f, -beta / x, cfg)?;
        let rhs = hilbert_modified(&jf, x, cfg)?;
        worst = worst.max((lhs - rhs - c).abs());
    }
    Ok(worst)
}

/// Π₂ f(x) = Σ_j f(x + 2j), with a certified tail from the decay class.
pub fn periodize(f: &LineFunction, x: f64) -> Result<f64> {
    match f.decay {
        DecayClass::Compact => {
            let (a, b) = f.support.unwrap_or((-1e3, 1e3));
            let j_lo = ((a - x) / 2.0).floor() as i64 - 1;
            let j_hi = ((b - x) / 2.0).ceil() as i64 + 1;
            Ok((j_lo..=j_hi).map(|j| f.eval(x + 2.0 * j as f64)).sum())
        }
        DecayClass::InverseSquare => {
            let cap = 1000i64;
            let partial: f64 = (-cap..=cap).map(|j| f.eval(x + 2.0 * j as f64)).sum();
            let tp = x + 2.0 * (cap + 1) as f64;
            let tm = x - 2.0 * (cap + 1) as f64;
            let cp = f.eval(tp) * tp * tp;
            let cm = f.eval(tm) * tm * tm;
            // Σ_{j>cap} (x+2j)^{-2} = (1/4) Σ_{k≥0} (k + cap+1 + x/2)^{-2}.
            let tail = 0.25
                * (cp * sum_inv_pow(2, cap as f64 + 1.0 + 0.5 * x)
                    + cm * sum_inv_pow(2, cap as f64 + 1.0 - 0.5 * x));
            Ok(partial + tail)
        }
        _ => Err(Error::TailNotControlled {
            bound: f64::INFINITY,
            tol: 0.0,
        }),
    }
}

/// Π₂ f as a periodic function.
pub fn periodize_fn(f: &LineFunction) -> Result<PeriodicFunction> {
    f.verify_decay()?;
    let inner = f.clone();
    Ok(PeriodicFunction::new(move |x| {
        periodize(&inner, x).unwrap_or(f64::NAN)
    }))
}

/// Smooth cutoff equal to 1 on [x0-inner, x0+inner], supported on
/// [x0-outer, x0+outer].
fn smooth_cutoff(x0: f64, inner: f64, outer: f64) -> LineFunction {
    let psi = |u: f64| if u <= 0.0 { 0.0 } else { (-1.0 / u).exp() };
    LineFunction::compact(x0 - outer, x0 + outer, move |t| {
        let u = (outer - (t - x0).abs()) / (outer - inner);
        if u >= 1.0 {
            1.0
        } else {
            let p = psi(u);
            p / (p + psi(1.0 - u))
        }
    })
}

/// Outcome of the valeur-au-point evaluation of u = f + Hg.
#[derive(Debug, Clone)]
pub struct PevOutcome {
    /// Route (i): f(x) + Hg(x) with the pointwise principal value.
    pub pointwise: f64,
    /// Route (ii): lim_ε ⟨χ P_{x+iε}, u⟩ for two different cutoffs,
    /// extrapolated linearly from ε in {1e-2, 1e-3}.
    pub limits: [f64; 2],
}

/// Both routes for the valeur-au-point function of u = f + Hg at x, with g
/// zero-mean (checked to 1e-8).
pub fn valeur_au_point(
    f: &LineFunction,
    g: &LineFunction,
    x: f64,
    cfg: &PvConfig,
) -> Result<PevOutcome> {
    let g_mass = line_integral(g, cfg)?;
    if g_mass.abs() > 1e-8 {
        return Err(Error::InvalidInput(format!(
            "g must be zero-mean; ∫g = {g_mass:.3e}"
        )));
    }
    let pointwise = f.eval(x) + hilbert(g, x, cfg)?;

    let (ga, gb) = g.support.unwrap_or((-50.0, 50.0));
    let mut limits = [0.0f64; 2];
    for (slot, (inner, outer)) in [(1.0, 2.0), (0.5, 3.0)].iter().enumerate() {
        let chi = smooth_cutoff(x, *inner, *outer);
        let mut vals = [0.0f64; 2];
        for (k, eps) in [1e-2, 1e-3].iter().enumerate() {
            let chi2 = chi.clone();
            let poisson = move |t: f64| eps / (PI * (eps * eps + (x - t) * (x - t)));
            let chip = LineFunction::compact(x - *outer, x + *outer, move |t| {
                chi2.eval(t) * poisson(t)
            });
            let f_part = quad::integrate(
                |t| chip.eval(t) * f.eval(t),
                x - *outer,
                x + *outer,
                cfg.quad_tol,
            )?;
            // ⟨χP, Hg⟩ = -⟨H[χP], g⟩ with H[χP] = H[P] - H[(1-χ)P]: the
            // first term is the conjugate Poisson kernel in closed form,
            // the second has a smooth, spike-free integrand.
            let chi3 = chi.clone();
            let rest = LineFunction::new(DecayClass::InverseSquare, move |t| {
                (1.0 - chi3.eval(t)) * poisson(t)
            });
            let conj_poisson =
                move |t: f64| (t - x) / (PI * ((t - x) * (t - x) + eps * eps));
            let g_part = quad::integrate(
                |t| -> f64 {
                    (conj_poisson(t) - hilbert(&rest, t, cfg).unwrap_or(f64::NAN)) * g.eval(t)
                },
                ga,
                gb,
                1e-9,
            )?;
            vals[k] = f_part - g_part;
        }
        // Linear extrapolation in ε with ratio 10.
        limits[slot] = (10.0 * vals[1] - vals[0]) / 9.0;
    }
    Ok(PevOutcome { pointwise, limits })
}

/// ⟨φ, Π₂(Hg)⟩ vs ⟨φ, H₂(Π₂ g)⟩ for 2-periodic smooth φ and compactly
/// supported zero-mean g: returns the absolute gap.
pub fn periodization_commutes_residual(
    phi: &PeriodicFunction,
    g: &LineFunction,
    cfg: &PvConfig,
) -> Result<f64> {
    let hg = hilbert_as_line(g, cfg)?;
    let per_hg = periodize_fn(&hg)?;
    let lhs = quad::integrate(|t| phi.eval(t) * per_hg.eval(t), -1.0, 1.0, 1e-9)?;
    let per_g = periodize_fn(g)?;
    let rhs = quad::integrate(
        |t| -> f64 { phi.eval(t) * hilbert_periodic(&per_g, t, cfg).unwrap_or(f64::NAN) },
        -1.0 + 1e-9,
        1.0 - 1e-9,
        1e-8,
    )?;
    Ok((lhs - rhs).abs())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> PvConfig {
        PvConfig::default()
    }

    #[test]
    fn hilbert_poisson_kernel() {
        // H P_ε = (1/π) x/(ε²+x²).
        let f = LineFunction::poisson(1.0);
        for &x in &[2.0, -0.7, 5.0] {
            let v = hilbert(&f, x, &cfg()).unwrap();
            let want = x / (PI * (1.0 + x * x));
            assert!((v - want).abs() < 1e-7, "x={x}: {v} vs {want}");
        }
    }

    #[test]
    fn hilbert_indicator_closed_form() {
        // H 1_{[-1,1]}(x) = (1/π) ln|(x+1)/(x-1)|.
        let f = LineFunction::indicator(-1.0, 1.0);
        let v = hilbert(&f, 2.0, &cfg()).unwrap();
        let want = (3.0f64).ln() / PI;
        assert!((v - want).abs() < 1e-7, "{v} vs {want}");
    }

    #[test]
    fn hilbert_odd_function_at_zero() {
        // f(t) = t·1_{[-1,1]}: Hf(0) = -(2/π)∫₀¹ dt = -2/π.
        let f = LineFunction::compact(-1.0, 1.0, |t| t);
        let v = hilbert(&f, 0.0, &cfg()).unwrap();
        assert!((v + 2.0 / PI).abs() < 1e-7, "{v}");
    }

    #[test]
    fn hilbert_rejects_bounded() {
        let f = LineFunction::new(DecayClass::Bounded, |_| 1.0);
        assert!(hilbert(&f, 0.0, &cfg()).is_err());
    }

    #[test]
    fn hilbert_anti_involution() {
        // H(Hf) = -f at a few points for smooth compact f.
        let f = LineFunction::smooth_bump(-1.0, 1.5);
        let hf = hilbert_as_line(&f, &cfg()).unwrap();
        for &x in &[0.0, 0.4, -0.6, 1.0, 2.5] {
            let hhf = hilbert(&hf, x, &cfg()).unwrap();
            assert!(
                (hhf + f.eval(x)).abs() < 1e-4,
                "x={x}: {hhf} vs {}",
                -f.eval(x)
            );
        }
    }

    #[test]
    fn modified_annihilates_constants() {
        let one = LineFunction::new(DecayClass::Bounded, |_| 1.0);
        for &x in &[-3.0, 0.0, 5.0] {
            let v = hilbert_modified(&one, x, &cfg()).unwrap();
            assert!(v.abs() < 1e-6, "x={x}: {v}");
        }
    }

    #[test]
    fn modified_normalization_at_i() {
        let f = LineFunction::new(DecayClass::Bounded, |t: f64| t.sin() / (1.0 + t * t));
        let v = hilbert_modified_upper(&f, (0.0, 1.0), &cfg()).unwrap();
        assert!(v.abs() < 1e-6, "{v}");
    }

    #[test]
    fn modified_minus_plain_is_constant() {
        // H̃f - Hf constant in x for decaying f.
        let f = LineFunction::poisson(1.0);
        let mut values = Vec::new();
        for &x in &[-3.0, 0.0, 5.0] {
            let d = hilbert_modified(&f, x, &cfg()).unwrap() - hilbert(&f, x, &cfg()).unwrap();
            values.push(d);
        }
        let spread = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
            - values.iter().cloned().fold(f64::INFINITY, f64::min);
        assert!(spread < 1e-6, "{values:?}");
    }

    #[test]
    fn c_of_examples() {
        let one = LineFunction::new(DecayClass::Bounded, |_| 1.0);
        assert!((c_of(&one, &cfg()).unwrap() - 1.0).abs() < 1e-8);
        let odd = LineFunction::new(DecayClass::InverseSquare, |t: f64| {
            t / (1.0 + t * t).powi(2)
        });
        assert!(c_of(&odd, &cfg()).unwrap().abs() < 1e-10);
        let f = LineFunction::new(DecayClass::InverseSquare, |t: f64| {
            (1.0 - t * t) / (1.0 + t * t).powi(2)
        });
        let direct = quad::integrate(
            |t: f64| (1.0 - t * t) / (1.0 + t * t).powi(3),
            -2000.0,
            2000.0,
            1e-11,
        )
        .unwrap()
            / PI;
        let v = c_of(&f, &cfg()).unwrap();
        assert!((v - direct).abs() < 1e-7, "{v} vs {direct}");
    }

    #[test]
    fn double_modified_is_reflection_plus_constant() {
        let f = LineFunction::poisson(1.0);
        let r = double_modified_residual(&f, &[-2.0, -0.5, 0.0, 1.0, 3.0], &cfg()).unwrap();
        assert!(r < 1e-4, "{r}");
    }

    #[test]
    fn periodic_hilbert_examples() {
        let one = PeriodicFunction::new(|_| 1.0);
        assert!(hilbert_periodic(&one, 0.3, &cfg()).unwrap().abs() < 1e-8);
        // cos(πt) -> sin(πx).
        let f = PeriodicFunction::new(|t: f64| (PI * t).cos());
        for &x in &[0.0, 0.25, -0.65] {
            let v = hilbert_periodic(&f, x, &cfg()).unwrap();
            assert!((v - (PI * x).sin()).abs() < 1e-7, "x={x}: {v}");
        }
    }

    #[test]
    fn periodic_window_route_converges() {
        let f = PeriodicFunction::new(|t: f64| (PI * t).cos());
        let x = 0.3;
        let target = hilbert_periodic(&f, x, &cfg()).unwrap();
        let a40 = hilbert_periodic_window(&f, x, 40, &cfg()).unwrap();
        let a160 = hilbert_periodic_window(&f, x, 160, &cfg()).unwrap();
        // Richardson in 1/N (ratio 4).
        let extrapolated = a160 + (a160 - a40) / 3.0;
        assert!(
            (extrapolated - target).abs() < 1e-4,
            "{a40} {a160} -> {extrapolated} vs {target}"
        );
    }

    #[test]
    fn szego_sum_and_conjugation() {
        let f = LineFunction::poisson(1.0);
        let x = 0.8;
        let p = szego_plus(&f, x, &cfg()).unwrap();
        let m = szego_minus(&f, x, &cfg()).unwrap();
        assert!(((p + m).re - f.eval(x)).abs() < 1e-12);
        assert!((p + m).im.abs() < 1e-12);
        assert!((m - p.conj()).norm() < 1e-12);
    }

    #[test]
    fn involution_j_fixes_poisson_at_one() {
        // J₁ P_i = P_i pointwise.
        let f = LineFunction::poisson(1.0);
        for &x in &[0.5, -2.0, 3.3] {
            let v = j_density_point(1.0, &f, x).unwrap();
            assert!((v - f.eval(x)).abs() < 1e-14, "x={x}");
        }
        assert!(j_density_point(1.0, &f, 0.0).is_err());
    }

    #[test]
    fn involution_isometry_and_square() {
        let f = LineFunction::indicator(1.0, 2.0);
        let jf = j_density(0.5, &f);
        // ‖J_β f‖₁ = ‖f‖₁ = 1.
        let (a, b) = jf.support.unwrap();
        let n = quad::integrate(|t| jf.eval(t).abs(), a - 0.1, b + 0.1, 1e-10).unwrap();
        assert!((n - 1.0).abs() < 1e-8, "{n}");
        // J² = id pointwise.
        let jjf = j_density(0.5, &jf);
        for &x in &[1.2, 1.7, 1.95] {
            assert!((jjf.eval(x) - f.eval(x)).abs() < 1e-12, "x={x}");
        }
        // (J*)² = id.
        let g = LineFunction::new(DecayClass::Bounded, |t: f64| t.cos());
        let jg = j_star(0.7, &g);
        let jjg = j_star(0.7, &jg);
        for &x in &[0.4, -1.3, 2.0] {
            assert!((jjg.eval(x) - g.eval(x)).abs() < 1e-12, "x={x}");
        }
    }

    #[test]
    fn j_pairing_duality() {
        // ⟨J*_β φ, f⟩ = ⟨φ, J_β f⟩ for φ = cos, f = 1_{[0.5, 1.5]}.
        let beta = 0.5;
        let f = LineFunction::indicator(0.5, 1.5);
        let jf = j_density(beta, &f);
        let lhs =
            quad::integrate(|t: f64| (-beta / t).cos() * f.eval(t), 0.5, 1.5, 1e-11).unwrap();
        let (a, b) = jf.support().unwrap();
        let rhs = quad::integrate(|t: f64| t.cos() * jf.eval(t), a, b, 1e-11).unwrap();
        assert!((lhs - rhs).abs() < 1e-8, "{lhs} vs {rhs}");
    }

    #[test]
    fn commutator_jstar() {
        let phi = LineFunction::smooth_bump(1.0, 2.0);
        let r = commutator_jstar_residual(1.0, &phi, &[0.5, -0.8, 2.0], &cfg()).unwrap();
        assert!(r < 1e-4, "{r}");
        // Zero test function: every term vanishes.
        let zero = LineFunction::compact(1.0, 2.0, |_| 0.0);
        let rz = commutator_jstar_residual(1.0, &zero, &[0.5, 2.0], &cfg()).unwrap();
        assert!(rz < 1e-12, "{rz}");
    }

    #[test]
    fn c_beta_examples() {
        let f = LineFunction::new(DecayClass::Inverse, |t: f64| t / (1.0 + t * t));
        assert_eq!(c_beta(1.0, &f, &cfg()).unwrap(), 0.0);
        let even = LineFunction::poisson(1.0);
        assert!(c_beta(0.5, &even, &cfg()).unwrap().abs() < 1e-10);
        // Two routes to the constant: the closed-form integral and the
        // harmonic extension of the modified transform at iβ.
        let via_formula = c_beta(0.5, &f, &cfg()).unwrap();
        let via_extension = hilbert_modified_upper(&f, (0.0, 0.5), &cfg()).unwrap();
        assert!(
            (via_formula - via_extension).abs() < 1e-6,
            "{via_formula} vs {via_extension}"
        );
        let r = modified_commutator_residual(0.5, &f, &[0.7, -1.5, 2.0], &cfg()).unwrap();
        assert!(r < 1e-4, "{r}");
    }

    #[test]
    fn periodize_examples() {
        // Π₂ 1_{[0,2)} = 1.
        let f = LineFunction::indicator(0.0, 2.0 - 1e-12);
        for &x in &[0.3, -0.8, 0.99] {
            assert!((periodize(&f, x).unwrap() - 1.0).abs() < 1e-12, "x={x}");
        }
        // Contraction with equality for nonnegative f: masses agree.
        let bump = LineFunction::new(DecayClass::InverseSquare, |t: f64| {
            1.0 / (1.0 + t * t).powi(2)
        });
        let per = periodize_fn(&bump).unwrap();
        let per_mass = quad::integrate(|t| per.eval(t), -1.0, 1.0, 1e-10).unwrap();
        let line_mass = line_integral(&bump, &cfg()).unwrap();
        assert!(
            (per_mass - line_mass).abs() < 1e-6,
            "{per_mass} vs {line_mass}"
        );
        // Bounded inputs are rejected: the sum has no certified tail.
        let bad = LineFunction::new(DecayClass::Bounded, |_| 1.0);
        assert!(periodize(&bad, 0.0).is_err());
    }

    #[test]
    fn pev_routes_agree() {
        // f = 0, g = 1_{[0,1]} - 1_{[-1,0]}: Hg(2) = (1/π) ln(4/3).
        let f = LineFunction::compact(-4.0, 4.0, |_| 0.0);
        let g = LineFunction::compact(-1.0, 1.0, |t| if t >= 0.0 { 1.0 } else { -1.0 });
        let out = valeur_au_point(&f, &g, 2.0, &cfg()).unwrap();
        let want = (4.0f64 / 3.0).ln() / PI;
        assert!((out.pointwise - want).abs() < 1e-7, "{}", out.pointwise);
        for v in out.limits {
            assert!((v - out.pointwise).abs() < 1e-4, "{v} vs {}", out.pointwise);
        }
        assert!((out.limits[0] - out.limits[1]).abs() < 1e-4);

        // g = 0: pev is the Poisson approximate identity of f.
        let fb = LineFunction::smooth_bump(-1.0, 3.0);
        let gz = LineFunction::compact(-1.0, 1.0, |_| 0.0);
        let out2 = valeur_au_point(&fb, &gz, 0.7, &cfg()).unwrap();
        assert!((out2.pointwise - fb.eval(0.7)).abs() < 1e-12);
        for v in out2.limits {
            assert!((v - fb.eval(0.7)).abs() < 1e-4, "{v}");
        }
    }

    #[test]
    fn periodization_and_periodic_hilbert_commute() {
        let phi = PeriodicFunction::new(|t: f64| (PI * t).cos() + 0.3 * (2.0 * PI * t).sin());
        let g = LineFunction::compact(-1.5, 1.5, |t: f64| {
            t * (1.0 - (t / 1.5) * (t / 1.5)).powi(2)
        });
        let r = periodization_commutes_residual(&phi, &g, &cfg()).unwrap();
        assert!(r < 1e-4, "{r}");
    }

    #[test]
    fn decay_verification() {
        assert!(LineFunction::poisson(1.0).verify_decay().is_ok());
        let lying = LineFunction::new(DecayClass::InverseSquare, |t: f64| 1.0 / (1.0 + t.abs()));
        assert!(lying.verify_decay().is_err());
    }
}
