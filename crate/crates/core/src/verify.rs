//! Named verification campaigns: each campaign binds one identity or bound
//! from the underlying theory to a concrete numerical check with explicit
//! margins, and produces a machine-readable report. The CLI exposes them
//! under `verify`.

use std::sync::Arc;
use std::time::Instant;

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fourier::{self, HyperbolaMeasure, LatticeCross};
use crate::grid::{ClosedForm, Grid, GridFunction};
use crate::hilbert::{self, DecayClass, LineFunction, PeriodicFunction};
use crate::maps::{self, MapParams, WanderingQuery, WanderingWeight};
use crate::quad::{self, PvConfig};
use crate::special;
use crate::transfer::{self, OperatorConfig, OperatorKind, SymmetryClass, TailHint};

const PI: f64 = std::f64::consts::PI;

/// One executed check inside a campaign.
#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub description: String,
    pub measured: f64,
    pub bound: f64,
    pub margin: f64,
    pub pass: bool,
}

impl CheckResult {
    /// measured must stay at or below bound.
    fn upper(description: impl Into<String>, measured: f64, bound: f64) -> CheckResult {
        CheckResult {
            description: description.into(),
            measured,
            bound,
            margin: bound - measured,
            pass: measured <= bound && measured.is_finite(),
        }
    }

    /// measured must stay at or above bound.
    fn lower(description: impl Into<String>, measured: f64, bound: f64) -> CheckResult {
        CheckResult {
            description: description.into(),
            measured,
            bound,
            margin: measured - bound,
            pass: measured >= bound && measured.is_finite(),
        }
    }
}

/// Report for one campaign run.
#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub campaign: String,
    pub checks: Vec<CheckResult>,
    pub pass: bool,
    pub wall_time_ms: u64,
}

impl Report {
    /// Serialization used for report files: wall time is zeroed so reruns
    /// with identical inputs produce byte-identical bytes.
    pub fn canonical_json(&self) -> String {
        let mut clone = self.clone();
        clone.wall_time_ms = 0;
        serde_json::to_string_pretty(&clone).expect("report serialization")
    }
}

/// Optional parameter overrides threaded into the campaigns that sweep.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    /// Scan resolution for wandering-measure campaigns.
    pub resolution: Option<usize>,
    /// Iteration depth for decay campaigns.
    pub n_max: Option<usize>,
}

type Runner = fn(&mut ChaCha8Rng, &Overrides) -> Result<Vec<CheckResult>>;

/// A registered campaign.
pub struct Campaign {
    pub id: &'static str,
    pub title: &'static str,
    runner: Runner,
}

/// Stable per-campaign seed derivation (FNV-1a over the id).
fn derive_seed(seed: u64, id: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in id.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x1000_0000_01b3);
    }
    h ^ seed
}

pub fn registry() -> &'static [Campaign] {
    &CAMPAIGNS
}

pub fn campaign_ids() -> Vec<&'static str> {
    CAMPAIGNS.iter().map(|c| c.id).collect()
}

/// Runs a single campaign; fails fast on unknown ids.
pub fn run_campaign(id: &str, seed: u64, overrides: &Overrides) -> Result<Report> {
    let campaign = CAMPAIGNS
        .iter()
        .find(|c| c.id == id)
        .ok_or_else(|| Error::UnknownCampaign {
            id: id.to_string(),
            known: campaign_ids().join(", "),
        })?;
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, id));
    let checks = match (campaign.runner)(&mut rng, overrides) {
        Ok(checks) => checks,
        Err(e) => vec![CheckResult::upper(format!("campaign aborted: {e}"), 1.0, 0.0)],
    };
    let pass = checks.iter().all(|c| c.pass);
    Ok(Report {
        campaign: id.to_string(),
        checks,
        pass,
        wall_time_ms: start.elapsed().as_millis() as u64,
    })
}

/// Runs every registered campaign. The error of an individual campaign is
/// folded into its report as a failed check, so the list always covers the
/// whole registry.
pub fn run_all(seed: u64) -> Vec<Report> {
    campaign_ids()
        .iter()
        .map(|id| run_campaign(id, seed, &Overrides::default()).expect("registered id"))
        .collect()
}

// ---------------------------------------------------------------------------
// shared helpers

fn tau_cfg(beta: f64) -> OperatorConfig {
    OperatorConfig::for_kind(&OperatorKind::sub_t(beta).expect("beta"))
}

fn sigma_cfg(gamma: f64) -> OperatorConfig {
    OperatorConfig::for_kind(&OperatorKind::sub_s(gamma).expect("gamma"))
}

fn pv_cfg() -> PvConfig {
    PvConfig::default()
}

/// Random smooth test function on an interval: a sum of up to 4 scaled
/// cosines and polynomial bumps (the replayable family used wherever a
/// campaign needs arbitrary smooth data).
fn random_smooth(rng: &mut ChaCha8Rng, a: f64, b: f64) -> Arc<dyn Fn(f64) -> f64 + Send + Sync> {
    let n = rng.gen_range(2..=4);
    let mut coef = Vec::new();
    for _ in 0..n {
        let amp: f64 = rng.gen_range(-1.0..1.0);
        let freq: f64 = rng.gen_range(0.5..3.0);
        let phase: f64 = rng.gen_range(0.0..PI);
        coef.push((amp, freq, phase));
    }
    let (a0, b0) = (a, b);
    Arc::new(move |x: f64| {
        let u = (x - a0) / (b0 - a0);
        let envelope = (u * (1.0 - u)).max(0.0).powi(2) * 16.0;
        let mut v = 0.0;
        for &(amp, freq, phase) in &coef {
            v += amp * (freq * PI * u + phase).cos();
        }
        v * envelope
    })
}

fn max_abs(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(0.0, |m, v| m.max(v.abs()))
}

// ---------------------------------------------------------------------------
// campaign runners

fn run_maps(_rng: &mut ChaCha8Rng, _o: &Overrides) -> Result<Vec<CheckResult>> {
    let mut checks = Vec::new();
    checks.push(CheckResult::upper(
        "frac1 examples (1.5, -0.25, 3.0)",
        max_abs([
            maps::frac1(1.5) - 0.5,
            maps::frac1(-0.25) - 0.75,
            maps::frac1(3.0),
        ]),
        0.0,
    ));
    checks.push(CheckResult::upper(
        "frac2 examples (2.5, -1.0, 1.0)",
        max_abs([
            maps::frac2(2.5) - 0.5,
            maps::frac2(-1.0) - 1.0,
            maps::frac2(1.0) - 1.0,
        ]),
        0.0,
    ));
    let sigma = MapParams::sigma(1.0)?;
    let phi = (5.0f64.sqrt() - 1.0) / 2.0;
    let orbit = sigma.orbit(phi, 8)?;
    checks.push(CheckResult::upper(
        "golden-ratio point is fixed under the unit sigma map",
        max_abs(orbit.iter().map(|v| v - phi)),
        1e-9,
    ));
    let tau = MapParams::tau(0.5)?;
    let orb = tau.orbit(0.8, 4)?;
    checks.push(CheckResult::upper(
        "tau(1/2) period-2 orbit through 0.8 and -0.625",
        max_abs([orb[1] + 0.625, orb[2] - 0.8, orb[3] + 0.625]),
        1e-12,
    ));
    Ok(checks)
}

fn run_attractor(_rng: &mut ChaCha8Rng, _o: &Overrides) -> Result<Vec<CheckResult>> {
    let mut worst = 0.0f64;
    for &beta in &[0.3, 0.7] {
        let tau = MapParams::tau(beta)?;
        for k in 0..50 {
            let x = beta + (1.0 - beta) * (k as f64 + 0.5) / 50.0;
            let y = tau.apply(x)?;
            worst = worst.max((tau.apply(y)? - x).abs());
            let y2 = tau.apply(-x)?;
            worst = worst.max((tau.apply(y2)? + x).abs());
        }
    }
    let mut worst_sigma = 0.0f64;
    for &gamma in &[0.3, 0.7] {
        let sig = MapParams::sigma(gamma)?;
        for k in 0..50 {
            let x = gamma + (1.0 - gamma) * (k as f64 + 0.5) / 50.0;
            let y = sig.apply(x)?;
            worst_sigma = worst_sigma.max((sig.apply(y)? - x).abs());
        }
    }
    Ok(vec![
        CheckResult::upper("tau attractor points are 2-periodic", worst, 1e-12),
        CheckResult::upper("sigma attractor points are 2-periodic", worst_sigma, 1e-12),
    ])
}

fn run_wandering_sets(_rng: &mut ChaCha8Rng, o: &Overrides) -> Result<Vec<CheckResult>> {
    let resolution = o.resolution.unwrap_or(40_000);
    let mut checks = Vec::new();
    let q2 = WanderingQuery::new(MapParams::tau(0.5)?, 2)?;
    checks.push(CheckResult::upper(
        "x=0.4 leaves the beta=1/2 core after one step",
        if maps::in_wandering_prefix(&q2, 0.4).is_inside() {
            1.0
        } else {
            0.0
        },
        0.0,
    ));
    let q1 = WanderingQuery::new(MapParams::tau(0.5)?, 1)?;
    checks.push(CheckResult::lower(
        "depth 1 contains the whole core",
        if maps::in_wandering_prefix(&q1, 0.4).is_inside() {
            1.0
        } else {
            0.0
        },
        1.0,
    ));
    let mut worst_jump = f64::NEG_INFINITY;
    let params = MapParams::tau(0.7)?;
    let mut prev = f64::INFINITY;
    for depth in 1..=6 {
        let q = WanderingQuery::new(params, depth)?;
        let m = maps::wandering_measure(&q, WanderingWeight::Kappa1, resolution);
        worst_jump = worst_jump.max(m - prev);
        prev = m;
    }
    checks.push(CheckResult::upper(
        "weighted measures are nonincreasing in depth (beta=0.7)",
        worst_jump,
        1e-6,
    ));
    Ok(checks)
}

fn run_wandering_bounds(_rng: &mut ChaCha8Rng, o: &Overrides) -> Result<Vec<CheckResult>> {
    let resolution = o.resolution.unwrap_or(30_000);
    let mut checks = Vec::new();

    // N = 1 closed forms.
    let q = WanderingQuery::new(MapParams::sigma(1.0)?, 1)?;
    let m = maps::wandering_measure(&q, WanderingWeight::Lambda1, resolution);
    checks.push(CheckResult::upper(
        "depth-1 lambda measure at gamma=1 equals log 2",
        (m - std::f64::consts::LN_2).abs(),
        1e-6,
    ));
    let qk = WanderingQuery::new(MapParams::tau(0.5)?, 1)?;
    let mk = maps::wandering_measure(&qk, WanderingWeight::Kappa1, resolution);
    checks.push(CheckResult::upper(
        "depth-1 kappa measure at beta=1/2 equals log 3",
        (mk - 3.0f64.ln()).abs(),
        1e-6,
    ));

    // Geometric bounds for both families, plus the literal route comparison:
    // the membership-orbit indicator against the Koopman-composition
    // indicator at shared sample points (their refined integrals coincide
    // whenever the indicators do).
    for &p in &[0.3, 0.5, 0.7, 0.9] {
        let mut worst_sigma = f64::NEG_INFINITY;
        let mut worst_tau = f64::NEG_INFINITY;
        let mut indicator_mismatches = 0usize;
        for depth in 1..=8 {
            let params_s = MapParams::sigma(p)?;
            let qs = WanderingQuery::new(params_s, depth)?;
            let ms = maps::wandering_measure(&qs, WanderingWeight::Lambda1, resolution);
            worst_sigma = worst_sigma.max(ms - maps::wandering_bound(&qs)?);
            let params_t = MapParams::tau(p)?;
            let qt = WanderingQuery::new(params_t, depth)?;
            let mt = maps::wandering_measure(&qt, WanderingWeight::Kappa1, resolution);
            worst_tau = worst_tau.max(mt - maps::wandering_bound(&qt)?);
            // Pointwise indicator equality on a probe grid.
            for i in 0..20_000 {
                let xs = p * (i as f64 + 0.5) / 20_000.0;
                let member = maps::in_wandering_prefix(&qs, xs).is_inside();
                let koop = transfer::koopman_power_one(&params_s, depth, xs) > 0.5;
                indicator_mismatches += (member != koop) as usize;
                let xt = -p + 2.0 * p * (i as f64 + 0.5) / 20_000.0;
                let member_t = maps::in_wandering_prefix(&qt, xt).is_inside();
                let koop_t = transfer::koopman_power_one(&params_t, depth, xt) > 0.5;
                indicator_mismatches += (member_t != koop_t) as usize;
            }
        }
        checks.push(CheckResult::upper(
            format!("sigma wandering measures within bound, gamma={p}"),
            worst_sigma,
            1e-4,
        ));
        checks.push(CheckResult::upper(
            format!("tau wandering measures within bound, beta={p}"),
            worst_tau,
            1e-4,
        ));
        checks.push(CheckResult::upper(
            format!("membership and Koopman indicators agree, param={p}"),
            indicator_mismatches as f64,
            0.0,
        ));
    }

    // The independent operator route: subtransfer iterates of the invariant
    // density paired with 1 against the certified membership measure. The
    // certified scan bounds its own unresolved mass; depth 3 at the larger
    // parameter already prices in most of the split budget.
    for &(gamma, depth_cap, target, cap) in
        &[(0.5f64, 3usize, 4e-5f64, 8_000_000usize), (0.9, 2, 1e-5, 4_000_000)]
    {
        let kind = OperatorKind::sub_s(gamma)?;
        let cfg = sigma_cfg(gamma);
        let lam = GridFunction::from_form(cfg.output_grid.clone(), ClosedForm::Lambda1);
        let mut current = lam;
        let mut worst = 0.0f64;
        let mut worst_unresolved = 0.0f64;
        for depth in 1..=depth_cap {
            current = transfer::apply(&kind, &current, &cfg)?;
            let series_route = current.integral();
            let q = WanderingQuery::new(MapParams::sigma(gamma)?, depth)?;
            let (membership, unresolved) =
                maps::wandering_measure_certified_capped(&q, WanderingWeight::Lambda1, target, cap);
            worst = worst.max((series_route - membership).abs());
            worst_unresolved = worst_unresolved.max(unresolved);
        }
        checks.push(CheckResult::upper(
            format!("series route matches certified membership, gamma={gamma}"),
            worst,
            1e-4,
        ));
        checks.push(CheckResult::upper(
            format!("certified scan resolved below margin, gamma={gamma}"),
            worst_unresolved,
            6e-5,
        ));
    }
    Ok(checks)
}

fn run_contraction(_rng: &mut ChaCha8Rng, _o: &Overrides) -> Result<Vec<CheckResult>> {
    let mut checks = Vec::new();
    // Indicator through the tau subtransfer, beta in {0.7, 1}: contraction,
    // with equality at beta = 1.
    let grid = Arc::new(Grid::with_breakpoints(-1.0, 1.0, &[-0.5, 0.0, 0.5], 96, 8)?);
    let f = GridFunction::from_form(grid, ClosedForm::Indicator { lo: -0.5, hi: 0.5 });
    let n0 = transfer::l1_norm(&f, None)?;
    for &beta in &[0.7, 1.0] {
        let kind = OperatorKind::sub_t(beta)?;
        let cfg = tau_cfg(beta);
        // The image has interior jumps for beta != 1, so the norm is taken
        // on the exact pointwise series rather than a grid resample.
        let ind = ClosedForm::Indicator { lo: -0.5, hi: 0.5 };
        let fe = move |u: f64| ind.eval(u);
        let n1 = quad::integrate(
            |x: f64| {
                transfer::apply_at(&kind, &fe, TailHint::Smooth, &[x], &cfg)
                    .map(|v| v[0].abs())
                    .unwrap_or(f64::NAN)
            },
            -1.0 + 1e-9,
            1.0 - 1e-9,
            1e-8,
        )?;
        checks.push(CheckResult::upper(
            format!("subtransfer contracts the indicator, beta={beta}"),
            n1 - n0,
            1e-7,
        ));
        if beta == 1.0 {
            checks.push(CheckResult::upper(
                "positive isometry at beta=1",
                (n1 - n0).abs(),
                1e-6,
            ));
        }
    }
    // Sigma side with a smooth positive function at gamma = 1.
    let gs = Arc::new(Grid::gauss_legendre(0.0, 1.0, 96, 8)?);
    let fs = GridFunction::from_fn(gs, |x| x * (1.0 - x) + 0.1);
    let ks = OperatorKind::sub_s(1.0)?;
    let tfs = transfer::apply(&ks, &fs, &sigma_cfg(1.0))?;
    checks.push(CheckResult::upper(
        "sigma subtransfer is isometric on positive data at gamma=1",
        (transfer::l1_norm(&tfs, None)? - transfer::l1_norm(&fs, None)?).abs(),
        1e-6,
    ));
    Ok(checks)
}

fn run_sandwich(_rng: &mut ChaCha8Rng, _o: &Overrides) -> Result<Vec<CheckResult>> {
    let mut checks = Vec::new();
    let kappa1 = |x: f64| 1.0 / (1.0 - x * x);
    let square = |x: f64| x * x;
    let cosh_bump = |x: f64| x.cosh() - 0.5;
    let funcs: [(&str, &(dyn Fn(f64) -> f64 + Sync)); 3] = [
        ("kappa1", &kappa1),
        ("x^2", &square),
        ("cosh bump", &cosh_bump),
    ];
    for &beta in &[0.3, 0.7, 1.0] {
        let cfg = tau_cfg(beta);
        for (name, f) in funcs {
            let class = if name == "cosh bump" {
                SymmetryClass::EvenIncreasingPositive
            } else {
                SymmetryClass::EvenConvexPositive
            };
            let rep = transfer::shape_checks(beta, f, class, 200, &cfg)?;
            let (lo, hi) = rep.sandwich_slack.unwrap_or((f64::NEG_INFINITY, f64::NEG_INFINITY));
            checks.push(CheckResult::lower(
                format!("sandwich lower slack, beta={beta}, f={name}"),
                lo,
                -1e-6,
            ));
            checks.push(CheckResult::lower(
                format!("sandwich upper slack, beta={beta}, f={name}"),
                hi,
                -1e-6,
            ));
        }
    }
    Ok(checks)
}

fn run_symmetry(_rng: &mut ChaCha8Rng, _o: &Overrides) -> Result<Vec<CheckResult>> {
    let mut checks = Vec::new();
    let f = |x: f64| (2.0 * x).sin() + 0.3 * x * x;
    for &beta in &[0.5, 1.0] {
        let rep = transfer::shape_checks(
            beta,
            &f,
            SymmetryClass::EvenIncreasingPositive,
            101,
            &tau_cfg(beta),
        )?;
        checks.push(CheckResult::upper(
            format!("antipodal commutation gap, beta={beta}"),
            rep.antipodal_gap,
            1e-7,
        ));
    }
    Ok(checks)
}

fn run_increasing(_rng: &mut ChaCha8Rng, _o: &Overrides) -> Result<Vec<CheckResult>> {
    let mut checks = Vec::new();
    let cube = |x: f64| x * x * x;
    let ident = |x: f64| x;
    let sinh = |x: f64| x.sinh();
    let funcs: [(&str, &(dyn Fn(f64) -> f64 + Sync)); 3] =
        [("x", &ident), ("x^3", &cube), ("sinh", &sinh)];
    for &beta in &[0.6, 1.0] {
        for (name, f) in funcs {
            let rep =
                transfer::shape_checks(beta, f, SymmetryClass::OddIncreasing, 151, &tau_cfg(beta))?;
            checks.push(CheckResult::lower(
                format!("odd increasing preserved, beta={beta}, f={name}"),
                rep.min_monotone_step.unwrap_or(f64::NEG_INFINITY),
                -1e-10,
            ));
        }
    }
    Ok(checks)
}

fn run_convexity(_rng: &mut ChaCha8Rng, _o: &Overrides) -> Result<Vec<CheckResult>> {
    let mut checks = Vec::new();
    let square = |x: f64| x * x;
    let cosh = |x: f64| x.cosh();
    let funcs: [(&str, &(dyn Fn(f64) -> f64 + Sync)); 2] = [("x^2", &square), ("cosh", &cosh)];
    for &beta in &[0.6, 1.0] {
        for (name, f) in funcs {
            let rep = transfer::shape_checks(
                beta,
                f,
                SymmetryClass::EvenConvexPositive,
                151,
                &tau_cfg(beta),
            )?;
            checks.push(CheckResult::lower(
                format!("even convex positive preserved, beta={beta}, f={name}"),
                rep.min_second_difference.unwrap_or(f64::NEG_INFINITY),
                -1e-8,
            ));
        }
    }
    Ok(checks)
}

fn run_endpoint(_rng: &mut ChaCha8Rng, _o: &Overrides) -> Result<Vec<CheckResult>> {
    let ident = |x: f64| x;
    let cube = |x: f64| x * x * x;
    let sin = |x: f64| x.sin();
    let sinh = |x: f64| x.sinh();
    let mixed = |x: f64| x * (1.0 + x * x).cos();
    let odd_funcs: [(&str, &(dyn Fn(f64) -> f64 + Sync)); 5] = [
        ("x", &ident),
        ("x^3", &cube),
        ("sin", &sin),
        ("sinh", &sinh),
        ("x cos(1+x^2)", &mixed),
    ];
    let mut checks = Vec::new();
    for &beta in &[0.25, 0.5, 1.0] {
        let cfg = tau_cfg(beta);
        let mut worst = 0.0f64;
        for (_, f) in odd_funcs {
            let v = transfer::endpoint_value(beta, f, &cfg)?;
            worst = worst.max((v - beta * f(beta)).abs());
        }
        checks.push(CheckResult::upper(
            format!("endpoint identity over 5 odd functions, beta={beta}"),
            worst,
            1e-8,
        ));
    }
    Ok(checks)
}

fn run_kappa_invariance(_rng: &mut ChaCha8Rng, _o: &Overrides) -> Result<Vec<CheckResult>> {
    let mut checks = Vec::new();
    let xs: Vec<f64> = (0..181).map(|i| -0.9 + 1.8 * i as f64 / 180.0).collect();
    for &beta in &[0.3, 0.7, 1.0] {
        let kind = OperatorKind::sub_t(beta)?;
        let cfg = tau_cfg(beta);
        let kb = ClosedForm::Kappa { alpha: beta };
        let out = transfer::apply_at(&kind, &move |u| kb.eval(u), TailHint::Smooth, &xs, &cfg)?;
        let gap = max_abs(
            xs.iter()
                .zip(&out)
                .map(|(&x, &v)| v - 1.0 / (1.0 - x * x)),
        );
        checks.push(CheckResult::upper(
            format!("kappa_beta maps to kappa_1 on the 0.9-core, beta={beta}"),
            gap,
            1e-8,
        ));
        // Domination 0 <= T kappa_1 <= beta kappa_1.
        let k1 = ClosedForm::Kappa1;
        let dom = transfer::apply_at(&kind, &move |u| k1.eval(u), TailHint::Smooth, &xs, &cfg)?;
        let viol = xs
            .iter()
            .zip(&dom)
            .map(|(&x, &v)| (v - beta / (1.0 - x * x)).max(-v))
            .fold(f64::NEG_INFINITY, f64::max);
        checks.push(CheckResult::upper(
            format!("domination of kappa_1 under the subtransfer, beta={beta}"),
            viol,
            1e-8,
        ));
    }
    Ok(checks)
}

fn run_lambda_invariance(_rng: &mut ChaCha8Rng, _o: &Overrides) -> Result<Vec<CheckResult>> {
    let kind = OperatorKind::sub_s(1.0)?;
    let cfg = sigma_cfg(1.0);
    let lam = ClosedForm::Lambda1;
    let xs: Vec<f64> = (0..121).map(|i| 0.01 + 0.98 * i as f64 / 120.0).collect();
    let out = transfer::apply_at(&kind, &move |u| lam.eval(u), TailHint::Smooth, &xs, &cfg)?;
    let gap = max_abs(xs.iter().zip(&out).map(|(&x, &v)| v - 1.0 / (1.0 + x)));
    let mass = quad::integrate(|t: f64| 1.0 / (1.0 + t), 0.0, 1.0, 1e-12)?;
    Ok(vec![
        CheckResult::upper("unit-parameter subtransfer fixes 1/(1+x)", gap, 1e-8),
        CheckResult::upper(
            "its mass is log 2",
            (mass - std::f64::consts::LN_2).abs(),
            1e-10,
        ),
    ])
}

fn run_lambda_iterates(_rng: &mut ChaCha8Rng, _o: &Overrides) -> Result<Vec<CheckResult>> {
    let mut checks = Vec::new();
    for &gamma in &[0.3, 0.5, 0.9] {
        let kind = OperatorKind::sub_s(gamma)?;
        let cfg = sigma_cfg(gamma);
        let grid = cfg.output_grid.clone();
        let mut current = GridFunction::from_form(grid.clone(), ClosedForm::Lambda1);
        let mut worst = f64::NEG_INFINITY;
        for n in 1..=6 {
            current = transfer::apply(&kind, &current, &cfg)?;
            let rate = (2.0 * gamma / (1.0 + gamma)).powi(n);
            for (&x, &v) in grid.nodes().iter().zip(current.values()) {
                worst = worst.max(v - rate / (1.0 + x));
            }
        }
        checks.push(CheckResult::upper(
            format!("lambda iterates under the geometric envelope, gamma={gamma}"),
            worst,
            1e-6,
        ));
    }
    Ok(checks)
}

fn run_kappa_iterates(_rng: &mut ChaCha8Rng, _o: &Overrides) -> Result<Vec<CheckResult>> {
    let mut checks = Vec::new();
    for &beta in &[0.3, 0.5, 0.9] {
        let kind = OperatorKind::sub_t(beta)?;
        let cfg = tau_cfg(beta);
        let mut current = GridFunction::from_form(cfg.output_grid.clone(), ClosedForm::Kappa1);
        let mut worst = f64::NEG_INFINITY;
        for n in 1..=6 {
            current = transfer::apply(&kind, &current, &cfg)?;
            let bound = 2.0 * beta.powi(n) / (1.0 - beta);
            worst = worst.max(transfer::sup_norm(&current, None) - bound);
        }
        checks.push(CheckResult::upper(
            format!("kappa iterates under the uniform bound, beta={beta}"),
            worst,
            1e-6,
        ));
    }
    // beta = 1: the fixed point persists through 5 resampled iterates.
    let cfg1 = tau_cfg(1.0);
    let kind1 = OperatorKind::sub_t(1.0)?;
    let f1 = GridFunction::from_form(cfg1.output_grid.clone(), ClosedForm::Kappa1);
    let it = transfer::iterate(&kind1, 5, &f1, &cfg1)?;
    let gap = cfg1
        .output_grid
        .nodes()
        .iter()
        .zip(it.function.values())
        .filter(|(&x, _)| x.abs() <= 0.9)
        .map(|(&x, &v)| (v - 1.0 / (1.0 - x * x)).abs())
        .fold(0.0f64, f64::max);
    checks.push(CheckResult::upper(
        "kappa_1 unchanged after 5 iterates at beta=1 (0.9-core)",
        gap,
        1e-6,
    ));
    Ok(checks)
}

fn run_transfer_tau(_rng: &mut ChaCha8Rng, _o: &Overrides) -> Result<Vec<CheckResult>> {
    let mut checks = Vec::new();
    for &beta in &[0.4, 1.0] {
        let kind = OperatorKind::transfer_tp(beta)?;
        let cfg = tau_cfg(beta);
        let g = Arc::new(Grid::with_breakpoints(-1.0, 1.0, &[-beta, 0.0, beta], 128, 8)?);
        let f = GridFunction::from_fn(g, |x| (1.0 - x * x).powi(2));
        let tf = transfer::apply(&kind, &f, &cfg)?;
        let (n0, n1) = (transfer::l1_norm(&f, None)?, transfer::l1_norm(&tf, None)?);
        checks.push(CheckResult::upper(
            format!("full tau transfer preserves positive mass, beta={beta}"),
            (n1 - n0).abs(),
            2e-6,
        ));
    }
    Ok(checks)
}

fn run_transfer_sigma(_rng: &mut ChaCha8Rng, _o: &Overrides) -> Result<Vec<CheckResult>> {
    let mut checks = Vec::new();
    for &gamma in &[0.4, 1.0] {
        let kind = OperatorKind::transfer_sp(gamma)?;
        let cfg = sigma_cfg(gamma);
        let g = Arc::new(Grid::with_breakpoints(0.0, 1.0, &[gamma.min(1.0 - 1e-9)], 128, 8)?);
        let f = GridFunction::from_fn(g, |x| (x * (1.0 - x)).powi(2));
        let tf = transfer::apply(&kind, &f, &cfg)?;
        let (n0, n1) = (transfer::l1_norm(&f, None)?, transfer::l1_norm(&tf, None)?);
        checks.push(CheckResult::upper(
            format!("full sigma transfer preserves positive mass, gamma={gamma}"),
            (n1 - n0).abs(),
            2e-6,
        ));
    }
    Ok(checks)
}

fn run_duality(rng: &mut ChaCha8Rng, _o: &Overrides) -> Result<Vec<CheckResult>> {
    let mut checks = Vec::new();
    let params_list = [
        MapParams::tau(0.3)?,
        MapParams::tau(0.7)?,
        MapParams::tau(1.0)?,
        MapParams::sigma(0.3)?,
        MapParams::sigma(0.7)?,
        MapParams::sigma(1.0)?,
    ];
    let mut worst = 0.0f64;
    for (k, params) in params_list.iter().cycle().take(20).enumerate() {
        let (a, b) = params.domain();
        let f_fn = random_smooth(rng, a, b);
        let g_fn = random_smooth(rng, a, b);
        let grid = Arc::new(Grid::gauss_legendre(a, b, 64, 8)?);
        let f = GridFunction::from_fn(grid.clone(), |x| f_fn(x));
        let g = GridFunction::from_fn(grid, |x| g_fn(x));
        let gap = transfer::duality_gap(params, &f, &g)?;
        worst = worst.max(gap);
        let _ = k;
    }
    checks.push(CheckResult::upper(
        "preadjoint pairing gap over 20 random smooth pairs",
        worst,
        1e-6,
    ));
    // The closed pairing: <S1 lambda, 1> = <lambda, G1 1> = log 2.
    let gs = Arc::new(Grid::gauss_legendre(0.0, 1.0, 64, 8)?);
    let lam = GridFunction::from_form(gs.clone(), ClosedForm::Lambda1);
    let one = GridFunction::from_fn(gs, |_| 1.0);
    checks.push(CheckResult::upper(
        "pairing of the invariant density with 1 at gamma=1",
        transfer::duality_gap(&MapParams::sigma(1.0)?, &lam, &one)?,
        1e-6,
    ));
    Ok(checks)
}

fn run_interlacing(_rng: &mut ChaCha8Rng, _o: &Overrides) -> Result<Vec<CheckResult>> {
    let mut checks = Vec::new();
    let one = |_: f64| 1.0;
    let bump = |x: f64| {
        if x.abs() < 0.95 {
            (1.0 - (x / 0.95) * (x / 0.95)).powi(2)
        } else {
            0.0
        }
    };
    let funcs: [(&str, &(dyn Fn(f64) -> f64 + Sync)); 2] = [("one", &one), ("bump", &bump)];
    for &beta in &[0.4, 0.8] {
        let cfg = tau_cfg(beta);
        for n in 1..=3usize {
            for (name, f) in funcs {
                let (r1, r2) = transfer::interlace_residual(beta, f, n, &cfg)?;
                checks.push(CheckResult::upper(
                    format!("interlacing r1, beta={beta}, N={n}, f={name}"),
                    r1,
                    1e-4,
                ));
                checks.push(CheckResult::upper(
                    format!("interlacing r2, beta={beta}, N={n}, f={name}"),
                    r2,
                    1e-4,
                ));
            }
        }
    }
    Ok(checks)
}

fn run_attractor_operators(_rng: &mut ChaCha8Rng, _o: &Overrides) -> Result<Vec<CheckResult>> {
    let beta = 0.5;
    let kind = OperatorKind::transfer_tp(beta)?;
    let cfg = tau_cfg(beta);
    let f = move |x: f64| {
        let a = x.abs();
        if a > 0.6 && a < 0.9 {
            let w = (a - 0.6) * (0.9 - a);
            w * w * x.signum()
        } else {
            0.0
        }
    };
    let g1 = transfer::apply_fn(&kind, &f, TailHint::Smooth, &cfg)?;
    let g1e = transfer::zero_extended(&g1);
    let g2 = transfer::apply_fn(&kind, &g1e, TailHint::Smooth, &cfg)?;
    let err = quad::integrate(|x| (g2.eval(x) - f(x)).abs(), -1.0 + 1e-9, 1.0 - 1e-9, 1e-8)
        .unwrap_or(f64::INFINITY);
    Ok(vec![CheckResult::upper(
        "squared tau transfer is the identity on attractor-supported data",
        err,
        1e-6,
    )])
}

fn run_decay_subcritical(_rng: &mut ChaCha8Rng, o: &Overrides) -> Result<Vec<CheckResult>> {
    let n_max = o.n_max.unwrap_or(40);
    let mut checks = Vec::new();
    for &p in &[0.4, 0.8] {
        let kind = OperatorKind::sub_s(p)?;
        let cfg = sigma_cfg(p);
        let one = GridFunction::from_fn(cfg.output_grid.clone(), |_| 1.0);
        let rows = transfer::decay_profile(&kind, &one, n_max, None, &cfg)?;
        let ratio = rows.last().unwrap().l1 / rows[0].l1;
        checks.push(CheckResult::upper(
            format!("sigma decay ratio at n={n_max}, gamma={p}"),
            ratio,
            0.05,
        ));
        let monotone_after_2 = rows
            .windows(2)
            .skip(2)
            .map(|w| w[1].l1 - w[0].l1)
            .fold(f64::NEG_INFINITY, f64::max);
        checks.push(CheckResult::upper(
            format!("sigma norms decrease after n=2, gamma={p}"),
            monotone_after_2,
            1e-9,
        ));

        let kt = OperatorKind::sub_t(p)?;
        let cft = tau_cfg(p);
        let onet = GridFunction::from_fn(cft.output_grid.clone(), |_| 1.0);
        let rowst = transfer::decay_profile(&kt, &onet, n_max, None, &cft)?;
        checks.push(CheckResult::upper(
            format!("tau decay ratio at n={n_max}, beta={p}"),
            rowst.last().unwrap().l1 / rowst[0].l1,
            0.05,
        ));
    }
    Ok(checks)
}

fn run_decay_zero_mean(_rng: &mut ChaCha8Rng, o: &Overrides) -> Result<Vec<CheckResult>> {
    let n_max = o.n_max.unwrap_or(60);
    let mut checks = Vec::new();
    // Tau side at beta = 1 with the odd split indicator.
    let kind = OperatorKind::sub_t(1.0)?;
    let cfg = tau_cfg(1.0);
    let grid = Arc::new(Grid::with_breakpoints(-1.0, 1.0, &[-0.5, 0.0, 0.5], 128, 8)?);
    let cfg = OperatorConfig {
        output_grid: grid.clone(),
        ..cfg
    };
    let f = GridFunction::from_fn(grid, |x| {
        if x > 0.0 && x <= 0.5 {
            1.0
        } else if x >= -0.5 && x < 0.0 {
            -1.0
        } else {
            0.0
        }
    });
    let mean = f.integral();
    checks.push(CheckResult::upper(
        "input is zero-mean",
        mean.abs(),
        1e-8,
    ));
    let rows = transfer::decay_profile(&kind, &f, n_max, None, &cfg)?;
    checks.push(CheckResult::upper(
        format!("zero-mean tau decay ratio at beta=1, n={n_max}"),
        rows.last().unwrap().l1 / rows[0].l1,
        0.2,
    ));
    // Sigma side at gamma = 1: the spectral gap empties zero-mean data fast.
    let ks = OperatorKind::sub_s(1.0)?;
    let cfgs = sigma_cfg(1.0);
    let lam_mass = std::f64::consts::LN_2;
    let fs = GridFunction::from_fn(cfgs.output_grid.clone(), move |x| {
        1.0 - 1.0 / (lam_mass * (1.0 + x))
    });
    let rows_s = transfer::decay_profile(&ks, &fs, 25, None, &cfgs)?;
    checks.push(CheckResult::upper(
        "zero-mean sigma decay ratio at gamma=1, n=25",
        rows_s.last().unwrap().l1 / rows_s[0].l1,
        0.05,
    ));
    Ok(checks)
}

fn run_decay_localized(_rng: &mut ChaCha8Rng, o: &Overrides) -> Result<Vec<CheckResult>> {
    let n_max = o.n_max.unwrap_or(60);
    let kind = OperatorKind::sub_t(1.0)?;
    let base = tau_cfg(1.0);
    let grid = Arc::new(Grid::with_breakpoints(-1.0, 1.0, &[-0.5, 0.0, 0.5], 128, 8)?);
    let cfg = OperatorConfig {
        output_grid: grid.clone(),
        ..base
    };
    let f = GridFunction::from_form(grid, ClosedForm::Indicator { lo: -0.5, hi: 0.5 });
    let rows = transfer::decay_profile(&kind, &f, n_max, Some((-0.5, 0.5)), &cfg)?;
    let worst_increase = rows
        .windows(2)
        .map(|w| w[1].l1 - w[0].l1)
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(vec![CheckResult::upper(
        "localized norms at beta=1 are nonincreasing (1e-3 jitter)",
        worst_increase,
        1e-3,
    )])
}

fn run_fusb_system(_rng: &mut ChaCha8Rng, _o: &Overrides) -> Result<Vec<CheckResult>> {
    let f0 = LineFunction::new(DecayClass::InverseSquare, fourier::f0_normalized);
    let samples = [0.1, 0.25, 0.4, 0.55, 0.7, 0.85];
    let (r1, r2) = fourier::periodized_vanishing_residual(&f0, 1.0, &samples)?;
    let lam = LineFunction::new(DecayClass::InverseSquare, |t: f64| {
        if t > 0.0 && t < 1.0 {
            1.0 / (1.0 + t)
        } else {
            0.0
        }
    });
    let (r1_lam, _) = fourier::periodized_vanishing_residual(&lam, 1.0, &[0.5])?;
    Ok(vec![
        CheckResult::upper("first periodized sum vanishes for the critical density", r1, 1e-5),
        CheckResult::upper("second periodized sum vanishes for the critical density", r2, 1e-5),
        CheckResult::lower(
            "the restricted invariant density alone is not a solution",
            r1_lam,
            0.3,
        ),
    ])
}

fn run_fixed_point(_rng: &mut ChaCha8Rng, _o: &Overrides) -> Result<Vec<CheckResult>> {
    let cfg = sigma_cfg(1.0);
    let lam = GridFunction::from_form(cfg.output_grid.clone(), ClosedForm::Lambda1);
    let r = transfer::fixed_point_residual_s2(1.0, &lam, &cfg)?;
    let cfg5 = sigma_cfg(0.5);
    let lam5 = GridFunction::from_form(cfg5.output_grid.clone(), ClosedForm::Lambda1);
    let r5 = transfer::fixed_point_residual_s2(0.5, &lam5, &cfg5)?;
    let zero = GridFunction::from_fn(cfg.output_grid.clone(), |_| 0.0);
    let rz = transfer::fixed_point_residual_s2(1.0, &zero, &cfg)?;
    Ok(vec![
        CheckResult::upper("squared-subtransfer fixed-point residual at gamma=1", r, 1e-6),
        CheckResult::lower("no nonzero fixed point at gamma=1/2", r5, 0.1),
        CheckResult::upper("zero input gives zero residual", rz, 1e-12),
    ])
}

fn run_extension(_rng: &mut ChaCha8Rng, _o: &Overrides) -> Result<Vec<CheckResult>> {
    let cfg = sigma_cfg(1.0);
    let lam = GridFunction::from_form(cfg.output_grid.clone(), ClosedForm::Lambda1);
    let ext = transfer::extend_from_unit_interval(1.0, &lam, 10.0, &cfg)?;
    let mut worst = 0.0f64;
    for k in 0..100 {
        let t = 1.02 + 8.9 * k as f64 / 99.0;
        worst = worst.max((ext.eval(t) + 1.0 / (t * (1.0 + t))).abs());
    }
    let mut worst_low = 0.0f64;
    for k in 0..40 {
        let t = 0.05 + 0.9 * k as f64 / 39.0;
        worst_low = worst_low.max((ext.eval(t) - fourier::f0_normalized(t)).abs());
    }
    Ok(vec![
        CheckResult::upper(
            "extension of the invariant density matches -1/(t(1+t)) on [1,10]",
            worst,
            1e-6,
        ),
        CheckResult::upper(
            "the combined extension is the critical density",
            worst_low,
            1e-8,
        ),
    ])
}

fn run_critical_lattice(_rng: &mut ChaCha8Rng, _o: &Overrides) -> Result<Vec<CheckResult>> {
    let cfg = pv_cfg();
    let mu = HyperbolaMeasure::critical(1.0);
    let cross = LatticeCross::new(2.0, 2.0, 8, 8)?;
    let scan = fourier::lattice_residual_scan(&mu, &cross, &cfg);
    let errors = scan.entries.iter().filter(|e| e.error.is_some()).count();
    let poisson = HyperbolaMeasure::poisson_halfline(1.0);
    let small = LatticeCross::new(2.0, 2.0, 3, 3)?;
    let generic = fourier::lattice_residual_scan(&poisson, &small, &cfg);
    Ok(vec![
        CheckResult::upper(
            "per-point transform failures in the critical scan",
            errors as f64,
            0.0,
        ),
        CheckResult::upper(
            "critical-measure residual over the truncated cross",
            scan.max_residual,
            1e-4,
        ),
        CheckResult::lower(
            "a generic half-line measure fails the vanishing system",
            generic.max_residual,
            1e-2,
        ),
    ])
}

fn run_spiral(_rng: &mut ChaCha8Rng, _o: &Overrides) -> Result<Vec<CheckResult>> {
    let cfg = pv_cfg();
    let mut min_mod = f64::INFINITY;
    for k in 0..100 {
        let x = 0.1 + 9.9 * k as f64 / 99.0;
        min_mod = min_mod.min(fourier::spiral_point(x)?.norm());
    }
    let (si100, ci100) = special::sici(100.0)?;
    let mut worst_route = 0.0f64;
    for &xi in &[0.5, -0.5, 1.0, -1.0, 2.5, -2.5] {
        let osc = quad::integrate_osc_halfline(xi, &cfg)?;
        let (si, ci) = special::sici(PI * xi.abs())?;
        let reference = Complex64::new(-ci, -xi.signum() * si);
        worst_route = worst_route.max((osc - reference).norm());
    }
    Ok(vec![
        CheckResult::lower("spiral modulus over [0.1, 10]", min_mod, 1e-3),
        CheckResult::upper("si decays at 100", si100.abs(), 0.011),
        CheckResult::upper("ci decays at 100", ci100.abs(), 0.011),
        CheckResult::upper(
            "half-period route matches the auxiliary-integral route",
            worst_route,
            1e-6,
        ),
    ])
}

fn run_axis_closed_form(_rng: &mut ChaCha8Rng, _o: &Overrides) -> Result<Vec<CheckResult>> {
    let cfg = pv_cfg();
    let mu = HyperbolaMeasure::critical(1.0);
    let c0 = Complex64::new(1.0, 0.0);
    let mut worst = 0.0f64;
    for k in 0..20 {
        let xi1 = 0.21 + 9.4 * k as f64 / 19.0;
        if (xi1 / 2.0 - (xi1 / 2.0).round()).abs() < 0.05 {
            continue;
        }
        let direct = fourier::hyperbola_ft(&mu, (xi1, 0.0), &cfg)?;
        let closed = fourier::cross_ft_closed_form(xi1, c0, &cfg)?;
        worst = worst.max((direct - closed).norm());
    }
    let at_even = fourier::cross_ft_closed_form(6.0, c0, &cfg)?.norm();
    let mut min_off = f64::INFINITY;
    for k in 0..40 {
        let xi1 = 0.15 + 9.7 * k as f64 / 39.0;
        if (xi1 / 2.0 - (xi1 / 2.0).round()).abs() < 0.05 {
            continue;
        }
        min_off = min_off.min(fourier::cross_ft_closed_form(xi1, c0, &cfg)?.norm());
    }
    Ok(vec![
        CheckResult::upper("direct transform matches the closed form off-lattice", worst, 1e-4),
        CheckResult::upper("closed form vanishes at even integers", at_even, 0.0),
        CheckResult::lower("closed form bounded away from zero off-lattice", min_off, 1e-3),
    ])
}

fn run_bessel_ft(_rng: &mut ChaCha8Rng, _o: &Overrides) -> Result<Vec<CheckResult>> {
    let cfg = pv_cfg();
    let mut checks = Vec::new();
    for (label, y) in [
        ("i", Complex64::new(0.0, 1.0)),
        ("2i", Complex64::new(0.0, 2.0)),
        ("1+i", Complex64::new(1.0, 1.0)),
    ] {
        let (_, _, gap) = fourier::ft_exp_inv_t_check(y, &cfg)?;
        checks.push(CheckResult::upper(
            format!("transform identity gap at y={label}"),
            gap,
            1e-5,
        ));
    }
    let eps = 1e-2;
    let entries = fourier::regularized_ft_exp_check(&[2.0, 5.0, 20.0], eps, &cfg)?;
    for e in &entries {
        checks.push(CheckResult::upper(
            format!("regularized line integral vs mollified target at x={}", e.x),
            e.gap,
            5.0 * eps,
        ));
    }
    Ok(checks)
}

fn run_hilbert_basics(_rng: &mut ChaCha8Rng, _o: &Overrides) -> Result<Vec<CheckResult>> {
    let cfg = pv_cfg();
    let p = LineFunction::poisson(1.0);
    let mut worst = 0.0f64;
    for k in 0..10 {
        let x = -4.5 + k as f64;
        let v = hilbert::hilbert(&p, x, &cfg)?;
        worst = worst.max((v - x / (PI * (1.0 + x * x))).abs());
    }
    let ind = LineFunction::indicator(-1.0, 1.0);
    let v_ind = hilbert::hilbert(&ind, 2.0, &cfg)?;
    let odd = LineFunction::compact(-1.0, 1.0, |t| t);
    let v_odd = hilbert::hilbert(&odd, 0.0, &cfg)?;
    // Anti-involution on a smooth compact bump.
    let bump = LineFunction::smooth_bump(-1.0, 1.5);
    let hb = hilbert::hilbert_as_line(&bump, &cfg)?;
    let mut worst_ai = 0.0f64;
    for &x in &[0.0, 0.4, -0.6, 1.0, 2.5] {
        worst_ai = worst_ai.max((hilbert::hilbert(&hb, x, &cfg)? + bump.eval(x)).abs());
    }
    Ok(vec![
        CheckResult::upper("Poisson kernel transform at 10 points", worst, 1e-6),
        CheckResult::upper(
            "indicator transform matches the log closed form",
            (v_ind - (3.0f64).ln() / PI).abs(),
            1e-7,
        ),
        CheckResult::upper(
            "odd input at the origin",
            (v_odd + 2.0 / PI).abs(),
            1e-7,
        ),
        CheckResult::upper("double transform is reflection", worst_ai, 1e-4),
    ])
}

fn run_modified_hilbert(_rng: &mut ChaCha8Rng, _o: &Overrides) -> Result<Vec<CheckResult>> {
    let cfg = pv_cfg();
    let one = LineFunction::new(DecayClass::Bounded, |_| 1.0);
    let mut worst_const = 0.0f64;
    for &x in &[-3.0, 0.0, 5.0] {
        worst_const = worst_const.max(hilbert::hilbert_modified(&one, x, &cfg)?.abs());
    }
    let f = LineFunction::new(DecayClass::Bounded, |t: f64| t.sin() / (1.0 + t * t));
    let at_i = hilbert::hilbert_modified_upper(&f, (0.0, 1.0), &cfg)?;
    let p = LineFunction::poisson(1.0);
    let mut diffs = Vec::new();
    for &x in &[-3.0, 0.0, 5.0] {
        diffs.push(hilbert::hilbert_modified(&p, x, &cfg)? - hilbert::hilbert(&p, x, &cfg)?);
    }
    let spread = diffs.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
        - diffs.iter().cloned().fold(f64::INFINITY, f64::min);
    let c_one = hilbert::c_of(&one, &cfg)?;
    let mut worst_sq = 0.0f64;
    for f in [
        LineFunction::poisson(1.0),
        LineFunction::new(DecayClass::InverseSquare, |t: f64| {
            (1.0 - t * t) / (1.0 + t * t).powi(2)
        }),
    ] {
        worst_sq = worst_sq.max(hilbert::double_modified_residual(
            &f,
            &[-2.0, -0.5, 0.0, 1.0, 3.0],
            &cfg,
        )?);
    }
    Ok(vec![
        CheckResult::upper("modified transform annihilates constants", worst_const, 1e-6),
        CheckResult::upper("normalization at i", at_i.abs(), 1e-6),
        CheckResult::upper("modified minus plain is constant", spread, 1e-6),
        CheckResult::upper("c(1) = 1", (c_one - 1.0).abs(), 1e-8),
        CheckResult::upper("double modified transform residual", worst_sq, 1e-4),
    ])
}

fn run_jbeta_commutator(_rng: &mut ChaCha8Rng, _o: &Overrides) -> Result<Vec<CheckResult>> {
    let cfg = pv_cfg();
    let f = LineFunction::new(DecayClass::Inverse, |t: f64| t / (1.0 + t * t));
    let mut checks = Vec::new();
    checks.push(CheckResult::upper(
        "constant vanishes identically at beta=1",
        hilbert::c_beta(1.0, &f, &cfg)?.abs(),
        0.0,
    ));
    let even = LineFunction::poisson(1.0);
    checks.push(CheckResult::upper(
        "constant vanishes for even data",
        hilbert::c_beta(0.5, &even, &cfg)?.abs(),
        1e-10,
    ));
    let via_formula = hilbert::c_beta(0.5, &f, &cfg)?;
    let via_extension = hilbert::hilbert_modified_upper(&f, (0.0, 0.5), &cfg)?;
    checks.push(CheckResult::upper(
        "closed-form constant matches the harmonic extension at i*beta",
        (via_formula - via_extension).abs(),
        1e-6,
    ));
    for &beta in &[0.5, 1.0] {
        let r = hilbert::modified_commutator_residual(beta, &f, &[0.7, -1.5, 2.0], &cfg)?;
        checks.push(CheckResult::upper(
            format!("modified commutator residual, beta={beta}"),
            r,
            1e-4,
        ));
    }
    Ok(checks)
}

fn run_jstar_commutator(_rng: &mut ChaCha8Rng, _o: &Overrides) -> Result<Vec<CheckResult>> {
    let cfg = pv_cfg();
    let phi = LineFunction::smooth_bump(1.0, 2.0);
    let r = hilbert::commutator_jstar_residual(1.0, &phi, &[0.5, -0.8, 2.0], &cfg)?;
    // Odd-symmetric support variant: φ odd with support ±[1, 2].
    let phi_odd = {
        let base = LineFunction::smooth_bump(1.0, 2.0);
        LineFunction::compact(-2.0, 2.0, move |t| {
            base.eval(t.abs()) * t.signum()
        })
    };
    let r_odd = hilbert::commutator_jstar_residual(0.7, &phi_odd, &[0.4, -1.2, 3.0], &cfg)?;
    Ok(vec![
        CheckResult::upper("commutator residual for a one-sided bump", r, 1e-4),
        CheckResult::upper("commutator residual for an odd two-sided bump", r_odd, 1e-4),
    ])
}

fn run_involution_algebra(rng: &mut ChaCha8Rng, _o: &Overrides) -> Result<Vec<CheckResult>> {
    let mut checks = Vec::new();
    // J² = id and (J*)² = id at random points.
    let f = LineFunction::poisson(1.0);
    let g = LineFunction::new(DecayClass::Bounded, |t: f64| (0.7 * t).cos());
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let mut x: f64 = rng.gen_range(-3.0..3.0);
        if x.abs() < 0.05 {
            x += 0.1;
        }
        let beta: f64 = rng.gen_range(0.2..1.0);
        let jjf = hilbert::j_density(beta, &hilbert::j_density(beta, &f));
        worst = worst.max((jjf.eval(x) - f.eval(x)).abs());
        let jjg = hilbert::j_star(beta, &hilbert::j_star(beta, &g));
        worst = worst.max((jjg.eval(x) - g.eval(x)).abs());
    }
    checks.push(CheckResult::upper("both involutions square to the identity", worst, 1e-12));
    Ok(checks)
}

fn run_involution_isometry(rng: &mut ChaCha8Rng, _o: &Overrides) -> Result<Vec<CheckResult>> {
    let mut worst = 0.0f64;
    for _ in 0..10 {
        let a: f64 = rng.gen_range(0.3..2.0);
        let w: f64 = rng.gen_range(0.2..1.0);
        let side: f64 = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        let beta: f64 = rng.gen_range(0.2..1.0);
        let (lo, hi) = if side > 0.0 { (a, a + w) } else { (-a - w, -a) };
        let scale: f64 = rng.gen_range(0.5..2.0);
        let f = LineFunction::compact(lo, hi, move |t| scale * (1.0 + (3.0 * t).sin()));
        let jf = hilbert::j_density(beta, &f);
        let n0 = quad::integrate(|t| f.eval(t).abs(), lo, hi, 1e-11)?;
        let (ja, jb) = jf.support().expect("compact image");
        let n1 = quad::integrate(|t| jf.eval(t).abs(), ja, jb, 1e-11)?;
        worst = worst.max((n1 - n0).abs());
    }
    // Pairing duality <J* phi, f> = <phi, J f>.
    let beta = 0.5;
    let f = LineFunction::indicator(0.5, 1.5);
    let jf = hilbert::j_density(beta, &f);
    let lhs = quad::integrate(|t: f64| (-beta / t).cos() * f.eval(t), 0.5, 1.5, 1e-11)?;
    let (a, b) = jf.support().expect("compact");
    let rhs = quad::integrate(|t: f64| t.cos() * jf.eval(t), a, b, 1e-11)?;
    Ok(vec![
        CheckResult::upper("density involution is an isometry on 10 random inputs", worst, 1e-8),
        CheckResult::upper("pairing duality of the two involutions", (lhs - rhs).abs(), 1e-6),
    ])
}

fn run_periodization_contraction(_rng: &mut ChaCha8Rng, _o: &Overrides) -> Result<Vec<CheckResult>> {
    let cfg = pv_cfg();
    let bump = LineFunction::new(DecayClass::InverseSquare, |t: f64| {
        1.0 / (1.0 + t * t).powi(2)
    });
    let per = hilbert::periodize_fn(&bump)?;
    let per_mass = quad::integrate(|t| per.eval(t), -1.0, 1.0, 1e-10)?;
    let line_mass = hilbert::line_integral(&bump, &cfg)?;
    // A sign-changing input contracts strictly.
    let signed = LineFunction::compact(-3.0, 3.0, |t: f64| t * (-t * t).exp());
    let per_s = hilbert::periodize_fn(&signed)?;
    let per_abs = quad::integrate(|t| per_s.eval(t).abs(), -1.0, 1.0, 1e-10)?;
    let line_abs = quad::integrate(|t| signed.eval(t).abs(), -3.0, 3.0, 1e-10)?;
    Ok(vec![
        CheckResult::upper(
            "periodization preserves mass of nonnegative data",
            (per_mass - line_mass).abs(),
            1e-6,
        ),
        CheckResult::upper(
            "periodization contracts signed data",
            per_abs - line_abs,
            1e-9,
        ),
    ])
}

fn run_periodization_fourier(_rng: &mut ChaCha8Rng, _o: &Overrides) -> Result<Vec<CheckResult>> {
    let f = LineFunction::indicator(0.3, 2.7);
    let mut checks = Vec::new();
    for &n in &[0i32, 1, 3] {
        let per = hilbert::periodize_fn(&f)?;
        let lhs = quad::integrate(
            |t| {
                let p = per.eval(t);
                Complex64::new(0.0, PI * n as f64 * t).exp() * p
            },
            -1.0,
            1.0,
            1e-10,
        )?;
        let rhs = quad::integrate(
            |t| Complex64::new(0.0, PI * n as f64 * t).exp() * f.eval(t),
            0.3,
            2.7,
            1e-10,
        )?;
        checks.push(CheckResult::upper(
            format!("Fourier coefficient identity at n={n}"),
            (lhs - rhs).norm(),
            1e-6,
        ));
    }
    Ok(checks)
}

fn run_periodization_hilbert(_rng: &mut ChaCha8Rng, _o: &Overrides) -> Result<Vec<CheckResult>> {
    let cfg = pv_cfg();
    let phi = PeriodicFunction::new(|t: f64| (PI * t).cos() + 0.3 * (2.0 * PI * t).sin());
    let g = LineFunction::compact(-1.5, 1.5, |t: f64| t * (1.0 - (t / 1.5) * (t / 1.5)).powi(2));
    let r = hilbert::periodization_commutes_residual(&phi, &g, &cfg)?;
    Ok(vec![CheckResult::upper(
        "periodization intertwines the line and circle transforms",
        r,
        1e-4,
    )])
}

fn run_periodic_hilbert(_rng: &mut ChaCha8Rng, _o: &Overrides) -> Result<Vec<CheckResult>> {
    let cfg = pv_cfg();
    let one = PeriodicFunction::new(|_| 1.0);
    let z = hilbert::hilbert_periodic(&one, 0.3, &cfg)?.abs();
    let f = PeriodicFunction::new(|t: f64| (PI * t).cos());
    let mut worst = 0.0f64;
    for &x in &[0.0, 0.25, -0.65] {
        worst = worst.max((hilbert::hilbert_periodic(&f, x, &cfg)? - (PI * x).sin()).abs());
    }
    let x = 0.3;
    let target = hilbert::hilbert_periodic(&f, x, &cfg)?;
    let a40 = hilbert::hilbert_periodic_window(&f, x, 40, &cfg)?;
    let a160 = hilbert::hilbert_periodic_window(&f, x, 160, &cfg)?;
    let extrapolated = a160 + (a160 - a40) / 3.0;
    Ok(vec![
        CheckResult::upper("periodic transform of 1 vanishes", z, 1e-8),
        CheckResult::upper("conjugate pair cos -> sin", worst, 1e-7),
        CheckResult::upper(
            "windowed line route converges to the cotangent route",
            (extrapolated - target).abs(),
            1e-4,
        ),
    ])
}

fn run_szego(_rng: &mut ChaCha8Rng, _o: &Overrides) -> Result<Vec<CheckResult>> {
    let cfg = pv_cfg();
    let f = LineFunction::poisson(1.0);
    let x = 0.8;
    let p = hilbert::szego_plus(&f, x, &cfg)?;
    let m = hilbert::szego_minus(&f, x, &cfg)?;
    Ok(vec![
        CheckResult::upper(
            "projections sum to the function",
            ((p + m).re - f.eval(x)).abs() + (p + m).im.abs(),
            1e-12,
        ),
        CheckResult::upper(
            "real data gives conjugate projections",
            (m - p.conj()).norm(),
            1e-12,
        ),
    ])
}

fn run_hardy_side(_rng: &mut ChaCha8Rng, _o: &Overrides) -> Result<Vec<CheckResult>> {
    let cfg = pv_cfg();
    // u = f + iHf built from the Poisson kernel: its transform must vanish
    // on the positive frequencies; the Hilbert side is computed numerically.
    let f = LineFunction::poisson(1.0);
    let hf = hilbert::hilbert_as_line(&f, &cfg)?;
    let mut checks = Vec::new();
    for &y in &[1.0f64, 2.0] {
        let v = quad::oscillatory_line_integral(
            &|t| Complex64::new(f.eval(t), hf.eval(t)),
            y,
            40.0,
            &cfg,
        )?;
        checks.push(CheckResult::upper(
            format!("analytic-side transform vanishes at y={y}"),
            v.norm(),
            1e-3,
        ));
    }
    Ok(checks)
}

fn run_pev(_rng: &mut ChaCha8Rng, _o: &Overrides) -> Result<Vec<CheckResult>> {
    let cfg = pv_cfg();
    let f = LineFunction::compact(-4.0, 4.0, |_| 0.0);
    let g = LineFunction::compact(-1.0, 1.0, |t| if t >= 0.0 { 1.0 } else { -1.0 });
    let out = hilbert::valeur_au_point(&f, &g, 2.0, &cfg)?;
    let oracle = (4.0f64 / 3.0).ln() / PI;
    let fb = LineFunction::smooth_bump(-1.0, 3.0);
    let gz = LineFunction::compact(-1.0, 1.0, |_| 0.0);
    let out2 = hilbert::valeur_au_point(&fb, &gz, 0.7, &cfg)?;
    Ok(vec![
        CheckResult::upper(
            "pointwise route hits the quadrature oracle",
            (out.pointwise - oracle).abs(),
            1e-6,
        ),
        CheckResult::upper(
            "limit route agrees with the pointwise route",
            (out.limits[0] - out.pointwise)
                .abs()
                .max((out.limits[1] - out.pointwise).abs()),
            1e-4,
        ),
        CheckResult::upper(
            "two cutoffs give the same limit",
            (out.limits[0] - out.limits[1]).abs(),
            1e-4,
        ),
        CheckResult::upper(
            "pure-f case reduces to the Poisson approximate identity",
            (out2.limits[0] - fb.eval(0.7)).abs(),
            1e-4,
        ),
    ])
}

fn run_weak_l1(_rng: &mut ChaCha8Rng, _o: &Overrides) -> Result<Vec<CheckResult>> {
    let cfg = pv_cfg();
    // Weak-(1,1) surrogate: lambda * |{ |Hg| > lambda }| <= C ||g||_1 with a
    // generous C = 2, measured by counting samples on a window that
    // certainly contains the level sets for the tested lambdas.
    let g = LineFunction::compact(-1.0, 1.0, |t| if t >= 0.0 { 1.0 } else { -1.0 });
    let g_mass = 2.0;
    let hg = hilbert::hilbert_as_line(&g, &cfg)?;
    let window = 24.0;
    let n = 4000;
    let h = 2.0 * window / n as f64;
    let mut checks = Vec::new();
    for &lambda in &[0.5f64, 2.0, 8.0] {
        let mut measure = 0.0;
        for i in 0..n {
            let x = -window + (i as f64 + 0.5) * h;
            if hg.eval(x).abs() > lambda {
                measure += h;
            }
        }
        checks.push(CheckResult::upper(
            format!("weak-type level bound at lambda={lambda}"),
            lambda * measure,
            2.0 * g_mass,
        ));
    }
    Ok(checks)
}

fn run_hyperbola_transform(_rng: &mut ChaCha8Rng, _o: &Overrides) -> Result<Vec<CheckResult>> {
    let cfg = pv_cfg();
    let mu = HyperbolaMeasure::poisson_halfline(1.0);
    let mass = fourier::hyperbola_ft(&mu, (0.0, 0.0), &cfg)?;
    let density = LineFunction::new(DecayClass::InverseSquare, |t: f64| {
        if t > 0.0 {
            t / (1.0 + t * t).powi(2)
        } else {
            0.0
        }
    });
    let mu2 = HyperbolaMeasure::new(density, 3.0)?;
    let (reference, s) = fourier::rescale_to_reference(&mu2);
    let mut worst = 0.0f64;
    for &(x1, x2) in &[(0.7, 0.0), (1.3, 0.4), (0.0, 2.0)] {
        let lhs = fourier::hyperbola_ft(&mu2, (x1, x2), &cfg)?;
        let rhs = fourier::hyperbola_ft(&reference, (s * x1, s * x2), &cfg)?;
        worst = worst.max((lhs - rhs).norm());
    }
    Ok(vec![
        CheckResult::upper(
            "transform at the origin is the total mass",
            (mass - Complex64::new(0.5, 0.0)).norm(),
            1e-8,
        ),
        CheckResult::upper("scaling covariance of the transform", worst, 1e-6),
    ])
}

static CAMPAIGNS: [Campaign; 44] = [
    Campaign {
        id: "sec-3.3-maps",
        title: "fractional parts and the two map families",
        runner: run_maps,
    },
    Campaign {
        id: "sec-3.11-attractor",
        title: "2-periodicity of the attractor complement",
        runner: run_attractor,
    },
    Campaign {
        id: "eq-EsetN",
        title: "wandering prefix sets: membership and nesting",
        runner: run_wandering_sets,
    },
    Campaign {
        id: "lem-5.8.1",
        title: "wandering measures: bounds and duality routes",
        runner: run_wandering_bounds,
    },
    Campaign {
        id: "prop-contract1",
        title: "subtransfer norm contraction and positive isometry",
        runner: run_contraction,
    },
    Campaign {
        id: "prop-convexitypres2",
        title: "two-sided sandwich bound for even increasing data",
        runner: run_sandwich,
    },
    Campaign {
        id: "lem-symmetry1",
        title: "commutation with the antipodal reflection",
        runner: run_symmetry,
    },
    Campaign {
        id: "prop-increaspres1",
        title: "odd increasing inputs stay odd increasing",
        runner: run_increasing,
    },
    Campaign {
        id: "prop-convexitypres1",
        title: "even convex positive inputs stay that way",
        runner: run_convexity,
    },
    Campaign {
        id: "prop-3.8.2",
        title: "endpoint identity for odd continuous inputs",
        runner: run_endpoint,
    },
    Campaign {
        id: "prop-kappa1",
        title: "kappa subinvariance and domination",
        runner: run_kappa_invariance,
    },
    Campaign {
        id: "sec-3.9-lambda1",
        title: "the finite-mass invariant density",
        runner: run_lambda_invariance,
    },
    Campaign {
        id: "prop-Wop.iter",
        title: "geometric envelope of the sigma iterates",
        runner: run_lambda_iterates,
    },
    Campaign {
        id: "prop-Uop.iter",
        title: "uniform bound on the tau iterates",
        runner: run_kappa_iterates,
    },
    Campaign {
        id: "prop-5.7.1",
        title: "the full tau transfer operator is mass-preserving",
        runner: run_transfer_tau,
    },
    Campaign {
        id: "prop-5.7.1-2.0",
        title: "the full sigma transfer operator is mass-preserving",
        runner: run_transfer_sigma,
    },
    Campaign {
        id: "eq-duality.Uop.Wop.Cop.Kop",
        title: "preadjoint duality of subtransfer and compressed Koopman",
        runner: run_duality,
    },
    Campaign {
        id: "prop-5.8.2",
        title: "interlacing of transfer iterates with set indicators",
        runner: run_interlacing,
    },
    Campaign {
        id: "prop-5.8.2.0",
        title: "squared transfer is the identity on the attractor",
        runner: run_attractor_operators,
    },
    Campaign {
        id: "prop-exactappl1",
        title: "subcritical iterates empty out in L1",
        runner: run_decay_subcritical,
    },
    Campaign {
        id: "prop-exactappl2",
        title: "critical iterates of zero-mean data empty out",
        runner: run_decay_zero_mean,
    },
    Campaign {
        id: "prop-weak.convergence1",
        title: "localized decay at the critical parameter",
        runner: run_decay_localized,
    },
    Campaign {
        id: "eq-fusb3",
        title: "periodized vanishing system of the critical density",
        runner: run_fusb_system,
    },
    Campaign {
        id: "eq-fusb7.4",
        title: "fixed point of the squared subtransfer",
        runner: run_fixed_point,
    },
    Campaign {
        id: "eq-fusb5",
        title: "extension from the unit interval",
        runner: run_extension,
    },
    Campaign {
        id: "thm-2.1",
        title: "critical lattice-cross scan",
        runner: run_critical_lattice,
    },
    Campaign {
        id: "cor-onebranch",
        title: "the sici spiral avoids the origin",
        runner: run_spiral,
    },
    Campaign {
        id: "eq-9.1.12.11",
        title: "axis transform of the critical measure in closed form",
        runner: run_axis_closed_form,
    },
    Campaign {
        id: "prop-3.5",
        title: "Fourier identity of the Bessel ratio",
        runner: run_bessel_ft,
    },
    Campaign {
        id: "eq-Hilbert02",
        title: "principal-value Hilbert transform basics",
        runner: run_hilbert_basics,
    },
    Campaign {
        id: "eq-tildeHilbert01",
        title: "modified Hilbert transform and its square",
        runner: run_modified_hilbert,
    },
    Campaign {
        id: "lem-Jbetacomm1.1",
        title: "modified-transform commutator constant",
        runner: run_jbeta_commutator,
    },
    Campaign {
        id: "prop-7.1.2",
        title: "plain-transform commutator with the point involution",
        runner: run_jstar_commutator,
    },
    Campaign {
        id: "prop-7.1.3",
        title: "both involutions square to the identity",
        runner: run_involution_algebra,
    },
    Campaign {
        id: "prop-1.001",
        title: "the density involution is an L1 isometry",
        runner: run_involution_isometry,
    },
    Campaign {
        id: "prop-1.002",
        title: "periodization acts contractively on L1",
        runner: run_periodization_contraction,
    },
    Campaign {
        id: "eq-Pi2id1.1",
        title: "Fourier coefficients pass through periodization",
        runner: run_periodization_fourier,
    },
    Campaign {
        id: "prop-7.2.2",
        title: "periodization intertwines the two Hilbert transforms",
        runner: run_periodization_hilbert,
    },
    Campaign {
        id: "eq-Hilbert04",
        title: "2-periodic Hilbert transform with the cotangent kernel",
        runner: run_periodic_hilbert,
    },
    Campaign {
        id: "eq-projform1",
        title: "Szego projection algebra",
        runner: run_szego,
    },
    Campaign {
        id: "eq-intcharH1",
        title: "one-sided Fourier support of the analytic projection",
        runner: run_hardy_side,
    },
    Campaign {
        id: "eq-pv1001",
        title: "valeur-au-point routes and cutoff independence",
        runner: run_pev,
    },
    Campaign {
        id: "prop-weakL1cont",
        title: "weak-type level bound for the transform of L1 data",
        runner: run_weak_l1,
    },
    Campaign {
        id: "eq-1.3",
        title: "hyperbola transform: mass and scaling covariance",
        runner: run_hyperbola_transform,
    },
];
