//! Point dynamics of the Gauss-type maps σ_γ(x) = {γ/x}₁ on ]0,1[ and
//! τ_β(x) = {-β/x}₂ on ]-1,1], plus wandering-set membership and measure.
//!
//! For 0 < β < 1 the complement I₁ \ [-β,β] is a 2-periodic attractor; the
//! wandering prefix sets collect the points whose first N-1 iterates avoid
//! it. Their weighted measures decay geometrically in N.

use crate::error::{Error, Result};

/// Fractional part: the unique y in [0,1) with x - y an integer.
pub fn frac1(x: f64) -> f64 {
    let y = x.rem_euclid(1.0);
    if y >= 1.0 {
        y - 1.0
    } else {
        y
    }
}

/// Even-fractional part: the unique y in (-1,1] with x - y an even integer.
pub fn frac2(x: f64) -> f64 {
    let r = x.rem_euclid(2.0);
    if r > 1.0 {
        r - 2.0
    } else {
        r
    }
}

/// Which Gauss-type family a parameter belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MapFamily {
    /// σ_γ on ]0,1[ (γ = 1 is the classical Gauss map).
    SigmaGauss,
    /// τ_β on ]-1,1].
    TauGauss,
}

/// A map family together with its parameter in (0, 1].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MapParams {
    pub family: MapFamily,
    pub param: f64,
}

impl MapParams {
    pub fn new(family: MapFamily, param: f64) -> Result<MapParams> {
        if !(param > 0.0 && param <= 1.0) {
            return Err(Error::InvalidInput(format!(
                "map parameter must be in (0,1], got {param}"
            )));
        }
        Ok(MapParams { family, param })
    }

    pub fn sigma(gamma: f64) -> Result<MapParams> {
        Self::new(MapFamily::SigmaGauss, gamma)
    }

    pub fn tau(beta: f64) -> Result<MapParams> {
        Self::new(MapFamily::TauGauss, beta)
    }

    /// The full domain interval: I₁⁺ = (0,1) or I₁ = (-1,1].
    pub fn domain(&self) -> (f64, f64) {
        match self.family {
            MapFamily::SigmaGauss => (0.0, 1.0),
            MapFamily::TauGauss => (-1.0, 1.0),
        }
    }

    /// The closed core interval Ī_γ⁺ = [0,γ] or Ī_β = [-β,β] whose
    /// complement in the domain is the 2-periodic attractor.
    pub fn core_interval(&self) -> (f64, f64) {
        match self.family {
            MapFamily::SigmaGauss => (0.0, self.param),
            MapFamily::TauGauss => (-self.param, self.param),
        }
    }

    pub fn in_core(&self, x: f64) -> bool {
        let (lo, hi) = self.core_interval();
        x >= lo && x <= hi
    }

    /// One application of the map. Undefined exactly at x = 0.
    pub fn apply(&self, x: f64) -> Result<f64> {
        if x == 0.0 {
            return Err(Error::InvalidInput("map undefined at x = 0".into()));
        }
        Ok(match self.family {
            MapFamily::SigmaGauss => frac1(self.param / x),
            MapFamily::TauGauss => frac2(-self.param / x),
        })
    }

    /// [x, T(x), ..., T^n(x)]; errors out if an iterate lands exactly on 0.
    pub fn orbit(&self, x: f64, n: usize) -> Result<Vec<f64>> {
        let mut out = Vec::with_capacity(n + 1);
        out.push(x);
        let mut cur = x;
        for step in 0..n {
            if cur == 0.0 {
                return Err(Error::OrbitHitsZero { step });
            }
            cur = self.apply(cur)?;
            out.push(cur);
        }
        Ok(out)
    }
}

/// Wandering-prefix query: the set of points of the closed core interval
/// whose first N-1 iterates stay in the core.
#[derive(Debug, Clone, Copy)]
pub struct WanderingQuery {
    pub params: MapParams,
    pub depth: usize,
}

impl WanderingQuery {
    pub fn new(params: MapParams, depth: usize) -> Result<WanderingQuery> {
        if depth == 0 {
            return Err(Error::InvalidInput("wandering depth must be >= 1".into()));
        }
        Ok(WanderingQuery { params, depth })
    }
}

/// Outcome of a membership test. `HitZero` marks the measure-zero points
/// whose orbit lands exactly on 0; callers treat them as outside.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Membership {
    Inside,
    Outside,
    HitZero,
}

impl Membership {
    pub fn is_inside(self) -> bool {
        self == Membership::Inside
    }
}

/// Membership of x in the depth-N wandering prefix set. Depth 1 is the
/// whole closed core interval by convention.
pub fn in_wandering_prefix(q: &WanderingQuery, x: f64) -> Membership {
    if !q.params.in_core(x) {
        return Membership::Outside;
    }
    let mut cur = x;
    for _ in 1..q.depth {
        if cur == 0.0 {
            return Membership::HitZero;
        }
        cur = match q.params.apply(cur) {
            Ok(v) => v,
            Err(_) => return Membership::HitZero,
        };
        if !q.params.in_core(cur) {
            return Membership::Outside;
        }
    }
    Membership::Inside
}

/// Integration weight for the wandering measure.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WanderingWeight {
    /// dt/(1+t), paired with the σ-family.
    Lambda1,
    /// dt/(1-t²), paired with the τ-family; the scan interval is truncated
    /// to I_η with η = 1 - 1e-6 since κ₁ is not integrable up to ±1.
    Kappa1,
    /// Plain Lebesgue measure.
    Lebesgue,
}

impl WanderingWeight {
    fn eval(self, t: f64) -> f64 {
        match self {
            WanderingWeight::Lambda1 => 1.0 / (1.0 + t),
            WanderingWeight::Kappa1 => 1.0 / (1.0 - t * t),
            WanderingWeight::Lebesgue => 1.0,
        }
    }
}

const KAPPA_TRUNCATION: f64 = 1.0 - 1e-6;

/// Weighted measure of the depth-N wandering prefix set by a midpoint scan
/// with recursive refinement of boundary cells.
///
/// `resolution` is the number of base cells (>= 1000). Cells whose midpoint
/// membership differs from a neighbor are bisected ~40 further levels, so
/// the dominant error is the mass of components thinner than a base cell.
pub fn wandering_measure(q: &WanderingQuery, weight: WanderingWeight, resolution: usize) -> f64 {
    assert!(resolution >= 1000, "resolution must be >= 1000");
    let (mut lo, mut hi) = q.params.core_interval();
    if weight == WanderingWeight::Kappa1 {
        lo = lo.max(-KAPPA_TRUNCATION);
        hi = hi.min(KAPPA_TRUNCATION);
    }
    let q = *q;
    scan_indicator_measure(lo, hi, resolution, move |t| weight.eval(t), move |x| {
        in_wandering_prefix(&q, x).is_inside()
    })
}

/// Refined midpoint quadrature of weight·1_{inside} over [lo, hi]: uniform
/// base cells, with recursive bisection wherever neighboring cells disagree
/// on membership. The indicator is assumed piecewise constant on a finite
/// (possibly fine) partition; the residual error is the mass of components
/// thinner than a base cell.
pub fn scan_indicator_measure(
    lo: f64,
    hi: f64,
    resolution: usize,
    weight: impl Fn(f64) -> f64 + Sync,
    inside: impl Fn(f64) -> bool + Sync,
) -> f64 {
    use rayon::prelude::*;
    let n = resolution;
    let h = (hi - lo) / n as f64;
    let flags: Vec<bool> = (0..n)
        .into_par_iter()
        .map(|i| inside(lo + (i as f64 + 0.5) * h))
        .collect();
    (0..n)
        .into_par_iter()
        .map(|i| {
            let a = lo + i as f64 * h;
            let b = a + h;
            let boundary = (i > 0 && flags[i - 1] != flags[i])
                || (i + 1 < n && flags[i + 1] != flags[i])
                || i == 0
                || i + 1 == n;
            if !boundary {
                if flags[i] {
                    weight(0.5 * (a + b)) * h
                } else {
                    0.0
                }
            } else {
                refine_cell(&weight, &inside, a, b, 42)
            }
        })
        .sum()
}

fn refine_cell(
    weight: &(impl Fn(f64) -> f64 + Sync),
    inside: &(impl Fn(f64) -> bool + Sync),
    a: f64,
    b: f64,
    depth: usize,
) -> f64 {
    let m = 0.5 * (a + b);
    if depth == 0 || b - a < 1e-14 {
        return if inside(m) { weight(m) * (b - a) } else { 0.0 };
    }
    let la = inside(0.25 * (3.0 * a + b));
    let lb = inside(0.25 * (a + 3.0 * b));
    if la == lb && inside(m) == la {
        return if la { weight(m) * (b - a) } else { 0.0 };
    }
    refine_cell(weight, inside, a, m, depth - 1) + refine_cell(weight, inside, m, b, depth - 1)
}

/// Branch itinerary of the first `depth - 1` steps of the orbit, together
/// with the exit stage (the first step that leaves the closed core, if any).
///
/// On a cell whose endpoints share the same itinerary, every map step acts
/// through a single monotone branch, so the image of the cell at each stage
/// is the interval between the endpoint images; equal endpoint memberships
/// then certify the whole cell.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Itinerary {
    branches: Vec<i64>,
    /// None: stayed in the core through all steps (inside). Some(k): the
    /// k-th image left the core, on the recorded side (false = below).
    exit: Option<(usize, bool)>,
}

fn itinerary(params: &MapParams, depth: usize, x: f64) -> Option<Itinerary> {
    if !params.in_core(x) {
        // Level-0 exit; side by comparison with the core.
        let (_, hi) = params.core_interval();
        return Some(Itinerary {
            branches: Vec::new(),
            exit: Some((0, x > hi)),
        });
    }
    let mut branches = Vec::with_capacity(depth.saturating_sub(1));
    let mut cur = x;
    for k in 1..depth {
        if cur == 0.0 {
            return None;
        }
        let branch = match params.family {
            MapFamily::SigmaGauss => (params.param / cur).floor() as i64,
            MapFamily::TauGauss => {
                let w = -params.param / cur;
                ((w - frac2(w)) / 2.0).round() as i64
            }
        };
        branches.push(branch);
        cur = match params.apply(cur) {
            Ok(v) => v,
            Err(_) => return None,
        };
        if !params.in_core(cur) {
            let (_, hi) = params.core_interval();
            return Some(Itinerary {
                branches,
                exit: Some((k, cur > hi)),
            });
        }
    }
    Some(Itinerary {
        branches,
        exit: None,
    })
}

/// Certified weighted measure of the wandering prefix set: adaptive
/// subdivision with the same orbit-membership primitive, where a cell counts
/// as resolved once both endpoints share branch itinerary and membership
/// (the branches are monotone, so equal itineraries make the cell uniform).
///
/// Refinement is budgeted: the most massive ambiguous cell is split first,
/// until the total ambiguous mass falls below `target` or the work cap is
/// reached. Returns (measure, unresolved mass); the true value lies within
/// the unresolved mass of the returned measure.
pub fn wandering_measure_certified(
    q: &WanderingQuery,
    weight: WanderingWeight,
    target: f64,
) -> (f64, f64) {
    wandering_measure_certified_capped(q, weight, target, 3_000_000)
}

/// [`wandering_measure_certified`] with an explicit split budget.
pub fn wandering_measure_certified_capped(
    q: &WanderingQuery,
    weight: WanderingWeight,
    target: f64,
    cap: usize,
) -> (f64, f64) {
    use std::cmp::Ordering;
    use std::collections::BinaryHeap;

    let (mut lo, mut hi) = q.params.core_interval();
    if weight == WanderingWeight::Kappa1 {
        lo = lo.max(-KAPPA_TRUNCATION);
        hi = hi.min(KAPPA_TRUNCATION);
    }
    let w = move |t: f64| weight.eval(t);

    struct Cell {
        mass: f64,
        a: f64,
        b: f64,
        it_a: Option<Itinerary>,
        it_b: Option<Itinerary>,
    }
    impl PartialEq for Cell {
        fn eq(&self, other: &Self) -> bool {
            self.mass == other.mass
        }
    }
    impl Eq for Cell {}
    impl PartialOrd for Cell {
        fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
            Some(self.cmp(other))
        }
    }
    impl Ord for Cell {
        fn cmp(&self, other: &Self) -> Ordering {
            self.mass.partial_cmp(&other.mass).unwrap_or(Ordering::Equal)
        }
    }

    let point_itinerary = |x: f64| itinerary(&q.params, q.depth, x);

    let mut inside_mass = 0.0f64;
    let mut ambiguous_mass = 0.0f64;
    let mut heap: BinaryHeap<Cell> = BinaryHeap::new();
    let classify = |a: f64,
                        b: f64,
                        it_a: Option<Itinerary>,
                        it_b: Option<Itinerary>,
                        inside_mass: &mut f64,
                        ambiguous_mass: &mut f64,
                        heap: &mut BinaryHeap<Cell>| {
        if let (Some(ia), Some(ib)) = (&it_a, &it_b) {
            if ia == ib {
                if ia.exit.is_none() {
                    *inside_mass += cell_mass(&w, a, b);
                }
                return;
            }
        }
        let mass = cell_mass(&w, a, b);
        *ambiguous_mass += mass;
        heap.push(Cell {
            mass,
            a,
            b,
            it_a,
            it_b,
        });
    };

    let base = 512usize;
    let h = (hi - lo) / base as f64;
    let nudge = 1e-13 * h;
    let mut prev_it = point_itinerary(lo + nudge);
    for i in 0..base {
        let a = lo + i as f64 * h;
        let b = a + h;
        let it_b = point_itinerary((b - nudge).min(hi - nudge));
        classify(
            a,
            b,
            prev_it.clone(),
            it_b.clone(),
            &mut inside_mass,
            &mut ambiguous_mass,
            &mut heap,
        );
        prev_it = it_b;
    }

    let mut work = 0usize;
    while ambiguous_mass > target && work < cap {
        let Some(cell) = heap.pop() else { break };
        ambiguous_mass -= cell.mass;
        if cell.b - cell.a < 1e-15 {
            // Machine-width boundary cell; keep as irreducible uncertainty.
            ambiguous_mass += cell.mass;
            work += 1;
            if heap.iter().all(|c| c.b - c.a < 1e-15) {
                break;
            }
            continue;
        }
        let mid = 0.5 * (cell.a + cell.b);
        let it_mid = point_itinerary(mid + nudge.min(0.25 * (cell.b - cell.a)));
        work += 1;
        classify(
            cell.a,
            mid,
            cell.it_a,
            it_mid.clone(),
            &mut inside_mass,
            &mut ambiguous_mass,
            &mut heap,
        );
        classify(
            mid,
            cell.b,
            it_mid,
            cell.it_b,
            &mut inside_mass,
            &mut ambiguous_mass,
            &mut heap,
        );
    }
    // Count ambiguous cells as half in, half out; the uncertainty stays
    // bounded by the ambiguous mass.
    (inside_mass + 0.5 * ambiguous_mass, 0.5 * ambiguous_mass)
}

fn cell_mass(w: &dyn Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    // Two-point Gauss rule; the weights in play are smooth on the cell.
    let m = 0.5 * (a + b);
    let d = 0.5 * (b - a) / 3.0f64.sqrt();
    0.5 * (b - a) * (w(m - d) + w(m + d))
}

/// Geometric decay bound for the wandering measure: (2γ/(1+γ))^N log 2 for
/// the σ-family with the λ₁ weight, 4β^N/(1-β) for the τ-family with κ₁.
/// Requires param < 1 (the bound degenerates at 1).
pub fn wandering_bound(q: &WanderingQuery) -> Result<f64> {
    let p = q.params.param;
    if !(p < 1.0) {
        return Err(Error::InvalidInput(
            "wandering bound requires parameter strictly below 1".into(),
        ));
    }
    Ok(match q.params.family {
        MapFamily::SigmaGauss => {
            (2.0 * p / (1.0 + p)).powi(q.depth as i32) * std::f64::consts::LN_2
        }
        MapFamily::TauGauss => 4.0 * p.powi(q.depth as i32) / (1.0 - p),
    })
}
