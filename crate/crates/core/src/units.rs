//! Units of O_K, the log-unit lattice and its fundamental domain.
//!
//! Log vectors live in the plane H = {v1 + v2 + v3 = 0} of R^3, with coordinate
//! i taken at the embedding tau_i. Lengths on H use `||v||^2 = 2 sum v_i^2`,
//! the normalization under which lambda(7) = 1.44975.

use num_bigint::BigInt;
use num_rational::BigRational;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::field::{cubic_embeddings, is_supported_conductor, ElementCoords, OrderLattice};
use crate::lattice::enumerate_short_int;
use crate::scalar::Real;

/// `||v||` on H (twice the Euclidean square).
pub fn log_norm<T: Real>(v: &[T; 3]) -> T {
    (T::lit(2.0) * (v[0] * v[0] + v[1] * v[1] + v[2] * v[2])).sqrt()
}

fn sub<T: Real>(a: &[T; 3], b: &[T; 3]) -> [T; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn det2<T: Real>(a: &[T; 3], b: &[T; 3]) -> T {
    a[0] * b[1] - a[1] * b[0]
}

#[derive(Clone, Debug)]
pub struct LogUnitLattice<T> {
    pub b1: [T; 3],
    pub b2: [T; 3],
    pub units_b1: ElementCoords,
    pub units_b2: ElementCoords,
    pub lambda: T,
    pub regulator: T,
}

impl<T: Real> LogUnitLattice<T> {
    pub fn point(&self, a1: T, a2: T) -> [T; 3] {
        [
            a1 * self.b1[0] + a2 * self.b2[0],
            a1 * self.b1[1] + a2 * self.b2[1],
            a1 * self.b1[2] + a2 * self.b2[2],
        ]
    }

    /// Coordinates (a1, a2) of w in H over b1, b2.
    pub fn solve(&self, w: &[T; 3]) -> (T, T) {
        let det = det2(&self.b1, &self.b2);
        let a1 = (w[0] * self.b2[1] - w[1] * self.b2[0]) / det;
        let a2 = (self.b1[0] * w[1] - self.b1[1] * w[0]) / det;
        (a1, a2)
    }

    /// Largest of ||b1||, ||b2||, ||b2 - b1|| minus the smallest.
    pub fn hexagonality_defect(&self) -> T {
        let l = [log_norm(&self.b1), log_norm(&self.b2), log_norm(&sub(&self.b2, &self.b1))];
        let hi = l.iter().copied().fold(T::neg_infinity(), T::max);
        let lo = l.iter().copied().fold(T::infinity(), T::min);
        hi - lo
    }

    pub fn to_json(&self) -> Value {
        let v = |x: &[T; 3]| x.iter().map(|c| c.to_f64().unwrap_or(f64::NAN)).collect::<Vec<_>>();
        json!({
            "lambda": self.lambda.to_f64(),
            "regulator": self.regulator.to_f64(),
            "b1": v(&self.b1),
            "b2": v(&self.b2),
            "fundamental_units": [self.units_b1.to_strings(), self.units_b2.to_strings()],
        })
    }
}

/// A point w = a1 b1 + a2 b2 of the fundamental domain, with u = exp(-w).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TorusPoint<T> {
    pub alpha1: T,
    pub alpha2: T,
    pub w: [T; 3],
    pub u: [T; 3],
}

impl<T: Real> TorusPoint<T> {
    pub fn from_alpha(a1: T, a2: T, lattice: &LogUnitLattice<T>) -> Self {
        let w = lattice.point(a1, a2);
        Self { alpha1: a1, alpha2: a2, w, u: [(-w[0]).exp(), (-w[1]).exp(), (-w[2]).exp()] }
    }
}

/// Wrap a coordinate into (-1/2, 1/2].
pub fn wrap_half<T: Real>(a: T) -> T {
    a - (a - T::lit(0.5)).ceil()
}

pub fn reduce_to_domain<T: Real>(w: &[T; 3], lattice: &LogUnitLattice<T>) -> TorusPoint<T> {
    let (a1, a2) = lattice.solve(w);
    TorusPoint::from_alpha(wrap_half(a1), wrap_half(a2), lattice)
}

/// Lattice vector m b1 + n b2 near a point, with its distance.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BallVector<T> {
    pub m: i64,
    pub n: i64,
    pub v: [T; 3],
    pub distance: T,
}

/// Lattice vectors v with ||v - w|| < lambda, nearest first.
pub fn ball_units<T: Real>(w: &TorusPoint<T>, lattice: &LogUnitLattice<T>) -> Vec<BallVector<T>> {
    let mut out = Vec::new();
    for m in -3..=3 {
        for n in -3..=3 {
            let v = lattice.point(T::lit(m as f64), T::lit(n as f64));
            let distance = log_norm(&sub(&v, &w.w));
            if distance < lattice.lambda {
                out.push(BallVector { m, n, v, distance });
            }
        }
    }
    out.sort_by(|a, b| a.distance.partial_cmp(&b.distance).unwrap_or(std::cmp::Ordering::Equal));
    out
}

/// Is 2 a norm from O_K, i.e. does 2 split completely in K?
pub fn splits_two(p: u64) -> bool {
    if p == 9 {
        return false;
    }
    let ord = crate::arith::mult_order(2, p).unwrap_or(0);
    ord != 0 && ((p - 1) / 3) % ord == 0
}

/// All g in O_K \ {+-1} with ||g||_K^2 <= bound and |N(g)| = 1, one per sign.
pub fn find_units(order_k: &OrderLattice, length_bound: &BigRational) -> Result<Vec<ElementCoords>> {
    Ok(find_units_i64(order_k, floor_i64(length_bound))?.into_iter().map(|v| ElementCoords::from_i64(&v)).collect())
}

fn floor_i64(q: &BigRational) -> i64 {
    use num_traits::ToPrimitive;
    q.floor().to_integer().to_i64().unwrap_or(i64::MAX)
}

pub(crate) fn find_units_i64(order_k: &OrderLattice, bound: i64) -> Result<Vec<Vec<i64>>> {
    let one = order_k.one().to_vec();
    let minus_one: Vec<i64> = one.iter().map(|x| -x).collect();
    Ok(enumerate_short_int(order_k.gram(), bound)?
        .into_iter()
        .map(|(v, _)| v)
        .filter(|v| *v != one && *v != minus_one && order_k.norm_abs(v) == 1)
        .collect())
}

/// Log vector (log|tau_i(g)|)_i of an element of O_K.
pub fn log_vector<T: Real>(emb: &[Vec<T>], c: &[i64]) -> [T; 3] {
    let mut out = [T::zero(); 3];
    for (i, row) in emb.iter().enumerate().take(3) {
        let mut s = crate::scalar::CompensatedSum::<T>::new();
        for (b, &x) in row.iter().zip(c) {
            if x != 0 {
                s.add(*b * T::lit(x as f64));
            }
        }
        out[i] = s.value().abs().ln();
    }
    out
}

fn unit_inverse(order: &OrderLattice, g: &[i64]) -> Vec<i64> {
    let s1 = order.tau(g);
    let s2 = order.tau(&s1);
    let inv = order.mul(&s1, &s2);
    if order.mul(g, &inv) == order.one() {
        inv
    } else {
        inv.iter().map(|x| -x).collect()
    }
}

fn unit_power(order: &OrderLattice, g: &[i64], e: i64) -> Vec<i64> {
    let base = if e < 0 { unit_inverse(order, g) } else { g.to_vec() };
    let mut acc = order.one().to_vec();
    for _ in 0..e.unsigned_abs() {
        acc = order.mul(&acc, &base);
    }
    acc
}

/// Cap on the search bound for the unit search.
pub const UNIT_SEARCH_CAP: f64 = 1e7;

pub fn log_unit_lattice<T: Real>(order_k: &OrderLattice) -> Result<LogUnitLattice<T>> {
    if order_k.rank() != 3 {
        return Err(Error::Dimension { expected: 3, got: order_k.rank() });
    }
    let emb = cubic_embeddings::<T>(order_k);
    let std_sq = |v: &[T; 3]| v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
    let indep = T::lit(1e-6);
    let mut bound = 16.0f64;
    loop {
        if bound > UNIT_SEARCH_CAP {
            return Err(Error::UnitSearchExhausted(UNIT_SEARCH_CAP));
        }
        let units = find_units_i64(order_k, bound as i64)?;
        let mut logs: Vec<(Vec<i64>, [T; 3])> = units.into_iter().map(|u| {
            let l = log_vector(&emb, &u);
            (u, l)
        }).collect();
        logs.sort_by(|a, b| std_sq(&a.1).partial_cmp(&std_sq(&b.1)).unwrap_or(std::cmp::Ordering::Equal));
        let Some(first) = logs.first().cloned() else {
            bound *= 2.0;
            continue;
        };
        let Some(second) = logs.iter().find(|(_, l)| det2(&first.1, l).abs() > indep).cloned() else {
            bound *= 2.0;
            continue;
        };
        // every unit whose log has Euclidean length s satisfies ||g||_K^2 <= e^{4s/sqrt6} + 2e^{-2s/sqrt6}
        let s = std_sq(&second.1).sqrt().to_f64().unwrap_or(f64::INFINITY);
        let r6 = 6f64.sqrt();
        let need = (4.0 * s / r6).exp() + 2.0 * (-2.0 * s / r6).exp();
        if need > bound {
            bound = need.ceil() + 1.0;
            continue;
        }
        return Ok(gauss_reduce(order_k, first, second));
    }
}

/// Lagrange-Gauss reduction of two independent units, oriented so that
/// ||b2 - b1|| = ||b1|| in the hexagonal case.
fn gauss_reduce<T: Real>(order: &OrderLattice, a: (Vec<i64>, [T; 3]), b: (Vec<i64>, [T; 3])) -> LogUnitLattice<T> {
    let dot = |x: &[T; 3], y: &[T; 3]| x[0] * y[0] + x[1] * y[1] + x[2] * y[2];
    let (mut u, mut v) = (a, b);
    loop {
        if dot(&v.1, &v.1) < dot(&u.1, &u.1) {
            std::mem::swap(&mut u, &mut v);
        }
        let q = (dot(&u.1, &v.1) / dot(&u.1, &u.1)).round();
        if q == T::zero() {
            break;
        }
        let qi = q.to_i64().unwrap_or(0);
        let lv = [v.1[0] - q * u.1[0], v.1[1] - q * u.1[1], v.1[2] - q * u.1[2]];
        let gv = order.mul(&v.0, &unit_power(order, &u.0, -qi));
        v = (gv, lv);
        if dot(&v.1, &v.1) >= dot(&u.1, &u.1) {
            break;
        }
    }
    if dot(&u.1, &v.1) < T::zero() {
        v = (unit_inverse(order, &v.0), [-v.1[0], -v.1[1], -v.1[2]]);
    }
    let regulator = det2(&u.1, &v.1).abs();
    LogUnitLattice {
        lambda: log_norm(&u.1),
        b1: u.1,
        b2: v.1,
        units_b1: ElementCoords::from_i64(&u.0),
        units_b2: ElementCoords::from_i64(&v.0),
        regulator,
    }
}

/// O_K, its log-unit lattice, and the derived data for one conductor.
pub fn lattice_for_conductor<T: Real>(p: u64) -> Result<LogUnitLattice<T>> {
    if !is_supported_conductor(p) {
        return Err(Error::UnsupportedConductor(p));
    }
    log_unit_lattice(&crate::field::cubic_order(p)?)
}

/// Number of units (up to sign, excluding +-1) with ||g||_K^2 below `num/den`.
pub fn unit_census(p: u64, num: i64, den: i64) -> Result<usize> {
    let ok = crate::field::cubic_order(p)?;
    Ok(find_units(&ok, &BigRational::new(BigInt::from(num), BigInt::from(den)))?.len())
}
