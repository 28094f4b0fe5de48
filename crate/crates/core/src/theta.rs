//! The size function k0/h0 on divisors (O_F, u), certified tail bounds, and the
//! amplified quantities G, T1, T2, T3 near the trivial divisor.

use std::f64::consts::PI;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::field::OrderLattice;
use crate::lattice::{enumerate_short_int, enumerate_short_real_capped, GramMatrix};
use crate::scalar::{CompensatedSum, Real, Scalar};
use crate::units::log_norm;

/// Radius of the ball of admissible `||w||` in the amplified analysis.
pub const W_RADIUS: f64 = 0.24163;
/// Squared length below which short elements enter T3.
pub const SHORT_BOUND: i64 = 22;
/// Default cap on enumerated vectors in one theta evaluation.
pub const DEFAULT_BUDGET: usize = 5_000_000;

/// Degree-zero point (O_F, u): u = exp(-w) with w in the trace-zero plane.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ArakelovPoint<T> {
    pub u: [T; 3],
    pub w: [T; 3],
}

impl<T: Real> ArakelovPoint<T> {
    pub fn from_w(w: [T; 3]) -> Result<Self> {
        let s = w[0] + w[1] + w[2];
        if s.abs() > T::lit(1e-12).max(T::epsilon() * T::lit(64.0)) * (T::one() + w[0].abs() + w[1].abs() + w[2].abs()) {
            return Err(Error::Precondition(format!("w is not in the trace-zero plane (sum {s})")));
        }
        Ok(Self { u: [(-w[0]).exp(), (-w[1]).exp(), (-w[2]).exp()], w })
    }

    pub fn from_u(u: [T; 3]) -> Result<Self> {
        if u.iter().any(|&x| !(x > T::zero())) {
            return Err(Error::Precondition("u must be positive".into()));
        }
        let nu = u[0] * u[1] * u[2];
        if (nu - T::one()).abs() > T::lit(1e-12).max(T::epsilon() * T::lit(8.0)) {
            return Err(Error::Precondition(format!("N(u) = {nu} is not 1")));
        }
        Ok(Self { u, w: [-u[0].ln(), -u[1].ln(), -u[2].ln()] })
    }

    pub fn origin() -> Self {
        Self { u: [T::one(); 3], w: [T::zero(); 3] }
    }

    /// The point with coordinates cyclically shifted (the action of tau).
    pub fn rotated(&self) -> Self {
        Self { u: [self.u[1], self.u[2], self.u[0]], w: [self.w[1], self.w[2], self.w[0]] }
    }

    pub fn w_norm(&self) -> T {
        log_norm(&self.w)
    }
}

/// Truncated sum with a certified bound on the discarded tail.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ThetaValue<T> {
    pub partial_sum: T,
    pub tail_bound: T,
    pub radius: T,
    pub terms_used: usize,
}

impl<T: Real> ThetaValue<T> {
    pub fn upper(&self) -> T {
        self.partial_sum + self.tail_bound
    }

    /// h0 = log of the bracket midpoint, with relative uncertainty width / partial.
    pub fn h0(&self) -> (T, T) {
        let mid = self.partial_sum + self.tail_bound / T::lit(2.0);
        (mid.ln(), self.tail_bound / self.partial_sum)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SumSplit<T> {
    pub sigma1: T,
    pub sigma2: T,
    pub sigma3: T,
    pub sigma3_tail: T,
    pub s1_count: usize,
    pub s21_count: usize,
    pub s22_count: usize,
}

/// Upper incomplete gamma at s in (1/2)Z, s >= 1/2.
pub fn upper_gamma_half<T: Real>(two_s: u32, x: T) -> T {
    assert!(two_s >= 1, "order must be positive");
    let (mut s, mut g) = if two_s % 2 == 0 {
        (T::one(), (-x).exp())
    } else {
        (T::lit(0.5), T::PI().sqrt() * x.sqrt().erfc())
    };
    // Gamma(s + 1, x) = s Gamma(s, x) + x^s e^{-x}
    let target = T::lit(two_s as f64 / 2.0);
    while s < target {
        g = s * g + x.powf(s) * (-x).exp();
        s = s + T::one();
    }
    g
}

fn binom6(k: usize) -> f64 {
    [1.0, 6.0, 15.0, 20.0, 15.0, 6.0, 1.0][k]
}

/// Bound on sum_{||x||^2 > M} e^{-xi ||x||^2} over a rank-6 lattice with minimum >= a.
pub fn tail_bound<T: Real>(m: T, a: T, xi: T) -> Result<T> {
    if !(a > T::zero()) || !(xi > T::zero()) || m < a * a {
        return Err(Error::Precondition("tail bound needs M >= a^2 > 0 and xi > 0".into()));
    }
    let two_over_a = T::lit(2.0) / a;
    let mut acc = CompensatedSum::<T>::new();
    for k in 0..=6usize {
        let c = T::lit(binom6(k)) * two_over_a.powi(k as i32) * xi.powf(T::lit(-(k as f64) / 2.0));
        acc.add(c * upper_gamma_half(k as u32 + 2, xi * m));
    }
    let lead = (two_over_a * m.sqrt() - T::one()).powi(6) * (-xi * m).exp();
    acc.add(-lead);
    Ok(acc.value())
}

/// Smallest radius (to 1e-6) with tail_bound(M, sqrt6, pi) < eps.
pub fn radius_for<T: Real>(eps: T) -> Result<T> {
    if !(eps > T::zero()) {
        return Err(Error::Precondition("eps must be positive".into()));
    }
    let a = T::lit(6.0).sqrt();
    let f = |m: T| tail_bound(m, a, T::PI()).unwrap_or(T::infinity());
    let mut lo = T::lit(6.0);
    if f(lo) < eps {
        return Ok(lo);
    }
    let mut hi = T::lit(12.0);
    while f(hi) >= eps {
        hi = hi * T::lit(2.0);
        if hi > T::lit(1e4) {
            return Err(Error::Budget(format!("no radius reaches eps = {eps}")));
        }
    }
    while hi - lo > T::lit(1e-6) * hi {
        let mid = (lo + hi) / T::lit(2.0);
        if f(mid) < eps {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// The amplification majorant 4 pi^2 l2 e^{-pi l1} (1 + e^{2 pi 0.24163 sqrt(l2)} / 2).
pub fn script_g<T: Real>(l1: T, l2: T) -> T {
    let four_pi2 = T::lit(4.0) * T::PI() * T::PI();
    four_pi2 * l2 * (-T::PI() * l1).exp()
        * (T::one() + T::lit(0.5) * (T::lit(2.0) * T::PI() * T::lit(W_RADIUS) * l2.sqrt()).exp())
}

/// The same majorant with the actual `||w||` in place of 0.24163.
pub fn taylor_bound<T: Real>(l1: T, l2: T, w_norm: T) -> T {
    let four_pi2 = T::lit(4.0) * T::PI() * T::PI();
    four_pi2 * l2 * (-T::PI() * l1).exp() * (T::one() + T::lit(0.5) * (T::lit(2.0) * T::PI() * w_norm * l2.sqrt()).exp())
}

/// Honest bound on T2 from the Taylor majorant and two tail sums.
pub fn t2_bound<T: Real>() -> Result<T> {
    let a = T::lit(6.0).sqrt();
    let m = T::lit(SHORT_BOUND as f64);
    let pi = T::PI();
    let two_sevenths = T::lit(2.0 / 7.0);
    let first = tail_bound(m, a, pi - two_sevenths)?;
    let second = tail_bound(m, a, pi - T::lit(2.0) * pi * T::lit(W_RADIUS) - two_sevenths)?;
    Ok(T::lit(2.0) * pi * pi * first + pi * pi * second)
}

/// Result of the constrained maximization of sum 1/x_i^2.
#[derive(Clone, Copy, Debug)]
pub struct ConstrainedMax {
    pub value: f64,
    pub x: [f64; 3],
    /// Distance of 2 sum x_i^2 from the upper constraint 6 * 3^{1/3}.
    pub upper_slack: f64,
}

/// Maximize 1/x1^2 + 1/x2^2 + 1/x3^2 over x1 x2 x3 = 1, 6*2^{1/3} <= 2 sum x_i^2 <= 6*3^{1/3}.
///
/// log x ranges over the trace-zero plane; the objective grows along every ray
/// from the origin, so the supremum lies on the outer curve. That curve is
/// scanned by angle and the best bracket refined by golden-section search. An
/// interior grid double-checks that nothing larger sits off the boundary.
pub fn constant_5_15519_check() -> ConstrainedMax {
    let lo = 6.0 * 2f64.cbrt();
    let hi = 6.0 * 3f64.cbrt();
    let dir = |t: f64| {
        let (c, s) = (t.cos(), t.sin());
        let (r2, r6) = (2f64.sqrt(), 6f64.sqrt());
        [c / r2 + s / r6, -c / r2 + s / r6, -2.0 * s / r6]
    };
    let objective = |x: &[f64; 3]| x.iter().map(|v| 1.0 / (v * v)).sum::<f64>();
    let constraint = |x: &[f64; 3]| 2.0 * x.iter().map(|v| v * v).sum::<f64>();
    let on_curve = |t: f64| -> [f64; 3] {
        let d = dir(t);
        let at = |r: f64| d.map(|di| (r * di).exp());
        let (mut a, mut b) = (0.0, 8.0);
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if constraint(&at(m)) <= hi {
                a = m;
            } else {
                b = m;
            }
        }
        at(a)
    };
    let n = 20_000;
    let step = 2.0 * PI / n as f64;
    let mut best_t = 0.0;
    let mut best = f64::NEG_INFINITY;
    for k in 0..n {
        let t = k as f64 * step;
        let v = objective(&on_curve(t));
        if v > best {
            best = v;
            best_t = t;
        }
    }
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (best_t - step, best_t + step);
    for _ in 0..100 {
        let c = b - g * (b - a);
        let d = a + g * (b - a);
        if objective(&on_curve(c)) > objective(&on_curve(d)) {
            b = d;
        } else {
            a = c;
        }
    }
    let mut x = on_curve(0.5 * (a + b));
    let mut value = objective(&x);
    for i in 0..=200 {
        for j in 0..=200 {
            let (p, q) = (-1.5 + 3.0 * i as f64 / 200.0, -1.5 + 3.0 * j as f64 / 200.0);
            let y = [p.exp(), q.exp(), (-p - q).exp()];
            let c = constraint(&y);
            if c >= lo && c <= hi && objective(&y) > value {
                value = objective(&y);
                x = y;
            }
        }
    }
    ConstrainedMax { value, x, upper_slack: hi - constraint(&x) }
}

/// Per-field data for repeated theta evaluations.
pub struct ThetaContext<'a, T> {
    order: &'a OrderLattice,
    gram: Vec<Vec<T>>,
    /// re_parts[i][k][l] = Re(tau_i(b_k) conj(tau_i(b_l)))
    re_parts: [Vec<Vec<T>>; 3],
    emb: Vec<Vec<Complex<T>>>,
    pub budget: usize,
}

impl<'a, T: Real + Scalar> ThetaContext<'a, T> {
    pub fn new(order: &'a OrderLattice, residues: [u64; 3]) -> Result<Self> {
        if order.rank() != 6 {
            return Err(Error::Dimension { expected: 6, got: order.rank() });
        }
        let emb = order.embed_basis::<T>(&residues);
        let r = order.rank();
        let re_parts = [0, 1, 2].map(|i| {
            (0..r)
                .map(|k| (0..r).map(|l| (emb[i][k] * emb[i][l].conj()).re).collect())
                .collect::<Vec<Vec<T>>>()
        });
        let gram = order.gram_i64().iter().map(|row| row.iter().map(|&x| T::lit(x as f64)).collect()).collect();
        Ok(Self { order, gram, re_parts, emb, budget: DEFAULT_BUDGET })
    }

    pub fn order(&self) -> &OrderLattice {
        self.order
    }

    /// Gram matrix of uO_F: gram + 2 sum_i (u_i^2 - 1) Re(tau_i b_k conj tau_i b_l).
    pub fn scaled_gram(&self, point: &ArakelovPoint<T>) -> Result<GramMatrix<T>> {
        let r = self.gram.len();
        let c: Vec<T> = point.w.iter().map(|&w| T::lit(2.0) * (T::lit(-2.0) * w).exp_m1()).collect();
        let mut g = self.gram.clone();
        for k in 0..r {
            for l in k..r {
                let mut v = g[k][l];
                for i in 0..3 {
                    v = v + c[i] * self.re_parts[i][k][l];
                }
                g[k][l] = v;
                g[l][k] = v;
            }
        }
        GramMatrix::new(g)
    }

    /// |tau_i(f)|^2 for i = 1, 2, 3.
    pub fn moduli_sq(&self, f: &[i64]) -> [T; 3] {
        let z = OrderLattice::embed(&self.emb, f);
        [z[0].norm_sqr(), z[1].norm_sqr(), z[2].norm_sqr()]
    }

    fn enumerate(&self, point: &ArakelovPoint<T>, eps: T) -> Result<(T, Vec<(Vec<i64>, T)>)> {
        let m = radius_for(eps)?;
        let g = self.scaled_gram(point)?;
        let set = enumerate_short_real_capped(&g, m, T::lit(1.01), self.budget)?;
        let terms = set.vectors.into_iter().filter(|v| v.norm <= m).map(|v| (v.coords, v.norm)).collect();
        Ok((m, terms))
    }

    /// k0(O_F, u) = sum_f exp(-pi ||uf||^2), certified.
    pub fn k0(&self, point: &ArakelovPoint<T>, eps: T) -> Result<ThetaValue<T>> {
        let (m, terms) = self.enumerate(point, eps)?;
        let mut acc = CompensatedSum::<T>::new();
        for (_, norm) in terms.iter().rev() {
            acc.add(T::lit(2.0) * (-T::PI() * *norm).exp());
        }
        acc.add(T::one());
        let tail = tail_bound(m, T::lit(6.0).sqrt(), T::PI())?;
        Ok(ThetaValue { partial_sum: acc.value(), tail_bound: tail, radius: m, terms_used: 1 + 2 * terms.len() })
    }

    pub fn h0(&self, point: &ArakelovPoint<T>, eps: T) -> Result<(T, T)> {
        Ok(self.k0(point, eps)?.h0())
    }

    pub fn sum_split(&self, point: &ArakelovPoint<T>, eps: T) -> Result<SumSplit<T>> {
        let (m, terms) = self.enumerate(point, eps)?;
        let b1 = T::lit(6.0 * 2f64.cbrt());
        let b2 = T::lit(6.0 * 3f64.cbrt());
        let (mut s1, mut s2, mut s3) = (CompensatedSum::new(), CompensatedSum::new(), CompensatedSum::new());
        let (mut c1, mut c21, mut c22) = (0, 0, 0);
        for (f, norm) in terms.iter().rev() {
            let e = T::lit(2.0) * (-T::PI() * *norm).exp();
            if *norm < b1 {
                s1.add(e);
                c1 += 2;
            } else if *norm < b2 {
                s2.add(e);
                match self.order.norm_abs(f) {
                    1 => c21 += 2,
                    2 => c22 += 2,
                    _ => {}
                }
            } else {
                s3.add(e);
            }
        }
        let tail = tail_bound(m, T::lit(6.0).sqrt(), T::PI())?;
        Ok(SumSplit {
            sigma1: s1.value(),
            sigma2: s2.value(),
            sigma3: s3.value(),
            sigma3_tail: tail,
            s1_count: c1,
            s21_count: c21,
            s22_count: c22,
        })
    }

    /// G(u, f) = e^{-pi ||f||^2} G2(f, u) / ||w||^2 with G2 summing G1 over the tau-conjugates.
    pub fn g_value(&self, point: &ArakelovPoint<T>, f: &[i64]) -> Result<T> {
        let wn = point.w_norm();
        if !(wn > T::zero()) {
            return Err(Error::Precondition("G is undefined at w = 0".into()));
        }
        let len = T::lit(self.order.length_sq(f) as f64);
        Ok(g_from_moduli(&point.w, self.moduli_sq(f), len))
    }

    /// T1, T3 and the T2 bound at a point with 0 < ||w|| < 0.24163.
    pub fn amplified_sums(&self, point: &ArakelovPoint<T>, roots_count: usize, short: &[Vec<i64>]) -> Result<Amplified<T>> {
        let wn = point.w_norm();
        if !(wn > T::zero() && wn < T::lit(W_RADIUS)) {
            return Err(Error::Precondition(format!("||w|| = {wn} outside (0, {W_RADIUS})")));
        }
        let one = self.order.one().to_vec();
        let t1 = T::lit(roots_count as f64) * self.g_value(point, &one)?;
        let mut t3 = CompensatedSum::<T>::new();
        for f in short {
            t3.add(T::lit(2.0) * self.g_value(point, f)?);
        }
        Ok(Amplified { t1, t3: t3.value(), t2_bound: t2_bound()? })
    }
}

/// G from the moduli |tau_i f|^2 and ||f||^2, at w.
pub fn g_from_moduli<T: Real>(w: &[T; 3], f2: [T; 3], len: T) -> T {
    let pi = T::PI();
    let x = [-w[0], -w[1], -w[2]];
    let e: Vec<T> = x.iter().map(|&xi| (T::lit(2.0) * xi).exp_m1()).collect();
    let mut g2 = T::zero();
    for shift in 0..3 {
        let mut s = T::zero();
        for i in 0..3 {
            s = s + e[i] * f2[(i + shift) % 3];
        }
        g2 = g2 + (T::lit(-2.0) * pi * s).exp_m1();
    }
    let wn2 = T::lit(2.0) * (w[0] * w[0] + w[1] * w[1] + w[2] * w[2]);
    (-pi * len).exp() * g2 / wn2
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Amplified<T> {
    pub t1: T,
    pub t3: T,
    pub t2_bound: T,
}

impl<T: Real> Amplified<T> {
    pub fn total(&self) -> T {
        self.t1 + self.t2_bound + self.t3
    }
}

/// Elements of O_F outside mu_F with ||f||^2 < bound, one per sign.
pub fn short_elements(order: &OrderLattice, bound: i64) -> Result<Vec<Vec<i64>>> {
    let one = order.one().to_vec();
    Ok(enumerate_short_int(order.gram(), bound - 1)?
        .into_iter()
        .filter(|(f, _)| order.mul(f, &order.conj(f)) != one)
        .map(|(f, _)| f)
        .collect())
}

/// Row of the short-element census: (||f||^2, ||f^2||^2, count with both signs).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CensusRow {
    pub l1: i64,
    pub l2: i64,
    pub count: usize,
}

pub fn census(order: &OrderLattice, short: &[Vec<i64>]) -> Vec<CensusRow> {
    let mut map = std::collections::BTreeMap::<(i64, i64), usize>::new();
    for f in short {
        let l1 = order.length_sq(f);
        let l2 = order.length_sq(&order.mul(f, f));
        *map.entry((l1, l2)).or_default() += 2;
    }
    map.into_iter().map(|((l1, l2), count)| CensusRow { l1, l2, count }).collect()
}

pub fn t3_bound(rows: &[CensusRow]) -> f64 {
    rows.iter().map(|r| r.count as f64 * script_g(r.l1 as f64, r.l2 as f64)).sum()
}

/// 3 (e^{-1.9 pi r^2} - 1) / r^2, the majorant of G2(u,1)/||w||^2.
pub fn gat1_majorant(r: f64) -> f64 {
    3.0 * (-1.9 * PI * r * r).exp_m1() / (r * r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{roots_of_unity, SexticField};
    use rand::{Rng, SeedableRng};

    #[test]
    fn incomplete_gamma_values() {
        // Gamma(1/2, x) = sqrt(pi) erfc(sqrt x); Gamma(1, x) = e^{-x}; Gamma(3/2, 1) = 0.5*G(1/2,1) + e^{-1}
        assert!((upper_gamma_half::<f64>(2, 2.0) - (-2.0f64).exp()).abs() < 1e-16);
        let g12 = PI.sqrt() * libm::erfc(1.0);
        assert!((upper_gamma_half::<f64>(3, 1.0) - (0.5 * g12 + (-1.0f64).exp())).abs() < 1e-15);
        // Gamma(3, x) = 2 e^{-x}(1 + x + x^2/2)
        let x = 1.7f64;
        assert!((upper_gamma_half::<f64>(6, x) - 2.0 * (-x).exp() * (1.0 + x + x * x / 2.0)).abs() < 1e-14);
    }

    #[test]
    fn reference_tail_constants() {
        let a = 6f64.sqrt();
        let t = tail_bound(6.0 * 3f64.cbrt(), a, PI).unwrap();
        assert!(t <= 2.6049e-9 && t > 2.6e-9, "{t}");
        assert!(tail_bound(22.0, a, PI - 2.0 / 7.0).unwrap() <= 1e-23);
        assert!(tail_bound(1.0, a, PI).is_err());
    }

    #[test]
    fn tail_is_monotone() {
        let a = 6f64.sqrt();
        let mut prev = f64::INFINITY;
        for m in 6..30 {
            let t = tail_bound(m as f64, a, PI).unwrap();
            assert!(t < prev);
            prev = t;
            assert!(tail_bound(m as f64, a, 3.0).unwrap() > t);
        }
    }

    #[test]
    fn script_g_values() {
        let v: f64 = 4.0 * script_g(12.0, 24.0);
        assert!((v - 1.4e-10).abs() < 0.05e-10, "{v}");
        let s: f64 = 6.0 * (script_g(10.0, 26.0) + script_g(12.0, 52.0) + script_g(20.0, 132.0));
        assert!(s < 1.76e-7, "{s}");
        assert!(script_g(11.0, 30.0) < script_g(10.0, 30.0));
    }

    #[test]
    fn constrained_max() {
        let c = constant_5_15519_check();
        assert!(c.value <= 5.15519 && c.value > 5.15, "{}", c.value);
        assert!(c.upper_slack < 1e-6);
        // the symmetric point violates the lower constraint
        assert!(2.0 * 3.0 < 6.0 * 2f64.cbrt());
    }

    #[test]
    fn k0_at_origin_and_symmetry() {
        let f = SexticField::new(7, 7).unwrap();
        let ctx = ThetaContext::<f64>::new(&f.o_f, f.tower.embedding_residues()).unwrap();
        let v = ctx.k0(&ArakelovPoint::origin(), 1e-14).unwrap();
        assert!(v.partial_sum > 1.0 + 14.0 * (-6.0 * PI).exp());
        let (h, _) = v.h0();
        assert!(h > (1.0 + 14.0 * (-6.0 * PI).exp()).ln());
        let p = ArakelovPoint::from_w([0.1, -0.03, -0.07]).unwrap();
        let a = ctx.k0(&p, 1e-14).unwrap();
        let b = ctx.k0(&p.rotated(), 1e-14).unwrap();
        assert!((a.partial_sum - b.partial_sum).abs() < 1e-12);
        // bracket shrinks consistently
        let c = ctx.k0(&p, 1e-15).unwrap();
        assert!(c.partial_sum >= a.partial_sum - 1e-16 && c.partial_sum <= a.upper() + 1e-16);
    }

    #[test]
    fn scaled_minimum() {
        let f = SexticField::new(7, 7).unwrap();
        let ctx = ThetaContext::<f64>::new(&f.o_f, f.tower.embedding_residues()).unwrap();
        let p = ArakelovPoint::from_u([0.1f64.exp(), 0.1f64.exp(), (-0.2f64).exp()]).unwrap();
        let g = ctx.scaled_gram(&p).unwrap();
        let set = crate::lattice::enumerate_short_real(&g, 6.3, 1.01).unwrap();
        let expect = 2.0 * (0.2f64.exp() * 2.0 + (-0.4f64).exp());
        assert!((set.vectors[0].norm - expect).abs() < 1e-12);
        assert_eq!(set.vectors.iter().filter(|v| (v.norm - expect).abs() < 1e-9).count(), 7);
    }

    #[test]
    fn split_at_origin() {
        let f = SexticField::new(7, 1).unwrap();
        let ctx = ThetaContext::<f64>::new(&f.o_f, f.tower.embedding_residues()).unwrap();
        let s = ctx.sum_split(&ArakelovPoint::origin(), 1e-14).unwrap();
        assert_eq!(s.s1_count, 4);
        assert_eq!(s.s22_count, 0);
        assert!(s.sigma3 + s.sigma3_tail <= 2.6049e-9);
    }

    #[test]
    fn g_properties() {
        let f = SexticField::new(7, 7).unwrap();
        let ctx = ThetaContext::<f64>::new(&f.o_f, f.tower.embedding_residues()).unwrap();
        let p = ArakelovPoint::from_w([0.05, 0.02, -0.07]).unwrap();
        let one = f.o_f.one().to_vec();
        let g1 = ctx.g_value(&p, &one).unwrap();
        for z in roots_of_unity(&f.o_f).unwrap() {
            let z = z.to_i64().unwrap();
            assert!((ctx.g_value(&p, &z).unwrap() - g1).abs() < 1e-20);
        }
        let e = (-6.0 * PI).exp();
        let x = [-0.05f64, -0.02, 0.07];
        let g1u = (-2.0 * PI * x.iter().map(|v| (2.0 * v).exp() - 1.0).sum::<f64>()).exp() - 1.0;
        assert!((g1 - e * 3.0 * g1u / p.w_norm().powi(2)).abs() < 1e-18);
        let short = short_elements(&f.o_f, SHORT_BOUND).unwrap();
        for s in &short {
            let t = f.o_f.tau(s);
            assert!((ctx.g_value(&p, s).unwrap() - ctx.g_value(&p, &t).unwrap()).abs() < 1e-18);
        }
        assert!(ctx.g_value(&ArakelovPoint::origin(), &one).is_err());
    }

    #[test]
    fn amplified_identity_and_bounds() {
        // sum_f G(u, f) = 3 (k0(u) - k0(1)) / ||w||^2
        let f = SexticField::new(7, 7).unwrap();
        let ctx = ThetaContext::<f64>::new(&f.o_f, f.tower.embedding_residues()).unwrap();
        let p = ArakelovPoint::from_w([0.09, -0.04, -0.05]).unwrap();
        // G(u, 0) = 0, so only nonzero f contribute
        let all = enumerate_short_int(f.o_f.gram(), 60).unwrap();
        let lhs: f64 = all.iter().map(|(v, _)| 2.0 * ctx.g_value(&p, v).unwrap()).sum();
        let k_u = ctx.k0(&p, 1e-15).unwrap().partial_sum;
        let k_1 = ctx.k0(&ArakelovPoint::origin(), 1e-15).unwrap().partial_sum;
        let rhs = 3.0 * (k_u - k_1) / p.w_norm().powi(2);
        // k0(u) - k0(1) cancels to ~1e-16 absolute, amplified by 3/||w||^2
        assert!((lhs - rhs).abs() < 1e-12, "{lhs} {rhs}");

        let short = short_elements(&f.o_f, SHORT_BOUND).unwrap();
        let a = ctx.amplified_sums(&p, 14, &short).unwrap();
        assert!(a.t1 < -98.4664e-9 * 14.0);
        assert!(a.total() < 0.0);
    }

    #[test]
    fn taylor_majorant_on_samples() {
        let f = SexticField::new(7, 1).unwrap();
        let ctx = ThetaContext::<f64>::new(&f.o_f, f.tower.embedding_residues()).unwrap();
        let short = short_elements(&f.o_f, SHORT_BOUND).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let a: f64 = rng.gen_range(-1.0..1.0);
            let b: f64 = rng.gen_range(-1.0..1.0);
            let w = [a, b, -a - b];
            let r = rng.gen_range(1e-4..W_RADIUS) / log_norm(&w);
            let p = ArakelovPoint::from_w([w[0] * r, w[1] * r, w[2] * r]).unwrap();
            let s = &short[rng.gen_range(0..short.len())];
            let l1 = f.o_f.length_sq(s) as f64;
            let l2 = f.o_f.length_sq(&f.o_f.mul(s, s)) as f64;
            let g = ctx.g_value(&p, s).unwrap();
            assert!(g <= taylor_bound(l1, l2, p.w_norm()) && g <= script_g(l1, l2));
        }
    }
}
