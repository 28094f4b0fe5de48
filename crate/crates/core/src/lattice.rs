//! Lattice algorithms on Gram matrices: LLL, Fincke-Pohst enumeration, determinants.
//!
//! Everything is phrased in terms of the Gram matrix G of a basis, so the same
//! code handles the integer trace forms and the scaled real forms of `uO_F`.

use std::cmp::Ordering;
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering as AtomicOrdering};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{det_bareiss, identity_int, IntMatrix};
use crate::scalar::{rational_to_f64, Real, Scalar};

/// Symmetric positive definite Gram matrix over a scalar field `S`.
#[derive(Clone, Debug, PartialEq)]
pub struct GramMatrix<S> {
    entries: Vec<Vec<S>>,
}

impl<S: Scalar> GramMatrix<S> {
    pub fn new(entries: Vec<Vec<S>>) -> Result<Self> {
        let n = entries.len();
        for row in &entries {
            if row.len() != n {
                return Err(Error::Dimension { expected: n, got: row.len() });
            }
        }
        for i in 0..n {
            for j in 0..i {
                if entries[i][j] != entries[j][i] {
                    return Err(Error::Precondition(format!("gram matrix not symmetric at ({i},{j})")));
                }
            }
        }
        Ok(Self { entries })
    }

    pub fn identity(n: usize) -> Self {
        let entries = (0..n)
            .map(|i| (0..n).map(|j| if i == j { S::one() } else { S::zero() }).collect())
            .collect();
        Self { entries }
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[Vec<S>] {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> &S {
        &self.entries[i][j]
    }

    /// x^T G x.
    pub fn norm(&self, x: &[i64]) -> S {
        let n = self.dim();
        let mut acc = S::zero();
        for i in 0..n {
            if x[i] == 0 {
                continue;
            }
            let mut row = S::zero();
            for j in 0..n {
                if x[j] != 0 {
                    row = row + self.entries[i][j].clone() * S::from_i64(x[j]);
                }
            }
            acc = acc + row * S::from_i64(x[i]);
        }
        acc
    }

    /// Gram matrix of the basis whose rows are `u` in the current coordinates, U G U^T.
    pub fn congruence(&self, u: &IntMatrix) -> Self {
        let n = self.dim();
        let m = u.len();
        let us: Vec<Vec<S>> = u.iter().map(|r| r.iter().map(S::from_bigint).collect()).collect();
        let mut ug = vec![vec![S::zero(); n]; m];
        for i in 0..m {
            for k in 0..n {
                if us[i][k].is_zero() {
                    continue;
                }
                for j in 0..n {
                    ug[i][j] = ug[i][j].clone() + us[i][k].clone() * self.entries[k][j].clone();
                }
            }
        }
        let mut out = vec![vec![S::zero(); m]; m];
        for i in 0..m {
            for j in 0..m {
                let mut acc = S::zero();
                for k in 0..n {
                    if !us[j][k].is_zero() {
                        acc = acc + ug[i][k].clone() * us[j][k].clone();
                    }
                }
                out[i][j] = acc;
            }
        }
        Self { entries: out }
    }

    pub fn map<T, F: Fn(&S) -> T>(&self, f: F) -> GramMatrix<T> {
        GramMatrix { entries: self.entries.iter().map(|r| r.iter().map(&f).collect()).collect() }
    }

    /// Cholesky data in Fincke-Pohst form: Q(x) = sum_i q_ii (x_i + sum_{j>i} q_ij x_j)^2.
    pub fn cholesky_form(&self) -> Result<Vec<Vec<S>>> {
        let n = self.dim();
        let mut q: Vec<Vec<S>> = self.entries.clone();
        for i in 0..n {
            for j in 0..i {
                q[i][j] = S::zero();
            }
        }
        for i in 0..n {
            if !(q[i][i] > S::zero()) {
                return Err(Error::NotPositiveDefinite);
            }
            for j in i + 1..n {
                let qij = q[i][j].clone();
                q[j][i] = qij.clone();
                q[i][j] = qij / q[i][i].clone();
            }
            for k in i + 1..n {
                for l in k..n {
                    let v = q[k][l].clone() - q[k][i].clone() * q[i][l].clone();
                    q[k][l] = v;
                }
            }
        }
        for i in 0..n {
            for j in 0..i {
                q[i][j] = S::zero();
            }
        }
        Ok(q)
    }
}

impl GramMatrix<BigRational> {
    pub fn from_int(m: &IntMatrix) -> Result<Self> {
        Self::new(m.iter().map(|r| r.iter().map(|x| BigRational::from_integer(x.clone())).collect()).collect())
    }

    /// Integer entries, when the form is integral.
    pub fn to_int(&self) -> Option<IntMatrix> {
        self.entries
            .iter()
            .map(|r| r.iter().map(|x| x.is_integer().then(|| x.to_integer())).collect())
            .collect()
    }
}

pub type ExactGram = GramMatrix<BigRational>;
pub type RealGram<T> = GramMatrix<T>;

/// Gram-Schmidt coefficients mu and squared lengths B of the basis behind `g`.
fn gso<S: Scalar>(g: &[Vec<S>]) -> Result<(Vec<Vec<S>>, Vec<S>)> {
    let n = g.len();
    let mut mu = vec![vec![S::zero(); n]; n];
    let mut b = vec![S::zero(); n];
    for i in 0..n {
        for j in 0..i {
            let mut v = g[i][j].clone();
            for l in 0..j {
                v = v - mu[j][l].clone() * mu[i][l].clone() * b[l].clone();
            }
            mu[i][j] = v / b[j].clone();
        }
        let mut v = g[i][i].clone();
        for l in 0..i {
            v = v - mu[i][l].clone() * mu[i][l].clone() * b[l].clone();
        }
        if !(v > S::zero()) {
            return Err(Error::NotPositiveDefinite);
        }
        b[i] = v;
        mu[i][i] = S::one();
    }
    Ok((mu, b))
}

/// Result of LLL: `transform` rows express the reduced basis in the input basis.
#[derive(Clone, Debug)]
pub struct LllOutput<S> {
    pub transform: IntMatrix,
    pub gram: GramMatrix<S>,
}

/// LLL reduction with delta = 0.99.
pub fn lll_reduce<S: Scalar>(gram: &GramMatrix<S>) -> Result<LllOutput<S>> {
    let n = gram.dim();
    let mut g = gram.entries.clone();
    let mut u = identity_int(n);
    let delta = S::from_i64(99) / S::from_i64(100);
    let half = S::one() / S::from_i64(2);
    gso(&g)?;
    let mut k = 1;
    let mut steps = 0usize;
    while k < n {
        steps += 1;
        if steps > 100_000 {
            return Err(Error::Budget("LLL did not converge".into()));
        }
        let (mut mu, b) = gso(&g)?;
        for j in (0..k).rev() {
            if !(mu[k][j].abs_val() > half) {
                continue;
            }
            let q = mu[k][j].round_to_bigint();
            if q.is_zero() {
                continue;
            }
            let qs = S::from_bigint(&q);
            // b_k <- b_k - q b_j: rows then columns of G
            for i in 0..n {
                let v = g[k][i].clone() - qs.clone() * g[j][i].clone();
                g[k][i] = v;
            }
            for i in 0..n {
                let v = g[i][k].clone() - qs.clone() * g[i][j].clone();
                g[i][k] = v;
            }
            for i in 0..n {
                let v = &u[k][i] - &q * &u[j][i];
                u[k][i] = v;
            }
            for l in 0..=j {
                let v = mu[k][l].clone() - qs.clone() * mu[j][l].clone();
                mu[k][l] = v;
            }
        }
        let m = mu[k][k - 1].clone();
        if b[k] >= (delta.clone() - m.clone() * m) * b[k - 1].clone() {
            k += 1;
        } else {
            g.swap(k, k - 1);
            for row in g.iter_mut() {
                row.swap(k, k - 1);
            }
            u.swap(k, k - 1);
            k = (k - 1).max(1);
        }
    }
    Ok(LllOutput { transform: u, gram: GramMatrix { entries: g } })
}

/// Does `g` satisfy the size and Lovasz conditions (delta = 0.99)?
pub fn is_lll_reduced<S: Scalar>(g: &GramMatrix<S>, tol: S) -> Result<bool> {
    let (mu, b) = gso(&g.entries)?;
    let half = S::one() / S::from_i64(2);
    let delta = S::from_i64(99) / S::from_i64(100);
    for i in 1..g.dim() {
        for j in 0..i {
            if mu[i][j].abs_val() > half.clone() + tol.clone() {
                return Ok(false);
            }
        }
        let m = mu[i][i - 1].clone();
        if b[i].clone() + tol.clone() < (delta.clone() - m.clone() * m) * b[i - 1].clone() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Determinant by Gaussian elimination in `S`.
pub fn gram_det<S: Scalar>(g: &GramMatrix<S>) -> S {
    let n = g.dim();
    let mut a = g.entries.clone();
    let mut det = S::one();
    for c in 0..n {
        let Some(p) = (c..n).max_by(|&x, &y| {
            a[x][c].abs_val().partial_cmp(&a[y][c].abs_val()).unwrap_or(Ordering::Equal)
        }) else {
            return S::zero();
        };
        if a[p][c].is_zero() {
            return S::zero();
        }
        if p != c {
            a.swap(p, c);
            det = -det;
        }
        det = det * a[c][c].clone();
        for r in c + 1..n {
            let f = a[r][c].clone() / a[c][c].clone();
            if f.is_zero() {
                continue;
            }
            for k in c..n {
                let v = a[r][k].clone() - f.clone() * a[c][k].clone();
                a[r][k] = v;
            }
        }
    }
    det
}

/// Exact determinant of an integer Gram matrix.
pub fn gram_det_int(g: &IntMatrix) -> BigInt {
    det_bareiss(g)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ShortVector<S> {
    pub coords: Vec<i64>,
    pub norm: S,
}

/// Lattice vectors of norm at most `bound`, one per +- pair (first nonzero
/// coordinate positive), sorted by norm then coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct ShortVectorSet<S> {
    pub bound: S,
    pub vectors: Vec<ShortVector<S>>,
}

impl<S: Scalar> ShortVectorSet<S> {
    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    fn sort(&mut self) {
        self.vectors.sort_by(|a, b| {
            a.norm.partial_cmp(&b.norm).unwrap_or(Ordering::Equal).then_with(|| a.coords.cmp(&b.coords))
        });
    }
}

impl<S: Scalar + std::fmt::Display> ShortVectorSet<S> {
    pub fn to_csv(&self) -> String {
        let dim = self.vectors.first().map_or(0, |v| v.coords.len());
        let mut s = String::from("norm");
        for i in 1..=dim {
            s.push_str(&format!(",coord{i}"));
        }
        s.push('\n');
        for v in &self.vectors {
            s.push_str(&v.norm.to_string());
            for c in &v.coords {
                s.push_str(&format!(",{c}"));
            }
            s.push('\n');
        }
        s
    }
}

/// Shared enumeration state: a visitor budget and an abort flag.
struct Budget {
    limit: usize,
    seen: AtomicUsize,
    abort: AtomicBool,
}

impl Budget {
    fn tick(&self) -> bool {
        let c = self.seen.fetch_add(1, AtomicOrdering::Relaxed);
        if c >= self.limit {
            self.abort.store(true, AtomicOrdering::Relaxed);
        }
        !self.abort.load(AtomicOrdering::Relaxed)
    }
}

/// Core Fincke-Pohst walk. `q` is the Cholesky form of the *reversed* Gram matrix,
/// so the top level (last index) is coordinate 0 of the caller; restricting the
/// top nonzero coordinate to be positive yields one representative per +- pair.
fn walk<T: Real>(
    q: &[Vec<T>],
    bound: T,
    slack: T,
    budget: &Budget,
    leaf: &(dyn Fn(&[i64]) + Sync),
) {
    let n = q.len();
    let top = n - 1;
    let r = ((bound + slack) / q[top][top]).sqrt();
    let hi = (r + slack).floor().to_i64().unwrap_or(0);
    (0..=hi).into_par_iter().for_each(|v| {
        let t = q[top][top] * T::lit(v as f64) * T::lit(v as f64);
        let rem = bound - t;
        if rem < -slack {
            return;
        }
        let mut y = vec![0i64; n];
        y[top] = v;
        if top == 0 {
            if v != 0 && budget.tick() {
                leaf(&y);
            }
            return;
        }
        descend(q, top - 1, &mut y, rem, slack, v == 0, budget, leaf);
    });
}

#[allow(clippy::too_many_arguments)]
fn descend<T: Real>(
    q: &[Vec<T>],
    i: usize,
    y: &mut [i64],
    remaining: T,
    slack: T,
    zero_so_far: bool,
    budget: &Budget,
    leaf: &(dyn Fn(&[i64]) + Sync),
) {
    if budget.abort.load(AtomicOrdering::Relaxed) {
        return;
    }
    let n = q.len();
    let mut c = T::zero();
    for j in i + 1..n {
        if y[j] != 0 {
            c = c - q[i][j] * T::lit(y[j] as f64);
        }
    }
    let r = (remaining.max(T::zero()) / q[i][i]).sqrt();
    let mut lo = (c - r - slack).ceil().to_i64().unwrap_or(0);
    let hi = (c + r + slack).floor().to_i64().unwrap_or(0);
    if zero_so_far {
        lo = lo.max(0);
    }
    for v in lo..=hi {
        let d = T::lit(v as f64) - c;
        let rem = remaining - q[i][i] * d * d;
        if rem < -slack {
            continue;
        }
        y[i] = v;
        let z = zero_so_far && v == 0;
        if i == 0 {
            if !z && !budget.tick() {
                return;
            }
            if !z {
                leaf(y);
            }
        } else {
            descend(q, i - 1, y, rem, slack, z, budget, leaf);
        }
    }
    y[i] = 0;
}

fn reversed<S: Clone>(m: &[Vec<S>]) -> Vec<Vec<S>> {
    let n = m.len();
    (0..n).map(|i| (0..n).map(|j| m[n - 1 - i][n - 1 - j].clone()).collect()).collect()
}

fn run_walk<T: Real>(q: &[Vec<T>], bound: T, slack: T, limit: usize) -> Result<Vec<Vec<i64>>> {
    let n = q.len();
    let budget = Budget { limit, seen: AtomicUsize::new(0), abort: AtomicBool::new(false) };
    let found = std::sync::Mutex::new(Vec::new());
    if n == 0 {
        return Ok(Vec::new());
    }
    walk(q, bound, slack, &budget, &|y: &[i64]| {
        let x: Vec<i64> = y.iter().rev().copied().collect();
        found.lock().expect("no poisoned lock").push(x);
    });
    if budget.abort.load(AtomicOrdering::Relaxed) {
        return Err(Error::Budget(format!("more than {limit} candidate vectors")));
    }
    Ok(found.into_inner().expect("no poisoned lock"))
}

/// Default cap on enumerated candidates.
pub const DEFAULT_LIMIT: usize = 50_000_000;

/// All nonzero x with x^T G x <= bound, one per +- pair, with exact norms.
pub fn enumerate_short(gram: &ExactGram, bound: &BigRational) -> Result<ShortVectorSet<BigRational>> {
    enumerate_short_capped(gram, bound, DEFAULT_LIMIT)
}

pub fn enumerate_short_capped(
    gram: &ExactGram,
    bound: &BigRational,
    limit: usize,
) -> Result<ShortVectorSet<BigRational>> {
    if !bound.is_positive() {
        return Ok(ShortVectorSet { bound: bound.clone(), vectors: Vec::new() });
    }
    let rev = GramMatrix { entries: reversed(&gram.entries) };
    let q: Vec<Vec<f64>> = rev.cholesky_form()?.iter().map(|r| r.iter().map(rational_to_f64).collect()).collect();
    let b = rational_to_f64(bound);
    let slack = 1e-9 * (1.0 + b);
    let cands = run_walk(&q, b, slack, limit)?;
    let ints = gram.to_int().and_then(|m| {
        m.iter().map(|r| r.iter().map(|x| x.to_i64().map(i128::from)).collect::<Option<Vec<_>>>()).collect::<Option<Vec<_>>>()
    });
    let mut vectors: Vec<ShortVector<BigRational>> = cands
        .into_par_iter()
        .filter_map(|x| {
            let norm = match &ints {
                Some(m) => BigRational::from_integer(BigInt::from(int_form(m, &x))),
                None => gram.norm(&x),
            };
            (norm <= *bound).then_some(ShortVector { coords: x, norm })
        })
        .collect();
    vectors.retain(|v| !v.norm.is_zero());
    let mut set = ShortVectorSet { bound: bound.clone(), vectors };
    set.sort();
    Ok(set)
}

/// Integer-form enumeration with i128 norms.
pub fn enumerate_short_int(gram: &IntMatrix, bound: i64) -> Result<Vec<(Vec<i64>, i64)>> {
    let g = ExactGram::from_int(gram)?;
    let set = enumerate_short(&g, &BigRational::from_integer(BigInt::from(bound)))?;
    Ok(set
        .vectors
        .into_iter()
        .map(|v| (v.coords, v.norm.to_integer().to_i64().expect("small norm")))
        .collect())
}

pub(crate) fn int_form(m: &[Vec<i128>], x: &[i64]) -> i128 {
    let n = x.len();
    let mut acc = 0i128;
    for i in 0..n {
        if x[i] == 0 {
            continue;
        }
        let mut row = 0i128;
        for j in 0..n {
            row += m[i][j] * x[j] as i128;
        }
        acc += row * x[i] as i128;
    }
    acc
}

/// Superset enumeration for a floating Gram matrix: every vector of norm at most
/// `bound * safety` is returned, with its floating norm.
pub fn enumerate_short_real<T: Real + Scalar>(
    gram: &GramMatrix<T>,
    bound: T,
    safety: T,
) -> Result<ShortVectorSet<T>> {
    enumerate_short_real_capped(gram, bound, safety, DEFAULT_LIMIT)
}

pub fn enumerate_short_real_capped<T: Real + Scalar>(
    gram: &GramMatrix<T>,
    bound: T,
    safety: T,
    limit: usize,
) -> Result<ShortVectorSet<T>> {
    if safety < <T as num_traits::One>::one() {
        return Err(Error::Precondition("safety factor must be at least 1".into()));
    }
    let rev = GramMatrix { entries: reversed(&gram.entries) };
    let q = rev.cholesky_form()?;
    let b = bound * safety;
    let slack = <T as Real>::lit(64.0) * <T as num_traits::Float>::epsilon() * (<T as num_traits::One>::one() + b);
    let cands = run_walk(&q, b, slack, limit)?;
    let vectors: Vec<ShortVector<T>> = cands
        .into_par_iter()
        .filter_map(|x| {
            let norm = gram.norm(&x);
            (norm <= b).then_some(ShortVector { coords: x, norm })
        })
        .collect();
    let mut set = ShortVectorSet { bound: b, vectors };
    set.sort();
    Ok(set)
}

/// Unimodularity check for a square integer matrix.
pub fn is_unimodular(u: &IntMatrix) -> bool {
    let d = det_bareiss(u);
    d.is_one() || d == -BigInt::one()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::rat;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};

    fn int_gram(m: &[&[i64]]) -> ExactGram {
        ExactGram::new(m.iter().map(|r| r.iter().map(|&x| rat(x)).collect()).collect()).unwrap()
    }

    fn box_search(g: &[Vec<i64>], bound: i64, r: i64) -> Vec<(Vec<i64>, i64)> {
        let n = g.len();
        let m: Vec<Vec<i128>> = g.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
        let mut out = Vec::new();
        let mut x = vec![-r; n];
        loop {
            let first = x.iter().find(|&&c| c != 0);
            if let Some(&f) = first {
                if f > 0 {
                    let v = int_form(&m, &x);
                    if v <= bound as i128 {
                        out.push((x.clone(), v as i64));
                    }
                }
            }
            let mut i = 0;
            loop {
                if i == n {
                    out.sort_by(|a, b| a.1.cmp(&b.1).then(a.0.cmp(&b.0)));
                    return out;
                }
                x[i] += 1;
                if x[i] <= r {
                    break;
                }
                x[i] = -r;
                i += 1;
            }
        }
    }

    #[test]
    fn lll_trivial_cases() {
        let id = GramMatrix::<BigRational>::identity(4);
        let out = lll_reduce(&id).unwrap();
        assert_eq!(out.transform, identity_int(4));
        // basis (1,0),(10,1)
        let g = int_gram(&[&[1, 10], &[10, 101]]);
        let out = lll_reduce(&g).unwrap();
        assert_eq!(out.gram, GramMatrix::identity(2));
        assert!(is_unimodular(&out.transform));
    }

    #[test]
    fn lll_preserves_det_and_reduces() {
        let g = int_gram(&[&[201, 37, 12], &[37, 58, -5], &[12, -5, 31]]);
        let out = lll_reduce(&g).unwrap();
        assert_eq!(gram_det(&out.gram), gram_det(&g));
        assert!(is_lll_reduced(&out.gram, rat(0)).unwrap());
        assert_eq!(g.congruence(&out.transform), out.gram);
        let f = g.map(|x| rational_to_f64(x));
        let out_f = lll_reduce(&f).unwrap();
        assert!(is_unimodular(&out_f.transform));
        assert!((gram_det(&out_f.gram) - gram_det(&f)).abs() < 1e-6 * gram_det(&f));
    }

    #[test]
    fn not_positive_definite() {
        let g = int_gram(&[&[1, 2], &[2, 1]]);
        assert!(matches!(lll_reduce(&g), Err(Error::NotPositiveDefinite)));
        assert!(matches!(enumerate_short(&g, &rat(3)), Err(Error::NotPositiveDefinite)));
    }

    #[test]
    fn identity_unit_vectors() {
        let set = enumerate_short(&GramMatrix::identity(6), &rat(1)).unwrap();
        assert_eq!(set.len(), 6);
        for v in &set.vectors {
            assert_eq!(v.norm, rat(1));
            assert_eq!(v.coords.iter().filter(|&&c| c == 1).count(), 1);
        }
        assert_eq!(gram_det(&GramMatrix::<BigRational>::identity(6)), rat(1));
    }

    #[test]
    fn first_nonzero_coordinate_positive() {
        let g = int_gram(&[&[2, 1, 0], &[1, 2, 1], &[0, 1, 2]]);
        let set = enumerate_short(&g, &rat(6)).unwrap();
        for v in &set.vectors {
            assert!(*v.coords.iter().find(|&&c| c != 0).unwrap() > 0);
        }
        let raw: Vec<Vec<i64>> = vec![vec![2, 1, 0], vec![1, 2, 1], vec![0, 1, 2]];
        let oracle = box_search(&raw, 6, 6);
        let got: Vec<(Vec<i64>, i64)> = set.vectors.iter().map(|v| (v.coords.clone(), v.norm.to_integer().to_i64().unwrap())).collect();
        assert_eq!(got, oracle);
    }

    #[test]
    fn random_grams_match_box_search() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let mut done = 0;
        while done < 20 {
            let b: Vec<Vec<i64>> = (0..3).map(|_| (0..3).map(|_| rng.gen_range(-2..=2)).collect()).collect();
            let g: Vec<Vec<i64>> =
                (0..3).map(|i| (0..3).map(|j| (0..3).map(|k| b[i][k] * b[j][k]).sum()).collect()).collect();
            if g.iter().flatten().any(|x| x.abs() > 10) {
                continue;
            }
            let eg = ExactGram::from_int(&g.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()).unwrap();
            if gram_det(&eg).is_zero() {
                continue;
            }
            let bound = rng.gen_range(1..=12);
            let got = enumerate_short_int(&g.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect(), bound).unwrap();
            assert_eq!(got, box_search(&g, bound, 20), "gram {g:?}");
            let f = eg.map(rational_to_f64);
            let real = enumerate_short_real(&f, bound as f64, 1.01).unwrap();
            for (x, _) in &got {
                assert!(real.vectors.iter().any(|v| &v.coords == x));
            }
            done += 1;
        }
    }

    #[test]
    fn csv_layout() {
        let set = enumerate_short(&GramMatrix::identity(2), &rat(1)).unwrap();
        assert_eq!(set.to_csv(), "norm,coord1,coord2\n1,0,1\n1,1,0\n");
    }

    #[test]
    fn budget_is_enforced() {
        let r = enumerate_short_capped(&GramMatrix::identity(6), &rat(9), 10);
        assert!(matches!(r, Err(Error::Budget(_))));
    }

    fn arb_unimodular() -> impl Strategy<Value = IntMatrix> {
        proptest::collection::vec((0usize..4, 0usize..4, -2i64..=2), 0..8).prop_map(|ops| {
            let mut u = identity_int(4);
            for (i, j, c) in ops {
                if i != j {
                    for k in 0..4 {
                        let v = &u[i][k] + BigInt::from(c) * &u[j][k];
                        u[i][k] = v;
                    }
                }
            }
            u
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]
        #[test]
        fn norms_invariant_under_unimodular_change(u in arb_unimodular()) {
            let g = int_gram(&[&[4, 1, 0, 1], &[1, 3, 1, 0], &[0, 1, 5, 2], &[1, 0, 2, 6]]);
            let h = g.congruence(&u);
            let b = rat(12);
            let a: Vec<BigRational> = enumerate_short(&g, &b).unwrap().vectors.into_iter().map(|v| v.norm).collect();
            let c: Vec<BigRational> = enumerate_short(&h, &b).unwrap().vectors.into_iter().map(|v| v.norm).collect();
            prop_assert_eq!(a.clone(), c);
            let red = lll_reduce(&h).unwrap();
            let d: Vec<BigRational> = enumerate_short(&red.gram, &b).unwrap().vectors.into_iter().map(|v| v.norm).collect();
            prop_assert_eq!(a, d);
            prop_assert!(is_unimodular(&red.transform));
        }
    }
}
