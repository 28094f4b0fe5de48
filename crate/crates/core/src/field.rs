//! The tower Q < k, K < F for a cyclic cubic K of conductor p and k = Q(sqrt(-d)).
//!
//! Orders are described by a basis of [`CycElement`]s in a common cyclotomic
//! ambient together with the exact trace form `Tr(x * conj(y))`, a
//! multiplication table and the Galois actions. All integrality decisions are
//! made in exact arithmetic.

use std::collections::HashSet;

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::{json, Value};

use crate::arith::{euler_phi, gcd, is_prime, is_squarefree, kronecker, lcm, pow_mod, ramanujan_sum, units_mod};
use crate::cyclotomic::{check_subgroup, CycElement, GaloisUnit};
use crate::error::{Error, Result};
use crate::lattice::{enumerate_short_int, lll_reduce, ExactGram, GramMatrix};
use crate::linalg::{
    char_poly_rat, det_bareiss, det_i128, det_rat, inverse_rat, is_integral, mat_mul_rat, rat, transpose,
    z_span_basis, IntMatrix, RatMatrix,
};
use crate::scalar::{CompensatedSum, Real};

/// Which subfield order to build.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Subfield {
    /// The cyclic cubic field K.
    Cubic,
    /// The imaginary quadratic field k.
    Quadratic,
}

#[derive(Clone, Debug)]
pub struct FieldTower {
    pub p: u64,
    pub d: u64,
    pub t: u64,
    pub delta_k: i64,
    /// Signed discriminant of F (negative: F has three complex places).
    pub delta_f: BigInt,
    pub n: u64,
    pub tau: GaloisUnit,
    pub h_f: Vec<GaloisUnit>,
    pub h_cubic: Vec<GaloisUnit>,
    pub h_quadratic: Vec<GaloisUnit>,
}

pub fn is_supported_conductor(p: u64) -> bool {
    p == 9 || (is_prime(p) && p % 3 == 1)
}

/// Residues a mod p that are cubes of units (the subgroup fixing K inside Q(zeta_p)).
fn is_cube_mod(a: u64, p: u64) -> bool {
    if p == 9 {
        a % 9 == 1 || a % 9 == 8
    } else {
        pow_mod(a % p, (p - 1) / 3, p) == 1
    }
}

pub fn build_tower(p: u64, d: u64) -> Result<FieldTower> {
    if !is_supported_conductor(p) {
        return Err(Error::UnsupportedConductor(p));
    }
    if d == 0 || !is_squarefree(d) {
        return Err(Error::NotSquarefree(d));
    }
    let t = gcd(p, d);
    let delta_k: i64 = if d % 4 == 1 || d % 4 == 2 { -4 * d as i64 } else { -(d as i64) };
    let dk = delta_k.unsigned_abs();
    let n = lcm(p, dk);
    let abs_f = BigInt::from(p).pow(4) * BigInt::from(dk).pow(3) / BigInt::from(t * t);
    let delta_f = -abs_f;

    let units = units_mod(n);
    let mk = |pred: &dyn Fn(u64) -> bool| -> Vec<GaloisUnit> {
        units.iter().filter(|&&a| pred(a)).map(|&a| GaloisUnit::new(a as i64, n).expect("unit")).collect()
    };
    let h_cubic = mk(&|a| is_cube_mod(a, p));
    let h_quadratic = mk(&|a| kronecker(delta_k, a) == 1);
    let h_f = mk(&|a| is_cube_mod(a, p) && kronecker(delta_k, a) == 1);
    if units.len() != 6 * h_f.len() {
        return Err(Error::Precondition(format!("Galois quotient for ({p},{d}) is not of order 6")));
    }
    let in_hf: HashSet<u64> = h_f.iter().map(|s| s.residue()).collect();
    let quotient_order = |a: u64| -> u64 {
        let mut x = a % n;
        let mut k = 1;
        while !in_hf.contains(&x) {
            x = (x as u128 * a as u128 % n as u128) as u64;
            k += 1;
        }
        k
    };
    let tau = units
        .iter()
        .copied()
        .find(|&a| quotient_order(a) == 6)
        .ok_or_else(|| Error::Precondition(format!("Galois quotient for ({p},{d}) is not cyclic")))?;
    Ok(FieldTower {
        p,
        d,
        t,
        delta_k,
        delta_f,
        n,
        tau: GaloisUnit::new(tau as i64, n)?,
        h_f,
        h_cubic,
        h_quadratic,
    })
}

impl FieldTower {
    pub fn abs_delta_f(&self) -> BigInt {
        self.delta_f.abs()
    }

    pub fn conj(&self) -> GaloisUnit {
        GaloisUnit::new(-1, self.n).expect("-1 is a unit")
    }

    /// tau^0, ..., tau^5: a transversal of Gal(Q(zeta_n)/Q) modulo the group fixing F.
    pub fn galois_reps(&self) -> Vec<GaloisUnit> {
        (0..6).map(|i| self.tau.pow(i)).collect()
    }

    /// Residues of the three embeddings tau_1, tau_2, tau_3 (one per conjugate pair).
    pub fn embedding_residues(&self) -> [u64; 3] {
        [self.tau.pow(0).residue(), self.tau.pow(1).residue(), self.tau.pow(2).residue()]
    }

    /// sqrt(-d) as an element of Q(zeta_n), from the quadratic Gauss sum.
    pub fn sqrt_minus_d(&self) -> CycElement {
        let m = self.delta_k.unsigned_abs();
        let mut coeffs = vec![0i64; m as usize];
        for a in units_mod(m) {
            coeffs[a as usize] = kronecker(self.delta_k, a) as i64;
        }
        let g = CycElement::from_int_coeffs(m, &coeffs).lift(self.n / m);
        if m == 4 * self.d {
            g.scale(&BigRational::new(BigInt::one(), BigInt::from(2)))
        } else {
            g
        }
    }

    /// The generator delta of O_k: sqrt(-d), or (1 + sqrt(-d))/2 when d = 3 mod 4.
    pub fn delta(&self) -> CycElement {
        let s = self.sqrt_minus_d();
        if self.d % 4 == 3 {
            s.add(&CycElement::one(self.n)).expect("same modulus").scale(&BigRational::new(BigInt::one(), BigInt::from(2)))
        } else {
            s
        }
    }
}

/// Integer coordinates of an element over an order's basis.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ElementCoords {
    pub coords: Vec<BigInt>,
}

impl ElementCoords {
    pub fn from_i64(v: &[i64]) -> Self {
        Self { coords: v.iter().map(|&x| BigInt::from(x)).collect() }
    }

    pub fn to_i64(&self) -> Option<Vec<i64>> {
        self.coords.iter().map(ToPrimitive::to_i64).collect()
    }

    pub fn rank(&self) -> usize {
        self.coords.len()
    }

    pub fn to_strings(&self) -> Vec<String> {
        self.coords.iter().map(|c| c.to_string()).collect()
    }
}

/// An order with basis, exact trace form, multiplication table and Galois actions.
#[derive(Clone, Debug)]
pub struct OrderLattice {
    n: u64,
    trace_degree: usize,
    basis: Vec<CycElement>,
    gram: IntMatrix,
    gram_small: Vec<Vec<i64>>,
    mult: Vec<Vec<Vec<i64>>>,
    conj_action: Vec<Vec<i64>>,
    tau_action: Vec<Vec<i64>>,
    reps: Vec<GaloisUnit>,
    gram_inv: RatMatrix,
    duals: Vec<Vec<BigRational>>,
    one: Vec<i64>,
}

/// Tr_{E/Q}(x conj y) computed in Q(zeta_n), E of degree `deg`.
fn pairing(x: &CycElement, y: &CycElement, conj: &GaloisUnit, deg: usize) -> Result<BigRational> {
    let prod = x.mul(&y.galois_apply(conj)?)?;
    Ok(prod.absolute_trace() * rat(deg as i64) / rat(euler_phi(x.modulus()) as i64))
}

fn to_small(m: &IntMatrix) -> Result<Vec<Vec<i64>>> {
    m.iter()
        .map(|r| {
            r.iter()
                .map(|x| x.to_i64().ok_or_else(|| Error::Precondition("entry exceeds 64 bits".into())))
                .collect()
        })
        .collect()
}

fn rat_to_int_row(v: &[BigRational]) -> Option<Vec<i64>> {
    v.iter().map(|x| if is_integral(x) { x.to_integer().to_i64() } else { None }).collect()
}

fn combine(coeffs: &[BigRational], elems: &[CycElement]) -> CycElement {
    let mut acc = CycElement::zero(elems[0].modulus());
    for (c, e) in coeffs.iter().zip(elems) {
        if !c.is_zero() {
            acc = acc.add(&e.scale(c)).expect("same modulus");
        }
    }
    acc
}

impl OrderLattice {
    /// Assemble all derived data from a basis known to span an order.
    fn assemble(
        basis: Vec<CycElement>,
        trace_degree: usize,
        reps: Vec<GaloisUnit>,
        tau: GaloisUnit,
    ) -> Result<Self> {
        let n = basis[0].modulus();
        let rank = basis.len();
        let phi = euler_phi(n) as i64;
        let ram: Vec<i64> = (0..n as i64).map(|r| ramanujan_sum(n, r)).collect();
        // w_l[j] = Tr(zeta^j conj b_l) so that Tr(x conj b_l) = sum_j x_j w_l[j]
        let duals: Vec<Vec<BigRational>> = basis
            .iter()
            .map(|b| {
                let nums = b.numerators();
                let scale = BigRational::new(BigInt::from(trace_degree as i64), b.denominator() * BigInt::from(phi));
                (0..n as usize)
                    .map(|j| {
                        let mut acc = BigInt::zero();
                        for (m, c) in nums.iter().enumerate() {
                            if !c.is_zero() {
                                acc += c * ram[(j + n as usize - m) % n as usize];
                            }
                        }
                        BigRational::from_integer(acc) * &scale
                    })
                    .collect()
            })
            .collect();
        let mut gram_rat = vec![vec![rat(0); rank]; rank];
        for i in 0..rank {
            for j in 0..rank {
                gram_rat[i][j] = dot(&basis[i], &duals[j]);
            }
        }
        if gram_rat.iter().flatten().any(|x| !is_integral(x)) {
            return Err(Error::Precondition("trace form is not integral on the basis".into()));
        }
        let gram: IntMatrix = gram_rat.iter().map(|r| r.iter().map(|x| x.to_integer()).collect()).collect();
        let gram_inv = inverse_rat(&gram_rat).ok_or(Error::NotPositiveDefinite)?;
        let mut ord = Self {
            n,
            trace_degree,
            gram_small: to_small(&gram)?,
            gram,
            basis,
            mult: Vec::new(),
            conj_action: Vec::new(),
            tau_action: Vec::new(),
            reps,
            gram_inv,
            duals,
            one: Vec::new(),
        };
        let int_coords = |ord: &Self, x: &CycElement, what: &str| -> Result<Vec<i64>> {
            ord.integral_coords(x).ok_or_else(|| Error::Precondition(format!("{what} is not in the order")))
        };
        let mut mult = vec![vec![Vec::new(); rank]; rank];
        for i in 0..rank {
            for j in i..rank {
                let prod = ord.basis[i].mul(&ord.basis[j])?;
                let c = int_coords(&ord, &prod, "product of basis elements")?;
                mult[i][j] = c.clone();
                mult[j][i] = c;
            }
        }
        let conj = GaloisUnit::new(-1, n)?;
        let conj_action = (0..rank)
            .map(|i| int_coords(&ord, &ord.basis[i].galois_apply(&conj)?, "conjugate"))
            .collect::<Result<Vec<_>>>()?;
        let tau_action = (0..rank)
            .map(|i| int_coords(&ord, &ord.basis[i].galois_apply(&tau)?, "tau-image"))
            .collect::<Result<Vec<_>>>()?;
        ord.one = int_coords(&ord, &CycElement::one(n), "1")?;
        ord.mult = mult;
        ord.conj_action = conj_action;
        ord.tau_action = tau_action;
        Ok(ord)
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn modulus(&self) -> u64 {
        self.n
    }

    /// Degree of the field whose trace defines the form (6 for F-lengths).
    pub fn trace_degree(&self) -> usize {
        self.trace_degree
    }

    pub fn basis(&self) -> &[CycElement] {
        &self.basis
    }

    pub fn gram(&self) -> &IntMatrix {
        &self.gram
    }

    pub fn gram_i64(&self) -> &[Vec<i64>] {
        &self.gram_small
    }

    pub fn exact_gram(&self) -> ExactGram {
        ExactGram::from_int(&self.gram).expect("square symmetric")
    }

    /// mult_table()[i][j] = coordinates of b_i * b_j.
    pub fn mult_table(&self) -> &[Vec<Vec<i64>>] {
        &self.mult
    }

    /// Row i = coordinates of conj(b_i).
    pub fn conj_action(&self) -> &[Vec<i64>] {
        &self.conj_action
    }

    /// Row i = coordinates of tau(b_i).
    pub fn tau_action(&self) -> &[Vec<i64>] {
        &self.tau_action
    }

    pub fn galois_reps(&self) -> &[GaloisUnit] {
        &self.reps
    }

    pub fn one(&self) -> &[i64] {
        &self.one
    }

    /// Rational coordinates of x, assuming x lies in the field spanned by the basis.
    pub fn coords_of(&self, x: &CycElement) -> Vec<BigRational> {
        let pairings: Vec<BigRational> = self.duals.iter().map(|w| dot(x, w)).collect();
        self.gram_inv
            .iter()
            .map(|row| row.iter().zip(&pairings).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Integer coordinates of x, if x is an element of the order.
    pub fn integral_coords(&self, x: &CycElement) -> Option<Vec<i64>> {
        if x.modulus() != self.n {
            return None;
        }
        let c = self.coords_of(x);
        let ints = rat_to_int_row(&c)?;
        (self.element(&ints) == *x).then_some(ints)
    }

    pub fn element(&self, c: &[i64]) -> CycElement {
        combine(&c.iter().map(|&x| rat(x)).collect::<Vec<_>>(), &self.basis)
    }

    pub fn length_sq(&self, c: &[i64]) -> i64 {
        let g = &self.gram_small;
        let mut acc = 0i64;
        for i in 0..c.len() {
            if c[i] == 0 {
                continue;
            }
            let mut row = 0i64;
            for j in 0..c.len() {
                row += g[i][j] * c[j];
            }
            acc += row * c[i];
        }
        acc
    }

    pub fn mul(&self, a: &[i64], b: &[i64]) -> Vec<i64> {
        let r = self.rank();
        let mut out = vec![0i64; r];
        for i in 0..r {
            if a[i] == 0 {
                continue;
            }
            for j in 0..r {
                if b[j] == 0 {
                    continue;
                }
                let s = a[i] * b[j];
                for (o, m) in out.iter_mut().zip(&self.mult[i][j]) {
                    *o += s * m;
                }
            }
        }
        out
    }

    fn act(m: &[Vec<i64>], c: &[i64]) -> Vec<i64> {
        let r = c.len();
        let mut out = vec![0i64; r];
        for i in 0..r {
            if c[i] != 0 {
                for k in 0..r {
                    out[k] += c[i] * m[i][k];
                }
            }
        }
        out
    }

    pub fn conj(&self, c: &[i64]) -> Vec<i64> {
        Self::act(&self.conj_action, c)
    }

    pub fn tau(&self, c: &[i64]) -> Vec<i64> {
        Self::act(&self.tau_action, c)
    }

    /// Matrix of multiplication by the element (row j = coordinates of x * b_j).
    pub fn mult_matrix(&self, c: &[i64]) -> Vec<Vec<i64>> {
        let r = self.rank();
        (0..r)
            .map(|j| {
                let mut e = vec![0i64; r];
                e[j] = 1;
                self.mul(c, &e)
            })
            .collect()
    }

    /// |N(x)| over Q, from the determinant of the multiplication matrix.
    pub fn norm_abs(&self, c: &[i64]) -> u128 {
        det_i128(&self.mult_matrix(c)).unsigned_abs()
    }

    pub fn norm_abs_exact(&self, c: &ElementCoords) -> BigInt {
        let r = self.rank();
        let m: IntMatrix = (0..r)
            .map(|j| {
                let mut out = vec![BigInt::zero(); r];
                for i in 0..r {
                    if c.coords[i].is_zero() {
                        continue;
                    }
                    for (k, o) in out.iter_mut().enumerate() {
                        *o += &c.coords[i] * BigInt::from(self.mult[i][j][k]);
                    }
                }
                out
            })
            .collect();
        det_bareiss(&m).abs()
    }

    /// Values of the basis under the embeddings zeta -> exp(2 pi i r / n), one row per residue r.
    pub fn embed_basis<T: Real>(&self, residues: &[u64]) -> Vec<Vec<Complex<T>>> {
        residues.iter().map(|&r| self.basis.iter().map(|b| b.embed::<T>(r as i64)).collect()).collect()
    }

    pub fn embed<T: Real>(table: &[Vec<Complex<T>>], c: &[i64]) -> Vec<Complex<T>> {
        table
            .iter()
            .map(|row| {
                let mut re = CompensatedSum::<T>::new();
                let mut im = CompensatedSum::<T>::new();
                for (v, &x) in row.iter().zip(c) {
                    if x != 0 {
                        re.add(v.re * T::lit(x as f64));
                        im.add(v.im * T::lit(x as f64));
                    }
                }
                Complex::new(re.value(), im.value())
            })
            .collect()
    }

    /// Exact characteristic polynomial over Q of the element, via its multiplication matrix.
    pub fn char_poly(&self, c: &[i64]) -> Vec<BigRational> {
        let m: RatMatrix = self.mult_matrix(c).iter().map(|r| r.iter().map(|&x| rat(x)).collect()).collect();
        char_poly_rat(&m)
    }

    /// Re-express the order inside Q(zeta_{n m}) with new Galois data.
    pub fn lift(&self, m: u64, reps: Vec<GaloisUnit>, tau: GaloisUnit) -> Result<Self> {
        let basis = self.basis.iter().map(|b| b.lift(m)).collect();
        Self::assemble(basis, self.trace_degree, reps, tau)
    }

    pub fn descriptor_basis(&self) -> Value {
        Value::Array(
            self.basis
                .iter()
                .map(|b| {
                    Value::Array(
                        b.coeffs()
                            .iter()
                            .enumerate()
                            .filter(|(_, c)| !c.is_zero())
                            .map(|(j, c)| json!([j, c.to_string()]))
                            .collect(),
                    )
                })
                .collect(),
        )
    }

    pub fn gram_strings(&self) -> Vec<Vec<String>> {
        self.gram.iter().map(|r| r.iter().map(|x| x.to_string()).collect()).collect()
    }
}

fn dot(x: &CycElement, w: &[BigRational]) -> BigRational {
    let mut acc = BigRational::zero();
    for (c, wj) in x.numerators().iter().zip(w) {
        if !c.is_zero() && !wj.is_zero() {
            acc += wj * BigRational::from_integer(c.clone());
        }
    }
    acc / BigRational::from_integer(x.denominator().clone())
}

/// Build an order of the fixed field of `h` in Q(zeta_n) with determinant `target`:
/// the span of the traces of zeta^j, enlarged at primes dividing the index until
/// the determinant matches, then LLL-reduced.
fn trace_lattice_order(
    n: u64,
    h: &[GaloisUnit],
    rank: usize,
    target: &BigInt,
    reps: Vec<GaloisUnit>,
    tau: GaloisUnit,
) -> Result<OrderLattice> {
    check_subgroup(h, n)?;
    let conj = GaloisUnit::new(-1, n)?;
    // traces of zeta^j, one per h-orbit on Z/n
    let mut seen = vec![false; n as usize];
    let mut gens = Vec::new();
    for j in 0..n {
        if seen[j as usize] {
            continue;
        }
        let mut coeffs = vec![0i64; n as usize];
        for s in h {
            let k = (j as u128 * s.residue() as u128 % n as u128) as usize;
            seen[k] = true;
            coeffs[k] += 1;
        }
        gens.push(CycElement::from_int_coeffs(n, &coeffs));
    }
    // greedy Q-basis
    let mut b0: Vec<CycElement> = Vec::new();
    let mut g0: RatMatrix = Vec::new();
    for g in &gens {
        if b0.len() == rank {
            break;
        }
        let mut trial = g0.clone();
        let row: Vec<BigRational> = b0.iter().map(|b| pairing(g, b, &conj, rank)).collect::<Result<_>>()?;
        for (r, x) in trial.iter_mut().zip(&row) {
            r.push(x.clone());
        }
        let mut last = row;
        last.push(pairing(g, g, &conj, rank)?);
        trial.push(last);
        if !det_rat(&trial).is_zero() {
            g0 = trial;
            b0.push(g.clone());
        }
    }
    if b0.len() != rank {
        return Err(Error::Precondition(format!("periods span rank {} instead of {rank}", b0.len())));
    }
    let g0_inv = inverse_rat(&g0).ok_or(Error::NotPositiveDefinite)?;
    let coords0 = |x: &CycElement| -> Result<Vec<BigRational>> {
        let pr: Vec<BigRational> = b0.iter().map(|b| pairing(x, b, &conj, rank)).collect::<Result<_>>()?;
        Ok(g0_inv.iter().map(|row| row.iter().zip(&pr).map(|(a, b)| a * b).sum()).collect())
    };
    // multiplication matrices of b0_i on b0-coordinates
    let mut m0: Vec<RatMatrix> = vec![vec![Vec::new(); rank]; rank];
    for i in 0..rank {
        for j in i..rank {
            let c = coords0(&b0[i].mul(&b0[j])?)?;
            m0[i][j] = c.clone();
            m0[j][i] = c;
        }
    }
    let mult_by = |x: &[BigRational]| -> RatMatrix {
        (0..rank)
            .map(|j| {
                let mut row = vec![rat(0); rank];
                for i in 0..rank {
                    if x[i].is_zero() {
                        continue;
                    }
                    for k in 0..rank {
                        row[k] += &x[i] * &m0[i][j][k];
                    }
                }
                row
            })
            .collect()
    };
    let mut rows: Vec<Vec<BigRational>> = gens.iter().map(&coords0).collect::<Result<_>>()?;
    let mut p = z_span_basis(&rows);
    let gram_of = |p: &RatMatrix| mat_mul_rat(&mat_mul_rat(p, &g0), &transpose(p));
    loop {
        if p.len() != rank {
            return Err(Error::EnlargementFailed(format!("lattice rank {} != {rank}", p.len())));
        }
        let det = det_rat(&gram_of(&p));
        if !is_integral(&det) {
            return Err(Error::EnlargementFailed(format!("non-integral determinant {det}")));
        }
        let det = det.to_integer();
        if &det == target {
            break;
        }
        if !(&det % target).is_zero() {
            return Err(Error::EnlargementFailed(format!("determinant {det} not a multiple of {target}")));
        }
        let index_sq = (&det / target).to_u64().ok_or_else(|| Error::EnlargementFailed(det.to_string()))?;
        let index = (index_sq as f64).sqrt().round() as u64;
        if index * index != index_sq {
            return Err(Error::EnlargementFailed(format!("index squared {index_sq} is not a square")));
        }
        let mut added = None;
        'primes: for (q, _) in crate::arith::factorize(index) {
            let total = (q as usize).checked_pow(rank as u32).filter(|&x| x <= 5_000_000).ok_or_else(|| {
                Error::EnlargementFailed(format!("search space for prime {q} is too large"))
            })?;
            let mats: Vec<RatMatrix> = p.iter().map(|r| mult_by(r)).collect();
            let qi = BigRational::new(BigInt::one(), BigInt::from(q));
            for code in 1..total {
                let mut c = vec![0i64; rank];
                let mut k = code;
                for ci in c.iter_mut() {
                    *ci = (k % q as usize) as i64;
                    k /= q as usize;
                }
                let mut m = vec![vec![rat(0); rank]; rank];
                for (ci, mi) in c.iter().zip(&mats) {
                    if *ci == 0 {
                        continue;
                    }
                    let s = rat(*ci) * &qi;
                    for (row, mrow) in m.iter_mut().zip(mi) {
                        for (x, y) in row.iter_mut().zip(mrow) {
                            *x += &s * y;
                        }
                    }
                }
                if char_poly_rat(&m).iter().all(is_integral) {
                    let mut v = vec![rat(0); rank];
                    for (ci, pr) in c.iter().zip(&p) {
                        for (x, y) in v.iter_mut().zip(pr) {
                            *x += rat(*ci) * &qi * y;
                        }
                    }
                    added = Some(v);
                    break 'primes;
                }
            }
        }
        let Some(v) = added else {
            return Err(Error::EnlargementFailed(format!("no integral element found at index {index}")));
        };
        rows = p.clone();
        rows.push(v);
        p = z_span_basis(&rows);
    }
    // LLL on the exact integer trace form, then materialize the basis
    let g: IntMatrix = gram_of(&p).iter().map(|r| r.iter().map(|x| x.to_integer()).collect()).collect();
    let red = lll_reduce(&GramMatrix::<BigRational>::from_int(&g)?)?;
    let u: RatMatrix = red.transform.iter().map(|r| r.iter().map(|x| BigRational::from_integer(x.clone())).collect()).collect();
    let p = mat_mul_rat(&u, &p);
    let basis: Vec<CycElement> = p.iter().map(|row| combine(row, &b0)).collect();
    OrderLattice::assemble(basis, rank, reps, tau)
}

/// The maximal order O_F, LLL-reduced for the trace form Tr(x conj y).
pub fn integral_basis(tower: &FieldTower) -> Result<OrderLattice> {
    trace_lattice_order(tower.n, &tower.h_f, 6, &tower.abs_delta_f(), tower.galois_reps(), tower.tau)
}

fn cubic_order_mod_p(p: u64) -> Result<OrderLattice> {
    let h: Vec<GaloisUnit> =
        units_mod(p).into_iter().filter(|&a| is_cube_mod(a, p)).map(|a| GaloisUnit::new(a as i64, p)).collect::<Result<_>>()?;
    let sigma = units_mod(p).into_iter().find(|&a| !is_cube_mod(a, p)).expect("a non-cube exists");
    let sigma = GaloisUnit::new(sigma as i64, p)?;
    let reps = vec![sigma.pow(0), sigma, sigma.pow(2)];
    trace_lattice_order(p, &h, 3, &BigInt::from(p * p), reps, sigma)
}

/// O_K (trace form Tr_{K/Q}(xy), determinant p^2) or O_k = Z[delta] (F-lengths,
/// so that ||m + n sqrt(-d)||^2 = 6(m^2 + n^2 d)), both inside Q(zeta_n).
pub fn subfield_order(tower: &FieldTower, which: Subfield) -> Result<OrderLattice> {
    match which {
        Subfield::Cubic => {
            let k = cubic_order_mod_p(tower.p)?;
            let reps = vec![tower.tau.pow(0), tower.tau, tower.tau.pow(2)];
            k.lift(tower.n / tower.p, reps, tower.tau)
        }
        Subfield::Quadratic => {
            let basis = vec![CycElement::one(tower.n), tower.delta()];
            OrderLattice::assemble(basis, 6, vec![tower.tau.pow(0), tower.conj()], tower.tau)
        }
    }
}

/// Standalone O_K for a conductor, inside Q(zeta_p).
pub fn cubic_order(p: u64) -> Result<OrderLattice> {
    if !is_supported_conductor(p) {
        return Err(Error::UnsupportedConductor(p));
    }
    cubic_order_mod_p(p)
}

/// Torsion units: vectors of length ||1||^2 with x conj(x) = 1, both signs.
pub fn roots_of_unity(order: &OrderLattice) -> Result<Vec<ElementCoords>> {
    let b = order.trace_degree as i64;
    let mut out = Vec::new();
    for (v, norm) in enumerate_short_int(order.gram(), b)? {
        if norm != b {
            continue;
        }
        if order.mul(&v, &order.conj(&v)) == order.one() {
            let neg: Vec<i64> = v.iter().map(|x| -x).collect();
            out.push(ElementCoords::from_i64(&v));
            out.push(ElementCoords::from_i64(&neg));
        }
    }
    out.sort();
    Ok(out)
}

/// Everything needed about one sextic field.
#[derive(Clone, Debug)]
pub struct SexticField {
    pub tower: FieldTower,
    pub o_f: OrderLattice,
    pub o_cubic: OrderLattice,
    pub o_quadratic: OrderLattice,
}

impl SexticField {
    pub fn new(p: u64, d: u64) -> Result<Self> {
        let tower = build_tower(p, d)?;
        let o_f = integral_basis(&tower)?;
        let o_cubic = subfield_order(&tower, Subfield::Cubic)?;
        let o_quadratic = subfield_order(&tower, Subfield::Quadratic)?;
        Ok(Self { tower, o_f, o_cubic, o_quadratic })
    }

    /// Coordinates over O_F of an element of O_K.
    pub fn cubic_to_f(&self, g: &[i64]) -> Vec<i64> {
        self.o_f.integral_coords(&self.o_cubic.element(g)).expect("O_K lies in O_F")
    }

    pub fn quadratic_to_f(&self, g: &[i64]) -> Vec<i64> {
        self.o_f.integral_coords(&self.o_quadratic.element(g)).expect("O_k lies in O_F")
    }

    pub fn descriptor(&self) -> Value {
        let t = &self.tower;
        json!({
            "p": t.p,
            "d": t.d,
            "t": t.t,
            "delta_k": t.delta_k,
            "delta_F": t.delta_f.to_string(),
            "n": t.n,
            "basis": self.o_f.descriptor_basis(),
            "gram": self.o_f.gram_strings(),
        })
    }
}

/// Decomposition t f = gamma + beta delta with gamma, beta in O_K.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decomposition {
    pub gamma: ElementCoords,
    pub beta: ElementCoords,
    pub t: u64,
}

pub fn decompose(f: &ElementCoords, field: &SexticField) -> Result<Decomposition> {
    let tw = &field.tower;
    let c = f.to_i64().ok_or_else(|| Error::Precondition("coordinates exceed 64 bits".into()))?;
    let x = field.o_f.element(&c);
    let xb = x.galois_apply(&tw.conj())?;
    let s = tw.sqrt_minus_d();
    let t = rat(tw.t as i64);
    // delta - conj(delta) is 2 sqrt(-d) or sqrt(-d); 1/sqrt(-d) = sqrt(-d)/(-d)
    let diff = if tw.d % 4 == 3 { rat(1) } else { rat(2) };
    let beta = x.sub(&xb)?.mul(&s)?.scale(&(t.clone() / (rat(-(tw.d as i64)) * diff)));
    let gamma = x.scale(&t).sub(&beta.mul(&tw.delta())?)?;
    let cubic = &field.o_cubic;
    let g = cubic.integral_coords(&gamma).ok_or_else(|| Error::Precondition("gamma is not in O_K".into()))?;
    let b = cubic.integral_coords(&beta).ok_or_else(|| Error::Precondition("beta is not in O_K".into()))?;
    Ok(Decomposition { gamma: ElementCoords::from_i64(&g), beta: ElementCoords::from_i64(&b), t: tw.t })
}

/// Real embeddings of the basis of O_K: row i holds sigma^i(b_k).
pub fn cubic_embeddings<T: Real>(order: &OrderLattice) -> Vec<Vec<T>> {
    let res: Vec<u64> = order.galois_reps().iter().map(|s| s.residue()).collect();
    order.embed_basis::<T>(&res).into_iter().map(|r| r.into_iter().map(|z| z.re).collect()).collect()
}
