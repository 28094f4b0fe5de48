//! Exact arithmetic in Q(zeta_n), presented as the group algebra Q[x]/(x^n - 1).
//!
//! Galois elements act by permuting exponents and subfield traces are orbit
//! sums. The price is that representatives are not unique; [`CycElement::normal_form`]
//! reduces modulo Phi_n, which is the canonical form used for equality.

use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::{cyclotomic_poly, gcd, ramanujan_sum};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// The automorphism zeta_n -> zeta_n^a of Q(zeta_n).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GaloisUnit {
    a: u64,
    n: u64,
}

impl GaloisUnit {
    pub fn new(a: i64, n: u64) -> Result<Self> {
        let a = a.rem_euclid(n as i64) as u64;
        if gcd(a, n) != 1 && n > 1 {
            return Err(Error::NotAUnit { a, n });
        }
        Ok(Self { a: a % n.max(1), n })
    }

    pub fn identity(n: u64) -> Self {
        Self { a: 1 % n.max(1), n }
    }

    pub fn residue(&self) -> u64 {
        self.a
    }

    pub fn modulus(&self) -> u64 {
        self.n
    }

    pub fn compose(&self, other: &Self) -> Self {
        debug_assert_eq!(self.n, other.n);
        Self { a: (self.a as u128 * other.a as u128 % self.n as u128) as u64, n: self.n }
    }

    pub fn pow(&self, e: u64) -> Self {
        Self { a: crate::arith::pow_mod(self.a, e, self.n), n: self.n }
    }

    /// Reduction to a divisor `m` of the modulus (restriction to Q(zeta_m)).
    pub fn restrict(&self, m: u64) -> Self {
        debug_assert_eq!(self.n % m, 0);
        Self { a: self.a % m, n: m }
    }
}

/// Element sum_j c_j zeta_n^j with exact rational coefficients, stored as
/// integer numerators over one positive common denominator.
#[derive(Clone)]
pub struct CycElement {
    n: u64,
    num: Vec<BigInt>,
    den: BigInt,
}

impl fmt::Debug for CycElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CycElement(n={}, [", self.n)?;
        let mut first = true;
        for (j, c) in self.num.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{}*z^{}", BigRational::new(c.clone(), self.den.clone()), j)?;
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, "])")
    }
}

impl CycElement {
    pub fn zero(n: u64) -> Self {
        assert!(n >= 1, "modulus must be positive");
        Self { n, num: vec![BigInt::zero(); n as usize], den: BigInt::one() }
    }

    pub fn one(n: u64) -> Self {
        Self::zeta_pow(n, 0)
    }

    pub fn zeta_pow(n: u64, k: i64) -> Self {
        let mut z = Self::zero(n);
        z.num[k.rem_euclid(n as i64) as usize] = BigInt::one();
        z
    }

    pub fn from_int_coeffs(n: u64, coeffs: &[i64]) -> Self {
        let mut z = Self::zero(n);
        for (j, &c) in coeffs.iter().enumerate() {
            z.num[j % n as usize] += BigInt::from(c);
        }
        z
    }

    pub fn from_rational_coeffs(n: u64, coeffs: &[BigRational]) -> Self {
        assert_eq!(coeffs.len(), n as usize, "coefficient count must equal the modulus");
        let den = coeffs.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let num = coeffs
            .iter()
            .map(|c| (c * BigRational::from_integer(den.clone())).to_integer())
            .collect();
        let mut z = Self { n, num, den };
        z.normalize();
        z
    }

    pub fn rational(n: u64, q: BigRational) -> Self {
        let mut z = Self::zero(n);
        z.num[0] = q.numer().clone();
        z.den = q.denom().clone();
        z.normalize();
        z
    }

    fn normalize(&mut self) {
        if self.den.is_negative() {
            self.den = -self.den.clone();
            for x in self.num.iter_mut() {
                *x = -x.clone();
            }
        }
        let g = self.num.iter().fold(self.den.clone(), |acc, x| acc.gcd(x));
        if !g.is_one() && !g.is_zero() {
            for x in self.num.iter_mut() {
                *x /= &g;
            }
            self.den /= &g;
        }
    }

    pub fn modulus(&self) -> u64 {
        self.n
    }

    pub fn coeff(&self, j: usize) -> BigRational {
        BigRational::new(self.num[j].clone(), self.den.clone())
    }

    pub fn coeffs(&self) -> Vec<BigRational> {
        (0..self.n as usize).map(|j| self.coeff(j)).collect()
    }

    pub fn denominator(&self) -> &BigInt {
        &self.den
    }

    pub fn numerators(&self) -> &[BigInt] {
        &self.num
    }

    pub fn is_zero(&self) -> bool {
        self.normal_form().num.iter().all(Zero::is_zero)
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            Err(Error::ModulusMismatch(self.n, other.n))
        } else {
            Ok(())
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let den = self.den.lcm(&other.den);
        let fa = &den / &self.den;
        let fb = &den / &other.den;
        let num = self.num.iter().zip(&other.num).map(|(a, b)| a * &fa + b * &fb).collect();
        let mut z = Self { n: self.n, num, den };
        z.normalize();
        Ok(z)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        Self { n: self.n, num: self.num.iter().map(|x| -x).collect(), den: self.den.clone() }
    }

    pub fn scale(&self, q: &BigRational) -> Self {
        let mut z = Self {
            n: self.n,
            num: self.num.iter().map(|x| x * q.numer()).collect(),
            den: &self.den * q.denom(),
        };
        z.normalize();
        z
    }

    /// Image under Q(zeta_n) -> Q(zeta_{n m}), zeta_n -> zeta_{nm}^m.
    pub fn lift(&self, m: u64) -> Self {
        let big = self.n * m;
        let mut z = Self::zero(big);
        for (j, c) in self.num.iter().enumerate() {
            z.num[j * m as usize] = c.clone();
        }
        z.den = self.den.clone();
        z
    }

    /// Exact product (cyclic convolution).
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let n = self.n as usize;
        let a: Vec<(usize, &BigInt)> = self.num.iter().enumerate().filter(|(_, x)| !x.is_zero()).collect();
        let b: Vec<(usize, &BigInt)> = other.num.iter().enumerate().filter(|(_, x)| !x.is_zero()).collect();
        let small = |v: &[(usize, &BigInt)]| -> Option<(Vec<(usize, i64)>, u128)> {
            let mut mx = 0u128;
            let out = v
                .iter()
                .map(|&(j, x)| {
                    let s = x.to_i64()?;
                    mx = mx.max(s.unsigned_abs() as u128);
                    Some((j, s))
                })
                .collect::<Option<Vec<_>>>()?;
            Some((out, mx))
        };
        let num = match (small(&a), small(&b)) {
            (Some((sa, ma)), Some((sb, mb)))
                if ma.checked_mul(mb).and_then(|p| p.checked_mul(n as u128)).map_or(false, |p| p < (1u128 << 126)) =>
            {
                let mut acc = vec![0i128; n];
                for &(i, x) in &sa {
                    for &(j, y) in &sb {
                        let k = if i + j >= n { i + j - n } else { i + j };
                        acc[k] += x as i128 * y as i128;
                    }
                }
                acc.into_iter().map(BigInt::from).collect()
            }
            _ => {
                let mut acc = vec![BigInt::zero(); n];
                for &(i, x) in &a {
                    for &(j, y) in &b {
                        acc[(i + j) % n] += x * y;
                    }
                }
                acc
            }
        };
        let mut z = Self { n: self.n, num, den: &self.den * &other.den };
        z.normalize();
        Ok(z)
    }

    /// zeta -> zeta^a: coefficient at j moves to a*j mod n.
    pub fn galois_apply(&self, s: &GaloisUnit) -> Result<Self> {
        if s.n != self.n {
            return Err(Error::ModulusMismatch(self.n, s.n));
        }
        let n = self.n as usize;
        let mut num = vec![BigInt::zero(); n];
        for (j, c) in self.num.iter().enumerate() {
            if !c.is_zero() {
                num[(j as u128 * s.a as u128 % n as u128) as usize] = c.clone();
            }
        }
        Ok(Self { n: self.n, num, den: self.den.clone() })
    }

    /// Sum of the conjugates of `self` under the subgroup `h`.
    pub fn trace_to_fixed(&self, h: &[GaloisUnit]) -> Result<Self> {
        check_subgroup(h, self.n)?;
        let mut acc = Self::zero(self.n);
        for s in h {
            acc = acc.add(&self.galois_apply(s)?)?;
        }
        Ok(acc)
    }

    /// Absolute trace Tr_{Q(zeta_n)/Q}, via Ramanujan sums.
    pub fn absolute_trace(&self) -> BigRational {
        let mut acc = BigInt::zero();
        for (j, c) in self.num.iter().enumerate() {
            if !c.is_zero() {
                acc += c * BigInt::from(ramanujan_sum(self.n, j as i64));
            }
        }
        BigRational::new(acc, self.den.clone())
    }

    /// Complex value under zeta_n -> exp(2 pi i j / n).
    pub fn embed<T: Real>(&self, j: i64) -> Complex<T> {
        let n = self.n as i64;
        let two_pi = T::PI() + T::PI();
        let den = crate::scalar::rational_to_f64(&BigRational::from_integer(self.den.clone()));
        let mut re = crate::scalar::CompensatedSum::<T>::new();
        let mut im = crate::scalar::CompensatedSum::<T>::new();
        for (k, c) in self.num.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let r = (j.rem_euclid(n) as i128 * k as i128).rem_euclid(n as i128) as i64;
            let coef = T::lit(c.to_f64().unwrap_or(f64::NAN) / den);
            let (sin, cos) = angle_sin_cos::<T>(r, n, two_pi);
            re.add(coef * cos);
            im.add(coef * sin);
        }
        Complex::new(re.value(), im.value())
    }

    /// Canonical representative: remainder modulo Phi_n, degree < phi(n).
    pub fn normal_form(&self) -> Self {
        let phi = cyclotomic_poly(self.n);
        let deg = phi.len() - 1;
        let mut r = self.num.clone();
        for i in (deg..r.len()).rev() {
            if r[i].is_zero() {
                continue;
            }
            let c = r[i].clone();
            for (k, &pk) in phi.iter().enumerate() {
                if pk != 0 {
                    r[i - deg + k] -= &c * BigInt::from(pk);
                }
            }
        }
        let mut z = Self { n: self.n, num: r, den: self.den.clone() };
        z.normalize();
        z
    }

    /// The rational value if the element lies in Q.
    pub fn as_rational(&self) -> Option<BigRational> {
        let nf = self.normal_form();
        if nf.num.iter().skip(1).all(Zero::is_zero) {
            Some(BigRational::new(nf.num[0].clone(), nf.den.clone()))
        } else {
            None
        }
    }

    /// Characteristic polynomial prod_s (X - s(x)) over the given coset
    /// representatives, coefficients ascending.
    pub fn char_poly_exact(&self, coset_reps: &[GaloisUnit]) -> Result<Vec<BigRational>> {
        let mut poly: Vec<CycElement> = vec![Self::one(self.n)];
        for s in coset_reps {
            let y = self.galois_apply(s)?;
            let mut next = vec![Self::zero(self.n); poly.len() + 1];
            for (k, c) in poly.iter().enumerate() {
                next[k + 1] = next[k + 1].add(c)?;
                next[k] = next[k].sub(&c.mul(&y)?)?;
            }
            poly = next;
        }
        poly.iter().map(|c| c.as_rational().ok_or(Error::NotATransversal)).collect()
    }
}

impl PartialEq for CycElement {
    fn eq(&self, other: &Self) -> bool {
        if self.n != other.n {
            return false;
        }
        let a = self.normal_form();
        let b = other.normal_form();
        a.den == b.den && a.num == b.num
    }
}

impl Eq for CycElement {}

fn angle_sin_cos<T: Real>(r: i64, n: i64, two_pi: T) -> (T, T) {
    // use the symmetric residue so the angle stays in [-pi, pi]
    let r = if 2 * r > n { r - n } else { r };
    let theta = two_pi * T::lit(r as f64) / T::lit(n as f64);
    theta.sin_cos()
}

pub fn check_subgroup(h: &[GaloisUnit], n: u64) -> Result<()> {
    if h.iter().any(|s| s.n != n) {
        return Err(Error::NotASubgroup(n));
    }
    let set: std::collections::HashSet<u64> = h.iter().map(|s| s.a).collect();
    if !set.contains(&(1 % n)) || set.len() != h.len() {
        return Err(Error::NotASubgroup(n));
    }
    for x in h {
        for y in h {
            if !set.contains(&x.compose(y).a) {
                return Err(Error::NotASubgroup(n));
            }
        }
    }
    Ok(())
}
