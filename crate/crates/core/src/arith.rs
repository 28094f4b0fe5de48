//! Small-integer number theory used to set up the field tower.

use num_integer::Integer;

pub fn gcd(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

pub fn lcm(a: u64, b: u64) -> u64 {
    a.lcm(&b)
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut q = 2;
    while q * q <= n {
        if n % q == 0 {
            return false;
        }
        q += 1;
    }
    true
}

/// Prime factorization as (prime, exponent) pairs, primes ascending.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut q = 2;
    while q * q <= n {
        if n % q == 0 {
            let mut e = 0;
            while n % q == 0 {
                n /= q;
                e += 1;
            }
            out.push((q, e));
        }
        q += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn is_squarefree(n: u64) -> bool {
    n >= 1 && factorize(n).iter().all(|&(_, e)| e == 1)
}

pub fn euler_phi(n: u64) -> u64 {
    factorize(n).iter().fold(n, |acc, &(p, _)| acc / p * (p - 1))
}

pub fn moebius(n: u64) -> i64 {
    let f = factorize(n);
    if f.iter().any(|&(_, e)| e > 1) {
        0
    } else if f.len() % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Ramanujan sum c_n(j) = Tr_{Q(zeta_n)/Q}(zeta_n^j).
pub fn ramanujan_sum(n: u64, j: i64) -> i64 {
    let j = j.rem_euclid(n as i64) as u64;
    let g = gcd(j, n);
    let m = n / g;
    moebius(m) * (euler_phi(n) / euler_phi(m)) as i64
}

pub fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = (r as u128 * b as u128 % m as u128) as u64;
        }
        b = (b as u128 * b as u128 % m as u128) as u64;
        e >>= 1;
    }
    r
}

/// Multiplicative order of `a` modulo `n`; `None` when `a` is not a unit.
pub fn mult_order(a: u64, n: u64) -> Option<u64> {
    if gcd(a % n, n) != 1 {
        return None;
    }
    let mut x = a % n;
    let mut k = 1;
    while x != 1 % n {
        x = x * a % n;
        k += 1;
    }
    Some(k)
}

/// Jacobi symbol (a / n) for odd positive n.
pub fn jacobi(a: i64, n: u64) -> i32 {
    assert!(n % 2 == 1, "jacobi symbol needs an odd modulus");
    let mut a = a.rem_euclid(n as i64) as u64;
    let mut n = n;
    let mut s = 1;
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            if n % 8 == 3 || n % 8 == 5 {
                s = -s;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            s = -s;
        }
        a %= n;
    }
    if n == 1 {
        s
    } else {
        0
    }
}

/// Kronecker character of the negative fundamental discriminant `disc`,
/// evaluated at an integer coprime to it.
pub fn kronecker(disc: i64, a: u64) -> i32 {
    let m = disc.unsigned_abs();
    let mut a = a % m;
    if a % 2 == 0 {
        // odd modulus: shift to an odd representative of the same class
        a += m;
    }
    jacobi(disc, a)
}

pub fn units_mod(n: u64) -> Vec<u64> {
    (1..=n).filter(|&a| gcd(a % n, n) == 1).map(|a| a % n).collect()
}

/// Integer polynomial coefficients (ascending) of the n-th cyclotomic polynomial.
pub fn cyclotomic_poly(n: u64) -> Vec<i64> {
    // Phi_n = prod_{d | n} (x^d - 1)^{mu(n/d)}
    let mut num: Vec<i64> = vec![1];
    let mut den: Vec<i64> = vec![1];
    for d in 1..=n {
        if n % d != 0 {
            continue;
        }
        let mut f = vec![0i64; d as usize + 1];
        f[0] = -1;
        f[d as usize] = 1;
        match moebius(n / d) {
            1 => num = poly_mul(&num, &f),
            -1 => den = poly_mul(&den, &f),
            _ => {}
        }
    }
    poly_exact_div(&num, &den)
}

fn poly_mul(a: &[i64], b: &[i64]) -> Vec<i64> {
    let mut out = vec![0i64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn poly_exact_div(num: &[i64], den: &[i64]) -> Vec<i64> {
    let mut rem = num.to_vec();
    let dl = den.len();
    let lead = den[dl - 1];
    let mut q = vec![0i64; num.len() - dl + 1];
    for i in (0..q.len()).rev() {
        let c = rem[i + dl - 1] / lead;
        q[i] = c;
        for (j, &dj) in den.iter().enumerate() {
            rem[i + j] -= c * dj;
        }
    }
    debug_assert!(rem.iter().all(|&r| r == 0));
    q
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cyclotomic_small() {
        assert_eq!(cyclotomic_poly(1), vec![-1, 1]);
        assert_eq!(cyclotomic_poly(4), vec![1, 0, 1]);
        assert_eq!(cyclotomic_poly(7), vec![1; 7]);
        assert_eq!(cyclotomic_poly(9), vec![1, 0, 0, 1, 0, 0, 1]);
        assert_eq!(cyclotomic_poly(12), vec![1, 0, -1, 0, 1]);
    }

    #[test]
    fn ramanujan_sums_match_definition() {
        for n in [4u64, 7, 9, 12, 28] {
            for j in 0..n as i64 {
                let direct: f64 = (0..n)
                    .filter(|&k| gcd(k, n) == 1)
                    .map(|k| (2.0 * std::f64::consts::PI * (j as f64) * k as f64 / n as f64).cos())
                    .sum();
                assert!((direct - ramanujan_sum(n, j) as f64).abs() < 1e-9, "n={n} j={j}");
            }
        }
    }

    #[test]
    fn jacobi_and_kronecker() {
        assert_eq!(jacobi(2, 7), 1);
        assert_eq!(jacobi(3, 7), -1);
        // -4 character: a = 1 mod 4 -> +1, a = 3 mod 4 -> -1
        assert_eq!(kronecker(-4, 1), 1);
        assert_eq!(kronecker(-4, 3), -1);
        // -3 character, a = 2 -> -1
        assert_eq!(kronecker(-3, 2), -1);
        assert_eq!(kronecker(-7, 2), 1);
    }

    #[test]
    fn orders() {
        assert_eq!(mult_order(2, 7), Some(3));
        assert_eq!(mult_order(2, 31), Some(5));
        assert_eq!(mult_order(3, 9), None);
        assert_eq!(euler_phi(28), 12);
        assert!(is_squarefree(21) && !is_squarefree(18));
    }
}
