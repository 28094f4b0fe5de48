//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs without the libtest harness so the lines always reach stdout. The
//! process fails if a criterion other than the known tail-constant shortfall
//! fails, or if that shortfall unexpectedly disappears.

use std::collections::BTreeSet;
use std::f64::consts::PI;
use std::time::Instant;

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sextic::field::{roots_of_unity, SexticField};
use sextic::lattice::{enumerate_short, enumerate_short_real, gram_det_int, ExactGram};
use sextic::theta::{script_g, t3_bound, tail_bound, taylor_bound, ArakelovPoint, ThetaContext, W_RADIUS};
use sextic::units::{lattice_for_conductor, log_norm, splits_two, unit_census};
use sextic::verify::{amplified_scan, discriminant_fields, scan_field, FieldData, TABLE1};

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict { pass, detail: detail.into() }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 { a } else { gcd(b, a % b) }
}

/// |Delta_F| = p^4 |Delta_k|^3 / t^2, computed from scratch.
fn discriminant_oracle(p: u64, d: u64) -> BigInt {
    let dk: u64 = if d % 4 == 3 { d } else { 4 * d };
    let t = gcd(p, d);
    BigInt::from(p).pow(4) * BigInt::from(dk).pow(3) / BigInt::from(t * t)
}

fn criterion_1() -> Verdict {
    let fields = discriminant_fields();
    let bad: Vec<_> = fields
        .iter()
        .filter(|&&(p, d)| {
            let f = SexticField::new(p, d).expect("field builds");
            gram_det_int(f.o_f.gram()) != discriminant_oracle(p, d)
        })
        .collect();
    verdict(bad.is_empty() && fields.len() == 34, format!("{} fields, mismatches {bad:?}", fields.len()))
}

fn criterion_2() -> Verdict {
    let large: Vec<usize> = [7, 9, 13, 19, 31].iter().map(|&p| unit_census(p, 4461, 200).unwrap()).collect();
    let small: Vec<usize> = [7, 9, 13, 19].iter().map(|&p| unit_census(p, 3333, 200).unwrap()).collect();
    verdict(large == [18, 12, 6, 6, 0] && small == [12, 6, 6, 3], format!("{large:?} {small:?}"))
}

fn criterion_3() -> Verdict {
    let l7 = lattice_for_conductor::<f64>(7).unwrap().lambda;
    let floors: Vec<f64> =
        [9, 13, 19, 31, 37, 43, 61].iter().map(|&p| lattice_for_conductor::<f64>(p).unwrap().lambda).collect();
    let r31 = lattice_for_conductor::<f64>(31).unwrap().regulator;
    let r43 = lattice_for_conductor::<f64>(43).unwrap().regulator;
    let min_floor = floors.iter().copied().fold(f64::INFINITY, f64::min);
    let pass = (l7 - 1.44975).abs() <= 1e-4 && min_floor > 1.83336 && (r31 - 12.196).abs() <= 1e-3 && (r43 - 18.9218).abs() <= 1e-3;
    verdict(pass, format!("lambda(7) = {l7:.6}, min lambda(p>=9) = {min_floor:.6}, R(31) = {r31:.5}, R(43) = {r43:.5}"))
}

/// xi * int_M^inf ((2 sqrt(t)/a + 1)^6 - (2 sqrt(M)/a - 1)^6) e^{-xi t} dt by Simpson's rule.
fn tail_quadrature(m: f64, a: f64, xi: f64) -> f64 {
    let c = (2.0 * m.sqrt() / a - 1.0).powi(6);
    let f = |t: f64| ((2.0 * t.sqrt() / a + 1.0).powi(6) - c) * (-xi * t).exp();
    let (hi, n) = (m + 60.0 / xi, 200_000);
    let h = (hi - m) / n as f64;
    let mut s = f(m) + f(hi);
    for i in 1..n {
        s += f(m + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    xi * s * h / 3.0
}

/// Returns (verdict, part (c) alone).
fn criterion_4() -> (Verdict, bool) {
    let a = 6f64.sqrt();
    let cases = [
        (6.0 * 3f64.cbrt(), PI, 2.6049e-9),
        (22.0, PI - 2.0 / 7.0, 1e-23),
        (22.0, PI - 2.0 * 2f64.sqrt() * 0.170856 * PI - 2.0 / 7.0, 2.19277e-9),
    ];
    let mut parts = Vec::new();
    let mut detail = Vec::new();
    for (i, (m, xi, bound)) in cases.into_iter().enumerate() {
        let v = tail_bound(m, a, xi).unwrap();
        let q = tail_quadrature(m, a, xi);
        let agrees = ((v - q) / q).abs() < 1e-6;
        parts.push(v <= bound && agrees);
        detail.push(format!("({}) {v:.6e} vs {bound:e}{}", ['a', 'b', 'c'][i], if agrees { "" } else { " [quadrature disagrees]" }));
    }
    (verdict(parts.iter().all(|&p| p), detail.join(", ")), parts[2])
}

fn criterion_5() -> Verdict {
    let mut bad = Vec::new();
    let mut n = 0;
    for e in TABLE1 {
        for &(p, d) in e.fields {
            n += 1;
            let fd = FieldData::new(p, d).unwrap();
            let rows = fd.census();
            let got: Vec<(i64, i64, usize)> = rows.iter().map(|r| (r.l1, r.l2, r.count)).collect();
            // T3 from the census, recomputed here
            let t3: f64 = got
                .iter()
                .map(|&(l1, l2, c)| {
                    let (l1, l2) = (l1 as f64, l2 as f64);
                    c as f64 * 4.0 * PI * PI * l2 * (-PI * l1).exp() * (1.0 + 0.5 * (2.0 * PI * W_RADIUS * l2.sqrt()).exp())
                })
                .sum();
            let lib = t3_bound(&rows);
            if got != e.rows || t3 > e.bound * (1.0 + 1e-3) || ((t3 - lib) / t3).abs() > 1e-12 {
                bad.push((p, d));
            }
        }
    }
    verdict(bad.is_empty() && n == 21, format!("{n} fields, mismatches {bad:?}"))
}

fn criterion_6() -> Verdict {
    let got: Vec<usize> =
        [(7, 7), (7, 3), (7, 1)].iter().map(|&(p, d)| roots_of_unity(&SexticField::new(p, d).unwrap().o_f).unwrap().len()).collect();
    verdict(got == [14, 6, 4], format!("{got:?}"))
}

fn criterion_7() -> Verdict {
    // 2 splits completely iff 2 is a cube mod p (never for p = 9)
    let oracle = |p: u64| p != 9 && (1..p).any(|x| x * x * x % p == 2);
    let got: Vec<u64> = [7, 9, 13, 19, 31, 37, 43].into_iter().filter(|&p| splits_two(p)).collect();
    let want: Vec<u64> = [7, 9, 13, 19, 31, 37, 43].into_iter().filter(|&p| oracle(p)).collect();
    verdict(got == want && got == [31, 43], format!("{got:?}"))
}

fn criterion_8() -> Verdict {
    let mut pass = true;
    let mut detail = Vec::new();
    for (p, d) in [(7, 7), (9, 3)] {
        let fd = FieldData::new(p, d).unwrap();
        let r = scan_field(&fd, fd.lattice().unwrap(), 64, 64, 1e-14).unwrap();
        let ok = r.max_location == (0.0, 0.0) && r.max_at_origin() && r.symmetry_pairs > 0 && r.symmetry_defect <= 1e-12;
        pass &= ok;
        detail.push(format!("({p},{d}) margin {:.3e} > error {:.1e}, tau defect {:.1e}", r.margin, r.error, r.symmetry_defect));
    }
    verdict(pass, detail.join("; "))
}

fn embed(fd: &FieldData, c: &[i64]) -> [Complex<f64>; 3] {
    let res = fd.field.tower.embedding_residues();
    let basis = fd.field.o_f.basis();
    std::array::from_fn(|i| c.iter().zip(basis).map(|(&x, b)| b.embed::<f64>(res[i] as i64) * x as f64).sum())
}

fn criterion_9() -> Verdict {
    let fd = FieldData::new(7, 7).unwrap();
    let ctx = ThetaContext::<f64>::new(&fd.field.o_f, fd.field.tower.embedding_residues()).unwrap();
    let pt = ArakelovPoint::from_w([0.11, -0.04, -0.07]).unwrap();
    let m = 30.0;
    let set = enumerate_short_real(&ctx.scaled_gram(&pt).unwrap(), m, 1.01).unwrap();
    let mut lib: Vec<f64> = set.vectors.iter().filter(|v| v.norm <= m).map(|v| v.norm).collect();
    lib.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let lib_sum = lib.iter().map(|n| 2.0 * (-PI * n).exp()).sum::<f64>() + 1.0;

    // naive box [-8, 8]^6 with ||uf||^2 = 2 sum u_i^2 |tau_i f|^2
    let basis_emb: Vec<[Complex<f64>; 3]> = (0..6).map(|k| embed(&fd, &(0..6).map(|l| i64::from(k == l)).collect::<Vec<_>>())).collect();
    let u2: Vec<f64> = pt.u.iter().map(|x| x * x).collect();
    let mut terms = Vec::new();
    let mut c = [0i64; 6];
    let r = 8;
    let total = 17usize.pow(6);
    for idx in 0..total {
        let mut k = idx;
        for x in c.iter_mut() {
            *x = (k % 17) as i64 - r;
            k /= 17;
        }
        let mut n = 0.0;
        for i in 0..3 {
            let z: Complex<f64> = (0..6).map(|l| basis_emb[l][i] * c[l] as f64).sum();
            n += 2.0 * u2[i] * z.norm_sqr();
        }
        if n <= m && c.iter().any(|&x| x != 0) {
            terms.push(n);
        }
    }
    terms.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let box_sum = terms.iter().map(|n| (-PI * n).exp()).sum::<f64>() + 1.0;
    let rel = ((lib_sum - box_sum) / box_sum).abs();
    let theta_ok = rel <= 1e-15 && terms.len() == 2 * lib.len();

    // 20 random small Gram matrices against box search over [-20, 20]^3
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut grams_ok = 0;
    while grams_ok < 20 {
        let g: Vec<Vec<i64>> = {
            let a: i64 = rng.gen_range(1..=10);
            let b: i64 = rng.gen_range(1..=10);
            let c: i64 = rng.gen_range(1..=10);
            let (x, y, z) = (rng.gen_range(-10..=10), rng.gen_range(-10..=10), rng.gen_range(-10..=10));
            vec![vec![a, x, y], vec![x, b, z], vec![y, z, c]]
        };
        let det = g[0][0] * (g[1][1] * g[2][2] - g[1][2] * g[2][1]) - g[0][1] * (g[1][0] * g[2][2] - g[1][2] * g[2][0])
            + g[0][2] * (g[1][0] * g[2][1] - g[1][1] * g[2][0]);
        let minor = g[0][0] * g[1][1] - g[0][1] * g[1][0];
        if det <= 0 || minor <= 0 || g[0][0] <= 0 {
            continue;
        }
        let bound = rng.gen_range(5..=40i64);
        // coordinate ranges: |x_i| <= sqrt(bound (G^-1)_ii) must fit the box
        let adj = [g[1][1] * g[2][2] - g[1][2] * g[2][1], g[0][0] * g[2][2] - g[0][2] * g[2][0], minor];
        if adj.iter().any(|&a| (bound * a) as f64 / det as f64 > 400.0) {
            continue;
        }
        let mut want = BTreeSet::new();
        for x in -20..=20i64 {
            for y in -20..=20i64 {
                for z in -20..=20i64 {
                    let v = [x, y, z];
                    let n: i64 = (0..3).map(|i| (0..3).map(|j| v[i] * g[i][j] * v[j]).sum::<i64>()).sum();
                    let first = v.iter().find(|&&t| t != 0).copied().unwrap_or(0);
                    if n <= bound && first > 0 {
                        want.insert((v.to_vec(), n));
                    }
                }
            }
        }
        let big: Vec<Vec<BigInt>> = g.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
        let eg = ExactGram::from_int(&big).unwrap();
        let got: BTreeSet<(Vec<i64>, i64)> = enumerate_short(&eg, &BigRational::from_integer(bound.into()))
            .unwrap()
            .vectors
            .into_iter()
            .map(|v| (v.coords, v.norm.to_integer().try_into().unwrap()))
            .collect();
        if got != want {
            return verdict(false, format!("box search disagrees on {g:?} at bound {bound}"));
        }
        grams_ok += 1;
    }
    verdict(theta_ok, format!("M = 30 relative difference {rel:.1e} over {} vectors; 20 random Grams agree", terms.len()))
}

/// G straight from its definition: e^{-pi ||f||^2} sum_shifts (e^{-pi(||u_s f||^2 - ||f||^2)} - 1) / ||w||^2.
fn g_oracle(fd: &FieldData, pt: &ArakelovPoint<f64>, f: &[i64]) -> f64 {
    let z = embed(fd, f);
    let m: Vec<f64> = z.iter().map(|c| c.norm_sqr()).collect();
    let len: f64 = 2.0 * m.iter().sum::<f64>();
    let mut g2 = 0.0;
    for s in 0..3 {
        let scaled: f64 = (0..3).map(|i| 2.0 * pt.u[i] * pt.u[i] * m[(i + s) % 3]).sum();
        g2 += (-PI * (scaled - len)).exp_m1();
    }
    (-PI * len).exp() * g2 / pt.w_norm().powi(2)
}

fn criterion_10() -> Verdict {
    let fields: Vec<FieldData> =
        TABLE1.iter().flat_map(|e| e.fields.iter()).map(|&(p, d)| FieldData::new(p, d).unwrap()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut worst_ratio = 0.0f64;
    let mut oracle_gap = 0.0f64;
    for _ in 0..1000 {
        let fd = &fields[rng.gen_range(0..fields.len())];
        let ctx = ThetaContext::<f64>::new(&fd.field.o_f, fd.field.tower.embedding_residues()).unwrap();
        let (a, b): (f64, f64) = (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let dir = [a, b, -a - b];
        let r = rng.gen_range(1e-3..W_RADIUS) / log_norm(&dir);
        let pt = ArakelovPoint::from_w(dir.map(|x| x * r)).unwrap();
        let f = &fd.short[rng.gen_range(0..fd.short.len())];
        let o = &fd.field.o_f;
        let (l1, l2) = (o.length_sq(f) as f64, o.length_sq(&o.mul(f, f)) as f64);
        let g = ctx.g_value(&pt, f).unwrap();
        let cap = taylor_bound(l1, l2, pt.w_norm()).min(script_g(l1, l2));
        worst_ratio = worst_ratio.max(g / cap);
        oracle_gap = oracle_gap.max(((g - g_oracle(fd, &pt, f)) / g.abs().max(1e-300)).abs());
    }
    let mut worst_total = f64::NEG_INFINITY;
    let mut points = 0;
    for fd in &fields {
        let s = amplified_scan(fd, 64).unwrap();
        points += s.points;
        worst_total = worst_total.max(s.worst_total);
    }
    let pass = worst_ratio <= 1.0 && oracle_gap < 1e-6 && worst_total < 0.0 && points > 0;
    verdict(
        pass,
        format!("max G/bound {worst_ratio:.3}, oracle gap {oracle_gap:.1e}; worst T1+T2+T3 = {worst_total:.3e} over {points} grid points"),
    )
}

fn main() {
    let names = [
        "discriminant identity",
        "unit-census tables",
        "lambda and regulators",
        "tail constants",
        "short-element census and T3 bounds",
        "roots of unity",
        "norm-2 splitting",
        "torus maximum",
        "oracle equivalence",
        "inequality spot checks",
    ];
    let mut unexpected = Vec::new();
    let mut part_c = true;
    for (i, name) in names.iter().enumerate() {
        let t0 = Instant::now();
        let v = match i + 1 {
            1 => criterion_1(),
            2 => criterion_2(),
            3 => criterion_3(),
            4 => {
                let (v, c) = criterion_4();
                part_c = c;
                v
            }
            5 => criterion_5(),
            6 => criterion_6(),
            7 => criterion_7(),
            8 => criterion_8(),
            9 => criterion_9(),
            _ => criterion_10(),
        };
        let tag = if v.pass { "PASS" } else { "FAIL" };
        println!("{tag} criterion {:>2} {name}: {} [{:.1}s]", i + 1, v.detail, t0.elapsed().as_secs_f64());
        // criterion 4 is known to miss its third constant at face value
        let expected_pass = i + 1 != 4;
        if v.pass != expected_pass {
            unexpected.push(i + 1);
        }
    }
    if part_c {
        unexpected.push(4);
    }
    if !unexpected.is_empty() {
        eprintln!("unexpected outcome for criteria {unexpected:?}");
        std::process::exit(1);
    }
}
