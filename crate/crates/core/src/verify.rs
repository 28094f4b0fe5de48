//! Batch checks over the reference field lists, the torus scan, and the
//! amplified-sum grid.
//!
//! Every check is a [`Task`] with a dotted id such as `disc.7_1` or
//! `table1.9_3.census`; [`run_all`] filters tasks by a glob on the id and runs
//! the survivors on the rayon pool. Fields are built once and shared.

use std::collections::{BTreeMap, HashMap};
use std::f64::consts::PI;
use std::fmt::Display;
use std::sync::{Arc, Mutex, OnceLock};
use std::time::Instant;

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::is_squarefree;
use crate::error::{Error, Result};
use crate::field::{build_tower, cubic_order, roots_of_unity, subfield_order, SexticField, Subfield, OrderLattice};
use crate::lattice::{enumerate_short_int, gram_det_int};
use crate::scalar::{Real, Scalar};
use crate::theta::{
    census, constant_5_15519_check, g_from_moduli, gat1_majorant, short_elements, t2_bound, t3_bound, tail_bound,
    ArakelovPoint, CensusRow, ThetaContext, SHORT_BOUND, W_RADIUS,
};
use crate::units::{lattice_for_conductor, log_norm, log_unit_lattice, splits_two, unit_census, wrap_half, LogUnitLattice};

/// Fields with d = 1, 2 mod 4 that may carry short elements outside O_K, O_k and mu_F.
pub const LIST_ONE: &[(u64, u64)] =
    &[(7, 1), (9, 1), (13, 1), (19, 1), (7, 2), (9, 2), (9, 6), (13, 13), (7, 14), (7, 21), (9, 21)];

/// The same for d = 3 mod 4.
pub const LIST_TWO: &[(u64, u64)] = &[
    (7, 3), (9, 3), (13, 3), (19, 3), (31, 3), (37, 3), (43, 3),
    (7, 7), (9, 7), (13, 7), (19, 7), (31, 7),
    (7, 11), (9, 11), (13, 11), (9, 15), (19, 19), (31, 31), (7, 35), (9, 39), (13, 39), (43, 43), (9, 51),
];

/// Both lists plus the two cyclotomic fields.
pub fn discriminant_fields() -> Vec<(u64, u64)> {
    let mut v: Vec<(u64, u64)> = LIST_ONE.iter().chain(LIST_TWO).copied().collect();
    for extra in [(7, 7), (9, 3)] {
        if !v.contains(&extra) {
            v.push(extra);
        }
    }
    v
}

/// One group of fields sharing a census of short elements, with the reference T3 bound.
#[derive(Clone, Copy, Debug)]
pub struct Table1Entry {
    pub fields: &'static [(u64, u64)],
    pub rows: &'static [(i64, i64, usize)],
    pub bound: f64,
}

pub const TABLE1: &[Table1Entry] = &[
    Table1Entry {
        fields: &[(7, 1)],
        rows: &[(10, 26, 12), (12, 24, 4), (12, 52, 12), (16, 52, 24), (18, 82, 24), (20, 76, 24), (20, 104, 12), (20, 132, 12)],
        bound: 3.5200e-7,
    },
    Table1Entry {
        fields: &[(7, 3)],
        rows: &[(10, 26, 18), (12, 52, 18), (14, 42, 36), (16, 52, 36), (18, 54, 6), (18, 82, 36), (20, 132, 18)],
        bound: 5.2784e-7,
    },
    Table1Entry {
        fields: &[(9, 1)],
        rows: &[(12, 24, 4), (12, 36, 12), (18, 66, 24), (18, 90, 12), (18, 138, 12)],
        bound: 3.4064e-9,
    },
    Table1Entry {
        fields: &[(9, 3)],
        rows: &[(12, 36, 108), (18, 54, 18), (18, 66, 108), (18, 90, 54), (18, 138, 54)],
        bound: 2.9425e-8,
    },
    // reference value 1.3672e-9 looks like an exponent slip; the census gives 1.3673e-10, in line with (19,1) and (13,7)
    Table1Entry { fields: &[(13, 1)], rows: &[(12, 24, 4), (18, 106, 12), (20, 84, 12)], bound: 1.3672e-9 },
    Table1Entry { fields: &[(13, 3)], rows: &[(18, 54, 6), (18, 106, 18), (20, 84, 18)], bound: 6.4034e-14 },
    Table1Entry { fields: &[(19, 1)], rows: &[(12, 24, 4)], bound: 1.3668e-10 },
    Table1Entry { fields: &[(19, 3), (31, 3), (37, 3), (43, 3)], rows: &[(18, 54, 6)], bound: 1.2367e-16 },
    Table1Entry {
        fields: &[(7, 2)],
        rows: &[(10, 26, 6), (12, 24, 2), (12, 52, 6), (18, 54, 4), (20, 104, 6), (20, 132, 6)],
        bound: 1.7600e-7,
    },
    Table1Entry {
        fields: &[(7, 7)],
        rows: &[(10, 26, 42), (12, 24, 28), (12, 52, 42), (14, 42, 42), (20, 76, 84), (20, 104, 84), (20, 132, 42)],
        bound: 1.2326e-6,
    },
    Table1Entry {
        fields: &[(9, 2)],
        rows: &[(12, 24, 2), (12, 36, 6), (18, 54, 4), (18, 90, 6), (18, 138, 6)],
        bound: 1.7032e-9,
    },
    Table1Entry { fields: &[(9, 7)], rows: &[(12, 24, 4), (12, 36, 6), (18, 90, 6), (18, 138, 6)], bound: 1.7716e-9 },
    Table1Entry { fields: &[(9, 6), (9, 21)], rows: &[(12, 36, 6), (18, 90, 6), (18, 138, 6)], bound: 1.6349e-9 },
    Table1Entry { fields: &[(13, 7)], rows: &[(12, 24, 4), (18, 106, 6), (20, 84, 6)], bound: 1.3670e-10 },
    Table1Entry { fields: &[(13, 13)], rows: &[(18, 106, 6), (20, 84, 6)], bound: 2.1304e-14 },
    Table1Entry { fields: &[(7, 14), (7, 21)], rows: &[(10, 26, 6), (12, 52, 6), (20, 132, 6)], bound: 1.7593e-7 },
];

pub fn table1_fields() -> Vec<(u64, u64)> {
    TABLE1.iter().flat_map(|e| e.fields.iter().copied()).collect()
}

/// Unit counts up to sign, excluding +-1, with ||g||_K^2 < 44.61/2 and < 33.33/2.
pub const UNIT_TABLE_LARGE: &[(u64, usize)] = &[(7, 18), (9, 12), (13, 6), (19, 6), (31, 0)];
pub const UNIT_TABLE_SMALL: &[(u64, usize)] = &[(7, 12), (9, 6), (13, 6), (19, 3)];

/// Conductors the lambda floor 1.83336 is checked on.
pub const LAMBDA_FLOOR_P: &[u64] = &[9, 13, 19, 31, 37, 43, 61];
pub const SPLIT_P: &[u64] = &[7, 9, 13, 19, 31, 37, 43];

/// Fields outside both lists, spot-checked for the absence of mixed short elements.
pub const DEFAULT_EXCLUDED: &[(u64, u64)] = &[
    (7, 22), (13, 17), (19, 2), (61, 1), (7, 5), (9, 10), (37, 7), (61, 3),
    (19, 11), (7, 19), (13, 15), (7, 23), (9, 5), (13, 2), (31, 1),
];

const T1_CONSTANT: f64 = -98.4664e-9;
const GAT1_MAJORANT: f64 = -15.1198;

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct CheckResult {
    pub check_id: String,
    pub expected: String,
    pub computed: String,
    pub tolerance: String,
    pub pass: bool,
    pub runtime_ms: u64,
    pub provenance: String,
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct ScanReport {
    pub field: (u64, u64),
    pub grid: (usize, usize),
    pub max_location: (f64, f64),
    pub h0_at_origin: f64,
    pub max_off_origin: f64,
    pub margin: f64,
    /// Sum of the certified uncertainties at the origin and at the runner-up.
    pub error: f64,
    /// Largest |h0(x) - h0(tau x)| over grid points whose image is a grid point.
    pub symmetry_defect: f64,
    pub symmetry_pairs: usize,
}

impl ScanReport {
    pub fn max_at_origin(&self) -> bool {
        self.margin > self.error
    }
}

#[derive(Clone, Debug)]
pub struct VerifyConfig {
    pub eps: f64,
    pub grid: usize,
    pub scan_fields: Vec<(u64, u64)>,
    pub excluded_sample: Vec<(u64, u64)>,
    /// Sweep every field of both list universes instead of the sample.
    pub exhaustive: bool,
    pub timing: bool,
    pub precision: u32,
    pub only: Option<String>,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            eps: 1e-14,
            grid: 64,
            scan_fields: vec![(7, 7), (9, 3)],
            excluded_sample: DEFAULT_EXCLUDED.to_vec(),
            exhaustive: false,
            timing: false,
            precision: 53,
            only: None,
        }
    }
}

fn parse_fields(v: &str) -> Result<Vec<(u64, u64)>> {
    v.split(';')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            let (a, b) = s.split_once(',').ok_or_else(|| Error::Precondition(format!("bad field pair {s:?}")))?;
            let p = a.trim().trim_start_matches('(').parse().map_err(|_| Error::Precondition(format!("bad p in {s:?}")))?;
            let d = b.trim().trim_end_matches(')').parse().map_err(|_| Error::Precondition(format!("bad d in {s:?}")))?;
            Ok((p, d))
        })
        .collect()
}

fn fmt_fields(v: &[(u64, u64)]) -> String {
    v.iter().map(|(p, d)| format!("{p},{d}")).collect::<Vec<_>>().join(";")
}

impl VerifyConfig {
    /// Apply one `key=value` setting. Field lists are written `7,7;9,3`.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let bad = || Error::Precondition(format!("bad value {value:?} for {key}"));
        match key {
            "eps" => self.eps = value.parse().map_err(|_| bad())?,
            "grid" => self.grid = value.parse().map_err(|_| bad())?,
            "scan_fields" => self.scan_fields = parse_fields(value)?,
            "excluded_sample" => self.excluded_sample = parse_fields(value)?,
            "exhaustive" => self.exhaustive = value.parse().map_err(|_| bad())?,
            "timing" => self.timing = value.parse().map_err(|_| bad())?,
            "precision" => self.precision = value.parse().map_err(|_| bad())?,
            "only" => self.only = Some(value.to_string()),
            _ => return Err(Error::Precondition(format!("unknown config key {key:?}"))),
        }
        Ok(())
    }

    pub fn to_map(&self) -> BTreeMap<String, String> {
        let mut m = BTreeMap::new();
        m.insert("eps".into(), format!("{:e}", self.eps));
        m.insert("grid".into(), self.grid.to_string());
        m.insert("scan_fields".into(), fmt_fields(&self.scan_fields));
        m.insert("excluded_sample".into(), fmt_fields(&self.excluded_sample));
        m.insert("exhaustive".into(), self.exhaustive.to_string());
        m.insert("timing".into(), self.timing.to_string());
        m.insert("precision".into(), self.precision.to_string());
        if let Some(o) = &self.only {
            m.insert("only".into(), o.clone());
        }
        m
    }
}

/// Expected/computed/tolerance triple and verdict of one check.
#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub expected: String,
    pub computed: String,
    pub tolerance: String,
    pub pass: bool,
}

impl Outcome {
    pub fn exact<A: Display + PartialEq<B>, B: Display>(expected: A, computed: B) -> Self {
        let pass = expected == computed;
        Self { expected: expected.to_string(), computed: computed.to_string(), tolerance: "exact".into(), pass }
    }

    /// computed <= bound.
    pub fn at_most(bound: f64, computed: f64) -> Self {
        Self { expected: format!("<= {bound:e}"), computed: format!("{computed:e}"), tolerance: "face value".into(), pass: computed <= bound }
    }

    /// computed < bound.
    pub fn below(bound: f64, computed: f64) -> Self {
        Self { expected: format!("< {bound:e}"), computed: format!("{computed:e}"), tolerance: "strict".into(), pass: computed < bound }
    }

    pub fn above(bound: f64, computed: f64) -> Self {
        Self { expected: format!("> {bound}"), computed: format!("{computed}"), tolerance: "strict".into(), pass: computed > bound }
    }

    pub fn close(expected: f64, computed: f64, tol: f64) -> Self {
        Self {
            expected: format!("{expected}"),
            computed: format!("{computed}"),
            tolerance: format!("abs {tol:e}"),
            pass: (expected - computed).abs() <= tol,
        }
    }

    fn error(e: impl Display) -> Self {
        Self { expected: String::new(), computed: format!("error: {e}"), tolerance: String::new(), pass: false }
    }
}

type Job<'a> = Box<dyn FnOnce() -> Result<Outcome> + Send + 'a>;

pub struct Task<'a> {
    pub id: String,
    pub provenance: &'static str,
    job: Job<'a>,
}

impl<'a> Task<'a> {
    fn new(id: impl Into<String>, provenance: &'static str, job: impl FnOnce() -> Result<Outcome> + Send + 'a) -> Self {
        Self { id: id.into(), provenance, job: Box::new(job) }
    }

    pub fn run(self, timing: bool) -> CheckResult {
        let t0 = Instant::now();
        let out = (self.job)().unwrap_or_else(Outcome::error);
        CheckResult {
            check_id: self.id,
            expected: out.expected,
            computed: out.computed,
            tolerance: out.tolerance,
            pass: out.pass,
            runtime_ms: if timing { t0.elapsed().as_millis() as u64 } else { 0 },
            provenance: self.provenance.to_string(),
        }
    }
}

/// A field with its short elements and torsion count.
pub struct FieldData {
    pub field: SexticField,
    pub short: Vec<Vec<i64>>,
    pub roots: usize,
    lattice: OnceLock<std::result::Result<LogUnitLattice<f64>, String>>,
}

impl FieldData {
    pub fn new(p: u64, d: u64) -> Result<Self> {
        let field = SexticField::new(p, d)?;
        let short = short_elements(&field.o_f, SHORT_BOUND)?;
        let roots = roots_of_unity(&field.o_f)?.len();
        Ok(Self { field, short, roots, lattice: OnceLock::new() })
    }

    /// Log-unit lattice of O_K, coordinates ordered like the theta embeddings.
    pub fn lattice(&self) -> Result<&LogUnitLattice<f64>> {
        self.lattice
            .get_or_init(|| log_unit_lattice(&self.field.o_cubic).map_err(|e| e.to_string()))
            .as_ref()
            .map_err(|e| Error::Precondition(e.clone()))
    }

    pub fn census(&self) -> Vec<CensusRow> {
        census(&self.field.o_f, &self.short)
    }
}

type Slot = Arc<OnceLock<std::result::Result<Arc<FieldData>, String>>>;

/// Builds each field at most once across concurrent checks.
#[derive(Default)]
pub struct FieldCache {
    map: Mutex<HashMap<(u64, u64), Slot>>,
}

impl FieldCache {
    pub fn get(&self, p: u64, d: u64) -> Result<Arc<FieldData>> {
        let slot = self.map.lock().expect("cache lock").entry((p, d)).or_default().clone();
        slot.get_or_init(|| FieldData::new(p, d).map(Arc::new).map_err(|e| e.to_string()))
            .clone()
            .map_err(Error::Precondition)
    }
}

fn key(p: u64, d: u64) -> String {
    format!("{p}_{d}")
}

const PROV_DISC: &str = "closed form p^4 |D_k|^3 / gcd(p,d)^2";
const PROV_UNITS: &str = "published unit census";
const PROV_LATTICE: &str = "published lambda and regulator values";
const PROV_ROOTS: &str = "published torsion counts";
const PROV_SPLIT: &str = "2 splits in K exactly for p in {31, 43}";
const PROV_TABLE: &str = "published short-element census and T3 bounds";
const PROV_SHORT: &str = "short-element classification";
const PROV_TAIL: &str = "published tail constants";
const PROV_BUDGET: &str = "T3 + T2 below the T1 margin 98.4664e-9 #mu_F";
const PROV_EQUIV: &str = "T1 + T2 + T3 < 0 near the trivial class";
const PROV_SCAN: &str = "unique maximum of h0 at the trivial class";

pub fn discriminant_tasks(cache: &FieldCache) -> Vec<Task<'_>> {
    discriminant_fields()
        .into_iter()
        .map(|(p, d)| {
            Task::new(format!("disc.{}", key(p, d)), PROV_DISC, move || {
                let tower = build_tower(p, d)?;
                let fd = cache.get(p, d)?;
                Ok(Outcome::exact(tower.abs_delta_f(), gram_det_int(fd.field.o_f.gram())))
            })
        })
        .collect()
}

pub fn unit_table_tasks<'a>() -> Vec<Task<'a>> {
    let mut out = Vec::new();
    for &(p, want) in UNIT_TABLE_LARGE {
        out.push(Task::new(format!("units.census_4461.p{p}"), PROV_UNITS, move || {
            Ok(Outcome::exact(want, unit_census(p, 4461, 200)?))
        }));
    }
    for &(p, want) in UNIT_TABLE_SMALL {
        out.push(Task::new(format!("units.census_3333.p{p}"), PROV_UNITS, move || {
            Ok(Outcome::exact(want, unit_census(p, 3333, 200)?))
        }));
    }
    out
}

pub fn unit_lattice_tasks<'a>() -> Vec<Task<'a>> {
    let mut out = vec![Task::new("units.lambda.p7", PROV_LATTICE, || {
        Ok(Outcome::close(1.44975, lattice_for_conductor::<f64>(7)?.lambda, 1e-4))
    })];
    for &p in LAMBDA_FLOOR_P {
        out.push(Task::new(format!("units.lambda_floor.p{p}"), PROV_LATTICE, move || {
            Ok(Outcome::above(1.83336, lattice_for_conductor::<f64>(p)?.lambda))
        }));
    }
    for (p, r) in [(31u64, 12.196), (43, 18.9218)] {
        out.push(Task::new(format!("units.regulator.p{p}"), PROV_LATTICE, move || {
            Ok(Outcome::close(r, lattice_for_conductor::<f64>(p)?.regulator, 1e-3))
        }));
    }
    for p in [7u64, 9, 13, 19, 31, 37, 43, 61] {
        out.push(Task::new(format!("units.hexagonal.p{p}"), PROV_LATTICE, move || {
            Ok(Outcome::at_most(1e-9, lattice_for_conductor::<f64>(p)?.hexagonality_defect()))
        }));
    }
    out
}

pub fn roots_tasks(cache: &FieldCache) -> Vec<Task<'_>> {
    [((7u64, 7u64), 14usize), ((7, 3), 6), ((7, 1), 4)]
        .into_iter()
        .map(|((p, d), want)| {
            Task::new(format!("roots.{}", key(p, d)), PROV_ROOTS, move || Ok(Outcome::exact(want, cache.get(p, d)?.roots)))
        })
        .collect()
}

pub fn split_tasks<'a>() -> Vec<Task<'a>> {
    SPLIT_P
        .iter()
        .map(|&p| {
            Task::new(format!("splits.p{p}"), PROV_SPLIT, move || Ok(Outcome::exact(p == 31 || p == 43, splits_two(p))))
        })
        .collect()
}

fn rows_string(rows: &[(i64, i64, usize)]) -> String {
    rows.iter().map(|(a, b, c)| format!("({a},{b},{c})")).collect::<Vec<_>>().join(" ")
}

pub fn table1_tasks(cache: &FieldCache) -> Vec<Task<'_>> {
    let mut out = Vec::new();
    for entry in TABLE1 {
        for &(p, d) in entry.fields {
            out.push(Task::new(format!("table1.{}.census", key(p, d)), PROV_TABLE, move || {
                let got: Vec<(i64, i64, usize)> = cache.get(p, d)?.census().iter().map(|r| (r.l1, r.l2, r.count)).collect();
                Ok(Outcome::exact(rows_string(entry.rows), rows_string(&got)))
            }));
            out.push(Task::new(format!("table1.{}.t3", key(p, d)), PROV_TABLE, move || {
                let t3 = t3_bound(&cache.get(p, d)?.census());
                let limit = entry.bound * (1.0 + 1e-3);
                Ok(Outcome {
                    expected: format!("<= {:.4e}", entry.bound),
                    computed: format!("{t3:.4e}"),
                    tolerance: "rel 1e-3".into(),
                    pass: t3 <= limit,
                })
            }));
        }
    }
    out
}

/// Is f outside O_K (fixed by conjugation), O_k (fixed by tau^2) and mu_F?
pub fn is_mixed(order: &OrderLattice, f: &[i64]) -> bool {
    order.conj(f) != f && order.tau(&order.tau(f)) != f && order.mul(f, &order.conj(f)) != order.one()
}

fn mixed_count(fd: &FieldData) -> usize {
    fd.short.iter().filter(|f| is_mixed(&fd.field.o_f, f)).count()
}

/// Minimum ||f||^2 over non-rational elements of a subfield order, scaled to F.
fn subfield_minimum(order: &OrderLattice, fixed: impl Fn(&[i64]) -> bool, scale: i64, bound: i64) -> Result<Option<i64>> {
    Ok(enumerate_short_int(order.gram(), bound)?
        .into_iter()
        .filter(|(v, _)| !fixed(v))
        .map(|(_, n)| n * scale)
        .min())
}

fn quadratic_minimum(d: u64) -> Result<Option<i64>> {
    let tower = build_tower(7, d)?;
    let ok = subfield_order(&tower, Subfield::Quadratic)?;
    subfield_minimum(&ok, |v| ok.conj(v) == v, 1, SHORT_BOUND - 1)
}

fn cubic_minimum(p: u64) -> Result<Option<i64>> {
    let ok = cubic_order(p)?;
    // ||f||^2 = 2 ||f||_K^2 < 22
    subfield_minimum(&ok, |v| ok.tau(v) == v, 2, (SHORT_BOUND - 1) / 2)
}

/// Conductors and discriminant parameters of the two list universes.
pub fn list_universe() -> Vec<(u64, u64)> {
    let mut u = Vec::new();
    for p in [7u64, 9, 13, 19, 31, 37, 43, 61] {
        for d in 1..=59u64 {
            if is_squarefree(d) && (d % 4 == 3 || d <= 22) {
                u.push((p, d));
            }
        }
    }
    u
}

fn fmt_set<T: std::fmt::Debug>(v: &[T]) -> String {
    format!("{v:?}")
}

pub fn short_element_tasks<'a>(cache: &'a FieldCache, cfg: &VerifyConfig) -> Vec<Task<'a>> {
    let mut out = vec![
        Task::new("short.quadratic", PROV_SHORT, || {
            let mut hits = Vec::new();
            for d in (1..=59u64).filter(|&d| is_squarefree(d)) {
                if quadratic_minimum(d)?.is_some() {
                    hits.push(d);
                }
            }
            Ok(Outcome::exact(fmt_set(&[1u64, 2, 3, 7, 11]), fmt_set(&hits)))
        }),
        Task::new("short.cubic", PROV_SHORT, || {
            let mut hits = Vec::new();
            for p in [7u64, 9, 13, 19, 31, 37, 43, 61] {
                if cubic_minimum(p)?.is_some() {
                    hits.push(p);
                }
            }
            Ok(Outcome::exact(fmt_set(&[7u64, 9, 13]), fmt_set(&hits)))
        }),
        Task::new("short.element.d1", PROV_SHORT, || {
            // basis {1, i}
            let ok = subfield_order(&build_tower(7, 1)?, Subfield::Quadratic)?;
            Ok(Outcome::exact(12, ok.length_sq(&[1, 1])))
        }),
        Task::new("short.minimum.p13", PROV_SHORT, || {
            let m = cubic_minimum(13)?.unwrap_or(i64::MAX);
            Ok(Outcome::below(SHORT_BOUND as f64, m as f64))
        }),
    ];
    let listed: Vec<(u64, u64)> = LIST_ONE.iter().chain(LIST_TWO).copied().collect();
    for &(p, d) in &cfg.excluded_sample {
        let listed = listed.contains(&(p, d));
        out.push(Task::new(format!("short.excluded.{}", key(p, d)), PROV_SHORT, move || {
            if listed {
                return Err(Error::Precondition(format!("({p},{d}) is a listed field")));
            }
            Ok(Outcome::exact(0, mixed_count(&*cache.get(p, d)?)))
        }));
    }
    if cfg.exhaustive {
        out.push(Task::new("short.universe", PROV_SHORT, move || {
            let mut hits: Vec<(u64, u64)> = list_universe()
                .into_par_iter()
                .map(|(p, d)| FieldData::new(p, d).map(|fd| (p, d, mixed_count(&fd))))
                .collect::<Result<Vec<_>>>()?
                .into_iter()
                .filter(|r| r.2 > 0)
                .map(|r| (r.0, r.1))
                .collect();
            hits.sort();
            let outside: Vec<_> = hits.iter().filter(|f| !listed.contains(f)).copied().collect();
            Ok(Outcome {
                expected: "mixed short elements only in listed fields".into(),
                computed: format!("{} fields with mixed short elements, outside lists: {}", hits.len(), fmt_set(&outside)),
                tolerance: "exact".into(),
                pass: outside.is_empty(),
            })
        }));
    }
    out
}

/// Unit vectors (under ||.||) spanning the trace-zero plane.
fn plane_basis() -> ([f64; 3], [f64; 3]) {
    let e1 = [1.0, -1.0, 0.0];
    let e2 = [1.0, 1.0, -2.0];
    let n1 = log_norm(&e1);
    let n2 = log_norm(&e2);
    (e1.map(|x| x / n1), e2.map(|x| x / n2))
}

/// Largest G(u, 1) over a polar grid of `n` radii by `n` angles in 0 < ||w|| < 0.24163.
pub fn gat1_sup(n: usize) -> f64 {
    let (e1, e2) = plane_basis();
    let mut best = f64::NEG_INFINITY;
    for i in 1..=n {
        let r = W_RADIUS * i as f64 / (n as f64 + 1e-9);
        for j in 0..n {
            let th = 2.0 * PI * j as f64 / n as f64;
            let w: [f64; 3] = std::array::from_fn(|k| r * (th.cos() * e1[k] + th.sin() * e2[k]));
            best = best.max(g_from_moduli(&w, [1.0; 3], 6.0));
        }
    }
    best
}

pub fn tail_tasks<'a>() -> Vec<Task<'a>> {
    let a = 6f64.sqrt();
    vec![
        Task::new("tail.sigma3", PROV_TAIL, move || Ok(Outcome::at_most(2.6049e-9, tail_bound(6.0 * 3f64.cbrt(), a, PI)?))),
        Task::new("tail.t2_first", PROV_TAIL, move || Ok(Outcome::at_most(1e-23, tail_bound(22.0, a, PI - 2.0 / 7.0)?))),
        Task::new("tail.t2_second", PROV_TAIL, move || {
            let xi = PI - 2.0 * 2f64.sqrt() * 0.170856 * PI - 2.0 / 7.0;
            Ok(Outcome::at_most(2.19277e-9, tail_bound(22.0, a, xi)?))
        }),
        Task::new("tail.t2_total", PROV_TAIL, || Ok(Outcome::at_most(2.19278e-9, t2_bound::<f64>()?))),
        Task::new("tail.gat1", PROV_TAIL, || Ok(Outcome::below(T1_CONSTANT, gat1_sup(100)))),
        Task::new("tail.gat1_majorant", PROV_TAIL, || {
            // increasing in r, so the last sample is the supremum over the open ball
            let worst = (1..=10_000).map(|i| gat1_majorant(W_RADIUS * i as f64 / 10_000.0)).fold(f64::NEG_INFINITY, f64::max);
            Ok(Outcome::below(GAT1_MAJORANT, worst))
        }),
        Task::new("tail.constrained_max", PROV_TAIL, || Ok(Outcome::below(5.15519, constant_5_15519_check().value))),
    ]
}

pub fn budget_tasks(cache: &FieldCache) -> Vec<Task<'_>> {
    table1_fields()
        .into_iter()
        .map(|(p, d)| {
            Task::new(format!("budget.{}", key(p, d)), PROV_BUDGET, move || {
                let fd = cache.get(p, d)?;
                let room = -T1_CONSTANT * fd.roots as f64;
                Ok(Outcome::below(room, t3_bound(&fd.census()) + t2_bound::<f64>()?))
            })
        })
        .collect()
}

/// Signed grid coordinates k/N, k in (-N/2, N/2], so alpha lies in (-1/2, 1/2].
pub fn grid_alphas(n: usize) -> Vec<f64> {
    let lo = -((n as i64 - 1) / 2);
    let hi = n as i64 / 2;
    (lo..=hi).map(|k| k as f64 / n as f64).collect()
}

/// Worst value of T1 + T2_bound + T3 over grid points with 0 < ||w|| < 0.24163.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AmplifiedScan {
    pub points: usize,
    pub worst_total: f64,
    pub worst_alpha: (f64, f64),
}

pub fn amplified_scan(fd: &FieldData, grid: usize) -> Result<AmplifiedScan> {
    let lat = fd.lattice()?;
    let ctx = ThetaContext::<f64>::new(&fd.field.o_f, fd.field.tower.embedding_residues())?;
    let al = grid_alphas(grid);
    let pts: Vec<(f64, f64)> = al.iter().flat_map(|&a| al.iter().map(move |&b| (a, b))).collect();
    let vals = pts
        .par_iter()
        .filter_map(|&(a, b)| {
            let w = lat.point(a, b);
            let r = log_norm(&w);
            (r > 0.0 && r < W_RADIUS).then_some((a, b, w))
        })
        .map(|(a, b, w)| {
            let pt = ArakelovPoint::from_w(w)?;
            Ok(((a, b), ctx.amplified_sums(&pt, fd.roots, &fd.short)?.total()))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut out = AmplifiedScan { points: vals.len(), worst_total: f64::NEG_INFINITY, worst_alpha: (0.0, 0.0) };
    for (loc, t) in vals {
        if t > out.worst_total {
            out.worst_total = t;
            out.worst_alpha = loc;
        }
    }
    Ok(out)
}

pub fn equiv_tasks<'a>(cache: &'a FieldCache, cfg: &VerifyConfig) -> Vec<Task<'a>> {
    let grid = cfg.grid;
    table1_fields()
        .into_iter()
        .map(|(p, d)| {
            Task::new(format!("equiv.{}", key(p, d)), PROV_EQUIV, move || {
                let s = amplified_scan(&*cache.get(p, d)?, grid)?;
                if s.points == 0 {
                    return Err(Error::Precondition(format!("no grid point of a {grid}-grid lies in the ball")));
                }
                let mut o = Outcome::below(0.0, s.worst_total);
                o.computed = format!("{:e} (worst of {} points)", s.worst_total, s.points);
                Ok(o)
            })
        })
        .collect()
}

/// h0 over an n1 x n2 grid of the fundamental domain, with the tau-symmetry check.
pub fn scan_field<T: Real + Scalar>(fd: &FieldData, lattice: &LogUnitLattice<T>, n1: usize, n2: usize, eps: T) -> Result<ScanReport> {
    if n1 < 16 || n2 < 16 {
        return Err(Error::Precondition("grid sizes must be at least 16".into()));
    }
    let ctx = ThetaContext::<T>::new(&fd.field.o_f, fd.field.tower.embedding_residues())?;
    let (a1s, a2s) = (grid_alphas(n1), grid_alphas(n2));
    let idx: Vec<(usize, usize)> = (0..a1s.len()).flat_map(|i| (0..a2s.len()).map(move |j| (i, j))).collect();
    let vals: Vec<(f64, f64)> = idx
        .par_iter()
        .map(|&(i, j)| {
            let w = lattice.point(T::lit(a1s[i]), T::lit(a2s[j]));
            let (h, unc) = ctx.h0(&ArakelovPoint::from_w(w)?, eps)?;
            // rounding in the sum adds a few ulps of k0 on top of the tail
            let unc = unc + T::epsilon() * T::lit(64.0);
            Ok((Scalar::to_f64(&h), Scalar::to_f64(&unc)))
        })
        .collect::<Result<Vec<_>>>()?;
    let at = |i: usize, j: usize| vals[i * a2s.len() + j];
    let (oi, oj) = (a1s.iter().position(|&a| a == 0.0).unwrap_or(0), a2s.iter().position(|&a| a == 0.0).unwrap_or(0));
    let (h_origin, u_origin) = at(oi, oj);
    let mut best = (f64::NEG_INFINITY, 0.0, (0usize, 0usize));
    let mut global = (f64::NEG_INFINITY, (0.0, 0.0));
    for &(i, j) in &idx {
        let (h, u) = at(i, j);
        if h > global.0 {
            global = (h, (a1s[i], a2s[j]));
        }
        if (i, j) != (oi, oj) && h > best.0 {
            best = (h, u, (i, j));
        }
    }
    // tau permutes the coordinates of w; map each point back to the grid
    let (mut defect, mut pairs) = (0.0f64, 0usize);
    for &(i, j) in &idx {
        let w = lattice.point(T::lit(a1s[i]), T::lit(a2s[j]));
        let (b1, b2) = lattice.solve(&[w[1], w[2], w[0]]);
        let (b1, b2) = (Scalar::to_f64(&wrap_half(b1)), Scalar::to_f64(&wrap_half(b2)));
        let (k1, k2) = ((b1 * n1 as f64).round(), (b2 * n2 as f64).round());
        if (b1 * n1 as f64 - k1).abs() > 1e-6 || (b2 * n2 as f64 - k2).abs() > 1e-6 {
            continue;
        }
        let (Some(ti), Some(tj)) = (
            a1s.iter().position(|&a| (a * n1 as f64 - k1).abs() < 0.5),
            a2s.iter().position(|&a| (a * n2 as f64 - k2).abs() < 0.5),
        ) else {
            continue;
        };
        defect = defect.max((at(i, j).0 - at(ti, tj).0).abs());
        pairs += 1;
    }
    let margin = h_origin - best.0;
    Ok(ScanReport {
        field: (fd.field.tower.p, fd.field.tower.d),
        grid: (n1, n2),
        max_location: global.1,
        h0_at_origin: h_origin,
        max_off_origin: best.0,
        margin,
        error: u_origin + best.1,
        symmetry_defect: defect,
        symmetry_pairs: pairs,
    })
}

/// Scan one field; fails with `Unresolved` when the margin is inside the error.
pub fn scan_torus<T: Real + Scalar>(p: u64, d: u64, n1: usize, n2: usize, eps: T) -> Result<ScanReport> {
    let fd = FieldData::new(p, d)?;
    let lattice = log_unit_lattice::<T>(&fd.field.o_cubic)?;
    let r = scan_field(&fd, &lattice, n1, n2, eps)?;
    if r.margin.abs() <= r.error {
        return Err(Error::Unresolved(format!("margin {:e} within error {:e}", r.margin, r.error)));
    }
    Ok(r)
}

fn scan_any(fd: &FieldData, grid: usize, eps: f64, precision: u32) -> Result<ScanReport> {
    if precision <= 24 {
        let lat = log_unit_lattice::<f32>(&fd.field.o_cubic)?;
        scan_field(fd, &lat, grid, grid, eps as f32)
    } else {
        scan_field(fd, fd.lattice()?, grid, grid, eps)
    }
}

/// Tolerance on the tau-symmetry of scanned h0 values.
pub const SYMMETRY_TOL: f64 = 1e-12;

fn scan_outcomes(r: &ScanReport) -> (Outcome, Outcome) {
    let max = Outcome {
        expected: format!("maximum at (0,0) with margin > error {:e}", r.error),
        computed: format!("maximum at ({}, {}), margin {:e}", r.max_location.0, r.max_location.1, r.margin),
        tolerance: "certified".into(),
        pass: r.max_at_origin(),
    };
    let sym = Outcome {
        expected: format!("<= {SYMMETRY_TOL:e}"),
        computed: format!("{:e} over {} pairs", r.symmetry_defect, r.symmetry_pairs),
        tolerance: "abs".into(),
        pass: r.symmetry_pairs > 0 && r.symmetry_defect <= SYMMETRY_TOL,
    };
    (max, sym)
}

/// Everything `verify` produces.
#[derive(Clone, Debug, Default, Serialize, PartialEq)]
pub struct SuiteResult {
    pub checks: Vec<CheckResult>,
    pub scans: Vec<ScanReport>,
}

impl SuiteResult {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

fn matches(only: &Option<glob::Pattern>, id: &str) -> bool {
    only.as_ref().is_none_or(|p| p.matches(id))
}

/// Run every configured check whose id matches `cfg.only`, plus the torus scans.
pub fn run_all(cfg: &VerifyConfig) -> Result<SuiteResult> {
    let only = cfg
        .only
        .as_deref()
        .map(glob::Pattern::new)
        .transpose()
        .map_err(|e| Error::Precondition(format!("bad glob: {e}")))?;
    let cache = FieldCache::default();
    let mut tasks = Vec::new();
    tasks.extend(discriminant_tasks(&cache));
    tasks.extend(unit_table_tasks());
    tasks.extend(unit_lattice_tasks());
    tasks.extend(roots_tasks(&cache));
    tasks.extend(split_tasks());
    tasks.extend(table1_tasks(&cache));
    tasks.extend(short_element_tasks(&cache, cfg));
    tasks.extend(tail_tasks());
    tasks.extend(budget_tasks(&cache));
    tasks.extend(equiv_tasks(&cache, cfg));
    tasks.retain(|t| matches(&only, &t.id));
    let timing = cfg.timing;
    let mut checks: Vec<CheckResult> = tasks.into_par_iter().map(|t| t.run(timing)).collect();

    let mut scans = Vec::new();
    for &(p, d) in &cfg.scan_fields {
        let (id_max, id_sym) = (format!("scan.{}.max", key(p, d)), format!("scan.{}.symmetry", key(p, d)));
        if !matches(&only, &id_max) && !matches(&only, &id_sym) {
            continue;
        }
        let t0 = Instant::now();
        let res = cache.get(p, d).and_then(|fd| scan_any(&fd, cfg.grid, cfg.eps, cfg.precision));
        let ms = if timing { t0.elapsed().as_millis() as u64 } else { 0 };
        let (om, os) = match &res {
            Ok(r) => scan_outcomes(r),
            Err(e) => (Outcome::error(e), Outcome::error(e)),
        };
        for (id, o) in [(id_max, om), (id_sym, os)] {
            if matches(&only, &id) {
                checks.push(CheckResult {
                    check_id: id,
                    expected: o.expected,
                    computed: o.computed,
                    tolerance: o.tolerance,
                    pass: o.pass,
                    runtime_ms: ms,
                    provenance: PROV_SCAN.into(),
                });
            }
        }
        if let Ok(r) = res {
            scans.push(r);
        }
    }
    Ok(SuiteResult { checks, scans })
}

/// Exact |Delta_F| for a field, from the closed form.
pub fn expected_discriminant(p: u64, d: u64) -> Result<BigInt> {
    Ok(build_tower(p, d)?.abs_delta_f())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn list_sizes() {
        assert_eq!(discriminant_fields().len(), 34);
        assert_eq!(table1_fields().len(), 21);
        assert_eq!(list_universe().len(), 192);
        // the excluded sample avoids the lists
        let listed = discriminant_fields();
        assert!(DEFAULT_EXCLUDED.iter().all(|f| !listed.contains(f)));
    }

    #[test]
    fn grid_is_half_open() {
        let a = grid_alphas(64);
        assert_eq!(a.len(), 64);
        assert_eq!(*a.last().unwrap(), 0.5);
        assert!(a[0] > -0.5 && a.contains(&0.0));
        let b = grid_alphas(17);
        assert_eq!(b.len(), 17);
        assert!(b.iter().all(|&x| x > -0.5 && x <= 0.5));
    }

    #[test]
    fn config_roundtrip() {
        let mut c = VerifyConfig::default();
        c.set("grid", "32").unwrap();
        c.set("scan_fields", "7,7; 9,3").unwrap();
        assert_eq!(c.scan_fields, vec![(7, 7), (9, 3)]);
        assert_eq!(c.to_map()["grid"], "32");
        assert!(c.set("nope", "1").is_err());
        assert!(c.set("eps", "x").is_err());
    }

    #[test]
    fn outcome_comparisons() {
        assert!(Outcome::exact(3, 3).pass);
        assert!(!Outcome::exact(3, 4).pass);
        assert!(Outcome::at_most(1.0, 1.0).pass);
        assert!(!Outcome::below(1.0, 1.0).pass);
        assert!(Outcome::close(1.0, 1.00005, 1e-4).pass);
    }

    #[test]
    fn filtered_run() {
        let cfg = VerifyConfig { only: Some("disc.7_*".into()), ..Default::default() };
        let r = run_all(&cfg).unwrap();
        let ids: Vec<&str> = r.checks.iter().map(|c| c.check_id.as_str()).collect();
        assert!(ids.contains(&"disc.7_1") && ids.contains(&"disc.7_35"));
        assert!(ids.iter().all(|i| i.starts_with("disc.7_")));
        assert!(r.all_pass() && r.scans.is_empty());
    }

    #[test]
    fn gat1_sample_sits_below_constant() {
        let s = gat1_sup(40);
        assert!(s < T1_CONSTANT && s > 1.01 * T1_CONSTANT, "{s}");
    }

    #[test]
    fn mixed_membership() {
        let fd = FieldData::new(7, 1).unwrap();
        let o = &fd.field.o_f;
        assert!(!is_mixed(o, o.one()));
        let delta = fd.field.quadratic_to_f(&[0, 1]);
        assert!(!is_mixed(o, &delta));
        let oc = &fd.field.o_cubic;
        let e = (0..3).map(|k| (0..3).map(|l| i64::from(k == l)).collect::<Vec<i64>>()).find(|e| oc.tau(e) != *e).unwrap();
        let g = fd.field.cubic_to_f(&e);
        assert!(!is_mixed(o, &g) && is_mixed(o, &o.mul(&g, &delta)));
        assert_eq!(mixed_count(&fd), 51);
    }
}
