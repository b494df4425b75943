//! Toric surface codes: construction, sections, and exhaustive searches.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::{FieldElement, FieldSpec};
use crate::polygon::{convex_hull, LatticePoint, LatticePolygon};

#[derive(Debug, Error)]
pub enum CodeError {
    #[error("polygon does not fit in the box [0, {side}]^2 for q = {q}")]
    PolygonTooLargeForField { q: u32, side: i64 },
    #[error("section support {0} lies outside the code's polygon")]
    SupportOutsidePolygon(LatticePoint),
    #[error("generator rank {rank} differs from the lattice point count {points}")]
    RankDeficient { rank: usize, points: usize },
    #[error("deadline exceeded after {codewords} codewords; best weight so far {best_upper}")]
    DeadlineExceeded { best_upper: usize, codewords: u64 },
    #[error("message space q^k = {size} exceeds the limit {limit}")]
    TooLarge { size: f64, limit: u64 },
    #[error("checkpoint: {0}")]
    Checkpoint(String),
    #[error("thread pool: {0}")]
    ThreadPool(String),
}

/// A polynomial `sum c_m x^{m_1} y^{m_2}` with nonzero coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SectionPoly {
    terms: BTreeMap<LatticePoint, FieldElement>,
}

#[derive(Serialize)]
struct TermOut {
    exponent: LatticePoint,
    coefficient: FieldElement,
}

/// Serialized as `[{"exponent": [x, y], "coefficient": c}, ...]` in exponent order.
impl Serialize for SectionPoly {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        ser.collect_seq(
            self.terms
                .iter()
                .map(|(&exponent, &coefficient)| TermOut { exponent, coefficient }),
        )
    }
}

impl SectionPoly {
    pub fn zero() -> Self {
        SectionPoly::default()
    }

    pub fn constant(c: FieldElement) -> Self {
        SectionPoly::monomial(LatticePoint::ORIGIN, c)
    }

    pub fn monomial(exp: LatticePoint, c: FieldElement) -> Self {
        let mut s = SectionPoly::zero();
        if !c.is_zero() {
            s.terms.insert(exp, c);
        }
        s
    }

    /// Sums coefficients of repeated exponents and drops zeros.
    pub fn from_terms<I>(field: &FieldSpec, terms: I) -> Self
    where
        I: IntoIterator<Item = (LatticePoint, FieldElement)>,
    {
        let mut s = SectionPoly::zero();
        for (m, c) in terms {
            s.add_term(field, m, c);
        }
        s
    }

    pub fn add_term(&mut self, field: &FieldSpec, m: LatticePoint, c: FieldElement) {
        let cur = self.terms.get(&m).copied().unwrap_or(FieldElement::ZERO);
        let v = field.add(cur, c);
        if v.is_zero() {
            self.terms.remove(&m);
        } else {
            self.terms.insert(m, v);
        }
    }

    /// `x - alpha`.
    pub fn x_minus(field: &FieldSpec, alpha: FieldElement) -> Self {
        SectionPoly::from_terms(
            field,
            [
                (LatticePoint::new(1, 0), FieldElement::ONE),
                (LatticePoint::ORIGIN, field.neg(alpha)),
            ],
        )
    }

    /// `y - beta`.
    pub fn y_minus(field: &FieldSpec, beta: FieldElement) -> Self {
        SectionPoly::from_terms(
            field,
            [
                (LatticePoint::new(0, 1), FieldElement::ONE),
                (LatticePoint::ORIGIN, field.neg(beta)),
            ],
        )
    }

    pub fn terms(&self) -> impl Iterator<Item = (LatticePoint, FieldElement)> + '_ {
        self.terms.iter().map(|(&m, &c)| (m, c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn mul(&self, other: &SectionPoly, field: &FieldSpec) -> SectionPoly {
        let mut out = SectionPoly::zero();
        for (&a, &ca) in &self.terms {
            for (&b, &cb) in &other.terms {
                out.add_term(field, a + b, field.mul(ca, cb));
            }
        }
        out
    }

    pub fn shift(&self, t: LatticePoint) -> SectionPoly {
        SectionPoly {
            terms: self.terms.iter().map(|(&m, &c)| (m + t, c)).collect(),
        }
    }

    /// Hull of the support; `None` for the zero polynomial.
    pub fn newton_polygon(&self) -> Option<LatticePolygon> {
        let pts: Vec<LatticePoint> = self.terms.keys().copied().collect();
        convex_hull(&pts).ok()
    }

    pub fn evaluate(&self, field: &FieldSpec, x: FieldElement, y: FieldElement) -> FieldElement {
        self.terms.iter().fold(FieldElement::ZERO, |acc, (m, &c)| {
            let term = field.mul(c, field.mul(pow_signed(field, x, m.x), pow_signed(field, y, m.y)));
            field.add(acc, term)
        })
    }

    /// Values at the torus points `(xi^i, xi^j)`, row-major.
    pub fn evaluate_on_torus(&self, field: &FieldSpec) -> Vec<FieldElement> {
        let m = (field.order() - 1) as i64;
        let logs: Vec<(LatticePoint, i64)> = self
            .terms
            .iter()
            .map(|(&e, &c)| (e, field.log(c).expect("nonzero coefficient") as i64))
            .collect();
        let mut out = Vec::with_capacity((m * m) as usize);
        for i in 0..m {
            for j in 0..m {
                let v = logs.iter().fold(FieldElement::ZERO, |acc, &(e, lc)| {
                    field.add(acc, field.xi_pow(lc + i * e.x + j * e.y))
                });
                out.push(v);
            }
        }
        out
    }
}

fn pow_signed(field: &FieldSpec, a: FieldElement, n: i64) -> FieldElement {
    if n >= 0 {
        field.pow(a, n as u64)
    } else {
        field.pow(field.inv(a).expect("torus point is nonzero"), n.unsigned_abs())
    }
}

/// Number of points of `(F_q^*)^2` where `s` vanishes.
pub fn count_torus_zeros(s: &SectionPoly, field: &FieldSpec) -> usize {
    s.evaluate_on_torus(field).iter().filter(|v| v.is_zero()).count()
}

/// The evaluation code `C_P(F_q)`.
#[derive(Debug, Clone)]
pub struct ToricCode {
    source: LatticePolygon,
    polygon: LatticePolygon,
    translation: LatticePoint,
    field: FieldSpec,
    monomials: Vec<LatticePoint>,
    /// Row-major `k x n`.
    generator: Vec<FieldElement>,
    n: usize,
    k: usize,
}

pub fn build_code(p: &LatticePolygon, field: &FieldSpec) -> Result<ToricCode, CodeError> {
    let q = field.order();
    let translation = p
        .fits_in_box(q)
        .ok_or(CodeError::PolygonTooLargeForField { q, side: q as i64 - 2 })?;
    let polygon = p.translate(translation);
    let monomials = polygon.lattice_points();
    let m = (q - 1) as i64;
    let n = (m * m) as usize;
    let mut generator = Vec::with_capacity(monomials.len() * n);
    for e in &monomials {
        for i in 0..m {
            for j in 0..m {
                generator.push(field.xi_pow(i * e.x + j * e.y));
            }
        }
    }
    let code = ToricCode {
        source: p.clone(),
        polygon,
        translation,
        field: field.clone(),
        k: monomials.len(),
        monomials,
        generator,
        n,
    };
    let rank = code.rank();
    if rank != code.k {
        return Err(CodeError::RankDeficient { rank, points: code.k });
    }
    Ok(code)
}

impl ToricCode {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    /// The polygon as given by the caller.
    pub fn source_polygon(&self) -> &LatticePolygon {
        &self.source
    }

    /// The polygon after translation into the box.
    pub fn polygon(&self) -> &LatticePolygon {
        &self.polygon
    }

    pub fn translation(&self) -> LatticePoint {
        self.translation
    }

    pub fn monomials(&self) -> &[LatticePoint] {
        &self.monomials
    }

    pub fn row(&self, r: usize) -> &[FieldElement] {
        &self.generator[r * self.n..(r + 1) * self.n]
    }

    /// Rank of the generator matrix by Gaussian elimination over F_q.
    pub fn rank(&self) -> usize {
        let f = &self.field;
        let mut rows: Vec<Vec<FieldElement>> = (0..self.k).map(|r| self.row(r).to_vec()).collect();
        let mut rank = 0;
        for col in 0..self.n {
            let Some(pivot) = (rank..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
                continue;
            };
            rows.swap(rank, pivot);
            let inv = f.inv(rows[rank][col]).expect("pivot is nonzero");
            for v in rows[rank].iter_mut() {
                *v = f.mul(*v, inv);
            }
            let pivot = rows[rank].clone();
            for (r, row) in rows.iter_mut().enumerate() {
                if r != rank && !row[col].is_zero() {
                    let factor = row[col];
                    for (v, &g) in row.iter_mut().zip(&pivot) {
                        *v = f.sub(*v, f.mul(factor, g));
                    }
                }
            }
            rank += 1;
            if rank == rows.len() {
                break;
            }
        }
        rank
    }

    /// Codeword for a message indexed like `monomials`.
    pub fn encode(&self, message: &[FieldElement]) -> Vec<FieldElement> {
        assert_eq!(message.len(), self.k);
        let f = &self.field;
        let mut out = vec![FieldElement::ZERO; self.n];
        for (r, &c) in message.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for (o, &g) in out.iter_mut().zip(self.row(r)) {
                *o = f.add(*o, f.mul(c, g));
            }
        }
        out
    }

    /// Codeword of a section written in the caller's polygon coordinates.
    pub fn evaluate_section(&self, s: &SectionPoly) -> Result<Vec<FieldElement>, CodeError> {
        if let Some((m, _)) = s.terms().find(|(m, _)| !self.source.contains(*m)) {
            return Err(CodeError::SupportOutsidePolygon(m));
        }
        let shifted = s.shift(self.translation);
        let mut message = vec![FieldElement::ZERO; self.k];
        for (m, c) in shifted.terms() {
            let idx = self.monomials.binary_search(&m).expect("support inside polygon");
            message[idx] = c;
        }
        Ok(self.encode(&message))
    }

    /// The section (in the caller's coordinates) whose codeword is `word`,
    /// or `None` if `word` is not in the code.
    pub fn section_of(&self, word: &[FieldElement]) -> Option<SectionPoly> {
        if word.len() != self.n {
            return None;
        }
        let f = &self.field;
        let k = self.k;
        // rows of [G | I], reduced so each has a distinct unit pivot column
        let mut rows: Vec<Vec<FieldElement>> = (0..k)
            .map(|r| {
                let mut v = self.row(r).to_vec();
                v.extend((0..k).map(|c| if c == r { FieldElement::ONE } else { FieldElement::ZERO }));
                v
            })
            .collect();
        let mut pivots = Vec::with_capacity(k);
        for col in 0..self.n {
            let rank = pivots.len();
            let Some(p) = (rank..k).find(|&r| !rows[r][col].is_zero()) else {
                continue;
            };
            rows.swap(rank, p);
            let inv = f.inv(rows[rank][col]).expect("pivot is nonzero");
            for v in rows[rank].iter_mut() {
                *v = f.mul(*v, inv);
            }
            let pivot = rows[rank].clone();
            for (r, row) in rows.iter_mut().enumerate() {
                if r != rank && !row[col].is_zero() {
                    let factor = row[col];
                    for (v, &g) in row.iter_mut().zip(&pivot) {
                        *v = f.sub(*v, f.mul(factor, g));
                    }
                }
            }
            pivots.push(col);
            if pivots.len() == k {
                break;
            }
        }
        let mut rest = word.to_vec();
        let mut message = vec![FieldElement::ZERO; k];
        for (r, &col) in pivots.iter().enumerate() {
            let c = rest[col];
            if c.is_zero() {
                continue;
            }
            for (v, &g) in rest.iter_mut().zip(&rows[r][..self.n]) {
                *v = f.sub(*v, f.mul(c, g));
            }
            for (m, &g) in message.iter_mut().zip(&rows[r][self.n..]) {
                *m = f.add(*m, f.mul(c, g));
            }
        }
        if rest.iter().any(|v| !v.is_zero()) {
            return None;
        }
        let terms = self
            .monomials
            .iter()
            .zip(message)
            .map(|(&m, c)| (m - self.translation, c));
        Some(SectionPoly::from_terms(f, terms))
    }

    /// One line per torus point: `i j value`.
    pub fn dump_codeword(&self, word: &[FieldElement]) -> String {
        let m = self.field.order() as usize - 1;
        let mut out = String::new();
        for (idx, v) in word.iter().enumerate() {
            out.push_str(&format!("{} {} {}\n", idx / m, idx % m, v.value()));
        }
        out
    }

    /// Identifies the code for checkpoint files.
    pub fn fingerprint(&self) -> String {
        format!(
            "q={};modulus={:?};polygon={}",
            self.field.order(),
            self.field.modulus(),
            self.polygon
        )
    }
}

pub fn hamming_weight(word: &[FieldElement]) -> usize {
    word.iter().filter(|v| !v.is_zero()).count()
}

/// Weight of the codeword obtained by evaluating `s`: `(q-1)^2` minus its torus zeros.
pub fn weight_of_section(s: &SectionPoly, code: &ToricCode) -> Result<usize, CodeError> {
    let word = code.evaluate_section(s)?;
    let w = code.n - count_torus_zeros(s, &code.field);
    debug_assert_eq!(w, hamming_weight(&word));
    Ok(w)
}

// ---------------------------------------------------------------------------
// Exhaustive enumeration
// ---------------------------------------------------------------------------

/// Addition on raw element codes, specialized per field shape.
trait Adder: Sync {
    fn add(&self, a: u16, b: u16) -> u16;
}

struct XorAdder;

impl Adder for XorAdder {
    #[inline(always)]
    fn add(&self, a: u16, b: u16) -> u16 {
        a ^ b
    }
}

struct PrimeAdder(u16);

impl Adder for PrimeAdder {
    #[inline(always)]
    fn add(&self, a: u16, b: u16) -> u16 {
        let s = a + b;
        if s >= self.0 {
            s - self.0
        } else {
            s
        }
    }
}

struct TableAdder {
    q: usize,
    table: Vec<u16>,
}

impl Adder for TableAdder {
    #[inline(always)]
    fn add(&self, a: u16, b: u16) -> u16 {
        self.table[a as usize * self.q + b as usize]
    }
}

struct GenericAdder<'a>(&'a FieldSpec);

impl Adder for GenericAdder<'_> {
    fn add(&self, a: u16, b: u16) -> u16 {
        self.0
            .add(self.0.element(a as u32).unwrap(), self.0.element(b as u32).unwrap())
            .value() as u16
    }
}

/// One unit of work: a leading message coordinate and a fixed setting of the
/// high-order F_p digits of the later coordinates.
#[derive(Debug, Clone, Copy)]
struct Task {
    lead: usize,
    high: u64,
}

/// Message space layout for enumeration with the leading nonzero coordinate
/// fixed to 1. Each later coordinate contributes `e` F_p-digits; digit `d`
/// of the walk adds the precomputed vector `basis[d]`.
struct Plan {
    p: u64,
    n: usize,
    /// `basis[r * e + t] = u^t * g_r`.
    basis: Vec<Vec<u16>>,
    rows: Vec<Vec<u16>>,
    e: usize,
    k: usize,
    low_digits: Vec<usize>,
    /// `task_offsets[lead]` is the index of the first task for `lead`; the
    /// last entry is the task count.
    task_offsets: Vec<usize>,
}

const CHUNK_LIMIT: u64 = 1 << 16;

impl Plan {
    fn new(code: &ToricCode) -> Plan {
        let f = &code.field;
        let p = f.characteristic() as u64;
        let e = f.degree() as usize;
        let mut basis = Vec::with_capacity(code.k * e);
        let rows: Vec<Vec<u16>> = (0..code.k)
            .map(|r| code.row(r).iter().map(|v| v.value() as u16).collect())
            .collect();
        for r in 0..code.k {
            let mut unit = FieldElement::ONE;
            let u = f.element(if e > 1 { p as u32 } else { 1 }).unwrap();
            for _ in 0..e {
                basis.push(code.row(r).iter().map(|&g| f.mul(unit, g).value() as u16).collect());
                unit = f.mul(unit, u);
            }
        }
        let mut low_digits = Vec::with_capacity(code.k);
        let mut task_offsets = vec![0usize];
        for lead in 0..code.k {
            let digits = (code.k - lead - 1) * e;
            let mut low = 0;
            while low < digits && p.pow(low as u32 + 1) <= CHUNK_LIMIT {
                low += 1;
            }
            low_digits.push(low);
            let highs = (p as usize)
                .checked_pow((digits - low) as u32)
                .expect("message space too large to index");
            let last = *task_offsets.last().unwrap();
            task_offsets.push(last.checked_add(highs).expect("message space too large to index"));
        }
        Plan {
            p,
            n: code.n,
            basis,
            rows,
            e,
            k: code.k,
            low_digits,
            task_offsets,
        }
    }

    fn task_count(&self) -> usize {
        *self.task_offsets.last().unwrap()
    }

    fn task(&self, index: usize) -> Task {
        let lead = self.task_offsets.partition_point(|&o| o <= index) - 1;
        Task {
            lead,
            high: (index - self.task_offsets[lead]) as u64,
        }
    }

    /// Runs one task, feeding the weight of each visited codeword to `visit`.
    /// Digits of coordinate `r > lead` occupy positions `(r - lead - 1) * e + t`,
    /// the lowest `low_digits[lead]` of which are walked in modular Gray order.
    fn run_task<A: Adder, V: FnMut(usize, &[u16])>(&self, adder: &A, task: Task, mut visit: V) {
        let lead = task.lead;
        let low = self.low_digits[lead];
        let base = (lead + 1) * self.e;
        let mut word = self.rows[lead].clone();
        let mut high = task.high;
        let mut pos = low;
        while high > 0 {
            let digit = high % self.p;
            high /= self.p;
            let row = &self.basis[base + pos];
            for _ in 0..digit {
                for (w, &r) in word.iter_mut().zip(row) {
                    *w = adder.add(*w, r);
                }
            }
            pos += 1;
        }
        let mut weight = word.iter().filter(|&&w| w != 0).count();
        visit(weight, &word);
        // step s changes digit v_p(s); an odometer tracks it without division
        let p = self.p as u32;
        let steps = self.p.pow(low as u32);
        let mut odometer = vec![0u32; low + 1];
        let short = self.n < 1 << 16;
        for _ in 1..steps {
            let mut d = 0;
            loop {
                odometer[d] += 1;
                if odometer[d] < p {
                    break;
                }
                odometer[d] = 0;
                d += 1;
            }
            let row = &self.basis[base + d];
            if short {
                // a 16-bit count keeps the loop in vector lanes
                let mut nonzero = 0u16;
                for (w, &r) in word.iter_mut().zip(row) {
                    *w = adder.add(*w, r);
                    nonzero += (*w != 0) as u16;
                }
                weight = nonzero as usize;
            } else {
                weight = 0;
                for (w, &r) in word.iter_mut().zip(row) {
                    *w = adder.add(*w, r);
                    weight += (*w != 0) as usize;
                }
            }
            visit(weight, &word);
        }
    }

    fn task_size(&self, task: Task) -> u64 {
        self.p.pow(self.low_digits[task.lead] as u32)
    }
}

fn with_adder<R>(field: &FieldSpec, run: impl AdderRun<R>) -> R {
    let q = field.order();
    if field.characteristic() == 2 {
        run.call(&XorAdder)
    } else if field.degree() == 1 {
        run.call(&PrimeAdder(q as u16))
    } else if q <= 1024 {
        let mut table = vec![0u16; (q * q) as usize];
        for a in field.elements() {
            for b in field.elements() {
                table[(a.value() * q + b.value()) as usize] = field.add(a, b).value() as u16;
            }
        }
        run.call(&TableAdder { q: q as usize, table })
    } else {
        run.call(&GenericAdder(field))
    }
}

trait AdderRun<R> {
    fn call<A: Adder>(self, adder: &A) -> R;
}

/// Controls for the exhaustive minimum distance search.
#[derive(Debug, Clone, Default)]
pub struct SearchOptions {
    /// Worker count; 0 uses the default pool size.
    pub threads: usize,
    pub deadline: Option<Duration>,
    /// Progress file allowing an interrupted search to resume.
    pub checkpoint: Option<PathBuf>,
}

impl SearchOptions {
    pub fn with_threads(threads: usize) -> Self {
        SearchOptions {
            threads,
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct MinDistance {
    pub distance: usize,
    /// Codewords visited (the search fixes the leading nonzero coordinate to 1).
    pub codewords: u64,
    pub witness: Vec<FieldElement>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct Checkpoint {
    fingerprint: String,
    next_task: usize,
    best_weight: usize,
    codewords: u64,
    /// Field element codes of the first minimum-weight codeword so far.
    #[serde(default)]
    witness: Option<Vec<u16>>,
}

fn load_checkpoint(path: &PathBuf, fingerprint: &str) -> Result<Option<Checkpoint>, CodeError> {
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
        Err(e) => return Err(CodeError::Checkpoint(e.to_string())),
    };
    let cp: Checkpoint = serde_json::from_str(&text).map_err(|e| CodeError::Checkpoint(e.to_string()))?;
    if cp.fingerprint != fingerprint {
        return Err(CodeError::Checkpoint(format!(
            "{} belongs to a different code",
            path.display()
        )));
    }
    Ok(Some(cp))
}

fn save_checkpoint(path: &PathBuf, cp: &Checkpoint) -> Result<(), CodeError> {
    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, serde_json::to_string(cp).expect("checkpoint serializes"))
        .and_then(|_| std::fs::rename(&tmp, path))
        .map_err(|e| CodeError::Checkpoint(e.to_string()))
}

fn pool(threads: usize) -> Result<rayon::ThreadPool, CodeError> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CodeError::ThreadPool(e.to_string()))
}

const BATCH: usize = 64;

struct MinRun<'a> {
    plan: &'a Plan,
    code: &'a ToricCode,
    options: &'a SearchOptions,
}

impl AdderRun<Result<MinDistance, CodeError>> for MinRun<'_> {
    fn call<A: Adder>(self, adder: &A) -> Result<MinDistance, CodeError> {
        let plan = self.plan;
        let fingerprint = self.code.fingerprint();
        let start = Instant::now();
        let mut next = 0usize;
        let mut codewords = 0u64;
        let best = AtomicUsize::new(usize::MAX);
        let mut witness: Option<Vec<u16>> = None;
        if let Some(path) = &self.options.checkpoint {
            if let Some(cp) = load_checkpoint(path, &fingerprint)? {
                next = cp.next_task;
                codewords = cp.codewords;
                best.store(cp.best_weight, Ordering::Relaxed);
                witness = cp.witness;
            }
        }
        let workers = pool(self.options.threads)?;
        while next < plan.task_count() {
            if let Some(limit) = self.options.deadline {
                if start.elapsed() > limit {
                    return Err(CodeError::DeadlineExceeded {
                        best_upper: best.load(Ordering::Relaxed),
                        codewords,
                    });
                }
            }
            let end = (next + BATCH).min(plan.task_count());
            let results: Vec<(usize, Option<Vec<u16>>)> = workers.install(|| {
                (next..end)
                    .into_par_iter()
                    .map(|index| {
                        let task = plan.task(index);
                        let mut local = usize::MAX;
                        let mut word = None;
                        plan.run_task(adder, task, |w, cw| {
                            if w < local {
                                local = w;
                                word = Some(cw.to_vec());
                            }
                        });
                        best.fetch_min(local, Ordering::Relaxed);
                        (local, word)
                    })
                    .collect()
            });
            // first minimum in task order keeps the witness deterministic
            for (w, word) in results {
                if witness.is_none() || w < hamming_u16(witness.as_deref().unwrap()) {
                    witness = word;
                }
            }
            codewords += (next..end).map(|index| plan.task_size(plan.task(index))).sum::<u64>();
            next = end;
            if let Some(path) = &self.options.checkpoint {
                save_checkpoint(
                    path,
                    &Checkpoint {
                        fingerprint: fingerprint.clone(),
                        next_task: next,
                        best_weight: best.load(Ordering::Relaxed),
                        codewords,
                        witness: witness.clone(),
                    },
                )?;
            }
        }
        let f = &self.code.field;
        let distance = best.load(Ordering::Relaxed);
        let witness = match witness {
            Some(w) if hamming_u16(&w) == distance => w.into_iter().map(|v| f.element(v as u32).unwrap()).collect(),
            // a checkpoint written before witnesses were saved
            _ => Vec::new(),
        };
        Ok(MinDistance {
            distance,
            codewords,
            witness,
        })
    }
}

fn hamming_u16(w: &[u16]) -> usize {
    w.iter().filter(|&&v| v != 0).count()
}

/// Exact minimum distance by enumerating every message whose leading nonzero
/// coordinate is 1 (scalar multiples share weights). Consecutive messages
/// differ in one F_p-digit, so each step is a single row addition.
pub fn min_distance_exact(code: &ToricCode, options: &SearchOptions) -> Result<MinDistance, CodeError> {
    let plan = Plan::new(code);
    debug_assert_eq!(plan.n, code.n);
    debug_assert_eq!(plan.k, code.k);
    with_adder(
        &code.field,
        MinRun {
            plan: &plan,
            code,
            options,
        },
    )
}

/// Number of codewords `min_distance_exact` visits.
pub fn search_size(code: &ToricCode) -> u64 {
    let q = code.field.order() as u64;
    (0..code.k as u32).fold(0u64, |acc, i| acc.saturating_add(q.saturating_pow(i)))
}

/// Default cap on `q^k` for [`weight_distribution`].
pub const DISTRIBUTION_LIMIT: u64 = 100_000_000;

struct DistRun<'a> {
    plan: &'a Plan,
    threads: usize,
}

impl AdderRun<Result<Vec<u64>, CodeError>> for DistRun<'_> {
    fn call<A: Adder>(self, adder: &A) -> Result<Vec<u64>, CodeError> {
        let plan = self.plan;
        let n = plan.n;
        pool(self.threads)?.install(|| {
            Ok((0..plan.task_count())
                .into_par_iter()
                .map(|index| {
                    let task = plan.task(index);
                    let mut hist = vec![0u64; n + 1];
                    plan.run_task(adder, task, |w, _| hist[w] += 1);
                    hist
                })
                .reduce(
                    || vec![0u64; n + 1],
                    |mut a, b| {
                        for (x, y) in a.iter_mut().zip(b) {
                            *x += y;
                        }
                        a
                    },
                ))
        })
    }
}

/// Full weight enumerator `weight -> count`, including the zero word.
pub fn weight_distribution(code: &ToricCode, limit: u64, threads: usize) -> Result<BTreeMap<usize, u64>, CodeError> {
    let size = (code.field.order() as f64).powi(code.k as i32);
    if size > limit as f64 {
        return Err(CodeError::TooLarge { size, limit });
    }
    let plan = Plan::new(code);
    let hist = with_adder(&code.field, DistRun { plan: &plan, threads })?;
    let scale = code.field.order() as u64 - 1;
    let mut out = BTreeMap::new();
    out.insert(0, 1);
    for (w, &c) in hist.iter().enumerate() {
        if c > 0 {
            *out.entry(w).or_insert(0) += c * scale;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::make_field;

    fn poly(pts: &[(i64, i64)]) -> LatticePolygon {
        LatticePolygon::from_points(pts)
    }

    fn hexagon() -> LatticePolygon {
        poly(&[(1, 0), (2, 0), (0, 1), (1, 2), (3, 2), (3, 3)])
    }

    /// Independent oracle: every message, full matrix product.
    fn brute_min_distance(code: &ToricCode) -> usize {
        let f = code.field();
        let q = f.order() as u64;
        let total = q.pow(code.k() as u32);
        let mut best = usize::MAX;
        for idx in 1..total {
            let mut t = idx;
            let msg: Vec<FieldElement> = (0..code.k())
                .map(|_| {
                    let v = f.element((t % q) as u32).unwrap();
                    t /= q;
                    v
                })
                .collect();
            best = best.min(hamming_weight(&code.encode(&msg)));
        }
        best
    }

    #[test]
    fn dimensions() {
        let f5 = FieldSpec::with_order(5, None).unwrap();
        let c = build_code(&hexagon(), &f5).unwrap();
        assert_eq!((c.n(), c.k()), (16, 9));
        let f8 = FieldSpec::with_order(8, None).unwrap();
        let c = build_code(&poly(&[(0, 0), (1, 4), (4, 1)]), &f8).unwrap();
        assert_eq!((c.n(), c.k()), (49, 11));
        let pt = build_code(&LatticePolygon::point(LatticePoint::new(3, 3)), &f5).unwrap();
        assert_eq!(pt.k(), 1);
        assert!(pt.row(0).iter().all(|&v| v == FieldElement::ONE));
        assert!(matches!(
            build_code(&hexagon(), &FieldSpec::with_order(4, None).unwrap()),
            Err(CodeError::PolygonTooLargeForField { .. })
        ));
    }

    #[test]
    fn zero_counts() {
        let f8 = make_field(2, 3, Some(&[1, 1, 0, 1])).unwrap();
        let one = FieldElement::ONE;
        let s = SectionPoly::from_terms(
            &f8,
            [
                (LatticePoint::new(1, 0), one),
                (LatticePoint::new(3, 3), one),
                (LatticePoint::new(0, 2), one),
            ],
        );
        assert_eq!(count_torus_zeros(&s, &f8), 21);
        for q in [5u32, 7, 8, 9] {
            let f = FieldSpec::with_order(q, None).unwrap();
            let line = SectionPoly::x_minus(&f, FieldElement::ONE);
            assert_eq!(count_torus_zeros(&line, &f), (q - 1) as usize);
            assert_eq!(count_torus_zeros(&SectionPoly::constant(one), &f), 0);
        }
    }

    #[test]
    fn section_weights() {
        let f8 = make_field(2, 3, Some(&[1, 1, 0, 1])).unwrap();
        let code = build_code(&hexagon(), &f8).unwrap();
        let one = FieldElement::ONE;
        let unit = SectionPoly::monomial(LatticePoint::new(1, 0), one);
        assert_eq!(weight_of_section(&unit, &code).unwrap(), 49);
        // y + x^3 y^3 + x^2 lies in P (the transposed form has the same zero count)
        let s = SectionPoly::from_terms(
            &f8,
            [
                (LatticePoint::new(0, 1), one),
                (LatticePoint::new(3, 3), one),
                (LatticePoint::new(2, 0), one),
            ],
        );
        let word = code.evaluate_section(&s).unwrap();
        assert_eq!(hamming_weight(&word), 28);
        assert_eq!(weight_of_section(&s, &code).unwrap(), 28);

        // x (x - a)(y - b)(y - c) on the 1x2 rectangle
        let (a, b, c) = (f8.xi_pow(1), f8.xi_pow(2), f8.xi_pow(3));
        let s = SectionPoly::monomial(LatticePoint::new(1, 0), one)
            .mul(&SectionPoly::x_minus(&f8, a), &f8)
            .mul(&SectionPoly::y_minus(&f8, b), &f8)
            .mul(&SectionPoly::y_minus(&f8, c), &f8);
        assert_eq!(count_torus_zeros(&s, &f8), 3 * 7 - 2);
        assert_eq!(weight_of_section(&s, &code).unwrap(), 49 - 3 * 7 + 2);

        let outside = SectionPoly::monomial(LatticePoint::new(0, 3), one);
        assert!(matches!(
            weight_of_section(&outside, &code),
            Err(CodeError::SupportOutsidePolygon(_))
        ));
    }

    #[test]
    fn search_matches_brute_force() {
        let cases: Vec<(LatticePolygon, u32)> = vec![
            (poly(&[(0, 0), (1, 0)]), 5),
            (poly(&[(0, 0), (1, 0), (0, 1), (1, 1)]), 4),
            (poly(&[(0, 0), (2, 0), (0, 1)]), 5),
            (poly(&[(0, 0), (1, 0), (0, 1), (1, 2)]), 4),
            (poly(&[(0, 0), (1, 1)]), 9),
            (poly(&[(0, 0), (2, 1), (1, 2)]), 4),
        ];
        for (p, q) in cases {
            let f = FieldSpec::with_order(q, None).unwrap();
            let code = build_code(&p, &f).unwrap();
            let fast = min_distance_exact(&code, &SearchOptions::with_threads(1)).unwrap();
            assert_eq!(fast.distance, brute_min_distance(&code), "{p} over F_{q}");
            assert_eq!(hamming_weight(&fast.witness), fast.distance);
            let q64 = q as u64;
            assert_eq!(fast.codewords, (q64.pow(code.k() as u32) - 1) / (q64 - 1));
        }
    }

    #[test]
    fn hexagon_over_f5() {
        let f = FieldSpec::with_order(5, None).unwrap();
        let code = build_code(&hexagon(), &f).unwrap();
        let d = min_distance_exact(&code, &SearchOptions::with_threads(2)).unwrap();
        assert_eq!(d.distance, 6);
        let dist = weight_distribution(&code, DISTRIBUTION_LIMIT, 1).unwrap();
        assert_eq!(dist.keys().find(|&&w| w > 0), Some(&6));
        assert_eq!(dist.values().sum::<u64>(), 5u64.pow(9));
        let s = code.section_of(&d.witness).unwrap();
        assert_eq!(code.evaluate_section(&s).unwrap(), d.witness);
        assert_eq!(count_torus_zeros(&s, &f), 16 - 6);
        let mut off = d.witness.clone();
        off[0] = f.add(off[0], FieldElement::ONE);
        assert!(code.section_of(&off).is_none());
    }

    #[test]
    fn point_code_distribution() {
        let f = FieldSpec::with_order(5, None).unwrap();
        let code = build_code(&LatticePolygon::point(LatticePoint::ORIGIN), &f).unwrap();
        let dist = weight_distribution(&code, DISTRIBUTION_LIMIT, 1).unwrap();
        assert_eq!(dist, BTreeMap::from([(0, 1), (16, 4)]));
        assert!(matches!(
            weight_distribution(&build_code(&hexagon(), &f).unwrap(), 1000, 1),
            Err(CodeError::TooLarge { .. })
        ));
    }

    #[test]
    fn deadline_and_checkpoint() {
        let f = FieldSpec::with_order(7, None).unwrap();
        let code = build_code(&hexagon(), &f).unwrap();
        let opts = SearchOptions {
            threads: 1,
            deadline: Some(Duration::ZERO),
            checkpoint: None,
        };
        std::thread::sleep(Duration::from_millis(2));
        assert!(matches!(
            min_distance_exact(&code, &opts),
            Err(CodeError::DeadlineExceeded { .. })
        ));

        let path = std::env::temp_dir().join(format!("toricode-cp-{}.json", std::process::id()));
        let _ = std::fs::remove_file(&path);
        let opts = SearchOptions {
            threads: 1,
            deadline: None,
            checkpoint: Some(path.clone()),
        };
        let full = min_distance_exact(&code, &opts).unwrap();
        assert_eq!(full.distance, 20);
        // a finished checkpoint resumes to the same answer without work
        let again = min_distance_exact(&code, &opts).unwrap();
        assert_eq!(again.distance, 20);
        assert_eq!(again.codewords, full.codewords);
        assert_eq!(again.witness, full.witness);
        let other = build_code(&poly(&[(0, 0), (1, 0)]), &f).unwrap();
        assert!(matches!(
            min_distance_exact(&other, &opts),
            Err(CodeError::Checkpoint(_))
        ));
        std::fs::remove_file(&path).unwrap();
    }
}
