//! Orthogonalization of a set of TT-vectors.
//!
//! Every kernel returns the orthonormal set `q_1, .., q_m` and an upper
//! triangular `R` with `a_i = sum_j R(j, i) q_j` up to rounding. The
//! coefficient of `q_j` in `a_i` is stored at row `j`, column `i`.
//!
//! The number of TT-rounding calls per kernel is fixed: `m` for CGS, MGS
//! and Gram, `2m` for CGS2 and MGS2, `4m - 1` for Householder.

use std::fmt;
use std::str::FromStr;

use crate::dense::{cholesky, invert_upper_triangular, DenseMatrix};
use crate::error::{Error, Result};
use crate::generators::{canonical_basis, MultiIndexMap};
use crate::rounding::{tt_round, RoundingConfig, RoundingLedger};
use crate::tt::TTVector;

/// `|p| <= DEPENDENCE_FACTOR * eps * |a_i|` is treated as linear dependence.
pub const DEPENDENCE_FACTOR: f64 = 1e3;

/// Relative tolerance below which a negative squared residual in the
/// Householder vector construction is clamped to zero.
pub const DEFECT_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Kernel {
    Cgs,
    Mgs,
    Cgs2,
    Mgs2,
    Gram,
    Householder,
}

impl Kernel {
    pub const ALL: [Kernel; 6] = [Kernel::Cgs, Kernel::Mgs, Kernel::Cgs2, Kernel::Mgs2, Kernel::Gram, Kernel::Householder];

    pub fn name(self) -> &'static str {
        match self {
            Kernel::Cgs => "cgs",
            Kernel::Mgs => "mgs",
            Kernel::Cgs2 => "cgs2",
            Kernel::Mgs2 => "mgs2",
            Kernel::Gram => "gram",
            Kernel::Householder => "householder",
        }
    }

    /// Rounding calls made by a complete run on `m` vectors.
    pub fn expected_rounding_calls(self, m: usize) -> usize {
        match self {
            Kernel::Cgs | Kernel::Mgs | Kernel::Gram => m,
            Kernel::Cgs2 | Kernel::Mgs2 => 2 * m,
            Kernel::Householder => (4 * m).saturating_sub(1),
        }
    }
}

impl fmt::Display for Kernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Kernel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Kernel::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::InvalidArgument(format!("unknown kernel '{s}'")))
    }
}

/// Storage snapshot of one rounded vector.
#[derive(Clone, Debug, PartialEq)]
pub struct StepMetrics {
    /// 1-based position in the basis.
    pub k: usize,
    pub max_rank: usize,
    pub storage_before: usize,
    pub storage_after: usize,
    pub compression_ratio: f64,
    /// Rounding calls made so far, including the one that produced this vector.
    pub rounding_calls: usize,
}

impl StepMetrics {
    fn new(k: usize, before: &TTVector, after: &TTVector, rounding_calls: usize) -> Self {
        Self {
            k,
            max_rank: after.max_rank(),
            storage_before: before.storage_count(),
            storage_after: after.storage_count(),
            compression_ratio: crate::metrics::compression_ratio(after),
            rounding_calls,
        }
    }

    pub fn compression_gain(&self) -> f64 {
        self.storage_before as f64 / self.storage_after as f64
    }
}

/// Extra output of the Householder kernel.
#[derive(Clone, Debug, Default)]
pub struct HouseholderTrace {
    /// Unit Householder vectors; `None` marks a skipped (identity) reflector.
    pub u: Vec<Option<TTVector>>,
    /// `w` before its first rounding against the final `u_k`.
    pub u_steps: Vec<StepMetrics>,
    /// The input `a_k` after its own reflection `H_k`, against the same
    /// vector rounded at the run accuracy. This measurement rounding is not
    /// part of the algorithm and is not counted in `rounding_calls`.
    pub a_steps: Vec<StepMetrics>,
}

#[derive(Clone, Debug)]
pub struct OrthoResult {
    pub kernel: Kernel,
    pub q: Vec<TTVector>,
    /// `m x m` upper triangular factor.
    pub r: DenseMatrix,
    pub rounding_calls: usize,
    /// One entry per finalized `q_k`.
    pub steps: Vec<StepMetrics>,
    pub householder: Option<HouseholderTrace>,
}

/// Result of [`run_kernel`]: whatever was computed before an error.
#[derive(Debug)]
pub struct KernelRun {
    pub result: OrthoResult,
    pub error: Option<Error>,
}

impl KernelRun {
    pub fn into_result(self) -> Result<OrthoResult> {
        match self.error {
            Some(e) => Err(e),
            None => Ok(self.result),
        }
    }
}

pub fn tt_cgs(a: &[TTVector], delta: f64) -> Result<OrthoResult> {
    orthogonalize(Kernel::Cgs, a, delta)
}

pub fn tt_mgs(a: &[TTVector], delta: f64) -> Result<OrthoResult> {
    orthogonalize(Kernel::Mgs, a, delta)
}

pub fn tt_cgs2(a: &[TTVector], delta: f64) -> Result<OrthoResult> {
    orthogonalize(Kernel::Cgs2, a, delta)
}

pub fn tt_mgs2(a: &[TTVector], delta: f64) -> Result<OrthoResult> {
    orthogonalize(Kernel::Mgs2, a, delta)
}

pub fn tt_gram(a: &[TTVector], delta: f64) -> Result<OrthoResult> {
    orthogonalize(Kernel::Gram, a, delta)
}

pub fn tt_householder(a: &[TTVector], delta: f64) -> Result<OrthoResult> {
    orthogonalize(Kernel::Householder, a, delta)
}

/// Runs `kernel` and fails on any error.
pub fn orthogonalize(kernel: Kernel, a: &[TTVector], delta: f64) -> Result<OrthoResult> {
    run_kernel(kernel, a, delta, None)?.into_result()
}

/// Runs `kernel`, keeping partial output when a numerical failure stops it.
///
/// Invalid arguments (empty input, mismatched shapes, bad `delta`) are
/// returned as `Err`; failures during the run land in [`KernelRun::error`].
/// Rounding calls are recorded in `ledger` under the kernel name.
pub fn run_kernel(kernel: Kernel, a: &[TTVector], delta: f64, ledger: Option<&RoundingLedger>) -> Result<KernelRun> {
    let cfg = RoundingConfig::accuracy(delta)?.with_tag(kernel.name());
    validate_inputs(kernel, a)?;
    let m = a.len();
    let mut run = Run {
        cfg,
        ledger,
        out: OrthoResult {
            kernel,
            q: Vec::with_capacity(m),
            r: DenseMatrix::zeros(m, m),
            rounding_calls: 0,
            steps: Vec::with_capacity(m),
            householder: None,
        },
    };
    let status = match kernel {
        Kernel::Cgs => gram_schmidt(&mut run, a, Projection::Classical),
        Kernel::Mgs => gram_schmidt(&mut run, a, Projection::Modified),
        Kernel::Cgs2 => gram_schmidt2(&mut run, a, Projection::Classical),
        Kernel::Mgs2 => gram_schmidt2(&mut run, a, Projection::Modified),
        Kernel::Gram => gram(&mut run, a),
        Kernel::Householder => householder(&mut run, a),
    };
    Ok(KernelRun { result: run.out, error: status.err() })
}

fn validate_inputs(kernel: Kernel, a: &[TTVector]) -> Result<()> {
    let first = a.first().ok_or_else(|| Error::InvalidArgument("empty input set".into()))?;
    let modes = first.mode_sizes();
    if let Some(i) = a.iter().position(|x| x.mode_sizes() != modes) {
        return Err(Error::Shape(format!("vector {i} has modes {:?}, expected {modes:?}", a[i].mode_sizes())));
    }
    if kernel == Kernel::Householder && (a.len() as u128) > first.dense_len() {
        return Err(Error::InvalidArgument(format!(
            "{} vectors exceed the dimension {} of the space",
            a.len(),
            first.dense_len()
        )));
    }
    Ok(())
}

struct Run<'a> {
    cfg: RoundingConfig,
    ledger: Option<&'a RoundingLedger>,
    out: OrthoResult,
}

impl Run<'_> {
    fn round(&mut self, x: &TTVector) -> Result<TTVector> {
        self.out.rounding_calls += 1;
        if let Some(ledger) = self.ledger {
            ledger.record(self.cfg.tag.as_deref());
        }
        tt_round(x, &self.cfg)
    }

    /// Normalizes the rounded residual `p` of input `i` and appends it.
    fn push_normalized(&mut self, i: usize, a_norm: f64, before: &TTVector, p: TTVector) -> Result<()> {
        let norm = p.norm();
        if norm <= DEPENDENCE_FACTOR * f64::EPSILON * a_norm || norm == 0.0 {
            return Err(Error::LinearDependence { index: i, residual: norm });
        }
        self.out.r[(i, i)] = norm;
        let q = p.scale(1.0 / norm);
        self.out.steps.push(StepMetrics::new(i + 1, before, &q, self.out.rounding_calls));
        self.out.q.push(q);
        Ok(())
    }
}

#[derive(Clone, Copy, PartialEq)]
enum Projection {
    /// Coefficients from the vector entering the pass.
    Classical,
    /// Coefficients from the running residual.
    Modified,
}

/// `p - c q`, leaving `p` untouched when `c` is exactly zero.
fn subtract(p: TTVector, c: f64, q: &TTVector) -> Result<TTVector> {
    if c == 0.0 {
        return Ok(p);
    }
    p.axpy(-c, q)
}

/// One projection pass against `q`; returns the new residual and the
/// coefficients.
fn project_out(source: &TTVector, q: &[TTVector], kind: Projection) -> Result<(TTVector, Vec<f64>)> {
    let mut p = source.clone();
    let mut coeffs = Vec::with_capacity(q.len());
    for qj in q {
        let c = match kind {
            Projection::Classical => source.inner_product(qj)?,
            Projection::Modified => p.inner_product(qj)?,
        };
        coeffs.push(c);
        p = subtract(p, c, qj)?;
    }
    Ok((p, coeffs))
}

fn gram_schmidt(run: &mut Run<'_>, a: &[TTVector], kind: Projection) -> Result<()> {
    for (i, ai) in a.iter().enumerate() {
        let (p, coeffs) = project_out(ai, &run.out.q, kind)?;
        for (j, c) in coeffs.into_iter().enumerate() {
            run.out.r[(j, i)] = c;
        }
        let rounded = run.round(&p)?;
        run.push_normalized(i, ai.norm(), &p, rounded)?;
    }
    Ok(())
}

fn gram_schmidt2(run: &mut Run<'_>, a: &[TTVector], kind: Projection) -> Result<()> {
    for (i, ai) in a.iter().enumerate() {
        let (p1, c1) = project_out(ai, &run.out.q, kind)?;
        let p1 = run.round(&p1)?;
        let (p2, c2) = project_out(&p1, &run.out.q, kind)?;
        for (j, (x, y)) in c1.into_iter().zip(c2).enumerate() {
            run.out.r[(j, i)] = x + y;
        }
        let rounded = run.round(&p2)?;
        run.push_normalized(i, ai.norm(), &p2, rounded)?;
    }
    Ok(())
}

fn gram_matrix(a: &[TTVector]) -> Result<DenseMatrix> {
    let m = a.len();
    let mut g = DenseMatrix::zeros(m, m);
    for i in 0..m {
        for j in 0..=i {
            let v = a[i].inner_product(&a[j])?;
            g[(i, j)] = v;
            g[(j, i)] = v;
        }
    }
    Ok(g)
}

fn leading_block(g: &DenseMatrix, k: usize) -> DenseMatrix {
    let mut out = DenseMatrix::zeros(k, k);
    for i in 0..k {
        for j in 0..k {
            out[(i, j)] = g[(i, j)];
        }
    }
    out
}

fn gram(run: &mut Run<'_>, a: &[TTVector]) -> Result<()> {
    let g = gram_matrix(a)?;
    // On breakdown the leading block before the failing pivot still
    // factors, so the first vectors are produced before reporting.
    let (l, failure) = match cholesky(&g) {
        Ok(l) => (l, None),
        Err(e @ Error::NumericallySingularGram { pivot, .. }) => {
            if pivot == 0 {
                return Err(e);
            }
            (cholesky(&leading_block(&g, pivot))?, Some(e))
        }
        Err(e) => return Err(e),
    };
    let k = l.rows();
    let r = l.transpose();
    let r_inv = invert_upper_triangular(&r)?;
    for i in 0..k {
        for j in 0..=i {
            run.out.r[(j, i)] = r[(j, i)];
        }
    }
    for i in 0..k {
        let mut combo = a[0].scale(r_inv[(0, i)]);
        for (kk, ak) in a.iter().enumerate().take(i + 1).skip(1) {
            combo = combo.axpy(r_inv[(kk, i)], ak)?;
        }
        let q = run.round(&combo)?;
        run.out.steps.push(StepMetrics::new(i + 1, &combo, &q, run.out.rounding_calls));
        run.out.q.push(q);
    }
    match failure {
        Some(e) => Err(e),
        None => Ok(()),
    }
}

/// Householder vector for `a` against the first `i + 1` vectors of `basis`.
///
/// Returns the unit vector (or `None` for an identity reflector), the
/// coefficients `r(0..=i)` and the storage of `w` before its first rounding.
/// Exactly two rounding calls are made.
fn tth_vec_impl(
    a: &TTVector,
    basis: &[TTVector],
    i: usize,
    round: &mut dyn FnMut(&TTVector) -> Result<TTVector>,
) -> Result<(Option<TTVector>, Vec<f64>, TTVector)> {
    let mut r = Vec::with_capacity(i + 1);
    let mut s = 0.0;
    let mut w = a.clone();
    for f in &basis[..i] {
        let c = a.inner_product(f)?;
        r.push(c);
        s += c * c;
        w = subtract(w, c, f)?;
    }
    let unrounded = w.clone();
    let mut w = round(&w)?;

    let a_sq = a.inner_product(a)?;
    let mut deficit = a_sq - s;
    if deficit < -DEFECT_TOLERANCE * a_sq {
        return Err(Error::NumericalDefect { index: i, deficit });
    }
    deficit = deficit.max(0.0);
    let a_norm = a_sq.max(0.0).sqrt();
    // A component at round-off level counts as zero, so its noise cannot
    // flip the sign of the reflected direction.
    let pivot = a.inner_product(&basis[i])?;
    let sign = if pivot < -DEPENDENCE_FACTOR * f64::EPSILON * a_norm { -1.0 } else { 1.0 };
    let ri = sign * deficit.sqrt();
    r.push(ri);
    w = subtract(w, ri, &basis[i])?;
    let w = round(&w)?;

    let norm = w.norm();
    let u = if norm == 0.0 || norm <= DEPENDENCE_FACTOR * f64::EPSILON * a_norm {
        None
    } else {
        Some(w.scale(1.0 / norm))
    };
    Ok((u, r, unrounded))
}

/// Householder vector of `a` with respect to `basis[0..=i]` (zero-based `i`).
///
/// Returns `None` for the vector when `a` already lies in the span of those
/// basis vectors; the reflection is then the identity.
pub fn tth_vec(a: &TTVector, basis: &[TTVector], i: usize, delta: f64) -> Result<(Option<TTVector>, Vec<f64>)> {
    if i >= basis.len() {
        return Err(Error::Index(format!("basis of {} vectors has no entry {i}", basis.len())));
    }
    let cfg = RoundingConfig::accuracy(delta)?;
    let (u, r, _) = tth_vec_impl(a, basis, i, &mut |x| tt_round(x, &cfg))?;
    Ok((u, r))
}

/// `a - 2 <a, u> u` without rounding. A zero coefficient returns `a` itself.
pub fn apply_h_vec(a: &TTVector, u: &TTVector) -> Result<TTVector> {
    let c = 2.0 * a.inner_product(u)?;
    subtract(a.clone(), c, u)
}

fn reflect_all(x: &TTVector, reflectors: &[Option<TTVector>]) -> Result<TTVector> {
    let mut out = x.clone();
    for u in reflectors.iter().flatten() {
        out = apply_h_vec(&out, u)?;
    }
    Ok(out)
}

fn householder(run: &mut Run<'_>, a: &[TTVector]) -> Result<()> {
    let m = a.len();
    let map = MultiIndexMap::new(&a[0].mode_sizes())?;
    let basis = canonical_basis(&map, m)?;
    let mut trace = HouseholderTrace::default();

    let result = (|| -> Result<()> {
        let mut w = a[0].clone();
        for i in 0..m {
            let mut round = |x: &TTVector| run.round(x);
            let (u, r, unrounded) = tth_vec_impl(&w, &basis, i, &mut round)?;
            for (j, c) in r.into_iter().enumerate() {
                run.out.r[(j, i)] = c;
            }
            let after = u.clone().unwrap_or_else(|| w.scale(0.0));
            trace.u_steps.push(StepMetrics::new(i + 1, &unrounded, &after, run.out.rounding_calls));
            let own = match &u {
                Some(u) => apply_h_vec(&w, u)?,
                None => w.clone(),
            };
            let measured = tt_round(&own, &run.cfg)?;
            trace.a_steps.push(StepMetrics::new(i + 1, &own, &measured, run.out.rounding_calls));
            trace.u.push(u);
            if i + 1 < m {
                // The reflections of a_{i+1} are formed only when it is needed.
                let reflected = reflect_all(&a[i + 1], &trace.u)?;
                w = run.round(&reflected)?;
            }
        }
        for i in 0..m {
            let mut q = basis[i].clone();
            for u in trace.u[..=i].iter().rev().flatten() {
                q = apply_h_vec(&q, u)?;
            }
            let rounded = run.round(&q)?;
            run.out.steps.push(StepMetrics::new(i + 1, &q, &rounded, run.out.rounding_calls));
            run.out.q.push(rounded);
        }
        Ok(())
    })();
    run.out.householder = Some(trace);
    result
}
