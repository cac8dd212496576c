//! Bernstein numbers `b_n(T) = sup_{dim Z = n} inf_{x ∈ Z, ‖x‖ = 1} ‖Tx‖`:
//! closed-form upper bounds, the interpolation inequalities behind them, a
//! flatness search over subspaces, and a brute-force sup-inf oracle for small
//! truncations.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{ComputeError, ParamError};
use crate::exponent::{Exponent, Real};
use crate::spaces::{block_embedding_norm, unweighted_mixed_norm, SeqVector, TruncatedMixedSpace};

/// Largest ambient dimension the brute-force oracle accepts.
pub const MAX_ORACLE_DIM: usize = 12;
/// Largest subspace dimension the brute-force oracle accepts.
pub const MAX_ORACLE_N: usize = 4;

fn decay_exponent(p0: Exponent, q0: Exponent, p1: Exponent, q1: Exponent) -> Result<f64, ParamError> {
    for e in [p0, q0, p1, q1] {
        e.validate()?;
    }
    if p0.compare(p1).is_ge() || q0.compare(q1).is_ge() {
        return Err(ParamError::OutOfRange(format!(
            "the decay bound needs p0 < p1 and q0 < q1 (got p0={p0}, p1={p1}, q0={q0}, q1={q1})"
        )));
    }
    let ratio = |a: Exponent, b: Exponent| a.value() * b.recip_f64();
    let lead = p0.recip_f64().min(q0.recip_f64());
    Ok(lead * (1.0 - ratio(q0, q1).max(ratio(p0, p1))))
}

/// `n^{-min(1/p₀,1/q₀)(1 - max(q₀/q₁, p₀/p₁))}`, an upper bound for
/// `b_n(ℓ^{q₀}(ℓ^{p₀}) → ℓ^{q₁}(ℓ^{p₁}))`.
pub fn fss_upper_bound(n: usize, p0: Exponent, q0: Exponent, p1: Exponent, q1: Exponent) -> Result<f64, ParamError> {
    if n == 0 {
        return Err(ParamError::OutOfRange("n must be at least 1".into()));
    }
    let a = decay_exponent(p0, q0, p1, q1)?;
    Ok((n as f64).powf(-a))
}

/// `n^{-1/max(p,2)}`, the bound for `b_n(L^∞[0,1] → L^p[0,1])`.
pub fn linfty_lp_upper_bound(n: usize, p: Exponent) -> Result<f64, ParamError> {
    p.validate()?;
    if n == 0 {
        return Err(ParamError::OutOfRange("n must be at least 1".into()));
    }
    if p.is_infinite() {
        return Err(ParamError::OutOfRange("p must be finite".into()));
    }
    Ok((n as f64).powf(-1.0 / p.value().max(2.0)))
}

/// Both sides of an inequality `lhs ≤ rhs`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Gap {
    pub lhs: f64,
    pub rhs: f64,
}

fn scale_exponent(e: Exponent, theta: Real) -> Exponent {
    match e {
        Exponent::Infinite => Exponent::Infinite,
        Exponent::Finite(r) => Exponent::Finite(r.div(theta)),
    }
}

/// `‖x‖_{ℓ^{q/θ}(ℓ^{p/θ})}` against `‖x‖_{ℓ^q(ℓ^p)}^θ ‖x‖_∞^{1-θ}` (unit weights).
pub fn holder_interpolation_gap(x: &SeqVector, p: Exponent, q: Exponent, theta: f64) -> Result<Gap, ParamError> {
    if !(theta > 0.0 && theta < 1.0) {
        return Err(ParamError::OutOfRange(format!("theta must lie in (0,1), got {theta}")));
    }
    let t = Real::from_f64(theta);
    let lhs = unweighted_mixed_norm(x, scale_exponent(p, t), scale_exponent(q, t))?;
    let base = unweighted_mixed_norm(x, p, q)?;
    let rhs = base.powf(theta) * x.sup_norm().powf(1.0 - theta);
    Ok(Gap { lhs, rhs })
}

/// `Σ_j (c_j‖x_j‖)^q` against `(Σ_j ‖x_j‖^p) · sup_j (c_j‖x_j‖)^{q-p}` for the
/// diagonal map `x_j ↦ c_j x_j`, block norms taken in `ℓ^inner`.
pub fn diagonal_interpolation_gap(
    x: &SeqVector,
    factors: &[f64],
    inner: Exponent,
    p: Exponent,
    q: Exponent,
) -> Result<Gap, ParamError> {
    if factors.len() != x.blocks.len() {
        return Err(ParamError::ShapeMismatch(format!("{} factors for {} blocks", factors.len(), x.blocks.len())));
    }
    if let Some(c) = factors.iter().find(|c| !(**c > 0.0 && **c <= 1.0)) {
        return Err(ParamError::OutOfRange(format!("contraction factor {c} outside (0,1]")));
    }
    if q.is_infinite() || p.compare(q).is_ge() {
        return Err(ParamError::OutOfRange("need p < q < ∞".into()));
    }
    let (p, q) = (p.validate()?.value(), q.validate()?.value());
    let norms = x
        .blocks
        .iter()
        .map(|b| crate::spaces::inner_norm(b, inner))
        .collect::<Result<Vec<_>, _>>()?;
    let mapped: Vec<f64> = norms.iter().zip(factors).map(|(n, c)| n * c).collect();
    let lhs = crate::spaces::compensated_sum(mapped.iter().map(|t| t.powf(q)));
    let top = mapped.iter().copied().fold(0.0, f64::max);
    let rhs = crate::spaces::compensated_sum(norms.iter().map(|t| t.powf(p))) * top.powf(q - p);
    Ok(Gap { lhs, rhs })
}

/// A vector of the span whose absolute maximum is attained at many coordinates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlatVector {
    pub vector: Vec<f64>,
    pub flat_count: usize,
}

impl FlatVector {
    /// `flat_count^{-1/max(p₀,q₀)}`: for the returned vector normalised to
    /// `‖x‖_{ℓ^{q₀}(ℓ^{p₀})} = 1` this bounds `‖x‖_∞`.
    pub fn certified_sup_bound(&self, p0: Exponent, q0: Exponent) -> f64 {
        let r = p0.value().max(q0.value());
        (self.flat_count as f64).powf(-1.0 / r)
    }
}

fn numerical_rank(m: &DMatrix<f64>) -> usize {
    if m.ncols() == 0 || m.nrows() == 0 {
        return 0;
    }
    let sv = m.clone().svd(false, false).singular_values;
    let top = sv.iter().copied().fold(0.0, f64::max);
    let tol = top * 1e-10 * m.nrows().max(m.ncols()) as f64;
    sv.iter().filter(|s| **s > tol).count()
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Searches `span(basis)` for a vector maximising the number of coordinates
/// at which `|x_k| = ‖x‖_∞` (within `tolerance`).
///
/// Every candidate is a vertex of `{c : ‖Bc‖_∞ ≤ 1}`. All vertices are
/// enumerated when there are at most 200 000 (row subset, sign pattern)
/// pairs; otherwise that many are sampled with a fixed seed. The first vertex
/// reaching the best count wins.
pub fn flatness_search(basis: &DMatrix<f64>, tolerance: f64) -> Result<FlatVector, ComputeError> {
    let (d, n) = basis.shape();
    if n == 0 || n > d {
        return Err(ParamError::ShapeMismatch(format!("basis of shape {d}×{n}")).into());
    }
    if basis.iter().any(|v| !v.is_finite()) {
        return Err(ParamError::NonFiniteEntry(f64::NAN).into());
    }
    let rank = numerical_rank(basis);
    if rank < n {
        return Err(ComputeError::RankDeficient { rank, expected: n });
    }
    let tol = tolerance.abs().max(1e-14);
    let mut best: Option<FlatVector> = None;
    let mut consider = |rows: &[usize], signs: u32| {
        let sub = DMatrix::from_fn(n, n, |r, c| basis[(rows[r], c)]);
        let rhs = DVector::from_fn(n, |r, _| if signs >> r & 1 == 0 { 1.0 } else { -1.0 });
        let Some(c) = sub.lu().solve(&rhs) else { return };
        let x = basis * c;
        let top = x.amax();
        if !top.is_finite() || top > 1.0 + tol {
            return;
        }
        let count = x.iter().filter(|v| v.abs() >= 1.0 - tol).count();
        if best.as_ref().is_none_or(|b| count > b.flat_count) {
            best = Some(FlatVector { vector: x.iter().map(|v| v / top).collect(), flat_count: count });
        }
    };
    let sign_patterns = 1u32 << (n - 1);
    if binomial(d, n) * f64::from(sign_patterns) <= 200_000.0 {
        let mut rows: Vec<usize> = (0..n).collect();
        loop {
            for signs in 0..sign_patterns {
                // The first sign is always +; the opposite vertex is the same up to sign.
                consider(&rows, signs << 1);
            }
            // next combination in lexicographic order
            let mut i = n;
            while i > 0 && rows[i - 1] == d - n + i - 1 {
                i -= 1;
            }
            if i == 0 {
                break;
            }
            rows[i - 1] += 1;
            for k in i..n {
                rows[k] = rows[k - 1] + 1;
            }
        }
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        for _ in 0..200_000 {
            let mut rows = sample(&mut rng, d, n).into_vec();
            rows.sort_unstable();
            let signs = rng.random_range(0..sign_patterns);
            consider(&rows, signs << 1);
        }
    }
    // A full-rank basis always has at least one feasible vertex.
    best.ok_or(ComputeError::RankDeficient { rank, expected: n })
}

/// One sup-inf estimate.
#[derive(Clone, Debug, PartialEq)]
pub struct BernsteinEstimate {
    pub n: usize,
    /// `inf` of the norm ratio over the witness span: a lower bound for `b_n`.
    pub lower: f64,
    /// `min(‖T‖, formula bound when the spaces are unweighted ℓ^{q₀}(ℓ^{p₀}) → ℓ^{q₁}(ℓ^{p₁})`
    /// with `p₀ < p₁`, `q₀ < q₁`).
    pub upper: Option<f64>,
    /// Best value found by the search (heuristic estimate of `b_n`).
    pub oracle: Option<f64>,
    /// `D × n`, orthonormal columns.
    pub witness_basis: Option<DMatrix<f64>>,
    pub seed: u64,
}

#[derive(Serialize)]
struct EstimateDoc<'a> {
    n: usize,
    lower: f64,
    upper: Option<f64>,
    oracle: Option<f64>,
    witness: Vec<Vec<f64>>,
    seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    config: Option<&'a serde_json::Value>,
}

impl BernsteinEstimate {
    /// Witness basis vectors, one inner array per column.
    pub fn witness_columns(&self) -> Vec<Vec<f64>> {
        self.witness_basis
            .as_ref()
            .map(|b| b.column_iter().map(|c| c.iter().copied().collect()).collect())
            .unwrap_or_default()
    }

    pub fn to_json(&self) -> String {
        self.to_json_with_config(None)
    }

    pub fn to_json_with_config(&self, config: Option<&serde_json::Value>) -> String {
        let doc = EstimateDoc {
            n: self.n,
            lower: self.lower,
            upper: self.upper,
            oracle: self.oracle,
            witness: self.witness_columns(),
            seed: self.seed,
            config,
        };
        serde_json::to_string(&doc).expect("plain data serializes")
    }
}

/// How hard the inner minimisation works.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Effort {
    /// Used while screening and refining candidates.
    Coarse,
    /// Used for the final value of the best candidates.
    Fine,
}

/// `inf_{c ≠ 0} ‖Bc‖_dst / ‖Bc‖_src` for a full-rank `D × n` basis `B`.
pub struct InnerProblem<'a> {
    src: &'a TruncatedMixedSpace,
    dst: &'a TruncatedMixedSpace,
}

impl<'a> InnerProblem<'a> {
    pub fn new(src: &'a TruncatedMixedSpace, dst: &'a TruncatedMixedSpace) -> Result<Self, ParamError> {
        if !src.same_structure(dst) {
            return Err(ParamError::ShapeMismatch("source and target have different block structures".into()));
        }
        Ok(InnerProblem { src, dst })
    }

    pub fn ratio(&self, basis: &DMatrix<f64>, c: &[f64], buf: &mut [f64]) -> f64 {
        let (d, n) = basis.shape();
        for (i, slot) in buf.iter_mut().enumerate().take(d) {
            *slot = (0..n).map(|k| basis[(i, k)] * c[k]).sum();
        }
        let s = self.src.norm_of_flat(&buf[..d]);
        if s == 0.0 {
            return f64::INFINITY;
        }
        self.dst.norm_of_flat(&buf[..d]) / s
    }

    /// Minimum of the ratio with its minimiser (a unit coefficient vector).
    pub fn infimum(&self, basis: &DMatrix<f64>, effort: Effort, rng: &mut ChaCha8Rng) -> (f64, Vec<f64>) {
        self.infimum_from(basis, effort, rng, None)
    }

    fn infimum_from(
        &self,
        basis: &DMatrix<f64>,
        effort: Effort,
        rng: &mut ChaCha8Rng,
        warm: Option<&[f64]>,
    ) -> (f64, Vec<f64>) {
        let (d, n) = basis.shape();
        let mut buf = vec![0.0; d];
        match n {
            1 => (self.ratio(basis, &[1.0], &mut buf), vec![1.0]),
            2 => self.circle(basis, effort, &mut buf),
            _ => self.pattern(basis, effort, rng, warm, &mut buf),
        }
    }

    fn circle(&self, basis: &DMatrix<f64>, effort: Effort, buf: &mut [f64]) -> (f64, Vec<f64>) {
        let (grid, keep) = match effort {
            Effort::Coarse => (10_000usize, 4usize),
            Effort::Fine => (40_000, 16),
        };
        let step = PI / grid as f64;
        let mut f = |t: f64| self.ratio(basis, &[t.cos(), t.sin()], buf);
        let values: Vec<f64> = (0..grid).map(|k| f(k as f64 * step)).collect();
        // local minima of the periodic grid function, best first
        let mut minima: Vec<usize> = (0..grid)
            .filter(|&k| {
                let prev = values[(k + grid - 1) % grid];
                let next = values[(k + 1) % grid];
                values[k] <= prev && values[k] <= next
            })
            .collect();
        minima.sort_by(|a, b| values[*a].total_cmp(&values[*b]).then(a.cmp(b)));
        minima.truncate(keep);
        let mut best_t = 0.0;
        let mut best = f64::INFINITY;
        for k in minima {
            let t0 = k as f64 * step;
            if values[k] < best {
                best = values[k];
                best_t = t0;
            }
            let (t, v) = golden_section(&mut f, t0 - step, t0 + step);
            if v < best {
                best = v;
                best_t = t;
            }
        }
        (best, vec![best_t.cos(), best_t.sin()])
    }

    fn pattern(
        &self,
        basis: &DMatrix<f64>,
        effort: Effort,
        rng: &mut ChaCha8Rng,
        warm: Option<&[f64]>,
        buf: &mut [f64],
    ) -> (f64, Vec<f64>) {
        let n = basis.ncols();
        let (starts, h_min) = match effort {
            Effort::Coarse => (64usize, 1e-7),
            Effort::Fine => (256, 1e-10),
        };
        let mut best = (f64::INFINITY, vec![0.0; n]);
        let mut start_points: Vec<Vec<f64>> = Vec::with_capacity(starts + n + 1);
        if let Some(w) = warm {
            start_points.push(w.to_vec());
        }
        for k in 0..n {
            let mut e = vec![0.0; n];
            e[k] = 1.0;
            start_points.push(e);
        }
        for _ in 0..starts {
            start_points.push(random_unit(rng, n));
        }
        for start in start_points {
            let (v, c) = self.compass(basis, start, h_min, rng, buf);
            if v < best.0 {
                best = (v, c);
            }
        }
        best
    }

    /// Pattern search on the unit sphere with a fresh random orthonormal frame
    /// at every step size.
    fn compass(
        &self,
        basis: &DMatrix<f64>,
        start: Vec<f64>,
        h_min: f64,
        rng: &mut ChaCha8Rng,
        buf: &mut [f64],
    ) -> (f64, Vec<f64>) {
        let n = start.len();
        let mut c = normalized(start);
        let mut value = self.ratio(basis, &c, buf);
        let mut h = 0.25;
        let mut trial = vec![0.0; n];
        while h > h_min {
            let frame = random_frame(rng, n);
            let mut improved = true;
            let mut sweeps = 0;
            while improved && sweeps < 50 {
                improved = false;
                sweeps += 1;
                for dir in frame.column_iter() {
                    for sign in [1.0, -1.0] {
                        for k in 0..n {
                            trial[k] = c[k] + sign * h * dir[k];
                        }
                        let v = self.ratio(basis, &trial, buf);
                        if v < value {
                            value = v;
                            c = normalized(trial.clone());
                            improved = true;
                        }
                    }
                }
            }
            h *= 0.5;
        }
        (value, c)
    }
}

fn normalized(mut v: Vec<f64>) -> Vec<f64> {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm > 0.0 {
        v.iter_mut().for_each(|x| *x /= norm);
    }
    v
}

fn random_unit(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        if v.iter().any(|x| *x != 0.0) {
            return normalized(v);
        }
    }
}

fn random_frame(rng: &mut ChaCha8Rng, n: usize) -> DMatrix<f64> {
    let m = DMatrix::from_fn(n, n, |_, _| rng.sample(StandardNormal));
    m.qr().q()
}

fn golden_section(f: &mut impl FnMut(f64) -> f64, mut a: f64, mut b: f64) -> (f64, f64) {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = b - r * (b - a);
    let mut x2 = a + r * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..80 {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - r * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + r * (b - a);
            f2 = f(x2);
        }
        if b - a < 1e-15 {
            break;
        }
    }
    if f1 <= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Orthonormalises the columns; `None` when they are (numerically) dependent.
fn orthonormalize(m: DMatrix<f64>) -> Option<DMatrix<f64>> {
    let n = m.ncols();
    let qr = m.qr();
    let r = qr.r();
    if (0..n).any(|k| r[(k, k)].abs() < 1e-10) {
        return None;
    }
    Some(qr.q())
}

fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Candidate `index` of a run: every fourth one spans random coordinate
/// vectors, the rest are Gaussian.
fn candidate(rng: &mut ChaCha8Rng, d: usize, n: usize, index: usize) -> Option<DMatrix<f64>> {
    if index.is_multiple_of(4) {
        let rows = sample(rng, d, n).into_vec();
        let mut m = DMatrix::zeros(d, n);
        for (k, r) in rows.into_iter().enumerate() {
            m[(r, k)] = 1.0;
        }
        return Some(m);
    }
    orthonormalize(DMatrix::from_fn(d, n, |_, _| rng.sample(StandardNormal)))
}

fn unit_weights(sp: &TruncatedMixedSpace) -> bool {
    sp.levels().iter().all(|l| l.log2_weight() == 0.0)
}

/// Brute-force estimate of `b_n(src → dst)`.
///
/// `budget` random candidate subspaces are screened, the best few are refined
/// by coordinate-wise ascent on the basis entries, and the best of those is
/// re-evaluated carefully. Candidates are evaluated in parallel; the result
/// only depends on `seed`.
pub fn bruteforce_bernstein(
    src: &TruncatedMixedSpace,
    dst: &TruncatedMixedSpace,
    n: usize,
    budget: usize,
    seed: u64,
) -> Result<BernsteinEstimate, ComputeError> {
    let problem = InnerProblem::new(src, dst)?;
    let d = src.dimension();
    if d == 0 || d > MAX_ORACLE_DIM {
        return Err(ParamError::OutOfRange(format!("total dimension {d} outside 1..={MAX_ORACLE_DIM}")).into());
    }
    if n == 0 || n > MAX_ORACLE_N.min(d) {
        return Err(ParamError::OutOfRange(format!("n = {n} outside 1..={}", MAX_ORACLE_N.min(d))).into());
    }
    if budget == 0 {
        return Err(ParamError::OutOfRange("budget must be positive".into()).into());
    }

    let screened: Vec<(usize, f64, Option<DMatrix<f64>>)> = (0..budget)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream_rng(seed, 2 * i as u64);
            match candidate(&mut rng, d, n, i) {
                Some(b) => {
                    let v = problem.infimum(&b, Effort::Coarse, &mut rng).0;
                    (i, v, Some(b))
                }
                None => (i, f64::NEG_INFINITY, None),
            }
        })
        .collect();
    let mut order: Vec<usize> = (0..budget).filter(|i| screened[*i].2.is_some()).collect();
    order.sort_by(|a, b| screened[*b].1.total_cmp(&screened[*a].1).then(a.cmp(b)));
    order.truncate(3);

    let refined: Vec<(usize, f64, DMatrix<f64>)> = order
        .par_iter()
        .map(|&i| {
            let mut rng = stream_rng(seed, 2 * i as u64 + 1);
            let start = screened[i].2.clone().expect("filtered above");
            let (basis, _) = refine(&problem, start, screened[i].1, &mut rng);
            let fine = problem.infimum(&basis, Effort::Fine, &mut rng).0;
            (i, fine, basis)
        })
        .collect();
    let (winner, oracle, basis) = refined
        .into_iter()
        .reduce(|a, b| if b.1 > a.1 || (b.1 == a.1 && b.0 < a.0) { b } else { a })
        .ok_or(ComputeError::RankDeficient { rank: 0, expected: n })?;

    // independent re-evaluation of the witness with a different stream
    let mut check_rng = stream_rng(seed ^ 0x9e37_79b9_7f4a_7c15, winner as u64);
    let lower = oracle.min(problem.infimum(&basis, Effort::Fine, &mut check_rng).0);

    let mut upper = block_embedding_norm(src, dst)?;
    if unit_weights(src) && unit_weights(dst) {
        if let Ok(b) = fss_upper_bound(n, src.inner_p(), src.outer_q(), dst.inner_p(), dst.outer_q()) {
            upper = upper.min(b);
        }
    }
    Ok(BernsteinEstimate { n, lower, upper: Some(upper), oracle: Some(oracle), witness_basis: Some(basis), seed })
}

fn refine(
    problem: &InnerProblem<'_>,
    mut basis: DMatrix<f64>,
    mut value: f64,
    rng: &mut ChaCha8Rng,
) -> (DMatrix<f64>, f64) {
    let (d, n) = basis.shape();
    let mut h = 0.2;
    for _ in 0..3 {
        for i in 0..d {
            for k in 0..n {
                for sign in [1.0, -1.0] {
                    let mut trial = basis.clone();
                    trial[(i, k)] += sign * h;
                    let Some(trial) = orthonormalize(trial) else { continue };
                    let v = problem.infimum(&trial, Effort::Coarse, rng).0;
                    if v > value + 1e-12 {
                        value = v;
                        basis = trial;
                    }
                }
            }
        }
        h *= 0.5;
    }
    (basis, value)
}

/// `inf` of the norm ratio over `span(basis)`, evaluated at fine effort.
/// This is how a returned witness is re-certified.
pub fn witness_infimum(
    src: &TruncatedMixedSpace,
    dst: &TruncatedMixedSpace,
    basis: &DMatrix<f64>,
    seed: u64,
) -> Result<f64, ComputeError> {
    let problem = InnerProblem::new(src, dst)?;
    if basis.nrows() != src.dimension() {
        return Err(ParamError::ShapeMismatch(format!("basis has {} rows for dimension {}", basis.nrows(), src.dimension())).into());
    }
    let rank = numerical_rank(basis);
    if rank < basis.ncols() {
        return Err(ComputeError::RankDeficient { rank, expected: basis.ncols() });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(problem.infimum(basis, Effort::Fine, &mut rng).0)
}
