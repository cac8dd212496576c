//! The gliding hump: inside any infinite-dimensional subspace of
//! `ℓ^{q₀}(ℓ^p)`, with `q₀ < q₁`, find `x` with `‖x‖_{ℓ^{q₁}(ℓ^p)} < ε‖x‖_{ℓ^{q₀}(ℓ^p)}`.
//!
//! The subspace is only ever touched through a [`SubspaceOracle`], which hands
//! out unit vectors vanishing on every level up to a cutoff.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::error::{ComputeError, ParamError};
use crate::exponent::Exponent;
use crate::spaces::{mixed_norm, SeqVector, TruncatedMixedSpace};

/// Largest number of humps [`choose_n`] will ask for.
pub const MAX_HUMPS: u64 = 1 << 32;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct HumpParams {
    pub epsilon: f64,
    #[serde(rename = "N")]
    pub n_humps: usize,
    pub delta: f64,
    pub q0: Exponent,
    pub q1: Exponent,
}

fn check_exponents(q0: Exponent, q1: Exponent) -> Result<(), ParamError> {
    q0.validate()?;
    q1.validate()?;
    if q0.is_infinite() {
        return Err(ParamError::OutOfRange("q0 must be finite".into()));
    }
    if q0.compare(q1).is_ge() {
        return Err(ParamError::OutOfRange(format!("need q0 < q1 (got q0={q0}, q1={q1})")));
    }
    Ok(())
}

fn below(n: u64, a: f64, target: f64) -> bool {
    (n as f64).powf(a) < target
}

/// Smallest `N ≥ 2` with `N^{1/q₁ - 1/q₀} < ε/2`.
pub fn choose_n(epsilon: f64, q0: Exponent, q1: Exponent) -> Result<usize, ParamError> {
    check_exponents(q0, q1)?;
    if !(epsilon > 0.0) || !epsilon.is_finite() {
        return Err(ParamError::OutOfRange(format!("epsilon must be positive, got {epsilon}")));
    }
    let a = q1.recip_f64() - q0.recip_f64();
    let target = epsilon / 2.0;
    let estimate = target.powf(1.0 / a);
    if !(estimate < MAX_HUMPS as f64) {
        return Err(ParamError::OutOfRange(format!("epsilon = {epsilon} needs too many humps")));
    }
    let mut n = (estimate.floor() as u64).saturating_sub(2).max(2);
    while n > 2 && below(n - 1, a, target) {
        n -= 1;
    }
    while !below(n, a, target) {
        n += 1;
    }
    usize::try_from(n).map_err(|_| ParamError::OutOfRange("too many humps".into()))
}

/// Left-hand sides of the two δ conditions at `(N, q₀, q₁, δ)`.
///
/// The first is the condition as usually displayed,
/// `(1+(N+1)δ^{min(1,q₁)/q₀})^{q₁/min(1,q₁)} / (1-(N+1)δ^{min(1,1/q₀)})^{q₀/min(1,q₀)}`,
/// with the outer numerator exponent replaced by `1` when `q₁ = ∞`. The second
/// uses the exponents `1/min(1,q₁)` and `1/min(1,q₀)` that the norm estimates
/// of the argument actually produce. Both are `+∞` once the denominator base
/// is not positive.
pub fn delta_predicates(n_humps: usize, q0: Exponent, q1: Exponent, delta: f64) -> (f64, f64) {
    let q0v = q0.value();
    let m0 = q0v.min(1.0);
    let m1 = q1.value().min(1.0);
    let c = (n_humps + 1) as f64;
    let top = 1.0 + c * delta.powf(m1 / q0v);
    let bottom = 1.0 - c * delta.powf((1.0 / q0v).min(1.0));
    if !(bottom > 0.0) {
        return (f64::INFINITY, f64::INFINITY);
    }
    let displayed_top = if q1.is_infinite() { top } else { top.powf(q1.value() / m1) };
    let displayed = displayed_top / bottom.powf(q0v / m0);
    let derived = top.powf(1.0 / m1) / bottom.powf(1.0 / m0);
    (displayed, derived)
}

/// First `δ ∈ {1/2, 1/4, …}` at which both δ conditions are below 2.
pub fn choose_delta(n_humps: usize, q0: Exponent, q1: Exponent) -> Result<f64, ParamError> {
    check_exponents(q0, q1)?;
    if n_humps < 2 {
        return Err(ParamError::OutOfRange("N must be at least 2".into()));
    }
    let mut delta = 0.5f64;
    while delta > 0.0 {
        let (a, b) = delta_predicates(n_humps, q0, q1, delta);
        if a < 2.0 && b < 2.0 {
            return Ok(delta);
        }
        delta *= 0.5;
    }
    Err(ParamError::OutOfRange("no representable δ satisfies the condition".into()))
}

impl HumpParams {
    pub fn new(epsilon: f64, q0: Exponent, q1: Exponent) -> Result<Self, ParamError> {
        let n_humps = choose_n(epsilon, q0, q1)?;
        let delta = choose_delta(n_humps, q0, q1)?;
        Ok(HumpParams { epsilon, n_humps, delta, q0, q1 })
    }

    /// Re-evaluates both defining conditions.
    pub fn is_valid(&self) -> bool {
        let a = self.q1.recip_f64() - self.q0.recip_f64();
        let (d1, d2) = delta_predicates(self.n_humps, self.q0, self.q1, self.delta);
        self.n_humps >= 2 && below(self.n_humps as u64, a, self.epsilon / 2.0) && d1 < 2.0 && d2 < 2.0
    }
}

/// Source of unit vectors from a fixed subspace `V`.
pub trait SubspaceOracle {
    /// A vector of `V` with `‖v‖_src = 1` vanishing on every level `j ≤ cutoff`
    /// (no constraint for `None`), or `None` when `V` has no such vector.
    fn next(&mut self, cutoff: Option<i64>, src: &TruncatedMixedSpace) -> Result<Option<SeqVector>, ComputeError>;
}

fn normalize(v: SeqVector, src: &TruncatedMixedSpace) -> Result<Option<SeqVector>, ComputeError> {
    let norm = mixed_norm(&v, src)?;
    if norm == 0.0 || !norm.is_finite() {
        return Ok(None);
    }
    Ok(Some(v.scale(1.0 / norm)))
}

/// `V` = the whole space: unit atoms at the first coordinate of successive levels.
#[derive(Clone, Copy, Debug, Default)]
pub struct FullSpaceOracle;

impl SubspaceOracle for FullSpaceOracle {
    fn next(&mut self, cutoff: Option<i64>, src: &TruncatedMixedSpace) -> Result<Option<SeqVector>, ComputeError> {
        let Some(k) = src.levels().iter().position(|l| cutoff.is_none_or(|c| l.j > c)) else {
            return Ok(None);
        };
        let mut v = src.zeros();
        v.blocks[k][0] = 1.0 / src.levels()[k].weight();
        Ok(Some(v))
    }
}

/// `V` spanned by the columns of a `D × k` matrix.
///
/// Among the vectors of `V` vanishing up to the cutoff, the one supported on
/// the shortest window of levels is returned: the last admissible level `K` is
/// found by bisection, each test being a rank check of the rows that must
/// vanish, and the coefficient vector is the right singular vector of the
/// smallest singular value.
#[derive(Clone, Debug)]
pub struct FiniteBasisOracle {
    basis: DMatrix<f64>,
}

impl FiniteBasisOracle {
    pub fn new(basis: DMatrix<f64>) -> Result<Self, ParamError> {
        if basis.ncols() == 0 {
            return Err(ParamError::ShapeMismatch("empty basis".into()));
        }
        if let Some(bad) = basis.iter().find(|v| !v.is_finite()) {
            return Err(ParamError::NonFiniteEntry(*bad));
        }
        Ok(FiniteBasisOracle { basis })
    }

    pub fn dimension(&self) -> usize {
        self.basis.ncols()
    }

    /// Null vector of the rows `rows` of the basis, if the kernel is nontrivial.
    fn null_vector(&self, rows: &[usize]) -> Option<Vec<f64>> {
        let k = self.basis.ncols();
        let live: Vec<usize> =
            rows.iter().copied().filter(|&r| self.basis.row(r).iter().any(|v| *v != 0.0)).collect();
        // a basis vector already vanishing on these rows is taken as is
        if let Some(c) = (0..k).find(|&c| live.iter().all(|&r| self.basis[(r, c)] == 0.0)) {
            let mut e = vec![0.0; k];
            e[c] = 1.0;
            return Some(e);
        }
        // zero rows pad the matrix to k rows so that V is square
        let m = live.len().max(k);
        let sub = DMatrix::from_fn(m, k, |r, c| if r < live.len() { self.basis[(live[r], c)] } else { 0.0 });
        let scale = self.basis.amax().max(f64::MIN_POSITIVE);
        let svd = sub.try_svd(false, true, f64::EPSILON, 0).expect("SVD converges");
        let v_t = svd.v_t.expect("requested");
        let (idx, smallest) = svd
            .singular_values
            .iter()
            .enumerate()
            .fold((0, f64::INFINITY), |best, (i, s)| if *s < best.1 { (i, *s) } else { best });
        if smallest > 1e-10 * scale * (m as f64).sqrt() {
            return None;
        }
        Some(v_t.row(idx).iter().copied().collect())
    }
}

impl SubspaceOracle for FiniteBasisOracle {
    fn next(&mut self, cutoff: Option<i64>, src: &TruncatedMixedSpace) -> Result<Option<SeqVector>, ComputeError> {
        if self.basis.nrows() != src.dimension() {
            return Err(ParamError::ShapeMismatch(format!(
                "basis has {} rows for dimension {}",
                self.basis.nrows(),
                src.dimension()
            ))
            .into());
        }
        let levels = src.levels();
        let mut offsets = Vec::with_capacity(levels.len() + 1);
        offsets.push(0);
        for l in levels {
            offsets.push(offsets.last().unwrap() + l.block_size);
        }
        let first_free = levels.iter().position(|l| cutoff.is_none_or(|c| l.j > c)).unwrap_or(levels.len());
        if first_free == levels.len() {
            return Ok(None);
        }
        let head = offsets[first_free];
        // rows forced to vanish when the support ends at level index `last`
        let rows_for = |last: usize| -> Vec<usize> { (0..head).chain(offsets[last + 1]..self.basis.nrows()).collect() };
        let mut hi = levels.len() - 1;
        let Some(mut coeffs) = self.null_vector(&rows_for(hi)) else {
            return Ok(None);
        };
        let mut lo = first_free;
        while lo < hi {
            let mid = (lo + hi) / 2;
            match self.null_vector(&rows_for(mid)) {
                Some(c) => {
                    hi = mid;
                    coeffs = c;
                }
                None => lo = mid + 1,
            }
        }
        let mut flat: Vec<f64> = (0..self.basis.nrows())
            .map(|r| (0..coeffs.len()).map(|k| self.basis[(r, k)] * coeffs[k]).sum())
            .collect();
        flat[..head].iter_mut().for_each(|v| *v = 0.0);
        normalize(src.split(&flat)?, src)
    }
}

/// `dim` random sparse vectors: each lives on a window of one or two
/// consecutive levels starting at a uniformly chosen level, with every
/// coordinate of the window drawn from `N(0,1)` with probability 1/2.
pub fn random_sparse_basis(sp: &TruncatedMixedSpace, dim: usize, seed: u64) -> DMatrix<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let levels = sp.levels();
    let mut offsets = vec![0usize];
    for l in levels {
        offsets.push(offsets.last().unwrap() + l.block_size);
    }
    let mut basis = DMatrix::zeros(sp.dimension(), dim);
    for c in 0..dim {
        let start = rng.random_range(0..levels.len());
        let end = (start + rng.random_range(1..=2)).min(levels.len());
        let rows = offsets[start]..offsets[end];
        loop {
            for r in rows.clone() {
                basis[(r, c)] = if rng.random_bool(0.5) { rng.sample(StandardNormal) } else { 0.0 };
            }
            if rows.clone().any(|r| basis[(r, c)] != 0.0) {
                break;
            }
        }
    }
    basis
}

/// `V` described by a generator; its vectors are normalised and checked here.
pub struct GeneratorOracle<F> {
    generate: F,
}

impl<F> GeneratorOracle<F>
where
    F: FnMut(Option<i64>) -> Option<SeqVector>,
{
    pub fn new(generate: F) -> Self {
        GeneratorOracle { generate }
    }
}

impl<F> SubspaceOracle for GeneratorOracle<F>
where
    F: FnMut(Option<i64>) -> Option<SeqVector>,
{
    fn next(&mut self, cutoff: Option<i64>, src: &TruncatedMixedSpace) -> Result<Option<SeqVector>, ComputeError> {
        let Some(v) = (self.generate)(cutoff) else { return Ok(None) };
        v.conforms_to(src)?;
        for (b, l) in v.blocks.iter().zip(src.levels()) {
            if cutoff.is_some_and(|c| l.j <= c) && b.iter().any(|x| *x != 0.0) {
                return Err(ParamError::OutOfRange(format!("generated vector is nonzero on level {}", l.j)).into());
            }
        }
        normalize(v, src)
    }
}

/// Result of a successful run.
#[derive(Clone, Debug, PartialEq)]
pub struct GlideOutcome {
    pub x: SeqVector,
    pub params: HumpParams,
    pub humps: Vec<SeqVector>,
    /// `j_1 < j_2 < … < j_N`
    pub cutoffs: Vec<i64>,
    pub src_norm: f64,
    pub dst_norm: f64,
    pub ratio: f64,
}

#[derive(Serialize)]
struct Transcript<'a> {
    #[serde(rename = "N")]
    n: usize,
    delta: f64,
    cutoffs: &'a [i64],
    ratio: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    config: Option<&'a serde_json::Value>,
}

impl GlideOutcome {
    /// `{"N":..,"delta":..,"cutoffs":[..],"ratio":..}`
    pub fn transcript_json(&self, config: Option<&serde_json::Value>) -> String {
        let t = Transcript {
            n: self.params.n_humps,
            delta: self.params.delta,
            cutoffs: &self.cutoffs,
            ratio: self.ratio,
            config,
        };
        serde_json::to_string(&t).expect("plain data serializes")
    }
}

/// `Σ_{i > k} (w_i ‖v_i‖_p)^{q₀}` for every level index `k`.
fn tails(v: &SeqVector, src: &TruncatedMixedSpace) -> Result<Vec<f64>, ParamError> {
    let q0 = src.outer_q().value();
    let mut masses = Vec::with_capacity(v.blocks.len());
    for (b, l) in v.blocks.iter().zip(src.levels()) {
        masses.push((l.weight() * crate::spaces::inner_norm(b, src.inner_p())?).powf(q0));
    }
    let mut out = vec![0.0; masses.len()];
    let mut acc = 0.0;
    for k in (0..masses.len()).rev() {
        out[k] = acc;
        acc += masses[k];
    }
    Ok(out)
}

/// Runs the gliding hump against `oracle`.
pub fn glide(
    oracle: &mut dyn SubspaceOracle,
    epsilon: f64,
    sp_src: &TruncatedMixedSpace,
    sp_dst: &TruncatedMixedSpace,
) -> Result<GlideOutcome, ComputeError> {
    if !sp_src.same_structure(sp_dst)
        || sp_src.inner_p() != sp_dst.inner_p()
        || sp_src.levels().iter().zip(sp_dst.levels()).any(|(a, b)| a.log2_weight() != b.log2_weight())
    {
        return Err(ParamError::ShapeMismatch(
            "source and target must share levels, weights and the inner exponent".into(),
        )
        .into());
    }
    let params = HumpParams::new(epsilon, sp_src.outer_q(), sp_dst.outer_q())?;
    let mut x = sp_src.zeros();
    let mut humps = Vec::with_capacity(params.n_humps);
    let mut cutoffs: Vec<i64> = Vec::with_capacity(params.n_humps);
    for found in 0..params.n_humps {
        let cutoff = cutoffs.last().copied();
        let Some(v) = oracle.next(cutoff, sp_src)? else {
            let partial_ratio = if found > 0 { Some(mixed_norm(&x, sp_dst)? / mixed_norm(&x, sp_src)?) } else { None };
            return Err(ComputeError::OracleExhausted { found, needed: params.n_humps, partial_ratio });
        };
        v.conforms_to(sp_src)?;
        let norm = mixed_norm(&v, sp_src)?;
        let zero_head = v
            .blocks
            .iter()
            .zip(sp_src.levels())
            .all(|(b, l)| cutoff.is_none_or(|c| l.j > c) || b.iter().all(|t| *t == 0.0));
        if (norm - 1.0).abs() > 1e-12 || !zero_head {
            return Err(ParamError::OutOfRange("oracle returned a vector violating its contract".into()).into());
        }
        let tail = tails(&v, sp_src)?;
        let k = (0..tail.len())
            .find(|&k| tail[k] <= params.delta && cutoff.is_none_or(|c| sp_src.levels()[k].j > c))
            .expect("the last level always has zero tail");
        cutoffs.push(sp_src.levels()[k].j);
        x = x.add(&v);
        humps.push(v);
    }
    let src_norm = mixed_norm(&x, sp_src)?;
    let dst_norm = mixed_norm(&x, sp_dst)?;
    Ok(GlideOutcome { x, params, humps, cutoffs, src_norm, dst_norm, ratio: dst_norm / src_norm })
}
