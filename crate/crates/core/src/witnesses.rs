//! Explicit subspaces on which an embedding stays large: Rademacher systems
//! inside one probability-normalised block, one-vector-per-level (diagonal)
//! spans, and spans of constant blocks.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::error::ParamError;
use crate::exponent::Exponent;
use crate::spaces::{inner_norm, lp_norm, SeqVector, TruncatedMixedSpace};

pub const MAX_RADEMACHER_N: usize = 20;

/// `r_{n,1}, …, r_{n,n}` sampled at the `2ⁿ` points of `{-1,1}ⁿ`, each of mass `2^{-n}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RademacherSystem {
    pub n: usize,
    /// `2ⁿ` rows of `n` signs.
    pub signs: Vec<Vec<i8>>,
}

impl RademacherSystem {
    pub fn rows(&self) -> usize {
        self.signs.len()
    }

    /// Column `j` (0-based) as a vector of length `2ⁿ`.
    pub fn column(&self, j: usize) -> Vec<f64> {
        self.signs.iter().map(|row| f64::from(row[j])).collect()
    }

    /// `Σ_j a_j r_{n,j}` at every sample point.
    pub fn combine(&self, a: &[f64]) -> Vec<f64> {
        self.signs
            .iter()
            .map(|row| row.iter().zip(a).map(|(s, c)| f64::from(*s) * c).sum())
            .collect()
    }

    /// The `2ⁿ × n` matrix of signs.
    pub fn matrix(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.rows(), self.n, |r, c| f64::from(self.signs[r][c]))
    }
}

/// Row `k` (1-based) has sign `2·bit_{j-1}(k-1) - 1` in column `j`.
pub fn rademacher_system(n: usize) -> Result<RademacherSystem, ParamError> {
    if n == 0 || n > MAX_RADEMACHER_N {
        return Err(ParamError::OutOfRange(format!("n = {n} outside 1..={MAX_RADEMACHER_N}")));
    }
    let signs = (0..1usize << n)
        .map(|k| (0..n).map(|j| if k >> j & 1 == 1 { 1 } else { -1 }).collect())
        .collect();
    Ok(RademacherSystem { n, signs })
}

/// `‖f‖_{L^p(μ)}` for the uniform probability measure on the entries of `f`.
pub fn probability_norm(f: &[f64], p: Exponent) -> f64 {
    let raw = lp_norm(f.iter().copied(), p.value());
    raw * (f.len() as f64).powf(-p.recip_f64())
}

/// `‖Σ a_j r_{n,j}‖_{L^p} / ‖a‖_{ℓ²}`, by enumerating all sample points.
pub fn khintchine_ratio(a: &[f64], p: Exponent, sys: &RademacherSystem) -> Result<f64, ParamError> {
    p.validate()?;
    if a.len() != sys.n {
        return Err(ParamError::ShapeMismatch(format!("{} coefficients for n = {}", a.len(), sys.n)));
    }
    let l2 = inner_norm(a, Exponent::int(2))?;
    if l2 == 0.0 {
        return Err(ParamError::OutOfRange("coefficient vector is zero".into()));
    }
    Ok(probability_norm(&sys.combine(a), p) / l2)
}

fn power_mean(u: f64, v: f64, p: Exponent) -> f64 {
    probability_norm(&[u, v], p)
}

/// `inf_{a ≠ 0} ‖Σ a_j r_{n,j}‖_{L^{p1}} / ‖Σ a_j r_{n,j}‖_{L^{p0}}` for `p1 ≤ p0 < ∞`.
///
/// With `u = |a₁+a₂|`, `v = |a₁-a₂|` the case `n = 2` is a ratio of two-point
/// power means of `(1, t)`, `t ∈ [0,1]`, minimised by a dense grid, golden
/// section refinement and both endpoints. For `n ≥ 3`, `directions` random
/// unit vectors are sampled, the best ten are refined by pattern search, and
/// the smallest ratio seen is returned.
pub fn rademacher_witness_lower_bound(
    n: usize,
    p0: Exponent,
    p1: Exponent,
    directions: usize,
    seed: u64,
) -> Result<f64, ParamError> {
    p0.validate()?;
    p1.validate()?;
    if p0.is_infinite() {
        return Err(ParamError::OutOfRange("p0 must be finite".into()));
    }
    if p0.compare(p1).is_lt() {
        return Err(ParamError::OutOfRange(format!("need p1 ≤ p0 (got p0={p0}, p1={p1})")));
    }
    let sys = rademacher_system(n)?;
    if p0.compare(p1).is_eq() {
        return Ok(1.0);
    }
    if n == 1 {
        return Ok(1.0);
    }
    if n == 2 {
        let r = |t: f64| power_mean(1.0, t, p1) / power_mean(1.0, t, p0);
        let grid = 10_000;
        let mut best = r(0.0).min(r(1.0));
        let mut arg = 0usize;
        let mut arg_value = f64::INFINITY;
        for k in 0..=grid {
            let v = r(k as f64 / grid as f64);
            if v < arg_value {
                arg_value = v;
                arg = k;
            }
        }
        best = best.min(arg_value);
        let lo = (arg.saturating_sub(1)) as f64 / grid as f64;
        let hi = ((arg + 1).min(grid)) as f64 / grid as f64;
        best = best.min(golden_min(&r, lo, hi));
        return Ok(best);
    }
    if directions == 0 {
        return Err(ParamError::OutOfRange("directions must be positive".into()));
    }
    let ratio = |a: &[f64]| {
        let f = sys.combine(a);
        let den = probability_norm(&f, p0);
        if den == 0.0 {
            f64::INFINITY
        } else {
            probability_norm(&f, p1) / den
        }
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut samples: Vec<(f64, Vec<f64>)> = Vec::with_capacity(directions + 2);
    samples.push((ratio(&vec![1.0; n]), vec![1.0; n]));
    let mut e1 = vec![0.0; n];
    e1[0] = 1.0;
    samples.push((ratio(&e1), e1));
    for _ in 0..directions {
        let a: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        samples.push((ratio(&a), a));
    }
    samples.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut best = samples[0].0;
    for (v, a) in samples.into_iter().take(10) {
        best = best.min(pattern_min(&ratio, a, v));
    }
    Ok(best)
}

fn golden_min(f: &impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut best = f(a).min(f(b));
    for _ in 0..100 {
        let x1 = b - r * (b - a);
        let x2 = a + r * (b - a);
        let (f1, f2) = (f(x1), f(x2));
        best = best.min(f1).min(f2);
        if f1 <= f2 {
            b = x2;
        } else {
            a = x1;
        }
        if b - a < 1e-15 {
            break;
        }
    }
    best
}

fn pattern_min(f: &impl Fn(&[f64]) -> f64, mut a: Vec<f64>, mut value: f64) -> f64 {
    let n = a.len();
    let scale = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    a.iter_mut().for_each(|x| *x /= scale);
    let mut h = 0.25;
    while h > 1e-9 {
        let mut improved = true;
        while improved {
            improved = false;
            for k in 0..n {
                for sign in [1.0, -1.0] {
                    let mut t = a.clone();
                    t[k] += sign * h;
                    let v = f(&t);
                    if v < value {
                        value = v;
                        a = t;
                        improved = true;
                    }
                }
            }
        }
        h *= 0.5;
    }
    value
}

/// `span{x_j ⊗ e_j}` for one source-normalised vector `x_j` per level.
#[derive(Clone, Debug, PartialEq)]
pub struct DiagonalWitness {
    /// `D × L`, column `j` is `x_j ⊗ e_j`.
    pub basis: DMatrix<f64>,
    /// `c_j = ‖x_j ⊗ e_j‖_dst`.
    pub dst_norms: Vec<f64>,
}

impl DiagonalWitness {
    /// `Σ_j a_j x_j ⊗ e_j` laid out by level.
    pub fn combine(&self, a: &[f64], sp: &TruncatedMixedSpace) -> Result<SeqVector, ParamError> {
        if a.len() != self.basis.ncols() {
            return Err(ParamError::ShapeMismatch(format!("{} coefficients for {} levels", a.len(), self.basis.ncols())));
        }
        let flat: Vec<f64> = (0..self.basis.nrows())
            .map(|r| (0..a.len()).map(|k| self.basis[(r, k)] * a[k]).sum())
            .collect();
        sp.split(&flat)
    }
}

/// Builds the diagonal witness; each `unit_blocks[j]` must have source norm
/// `w_j ‖x_j‖_p = 1` (relative tolerance `1e-9`).
pub fn diagonal_witness_basis(
    sp_src: &TruncatedMixedSpace,
    sp_dst: &TruncatedMixedSpace,
    unit_blocks: &[Vec<f64>],
) -> Result<DiagonalWitness, ParamError> {
    if !sp_src.same_structure(sp_dst) {
        return Err(ParamError::ShapeMismatch("source and target have different block structures".into()));
    }
    let levels = sp_src.levels();
    if unit_blocks.len() != levels.len() {
        return Err(ParamError::ShapeMismatch(format!("{} blocks for {} levels", unit_blocks.len(), levels.len())));
    }
    let d = sp_src.dimension();
    let mut basis = DMatrix::zeros(d, levels.len());
    let mut dst_norms = Vec::with_capacity(levels.len());
    let mut offset = 0;
    for (k, ((block, ls), ld)) in unit_blocks.iter().zip(levels).zip(sp_dst.levels()).enumerate() {
        if block.len() != ls.block_size {
            return Err(ParamError::ShapeMismatch(format!("block {} has length {}", ls.j, block.len())));
        }
        let norm = ls.weight() * inner_norm(block, sp_src.inner_p())?;
        if (norm - 1.0).abs() > 1e-9 {
            return Err(ParamError::OutOfRange(format!("block at level {} has source norm {norm}, not 1", ls.j)));
        }
        dst_norms.push(ld.weight() * inner_norm(block, sp_dst.inner_p())?);
        for (i, v) in block.iter().enumerate() {
            basis[(offset + i, k)] = *v;
        }
        offset += ls.block_size;
    }
    Ok(DiagonalWitness { basis, dst_norms })
}

/// `span{1_{1..2^{nj}} ⊗ e_j}` over the given `(j, block size)` levels.
pub fn constant_block_witness(levels: &[(i64, usize)], p: Exponent, n_dim: u32) -> Result<DMatrix<f64>, ParamError> {
    p.validate()?;
    if n_dim == 0 {
        return Err(ParamError::ZeroDimension);
    }
    for &(j, m) in levels {
        let expected = u32::try_from(j)
            .ok()
            .and_then(|j| j.checked_mul(n_dim))
            .and_then(|e| 1usize.checked_shl(e));
        if expected != Some(m) {
            return Err(ParamError::ShapeMismatch(format!("level {j} has block size {m}, expected 2^(j·{n_dim})")));
        }
    }
    let d: usize = levels.iter().map(|l| l.1).sum();
    let mut basis = DMatrix::zeros(d, levels.len());
    let mut offset = 0;
    for (k, &(_, m)) in levels.iter().enumerate() {
        for i in 0..m {
            basis[(offset + i, k)] = 1.0;
        }
        offset += m;
    }
    Ok(basis)
}

/// Rows are ambient coordinates, columns are basis vectors `v1, v2, …`.
pub fn basis_to_csv(basis: &DMatrix<f64>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    let header: Vec<String> = (1..=basis.ncols()).map(|k| format!("v{k}")).collect();
    w.write_record(&header).expect("in-memory write");
    for row in basis.row_iter() {
        w.write_record(row.iter().map(|v| v.to_string())).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ascii output")
}

#[derive(Serialize)]
struct BasisDoc {
    rows: usize,
    cols: usize,
    columns: Vec<Vec<f64>>,
}

/// `{"rows":D,"cols":n,"columns":[[...],...]}`
pub fn basis_to_json(basis: &DMatrix<f64>) -> String {
    let doc = BasisDoc {
        rows: basis.nrows(),
        cols: basis.ncols(),
        columns: basis.column_iter().map(|c| c.iter().copied().collect()).collect(),
    };
    serde_json::to_string(&doc).expect("plain data serializes")
}
