//! Weighted mixed-norm sequence spaces `ℓ^q(w_j · ℓ^p(m_j))` on finite level
//! windows, and exact evaluation of their quasi-norms.
//!
//! Level weights are stored as base-2 logarithms. Every weight the library
//! produces itself is a power of two, so dyadic weights and power-of-two block
//! sizes combine without rounding (the probability-normalised identity
//! `m^{-1/r₁} · m^{1/r₁ - 1/r₀} · m^{1/r₀} = 1` comes out as exactly `1.0`).

use serde::{Deserialize, Serialize};

use crate::error::ParamError;
use crate::exponent::{Exponent, Real};

/// The scale `(p, q, s, n)` of a Besov space or of its sequence model.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpaceParams {
    pub p: Exponent,
    pub q: Exponent,
    pub s: Real,
    pub n: u32,
}

impl SpaceParams {
    pub fn new(p: Exponent, q: Exponent, s: Real, n: u32) -> Result<Self, ParamError> {
        let params = SpaceParams { p, q, s, n };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<(), ParamError> {
        self.p.validate()?;
        self.q.validate()?;
        if self.n == 0 {
            return Err(ParamError::ZeroDimension);
        }
        Ok(())
    }

    /// `n/p`, exact when `p` is.
    pub fn n_over_p(&self) -> Real {
        Real::int(i64::from(self.n)).mul(self.p.recip())
    }
}

/// Which sequence model a level weight belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightFlavor {
    /// `2^{j(s - n/p + n/2)}`: inhomogeneous wavelet coefficients, `j ≥ 0`.
    InhomogeneousWavelet,
    /// `2^{j(s - n/p)}`: homogeneous model, `j ∈ ℤ`.
    Homogeneous,
    /// `2^{-jn/p}` on blocks of size `2^{jn}`: the uniform probability measure.
    ProbabilityNormalized,
}

/// `log₂` of [`besov_weight`].
pub fn besov_log2_weight(j: i64, params: &SpaceParams, flavor: WeightFlavor) -> f64 {
    let n = f64::from(params.n);
    let n_over_p = n * params.p.recip_f64();
    let s = params.s.to_f64();
    let per_level = match flavor {
        WeightFlavor::InhomogeneousWavelet => s - n_over_p + n / 2.0,
        WeightFlavor::Homogeneous => s - n_over_p,
        WeightFlavor::ProbabilityNormalized => -n_over_p,
    };
    j as f64 * per_level
}

/// The weight of level `j` in the chosen sequence model.
pub fn besov_weight(j: i64, params: &SpaceParams, flavor: WeightFlavor) -> Result<f64, ParamError> {
    params.validate()?;
    Ok(besov_log2_weight(j, params, flavor).exp2())
}

/// One level of a truncated mixed space.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Level {
    pub j: i64,
    pub block_size: usize,
    log2_weight: f64,
}

impl Level {
    pub fn new(j: i64, block_size: usize, weight: f64) -> Self {
        Level { j, block_size, log2_weight: weight.log2() }
    }

    pub fn with_log2_weight(j: i64, block_size: usize, log2_weight: f64) -> Self {
        Level { j, block_size, log2_weight }
    }

    pub fn weight(&self) -> f64 {
        self.log2_weight.exp2()
    }

    pub fn log2_weight(&self) -> f64 {
        self.log2_weight
    }
}

/// `ℓ^q(w_j · ℓ^p{1..m_j})` over a finite, strictly increasing window of levels.
#[derive(Clone, Debug, PartialEq)]
pub struct TruncatedMixedSpace {
    levels: Vec<Level>,
    outer_q: Exponent,
    inner_p: Exponent,
}

impl TruncatedMixedSpace {
    pub fn new(levels: Vec<Level>, outer_q: Exponent, inner_p: Exponent) -> Result<Self, ParamError> {
        outer_q.validate()?;
        inner_p.validate()?;
        for (k, level) in levels.iter().enumerate() {
            if level.block_size == 0 {
                return Err(ParamError::InvalidSpace(format!("level {} has an empty block", level.j)));
            }
            if !level.log2_weight.is_finite() {
                return Err(ParamError::InvalidSpace(format!(
                    "level {} has a weight that is not positive and finite",
                    level.j
                )));
            }
            if k > 0 && levels[k - 1].j >= level.j {
                return Err(ParamError::InvalidSpace("level indices must be strictly increasing".into()));
            }
        }
        Ok(TruncatedMixedSpace { levels, outer_q, inner_p })
    }

    /// Levels `js` with block sizes `block(j)` and unit weights.
    pub fn unweighted(
        js: impl IntoIterator<Item = i64>,
        block: impl Fn(i64) -> usize,
        outer_q: Exponent,
        inner_p: Exponent,
    ) -> Result<Self, ParamError> {
        let levels = js.into_iter().map(|j| Level::with_log2_weight(j, block(j), 0.0)).collect();
        Self::new(levels, outer_q, inner_p)
    }

    /// The sequence model of `params` under `flavor` over the levels `js`.
    /// Block sizes are supplied by the caller; the probability-normalised
    /// flavor is only meaningful with `block(j) = 2^{jn}`.
    pub fn besov(
        params: &SpaceParams,
        flavor: WeightFlavor,
        js: impl IntoIterator<Item = i64>,
        block: impl Fn(i64) -> usize,
    ) -> Result<Self, ParamError> {
        params.validate()?;
        let levels = js
            .into_iter()
            .map(|j| Level::with_log2_weight(j, block(j), besov_log2_weight(j, params, flavor)))
            .collect();
        Self::new(levels, params.q, params.p)
    }

    /// `ℓ^q((2^{jn})^{-1/p} · ℓ^p{1..2^{jn}})` over `js`, i.e. `ℓ^q(L^p)` of the
    /// uniform probability measure on each block.
    pub fn probability_normalized(
        js: impl IntoIterator<Item = i64>,
        n: u32,
        outer_q: Exponent,
        inner_p: Exponent,
    ) -> Result<Self, ParamError> {
        let params = SpaceParams::new(inner_p, outer_q, Real::zero(), n)?;
        let block = |j: i64| 1usize << (j as u32 * n);
        Self::besov(&params, WeightFlavor::ProbabilityNormalized, js, block)
    }

    pub fn levels(&self) -> &[Level] {
        &self.levels
    }

    pub fn outer_q(&self) -> Exponent {
        self.outer_q
    }

    pub fn inner_p(&self) -> Exponent {
        self.inner_p
    }

    pub fn dimension(&self) -> usize {
        self.levels.iter().map(|l| l.block_size).sum()
    }

    pub fn block_sizes(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.block_size).collect()
    }

    pub fn same_structure(&self, other: &TruncatedMixedSpace) -> bool {
        self.levels.len() == other.levels.len()
            && self.levels.iter().zip(&other.levels).all(|(a, b)| a.j == b.j && a.block_size == b.block_size)
    }

    /// The same levels with every weight multiplied by `2^{js}`.
    pub fn reweighted(&self, s: f64) -> TruncatedMixedSpace {
        let levels = self
            .levels
            .iter()
            .map(|l| Level::with_log2_weight(l.j, l.block_size, l.log2_weight + l.j as f64 * s))
            .collect();
        TruncatedMixedSpace { levels, ..self.clone() }
    }

    /// Same levels and weights, different exponents.
    pub fn with_exponents(&self, outer_q: Exponent, inner_p: Exponent) -> TruncatedMixedSpace {
        TruncatedMixedSpace { levels: self.levels.clone(), outer_q, inner_p }
    }

    pub fn zeros(&self) -> SeqVector {
        SeqVector { blocks: self.levels.iter().map(|l| vec![0.0; l.block_size]).collect() }
    }

    /// Splits a flat coordinate vector into blocks.
    pub fn split(&self, flat: &[f64]) -> Result<SeqVector, ParamError> {
        if flat.len() != self.dimension() {
            return Err(ParamError::ShapeMismatch(format!(
                "flat length {} vs dimension {}",
                flat.len(),
                self.dimension()
            )));
        }
        let mut offset = 0;
        let blocks = self
            .levels
            .iter()
            .map(|l| {
                let b = flat[offset..offset + l.block_size].to_vec();
                offset += l.block_size;
                b
            })
            .collect();
        Ok(SeqVector { blocks })
    }

    /// Quasi-norm of a flat coordinate vector laid out level by level.
    /// No validation; the hot path of the numerical searches.
    pub fn norm_of_flat(&self, flat: &[f64]) -> f64 {
        let p = self.inner_p.value();
        let mut offset = 0;
        let mut terms = [0.0f64; 16];
        let mut spill = Vec::new();
        for (k, l) in self.levels.iter().enumerate() {
            let block = &flat[offset..offset + l.block_size];
            offset += l.block_size;
            let t = l.weight() * lp_norm(block.iter().copied(), p);
            if k < terms.len() {
                terms[k] = t;
            } else {
                spill.push(t);
            }
        }
        let used = self.levels.len().min(terms.len());
        lp_norm(terms[..used].iter().chain(&spill).copied(), self.outer_q.value())
    }
}

/// A block-structured vector living in a [`TruncatedMixedSpace`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeqVector {
    pub blocks: Vec<Vec<f64>>,
}

impl SeqVector {
    pub fn new(blocks: Vec<Vec<f64>>) -> Self {
        SeqVector { blocks }
    }

    pub fn conforms_to(&self, sp: &TruncatedMixedSpace) -> Result<(), ParamError> {
        if self.blocks.len() != sp.levels.len() {
            return Err(ParamError::ShapeMismatch(format!(
                "{} blocks vs {} levels",
                self.blocks.len(),
                sp.levels.len()
            )));
        }
        for (b, l) in self.blocks.iter().zip(&sp.levels) {
            if b.len() != l.block_size {
                return Err(ParamError::ShapeMismatch(format!(
                    "block at level {} has length {} (expected {})",
                    l.j,
                    b.len(),
                    l.block_size
                )));
            }
        }
        Ok(())
    }

    pub fn flatten(&self) -> Vec<f64> {
        self.blocks.iter().flatten().copied().collect()
    }

    pub fn scale(&self, factor: f64) -> SeqVector {
        SeqVector { blocks: self.blocks.iter().map(|b| b.iter().map(|v| v * factor).collect()).collect() }
    }

    /// Entrywise sum; both operands must have the same shape.
    pub fn add(&self, other: &SeqVector) -> SeqVector {
        SeqVector {
            blocks: self
                .blocks
                .iter()
                .zip(&other.blocks)
                .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x + y).collect())
                .collect(),
        }
    }

    /// Largest absolute entry (the `ℓ^∞` / `c₀` norm of all coordinates).
    pub fn sup_norm(&self) -> f64 {
        self.blocks.iter().flatten().fold(0.0, |m: f64, v| m.max(v.abs()))
    }
}

/// Neumaier-compensated sum.
pub(crate) fn compensated_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// `(Σ|v_k|^p)^{1/p}` (max for `p = ∞`) with max-scaling against overflow.
pub(crate) fn lp_norm(values: impl Iterator<Item = f64> + Clone, p: f64) -> f64 {
    let max = values.clone().fold(0.0f64, |m, v| m.max(v.abs()));
    if max == 0.0 || p.is_infinite() {
        return max;
    }
    let inv = 1.0 / max;
    if p == 1.0 {
        return max * compensated_sum(values.map(|v| v.abs() * inv));
    }
    if p == 2.0 {
        return max * compensated_sum(values.map(|v| (v * inv) * (v * inv))).sqrt();
    }
    let sum = compensated_sum(values.map(|v| (v.abs() * inv).powf(p)));
    max * sum.powf(1.0 / p)
}

/// `‖v‖_{ℓ^p}`; zero for the empty vector.
pub fn inner_norm(v: &[f64], p: Exponent) -> Result<f64, ParamError> {
    p.validate()?;
    if let Some(bad) = v.iter().find(|x| !x.is_finite()) {
        return Err(ParamError::NonFiniteEntry(*bad));
    }
    Ok(lp_norm(v.iter().copied(), p.value()))
}

/// `(Σ_j (w_j ‖x_j‖_p)^q)^{1/q}`, supremum over `j` when `q = ∞`.
pub fn mixed_norm(x: &SeqVector, sp: &TruncatedMixedSpace) -> Result<f64, ParamError> {
    x.conforms_to(sp)?;
    let mut terms = Vec::with_capacity(sp.levels.len());
    for (block, level) in x.blocks.iter().zip(&sp.levels) {
        terms.push(level.weight() * inner_norm(block, sp.inner_p)?);
    }
    Ok(lp_norm(terms.iter().copied(), sp.outer_q.value()))
}

/// Plain `‖x‖_{ℓ^q(ℓ^p)}` with unit weights, for any block shape.
pub fn unweighted_mixed_norm(x: &SeqVector, p: Exponent, q: Exponent) -> Result<f64, ParamError> {
    let mut terms = Vec::with_capacity(x.blocks.len());
    for block in &x.blocks {
        terms.push(inner_norm(block, p)?);
    }
    q.validate()?;
    Ok(lp_norm(terms.iter().copied(), q.value()))
}

/// `J_s`: multiplies block `j` by `2^{js}`.
///
/// `mixed_norm(J_s x, sp) == mixed_norm(x, sp.reweighted(s))` for every `x`.
pub fn j_s_reweight(x: &SeqVector, sp: &TruncatedMixedSpace, s: f64) -> Result<SeqVector, ParamError> {
    x.conforms_to(sp)?;
    let blocks = x
        .blocks
        .iter()
        .zip(&sp.levels)
        .map(|(b, l)| {
            let factor = (l.j as f64 * s).exp2();
            b.iter().map(|v| v * factor).collect()
        })
        .collect();
    Ok(SeqVector { blocks })
}

/// Quasi-triangle constant `2^{max(1/min(p,q) - 1, 0)}` of `ℓ^q(ℓ^p)`.
pub fn quasi_triangle_constant(p: Exponent, q: Exponent) -> f64 {
    let r_inv = p.recip_f64().max(q.recip_f64());
    (r_inv - 1.0).max(0.0).exp2()
}

/// Exact operator norm of the identity `src → dst` between two weightings of
/// the same block structure.
///
/// Level `j` contributes `c_j = (w_j^dst / w_j^src) · m_j^{max(0, 1/p_dst - 1/p_src)}`;
/// the levels combine by a supremum when `q_src ≤ q_dst`, and by the `ℓ^r` norm
/// with `1/r = 1/q_dst - 1/q_src` otherwise.
pub fn block_embedding_norm(src: &TruncatedMixedSpace, dst: &TruncatedMixedSpace) -> Result<f64, ParamError> {
    if !src.same_structure(dst) {
        return Err(ParamError::ShapeMismatch("source and target have different block structures".into()));
    }
    if src.levels.is_empty() {
        return Err(ParamError::InvalidSpace("no levels".into()));
    }
    let inner_gap = (dst.inner_p.recip_f64() - src.inner_p.recip_f64()).max(0.0);
    let log2_factors: Vec<f64> = src
        .levels
        .iter()
        .zip(&dst.levels)
        .map(|(s, d)| d.log2_weight - s.log2_weight + inner_gap * (s.block_size as f64).log2())
        .collect();
    if src.outer_q.compare(dst.outer_q) != std::cmp::Ordering::Greater {
        let top = log2_factors.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        return Ok(top.exp2());
    }
    let r = 1.0 / (dst.outer_q.recip_f64() - src.outer_q.recip_f64());
    Ok(lp_norm(log2_factors.iter().map(|e| e.exp2()), r))
}

#[derive(Serialize, Deserialize)]
struct LevelValues {
    j: i64,
    weight: f64,
    values: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct LabeledVector {
    levels: Vec<LevelValues>,
}

#[derive(Serialize, Deserialize)]
struct LevelShape {
    j: i64,
    weight: f64,
    block_size: usize,
}

#[derive(Serialize, Deserialize)]
struct SpaceDoc {
    p: Exponent,
    q: Exponent,
    levels: Vec<LevelShape>,
}

/// `{"levels":[{"j":..,"weight":..,"values":[..]},..]}`
pub fn vector_to_json(x: &SeqVector, sp: &TruncatedMixedSpace) -> Result<String, ParamError> {
    x.conforms_to(sp)?;
    let doc = LabeledVector {
        levels: sp
            .levels
            .iter()
            .zip(&x.blocks)
            .map(|(l, b)| LevelValues { j: l.j, weight: l.weight(), values: b.clone() })
            .collect(),
    };
    Ok(serde_json::to_string(&doc).expect("plain data serializes"))
}

/// Inverse of [`vector_to_json`]; the exponents are not part of the vector
/// document and are supplied by the caller.
pub fn vector_from_json(
    json: &str,
    outer_q: Exponent,
    inner_p: Exponent,
) -> Result<(TruncatedMixedSpace, SeqVector), ParamError> {
    let doc: LabeledVector = serde_json::from_str(json).map_err(|e| ParamError::Unparsable(e.to_string()))?;
    let mut levels = Vec::with_capacity(doc.levels.len());
    let mut blocks = Vec::with_capacity(doc.levels.len());
    for lv in doc.levels {
        if !(lv.weight > 0.0) {
            return Err(ParamError::InvalidSpace(format!("weight {} at level {}", lv.weight, lv.j)));
        }
        if let Some(bad) = lv.values.iter().find(|v| !v.is_finite()) {
            return Err(ParamError::NonFiniteEntry(*bad));
        }
        levels.push(Level::new(lv.j, lv.values.len(), lv.weight));
        blocks.push(lv.values);
    }
    let sp = TruncatedMixedSpace::new(levels, outer_q, inner_p)?;
    Ok((sp, SeqVector { blocks }))
}

/// `{"p":..,"q":..,"levels":[{"j":..,"weight":..,"block_size":..},..]}`
pub fn space_to_json(sp: &TruncatedMixedSpace) -> String {
    let doc = SpaceDoc {
        p: sp.inner_p,
        q: sp.outer_q,
        levels: sp
            .levels
            .iter()
            .map(|l| LevelShape { j: l.j, weight: l.weight(), block_size: l.block_size })
            .collect(),
    };
    serde_json::to_string(&doc).expect("plain data serializes")
}

pub fn space_from_json(json: &str) -> Result<TruncatedMixedSpace, ParamError> {
    let doc: SpaceDoc = serde_json::from_str(json).map_err(|e| ParamError::Unparsable(e.to_string()))?;
    let levels = doc.levels.iter().map(|l| Level::new(l.j, l.block_size, l.weight)).collect();
    TruncatedMixedSpace::new(levels, doc.q, doc.p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn exps() -> [Exponent; 4] {
        [Exponent::ratio(1, 2), Exponent::int(1), Exponent::int(2), Exponent::Infinite]
    }

    fn two_levels(p: Exponent, q: Exponent, weights: [f64; 2], sizes: [usize; 2]) -> TruncatedMixedSpace {
        TruncatedMixedSpace::new(
            vec![Level::new(0, sizes[0], weights[0]), Level::new(1, sizes[1], weights[1])],
            q,
            p,
        )
        .unwrap()
    }

    #[test]
    fn inner_norm_examples() {
        assert_eq!(inner_norm(&[3.0, 4.0], Exponent::int(2)).unwrap(), 5.0);
        assert_eq!(inner_norm(&[1.0, 1.0, 1.0], Exponent::Infinite).unwrap(), 1.0);
        assert_eq!(inner_norm(&[1.0, 1.0], Exponent::ratio(1, 2)).unwrap(), 4.0);
        assert_eq!(inner_norm(&[], Exponent::ratio(1, 2)).unwrap(), 0.0);
        assert_eq!(inner_norm(&[0.0, 0.0], Exponent::ratio(1, 3)).unwrap(), 0.0);
    }

    #[test]
    fn inner_norm_rejects_bad_input() {
        assert!(inner_norm(&[1.0, f64::NAN], Exponent::int(1)).is_err());
        assert!(inner_norm(&[f64::INFINITY], Exponent::int(1)).is_err());
        assert!(inner_norm(&[1.0], Exponent::Finite(Real::int(0))).is_err());
        assert!(inner_norm(&[1.0], Exponent::Finite(Real::int(-1))).is_err());
    }

    #[test]
    fn mixed_norm_examples() {
        let sp = two_levels(Exponent::int(2), Exponent::int(1), [1.0, 1.0], [2, 2]);
        let x = SeqVector::new(vec![vec![3.0, 4.0], vec![0.0, 0.0]]);
        assert_eq!(mixed_norm(&x, &sp).unwrap(), 5.0);

        let sp = two_levels(Exponent::int(1), Exponent::Infinite, [1.0, 2.0], [1, 1]);
        let x = SeqVector::new(vec![vec![1.0], vec![1.0]]);
        assert_eq!(mixed_norm(&x, &sp).unwrap(), 2.0);

        let sp = two_levels(Exponent::Infinite, Exponent::int(2), [1.0, 1.0], [2, 2]);
        let x = SeqVector::new(vec![vec![1.0, 1.0], vec![1.0, 1.0]]);
        assert!((mixed_norm(&x, &sp).unwrap() - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn mixed_norm_shape_mismatch() {
        let sp = two_levels(Exponent::int(2), Exponent::int(1), [1.0, 1.0], [2, 2]);
        assert!(mixed_norm(&SeqVector::new(vec![vec![1.0, 2.0]]), &sp).is_err());
        assert!(mixed_norm(&SeqVector::new(vec![vec![1.0], vec![1.0, 2.0]]), &sp).is_err());
    }

    #[test]
    fn besov_weight_examples() {
        let any = SpaceParams::new(Exponent::int(3), Exponent::int(1), Real::ratio(5, 7), 2).unwrap();
        assert_eq!(besov_weight(0, &any, WeightFlavor::InhomogeneousWavelet).unwrap(), 1.0);
        let p = SpaceParams::new(Exponent::int(2), Exponent::int(1), Real::int(1), 1).unwrap();
        assert_eq!(besov_weight(1, &p, WeightFlavor::InhomogeneousWavelet).unwrap(), 2.0);
        let p = SpaceParams::new(Exponent::int(1), Exponent::int(1), Real::int(0), 1).unwrap();
        assert_eq!(besov_weight(2, &p, WeightFlavor::ProbabilityNormalized).unwrap(), 0.25);
        let p = SpaceParams::new(Exponent::int(1), Exponent::int(1), Real::int(3), 1).unwrap();
        assert_eq!(besov_weight(-1, &p, WeightFlavor::Homogeneous).unwrap(), 0.25);
    }

    #[test]
    fn j_s_reweight_examples() {
        let sp = two_levels(Exponent::int(2), Exponent::int(2), [1.0, 1.0], [2, 1]);
        let x = SeqVector::new(vec![vec![1.5, -2.0], vec![3.0]]);
        assert_eq!(j_s_reweight(&x, &sp, 0.0).unwrap(), x);
        let y = j_s_reweight(&x, &sp, 1.0).unwrap();
        assert_eq!(y, SeqVector::new(vec![vec![1.5, -2.0], vec![6.0]]));
    }

    #[test]
    fn block_embedding_norm_examples() {
        let one = |p: Exponent, q: Exponent| {
            TruncatedMixedSpace::new(vec![Level::new(0, 4, 1.0)], q, p).unwrap()
        };
        let src = one(Exponent::Infinite, Exponent::int(1));
        let dst = one(Exponent::int(1), Exponent::int(1));
        assert_eq!(block_embedding_norm(&src, &dst).unwrap(), 4.0);
        let x = SeqVector::new(vec![vec![1.0; 4]]);
        assert_eq!(mixed_norm(&x, &dst).unwrap() / mixed_norm(&x, &src).unwrap(), 4.0);
        assert_eq!(block_embedding_norm(&src, &src).unwrap(), 1.0);

        let src = TruncatedMixedSpace::probability_normalized(0..4, 1, Exponent::int(1), Exponent::Infinite).unwrap();
        let dst = TruncatedMixedSpace::probability_normalized(0..4, 1, Exponent::int(1), Exponent::int(1)).unwrap();
        assert_eq!(block_embedding_norm(&src, &dst).unwrap(), 1.0);
    }

    #[test]
    fn block_embedding_norm_outer_hoelder() {
        // q_src = 2 > q_dst = 1 with per-level factors (1, 1): ℓ^2 norm of (1,1).
        let src = two_levels(Exponent::int(1), Exponent::int(2), [1.0, 1.0], [1, 1]);
        let dst = two_levels(Exponent::int(1), Exponent::int(1), [1.0, 1.0], [1, 1]);
        assert!((block_embedding_norm(&src, &dst).unwrap() - 2f64.sqrt()).abs() < 1e-15);
        let x = SeqVector::new(vec![vec![1.0], vec![1.0]]);
        let ratio = mixed_norm(&x, &dst).unwrap() / mixed_norm(&x, &src).unwrap();
        assert!((ratio - 2f64.sqrt()).abs() < 1e-15);
        let other = two_levels(Exponent::int(1), Exponent::int(1), [1.0, 1.0], [1, 2]);
        assert!(block_embedding_norm(&src, &other).is_err());
    }

    #[test]
    fn probability_normalisation_constant_vector_attains_one() {
        for r0 in exps() {
            for r1 in exps() {
                if r1.compare(r0) == std::cmp::Ordering::Greater {
                    continue;
                }
                for k in 0..5 {
                    let src = TruncatedMixedSpace::probability_normalized([k], 1, Exponent::int(1), r0).unwrap();
                    let dst = TruncatedMixedSpace::probability_normalized([k], 1, Exponent::int(1), r1).unwrap();
                    assert_eq!(block_embedding_norm(&src, &dst).unwrap(), 1.0);
                    let ones = SeqVector::new(vec![vec![1.0; 1 << k]]);
                    let a = mixed_norm(&ones, &src).unwrap();
                    let b = mixed_norm(&ones, &dst).unwrap();
                    assert!((a - 1.0).abs() < 1e-14 && (b - 1.0).abs() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn json_round_trip() {
        let sp = two_levels(Exponent::ratio(1, 2), Exponent::Infinite, [0.5, 4.0], [2, 1]);
        let x = SeqVector::new(vec![vec![1.0, -2.5], vec![0.125]]);
        let json = vector_to_json(&x, &sp).unwrap();
        assert_eq!(json, r#"{"levels":[{"j":0,"weight":0.5,"values":[1.0,-2.5]},{"j":1,"weight":4.0,"values":[0.125]}]}"#);
        let (sp2, x2) = vector_from_json(&json, Exponent::Infinite, Exponent::ratio(1, 2)).unwrap();
        assert_eq!((sp2, x2), (sp.clone(), x));
        let sjson = space_to_json(&sp);
        assert!(sjson.contains(r#""q":"inf""#));
        assert_eq!(space_from_json(&sjson).unwrap(), sp);
    }

    fn arb_exponent() -> impl Strategy<Value = Exponent> {
        prop::sample::select(exps().to_vec())
    }

    fn arb_vector() -> impl Strategy<Value = Vec<Vec<f64>>> {
        prop::collection::vec(prop::collection::vec(-10.0f64..10.0, 3), 3)
    }

    fn space3(p: Exponent, q: Exponent) -> TruncatedMixedSpace {
        TruncatedMixedSpace::new(
            vec![Level::new(0, 3, 1.0), Level::new(1, 3, 0.5), Level::new(2, 3, 3.0)],
            q,
            p,
        )
        .unwrap()
    }

    proptest! {
        #[test]
        fn quasi_triangle(p in arb_exponent(), q in arb_exponent(), a in arb_vector(), b in arb_vector()) {
            let sp = space3(p, q);
            let x = SeqVector::new(a);
            let y = SeqVector::new(b);
            let lhs = mixed_norm(&x.add(&y), &sp).unwrap();
            let rhs = quasi_triangle_constant(p, q) * (mixed_norm(&x, &sp).unwrap() + mixed_norm(&y, &sp).unwrap());
            prop_assert!(lhs <= rhs * (1.0 + 1e-12));
        }

        #[test]
        fn homogeneity(p in arb_exponent(), q in arb_exponent(), a in arb_vector(), lambda in -5.0f64..5.0) {
            let sp = space3(p, q);
            let x = SeqVector::new(a);
            let lhs = mixed_norm(&x.scale(lambda), &sp).unwrap();
            let rhs = lambda.abs() * mixed_norm(&x, &sp).unwrap();
            prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs.max(1.0));
        }

        #[test]
        fn monotone_in_p(v in prop::collection::vec(-10.0f64..10.0, 0..8), i in 0usize..4, k in 0usize..4) {
            let (p0, p1) = if i <= k { (exps()[i], exps()[k]) } else { (exps()[k], exps()[i]) };
            let big = inner_norm(&v, p0).unwrap();
            let small = inner_norm(&v, p1).unwrap();
            prop_assert!(small <= big * (1.0 + 1e-12));
        }

        #[test]
        fn j_s_norm_identity(p in arb_exponent(), q in arb_exponent(), a in arb_vector(), s in -2.0f64..2.0) {
            let sp = space3(p, q);
            let x = SeqVector::new(a);
            let lhs = mixed_norm(&j_s_reweight(&x, &sp, s).unwrap(), &sp).unwrap();
            let rhs = mixed_norm(&x, &sp.reweighted(s)).unwrap();
            prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs.max(1.0));
        }

        #[test]
        fn j_s_preserves_ratios(
            p0 in arb_exponent(), q0 in arb_exponent(), p1 in arb_exponent(), q1 in arb_exponent(),
            a in arb_vector(), s in -2.0f64..2.0,
        ) {
            let src = space3(p0, q0);
            let dst = space3(p1, q1);
            let x = SeqVector::new(a);
            let n_src = mixed_norm(&x, &src).unwrap();
            prop_assume!(n_src > 1e-9);
            let before = mixed_norm(&x, &dst).unwrap() / n_src;
            let y = j_s_reweight(&x, &src, -s).unwrap();
            let after = mixed_norm(&y, &dst.reweighted(s)).unwrap() / mixed_norm(&y, &src.reweighted(s)).unwrap();
            prop_assert!((before - after).abs() <= 1e-10 * before.max(1.0));
        }

        #[test]
        fn flat_norm_matches_blocks(p in arb_exponent(), q in arb_exponent(), a in arb_vector()) {
            let sp = space3(p, q);
            let x = SeqVector::new(a);
            prop_assert_eq!(sp.norm_of_flat(&x.flatten()), mixed_norm(&x, &sp).unwrap());
        }
    }
}
