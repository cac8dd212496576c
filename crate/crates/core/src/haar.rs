//! One-dimensional Haar analysis with exact dyadic arithmetic.
//!
//! `ψ_{jm}(x) = 2^{j/2} ψ(2^j(x - m))` with `m ∈ 2^{-j}ℤ`, mother `ψ = 1` on
//! `[0, 1/2)` and `-1` on `[1/2, 1)`; the father `φ = 1_{[0,1)}` only appears at
//! level 0 with integer shifts. Coefficients are kept as the rational
//! `2^{-j/2}(f, ψ_{jm})`, so that every quantity here except the Besov norm is
//! exact.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use num_traits::{One, Zero};
use serde_json::{json, Value};

use crate::error::ParamError;
use crate::spaces::{besov_log2_weight, mixed_norm, Level, SeqVector, SpaceParams, TruncatedMixedSpace, WeightFlavor};

pub type Q = Ratio<i128>;

fn pow2(e: u32) -> Q {
    Q::from_integer(1i128 << e)
}

fn is_dyadic(x: &Q) -> bool {
    x.denom().count_ones() == 1
}

fn parse_q(s: &str) -> Result<Q, ParamError> {
    Q::from_str(s.trim()).map_err(|_| ParamError::Unparsable(s.to_string()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Generator {
    Father,
    Mother,
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Generator::Father => "father",
            Generator::Mother => "mother",
        })
    }
}

/// Level, position and generator of one Haar function. Ordered by level,
/// then position, then father before mother.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HaarIndex {
    pub j: u32,
    pub m: Q,
    pub g: Generator,
}

impl HaarIndex {
    pub fn new(j: u32, m: Q, g: Generator) -> Result<Self, ParamError> {
        if g == Generator::Father && j != 0 {
            return Err(ParamError::OutOfRange(format!("father at level {j}")));
        }
        if !(m * pow2(j)).is_integer() {
            return Err(ParamError::OutOfRange(format!("position {m} is not in 2^-{j}Z")));
        }
        Ok(HaarIndex { j, m, g })
    }

    pub fn father(m: i128) -> Self {
        HaarIndex { j: 0, m: Q::from_integer(m), g: Generator::Father }
    }

    /// Mother at level `j` and position `k·2^{-j}`.
    pub fn mother(j: u32, k: i128) -> Self {
        HaarIndex { j, m: Q::new(k, 1i128 << j), g: Generator::Mother }
    }

    fn width(&self) -> Q {
        Q::new(1, 1i128 << self.j)
    }
}

/// A compactly supported step function with dyadic breakpoints and rational
/// values, kept in canonical form: no zero intervals at either end and no two
/// neighbouring intervals with the same value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PiecewiseConstant {
    breakpoints: Vec<Q>,
    values: Vec<Q>,
}

impl PiecewiseConstant {
    pub fn new(breakpoints: Vec<Q>, values: Vec<Q>) -> Result<Self, ParamError> {
        if breakpoints.is_empty() && values.is_empty() {
            return Ok(Self::zero());
        }
        if breakpoints.len() != values.len() + 1 {
            return Err(ParamError::ShapeMismatch(format!(
                "{} breakpoints for {} values",
                breakpoints.len(),
                values.len()
            )));
        }
        if let Some(b) = breakpoints.iter().find(|b| !is_dyadic(b)) {
            return Err(ParamError::OutOfRange(format!("breakpoint {b} is not dyadic")));
        }
        if breakpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(ParamError::OutOfRange("breakpoints must increase strictly".into()));
        }
        Ok(Self::canonical(breakpoints, values))
    }

    pub fn zero() -> Self {
        PiecewiseConstant { breakpoints: Vec::new(), values: Vec::new() }
    }

    /// `c · 1_{[a,b)}`.
    pub fn indicator(a: Q, b: Q, c: Q) -> Result<Self, ParamError> {
        Self::new(vec![a, b], vec![c])
    }

    /// The mother or father function `ψ_{jm}` scaled by `2^{-j/2}`, so that it
    /// takes the values `±1`.
    pub fn haar_shape(idx: &HaarIndex) -> Self {
        let h = idx.width();
        match idx.g {
            Generator::Father => Self::canonical(vec![idx.m, idx.m + Q::one()], vec![Q::one()]),
            Generator::Mother => Self::canonical(
                vec![idx.m, idx.m + h / Q::from_integer(2), idx.m + h],
                vec![Q::one(), -Q::one()],
            ),
        }
    }

    fn canonical(breakpoints: Vec<Q>, values: Vec<Q>) -> Self {
        let mut bs: Vec<Q> = Vec::with_capacity(breakpoints.len());
        let mut vs: Vec<Q> = Vec::with_capacity(values.len());
        for (k, v) in values.into_iter().enumerate() {
            if vs.last() == Some(&v) {
                continue;
            }
            bs.push(breakpoints[k]);
            vs.push(v);
        }
        if let Some(last) = breakpoints.last() {
            bs.push(*last);
        }
        let lead = vs.iter().take_while(|v| v.is_zero()).count();
        let trail = vs.iter().rev().take_while(|v| v.is_zero()).count();
        if lead == vs.len() {
            return Self::zero();
        }
        let vs = vs[lead..vs.len() - trail].to_vec();
        let bs = bs[lead..bs.len() - trail].to_vec();
        PiecewiseConstant { breakpoints: bs, values: vs }
    }

    pub fn breakpoints(&self) -> &[Q] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[Q] {
        &self.values
    }

    pub fn is_zero(&self) -> bool {
        self.values.is_empty()
    }

    /// Smallest closed interval outside which the function vanishes.
    pub fn support(&self) -> Option<(Q, Q)> {
        Some((*self.breakpoints.first()?, *self.breakpoints.last()?))
    }

    pub fn eval(&self, x: Q) -> Q {
        match self.breakpoints.partition_point(|b| *b <= x) {
            0 => Q::zero(),
            k if k >= self.breakpoints.len() => Q::zero(),
            k => self.values[k - 1],
        }
    }

    /// `∫_a^b f` for `a ≤ b`.
    pub fn integral(&self, a: Q, b: Q) -> Q {
        // one pass over the intervals overlapping [a, b]
        let start = self.breakpoints.partition_point(|p| *p <= a).saturating_sub(1);
        let mut acc = Q::zero();
        for k in start..self.values.len() {
            let (lo, hi) = (self.breakpoints[k], self.breakpoints[k + 1]);
            if lo >= b {
                break;
            }
            let lo = if lo > a { lo } else { a };
            let hi = if hi < b { hi } else { b };
            if hi > lo {
                acc += self.values[k] * (hi - lo);
            }
        }
        acc
    }

    /// `∫ f²`.
    pub fn l2_squared(&self) -> Q {
        self.values
            .iter()
            .enumerate()
            .map(|(k, v)| *v * *v * (self.breakpoints[k + 1] - self.breakpoints[k]))
            .fold(Q::zero(), |a, b| a + b)
    }

    /// Finest level `J` such that every breakpoint lies in `2^{-J}ℤ`.
    pub fn resolution(&self) -> u32 {
        self.breakpoints.iter().map(|b| b.denom().trailing_zeros()).max().unwrap_or(0)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "breakpoints": self.breakpoints.iter().map(|b| b.to_string()).collect::<Vec<_>>(),
            "values": self.values.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(value: &Value) -> Result<Self, ParamError> {
        let strings = |key: &str| -> Result<Vec<Q>, ParamError> {
            let arr = value
                .get(key)
                .and_then(Value::as_array)
                .ok_or_else(|| ParamError::ShapeMismatch(format!("missing array {key:?}")))?;
            arr.iter()
                .map(|v| match v {
                    Value::String(s) => parse_q(s),
                    Value::Number(n) => parse_q(&n.to_string()),
                    other => Err(ParamError::Unparsable(other.to_string())),
                })
                .collect()
        };
        Self::new(strings("breakpoints")?, strings("values")?)
    }
}

/// Haar coefficients stored as `ĉ = 2^{-j/2}(f, ψ_{jm})`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct HaarCoefficients {
    map: BTreeMap<HaarIndex, Q>,
}

impl HaarCoefficients {
    pub fn new() -> Self {
        Self::default()
    }

    /// Sets the scaled coefficient `ĉ` of `idx`.
    pub fn insert_scaled(&mut self, idx: HaarIndex, c: Q) {
        self.map.insert(idx, c);
    }

    pub fn scaled(&self, idx: &HaarIndex) -> Q {
        self.map.get(idx).copied().unwrap_or_else(Q::zero)
    }

    /// The true inner product `(f, ψ_{jm}) = ĉ · 2^{j/2}`.
    pub fn value(&self, idx: &HaarIndex) -> f64 {
        let c = self.scaled(idx);
        ratio_to_f64(&c) * (f64::from(idx.j) / 2.0).exp2()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&HaarIndex, &Q)> {
        self.map.iter()
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    /// Drops zero entries.
    pub fn pruned(&self) -> Self {
        HaarCoefficients { map: self.map.iter().filter(|(_, c)| !c.is_zero()).map(|(k, c)| (k.clone(), *c)).collect() }
    }

    pub fn restrict(&self, keep: impl Fn(&HaarIndex) -> bool) -> Self {
        HaarCoefficients { map: self.map.iter().filter(|(k, _)| keep(k)).map(|(k, c)| (k.clone(), *c)).collect() }
    }

    pub fn max_level(&self) -> Option<u32> {
        self.map.keys().map(|k| k.j).max()
    }

    /// `Σ (f, ψ_{jm})²`, exact.
    pub fn sum_of_squares(&self) -> Q {
        self.map.iter().map(|(k, c)| *c * *c * pow2(k.j)).fold(Q::zero(), |a, b| a + b)
    }

    pub fn to_json(&self) -> Value {
        Value::Array(
            self.map
                .iter()
                .map(|(k, _)| json!({"j": k.j, "m": k.m.to_string(), "g": k.g.to_string(), "c": self.value(k)}))
                .collect(),
        )
    }
}

fn ratio_to_f64(x: &Q) -> f64 {
    // numerators and denominators here stay well inside f64's exponent range
    *x.numer() as f64 / *x.denom() as f64
}

/// Integer range of `k` with `[k h, (k+1) h)` meeting `(a, b)`, `h = 2^{-j}`.
fn positions_meeting(a: Q, b: Q, j: u32) -> std::ops::RangeInclusive<i128> {
    let lo = (a * pow2(j)).floor().to_integer();
    let hi = (b * pow2(j)).ceil().to_integer() - 1;
    lo..=hi
}

/// All coefficients of `f` on levels `0..=jmax` whose support meets the
/// support of `f`.
pub fn haar_analyze(f: &PiecewiseConstant, jmax: u32) -> HaarCoefficients {
    let mut out = HaarCoefficients::new();
    let Some((a, b)) = f.support() else {
        return out;
    };
    for k in positions_meeting(a, b, 0) {
        let m = Q::from_integer(k);
        out.insert_scaled(HaarIndex::father(k), f.integral(m, m + Q::one()));
    }
    for j in 0..=jmax {
        let h = Q::new(1, 1i128 << j);
        let half = h / Q::from_integer(2);
        for k in positions_meeting(a, b, j) {
            let m = Q::from_integer(k) * h;
            let c = f.integral(m, m + half) - f.integral(m + half, m + h);
            out.insert_scaled(HaarIndex::mother(j, k), c);
        }
    }
    out
}

/// `Σ ĉ 2^{j/2} ψ_{jm}`, exact.
pub fn haar_synthesize(coeffs: &HaarCoefficients) -> PiecewiseConstant {
    // jumps of the step function, accumulated left to right
    let mut jumps: BTreeMap<Q, Q> = BTreeMap::new();
    let mut bump = |x: Q, d: Q| *jumps.entry(x).or_insert_with(Q::zero) += d;
    for (idx, c) in coeffs.iter() {
        if c.is_zero() {
            continue;
        }
        match idx.g {
            Generator::Father => {
                bump(idx.m, *c);
                bump(idx.m + Q::one(), -*c);
            }
            Generator::Mother => {
                let h = idx.width();
                let a = *c * pow2(idx.j);
                bump(idx.m, a);
                bump(idx.m + h / Q::from_integer(2), -a - a);
                bump(idx.m + h, a);
            }
        }
    }
    let breakpoints: Vec<Q> = jumps.keys().copied().collect();
    let mut level = Q::zero();
    let mut values = Vec::with_capacity(breakpoints.len().saturating_sub(1));
    for d in jumps.values().take(breakpoints.len().saturating_sub(1)) {
        level += *d;
        values.push(level);
    }
    if breakpoints.len() < 2 {
        return PiecewiseConstant::zero();
    }
    PiecewiseConstant::canonical(breakpoints, values)
}

/// True when Haar coefficients characterise `B^s_{pq}(ℝ)`:
/// `1/p - 1 < s < min(1, 1/p)`.
pub fn haar_valid(params: &SpaceParams) -> bool {
    let inv_p = params.p.recip_f64();
    let s = params.s.to_f64();
    inv_p - 1.0 < s && s < inv_p.min(1.0)
}

/// The sequence-space norm of `coeffs` in the model of `B^s_{pq}(ℝ)`.
/// Level `j` is the block of all coefficients stored at that level.
pub fn besov_seq_norm(
    coeffs: &HaarCoefficients,
    params: &SpaceParams,
    flavor: WeightFlavor,
) -> Result<f64, ParamError> {
    params.validate()?;
    if params.n != 1 {
        return Err(ParamError::DimensionMismatch(params.n, 1));
    }
    if !haar_valid(params) {
        log::warn!(
            "s = {} lies outside 1/p - 1 < s < min(1, 1/p); Haar norms are not equivalent to Besov norms here",
            params.s
        );
    }
    let top = coeffs.max_level().unwrap_or(0);
    let mut blocks: Vec<Vec<f64>> = vec![Vec::new(); top as usize + 1];
    for (idx, _) in coeffs.iter() {
        blocks[idx.j as usize].push(coeffs.value(idx));
    }
    for b in blocks.iter_mut().filter(|b| b.is_empty()) {
        b.push(0.0);
    }
    let levels = blocks
        .iter()
        .enumerate()
        .map(|(j, b)| Level::with_log2_weight(j as i64, b.len(), besov_log2_weight(j as i64, params, flavor)))
        .collect();
    let space = TruncatedMixedSpace::new(levels, params.q, params.p)?;
    mixed_norm(&SeqVector::new(blocks), &space)
}

/// An open interval `(lo, hi)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Interval {
    pub lo: Q,
    pub hi: Q,
}

impl Interval {
    pub fn new(lo: Q, hi: Q) -> Result<Self, ParamError> {
        if lo >= hi {
            return Err(ParamError::OutOfRange(format!("empty interval ({lo}, {hi})")));
        }
        Ok(Interval { lo, hi })
    }

    pub fn length(&self) -> Q {
        self.hi - self.lo
    }
}

impl FromStr for Interval {
    type Err = ParamError;

    /// `"(a,b)"` or `"a,b"` with rational endpoints.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim().trim_start_matches('(').trim_end_matches(')');
        let (a, b) = t.split_once(',').ok_or_else(|| ParamError::Unparsable(s.to_string()))?;
        Interval::new(parse_q(a)?, parse_q(b)?)
    }
}

/// Positions at one level: `r` has support inside `V`, `s` meets `U`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndexSets {
    pub j: u32,
    pub r: Vec<Q>,
    pub s: Vec<Q>,
}

/// For each `j ≤ jmax` the positions `m ∈ 2^{-j}ℤ` whose support
/// `[m, m + 2^{l-j}]` lies in `V` (`R_j`) or meets `U` (`S_j`).
pub fn support_index_sets(v: Interval, u: Interval, jmax: u32, l: u32) -> Result<Vec<IndexSets>, ParamError> {
    if !(u.lo < v.lo && v.hi < u.hi) {
        return Err(ParamError::OutOfRange(format!(
            "({}, {}) is not compactly contained in ({}, {})",
            v.lo, v.hi, u.lo, u.hi
        )));
    }
    Ok((0..=jmax)
        .map(|j| {
            let step = Q::new(1, 1i128 << j);
            let len = step * pow2(l);
            let r: Vec<Q> = ((v.lo / step).floor().to_integer()..=(v.hi / step).ceil().to_integer())
                .map(|k| Q::from_integer(k) * step)
                .filter(|m| v.lo < *m && *m + len < v.hi)
                .collect();
            let s: Vec<Q> = (((u.lo - len) / step).floor().to_integer()..=(u.hi / step).ceil().to_integer())
                .map(|k| Q::from_integer(k) * step)
                .filter(|m| *m < u.hi && *m + len > u.lo)
                .collect();
            IndexSets { j, r, s }
        })
        .collect())
}

/// Smallest `A ≤ max_a` with `#R_j ≥ 2^{j-A}` for `j ≥ A` and
/// `#S_j ≤ 2^{j+A}` for every level in `sets`.
pub fn counting_constant(sets: &[IndexSets], max_a: u32) -> Option<u32> {
    (0..=max_a).find(|&a| {
        sets.iter().all(|lv| {
            let lower = lv.j < a || lv.r.len() as u128 >= 1u128 << (lv.j - a);
            let upper = (lv.s.len() as u128) <= 1u128 << (lv.j + a);
            lower && upper
        })
    })
}
