//! Decision procedures for Besov embeddings on bounded Lipschitz domains, on
//! `ℝⁿ`, and between homogeneous spaces.
//!
//! Everything is decided from `d = s₀ - s₁`, `g' = n/p₀ - n/p₁`, `g = max(0, g')`
//! and the order of `q₀, q₁`, with exact rational comparisons whenever the
//! inputs are exact.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::ParamError;
use crate::exponent::{Exponent, Real};
use crate::spaces::SpaceParams;

use Ordering::{Equal, Greater, Less};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Setting {
    Domain,
    Rn,
    Homogeneous,
}

impl Setting {
    pub const ALL: [Setting; 3] = [Setting::Domain, Setting::Rn, Setting::Homogeneous];
}

impl fmt::Display for Setting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Setting::Domain => "domain",
            Setting::Rn => "rn",
            Setting::Homogeneous => "homogeneous",
        })
    }
}

impl FromStr for Setting {
    type Err = ParamError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "domain" => Ok(Setting::Domain),
            "rn" => Ok(Setting::Rn),
            "homogeneous" => Ok(Setting::Homogeneous),
            other => Err(ParamError::OutOfRange(format!("unknown setting `{other}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Verdict {
    NoEmbedding,
    Compact,
    NonCompactFSS,
    SSNotFSS,
    NotSS,
}

impl Verdict {
    pub const ALL: [Verdict; 5] =
        [Verdict::NoEmbedding, Verdict::Compact, Verdict::NonCompactFSS, Verdict::SSNotFSS, Verdict::NotSS];

    pub fn flags(self) -> Flags {
        let compact = self == Verdict::Compact;
        let fss = compact || self == Verdict::NonCompactFSS;
        let ss = fss || self == Verdict::SSNotFSS;
        Flags { embeds: self != Verdict::NoEmbedding, compact, fss, ss }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Flags {
    pub embeds: bool,
    pub compact: bool,
    pub fss: bool,
    pub ss: bool,
}

/// Which explicit subspace demonstrates the failure of (finite) strict
/// singularity for a given verdict.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WitnessHint {
    /// Rademacher sums in one probability-normalised block: `b_n` stays away from 0.
    Rademacher,
    /// One unit vector per level, the identity on a single level block, or both.
    Diagonal,
    /// Normalised indicators of whole blocks: an isometry.
    ConstantBlock,
    /// One coefficient per level (Sobolev-type critical line).
    Lacunary,
    None,
}

impl fmt::Display for WitnessHint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            WitnessHint::Rademacher => "rademacher",
            WitnessHint::Diagonal => "diagonal",
            WitnessHint::ConstantBlock => "constant_block",
            WitnessHint::Lacunary => "lacunary",
            WitnessHint::None => "none",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmbeddingVerdict {
    pub setting: Setting,
    pub verdict: Verdict,
    pub flags: Flags,
    pub witness_hint: WitnessHint,
}

impl EmbeddingVerdict {
    fn new(setting: Setting, verdict: Verdict, witness_hint: WitnessHint) -> Self {
        EmbeddingVerdict { setting, verdict, flags: verdict.flags(), witness_hint }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("plain data serializes")
    }
}

/// Existence and compactness alone, decided from the embedding conditions
/// without running the full classification.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmbeddingFlags {
    pub exists: bool,
    pub compact: bool,
}

struct Gaps {
    /// `s₀ - s₁`
    d: Real,
    /// `n/p₀ - n/p₁`
    gp: Real,
    /// `max(0, gp)`
    g: Real,
    q: Ordering,
    p: Ordering,
    p0_inf: bool,
    p1_inf: bool,
}

fn gaps(p0: &SpaceParams, p1: &SpaceParams) -> Result<Gaps, ParamError> {
    p0.validate()?;
    p1.validate()?;
    if p0.n != p1.n {
        return Err(ParamError::DimensionMismatch(p0.n, p1.n));
    }
    let gp = p0.n_over_p().sub(p1.n_over_p());
    Ok(Gaps {
        d: p0.s.sub(p1.s),
        gp,
        g: gp.max(Real::zero()),
        q: p0.q.compare(p1.q),
        p: p0.p.compare(p1.p),
        p0_inf: p0.p.is_infinite(),
        p1_inf: p1.p.is_infinite(),
    })
}

pub fn classify_domain(p0: &SpaceParams, p1: &SpaceParams) -> Result<EmbeddingVerdict, ParamError> {
    let k = gaps(p0, p1)?;
    let (verdict, hint) = match (k.d.compare(k.g), k.q) {
        (Less, _) | (Equal, Greater) => (Verdict::NoEmbedding, WitnessHint::None),
        (Greater, _) => (Verdict::Compact, WitnessHint::None),
        (Equal, Equal) => {
            if k.g.sign() == Greater {
                (Verdict::NotSS, WitnessHint::Lacunary)
            } else {
                (Verdict::NotSS, WitnessHint::ConstantBlock)
            }
        }
        (Equal, Less) => {
            if k.g.sign() == Greater || (k.p0_inf && !k.p1_inf) {
                (Verdict::NonCompactFSS, WitnessHint::None)
            } else if k.p == Equal {
                (Verdict::SSNotFSS, WitnessHint::Diagonal)
            } else {
                (Verdict::SSNotFSS, WitnessHint::Rademacher)
            }
        }
    };
    Ok(EmbeddingVerdict::new(Setting::Domain, verdict, hint))
}

pub fn classify_rn(p0: &SpaceParams, p1: &SpaceParams) -> Result<EmbeddingVerdict, ParamError> {
    let k = gaps(p0, p1)?;
    // With p₀ ≤ p₁ we have g' ≥ 0, so max(0, g') = g' below.
    let (verdict, hint) = if k.p == Greater {
        (Verdict::NoEmbedding, WitnessHint::None)
    } else {
        let positive = k.gp.sign() == Greater;
        match (k.d.compare(k.gp), k.q) {
            (Less, _) | (Equal, Greater) => (Verdict::NoEmbedding, WitnessHint::None),
            (Equal, Less) if positive => (Verdict::NonCompactFSS, WitnessHint::None),
            (Equal, Equal) if positive => (Verdict::NotSS, WitnessHint::Lacunary),
            (Greater, _) if positive => (Verdict::NonCompactFSS, WitnessHint::None),
            // g' = 0, i.e. p₀ = p₁, and either d > 0 or d = 0 with q₀ ≤ q₁.
            _ => (Verdict::NotSS, WitnessHint::Diagonal),
        }
    };
    Ok(EmbeddingVerdict::new(Setting::Rn, verdict, hint))
}

pub fn classify_homogeneous(p0: &SpaceParams, p1: &SpaceParams) -> Result<EmbeddingVerdict, ParamError> {
    let k = gaps(p0, p1)?;
    let (verdict, hint) = if k.d.compare(k.gp) != Equal || k.p == Greater || k.q == Greater {
        (Verdict::NoEmbedding, WitnessHint::None)
    } else if k.gp.sign() == Equal {
        (Verdict::NotSS, WitnessHint::Diagonal)
    } else if k.q == Equal {
        (Verdict::NotSS, WitnessHint::Lacunary)
    } else {
        (Verdict::NonCompactFSS, WitnessHint::None)
    };
    Ok(EmbeddingVerdict::new(Setting::Homogeneous, verdict, hint))
}

pub fn classify(setting: Setting, p0: &SpaceParams, p1: &SpaceParams) -> Result<EmbeddingVerdict, ParamError> {
    match setting {
        Setting::Domain => classify_domain(p0, p1),
        Setting::Rn => classify_rn(p0, p1),
        Setting::Homogeneous => classify_homogeneous(p0, p1),
    }
}

pub fn embedding_flags(p0: &SpaceParams, p1: &SpaceParams, setting: Setting) -> Result<EmbeddingFlags, ParamError> {
    let k = gaps(p0, p1)?;
    let q_ok = k.q != Greater;
    Ok(match setting {
        Setting::Domain => {
            let c = k.d.compare(k.g);
            EmbeddingFlags { exists: c == Greater || (c == Equal && q_ok), compact: c == Greater }
        }
        Setting::Rn => {
            let c = k.d.compare(k.gp);
            EmbeddingFlags { exists: k.p != Greater && (c == Greater || (c == Equal && q_ok)), compact: false }
        }
        Setting::Homogeneous => EmbeddingFlags {
            exists: k.p != Greater && q_ok && k.d.compare(k.gp) == Equal,
            compact: false,
        },
    })
}

/// Convenience constructor used throughout the tests and examples.
pub fn params(p: Exponent, q: Exponent, s: Real, n: u32) -> SpaceParams {
    SpaceParams { p, q, s, n }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(s: &str) -> Exponent {
        s.parse().unwrap()
    }

    fn sp(p: &str, q: &str, s: Real, n: u32) -> SpaceParams {
        params(e(p), e(q), s, n)
    }

    #[test]
    fn domain_examples() {
        let v = classify_domain(&sp("1", "1", Real::int(1), 1), &sp("inf", "1", Real::int(0), 1)).unwrap();
        assert_eq!(v.verdict, Verdict::NotSS);
        assert_eq!(v.witness_hint, WitnessHint::Lacunary);
        let v = classify_domain(&sp("2", "1", Real::int(0), 1), &sp("2", "2", Real::int(0), 1)).unwrap();
        assert_eq!(v.verdict, Verdict::SSNotFSS);
        for q0 in ["1/2", "1", "inf"] {
            for q1 in ["1/2", "2", "inf"] {
                let v = classify_domain(&sp("2", q0, Real::int(2), 1), &sp("2", q1, Real::int(0), 1)).unwrap();
                assert_eq!(v.verdict, Verdict::Compact);
            }
        }
    }

    #[test]
    fn rn_examples() {
        for s in [Real::int(-3), Real::int(0), Real::int(5)] {
            let v = classify_rn(&sp("2", "1", s, 1), &sp("1", "1", Real::int(0), 1)).unwrap();
            assert_eq!(v.verdict, Verdict::NoEmbedding);
        }
        let v = classify_rn(&sp("1", "1", Real::int(1), 1), &sp("inf", "2", Real::int(0), 1)).unwrap();
        assert_eq!(v.verdict, Verdict::NonCompactFSS);
        let v = classify_rn(&sp("2", "inf", Real::int(1), 1), &sp("2", "1/2", Real::int(0), 1)).unwrap();
        assert_eq!(v.verdict, Verdict::NotSS);
    }

    #[test]
    fn homogeneous_examples() {
        let v = classify_homogeneous(&sp("1", "1", Real::int(2), 1), &sp("inf", "2", Real::int(0), 1)).unwrap();
        assert_eq!(v.verdict, Verdict::NoEmbedding);
        let v = classify_homogeneous(&sp("1", "1", Real::int(1), 1), &sp("inf", "2", Real::int(0), 1)).unwrap();
        assert_eq!(v.verdict, Verdict::NonCompactFSS);
        let v = classify_homogeneous(&sp("3", "1/2", Real::ratio(1, 3), 2), &sp("3", "1/2", Real::ratio(1, 3), 2))
            .unwrap();
        assert_eq!(v.verdict, Verdict::NotSS);
    }

    #[test]
    fn flags_examples() {
        let f = embedding_flags(&sp("1", "1", Real::int(1), 1), &sp("inf", "2", Real::int(0), 1), Setting::Rn).unwrap();
        assert_eq!(f, EmbeddingFlags { exists: true, compact: false });
        let f = embedding_flags(&sp("1", "1", Real::int(2), 1), &sp("inf", "2", Real::int(0), 1), Setting::Domain)
            .unwrap();
        assert_eq!(f, EmbeddingFlags { exists: true, compact: true });
        let f = embedding_flags(&sp("1", "2", Real::int(1), 1), &sp("inf", "1", Real::int(0), 1), Setting::Domain)
            .unwrap();
        assert_eq!(f, EmbeddingFlags { exists: false, compact: false });
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let a = sp("1", "1", Real::int(0), 1);
        let b = sp("1", "1", Real::int(0), 2);
        for setting in Setting::ALL {
            assert_eq!(classify(setting, &a, &b), Err(ParamError::DimensionMismatch(1, 2)));
            assert!(embedding_flags(&a, &b, setting).is_err());
        }
    }

    #[test]
    fn critical_line_is_exact() {
        // n/p₀ - n/p₁ = 1/3 - 0; s₀ - s₁ = 1/3 exactly versus a float just off it.
        let p0 = sp("3", "1", Real::ratio(1, 3), 1);
        let p1 = sp("inf", "1", Real::int(0), 1);
        assert_eq!(classify_domain(&p0, &p1).unwrap().verdict, Verdict::NotSS);
        let off = sp("3", "1", Real::ratio(333_333, 1_000_000), 1);
        assert_eq!(classify_domain(&off, &p1).unwrap().verdict, Verdict::NoEmbedding);
        let approx = sp("3", "1", Real::Approx(1.0 / 3.0), 1);
        assert_eq!(classify_domain(&approx, &p1).unwrap().verdict, Verdict::NotSS);
    }

    #[test]
    fn json_shape() {
        let v = classify_domain(&sp("2", "1", Real::int(0), 1), &sp("1", "2", Real::int(0), 1)).unwrap();
        assert_eq!(
            v.to_json(),
            r#"{"setting":"domain","verdict":"SSNotFSS","flags":{"embeds":true,"compact":false,"fss":false,"ss":true},"witness_hint":"rademacher"}"#
        );
        let back: EmbeddingVerdict = serde_json::from_str(&v.to_json()).unwrap();
        assert_eq!(back, v);
    }
}
