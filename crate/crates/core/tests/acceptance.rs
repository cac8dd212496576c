//! End-to-end acceptance checks. Runs without the libtest harness so that
//! every check prints one PASS/FAIL line; exits non-zero if any fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use besov_embeddings::bernstein::{bruteforce_bernstein, fss_upper_bound, holder_interpolation_gap};
use besov_embeddings::classifier::{
    classify, classify_domain, classify_homogeneous, classify_rn, embedding_flags, params, Setting, Verdict,
};
use besov_embeddings::cli::single_verdict;
use besov_embeddings::error::ComputeError;
use besov_embeddings::gliding_hump::{glide, random_sparse_basis, FiniteBasisOracle, FullSpaceOracle};
use besov_embeddings::haar::{
    counting_constant, haar_analyze, haar_synthesize, support_index_sets, Interval, PiecewiseConstant, Q,
};
use besov_embeddings::spaces::block_embedding_norm;
use besov_embeddings::witnesses::rademacher_witness_lower_bound;
use besov_embeddings::{Exponent, Real, SeqVector, TruncatedMixedSpace};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = fn() -> Result<String, String>;

fn e(s: &str) -> Exponent {
    s.parse().unwrap()
}

fn r(s: &str) -> Real {
    s.parse().unwrap()
}

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn classification_totality() -> Result<String, String> {
    let start = Instant::now();
    let values = ["1/2", "1", "2", "4", "inf"].map(e);
    let shifts = ["-1", "-1/2", "0", "1/2", "1"].map(r);
    let mut tuples = 0usize;
    for n in [1u32, 2] {
        for &p0 in &values {
            for &q0 in &values {
                for &p1 in &values {
                    for &q1 in &values {
                        let a = params(p0, Exponent::int(1), Real::zero(), n);
                        let b = params(p1, Exponent::int(1), Real::zero(), n);
                        let gp = a.n_over_p().sub(b.n_over_p());
                        let mut diffs: Vec<Real> = Vec::new();
                        for critical in [gp, gp.max(Real::zero())] {
                            for &t in &shifts {
                                let d = critical.add(t);
                                if !diffs.contains(&d) {
                                    diffs.push(d);
                                }
                            }
                        }
                        for d in diffs {
                            let src = params(p0, q0, d, n);
                            let dst = params(p1, q1, Real::zero(), n);
                            tuples += 1;
                            for setting in Setting::ALL {
                                let v = classify(setting, &src, &dst).map_err(|err| err.to_string())?;
                                ensure!(single_verdict(&v), "{setting} {src:?} {dst:?}: flags {:?}", v.flags);
                                ensure!(v.flags == v.verdict.flags(), "flags disagree with verdict");
                                let f = embedding_flags(&src, &dst, setting).map_err(|err| err.to_string())?;
                                ensure!(
                                    f.exists == v.flags.embeds && f.compact == v.flags.compact,
                                    "{setting} {src:?} {dst:?}: independent embedding check disagrees"
                                );
                                match setting {
                                    Setting::Rn => ensure!(v.verdict != Verdict::SSNotFSS, "rn gave SSNotFSS"),
                                    Setting::Homogeneous => ensure!(
                                        v.verdict != Verdict::Compact && v.verdict != Verdict::SSNotFSS,
                                        "homogeneous gave {}",
                                        v.verdict
                                    ),
                                    Setting::Domain => {}
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    let elapsed = start.elapsed();
    ensure!(tuples >= 5000, "only {tuples} tuples");
    ensure!(elapsed < Duration::from_secs(5), "took {elapsed:.2?}");
    Ok(format!("{tuples} tuples x 3 settings in {elapsed:.2?}"))
}

fn theorem_cases() -> Result<String, String> {
    let sp = |p: &str, q: &str, s: &str| params(e(p), e(q), r(s), 1);
    let cases = [
        (Setting::Domain, sp("1", "1", "1/2"), sp("2", "2", "0"), Verdict::NonCompactFSS),
        (Setting::Domain, sp("inf", "1", "0"), sp("2", "2", "0"), Verdict::NonCompactFSS),
        (Setting::Domain, sp("inf", "1", "0"), sp("inf", "2", "0"), Verdict::SSNotFSS),
        (Setting::Domain, sp("2", "1", "0"), sp("1", "inf", "0"), Verdict::SSNotFSS),
        (Setting::Domain, sp("1", "1", "1"), sp("inf", "1", "0"), Verdict::NotSS),
        (Setting::Rn, sp("1", "1", "1/2"), sp("2", "2", "0"), Verdict::NonCompactFSS),
        (Setting::Rn, sp("1", "2", "1"), sp("2", "1", "0"), Verdict::NonCompactFSS),
        (Setting::Rn, sp("2", "1", "1"), sp("2", "1", "0"), Verdict::NotSS),
        (Setting::Rn, sp("2", "1", "0"), sp("2", "2", "0"), Verdict::NotSS),
        (Setting::Homogeneous, sp("1", "1", "1"), sp("2", "2", "0"), Verdict::NoEmbedding),
        (Setting::Homogeneous, sp("1", "1", "1/2"), sp("2", "2", "0"), Verdict::NonCompactFSS),
        (Setting::Homogeneous, sp("2", "1", "0"), sp("2", "2", "0"), Verdict::NotSS),
    ];
    for (setting, src, dst, expected) in &cases {
        let got = match setting {
            Setting::Domain => classify_domain(src, dst),
            Setting::Rn => classify_rn(src, dst),
            Setting::Homogeneous => classify_homogeneous(src, dst),
        }
        .map_err(|err| err.to_string())?;
        ensure!(got.verdict == *expected, "{setting} {src:?} -> {dst:?}: {} instead of {expected}", got.verdict);
    }
    Ok(format!("{} fixed cases", cases.len()))
}

fn bernstein_bound() -> Result<String, String> {
    let start = Instant::now();
    let cases = [("1", "1", "2", "2"), ("1/2", "1", "1", "2"), ("2", "1", "4", "inf")];
    let mut worst_slack = f64::INFINITY;
    for (p0, q0, p1, q1) in cases {
        let (p0, q0, p1, q1) = (e(p0), e(q0), e(p1), e(q1));
        let src = TruncatedMixedSpace::unweighted(0..2, |_| 3, q0, p0).unwrap();
        let dst = TruncatedMixedSpace::unweighted(0..2, |_| 3, q1, p1).unwrap();
        let op_norm = block_embedding_norm(&src, &dst).unwrap();
        for n in 1..=3 {
            let est = bruteforce_bernstein(&src, &dst, n, 200, 7).map_err(|err| err.to_string())?;
            let oracle = est.oracle.ok_or("no oracle value")?;
            let bound = fss_upper_bound(n, p0, q0, p1, q1).unwrap();
            ensure!(oracle <= bound + 1e-6, "({p0},{q0},{p1},{q1}) n={n}: {oracle} > {bound}");
            worst_slack = worst_slack.min(bound - oracle);
            if n == 1 {
                ensure!((oracle - op_norm).abs() <= 1e-4, "b_1 = {oracle} but the operator norm is {op_norm}");
            }
        }
    }
    let elapsed = start.elapsed();
    ensure!(elapsed < Duration::from_secs(60), "took {elapsed:.2?}");
    Ok(format!("smallest slack {worst_slack:.2e}, {elapsed:.2?}"))
}

fn rademacher_witness() -> Result<String, String> {
    let mut lowest = f64::INFINITY;
    for n in 2..=10 {
        let v = rademacher_witness_lower_bound(n, e("4"), e("2"), 2000, 11).map_err(|err| err.to_string())?;
        ensure!(v >= 0.7, "n={n}: {v}");
        lowest = lowest.min(v);
        if n == 2 {
            let exact = 2f64.powf(-0.25);
            ensure!((v - exact).abs() <= 1e-9, "n=2: {v} vs {exact}");
        }
    }
    Ok(format!("min over n=2..10 is {lowest:.6}"))
}

fn gliding_hump() -> Result<String, String> {
    let levels = 40;
    let block = |j: i64| 1usize << j.min(3);
    let space = |q: Exponent| TruncatedMixedSpace::unweighted(0..levels, block, q, e("1")).unwrap();

    let (src, dst) = (space(e("1")), space(e("inf")));
    let full = glide(&mut FullSpaceOracle, 0.1, &src, &dst).map_err(|err| err.to_string())?;
    ensure!((full.ratio - 1.0 / 21.0).abs() <= 1e-12, "full space ratio {}", full.ratio);

    let mut summary = Vec::new();
    let mut successes = 0;
    for (q0, q1) in [("1", "2"), ("1", "inf"), ("1/2", "1")] {
        let (src, dst) = (space(e(q0)), space(e(q1)));
        for eps in [0.5, 0.1] {
            let mut ok = 0;
            for k in 0..100u64 {
                let basis = random_sparse_basis(&src, 30 + (k % 31) as usize, 2024 + k);
                let mut oracle = FiniteBasisOracle::new(basis).unwrap();
                match glide(&mut oracle, eps, &src, &dst) {
                    Ok(out) => {
                        ensure!(out.ratio < eps, "({q0},{q1}) eps={eps} seed {k}: ratio {}", out.ratio);
                        let floor = (1.0 - out.params.delta).powf(1.0 / e(q0).value());
                        ensure!(out.src_norm >= floor, "source norm {} below {floor}", out.src_norm);
                        ok += 1;
                    }
                    Err(ComputeError::OracleExhausted { .. }) => {}
                    Err(other) => return Err(other.to_string()),
                }
            }
            successes += ok;
            summary.push(format!("({q0},{q1},{eps}):{ok}"));
        }
    }
    ensure!(successes >= 100, "only {successes} successful runs");
    Ok(format!("full ratio {:.15}; successes {}", full.ratio, summary.join(" ")))
}

fn holder_interpolation() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(606);
    let mut worst = f64::NEG_INFINITY;
    let mut worst_atom: f64 = 0.0;
    for p in ["1/2", "1", "2"] {
        for q in ["1/2", "1", "2"] {
            for theta in [0.25, 0.5, 0.75] {
                for _ in 0..10_000 {
                    let levels = rng.random_range(1..=4);
                    let blocks: Vec<Vec<f64>> = (0..levels)
                        .map(|_| {
                            let m = rng.random_range(1..=4);
                            (0..m).map(|_| rng.random_range(-1.0..1.0)).collect()
                        })
                        .collect();
                    let g = holder_interpolation_gap(&SeqVector::new(blocks), e(p), e(q), theta).unwrap();
                    ensure!(g.lhs <= g.rhs + 1e-12, "p={p} q={q} theta={theta}: {} > {}", g.lhs, g.rhs);
                    worst = worst.max(g.lhs - g.rhs);
                }
                for c in [1.0, -0.3, 2.5] {
                    let atom = SeqVector::new(vec![vec![0.0, 0.0], vec![0.0, c, 0.0]]);
                    let g = holder_interpolation_gap(&atom, e(p), e(q), theta).unwrap();
                    ensure!((g.lhs - g.rhs).abs() <= 1e-15, "atom {c}: {} vs {}", g.lhs, g.rhs);
                    worst_atom = worst_atom.max((g.lhs - g.rhs).abs());
                }
            }
        }
    }
    Ok(format!("max lhs-rhs {worst:.2e}, atom gap {worst_atom:.1e}"))
}

fn random_step(rng: &mut ChaCha8Rng) -> PiecewiseConstant {
    let res = rng.random_range(0..=7u32);
    let cells = 1i128 << res;
    let mut at = rng.random_range(-2 * cells..2 * cells);
    let mut bs = vec![Q::new(at, cells)];
    let mut vs = Vec::new();
    for _ in 0..rng.random_range(1..=8) {
        at += rng.random_range(1..=cells.max(2));
        bs.push(Q::new(at, cells));
        vs.push(Q::new(rng.random_range(-9..=9), rng.random_range(1..=8)));
    }
    PiecewiseConstant::new(bs, vs).unwrap()
}

fn haar_bridge() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for k in 0..100 {
        let f = random_step(&mut rng);
        let jmax = f.resolution().saturating_sub(1);
        let c = haar_analyze(&f, jmax);
        ensure!(haar_synthesize(&c) == f, "function {k}: round trip changed {:?}", f.to_json());
        ensure!(c.sum_of_squares() == f.l2_squared(), "function {k}: Parseval fails");
        let again = haar_analyze(&haar_synthesize(&c), jmax).pruned();
        ensure!(again == c.pruned(), "function {k}: coefficients changed");
    }
    let v = Interval::new(Q::new(1, 4), Q::new(3, 4)).unwrap();
    let u = Interval::new(Q::new(-1, 4), Q::new(5, 4)).unwrap();
    let sets = support_index_sets(v, u, 12, 0).map_err(|err| err.to_string())?;
    ensure!(sets.iter().all(|lv| lv.r.iter().all(|m| lv.s.contains(m))), "R_j not inside S_j");
    let a = counting_constant(&sets, 3).ok_or("no A <= 3 fits the counting bounds")?;
    Ok(format!("100 functions exact; A = {a}"))
}

fn probability_normalization() -> Result<String, String> {
    let rs = ["1/2", "1", "2", "inf"].map(e);
    let mut checked = 0;
    for r0 in rs {
        for r1 in rs {
            if r1.compare(r0) == std::cmp::Ordering::Greater {
                continue;
            }
            for j in 0..=4i64 {
                for q in [e("1"), e("inf")] {
                    let src = TruncatedMixedSpace::probability_normalized(j..=j, 1, q, r0).unwrap();
                    let dst = TruncatedMixedSpace::probability_normalized(j..=j, 1, q, r1).unwrap();
                    let norm = block_embedding_norm(&src, &dst).unwrap();
                    ensure!(norm == 1.0, "r0={r0} r1={r1} block {}: {norm}", 1 << j);
                    checked += 1;
                }
            }
            let src = TruncatedMixedSpace::probability_normalized(0..=4, 1, e("2"), r0).unwrap();
            let dst = TruncatedMixedSpace::probability_normalized(0..=4, 1, e("2"), r1).unwrap();
            ensure!(block_embedding_norm(&src, &dst).unwrap() == 1.0, "r0={r0} r1={r1} on all blocks");
        }
    }
    Ok(format!("{checked} single-block norms equal to 1"))
}

fn main() {
    let checks: [(&str, Check); 8] = [
        ("classification totality", classification_totality),
        ("theorem spot checks", theorem_cases),
        ("bernstein bound compliance", bernstein_bound),
        ("rademacher witness", rademacher_witness),
        ("gliding hump guarantee", gliding_hump),
        ("holder interpolation", holder_interpolation),
        ("haar bridge", haar_bridge),
        ("probability normalization", probability_normalization),
    ];
    let mut failed = 0;
    for (k, (name, check)) in checks.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("PASS {} {name}: {detail}", k + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {} {name}: {why}", k + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
