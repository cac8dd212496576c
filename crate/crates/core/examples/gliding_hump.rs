//! Gliding hump inside random sparse subspaces of ℓ^{q0}(ℓ^p{1..m_j}).
//!
//!     cargo run --release --example gliding_hump -- [subspaces] [seed]

use besov_embeddings::gliding_hump::{glide, random_sparse_basis, FiniteBasisOracle, FullSpaceOracle};
use besov_embeddings::{ComputeError, Exponent, TruncatedMixedSpace};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let count: u64 = args.first().map(|s| s.parse()).transpose()?.unwrap_or(100);
    let seed: u64 = args.get(1).map(|s| s.parse()).transpose()?.unwrap_or(2024);

    let block = |j: i64| 1usize << j.min(3);
    let sp = |q: &str, p: &str| -> Result<TruncatedMixedSpace, Box<dyn std::error::Error>> {
        Ok(TruncatedMixedSpace::unweighted(0..40, block, q.parse::<Exponent>()?, p.parse::<Exponent>()?)?)
    };

    let full = glide(&mut FullSpaceOracle, 0.1, &sp("1", "1")?, &sp("inf", "1")?)?;
    println!("whole space, q0=1 q1=inf eps=0.1: {}", full.transcript_json(None));

    for (q0, q1, p) in [("1", "2", "2"), ("1", "inf", "1"), ("1/2", "1", "1")] {
        let (src, dst) = (sp(q0, p)?, sp(q1, p)?);
        for eps in [0.5, 0.1] {
            let (mut ok, mut exhausted, mut worst) = (0, 0, 0.0f64);
            for k in 0..count {
                let dim = 30 + (k % 31) as usize;
                let basis = random_sparse_basis(&src, dim, seed + k);
                match glide(&mut FiniteBasisOracle::new(basis)?, eps, &src, &dst) {
                    Ok(out) => {
                        ok += 1;
                        worst = worst.max(out.ratio);
                    }
                    Err(ComputeError::OracleExhausted { .. }) => exhausted += 1,
                    Err(e) => return Err(e.into()),
                }
            }
            println!("q0={q0} q1={q1} p={p} eps={eps}: {ok} succeeded (worst ratio {worst:.4}), {exhausted} exhausted");
        }
    }
    Ok(())
}
