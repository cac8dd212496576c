//! Brute-force Bernstein numbers of ℓ^{q0}(ℓ^{p0}) → ℓ^{q1}(ℓ^{p1}) on two
//! levels of three coordinates, next to the decay bound.
//!
//!     cargo run --release --example bernstein_oracle -- [budget] [seed]

use std::time::Instant;

use besov_embeddings::bernstein::{bruteforce_bernstein, fss_upper_bound, witness_infimum};
use besov_embeddings::spaces::block_embedding_norm;
use besov_embeddings::{Exponent, TruncatedMixedSpace};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let budget: usize = args.first().map(|s| s.parse()).transpose()?.unwrap_or(200);
    let seed: u64 = args.get(1).map(|s| s.parse()).transpose()?.unwrap_or(7);

    let cases = [("1", "1", "2", "2"), ("1/2", "1", "1", "2"), ("2", "1", "4", "inf")];
    for (p0, q0, p1, q1) in cases {
        let (p0, q0, p1, q1): (Exponent, Exponent, Exponent, Exponent) =
            (p0.parse()?, q0.parse()?, p1.parse()?, q1.parse()?);
        let src = TruncatedMixedSpace::unweighted(0..2, |_| 3, q0, p0)?;
        let dst = TruncatedMixedSpace::unweighted(0..2, |_| 3, q1, p1)?;
        println!("l{q0}(l{p0}) -> l{q1}(l{p1}), operator norm {}", block_embedding_norm(&src, &dst)?);
        for n in 1..=3 {
            let t = Instant::now();
            let est = bruteforce_bernstein(&src, &dst, n, budget, seed)?;
            let bound = fss_upper_bound(n, p0, q0, p1, q1)?;
            let recheck = witness_infimum(&src, &dst, est.witness_basis.as_ref().unwrap(), seed + 1)?;
            println!(
                "  n={n}  oracle={:.12}  lower={:.12}  recheck={:.12}  bound={:.12}  slack={:+.2e}  ({:.2?})",
                est.oracle.unwrap(),
                est.lower,
                recheck,
                bound,
                bound - est.oracle.unwrap(),
                t.elapsed()
            );
        }
    }
    Ok(())
}
