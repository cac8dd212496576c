//! Rademacher sums inside one probability-normalised block: the ratio
//! ‖·‖_{L^2}/‖·‖_{L^4} stays above a constant however many functions are used.

use besov_embeddings::witnesses::{khintchine_ratio, rademacher_system, rademacher_witness_lower_bound};
use besov_embeddings::Exponent;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let (p0, p1): (Exponent, Exponent) = ("4".parse()?, "2".parse()?);
    println!(" n   lower bound   (3 - 2/n)^(-1/4)   flat vector in L^4");
    for n in 2..=10 {
        let lb = rademacher_witness_lower_bound(n, p0, p1, 4000, 1)?;
        let closed = (3.0 - 2.0 / n as f64).powf(-0.25);
        let sys = rademacher_system(n)?;
        let flat = khintchine_ratio(&vec![1.0; n], p0, &sys)?;
        println!("{n:>2}   {lb:.9}   {closed:.9}        {flat:.9}");
    }
    Ok(())
}
