//! Closed-form Bernstein bounds, and the flat vectors that drive the
//! upper-bound argument in a random subspace.

use besov_embeddings::bernstein::{flatness_search, fss_upper_bound, linfty_lp_upper_bound};
use besov_embeddings::Exponent;
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let e = |s: &str| s.parse::<Exponent>();
    println!(" n   l1(l1)->l2(l2)   l1/2(l1)->l1(l2)   L^inf->L^4");
    for n in [1, 2, 4, 8, 16, 64] {
        println!(
            "{n:>3}   {:.6}         {:.6}           {:.6}",
            fss_upper_bound(n, e("1")?, e("1")?, e("2")?, e("2")?)?,
            fss_upper_bound(n, e("1/2")?, e("1")?, e("1")?, e("2")?)?,
            linfty_lp_upper_bound(n, e("4")?)?
        );
    }

    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for n in 1..=4 {
        let basis = DMatrix::from_fn(10, n, |_, _| rng.random_range(-1.0..1.0));
        let flat = flatness_search(&basis, 1e-9)?;
        println!(
            "n={n}: {} coordinates at the sup norm, certified bound {:.4}",
            flat.flat_count,
            flat.certified_sup_bound(e("1")?, e("1")?)
        );
    }
    Ok(())
}
