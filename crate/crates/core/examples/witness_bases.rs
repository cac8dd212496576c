//! Diagonal and constant-block witness bases, exported as CSV.

use besov_embeddings::spaces::mixed_norm;
use besov_embeddings::witnesses::{basis_to_csv, constant_block_witness, diagonal_witness_basis};
use besov_embeddings::{Exponent, TruncatedMixedSpace};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let e = |s: &str| s.parse::<Exponent>();
    let src = TruncatedMixedSpace::unweighted(0..3, |_| 2, e("1")?, e("2")?)?;
    let dst = TruncatedMixedSpace::unweighted(0..3, |_| 2, e("inf")?, e("2")?)?;
    let units = vec![vec![0.6, 0.8], vec![1.0, 0.0], vec![0.0, -1.0]];
    let w = diagonal_witness_basis(&src, &dst, &units)?;
    print!("diagonal witness\n{}", basis_to_csv(&w.basis));
    let x = w.combine(&[1.0, -2.0, 0.5], &src)?;
    println!("src {:.6}, dst {:.6}", mixed_norm(&x, &src)?, mixed_norm(&x, &dst)?);

    let q = e("3")?;
    let basis = constant_block_witness(&[(0, 1), (1, 2), (2, 4)], e("1")?, 1)?;
    print!("constant blocks\n{}", basis_to_csv(&basis));
    let a = [2.0, -1.0, 0.5];
    let flat: Vec<f64> = (0..basis.nrows()).map(|r| (0..3).map(|k| basis[(r, k)] * a[k]).sum()).collect();
    for p in ["1/2", "1", "4", "inf"] {
        let sp = TruncatedMixedSpace::probability_normalized(0..3, 1, q, e(p)?)?;
        println!("  l3(L^{p}) norm {:.12}", sp.norm_of_flat(&flat));
    }
    Ok(())
}
