//! Mixed norms, the J_s reweighting, quasi-triangle constants and exact block
//! embedding norms.

use besov_embeddings::spaces::{
    block_embedding_norm, j_s_reweight, mixed_norm, quasi_triangle_constant, vector_to_json,
};
use besov_embeddings::{Exponent, SeqVector, SpaceParams, TruncatedMixedSpace, WeightFlavor};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let e = |s: &str| s.parse::<Exponent>();
    let params = SpaceParams::new(e("2")?, e("1")?, "1/2".parse()?, 1)?;
    let sp = TruncatedMixedSpace::besov(&params, WeightFlavor::InhomogeneousWavelet, 0..4, |j| 1 << j)?;
    let x = SeqVector::new(vec![vec![1.0], vec![0.5, -0.5], vec![0.0, 0.25, 0.0, 0.25], vec![0.125; 8]]);
    println!("x = {}", vector_to_json(&x, &sp)?);
    println!("‖x‖ in B^1/2_(2,1) model: {:.9}", mixed_norm(&x, &sp)?);

    let y = j_s_reweight(&x, &sp, 0.5)?;
    let shifted = sp.reweighted(-0.5);
    println!("J_s: ‖J x‖ = {:.9} in the space shifted by -1/2", mixed_norm(&y, &shifted)?);

    for (p, q) in [("1/2", "1"), ("1", "1/3"), ("2", "4")] {
        println!("quasi-triangle constant of l{q}(l{p}): {}", quasi_triangle_constant(e(p)?, e(q)?));
    }

    for (p0, q0, p1, q1) in [("1", "1", "2", "2"), ("2", "2", "1", "1"), ("inf", "2", "1", "1")] {
        let a = TruncatedMixedSpace::unweighted(0..3, |j| 1 << j, e(q0)?, e(p0)?)?;
        let b = TruncatedMixedSpace::unweighted(0..3, |j| 1 << j, e(q1)?, e(p1)?)?;
        println!("‖l{q0}(l{p0}) -> l{q1}(l{p1})‖ = {:.9}", block_embedding_norm(&a, &b)?);
    }
    Ok(())
}
