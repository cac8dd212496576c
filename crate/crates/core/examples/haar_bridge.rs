//! A step function, its Haar coefficients, Besov sequence norms and the
//! interior/neighbourhood index sets of (1/4, 3/4) ⊂ (-1/4, 5/4).

use besov_embeddings::haar::{
    besov_seq_norm, counting_constant, haar_analyze, haar_synthesize, support_index_sets, Interval, PiecewiseConstant, Q,
};
use besov_embeddings::{SpaceParams, WeightFlavor};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let f = PiecewiseConstant::new(
        vec![Q::new(1, 4), Q::new(3, 8), Q::new(1, 2), Q::new(11, 16)],
        vec![Q::new(3, 1), Q::new(-1, 2), Q::new(2, 1)],
    )?;
    let c = haar_analyze(&f, f.resolution() - 1);
    println!("f = {}", f.to_json());
    for (idx, _) in c.pruned().iter() {
        println!("  {} j={} m={:<6} c={:+.6}", idx.g, idx.j, idx.m.to_string(), c.value(idx));
    }
    println!("∫f² = {}, Σc² = {}", f.l2_squared(), c.sum_of_squares());
    assert_eq!(haar_synthesize(&c), f);

    for (p, q, s) in [("2", "2", "0"), ("1", "1", "1/2"), ("2", "inf", "1/4"), ("2", "2", "3/4")] {
        let params = SpaceParams::new(p.parse()?, q.parse()?, s.parse()?, 1)?;
        let norm = besov_seq_norm(&c, &params, WeightFlavor::InhomogeneousWavelet)?;
        println!("B^{s}_{{{p},{q}}} sequence norm: {norm:.6}");
    }

    let v = Interval::new(Q::new(1, 4), Q::new(3, 4))?;
    let u = Interval::new(Q::new(-1, 4), Q::new(5, 4))?;
    let sets = support_index_sets(v, u, 12, 0)?;
    for lv in &sets {
        println!("j={:>2}  #R_j={:>5}  #S_j={:>5}", lv.j, lv.r.len(), lv.s.len());
    }
    println!("counting constant A = {:?}", counting_constant(&sets, 3));
    Ok(())
}
