//! Verdicts for one embedding in all three settings.
//!
//!     cargo run --example classify -- p0 q0 s0 p1 q1 s1 [n]
//!
//! Without arguments a few borderline embeddings are shown.

use besov_embeddings::classifier::{classify, Setting};
use besov_embeddings::SpaceParams;

fn show(src: &SpaceParams, dst: &SpaceParams) -> Result<(), Box<dyn std::error::Error>> {
    println!("B^{}_{{{},{}}} -> B^{}_{{{},{}}}, n = {}", src.s, src.p, src.q, dst.s, dst.p, dst.q, src.n);
    for setting in Setting::ALL {
        let v = classify(setting, src, dst)?;
        println!("  {:<12} {:<14} witness: {}", setting.to_string(), v.verdict.to_string(), v.witness_hint);
    }
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    if args.len() >= 6 {
        let n: u32 = args.get(6).map(|s| s.parse()).transpose()?.unwrap_or(1);
        let src = SpaceParams::new(args[0].parse()?, args[1].parse()?, args[2].parse()?, n)?;
        let dst = SpaceParams::new(args[3].parse()?, args[4].parse()?, args[5].parse()?, n)?;
        return show(&src, &dst);
    }
    let cases = [
        ("1", "1", "1", "inf", "1", "0"),
        ("2", "1", "0", "1", "2", "0"),
        ("inf", "1", "0", "2", "2", "0"),
        ("1", "1", "1/2", "2", "2", "0"),
        ("2", "1", "1", "2", "1", "0"),
    ];
    for (p0, q0, s0, p1, q1, s1) in cases {
        let src = SpaceParams::new(p0.parse()?, q0.parse()?, s0.parse()?, 1)?;
        let dst = SpaceParams::new(p1.parse()?, q1.parse()?, s1.parse()?, 1)?;
        show(&src, &dst)?;
    }
    Ok(())
}
