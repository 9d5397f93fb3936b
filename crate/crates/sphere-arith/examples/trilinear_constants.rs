//! Constants of the trilinear period: c1, the diagonal P0, the Saalschütz
//! identity, and the proportionality of the trilinear form to the triple
//! integral on Gegenbauer kernels.

use sphere_arith::poly::{kernel_s2_at, kernel_s3_at, PiScaled};
use sphere_arith::trilinear::*;

fn main() -> sphere_arith::Result<()> {
    println!("{:>3} {:>3} {:>14} {:>10} {:>14}", "a'", "b", "c1", "P0 diag", "Saalschutz");
    for a_half in 0..=3u32 {
        for b in (0..=4u32).step_by(2) {
            let c = c1(2 * a_half, b)?;
            println!(
                "{a_half:>3} {b:>3} {:>14} {:>10} {:>14}",
                c.to_string(),
                p0_diag(a_half, b).to_string(),
                saalschutz_sum(a_half, b).to_string()
            );
        }
    }

    let w = [1, 0, 0, 0].map(|v| num_rational::BigRational::from_integer(v.into()));
    for (a_half, b) in [(1u32, 0u32), (1, 2), (2, 0)] {
        let a = 2 * a_half;
        let g1 = kernel_s3_at(a + b, &w);
        let g3 = kernel_s3_at(a, &w);
        let t = trilinear_t(&g1, &g1, &g3)?;
        let m = triple_integral_s3(&g1, &g1, &g3, SphereMeasure::Probability)?;
        println!("(a', b) = ({a_half}, {b}): T = {t}, mean of the triple product = {m}");
    }

    let z = [0, 0, 1].map(|v| num_rational::BigRational::from_integer(v.into()));
    let p1 = kernel_s2_at(4, &z);
    let p3 = kernel_s2_at(4, &z);
    let (lhs, rhs) = square_compare(&p1, &p1, &p3)?;
    println!("squared-integral comparison on degree-4 kernels: {lhs} = {rhs}");

    let idx = TripleIndex::new(4, 4, 2)?;
    let pred = predicted_central_value(&idx, &PiScaled::rational(num_traits::One::one()), [1.0; 3], InputNormalization::Gegenbauer, 24)?;
    println!("prediction factors for unit inputs at k = 10:");
    for f in &pred.factors {
        println!("  {:<24} {:.6e}", f.name, f.value);
    }
    for b in [8u32, 16, 32, 64] {
        let p = lower_bound_prefactor(&TripleIndex::from_ab(2, b, 2)?)?;
        println!("prefactor a' = 2, b = {b:>2}: raw {:.6e}, renormalized {:.6e}", p.raw, p.renormalized);
    }
    Ok(())
}
