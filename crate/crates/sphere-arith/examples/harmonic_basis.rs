//! Exact harmonic bases on S² and S³, the reproducing property of the
//! zonal kernels, and the tensor embedding of `U_ν ⊗ U_ν` into degree `2ν`
//! harmonics on S³.

use num_rational::BigRational;
use sphere_arith::poly::*;

fn main() -> sphere_arith::Result<()> {
    for nu in 0..=6u32 {
        println!(
            "degree {nu}: dim on S2 = {}, dim on S3 = {}",
            basis(2, nu)?.dim(),
            basis(3, nu)?.dim()
        );
    }

    let b = basis(2, 3)?;
    let p = &b.elements[0];
    println!("a degree-3 harmonic: {}", p.to_text().trim());
    println!("its laplacian is zero: {}", laplacian(p).is_zero());

    // ⟨K_z, P⟩ = P(z) in the Gegenbauer product
    let z = [3, 0, 4].map(|v| BigRational::new(v.into(), 5.into()));
    let k = kernel_s2_at(3, &z);
    let lhs = inner(&k, p, Normalization::Gegenbauer);
    println!("<K_z, P> = {lhs}, P(z) = {}", p.eval(&z));

    let x = MultiPoly::var(3, 0);
    let y = MultiPoly::var(3, 1);
    let e = tensor_embed(&x, &y)?;
    println!("x ⊗ y on S3: {}", e.to_text().trim());
    println!("area of S2 = {}, of S3 = {}", harmonic::sphere_area(3)?, harmonic::sphere_area(4)?);
    Ok(())
}
