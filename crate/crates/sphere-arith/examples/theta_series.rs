//! Theta series of invariant Hecke eigenfunctions: weight, level, the
//! normalized coefficients and their agreement with the sphere eigenvalues.
//!
//! Run with `cargo run --example theta_series -- 6`.

use num_traits::ToPrimitive;
use sphere_arith::hecke::simultaneous_eigenbasis;
use sphere_arith::quat::OrderSpec;
use sphere_arith::theta::{eta_product_8, hecke_relation_residual, root_number, theta_series};

fn main() -> sphere_arith::Result<()> {
    let nu: u32 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(4);
    let primes = [3u64, 5, 7, 11];
    let sys = simultaneous_eigenbasis(nu, &primes, OrderSpec::HURWITZ)?;
    if sys.is_empty() {
        println!("no invariant eigenfunctions of degree {nu}");
        return Ok(());
    }
    for i in 0..sys.len() {
        let Some(form) = sys.exact_eigenform(i) else {
            println!("eigenfunction {i} has irrational coefficients");
            continue;
        };
        let theta = theta_series(&form.poly, OrderSpec::HURWITZ, 150)?.normalized()?;
        println!("eigenfunction {i}: weight {}, level {}", theta.weight, theta.level);
        let head: Vec<String> = (1..=8).map(|n| theta.a(n).to_string()).collect();
        println!("  a_1..a_8 = {}", head.join(", "));
        for (k, &p) in primes.iter().enumerate() {
            let sphere = sys.eigenvalues[i][k] * (p as f64).powi(nu as i32);
            let modular = theta.a(p as usize).to_f64().unwrap();
            println!(
                "  p = {p:>2}: p^nu lambda_p = {sphere:>14.3}  a_p = {modular:>14}  Hecke residual {}",
                hecke_relation_residual(&theta, p)?
            );
        }
        println!("  root number {:+}", root_number(&theta)?);
    }
    if nu == 3 {
        let eta = eta_product_8(150);
        let theta = theta_series(&sys.exact_eigenform(0).unwrap().poly, OrderSpec::HURWITZ, 150)?;
        println!("theta / eta product = {:?}", theta.proportionality(&eta).map(|c| c.to_string()));
    }
    Ok(())
}
