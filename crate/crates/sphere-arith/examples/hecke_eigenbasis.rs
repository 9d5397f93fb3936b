//! Simultaneous Hecke eigenbases on the unit-invariant spherical harmonics.
//!
//! Run with `cargo run --example hecke_eigenbasis -- 40`.

use sphere_arith::hecke::simultaneous_eigenbasis;
use sphere_arith::quat::OrderSpec;

fn main() -> sphere_arith::Result<()> {
    let max_nu: u32 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(16);
    let primes = [3, 5, 7, 11, 13];
    for nu in 0..=max_nu {
        let t = std::time::Instant::now();
        let sys = simultaneous_eigenbasis(nu, &primes, OrderSpec::HURWITZ)?;
        println!(
            "nu={nu:>2} invariant_dim={:>2} complement={:>2} residual={:.1e} time={:.2?}",
            sys.len(),
            sys.complement.dim,
            sys.max_residual,
            t.elapsed()
        );
        for w in &sys.warnings {
            println!("  warning: {w}");
        }
        for (v, lams) in sys.eigenvalues.iter().enumerate() {
            let scaled: Vec<String> = primes
                .iter()
                .zip(lams)
                .map(|(&p, l)| format!("{:+.4}", l / (p as f64).sqrt()))
                .collect();
            println!("  v{v}: lambda_p/sqrt(p) = [{}]", scaled.join(", "));
        }
    }
    Ok(())
}
