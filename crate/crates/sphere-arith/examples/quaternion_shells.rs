//! Norm shells of the Lipschitz and Hurwitz orders against the divisor-sum
//! counts `8σ(n)` and `24σ(n)` for odd `n`.

use sphere_arith::quat::{enumerate_norm, sigma, unit_group, OrderSpec};

fn main() {
    for order in [OrderSpec::LIPSCHITZ, OrderSpec::HURWITZ] {
        println!("{:?}: {} units, theta level {}", order.kind, unit_group(order).len(), order.theta_level());
    }
    println!("{:>3} {:>9} {:>9} {:>7}", "n", "Lipschitz", "Hurwitz", "sigma");
    for n in (1..=31u64).step_by(2) {
        let lip = enumerate_norm(OrderSpec::LIPSCHITZ, n).len();
        let hur = enumerate_norm(OrderSpec::HURWITZ, n).len();
        println!("{n:>3} {lip:>9} {hur:>9} {:>7}", sigma(n));
        assert_eq!(lip as u64, 8 * sigma(n));
        assert_eq!(hur as u64, 24 * sigma(n));
    }
    let three = enumerate_norm(OrderSpec::HURWITZ, 3);
    println!("first elements of norm 3: {:?}", &three[..4].iter().map(|q| q.coords_f64()).collect::<Vec<_>>());
}
