//! Central values of equal-forms triples against the predicted formula,
//! with the factor breakdown of each prediction.
//!
//! Run with `cargo run --example identity_check -- 4 6 8`.

use sphere_arith::experiments::{run_identity, ExperimentConfig};

fn main() -> sphere_arith::Result<()> {
    let nus: Vec<u32> = std::env::args().skip(1).filter_map(|s| s.parse().ok()).collect();
    let config = ExperimentConfig {
        identity_nus: if nus.is_empty() { vec![4, 6] } else { nus },
        ..Default::default()
    };
    let report = run_identity(&config)?;
    for e in &report.entries {
        println!(
            "nu {} #{} (weight {}): root numbers {:+}/{:+}/{:+}",
            e.nu, e.index, e.weight, e.root_number_form, e.root_number_sym3, e.root_number_triple
        );
        println!("  L(f)       = {:.12}", e.form_value);
        println!("  L(Sym3 f)  = {:.12}", e.sym3_value);
        println!("  lhs        = {:.12e} ± {:.1e}", e.lhs, e.lhs_error);
        println!("  degree 8   = {:.12e} ± {:.1e}", e.triple_direct, e.triple_direct_error);
        println!("  <f,f>      = {:.10e} ± {:.1e}", e.petersson.value, e.petersson.error);
        println!("  rhs        = {:.12e} ± {:.1e}", e.rhs, e.rhs_error);
        for f in &e.factors {
            println!("    {:<24} {:.6e}", f.name, f.value);
        }
        match (e.ratio, e.ratio_error) {
            (Some(r), Some(err)) => println!("  ratio      = {r:.12} ± {err:.1e}"),
            _ => println!("  ratio undefined: {}", e.note),
        }
    }
    if let (Some(r), Some(err)) = (report.ratio, report.ratio_error) {
        println!("weighted ratio {r:.12} ± {err:.1e}, target {}, consistent: {}", report.target, report.consistent);
    }
    Ok(())
}
