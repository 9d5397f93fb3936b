//! Central values of the form, symmetric cube and triple product attached
//! to the degree-4 Hurwitz eigenfunction (weight 10, level 2).

use std::time::Instant;

use sphere_arith::hecke::simultaneous_eigenbasis;
use sphere_arith::lfunc::*;
use sphere_arith::quat::OrderSpec;

fn main() -> sphere_arith::Result<()> {
    let t0 = Instant::now();
    let sys = simultaneous_eigenbasis(4, &[3, 5], OrderSpec::HURWITZ)?;
    let form = sys.exact_eigenform(0).expect("rational eigenform");
    let data = FormData::from_eigenform(&form, 2000, "nu4")?;
    println!("a_2 = {}, a_3 = {}, a_5 = {}  ({:.2?})", data.ap[&2], data.ap[&3], data.ap[&5], t0.elapsed());

    let params = AfeParams::default();
    let mut values = Vec::new();
    for kind in [LKind::Form, LKind::Sym3, LKind::Triple] {
        let t = Instant::now();
        let (spec, _) = LSeriesSpec::for_form(kind, &data, 2000, &BadFactor::Derived)?;
        let fit = root_number_fit(&spec, &params)?;
        let spec = spec.with_sign(fit.sign);
        let v = central_value(&spec, &params)?;
        println!(
            "{:>7}: w = {:+} (fit {:+.6}, residuals {:.1e}/{:.1e})  L(1/2) = {:.12e} ± {:.1e}  ({:.2?})",
            kind.name(),
            fit.sign,
            fit.fitted,
            fit.residual_plus,
            fit.residual_minus,
            v.value.0,
            v.error,
            t.elapsed()
        );
        values.push(v);
    }
    let product = values[1].value.0 * values[0].value.0 * values[0].value.0;
    println!("sym3 · form² = {:.12e}", product);
    println!("triple       = {:.12e}", values[2].value.0);
    Ok(())
}
