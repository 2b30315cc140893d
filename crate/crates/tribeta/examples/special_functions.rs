//! Hypergeometric, parabolic-cylinder and Bessel evaluations.

use tribeta::specfun::*;

fn main() -> tribeta::Result<()> {
    println!("1F1(51; 1; 50)     = {:?}", hyp1f1(51.0, 1.0, 50.0)?);
    println!("2F1(51,51; 51.5; ½) = {:?}", hyp2f1(51.0, 51.0, 51.5, 0.5)?);
    println!("2F2 at x = 20      = {:?}", hyp2f2(11.0, 11.0, 1.0, 11.5, 20.0)?);
    println!("D_-3(1)            = {:?}", pcf_d(-3.0, 1.0)?);
    println!("ln D_-501(1)       = {}", ln_pcf_d(-501.0, 1.0)?);
    println!("K0(0.1), K0(10)    = {}, {}", bessel_k0(0.1)?, bessel_k0(10.0)?);
    println!("ln Γ(500.5)        = {}", gamma_ln(500.5)?);
    Ok(())
}
