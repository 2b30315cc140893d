//! Radial histogram and flat-weighted KS distance against the limiting density.

use tribeta::cli::pooled_spectra;
use tribeta::density::*;
use tribeta::eigensolve::Method;
use tribeta::ensembles::EnsembleKind;

fn main() -> tribeta::Result<()> {
    let (n, beta, m) = (400, 50.0, 20);
    let spectra = pooled_spectra(EnsembleKind::GeneralT, n, beta, m, 9, Method::Aberth)?;
    let r: Vec<f64> = spectra.concat().iter().map(|z| z.norm()).collect();
    let d = ks_distance(&EmpiricalCdf::new(&r, Weighting::Flat)?, limiting_flat_cdf);
    println!("n = {n}, β = {beta}, m = {m}: KS = {d:.4}, support radius {:.4}", support_radius());

    let h = RadialHistogram::new(&r, 12, 1.05 * support_radius(), HistMode::Flat)?;
    for ((c, y), f) in h.centres().iter().zip(h.heights()).zip(h.limiting_curve()) {
        println!("{c:.3}  {y:7.3}  {f:7.3}  {}", "#".repeat((y * 10.0) as usize));
    }
    Ok(())
}
