//! Matrix ↔ spectral data bijection: decompose, rebuild, check the Vandermonde identity.

use tribeta::ensembles::EnsembleKind;
use tribeta::randsrc::RngStream;
use tribeta::spectralmap::*;

fn main() -> tribeta::Result<()> {
    let m = EnsembleKind::GeneralT.sample_scaled(8, 2.0, &mut RngStream::new(3, 0))?;
    let d = decompose(&m)?;
    println!("Σ r − 1 = {:.1e}, min gap (rel) {:.2e}", d.sum_defect(), d.min_gap_rel);
    println!("rebuild error {:.1e}", relative_distance(&m, &reconstruct_general(&d)?));
    println!("Vandermonde residual {:.1e}", vandermonde_residual(&m, &d));
    println!("g-function {:.4}", g_function(&m, &d.lambdas)?);

    let s = EnsembleKind::SymmetricS.sample_scaled(8, 2.0, &mut RngStream::new(3, 1))?;
    let ds = decompose(&s)?;
    println!("symmetric rebuild error {:.1e}", symmetric_distance(&s, &reconstruct_symmetric(&ds.lambdas, &ds.r)?));

    let m2 = EnsembleKind::GeneralT.sample(2, 2.0, &mut RngStream::new(3, 2))?;
    println!("n = 2 Jacobian check {:.1e}", jacobian_residual_n2(&decompose(&m2)?)?);
    Ok(())
}
