//! Ginibre reference: dense QR vs Kostlan radial sampling against the circular law.

use tribeta::ginibre::*;

fn main() -> tribeta::Result<()> {
    println!("dense   n = 100, m = 20: KS {:.4}", ginibre_ks(100, 20, 1, GinibreMethod::Dense)?);
    println!("kostlan n = 100, m = 20: KS {:.4}", ginibre_ks(100, 20, 1, GinibreMethod::Kostlan)?);
    println!("kostlan n = 5000, m = 20: KS {:.4}", ginibre_ks(5000, 20, 1, GinibreMethod::Kostlan)?);
    Ok(())
}
