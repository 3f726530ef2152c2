//! Gaussian moments by summing over pairings, by recursion, and by sampling.

use feynkit::gauss::SymmetricForm;
use feynkit::mc::McConfig;
use feynkit::wick::{enumerate_pairings, moment, moment_oracle_numeric, moment_via_recursion, pairing_count, MomentRequest};

fn main() -> feynkit::Result<()> {
    let a = SymmetricForm::from_integers(&[&[2, 1], &[1, 3]])?;

    for n in 1..=6 {
        println!("pairings of {} points: {}", 2 * n, pairing_count(2 * n));
    }
    println!("pairings of 4 points: {:?}", enumerate_pairings(4).iter().map(|p| p.pairs().to_vec()).collect::<Vec<_>>());

    for idx in [vec![1, 1], vec![1, 2], vec![1, 1, 2, 2], vec![1, 1, 1, 2, 2, 2], vec![1, 2, 2]] {
        let req = MomentRequest::new(idx.clone());
        let exact = moment(&a, &req)?;
        assert_eq!(exact, moment_via_recursion(&a, &req)?);
        let mc = moment_oracle_numeric(&a, &req, &McConfig::new(400_000, 3))?;
        println!("<x^{idx:?}> = {exact:>8}   MC {:.4} ± {:.4}", mc.value, mc.std_error);
    }
    Ok(())
}
