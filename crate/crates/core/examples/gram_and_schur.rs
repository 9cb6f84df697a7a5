//! The Gram matrix of the reflected pairing and its block structure: each
//! alternating pattern contributes a Hadamard product of component Grams.

use bifree::positivity::{min_eigenvalue, pattern_blocks, positive_words};
use bifree::{build_gram, BiFreeSystem, Config};

fn main() -> bifree::Result<()> {
    let mut rng = bifree::random::rng(3);
    let models = vec![
        bifree::random::schmidt_model(&mut rng, 2, 2),
        bifree::random::schmidt_model(&mut rng, 2, 1),
    ];
    let sys = BiFreeSystem::from_models(&models, Config::default());
    let basis = positive_words(&sys, 2)?;
    let gram = build_gram(&sys, &basis)?;
    println!("basis of {} words, Gram min eig {:.4e}, psd {}", gram.dim(), gram.min_eig, gram.psd);

    for b in pattern_blocks(&sys, &basis)? {
        let diff = (&b.schur - &b.direct).norm();
        println!(
            "pattern {:<10} {:>3} terms  Schur min eig {:>10.3e}  |Schur - pairing| {:.1e}",
            format!("{:?}", b.pattern),
            b.terms.len(),
            min_eigenvalue(&b.schur),
            diff
        );
    }
    Ok(())
}
