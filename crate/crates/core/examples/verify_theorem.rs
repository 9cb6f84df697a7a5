//! End-to-end check that a bi-free product of reflection positive
//! components is reflection positive.

use bifree::{verify_theorem, BiFreeSystem, Config};

fn main() -> bifree::Result<()> {
    let mut rng = bifree::random::rng(2024);
    let models = vec![
        bifree::random::schmidt_model(&mut rng, 3, 1),
        bifree::random::schmidt_model(&mut rng, 2, 2),
        bifree::random::schmidt_model(&mut rng, 1, 1),
    ];
    let sys = BiFreeSystem::from_models(&models, Config::default());
    let r = verify_theorem(&sys, 2, 500, 1e-8, 1)?;
    for c in &r.components {
        println!("component {}: min eig {:.3e}, psd {}", c.component, c.min_eig, c.psd);
    }
    println!("product Gram: {} words, min eig {:.3e}", r.gram.dim(), r.gram.min_eig);
    println!(
        "{} random elements: min Re {:.4}, max |Im| {:.1e}",
        r.random.trials, r.random.min_real, r.random.max_abs_imag
    );
    println!("status: {:?}", r.status);
    Ok(())
}
