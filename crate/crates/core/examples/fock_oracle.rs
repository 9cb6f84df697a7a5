//! Cross-check of the moment evaluator against the vacuum state on the
//! truncated free product space.

use bifree::fock::FreeProductSpace;
use bifree::{BiFreeSystem, Config, NCPoly, Scalar};

fn main() -> bifree::Result<()> {
    let mut rng = bifree::random::rng(11);
    let models = vec![
        bifree::random::schmidt_model(&mut rng, 2, 2),
        bifree::random::schmidt_model(&mut rng, 2, 2),
    ];
    let sys = BiFreeSystem::from_models(&models, Config::default());
    let space = FreeProductSpace::build(&models, 4)?;
    println!("free product space truncated at length 4: dimension {}", space.dim());

    let gens = sys.generator_counts();
    let mut worst: f64 = 0.0;
    for k in 0..10 {
        let w = bifree::random::word(&mut rng, &gens, 1 + k % 4, true);
        let a = sys.evaluate_word(&w)?;
        let b = space.oracle_tau(&NCPoly::monomial(w.clone(), Scalar::new(1.0, 0.0)))?;
        worst = worst.max((a - b).norm());
        println!("{:<24} {a:>24.8}  oracle {b:.8}", w.to_string());
    }
    println!("max difference {worst:.2e}");
    Ok(())
}
