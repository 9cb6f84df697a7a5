//! Mixed moments of a bi-free product computed from the component moments,
//! including the centered decomposition of a positive word.

use bifree::bifree::reassemble;
use bifree::{BiFreeSystem, Config, Letter, NCPoly, Scalar, Word};

fn main() -> bifree::Result<()> {
    let mut rng = bifree::random::rng(7);
    let models = vec![
        bifree::random::schmidt_model(&mut rng, 2, 2),
        bifree::random::schmidt_model(&mut rng, 3, 1),
    ];
    let sys = BiFreeSystem::from_models(&models, Config::default());

    let words = [
        Word::new([Letter::pos(0, 0)]),
        Word::new([Letter::pos(0, 0), Letter::pos(1, 0)]),
        Word::new([Letter::refl(1, 0), Letter::pos(0, 1), Letter::pos(1, 0)]),
        Word::new([Letter::refl(0, 0), Letter::refl(1, 0), Letter::pos(0, 1), Letter::pos(1, 0)]),
    ];
    for w in &words {
        println!("tau({w}) = {:.6}", sys.evaluate_word(w)?);
    }

    let p = NCPoly::monomial(Word::new([Letter::pos(0, 0), Letter::pos(1, 0), Letter::pos(0, 1)]), Scalar::new(1.0, 0.0));
    let terms = sys.center_decompose(&p)?;
    println!("0.0 1.0 0.1 splits into {} centered terms:", terms.len());
    for t in &terms {
        println!("  {:.4} on pattern {:?}", t.coefficient, t.pattern());
    }
    println!("reassembled difference: {:.2e}", reassemble(&terms)?.max_diff(&p));
    Ok(())
}
