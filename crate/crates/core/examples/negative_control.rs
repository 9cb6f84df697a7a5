//! A component that is not reflection positive makes the product fail, and
//! the Gram witness is confirmed by evaluating τ(θ(a)a) directly.

use bifree::positivity::{combination, positive_words, quadratic_form};
use bifree::{check_component_rp, verify_theorem, BiFreeSystem, Config, TheoremStatus};

fn main() -> bifree::Result<()> {
    let mut rng = bifree::random::rng(808);
    let bad = loop {
        let m = bifree::random::hermitian_model(&mut rng, 2, 1);
        if check_component_rp(&m, 2, 1e-8)?.min_eig < -1e-6 {
            break m;
        }
    };
    let good = bifree::random::schmidt_model(&mut rng, 2, 2);
    let sys = BiFreeSystem::from_models(&[good, bad], Config::default());

    let r = verify_theorem(&sys, 2, 100, 1e-8, 1)?;
    println!("status: {:?}", r.status);
    assert_eq!(r.status, TheoremStatus::HypothesisFailure);
    let w = r.gram.witness.as_ref().expect("indefinite Gram has a witness");
    let basis = positive_words(&sys, 2)?;
    let a = combination(&basis, w);
    let direct = sys.evaluate_tau(&a.theta().mul(&a)?)?;
    println!("w*Gw           = {:.6}", quadratic_form(&r.gram.matrix, w));
    println!("tau(theta(a)a) = {direct:.6}");
    Ok(())
}
