//! Words, normal form and the reflection on the two-faced polynomial algebra.

use bifree::{Letter, NCPoly, Scalar, Word};

fn main() -> bifree::Result<()> {
    let g = Letter::pos(0, 0);
    let h = Letter::pos(1, 0);

    // reflected letters are moved in front, each face keeps its order
    let w = Word::new([g, h.theta(), h, g.theta()]);
    println!("normal form of g.~h.h.~g : {w}");
    let (neg, pos) = w.split();
    println!("  reflected part {neg}, positive part {pos}");

    let p = NCPoly::from_letters([g, h], Scalar::new(1.0, 2.0)).add(&NCPoly::from_letters([h], Scalar::new(0.5, 0.0)));
    let tp = p.theta();
    println!("p        = {} terms", p.len());
    for (w, c) in tp.terms() {
        println!("theta(p) : {c:.3} * {w}");
    }
    println!("theta(theta(p)) == p : {}", tp.theta().approx_eq(&p, 0.0));

    let q = tp.mul(&p)?;
    println!("theta(p) p has {} terms:", q.len());
    for (w, c) in q.terms() {
        println!("  {c:.3} * {w}");
    }
    Ok(())
}
