//! Reflection positivity of single components: a Schmidt state passes, a
//! Hermitian indefinite state does not.

use bifree::{check_component_rp, MatrixModel, Scalar};
use nalgebra::{DMatrix, DVector};

fn main() -> bifree::Result<()> {
    let g = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 0.0].map(|x| Scalar::new(x, 0.0)));

    let good = MatrixModel::with_schmidt(vec![g.clone()], &[0.7, 0.3])?;
    let r = check_component_rp(&good, 3, 1e-8)?;
    println!("Schmidt (0.7, 0.3): basis {}, min eig {:.3e}, psd {}", r.dim(), r.min_eig, r.psd);

    // X = diag(1, -1)/sqrt 2 flattened row-major
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let xi = DVector::from_vec(vec![s, 0.0, 0.0, -s].into_iter().map(|x| Scalar::new(x, 0.0)).collect());
    let bad = MatrixModel::new(2, vec![g], xi)?;
    let r = check_component_rp(&bad, 2, 1e-8)?;
    println!("diag(1,-1)/sqrt2  : basis {}, min eig {:.3e}, psd {}", r.dim(), r.min_eig, r.psd);
    if let Some(w) = &r.witness {
        println!("  witness over {:?}:", r.basis.iter().map(|w| w.to_string()).collect::<Vec<_>>());
        for z in w.iter() {
            println!("    {z:.4}");
        }
    }
    Ok(())
}
