//! Hard thresholding onto the sparsity set, including the tie rule.

use ndarray::array;
use scl::{project_pair, project_sparse, SparsityBudget};

fn main() -> scl::Result<()> {
    let v = array![3.0, 1.0, -2.0, 0.5];
    for s in 0..=4 {
        let r = project_sparse(v.view(), s)?;
        println!("s={s}: {} kept {:?}", r.vector, r.kept);
    }

    // Equal magnitudes: the smaller index wins and the tie is reported.
    let tied = array![1.0, -1.0, 1.0];
    let r = project_sparse(tied.view(), 2)?;
    println!("tied input {tied} -> {} (tie broken: {})", r.vector, r.tie_broken);

    // Each block is thresholded with its own budget.
    let budget = SparsityBudget::new(1, 2)?;
    let it = project_pair(array![0.2, -4.0, 1.0].view(), array![5.0, 0.1, -3.0].view(), budget)?;
    println!("pair: beta1 {} beta2 {}", it.beta1(), it.beta2());
    Ok(())
}
