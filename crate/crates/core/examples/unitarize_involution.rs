//! Unitarize the group generated by h = [[0, -2], [1/2, 0]].
//!
//! h is similar to the rotation [[0, -1], [1, 0]] via s = diag(2, 1/2)^{-1/2},
//! so the pipeline should recover exactly that conjugation: close the group
//! (order 4), take the circumcenter of the orbit of the identity, and verify
//! the certificate.

use std::sync::Arc;

use tracecone::{
    close_group_in, distance, unitarize_table, verify_certificate, AlgebraElement, BlockAlgebra,
    BlockMatrix, Scalar, UnitarizeOptions,
};

fn main() -> tracecone::Result<()> {
    // One 2x2 block, full trace weight: A = M_2(C) with tau = tr/2.
    let alg = BlockAlgebra::new(vec![2], vec![1.0])?;

    let h = AlgebraElement::new(
        Arc::clone(&alg),
        vec![BlockMatrix::from_fn(2, 2, |i, j| match (i, j) {
            (0, 1) => Scalar::new(-2.0, 0.0),
            (1, 0) => Scalar::new(0.5, 0.0),
            _ => Scalar::new(0.0, 0.0),
        })],
    )?;

    let (table, overflow) = close_group_in(&alg, std::slice::from_ref(&h), 100)?;
    assert!(overflow.is_none());
    println!("group order {}", table.elements().len());

    let cert = unitarize_table(&table, &UnitarizeOptions::default())?;
    println!(
        "residual_unitarity = {:.3e}, residual_fixed_point = {:.3e}",
        cert.residual_unitarity, cert.residual_fixed_point
    );
    assert!(verify_certificate(&cert, &table, 1e-8));

    // The center is the fixed point diag(2, 1/2) and s h s^{-1} is the
    // rotation by pi/2.
    let target = tracecone::positivize(&AlgebraElement::real_diagonal(&alg, &[vec![2.0, 0.5]])?)?;
    println!("center gap = {:.3e}", distance(&cert.center, &target)?);

    let s = cert.unitarizer.element();
    let image = &(s * &h) * cert.unitarizer.inv()?.element();
    println!("s h s^-1 =");
    for i in 0..2 {
        let row: Vec<String> = (0..2)
            .map(|j| format!("{:+.6}", image.blocks()[0][(i, j)].re))
            .collect();
        println!("  [{}]", row.join(", "));
    }
    Ok(())
}
