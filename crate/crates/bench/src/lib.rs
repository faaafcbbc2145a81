//! Benchmark fixtures.

use aifs_core::hadamard::check_hadamard;
use aifs_core::ifs::{scalar_digits, standard_simplex_digits};
use aifs_core::spectrum::sierpinski_triple;
use aifs_core::{AffineSystem, ExpansiveIntMatrix, HadamardTriple};

pub fn cantor4_triple() -> HadamardTriple {
    let r = ExpansiveIntMatrix::new(vec![vec![4]]).expect("4 is expansive");
    check_hadamard(&r, &scalar_digits(&[0, 2]), &scalar_digits(&[0, 1])).expect("well-formed triple")
}

/// `R = pI_d` with the standard simplex digits and the matching dual digits.
pub fn sierpinski(p: i64, d: usize) -> HadamardTriple {
    sierpinski_triple(p, d).expect("p has a Hadamard complement")
}

pub fn simplex_system(p: i64, d: usize) -> AffineSystem {
    AffineSystem::uniform(ExpansiveIntMatrix::scalar(p, d).expect("p >= 2"), standard_simplex_digits(d)).expect("distinct digits")
}

pub fn binary_system(p: i64) -> AffineSystem {
    AffineSystem::uniform(ExpansiveIntMatrix::new(vec![vec![p]]).expect("p >= 2"), scalar_digits(&[0, 1])).expect("distinct digits")
}
