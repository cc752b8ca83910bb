#![allow(dead_code)]

use etvbf::distributions::SeededRng;
use etvbf::{Matrix, Vector};

pub fn random_matrix(rng: &mut SeededRng, rows: usize, cols: usize) -> Matrix {
    Matrix::from_fn(rows, cols, |_, _| rng.standard_normal())
}

/// A Aᵀ + ridge·I with Gaussian A, so conditioning stays moderate.
pub fn random_spd(rng: &mut SeededRng, n: usize, ridge: f64) -> Matrix {
    let a = random_matrix(rng, n, n);
    &a * a.transpose() + Matrix::identity(n, n) * ridge
}

pub fn random_vector(rng: &mut SeededRng, n: usize) -> Vector {
    Vector::from_fn(n, |_, _| rng.standard_normal())
}

pub fn rel_diff(a: &Matrix, b: &Matrix) -> f64 {
    (a - b).norm() / b.norm().max(1.0)
}

pub fn dense_inverse(m: &Matrix) -> Matrix {
    m.clone().try_inverse().expect("oracle inverse")
}

/// [[A, B], [C, D]] as one dense matrix.
pub fn assemble(a: &Matrix, b: &Matrix, c: &Matrix, d: &Matrix) -> Matrix {
    let (n, m) = (a.nrows(), d.nrows());
    let mut out = Matrix::zeros(n + m, n + m);
    out.view_mut((0, 0), (n, n)).copy_from(a);
    out.view_mut((0, n), (n, m)).copy_from(b);
    out.view_mut((n, 0), (m, n)).copy_from(c);
    out.view_mut((n, n), (m, m)).copy_from(d);
    out
}

/// Expected inverse joint precision of (x, z) written out densely from the
/// factorization Φ = [[I,0],[H,I]] diag(P,R) [[I,Hᵀ],[0,I]].
pub fn joint_covariance(p: &Matrix, r: &Matrix, h: &Matrix) -> Matrix {
    let (n, m) = (p.nrows(), r.nrows());
    let lower = assemble(
        &Matrix::identity(n, n),
        &Matrix::zeros(n, m),
        h,
        &Matrix::identity(m, m),
    );
    let middle = assemble(p, &Matrix::zeros(n, m), &Matrix::zeros(m, n), r);
    &lower * middle * lower.transpose()
}
