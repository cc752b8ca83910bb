//! Small dense SPD linear algebra and the special functions used by the
//! inverse-Wishart and Dirichlet expectations.

use std::f64::consts::PI;

use crate::{Error, Matrix, Result, Vector};

const SYMMETRY_TOL: f64 = 1e-9;

/// Digamma function ψ(x) for x > 0.
///
/// Shifts the argument upward with ψ(x) = ψ(x + 1) − 1/x until x ≥ 6, then
/// applies the asymptotic expansion in 1/x².
pub fn digamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain {
            function: "digamma",
            value: x,
            requirement: "x > 0",
        });
    }
    let mut x = x;
    let mut shift = 0.0;
    while x < 6.0 {
        shift -= 1.0 / x;
        x += 1.0;
    }
    let inv2 = 1.0 / (x * x);
    // Bernoulli-number coefficients B_2k / (2k).
    let series = inv2
        * (1.0 / 12.0
            - inv2
                * (1.0 / 120.0
                    - inv2
                        * (1.0 / 252.0
                            - inv2
                                * (1.0 / 240.0
                                    - inv2
                                        * (1.0 / 132.0
                                            - inv2 * (691.0 / 32760.0 - inv2 / 12.0))))));
    Ok(shift + x.ln() - 0.5 / x - series)
}

/// Multivariate digamma ψ_n(a) = Σ_{i=1..n} ψ(a + (1 − i)/2), defined for a > (n − 1)/2.
pub fn multivariate_digamma(n: usize, a: f64) -> Result<f64> {
    check_multivariate_domain("multivariate_digamma", n, a)?;
    (0..n).map(|i| digamma(a - 0.5 * i as f64)).sum()
}

// Lanczos approximation, g = 7, nine coefficients.
const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEF: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Natural log of the gamma function for x > 0.
pub fn ln_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain {
            function: "ln_gamma",
            value: x,
            requirement: "x > 0",
        });
    }
    Ok(ln_gamma_positive(x))
}

fn ln_gamma_positive(x: f64) -> f64 {
    if x < 0.5 {
        // Reflection: Γ(x)Γ(1 − x) = π / sin(πx).
        return (PI / (PI * x).sin()).ln() - ln_gamma_positive(1.0 - x);
    }
    if x > 1e7 {
        // Stirling with two correction terms; Lanczos loses digits to cancellation here.
        let inv = 1.0 / x;
        return (x - 0.5) * x.ln() - x + 0.5 * (2.0 * PI).ln() + inv / 12.0
            - inv * inv * inv / 360.0;
    }
    let x = x - 1.0;
    let mut acc = LANCZOS_COEF[0];
    for (i, c) in LANCZOS_COEF.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    let t = x + LANCZOS_G + 0.5;
    0.5 * (2.0 * PI).ln() + (x + 0.5) * t.ln() - t + acc.ln()
}

/// log Γ_n(a) = n(n − 1)/4 · log π + Σ_{i=1..n} log Γ(a + (1 − i)/2), defined for a > (n − 1)/2.
pub fn log_multivariate_gamma(n: usize, a: f64) -> Result<f64> {
    check_multivariate_domain("log_multivariate_gamma", n, a)?;
    let nf = n as f64;
    let mut acc = nf * (nf - 1.0) / 4.0 * PI.ln();
    for i in 0..n {
        acc += ln_gamma_positive(a - 0.5 * i as f64);
    }
    Ok(acc)
}

fn check_multivariate_domain(function: &'static str, n: usize, a: f64) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidParameter(format!(
            "{function}: dimension must be positive"
        )));
    }
    if !(a > 0.5 * (n as f64 - 1.0)) || !a.is_finite() {
        return Err(Error::Domain {
            function,
            value: a,
            requirement: "a > (n - 1) / 2",
        });
    }
    Ok(())
}

/// (M + Mᵀ) / 2.
pub fn symmetrize(m: &Matrix) -> Matrix {
    (m + m.transpose()) * 0.5
}

fn relative_asymmetry(m: &Matrix) -> f64 {
    let scale = m.norm();
    if scale == 0.0 {
        return 0.0;
    }
    (m - m.transpose()).norm() / scale
}

/// Lower Cholesky factor of a symmetric positive definite matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SpdFactor {
    lower: Matrix,
}

impl SpdFactor {
    /// Factorizes `m` after symmetrizing it. Fails with
    /// [`Error::NotPositiveDefinite`] on the first non-positive pivot; no jitter
    /// is ever added.
    pub fn new(m: &Matrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::Dimension(format!(
                "cannot factor a {}x{} matrix",
                m.nrows(),
                m.ncols()
            )));
        }
        let asym = relative_asymmetry(m);
        if asym > SYMMETRY_TOL || asym.is_nan() {
            return Err(Error::NotSymmetric(asym));
        }
        let a = symmetrize(m);
        let n = a.nrows();
        let mut l = Matrix::zeros(n, n);
        for j in 0..n {
            let mut pivot = a[(j, j)];
            for k in 0..j {
                pivot -= l[(j, k)] * l[(j, k)];
            }
            if !(pivot > 0.0) || !pivot.is_finite() {
                return Err(Error::NotPositiveDefinite {
                    pivot: j,
                    value: pivot,
                });
            }
            let d = pivot.sqrt();
            l[(j, j)] = d;
            for i in (j + 1)..n {
                let mut s = a[(i, j)];
                for k in 0..j {
                    s -= l[(i, k)] * l[(j, k)];
                }
                l[(i, j)] = s / d;
            }
        }
        Ok(Self { lower: l })
    }

    pub fn dim(&self) -> usize {
        self.lower.nrows()
    }

    pub fn lower(&self) -> &Matrix {
        &self.lower
    }

    pub fn log_det(&self) -> f64 {
        2.0 * self.lower.diagonal().iter().map(|d| d.ln()).sum::<f64>()
    }

    /// Solves M X = B for X.
    pub fn solve(&self, b: &Matrix) -> Matrix {
        assert_eq!(b.nrows(), self.dim(), "right-hand side row count");
        let n = self.dim();
        let l = &self.lower;
        let mut x = b.clone();
        for col in 0..x.ncols() {
            // forward: L y = b
            for i in 0..n {
                let mut s = x[(i, col)];
                for k in 0..i {
                    s -= l[(i, k)] * x[(k, col)];
                }
                x[(i, col)] = s / l[(i, i)];
            }
            // backward: Lᵀ x = y
            for i in (0..n).rev() {
                let mut s = x[(i, col)];
                for k in (i + 1)..n {
                    s -= l[(k, i)] * x[(k, col)];
                }
                x[(i, col)] = s / l[(i, i)];
            }
        }
        x
    }

    pub fn solve_vec(&self, b: &Vector) -> Vector {
        let x = self.solve(&Matrix::from_column_slice(b.len(), 1, b.as_slice()));
        Vector::from_column_slice(x.as_slice())
    }

    /// Explicit inverse, symmetrized.
    pub fn inverse(&self) -> Matrix {
        symmetrize(&self.solve(&Matrix::identity(self.dim(), self.dim())))
    }

    /// vᵀ M⁻¹ v.
    pub fn inv_quad_form(&self, v: &Vector) -> f64 {
        v.dot(&self.solve_vec(v))
    }
}

/// Convenience: factor and invert an SPD matrix.
pub fn spd_inverse(m: &Matrix) -> Result<Matrix> {
    Ok(SpdFactor::new(m)?.inverse())
}

/// Inverse of a general square matrix by Gauss-Jordan elimination with
/// partial pivoting.
pub fn general_inverse(m: &Matrix, what: &'static str) -> Result<Matrix> {
    if !m.is_square() {
        return Err(Error::Dimension(format!(
            "cannot invert a {}x{} matrix",
            m.nrows(),
            m.ncols()
        )));
    }
    let n = m.nrows();
    let mut a = m.clone();
    let mut inv = Matrix::identity(n, n);
    let scale = m.amax();
    if !(scale > 0.0) || !scale.is_finite() {
        return Err(Error::Singular(what));
    }
    for col in 0..n {
        let (pivot_row, pivot_abs) =
            (col..n)
                .map(|r| (r, a[(r, col)].abs()))
                .fold(
                    (col, -1.0),
                    |best, cur| if cur.1 > best.1 { cur } else { best },
                );
        if pivot_abs <= f64::EPSILON * scale * n as f64 {
            return Err(Error::Singular(what));
        }
        a.swap_rows(col, pivot_row);
        inv.swap_rows(col, pivot_row);
        let p = a[(col, col)];
        for j in 0..n {
            a[(col, j)] /= p;
            inv[(col, j)] /= p;
        }
        for r in 0..n {
            if r == col {
                continue;
            }
            let f = a[(r, col)];
            if f == 0.0 {
                continue;
            }
            for j in 0..n {
                a[(r, j)] -= f * a[(col, j)];
                inv[(r, j)] -= f * inv[(col, j)];
            }
        }
    }
    Ok(inv)
}

/// Inverse of the block matrix [[A, B], [C, D]] through the Schur complement
/// E = D − C A⁻¹ B:
///
/// ```text
/// [ A⁻¹ + A⁻¹ B E⁻¹ C A⁻¹   −A⁻¹ B E⁻¹ ]
/// [ −E⁻¹ C A⁻¹               E⁻¹       ]
/// ```
pub fn block_inverse(a: &Matrix, b: &Matrix, c: &Matrix, d: &Matrix) -> Result<Matrix> {
    let (p, q) = (a.nrows(), d.nrows());
    if !a.is_square() || !d.is_square() || b.shape() != (p, q) || c.shape() != (q, p) {
        return Err(Error::Dimension(format!(
            "blocks A{:?} B{:?} C{:?} D{:?} are not conformal",
            a.shape(),
            b.shape(),
            c.shape(),
            d.shape()
        )));
    }
    let a_inv = general_inverse(a, "leading block A")?;
    let a_inv_b = &a_inv * b;
    let c_a_inv = c * &a_inv;
    let e_inv = general_inverse(&(d - c * &a_inv_b), "Schur complement D - C A^-1 B")?;
    let top_right = -(&a_inv_b * &e_inv);
    let bottom_left = -(&e_inv * &c_a_inv);
    let top_left = &a_inv - &top_right * &c_a_inv;

    let mut out = Matrix::zeros(p + q, p + q);
    out.view_mut((0, 0), (p, p)).copy_from(&top_left);
    out.view_mut((0, p), (p, q)).copy_from(&top_right);
    out.view_mut((p, 0), (q, p)).copy_from(&bottom_left);
    out.view_mut((p, p), (q, q)).copy_from(&e_inv);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

    #[test]
    fn digamma_reference_values() {
        assert!((digamma(1.0).unwrap() + EULER_GAMMA).abs() < 1e-12);
        let half = -EULER_GAMMA - 2.0 * 2f64.ln();
        assert!((digamma(0.5).unwrap() - half).abs() < 1e-12);
        assert!((digamma(2.0).unwrap() - (1.0 - EULER_GAMMA)).abs() < 1e-12);
        // high-precision values
        assert!((digamma(1e-3).unwrap() + 1_000.575_571_931_810_3).abs() < 1e-10);
        assert!((digamma(1e6).unwrap() - 13.815_510_057_964_19).abs() < 1e-10);
        assert!((digamma(3.7).unwrap() - 1.167_153_539_361_512).abs() < 1e-12);
    }

    #[test]
    fn digamma_recurrence() {
        for &x in &[0.1, 0.5, 1.0, 2.0, 10.0, 100.0] {
            let lhs = digamma(x + 1.0).unwrap() - digamma(x).unwrap();
            assert!((lhs - 1.0 / x).abs() < 1e-10, "x = {x}");
        }
    }

    #[test]
    fn digamma_domain() {
        assert!(matches!(digamma(0.0), Err(Error::Domain { .. })));
        assert!(digamma(-1.5).is_err());
        assert!(digamma(f64::NAN).is_err());
    }

    #[test]
    fn multivariate_digamma_values() {
        assert_eq!(multivariate_digamma(1, 3.3).unwrap(), digamma(3.3).unwrap());
        assert!((multivariate_digamma(2, 1.0).unwrap() + 2.540_725_690_922_956).abs() < 1e-10);
        let oracle: f64 = (1..=4)
            .map(|i| digamma(5.0 + (1.0 - i as f64) / 2.0).unwrap())
            .sum();
        let v = multivariate_digamma(4, 5.0).unwrap();
        assert!((v - oracle).abs() < 1e-12);
        assert!((v - 5.254_262_903_868_374).abs() < 1e-10);
        assert!(multivariate_digamma(3, 1.0).is_err());
        assert!(multivariate_digamma(0, 1.0).is_err());
    }

    #[test]
    fn log_gamma_values() {
        assert!(log_multivariate_gamma(1, 1.0).unwrap().abs() < 1e-14);
        assert!((log_multivariate_gamma(2, 1.0).unwrap() - PI.ln()).abs() < 1e-10);
        assert!((log_multivariate_gamma(1, 0.5).unwrap() - 0.572_364_942_924_700_1).abs() < 1e-10);
        assert!((ln_gamma(3.7).unwrap() - 1.428_072_326_665_387_9).abs() < 1e-12);
        assert!((ln_gamma(0.01).unwrap() - 4.599_479_878_042_022).abs() < 1e-11);
        let big = ln_gamma(1e6).unwrap();
        assert!((big - 12_815_504.569_147_612).abs() / big < 1e-14);
        assert!(log_multivariate_gamma(4, 1.5).is_err());
    }

    #[test]
    fn factor_examples() {
        let f = SpdFactor::new(&Matrix::identity(3, 3)).unwrap();
        assert_eq!(f.log_det(), 0.0);
        let f = SpdFactor::new(&Matrix::from_diagonal(&Vector::from_vec(vec![4.0, 9.0]))).unwrap();
        assert!((f.log_det() - 36f64.ln()).abs() < 1e-12);
        let bad = Matrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]);
        assert!(matches!(
            SpdFactor::new(&bad),
            Err(Error::NotPositiveDefinite { pivot: 1, .. })
        ));
    }

    #[test]
    fn factor_rejects_asymmetric_and_rectangular() {
        let m = Matrix::from_row_slice(2, 2, &[2.0, 0.5, 0.0, 2.0]);
        assert!(matches!(SpdFactor::new(&m), Err(Error::NotSymmetric(_))));
        assert!(matches!(
            SpdFactor::new(&Matrix::zeros(2, 3)),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn block_inverse_examples() {
        let i2 = Matrix::identity(2, 2);
        let z = Matrix::zeros(2, 2);
        let inv = block_inverse(&i2, &z, &z, &i2).unwrap();
        assert_eq!(inv, Matrix::identity(4, 4));

        let s = |v: f64| Matrix::from_element(1, 1, v);
        let inv = block_inverse(&s(2.0), &s(1.0), &s(1.0), &s(1.0)).unwrap();
        let expect = Matrix::from_row_slice(2, 2, &[1.0, -1.0, -1.0, 2.0]);
        assert!((inv - expect).norm() < 1e-14);
    }

    #[test]
    fn block_inverse_singular_blocks() {
        let s = |v: f64| Matrix::from_element(1, 1, v);
        assert!(matches!(
            block_inverse(&s(0.0), &s(1.0), &s(1.0), &s(1.0)),
            Err(Error::Singular(_))
        ));
        // E = 1 - 1*1*1 = 0
        assert!(matches!(
            block_inverse(&s(1.0), &s(1.0), &s(1.0), &s(1.0)),
            Err(Error::Singular(_))
        ));
    }

    #[test]
    fn general_inverse_roundtrip() {
        let m = Matrix::from_row_slice(3, 3, &[0.0, 2.0, 1.0, 1.0, 1.0, 0.0, 3.0, 0.0, 1.0]);
        let inv = general_inverse(&m, "m").unwrap();
        assert!((&m * &inv - Matrix::identity(3, 3)).norm() < 1e-12);
    }
}
