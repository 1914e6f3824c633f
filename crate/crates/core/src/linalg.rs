use nalgebra::{DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::hilbert::{CMatrix, Subspace};

/// Eigendecomposition of the Hermitian part of `h`.
pub fn hermitian_eigen(h: &CMatrix) -> (DVector<f64>, CMatrix) {
    let herm = (h + h.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = SymmetricEigen::new(herm);
    (eig.eigenvalues, eig.eigenvectors)
}

/// `exp(-i h t)` for Hermitian `h`, as `V exp(-i E t) V^dagger`.
pub fn expm_hermitian(h: &CMatrix, t: f64) -> CMatrix {
    let n = h.nrows();
    if n == 0 {
        return CMatrix::zeros(0, 0);
    }
    let (values, vectors) = hermitian_eigen(h);
    let mut scaled = vectors.clone();
    for (j, &e) in values.iter().enumerate() {
        let phase = Complex64::from_polar(1.0, -e * t);
        for i in 0..n {
            scaled[(i, j)] *= phase;
        }
    }
    scaled * vectors.adjoint()
}

/// `exp(-i G t)` for a Hermitian generator that is block diagonal over the
/// given disjoint sectors; each block is exponentiated on its own. States
/// outside every sector are left untouched (identity).
pub fn sector_exponential(generator: &CMatrix, sectors: &[Subspace], t: f64) -> CMatrix {
    let n = generator.nrows();
    let mut out = CMatrix::identity(n, n);
    for sector in sectors {
        if sector.is_empty() {
            continue;
        }
        let block = expm_hermitian(&sector.restrict_matrix(generator), t);
        for (r, &i) in sector.indices().iter().enumerate() {
            for (c, &j) in sector.indices().iter().enumerate() {
                out[(i, j)] = block[(r, c)];
            }
        }
    }
    out
}

/// `a^k` by binary powering.
pub fn matrix_power(a: &CMatrix, mut k: u64) -> CMatrix {
    let n = a.nrows();
    let mut result = CMatrix::identity(n, n);
    let mut base = a.clone();
    while k > 0 {
        if k & 1 == 1 {
            result = &result * &base;
        }
        k >>= 1;
        if k > 0 {
            base = &base * &base;
        }
    }
    result
}

/// Polar factor `W V^dagger` of `m = W S V^dagger`, the closest unitary in
/// Frobenius norm.
pub fn nearest_unitary(m: &CMatrix) -> CMatrix {
    let svd = m.clone().svd(true, true);
    match (svd.u, svd.v_t) {
        (Some(u), Some(v_t)) => u * v_t,
        _ => m.clone(),
    }
}

/// `u^k` for a unitary `u`, re-projecting onto the unitary group after every
/// product so that rounding does not compound over long powers.
pub fn unitary_power(u: &CMatrix, mut k: u64) -> CMatrix {
    let n = u.nrows();
    let mut result = CMatrix::identity(n, n);
    let mut base = nearest_unitary(u);
    while k > 0 {
        if k & 1 == 1 {
            result = nearest_unitary(&(&result * &base));
        }
        k >>= 1;
        if k > 0 {
            base = nearest_unitary(&(&base * &base));
        }
    }
    result
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::{frobenius, unitarity_defect};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn eigen_reconstructs_hermitian() {
        let h = CMatrix::from_row_slice(
            3,
            3,
            &[
                c(1.0, 0.0),
                c(0.5, -0.25),
                c(0.0, 2.0),
                c(0.5, 0.25),
                c(-2.0, 0.0),
                c(0.1, 0.0),
                c(0.0, -2.0),
                c(0.1, 0.0),
                c(0.3, 0.0),
            ],
        );
        let (e, v) = hermitian_eigen(&h);
        let d = CMatrix::from_diagonal(&e.map(|x| c(x, 0.0)));
        assert!(frobenius(&(&v * d * v.adjoint() - &h)) < 1e-13);
        let u = expm_hermitian(&h, 0.7);
        assert!(unitarity_defect(&u) < 1e-13);
    }

    #[test]
    fn two_by_two_rotation() {
        // exp(-i (pi/2) X) = -i X
        let x = CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]);
        let u = expm_hermitian(&x, std::f64::consts::FRAC_PI_2);
        let expected = &x * c(0.0, -1.0);
        assert!(frobenius(&(u - expected)) < 1e-15);
    }

    #[test]
    fn power_matches_repeated_product() {
        let x = CMatrix::from_row_slice(2, 2, &[c(0.6, 0.0), c(0.0, 0.8), c(0.0, 0.8), c(0.6, 0.0)]);
        let mut direct = CMatrix::identity(2, 2);
        for _ in 0..13 {
            direct = &direct * &x;
        }
        assert!(frobenius(&(matrix_power(&x, 13) - direct)) < 1e-13);
        assert_eq!(matrix_power(&x, 0), CMatrix::identity(2, 2));
        assert!(frobenius(&(unitary_power(&x, 13) - matrix_power(&x, 13))) < 1e-13);
    }

    #[test]
    fn long_unitary_powers_stay_unitary() {
        let h = CMatrix::from_fn(6, 6, |i, j| c((i * j) as f64 * 0.1 + 0.3, i as f64 - j as f64));
        let h = (&h + h.adjoint()) * c(0.5, 0.0);
        let u = expm_hermitian(&h, 0.01);
        let k = 1u64 << 34;
        assert!(unitarity_defect(&unitary_power(&u, k)) < 1e-12);
        // the phases still come out right: u^k = exp(-i h k 0.01)
        let expected = expm_hermitian(&h, 0.01 * 1024.0);
        assert!(frobenius(&(unitary_power(&u, 1024) - expected)) < 1e-10);
    }
}
