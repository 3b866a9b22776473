//! Dense helpers shared by the physics modules.
//!
//! Hermitian matrices `S + iK` (with `S` real symmetric and `K` real
//! antisymmetric) are handled through their real embedding
//! `[[S, -K], [K, S]]`, which is symmetric and carries every eigenvalue of the
//! Hermitian matrix exactly twice. Spectral functions (minimum eigenvalue,
//! projection onto the PSD cone) commute with the embedding, so everything
//! here stays in real arithmetic.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

pub type Mat = DMatrix<f64>;
pub type Vector = DVector<f64>;

pub fn symmetrize(m: &Mat) -> Mat {
    (m + m.transpose()) * 0.5
}

pub fn max_abs(m: &Mat) -> f64 {
    m.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()))
}

pub fn max_abs_diff(a: &Mat, b: &Mat) -> f64 {
    max_abs(&(a - b))
}

pub fn asymmetry(m: &Mat) -> f64 {
    max_abs_diff(m, &m.transpose())
}

/// Eigen-decomposition of a real symmetric matrix, eigenvalues descending.
pub fn sym_eigen_desc(m: &Mat) -> (Vector, Mat) {
    let n = m.nrows();
    let eig = SymmetricEigen::new(symmetrize(m));
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let values = Vector::from_iterator(n, order.iter().map(|&i| eig.eigenvalues[i]));
    let mut vectors = Mat::zeros(n, n);
    for (col, &i) in order.iter().enumerate() {
        vectors.set_column(col, &eig.eigenvectors.column(i));
    }
    (values, vectors)
}

pub fn sym_min_eigenvalue(m: &Mat) -> f64 {
    SymmetricEigen::new(symmetrize(m))
        .eigenvalues
        .iter()
        .fold(f64::INFINITY, |acc, &x| acc.min(x))
}

fn hermitian_embedding(re: &Mat, im: &Mat) -> Mat {
    let n = re.nrows();
    let re = symmetrize(re);
    let im = (im - im.transpose()) * 0.5;
    let mut e = Mat::zeros(2 * n, 2 * n);
    e.view_mut((0, 0), (n, n)).copy_from(&re);
    e.view_mut((n, n), (n, n)).copy_from(&re);
    e.view_mut((n, 0), (n, n)).copy_from(&im);
    e.view_mut((0, n), (n, n)).copy_from(&(-&im));
    e
}

/// Eigenvalues of the Hermitian matrix `re + i·im`, ascending, each reported once.
pub fn hermitian_eigenvalues(re: &Mat, im: &Mat) -> Vec<f64> {
    let e = hermitian_embedding(re, im);
    let mut vals: Vec<f64> = SymmetricEigen::new(e).eigenvalues.iter().copied().collect();
    vals.sort_by(f64::total_cmp);
    // every eigenvalue appears twice in the embedding
    vals.into_iter().step_by(2).collect()
}

pub fn hermitian_min_eigenvalue(re: &Mat, im: &Mat) -> f64 {
    hermitian_eigenvalues(re, im)[0]
}

/// Frobenius-nearest PSD Hermitian matrix to `re + i·im`; returns `(re', im')`.
pub fn hermitian_psd_projection(re: &Mat, im: &Mat) -> (Mat, Mat) {
    let n = re.nrows();
    let eig = SymmetricEigen::new(hermitian_embedding(re, im));
    let clipped = eig.eigenvalues.map(|x| x.max(0.0));
    let q = &eig.eigenvectors;
    let proj = q * Mat::from_diagonal(&clipped) * q.transpose();
    let re_p = (proj.view((0, 0), (n, n)) + proj.view((n, n), (n, n))) * 0.5;
    let im_p = (proj.view((n, 0), (n, n)) - proj.view((0, n), (n, n))) * 0.5;
    (symmetrize(&re_p.into_owned()), im_p.into_owned())
}

/// Symmetric square root of a symmetric positive semi-definite matrix.
pub fn sym_sqrt(m: &Mat) -> Mat {
    let eig = SymmetricEigen::new(symmetrize(m));
    let roots = eig.eigenvalues.map(|x| x.max(0.0).sqrt());
    &eig.eigenvectors * Mat::from_diagonal(&roots) * eig.eigenvectors.transpose()
}

/// Flip each column so its largest-magnitude entry is positive (ties go to the
/// lowest index). Returns the applied signs.
pub fn canonical_column_signs(m: &mut Mat) -> Vec<f64> {
    let mut signs = Vec::with_capacity(m.ncols());
    for j in 0..m.ncols() {
        let col = m.column(j);
        let peak = col.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()));
        let tol = 1e-12 * peak.max(f64::MIN_POSITIVE);
        let lead = col
            .iter()
            .find(|x| x.abs() >= peak - tol)
            .copied()
            .unwrap_or(0.0);
        let s = if lead < 0.0 { -1.0 } else { 1.0 };
        if s < 0.0 {
            m.column_mut(j).neg_mut();
        }
        signs.push(s);
    }
    signs
}

/// Squared norm of the projection of `v` onto the span of the orthonormal
/// columns of `basis`.
pub fn subspace_overlap(v: &Vector, basis: &Mat) -> f64 {
    let coeffs = basis.transpose() * v;
    coeffs.norm_squared() / v.norm_squared().max(f64::MIN_POSITIVE)
}
