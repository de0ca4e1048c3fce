//! Small dense complex linear-algebra helpers shared across modules.

use ndarray::{Array1, Array2, ArrayView2};
use ndarray_linalg::{EigValsh, Eigh, Inverse, UPLO};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const I: C64 = C64::new(0.0, 1.0);

pub fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

pub fn dagger(m: &ArrayView2<C64>) -> Array2<C64> {
    m.t().mapv(|z| z.conj())
}

pub fn identity(n: usize) -> Array2<C64> {
    Array2::from_diag_elem(n, C64::new(1.0, 0.0))
}

pub fn trace(m: &ArrayView2<C64>) -> C64 {
    m.diag().iter().sum()
}

pub fn max_abs(m: &ArrayView2<C64>) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

/// Frobenius norm squared.
pub fn frobenius_sq(m: &ArrayView2<C64>) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum()
}

pub fn kron(a: &ArrayView2<C64>, b: &ArrayView2<C64>) -> Array2<C64> {
    let (ar, ac) = a.dim();
    let (br, bc) = b.dim();
    let mut out = Array2::zeros((ar * br, ac * bc));
    for ((i, j), &x) in a.indexed_iter() {
        if x == C64::new(0.0, 0.0) {
            continue;
        }
        let mut view = out.slice_mut(ndarray::s![i * br..(i + 1) * br, j * bc..(j + 1) * bc]);
        view.zip_mut_with(b, |o, &y| *o = x * y);
    }
    out
}

/// Largest entrywise deviation from Hermiticity.
pub fn hermiticity_error(m: &ArrayView2<C64>) -> f64 {
    let n = m.nrows();
    let mut err: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            err = err.max((m[[i, j]] - m[[j, i]].conj()).norm());
        }
    }
    err
}

/// Eigenvalues of the Hermitian part of `m`, ascending.
pub fn hermitian_eigenvalues(m: &ArrayView2<C64>) -> Result<Array1<f64>> {
    let h = (m.to_owned() + dagger(m)) * 0.5;
    h.eigvalsh(UPLO::Upper)
        .map_err(|e| Error::EigenSolver(e.to_string()))
}

pub fn hermitian_eigh(m: &ArrayView2<C64>) -> Result<(Array1<f64>, Array2<C64>)> {
    let h = (m.to_owned() + dagger(m)) * 0.5;
    h.eigh(UPLO::Upper)
        .map_err(|e| Error::EigenSolver(e.to_string()))
}

/// Trace distance ½‖a − b‖₁ between two Hermitian matrices of equal shape.
pub fn trace_distance(a: &ArrayView2<C64>, b: &ArrayView2<C64>) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::domain(format!(
            "trace distance between shapes {:?} and {:?}",
            a.dim(),
            b.dim()
        )));
    }
    let diff = a.to_owned() - b;
    let ev = hermitian_eigenvalues(&diff.view())?;
    Ok(0.5 * ev.iter().map(|x| x.abs()).sum::<f64>())
}

pub fn inverse(m: &Array2<C64>) -> Result<Array2<C64>> {
    m.inv().map_err(|e| Error::Numerical {
        time: f64::NAN,
        reason: format!("matrix inversion failed: {e}"),
    })
}

/// Column-stacking vectorization: entry (i, j) lands at index i + j·rows.
pub fn vectorize(m: &ArrayView2<C64>) -> Array1<C64> {
    let (r, cols) = m.dim();
    let mut v = Array1::zeros(r * cols);
    for ((i, j), &x) in m.indexed_iter() {
        v[i + j * r] = x;
    }
    v
}

pub fn unvectorize(v: &[C64], rows: usize, cols: usize) -> Array2<C64> {
    Array2::from_shape_fn((rows, cols), |(i, j)| v[i + j * rows])
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn vectorization_is_column_stacking() {
        let m = array![[c(1.0), c(2.0)], [c(3.0), c(4.0)], [c(5.0), c(6.0)]];
        let v = vectorize(&m.view());
        assert_eq!(
            v.to_vec(),
            vec![c(1.0), c(3.0), c(5.0), c(2.0), c(4.0), c(6.0)]
        );
        assert_eq!(unvectorize(v.as_slice().unwrap(), 3, 2), m);
    }

    #[test]
    fn kron_matches_definition() {
        let a = array![[c(1.0), c(2.0)], [c(0.0), c(1.0)]];
        let b = array![[c(0.0), c(1.0)], [c(1.0), c(0.0)]];
        let k = kron(&a.view(), &b.view());
        assert_eq!(k[[0, 3]], c(2.0));
        assert_eq!(k[[1, 2]], c(2.0));
        assert_eq!(k[[2, 3]], c(1.0));
        assert_eq!(k[[2, 0]], c(0.0));
    }

    #[test]
    fn trace_distance_of_orthogonal_pure_states_is_one() {
        let a = array![[c(1.0), c(0.0)], [c(0.0), c(0.0)]];
        let b = array![[c(0.0), c(0.0)], [c(0.0), c(1.0)]];
        assert!((trace_distance(&a.view(), &b.view()).unwrap() - 1.0).abs() < 1e-14);
    }
}
