//! Matrix exponential by Padé approximation with scaling and squaring.
//!
//! Degree selection and thresholds follow Higham's 2005 algorithm; the result
//! is accurate to roughly unit roundoff times the condition of the problem and
//! does not assume diagonalizability.

use ndarray::Array2;

use crate::error::Result;
use crate::linalg::{c, identity, inverse, C64};

const THETA: [(usize, f64); 4] = [
    (3, 1.495585217958292e-2),
    (5, 2.539398330063230e-1),
    (7, 9.504178996162932e-1),
    (9, 2.097847961257068e0),
];
const THETA_13: f64 = 5.371920351148152;

const B3: [f64; 4] = [120.0, 60.0, 12.0, 1.0];
const B5: [f64; 6] = [30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0];
const B7: [f64; 8] = [
    17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0,
];
const B9: [f64; 10] = [
    17643225600.0,
    8821612800.0,
    2075673600.0,
    302702400.0,
    30270240.0,
    2162160.0,
    110880.0,
    3960.0,
    90.0,
    1.0,
];
const B13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

fn one_norm(a: &Array2<C64>) -> f64 {
    a.columns()
        .into_iter()
        .map(|col| col.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

fn finish(u: Array2<C64>, v: Array2<C64>) -> Result<Array2<C64>> {
    let p = &v + &u;
    let q = &v - &u;
    Ok(inverse(&q)?.dot(&p))
}

/// Low-degree Padé approximant r_m(A) for m ∈ {3, 5, 7, 9}.
fn pade_low(a: &Array2<C64>, b: &[f64]) -> Result<Array2<C64>> {
    let n = a.nrows();
    let id = identity(n);
    let a2 = a.dot(a);
    let mut powers = vec![id.clone(), a2.clone()];
    while powers.len() * 2 < b.len() {
        let next = powers.last().expect("non-empty").dot(&a2);
        powers.push(next);
    }
    let mut u_inner = Array2::zeros((n, n));
    let mut v = Array2::zeros((n, n));
    for (k, p) in powers.iter().enumerate() {
        u_inner.scaled_add(c(b[2 * k + 1]), p);
        v.scaled_add(c(b[2 * k]), p);
    }
    finish(a.dot(&u_inner), v)
}

fn pade13(a: &Array2<C64>) -> Result<Array2<C64>> {
    let n = a.nrows();
    let b = |k: usize| c(B13[k]);
    let id = identity(n);
    let a2 = a.dot(a);
    let a4 = a2.dot(&a2);
    let a6 = a4.dot(&a2);
    let mut t = a6.mapv(|z| z * b(13));
    t.scaled_add(b(11), &a4);
    t.scaled_add(b(9), &a2);
    let mut inner = a6.dot(&t);
    inner.scaled_add(b(7), &a6);
    inner.scaled_add(b(5), &a4);
    inner.scaled_add(b(3), &a2);
    inner.scaled_add(b(1), &id);
    let u = a.dot(&inner);
    let mut t = a6.mapv(|z| z * b(12));
    t.scaled_add(b(10), &a4);
    t.scaled_add(b(8), &a2);
    let mut v = a6.dot(&t);
    v.scaled_add(b(6), &a6);
    v.scaled_add(b(4), &a4);
    v.scaled_add(b(2), &a2);
    v.scaled_add(b(0), &id);
    finish(u, v)
}

pub fn expm(a: &Array2<C64>) -> Result<Array2<C64>> {
    let norm = one_norm(a);
    for (m, theta) in THETA {
        if norm <= theta {
            let b: &[f64] = match m {
                3 => &B3,
                5 => &B5,
                7 => &B7,
                _ => &B9,
            };
            return pade_low(a, b);
        }
    }
    let s = if norm > THETA_13 {
        (norm / THETA_13).log2().ceil() as i32
    } else {
        0
    };
    let scaled = a.mapv(|z| z * 2f64.powi(-s));
    let mut r = pade13(&scaled)?;
    for _ in 0..s {
        r = r.dot(&r);
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_abs;
    use ndarray::array;

    #[test]
    fn diagonal_and_nilpotent() {
        let a = array![[c(-1.0), c(0.0)], [c(0.0), C64::new(0.0, 2.0)]];
        let e = expm(&a).unwrap();
        assert!((e[[0, 0]] - c((-1f64).exp())).norm() < 1e-15);
        assert!((e[[1, 1]] - C64::from_polar(1.0, 2.0)).norm() < 1e-15);
        let n = array![[c(0.0), c(30.0)], [c(0.0), c(0.0)]];
        let e = expm(&n).unwrap();
        assert!((e[[0, 1]] - c(30.0)).norm() < 1e-12);
        assert!((e[[0, 0]] - c(1.0)).norm() < 1e-12, "{}", e[[0, 0]]);
    }

    #[test]
    fn rotation_generator_at_every_degree() {
        for t in [1e-3, 0.1, 0.5, 1.5, 3.0, 40.0] {
            let a = array![[c(0.0), c(-t)], [c(t), c(0.0)]];
            let e = expm(&a).unwrap();
            let expect = array![[c(t.cos()), c(-t.sin())], [c(t.sin()), c(t.cos())]];
            assert!(max_abs(&(e - expect).view()) < 1e-13, "t={t}");
        }
    }

    #[test]
    fn defective_jordan_block() {
        // exp([[λ,1],[0,λ]]) = e^λ [[1,1],[0,1]]
        let l = C64::new(-0.3, 4.0);
        let a = array![[l, c(1.0)], [c(0.0), l]];
        let e = expm(&a).unwrap();
        let el = l.exp();
        assert!((e[[0, 1]] - el).norm() < 1e-13 && (e[[0, 0]] - el).norm() < 1e-13);
    }
}
