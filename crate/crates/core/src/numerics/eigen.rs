use num_traits::Float;

use crate::error::{Error, Result};
use crate::numerics::matrix::Matrix;
use crate::scalar::Scalar;

pub const DEFAULT_TOL: f64 = 1e-10;

/// Symmetric eigensolver output. Eigenvectors are the columns of `eigenvectors`.
#[derive(Clone, Debug)]
pub struct EigenResult<T> {
    pub eigenvalues: Vec<T>,
    pub eigenvectors: Matrix<T>,
    pub residual: f64,
}

pub trait Real: Scalar + Float {}
impl<T: Scalar + Float> Real for T {}

fn check_symmetric<T: Real>(a: &Matrix<T>, tol: f64) -> Result<()> {
    if !a.is_square() {
        return Err(Error::InvalidInput(format!(
            "matrix is {}x{}, expected square",
            a.rows(),
            a.cols()
        )));
    }
    if a.data().iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput("non-finite entry".into()));
    }
    let asym = a.asymmetry();
    if asym > tol * a.max_abs().max(1.0) {
        return Err(Error::NotSymmetric(asym));
    }
    Ok(())
}

fn residual<T: Real>(a: &Matrix<T>, vals: &[T], vecs: &Matrix<T>) -> f64 {
    let n = a.rows();
    let mut worst: f64 = 0.0;
    for k in 0..vals.len() {
        let v = vecs.col(k);
        let av = a.matvec(&v);
        let r = av
            .iter()
            .zip(&v)
            .map(|(x, y)| (*x - vals[k] * *y).as_f64().powi(2))
            .sum::<f64>()
            .sqrt();
        worst = worst.max(r);
    }
    let _ = n;
    worst
}

fn sort_pairs<T: Real>(vals: Vec<T>, vecs: Matrix<T>) -> (Vec<T>, Matrix<T>) {
    let mut idx: Vec<usize> = (0..vals.len()).collect();
    idx.sort_by(|&i, &j| vals[i].partial_cmp(&vals[j]).expect("finite eigenvalues"));
    let sorted = idx.iter().map(|&i| vals[i]).collect();
    (sorted, vecs.select_cols(&idx))
}

/// Cyclic Jacobi with a fixed sweep order.
pub fn sym_eig<T: Real>(a: &Matrix<T>, tol: f64) -> Result<EigenResult<T>> {
    check_symmetric(a, tol)?;
    let n = a.rows();
    let mut m = a.clone();
    // symmetrize exactly so the rotations see a symmetric matrix
    for i in 0..n {
        for j in 0..i {
            let v = (m[(i, j)] + m[(j, i)]) / T::from_i64(2);
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
    let mut v = Matrix::<T>::identity(n);
    let scale = T::from_f64(a.frobenius_norm().max(f64::MIN_POSITIVE));
    let eps = T::epsilon();
    for _sweep in 0..100 {
        let mut off = T::zero();
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    off = off + m[(i, j)] * m[(i, j)];
                }
            }
        }
        if off.sqrt() <= eps * scale {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[(p, q)];
                if apq.abs() <= eps * eps * scale {
                    m[(p, q)] = T::zero();
                    m[(q, p)] = T::zero();
                    continue;
                }
                let app = m[(p, p)];
                let aqq = m[(q, q)];
                let theta = (aqq - app) / (T::from_i64(2) * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[(k, p)];
                    let mkq = m[(k, q)];
                    m[(k, p)] = c * mkp - s * mkq;
                    m[(k, q)] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[(p, k)];
                    let mqk = m[(q, k)];
                    m[(p, k)] = c * mpk - s * mqk;
                    m[(q, k)] = s * mpk + c * mqk;
                }
                m[(p, q)] = T::zero();
                m[(q, p)] = T::zero();
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    let (vals, vecs) = sort_pairs(m.diagonal(), v);
    let res = residual(a, &vals, &vecs);
    let bound = tol.max(T::epsilon().as_f64() * 1e3) * a.frobenius_norm().max(1.0);
    if res > bound {
        return Err(Error::InternalConsistency(format!(
            "Jacobi residual {res:e} exceeds {bound:e}"
        )));
    }
    Ok(EigenResult {
        eigenvalues: vals,
        eigenvectors: vecs,
        residual: res,
    })
}

/// Lower-triangular `L` with `L Lᵀ = M`.
pub fn cholesky<T: Real>(m: &Matrix<T>) -> Result<Matrix<T>> {
    if !m.is_square() {
        return Err(Error::InvalidInput(
            "Cholesky of a non-square matrix".into(),
        ));
    }
    let n = m.rows();
    let mut l = Matrix::<T>::zeros(n, n);
    for j in 0..n {
        let mut d = m[(j, j)];
        for k in 0..j {
            d = d - l[(j, k)] * l[(j, k)];
        }
        if !(d > T::zero()) {
            return Err(Error::NotPositiveDefinite);
        }
        let d = d.sqrt();
        l[(j, j)] = d;
        for i in j + 1..n {
            let mut s = m[(i, j)];
            for k in 0..j {
                s = s - l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = s / d;
        }
    }
    Ok(l)
}

/// Solve `L X = B` for lower-triangular `L`.
pub fn forward_substitute<T: Real>(l: &Matrix<T>, b: &Matrix<T>) -> Matrix<T> {
    let n = l.rows();
    let mut x = b.clone();
    for c in 0..b.cols() {
        for i in 0..n {
            let mut s = x[(i, c)];
            for k in 0..i {
                s = s - l[(i, k)] * x[(k, c)];
            }
            x[(i, c)] = s / l[(i, i)];
        }
    }
    x
}

/// Solve `Lᵀ X = B` for lower-triangular `L`.
pub fn backward_substitute_transpose<T: Real>(l: &Matrix<T>, b: &Matrix<T>) -> Matrix<T> {
    let n = l.rows();
    let mut x = b.clone();
    for c in 0..b.cols() {
        for i in (0..n).rev() {
            let mut s = x[(i, c)];
            for k in i + 1..n {
                s = s - l[(k, i)] * x[(k, c)];
            }
            x[(i, c)] = s / l[(i, i)];
        }
    }
    x
}

/// `L⁻¹ K L⁻ᵀ`, symmetrized.
pub fn cholesky_reduce<T: Real>(k: &Matrix<T>, l: &Matrix<T>) -> Matrix<T> {
    let y = forward_substitute(l, k);
    let c = forward_substitute(l, &y.transpose());
    let n = c.rows();
    Matrix::from_fn(n, n, |i, j| (c[(i, j)] + c[(j, i)]) / T::from_i64(2))
}

/// `K v = λ M v` with `M` symmetric positive definite; eigenvectors are M-orthonormal.
pub fn gen_sym_eig<T: Real>(k: &Matrix<T>, m: &Matrix<T>, tol: f64) -> Result<EigenResult<T>> {
    check_symmetric(k, tol)?;
    check_symmetric(m, tol)?;
    if k.shape() != m.shape() {
        return Err(Error::mismatch(
            format!("{:?}", k.shape()),
            format!("{:?}", m.shape()),
        ));
    }
    let l = cholesky(m)?;
    let c = cholesky_reduce(k, &l);
    let inner = sym_eig(&c, tol)?;
    let vecs = backward_substitute_transpose(&l, &inner.eigenvectors);
    let mut worst: f64 = 0.0;
    for j in 0..vecs.cols() {
        let v = vecs.col(j);
        let kv = k.matvec(&v);
        let mv = m.matvec(&v);
        let r = kv
            .iter()
            .zip(&mv)
            .map(|(a, b)| (*a - inner.eigenvalues[j] * *b).as_f64().powi(2))
            .sum::<f64>()
            .sqrt();
        worst = worst.max(r);
    }
    Ok(EigenResult {
        eigenvalues: inner.eigenvalues,
        eigenvectors: vecs,
        residual: worst,
    })
}

/// Eigenvalues only, via Householder tridiagonalization and implicit QL.
/// O(n³) with a small constant; used when n is too large for Jacobi.
pub fn sym_eigvals<T: Real>(a: &Matrix<T>, tol: f64) -> Result<Vec<T>> {
    check_symmetric(a, tol)?;
    let (mut d, mut e) = tridiagonalize(a);
    tql(&mut d, &mut e)?;
    d.sort_by(|x, y| x.partial_cmp(y).expect("finite eigenvalues"));
    Ok(d)
}

/// Householder reduction to tridiagonal form; returns (diagonal, subdiagonal with e[0] = 0).
pub fn tridiagonalize<T: Real>(a: &Matrix<T>) -> (Vec<T>, Vec<T>) {
    let n = a.rows();
    let mut m = a.clone();
    let mut d = vec![T::zero(); n];
    let mut e = vec![T::zero(); n];
    let two = T::from_i64(2);
    for i in (1..n).rev() {
        let l = i - 1;
        let mut h = T::zero();
        if l > 0 {
            let scale = (0..=l).fold(T::zero(), |s, k| s + m[(i, k)].abs());
            if scale == T::zero() {
                e[i] = m[(i, l)];
            } else {
                for k in 0..=l {
                    m[(i, k)] = m[(i, k)] / scale;
                    h = h + m[(i, k)] * m[(i, k)];
                }
                let f = m[(i, l)];
                let g = if f >= T::zero() { -h.sqrt() } else { h.sqrt() };
                e[i] = scale * g;
                h = h - f * g;
                m[(i, l)] = f - g;
                let mut ff = T::zero();
                for j in 0..=l {
                    let mut g = T::zero();
                    for k in 0..=j {
                        g = g + m[(j, k)] * m[(i, k)];
                    }
                    for k in j + 1..=l {
                        g = g + m[(k, j)] * m[(i, k)];
                    }
                    e[j] = g / h;
                    ff = ff + e[j] * m[(i, j)];
                }
                let hh = ff / (h + h);
                for j in 0..=l {
                    let f = m[(i, j)];
                    let g = e[j] - hh * f;
                    e[j] = g;
                    for k in 0..=j {
                        m[(j, k)] = m[(j, k)] - (f * e[k] + g * m[(i, k)]);
                    }
                }
            }
        } else {
            e[i] = m[(i, l)];
        }
        d[i] = h;
    }
    let _ = two;
    for i in 0..n {
        d[i] = m[(i, i)];
    }
    // shift subdiagonal so that e[i] couples d[i] and d[i+1]
    for i in 1..n {
        e[i - 1] = e[i];
    }
    if n > 0 {
        e[n - 1] = T::zero();
    }
    (d, e)
}

/// Implicit QL on a symmetric tridiagonal matrix (eigenvalues overwrite `d`).
fn tql<T: Real>(d: &mut [T], e: &mut [T]) -> Result<()> {
    let n = d.len();
    let two = T::from_i64(2);
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= T::epsilon() * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                return Err(Error::InternalConsistency(
                    "QL iteration did not converge".into(),
                ));
            }
            let mut g = (d[l + 1] - d[l]) / (two * e[l]);
            let mut r = g.hypot(T::one());
            g = d[m] - d[l] + e[l] / (g + if g >= T::zero() { r.abs() } else { -r.abs() });
            let (mut s, mut c, mut p) = (T::one(), T::one(), T::zero());
            let mut i = m;
            let mut underflow = false;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == T::zero() {
                    d[i + 1] = d[i + 1] - p;
                    e[m] = T::zero();
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + two * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if underflow {
                continue;
            }
            d[l] = d[l] - p;
            e[l] = g;
            e[m] = T::zero();
        }
    }
    Ok(())
}
