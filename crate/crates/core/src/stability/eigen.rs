//! Dense nonsymmetric eigenvalues: balancing, Householder reduction to
//! Hessenberg form, then complex single-shift QR with Givens rotations.

use num_complex::Complex;

use super::{Matrix, StabilityError};
use crate::scalar::Scalar;

type C<T> = Complex<T>;

fn balance<T: Scalar>(a: &mut [Vec<T>]) {
    let n = a.len();
    let radix = T::lit(2.0);
    let sqrdx = radix * radix;
    loop {
        let mut done = true;
        for i in 0..n {
            let (mut r, mut c) = (T::zero(), T::zero());
            for j in 0..n {
                if j != i {
                    c = c + a[j][i].abs();
                    r = r + a[i][j].abs();
                }
            }
            if c == T::zero() || r == T::zero() {
                continue;
            }
            let s = c + r;
            let mut g = r / radix;
            let mut f = T::one();
            while c < g {
                f = f * radix;
                c = c * sqrdx;
            }
            g = r * radix;
            while c > g {
                f = f / radix;
                c = c / sqrdx;
            }
            if (c + r) / f < T::lit(0.95) * s {
                done = false;
                let g = T::one() / f;
                for j in 0..n {
                    a[i][j] = a[i][j] * g;
                }
                for row in a.iter_mut() {
                    row[i] = row[i] * f;
                }
            }
        }
        if done {
            break;
        }
    }
}

fn hessenberg<T: Scalar>(a: &mut [Vec<T>]) {
    let n = a.len();
    for k in 0..n.saturating_sub(2) {
        let norm = (k + 1..n).fold(T::zero(), |s, i| s + a[i][k] * a[i][k]).sqrt();
        if norm == T::zero() {
            continue;
        }
        let alpha = if a[k + 1][k] > T::zero() { -norm } else { norm };
        let mut v: Vec<T> = (k + 1..n).map(|i| a[i][k]).collect();
        v[0] = v[0] - alpha;
        let vv = v.iter().fold(T::zero(), |s, &x| s + x * x);
        if vv == T::zero() {
            continue;
        }
        let two = T::lit(2.0);
        for j in 0..n {
            let dot = v.iter().enumerate().fold(T::zero(), |s, (p, &x)| s + x * a[k + 1 + p][j]);
            let f = two * dot / vv;
            for (p, &x) in v.iter().enumerate() {
                a[k + 1 + p][j] = a[k + 1 + p][j] - f * x;
            }
        }
        for row in a.iter_mut() {
            let dot = v.iter().enumerate().fold(T::zero(), |s, (p, &x)| s + x * row[k + 1 + p]);
            let f = two * dot / vv;
            for (p, &x) in v.iter().enumerate() {
                row[k + 1 + p] = row[k + 1 + p] - f * x;
            }
        }
        for i in k + 2..n {
            a[i][k] = T::zero();
        }
    }
}

fn csqrt<T: Scalar>(z: C<T>) -> C<T> {
    z.sqrt()
}

/// Eigenvalues of `[[a, b], [c, d]]`.
fn eig2<T: Scalar>(a: C<T>, b: C<T>, c: C<T>, d: C<T>) -> (C<T>, C<T>) {
    let two = T::lit(2.0);
    let m = (a + d) / two;
    let h = (a - d) / two;
    let disc = csqrt(h * h + b * c);
    let (p, q) = (m + disc, m - disc);
    let det = a * d - b * c;
    if p.norm() >= q.norm() {
        if p.norm() > T::zero() {
            (p, det / p)
        } else {
            (p, q)
        }
    } else {
        (q, det / q)
    }
}

/// Givens rotation `[[c, s], [-conj(s), c]]` mapping `(x, y)` to `(r, 0)`.
fn givens<T: Scalar>(x: C<T>, y: C<T>) -> (T, C<T>) {
    let ax = x.norm();
    let r = ax.hypot(y.norm());
    if r == T::zero() {
        return (T::one(), C::new(T::zero(), T::zero()));
    }
    if ax == T::zero() {
        return (T::zero(), C::new(T::one(), T::zero()));
    }
    (ax / r, (x / ax) * y.conj() / r)
}

fn hessenberg_qr<T: Scalar>(mut h: Vec<Vec<C<T>>>, scale: T) -> Result<Vec<C<T>>, StabilityError> {
    let n = h.len();
    let mut out = vec![C::new(T::zero(), T::zero()); n];
    let eps = T::epsilon();
    let tiny = T::min_positive_value();
    let mut hi = n as isize - 1;
    let mut iter = 0usize;
    let limit = 60 * n.max(4);
    while hi >= 0 {
        let u = hi as usize;
        let mut l = u;
        while l > 0 {
            let s = h[l - 1][l - 1].norm() + h[l][l].norm();
            let s = if s == T::zero() { scale } else { s };
            if h[l][l - 1].norm() <= eps * s || h[l][l - 1].norm() <= tiny {
                h[l][l - 1] = C::new(T::zero(), T::zero());
                break;
            }
            l -= 1;
        }
        if l == u {
            out[u] = h[u][u];
            hi -= 1;
            iter = 0;
            continue;
        }
        if l + 1 == u {
            let (p, q) = eig2(h[l][l], h[l][u], h[u][l], h[u][u]);
            out[l] = p;
            out[u] = q;
            hi -= 2;
            iter = 0;
            continue;
        }
        iter += 1;
        if iter > limit {
            return Err(StabilityError::EigenNoConvergence);
        }
        let mu = if iter.is_multiple_of(11) {
            let t = T::lit(0.75);
            h[u][u] + C::new(h[u][u - 1].norm() * t, h[u - 1][u - 2].norm() * t)
        } else {
            let (p, q) = eig2(h[u - 1][u - 1], h[u - 1][u], h[u][u - 1], h[u][u]);
            if (p - h[u][u]).norm() <= (q - h[u][u]).norm() {
                p
            } else {
                q
            }
        };
        for k in l..=u {
            h[k][k] = h[k][k] - mu;
        }
        let mut rots = Vec::with_capacity(u - l);
        for k in l..u {
            let (c, s) = givens(h[k][k], h[k + 1][k]);
            for j in k..=u {
                let (x, y) = (h[k][j], h[k + 1][j]);
                h[k][j] = x * c + s * y;
                h[k + 1][j] = -(s.conj() * x) + y * c;
            }
            h[k + 1][k] = C::new(T::zero(), T::zero());
            rots.push((c, s));
        }
        for (k, &(c, s)) in (l..u).zip(&rots) {
            for row in h.iter_mut().take((k + 2).min(u) + 1).skip(l) {
                let (x, y) = (row[k], row[k + 1]);
                row[k] = x * c + y * s.conj();
                row[k + 1] = -(x * s) + y * c;
            }
        }
        for k in l..=u {
            h[k][k] = h[k][k] + mu;
        }
    }
    Ok(out)
}

/// All eigenvalues of a square matrix, with multiplicity, sorted by real then imaginary part.
pub fn eigenvalues<T: Scalar>(m: &Matrix<T>) -> Result<Vec<Complex<T>>, StabilityError> {
    if !m.is_square() {
        return Err(StabilityError::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    let n = m.rows();
    let mut a = m.to_rows();
    if a.iter().flatten().any(|x| !x.is_finite()) {
        return Err(StabilityError::NonFinite);
    }
    balance(&mut a);
    hessenberg(&mut a);
    let scale = m.norm_inf().max(T::min_positive_value());
    let h: Vec<Vec<C<T>>> = a
        .into_iter()
        .map(|row| row.into_iter().map(|x| C::new(x, T::zero())).collect())
        .collect();
    let mut ev = hessenberg_qr(h, scale)?;
    // a real matrix has real eigenvalues or conjugate pairs; clear rounding noise
    let snap = T::epsilon() * scale * T::from_usize(n.max(1) * 16).unwrap();
    for z in ev.iter_mut() {
        if z.im.abs() <= snap {
            z.im = T::zero();
        }
    }
    ev.sort_by(|a, b| {
        a.re.partial_cmp(&b.re)
            .unwrap()
            .then(a.im.partial_cmp(&b.im).unwrap())
    });
    Ok(ev)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn close(a: &[Complex<f64>], b: &[Complex<f64>], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).norm() < tol)
    }

    fn re(v: &[f64]) -> Vec<Complex<f64>> {
        v.iter().map(|&x| Complex::new(x, 0.0)).collect()
    }

    #[test]
    fn small_cases() {
        let m = Matrix::from_rows(vec![vec![-2.0]]).unwrap();
        assert_eq!(eigenvalues(&m).unwrap(), re(&[-2.0]));
        let m = Matrix::from_rows(vec![vec![-1.0, 0.0], vec![5.0, -3.0]]).unwrap();
        assert!(close(&eigenvalues(&m).unwrap(), &re(&[-3.0, -1.0]), 1e-14));
        let m = Matrix::<f64>::zeros(0, 0);
        assert!(eigenvalues(&m).unwrap().is_empty());
        let m = Matrix::<f64>::zeros(2, 3);
        assert!(matches!(eigenvalues(&m), Err(StabilityError::NotSquare { .. })));
    }

    #[test]
    fn rotation_has_imaginary_pair() {
        let m = Matrix::from_rows(vec![vec![0.0, -1.0], vec![1.0, 0.0]]).unwrap();
        let ev = eigenvalues(&m).unwrap();
        assert!(close(&ev, &[Complex::new(0.0, -1.0), Complex::new(0.0, 1.0)], 1e-14));
    }

    #[test]
    fn companion_matrix_roots() {
        // x^4 - 10x^3 + 35x^2 - 50x + 24 = (x-1)(x-2)(x-3)(x-4)
        let m = Matrix::from_rows(vec![
            vec![10.0, -35.0, 50.0, -24.0],
            vec![1.0, 0.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0, 0.0],
            vec![0.0, 0.0, 1.0, 0.0],
        ])
        .unwrap();
        assert!(close(&eigenvalues(&m).unwrap(), &re(&[1.0, 2.0, 3.0, 4.0]), 1e-9));
    }

    #[test]
    fn similarity_transform_of_known_spectrum() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let d = [-4.0, -2.5, -1.0, -0.25];
            let q = Matrix::from_rows(
                (0..4)
                    .map(|i| (0..4).map(|j| rng.gen_range(-1.0..1.0) + if i == j { 3.0 } else { 0.0 }).collect())
                    .collect(),
            )
            .unwrap();
            let mut dm = Matrix::zeros(4, 4);
            for i in 0..4 {
                dm[(i, i)] = d[i];
            }
            let m = q.matmul(&dm).unwrap().matmul(&q.inverse().unwrap()).unwrap();
            assert!(close(&eigenvalues(&m).unwrap(), &re(&d), 1e-8));
        }
    }

    #[test]
    fn trace_and_determinant_preserved() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in 1..8 {
            let rows: Vec<Vec<f64>> = (0..n).map(|_| (0..n).map(|_| rng.gen_range(-5.0..5.0)).collect()).collect();
            let m = Matrix::from_rows(rows).unwrap();
            let ev = eigenvalues(&m).unwrap();
            let trace: f64 = (0..n).map(|i| m[(i, i)]).sum();
            let sum: Complex<f64> = ev.iter().sum();
            assert!((sum.re - trace).abs() < 1e-9 && sum.im.abs() < 1e-9, "n={n}");
            // each eigenvalue makes m - lambda I singular
            for z in &ev {
                let a: Vec<Vec<Complex<f64>>> = (0..n)
                    .map(|i| {
                        (0..n)
                            .map(|j| Complex::new(m[(i, j)], 0.0) - if i == j { *z } else { Complex::new(0.0, 0.0) })
                            .collect()
                    })
                    .collect();
                let smallest = complex_det(a).norm();
                assert!(smallest < 1e-6 * 10f64.powi(n as i32), "n={n} z={z}");
            }
        }
    }

    fn complex_det(mut a: Vec<Vec<Complex<f64>>>) -> Complex<f64> {
        let n = a.len();
        let mut det = Complex::new(1.0, 0.0);
        for k in 0..n {
            let p = (k..n).max_by(|&i, &j| a[i][k].norm().partial_cmp(&a[j][k].norm()).unwrap()).unwrap();
            if a[p][k].norm() == 0.0 {
                return Complex::new(0.0, 0.0);
            }
            if p != k {
                a.swap(p, k);
                det = -det;
            }
            det *= a[k][k];
            for i in k + 1..n {
                let f = a[i][k] / a[k][k];
                for j in k..n {
                    let v = a[k][j];
                    a[i][j] -= f * v;
                }
            }
        }
        det
    }

    #[test]
    fn single_precision() {
        let m = Matrix::from_rows(vec![vec![-1.0f32, 0.0], vec![2.0, -3.0]]).unwrap();
        let ev = eigenvalues(&m).unwrap();
        assert!((ev[0].re + 3.0).abs() < 1e-5 && (ev[1].re + 1.0).abs() < 1e-5);
    }
}
