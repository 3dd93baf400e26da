//! Gauss-Legendre and Gauss-Jacobi rules plus an adaptive Simpson fallback.
//!
//! The fixed rules drive assembly and the estimator time integrals; the
//! adaptive and Jacobi rules also serve as independent oracles in tests.

use crate::special::beta_fn;
use once_cell::sync::Lazy;

/// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1],
/// computed by Newton iteration on the Legendre recurrence.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Chebyshev-like initial guess
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, d) = legendre_and_deriv(n, x);
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let (_, dp) = legendre_and_deriv(n, x);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

fn legendre_and_deriv(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

pub static GL3: Lazy<(Vec<f64>, Vec<f64>)> = Lazy::new(|| gauss_legendre(3));
pub static GL4: Lazy<(Vec<f64>, Vec<f64>)> = Lazy::new(|| gauss_legendre(4));
pub static GL5: Lazy<(Vec<f64>, Vec<f64>)> = Lazy::new(|| gauss_legendre(5));
pub static GL8: Lazy<(Vec<f64>, Vec<f64>)> = Lazy::new(|| gauss_legendre(8));

/// Integrate f over [a, b] with a fixed Gauss-Legendre rule.
pub fn gauss_integrate<F: FnMut(f64) -> f64>(
    rule: &(Vec<f64>, Vec<f64>),
    a: f64,
    b: f64,
    mut f: F,
) -> f64 {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut acc = 0.0;
    for (x, w) in rule.0.iter().zip(rule.1.iter()) {
        acc += w * f(mid + half * x);
    }
    acc * half
}

/// Adaptive Simpson integration of f over [a, b] to absolute tolerance tol.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64, f64, f64) {
        let m = 0.5 * (a + b);
        let fa = f(a);
        let fm = f(m);
        let fb = f(b);
        ((b - a) / 6.0 * (fa + 4.0 * fm + fb), fa, fm, fb)
    }
    #[allow(clippy::too_many_arguments)]
    fn recurse<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: usize,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            left + right + delta / 15.0
        } else {
            recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
                + recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
        }
    }
    if a == b {
        return 0.0;
    }
    let (whole, fa, fm, fb) = simpson(&f, a, b);
    recurse(&f, a, b, fa, fm, fb, whole, tol, 48)
}

/// Nodes and weights of the n-point Gauss-Jacobi rule on [-1, 1] with weight
/// (1-x)^a (1+x)^b, via Golub-Welsch on the Jacobi recurrence.
pub fn gauss_jacobi(n: usize, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1 && a > -1.0 && b > -1.0);
    let mut diag = vec![0.0; n];
    let mut off = vec![0.0; n]; // off[k] couples k and k+1
    diag[0] = (b - a) / (a + b + 2.0);
    for k in 1..n {
        let kf = k as f64;
        let s = 2.0 * kf + a + b;
        diag[k] = (b * b - a * a) / (s * (s + 2.0));
        let beta2 = if k == 1 {
            4.0 * (1.0 + a) * (1.0 + b) / ((a + b + 2.0).powi(2) * (a + b + 3.0))
        } else {
            4.0 * kf * (kf + a) * (kf + b) * (kf + a + b) / (s * s * (s + 1.0) * (s - 1.0))
        };
        off[k - 1] = beta2.sqrt();
    }
    let mu0 = 2f64.powf(a + b + 1.0) * beta_fn(a + 1.0, b + 1.0);
    let (nodes, first_components) = tridiag_eigen(&mut diag, &mut off);
    let weights = first_components.iter().map(|c| mu0 * c * c).collect();
    (nodes, weights)
}

/// Eigenvalues of a symmetric tridiagonal matrix together with the first
/// component of each normalized eigenvector (QL with implicit shifts).
fn tridiag_eigen(diag: &mut [f64], off: &mut [f64]) -> (Vec<f64>, Vec<f64>) {
    let n = diag.len();
    let mut z = vec![0.0; n];
    z[0] = 1.0;
    // full first-row tracking via plane rotations
    let mut zrow = vec![0.0; n];
    zrow[0] = 1.0;
    if n == 1 {
        return (diag.to_vec(), zrow);
    }
    let mut e = off.to_vec();
    e[n - 1] = 0.0;
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = diag[m].abs() + diag[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            assert!(iter < 60, "tridiagonal eigensolver failed to converge");
            let mut g = (diag[l + 1] - diag[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = diag[m] - diag[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c) = (1.0, 1.0);
            let mut p = 0.0;
            for i in (l..m).rev() {
                let mut f = s * e[i];
                let bb = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    diag[i + 1] -= p;
                    e[m] = 0.0;
                    break;
                }
                s = f / r;
                c = g / r;
                g = diag[i + 1] - p;
                r = (diag[i] - g) * s + 2.0 * c * bb;
                p = s * r;
                diag[i + 1] = g + p;
                g = c * r - bb;
                f = zrow[i + 1];
                zrow[i + 1] = s * zrow[i] + c * f;
                zrow[i] = c * zrow[i] - s * f;
            }
            if r == 0.0 && m > l + 1 {
                continue;
            }
            diag[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    // sort ascending by eigenvalue
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&i, &j| diag[i].partial_cmp(&diag[j]).unwrap());
    let nodes = idx.iter().map(|&i| diag[i]).collect();
    let firsts = idx.iter().map(|&i| zrow[i]).collect();
    (nodes, firsts)
}
