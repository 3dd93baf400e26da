//! Computable coefficient tables for the a posteriori estimators: the
//! history-mismatch coefficients C1/C2/C3, the reconstruction weight C4, and
//! the quadratic-reconstruction kernel coefficients C7-C11.
//!
//! C5 and C6 do not exist; the numbering follows the estimator derivation,
//! which jumps from C4 to C7.

use crate::error::{Error, Result};
use crate::l1::l1_weight_unchecked;
use crate::mesh::TimeMesh;
use crate::quadrature::{gauss_integrate, GL8};
use crate::special::{gm, inc_beta, pow_diff};

/// All coefficient entries for one (mesh, alpha) pair. Triangular tables are
/// indexed `c1[n-1][j-1]` for j = 1..n; `c7[n-3][j-2]` for j = 2..n-1.
pub struct CoefficientTable {
    pub alpha: f64,
    pub c1: Vec<Vec<f64>>,
    pub c2: Vec<Vec<f64>>,
    pub c3: Vec<Vec<f64>>,
    pub c4: Vec<f64>,
    pub c7: Vec<Vec<f64>>,
    pub c8: Vec<f64>,
    pub c9: f64,
    pub c10: f64,
    pub c11: f64,
}

/// Pointwise first-moment kernel g_j(t) = int_{I_j} omega_{1-alpha}(t-s)(s - m_j) ds,
/// the exact coefficient of W-hat^j inside the quadratic-reconstruction defect.
///
/// Near the interval (t - t_j < k_j) the closed antiderivative form is
/// well-conditioned; far away it cancels catastrophically, so the integral is
/// evaluated in the symmetrized form
///     int_0^{k_j/2} sigma [ (t-m-sigma)^{-alpha} - (t-m+sigma)^{-alpha} ] dsigma
/// whose bracket is a safe power difference.
pub fn moment_kernel(alpha: f64, tmesh: &TimeMesh, j: usize, t: f64) -> f64 {
    let tjm1 = tmesh.nodes[j - 1];
    let tj = tmesh.nodes[j];
    let kj = tmesh.steps[j - 1];
    debug_assert!(t >= tj);
    if t - tj < kj {
        let g2 = gm(2.0 - alpha);
        let g3 = gm(3.0 - alpha);
        -(kj / (2.0 * g2)) * ((t - tj).powf(1.0 - alpha) + (t - tjm1).powf(1.0 - alpha))
            + pow_diff(t - tjm1, t - tj, 2.0 - alpha) / g3
    } else {
        let m = 0.5 * (tjm1 + tj);
        let g1 = gm(1.0 - alpha);
        gauss_integrate(&GL8, 0.0, 0.5 * kj, |sigma| {
            // (t-m-s)^{-a} - (t-m+s)^{-a} with the gap 2s formed exactly;
            // subtracting the rounded endpoints would lose the whole signal
            // once s << t - m
            let base = t - m - sigma;
            let ratio = 2.0 * sigma / base;
            sigma * (-(base.powf(-alpha)) * ((-alpha) * ratio.ln_1p()).exp_m1())
        }) / g1
    }
}

/// int_{I_n} g_j(t) dt by adaptive Gauss bisection. The integrand is smooth
/// except for a weak (t - t_j)^{1-alpha} endpoint term when n = j + 1.
pub fn c7_entry(alpha: f64, tmesh: &TimeMesh, j: usize, n: usize) -> Result<f64> {
    let a = tmesh.nodes[n - 1];
    let b = tmesh.nodes[n];
    let tj = tmesh.nodes[j];
    let tjm1 = tmesh.nodes[j - 1];
    let kj = tmesh.steps[j - 1];
    // near regime, t - t_j <= 8 k_j: the closed antiderivative loses at most
    // ~(8)^2 ulps to cancellation and absorbs the adjacent-interval endpoint
    // singularity exactly; far regime: the integrand is analytic and a
    // bisected Gauss rule converges. Strongly graded meshes produce intervals
    // straddling both, so split at the regime boundary.
    let cut = b.min(tj + 8.0 * kj);
    let mut total = 0.0;
    if cut > a {
        let g3 = gm(3.0 - alpha);
        let g4 = gm(4.0 - alpha);
        let p1 = kj / (2.0 * g3)
            * (pow_diff(cut - tj, a - tj, 2.0 - alpha)
                + pow_diff(cut - tjm1, a - tjm1, 2.0 - alpha));
        let p2 = (pow_diff(cut - tjm1, cut - tj, 3.0 - alpha)
            - pow_diff(a - tjm1, a - tj, 3.0 - alpha))
            / g4;
        total += p2 - p1;
    }
    if cut < b {
        let lo = cut.max(a);
        let f = |t: f64| moment_kernel(alpha, tmesh, j, t);
        let scale = gauss_integrate(&GL8, lo, b, f).abs().max(1e-300);
        total += adaptive_gauss(&f, lo, b, 1e-12 * scale, 40)
            .ok_or_else(|| Error::QuadratureNonConvergence(format!("C7 entry j={j}, n={n}")))?;
    }
    Ok(total)
}

fn adaptive_gauss<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, abs_tol: f64, depth: usize) -> Option<f64> {
    let whole = gauss_integrate(&GL8, a, b, f);
    let m = 0.5 * (a + b);
    let left = gauss_integrate(&GL8, a, m, f);
    let right = gauss_integrate(&GL8, m, b, f);
    let refined = left + right;
    if (refined - whole).abs() <= abs_tol {
        return Some(refined);
    }
    if depth == 0 {
        return None;
    }
    let l = adaptive_gauss(f, a, m, 0.5 * abs_tol, depth - 1)?;
    let r = adaptive_gauss(f, m, b, 0.5 * abs_tol, depth - 1)?;
    Some(l + r)
}

/// Build every entry for the given mesh. All closed forms use safe power
/// differences so strongly graded meshes keep full precision.
pub fn build_coefficients(tmesh: &TimeMesh, alpha: f64) -> Result<CoefficientTable> {
    if !(0.0 < alpha && alpha < 1.0) {
        return Err(Error::InvalidConfig(format!("alpha out of (0,1): {alpha}")));
    }
    let n_steps = tmesh.n_steps;
    let g3 = gm(3.0 - alpha);
    let g4 = gm(4.0 - alpha);

    let mut c1 = Vec::with_capacity(n_steps);
    let mut c2 = Vec::with_capacity(n_steps);
    let mut c3 = Vec::with_capacity(n_steps);
    let mut c4 = Vec::with_capacity(n_steps);
    for n in 1..=n_steps {
        let tn = tmesh.nodes[n];
        let tn1 = tmesh.nodes[n - 1];
        let kn = tmesh.steps[n - 1];
        let mut row1 = Vec::with_capacity(n);
        let mut row2 = Vec::with_capacity(n);
        let mut row3 = Vec::with_capacity(n);
        for j in 1..n {
            let kj = tmesh.steps[j - 1];
            let a_j = l1_weight_unchecked(alpha, tmesh, j, tn);
            let v1 = kn * a_j / kj;
            // antiderivative of a_j(t): [(t-t_{j-1})^{2-a} - (t-t_j)^{2-a}] / (Gamma(3-a) k_j)
            let upper = pow_diff(tn - tmesh.nodes[j - 1], tn - tmesh.nodes[j], 2.0 - alpha);
            let lower = pow_diff(tn1 - tmesh.nodes[j - 1], tn1 - tmesh.nodes[j], 2.0 - alpha);
            let v2 = (upper - lower) / (g3 * kj);
            row1.push(v1);
            row2.push(v2);
            row3.push(v1 - v2);
        }
        // j = n
        let v1 = kn.powf(1.0 - alpha) / gm(2.0 - alpha);
        let v2 = kn.powf(1.0 - alpha) / g3;
        row1.push(v1);
        row2.push(v2);
        row3.push(v1 - v2);
        c1.push(row1);
        c2.push(row2);
        c3.push(row3);
        c4.push(2.0 * kn / 3.0);
    }

    let mut c7 = Vec::new();
    for n in 3..=n_steps {
        let mut row = Vec::with_capacity(n - 2);
        for j in 2..n {
            row.push(c7_entry(alpha, tmesh, j, n)?);
        }
        c7.push(row);
    }
    let mut c8 = Vec::new();
    for n in 2..=n_steps {
        let kn = tmesh.steps[n - 1];
        c8.push(kn.powf(3.0 - alpha) * (0.5 / g3 + 1.0 / g4));
    }

    let (c9, c10, c11) = if n_steps >= 2 {
        first_interval_coefficients(tmesh, alpha)
    } else {
        (0.0, 0.0, 0.0)
    };

    Ok(CoefficientTable { alpha, c1, c2, c3, c4, c7, c8, c9, c10, c11 })
}

/// C9, C10 by swapping the integration order and reducing to incomplete beta
/// functions; C11 from its closed antiderivative.
fn first_interval_coefficients(tmesh: &TimeMesh, alpha: f64) -> (f64, f64, f64) {
    let t1 = tmesh.nodes[1];
    let k1 = tmesh.steps[0];
    let t_final = tmesh.t_final();
    let g2 = gm(2.0 - alpha);
    let x = t1 / t_final;

    // int_{t1}^{T} int_0^{t1} (t-s)^{-a} s^{a} ds dt
    //   = [T^2 B(x; a+1, 2-a) - t1^2 B(a+1, 2-a)] / (1-a)
    let j1 = t_final * t_final * inc_beta(alpha + 1.0, 2.0 - alpha, x);
    let j2 = t1 * t1 * crate::special::beta_fn(alpha + 1.0, 2.0 - alpha);
    let c9 = (j1 - j2) / (g2 * gm(alpha + 1.0) * k1);

    let j1 = t_final * inc_beta(alpha, 2.0 - alpha, x);
    let j2 = t1 * crate::special::beta_fn(alpha, 2.0 - alpha);
    let c10 = (j1 - j2) / (g2 * gm(alpha));

    // int_{t1}^T [t^{1-a} - (t-t1)^{1-a}] dt / (Gamma(2-a) k1)
    let c11 = (pow_diff(t_final, t_final - t1, 2.0 - alpha) - t1.powf(2.0 - alpha))
        / (gm(3.0 - alpha) * k1);
    (c9, c10, c11)
}

impl CoefficientTable {
    pub fn c1_at(&self, j: usize, n: usize) -> f64 {
        self.c1[n - 1][j - 1]
    }
    pub fn c2_at(&self, j: usize, n: usize) -> f64 {
        self.c2[n - 1][j - 1]
    }
    pub fn c3_at(&self, j: usize, n: usize) -> f64 {
        self.c3[n - 1][j - 1]
    }
    pub fn c4_at(&self, n: usize) -> f64 {
        self.c4[n - 1]
    }
    /// j = 2..n-1, n = 3..N
    pub fn c7_at(&self, j: usize, n: usize) -> f64 {
        self.c7[n - 3][j - 2]
    }
    /// n = 2..N
    pub fn c8_at(&self, n: usize) -> f64 {
        self.c8[n - 2]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::{adaptive_simpson, gauss_jacobi};
    use approx::assert_relative_eq;

    fn meshes() -> Vec<TimeMesh> {
        vec![
            TimeMesh::uniform(1.0, 4).unwrap(),
            TimeMesh::uniform(1.0, 8).unwrap(),
            TimeMesh::graded(1.0, 8, 2.0).unwrap(),
            TimeMesh::graded(1.0, 16, 3.0).unwrap(),
        ]
    }

    #[test]
    fn c3_is_c1_minus_c2_identically() {
        for tm in meshes() {
            for &alpha in &[0.25, 0.5, 0.75] {
                let t = build_coefficients(&tm, alpha).unwrap();
                for n in 1..=tm.n_steps {
                    for j in 1..=n {
                        assert_eq!(t.c3_at(j, n), t.c1_at(j, n) - t.c2_at(j, n));
                    }
                }
            }
        }
    }

    #[test]
    fn c4_closed_form() {
        let tm = TimeMesh::uniform(1.0, 16).unwrap();
        let t = build_coefficients(&tm, 0.5).unwrap();
        for n in 1..=16 {
            assert_relative_eq!(t.c4_at(n), 1.0 / 24.0, max_relative = 1e-12);
        }
        // against the defining integral
        let oracle = adaptive_simpson(|s| 2.0 * (1.0 - s / 0.0625).powi(2), 0.0, 0.0625, 1e-14);
        assert_relative_eq!(t.c4_at(3), oracle, max_relative = 1e-10);
    }

    #[test]
    fn c1_c2_match_defining_integrals() {
        for tm in meshes() {
            for &alpha in &[0.25, 0.5, 0.75] {
                let t = build_coefficients(&tm, alpha).unwrap();
                let n = tm.n_steps;
                for j in [1usize, n / 2, n] {
                    let j = j.max(1);
                    // C1: integrand constant a_j(t_n)/k_j
                    let a_j = crate::l1::l1_coefficient(alpha, &tm, j, tm.nodes[n]).unwrap();
                    let c1_oracle = tm.steps[n - 1] * a_j / tm.steps[j - 1];
                    assert_relative_eq!(t.c1_at(j, n), c1_oracle, max_relative = 1e-12);
                    // C2: adaptive quadrature of a_j(t)/k_j (or the j = n kernel)
                    let c2_oracle = if j < n {
                        adaptive_simpson(
                            |tt| {
                                crate::l1::l1_coefficient(alpha, &tm, j, tt).unwrap()
                                    / tm.steps[j - 1]
                            },
                            tm.nodes[n - 1],
                            tm.nodes[n],
                            1e-14,
                        )
                    } else {
                        adaptive_simpson(
                            |tt| {
                                (tt - tm.nodes[n - 1]).powf(1.0 - alpha)
                                    / (gm(2.0 - alpha) * tm.steps[n - 1])
                            },
                            tm.nodes[n - 1],
                            tm.nodes[n],
                            1e-14,
                        )
                    };
                    assert_relative_eq!(t.c2_at(j, n), c2_oracle, max_relative = 1e-8);
                }
            }
        }
    }

    #[test]
    fn c7_matches_tensor_oracle() {
        // independent route: adaptive Simpson in t of an adaptive Simpson in
        // s, with the outer left endpoint shaved in the adjacent case where
        // the raw inner integrand is endpoint-singular
        for tm in [TimeMesh::uniform(1.0, 8).unwrap(), TimeMesh::graded(1.0, 8, 2.0).unwrap()] {
            for &alpha in &[0.25, 0.5, 0.75] {
                let t = build_coefficients(&tm, alpha).unwrap();
                for (j, n) in [(2usize, 4usize), (3, 5), (2, 3), (6, 8)] {
                    let g1 = gm(1.0 - alpha);
                    let m = 0.5 * (tm.nodes[j] + tm.nodes[j - 1]);
                    let inner = |tt: f64| {
                        adaptive_simpson(
                            |s| (tt - s).powf(-alpha) * (s - m) / g1,
                            tm.nodes[j - 1],
                            tm.nodes[j],
                            1e-15,
                        )
                    };
                    let shave = if n == j + 1 { 1e-9 * tm.steps[n - 1] } else { 0.0 };
                    let oracle = adaptive_simpson(
                        inner,
                        tm.nodes[n - 1] + shave,
                        tm.nodes[n],
                        1e-13,
                    );
                    let tol = if n == j + 1 { 1e-6 } else { 1e-8 };
                    assert_relative_eq!(t.c7_at(j, n), oracle, max_relative = tol);
                }
            }
        }
    }

    #[test]
    fn c8_matches_defining_integral() {
        let tm = TimeMesh::graded(1.0, 8, 2.0).unwrap();
        for &alpha in &[0.25, 0.5, 0.75] {
            let t = build_coefficients(&tm, alpha).unwrap();
            for n in 2..=8 {
                let tn1 = tm.nodes[n - 1];
                let kn = tm.steps[n - 1];
                let oracle = adaptive_simpson(
                    |tt| {
                        kn * (tt - tn1).powf(1.0 - alpha) / (2.0 * gm(2.0 - alpha))
                            + (tt - tn1).powf(2.0 - alpha) / gm(3.0 - alpha)
                    },
                    tn1,
                    tm.nodes[n],
                    1e-14,
                );
                assert_relative_eq!(t.c8_at(n), oracle, max_relative = 1e-10);
            }
        }
    }

    #[test]
    fn c9_c10_match_tensor_jacobi_oracle() {
        // quadrature oracle for the order-swapped defining integral
        //   int_0^{t1} s^power [ (T-s)^{1-a} - (t1-s)^{1-a} ] ds / (1-a)
        // with each piece handled by the exactly matching Gauss-Jacobi rule
        for tm in [TimeMesh::uniform(1.0, 4).unwrap(), TimeMesh::graded(1.0, 8, 2.0).unwrap()] {
            for &alpha in &[0.25f64, 0.5, 0.75] {
                let table = build_coefficients(&tm, alpha).unwrap();
                let t1 = tm.nodes[1];
                let tfin = tm.t_final();
                let g1 = gm(1.0 - alpha);
                for (power, c_val, norm) in [
                    (alpha, table.c9, g1 * gm(alpha + 1.0) * tm.steps[0]),
                    (alpha - 1.0, table.c10, g1 * gm(alpha)),
                ] {
                    // piece 1: weight s^power, smooth factor (T-s)^{1-a}
                    let (nodes, weights) = gauss_jacobi(32, 0.0, power);
                    let scale = (t1 / 2.0).powf(power + 1.0);
                    let mut piece1 = 0.0;
                    for (x, w) in nodes.iter().zip(&weights) {
                        let s = t1 * (1.0 + x) / 2.0;
                        piece1 += w * (tfin - s).powf(1.0 - alpha);
                    }
                    piece1 *= scale;
                    // piece 2: both endpoint weights exact, factor 1
                    let (_, weights2) = gauss_jacobi(32, 1.0 - alpha, power);
                    let scale2 = (t1 / 2.0).powf(power + 1.0 + 1.0 - alpha);
                    let piece2: f64 = weights2.iter().sum::<f64>() * scale2;
                    let oracle = (piece1 - piece2) / ((1.0 - alpha) * norm);
                    assert_relative_eq!(c_val, oracle, max_relative = 1e-10);
                }
                // independent cross-check of the double integral by tensor
                // quadrature, corner-limited accuracy
                let (nodes, weights) = gauss_jacobi(32, 0.0, alpha);
                let scale = (t1 / 2.0).powf(alpha + 1.0);
                let inner = |tt: f64| -> f64 {
                    let mut acc = 0.0;
                    for (x, w) in nodes.iter().zip(&weights) {
                        let s = t1 * (1.0 + x) / 2.0;
                        acc += w * (tt - s).powf(-alpha);
                    }
                    acc * scale
                };
                let tensor = adaptive_simpson(inner, t1, tfin, 1e-12)
                    / (g1 * gm(alpha + 1.0) * tm.steps[0]);
                assert_relative_eq!(table.c9, tensor, max_relative = 1e-4);
            }
        }
    }

    #[test]
    fn c11_matches_defining_integral() {
        for tm in [TimeMesh::uniform(1.0, 8).unwrap(), TimeMesh::graded(1.0, 8, 3.0).unwrap()] {
            for &alpha in &[0.25, 0.5, 0.75] {
                let t = build_coefficients(&tm, alpha).unwrap();
                let t1 = tm.nodes[1];
                let k1 = tm.steps[0];
                let oracle = adaptive_simpson(
                    |tt: f64| (tt.powf(1.0 - alpha) - (tt - t1).powf(1.0 - alpha)) / (gm(2.0 - alpha) * k1),
                    t1,
                    tm.t_final(),
                    1e-13,
                );
                assert_relative_eq!(t.c11, oracle, max_relative = 1e-7);
            }
        }
    }

    #[test]
    fn moment_kernel_regimes_agree() {
        // the closed form (near) and symmetrized quadrature (far) cross over
        // continuously: compare both at the switch point
        let tm = TimeMesh::uniform(1.0, 16).unwrap();
        let alpha = 0.4;
        let j = 3;
        let kj = tm.steps[j - 1];
        for c in [1.0 + 1e-9, 1.5, 2.0, 4.0] {
            let t = tm.nodes[j] + c * kj;
            if t > tm.t_final() {
                continue;
            }
            let g2 = gm(2.0 - alpha);
            let g3 = gm(3.0 - alpha);
            let closed = -(kj / (2.0 * g2))
                * ((t - tm.nodes[j]).powf(1.0 - alpha) + (t - tm.nodes[j - 1]).powf(1.0 - alpha))
                + pow_diff(t - tm.nodes[j - 1], t - tm.nodes[j], 2.0 - alpha) / g3;
            let kernel = moment_kernel(alpha, &tm, j, t);
            assert_relative_eq!(kernel, closed, max_relative = 1e-9);
            assert!(kernel > 0.0);
        }
    }
}
