//! P1 finite elements on the 1D mesh: tridiagonal mass/stiffness assembly,
//! L2 projection, the discrete elliptic operator, flux jumps and the
//! elliptic-reconstruction error indicators.

use crate::error::{Error, Result};
use crate::mesh::SpaceMesh;
use crate::problem::Coefficient;
use crate::quadrature::{gauss_integrate, GL3, GL5};

/// Interior nodal coefficients (length M-1); boundary values are implicitly zero.
pub type FemVec = Vec<f64>;

pub fn vec_sub(a: &[f64], b: &[f64]) -> FemVec {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn vec_scale(a: &[f64], c: f64) -> FemVec {
    a.iter().map(|x| c * x).collect()
}

pub fn vec_axpy(y: &mut [f64], c: f64, x: &[f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += c * xi;
    }
}

/// Symmetric tridiagonal matrix over the interior degrees of freedom.
#[derive(Debug, Clone)]
pub struct Tridiag {
    pub lower: Vec<f64>,
    pub diag: Vec<f64>,
    pub upper: Vec<f64>,
}

impl Tridiag {
    pub fn zeros(n: usize) -> Self {
        Self { lower: vec![0.0; n.saturating_sub(1)], diag: vec![0.0; n], upper: vec![0.0; n.saturating_sub(1)] }
    }

    pub fn n(&self) -> usize {
        self.diag.len()
    }

    pub fn mul(&self, v: &[f64]) -> FemVec {
        let n = self.n();
        let mut r = vec![0.0; n];
        for i in 0..n {
            let mut acc = self.diag[i] * v[i];
            if i > 0 {
                acc += self.lower[i - 1] * v[i - 1];
            }
            if i + 1 < n {
                acc += self.upper[i] * v[i + 1];
            }
            r[i] = acc;
        }
        r
    }

    /// a + c*b, entrywise.
    pub fn add_scaled(&self, c: f64, other: &Tridiag) -> Tridiag {
        Tridiag {
            lower: self.lower.iter().zip(&other.lower).map(|(x, y)| x + c * y).collect(),
            diag: self.diag.iter().zip(&other.diag).map(|(x, y)| x + c * y).collect(),
            upper: self.upper.iter().zip(&other.upper).map(|(x, y)| x + c * y).collect(),
        }
    }

    /// LDL^T factorization; fails on a nonpositive pivot.
    pub fn factor(&self) -> Result<TridiagFactor> {
        let n = self.n();
        let mut d = vec![0.0; n];
        let mut l = vec![0.0; n.saturating_sub(1)];
        for i in 0..n {
            let mut di = self.diag[i];
            if i > 0 {
                di -= l[i - 1] * l[i - 1] * d[i - 1];
            }
            if !(di > 0.0) {
                return Err(Error::SingularSystem { row: i, pivot: di });
            }
            d[i] = di;
            if i + 1 < n {
                l[i] = self.lower[i] / di;
            }
        }
        Ok(TridiagFactor { d, l })
    }
}

/// LDL^T factors of an SPD tridiagonal matrix.
#[derive(Debug, Clone)]
pub struct TridiagFactor {
    d: Vec<f64>,
    l: Vec<f64>,
}

impl TridiagFactor {
    pub fn solve(&self, rhs: &[f64]) -> FemVec {
        let n = self.d.len();
        let mut x = rhs.to_vec();
        for i in 1..n {
            x[i] -= self.l[i - 1] * x[i - 1];
        }
        for i in 0..n {
            x[i] /= self.d[i];
        }
        for i in (0..n.saturating_sub(1)).rev() {
            x[i] -= self.l[i] * x[i + 1];
        }
        x
    }
}

/// Direct solve of an SPD tridiagonal system; the factorization residual is
/// the caller's responsibility to check when it matters.
pub fn solve_tridiag_spd(a: &Tridiag, rhs: &[f64]) -> Result<FemVec> {
    Ok(a.factor()?.solve(rhs))
}

/// Exact P1 mass matrix.
pub fn assemble_mass(mesh: &SpaceMesh) -> Tridiag {
    let n = mesh.interior_count;
    let mut m = Tridiag::zeros(n);
    for i in 1..=n {
        m.diag[i - 1] = (mesh.h[i - 1] + mesh.h[i]) / 3.0;
        if i < n {
            m.upper[i - 1] = mesh.h[i] / 6.0;
            m.lower[i - 1] = mesh.h[i] / 6.0;
        }
    }
    m
}

/// Stiffness matrix for the bilinear form <A grad u, grad v>, 3-point Gauss
/// per element (exact for constant and linear A).
pub fn assemble_stiffness(mesh: &SpaceMesh, a: &Coefficient) -> Result<Tridiag> {
    let n = mesh.interior_count;
    let mut k = Tridiag::zeros(n);
    for e in 0..mesh.n_elems {
        let x0 = mesh.coords[e];
        let x1 = mesh.coords[e + 1];
        let he = mesh.h[e];
        let mut int_a = 0.0;
        let mid = 0.5 * (x0 + x1);
        let half = 0.5 * he;
        for (xq, wq) in GL3.0.iter().zip(GL3.1.iter()) {
            let x = mid + half * xq;
            let av = a.at(x);
            if !(av > 0.0) {
                return Err(Error::Coercivity { x, value: av });
            }
            int_a += wq * av * half;
        }
        let w = int_a / (he * he);
        // local [[w, -w], [-w, w]] on nodes (e, e+1); boundary rows dropped
        if e >= 1 {
            k.diag[e - 1] += w;
        }
        if e < n {
            k.diag[e] += w;
        }
        if e >= 1 && e < n {
            k.upper[e - 1] -= w;
            k.lower[e - 1] -= w;
        }
    }
    Ok(k)
}

/// Load vector b_i = int g(x) phi_i(x) dx with 5-point Gauss per element.
pub fn load_vector<F: Fn(f64) -> f64>(mesh: &SpaceMesh, g: F) -> FemVec {
    let n = mesh.interior_count;
    let mut b = vec![0.0; n];
    for e in 0..mesh.n_elems {
        let x0 = mesh.coords[e];
        let x1 = mesh.coords[e + 1];
        let he = mesh.h[e];
        let mid = 0.5 * (x0 + x1);
        let half = 0.5 * he;
        for (xq, wq) in GL5.0.iter().zip(GL5.1.iter()) {
            let x = mid + half * xq;
            let gv = g(x) * wq * half;
            if e >= 1 {
                b[e - 1] += gv * (x1 - x) / he;
            }
            if e < n {
                b[e] += gv * (x - x0) / he;
            }
        }
    }
    b
}

/// Everything the estimators need about one spatial discretization, bundled
/// so matrices and factorizations are assembled once.
pub struct FemSpace {
    pub mesh: SpaceMesh,
    pub mass: Tridiag,
    pub mass_factor: TridiagFactor,
    pub stiffness: Tridiag,
    /// Stiffness with A = 1 (the H1 seminorm matrix).
    pub stiffness_unit: Tridiag,
    pub diffusion: Coefficient,
}

impl FemSpace {
    pub fn build(mesh: SpaceMesh, diffusion: Coefficient) -> Result<Self> {
        let mass = assemble_mass(&mesh);
        let mass_factor = mass.factor()?;
        let stiffness = assemble_stiffness(&mesh, &diffusion)?;
        let stiffness_unit = assemble_stiffness(&mesh, &Coefficient::constant(1.0))?;
        Ok(Self { mesh, mass, mass_factor, stiffness, stiffness_unit, diffusion })
    }

    pub fn l2_norm(&self, v: &[f64]) -> f64 {
        dot(v, &self.mass.mul(v)).max(0.0).sqrt()
    }

    pub fn h1_seminorm(&self, v: &[f64]) -> f64 {
        dot(v, &self.stiffness_unit.mul(v)).max(0.0).sqrt()
    }

    pub fn h1_norm(&self, v: &[f64]) -> f64 {
        (dot(v, &self.mass.mul(v)) + dot(v, &self.stiffness_unit.mul(v))).max(0.0).sqrt()
    }

    /// Energy inner product a(u, v) through the assembled stiffness.
    pub fn a_form(&self, u: &[f64], v: &[f64]) -> f64 {
        dot(u, &self.stiffness.mul(v))
    }

    /// L2 projection onto the interior P1 space.
    pub fn l2_project<F: Fn(f64) -> f64>(&self, g: F) -> FemVec {
        self.mass_factor.solve(&load_vector(&self.mesh, g))
    }

    /// Nodal interpolant at the interior nodes.
    pub fn interpolate<F: Fn(f64) -> f64>(&self, g: F) -> FemVec {
        (1..self.mesh.n_elems).map(|i| g(self.mesh.coords[i])).collect()
    }

    /// Coefficient representation of the discrete elliptic operator:
    /// w solves M w = K v.
    pub fn elliptic_apply(&self, v: &[f64]) -> FemVec {
        self.mass_factor.solve(&self.stiffness.mul(v))
    }

    /// Flux jumps J_A[v] at the interior nodes: A(x_i) times the slope jump.
    pub fn flux_jumps(&self, v: &[f64]) -> Vec<f64> {
        let n = self.mesh.interior_count;
        let slope = |e: usize| -> f64 {
            let left = if e == 0 { 0.0 } else { v[e - 1] };
            let right = if e == self.mesh.n_elems - 1 { 0.0 } else { v[e] };
            (right - left) / self.mesh.h[e]
        };
        (1..=n)
            .map(|i| self.diffusion.at(self.mesh.coords[i]) * (slope(i) - slope(i - 1)))
            .collect()
    }

    /// Elementwise elliptic residual of a P1 function against a given discrete
    /// image w (usually w = A_h v): per-element L2 norms of
    /// (A_el v)(x) - w_h(x) with A_el v = -A'(x) v' on each element.
    fn element_residual_sq(&self, v: &[f64], w: &[f64], h_power: f64) -> f64 {
        let nodal = |vals: &[f64], i: usize| -> f64 {
            if i == 0 || i == self.mesh.n_elems {
                0.0
            } else {
                vals[i - 1]
            }
        };
        let mut acc = 0.0;
        for e in 0..self.mesh.n_elems {
            let x0 = self.mesh.coords[e];
            let x1 = self.mesh.coords[e + 1];
            let he = self.mesh.h[e];
            let vl = nodal(v, e);
            let vr = nodal(v, e + 1);
            let slope = (vr - vl) / he;
            let wl = nodal(w, e);
            let wr = nodal(w, e + 1);
            let elem = gauss_integrate(&GL3, x0, x1, |x| {
                let wh = wl + (wr - wl) * (x - x0) / he;
                let ael = -self.diffusion.deriv_at(x) * slope;
                let d = ael - wh;
                d * d
            });
            acc += he.powf(h_power) * elem;
        }
        acc
    }

    /// L2-scaled reconstruction indicator
    /// E_e0(v) = ||h^2 (A_el - A_h) v|| + ||J_A[v] h^{3/2}||_Sigma.
    pub fn indicator_ee0(&self, v: &[f64]) -> f64 {
        let w = self.elliptic_apply(v);
        self.indicator_ee0_with(v, &w)
    }

    /// Same, with a precomputed discrete image w = A_h v.
    pub fn indicator_ee0_with(&self, v: &[f64], w: &[f64]) -> f64 {
        let elem = self.element_residual_sq(v, w, 4.0).sqrt();
        let jumps = self.flux_jumps(v);
        let jump: f64 = jumps
            .iter()
            .enumerate()
            .map(|(idx, j)| {
                let hb = self.mesh.hbar(idx + 1);
                (j * hb.powf(1.5)).powi(2)
            })
            .sum::<f64>()
            .sqrt();
        elem + jump
    }

    /// H1-scaled reconstruction indicator
    /// E_e1(v) = ||h (A_el - A_h) v|| + ||J_A[v] h^{1/2}||_Sigma.
    pub fn indicator_ee1(&self, v: &[f64]) -> f64 {
        let w = self.elliptic_apply(v);
        let elem = self.element_residual_sq(v, &w, 2.0).sqrt();
        let jumps = self.flux_jumps(v);
        let jump: f64 = jumps
            .iter()
            .enumerate()
            .map(|(idx, j)| {
                let hb = self.mesh.hbar(idx + 1);
                (j * hb.sqrt()).powi(2)
            })
            .sum::<f64>()
            .sqrt();
        elem + jump
    }

    /// Unweighted residual split standing in for ||(A - A_h^n) v||: the
    /// elementwise residual plus the jump contribution scaled by hbar^{-1/2}.
    pub fn residual_split(&self, v: &[f64], w: &[f64]) -> f64 {
        let elem = self.element_residual_sq(v, w, 0.0).sqrt();
        let jumps = self.flux_jumps(v);
        let jump: f64 = jumps
            .iter()
            .enumerate()
            .map(|(idx, j)| {
                let hb = self.mesh.hbar(idx + 1);
                j * j / hb
            })
            .sum::<f64>()
            .sqrt();
        elem + jump
    }

    /// || g - v_h ||_{L2(0,1)} with 5-point Gauss per element.
    pub fn l2_distance<F: Fn(f64) -> f64>(&self, g: F, v: &[f64]) -> f64 {
        let nodal = |i: usize| -> f64 {
            if i == 0 || i == self.mesh.n_elems {
                0.0
            } else {
                v[i - 1]
            }
        };
        let mut acc = 0.0;
        for e in 0..self.mesh.n_elems {
            let x0 = self.mesh.coords[e];
            let x1 = self.mesh.coords[e + 1];
            let he = self.mesh.h[e];
            let vl = nodal(e);
            let vr = nodal(e + 1);
            acc += gauss_integrate(&GL5, x0, x1, |x| {
                let vh = vl + (vr - vl) * (x - x0) / he;
                let d = g(x) - vh;
                d * d
            });
        }
        acc.max(0.0).sqrt()
    }

    /// || g ||_{L2(0,1)} by the same rule, for data terms with no FE part.
    pub fn l2_of<F: Fn(f64) -> f64>(&self, g: F) -> f64 {
        self.l2_distance(g, &vec![0.0; self.mesh.interior_count])
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
