//! Problem data: fractional order, diffusion coefficient, source, initial
//! datum and (for manufactured runs) the exact solution and its Caputo
//! derivative in closed form.

use crate::error::Error;
use std::f64::consts::PI;
use std::sync::Arc;

pub type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
pub type SpaceTimeFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// Diffusion coefficient A(x) with an optional closed-form derivative.
/// When the derivative is absent it is approximated by central differences
/// (only the elementwise residual indicators need it).
#[derive(Clone)]
pub struct Coefficient {
    value: ScalarFn,
    derivative: Option<ScalarFn>,
}

impl Coefficient {
    pub fn new(value: ScalarFn, derivative: Option<ScalarFn>) -> Self {
        Self { value, derivative }
    }

    pub fn constant(c: f64) -> Self {
        Self {
            value: Arc::new(move |_| c),
            derivative: Some(Arc::new(|_| 0.0)),
        }
    }

    pub fn at(&self, x: f64) -> f64 {
        (self.value)(x)
    }

    pub fn deriv_at(&self, x: f64) -> f64 {
        match &self.derivative {
            Some(d) => d(x),
            None => {
                let h = 1e-6 * (1.0 + x.abs());
                ((self.value)(x + h) - (self.value)(x - h)) / (2.0 * h)
            }
        }
    }
}

/// The model problem on Omega = (0,1) with homogeneous Dirichlet conditions.
#[derive(Clone)]
pub struct ProblemSpec {
    pub alpha: f64,
    pub t_final: f64,
    pub diffusion: Coefficient,
    pub source: SpaceTimeFn,
    pub initial: ScalarFn,
    pub exact: Option<SpaceTimeFn>,
    /// Closed-form Caputo derivative of the exact solution, when available.
    /// Manufactured examples provide it; it feeds the sharp time-mismatch
    /// estimator next to the coefficient-table bound.
    pub caputo_exact: Option<SpaceTimeFn>,
    pub theta: f64,
}

impl ProblemSpec {
    /// Example with smooth exact solution u = (1 + t^2) x(1-x).
    pub fn example_smooth(alpha: f64) -> Self {
        let g3 = crate::special::gm(3.0) / crate::special::gm(3.0 - alpha);
        Self {
            alpha,
            t_final: 1.0,
            diffusion: Coefficient::constant(1.0),
            source: Arc::new(move |x, t| {
                g3 * t.powf(2.0 - alpha) * x * (1.0 - x) + 2.0 * (1.0 + t * t)
            }),
            initial: Arc::new(|x| x * (1.0 - x)),
            exact: Some(Arc::new(|x, t| (1.0 + t * t) * x * (1.0 - x))),
            caputo_exact: Some(Arc::new(move |x, t| g3 * t.powf(2.0 - alpha) * x * (1.0 - x))),
            theta: PI / 4.0,
        }
    }

    /// Example with nonsmooth exact solution u = (1 + t^alpha) x(1-x).
    /// The source follows from the Caputo derivative of t^alpha being the
    /// constant Gamma(alpha + 1).
    pub fn example_nonsmooth(alpha: f64) -> Self {
        let ga1 = crate::special::gm(alpha + 1.0);
        Self {
            alpha,
            t_final: 1.0,
            diffusion: Coefficient::constant(1.0),
            source: Arc::new(move |x, t| {
                ga1 * x * (1.0 - x) + 2.0 * (1.0 + t.powf(alpha))
            }),
            initial: Arc::new(|x| x * (1.0 - x)),
            exact: Some(Arc::new(move |x, t| (1.0 + t.powf(alpha)) * x * (1.0 - x))),
            caputo_exact: Some(Arc::new(move |x, _t| ga1 * x * (1.0 - x))),
            theta: PI / 4.0,
        }
    }

    /// Basic range checks plus the sampled coercivity witness; returns every
    /// violation rather than stopping at the first.
    pub fn check(&self) -> Vec<Error> {
        let mut violations = Vec::new();
        if !(0.0 < self.alpha && self.alpha < 1.0) {
            violations.push(Error::Violation(
                "alpha".into(),
                self.alpha,
                "alpha out of (0,1)".into(),
            ));
        }
        if !(self.t_final > 0.0) {
            violations.push(Error::Violation("T".into(), self.t_final, "T must be positive".into()));
        }
        if !(0.0 < self.theta && self.theta < PI / 2.0) {
            violations.push(Error::Violation(
                "theta".into(),
                self.theta,
                "theta out of (0, pi/2)".into(),
            ));
        }
        let mut eta_min = f64::INFINITY;
        let mut x_min = 0.0;
        for i in 0..=256 {
            let x = i as f64 / 256.0;
            let a = self.diffusion.at(x);
            if a < eta_min {
                eta_min = a;
                x_min = x;
            }
        }
        if !(eta_min > 0.0) {
            violations.push(Error::Coercivity { x: x_min, value: eta_min });
        }
        for x in [0.0, 1.0] {
            let u0 = (self.initial)(x);
            if u0.abs() > 1e-12 {
                violations.push(Error::Violation(
                    format!("u0({x})"),
                    u0,
                    "initial datum must vanish on the boundary".into(),
                ));
            }
        }
        violations
    }

    /// Minimum and maximum of A over a sample grid: the (eta, beta) pair used
    /// in the bound assemblies.
    pub fn diffusion_range(&self) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..=256 {
            let a = self.diffusion.at(i as f64 / 256.0);
            lo = lo.min(a);
            hi = hi.max(a);
        }
        (lo, hi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smooth_example_is_consistent() {
        let p = ProblemSpec::example_smooth(0.5);
        assert!(p.check().is_empty());
        // f = caputo(u) + A u at a few sample points (A u = -u_xx = 2(1+t^2))
        let f = &p.source;
        let ca = p.caputo_exact.as_ref().unwrap();
        for &(x, t) in &[(0.3, 0.7), (0.5, 1.0), (0.9, 0.2)] {
            let lhs = f(x, t);
            let rhs = ca(x, t) + 2.0 * (1.0 + t * t);
            assert!((lhs - rhs).abs() < 1e-12);
        }
    }

    #[test]
    fn violations_are_reported() {
        let mut p = ProblemSpec::example_smooth(0.5);
        p.alpha = 1.2;
        let v = p.check();
        assert!(v.iter().any(|e| e.to_string().contains("alpha out of (0,1)")));

        let mut p = ProblemSpec::example_smooth(0.5);
        p.diffusion = Coefficient::constant(-1.0);
        let v = p.check();
        assert!(v.iter().any(|e| matches!(e, Error::Coercivity { .. })));

        let mut p = ProblemSpec::example_smooth(0.5);
        p.initial = Arc::new(|x| x); // x does not vanish at 1
        let v = p.check();
        assert_eq!(v.len(), 1);
    }

    #[test]
    fn boundary_compatible_initial_passes() {
        let p = ProblemSpec::example_smooth(0.25);
        assert!(p.check().is_empty());
    }
}
