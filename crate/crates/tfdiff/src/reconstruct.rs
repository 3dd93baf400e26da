//! Time reconstructions of the discrete solution: the second-difference
//! correction W-hat feeding the quadratic reconstruction, and the
//! first-interval fractional-integral data bundle.

use crate::error::{Error, Result};
use crate::fem::{vec_axpy, vec_scale, vec_sub, FemSpace, FemVec};
use crate::l1::Trajectory;
use crate::mesh::TimeMesh;

/// Per-step reconstruction data: W-hat^n for 2 <= n <= N plus the
/// first-interval bundle feeding the fractional-integral reconstruction.
pub struct ReconPack {
    /// w_hat[n - 2] = 2 (dU^n - dU^{n-1}) / (k_n + k_{n-1}), n = 2..N.
    pub w_hat: Vec<FemVec>,
    /// U^1 - U^0.
    pub d1: FemVec,
    /// f_h^0 - A_h^0 U^0.
    pub g0: FemVec,
    /// f_h^1 - f_h^0 - A_h (U^1 - U^0).
    pub g1: FemVec,
    /// Companion reconstruction indicators of the bundle arguments.
    pub ee0_d1: f64,
    pub ee0_u0: f64,
}

/// Second divided difference W-hat^n = 2 (dU^n - dU^{n-1}) / (k_n + k_{n-1}).
pub fn hat_w(traj: &Trajectory, tmesh: &TimeMesh, n: usize) -> Result<FemVec> {
    if n < 2 || n > tmesh.n_steps {
        return Err(Error::Domain(format!("hat_w needs 2 <= n <= N, got {n}")));
    }
    let kn = tmesh.steps[n - 1];
    let knm1 = tmesh.steps[n - 2];
    let mut d_n = vec_sub(&traj.u[n], &traj.u[n - 1]);
    let dim = d_n.len();
    for i in 0..dim {
        d_n[i] = d_n[i] / kn - (traj.u[n - 1][i] - traj.u[n - 2][i]) / knm1;
    }
    Ok(vec_scale(&d_n, 2.0 / (kn + knm1)))
}

/// Build the full reconstruction pack for a completed trajectory.
pub fn build_pack(traj: &Trajectory, tmesh: &TimeMesh, space: &FemSpace) -> Result<ReconPack> {
    let n_steps = tmesh.n_steps;
    let mut w_hat = Vec::with_capacity(n_steps.saturating_sub(1));
    for n in 2..=n_steps {
        w_hat.push(hat_w(traj, tmesh, n)?);
    }
    let (d1, g0, g1, ee0_d1, ee0_u0) = first_interval_terms(traj, space);
    Ok(ReconPack { w_hat, d1, g0, g1, ee0_d1, ee0_u0 })
}

/// First-interval fields of the fractional-integral reconstruction, with the
/// elliptic-reconstruction symbols replaced by their discrete counterparts.
pub fn first_interval_terms(traj: &Trajectory, space: &FemSpace) -> (FemVec, FemVec, FemVec, f64, f64) {
    let d1 = vec_sub(&traj.u[1], &traj.u[0]);
    let g0 = vec_sub(&traj.fh[0], &traj.ah_u[0]);
    let mut g1 = vec_sub(&traj.fh[1], &traj.fh[0]);
    let ah_d1 = space.elliptic_apply(&d1);
    vec_axpy(&mut g1, -1.0, &ah_d1);
    let ee0_d1 = space.indicator_ee0_with(&d1, &ah_d1);
    let ee0_u0 = space.indicator_ee0_with(&traj.u[0], &traj.ah_u[0]);
    (d1, g0, g1, ee0_d1, ee0_u0)
}

impl ReconPack {
    pub fn w_hat_at(&self, n: usize) -> &FemVec {
        &self.w_hat[n - 2]
    }

    /// Quadratic reconstruction U_h(t) + (t - t_{n-1})(t - t_n)/2 * W-hat^n
    /// on I_n for n >= 2.
    pub fn eval_u_hat(&self, traj: &Trajectory, tmesh: &TimeMesh, t: f64) -> Result<FemVec> {
        let n = tmesh.interval_of(t)?;
        if n < 2 {
            return Err(Error::Domain(
                "the quadratic reconstruction lives on (t_1, T]; use the first-interval form".into(),
            ));
        }
        let mut v = traj.eval_u_h(tmesh, t)?;
        let factor = 0.5 * (t - tmesh.nodes[n - 1]) * (t - tmesh.nodes[n]);
        vec_axpy(&mut v, factor, self.w_hat_at(n));
        Ok(v)
    }
}
