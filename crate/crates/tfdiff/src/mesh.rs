//! Time and space meshes. Time meshes are graded toward t = 0 by the power
//! rule t_n = T (n/N)^r; the spatial mesh is a fixed uniform partition of (0,1).

use crate::error::{Error, Result};

/// Partition 0 = t_0 < t_1 < ... < t_N = T with per-step sizes and grading exponent.
#[derive(Debug, Clone)]
pub struct TimeMesh {
    pub nodes: Vec<f64>,
    pub steps: Vec<f64>,
    pub grading: f64,
    pub n_steps: usize,
}

impl TimeMesh {
    /// Graded mesh t_n = T (n/N)^r; r = 1 gives the uniform mesh.
    pub fn graded(t_final: f64, n_steps: usize, r: f64) -> Result<Self> {
        if !(t_final > 0.0) {
            return Err(Error::InvalidConfig(format!("T must be positive, got {t_final}")));
        }
        if n_steps < 1 {
            return Err(Error::InvalidConfig("N must be at least 1".into()));
        }
        if !(r >= 1.0) {
            return Err(Error::InvalidConfig(format!("grading exponent must be >= 1, got {r}")));
        }
        let n = n_steps;
        let mut nodes = Vec::with_capacity(n + 1);
        for i in 0..=n {
            nodes.push(t_final * (i as f64 / n as f64).powf(r));
        }
        nodes[n] = t_final; // guard the endpoint against powf rounding
        let steps = nodes.windows(2).map(|w| w[1] - w[0]).collect::<Vec<_>>();
        if steps.iter().any(|&k| !(k > 0.0)) {
            return Err(Error::InvalidConfig("degenerate time step".into()));
        }
        Ok(Self { nodes, steps, grading: r, n_steps: n })
    }

    pub fn uniform(t_final: f64, n_steps: usize) -> Result<Self> {
        Self::graded(t_final, n_steps, 1.0)
    }

    pub fn t_final(&self) -> f64 {
        *self.nodes.last().unwrap()
    }

    /// Index n with t in I_n = (t_{n-1}, t_n]; t = 0 maps to the first interval.
    pub fn interval_of(&self, t: f64) -> Result<usize> {
        let t_final = self.t_final();
        if !(0.0..=t_final).contains(&t) {
            return Err(Error::Domain(format!("t = {t} outside [0, {t_final}]")));
        }
        match self.nodes.binary_search_by(|x| x.partial_cmp(&t).unwrap()) {
            Ok(0) => Ok(1),
            Ok(i) => Ok(i),
            Err(i) => Ok(i), // nodes[i-1] < t < nodes[i]
        }
    }
}

/// Grading exponent r = max{(2 - alpha)/alpha, 1} that restores the optimal
/// L1 rate for solutions with a t^alpha start-up singularity.
pub fn auto_grading(alpha: f64) -> Result<f64> {
    if !(0.0 < alpha && alpha < 1.0) {
        return Err(Error::InvalidConfig(format!("alpha out of (0,1): {alpha}")));
    }
    Ok(((2.0 - alpha) / alpha).max(1.0))
}

/// Uniform partition of (0, 1) into M elements, interior unknowns only.
#[derive(Debug, Clone)]
pub struct SpaceMesh {
    pub coords: Vec<f64>,
    pub n_elems: usize,
    pub h: Vec<f64>,
    pub interior_count: usize,
}

impl SpaceMesh {
    pub fn uniform(m: usize) -> Result<Self> {
        if m < 2 {
            return Err(Error::InvalidConfig(format!("M must be >= 2, got {m}")));
        }
        let coords: Vec<f64> = (0..=m).map(|i| i as f64 / m as f64).collect();
        let h = coords.windows(2).map(|w| w[1] - w[0]).collect();
        Ok(Self { coords, n_elems: m, h, interior_count: m - 1 })
    }

    /// Mean of the two element sizes adjacent to interior node i (1-based node
    /// index i = 1..M-1); the 1D stand-in for the facet size in jump norms.
    pub fn hbar(&self, i: usize) -> f64 {
        0.5 * (self.h[i - 1] + self.h[i])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn graded_closed_forms() {
        let m = TimeMesh::graded(1.0, 4, 1.0).unwrap();
        assert_eq!(m.nodes, vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        let m = TimeMesh::graded(1.0, 4, 2.0).unwrap();
        let expect = [0.0, 1.0 / 16.0, 0.25, 9.0 / 16.0, 1.0];
        for (a, b) in m.nodes.iter().zip(expect.iter()) {
            assert_relative_eq!(a, b, epsilon = 1e-16);
        }
        // auto mode at alpha = 0.5 gives r = 3 and t_1 = 16^{-3}
        let r = auto_grading(0.5).unwrap();
        assert_relative_eq!(r, 3.0);
        let m = TimeMesh::graded(1.0, 16, r).unwrap();
        assert_relative_eq!(m.nodes[1], 16f64.powi(-3), max_relative = 1e-15);
    }

    #[test]
    fn auto_grading_values() {
        assert_relative_eq!(auto_grading(0.25).unwrap(), 7.0);
        assert_relative_eq!(auto_grading(0.75).unwrap(), 5.0 / 3.0, max_relative = 1e-15);
        assert!(auto_grading(1.2).is_err());
        assert!(auto_grading(0.0).is_err());
    }

    #[test]
    fn graded_steps_increase_and_telescope() {
        for &(n, r) in &[(16usize, 2.0), (32, 3.0), (64, 7.0)] {
            let m = TimeMesh::graded(1.0, n, r).unwrap();
            for w in m.steps.windows(2) {
                assert!(w[1] > w[0], "graded steps must increase for r > 1");
            }
            let total: f64 = m.steps.iter().sum();
            assert!((total - 1.0).abs() <= 8.0 * f64::EPSILON);
        }
    }

    #[test]
    fn mesh_rejects_bad_input() {
        assert!(TimeMesh::graded(0.0, 4, 1.0).is_err());
        assert!(TimeMesh::graded(1.0, 0, 1.0).is_err());
        assert!(TimeMesh::graded(1.0, 4, 0.5).is_err());
        assert!(SpaceMesh::uniform(1).is_err());
    }

    #[test]
    fn space_mesh_shapes() {
        let m = SpaceMesh::uniform(2).unwrap();
        assert_eq!(m.coords, vec![0.0, 0.5, 1.0]);
        let m = SpaceMesh::uniform(4).unwrap();
        for h in &m.h {
            assert_relative_eq!(*h, 0.25);
        }
        let m = SpaceMesh::uniform(512).unwrap();
        assert_eq!(m.coords.len(), 513);
        assert_eq!(m.interior_count, 511);
    }

    #[test]
    fn interval_lookup() {
        let m = TimeMesh::uniform(1.0, 4).unwrap();
        assert_eq!(m.interval_of(0.1).unwrap(), 1);
        assert_eq!(m.interval_of(0.25).unwrap(), 1);
        assert_eq!(m.interval_of(0.26).unwrap(), 2);
        assert_eq!(m.interval_of(1.0).unwrap(), 4);
        assert!(m.interval_of(1.5).is_err());
    }
}
