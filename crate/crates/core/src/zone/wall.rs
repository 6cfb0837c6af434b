//! Implicit finite-volume conduction through a layered wall, per m² of wall.
//!
//! Nodes sit at cell centres. The exterior face is driven by a sol-air
//! temperature through the outside film; the interior face couples to the zone
//! air through the inside film. Steady-state heat flow reproduces the series
//! resistance of films and layers exactly.

use super::WallSpec;
use crate::error::{Error, Result};

/// Target cell thickness, m. Every layer gets at least three cells.
const TARGET_CELL: f64 = 0.02;
const MIN_CELLS_PER_LAYER: usize = 3;

#[derive(Debug, Clone)]
pub struct WallSolver {
    /// Node heat capacities, J/(m²·K).
    capacity: Vec<f64>,
    /// Conductance from the sol-air node to node 0, W/(m²·K).
    g_ext: f64,
    /// Conductance from the last node to zone air, W/(m²·K).
    g_int: f64,
    h_in: f64,
    dt: f64,
    // Thomas factorisation of the constant system matrix.
    lower: Vec<f64>,
    inv_pivot: Vec<f64>,
    upper_mod: Vec<f64>,
    /// Node response to a unit zone-air temperature with zero history.
    unit_response: Vec<f64>,
}

impl WallSolver {
    pub fn new(spec: &WallSpec, dt: f64) -> Result<Self> {
        let mut thickness = Vec::new();
        let mut conductivity = Vec::new();
        let mut capacity = Vec::new();
        for layer in &spec.layers {
            let n = ((layer.thickness / TARGET_CELL).ceil() as usize).max(MIN_CELLS_PER_LAYER);
            let dx = layer.thickness / n as f64;
            for _ in 0..n {
                thickness.push(dx);
                conductivity.push(layer.conductivity);
                capacity.push(layer.density * layer.specific_heat * dx);
            }
        }
        let n = thickness.len();
        if n == 0 {
            return Err(Error::Config(format!("wall {} has no layers", spec.name)));
        }
        let half_r = |i: usize| thickness[i] / (2.0 * conductivity[i]);
        let g_ext = 1.0 / (1.0 / spec.h_out + half_r(0));
        let g_int = 1.0 / (half_r(n - 1) + 1.0 / spec.h_in);
        let links: Vec<f64> = (0..n - 1).map(|i| 1.0 / (half_r(i) + half_r(i + 1))).collect();

        let mut diag = vec![0.0; n];
        let mut off = vec![0.0; n.saturating_sub(1)];
        for i in 0..n {
            diag[i] = capacity[i] / dt;
            if i > 0 {
                diag[i] += links[i - 1];
            }
            if i + 1 < n {
                diag[i] += links[i];
                off[i] = -links[i];
            }
        }
        diag[0] += g_ext;
        diag[n - 1] += g_int;

        // Forward elimination of the symmetric tridiagonal matrix.
        let mut inv_pivot = vec![0.0; n];
        let mut lower = vec![0.0; n];
        let mut upper_mod = vec![0.0; n];
        let mut pivot = diag[0];
        inv_pivot[0] = 1.0 / pivot;
        for i in 1..n {
            lower[i] = off[i - 1] * inv_pivot[i - 1];
            upper_mod[i - 1] = off[i - 1];
            pivot = diag[i] - lower[i] * off[i - 1];
            if !(pivot.is_finite() && pivot > 0.0) {
                return Err(Error::Numerical(format!("wall {} matrix is singular", spec.name)));
            }
            inv_pivot[i] = 1.0 / pivot;
        }

        let mut solver = Self {
            capacity,
            g_ext,
            g_int,
            h_in: spec.h_in,
            dt,
            lower,
            inv_pivot,
            upper_mod,
            unit_response: vec![0.0; n],
        };
        let mut rhs = vec![0.0; n];
        rhs[n - 1] = g_int;
        let mut unit = vec![0.0; n];
        solver.solve_in_place(&rhs, &mut unit);
        solver.unit_response = unit;
        Ok(solver)
    }

    pub fn node_count(&self) -> usize {
        self.capacity.len()
    }

    pub fn g_int(&self) -> f64 {
        self.g_int
    }

    pub fn unit_response(&self) -> &[f64] {
        &self.unit_response
    }

    fn solve_in_place(&self, rhs: &[f64], y: &mut [f64]) {
        let n = rhs.len();
        y[0] = rhs[0];
        for i in 1..n {
            y[i] = rhs[i] - self.lower[i] * y[i - 1];
        }
        y[n - 1] *= self.inv_pivot[n - 1];
        for i in (0..n - 1).rev() {
            y[i] = (y[i] - self.upper_mod[i] * y[i + 1]) * self.inv_pivot[i];
        }
    }

    /// Node temperatures at the end of a step with zone air held at 0 °C.
    /// The actual solution is `out + t_zone · unit_response`.
    pub fn solve_zero_zone(&self, old: &[f64], t_sol_air: f64, rhs: &mut Vec<f64>, out: &mut Vec<f64>) -> Result<()> {
        let n = self.node_count();
        rhs.clear();
        rhs.extend(old.iter().zip(&self.capacity).map(|(t, c)| c / self.dt * t));
        rhs[0] += self.g_ext * t_sol_air;
        out.resize(n, 0.0);
        self.solve_in_place(rhs, out);
        if out.iter().any(|v| !v.is_finite()) {
            return Err(Error::Numerical(
                "wall conduction solve produced non-finite temperatures".into(),
            ));
        }
        Ok(())
    }

    /// Interior surface temperature for the given last-node and zone temperatures.
    pub fn surface_temperature(&self, t_last: f64, t_zone: f64) -> f64 {
        t_zone + self.g_int * (t_last - t_zone) / self.h_in
    }
}

#[cfg(test)]
mod tests {
    use super::super::Layer;
    use super::*;

    fn spec() -> WallSpec {
        WallSpec {
            name: "w".into(),
            azimuth: 0.0,
            gross_area: 10.0,
            layers: vec![
                Layer {
                    thickness: 0.015,
                    conductivity: 0.72,
                    density: 1760.0,
                    specific_heat: 840.0,
                },
                Layer {
                    thickness: 0.23,
                    conductivity: 0.81,
                    density: 1920.0,
                    specific_heat: 800.0,
                },
                Layer {
                    thickness: 0.015,
                    conductivity: 0.72,
                    density: 1760.0,
                    specific_heat: 840.0,
                },
            ],
            exterior_absorptance: 0.6,
            h_in: 8.3,
            h_out: 17.0,
        }
    }

    #[test]
    fn layers_get_at_least_three_nodes() {
        let s = WallSolver::new(&spec(), 600.0).unwrap();
        assert_eq!(s.node_count(), 3 + 12 + 3);
    }

    #[test]
    fn steady_state_flux_matches_series_resistance() {
        let sp = spec();
        let s = WallSolver::new(&sp, 600.0).unwrap();
        let n = s.node_count();
        let mut nodes = vec![20.0; n];
        let (mut rhs, mut out) = (Vec::new(), Vec::new());
        let t_zone = 26.0;
        for _ in 0..20_000 {
            s.solve_zero_zone(&nodes, 36.0, &mut rhs, &mut out).unwrap();
            for i in 0..n {
                nodes[i] = out[i] + t_zone * s.unit_response()[i];
            }
        }
        let flux = s.g_int() * (nodes[n - 1] - t_zone);
        let expected = sp.u_value() * 10.0;
        assert!((flux - expected).abs() < 1e-6 * expected, "{flux} vs {expected}");
    }
}
