//! Kamada-Kawai spring embedding.
//!
//! Energy `E = Σ_{i<j} k_ij (‖x_i − x_j‖ − L·d_ij)²` with `k_ij = K / d_ij²`
//! and `d_ij` the hop distance. Each step picks the vertex with the largest
//! gradient and moves it by Newton steps while the others stay fixed. Steps
//! are accepted only when they lower the energy, so the energy never rises.

use nalgebra::DMatrix;

use super::{shortest_path_lengths, LayoutError, WeightedGraph};

#[derive(Debug, Clone, PartialEq)]
pub struct KamadaKawaiConfig {
    /// `K` in `k_ij = K / d_ij²`.
    pub spring_constant: f64,
    /// Desired length `L` of a single hop.
    pub edge_length: f64,
    /// Stop moving a vertex once its gradient norm is below this.
    pub tolerance: f64,
    /// Vertex selections are capped at `max_passes × n`.
    pub max_passes: usize,
    /// Newton steps allowed per selected vertex.
    pub max_newton_steps: usize,
    /// Lay out components separately and pack them on a grid; when false a
    /// disconnected graph is an error.
    pub pack_components: bool,
}

impl Default for KamadaKawaiConfig {
    fn default() -> Self {
        Self {
            spring_constant: 1.0,
            edge_length: 1.0,
            tolerance: 1e-4,
            max_passes: 500,
            max_newton_steps: 50,
            pack_components: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LayoutResult {
    pub positions: Vec<[f64; 2]>,
    pub initial_energy: f64,
    pub final_energy: f64,
    /// Vertex selections performed across all components.
    pub iterations: usize,
    /// Whether every component reached the gradient tolerance.
    pub converged: bool,
}

/// Spring energy of `positions` for graph distances `d` (infinite distances
/// are skipped).
pub fn spring_energy(positions: &[[f64; 2]], d: &DMatrix<f64>, cfg: &KamadaKawaiConfig) -> f64 {
    let n = positions.len();
    let mut e = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            let dij = d[(i, j)];
            if !dij.is_finite() || dij == 0.0 {
                continue;
            }
            let k = cfg.spring_constant / (dij * dij);
            let len = dist(positions[i], positions[j]);
            e += k * (len - cfg.edge_length * dij).powi(2);
        }
    }
    e
}

fn dist(a: [f64; 2], b: [f64; 2]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
}

/// Per-component solver state over local indices.
struct Springs {
    strength: DMatrix<f64>,
    length: DMatrix<f64>,
}

impl Springs {
    fn vertex_energy(&self, pos: &[[f64; 2]], m: usize, at: [f64; 2]) -> f64 {
        (0..pos.len())
            .filter(|&i| i != m)
            .map(|i| self.strength[(m, i)] * (dist(at, pos[i]) - self.length[(m, i)]).powi(2))
            .sum()
    }

    fn gradient(&self, pos: &[[f64; 2]], m: usize) -> [f64; 2] {
        let mut g = [0.0; 2];
        for i in 0..pos.len() {
            if i == m {
                continue;
            }
            let dx = pos[m][0] - pos[i][0];
            let dy = pos[m][1] - pos[i][1];
            let r = (dx * dx + dy * dy).sqrt();
            if r < 1e-12 {
                continue;
            }
            let f = 2.0 * self.strength[(m, i)] * (1.0 - self.length[(m, i)] / r);
            g[0] += f * dx;
            g[1] += f * dy;
        }
        g
    }

    fn hessian(&self, pos: &[[f64; 2]], m: usize) -> [[f64; 2]; 2] {
        let mut h = [[0.0; 2]; 2];
        for i in 0..pos.len() {
            if i == m {
                continue;
            }
            let dx = pos[m][0] - pos[i][0];
            let dy = pos[m][1] - pos[i][1];
            let r2 = dx * dx + dy * dy;
            if r2 < 1e-24 {
                continue;
            }
            let r3 = r2 * r2.sqrt();
            let k = 2.0 * self.strength[(m, i)];
            let l = self.length[(m, i)];
            h[0][0] += k * (1.0 - l * dy * dy / r3);
            h[1][1] += k * (1.0 - l * dx * dx / r3);
            h[0][1] += k * l * dx * dy / r3;
        }
        h[1][0] = h[0][1];
        h
    }

    /// Step direction: Newton when it is a descent direction, otherwise the
    /// negative gradient scaled by the largest possible curvature.
    fn direction(&self, pos: &[[f64; 2]], m: usize, g: [f64; 2]) -> [f64; 2] {
        let h = self.hessian(pos, m);
        let det = h[0][0] * h[1][1] - h[0][1] * h[1][0];
        if det.abs() > 1e-300 {
            let p = [-(h[1][1] * g[0] - h[0][1] * g[1]) / det, -(h[0][0] * g[1] - h[1][0] * g[0]) / det];
            if p[0] * g[0] + p[1] * g[1] < 0.0 {
                return p;
            }
        }
        let curvature: f64 = (0..pos.len()).filter(|&i| i != m).map(|i| 2.0 * self.strength[(m, i)]).sum();
        [-g[0] / curvature, -g[1] / curvature]
    }
}

struct ComponentRun {
    positions: Vec<[f64; 2]>,
    iterations: usize,
    converged: bool,
}

fn layout_component(hops: &DMatrix<f64>, cfg: &KamadaKawaiConfig) -> ComponentRun {
    let n = hops.nrows();
    let mut pos = circle(hops, cfg);
    let springs = Springs {
        strength: DMatrix::from_fn(n, n, |i, j| if i == j { 0.0 } else { cfg.spring_constant / (hops[(i, j)] * hops[(i, j)]) }),
        length: hops * cfg.edge_length,
    };

    let norm = |g: [f64; 2]| (g[0] * g[0] + g[1] * g[1]).sqrt();
    let mut stuck = vec![false; n];
    let mut iterations = 0;
    let mut converged = false;
    while iterations < cfg.max_passes * n {
        let grads: Vec<f64> = (0..n).map(|m| if stuck[m] { 0.0 } else { norm(springs.gradient(&pos, m)) }).collect();
        let (m, worst) = grads.iter().copied().enumerate().fold((0, f64::NEG_INFINITY), |acc, (i, g)| if g > acc.1 { (i, g) } else { acc });
        if worst < cfg.tolerance {
            converged = stuck.iter().all(|s| !s);
            break;
        }
        iterations += 1;
        for _ in 0..cfg.max_newton_steps {
            let g = springs.gradient(&pos, m);
            if norm(g) < cfg.tolerance {
                break;
            }
            let p = springs.direction(&pos, m, g);
            let before = springs.vertex_energy(&pos, m, pos[m]);
            let mut t = 1.0;
            let mut accepted = false;
            for _ in 0..60 {
                let trial = [pos[m][0] + t * p[0], pos[m][1] + t * p[1]];
                if springs.vertex_energy(&pos, m, trial) < before {
                    pos[m] = trial;
                    accepted = true;
                    break;
                }
                t *= 0.5;
            }
            if !accepted {
                // no descent left at floating-point resolution
                stuck[m] = true;
                break;
            }
        }
        if stuck[m] {
            continue;
        }
        // any movement can free previously stuck vertices
        stuck.iter_mut().for_each(|s| *s = false);
    }
    ComponentRun { positions: pos, iterations, converged }
}

/// Spring layout of `g` in the plane.
pub fn kamada_kawai(g: &WeightedGraph, cfg: &KamadaKawaiConfig) -> Result<LayoutResult, LayoutError> {
    let n = g.node_count();
    if n < 2 {
        return Err(LayoutError::TooFewNodes(n));
    }
    if !(cfg.spring_constant > 0.0 && cfg.edge_length > 0.0 && cfg.tolerance > 0.0) || cfg.max_passes == 0 {
        return Err(LayoutError::InvalidConfig("K, L and tolerance must be positive, passes at least 1".into()));
    }
    let hops = shortest_path_lengths(g);
    let components = g.components();
    if components.len() > 1 && !cfg.pack_components {
        return Err(LayoutError::DisconnectedGraph { components: components.len() });
    }

    let mut positions = vec![[0.0; 2]; n];
    let mut iterations = 0;
    let mut converged = true;
    let mut placed: Vec<(Vec<usize>, [f64; 2], [f64; 2])> = Vec::with_capacity(components.len());
    for comp in &components {
        let local: Vec<[f64; 2]> = if comp.len() == 1 {
            vec![[0.0, 0.0]]
        } else {
            let sub = DMatrix::from_fn(comp.len(), comp.len(), |a, b| hops[(comp[a], comp[b])]);
            let run = layout_component(&sub, cfg);
            iterations += run.iterations;
            converged &= run.converged;
            run.positions
        };
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        for p in &local {
            for a in 0..2 {
                lo[a] = lo[a].min(p[a]);
                hi[a] = hi[a].max(p[a]);
            }
        }
        for (&v, p) in comp.iter().zip(&local) {
            positions[v] = *p;
        }
        placed.push((comp.clone(), lo, hi));
    }

    let initial_energy;
    if components.len() > 1 {
        let cols = (components.len() as f64).sqrt().ceil() as usize;
        let cell_w = placed.iter().map(|(_, lo, hi)| hi[0] - lo[0]).fold(0.0, f64::max) + cfg.edge_length;
        let cell_h = placed.iter().map(|(_, lo, hi)| hi[1] - lo[1]).fold(0.0, f64::max) + cfg.edge_length;
        for (idx, (comp, lo, _)) in placed.iter().enumerate() {
            let origin = [(idx % cols) as f64 * cell_w, (idx / cols) as f64 * cell_h];
            for &v in comp {
                positions[v] = [positions[v][0] - lo[0] + origin[0], positions[v][1] - lo[1] + origin[1]];
            }
        }
        initial_energy = components
            .iter()
            .filter(|c| c.len() > 1)
            .map(|c| {
                let sub = DMatrix::from_fn(c.len(), c.len(), |a, b| hops[(c[a], c[b])]);
                spring_energy(&circle(&sub, cfg), &sub, cfg)
            })
            .sum();
    } else {
        initial_energy = spring_energy(&circle(&hops, cfg), &hops, cfg);
    }
    let final_energy = spring_energy(&positions, &hops, cfg);
    Ok(LayoutResult { positions, initial_energy, final_energy, iterations, converged })
}

/// Start positions: evenly spaced on a circle in vertex order, with the
/// diameter of the circle equal to `L` times the graph diameter.
fn circle(hops: &DMatrix<f64>, cfg: &KamadaKawaiConfig) -> Vec<[f64; 2]> {
    let n = hops.nrows();
    let radius = cfg.edge_length * hops.iter().copied().fold(0.0, f64::max) / 2.0;
    (0..n)
        .map(|i| {
            let a = std::f64::consts::TAU * i as f64 / n as f64;
            [radius * a.cos(), radius * a.sin()]
        })
        .collect()
}
