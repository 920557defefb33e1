use num_complex::Complex64;
use serde::{Serialize, Serializer};

use super::{voronoi_outcome, BasinIteration, PixelOutcome, Status};
use crate::basicfamily::FamilyWorkspace;
use crate::roots::RootSet;
use crate::scene::{Mode, Scene};

/// One iterate of an orbit. Serializes as `[k, re, im, |p(z_k)|]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrbitPoint {
    pub k: usize,
    pub z: Complex64,
    pub residual: f64,
}

impl Serialize for OrbitPoint {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        (self.k, self.z.re, self.z.im, self.residual).serialize(s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Orbit {
    pub points: Vec<OrbitPoint>,
    pub status: Status,
    /// Step at which the orbit stopped.
    pub k: usize,
    pub root_index: Option<usize>,
    pub root: Option<[f64; 2]>,
}

/// Orbit of `z0` under the scene's iteration.
///
/// In basins mode this is `z_0, z_1 = B(z_0), ...` under the scene's family
/// member, stopped by the same rules as a pixel, with `max_steps` replacing
/// the scene's iteration cap. In Voronoi mode it is the basic sequence at
/// `z0`: the seed at `k = 0`, then `B_m(z0)` at `k = m` for
/// `m = 2..=min(m_max, max_steps)`.
pub fn trace_orbit(scene: &Scene, rs: &RootSet, z0: Complex64, max_steps: usize) -> Orbit {
    let p = scene.polynomial();
    let mut points = Vec::new();
    let outcome = match scene.mode {
        Mode::Basins(params) => {
            let mut it = BasinIteration::new(&p, params, &rs.roots, scene.tolerances);
            it.run(z0, max_steps, |k, z| points.push(OrbitPoint { k, z, residual: p.eval(z).norm() }))
        }
        Mode::VoronoiSequence { m_max } => {
            let m_max = m_max.min(max_steps).max(2);
            let mut ws = FamilyWorkspace::new();
            let mut terms = Vec::new();
            let out = voronoi_outcome(&mut ws, &mut terms, &p, &rs.roots, z0, m_max, scene.tolerances.eps_root);
            points.push(OrbitPoint { k: 0, z: z0, residual: p.eval(z0).norm() });
            for t in terms.iter() {
                if let Some(z) = t.get() {
                    points.push(OrbitPoint { k: t.m, z, residual: p.eval(z).norm() });
                }
            }
            // Report where the sequence was read, not the first hit.
            PixelOutcome { iterations: m_max as u16, ..out }
        }
    };
    let root_index = outcome.root();
    Orbit {
        points,
        status: outcome.status,
        k: outcome.iterations as usize,
        root_index,
        root: root_index.map(|i| [rs.roots[i].re, rs.roots[i].im]),
    }
}
