//! Rasterization of scenes into per-pixel outcomes.
//!
//! Every pixel is computed independently from the immutable scene and root
//! set and written into its own slot, so the grid is identical for any
//! worker count.

mod color;
mod orbit;

pub use color::{colorize, hsv_to_rgb, BRIGHTNESS_CAP};
pub use orbit::{trace_orbit, Orbit, OrbitPoint};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::basicfamily::{FamilyError, FamilyParams, FamilyWorkspace, SequenceTerm};
use crate::complexpoly::Polynomial;
use crate::roots::{find_all_roots, nearest_in, RootError, RootSet};
use crate::scene::{Mode, Scene, Tolerances, Viewport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Converged,
    MaxIter,
    Diverged,
    Singular,
}

impl Status {
    pub fn code(self) -> u8 {
        match self {
            Status::Converged => 0,
            Status::MaxIter => 1,
            Status::Diverged => 2,
            Status::Singular => 3,
        }
    }

    pub fn from_code(code: u8) -> Option<Self> {
        Some(match code {
            0 => Status::Converged,
            1 => Status::MaxIter,
            2 => Status::Diverged,
            3 => Status::Singular,
            _ => return None,
        })
    }
}

/// Root index stored for pixels that did not converge.
pub const NO_ROOT: u16 = u16::MAX;

/// Classification of one pixel. `root_index` is meaningful only when
/// `status` is `Converged`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PixelOutcome {
    pub status: Status,
    pub root_index: u16,
    pub iterations: u16,
}

impl PixelOutcome {
    pub fn converged(root_index: usize, iterations: usize) -> Self {
        PixelOutcome { status: Status::Converged, root_index: root_index as u16, iterations: iterations as u16 }
    }

    pub fn failed(status: Status, iterations: usize) -> Self {
        debug_assert_ne!(status, Status::Converged);
        PixelOutcome { status, root_index: NO_ROOT, iterations: iterations as u16 }
    }

    pub fn root(&self) -> Option<usize> {
        (self.status == Status::Converged).then_some(self.root_index as usize)
    }
}

impl Default for PixelOutcome {
    fn default() -> Self {
        PixelOutcome::failed(Status::MaxIter, 0)
    }
}

/// Row-major grid of pixel outcomes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OutcomeGrid {
    pub cols: u32,
    pub rows: u32,
    pub pixels: Vec<PixelOutcome>,
}

/// Bytes per pixel in the flat binary layout.
pub const OUTCOME_RECORD_LEN: usize = 5;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecodeError {
    #[error("expected {expected} bytes for the grid, got {actual}")]
    Length { expected: usize, actual: usize },
    #[error("invalid status byte {0} at pixel {1}")]
    Status(u8, usize),
}

impl OutcomeGrid {
    pub fn get(&self, col: u32, row: u32) -> PixelOutcome {
        self.pixels[row as usize * self.cols as usize + col as usize]
    }

    pub fn count(&self, status: Status) -> usize {
        self.pixels.iter().filter(|p| p.status == status).count()
    }

    pub fn fraction(&self, status: Status) -> f64 {
        self.count(status) as f64 / self.pixels.len() as f64
    }

    /// Flat layout: row-major, per pixel one status byte, the root index as
    /// little-endian u16, then the iteration count as little-endian u16.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.pixels.len() * OUTCOME_RECORD_LEN);
        for p in &self.pixels {
            out.push(p.status.code());
            out.extend_from_slice(&p.root_index.to_le_bytes());
            out.extend_from_slice(&p.iterations.to_le_bytes());
        }
        out
    }

    pub fn from_bytes(cols: u32, rows: u32, bytes: &[u8]) -> Result<Self, DecodeError> {
        let expected = cols as usize * rows as usize * OUTCOME_RECORD_LEN;
        if bytes.len() != expected {
            return Err(DecodeError::Length { expected, actual: bytes.len() });
        }
        let pixels = bytes
            .chunks_exact(OUTCOME_RECORD_LEN)
            .enumerate()
            .map(|(i, rec)| {
                let status = Status::from_code(rec[0]).ok_or(DecodeError::Status(rec[0], i))?;
                Ok(PixelOutcome {
                    status,
                    root_index: u16::from_le_bytes([rec[1], rec[2]]),
                    iterations: u16::from_le_bytes([rec[3], rec[4]]),
                })
            })
            .collect::<Result<_, _>>()?;
        Ok(OutcomeGrid { cols, rows, pixels })
    }
}

#[derive(Debug, Error)]
pub enum RenderError {
    #[error("root finding failed: {0}")]
    Roots(#[from] RootError),
    #[error("could not start worker pool: {0}")]
    Pool(String),
}

/// Iteration of one basic-family member from a seed, with the pixel
/// termination rules. Shared by the renderer and the orbit tracer.
pub(crate) struct BasinIteration<'a> {
    pub p: &'a Polynomial,
    pub params: FamilyParams,
    pub roots: &'a [Complex64],
    pub tol: Tolerances,
    ws: FamilyWorkspace,
}

impl<'a> BasinIteration<'a> {
    pub fn new(p: &'a Polynomial, params: FamilyParams, roots: &'a [Complex64], tol: Tolerances) -> Self {
        BasinIteration { p, params, roots, tol, ws: FamilyWorkspace::new() }
    }

    /// Iterate from `z0` for at most `max_steps` steps. `visit` sees every
    /// iterate, starting with `(0, z0)`.
    pub fn run(&mut self, z0: Complex64, max_steps: usize, mut visit: impl FnMut(usize, Complex64)) -> PixelOutcome {
        let tol = self.tol;
        visit(0, z0);
        if !(z0.re.is_finite() && z0.im.is_finite()) || z0.norm() > tol.divergence_radius {
            return PixelOutcome::failed(Status::Diverged, 0);
        }
        let mut z = z0;
        for k in 1..=max_steps {
            let next = match self.ws.step(self.p, z, &self.params) {
                Ok(next) => next,
                Err(FamilyError::NonFiniteResult) => return PixelOutcome::failed(Status::Diverged, k),
                Err(_) => return PixelOutcome::failed(Status::Singular, k),
            };
            visit(k, next);
            if next.norm() > tol.divergence_radius {
                return PixelOutcome::failed(Status::Diverged, k);
            }
            let residual = self.p.eval(next).norm();
            let (idx, dist) = nearest_in(self.roots, next);
            if residual < tol.eps_root && dist < 10.0 * tol.eps_root {
                return PixelOutcome::converged(idx, k);
            }
            if (next - z).norm() < tol.eps_step {
                return if residual < tol.eps_root.sqrt() {
                    PixelOutcome::converged(idx, k)
                } else {
                    PixelOutcome::failed(Status::MaxIter, k)
                };
            }
            z = next;
        }
        PixelOutcome::failed(Status::MaxIter, max_steps)
    }
}

/// Basic-sequence classification of one point.
pub(crate) fn voronoi_outcome(
    ws: &mut FamilyWorkspace,
    terms: &mut Vec<SequenceTerm>,
    p: &Polynomial,
    roots: &[Complex64],
    w: Complex64,
    m_max: usize,
    eps_root: f64,
) -> PixelOutcome {
    if ws.sequence(p, w, m_max, terms).is_err() {
        return PixelOutcome::failed(Status::Singular, m_max);
    }
    let Some(last) = terms.last().and_then(SequenceTerm::get) else {
        return PixelOutcome::failed(Status::Singular, m_max);
    };
    let (idx, _) = nearest_in(roots, last);
    let theta = roots[idx];
    let first = terms.iter().find(|t| t.get().is_some_and(|v| (v - theta).norm() < eps_root)).map_or(m_max, |t| t.m);
    PixelOutcome::converged(idx, first)
}

fn fill_rows<F>(viewport: &Viewport, workers: usize, init: impl Fn() -> F + Sync) -> Result<OutcomeGrid, RenderError>
where
    F: FnMut(Complex64) -> PixelOutcome,
{
    let cols = viewport.cols as usize;
    let mut pixels = vec![PixelOutcome::default(); viewport.pixel_count()];
    let band = |row: usize, out: &mut [PixelOutcome], f: &mut F| {
        for (col, slot) in out.iter_mut().enumerate() {
            *slot = f(viewport.pixel_to_complex(col as u32, row as u32));
        }
    };
    if workers <= 1 {
        let mut f = init();
        for (row, out) in pixels.chunks_mut(cols).enumerate() {
            band(row, out, &mut f);
        }
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .map_err(|e| RenderError::Pool(e.to_string()))?;
        pool.install(|| {
            pixels.par_chunks_mut(cols).enumerate().for_each_init(&init, |f, (row, out)| band(row, out, f));
        });
    }
    Ok(OutcomeGrid { cols: viewport.cols, rows: viewport.rows, pixels })
}

/// Basin rendering: iterate the scene's family member from each pixel.
///
/// # Panics
/// If the scene is not in basins mode.
pub fn render_basins(scene: &Scene, rs: &RootSet, workers: usize) -> Result<OutcomeGrid, RenderError> {
    let Mode::Basins(params) = scene.mode else {
        panic!("render_basins requires a basins-mode scene");
    };
    let p = scene.polynomial();
    let max_iter = scene.tolerances.max_iter as usize;
    fill_rows(&scene.viewport, workers, || {
        let mut it = BasinIteration::new(&p, params, &rs.roots, scene.tolerances);
        move |z| it.run(z, max_iter, |_, _| {})
    })
}

/// Voronoi rendering: classify each pixel by where its basic sequence ends.
///
/// # Panics
/// If the scene is not in Voronoi mode.
pub fn render_voronoi(scene: &Scene, rs: &RootSet, workers: usize) -> Result<OutcomeGrid, RenderError> {
    let Mode::VoronoiSequence { m_max } = scene.mode else {
        panic!("render_voronoi requires a voronoi-mode scene");
    };
    let p = scene.polynomial();
    let eps_root = scene.tolerances.eps_root;
    fill_rows(&scene.viewport, workers, || {
        let mut ws = FamilyWorkspace::new();
        let mut terms = Vec::with_capacity(m_max);
        let p = &p;
        move |w| voronoi_outcome(&mut ws, &mut terms, p, &rs.roots, w, m_max, eps_root)
    })
}

/// Classify a single point exactly as the renderer would classify a pixel
/// centered there.
pub fn classify_point(scene: &Scene, rs: &RootSet, w: Complex64) -> PixelOutcome {
    let p = scene.polynomial();
    match scene.mode {
        Mode::Basins(params) => BasinIteration::new(&p, params, &rs.roots, scene.tolerances).run(
            w,
            scene.tolerances.max_iter as usize,
            |_, _| {},
        ),
        Mode::VoronoiSequence { m_max } => {
            let mut terms = Vec::with_capacity(m_max);
            voronoi_outcome(&mut FamilyWorkspace::new(), &mut terms, &p, &rs.roots, w, m_max, scene.tolerances.eps_root)
        }
    }
}

/// Dispatch on the scene's mode with a precomputed root set.
pub fn render_with_roots(scene: &Scene, rs: &RootSet, workers: usize) -> Result<OutcomeGrid, RenderError> {
    match scene.mode {
        Mode::Basins(_) => render_basins(scene, rs, workers),
        Mode::VoronoiSequence { .. } => render_voronoi(scene, rs, workers),
    }
}

/// Everything a caller needs after rendering a scene.
#[derive(Debug, Clone)]
pub struct Rendered {
    pub roots: RootSet,
    pub grid: OutcomeGrid,
}

/// Find the roots of the scene polynomial, then render.
pub fn render_scene(scene: &Scene, workers: usize) -> Result<Rendered, RenderError> {
    let roots = find_all_roots(&scene.polynomial())?;
    let grid = render_with_roots(scene, &roots, workers)?;
    Ok(Rendered { roots, grid })
}

/// Worker count from `EXPOGRAPH_WORKERS`, else the available parallelism.
pub fn default_workers() -> usize {
    std::env::var("EXPOGRAPH_WORKERS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}
