//! Polynomiographs of the exponential partial sums `P_n`, the Szegő sums
//! `S_n`, and their products with `z^n - 1`, rendered under the
//! parametrized basic family of iteration functions or under pointwise
//! convergence of the basic sequence.

pub mod basicfamily;
pub mod complexpoly;
pub mod imageio;
pub mod render;
pub mod roots;
pub mod scene;
pub mod service;

pub use basicfamily::{
    basic_family_step, basic_sequence, classify_fixed_point, d_sequence, halley_step, newton_step, DSequence,
    FamilyError, FamilyParams, FixedPointKind,
};
pub use complexpoly::{multiply, partial_sum, szego_sum, unity_factor, ComplexValue, Polynomial};
pub use imageio::ImageBuffer;
pub use render::{render_scene, OutcomeGrid, PixelOutcome, RenderError, Status};
pub use roots::{cauchy_bound, find_all_roots, nearest_root, verify_root_claims, RootSet};
pub use scene::{Scene, SceneError, SceneFile};

/// Render a scene and color it with the scene palette.
pub fn render_image(scene: &Scene, workers: usize) -> Result<(render::Rendered, ImageBuffer), RenderError> {
    let rendered = render_scene(scene, workers)?;
    let img = render::colorize(&rendered.grid, rendered.roots.len(), scene.palette);
    Ok((rendered, img))
}

/// Render a scene straight to PNG bytes. The CLI and the service share
/// this path.
pub fn render_png(scene: &Scene, workers: usize) -> Result<Vec<u8>, RenderError> {
    let (_, img) = render_image(scene, workers)?;
    Ok(imageio::png_bytes(&img))
}
