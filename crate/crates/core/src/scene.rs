//! Scenes: what to render and how. A [`SceneFile`] is the JSON wire form;
//! [`Scene`] is the validated in-memory form.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::basicfamily::{FamilyError, FamilyParams};
use crate::complexpoly::{partial_sum, szego_sum, unity_factor, Polynomial, MAX_FAMILY_N};

pub const DEFAULT_EPS_ROOT: f64 = 1e-9;
pub const DEFAULT_EPS_STEP: f64 = 1e-12;
pub const DEFAULT_DIVERGENCE_RADIUS: f64 = 1e8;
pub const DEFAULT_MAX_ITER: u32 = 256;
pub const MAX_ITER_CAP: u32 = 10_000;
pub const M_MAX_CAP: usize = 500;
pub const MAX_EXPLICIT_DEGREE: usize = 64;
/// Largest raster edge accepted from a scene file.
pub const MAX_PIXELS_PER_SIDE: u32 = 16_384;

/// Relaxation used by the parametrized-Newton presets.
pub const DEFAULT_FIG3_ALPHA: Complex64 = Complex64::new(0.55, 0.45);

#[derive(Debug, Error)]
pub enum SceneError {
    #[error("invalid scene JSON: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("scene constraint violated: {0}")]
    Constraint(String),
}

impl From<FamilyError> for SceneError {
    fn from(e: FamilyError) -> Self {
        SceneError::Constraint(e.to_string())
    }
}

fn constraint(msg: impl Into<String>) -> SceneError {
    SceneError::Constraint(msg.into())
}

#[derive(Debug, Clone, PartialEq)]
pub enum PolySpec {
    PartialSum(usize),
    Szego(usize),
    /// `S_n(z) (z^n - 1)`.
    SzegoTimesUnity(usize),
    Explicit(Vec<Complex64>),
}

impl PolySpec {
    pub fn build(&self) -> Polynomial {
        match self {
            PolySpec::PartialSum(n) => partial_sum(*n),
            PolySpec::Szego(n) => szego_sum(*n),
            PolySpec::SzegoTimesUnity(n) => szego_sum(*n).multiply(&unity_factor(*n)),
            PolySpec::Explicit(c) => Polynomial::new(c.clone()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Mode {
    Basins(FamilyParams),
    VoronoiSequence { m_max: usize },
}

/// Rectangle of the plane mapped onto a pixel grid with square pixels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Viewport {
    pub center: Complex64,
    pub width: f64,
    pub cols: u32,
    pub rows: u32,
}

impl Viewport {
    pub fn height(&self) -> f64 {
        self.width * self.rows as f64 / self.cols as f64
    }

    pub fn pixel_count(&self) -> usize {
        self.cols as usize * self.rows as usize
    }

    /// Center of pixel `(col, row)`; row 0 is the top edge.
    pub fn pixel_to_complex(&self, col: u32, row: u32) -> Complex64 {
        debug_assert!(col < self.cols && row < self.rows);
        let re = self.center.re + self.width * ((col as f64 + 0.5) / self.cols as f64 - 0.5);
        let im = self.center.im + self.height() * (0.5 - (row as f64 + 0.5) / self.rows as f64);
        Complex64::new(re, im)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub eps_root: f64,
    pub eps_step: f64,
    pub divergence_radius: f64,
    pub max_iter: u32,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            eps_root: DEFAULT_EPS_ROOT,
            eps_step: DEFAULT_EPS_STEP,
            divergence_radius: DEFAULT_DIVERGENCE_RADIUS,
            max_iter: DEFAULT_MAX_ITER,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Palette {
    /// Hue per root, darkened by iteration count.
    #[default]
    Hue,
    /// Hue per root at full brightness.
    HueFlat,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scene {
    pub poly: PolySpec,
    pub mode: Mode,
    pub viewport: Viewport,
    pub tolerances: Tolerances,
    pub palette: Palette,
}

impl Scene {
    pub fn from_json(text: &str) -> Result<Self, SceneError> {
        let file: SceneFile = serde_json::from_str(text)?;
        file.validate()
    }

    pub fn polynomial(&self) -> Polynomial {
        self.poly.build()
    }

    pub fn to_file(&self) -> SceneFile {
        SceneFile::from(self)
    }
}

// ---- wire form ----

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PolyFile {
    PartialSum { n: i64 },
    Szego { n: i64 },
    SzegoUnity { n: i64 },
    Explicit { coeffs: Vec<[f64; 2]> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModeFile {
    Basins {
        m: i64,
        #[serde(default = "unit_alpha")]
        alpha: [f64; 2],
    },
    Voronoi {
        m_max: i64,
    },
}

fn unit_alpha() -> [f64; 2] {
    [1.0, 0.0]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ViewportFile {
    pub center: [f64; 2],
    pub width: f64,
    pub cols: i64,
    pub rows: i64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TolerancesFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps_root: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps_step: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub divergence_radius: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_iter: Option<i64>,
}

/// JSON scene document. Complex numbers are `[re, im]` pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneFile {
    pub poly: PolyFile,
    pub mode: ModeFile,
    pub viewport: ViewportFile,
    #[serde(default)]
    pub tolerances: TolerancesFile,
    #[serde(default)]
    pub palette: Palette,
}

fn family_n(n: i64) -> Result<usize, SceneError> {
    if (1..=MAX_FAMILY_N as i64).contains(&n) {
        Ok(n as usize)
    } else {
        Err(constraint(format!("poly.n must be in [1, {MAX_FAMILY_N}], got {n}")))
    }
}

fn complex(pair: [f64; 2], what: &str) -> Result<Complex64, SceneError> {
    if pair.iter().all(|v| v.is_finite()) {
        Ok(Complex64::new(pair[0], pair[1]))
    } else {
        Err(constraint(format!("{what} must be finite")))
    }
}

fn tolerance(v: Option<f64>, default: f64, what: &str) -> Result<f64, SceneError> {
    let v = v.unwrap_or(default);
    if v > 0.0 && v <= 1e-2 {
        Ok(v)
    } else {
        Err(constraint(format!("tolerances.{what} must be in (0, 1e-2], got {v}")))
    }
}

impl SceneFile {
    pub fn validate(&self) -> Result<Scene, SceneError> {
        let poly = match &self.poly {
            PolyFile::PartialSum { n } => PolySpec::PartialSum(family_n(*n)?),
            PolyFile::Szego { n } => PolySpec::Szego(family_n(*n)?),
            PolyFile::SzegoUnity { n } => PolySpec::SzegoTimesUnity(family_n(*n)?),
            PolyFile::Explicit { coeffs } => {
                let c =
                    coeffs.iter().map(|&pair| complex(pair, "poly.coeffs entries")).collect::<Result<Vec<_>, _>>()?;
                let p = Polynomial::new(c.clone());
                if p.degree() < 1 {
                    return Err(constraint("explicit polynomial must have degree >= 1"));
                }
                if p.degree() > MAX_EXPLICIT_DEGREE {
                    return Err(constraint(format!("explicit polynomial degree must be <= {MAX_EXPLICIT_DEGREE}")));
                }
                PolySpec::Explicit(p.coeffs().to_vec())
            }
        };

        let mode = match &self.mode {
            ModeFile::Basins { m, alpha } => {
                if !(2..=M_MAX_CAP as i64).contains(m) {
                    return Err(constraint(format!("mode.m must be in [2, {M_MAX_CAP}], got {m}")));
                }
                let alpha = complex(*alpha, "mode.alpha")?;
                Mode::Basins(FamilyParams::new(*m as usize, alpha)?)
            }
            ModeFile::Voronoi { m_max } => {
                if !(2..=M_MAX_CAP as i64).contains(m_max) {
                    return Err(constraint(format!("mode.m_max must be in [2, {M_MAX_CAP}], got {m_max}")));
                }
                Mode::VoronoiSequence { m_max: *m_max as usize }
            }
        };

        let v = &self.viewport;
        let center = complex(v.center, "viewport.center")?;
        if !(v.width.is_finite() && v.width > 0.0) {
            return Err(constraint(format!("viewport.width must be positive, got {}", v.width)));
        }
        let side = 1..=MAX_PIXELS_PER_SIDE as i64;
        if !side.contains(&v.cols) || !side.contains(&v.rows) {
            return Err(constraint(format!(
                "viewport cols/rows must be in [1, {MAX_PIXELS_PER_SIDE}], got {}x{}",
                v.cols, v.rows
            )));
        }
        let viewport = Viewport { center, width: v.width, cols: v.cols as u32, rows: v.rows as u32 };

        let t = &self.tolerances;
        let divergence_radius = t.divergence_radius.unwrap_or(DEFAULT_DIVERGENCE_RADIUS);
        if !(divergence_radius.is_finite() && divergence_radius >= 1e3) {
            return Err(constraint(format!("tolerances.divergence_radius must be >= 1e3, got {divergence_radius}")));
        }
        let max_iter = t.max_iter.unwrap_or(DEFAULT_MAX_ITER as i64);
        if !(1..=MAX_ITER_CAP as i64).contains(&max_iter) {
            return Err(constraint(format!("tolerances.max_iter must be in [1, {MAX_ITER_CAP}], got {max_iter}")));
        }
        let tolerances = Tolerances {
            eps_root: tolerance(t.eps_root, DEFAULT_EPS_ROOT, "eps_root")?,
            eps_step: tolerance(t.eps_step, DEFAULT_EPS_STEP, "eps_step")?,
            divergence_radius,
            max_iter: max_iter as u32,
        };

        Ok(Scene { poly, mode, viewport, tolerances, palette: self.palette })
    }
}

impl From<&Scene> for SceneFile {
    fn from(s: &Scene) -> Self {
        let poly = match &s.poly {
            PolySpec::PartialSum(n) => PolyFile::PartialSum { n: *n as i64 },
            PolySpec::Szego(n) => PolyFile::Szego { n: *n as i64 },
            PolySpec::SzegoTimesUnity(n) => PolyFile::SzegoUnity { n: *n as i64 },
            PolySpec::Explicit(c) => PolyFile::Explicit { coeffs: c.iter().map(|z| [z.re, z.im]).collect() },
        };
        let mode = match s.mode {
            Mode::Basins(p) => ModeFile::Basins { m: p.m() as i64, alpha: [p.alpha().re, p.alpha().im] },
            Mode::VoronoiSequence { m_max } => ModeFile::Voronoi { m_max: m_max as i64 },
        };
        let v = s.viewport;
        let t = s.tolerances;
        SceneFile {
            poly,
            mode,
            viewport: ViewportFile {
                center: [v.center.re, v.center.im],
                width: v.width,
                cols: v.cols as i64,
                rows: v.rows as i64,
            },
            tolerances: TolerancesFile {
                eps_root: Some(t.eps_root),
                eps_step: Some(t.eps_step),
                divergence_radius: Some(t.divergence_radius),
                max_iter: Some(t.max_iter as i64),
            },
            palette: s.palette,
        }
    }
}

// ---- presets ----

/// The four figure families.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Figure {
    /// `P_n` under Newton, n = 2..10.
    Fig1,
    /// `P_n` under the basic sequence, n = 2..7.
    Fig2,
    /// `P_n` under parametrized Newton, n = 2..7.
    Fig3,
    /// `S_n (z^n - 1)` under the basic sequence, n = 2..7.
    Fig4,
}

pub const PRESET_SIDE: u32 = 400;
pub const PRESET_M_MAX: usize = 60;

impl Figure {
    pub const ALL: [Figure; 4] = [Figure::Fig1, Figure::Fig2, Figure::Fig3, Figure::Fig4];

    pub fn name(self) -> &'static str {
        match self {
            Figure::Fig1 => "fig1",
            Figure::Fig2 => "fig2",
            Figure::Fig3 => "fig3",
            Figure::Fig4 => "fig4",
        }
    }

    pub fn degrees(self) -> std::ops::RangeInclusive<usize> {
        match self {
            Figure::Fig1 => 2..=10,
            _ => 2..=7,
        }
    }

    /// Preset scene for this figure at family parameter `n`.
    pub fn scene(self, n: usize) -> Scene {
        let wide =
            Viewport { center: Complex64::new(0.0, 0.0), width: 2.5 * n as f64, cols: PRESET_SIDE, rows: PRESET_SIDE };
        let (poly, mode, viewport) = match self {
            Figure::Fig1 => (PolySpec::PartialSum(n), Mode::Basins(FamilyParams::newton()), wide),
            Figure::Fig2 => (PolySpec::PartialSum(n), Mode::VoronoiSequence { m_max: PRESET_M_MAX }, wide),
            Figure::Fig3 => (
                PolySpec::PartialSum(n),
                Mode::Basins(FamilyParams::new(2, DEFAULT_FIG3_ALPHA).expect("default alpha is valid")),
                wide,
            ),
            Figure::Fig4 => (
                PolySpec::SzegoTimesUnity(n),
                Mode::VoronoiSequence { m_max: PRESET_M_MAX },
                Viewport { width: 2.6, ..wide },
            ),
        };
        Scene { poly, mode, viewport, tolerances: Tolerances::default(), palette: Palette::Hue }
    }

    pub fn file_name(self, n: usize) -> String {
        format!("{}_n{n}.json", self.name())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    const MINIMAL: &str = r#"{
        "poly": {"kind": "partial_sum", "n": 2},
        "mode": {"kind": "basins", "m": 2},
        "viewport": {"center": [-1, 0], "width": 4, "cols": 8, "rows": 4}
    }"#;

    #[test]
    fn pixel_centers() {
        let v = Viewport { center: c(0.0, 0.0), width: 4.0, cols: 2, rows: 2 };
        assert_eq!(v.pixel_to_complex(0, 0), c(-1.0, 1.0));
        assert_eq!(v.pixel_to_complex(1, 1), c(1.0, -1.0));
        let v = Viewport { center: c(1.0, 2.0), width: 2.0, cols: 1, rows: 1 };
        assert_eq!(v.pixel_to_complex(0, 0), c(1.0, 2.0));
    }

    #[test]
    fn non_square_viewport_keeps_square_pixels() {
        let v = Viewport { center: c(0.0, 0.0), width: 4.0, cols: 4, rows: 2 };
        assert_eq!(v.height(), 2.0);
        assert_eq!(v.pixel_to_complex(0, 0), c(-1.5, 0.5));
    }

    #[test]
    fn minimal_scene_takes_defaults() {
        let s = Scene::from_json(MINIMAL).unwrap();
        assert_eq!(s.poly, PolySpec::PartialSum(2));
        assert_eq!(s.mode, Mode::Basins(FamilyParams::newton()));
        assert_eq!(s.tolerances, Tolerances::default());
        assert_eq!(s.palette, Palette::Hue);
        assert_eq!(s.viewport.center, c(-1.0, 0.0));
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let bad = MINIMAL.replace("\"width\": 4", "\"width\": 4, \"zoom\": 2");
        assert!(matches!(Scene::from_json(&bad), Err(SceneError::Parse(_))));
        let bad = MINIMAL.replace("\"n\": 2}", "\"n\": 2, \"coeffs\": []}");
        assert!(matches!(Scene::from_json(&bad), Err(SceneError::Parse(_))));
        assert!(matches!(Scene::from_json("{not json"), Err(SceneError::Parse(_))));
    }

    #[test]
    fn constraint_violations() {
        let cases = [
            MINIMAL.replace("\"m\": 2", "\"m\": 2, \"alpha\": [2.5, 0]"),
            MINIMAL.replace("\"m\": 2", "\"m\": 1"),
            MINIMAL.replace("\"n\": 2", "\"n\": 0"),
            MINIMAL.replace("\"n\": 2", "\"n\": 65"),
            MINIMAL.replace("\"width\": 4", "\"width\": -1"),
            MINIMAL.replace("\"cols\": 8", "\"cols\": 0"),
            MINIMAL.replace("\"rows\": 4}", "\"rows\": 4}, \"tolerances\": {\"eps_root\": 0.5}"),
            MINIMAL.replace("\"rows\": 4}", "\"rows\": 4}, \"tolerances\": {\"max_iter\": 20000}"),
            MINIMAL.replace("\"rows\": 4}", "\"rows\": 4}, \"tolerances\": {\"divergence_radius\": 10}"),
            MINIMAL.replace(r#""kind": "basins", "m": 2"#, r#""kind": "voronoi", "m_max": 501"#),
            MINIMAL.replace(r#""kind": "partial_sum", "n": 2"#, r#""kind": "explicit", "coeffs": [[1, 0]]"#),
        ];
        for case in cases {
            assert!(
                matches!(Scene::from_json(&case), Err(SceneError::Constraint(_))),
                "expected constraint error for {case}"
            );
        }
    }

    #[test]
    fn explicit_and_voronoi_forms() {
        let text = r#"{
            "poly": {"kind": "explicit", "coeffs": [[-1, 0], [0, 0], [1, 0], [0, 0]]},
            "mode": {"kind": "voronoi", "m_max": 30},
            "viewport": {"center": [0, 0], "width": 3, "cols": 2, "rows": 2},
            "tolerances": {"eps_root": 1e-6},
            "palette": "hue_flat"
        }"#;
        let s = Scene::from_json(text).unwrap();
        assert_eq!(s.polynomial().degree(), 2);
        assert_eq!(s.mode, Mode::VoronoiSequence { m_max: 30 });
        assert_eq!(s.tolerances.eps_root, 1e-6);
        assert_eq!(s.tolerances.eps_step, DEFAULT_EPS_STEP);
        assert_eq!(s.palette, Palette::HueFlat);
    }

    #[test]
    fn scene_file_round_trip() {
        for fig in Figure::ALL {
            let scene = fig.scene(3);
            let text = serde_json::to_string(&scene.to_file()).unwrap();
            assert_eq!(Scene::from_json(&text).unwrap(), scene);
        }
    }

    #[test]
    fn preset_polynomials() {
        assert_eq!(Figure::Fig4.scene(2).polynomial().degree(), 4);
        assert_eq!(Figure::Fig1.scene(10).viewport.width, 25.0);
        assert_eq!(Figure::Fig4.scene(5).viewport.width, 2.6);
        match Figure::Fig3.scene(4).mode {
            Mode::Basins(p) => assert_eq!(p.alpha(), DEFAULT_FIG3_ALPHA),
            other => panic!("unexpected mode {other:?}"),
        }
    }
}
