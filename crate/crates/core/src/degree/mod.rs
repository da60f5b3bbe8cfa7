//! Numerical mapping degree: winding numbers on S¹, and Brouwer degree on S²
//! by the Kronecker integral and by signed preimage counts.

mod brouwer;
mod maps;
mod winding;

use serde::Serialize;

pub use brouwer::{
    brouwer_degree, brouwer_degree_refined, brouwer_integral, check_antipode_preserving,
    degree_by_preimage, degree_by_preimage_generic, face_contributions, max_face_spread,
    min_separation, preimages, resolving_level, Preimage, IRREGULAR_DET,
};
pub use maps::{CircleMap, SampledCircleMap, SampledSurfaceMap, SurfaceMap, DEGENERATE_NORM};
pub use winding::{
    check_antipode_preserving_circle, half_arc_turns, winding_integral, winding_number,
    MAX_CIRCLE_SAMPLES,
};

/// A rounded degree is certified only when `|raw - rounded|` is below this.
pub const CERTIFY_RESIDUAL: f64 = 0.2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DegreeMethod {
    Integral,
    Preimage,
    AngleLift,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DegreeReport {
    pub raw_integral: f64,
    pub rounded: i64,
    pub residual: f64,
    pub method: DegreeMethod,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mesh_level: Option<u32>,
}

impl DegreeReport {
    pub fn from_raw(raw: f64, method: DegreeMethod) -> Self {
        let rounded = raw.round();
        Self {
            raw_integral: raw,
            rounded: rounded as i64,
            residual: (raw - rounded).abs(),
            method,
            mesh_level: None,
        }
    }

    fn at_level(mut self, level: u32) -> Self {
        self.mesh_level = Some(level);
        self
    }

    pub fn certified(&self) -> bool {
        self.residual < CERTIFY_RESIDUAL
    }
}
