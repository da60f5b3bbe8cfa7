use std::fmt::Write as _;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::args::{BundleCase, Command};
use super::{Outcome, RunConfig, EXIT_NONCONVERGENT, EXIT_SEARCH_FAILURE};
use crate::bundles::{
    canonical_sections_2gamma, canonical_sections_4gamma, check_equivariance, extract_rho_maps,
    parse_matrix_json, rank_drop_search_rp1, rank_drop_search_rp2, section_matrix,
    EquivariantSection, MatrixSet, ParitySignature, RhoExtraction, Rp1Witness, SearchOutcome,
    SpanMinimum,
};
use crate::charclass::{
    is_sw_trivial, radon_hurwitz, total_sw_class, write_sw_table, RadonHurwitzDecomposition,
};
use crate::degree::{
    brouwer_integral, check_antipode_preserving, check_antipode_preserving_circle,
    degree_by_preimage_generic, face_contributions, min_separation, resolving_level,
    winding_integral, winding_number, CircleMap, DegreeReport, SampledCircleMap, SampledSurfaceMap,
    SurfaceMap, CERTIFY_RESIDUAL,
};
use crate::error::{Error, Result};
use crate::numerics::{determinant, smallest_singular_value, RealMatrix};
use crate::spectra::{complex_odd_eigen, singular_combination_search, SpectralCertificate};
use crate::sphere::{circle_grid, icosphere, AntipodalSamples, SphereMesh};
use std::sync::Arc;

/// Per-command result payloads, serialized without a wrapper tag.
#[derive(Clone, Debug, Serialize)]
#[serde(untagged)]
pub enum Results {
    SurfaceDegree(SurfaceDegreeResults),
    CircleDegree(CircleDegreeResults),
    Swtable(SwtableResults),
    Eigen(EigenResults),
    Span(SpanResults),
    Bundle(BundleResults),
    Rh(RhResults),
}

#[derive(Clone, Debug, Serialize)]
pub struct SurfaceDegreeResults {
    pub domain: &'static str,
    pub map: String,
    pub mesh_level: u32,
    pub integral: DegreeReport,
    pub residual_tolerance: f64,
    pub certified: bool,
    pub preimage: Option<DegreeReport>,
    pub preimage_error: Option<String>,
    pub agree: bool,
    pub antipode_defect: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct CircleDegreeResults {
    pub domain: &'static str,
    pub map: String,
    pub samples: usize,
    pub lift: DegreeReport,
    pub integral: f64,
    pub integral_residual: f64,
    pub residual_tolerance: f64,
    pub certified: bool,
    pub agree: bool,
    pub antipode_defect: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct SwRow {
    pub k: u64,
    /// Total class over RPⁿ for n = 1..=max_n.
    pub classes: Vec<String>,
    pub trivial: Vec<bool>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SwHighlight {
    pub case: &'static str,
    pub k: u64,
    pub n: u64,
    pub expected_trivial: bool,
    pub trivial: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct SwtableResults {
    pub max_k: u64,
    pub max_n: u64,
    pub rows: Vec<SwRow>,
    pub highlights: Vec<SwHighlight>,
}

#[derive(Clone, Debug, Serialize)]
pub struct EigenResults {
    pub n: usize,
    pub certificate: Option<SpectralCertificate>,
    pub residual_tolerance: f64,
    pub witness_tolerance: f64,
    pub failure: Option<FailureWitness>,
}

#[derive(Clone, Debug, Serialize)]
pub struct FailureWitness {
    pub witness: Vec<f64>,
    pub sigma_min: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct SpanResults {
    pub q: usize,
    pub q_mod_4: usize,
    /// Whether a singular combination is forced for this size.
    pub singularity_expected: bool,
    pub dependent: bool,
    pub minimum: SpanMinimum,
    pub sigma_tolerance: f64,
    pub singular: bool,
}

#[derive(Clone, Debug, Serialize)]
#[serde(untagged)]
pub enum BundleResults {
    Trivialization(TrivializationResults),
    Rp1(Rp1Results),
    Rp2(Rp2Results),
}

#[derive(Clone, Debug, Serialize)]
pub struct TrivializationResults {
    pub case: &'static str,
    pub samples: usize,
    pub max_det_defect: f64,
    pub max_gram_defect: f64,
    pub max_equivariance_defect: f64,
    pub defect_tolerance: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Rp1Results {
    pub case: &'static str,
    pub seed: u64,
    pub witness: Rp1Witness,
    pub sign_flip_exact: bool,
    pub bracket_width: f64,
    pub det_tolerance: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct RhoTrace {
    /// Degrees of the two normalized column maps.
    pub degrees: [i64; 2],
    pub residuals: [f64; 2],
    pub mesh_levels: [u32; 2],
    pub both_odd: bool,
    pub equal: bool,
    /// Degree of `-ρ₂`; equals `-deg ρ₂`, so `ρ₂` and `-ρ₂` are not homotopic.
    pub negated_degree: i64,
    pub antipode_defects: [f64; 2],
    /// Smallest `|ρ₁ - ρ₂|` and `|ρ₁ + ρ₂|` over mesh vertices.
    pub separation: [f64; 2],
}

#[derive(Clone, Debug, Serialize)]
pub struct ColumnZero {
    pub point: Vec<f64>,
    pub column: usize,
    pub norm: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Rp2Results {
    pub case: &'static str,
    pub seed: u64,
    pub rank_drop: SearchOutcome,
    pub rank_drop_tolerance: f64,
    pub rho: Option<RhoTrace>,
    pub column_zero: Option<ColumnZero>,
}

#[derive(Clone, Debug, Serialize)]
pub struct RhResults {
    pub n: u64,
    pub rho: u64,
    pub decomposition: RadonHurwitzDecomposition,
}

pub(crate) fn run(command: &Command, config: &RunConfig, inputs: &[String]) -> Result<Outcome> {
    match command {
        Command::Degree {
            map: Some(spec),
            emit_off,
            ..
        } => degree_named(spec, config, emit_off.as_deref()),
        Command::Degree { emit_off, .. } => degree_sampled(&inputs[0], config, emit_off.as_deref()),
        Command::Swtable { max_k, max_n } => swtable(*max_k, *max_n),
        Command::Eigen { .. } => eigen(&inputs[0], config),
        Command::Span { .. } => span(&inputs[0], config),
        Command::Bundle { case } => bundle(*case, config),
        Command::Rh { n } => rh(*n),
    }
}

fn pass_or(
    pass: bool,
    results: Results,
    flags: Vec<String>,
    csv: Option<String>,
    code: i32,
) -> Outcome {
    Outcome {
        results,
        pass,
        flags,
        csv,
        failure_code: code,
    }
}

fn circle_samples(level: u32) -> usize {
    64 << level
}

fn write_off(mesh: &SphereMesh, path: Option<&std::path::Path>) -> Result<()> {
    if let Some(path) = path {
        let file = std::fs::File::create(path)
            .map_err(|e| Error::Input(format!("{}: {e}", path.display())))?;
        mesh.write_off(std::io::BufWriter::new(file))
            .map_err(|e| Error::Input(format!("{}: {e}", path.display())))?;
    }
    Ok(())
}

fn degree_named(spec: &str, config: &RunConfig, off: Option<&std::path::Path>) -> Result<Outcome> {
    if let Ok(g) = SurfaceMap::parse(spec) {
        return surface_degree(spec.to_string(), &g, config, off);
    }
    match CircleMap::parse(spec) {
        Ok(f) => circle_degree(spec.to_string(), &f, config),
        Err(_) => Err(Error::Input(format!("unknown map family `{spec}`"))),
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum SampleFile {
    Surface { level: u32, values: Vec<[f64; 3]> },
    Circle { m: usize, values: Vec<[f64; 2]> },
}

fn degree_sampled(
    text: &str,
    config: &RunConfig,
    off: Option<&std::path::Path>,
) -> Result<Outcome> {
    let file: SampleFile =
        serde_json::from_str(text).map_err(|e| Error::Input(format!("sample file: {e}")))?;
    match file {
        SampleFile::Surface { level, values } => {
            let g = SurfaceMap::Sampled(Arc::new(SampledSurfaceMap::new(level, values)?));
            surface_degree(format!("sampled:level={level}"), &g, config, off)
        }
        SampleFile::Circle { m, values } => {
            if values.len() != m {
                return Err(Error::Input(format!("m = {m} but {} values", values.len())));
            }
            let f = CircleMap::Sampled(Arc::new(SampledCircleMap::new(values)?));
            circle_degree(format!("sampled:m={m}"), &f, config)
        }
    }
}

fn surface_degree(
    name: String,
    g: &SurfaceMap,
    config: &RunConfig,
    off: Option<&std::path::Path>,
) -> Result<Outcome> {
    let mesh = icosphere(config.mesh_level)?;
    write_off(&mesh, off)?;
    let tol = config.tol("residual");
    let integral = brouwer_integral(g, &mesh)?;
    let certified = integral.residual < tol;
    let (preimage, preimage_error) = match degree_by_preimage_generic(g, &mesh) {
        Ok(r) => (Some(r), None),
        Err(e) => (None, Some(e.to_string())),
    };
    let agree = preimage
        .as_ref()
        .is_some_and(|p| p.rounded == integral.rounded);
    let mut flags = Vec::new();
    if !certified {
        flags.push(format!(
            "integral residual {:.4} not below {tol}",
            integral.residual
        ));
    }
    if !agree {
        flags.push("integral and preimage degrees disagree".into());
    }
    let mut csv = String::from("face,cx,cy,cz,contribution\n");
    for (f, c) in face_contributions(g, &mesh)?.iter().enumerate() {
        let p = mesh.centroid(f);
        let _ = writeln!(
            csv,
            "{f},{:.17e},{:.17e},{:.17e},{c:.17e}",
            p[0], p[1], p[2]
        );
    }
    let results = SurfaceDegreeResults {
        domain: "S2",
        map: name,
        mesh_level: mesh.level(),
        antipode_defect: check_antipode_preserving(g, &mesh)?,
        integral,
        residual_tolerance: tol,
        certified,
        preimage,
        preimage_error,
        agree,
    };
    Ok(pass_or(
        certified && agree,
        Results::SurfaceDegree(results),
        flags,
        Some(csv),
        EXIT_NONCONVERGENT,
    ))
}

fn circle_degree(name: String, f: &CircleMap, config: &RunConfig) -> Result<Outcome> {
    let m = circle_samples(config.mesh_level);
    let tol = config.tol("residual");
    let lift = winding_number(f, m)?;
    let integral = winding_integral(f, m)?;
    let integral_residual = (integral - integral.round()).abs();
    let certified = integral_residual < tol;
    let agree = integral.round() as i64 == lift.rounded;
    let grid = circle_grid(m)?;
    let mut csv = String::from("angle,image_angle\n");
    for k in 0..m {
        let v = f.eval(&grid.points()[k])?;
        let _ = writeln!(csv, "{:.17e},{:.17e}", grid.angle(k), v[1].atan2(v[0]));
    }
    let mut flags = Vec::new();
    if !certified {
        flags.push(format!(
            "integral residual {integral_residual:.4} not below {tol}"
        ));
    }
    if !agree {
        flags.push("integral and angle-lift degrees disagree".into());
    }
    let results = CircleDegreeResults {
        domain: "S1",
        map: name,
        samples: m,
        antipode_defect: check_antipode_preserving_circle(f, &grid)?,
        lift,
        integral,
        integral_residual,
        residual_tolerance: tol,
        certified,
        agree,
    };
    Ok(pass_or(
        certified && agree,
        Results::CircleDegree(results),
        flags,
        Some(csv),
        EXIT_NONCONVERGENT,
    ))
}

fn swtable(max_k: u64, max_n: u64) -> Result<Outcome> {
    let n_max = max_n as usize;
    let mut rows = Vec::with_capacity(max_k as usize);
    for k in 1..=max_k {
        let mut classes = Vec::with_capacity(n_max);
        let mut trivial = Vec::with_capacity(n_max);
        for n in 1..=n_max {
            let w = total_sw_class(k, 0, n)?;
            trivial.push(w.is_one());
            classes.push(w.to_string());
        }
        rows.push(SwRow {
            k,
            classes,
            trivial,
        });
    }
    let mut highlights = Vec::new();
    for k in 1..=max_k {
        if k % 2 == 1 {
            highlights.push(SwHighlight {
                case: "odd k over RP1",
                k,
                n: 1,
                expected_trivial: false,
                trivial: is_sw_trivial(k, 1)?,
            });
        }
        if max_n >= 2 && k % 4 == 2 {
            highlights.push(SwHighlight {
                case: "k = 2 mod 4 over RP2",
                k,
                n: 2,
                expected_trivial: false,
                trivial: is_sw_trivial(k, 2)?,
            });
        }
        if max_n >= 2 && k == 4 {
            highlights.push(SwHighlight {
                case: "k = 4 over RP2",
                k,
                n: 2,
                expected_trivial: true,
                trivial: is_sw_trivial(k, 2)?,
            });
        }
    }
    let pass = highlights.iter().all(|h| h.trivial == h.expected_trivial);
    let mut csv = Vec::new();
    write_sw_table(&mut csv, max_k, n_max)?;
    let csv = String::from_utf8(csv).expect("ascii table");
    let results = SwtableResults {
        max_k,
        max_n,
        rows,
        highlights,
    };
    Ok(pass_or(
        pass,
        Results::Swtable(results),
        vec![],
        Some(csv),
        EXIT_SEARCH_FAILURE,
    ))
}

fn eigen(text: &str, config: &RunConfig) -> Result<Outcome> {
    let t = match parse_matrix_json(text)? {
        MatrixSet::Complex(mut ms) if ms.len() == 1 => ms.remove(0),
        MatrixSet::Real(ms) if ms.len() == 1 => crate::numerics::ComplexMatrix::from_real(&ms[0])?,
        _ => return Err(Error::Input("eigen expects exactly one matrix".into())),
    };
    let n = t.n();
    if n % 2 == 0 {
        return Err(Error::Input(format!(
            "matrix size {n} is even; only odd sizes are supported"
        )));
    }
    let (rt, wt) = (config.tol("residual"), config.tol("witness"));
    let mesh = icosphere(config.mesh_level)?;
    let (certificate, failure) = match complex_odd_eigen(&t, &mesh) {
        Ok(c) => (Some(c), None),
        Err(Error::SearchFailure { witness, sigma_min }) => {
            (None, Some(FailureWitness { witness, sigma_min }))
        }
        Err(e) => return Err(e),
    };
    let pass = certificate
        .as_ref()
        .is_some_and(|c| c.residual <= rt && c.witness_sigma_min <= wt);
    let mut flags = Vec::new();
    if let Some(f) = &failure {
        flags.push(format!("search failure: best sigma_min {:e}", f.sigma_min));
    }
    let csv = certificate.as_ref().map(|c| {
        let mut s = String::from("index,re,im\n");
        for (i, z) in c.eigenvector.iter().enumerate() {
            let _ = writeln!(s, "{i},{:.17e},{:.17e}", z.re, z.im);
        }
        s
    });
    let results = EigenResults {
        n,
        certificate,
        residual_tolerance: rt,
        witness_tolerance: wt,
        failure,
    };
    Ok(pass_or(
        pass,
        Results::Eigen(results),
        flags,
        csv,
        EXIT_SEARCH_FAILURE,
    ))
}

fn sigma_scan_csv<F>(mesh: &SphereMesh, f: F) -> String
where
    F: Fn(&[f64]) -> f64,
{
    let mut csv = String::from("vertex,x,y,z,sigma_min\n");
    for i in mesh.representatives() {
        let p = mesh.vertices()[i];
        let _ = writeln!(
            csv,
            "{i},{:.17e},{:.17e},{:.17e},{:.17e}",
            p[0],
            p[1],
            p[2],
            f(&p)
        );
    }
    csv
}

fn span(text: &str, config: &RunConfig) -> Result<Outcome> {
    let ms = match parse_matrix_json(text)? {
        MatrixSet::Real(ms) => ms,
        MatrixSet::Complex(_) => return Err(Error::Input("span expects real matrices".into())),
    };
    if ms.len() != 3 {
        return Err(Error::Input(format!(
            "span expects exactly 3 matrices, got {}",
            ms.len()
        )));
    }
    let mesh = icosphere(config.mesh_level)?;
    let found = singular_combination_search(&ms[0], &ms[1], &ms[2], &mesh)?;
    let q = found.minimum.q;
    let tol = config.tol("sigma");
    // odd q: det is odd on S²; q = 2 mod 4: at most two matrices span invertibles
    let singularity_expected = q % 2 == 1 || q % 4 == 2;
    let singular = found.minimum.sigma_min < tol;
    let mut flags = Vec::new();
    if !singular && q % 4 == 0 {
        flags.push("no singularity (q = 0 mod 4)".into());
    }
    if !singular && singularity_expected {
        flags.push(format!(
            "expected a singular combination; best sigma_min {:e}",
            found.minimum.sigma_min
        ));
    }
    let csv = sigma_scan_csv(&mesh, |s| {
        let m = ms[0]
            .scale(s[0])
            .axpy(s[1], &ms[1])
            .and_then(|m| m.axpy(s[2], &ms[2]));
        m.and_then(|m| smallest_singular_value(&m))
            .unwrap_or(f64::NAN)
    });
    let results = SpanResults {
        q,
        q_mod_4: q % 4,
        singularity_expected,
        dependent: found.dependent,
        minimum: found.minimum,
        sigma_tolerance: tol,
        singular,
    };
    Ok(pass_or(
        singular || !singularity_expected,
        Results::Span(results),
        flags,
        Some(csv),
        EXIT_SEARCH_FAILURE,
    ))
}

fn gram_defect(m: &RealMatrix) -> f64 {
    let g = m.matmul(&m.transpose()).expect("square");
    g.max_abs_diff(&RealMatrix::identity(m.rows()))
        .expect("same size")
}

fn trivialization(
    case: BundleCase,
    secs: &[EquivariantSection],
    points: &[Vec<f64>],
    equivariance: f64,
    tol: f64,
) -> Result<Outcome> {
    let mut det_defect: f64 = 0.0;
    let mut gram: f64 = 0.0;
    let mut csv = String::from("sample,det\n");
    for (i, p) in points.iter().enumerate() {
        let m = section_matrix(secs, p)?;
        let d = determinant(&m)?;
        det_defect = det_defect.max((d - 1.0).abs());
        gram = gram.max(gram_defect(&m));
        let _ = writeln!(csv, "{i},{d:.17e}");
    }
    let pass = det_defect <= tol && gram <= tol && equivariance <= tol;
    let results = TrivializationResults {
        case: case.tag(),
        samples: points.len(),
        max_det_defect: det_defect,
        max_gram_defect: gram,
        max_equivariance_defect: equivariance,
        defect_tolerance: tol,
    };
    Ok(pass_or(
        pass,
        Results::Bundle(BundleResults::Trivialization(results)),
        vec![],
        Some(csv),
        EXIT_SEARCH_FAILURE,
    ))
}

fn bundle(case: BundleCase, config: &RunConfig) -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    match case {
        BundleCase::TwoGammaRp1 => {
            let grid = circle_grid(circle_samples(config.mesh_level))?;
            let secs = canonical_sections_2gamma();
            let eq = secs
                .iter()
                .map(|s| check_equivariance(s, &grid))
                .collect::<Result<Vec<_>>>()?;
            let points: Vec<Vec<f64>> = grid.points().iter().map(|p| p.to_vec()).collect();
            trivialization(
                case,
                &secs,
                &points,
                eq.into_iter().fold(0.0, f64::max),
                config.tol("defect"),
            )
        }
        BundleCase::FourGammaRp2 => {
            let mesh = icosphere(config.mesh_level)?;
            let secs = canonical_sections_4gamma();
            let eq = secs
                .iter()
                .map(|s| check_equivariance(s, &mesh))
                .collect::<Result<Vec<_>>>()?;
            let points: Vec<Vec<f64>> = mesh
                .vertices()
                .iter()
                .copied()
                .chain((0..mesh.faces().len()).map(|f| mesh.centroid(f)))
                .map(|p| p.to_vec())
                .collect();
            trivialization(
                case,
                &secs,
                &points,
                eq.into_iter().fold(0.0, f64::max),
                config.tol("defect"),
            )
        }
        BundleCase::GammaEpsRp1 => {
            let sig = ParitySignature::new(vec![-1, 1])?;
            let secs = (0..2)
                .map(|_| EquivariantSection::random(2, &sig, 5, &mut rng))
                .collect::<Result<Vec<_>>>()?;
            let witness = rank_drop_search_rp1(&secs, 0.0)?;
            let tol = config.tol("det");
            let sign_flip_exact = witness.det_at_antipode == -witness.det_at_start;
            let bracket_width = witness.bracket[1] - witness.bracket[0];
            let pass = witness.det.abs() < tol && sign_flip_exact;
            let grid = circle_grid(circle_samples(config.mesh_level))?;
            let mut csv = String::from("angle,det\n");
            for k in 0..grid.len() {
                let d = determinant(&section_matrix(&secs, &grid.points()[k])?)?;
                let _ = writeln!(csv, "{:.17e},{d:.17e}", grid.angle(k));
            }
            let results = Rp1Results {
                case: case.tag(),
                seed: config.seed,
                witness,
                sign_flip_exact,
                bracket_width,
                det_tolerance: tol,
            };
            Ok(pass_or(
                pass,
                Results::Bundle(BundleResults::Rp1(results)),
                vec![],
                Some(csv),
                EXIT_SEARCH_FAILURE,
            ))
        }
        BundleCase::TwoGammaEpsRp2 => two_gamma_eps_rp2(config, &mut rng),
    }
}

/// Linear sections keep the column maps linear, so meshes resolve them.
const SECTION_DEGREE: u32 = 1;

/// Finest mesh tried when certifying column-map degrees.
const RHO_MAX_LEVEL: u32 = 7;

/// Face spread, in radians, below which a mesh is taken to resolve a map.
const RESOLVED_SPREAD: f64 = 0.5;

/// Degree at the first level that resolves `g` (else the finest), refined
/// until the integral certifies and the preimage count agrees with it.
fn cross_checked_degree(g: &SurfaceMap, level: u32, tol: f64) -> Result<DegreeReport> {
    let max = RHO_MAX_LEVEL.max(level);
    let start = resolving_level(g, level, max, RESOLVED_SPREAD)?.unwrap_or_else(|| {
        log::info!("column map not resolved below level {max}");
        max
    });
    let mut last = None;
    for level in start..=max {
        let mesh = icosphere(level)?;
        let integral = brouwer_integral(g, &mesh)?;
        let preimage = degree_by_preimage_generic(g, &mesh).ok();
        if integral.residual < tol && preimage.is_some_and(|p| p.rounded == integral.rounded) {
            return Ok(integral);
        }
        last = Some(integral);
    }
    let last = last.expect("at least one level");
    Err(Error::NonConvergentDegree {
        raw: last.raw_integral,
        residual: last.residual,
        level: max,
    })
}

fn two_gamma_eps_rp2(config: &RunConfig, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    let sig = ParitySignature::gammas_then_trivial(2, 1);
    let secs = (0..3)
        .map(|_| EquivariantSection::random(3, &sig, SECTION_DEGREE, rng))
        .collect::<Result<Vec<_>>>()?;
    let mesh = icosphere(config.mesh_level)?;
    let rank_drop = rank_drop_search_rp2(&secs, &mesh)?;
    let tol = config.tol("rank-drop");
    let tol_deg = CERTIFY_RESIDUAL;
    let mut flags = Vec::new();
    if rank_drop.warning {
        flags.push(format!("small positive minimum {:e}", rank_drop.value));
    }
    let (rho, column_zero) = match extract_rho_maps(&secs, &mesh)? {
        RhoExtraction::RankDrop {
            point,
            column,
            norm,
        } => (
            None,
            Some(ColumnZero {
                point,
                column,
                norm,
            }),
        ),
        RhoExtraction::Maps { rho: [r1, r2], .. } => {
            let level = config.mesh_level;
            let d1 = cross_checked_degree(&r1, level, tol_deg)?;
            let d2 = cross_checked_degree(&r2, level, tol_deg)?;
            let neg = cross_checked_degree(&r2.clone().negated(), level, tol_deg)?;
            let (diff, sum) = min_separation(&r1, &r2, &mesh)?;
            let trace = RhoTrace {
                degrees: [d1.rounded, d2.rounded],
                residuals: [d1.residual, d2.residual],
                mesh_levels: [
                    d1.mesh_level.unwrap_or(level),
                    d2.mesh_level.unwrap_or(level),
                ],
                both_odd: d1.rounded % 2 != 0 && d2.rounded % 2 != 0,
                equal: d1.rounded == d2.rounded,
                negated_degree: neg.rounded,
                antipode_defects: [
                    check_antipode_preserving(&r1, &mesh)?,
                    check_antipode_preserving(&r2, &mesh)?,
                ],
                separation: [diff, sum],
            };
            (Some(trace), None)
        }
    };
    let odd = rho.as_ref().is_none_or(|r| r.both_odd);
    if !odd {
        flags.push("column-map degrees are not both odd".into());
    }
    let pass = rank_drop.value < tol && odd;
    let csv = sigma_scan_csv(&mesh, |s| {
        section_matrix(&secs, s)
            .and_then(|m| smallest_singular_value(&m))
            .unwrap_or(f64::NAN)
    });
    let results = Rp2Results {
        case: "two-gamma-eps-rp2",
        seed: config.seed,
        rank_drop,
        rank_drop_tolerance: tol,
        rho,
        column_zero,
    };
    Ok(pass_or(
        pass,
        Results::Bundle(BundleResults::Rp2(results)),
        flags,
        Some(csv),
        EXIT_SEARCH_FAILURE,
    ))
}

fn rh(n: u64) -> Result<Outcome> {
    let (rho, decomposition) = radon_hurwitz(n)?;
    Ok(pass_or(
        true,
        Results::Rh(RhResults {
            n,
            rho,
            decomposition,
        }),
        vec![],
        None,
        EXIT_SEARCH_FAILURE,
    ))
}
