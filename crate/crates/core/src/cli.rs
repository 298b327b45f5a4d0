//! Pipeline orchestration behind the `slitspiral` binary: input schema,
//! validation, the `plan`/`map`/`mic`/`metrics` stages and artifact writers.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::boundary::{classify_case, BoundaryCurve, Case, DiscretizedBoundary, DomainSpec, Segment};
use crate::error::{Error, ErrorClass, Result, ValidationIssue};
use crate::geometry::{BBox, Point, Region};
use crate::isoparam::{case_label, gap_mic, max_inscribed_circle, spacing_control, InscribedCircle, IsoParamFamily, SpacingOptions};
use crate::metrics::{report, str_ratio, PathReport};
use crate::slitmap::{solve_mapping, MapKind, MappingSolution, SlitArc, SolveOptions};
use crate::spiral::{plan_spiral, SpiralOptions, SpiralPath};

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_PLANNING: i32 = 3;
pub const EXIT_NUMERICAL: i32 = 4;
pub const OUT_DIR_ENV: &str = "SLITSPIRAL_OUT_DIR";
pub const SHARP_TURN_DEG: f64 = 30.0;

pub fn exit_code(err: &Error) -> i32 {
    match err.class() {
        ErrorClass::Validation => EXIT_VALIDATION,
        ErrorClass::Planning => EXIT_PLANNING,
        ErrorClass::Numerical => EXIT_NUMERICAL,
        ErrorClass::Io => EXIT_IO,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum CaseChoice {
    #[default]
    Auto,
    /// Disc slit map.
    Disc,
    /// Annular slit map around the hole holding `z1`.
    Annular,
}

/// Numerical parameters. Every field has a default, so `params` may be
/// partial or absent in the input document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Params {
    /// Samples per boundary.
    pub n: usize,
    /// Samples per iso-parameter curve.
    pub n_hat: usize,
    /// Corner grading exponent.
    pub p: u32,
    /// Tool radius `C`: the maximum path spacing.
    pub spacing: Option<f64>,
    pub epsilon: f64,
    pub case: CaseChoice,
    /// Fixed spiral start angle instead of the scan.
    pub theta0: Option<f64>,
    pub theta_steps: usize,
    pub samples_per_turn: usize,
    /// Coverage raster cell; `C/20` when absent.
    pub resolution: Option<f64>,
    /// Emit the spiral inside-out (clockwise).
    pub reverse: bool,
    pub trim: bool,
    pub seed: u64,
    /// Interior probes used by `map` for the round-trip check.
    pub probes: usize,
}

impl Default for Params {
    fn default() -> Self {
        Params {
            n: crate::boundary::DEFAULT_SAMPLES,
            n_hat: crate::isoparam::DEFAULT_CURVE_SAMPLES,
            p: crate::boundary::DEFAULT_GRADING,
            spacing: None,
            epsilon: crate::isoparam::DEFAULT_EPSILON,
            case: CaseChoice::Auto,
            theta0: None,
            theta_steps: crate::spiral::DEFAULT_THETA_STEPS,
            samples_per_turn: crate::spiral::DEFAULT_SAMPLES_PER_TURN,
            resolution: None,
            reverse: true,
            trim: true,
            seed: 0,
            probes: 200,
        }
    }
}

impl Params {
    pub fn check(&self) -> Vec<ValidationIssue> {
        let mut out = Vec::new();
        let mut bad = |m: String| out.push(ValidationIssue::new(m));
        if self.n < 16 || self.n % 2 != 0 {
            bad(format!("params.n must be even and at least 16, got {}", self.n));
        }
        if self.n_hat < 16 {
            bad(format!("params.n_hat must be at least 16, got {}", self.n_hat));
        }
        if self.p < 2 {
            bad(format!("params.p must be at least 2, got {}", self.p));
        }
        match self.spacing {
            Some(c) if c > 0.0 && c.is_finite() => {}
            Some(c) => bad(format!("params.spacing must be positive, got {c}")),
            None => {}
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            bad(format!("params.epsilon must lie in (0, 1), got {}", self.epsilon));
        }
        if let Some(t) = self.theta0 {
            if !(t > -std::f64::consts::PI && t <= std::f64::consts::PI) {
                bad(format!("params.theta0 must lie in (-pi, pi], got {t}"));
            }
        }
        if self.theta_steps == 0 {
            bad("params.theta_steps must be positive".into());
        }
        if self.samples_per_turn < 32 {
            bad(format!("params.samples_per_turn must be at least 32, got {}", self.samples_per_turn));
        }
        if let (Some(r), Some(c)) = (self.resolution, self.spacing) {
            if !(r > 0.0 && r <= c / 10.0) {
                bad(format!("params.resolution must lie in (0, C/10 = {}], got {r}", c / 10.0));
            }
        }
        out
    }

    pub fn tool_radius(&self) -> Result<f64> {
        self.spacing
            .ok_or_else(|| Error::Validation(vec![ValidationIssue::new("tool radius C missing: set params.spacing or --spacing")]))
    }

    pub fn raster(&self, c: f64) -> f64 {
        self.resolution.unwrap_or(c / 20.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputBoundary {
    pub segments: Vec<Segment>,
    /// Corner count `p_j`; one per segment joint when absent, zero for a
    /// single closed segment.
    #[serde(default)]
    pub corners: Option<usize>,
}

/// The JSON domain document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputDocument {
    pub boundaries: Vec<InputBoundary>,
    #[serde(default)]
    pub origin: Option<Point>,
    #[serde(default)]
    pub z1: Option<Point>,
    #[serde(default)]
    pub params: Params,
}

impl InputDocument {
    pub fn parse(text: &str) -> Result<InputDocument> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<InputDocument> {
        InputDocument::parse(&fs::read_to_string(path)?)
    }
}

/// A validated domain plus the warnings raised while fixing it up.
#[derive(Debug, Clone)]
pub struct ValidatedDomain {
    pub spec: DomainSpec,
    pub warnings: Vec<String>,
}

/// Structural and geometric validation of an input document. Every problem
/// is collected; boundaries running the wrong way are reversed with a warning.
pub fn validate_spec(doc: &InputDocument, params: &Params) -> Result<ValidatedDomain> {
    let mut issues = params.check();
    let mut warnings = Vec::new();
    let mut boundaries = Vec::with_capacity(doc.boundaries.len());
    for (j, b) in doc.boundaries.iter().enumerate() {
        let corners = b.corners.unwrap_or_else(|| {
            if b.segments.len() == 1 && b.segments[0].is_closed_smooth() {
                0
            } else {
                b.segments.len()
            }
        });
        let curve = BoundaryCurve {
            segments: b.segments.clone(),
            corners,
        };
        let own = curve.issues();
        if own.is_empty() {
            boundaries.push(curve);
        } else {
            issues.extend(own.into_iter().map(|m| ValidationIssue::new(m).on(j)));
        }
    }
    if doc.boundaries.len() < 2 {
        issues.push(ValidationIssue::new("domain needs an outer boundary and at least one hole"));
    }
    if !issues.is_empty() {
        return Err(Error::Validation(issues));
    }
    let mut spec = DomainSpec {
        boundaries,
        origin: doc.origin.unwrap_or(Point::new(0.0, 0.0)),
        z1: doc.z1,
        grading: params.p,
        samples: params.n,
    };
    for j in spec.normalize_orientation() {
        let which = if j == 0 { "outer boundary was clockwise" } else { "hole was counterclockwise" };
        warnings.push(format!("boundary {j}: {which}; reversed"));
    }
    if doc.origin.is_none() {
        spec.origin = default_origin(&spec);
        warnings.push(format!("no origin given; using ({:.6}, {:.6})", spec.origin.re, spec.origin.im));
    }
    let issues = spec.validate();
    if !issues.is_empty() {
        return Err(Error::Validation(issues));
    }
    for w in &warnings {
        log::warn!("{w}");
    }
    Ok(ValidatedDomain { spec, warnings })
}

/// Area centroid when it lies in the material, else the centre of the
/// largest inscribed circle.
fn default_origin(spec: &DomainSpec) -> Point {
    let centroid = spec.area_centroid();
    let outer = crate::geometry::Polygon::new(spec.dense_polygon(0));
    if outer.contains(centroid) && spec.hole_containing(centroid).is_none() {
        return centroid;
    }
    let polys: Vec<Vec<Point>> = (0..spec.boundaries.len()).map(|j| spec.dense_polygon(j)).collect();
    max_inscribed_circle(&polys).map(|m| m.center).unwrap_or(centroid)
}

/// Decide the map kind. The annular map moves the wrapped hole to index 1.
pub fn resolve_case(spec: &DomainSpec, choice: CaseChoice) -> Result<(DomainSpec, MapKind)> {
    let mut spec = spec.clone();
    let annular_hole = match choice {
        CaseChoice::Disc => None,
        CaseChoice::Auto => match classify_case(&spec)? {
            Case::Disc => None,
            Case::Annular { hole } => Some(hole),
        },
        CaseChoice::Annular => {
            let anchor = spec.z1.unwrap_or_else(|| spec.area_centroid());
            match spec.hole_containing(anchor) {
                Some(h) => Some(h),
                None => {
                    return Err(Error::Configuration(
                        "annular case needs z1 inside a hole (or an area centroid inside one)".into(),
                    ))
                }
            }
        }
    };
    match annular_hole {
        None => Ok((spec, MapKind::Disc)),
        Some(hole) => {
            let z1 = spec.z1.unwrap_or_else(|| spec.area_centroid());
            spec.relabel_hole_first(hole);
            spec.z1 = Some(z1);
            Ok((spec, MapKind::Annular { z1 }))
        }
    }
}

/// Centre the spiral winds around: the origin for the disc map, `z1` for the annulus.
pub fn spiral_center(spec: &DomainSpec, kind: MapKind) -> Point {
    match kind {
        MapKind::Disc => spec.origin,
        MapKind::Annular { z1 } => z1,
    }
}

/// Region polygons at the sampled resolution, as used by every coverage check.
pub fn sampled_region(db: &DiscretizedBoundary) -> Region {
    Region::new(
        db.boundaries[0].z.clone(),
        db.boundaries[1..].iter().map(|b| b.z.clone()).collect(),
    )
}

#[derive(Debug, Clone, Copy, Default, Serialize)]
pub struct Timings {
    pub solve: f64,
    pub spacing: f64,
    pub spiral: f64,
    pub report: f64,
    pub total: f64,
}

/// The polyline artifact. Contains no timing so repeated runs are identical.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathDocument {
    pub tool_radius: f64,
    pub center: Point,
    pub theta0: f64,
    pub reversed: bool,
    pub points: Vec<Point>,
    /// Vertices belonging to fusion blends (excluded from turning checks).
    pub blend: Vec<bool>,
}

#[derive(Debug, Clone, Serialize)]
pub struct PlanReport {
    pub case: &'static str,
    pub degenerate: bool,
    pub m: usize,
    pub n: usize,
    pub n_hat: usize,
    pub k: usize,
    pub epsilon: f64,
    pub tool_radius: f64,
    pub mapped_radii: Vec<f64>,
    pub circularity: Vec<f64>,
    pub iso_radii: Vec<f64>,
    pub gaps: Vec<InscribedCircle>,
    pub residual: InscribedCircle,
    pub theta0: f64,
    pub clearance: f64,
    pub splices: Vec<crate::spiral::Splice>,
    pub trimmed: (usize, usize),
    pub path: PathReport,
    pub str_ratio: Option<f64>,
    pub timings: Timings,
    pub warnings: Vec<String>,
}

/// Everything a `plan` run produces, before anything is written.
#[derive(Debug, Clone)]
pub struct PlanOutput {
    pub spec: DomainSpec,
    pub solution: MappingSolution,
    pub family: IsoParamFamily,
    pub spiral: SpiralPath,
    pub path: PathDocument,
    pub report: PlanReport,
}

/// Full pipeline: parameterize, solve, space, spiral, fuse, trim, measure.
pub fn plan(domain: &ValidatedDomain, params: &Params) -> Result<PlanOutput> {
    let c = params.tool_radius()?;
    let start = Instant::now();
    let (spec, kind) = resolve_case(&domain.spec, params.case)?;
    let db = DiscretizedBoundary::from_spec(&spec)?;
    let solution = solve_mapping(&db, kind, &SolveOptions::default())?;
    let t_solve = start.elapsed().as_secs_f64();
    let spacing = SpacingOptions {
        epsilon: params.epsilon,
        samples: params.n_hat,
    };
    let family = spacing_control(&solution, c, &spacing)?;
    let t_spacing = start.elapsed().as_secs_f64();
    let options = SpiralOptions {
        samples_per_turn: params.samples_per_turn,
        theta_steps: params.theta_steps,
        theta0: params.theta0,
        trim: params.trim,
        trim_resolution: params.raster(c) / c,
        reverse: params.reverse,
        ..SpiralOptions::default()
    };
    let spiral = plan_spiral(&solution, &family, &options)?;
    let t_spiral = start.elapsed().as_secs_f64();
    let center = spiral_center(&spec, kind);
    let region = sampled_region(&db);
    let path_report = report(&spiral.path, &region, c, params.raster(c), SHARP_TURN_DEG, Some(&spiral.blend), center)?;
    let t_total = start.elapsed().as_secs_f64();
    let m = spec.hole_count();
    let k = family.k();
    let str_value = if k > 0 {
        str_ratio(m, params.n, params.n_hat, k, params.epsilon, t_total).ok()
    } else {
        None
    };
    let mut warnings = domain.warnings.clone();
    if k == 0 {
        warnings.push(format!("degenerate plan: C = {c} exceeds the domain's inscribed radius; boundary-only path"));
    }
    let path = PathDocument {
        tool_radius: c,
        center,
        theta0: spiral.theta0,
        reversed: spiral.reversed,
        points: spiral.path.clone(),
        blend: spiral.blend.clone(),
    };
    let report = PlanReport {
        case: case_label(kind),
        degenerate: k == 0,
        m,
        n: params.n,
        n_hat: params.n_hat,
        k,
        epsilon: params.epsilon,
        tool_radius: c,
        mapped_radii: solution.radii.clone(),
        circularity: solution.circularity.clone(),
        iso_radii: family.radii.clone(),
        gaps: family.gaps.clone(),
        residual: family.residual,
        theta0: spiral.theta0,
        clearance: spiral.clearance,
        splices: spiral.splices.clone(),
        trimmed: spiral.trimmed,
        path: PathReport {
            str_ratio: str_value,
            ..path_report
        },
        str_ratio: str_value,
        timings: Timings {
            solve: t_solve,
            spacing: t_spacing - t_solve,
            spiral: t_spiral - t_spacing,
            report: t_total - t_spiral,
            total: t_total,
        },
        warnings,
    };
    Ok(PlanOutput {
        spec,
        solution,
        family,
        spiral,
        path,
        report,
    })
}

/// Re-score a path against a domain with the same raster the planner used.
pub fn rescore(domain: &ValidatedDomain, params: &Params, path: &PathDocument) -> Result<PathReport> {
    let (spec, _) = resolve_case(&domain.spec, params.case)?;
    let db = DiscretizedBoundary::from_spec(&spec)?;
    let region = sampled_region(&db);
    let c = path.tool_radius;
    let skip = (path.blend.len() == path.points.len()).then_some(path.blend.as_slice());
    report(&path.points, &region, c, params.raster(c), SHARP_TURN_DEG, skip, path.center)
}

#[derive(Debug, Clone, Serialize)]
pub struct MapReport {
    pub case: &'static str,
    pub n: usize,
    pub radii: Vec<f64>,
    pub circularity: Vec<f64>,
    pub slits: Vec<SlitArc>,
    pub probes: usize,
    pub roundtrip_max_error: f64,
    /// Image of every boundary sample, boundary by boundary.
    pub images: Vec<Vec<Point>>,
}

/// Solver stage only, with a seeded interior round-trip check.
pub fn map(domain: &ValidatedDomain, params: &Params) -> Result<(MappingSolution, MapReport)> {
    let (spec, kind) = resolve_case(&domain.spec, params.case)?;
    let db = DiscretizedBoundary::from_spec(&spec)?;
    let sol = solve_mapping(&db, kind, &SolveOptions::default())?;
    let probes = interior_probes(&sol, params.probes, params.seed);
    let worst = probes
        .iter()
        .filter_map(|z| {
            let w = sol.forward_eval(*z).ok()?;
            let back = sol.inverse_eval(w).ok()?;
            Some((back - z).norm())
        })
        .fold(0.0, f64::max);
    let report = MapReport {
        case: case_label(kind),
        n: sol.n,
        radii: sol.radii.clone(),
        circularity: sol.circularity.clone(),
        slits: sol.slits.clone(),
        probes: probes.len(),
        roundtrip_max_error: worst,
        images: sol.images.clone(),
    };
    Ok((sol, report))
}

/// Seeded uniform points of the region that are far enough from the boundary
/// for the Cauchy evaluation.
pub fn interior_probes(sol: &MappingSolution, count: usize, seed: u64) -> Vec<Point> {
    let bbox = BBox::of(sol.boundary_samples(0));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    let mut tries = 0;
    while out.len() < count && tries < 1000 * count.max(1) {
        tries += 1;
        let z = Point::new(
            rng.random_range(bbox.min.re..bbox.max.re),
            rng.random_range(bbox.min.im..bbox.max.im),
        );
        if sol.forward_eval(z).is_ok() {
            out.push(z);
        }
    }
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct MicReport {
    pub domain: InscribedCircle,
    pub gap: Option<(f64, f64, InscribedCircle)>,
}

/// Largest inscribed circle of the domain, and optionally of the band
/// between the preimages of `|w| = ra` and `|w| = rb`.
pub fn mic(domain: &ValidatedDomain, params: &Params, gap: Option<(f64, f64)>) -> Result<MicReport> {
    let polys: Vec<Vec<Point>> = (0..domain.spec.boundaries.len()).map(|j| domain.spec.dense_polygon(j)).collect();
    let whole = max_inscribed_circle(&polys)?;
    let gap = match gap {
        None => None,
        Some((ra, rb)) => {
            let (spec, kind) = resolve_case(&domain.spec, params.case)?;
            let sol = solve_mapping(&DiscretizedBoundary::from_spec(&spec)?, kind, &SolveOptions::default())?;
            let spacing = params.spacing.unwrap_or(whole.radius) / 10.0;
            Some((ra, rb, gap_mic(&sol, ra, rb, params.n_hat, spacing)?))
        }
    };
    Ok(MicReport { domain: whole, gap })
}

/// Deterministic pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

pub fn path_csv(points: &[Point]) -> String {
    let mut s = String::with_capacity(points.len() * 40 + 4);
    s.push_str("x,y\n");
    for p in points {
        // `{}` on f64 is locale independent and round-trips exactly
        let _ = writeln!(s, "{},{}", p.re, p.im);
    }
    s
}

fn svg_points(points: &[Point]) -> String {
    let mut s = String::with_capacity(points.len() * 24);
    for (i, p) in points.iter().enumerate() {
        if i > 0 {
            s.push(' ');
        }
        let _ = write!(s, "{:.5},{:.5}", p.re, p.im);
    }
    s
}

/// Plot of the domain, iso-parameter curves, pulled-back spiral and fused
/// path, with the mapped domain (circles, slits, mapped spiral) in an inset.
pub fn render_svg(out: &PlanOutput) -> String {
    let outer = out.solution.boundary_samples(0);
    let bbox = BBox::of(outer);
    let (w, h) = (bbox.width(), bbox.height());
    let margin = 0.05 * w.max(h);
    let (x0, y0) = (bbox.min.re - margin, bbox.min.im - margin);
    let (vw, vh) = (w + 2.0 * margin, h + 2.0 * margin);
    let inset = 0.3 * vw.min(vh);
    let stroke = 0.002 * vw.max(vh);
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="{x0:.5} {:.5} {vw:.5} {vh:.5}" width="800" height="{:.0}">"#,
        -(y0 + vh),
        800.0 * vh / vw
    );
    let _ = writeln!(s, r#"<g transform="scale(1,-1)" fill="none" stroke-width="{stroke:.5}">"#);
    let poly = |s: &mut String, pts: &[Point], closed: bool, colour: &str| {
        let tag = if closed { "polygon" } else { "polyline" };
        let _ = writeln!(s, r#"<{tag} stroke="{colour}" points="{}"/>"#, svg_points(pts));
    };
    let _ = writeln!(s, r#"<g id="domain">"#);
    poly(&mut s, outer, true, "black");
    let _ = writeln!(s, "</g>");
    let _ = writeln!(s, r#"<g id="holes">"#);
    for j in 1..out.solution.boundary_count() {
        poly(&mut s, out.solution.boundary_samples(j), true, "black");
    }
    let _ = writeln!(s, "</g>");
    let _ = writeln!(s, r#"<g id="iso-parameters">"#);
    for c in out.family.curves.iter().skip(1) {
        poly(&mut s, c, true, "#9bb");
    }
    let _ = writeln!(s, "</g>");
    let _ = writeln!(s, r#"<g id="spiral">"#);
    if !out.spiral.spiral.is_empty() {
        poly(&mut s, &out.spiral.spiral, false, "#c88");
    }
    let _ = writeln!(s, "</g>");
    let _ = writeln!(s, r#"<g id="fused-path">"#);
    poly(&mut s, &out.path.points, false, "#c00");
    let _ = writeln!(s, "</g>");
    // inset: mapped domain scaled into the top-right corner
    let (cx, cy) = (x0 + vw - 0.55 * inset, y0 + vh - 0.55 * inset);
    let scale = 0.5 * inset;
    let to_inset = |w: Point| Point::new(cx + scale * w.re, cy + scale * w.im);
    let circle = |r: f64| -> Vec<Point> {
        (0..256).map(|i| to_inset(Point::from_polar(r, std::f64::consts::TAU * i as f64 / 256.0))).collect()
    };
    let _ = writeln!(s, r#"<g id="mapped-domain">"#);
    poly(&mut s, &circle(1.0), true, "black");
    if let MapKind::Annular { .. } = out.solution.kind {
        poly(&mut s, &circle(out.solution.radii[1]), true, "black");
    }
    for slit in &out.solution.slits {
        let arc: Vec<Point> = (0..=64)
            .map(|i| to_inset(Point::from_polar(slit.radius, slit.start + slit.extent * i as f64 / 64.0)))
            .collect();
        poly(&mut s, &arc, false, "#06c");
    }
    let mapped: Vec<Point> = out.spiral.mapped.iter().map(|p| to_inset(p.w())).collect();
    if !mapped.is_empty() {
        poly(&mut s, &mapped, false, "#c00");
    }
    let _ = writeln!(s, "</g>\n</g>\n</svg>");
    s
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Svg,
    Report,
}

pub const ALL_FORMATS: [Format; 4] = [Format::Json, Format::Csv, Format::Svg, Format::Report];

/// Output directory: explicit flag, then the environment, then `./out`.
pub fn output_dir(flag: Option<PathBuf>) -> PathBuf {
    flag.or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out"))
}

/// Write the selected `plan` artifacts; returns the files written.
pub fn write_plan(out: &PlanOutput, dir: &Path, formats: &[Format]) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    for f in formats {
        let (name, body) = match f {
            Format::Json => ("path.json", to_json(&out.path)?),
            Format::Csv => ("path.csv", path_csv(&out.path.points)),
            Format::Svg => ("plot.svg", render_svg(out)),
            Format::Report => ("report.json", to_json(&out.report)?),
        };
        let file = dir.join(name);
        fs::write(&file, body)?;
        written.push(file);
    }
    Ok(written)
}

pub fn write_json<T: Serialize>(value: &T, dir: &Path, name: &str) -> Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let file = dir.join(name);
    fs::write(&file, to_json(value)?)?;
    Ok(file)
}
