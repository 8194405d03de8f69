//! Input handling, the analysis pipelines behind the command-line verbs, and
//! the JSON report.

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::gallery::{generate, GalleryShape, GeneratorSpec, ShapeClass};
use crate::hat::{complete, glue, is_diagonally_dominant, lambda_g_analytic};
use crate::lambda::{lambda_p, regge_hessian, remark_cross_check, RemarkCheck};
use crate::mesh::{build_star_complex, load_mesh, weak_convexity_check, write_off, Convexity, MeshFormat};
use crate::projective::{homotopy_signature, polyhedron_to_hat, HomotopyReport};
use crate::rigidity::flex_report;
use crate::{CurvatureMatrix, Error, FlexReport, Hat, Tolerances, TriMesh};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_VERDICT: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;

/// Entrywise agreement required between independent derivative estimates.
pub const CROSS_CHECK: f64 = 2e-6;

/// Smallest star-complex aspect at which `analyze --apex auto` judges an
/// apex; thinner cones leave the finite-difference stencils unreliable.
pub const MIN_ASPECT: f64 = 2e-2;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputInfo {
    /// `file` or `generator`.
    pub kind: String,
    pub source: String,
    pub seed: Option<u64>,
    /// SHA-256 of the file bytes, or of the OFF text of a generated mesh.
    pub digest: String,
}

/// A loaded mesh and, for generated input, the gallery shape.
#[derive(Debug, Clone)]
pub struct LoadedInput {
    pub info: InputInfo,
    pub mesh: TriMesh,
    pub shape: Option<GalleryShape>,
}

fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

pub fn load_file(path: &Path, tol: &Tolerances) -> crate::Result<LoadedInput> {
    let format = MeshFormat::from_extension(path)
        .ok_or_else(|| Error::Parse { line: 0, msg: format!("unknown mesh extension: {}", path.display()) })?;
    let bytes = std::fs::read(path).map_err(|e| Error::Parse { line: 0, msg: format!("{}: {e}", path.display()) })?;
    let mesh = load_mesh(bytes.as_slice(), format, tol)?;
    let info =
        InputInfo { kind: "file".into(), source: path.display().to_string(), seed: None, digest: sha256_hex(&bytes) };
    Ok(LoadedInput { info, mesh, shape: None })
}

pub fn load_generated(spec: &str, seed: u64, tol: &Tolerances) -> crate::Result<LoadedInput> {
    let spec: GeneratorSpec = spec.parse()?;
    let shape = generate(&spec, seed, tol)?;
    let info = InputInfo {
        kind: "generator".into(),
        source: shape.spec.to_string(),
        seed: Some(seed),
        digest: sha256_hex(write_off(&shape.mesh).as_bytes()),
    };
    Ok(LoadedInput { info, mesh: shape.mesh.clone(), shape: Some(shape) })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeshStats {
    pub vertices: usize,
    pub edges: usize,
    pub faces: usize,
    pub closed: bool,
    pub volume: Option<f64>,
}

impl MeshStats {
    fn of(mesh: &TriMesh) -> Self {
        Self {
            vertices: mesh.num_vertices(),
            edges: mesh.edges().len(),
            faces: mesh.triangles().len(),
            closed: mesh.is_closed(),
            volume: mesh.is_closed().then(|| mesh.volume()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApexResult {
    pub apex: usize,
    pub star_shaped: bool,
    /// Worst simplex aspect of the star complex.
    pub aspect: Option<f64>,
    /// Whether this apex counts toward the outcome.
    pub judged: bool,
    pub error: Option<String>,
    pub interior_edges: Vec<usize>,
    pub lambda: Option<CurvatureMatrix>,
    /// `max |Hess(−F) − Λ_P|`
    pub regge_residual: Option<f64>,
    pub remark: Option<RemarkCheck>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepReport {
    pub vertices: [usize; 4],
    pub upper: (usize, usize),
    pub lower: (usize, usize),
    pub eigenvalues: Vec<f64>,
    pub rank_one_psd: bool,
    /// `max |Λ_before − Λ_after − scatter(M_S)|` from independent recomputation.
    pub update_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompletionReport {
    pub steps: Vec<StepReport>,
    pub lambda_convex: CurvatureMatrix,
    /// `max |Λ_input − Λ_convex − Σ scatter(M_S)|`
    pub chain_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HatReport {
    pub apex: Option<usize>,
    pub boundary: Vec<usize>,
    pub interior: Vec<usize>,
    pub convex: bool,
    pub lambda_h: CurvatureMatrix,
    pub lambda_analytic: Option<CurvatureMatrix>,
    /// `max |fd − analytic| / max |analytic|`
    pub analytic_residual: Option<f64>,
    pub diagonally_dominant: Option<bool>,
    pub constrained_rigidity: FlexReport,
    pub completion: Option<CompletionReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Outcome {
    pub pass: bool,
    pub exit_code: i32,
    pub failures: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub tool: String,
    pub command: String,
    pub input: Option<InputInfo>,
    pub tolerances: Tolerances,
    pub mesh: Option<MeshStats>,
    pub convexity: Option<Convexity>,
    pub rigidity: Option<FlexReport>,
    pub apices: Vec<ApexResult>,
    pub hat: Option<HatReport>,
    pub homotopy: Option<HomotopyReport>,
    pub outcome: Outcome,
}

impl AnalysisReport {
    fn new(command: &str, input: Option<&LoadedInput>, tol: &Tolerances) -> Self {
        Self {
            tool: format!("polyrigid {}", env!("CARGO_PKG_VERSION")),
            command: command.into(),
            input: input.map(|i| i.info.clone()),
            tolerances: *tol,
            mesh: input.map(|i| MeshStats::of(&i.mesh)),
            convexity: None,
            rigidity: None,
            apices: Vec::new(),
            hat: None,
            homotopy: None,
            outcome: Outcome { pass: true, exit_code: EXIT_PASS, failures: Vec::new() },
        }
    }

    /// Records a failure; the exit code keeps the most severe class, with
    /// internal inconsistencies above input errors above verdict failures.
    pub fn fail(&mut self, code: i32, msg: impl Into<String>) {
        let rank = |c: i32| match c {
            EXIT_INTERNAL => 3,
            EXIT_INPUT => 2,
            EXIT_VERDICT => 1,
            _ => 0,
        };
        if rank(code) > rank(self.outcome.exit_code) {
            self.outcome.exit_code = code;
        }
        self.outcome.pass = false;
        self.outcome.failures.push(msg.into());
    }

    /// Report for input that could not be loaded.
    pub fn input_error(command: &str, tol: &Tolerances, err: &Error) -> Self {
        let mut r = Self::new(command, None, tol);
        r.fail(EXIT_INPUT, err.to_string());
        r
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Exit code for an error raised by a pipeline stage.
fn error_code(e: &Error) -> i32 {
    match e {
        Error::Inconsistency(_) | Error::Stalled(_) => EXIT_INTERNAL,
        Error::Parse { .. } | Error::Topology { .. } | Error::Degenerate { .. } | Error::Generator(_) => EXIT_INPUT,
        _ => EXIT_VERDICT,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ApexChoice {
    Auto,
    Index(usize),
}

/// Weak convexity, rigidity and, per apex, the star decomposition, Λ_P, the
/// Regge cross-check and the flex-count comparison.
pub fn cmd_analyze(input: &LoadedInput, apex: ApexChoice, tol: &Tolerances) -> AnalysisReport {
    let mut r = AnalysisReport::new("analyze", Some(input), tol);
    let mesh = &input.mesh;
    if !mesh.is_closed() {
        r.fail(EXIT_INPUT, "analyze needs a closed surface");
        return r;
    }
    let apices: Vec<usize> = match apex {
        ApexChoice::Auto => (0..mesh.num_vertices()).collect(),
        ApexChoice::Index(k) if k < mesh.num_vertices() => vec![k],
        ApexChoice::Index(k) => {
            r.fail(EXIT_INPUT, format!("apex {k} out of range"));
            return r;
        }
    };
    r.convexity = Some(weak_convexity_check(mesh, tol));
    match flex_report(mesh, None, tol) {
        Ok(f) => {
            if !f.is_rigid() {
                r.fail(EXIT_VERDICT, format!("flexible: kernel dimension {}", f.kernel_dim));
            }
            r.rigidity = Some(f);
        }
        Err(e) => r.fail(error_code(&e), format!("rigidity: {e}")),
    }
    let explicit = apex != ApexChoice::Auto;
    for a in apices {
        let mut res = analyze_apex(mesh, a, tol);
        res.judged = explicit || (res.star_shaped && res.aspect.is_some_and(|q| q >= MIN_ASPECT));
        if !res.judged {
            r.apices.push(res);
            continue;
        }
        match &res.error {
            Some(e) if !res.star_shaped => r.fail(EXIT_VERDICT, format!("apex {a}: {e}")),
            Some(e) => r.fail(EXIT_INTERNAL, format!("apex {a}: {e}")),
            None => {}
        }
        if let Some(l) = &res.lambda {
            if !l.is_positive_definite() {
                r.fail(EXIT_VERDICT, format!("apex {a}: Λ_P has signature {:?}", l.signature));
            }
        }
        if let Some(x) = res.regge_residual {
            if !(x <= CROSS_CHECK) {
                r.fail(EXIT_INTERNAL, format!("apex {a}: Regge Hessian differs from Λ_P by {x:e}"));
            }
        }
        if let Some(c) = &res.remark {
            if !c.consistent {
                r.fail(
                    EXIT_INTERNAL,
                    format!("apex {a}: {} flexes but Λ_P kernel {}", c.nontrivial_flexes, c.lambda_kernel),
                );
            }
        }
        r.apices.push(res);
    }
    if !explicit && !r.apices.iter().any(|a| a.judged) {
        r.fail(EXIT_VERDICT, format!("no apex is star-shaped with aspect at least {MIN_ASPECT}"));
    }
    r
}

fn analyze_apex(mesh: &TriMesh, apex: usize, tol: &Tolerances) -> ApexResult {
    let mut res = ApexResult {
        apex,
        star_shaped: false,
        aspect: None,
        judged: false,
        error: None,
        interior_edges: Vec::new(),
        lambda: None,
        regge_residual: None,
        remark: None,
    };
    let sc = match build_star_complex(mesh, apex, tol) {
        Ok(sc) => sc,
        Err(e) => {
            res.error = Some(e.to_string());
            return res;
        }
    };
    res.star_shaped = true;
    res.aspect = Some(sc.aspect());
    res.interior_edges = sc.interior_edges().to_vec();
    let run = || -> crate::Result<(CurvatureMatrix, f64, RemarkCheck)> {
        let lam = lambda_p(&sc)?;
        let hess = regge_hessian(&sc)?;
        let residual = if lam.dim() == 0 { 0.0 } else { (hess - lam.matrix()).amax() };
        let remark = remark_cross_check(mesh, &sc, tol)?;
        Ok((lam, residual, remark))
    };
    match run() {
        Ok((lam, residual, remark)) => {
            res.lambda = Some(lam);
            res.regge_residual = Some(residual);
            res.remark = Some(remark);
        }
        Err(e) => res.error = Some(e.to_string()),
    }
    res
}

/// Options of the `hat` verb.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct HatOptions {
    pub apex: Option<usize>,
    pub complete: bool,
    pub homotopy: Option<Vec<f64>>,
}

/// The hat of the input (or the input hat itself): its Λ, the cotangent
/// matrix when convex, constrained rigidity, and optionally the completion
/// chain and the homotopy table.
pub fn cmd_hat(input: &LoadedInput, opts: &HatOptions, tol: &Tolerances) -> AnalysisReport {
    let mut r = AnalysisReport::new("hat", Some(input), tol);
    let (hat, apex) = match resolve_hat(input, opts.apex, tol) {
        Ok(x) => x,
        Err((code, msg)) => {
            r.fail(code, msg);
            return r;
        }
    };
    if let Err(e) = hat_pipeline(&mut r, &hat, apex, opts.complete) {
        r.fail(error_code(&e), e.to_string());
    }
    if let Some(ts) = &opts.homotopy {
        match apex {
            None => r.fail(EXIT_INPUT, "homotopy needs a closed polyhedron and an apex"),
            Some(a) => match homotopy_signature(&input.mesh, a, ts, tol) {
                Ok(h) => {
                    if !h.constant {
                        r.fail(EXIT_VERDICT, "homotopy signature is not constant");
                    }
                    if h.rows.iter().any(|row| row.signature.negative + row.signature.zero > 0) {
                        r.fail(EXIT_VERDICT, "Λ_P is not positive definite along the homotopy");
                    }
                    r.homotopy = Some(h);
                }
                Err(e) => r.fail(error_code(&e), format!("homotopy: {e}")),
            },
        }
    }
    r
}

/// The hat analysed by `cmd_hat`: the input hat itself, or the image of a
/// closed input under the apex-to-infinity map. Errors carry an exit code.
pub fn resolve_hat(
    input: &LoadedInput,
    apex: Option<usize>,
    tol: &Tolerances,
) -> Result<(Hat, Option<usize>), (i32, String)> {
    if !input.mesh.is_closed() {
        if apex.is_some() {
            return Err((EXIT_INPUT, "an apex only applies to closed polyhedra".into()));
        }
        let hat = match input.shape.as_ref().and_then(|s| s.hat.clone()) {
            Some(h)
                if matches!(
                    input.shape.as_ref().map(|s| s.class),
                    Some(ShapeClass::ConvexHat | ShapeClass::WeaklyConvexHat)
                ) =>
            {
                h
            }
            _ => Hat::new(input.mesh.clone(), tol).map_err(|e| (EXIT_INPUT, e.to_string()))?,
        };
        return Ok((hat, None));
    }
    let apex = apex
        .or_else(|| input.shape.as_ref().and_then(|s| s.apex))
        .ok_or_else(|| (EXIT_INPUT, "hat on a closed polyhedron needs --apex".to_string()))?;
    if apex >= input.mesh.num_vertices() {
        return Err((EXIT_INPUT, format!("apex {apex} out of range")));
    }
    let (hat, _) = polyhedron_to_hat(&input.mesh, apex, tol).map_err(|e| (error_code(&e), e.to_string()))?;
    Ok((hat, Some(apex)))
}

fn hat_pipeline(r: &mut AnalysisReport, hat: &Hat, apex: Option<usize>, do_complete: bool) -> crate::Result<()> {
    let tol = *hat.tolerances();
    let lambda_h = hat.generalized()?.lambda_g_fd()?;
    if !lambda_h.is_positive_definite() {
        r.fail(EXIT_VERDICT, format!("Λ_H has signature {:?}", lambda_h.signature));
    }
    let (mut lambda_analytic, mut analytic_residual, mut dominant) = (None, None, None);
    if hat.is_convex() {
        let an = lambda_g_analytic(hat)?;
        let scale = an.max_abs_entry();
        let res = if lambda_h.dim() == 0 { 0.0 } else { (lambda_h.matrix() - an.matrix()).amax() / scale };
        if !(res <= 1e-6) {
            r.fail(EXIT_INTERNAL, format!("cotangent matrix differs from finite differences by {res:e} (relative)"));
        }
        let dd = is_diagonally_dominant(&an);
        if !dd {
            r.fail(EXIT_VERDICT, "cotangent matrix is not diagonally dominant");
        }
        lambda_analytic = Some(an);
        analytic_residual = Some(res);
        dominant = Some(dd);
    }
    let constrained = flex_report(hat.mesh(), Some(hat.boundary()), &tol)?;
    if !constrained.is_rigid() {
        r.fail(
            EXIT_VERDICT,
            format!("hat with fixed boundary heights is flexible (kernel {})", constrained.kernel_dim),
        );
    }
    let completion = if do_complete { Some(completion_report(r, hat, &lambda_h)?) } else { None };
    r.hat = Some(HatReport {
        apex,
        boundary: hat.boundary().to_vec(),
        interior: hat.interior().to_vec(),
        convex: hat.is_convex(),
        lambda_h,
        lambda_analytic,
        analytic_residual,
        diagonally_dominant: dominant,
        constrained_rigidity: constrained,
        completion,
    });
    Ok(())
}

fn completion_report(
    r: &mut AnalysisReport,
    hat: &Hat,
    lambda_input: &CurvatureMatrix,
) -> crate::Result<CompletionReport> {
    let done = complete(hat)?;
    let labels = hat.interior();
    let mut current = hat.clone();
    let mut before = lambda_input.clone();
    let mut total = nalgebra::DMatrix::zeros(labels.len(), labels.len());
    let mut steps = Vec::new();
    for (k, step) in done.steps.iter().enumerate() {
        let (next, _) = glue(&current, step.lower)?;
        let after = next.generalized()?.lambda_g_fd()?;
        let scattered = step.scatter(labels);
        let update_residual =
            if labels.is_empty() { 0.0 } else { (before.matrix() - after.matrix() - &scattered).amax() };
        if !step.is_rank_one_psd() {
            r.fail(EXIT_VERDICT, format!("step {k}: M_S has signature {:?}", step.m_s.signature));
        }
        if !(update_residual <= CROSS_CHECK) {
            r.fail(EXIT_INTERNAL, format!("step {k}: update law residual {update_residual:e}"));
        }
        total += scattered;
        steps.push(StepReport {
            vertices: step.vertices,
            upper: step.upper,
            lower: step.lower,
            eigenvalues: step.eigenvalues().to_vec(),
            rank_one_psd: step.is_rank_one_psd(),
            update_residual,
        });
        current = next;
        before = after;
    }
    let chain_residual = if labels.is_empty() { 0.0 } else { (lambda_input.matrix() - before.matrix() - total).amax() };
    Ok(CompletionReport { steps, lambda_convex: before, chain_residual })
}

/// Summary of a generated shape for `generate --format json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShapeSummary {
    pub spec: String,
    pub seed: u64,
    pub class: ShapeClass,
    pub apex: Option<usize>,
    pub vertices: Vec<[f64; 3]>,
    pub triangles: Vec<[usize; 3]>,
    pub excavations: Vec<[usize; 4]>,
}

impl ShapeSummary {
    pub fn of(shape: &GalleryShape) -> Self {
        Self {
            spec: shape.spec.to_string(),
            seed: shape.seed,
            class: shape.class,
            apex: shape.apex,
            vertices: shape.mesh.vertices().iter().map(|v| [v.x, v.y, v.z]).collect(),
            triangles: shape.mesh.triangles().to_vec(),
            excavations: shape.history.iter().map(|s| s.vertices).collect(),
        }
    }
}

/// Field-level description of the report document.
pub fn report_schema() -> serde_json::Value {
    serde_json::json!({
        "title": "polyrigid analysis report",
        "type": "object",
        "fields": {
            "tool": "string: tool name and version",
            "command": "string: analyze | hat",
            "input": "object|null: {kind: file|generator, source, seed, digest (sha256 hex)}",
            "tolerances": "object: area, vol, hull, angle, rel, len, normal, rank, eig, sym",
            "mesh": "object|null: {vertices, edges, faces, closed, volume}",
            "convexity": "object|null: {verdict: weakly_convex} | {verdict: not, witness, margin}",
            "rigidity": "FlexReport|null",
            "apices": "array of {apex, star_shaped, aspect, judged, error, interior_edges, lambda: CurvatureMatrix, regge_residual, remark}; with --apex auto only star-shaped apices with aspect >= 0.02 are judged",
            "hat": "object|null: {apex, boundary, interior, convex, lambda_h, lambda_analytic, analytic_residual, diagonally_dominant, constrained_rigidity, completion}",
            "homotopy": "object|null: {apex, rows: [{t, eigenvalues, signature}], constant, hat_eigenvalues, hat_signature}",
            "outcome": "object: {pass, exit_code (0 pass, 1 verdict failure, 2 input error, 3 internal inconsistency), failures}"
        },
        "types": {
            "CurvatureMatrix": "{labels, entries (row-major), symmetry_defect, eigenvalues (ascending), signature {positive, zero, negative}, eig_cut}",
            "FlexReport": "{rows, cols, rank, kernel_dim, trivial_dim, verdict, sigma_max, rank_cut, sigma_kept, sigma_dropped, gap, trivial_residual, kernel}",
            "completion": "{steps: [{vertices, upper, lower, eigenvalues, rank_one_psd, update_residual}], lambda_convex, chain_residual}"
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn octahedron_auto() {
        let input = load_generated("octa", 0, &tol()).unwrap();
        let r = cmd_analyze(&input, ApexChoice::Auto, &tol());
        assert_eq!(r.outcome.exit_code, EXIT_PASS, "{:?}", r.outcome);
        assert_eq!(r.apices.len(), 6);
        assert!(r.apices.iter().all(|a| a.lambda.as_ref().unwrap().is_positive_definite()));
    }

    #[test]
    fn flat_vertex_control() {
        let input = load_generated("flat_vertex_tetra", 0, &tol()).unwrap();
        let r = cmd_analyze(&input, ApexChoice::Auto, &tol());
        assert_eq!(r.outcome.exit_code, EXIT_VERDICT);
        assert_eq!(r.rigidity.as_ref().unwrap().kernel_dim, 7);
        let star: Vec<&ApexResult> = r.apices.iter().filter(|a| a.star_shaped).collect();
        assert!(!star.is_empty());
        for a in star {
            assert_eq!(a.lambda.as_ref().unwrap().kernel_dim(), 1);
            assert!(a.remark.unwrap().consistent);
        }
    }

    #[test]
    fn auto_mode_judges_well_shaped_stars() {
        let input = load_generated("star_pullback", 3, &tol()).unwrap();
        let r = cmd_analyze(&input, ApexChoice::Auto, &tol());
        assert_eq!(r.outcome.exit_code, EXIT_PASS, "{:?}", r.outcome);
        for a in &r.apices {
            assert_eq!(a.judged, a.star_shaped && a.aspect.unwrap() >= MIN_ASPECT);
        }
        assert!(r.apices[input.shape.as_ref().unwrap().apex.unwrap()].judged);
        assert!(r.apices.iter().any(|a| !a.judged));
        let outside = r.apices.iter().find(|a| !a.star_shaped).unwrap().apex;
        let single = cmd_analyze(&input, ApexChoice::Index(outside), &tol());
        assert_eq!(single.outcome.exit_code, EXIT_VERDICT);
        assert!(single.apices[0].judged);
    }

    #[test]
    fn report_round_trips() {
        let input = load_generated("icosa", 0, &tol()).unwrap();
        let r = cmd_analyze(&input, ApexChoice::Index(3), &tol());
        let back: AnalysisReport = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(back, r);
        assert_eq!(back.to_json(), r.to_json());
    }

    #[test]
    fn hat_on_octahedron_is_already_convex() {
        let input = load_generated("octa", 0, &tol()).unwrap();
        let opts = HatOptions { apex: Some(0), complete: true, homotopy: None };
        let r = cmd_hat(&input, &opts, &tol());
        assert_eq!(r.outcome.exit_code, EXIT_PASS, "{:?}", r.outcome);
        assert!(r.hat.unwrap().completion.unwrap().steps.is_empty());
    }

    #[test]
    fn out_of_range_apex_is_input_error() {
        let input = load_generated("tetra", 0, &tol()).unwrap();
        assert_eq!(cmd_analyze(&input, ApexChoice::Index(9), &tol()).outcome.exit_code, EXIT_INPUT);
    }
}
