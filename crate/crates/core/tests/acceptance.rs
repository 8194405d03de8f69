//! Acceptance suite: runs criteria 1 to 8 and prints one PASS/FAIL line each.
//! Exits non-zero when any criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use nalgebra::DVector;
use polyrigid::gallery;
use polyrigid::hat::{complete, compute_m_s, excavate, glue, is_diagonally_dominant, lambda_g_analytic};
use polyrigid::lambda::{lambda_p, regge_hessian, remark_cross_check};
use polyrigid::mesh::{build_star_complex, weak_convexity_check};
use polyrigid::projective::{
    build_phi, homotopy_signature, polyhedron_to_hat, transport_killing, vertical_subspace_residual, HomotopyFamily,
    KillingTransport,
};
use polyrigid::rigidity::flex_report;
use polyrigid::{CurvatureMatrix, Hat, KillingField, Tolerances, TriMesh, Vec3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<String, String>;

fn tol() -> Tolerances {
    Tolerances::default()
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn lambda_h(hat: &Hat) -> Result<CurvatureMatrix, String> {
    hat.generalized().and_then(|g| g.lambda_g_fd()).map_err(|e| e.to_string())
}

/// Weakly convex star-shaped corpus with the apices each member is judged from.
struct Member {
    name: String,
    mesh: TriMesh,
    apices: Vec<usize>,
}

fn corpus() -> Vec<Member> {
    let all = |m: &TriMesh| (0..m.num_vertices()).collect::<Vec<_>>();
    let mut out = Vec::new();
    let mut push_convex = |name: String, mesh: TriMesh| {
        let apices = all(&mesh);
        out.push(Member { name, mesh, apices });
    };
    push_convex("tetra".into(), gallery::tetrahedron());
    push_convex("octa".into(), gallery::octahedron());
    push_convex("icosa".into(), gallery::icosahedron());
    push_convex("cube".into(), gallery::cube());
    for (n, h) in [(5, 1.0), (7, 0.7)] {
        push_convex(format!("suspension n={n} h={h}"), gallery::suspension(n, h).unwrap());
    }
    for (n, seed) in [(8, 0), (10, 1), (12, 2), (16, 3)] {
        push_convex(format!("random_convex n={n} seed={seed}"), gallery::random_convex(n, seed).unwrap());
    }
    for seed in 0..6 {
        let (hat, _) = gallery::excavated_hat(6, 5, 2, seed).unwrap();
        let (mesh, apex) = gallery::star_pullback(&hat).unwrap();
        out.push(Member { name: format!("star_pullback seed={seed}"), mesh, apices: vec![apex] });
    }
    out
}

fn criterion_1() -> Check {
    let mesh = gallery::octahedron();
    let sc = build_star_complex(&mesh, 0, &tol()).map_err(|e| e.to_string())?;
    let lam = lambda_p(&sc).map_err(|e| e.to_string())?;
    ensure(lam.dim() == 1, || format!("Λ_P is {}x{}", lam.dim(), lam.dim()))?;
    let theta = |l: f64| 8.0 * ((0.5f64.sqrt()) / (2.0 - l * l / 4.0).sqrt()).asin();
    let h = 1e-5;
    let oracle = (theta(2.0 + h) - theta(2.0 - h)) / (2.0 * h);
    let got = lam.get(0, 0);
    ensure((got - 4.0).abs() <= 1e-6 && (oracle - 4.0).abs() <= 1e-6, || format!("Λ_P = {got}, closed form {oracle}"))?;
    Ok(format!("Λ_P = {got:.10}, closed form {oracle:.10}"))
}

fn criterion_2() -> Check {
    let hat = gallery::pyramid_hat();
    let lam = lambda_h(&hat)?;
    ensure(lam.dim() == 1, || format!("Λ_G is {}x{}", lam.dim(), lam.dim()))?;
    let theta = |t: f64| 8.0 * (1.0 / (2.0 * (1.5 - t * t).sqrt())).asin();
    let h = 1e-5;
    let oracle = (theta(1.0 + h) - theta(1.0 - h)) / (2.0 * h);
    let got = lam.get(0, 0);
    ensure((got - 16.0).abs() <= 1e-6 && (oracle - 16.0).abs() <= 1e-6, || {
        format!("Λ_G = {got}, closed form {oracle}")
    })?;
    Ok(format!("Λ_G = {got:.10}, closed form {oracle:.10}"))
}

fn criterion_3() -> Check {
    let t = tol();
    let (mut worst_sym, mut worst_rel, mut worst_gap) = (0.0f64, 0.0f64, f64::INFINITY);
    for seed in 0..50u64 {
        let n_boundary = 4 + (seed % 9) as usize;
        let n_interior = 1 + (seed % 15) as usize;
        let hat = gallery::convex_hat(n_boundary, n_interior, seed).map_err(|e| format!("seed {seed}: {e}"))?;
        ensure(hat.is_convex(), || format!("seed {seed}: generated hat is not convex"))?;
        let fd = lambda_h(&hat)?;
        let analytic = lambda_g_analytic(&hat).map_err(|e| e.to_string())?;
        let sym = fd.symmetry_defect;
        ensure(sym <= 1e-7, || format!("seed {seed}: symmetry defect {sym:e}"))?;
        let min = fd.min_eigenvalue().unwrap_or(f64::INFINITY);
        let gap = min / fd.eig_cut;
        ensure(min > 0.0 && gap >= 1e3, || format!("seed {seed}: min eigenvalue {min:e}, gap {gap:e} cuts"))?;
        let rel = (fd.matrix() - analytic.matrix()).amax() / analytic.max_abs_entry();
        ensure(rel <= 1e-6, || format!("seed {seed}: fd vs analytic {rel:e}"))?;
        ensure(is_diagonally_dominant(&analytic), || format!("seed {seed}: analytic matrix not diagonally dominant"))?;
        worst_sym = worst_sym.max(sym);
        worst_rel = worst_rel.max(rel);
        worst_gap = worst_gap.min(gap);
    }
    ensure(t.eig > 0.0, || "tol_eig must be positive".into())?;
    Ok(format!(
        "50 hats; symmetry ≤ {worst_sym:.1e}, analytic ≤ {worst_rel:.1e} rel, min λ ≥ {worst_gap:.1e} × eig_cut"
    ))
}

fn criterion_4() -> Check {
    let t = tol();
    let mut worst = 0.0f64;
    for seed in 0..1000u64 {
        let pts = gallery::random_flip_simplex(seed).map_err(|e| format!("seed {seed}: {e}"))?;
        let step = compute_m_s(&pts, (0, 1), (2, 3), &t).map_err(|e| format!("seed {seed}: {e}"))?;
        let ev = step.eigenvalues();
        let top = ev[3];
        ensure(step.m_s.symmetry_defect <= t.sym, || {
            format!("seed {seed}: symmetry defect {:e}", step.m_s.symmetry_defect)
        })?;
        ensure(top > 0.0 && ev[..3].iter().all(|v| v.abs() < 1e-8 * top), || {
            format!("seed {seed}: eigenvalues {ev:?}")
        })?;
        worst = worst.max(ev[..3].iter().fold(0.0f64, |m, v| m.max(v.abs())) / top);
    }
    let anchor =
        [Vec3::new(1.0, 0.0, 2.0), Vec3::new(-1.0, 0.0, 2.0), Vec3::new(0.0, 1.0, 1.0), Vec3::new(0.0, -1.0, 1.0)];
    let step = compute_m_s(&anchor, (0, 1), (2, 3), &t).map_err(|e| e.to_string())?;
    let dh = DVector::from_row_slice(&[1.0, 1.0, -1.0, -1.0]);
    let q = dh.dot(&(step.m_s.matrix() * &dh));
    ensure(q > 0.0 && step.is_rank_one_psd(), || format!("anchor quadratic value {q:e}"))?;
    Ok(format!("1000 simplices, max |λ_small|/λ_max = {worst:.1e}; anchor (+,+,−,−) value {q:.6}"))
}

fn criterion_5() -> Check {
    let mut worst = 0.0f64;
    let mut steps = 0;
    let mut chains = 0;
    for (b, i, k) in [(6, 5, 2), (8, 6, 3), (8, 8, 4), (10, 10, 5)] {
        for seed in 0..4u64 {
            let (dug, history) =
                gallery::excavated_hat(b, i, k, seed).map_err(|e| format!("({b},{i},{k}) seed {seed}: {e}"))?;
            let mut hat = gallery::convex_hat(b, i, seed).map_err(|e| e.to_string())?;
            let mut before = lambda_h(&hat)?;
            for (n, step) in history.iter().enumerate() {
                let (next, _) = excavate(&hat, step.upper).map_err(|e| e.to_string())?;
                let after = lambda_h(&next)?;
                let r = (after.matrix() - before.matrix() - step.scatter(next.interior())).amax();
                ensure(r <= 2e-6, || format!("({b},{i},{k}) seed {seed}: excavation step {n} residual {r:e}"))?;
                worst = worst.max(r);
                hat = next;
                before = after;
                steps += 1;
            }
            ensure(hat.mesh().triangles() == dug.mesh().triangles(), || {
                format!("({b},{i},{k}) seed {seed}: replay diverged")
            })?;
            let done = complete(&hat).map_err(|e| e.to_string())?;
            ensure(done.steps.len() <= 5, || {
                format!("({b},{i},{k}) seed {seed}: completion took {} steps", done.steps.len())
            })?;
            for (n, step) in done.steps.iter().enumerate() {
                let (next, _) = glue(&hat, step.lower).map_err(|e| e.to_string())?;
                let after = lambda_h(&next)?;
                let r = (before.matrix() - after.matrix() - step.scatter(next.interior())).amax();
                ensure(r <= 2e-6, || format!("({b},{i},{k}) seed {seed}: completion step {n} residual {r:e}"))?;
                worst = worst.max(r);
                hat = next;
                before = after;
                steps += 1;
            }
            ensure(hat.is_convex(), || format!("({b},{i},{k}) seed {seed}: completion is not convex"))?;
            chains += 2;
        }
    }
    Ok(format!("{chains} chains, {steps} steps, worst residual {worst:.1e}"))
}

fn criterion_6(corpus: &[Member]) -> Check {
    let t = tol();
    let mut hats = 0;
    for m in corpus {
        ensure(weak_convexity_check(&m.mesh, &t).is_weakly_convex(), || format!("{}: not weakly convex", m.name))?;
        let f = flex_report(&m.mesh, None, &t).map_err(|e| e.to_string())?;
        ensure(f.kernel_dim == 6 && f.is_rigid(), || format!("{}: kernel {}", m.name, f.kernel_dim))?;
        for &a in &m.apices {
            let sc = build_star_complex(&m.mesh, a, &t).map_err(|e| format!("{} apex {a}: {e}", m.name))?;
            let rc = remark_cross_check(&m.mesh, &sc, &t).map_err(|e| e.to_string())?;
            ensure(rc.consistent && rc.nontrivial_flexes == rc.lambda_kernel, || {
                format!("{} apex {a}: {rc:?}", m.name)
            })?;
            let (hat, _) = polyhedron_to_hat(&m.mesh, a, &t).map_err(|e| format!("{} apex {a}: {e}", m.name))?;
            let cf = flex_report(hat.mesh(), Some(hat.boundary()), &t).map_err(|e| e.to_string())?;
            ensure(cf.is_rigid(), || format!("{} apex {a}: constrained hat kernel {}", m.name, cf.kernel_dim))?;
            hats += 1;
        }
    }
    let flat = gallery::flat_vertex_tetra();
    let f = flex_report(&flat, None, &t).map_err(|e| e.to_string())?;
    ensure(f.kernel_dim == 7, || format!("flat vertex control: kernel {}", f.kernel_dim))?;
    let mut singular = 0;
    for a in 0..flat.num_vertices() {
        let Ok(sc) = build_star_complex(&flat, a, &t) else { continue };
        let lam = lambda_p(&sc).map_err(|e| e.to_string())?;
        let rc = remark_cross_check(&flat, &sc, &t).map_err(|e| e.to_string())?;
        ensure(lam.kernel_dim() >= 1, || format!("flat vertex control apex {a}: Λ_P nonsingular"))?;
        ensure(rc.consistent && rc.nontrivial_flexes == rc.lambda_kernel, || {
            format!("flat vertex control apex {a}: {rc:?}")
        })?;
        singular += 1;
    }
    ensure(singular > 0, || "flat vertex control: no star-shaped apex".into())?;
    Ok(format!(
        "{} shapes rigid, {hats} constrained hats rigid, control kernel 7 with {singular} singular Λ_P",
        corpus.len()
    ))
}

fn criterion_7(corpus: &[Member]) -> Check {
    let t = tol();
    let ts = [0.0, 0.25, 0.5, 0.75, 0.9];
    let (mut worst_regge, mut min_eig, mut runs) = (0.0f64, f64::INFINITY, 0);
    for m in corpus {
        for &a in &m.apices {
            let sc = build_star_complex(&m.mesh, a, &t).map_err(|e| format!("{} apex {a}: {e}", m.name))?;
            let lam = lambda_p(&sc).map_err(|e| format!("{} apex {a}: {e}", m.name))?;
            ensure(lam.is_positive_definite() && lam.min_eigenvalue().is_none_or(|v| v > 0.0), || {
                format!("{} apex {a}: eigenvalues {:?}", m.name, lam.eigenvalues)
            })?;
            if lam.dim() > 0 {
                let hess = regge_hessian(&sc).map_err(|e| format!("{} apex {a}: {e}", m.name))?;
                let r = (hess - lam.matrix()).amax();
                ensure(r <= 2e-6, || format!("{} apex {a}: Regge residual {r:e}", m.name))?;
                worst_regge = worst_regge.max(r);
                min_eig = min_eig.min(lam.eigenvalues[0]);
            }
            let h = homotopy_signature(&m.mesh, a, &ts, &t).map_err(|e| format!("{} apex {a}: {e}", m.name))?;
            ensure(h.constant && h.rows.iter().all(|r| r.signature == lam.signature), || {
                format!(
                    "{} apex {a}: homotopy rows {:?}",
                    m.name,
                    h.rows.iter().map(|r| r.signature).collect::<Vec<_>>()
                )
            })?;
            runs += 1;
        }
    }
    Ok(format!("{runs} (shape, apex) pairs; min λ {min_eig:.3e}, worst Regge residual {worst_regge:.1e}"))
}

fn random_unit(r: &mut ChaCha8Rng) -> Vec3 {
    loop {
        let v = Vec3::new(r.random_range(-1.0..1.0), r.random_range(-1.0..1.0), r.random_range(-1.0..1.0));
        let n = v.norm();
        if n > 0.1 && n <= 1.0 {
            return v / n;
        }
    }
}

fn criterion_8(corpus: &[Member]) -> Check {
    let t = tol();
    let mut r = ChaCha8Rng::seed_from_u64(8);
    let (mut worst_defect, mut worst_axis, mut maps) = (0.0f64, 0.0f64, 0);
    for m in corpus {
        let a = *m.apices.last().unwrap();
        let phi = build_phi(&m.mesh, a, &t).map_err(|e| format!("{} apex {a}: {e}", m.name))?;
        let o = m.mesh.vertices()[a];
        let samples: Vec<Vec3> = m
            .mesh
            .vertices()
            .iter()
            .enumerate()
            .filter(|&(v, _)| v != a)
            .flat_map(|(_, p)| [*p, o + (p - o) * 0.5])
            .collect();
        let family = HomotopyFamily::new(phi);
        let mut targets = vec![(phi.map, true)];
        for s in [0.25, 0.5, 0.9] {
            targets.push((family.at(s).map_err(|e| e.to_string())?, false));
        }
        for (map, sends_apex_to_infinity) in targets {
            let tr = KillingTransport::new(map);
            for _ in 0..100 {
                let field = KillingField::new(
                    random_unit(&mut r) * r.random_range(0.1..2.0),
                    random_unit(&mut r) * r.random_range(0.1..2.0),
                );
                let out = transport_killing(&tr, &field, &samples, &t).map_err(|e| format!("{}: {e}", m.name))?;
                ensure(out.defect <= 1e-10, || format!("{}: transported field defect {:e}", m.name, out.defect))?;
                worst_defect = worst_defect.max(out.defect);
            }
            if sends_apex_to_infinity {
                for _ in 0..100 {
                    let axis = random_unit(&mut r);
                    let field = KillingField::new(-axis.cross(&o), axis);
                    let out = transport_killing(&tr, &field, &samples, &t).map_err(|e| format!("{}: {e}", m.name))?;
                    let res = vertical_subspace_residual(&out.field);
                    ensure(out.defect <= 1e-10 && res <= 1e-10, || {
                        format!("{}: apex-axis rotation defect {:e}, subspace residual {res:e}", m.name, out.defect)
                    })?;
                    worst_axis = worst_axis.max(res);
                }
            }
            maps += 1;
        }
    }
    Ok(format!("{maps} maps; worst Killing defect {worst_defect:.1e}, worst subspace residual {worst_axis:.1e}"))
}

fn main() -> ExitCode {
    let corpus = corpus();
    let budget = |s: u64| Some(Duration::from_secs(s));
    let criteria: Vec<(&str, Option<Duration>, Box<dyn Fn() -> Check + '_>)> = vec![
        ("octahedron anchor", budget(1), Box::new(criterion_1)),
        ("pyramid hat anchor", budget(1), Box::new(criterion_2)),
        ("convex hat matrix", budget(30), Box::new(criterion_3)),
        ("flip simplex rank one", budget(30), Box::new(criterion_4)),
        ("update law on chains", budget(60), Box::new(criterion_5)),
        ("rigidity and flex count", budget(60), Box::new(|| criterion_6(&corpus))),
        ("positivity, Regge, homotopy", budget(120), Box::new(|| criterion_7(&corpus))),
        ("Killing transport", None, Box::new(|| criterion_8(&corpus))),
    ];
    let mut failed = 0;
    for (k, (name, limit, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = run();
        let elapsed = start.elapsed();
        let result = match (result, limit) {
            (Ok(_), Some(l)) if elapsed > *l => {
                Err(format!("took {:.2} s, limit {} s", elapsed.as_secs_f64(), l.as_secs()))
            }
            (r, _) => r,
        };
        let (tag, detail) = match &result {
            Ok(d) => ("PASS", d.clone()),
            Err(d) => {
                failed += 1;
                ("FAIL", d.clone())
            }
        };
        println!("criterion {} {tag} {name} [{:.2} s]: {detail}", k + 1, elapsed.as_secs_f64());
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
