use std::path::Path;

use bergman_coorbit::bergman::{
    ball_quadrature, ball_quadrature_for_degree, indices_up_to, inner_product_exact, kernel_eval,
    kernel_partial_sum, monomial_moment_error, monomial_norm, HoloFunction, MultiIndex,
};
use bergman_coorbit::frames::{
    analysis, decompose, frame_bounds, gram, reconstruct_from_samples, reconstruction_error,
    seq_norm, synthesis, DecomposeOptions, FrameParams, FrameSystem, ReconstructionMethod,
};
use bergman_coorbit::group::{
    cocycle_check, k_element, s_coordinates_of_point, s_from_point, BallPoint, GroupElement,
    TAU_GRP, TAU_PT,
};
use bergman_coorbit::representation::{
    abs_wavelet_psi, fit_constant, reproducing_constant_closed_form, reproducing_convolutions,
    wavelet_psi,
};
use bergman_coorbit::sampling::{generate_lattice, PointFamily};
use bergman_coorbit::Complex64;
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::{terms_to_function, ExperimentConfig, FunctionFile};
use crate::error::CliError;
use crate::report::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn lattice(cfg: &ExperimentConfig) -> Result<PointFamily, CliError> {
    Ok(generate_lattice(cfg.epsilon, cfg.box_radius, cfg.n)?)
}

fn system(cfg: &ExperimentConfig) -> Result<FrameSystem, CliError> {
    let params = FrameParams::new(cfg.n, cfg.sigma, cfg.alpha, cfg.p)?;
    Ok(FrameSystem::with_atom(
        params,
        lattice(cfg)?,
        cfg.atom_function()?,
        cfg.truncation,
    )?)
}

pub fn load_function(path: &Path, n: usize) -> Result<HoloFunction, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::config("input", format!("{}: {e}", path.display())))?;
    let file: FunctionFile =
        serde_json::from_str(&text).map_err(|e| CliError::config("input", e.to_string()))?;
    if file.n != n {
        return Err(CliError::config(
            "input.n",
            format!("function has n = {}, config has n = {n}", file.n),
        ));
    }
    terms_to_function(n, &file.terms, "input.terms")
}

pub fn lattice_cmd(cfg: &ExperimentConfig, out: &Path) -> Result<Vec<String>, CliError> {
    let fam = lattice(cfg)?;
    let records = point_records(&fam);
    write_json(&out.join("lattice.json"), &records)?;
    let rows: Vec<Vec<String>> = records
        .iter()
        .map(|r| {
            let w =
                r.w.iter()
                    .map(|[a, b]| format!("{};{}", cell(*a), cell(*b)))
                    .collect::<Vec<_>>()
                    .join(" ");
            vec![
                r.index.to_string(),
                r.tvec
                    .iter()
                    .map(|t| cell(*t))
                    .collect::<Vec<_>>()
                    .join(" "),
                w,
                cell(r.one_minus_w2),
            ]
        })
        .collect();
    write_csv(
        &out.join("lattice.csv"),
        &["index", "tvec", "w", "one_minus_w2"],
        &rows,
    )?;
    Ok(vec![
        cell(cfg.epsilon),
        cell(cfg.box_radius),
        fam.len().to_string(),
        cell(fam.consistency_residual()),
    ])
}

pub const LATTICE_SUMMARY: &[&str] = &["epsilon", "box_radius", "points", "consistency_residual"];

pub fn frame_bounds_cmd(cfg: &ExperimentConfig, out: &Path) -> Result<Vec<String>, CliError> {
    let sys = system(cfg)?;
    let b = frame_bounds(&sys)?;
    let report = FrameBoundsReport {
        n: cfg.n,
        sigma: cfg.sigma,
        alpha: cfg.alpha,
        p: cfg.p,
        epsilon: cfg.epsilon,
        box_radius: cfg.box_radius,
        truncation: b.truncation,
        points: sys.len(),
        a_est: b.a_est,
        b_est: b.b_est,
        previous_a_est: b.previous.map(|v| v.0),
        previous_b_est: b.previous.map(|v| v.1),
        k_stability: b.k_stability,
    };
    write_json(&out.join("frame_bounds.json"), &report)?;
    Ok(vec![
        cell(cfg.epsilon),
        cell(cfg.box_radius),
        b.truncation.to_string(),
        sys.len().to_string(),
        cell(b.a_est),
        cell(b.b_est),
        opt_cell(b.k_stability),
    ])
}

pub const FRAME_BOUNDS_SUMMARY: &[&str] = &[
    "epsilon",
    "box_radius",
    "truncation",
    "points",
    "a_est",
    "b_est",
    "k_stability",
];

pub fn decompose_cmd(
    cfg: &ExperimentConfig,
    f: &HoloFunction,
    out: &Path,
) -> Result<Vec<String>, CliError> {
    let sys = system(cfg)?;
    let d = decompose(&sys, f, &DecomposeOptions::default())?;
    let report = DecomposeReport {
        n: cfg.n,
        sigma: cfg.sigma,
        alpha: cfg.alpha,
        p: cfg.p,
        epsilon: cfg.epsilon,
        box_radius: cfg.box_radius,
        points: sys.len(),
        residual: d.residual,
        iterations: d.iterations,
        regularization: d.regularization,
        seq_norm: d.seq_norm,
        weight_exponent: d.coefficients.weight_exponent,
    };
    write_json(&out.join("decompose.json"), &report)?;
    write_json(
        &out.join("coefficients.json"),
        &coefficient_records(&d.coefficients.values),
    )?;
    Ok(vec![
        cell(cfg.epsilon),
        cell(cfg.box_radius),
        sys.len().to_string(),
        cell(d.residual),
        d.iterations.to_string(),
        cell(d.regularization),
        cell(d.seq_norm),
    ])
}

pub const DECOMPOSE_SUMMARY: &[&str] = &[
    "epsilon",
    "box_radius",
    "points",
    "residual",
    "iterations",
    "regularization",
    "seq_norm",
];

pub fn reconstruct_cmd(
    cfg: &ExperimentConfig,
    f: &HoloFunction,
    method: ReconstructionMethod,
    out: &Path,
) -> Result<Vec<String>, CliError> {
    let sys = system(cfg)?;
    let samples = analysis(&sys, f)?;
    let rec = reconstruct_from_samples(&sys, &samples, method)?;
    let err = reconstruction_error(&sys, &rec, f)?;
    let method_name = match method {
        ReconstructionMethod::LeastSquares => "least_squares",
        ReconstructionMethod::AtomProjection => "atom_projection",
    };
    let report = ReconstructReport {
        n: cfg.n,
        sigma: cfg.sigma,
        alpha: cfg.alpha,
        epsilon: cfg.epsilon,
        box_radius: cfg.box_radius,
        truncation: cfg.truncation,
        points: sys.len(),
        method: method_name.into(),
        relative_error: err,
        function: function_terms(&rec.function),
    };
    write_json(&out.join("reconstruct.json"), &report)?;
    write_json(
        &out.join("samples.json"),
        &coefficient_records(&samples.values),
    )?;
    Ok(vec![
        cell(cfg.epsilon),
        cell(cfg.box_radius),
        cfg.truncation.to_string(),
        sys.len().to_string(),
        method_name.into(),
        cell(err),
    ])
}

pub const RECONSTRUCT_SUMMARY: &[&str] = &[
    "epsilon",
    "box_radius",
    "truncation",
    "points",
    "method",
    "relative_error",
];

fn random_point(rng: &mut ChaCha8Rng, n: usize, rmax: f64) -> BallPoint {
    let v: Vec<Complex64> = (0..n)
        .map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    let r = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt().max(1e-3);
    let s = rmax * rng.gen::<f64>();
    BallPoint::new(v.into_iter().map(|z| z * (s / r)).collect()).expect("inside the ball")
}

fn random_element(rng: &mut ChaCha8Rng, n: usize) -> Result<GroupElement, CliError> {
    let m = DMatrix::from_fn(n, n, |_, _| {
        c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    });
    let k = k_element(&m.qr().q())?;
    Ok(s_from_point(&random_point(rng, n, 0.95))?.multiply(&k))
}

fn random_poly(rng: &mut ChaCha8Rng, n: usize, k: u32) -> HoloFunction {
    HoloFunction::from_monomials(
        n,
        indices_up_to(n, k)
            .into_iter()
            .map(|g| (c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)), g)),
    )
}

struct Checks(Vec<Check>);

impl Checks {
    fn push(&mut self, name: &str, residual: f64, tolerance: f64) {
        self.0.push(Check {
            name: name.into(),
            pass: residual <= tolerance,
            residual,
            tolerance,
        });
    }
}

/// Runs the invariant suites at the configured parameters.
pub fn verify_cmd(cfg: &ExperimentConfig, out: &Path) -> Result<bool, CliError> {
    let n = cfg.n;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut checks = Checks(Vec::new());

    let xs: Vec<GroupElement> = (0..50)
        .map(|_| random_element(&mut rng, n))
        .collect::<Result<_, _>>()?;
    let zs: Vec<BallPoint> = (0..50).map(|_| random_point(&mut rng, n, 0.9)).collect();
    checks.push(
        "group.form_residual",
        xs.iter().map(|x| x.residuals().max()).fold(0.0, f64::max),
        TAU_GRP,
    );
    let mut cocycle: f64 = 0.0;
    let mut homomorphism: f64 = 0.0;
    for (i, x) in xs.iter().enumerate() {
        let y = &xs[(i + 1) % xs.len()];
        let scale = y.inverse().multiply(x).d().norm().max(1.0);
        cocycle = cocycle.max(cocycle_check(y, x) / scale);
        let lhs = x.multiply(y).act(&zs[i])?;
        let rhs = x.act(&y.act(&zs[i])?)?;
        homomorphism = homomorphism.max(lhs.distance(&rhs));
    }
    checks.push("group.cocycle", cocycle, TAU_GRP);
    checks.push("group.homomorphism", homomorphism, TAU_PT);
    let mut round_trip: f64 = 0.0;
    for w in &zs {
        let x = s_coordinates_of_point(w).embed(n)?;
        round_trip = round_trip.max(x.origin_image().distance(w));
    }
    checks.push("group.s_round_trip", round_trip, TAU_PT);

    let rule = ball_quadrature(
        n,
        cfg.alpha,
        cfg.quadrature.radial,
        cfg.quadrature.phase,
        cfg.quadrature.modulus,
    )?;
    checks.push(
        "bergman.quadrature_normalisation",
        (rule.weights().iter().sum::<f64>() - 1.0).abs(),
        1e-12,
    );
    let exact = ball_quadrature_for_degree(n, cfg.alpha, 4)?;
    checks.push(
        "bergman.monomial_moments",
        monomial_moment_error(&exact, 4),
        1e-9,
    );
    let a = n as f64 + 1.0 + cfg.alpha;
    let k = 30u32;
    let coeff: f64 = (0..=k).map(|j| (a + j as f64) / (j as f64 + 1.0)).product();
    let growth = ((a + k as f64 + 1.0) / (k as f64 + 2.0)).max(1.0);
    let mut tail: f64 = 0.0;
    for (z, w) in zs.iter().zip(zs.iter().rev()) {
        let q = z.norm() * w.norm();
        let full = kernel_eval(z.coords(), w.coords(), cfg.alpha);
        let part = kernel_partial_sum(z.coords(), w.coords(), cfg.alpha, k);
        let bound = coeff * q.powi(k as i32 + 1) / (1.0 - q * growth) + 1e-13 * full.norm();
        tail = tail.max((full - part).norm() / bound);
    }
    checks.push("bergman.kernel_tail_bound", tail, 1.0);

    let params = FrameParams::new(n, cfg.sigma, cfg.alpha, cfg.p)?;
    let rep = params.rep();
    let f = random_poly(&mut rng, n, 3);
    let mut modulus: f64 = 0.0;
    for x in &xs {
        let w = x.origin_image();
        let expect = w.one_minus_norm_sqr().powf(cfg.sigma / 2.0) * f.eval_at(&w).norm();
        modulus = modulus.max((wavelet_psi(&rep, &f, x).norm() - expect).abs() / expect.max(1.0));
        modulus = modulus.max((abs_wavelet_psi(&rep, &f, &w) - expect).abs() / expect.max(1.0));
    }
    checks.push("representation.psi_wavelet_modulus", modulus, 1e-12);

    if n <= 2 {
        let beta = rep.alpha();
        let conv_rule = if n == 1 {
            ball_quadrature(1, beta, 16, 32, 1)?
        } else {
            ball_quadrature(2, beta, 12, 24, 12)?
        };
        let sx: Vec<GroupElement> = (0..10)
            .map(|_| s_from_point(&random_point(&mut rng, n, 0.4)))
            .collect::<Result<_, _>>()?;
        let fs = [
            HoloFunction::one(n),
            HoloFunction::monomial(c(1.0, 0.0), MultiIndex::unit(n, 0, 1)),
        ];
        let conv = reproducing_convolutions(&rep, &fs, &sx, &conv_rule)?;
        let closed = reproducing_constant_closed_form(&rep);
        let mut dev: f64 = 0.0;
        for (j, g) in fs.iter().enumerate() {
            let rhs: Vec<Complex64> = sx.iter().map(|x| wavelet_psi(&rep, g, x)).collect();
            let fit = fit_constant(&conv[j * sx.len()..(j + 1) * sx.len()], &rhs);
            dev = dev
                .max(fit.max_rel_residual)
                .max((fit.constant - closed).abs() / closed);
        }
        checks.push("representation.reproducing_constant", dev, 1e-5);
    }

    let fam = lattice(cfg)?;
    checks.push(
        "sampling.lattice_consistency",
        fam.consistency_residual(),
        TAU_PT,
    );
    let again = lattice(cfg)?;
    checks.push(
        "sampling.lattice_determinism",
        if again == fam { 0.0 } else { 1.0 },
        0.0,
    );

    let sys = FrameSystem::with_atom(params, fam, cfg.atom_function()?, cfg.truncation)?;
    let coeffs: Vec<Complex64> = (0..sys.len())
        .map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    let g = random_poly(&mut rng, n, 3);
    let sigma = cfg.sigma;
    let a = analysis(&sys, &g)?;
    let s = synthesis(&sys, &coeffs)?;
    let lhs = inner_product_exact(&g, &s, sigma)?;
    let rhs: Complex64 = a
        .values
        .iter()
        .zip(&coeffs)
        .map(|(ai, ci)| ai * ci.conj())
        .sum();
    let scale = a.values.iter().map(|v| v.norm()).sum::<f64>().max(1.0)
        * coeffs.iter().map(|v| v.norm()).fold(0.0, f64::max);
    checks.push("frames.adjointness", (lhs - rhs).norm() / scale, 1e-9);

    if sys.len() <= 4096 {
        let gm = gram(&sys)?;
        let herm = (gm - gm.adjoint())
            .iter()
            .map(|v| v.norm())
            .fold(0.0, f64::max);
        checks.push("frames.gram_hermitian", herm, 1e-12);
        let min_eig = gm.clone().symmetric_eigenvalues().min();
        let norm = gm.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        checks.push("frames.gram_psd", (-min_eig / norm).max(0.0), 1e-10);
    }

    if cfg.p == 2.0 {
        let e = sys.params().spectral_exponent();
        let b = frame_bounds(&sys)?;
        let mut violation: f64 = 0.0;
        let mut seq_consistency: f64 = 0.0;
        let idx = indices_up_to(n, sys.truncation());
        for _ in 0..20 {
            let h = HoloFunction::from_monomials(
                n,
                idx.iter().map(|g| {
                    (
                        c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
                            / monomial_norm(g, cfg.alpha).unwrap().sqrt(),
                        g.clone(),
                    )
                }),
            );
            let norm2 = bergman_coorbit::bergman::polynomial_norm_sqr(&h, cfg.alpha)?;
            let coeffs = analysis(&sys, &h)?;
            let seq = seq_norm(&coeffs.values, sys.family(), 2.0, e)?;
            let weighted: f64 = coeffs
                .values
                .iter()
                .zip(sys.family().entries())
                .map(|(v, en)| en.one_minus_w2.powf(e) * v.norm_sqr())
                .sum::<f64>()
                .sqrt();
            seq_consistency = seq_consistency.max((seq - weighted).abs() / weighted.max(1e-300));
            let ratio = seq * seq / norm2;
            violation = violation
                .max((b.a_est - ratio) / b.a_est)
                .max((ratio - b.b_est) / b.b_est);
        }
        checks.push("frames.sandwich", violation.max(0.0), 1e-8);
        checks.push("frames.seq_norm_consistency", seq_consistency, 1e-12);
    }

    let all_pass = checks.0.iter().all(|c| c.pass);
    write_json(
        &out.join("verify.json"),
        &VerifyReport {
            all_pass,
            checks: checks.0,
        },
    )?;
    Ok(all_pass)
}
