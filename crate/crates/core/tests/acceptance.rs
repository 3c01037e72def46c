//! End-to-end acceptance checks. Each criterion prints one line
//! `criterion N: PASS|FAIL (...)`; the process fails if any criterion does.

use std::time::{Duration, Instant};

use bergman_coorbit::bergman::{
    ball_quadrature, ball_quadrature_for_degree, indices_up_to, kernel_eval, kernel_partial_sum,
    monomial_norm, HoloFunction, MultiIndex,
};
use bergman_coorbit::frames::{
    analysis, decompose, frame_bounds, gram, reconstruct_from_samples, reconstruction_error,
    riesz_lower_bound, DecomposeOptions, FrameParams, FrameSystem, ReconstructionMethod,
};
use bergman_coorbit::group::{
    cocycle_check, k_element, pairing, s_from_point, BallPoint, GroupElement,
};
use bergman_coorbit::representation::{
    coorbit_norm, fit_constant, reproducing_convolutions, wavelet_psi, zhu_radial_sweep, RepParams,
    ZhuParams,
};
use bergman_coorbit::sampling::{density_check, generate_lattice, probe_grid, PointFamily};
use bergman_coorbit::{Complex64, Error};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn random_point(rng: &mut ChaCha8Rng, n: usize, rmax: f64) -> BallPoint {
    loop {
        let v: Vec<Complex64> = (0..n)
            .map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let r2: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if r2 <= 1.0 && r2 > 0.0 {
            let s = rmax * rng.gen_range(0.0f64..1.0).sqrt() / r2.sqrt();
            return BallPoint::new(v.into_iter().map(|z| z * s).collect()).unwrap();
        }
    }
}

fn random_unitary(rng: &mut ChaCha8Rng, n: usize) -> DMatrix<Complex64> {
    let a = DMatrix::from_fn(n, n, |_, _| {
        c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    });
    a.qr().q()
}

fn random_group_element(rng: &mut ChaCha8Rng, n: usize) -> GroupElement {
    let s = s_from_point(&random_point(rng, n, 0.95)).unwrap();
    let k = k_element(&random_unitary(rng, n)).unwrap();
    s.multiply(&k)
}

fn z1(n: usize, k: u32) -> HoloFunction {
    HoloFunction::monomial(c(1.0, 0.0), MultiIndex::unit(n, 0, k))
}

fn criterion_1() -> Outcome {
    let mut worst: f64 = 0.0;
    for n in 1..=3 {
        for alpha in [0.0, 1.5, 3.0] {
            let rule = ball_quadrature_for_degree(n, alpha, 8).unwrap();
            for g in indices_up_to(n, 8) {
                let exact = monomial_norm(&g, alpha).unwrap();
                let got = rule.integrate_real(|z| {
                    g.0.iter()
                        .zip(z)
                        .map(|(&e, v)| v.norm_sqr().powi(e as i32))
                        .product()
                });
                worst = worst.max((got - exact).abs() / exact);
            }
        }
    }
    Outcome {
        pass: worst <= 1e-9,
        detail: format!("max relative error {worst:.3e} (tolerance 1e-9)"),
    }
}

fn criterion_2() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let (mut inv, mut hyp, mut coc): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for n in 1..=3 {
        let dim = n + 1;
        let mut j = DMatrix::<Complex64>::identity(dim, dim);
        for k in 0..n {
            j[(k, k)] = c(-1.0, 0.0);
        }
        for _ in 0..1000 {
            let x = random_group_element(&mut rng, n);
            let y = random_group_element(&mut rng, n);
            let jxj = &j * x.matrix().adjoint() * &j;
            let scale = x.matrix().norm().powi(2);
            inv = inv.max((x.inverse().matrix() - &jxj).norm() / scale);
            inv = inv.max((x.matrix() * &jxj - DMatrix::identity(dim, dim)).norm() / scale);
            let b2: f64 = x.b().iter().map(|v| v.norm_sqr()).sum();
            hyp = hyp.max((x.d().norm_sqr() - b2 - 1.0).abs() / x.d().norm_sqr());
            let lhs = y.inverse().multiply(&x).d().norm();
            coc = coc.max(cocycle_check(&y, &x) / lhs.max(1.0));
        }
    }
    let worst = inv.max(hyp).max(coc);
    Outcome {
        pass: worst <= 1e-12,
        detail: format!("inverse {inv:.2e}, |d|^2-|b|^2-1 {hyp:.2e}, cocycle {coc:.2e} (relative, tolerance 1e-12)"),
    }
}

fn criterion_3() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst: f64 = 0.0;
    for n in 1..=3 {
        let nf = n as f64;
        let psi = HoloFunction::one(n);
        for sigma in [nf + 0.5, nf + 1.0, 2.0 * nf + 1.0] {
            let p = RepParams::new(n, sigma).unwrap();
            for _ in 0..1000 {
                let x = s_from_point(&random_point(&mut rng, n, 0.99)).unwrap();
                let h = x.origin_image().one_minus_norm_sqr();
                let expect = h.powf(0.5 * sigma);
                worst = worst.max((wavelet_psi(&p, &psi, &x).norm() - expect).abs() / expect);
            }
        }
    }
    Outcome {
        pass: worst <= 1e-12,
        detail: format!("max relative deviation {worst:.3e} (tolerance 1e-12)"),
    }
}

fn criterion_4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut spread: f64 = 0.0;
    let mut drift: f64 = 0.0;
    let mut consts = Vec::new();
    for n in 1..=2 {
        let p = RepParams::new(n, n as f64 + 2.0).unwrap();
        let xs: Vec<GroupElement> = (0..20)
            .map(|_| s_from_point(&random_point(&mut rng, n, 0.4)).unwrap())
            .collect();
        let fs = [HoloFunction::one(n), z1(n, 1), z1(n, 2)];
        let (base, doubled) = match n {
            1 => (
                ball_quadrature(1, 1.0, 16, 32, 1).unwrap(),
                ball_quadrature(1, 1.0, 32, 64, 1).unwrap(),
            ),
            _ => (
                ball_quadrature(2, 1.0, 12, 24, 12).unwrap(),
                ball_quadrature(2, 1.0, 24, 48, 24).unwrap(),
            ),
        };
        let fit_all = |rule| -> Vec<f64> {
            let conv = reproducing_convolutions(&p, &fs, &xs, rule).unwrap();
            let mut all = Vec::new();
            let mut cs = Vec::new();
            for (j, f) in fs.iter().enumerate() {
                let lhs = &conv[j * xs.len()..(j + 1) * xs.len()];
                let rhs: Vec<Complex64> = xs.iter().map(|x| wavelet_psi(&p, f, x)).collect();
                let fit = fit_constant(lhs, &rhs);
                cs.push(fit.constant);
                for (l, r) in lhs.iter().zip(&rhs) {
                    all.push((l / r).re);
                }
            }
            all.extend(cs);
            all
        };
        let a = fit_all(&base);
        let b = fit_all(&doubled);
        let cmean = a.iter().sum::<f64>() / a.len() as f64;
        spread = spread.max(
            a.iter()
                .map(|v| (v - cmean).abs() / cmean)
                .fold(0.0, f64::max),
        );
        let ca = a[a.len() - 3..].iter().sum::<f64>() / 3.0;
        let cb = b[b.len() - 3..].iter().sum::<f64>() / 3.0;
        drift = drift.max((ca - cb).abs() / cb);
        consts.push(ca);
    }
    Outcome {
        pass: spread <= 1e-5 && drift <= 1e-7,
        detail: format!(
            "C = {:.10} (n=1), {:.10} (n=2); spread over f, x {spread:.2e} (tolerance 1e-5); order-doubling drift {drift:.2e} (tolerance 1e-7)",
            consts[0], consts[1]
        ),
    }
}

fn criterion_5() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for n in 1..=2 {
        for k in 0..10 {
            let rz = 0.75 + 0.02 * k as f64;
            let rw = (0.5 + 0.02 * k as f64) / rz;
            let th = 0.6 * k as f64;
            let (z, w) = if n == 1 {
                (
                    vec![Complex64::from_polar(rz, th)],
                    vec![Complex64::from_polar(rw, -0.3 * th)],
                )
            } else {
                let a = 0.15 * k as f64;
                let z = vec![
                    Complex64::from_polar(rz * a.cos(), th),
                    Complex64::from_polar(rz * a.sin(), 1.0),
                ];
                let w = vec![
                    Complex64::from_polar(rw * (a + 0.1).cos(), -th),
                    Complex64::from_polar(rw * (a + 0.1).sin(), 1.0 - 2.0 * th),
                ];
                (z, w)
            };
            let q = pairing(&z, &w).norm();
            let alpha = 0.0;
            let full = kernel_eval(&z, &w, alpha);
            let tail = |kk: u32| (full - kernel_partial_sum(&z, &w, alpha, kk)).norm();
            let mut kk = 20;
            while kk < 80 && tail(kk + 1) > 1e-8 * full.norm() {
                kk += 1;
            }
            let ratio = tail(kk) / tail(kk - 1);
            worst = worst.max((ratio - q).abs() / q);
            count += 1;
        }
    }
    Outcome {
        pass: worst <= 0.1,
        detail: format!("{count} points, max |ratio/|<z,w>| - 1| = {worst:.3e} (tolerance 0.1)"),
    }
}

fn criterion_6() -> Outcome {
    let radii: Vec<f64> = (1..=8).map(|k| 1.0 - 10f64.powi(-k)).collect();
    let mut lines = Vec::new();
    let mut pass = true;
    for alpha in [0.0, 1.0] {
        let v = zhu_radial_sweep(&ZhuParams::for_bergman(1, 3.0, alpha, 2.0), &radii).unwrap();
        let spread =
            v.iter().cloned().fold(0.0, f64::max) / v.iter().cloned().fold(f64::INFINITY, f64::min);
        pass &= spread < 2.0;
        lines.push(format!("alpha={alpha}: max/min {spread:.3}"));
    }
    let v = zhu_radial_sweep(&ZhuParams::for_bergman(1, 3.0, 3.5, 2.0), &radii).unwrap();
    let monotone = v.windows(2).all(|w| w[1] > w[0]);
    let growth = v[v.len() - 1] / v[0];
    pass &= monotone && growth >= 10.0;
    lines.push(format!(
        "alpha=3.5: monotone {monotone}, growth {growth:.2}x (need >= 10x)"
    ));
    Outcome {
        pass,
        detail: lines.join("; "),
    }
}

fn frame_suite(
    n: usize,
    sigma: f64,
    eps: f64,
    box_radius: f64,
    k: u32,
    tol: f64,
) -> (bool, String) {
    let params = FrameParams::new(n, sigma, 0.0, 2.0).unwrap();
    let fam = generate_lattice(eps, box_radius, n).unwrap();
    let size = fam.len();
    let sys = FrameSystem::new(params, fam, k).unwrap();
    let bounds = match frame_bounds(&sys) {
        Ok(b) => b,
        Err(e) => return (false, format!("n={n}: frame_bounds failed: {e}")),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(7 + n as u64);
    let basis = indices_up_to(n, k);
    let mut tests: Vec<HoloFunction> = basis
        .iter()
        .map(|g| HoloFunction::monomial(c(1.0, 0.0), g.clone()))
        .collect();
    for _ in 0..10 {
        tests.push(HoloFunction::from_monomials(
            n,
            basis.iter().map(|g| {
                (
                    c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
                    g.clone(),
                )
            }),
        ));
    }
    let mut rec_worst: f64 = 0.0;
    for f in &tests {
        let samples = analysis(&sys, f).unwrap();
        let rec =
            reconstruct_from_samples(&sys, &samples, ReconstructionMethod::LeastSquares).unwrap();
        rec_worst = rec_worst.max(reconstruction_error(&sys, &rec, f).unwrap());
    }
    let (res, seq) = match decompose(&sys, &z1(n, 1), &DecomposeOptions::default()) {
        Ok(d) => (d.residual, d.seq_norm),
        Err(Error::ConvergenceFailure(m)) => {
            eprintln!("decompose: {m}");
            (f64::INFINITY, f64::NAN)
        }
        Err(e) => panic!("{e}"),
    };
    let pass = bounds.a_est > 0.0 && rec_worst <= tol && res <= tol && seq.is_finite();
    (
        pass,
        format!(
            "n={n} ({size} points, eps={eps}, box={box_radius}, K={k}): A={:.3e} B={:.3e}, reconstruction {rec_worst:.2e}, decompose(z) residual {res:.2e}, seq_norm {seq:.4} (tolerance {tol:e})",
            bounds.a_est, bounds.b_est
        ),
    )
}

fn list(v: &[f64], prec: usize) -> String {
    let items: Vec<String> = v.iter().map(|x| format!("{x:.prec$e}")).collect();
    format!("[{}]", items.join(", "))
}

fn criterion_7() -> Outcome {
    let (p1, d1) = frame_suite(1, 3.0, 0.1, 1.5, 8, 1e-6);
    let (p2, d2) = frame_suite(2, 4.0, 0.2, 1.2, 5, 1e-5);
    Outcome {
        pass: p1 && p2,
        detail: format!("{d1}; {d2}"),
    }
}

fn criterion_8() -> Outcome {
    let params = FrameParams::new(1, 3.0, 0.0, 2.0).unwrap();
    let f = z1(1, 2);
    let probes = probe_grid(1, 1.2, 25).unwrap();
    let mut a_vals = Vec::new();
    let mut cover = Vec::new();
    let mut errs = Vec::new();
    for eps in [0.4, 0.2, 0.1] {
        let fam = generate_lattice(eps, 1.2, 1).unwrap();
        cover.push(density_check(&fam, 0.3, &probes));
        let sys = FrameSystem::new(params, fam, 4).unwrap();
        a_vals.push(frame_bounds(&sys).map(|b| b.a_est).unwrap_or(0.0));
        let samples = analysis(&sys, &f).unwrap();
        let rec =
            reconstruct_from_samples(&sys, &samples, ReconstructionMethod::AtomProjection).unwrap();
        errs.push(reconstruction_error(&sys, &rec, &f).unwrap());
    }
    let up = |v: &[f64]| v.windows(2).all(|w| w[1] >= w[0]);
    let pass = up(&a_vals) && up(&cover) && errs.windows(2).all(|w| w[1] <= w[0]);
    Outcome {
        pass,
        detail: format!(
            "A_est {}, coverage {}, reconstruction error {}",
            list(&a_vals, 3),
            list(&cover, 3),
            list(&errs, 3)
        ),
    }
}

fn criterion_9() -> Outcome {
    let params = FrameParams::new(1, 3.0, 0.0, 2.0).unwrap();
    let pts = [vec![c(0.1, -0.2)], vec![c(-0.35, 0.4)]];
    let xs: Vec<GroupElement> = pts
        .iter()
        .map(|p| s_from_point(&BallPoint::new(p.clone()).unwrap()).unwrap())
        .collect();
    let sys = FrameSystem::new(params, PointFamily::from_elements(1, xs).unwrap(), 2).unwrap();
    let g12 = gram(&sys).unwrap()[(0, 1)].norm();
    let bound = riesz_lower_bound(&sys).unwrap();
    let formula_err = (bound.lambda_min - (1.0 - g12)).abs();
    let dense = FrameSystem::new(params, generate_lattice(0.05, 0.5, 1).unwrap(), 2).unwrap();
    let degenerate = matches!(riesz_lower_bound(&dense), Err(Error::DegenerateFamily(_)));
    Outcome {
        pass: formula_err <= 1e-12 && degenerate,
        detail: format!(
            "lambda_min {:.15} vs 1-|G12| {:.15} (diff {formula_err:.1e}, tolerance 1e-12); eps=0.05 family degenerate: {degenerate}",
            bound.lambda_min,
            1.0 - g12
        ),
    }
}

fn criterion_10() -> Outcome {
    let n = 1;
    let (alpha, p) = (0.0, 2.0);
    let zeta = z1(n, 1);
    let rule = ball_quadrature(n, alpha, 24, 64, 1).unwrap();
    let p1 = RepParams::new(n, n as f64 + 2.0).unwrap();
    let p2 = RepParams::new(n, n as f64 + 3.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let basis = indices_up_to(n, 5);
    let mut ratios = Vec::new();
    for _ in 0..20 {
        let f = HoloFunction::from_monomials(
            n,
            basis.iter().map(|g| {
                (
                    c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
                    g.clone(),
                )
            }),
        );
        let a = coorbit_norm(&p1, &f, &zeta, alpha, p, &rule).unwrap();
        let b = coorbit_norm(&p2, &f, &zeta, alpha, p, &rule).unwrap();
        ratios.push(a / b);
    }
    let lo = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = ratios.iter().cloned().fold(0.0, f64::max);
    let cst = hi.max(1.0 / lo);
    Outcome {
        pass: cst < 10.0,
        detail: format!("ratio range [{lo:.4}, {hi:.4}], c = {cst:.4} (need < 10)"),
    }
}

fn main() {
    let criteria: [(u32, fn() -> Outcome, Duration); 10] = [
        (1, criterion_1, Duration::from_secs(30)),
        (2, criterion_2, Duration::from_secs(5)),
        (3, criterion_3, Duration::from_secs(5)),
        (4, criterion_4, Duration::from_secs(300)),
        (5, criterion_5, Duration::from_secs(10)),
        (6, criterion_6, Duration::from_secs(120)),
        (7, criterion_7, Duration::from_secs(600)),
        (8, criterion_8, Duration::from_secs(300)),
        (9, criterion_9, Duration::from_secs(5)),
        (10, criterion_10, Duration::from_secs(120)),
    ];
    let filter: Vec<u32> = std::env::args()
        .skip(1)
        .filter_map(|a| a.parse().ok())
        .collect();
    let mut failed = 0;
    for (id, run, budget) in criteria {
        if !filter.is_empty() && !filter.contains(&id) {
            continue;
        }
        let start = Instant::now();
        let out = run();
        let took = start.elapsed();
        let status = if out.pass { "PASS" } else { "FAIL" };
        let over = if took > budget {
            format!(" [over budget {budget:?}]")
        } else {
            String::new()
        };
        println!(
            "criterion {id}: {status} ({}) in {:.2}s{over}",
            out.detail,
            took.as_secs_f64()
        );
        if !out.pass {
            failed += 1;
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
