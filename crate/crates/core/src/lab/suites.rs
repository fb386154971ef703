use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::config::RunConfig;
use super::report::{CheckReport, RunOutput, Table};
use crate::bss::{
    alternating_signs, calibrate, closed_omega1, closed_omega2, degeneracy_pullback_check, identity_multilinear_form,
    relation_g2_residual, relation_g3_residual, BssEngine, Calibration, TuplePointWithFrame,
};
use crate::error::{Error, Result};
use crate::gauge::{
    ce_differential, central_extension_demo, feigin_cocycle, group_coboundary, kac_moody_closed,
    lie_cocycle_from_group, mean_log_norm_sq, random_trig_algebra, trig_algebra, CentralExtension, CochainCE,
    ExtensionElement, GaugeAlgebraElement, GaugeMap, GridDomain, LoopCocycle, Mode,
};
use crate::lie::{InvariantPolynomial, RealForm};
use crate::linalg::{self, c, CMat};
use crate::local::{verify_eta_cocycle_p2, LocalEngine};
use crate::numerics::{fnv1a, signed_permutations};
use crate::sampling::{random_group, random_matrix, random_tangent};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    VerifyBss,
    VerifyEta,
    KacMoody,
    Feigin,
    Extension,
    All,
}

impl Suite {
    fn parts(self) -> Vec<Suite> {
        match self {
            Suite::All => vec![
                Suite::VerifyBss,
                Suite::VerifyEta,
                Suite::KacMoody,
                Suite::Feigin,
                Suite::Extension,
            ],
            s => vec![s],
        }
    }
}

/// Shared state of a run: the configuration and the fitted constants.
pub struct Context<'a> {
    pub cfg: &'a RunConfig,
    pub calibration: Calibration,
}

type TaskFn = fn(&Context, &mut ChaCha8Rng) -> Result<TaskOutput>;

struct Task {
    /// Name of the first report; also seeds the task's generator.
    name: &'static str,
    anchor: &'static str,
    tol: &'static str,
    run: TaskFn,
}

#[derive(Default)]
struct TaskOutput {
    reports: Vec<CheckReport>,
    tables: Vec<Table>,
}

impl TaskOutput {
    fn single(r: CheckReport) -> Self {
        Self {
            reports: vec![r],
            tables: Vec::new(),
        }
    }
}

fn tasks(suite: Suite) -> Vec<Task> {
    match suite {
        Suite::VerifyBss => vec![
            Task { name: "bss.vanishing", anchor: "omega_n = 0 for n > p", tol: "vanishing", run: bss_vanishing },
            Task { name: "bss.degeneracy", anchor: "degeneracy pullbacks of omega_n vanish", tol: "degeneracy", run: bss_degeneracy },
            Task { name: "bss.relation_g3", anchor: "alternating face sum of omega_2 on G^3", tol: "relations", run: bss_relation_g3 },
            Task { name: "bss.relation_g2", anchor: "alternating face sum of omega_1 equals d omega_2 on G^2", tol: "relations", run: bss_relation_g2 },
            Task { name: "bss.oracle", anchor: "fiber integration against closed forms", tol: "oracle", run: bss_oracle },
            Task { name: "bss.calibration_stability", anchor: "fitted normalization constant k", tol: "calibration_stability", run: bss_calibration },
        ],
        Suite::VerifyEta => vec![
            Task { name: "eta.cocycle", anchor: "d eta_0 = alternating face sum of eta_1", tol: "eta", run: eta_cocycle },
            Task { name: "eta.convergence", anchor: "eta identity residual vs quadrature degree", tol: "eta_noise", run: eta_convergence },
            Task { name: "eta.identity", anchor: "eta identity at the unit", tol: "eta", run: eta_identity },
        ],
        Suite::KacMoody => vec![
            Task { name: "km.loop_cocycle", anchor: "loop-group 2-cocycle identity", tol: "loop_cocycle", run: km_loop_cocycle },
            Task { name: "km.recovery", anchor: "differentiated loop cocycle is Kac-Moody", tol: "kac_moody", run: km_recovery },
            Task { name: "km.selection", anchor: "Fourier selection rule a + b = 0", tol: "selection", run: km_selection },
            Task { name: "km.ce_cocycle", anchor: "Kac-Moody is a Lie algebra cocycle", tol: "km_cocycle", run: km_ce },
        ],
        Suite::Feigin => vec![
            Task { name: "feigin.p2_vs_km", anchor: "degree-2 Feigin cochain equals Kac-Moody", tol: "feigin_km", run: feigin_p2 },
            Task { name: "feigin.p3.antisymmetry", anchor: "degree-3 Feigin cochain on the torus is alternating", tol: "antisymmetry", run: feigin_p3 },
        ],
        Suite::Extension => vec![
            Task { name: "ext.associativity", anchor: "central extension by the loop cocycle is associative", tol: "extension", run: ext_associativity },
            Task { name: "ext.unit", anchor: "unit of the central extension", tol: "extension", run: ext_unit },
        ],
        Suite::All => Suite::All.parts().into_iter().flat_map(tasks).collect(),
    }
}

fn task_rng(cfg: &RunConfig, name: &str) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(cfg.seed ^ fnv1a(name))
}

fn bss_engine(cfg: &RunConfig, p: usize) -> Result<BssEngine> {
    BssEngine::with_degree(InvariantPolynomial::symmetrized_trace(p), cfg.quadrature_degree.max(2 * p))
}

fn random_point(rng: &mut ChaCha8Rng, cfg: &RunConfig, n: usize, dim: usize, scale: f64) -> Vec<CMat> {
    (0..n).map(|_| random_group(rng, dim, scale, cfg.real_form)).collect()
}

fn random_frame(rng: &mut ChaCha8Rng, cfg: &RunConfig, x: &[CMat], r: usize) -> Vec<Vec<CMat>> {
    (0..r)
        .map(|_| x.iter().map(|g| random_tangent(rng, g, cfg.real_form)).collect())
        .collect()
}

/// Fits k and the ω_1 coefficient on a seeded sample set.
pub fn calibration_from(cfg: &RunConfig, rng: &mut ChaCha8Rng) -> Result<Calibration> {
    let engine = bss_engine(cfg, 2)?;
    let n = cfg.samples.calibration.max(1);
    let mut f2 = Vec::with_capacity(n);
    let mut f1 = Vec::with_capacity(n);
    for _ in 0..n {
        let x = random_point(rng, cfg, 2, cfg.group_n, cfg.sample_scale);
        let f = random_frame(rng, cfg, &x, 2);
        f2.push(TuplePointWithFrame::from_matrices(&x, &f)?);
        let x = random_point(rng, cfg, 1, cfg.group_n, cfg.sample_scale);
        let f = random_frame(rng, cfg, &x, 3);
        f1.push(TuplePointWithFrame::from_matrices(&x, &f)?);
    }
    calibrate(&engine, &f2, &f1)
}

/// Runs a suite on a pool of `cfg.workers` threads. Reports come out in the
/// fixed task order whatever the thread count.
pub fn run_suite(suite: Suite, cfg: &RunConfig) -> Result<RunOutput> {
    cfg.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| Error::Config(e.to_string()))?;
    pool.install(|| {
        let calibration = calibration_from(cfg, &mut task_rng(cfg, "calibration"))?;
        let ctx = Context { cfg, calibration };
        let list = tasks(suite);
        let outputs: Vec<TaskOutput> = list
            .par_iter()
            .map(|t| {
                let start = Instant::now();
                let mut rng = task_rng(cfg, t.name);
                let mut out = (t.run)(&ctx, &mut rng)
                    .unwrap_or_else(|e| TaskOutput::single(CheckReport::failed(t.name, t.anchor, cfg.tol(t.tol), &e)));
                let elapsed = start.elapsed().as_secs_f64() / out.reports.len().max(1) as f64;
                for r in &mut out.reports {
                    r.wall_time_s = elapsed;
                }
                out
            })
            .collect();
        let mut run = RunOutput::default();
        for o in outputs {
            run.reports.extend(o.reports);
            run.tables.extend(o.tables);
        }
        Ok(run)
    })
}

fn max_of(v: &[f64]) -> f64 {
    v.iter().cloned().fold(0.0, f64::max)
}

fn relative(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm().max(f64::MIN_POSITIVE)
}

// ---------------------------------------------------------------- forms

fn bss_vanishing(ctx: &Context, rng: &mut ChaCha8Rng) -> Result<TaskOutput> {
    let cfg = ctx.cfg;
    let engine = bss_engine(cfg, 2)?;
    let mut out = TaskOutput::default();
    for dim in [cfg.group_n, cfg.group_n + 1] {
        let mut worst = Vec::new();
        for n in [3, 4] {
            for _ in 0..cfg.samples.bss {
                let x = random_point(rng, cfg, n, dim, cfg.sample_scale);
                let f = random_frame(rng, cfg, &x, 4 - n);
                worst.push(engine.omega_raw(&x, &f)?.norm());
            }
        }
        let name = format!("bss.vanishing.gl{dim}");
        out.reports.push(CheckReport::new(
            &name,
            "omega_n = 0 for n > p",
            worst.len(),
            max_of(&worst),
            cfg.tol("vanishing"),
        ));
    }
    Ok(out)
}

fn bss_degeneracy(ctx: &Context, rng: &mut ChaCha8Rng) -> Result<TaskOutput> {
    let cfg = ctx.cfg;
    let engine = bss_engine(cfg, 2)?;
    let mut worst = Vec::new();
    for j in 0..2 {
        for _ in 0..cfg.samples.bss {
            let x = random_point(rng, cfg, 1, cfg.group_n, cfg.sample_scale);
            let f = random_frame(rng, cfg, &x, 2);
            let frame = TuplePointWithFrame::from_matrices(&x, &f)?;
            worst.push(degeneracy_pullback_check(&engine, 2, j, &frame)?.norm());
        }
    }
    Ok(TaskOutput::single(CheckReport::new(
        "bss.degeneracy",
        "degeneracy pullbacks of omega_n vanish",
        worst.len(),
        max_of(&worst),
        cfg.tol("degeneracy"),
    )))
}

fn bss_relation_g3(ctx: &Context, rng: &mut ChaCha8Rng) -> Result<TaskOutput> {
    let cfg = ctx.cfg;
    let engine = bss_engine(cfg, 2)?;
    let mut signs = alternating_signs(4);
    if cfg.hooks.corrupt_face_sign {
        signs[3] = -signs[3];
    }
    let mut worst = Vec::new();
    for _ in 0..cfg.samples.bss {
        let x = random_point(rng, cfg, 3, cfg.group_n, cfg.sample_scale);
        let f = random_frame(rng, cfg, &x, 2);
        worst.push(relation_g3_residual(&engine, &x, &f, &signs)?);
    }
    Ok(TaskOutput::single(CheckReport::new(
        "bss.relation_g3",
        "alternating face sum of omega_2 on G^3",
        worst.len(),
        max_of(&worst),
        cfg.tol("relations"),
    )))
}

fn bss_relation_g2(ctx: &Context, rng: &mut ChaCha8Rng) -> Result<TaskOutput> {
    let cfg = ctx.cfg;
    let engine = bss_engine(cfg, 2)?;
    let signs = alternating_signs(3);
    let mut worst = Vec::new();
    for _ in 0..cfg.samples.bss {
        let x = random_point(rng, cfg, 2, cfg.group_n, cfg.sample_scale);
        let f = random_frame(rng, cfg, &x, 3);
        worst.push(relation_g2_residual(&engine, &x, &f, ctx.calibration.k, &signs)?);
    }
    Ok(TaskOutput::single(CheckReport::new(
        "bss.relation_g2",
        "alternating face sum of omega_1 equals d omega_2 on G^2",
        worst.len(),
        max_of(&worst),
        cfg.tol("relations"),
    )))
}

fn bss_oracle(ctx: &Context, rng: &mut ChaCha8Rng) -> Result<TaskOutput> {
    let cfg = ctx.cfg;
    let engine = bss_engine(cfg, 2)?;
    let cal = &ctx.calibration;
    let mut w2 = Vec::new();
    let mut w1 = Vec::new();
    for _ in 0..cfg.samples.bss {
        let x = random_point(rng, cfg, 2, cfg.group_n, cfg.sample_scale);
        let f = random_frame(rng, cfg, &x, 2);
        let frame = TuplePointWithFrame::from_matrices(&x, &f)?;
        w2.push(relative(engine.omega(&frame)?, closed_omega2(&frame, cal.k)?));
        let x = random_point(rng, cfg, 1, cfg.group_n, cfg.sample_scale);
        let f = random_frame(rng, cfg, &x, 3);
        let frame = TuplePointWithFrame::from_matrices(&x, &f)?;
        w1.push(relative(engine.omega(&frame)?, closed_omega1(&frame, cal.omega1_coefficient)?));
    }
    let tol = cfg.tol("oracle");
    Ok(TaskOutput {
        reports: vec![
            CheckReport::new("bss.oracle.omega2", "omega_2 against its closed form", w2.len(), max_of(&w2), tol)
                .with_value("k", cal.k),
            CheckReport::new("bss.oracle.omega1", "omega_1 against its closed form", w1.len(), max_of(&w1), tol)
                .with_value("omega1_coefficient", cal.omega1_coefficient),
        ],
        tables: Vec::new(),
    })
}

fn bss_calibration(ctx: &Context, rng: &mut ChaCha8Rng) -> Result<TaskOutput> {
    let cfg = ctx.cfg;
    // a second, disjoint sample set from this task's own stream
    let other = calibration_from(cfg, rng)?;
    let cal = &ctx.calibration;
    let gap = (other.k - cal.k).abs().max((other.omega1_coefficient - cal.omega1_coefficient).abs());
    Ok(TaskOutput::single(
        CheckReport::new(
            "bss.calibration_stability",
            "fitted normalization constant k",
            2 * cfg.samples.calibration,
            gap,
            cfg.tol("calibration_stability"),
        )
        .with_value("k", cal.k)
        .with_value("k_second_set", other.k)
        .with_value("omega1_coefficient", cal.omega1_coefficient)
        .with_value("imaginary_defect", cal.imaginary_defect.max(other.imaginary_defect)),
    ))
}

// ---------------------------------------------------------------- local cocycles

fn eta_engine(cfg: &RunConfig, degree: usize) -> Result<LocalEngine> {
    LocalEngine::new(bss_engine(cfg, 2)?, degree, cfg.chart_radius)
}

fn eta_samples(rng: &mut ChaCha8Rng, cfg: &RunConfig, count: usize, scale: f64) -> Vec<(Vec<CMat>, Vec<CMat>)> {
    (0..count)
        .map(|_| {
            let gs = random_point(rng, cfg, 3, cfg.group_n, scale);
            let xi = gs.iter().map(|g| random_tangent(rng, g, cfg.real_form)).collect();
            (gs, xi)
        })
        .collect()
}

fn eta_max_residual(engine: &LocalEngine, samples: &[(Vec<CMat>, Vec<CMat>)]) -> Result<f64> {
    let r = samples
        .iter()
        .map(|(gs, xi)| verify_eta_cocycle_p2(engine, gs, xi).map(|s| s.residual()))
        .collect::<Result<Vec<f64>>>()?;
    Ok(max_of(&r))
}

fn eta_cocycle(ctx: &Context, rng: &mut ChaCha8Rng) -> Result<TaskOutput> {
    let cfg = ctx.cfg;
    let engine = eta_engine(cfg, cfg.quadrature_degree)?;
    let samples = eta_samples(rng, cfg, cfg.samples.eta, cfg.eta_scale);
    Ok(TaskOutput::single(CheckReport::new(
        "eta.cocycle",
        "d eta_0 = alternating face sum of eta_1",
        samples.len(),
        eta_max_residual(&engine, &samples)?,
        cfg.tol("eta"),
    )))
}

/// Residual against quadrature degree 4, 8, 12 and against halving the
/// chart scale. The reported residual is the worst ratio of consecutive
/// residuals minus one, so it passes when each refinement lowers the
/// residual or raises it by at most the noise allowance.
fn eta_convergence(ctx: &Context, rng: &mut ChaCha8Rng) -> Result<TaskOutput> {
    let cfg = ctx.cfg;
    let samples = eta_samples(rng, cfg, cfg.samples.eta_convergence, cfg.eta_scale);
    let mut table = Table::new("eta", &["quadrature_degree", "scale", "max_residual"]);
    let mut by_degree = Vec::new();
    for degree in [4, 8, 12] {
        let r = eta_max_residual(&eta_engine(cfg, degree)?, &samples)?;
        table.push(vec![degree.to_string(), cfg.eta_scale.to_string(), format!("{r:e}")]);
        by_degree.push(r);
    }
    let halved: Vec<(Vec<CMat>, Vec<CMat>)> = samples
        .iter()
        .map(|(gs, xi)| {
            let gs: Vec<CMat> = gs
                .iter()
                .map(|g| linalg::logm(g).map(|l| linalg::expm(&(l * c(0.5)))))
                .collect::<Result<_>>()?;
            Ok((gs, xi.clone()))
        })
        .collect::<Result<_>>()?;
    let engine = eta_engine(cfg, cfg.quadrature_degree)?;
    let full = eta_max_residual(&engine, &samples)?;
    let half = eta_max_residual(&engine, &halved)?;
    table.push(vec![cfg.quadrature_degree.to_string(), (cfg.eta_scale / 2.0).to_string(), format!("{half:e}")]);
    let noise = cfg.tol("eta_noise");
    let degree_ratio = by_degree
        .windows(2)
        .map(|w| w[1] / w[0].max(f64::MIN_POSITIVE))
        .fold(0.0, f64::max);
    let strict = by_degree.windows(2).all(|w| w[1] < w[0]);
    let scale_ratio = half / full.max(f64::MIN_POSITIVE);
    let tol = noise;
    Ok(TaskOutput {
        reports: vec![
            CheckReport::new(
                "eta.convergence",
                "eta identity residual vs quadrature degree",
                samples.len(),
                (degree_ratio - 1.0).max(0.0),
                tol,
            )
            .with_value("residual_degree_4", by_degree[0])
            .with_value("residual_degree_8", by_degree[1])
            .with_value("residual_degree_12", by_degree[2])
            .with_value("strictly_decreasing", if strict { 1.0 } else { 0.0 }),
            CheckReport::new(
                "eta.scale_halving",
                "eta identity residual vs chart scale",
                samples.len(),
                (scale_ratio - 1.0).max(0.0),
                tol,
            )
            .with_value("residual_full_scale", full)
            .with_value("residual_half_scale", half),
        ],
        tables: vec![table],
    })
}

fn eta_identity(ctx: &Context, _rng: &mut ChaCha8Rng) -> Result<TaskOutput> {
    let cfg = ctx.cfg;
    let engine = eta_engine(cfg, cfg.quadrature_degree)?;
    let id = vec![linalg::identity(cfg.group_n); 3];
    let s = verify_eta_cocycle_p2(&engine, &id, &id)?;
    Ok(TaskOutput::single(CheckReport::new(
        "eta.identity",
        "eta identity at the unit",
        1,
        s.residual(),
        cfg.tol("eta"),
    )))
}

// ---------------------------------------------------------------- loop groups

fn loop_cocycle(ctx: &Context) -> LoopCocycle {
    LoopCocycle::from_calibration(&ctx.calibration, ctx.cfg.quadrature_degree, ctx.cfg.chart_radius)
}

fn random_loop(rng: &mut ChaCha8Rng, cfg: &RunConfig) -> Result<GaugeMap> {
    let xi = random_trig_algebra(rng, cfg.grid, cfg.group_n, 3, 3, cfg.loop_amplitude, cfg.real_form)?;
    GaugeMap::exp(&xi, 1.0, cfg.chart_radius)
}

/// Random field on fixed low frequencies, so that pairs and triples couple.
fn dense_field(rng: &mut ChaCha8Rng, domain: GridDomain, dim: usize) -> Result<GaugeAlgebraElement> {
    let freqs: Vec<Vec<i64>> = match domain {
        GridDomain::Circle { .. } => vec![vec![1], vec![2], vec![3]],
        GridDomain::Torus { .. } => vec![vec![1, 0], vec![0, 1], vec![1, 1], vec![1, -1]],
    };
    trig_algebra(rng, domain, dim, &freqs, 1.0, RealForm::Gl)
}

fn single_mode(domain: GridDomain, freq: i64, coefficient: CMat) -> Result<GaugeAlgebraElement> {
    let dim = coefficient.nrows();
    GaugeAlgebraElement::from_modes(domain, dim, &[Mode { freq: vec![freq], coefficient }])
}

fn km_loop_cocycle(ctx: &Context, rng: &mut ChaCha8Rng) -> Result<TaskOutput> {
    let cfg = ctx.cfg;
    let lc = loop_cocycle(ctx);
    let mut worst = Vec::new();
    let mut size = Vec::new();
    for _ in 0..cfg.samples.loops {
        let g = [random_loop(rng, cfg)?, random_loop(rng, cfg)?, random_loop(rng, cfg)?];
        size.push(lc.c(&g[0], &g[1])?.norm());
        worst.push(group_coboundary(|a, b| lc.c(a, b), &g, cfg.chart_radius)?.norm());
    }
    Ok(TaskOutput::single(
        CheckReport::new(
            "km.loop_cocycle",
            "loop-group 2-cocycle identity",
            worst.len(),
            max_of(&worst),
            cfg.tol("loop_cocycle"),
        )
        .with_value("max_abs_c", max_of(&size)),
    ))
}

fn differentiated(lc: &LoopCocycle, cfg: &RunConfig, xis: &[GaugeAlgebraElement], tol: f64) -> Result<(Complex64, Complex64)> {
    let total = lie_cocycle_from_group(|g| lc.c(&g[0], &g[1]), xis, cfg.fd_step, tol, cfg.chart_radius)?;
    let a = lie_cocycle_from_group(|g| Ok(lc.eval(&g[0], &g[1])?.a), xis, cfg.fd_step, tol, cfg.chart_radius)?;
    Ok((total, a))
}

fn km_recovery(ctx: &Context, rng: &mut ChaCha8Rng) -> Result<TaskOutput> {
    let cfg = ctx.cfg;
    let lc = loop_cocycle(ctx);
    let tol = cfg.tol("kac_moody");
    let mut table = Table::new(
        "kac_moody",
        &["a", "b", "dim", "computed_re", "computed_im", "closed_re", "closed_im", "relative_error", "a_part"],
    );
    let mut rel = Vec::new();
    let mut a_parts = Vec::new();
    let mut cases: Vec<(i64, i64, CMat, CMat)> = vec![
        (1, -1, CMat::from_element(1, 1, c(1.0)), CMat::from_element(1, 1, c(1.0))),
        (2, -2, CMat::from_element(1, 1, Complex64::new(0.5, 0.5)), CMat::from_element(1, 1, c(-1.0))),
    ];
    while cases.len() < cfg.samples.kac_moody {
        let a: i64 = rng.random_range(1..=3);
        let a = if rng.random_bool(0.5) { a } else { -a };
        cases.push((a, -a, random_matrix(rng, cfg.group_n), random_matrix(rng, cfg.group_n)));
    }
    for (a, b, x, y) in cases {
        let dim = x.nrows();
        let xis = [single_mode(cfg.grid, a, x)?, single_mode(cfg.grid, b, y)?];
        let (got, a_part) = differentiated(&lc, cfg, &xis, tol)?;
        let want = kac_moody_closed(&xis[0], &xis[1], ctx.calibration.k)?;
        let r = relative(got, want);
        table.push(vec![
            a.to_string(),
            b.to_string(),
            dim.to_string(),
            format!("{:e}", got.re),
            format!("{:e}", got.im),
            format!("{:e}", want.re),
            format!("{:e}", want.im),
            format!("{r:e}"),
            format!("{:e}", a_part.norm()),
        ]);
        rel.push(r);
        a_parts.push(a_part.norm());
    }
    Ok(TaskOutput {
        reports: vec![
            CheckReport::new("km.recovery", "differentiated loop cocycle is Kac-Moody", rel.len(), max_of(&rel), tol),
            CheckReport::new(
                "km.a_part",
                "mixed partial of the a-part vanishes",
                a_parts.len(),
                max_of(&a_parts),
                cfg.tol("a_part"),
            ),
        ],
        tables: vec![table],
    })
}

fn km_selection(ctx: &Context, rng: &mut ChaCha8Rng) -> Result<TaskOutput> {
    let cfg = ctx.cfg;
    let lc = loop_cocycle(ctx);
    let mut worst = Vec::new();
    for (a, b) in [(1, 2), (2, 1), (1, 0), (-1, 3), (3, -2), (2, 2)] {
        let x = CMat::from_element(1, 1, Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
        let y = CMat::from_element(1, 1, Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
        let xis = [single_mode(cfg.grid, a, x)?, single_mode(cfg.grid, b, y)?];
        let (got, _) = differentiated(&lc, cfg, &xis, cfg.tol("kac_moody"))?;
        let closed = kac_moody_closed(&xis[0], &xis[1], ctx.calibration.k)?;
        worst.push(got.norm().max(closed.norm()));
    }
    Ok(TaskOutput::single(CheckReport::new(
        "km.selection",
        "Fourier selection rule a + b = 0",
        worst.len(),
        max_of(&worst),
        cfg.tol("selection"),
    )))
}

fn km_ce(ctx: &Context, rng: &mut ChaCha8Rng) -> Result<TaskOutput> {
    let cfg = ctx.cfg;
    let km = CochainCE::kac_moody(ctx.calibration.k);
    let mut worst = Vec::new();
    for _ in 0..cfg.samples.kac_moody {
        let xi = (0..3)
            .map(|_| dense_field(rng, cfg.grid, cfg.group_n))
            .collect::<Result<Vec<_>>>()?;
        worst.push(ce_differential(&km, &xi)?.norm());
    }
    Ok(TaskOutput::single(CheckReport::new(
        "km.ce_cocycle",
        "Kac-Moody is a Lie algebra cocycle",
        worst.len(),
        max_of(&worst),
        cfg.tol("km_cocycle"),
    )))
}

// ---------------------------------------------------------------- higher cocycles

fn feigin_p2(ctx: &Context, rng: &mut ChaCha8Rng) -> Result<TaskOutput> {
    let cfg = ctx.cfg;
    let table = identity_multilinear_form(&bss_engine(cfg, 2)?, cfg.group_n)?;
    let mut rel = Vec::new();
    for _ in 0..cfg.samples.feigin {
        let xi = [dense_field(rng, cfg.grid, cfg.group_n)?, dense_field(rng, cfg.grid, cfg.group_n)?];
        let f = feigin_cocycle(&xi, &table)?;
        let km = kac_moody_closed(&xi[0], &xi[1], ctx.calibration.k)?;
        rel.push(relative(f, km));
    }
    Ok(TaskOutput::single(CheckReport::new(
        "feigin.p2_vs_km",
        "degree-2 Feigin cochain equals Kac-Moody",
        rel.len(),
        max_of(&rel),
        cfg.tol("feigin_km"),
    )))
}

fn feigin_p3(ctx: &Context, rng: &mut ChaCha8Rng) -> Result<TaskOutput> {
    let cfg = ctx.cfg;
    let torus = GridDomain::Torus { n: cfg.torus_n };
    let form = identity_multilinear_form(&bss_engine(cfg, 3)?, cfg.group_n)?;
    let cochain = CochainCE::feigin(form.clone());
    let mut table = Table::new("feigin", &["sample", "value_abs", "antisymmetry", "repeated", "ce_residual"]);
    let (mut anti, mut rep, mut ce) = (Vec::new(), Vec::new(), Vec::new());
    for s in 0..cfg.samples.feigin {
        let xi = (0..4)
            .map(|_| dense_field(rng, torus, cfg.group_n))
            .collect::<Result<Vec<_>>>()?;
        let base = feigin_cocycle(&xi[..3], &form)?;
        let mut worst: f64 = 0.0;
        for (perm, sign) in signed_permutations(3).into_iter().skip(1) {
            let args: Vec<GaugeAlgebraElement> = perm.iter().map(|&j| xi[j].clone()).collect();
            let v = feigin_cocycle(&args, &form)?;
            worst = worst.max((v - base * sign).norm() / base.norm().max(1.0));
        }
        let repeated = feigin_cocycle(&[xi[0].clone(), xi[0].clone(), xi[2].clone()], &form)?.norm();
        let d = ce_differential(&cochain, &xi)?.norm();
        table.push(vec![
            s.to_string(),
            format!("{:e}", base.norm()),
            format!("{worst:e}"),
            format!("{repeated:e}"),
            format!("{d:e}"),
        ]);
        anti.push(worst);
        rep.push(repeated);
        ce.push(d);
    }
    let n = anti.len();
    Ok(TaskOutput {
        reports: vec![
            CheckReport::new(
                "feigin.p3.antisymmetry",
                "degree-3 Feigin cochain on the torus is alternating",
                n,
                max_of(&anti),
                cfg.tol("antisymmetry"),
            ),
            CheckReport::new(
                "feigin.p3.repeated",
                "repeated argument gives zero",
                n,
                max_of(&rep),
                cfg.tol("antisymmetry"),
            ),
            CheckReport::new("feigin.p3.ce", "degree-3 Feigin cochain is a cocycle", n, max_of(&ce), cfg.tol("ce")),
        ],
        tables: vec![table],
    })
}

// ---------------------------------------------------------------- extension

fn ext_cocycle<'a>(
    ctx: &'a Context,
    lc: &'a LoopCocycle,
) -> CentralExtension<impl Fn(&GaugeMap, &GaugeMap) -> Result<Complex64> + 'a> {
    let mu = ctx.cfg.hooks.perturb_cocycle;
    CentralExtension::new(
        move |a: &GaugeMap, b: &GaugeMap| {
            let v = lc.c(a, b)?;
            if mu != 0.0 {
                Ok(v + mean_log_norm_sq(a)? * mu)
            } else {
                Ok(v)
            }
        },
        ctx.cfg.chart_radius,
    )
}

fn ext_associativity(ctx: &Context, rng: &mut ChaCha8Rng) -> Result<TaskOutput> {
    let cfg = ctx.cfg;
    let lc = loop_cocycle(ctx);
    let ext = ext_cocycle(ctx, &lc);
    let mut worst = Vec::new();
    for _ in 0..cfg.samples.extension {
        let g = [random_loop(rng, cfg)?, random_loop(rng, cfg)?, random_loop(rng, cfg)?];
        worst.push(central_extension_demo(&ext, &g[0], &g[1], &g[2])?);
    }
    Ok(TaskOutput::single(
        CheckReport::new(
            "ext.associativity",
            "central extension by the loop cocycle is associative",
            worst.len(),
            max_of(&worst),
            cfg.tol("extension"),
        )
        .with_value("perturbation", cfg.hooks.perturb_cocycle),
    ))
}

fn ext_unit(ctx: &Context, rng: &mut ChaCha8Rng) -> Result<TaskOutput> {
    let cfg = ctx.cfg;
    let lc = loop_cocycle(ctx);
    let ext = ext_cocycle(ctx, &lc);
    let unit = ExtensionElement::central(cfg.grid, cfg.group_n, c(1.0));
    let x = ExtensionElement::unit_over(random_loop(rng, cfg)?);
    let y = ExtensionElement::unit_over(random_loop(rng, cfg)?);
    let z = ExtensionElement::central(cfg.grid, cfg.group_n, Complex64::new(0.3, 1.1));
    let unit_res = ext.associativity_residual(&unit, &x, &y)?;
    let zx = ext.mul(&z, &x)?;
    let xz = ext.mul(&x, &z)?;
    let commute = (zx.z - xz.z).norm();
    Ok(TaskOutput {
        reports: vec![
            CheckReport::new("ext.unit", "unit of the central extension", 1, unit_res, cfg.tol("extension")),
            CheckReport::new("ext.central", "central elements commute", 1, commute, cfg.tol("extension")),
        ],
        tables: Vec::new(),
    })
}
