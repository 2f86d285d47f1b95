//! Command dispatch: each command runs one module operation on an instance and
//! turns the outcome into checks, a result payload and an exit code.

use std::path::Path;
use std::time::Instant;

use serde_json::{json, Value};

use super::instance::{extended_instance, load_instance, Instance, RawInstance};
use super::report::{ErrorReport, Format, Report, Skipped, Timing};
use crate::bfs::{decreasing_rearrangement, BfsSpec, FunctionNorm};
use crate::check::{argmax, Check};
use crate::error::{Error, Result, Witness};
use crate::extension::{
    coordinatewise_extend_linf, mcshane_extend, norm_constant_bounds, pointwise_ae_constant, pointwise_extend, whitney_extend,
    ExtensionResult,
};
use crate::interp::{
    decomposition_gap, interpolated_lipschitz_check, interpolated_pointwise_check, k_shape_violations, CalderonSpace, InterpReport,
    InterpolationCouple,
};
use crate::map::SampledMap;
use crate::measure_extension::{
    l1_zero_norm, measure_extend, phi_lipschitz_constant, proportional_to_measure, radon_nikodym, verify_nu, y_lipschitz_constant,
    FiniteSignedMeasure, L1ZeroNorm,
};
use crate::metric::{factorize, induce_universal_map, lipschitz_constant, FiniteMetricSpace};
use crate::subset::Subset;
use crate::suites;
use crate::tol;

pub mod exit {
    pub const OK: i32 = 0;
    pub const CHECK_FAILED: i32 = 1;
    pub const PRECONDITION: i32 = 2;
    pub const USAGE: i32 = 64;
    pub const DATA: i32 = 65;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    ExtendMcshane,
    ExtendWhitney,
    ExtendPointwise,
    ExtendMeasure,
    ExtendLinf,
    Factorize,
    VerifyNu,
    Variations,
    Calderon,
    Kfunctional,
    InterpCheck,
    VerifyAll,
}

impl Command {
    pub const ALL: [Command; 12] = [
        Command::ExtendMcshane,
        Command::ExtendWhitney,
        Command::ExtendPointwise,
        Command::ExtendMeasure,
        Command::ExtendLinf,
        Command::Factorize,
        Command::VerifyNu,
        Command::Variations,
        Command::Calderon,
        Command::Kfunctional,
        Command::InterpCheck,
        Command::VerifyAll,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::ExtendMcshane => "extend-mcshane",
            Command::ExtendWhitney => "extend-whitney",
            Command::ExtendPointwise => "extend-pointwise",
            Command::ExtendMeasure => "extend-measure",
            Command::ExtendLinf => "extend-linf",
            Command::Factorize => "factorize",
            Command::VerifyNu => "verify-nu",
            Command::Variations => "variations",
            Command::Calderon => "calderon",
            Command::Kfunctional => "kfunctional",
            Command::InterpCheck => "interp-check",
            Command::VerifyAll => "verify-all",
        }
    }

    pub fn parse(s: &str) -> Option<Command> {
        Command::ALL.into_iter().find(|c| c.name() == s)
    }
}

/// Usage text listing every command and flag.
pub fn usage() -> String {
    let names: Vec<&str> = Command::ALL.iter().map(|c| c.name()).collect();
    format!(
        "usage: lipext <COMMAND> <INSTANCE> [--out PATH] [--tolerance REAL] [--max-atoms N] [--format json|csv] \
         [--seed N] [--suite-cases N] [--timing] [--emit-instance PATH]\ncommands: {}",
        names.join(", ")
    )
}

#[derive(Debug, Clone, PartialEq)]
pub struct Options {
    /// Overrides the default tolerances of instance checks (1e-9 exact, 1e-6 optimized).
    pub tolerance: Option<f64>,
    pub max_atoms: usize,
    pub format: Format,
    /// Adds wall-clock time to the report; off by default so reports are reproducible.
    pub timing: bool,
    /// Overrides the instance seed for the randomized suites of `verify-all`.
    pub seed: Option<u64>,
    /// Cases per randomized suite in `verify-all`.
    pub suite_cases: usize,
}

impl Default for Options {
    fn default() -> Self {
        Options { tolerance: None, max_atoms: tol::DEFAULT_MAX_ATOMS, format: Format::Json, timing: false, seed: None, suite_cases: 10 }
    }
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub report: Report,
    pub code: i32,
    /// The extended map as a new instance, for extension commands.
    pub emitted: Option<RawInstance>,
}

fn failed(mut report: Report, code: i32, error: ErrorReport) -> Outcome {
    report.exit_code = code;
    report.error = Some(error);
    Outcome { report, code, emitted: None }
}

/// Loads `path` and runs `command` on it.
pub fn run_path(command: &str, path: &Path, opts: &Options) -> Outcome {
    let label = path.display().to_string();
    let report = Report::new(command, &label);
    let Some(cmd) = Command::parse(command) else {
        return failed(report, exit::USAGE, ErrorReport::usage(format!("unknown command {command:?}\n{}", usage())));
    };
    if opts.max_atoms == 0 || opts.max_atoms > tol::MAX_ATOMS {
        return failed(report, exit::USAGE, ErrorReport::usage(format!("--max-atoms must lie in 1..={}", tol::MAX_ATOMS)));
    }
    if let Some(t) = opts.tolerance {
        if !(t >= 0.0 && t.is_finite()) {
            return failed(report, exit::USAGE, ErrorReport::usage("--tolerance must be a nonnegative real"));
        }
    }
    match load_instance(path, opts.max_atoms) {
        Ok(inst) => run_instance(cmd, &inst, &label, opts),
        Err(e) => failed(report, exit::DATA, ErrorReport::from(&e)),
    }
}

fn error_code(e: &Error) -> i32 {
    match e {
        Error::Precondition { .. } | Error::Hypothesis { .. } => exit::PRECONDITION,
        Error::Numeric { .. } => exit::CHECK_FAILED,
        _ => exit::DATA,
    }
}

/// Runs `cmd` on a validated instance.
pub fn run_instance(cmd: Command, inst: &Instance, label: &str, opts: &Options) -> Outcome {
    let start = Instant::now();
    let mut report = Report::new(cmd.name(), label);
    report.seed = opts.seed.or(inst.seed);
    let ctx = Ctx {
        inst,
        exact: opts.tolerance.unwrap_or(tol::EXACT),
        optimized: opts.tolerance.unwrap_or(tol::OPTIMIZED),
    };
    let mut emitted = None;
    let code = match cmd {
        Command::VerifyAll => {
            let seed = opts.seed.or(inst.seed).unwrap_or(0);
            report.seed = Some(seed);
            let out = verify_all(&ctx, seed, opts.suite_cases);
            let code = if out.errored {
                exit::CHECK_FAILED
            } else {
                status(&out.output.checks)
            };
            report.checks = out.output.checks;
            report.skipped = out.output.skipped;
            report.result = Some(out.output.result);
            code
        }
        _ => match dispatch(cmd, &ctx) {
            Ok(out) => {
                let code = status(&out.checks);
                report.checks = out.checks;
                report.skipped = out.skipped;
                report.result = Some(out.result);
                emitted = out.emitted;
                code
            }
            Err(e) => {
                report.error = Some(ErrorReport::from(&e));
                error_code(&e)
            }
        },
    };
    report.exit_code = code;
    if opts.timing {
        report.timing = Some(Timing { seconds: start.elapsed().as_secs_f64() });
    }
    Outcome { report, code, emitted }
}

fn status(checks: &[Check]) -> i32 {
    if checks.iter().all(|c| c.holds) {
        exit::OK
    } else {
        exit::CHECK_FAILED
    }
}

struct Ctx<'a> {
    inst: &'a Instance,
    exact: f64,
    optimized: f64,
}

#[derive(Default)]
struct Output {
    checks: Vec<Check>,
    skipped: Vec<Skipped>,
    result: Value,
    emitted: Option<RawInstance>,
}

fn need<'a, T>(v: Option<&'a T>, cmd: Command, what: &str) -> Result<&'a T> {
    v.ok_or_else(|| Error::Invalid(format!("{} requires {what}", cmd.name())))
}

fn need_value(v: Option<f64>, cmd: Command, what: &str) -> Result<f64> {
    v.ok_or_else(|| Error::Invalid(format!("{} requires {what}", cmd.name())))
}

fn dispatch(cmd: Command, ctx: &Ctx) -> Result<Output> {
    match cmd {
        Command::ExtendMcshane => extend_scalar(ctx, cmd, true),
        Command::ExtendWhitney => extend_scalar(ctx, cmd, false),
        Command::ExtendPointwise => extend_pointwise(ctx, cmd),
        Command::ExtendMeasure => extend_measure(ctx, cmd),
        Command::ExtendLinf => extend_linf(ctx, cmd),
        Command::Factorize => run_factorize(ctx, cmd),
        Command::VerifyNu => run_verify_nu(ctx, cmd),
        Command::Variations => run_variations(ctx, cmd),
        Command::Calderon => run_calderon(ctx, cmd),
        Command::Kfunctional => run_kfunctional(ctx, cmd),
        Command::InterpCheck => run_interp_check(ctx, cmd),
        Command::VerifyAll => unreachable!("verify-all is handled by run_instance"),
    }
}

/// Largest `f(x, y)` over pairs `x < y`, with the pair as witness.
fn worst_pair(n: usize, f: impl Fn(usize, usize) -> f64) -> (f64, Witness) {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    match argmax(pairs.iter().map(|&(i, j)| f(i, j))) {
        Some((k, v)) => (v, Witness::Pair { x: pairs[k].0, y: pairs[k].1 }),
        None => (0.0, Witness::None),
    }
}

/// Largest `f(x)` over `points`, with the point as witness.
fn worst_point(points: &[usize], f: impl Fn(usize) -> f64) -> (f64, Witness) {
    match argmax(points.iter().map(|&x| f(x))) {
        Some((k, v)) => (v, Witness::Point { x: points[k] }),
        None => (0.0, Witness::None),
    }
}

fn agreement_check(r: &ExtensionResult, tol: f64) -> Check {
    let points: Vec<usize> = r.agreement.iter().map(|a| a.point).collect();
    let (v, w) = worst_point(&points, |x| r.agreement.iter().find(|a| a.point == x).map_or(0.0, |a| a.discrepancy));
    Check::at_most("agreement-on-subset", v, 0.0, tol, w)
}

fn lipschitz_check<N: FunctionNorm>(name: &str, space: &FiniteMetricSpace, map: &SampledMap, norm: &N, bound: f64, tol: f64) -> Result<Check> {
    let l = lipschitz_constant(space, map, norm)?;
    let w = l.witness.map_or(Witness::None, |(x, y)| Witness::Pair { x, y });
    Ok(Check::at_most_rel(name, l.value, bound, tol, w))
}

fn interp_check(name: &str, r: InterpReport) -> Check {
    Check { name: name.into(), bound: r.bound, achieved: r.achieved, holds: r.holds, witness: r.witness }
}

fn extension_payload(r: &ExtensionResult) -> Value {
    json!({
        "extended": r.extended.values(),
        "constants": r.constants,
        "agreement": r.agreement,
        "boundedness": r.boundedness,
    })
}

fn extend_scalar(ctx: &Ctx, cmd: Command, upper: bool) -> Result<Output> {
    let inst = ctx.inst;
    let map = need(inst.map.as_ref(), cmd, "/map")?;
    let k = need_value(inst.constants.k, cmd, "/constants/K")?;
    let space = &inst.space;
    let (r, other) = if upper {
        (mcshane_extend(space, map, k)?, whitney_extend(space, map, k)?)
    } else {
        (whitney_extend(space, map, k)?, mcshane_extend(space, map, k)?)
    };
    let (low, high) = if upper { (&r, &other) } else { (&other, &r) };
    let all: Vec<usize> = (0..space.len()).collect();
    let (gap, w) = worst_point(&all, |x| low.extended.row(x)[0] - high.extended.row(x)[0]);
    let checks = vec![
        agreement_check(&r, ctx.exact),
        lipschitz_check("lipschitz", space, &r.extended, r.extended.range(), k, ctx.exact)?,
        Check::at_most("mcshane-below-whitney", gap, 0.0, ctx.exact, w),
    ];
    Ok(Output {
        checks,
        result: extension_payload(&r),
        emitted: Some(extended_instance(&inst.raw, &r.extended)),
        ..Default::default()
    })
}

fn extend_pointwise(ctx: &Ctx, cmd: Command) -> Result<Output> {
    let inst = ctx.inst;
    let map = need(inst.map.as_ref(), cmd, "/map")?;
    let mu = need(inst.measure.as_ref(), cmd, "/measure")?;
    let k = need_value(inst.constants.k, cmd, "/constants/K")?;
    let space = &inst.space;
    let r = pointwise_extend(space, map, k)?;
    let pw = pointwise_ae_constant(space, &r.extended)?;
    let pw_witness = pw.witness.map_or(Witness::None, |(x, y, atom)| Witness::PairAtom { x, y, atom });
    let mut checks = vec![
        agreement_check(&r, ctx.exact),
        Check::at_most_rel("pointwise-constant", pw.value, k, ctx.exact, pw_witness),
    ];
    for (p, name) in [(1.0, "lp-bound/p=1"), (2.0, "lp-bound/p=2"), (f64::INFINITY, "lp-bound/p=inf")] {
        let b = norm_constant_bounds(space, &r, p)?;
        let lp = BfsSpec::new(mu.clone(), p)?;
        let w = lipschitz_constant(space, &r.extended, &lp)?.witness.map_or(Witness::None, |(x, y)| Witness::Pair { x, y });
        checks.push(Check::at_most(name, b.achieved, b.bound, ctx.exact, w));
    }
    Ok(Output {
        checks,
        result: extension_payload(&r),
        emitted: Some(extended_instance(&inst.raw, &r.extended)),
        ..Default::default()
    })
}

fn extend_linf(ctx: &Ctx, cmd: Command) -> Result<Output> {
    let inst = ctx.inst;
    let map = need(inst.map.as_ref(), cmd, "/map")?;
    let k = need_value(inst.constants.k, cmd, "/constants/K")?;
    let space = &inst.space;
    let r = coordinatewise_extend_linf(space, map, k)?;
    let mut checks = vec![
        agreement_check(&r, ctx.exact),
        lipschitz_check("lipschitz", space, &r.extended, r.extended.range(), k, ctx.exact)?,
    ];
    if let Some(b) = &r.boundedness {
        let anchor_norm = r.extended.range().norm(r.extended.row(b.anchor));
        let all: Vec<usize> = (0..space.len()).collect();
        let (_, w) = worst_point(&all, |x| {
            r.extended.row(x).iter().fold(0.0_f64, |m, v| m.max(v.abs())) - k * space.d(x, b.anchor) - anchor_norm
        });
        checks.push(Check::at_most_rel("bounded-by-anchor", b.max_excess + anchor_norm, anchor_norm, ctx.exact, w));
    }
    Ok(Output {
        checks,
        result: extension_payload(&r),
        emitted: Some(extended_instance(&inst.raw, &r.extended)),
        ..Default::default()
    })
}

fn phi_witness(w: Option<(usize, usize, Subset)>) -> Witness {
    w.map_or(Witness::None, |(x, y, subset)| Witness::PairSubset { x, y, subset })
}

fn extend_measure(ctx: &Ctx, cmd: Command) -> Result<Output> {
    let inst = ctx.inst;
    let map = need(inst.map.as_ref(), cmd, "/map")?;
    let phi = need(inst.phi.as_ref(), cmd, "/phi")?;
    let y = need(inst.y.as_ref(), cmd, "/measure")?;
    let mu = y.base();
    let space = &inst.space;
    let r = measure_extend(space, map, phi, y)?;
    let pc = phi_lipschitz_constant(space, &r.extended, phi, &L1ZeroNorm { base: mu.clone() })?;
    let mut checks = vec![
        agreement_check(&r, ctx.exact),
        Check::at_most("phi-lipschitz-ratio", pc.value, 1.0, ctx.exact, phi_witness(pc.witness)),
    ];
    if let Some(k) = proportional_to_measure(phi, mu) {
        let yk = y_lipschitz_constant(space, &r.extended, y)?;
        checks.push(Check::at_most_rel("y-lipschitz", yk.value, k, ctx.exact, phi_witness(yk.witness)));
    }
    Ok(Output {
        checks,
        result: extension_payload(&r),
        emitted: Some(extended_instance(&inst.raw, &r.extended)),
        ..Default::default()
    })
}

fn range_norm(inst: &Instance) -> BfsSpec {
    inst.y.clone().unwrap_or_else(BfsSpec::scalar)
}

fn run_factorize(ctx: &Ctx, cmd: Command) -> Result<Output> {
    let inst = ctx.inst;
    let map = need(inst.map.as_ref(), cmd, "/map")?;
    let k = need_value(inst.constants.k, cmd, "/constants/K")?;
    let space = &inst.space;
    let norm = range_norm(inst);
    let f = factorize(space, map, &norm, k)?;
    let c = f.check(space, &norm);
    let q = &f.quotient;
    let all: Vec<usize> = (0..space.len()).collect();
    let n = space.len();
    let dq = |x: usize, y: usize| q.dist[q.projection[x]][q.projection[y]];
    let (_, w_ident) = worst_point(&all, |x| norm.distance(f.composed(x), &f.original[x]));
    let (_, w_proj) = worst_pair(n, |x, y| dq(x, y) / space.d(x, y));
    let (_, w_dist) = worst_pair(n, |x, y| (dq(x, y) - norm.distance(&f.original[x], &f.original[y]) / k).abs());
    let (_, w_factor) = worst_pair(q.len(), |a, b| norm.distance(&f.factored[a], &f.factored[b]) / q.dist[a][b]);
    let w_factor = match w_factor {
        Witness::Pair { x, y } => Witness::Pair { x: q.representative(x), y: q.representative(y) },
        other => other,
    };
    let mut checks = vec![
        Check::at_most("factor-composition", c.identity_error, 0.0, ctx.exact, w_ident),
        Check::at_most("projection-lipschitz", c.projection_lipschitz, 1.0, ctx.exact, w_proj),
        Check::at_most_rel("factor-lipschitz", c.factor_lipschitz, k, ctx.exact, w_factor),
        Check::at_most("quotient-distance", c.distance_error, 0.0, ctx.exact, w_dist),
    ];
    let identity: Vec<usize> = (0..n).collect();
    let qspace = q.as_metric_space(space.labels())?;
    for (name, target, i0, t0) in [
        ("universal-map/identity", space, identity.as_slice(), map.values()),
        ("universal-map/quotient", &qspace, q.projection.as_slice(), f.factored.as_slice()),
    ] {
        let cert = induce_universal_map(space, target, i0, t0, &f, &norm)?;
        let achieved = cert.factor_error.max(cert.lipschitz - 1.0);
        checks.push(Check::at_most(name, achieved, 0.0, ctx.exact, Witness::Indices { indices: cert.map }));
    }
    let result = json!({
        "classes": q.classes,
        "projection": q.projection,
        "quotient_dist": q.dist,
        "factored": f.factored,
    });
    Ok(Output { checks, result, ..Default::default() })
}

fn run_verify_nu(ctx: &Ctx, cmd: Command) -> Result<Output> {
    let inst = ctx.inst;
    let map = need(inst.map.as_ref(), cmd, "/map")?;
    let phi = need(inst.phi.as_ref(), cmd, "/phi")?;
    let mu = need(inst.measure.as_ref(), cmd, "/measure")?;
    let (tables, reports) = verify_nu(&inst.space, map, phi)?;
    let mut checks = Vec::new();
    let mut points = Vec::new();
    for (t, r) in tables.iter().zip(&reports) {
        let x = r.point;
        let (defect, w) = match r.additivity.witness {
            Some((a, b)) if a.is_empty() && b.is_empty() => (t.get(Subset::EMPTY).abs(), Witness::PointSubsets { x, check: "additivity".into(), a, b }),
            Some((a, b)) => (
                (t.get(a.union(b)) - t.get(a) - t.get(b)).abs(),
                Witness::PointSubsets { x, check: "additivity".into(), a, b },
            ),
            None => (0.0, Witness::Point { x }),
        };
        let mut add = Check::at_most(format!("additivity/x={x}"), defect, 0.0, tol::EXACT, w);
        add.holds = r.additivity.additive;
        checks.push(add);
        let (charge, w) = match r.continuity.witness {
            Some(a) => (t.get(a).abs(), Witness::PointSubsets { x, check: "mu-continuity".into(), a, b: Subset::EMPTY }),
            None => (0.0, Witness::Point { x }),
        };
        let mut cont = Check::at_most(format!("mu-continuity/x={x}"), charge, 0.0, tol::EXACT, w);
        cont.holds = r.continuity.continuous;
        checks.push(cont);
        let density = if r.passes() { radon_nikodym(t, mu).ok() } else { None };
        points.push(json!({
            "point": x,
            "additive": r.additivity.additive,
            "continuous": r.continuity.continuous,
            "density": density,
        }));
    }
    Ok(Output { checks, result: json!({ "points": points }), ..Default::default() })
}

fn run_variations(ctx: &Ctx, cmd: Command) -> Result<Output> {
    let inst = ctx.inst;
    let map = need(inst.map.as_ref(), cmd, "/map")?;
    let y = need(inst.y.as_ref(), cmd, "/measure")?;
    let mu = y.base();
    let mut rows = Vec::new();
    let mut metrics: Vec<[f64; 4]> = Vec::new();
    for (k, &x) in map.domain().iter().enumerate() {
        let f = map.row(k);
        let nu = FiniteSignedMeasure::from_density(mu.clone(), f)?;
        let sv = nu.semivariation();
        let var = nu.variation();
        let sup = mu.subset_integrals(f).into_iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        let l1 = mu.integral(&f.iter().map(|v| v.abs()).collect::<Vec<_>>());
        let l10 = l1_zero_norm(f, mu);
        metrics.push([(sv - sup).abs(), sv - var, var - 2.0 * sv, (l1 - 2.0 * l10).max(2.0 * l10 - 2.0 * l1)]);
        rows.push(json!({
            "point": x,
            "semivariation": sv,
            "variation": var,
            "y_variation": nu.y_variation(y),
        }));
    }
    let dom = map.domain();
    let names = [
        ("semivariation-vs-enumeration", ctx.exact),
        ("semivariation-le-variation", ctx.exact),
        ("variation-le-twice-semivariation", ctx.exact),
        ("l1-zero-equivalence", ctx.exact),
    ];
    let checks = names
        .iter()
        .enumerate()
        .map(|(j, (name, tol))| {
            let (v, w) = worst_point(&(0..dom.len()).collect::<Vec<_>>(), |k| metrics[k][j]);
            let w = match w {
                Witness::Point { x } => Witness::Point { x: dom[x] },
                other => other,
            };
            Check::at_most(*name, v, 0.0, *tol, w)
        })
        .collect();
    Ok(Output { checks, result: json!({ "points": rows }), ..Default::default() })
}

fn is_plain(y: &BfsSpec) -> bool {
    y.scale().iter().all(|s| *s == 1.0)
}

fn run_calderon(ctx: &Ctx, cmd: Command) -> Result<Output> {
    let inst = ctx.inst;
    let map = need(inst.map.as_ref(), cmd, "/map")?;
    let y0 = need(inst.y.as_ref(), cmd, "/measure")?;
    let y1 = need(inst.y2.as_ref(), cmd, "/space2")?;
    let th = need_value(inst.constants.theta, cmd, "/constants/theta")?;
    let c = CalderonSpace::new(y0.clone(), y1.clone(), th)?;
    let closed = (is_plain(y0) && is_plain(y1)).then(|| {
        let pt = 1.0 / ((1.0 - th) / y0.p() + th / y1.p());
        BfsSpec::new(y0.base().clone(), pt).expect("p_θ lies in [1, ∞]")
    });
    let mut points = Vec::new();
    let mut gaps = Vec::new();
    let mut errs = Vec::new();
    for (k, &x) in map.domain().iter().enumerate() {
        let row = map.row(k);
        let r = c.norm(row)?;
        gaps.push(decomposition_gap(&c, row, &r));
        if let Some(lp) = &closed {
            let exact = lp.norm(row);
            errs.push((r.value - exact).abs() / exact.max(f64::MIN_POSITIVE));
        }
        points.push(json!({ "point": x, "value": r.value, "x0": r.x0, "x1": r.x1 }));
    }
    let dom = map.domain();
    let (g, w) = worst_point(dom, |x| gaps[dom.iter().position(|&p| p == x).unwrap()]);
    let mut checks = vec![Check::at_most("decomposition-gap", g, 0.0, ctx.optimized, w)];
    if closed.is_some() {
        let (e, w) = worst_point(dom, |x| errs[dom.iter().position(|&p| p == x).unwrap()]);
        checks.push(Check::at_most("closed-form-relative-error", e, 0.0, ctx.optimized, w));
    }
    Ok(Output { checks, result: json!({ "points": points }), ..Default::default() })
}

fn run_kfunctional(ctx: &Ctx, cmd: Command) -> Result<Output> {
    let inst = ctx.inst;
    let map = need(inst.map.as_ref(), cmd, "/map")?;
    let e0 = need(inst.y.as_ref(), cmd, "/measure")?;
    let e1 = need(inst.y2.as_ref(), cmd, "/space2")?;
    let th = need_value(inst.constants.theta, cmd, "/constants/theta")?;
    let p = need_value(inst.constants.p_interp, cmd, "/constants/p_interp")?;
    let couple = InterpolationCouple::new(e0.clone(), e1.clone(), th, p)?;
    let oracle = e0.p() == 1.0 && e1.is_infinite() && is_plain(e0) && is_plain(e1);
    let ts = suites::log_grid(13);
    let mut points = Vec::new();
    let mut metrics: Vec<[f64; 4]> = Vec::new();
    for (k, &x) in map.domain().iter().enumerate() {
        let row = map.row(k);
        let ks = ts.iter().map(|&t| couple.k_functional(t, row)).collect::<Result<Vec<f64>>>()?;
        let (mono, concave, ratio) = k_shape_violations(&ts, &ks);
        let err = if oracle {
            let star = decreasing_rearrangement(row, e0.base())?;
            ts.iter().zip(&ks).map(|(&t, &kv)| (kv - star.primitive(t)).abs() / star.primitive(t).max(1.0)).fold(0.0, f64::max)
        } else {
            0.0
        };
        metrics.push([mono, concave, ratio, err]);
        let norm = couple.real_interp_norm(row, tol::QUADRATURE_RTOL)?;
        points.push(json!({ "point": x, "k": ks, "norm": norm }));
    }
    let dom = map.domain();
    let idx: Vec<usize> = (0..dom.len()).collect();
    let mut names = vec!["monotonicity", "concavity", "ratio-monotonicity"];
    if oracle {
        names.push("rearrangement-error");
    }
    let checks = names
        .iter()
        .enumerate()
        .map(|(j, name)| {
            let (v, w) = worst_point(&idx, |k| metrics[k][j]);
            let w = match w {
                Witness::Point { x } => Witness::Point { x: dom[x] },
                other => other,
            };
            Check::at_most(*name, v, 0.0, ctx.optimized, w)
        })
        .collect();
    Ok(Output { checks, result: json!({ "t": ts, "points": points }), ..Default::default() })
}

fn run_interp_check(ctx: &Ctx, cmd: Command) -> Result<Output> {
    let inst = ctx.inst;
    let map = need(inst.map.as_ref(), cmd, "/map")?;
    let y0 = need(inst.y.as_ref(), cmd, "/measure")?;
    let y1 = need(inst.y2.as_ref(), cmd, "/space2")?;
    let th = need_value(inst.constants.theta, cmd, "/constants/theta")?;
    let k0 = need_value(inst.constants.k0, cmd, "/constants/K0")?;
    let k1 = need_value(inst.constants.k1, cmd, "/constants/K1")?;
    let c = CalderonSpace::new(y0.clone(), y1.clone(), th)?;
    let lip = interpolated_lipschitz_check(&inst.space, map, &c, k0, k1)?;
    let mut out = Output { result: json!({ "lipschitz": lip }), ..Default::default() };
    out.checks.push(interp_check("interpolated-lipschitz", lip));
    match interpolated_pointwise_check(&inst.space, map, th, k0, k1) {
        Ok(r) => {
            out.result["pointwise"] = json!(r);
            out.checks.push(interp_check("interpolated-pointwise", r));
        }
        Err(e @ Error::Precondition { .. }) => {
            out.skipped.push(Skipped { command: "interpolated-pointwise".into(), reason: ErrorReport::from(&e) });
        }
        Err(e) => return Err(e),
    }
    Ok(out)
}

fn applicable(cmd: Command, inst: &Instance) -> bool {
    let c = &inst.constants;
    let map = inst.map.as_ref();
    let has_map = map.is_some();
    let interp = has_map && inst.measure.is_some() && inst.y2.is_some() && c.theta.is_some();
    match cmd {
        Command::ExtendMcshane | Command::ExtendWhitney => map.is_some_and(|m| m.atoms() == 1) && c.k.is_some(),
        Command::ExtendPointwise => has_map && inst.measure.is_some() && c.k.is_some(),
        Command::ExtendLinf => has_map && c.k.is_some(),
        Command::ExtendMeasure | Command::VerifyNu => has_map && inst.phi.is_some(),
        Command::Factorize => map.is_some_and(|m| m.is_total_on(&inst.space)) && c.k.is_some_and(|k| k > 0.0),
        Command::Variations => has_map && inst.measure.is_some(),
        Command::Calderon => interp,
        Command::Kfunctional => interp && c.p_interp.is_some(),
        Command::InterpCheck => interp && c.k0.is_some() && c.k1.is_some(),
        Command::VerifyAll => false,
    }
}

struct VerifyAll {
    output: Output,
    errored: bool,
}

/// Every applicable command on the instance, then the seeded suites.
///
/// A command whose preconditions the instance does not meet is listed under
/// `skipped`: its theorem makes no claim there. Any other error fails the run.
fn verify_all(ctx: &Ctx, seed: u64, suite_cases: usize) -> VerifyAll {
    let mut output = Output::default();
    let mut ran = Vec::new();
    let mut errored = false;
    for cmd in Command::ALL.into_iter().filter(|&c| applicable(c, ctx.inst)) {
        match dispatch(cmd, ctx) {
            Ok(out) => {
                ran.push(cmd.name());
                output.checks.extend(out.checks.into_iter().map(|c| c.prefixed(cmd.name())));
                output.skipped.extend(out.skipped.into_iter().map(|s| Skipped { command: format!("{}/{}", cmd.name(), s.command), ..s }));
            }
            Err(e) => {
                errored |= !matches!(e, Error::Precondition { .. } | Error::Hypothesis { .. });
                output.skipped.push(Skipped { command: cmd.name().into(), reason: ErrorReport::from(&e) });
            }
        }
    }
    output.checks.extend(suites::run_all(seed, suite_cases));
    output.result = json!({ "ran": ran, "suite_cases": suite_cases });
    VerifyAll { output, errored }
}
