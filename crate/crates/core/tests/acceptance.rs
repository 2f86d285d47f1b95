//! Acceptance criteria, each checked against oracles written here rather than
//! the library's own diagnostics. Prints one PASS/FAIL line per criterion.

use std::path::PathBuf;
use std::time::{Duration, Instant};

use rand::Rng;

use lipext::bfs::{set_function, BfsSpec, FiniteMeasureSpace, SetFunctionKind};
use lipext::cli::{render, run_path, Options};
use lipext::extension::{mcshane_extend, pointwise_extend, whitney_extend};
use lipext::gen;
use lipext::interp::{interp_domination_check, interpolated_lipschitz_check, CalderonSpace, InterpolationCouple};
use lipext::map::SampledMap;
use lipext::measure_extension::{l1_zero_norm, measure_extend, nu_table, verify_nu};
use lipext::metric::{factorize, induce_universal_map, FiniteMetricSpace};
use lipext::subset::Subset;

const SEED: u64 = 20240611;
const INF: f64 = f64::INFINITY;

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

// ---- oracles ----

/// `(Σ w |f|^p)^{1/p}`, or the largest `|f|` on atoms of positive weight.
fn lp(f: &[f64], w: &[f64], p: f64) -> f64 {
    if p.is_infinite() {
        f.iter().zip(w).filter(|(_, w)| **w > 0.0).map(|(v, _)| v.abs()).fold(0.0, f64::max)
    } else {
        f.iter().zip(w).map(|(v, w)| w * v.abs().powf(p)).sum::<f64>().powf(1.0 / p)
    }
}

fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(u, v)| u - v).collect()
}

fn masked(f: &[f64], a: u32) -> Vec<f64> {
    f.iter().enumerate().map(|(i, v)| if a >> i & 1 == 1 { *v } else { 0.0 }).collect()
}

fn pairs(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..n).flat_map(move |i| (i + 1..n).map(move |j| (i, j)))
}

/// `max ‖T(x) − T(y)‖ / d(x, y)` over pairs of the domain.
fn lipschitz(space: &FiniteMetricSpace, map: &SampledMap, norm: impl Fn(&[f64]) -> f64) -> f64 {
    let dom = map.domain();
    pairs(dom.len())
        .map(|(a, b)| norm(&sub(map.row(a), map.row(b))) / space.d(dom[a], dom[b]))
        .fold(0.0, f64::max)
}

/// `∫_0^t a*(s) ds` by sorting `|a|` with its weights.
fn rearranged_primitive(a: &[f64], w: &[f64], t: f64) -> f64 {
    let mut steps: Vec<(f64, f64)> = a.iter().zip(w).filter(|(_, w)| **w > 0.0).map(|(v, w)| (v.abs(), *w)).collect();
    steps.sort_by(|x, y| y.0.total_cmp(&x.0));
    let (mut acc, mut left) = (0.0, t);
    for (v, len) in steps {
        let take = len.min(left);
        acc += v * take;
        left -= take;
        if left <= 0.0 {
            break;
        }
    }
    acc
}

/// `∫_u^v t^e dt`, with `v = ∞` allowed when `e < −1`.
fn power_integral(u: f64, v: f64, e: f64) -> f64 {
    if (e + 1.0).abs() < 1e-14 {
        (v / u).ln()
    } else if v.is_infinite() {
        -u.powf(e + 1.0) / (e + 1.0)
    } else {
        (v.powf(e + 1.0) - u.powf(e + 1.0)) / (e + 1.0)
    }
}

/// `‖a‖_{(L¹, L^∞)_{θ,p}}` for `p ∈ {1, 2}` in closed form: `K(t, a)` is affine
/// between the breakpoints of `a*` and constant after the last one.
fn real_interp_l1_linf(a: &[f64], w: &[f64], theta: f64, p: u32) -> f64 {
    let mut steps: Vec<(f64, f64)> = a.iter().zip(w).filter(|(v, w)| **w > 0.0 && **v != 0.0).map(|(v, w)| (v.abs(), *w)).collect();
    if steps.is_empty() {
        return 0.0;
    }
    steps.sort_by(|x, y| y.0.total_cmp(&x.0));
    let pf = p as f64;
    let base = -theta * pf - 1.0;
    let (mut s, mut k_at_s, mut total) = (0.0, 0.0, 0.0);
    for &(b, len) in &steps {
        // K(t) = alpha + b t on [s, s + len].
        let alpha = k_at_s - b * s;
        let end = s + len;
        total += match p {
            1 => {
                let mut part = b * power_integral(s, end, base + 1.0);
                if alpha != 0.0 {
                    part += alpha * power_integral(s, end, base);
                }
                part
            }
            _ => {
                let mut part = b * b * power_integral(s, end, base + 2.0);
                if alpha != 0.0 {
                    part += 2.0 * alpha * b * power_integral(s, end, base + 1.0) + alpha * alpha * power_integral(s, end, base);
                }
                part
            }
        };
        k_at_s += b * len;
        s = end;
    }
    total += k_at_s.powf(pf) * power_integral(s, INF, base);
    total.powf(1.0 / pf)
}

// ---- criteria ----

fn envelopes() -> Outcome {
    let mut worst_lip: f64 = 0.0;
    for i in 0..200u64 {
        let c = gen::scalar_case(&mut gen::stream(SEED, i), 8, 4);
        let m = mcshane_extend(&c.space, &c.map, c.k).map_err(|e| format!("case {i}: {e}"))?;
        let w = whitney_extend(&c.space, &c.map, c.k).map_err(|e| format!("case {i}: {e}"))?;
        for (k, &s) in c.map.domain().iter().enumerate() {
            let t = c.map.row(k)[0];
            ensure(m.extended.row(s)[0] == t && w.extended.row(s)[0] == t, || format!("case {i}: envelope moves T at point {s}"))?;
        }
        for x in 0..c.space.len() {
            let (mx, wx) = (m.extended.row(x)[0], w.extended.row(x)[0]);
            let lower = (0..c.map.len()).map(|k| c.map.row(k)[0] - c.k * c.space.d(x, c.map.domain()[k])).fold(-INF, f64::max);
            let upper = (0..c.map.len()).map(|k| c.map.row(k)[0] + c.k * c.space.d(x, c.map.domain()[k])).fold(INF, f64::min);
            ensure((mx - lower).abs() <= 1e-12 && (wx - upper).abs() <= 1e-12, || format!("case {i}: envelope formula differs at {x}"))?;
            ensure(mx <= wx, || format!("case {i}: T^M > T^W at {x}"))?;
        }
        for r in [&m, &w] {
            let l = lipschitz(&c.space, &r.extended, |v| v[0].abs());
            ensure(l <= c.k + 1e-9, || format!("case {i}: Lipschitz {l} > K = {}", c.k))?;
            worst_lip = worst_lip.max(l / c.k);
        }
    }
    Ok(format!("200 cases, worst Lip/K = {worst_lip:.12}"))
}

fn pointwise_cases() -> Vec<(gen::PointwiseCase, u64)> {
    (0..200u64).map(|i| (gen::pointwise_case(&mut gen::stream(SEED, 1000 + i), 8, 4, 10), i)).collect()
}

fn pointwise() -> Outcome {
    let mut worst: f64 = 0.0;
    for (c, i) in pointwise_cases() {
        let mu = c.map.range().base();
        ensure(!mu.null_atoms().is_empty() && mu.len() <= 10 && c.space.len() <= 8, || format!("case {i}: shape"))?;
        let r = pointwise_extend(&c.space, &c.map, c.k).map_err(|e| format!("case {i}: {e}"))?;
        let positive: Vec<usize> = (0..mu.len()).filter(|&w| mu.weight(w) > 0.0).collect();
        for (k, &s) in c.map.domain().iter().enumerate() {
            for &w in &positive {
                ensure(r.extended.row(s)[w] == c.map.row(k)[w], || format!("case {i}: disagrees at point {s}, atom {w}"))?;
            }
        }
        let pw = pairs(c.space.len())
            .flat_map(|(x, y)| {
                let (rx, ry, d) = (r.extended.row(x), r.extended.row(y), c.space.d(x, y));
                positive.iter().map(move |&w| (rx[w] - ry[w]).abs() / d)
            })
            .fold(0.0, f64::max);
        ensure(pw <= c.k + 1e-9, || format!("case {i}: pointwise constant {pw} > K = {}", c.k))?;
        worst = worst.max(pw / c.k);

        let mut rng = gen::stream(SEED, 5000 + i);
        let moved: Vec<Vec<f64>> = c
            .map
            .values()
            .iter()
            .map(|row| row.iter().enumerate().map(|(w, v)| if mu.weight(w) == 0.0 { v + rng.gen_range(-100.0..100.0) } else { *v }).collect())
            .collect();
        let other = SampledMap::new(c.map.domain().to_vec(), moved, c.map.range().clone()).unwrap();
        let r2 = pointwise_extend(&c.space, &other, c.k).map_err(|e| format!("case {i}: {e}"))?;
        for x in 0..c.space.len() {
            for &w in &positive {
                ensure(r.extended.row(x)[w] == r2.extended.row(x)[w], || format!("case {i}: null-atom values leak into atom {w} at {x}"))?;
            }
        }
    }
    Ok(format!("200 cases, worst pointwise/K = {worst:.12}"))
}

fn lp_bounds() -> Outcome {
    let mut worst: f64 = 0.0;
    for (c, i) in pointwise_cases() {
        let r = pointwise_extend(&c.space, &c.map, c.k).map_err(|e| format!("case {i}: {e}"))?;
        let w = c.map.range().base().weights().to_vec();
        let total: f64 = w.iter().sum();
        for p in [1.0, 2.0, INF] {
            let l = lipschitz(&c.space, &r.extended, |v| lp(v, &w, p));
            let bound = if p.is_infinite() { c.k } else { c.k * total.powf(1.0 / p) };
            ensure(l <= bound + 1e-9, || format!("case {i}, p = {p}: {l} > {bound}"))?;
            worst = worst.max(l / bound);
        }
    }
    Ok(format!("200 cases × p ∈ {{1, 2, ∞}}, worst ratio = {worst:.12}"))
}

fn factorization() -> Outcome {
    let scalar = BfsSpec::scalar();
    for i in 0..200u64 {
        let c = gen::scalar_case(&mut gen::stream(SEED, i), 8, 4);
        for (name, r) in [("M", mcshane_extend(&c.space, &c.map, c.k)), ("W", whitney_extend(&c.space, &c.map, c.k))] {
            let r = r.map_err(|e| format!("case {i}: {e}"))?;
            let t = &r.extended;
            let f = factorize(&c.space, t, &scalar, c.k).map_err(|e| format!("case {i}: {e}"))?;
            let q = &f.quotient;
            let n = c.space.len();
            for x in 0..n {
                ensure(f.factored[q.projection[x]] == t.row(x), || format!("case {i} {name}: T̄∘j ≠ T at {x}"))?;
            }
            for (x, y) in pairs(n) {
                let dq = q.dist[q.projection[x]][q.projection[y]];
                ensure(dq <= c.space.d(x, y) * (1.0 + 1e-12), || format!("case {i} {name}: j stretches ({x}, {y})"))?;
            }
            let identity: Vec<usize> = (0..n).collect();
            let cert = induce_universal_map(&c.space, &c.space, &identity, t.values(), &f, &scalar)
                .map_err(|e| format!("case {i} {name}, J = M: {e}"))?;
            ensure(cert.map == q.projection, || format!("case {i} {name}: i ≠ j for J = M"))?;
            let qs = q.as_metric_space(c.space.labels()).map_err(|e| format!("case {i}: {e}"))?;
            let cert = induce_universal_map(&c.space, &qs, &q.projection, &f.factored, &f, &scalar)
                .map_err(|e| format!("case {i} {name}, J = M_T: {e}"))?;
            ensure(cert.map == (0..q.len()).collect::<Vec<_>>(), || format!("case {i} {name}: i is not the identity on M_T"))?;
        }
    }
    Ok("200 cases × {T^M, T^W}, both universal maps certified".into())
}

fn measure() -> Outcome {
    let mut worst: f64 = 0.0;
    for i in 0..100u64 {
        for p in [1.0, 2.0, INF] {
            let c = gen::measure_case(&mut gen::stream(SEED, 2000 + i), 6, 8, p);
            let mu = c.map.range().base();
            let w = mu.weights().to_vec();
            let n = mu.len();
            let full = 1u32 << n;
            let (_, reports) = verify_nu(&c.space, &c.map, &c.phi).map_err(|e| format!("case {i}: {e}"))?;
            ensure(reports.iter().all(|r| r.passes()), || format!("case {i}: library rejects some ν_x"))?;
            for x in 0..c.space.len() {
                let lib = nu_table(&c.space, &c.map, &c.phi, x).map_err(|e| format!("case {i}: {e}"))?;
                let nu = |a: u32| -> f64 {
                    let ma: f64 = (0..n).filter(|j| a >> j & 1 == 1).map(|j| w[j]).sum();
                    (0..c.map.len())
                        .map(|k| {
                            let int: f64 = (0..n).filter(|j| a >> j & 1 == 1).map(|j| w[j] * c.map.row(k)[j]).sum();
                            int - c.k * ma * c.space.d(x, c.map.domain()[k])
                        })
                        .fold(-INF, f64::max)
                };
                for a in 0..full {
                    let v = nu(a);
                    ensure((v - lib.get(Subset(a))).abs() <= 1e-9, || format!("case {i}: ν_{x} table differs on {a:b}"))?;
                    let atoms: f64 = (0..n).filter(|j| a >> j & 1 == 1).map(|j| nu(1 << j)).sum();
                    ensure((v - atoms).abs() <= 1e-9, || format!("case {i}: ν_{x} not additive on {a:b}"))?;
                }
                for j in (0..n).filter(|&j| w[j] == 0.0) {
                    ensure(nu(1 << j).abs() <= 1e-9, || format!("case {i}: ν_{x} charges null atom {j}"))?;
                }
            }
            let y = c.map.range().clone();
            let r = measure_extend(&c.space, &c.map, &c.phi, &y).map_err(|e| format!("case {i}: {e}"))?;
            for (k, &s) in c.map.domain().iter().enumerate() {
                for j in (0..n).filter(|&j| w[j] > 0.0) {
                    ensure((r.extended.row(s)[j] - c.map.row(k)[j]).abs() <= 1e-9, || format!("case {i}: T̂ ≠ T at {s}, atom {j}"))?;
                }
            }
            for (x, z) in pairs(c.space.len()) {
                let diff = sub(r.extended.row(x), r.extended.row(z));
                for a in 1..full {
                    let lhs = lp(&masked(&diff, a), &w, p);
                    let chi = lp(&masked(&vec![1.0; n], a), &w, p);
                    let rhs = c.k * chi * c.space.d(x, z);
                    ensure(lhs <= rhs + 1e-9 * rhs.max(1.0), || format!("case {i}, p = {p}: ({x}, {z}) on {a:b}: {lhs} > {rhs}"))?;
                    if rhs > 0.0 {
                        worst = worst.max(lhs / rhs);
                    }
                }
            }
        }
    }
    Ok(format!("100 cases × Y ∈ {{L¹, L², L^∞}}, worst Y-ratio = {worst:.12}"))
}

fn l1_zero() -> Outcome {
    let mut rng = gen::stream(SEED, 3000);
    for i in 0..1000 {
        let n = rng.gen_range(1..=10);
        let nulls = rng.gen_range(0..=n / 3);
        let mu = gen::measure(&mut rng, n, nulls);
        let f = gen::vector(&mut rng, n, 10.0);
        let w = mu.weights();
        let l1: f64 = f.iter().zip(w).map(|(v, w)| v.abs() * w).sum();
        let l10 = l1_zero_norm(&f, &mu);
        let tol = 1e-12 * l1.max(1.0);
        ensure(l1 <= 2.0 * l10 + tol && 2.0 * l10 <= 2.0 * l1 + tol, || format!("vector {i}: ‖f‖₁ = {l1}, ‖f‖₁,₀ = {l10}"))?;
        let sup = (0..1u32 << n)
            .map(|a| (0..n).filter(|j| a >> j & 1 == 1).fold(0.0, |s, j| s + f[j] * w[j]).abs())
            .fold(0.0, f64::max);
        ensure(sup == l10, || format!("vector {i}: enumeration {sup} ≠ shortcut {l10}"))?;
    }
    Ok("1000 vectors, enumeration equals shortcut bit for bit".into())
}

fn calderon() -> Outcome {
    let mut rng = gen::stream(SEED, 4000);
    let mut worst: f64 = 0.0;
    for i in 0..100 {
        let n = rng.gen_range(1..=8);
        let nulls = rng.gen_range(0..=n / 4);
        let mu = gen::measure(&mut rng, n, nulls);
        let x = gen::vector(&mut rng, n, 5.0);
        for (p0, p1, th) in [(1.0, INF, 0.25), (1.0, INF, 0.5), (1.0, INF, 0.75), (1.0, 2.0, 0.25), (1.0, 2.0, 0.5), (1.0, 2.0, 0.75), (2.0, INF, 0.25), (2.0, INF, 0.5), (2.0, INF, 0.75)] {
            let c = CalderonSpace::new(BfsSpec::new(mu.clone(), p0).unwrap(), BfsSpec::new(mu.clone(), p1).unwrap(), th).unwrap();
            let got = c.norm(&x).map_err(|e| format!("vector {i}: {e}"))?.value;
            let pt = 1.0 / ((1.0 - th) / p0 + th / p1);
            let exact = lp(&x, mu.weights(), pt);
            let rel = (got - exact).abs() / exact;
            ensure(rel <= 1e-6, || format!("vector {i}, ({p0}, {p1}, {th}): {got} vs {exact}"))?;
            worst = worst.max(rel);
        }
    }
    Ok(format!("100 vectors × 9 settings, worst relative error = {worst:.3e}"))
}

fn interpolated_lipschitz() -> Outcome {
    let mut worst: f64 = 0.0;
    for i in 0..100u64 {
        let mut rng = gen::stream(SEED, 6000 + i);
        let (p0, p1, th) = [(1.0, INF, 0.25), (1.0, 2.0, 0.5), (2.0, INF, 0.75), (1.0, INF, 0.5), (1.0, 2.0, 0.75), (2.0, INF, 0.25)][i as usize % 6];
        let c = gen::pointwise_case(&mut rng, 6, 4, 6);
        let mu = c.map.range().base().clone();
        let w = mu.weights().to_vec();
        let k0 = lipschitz(&c.space, &c.map, |v| lp(v, &w, p0));
        let k1 = lipschitz(&c.space, &c.map, |v| lp(v, &w, p1));
        let cs = CalderonSpace::new(BfsSpec::new(mu.clone(), p0).unwrap(), BfsSpec::new(mu, p1).unwrap(), th).unwrap();
        let r = interpolated_lipschitz_check(&c.space, &c.map, &cs, k0, k1).map_err(|e| format!("case {i}: {e}"))?;
        let bound = k0.powf(1.0 - th) * k1.powf(th);
        ensure(r.achieved <= bound + 1e-6, || format!("case {i}: {} > {bound}", r.achieved))?;
        let pt = 1.0 / ((1.0 - th) / p0 + th / p1);
        let oracle = lipschitz(&c.space, &c.map, |v| lp(v, &w, pt));
        ensure((r.achieved - oracle).abs() <= 1e-6 * oracle.max(1.0), || format!("case {i}: achieved {} vs closed form {oracle}", r.achieved))?;
        if bound > 0.0 {
            worst = worst.max(r.achieved / bound);
        }
    }
    Ok(format!("100 cases, worst achieved/bound = {worst:.12}"))
}

fn k_functional() -> Outcome {
    let ts: Vec<f64> = (0..20).map(|k| 10f64.powf(-3.0 + 6.0 * k as f64 / 19.0)).collect();
    let mut rng = gen::stream(SEED, 7000);
    let mut worst: f64 = 0.0;
    for i in 0..100 {
        let n = rng.gen_range(1..=8);
        let nulls = rng.gen_range(0..=n / 4);
        let mu = gen::measure(&mut rng, n, nulls);
        let a = gen::vector(&mut rng, n, 5.0);
        let couple = InterpolationCouple::new(BfsSpec::l1(mu.clone()), BfsSpec::linf(mu.clone()), 0.5, 1.0).unwrap();
        let mut ks = Vec::new();
        for &t in &ts {
            let k = couple.k_functional(t, &a).map_err(|e| format!("vector {i}: {e}"))?;
            let exact = rearranged_primitive(&a, mu.weights(), t);
            ensure((k - exact).abs() <= 1e-6, || format!("vector {i}, t = {t}: K = {k}, ∫a* = {exact}"))?;
            worst = worst.max((k - exact).abs());
            ks.push(k);
        }
        for j in 0..ts.len() - 1 {
            ensure(ks[j + 1] >= ks[j] - 1e-6, || format!("vector {i}: K decreases after t = {}", ts[j]))?;
            ensure(ks[j + 1] / ts[j + 1] <= ks[j] / ts[j] + 1e-6, || format!("vector {i}: K(t)/t increases after t = {}", ts[j]))?;
        }
        for j in 1..ts.len() - 1 {
            let left = (ks[j] - ks[j - 1]) / (ts[j] - ts[j - 1]);
            let right = (ks[j + 1] - ks[j]) / (ts[j + 1] - ts[j]);
            ensure(right <= left + 1e-6 * left.abs().max(1.0), || format!("vector {i}: K not concave at t = {}", ts[j]))?;
        }
    }
    Ok(format!("100 vectors × 20 t, worst |K − ∫a*| = {worst:.3e}"))
}

fn domination() -> Outcome {
    let mut worst: f64 = 0.0;
    for i in 0..50u64 {
        let mut rng = gen::stream(SEED, 8000 + i);
        let th = [0.25, 0.5, 0.75][i as usize % 3];
        let p = [1u32, 2][i as usize / 3 % 2];
        let case = gen::domination_case(&mut rng, 3, 3);
        let tests: Vec<Vec<f64>> = (0..20).map(|_| gen::vector(&mut rng, 3, 3.0)).collect();
        let mw = case.mu.weights().to_vec();
        let ones = [1.0; 3];
        let rows = &case.matrix.rows;
        let apply = |x: &[f64]| -> Vec<f64> { rows.iter().map(|r| r.iter().zip(x).map(|(a, b)| a * b).sum()).collect() };
        let mut ratio: f64 = 0.0;
        for (k, x) in tests.iter().enumerate() {
            let tx = apply(x);
            let nx = real_interp_l1_linf(x, &ones, th, p);
            for a in 1..8u32 {
                let ma: f64 = (0..3).filter(|j| a >> j & 1 == 1).map(|j| mw[j]).sum();
                let v = masked(&tx, a);
                ensure(lp(&v, &mw, 1.0) <= case.k0 * ma * lp(x, &ones, 1.0) * (1.0 + 1e-9), || format!("map {i}: (a) fails on vector {k}"))?;
                ensure(lp(&v, &mw, INF) <= case.k1 * ma * lp(x, &ones, INF) * (1.0 + 1e-9), || format!("map {i}: (b) fails on vector {k}"))?;
                let rhs = case.k0.powf(1.0 - th) * case.k1.powf(th) * ma * nx;
                ratio = ratio.max(real_interp_l1_linf(&v, &mw, th, p) / rhs);
            }
        }
        ensure(ratio <= 1.0 + 1e-5, || format!("map {i}: ratio {ratio}"))?;
        let e = InterpolationCouple::new(BfsSpec::l1(FiniteMeasureSpace::counting(3)), BfsSpec::linf(FiniteMeasureSpace::counting(3)), th, p as f64).unwrap();
        let y = InterpolationCouple::new(BfsSpec::l1(case.mu.clone()), BfsSpec::linf(case.mu.clone()), th, p as f64).unwrap();
        let phi = |k: f64| set_function(SetFunctionKind::IndicatorNorm { k, z: BfsSpec::l1(case.mu.clone()) }).unwrap();
        let lib = interp_domination_check(&case.matrix, &e, &y, &phi(case.k0), &phi(case.k1), &tests).map_err(|e| format!("map {i}: {e}"))?;
        ensure((lib.achieved - ratio).abs() <= 1e-6 * ratio.max(1.0), || format!("map {i}: library ratio {} vs closed form {ratio}", lib.achieved))?;
        worst = worst.max(ratio);
    }
    Ok(format!("50 maps × 20 vectors × 7 subsets, worst ratio = {worst:.12}"))
}

fn determinism() -> Outcome {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("golden");
    let mut names: Vec<PathBuf> = std::fs::read_dir(&dir).map_err(|e| e.to_string())?.map(|e| e.unwrap().path()).collect();
    names.sort();
    let opts = Options { seed: Some(SEED), ..Options::default() };
    for path in &names {
        let a = run_path("verify-all", path, &opts);
        let b = run_path("verify-all", path, &opts);
        let (ra, rb) = (render(&a.report, opts.format), render(&b.report, opts.format));
        ensure(ra == rb && a.code == b.code, || format!("{} differs between runs", path.display()))?;
        ensure(a.report.checks.len() > 10, || format!("{}: suites did not run", path.display()))?;
    }
    Ok(format!("{} golden instances, identical bytes", names.len()))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome, Option<Duration>); 11] = [
        ("McShane/Whitney envelopes", envelopes, Some(Duration::from_secs(1))),
        ("pointwise a.e. extension", pointwise, Some(Duration::from_secs(2))),
        ("L^p constants of the pointwise extension", lp_bounds, None),
        ("quotient factorization and universal map", factorization, None),
        ("measure extension with φ = Kμ", measure, Some(Duration::from_secs(10))),
        ("L¹,0 norm equivalence", l1_zero, None),
        ("Calderón product identity", calderon, Some(Duration::from_secs(30))),
        ("interpolated Lipschitz bound", interpolated_lipschitz, None),
        ("K-functional of (L¹, L^∞)", k_functional, None),
        ("interpolated domination", domination, None),
        ("CLI determinism", determinism, None),
    ];
    let mut failed = Vec::new();
    for (k, (name, run, limit)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let took = start.elapsed();
        let outcome = match (outcome, limit) {
            (Ok(_), Some(l)) if took > l => Err(format!("took {took:.2?}, limit {l:?}")),
            (o, _) => o,
        };
        match &outcome {
            Ok(detail) => println!("PASS criterion {:>2} {name}: {detail} [{took:.2?}]", k + 1),
            Err(why) => {
                println!("FAIL criterion {:>2} {name}: {why} [{took:.2?}]", k + 1);
                failed.push(k + 1);
            }
        }
    }
    if failed.is_empty() {
        println!("all 11 criteria passed");
    } else {
        println!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
