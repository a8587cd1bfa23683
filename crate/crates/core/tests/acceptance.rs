//! End-to-end acceptance criteria. Each criterion prints one PASS/FAIL line;
//! the test fails if any criterion fails.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use mmono::convex::{
    check_envelope_criterion, check_prox_partition, check_splitting_inequality, check_subdiff_identity,
    fenchel_conjugate, relax_to_c_conjugate, splitting_set_extract, splitting_slack, three_marginal_smooth_check,
    ConjugateMethod, ConvexFn, SplittingDomain, SplittingTuple,
};
use mmono::gallery::{
    case_by_id, restricted_quadratic_matrices, restricted_quadratic_tuple, make_curve_family, make_quadratic_family,
    random_commuting_family,
};
use mmono::linalg::{rotation, vector, Matrix, Vector};
use mmono::monotone::{
    check_firmly_nonexpansive, check_graph_monotone, check_n_c_cyclic, check_pairwise_c_monotone,
    check_two_marginal_projections, classify_maximality, extract_ak_graph, resolvent_samples, CyclicOptions,
};
use mmono::{GammaSet, Grid, IndexSubset, Mode, MultiPoint, SpaceConfig};
use mmono::convex::MonotoneTable;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn ensure(cond: bool, what: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(what.into())
    }
}

fn sample_5x5() -> Grid {
    Grid::cube(2, -2.0, 2.0, 5).unwrap()
}

fn resolvents_of_rotation_tripod() -> Outcome {
    let case = case_by_id("rotation-tripod").unwrap();
    let grid = sample_5x5();
    // oracle: J_i = T_i (Σ T)⁻¹ from the parameterization
    let mats = match case.gamma.body() {
        mmono::GammaBody::Linear(ts) => ts.clone(),
        _ => return Err("expected a linear set".into()),
    };
    let total_inv = mats.iter().fold(Matrix::zeros(2, 2), |a, t| a + t).try_inverse().unwrap();
    let closed = [
        rotation(PI / 3.0) * 0.5,
        rotation(-PI / 6.0) * (3f64.sqrt() / 4.0),
        rotation(-PI / 6.0) * (3f64.sqrt() / 4.0),
    ];
    let mut worst: f64 = 0.0;
    let mut sums: Vec<Vector> = Vec::new();
    for i in 0..3 {
        ensure(((&mats[i] * &total_inv) - &closed[i]).amax() < 1e-12, format!("J_{} oracle mismatch", i + 1))?;
        let samples = resolvent_samples(&case.gamma, i, Some(&grid), 1e-12).map_err(|e| e.to_string())?;
        ensure(samples.len() == 25, "expected 25 samples")?;
        for (k, (s, x)) in samples.pairs.iter().enumerate() {
            worst = worst.max((&closed[i] * s - x).amax());
            if i == 0 {
                sums.push(x.clone());
            } else {
                sums[k] += x;
            }
        }
        let fne = check_firmly_nonexpansive(&samples, 1e-12);
        ensure(fne.passed(), format!("J_{} not firmly nonexpansive", i + 1))?;
    }
    ensure(worst <= 1e-12, format!("resolvent entry error {worst:e}"))?;
    let s_of = resolvent_samples(&case.gamma, 0, Some(&grid), 1e-12).unwrap();
    let id_err = s_of.pairs.iter().zip(&sums).map(|((s, _), t)| (s - t).amax()).fold(0.0, f64::max);
    ensure(id_err <= 1e-12, format!("Σ J ≠ Id: {id_err:e}"))?;
    let sum_mat = closed.iter().fold(Matrix::zeros(2, 2), |a, m| a + m);
    ensure((sum_mat - Matrix::identity(2, 2)).amax() <= 1e-12, "closed-form sum ≠ Id")?;

    let opts = CyclicOptions { order: 3, budget: 10_000, seed: 2019, tol: 1e-9 };
    let r = check_n_c_cyclic(&case.gamma, Some(&grid), &opts).map_err(|e| e.to_string())?;
    ensure(r.mode == Some(Mode::Randomized), "cyclic check did not run randomized")?;
    ensure(r.failed() && r.witness.is_some(), format!("no 3-cycle violation: {:?}", r.verdict))?;
    Ok(format!("max entry error {worst:.1e}, Σ J residual {id_err:.1e}, 3-cycle slack {:.3}", r.margin))
}

fn partition_counterexample() -> Outcome {
    let case = case_by_id("partition-counterexample").unwrap();
    let grid = sample_5x5();
    let mats = match case.gamma.body() {
        mmono::GammaBody::Linear(ts) => ts.clone(),
        _ => return Err("expected a linear set".into()),
    };
    ensure(mats.len() == 4, "expected four marginals")?;
    let total = mats.iter().fold(Matrix::zeros(2, 2), |a, t| a + t);
    let sum_err = (total - Matrix::identity(2, 2)).amax();
    ensure(sum_err <= 1e-12, format!("Σ T ≠ Id: {sum_err:e}"))?;
    for i in 0..4 {
        let samples = resolvent_samples(&case.gamma, i, Some(&grid), 1e-12).map_err(|e| e.to_string())?;
        // with Σ T = I the resolvent samples are (v, T_i v)
        for (s, x) in &samples.pairs {
            ensure((&mats[i] * s - x).amax() < 1e-12, "resolvent is not T_i")?;
        }
        ensure(check_firmly_nonexpansive(&samples, 1e-9).passed(), format!("J_{} not firm", i + 1))?;
    }
    // two points of Γ whose first-two-block sums differ by (1, 0)
    let a = case.gamma.point_at(&vector(&[0.0, 0.0])).unwrap();
    let b = case.gamma.point_at(&(rotation(-PI / 3.0) * vector(&[1.0, 0.0]))).unwrap();
    let two = GammaSet::finite(SpaceConfig::new(4, 2).unwrap(), vec![a, b]).unwrap();
    let k = IndexSubset::new(4, [0, 1]).unwrap();
    let graph = extract_ak_graph(&two, &k, None).map_err(|e| e.to_string())?;
    let dx = &graph.pairs[1].0 - &graph.pairs[0].0;
    ensure((dx - vector(&[1.0, 0.0])).amax() < 1e-12, "x-difference is not (1, 0)")?;
    let r = check_graph_monotone(&graph, 1e-9);
    ensure(r.failed(), "A_12 looks monotone")?;
    ensure(r.margin <= -0.5 + 1e-9, format!("witness inner product {}", r.margin))?;
    Ok(format!("Σ T residual {sum_err:.1e}, A_12 inner product {:.12}", r.margin))
}

/// Σf − c written out by hand for the restricted-quadratics tuple.
fn restricted_slack_oracle(x: &MultiPoint) -> f64 {
    let (a, b, c) = (x.block(0), x.block(1), x.block(2));
    let f1 = if a[1].abs() < 1e-12 { a[0] * a[0] } else { f64::INFINITY };
    let f2 = if (b[0] - b[1]).abs() < 1e-12 { b.norm_squared() } else { f64::INFINITY };
    let f3 = (8.0 * c[0] * c[0] + 6.0 * c[0] * c[1] + 2.0 * c[1] * c[1]) / 14.0;
    f1 + f2 + f3 - (a.dot(b) + a.dot(c) + b.dot(c))
}

fn restricted_quadratics() -> Outcome {
    let tuple = restricted_quadratic_tuple();
    let gamma = GammaSet::linear(SpaceConfig::new(3, 2).unwrap(), restricted_quadratic_matrices()).unwrap();
    let on = gamma.materialize(Some(&sample_5x5())).unwrap();
    ensure(on.len() == 25, "expected 25 points")?;
    let mut eq_worst: f64 = 0.0;
    for x in &on {
        let s = splitting_slack(&tuple, x).map_err(|e| e.to_string())?;
        ensure((s - restricted_slack_oracle(x)).abs() < 1e-12, "slack disagrees with oracle on Γ")?;
        eq_worst = eq_worst.max(s.abs());
    }
    ensure(eq_worst <= 1e-9, format!("equality residual {eq_worst:e}"))?;

    let mut rng = ChaCha8Rng::seed_from_u64(2019);
    let off: Vec<MultiPoint> = (0..100)
        .map(|_| {
            let mut u = || rng.gen_range(-2.0..2.0);
            let (p, q, r, s) = (u(), u(), u(), u());
            MultiPoint::new(vec![vector(&[p, 0.0]), vector(&[q, q]), vector(&[r, s])]).unwrap()
        })
        .collect();
    let mut off_min = f64::INFINITY;
    for x in &off {
        let s = splitting_slack(&tuple, x).map_err(|e| e.to_string())?;
        ensure((s - restricted_slack_oracle(x)).abs() < 1e-9, "slack disagrees with oracle off Γ")?;
        off_min = off_min.min(s);
    }
    ensure(off_min > 1e-9, format!("off-Γ slack {off_min:e} not strictly positive"))?;
    let rep = check_splitting_inequality(&tuple, &SplittingDomain::Points(off), &on, 1e-9).unwrap();
    ensure(rep.passed(), "splitting check did not pass")?;

    let fine = Grid::cube(2, -2.0, 2.0, 11).unwrap();
    let proj = check_two_marginal_projections(&gamma, Some(&fine), 1e-9).map_err(|e| e.to_string())?;
    for ((i, j), r) in &proj.pairs {
        ensure(r.failed(), format!("Γ_{i},{j} looks monotone"))?;
    }
    ensure(proj.c_monotone.passed(), "Γ not c-monotone")?;
    let max = classify_maximality(&gamma, Some(&sample_5x5()), 1e-9).unwrap();
    ensure(max.passed(), "maximality not certified")?;
    ensure(max.notes.iter().any(|n| n.contains("sum map")), "maximality not certified by the sum map")?;
    Ok(format!("Γ residual {eq_worst:.1e}, min off-Γ slack {off_min:.3e}, 3/3 projections non-monotone"))
}

fn random_quadratic_families() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2019);
    let (mut prox_w, mut env_w, mut sub_w): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for trial in 0..20 {
        let n = 3 + trial % 2;
        let d = 1 + trial % 3;
        let qs = random_commuting_family(&mut rng, n, d);
        let case = make_quadratic_family(&qs).map_err(|e| e.to_string())?;
        let tuple = case.tuple.clone().unwrap();
        let probes: Vec<Vector> = (0..100).map(|_| Vector::from_fn(d, |_, _| rng.gen_range(-5.0..5.0))).collect();
        // oracle: prox_{f_i} = Q_i (Σ Q)⁻¹
        let tinv = qs.iter().fold(Matrix::zeros(d, d), |a, q| a + q).try_inverse().unwrap();
        for s in probes.iter().take(5) {
            for (q, f) in qs.iter().zip(tuple.funcs()) {
                let p = f.prox(s).unwrap();
                ensure((p - q * &tinv * s).norm() <= 1e-9 * (1.0 + s.norm()), "prox oracle mismatch")?;
            }
        }
        let pp = check_prox_partition(&tuple, &probes, 1e-9).unwrap();
        ensure(pp.passed(), format!("prox partition failed (trial {trial})"))?;
        prox_w = prox_w.max(-pp.margin);
        let env = check_envelope_criterion(&tuple, &probes, Some(&case.gamma), 1e-9).unwrap();
        ensure(env.report.passed(), format!("envelope criterion failed (trial {trial})"))?;
        ensure(env.report.metric("probes_on_sum") == Some(100.0), "probes not classified on S(Γ)")?;
        env_w = env_w.max(env.report.metric("max_scaled_equality_residual").unwrap());
        let sub = check_subdiff_identity(&tuple, &case.gamma, case.sample.as_ref(), 1e-9, None).unwrap();
        ensure(sub.passed(), format!("subdiff identity failed (trial {trial})"))?;
        sub_w = sub_w.max(sub.metric("max_gradient_residual").unwrap());
    }
    Ok(format!("worst prox {prox_w:.1e}, envelope {env_w:.1e}, gradient {sub_w:.1e} over 20 families"))
}

/// Direct n = 2 check with every marginal permuted, no reduction.
fn two_cycle_oracle(points: &[MultiPoint], tol: f64) -> bool {
    let n = points[0].blocks().len();
    for a in 0..points.len() {
        for b in 0..points.len() {
            for mask in 0u32..(1 << n) {
                // mask bit i set: marginal i swaps the two points
                let pick = |i: usize, first: bool| {
                    let swap = mask >> i & 1 == 1;
                    let p = if first != swap { &points[a] } else { &points[b] };
                    p.block(i).clone()
                };
                let cost = |first: bool| {
                    let blocks: Vec<Vector> = (0..n).map(|i| pick(i, first)).collect();
                    mmono::cost_eval(&MultiPoint::new(blocks).unwrap())
                };
                let lhs = mmono::cost_eval(&points[a]) + mmono::cost_eval(&points[b]);
                if lhs < cost(true) + cost(false) - tol {
                    return false;
                }
            }
        }
    }
    true
}

fn two_cycle_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2019);
    let (mut passes, mut fails) = (0, 0);
    for trial in 0..100 {
        let n = 3 + trial % 2;
        let d = 1 + (trial / 2) % 2;
        let m = rng.gen_range(2..=5);
        // half the sets come from commuting families (c-monotone), half are random
        let points: Vec<MultiPoint> = if trial % 4 < 2 {
            let qs = random_commuting_family(&mut rng, n, d);
            (0..m)
                .map(|_| {
                    let v = Vector::from_fn(d, |_, _| rng.gen_range(-2.0..2.0));
                    MultiPoint::new(qs.iter().map(|q| q * &v).collect()).unwrap()
                })
                .collect()
        } else {
            (0..m)
                .map(|_| MultiPoint::new((0..n).map(|_| Vector::from_fn(d, |_, _| rng.gen_range(-2.0..2.0))).collect()).unwrap())
                .collect()
        };
        let oracle = two_cycle_oracle(&points, 1e-9);
        let gamma = GammaSet::finite(SpaceConfig::new(n, d).unwrap(), points).unwrap();
        let pair = check_pairwise_c_monotone(&gamma, None, 1e-9).unwrap();
        let cyc = check_n_c_cyclic(&gamma, None, &CyclicOptions { order: 2, ..CyclicOptions::default() }).unwrap();
        ensure(cyc.mode == Some(Mode::Exhaustive), "2-cycle check not exhaustive")?;
        ensure(pair.passed() == cyc.passed(), format!("pairwise and cyclic disagree on trial {trial}"))?;
        ensure(pair.passed() == oracle, format!("oracle disagrees on trial {trial}"))?;
        if pair.passed() {
            passes += 1
        } else {
            fails += 1
        }
    }
    ensure(passes > 0 && fails > 0, "instances are not mixed")?;
    Ok(format!("100/100 agree ({passes} c-monotone, {fails} not)"))
}

fn random_spd(rng: &mut ChaCha8Rng, d: usize) -> Matrix {
    let a = Matrix::from_fn(d, d, |_, _| rng.gen_range(-1.0..1.0));
    let m = &a * a.transpose() + Matrix::identity(d, d) * 0.2;
    (&m + m.transpose()) * 0.5
}

/// Pairs of (f, f*) with f* in closed form, computed independently of the prox.
fn decomposition_instances(rng: &mut ChaCha8Rng) -> Vec<(String, ConvexFn, ConvexFn)> {
    let mut out = Vec::new();
    for d in 1..=3 {
        let m = random_spd(rng, d);
        let f = ConvexFn::quadratic(m.clone()).unwrap();
        let conj = fenchel_conjugate(&f, &ConjugateMethod::ClosedForm).unwrap().func;
        out.push((format!("quadratic d={d}"), f, conj));
    }
    for (d, k) in [(2, 1), (3, 1), (3, 2), (2, 0)] {
        let raw = Matrix::from_fn(d, d, |_, _| rng.gen_range(-1.0..1.0));
        let basis = raw.qr().q().columns(0, k).into_owned();
        let m = random_spd(rng, d);
        let f = ConvexFn::subspace(basis.clone(), m.clone()).unwrap();
        // f*(u) = ½ uᵀ B (BᵀMB)⁻¹ Bᵀ u
        let conj_m = if k == 0 {
            Matrix::zeros(d, d)
        } else {
            &basis * (basis.transpose() * &m * &basis).try_inverse().unwrap() * basis.transpose()
        };
        let conj = ConvexFn::quadratic((&conj_m + conj_m.transpose()) * 0.5).unwrap();
        out.push((format!("restricted quadratic d={d} k={k}"), f, conj));
    }
    out
}

fn moreau_decomposition() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2019);
    let (mut dec_w, mut grad_w): (f64, f64) = (0.0, 0.0);
    let instances = decomposition_instances(&mut rng);
    for (label, f, conj) in &instances {
        let d = f.dim();
        for _ in 0..100 {
            let s = Vector::from_fn(d, |_, _| rng.gen_range(-5.0..5.0));
            let q = 0.5 * s.norm_squared();
            let total = f.moreau_envelope(&s).unwrap() + conj.moreau_envelope(&s).unwrap();
            let scaled = (total - q).abs() / (1.0 + s.norm_squared());
            ensure(scaled <= 1e-9, format!("{label}: decomposition residual {scaled:e}"))?;
            dec_w = dec_w.max(scaled);
            let p = f.prox(&s).unwrap();
            let delta = 1e-4;
            for k in 0..d {
                let mut e = Vector::zeros(d);
                e[k] = delta;
                let fd = (f.moreau_envelope(&(&s + &e)).unwrap() - f.moreau_envelope(&(&s - &e)).unwrap()) / (2.0 * delta);
                let err = (fd - (s[k] - p[k])).abs();
                ensure(err <= 1e-5, format!("{label}: envelope gradient error {err:e}"))?;
                grad_w = grad_w.max(err);
            }
        }
    }
    Ok(format!("{} functions, decomposition {dec_w:.1e}, gradient {grad_w:.1e}", instances.len()))
}

fn doubled_q_fixed_point() -> Outcome {
    let grid = Grid::cube(1, -3.0, 3.0, 61).unwrap();
    let grids = vec![grid.clone(); 3];
    let tuple = SplittingTuple::new(vec![ConvexFn::scaled_q(1, 2.0).unwrap(); 3]).unwrap();
    let r = relax_to_c_conjugate(&tuple, &grids, 2).map_err(|e| e.to_string())?;
    let first = r.interior_changes[0];
    ensure(first <= 0.02, format!("interior change after pass 1: {first:e}"))?;
    let h = grid.step(0);
    let tol = r.last_pass_change + 1e-6;
    let ext = splitting_set_extract(&r.tuple, &grids, Some(tol), None).map_err(|e| e.to_string())?;
    ensure(!ext.points.is_empty(), "empty splitting set")?;
    let mut spread: f64 = 0.0;
    for p in &ext.points {
        let xs: Vec<f64> = p.blocks().iter().map(|b| b[0]).collect();
        let lo = xs.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        spread = spread.max(hi - lo);
    }
    ensure(spread <= h + 1e-12, format!("extracted point {spread} away from the diagonal"))?;
    ensure(ext.points.len() >= grid.len(), "diagonal nodes missing")?;
    Ok(format!("pass-1 interior change {first:.1e}, {} nodes, spread {spread:.1e} ≤ h = {h}", ext.points.len()))
}

fn curve_line() -> Outcome {
    let ts: Vec<f64> = (-40..=40).map(|k| k as f64 * 0.1).collect();
    let alphas = vec![
        MonotoneTable::sample(ts.clone(), |t| t).unwrap(),
        MonotoneTable::sample(ts, |t| 2.0 * t).unwrap(),
    ];
    let samples: Vec<f64> = (-15..=15).map(|k| k as f64 * 0.13).collect();
    let case = make_curve_family(alphas, &samples).map_err(|e| e.to_string())?;
    let tuple = case.tuple.clone().unwrap();
    let mut worst: f64 = 0.0;
    for &t in &samples {
        let x = MultiPoint::scalars(&[t, 2.0 * t]).unwrap();
        // oracle: f₁ = x², f₂ = x²/4
        let f1 = tuple.get(0).eval(&vector(&[t])).unwrap();
        let f2 = tuple.get(1).eval(&vector(&[2.0 * t])).unwrap();
        ensure((f1 - t * t).abs() <= 1e-8 && (f2 - t * t).abs() <= 1e-8, "antiderivative mismatch")?;
        worst = worst.max(splitting_slack(&tuple, &x).unwrap().abs());
    }
    ensure(worst <= 1e-8, format!("equality residual {worst:e}"))?;
    let sub = check_subdiff_identity(&tuple, &case.gamma, None, 1e-6, None).unwrap();
    ensure(sub.passed(), "subdiff identity failed")?;
    Ok(format!("equality residual {worst:.1e}, gradient residual {:.1e}", sub.metric("max_gradient_residual").unwrap()))
}

fn three_marginal_doubled_q() -> Outcome {
    let grid = Grid::cube(1, -3.0, 3.0, 61).unwrap();
    let g = ConvexFn::scaled_q(1, 2.0).unwrap();
    let h = grid.step(0);
    let r = three_marginal_smooth_check(&g, &g, &vec![grid; 3], None, Some(3.0 * h)).map_err(|e| e.to_string())?;
    ensure(r.passed(), format!("identity off by {:?}", r.metric("max_residual")))?;
    // oracle: each conjugate envelope is q/3
    for s in [-2.0, 0.5, 2.9] {
        let v = g.conjugate_envelope(&vector(&[s])).unwrap();
        ensure((v - s * s / 6.0).abs() < 1e-12, "e_{g*} ≠ q/3")?;
    }
    Ok(format!("max residual {:.1e} ≤ 3h = {:.2}", r.metric("max_residual").unwrap(), 3.0 * h))
}

#[test]
fn acceptance() {
    type Criterion = (&'static str, fn() -> Outcome, Duration);
    let criteria: [Criterion; 9] = [
        ("1 rotation tripod resolvents and 3-cycle", resolvents_of_rotation_tripod, Duration::from_secs(1)),
        ("2 resolvent partition counterexample", partition_counterexample, Duration::from_secs(1)),
        ("3 restricted quadratics", restricted_quadratics, Duration::from_secs(1)),
        ("4 random commuting quadratic families", random_quadratic_families, Duration::from_secs(5)),
        ("5 pairwise vs 2-cycle equivalence", two_cycle_equivalence, Duration::from_secs(10)),
        ("6 Moreau decomposition", moreau_decomposition, Duration::from_secs(5)),
        ("7 doubled-q relaxation fixed point", doubled_q_fixed_point, Duration::from_secs(5)),
        ("8 curve (t, 2t)", curve_line, Duration::from_secs(1)),
        ("9 three-marginal envelope identity", three_marginal_doubled_q, Duration::from_secs(5)),
    ];
    let mut failures = 0;
    for (name, run, limit) in criteria {
        let start = Instant::now();
        let out = run();
        let took = start.elapsed();
        let out = out.and_then(|msg| {
            if took <= limit {
                Ok(msg)
            } else {
                Err(format!("{msg}; took {took:?}, limit {limit:?}"))
            }
        });
        match out {
            Ok(msg) => println!("PASS criterion {name}: {msg} [{took:.2?}]"),
            Err(msg) => {
                failures += 1;
                println!("FAIL criterion {name}: {msg} [{took:.2?}]");
            }
        }
    }
    assert_eq!(failures, 0, "{failures} acceptance criteria failed");
}
