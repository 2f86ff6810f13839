//! Acceptance suite: one pass/fail line per criterion.
//!
//! Run with `cargo test -p asqlab-core --test acceptance`. Exits nonzero if any
//! criterion fails.

use std::time::{Duration, Instant};

use num_traits::Signed;

use asqlab_core::certificates::{build_counterexample, refute_lasq_sweep, refute_unit_h, verify_certificate};
use asqlab_core::constructions::{make_c0_sum, make_fkn, make_xn};
use asqlab_core::moduli::{
    contact_point, mvee, john_bound_certificate, random_symmetric_polytope, ModulusConfig, JohnBoundConfig, MVEE_TOL,
};
use asqlab_core::oracle::enumerate_oracle;
use asqlab_core::random::{eps_sequence, random_unit, random_unit_sum, random_vector, trial_rng, VectorShape};
use asqlab_core::space::{monotone_limit_check, sum_scale};
use asqlab_core::witness::{
    component_witness, coordinate_witness, linf_transfer_witness, pair_witness, super_sequence, type_tau, RightFactor,
};
use asqlab_core::{CoordVector, PolyNormSpace, Rational, Result, Scalar, SumVector};

/// Float-mode comparison tolerance for the sandwich inequalities.
const SANDWICH_REL_TOL: f64 = 1e-12;
/// Float-mode tolerance for witness bounds, norms and certificates.
const FLOAT_REL_TOL: f64 = 1e-9;
/// MVEE of the square against `diag(1/2, 1/2)`, entrywise.
const MVEE_ENTRY_TOL: f64 = 1e-6;
/// Slack below `(1 + 1/n)^{1/2}` allowed at the contact point.
const JOHN_BOUND_SLACK: f64 = 1e-9;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Result<Outcome> {
    Ok(Outcome { passed, detail: detail.into() })
}

fn q(n: i64, d: i64) -> Rational {
    Rational::from_ratio(n, d)
}

fn oracle_equivalence() -> Result<Outcome> {
    let cases: Vec<(PolyNormSpace, VectorShape)> = vec![
        (make_fkn(2, 4, 8)?, VectorShape::full(8)),
        (make_fkn(3, 9, 18)?, VectorShape::full(18)),
        (make_xn(2, 2, 16)?, VectorShape::full(16)),
        // Full support at m = 32 exceeds the enumeration cap; 12 random coordinates out of 32.
        (make_xn(2, 4, 32)?, VectorShape::sparse(12, 32)),
    ];
    let mut mismatches = 0;
    let mut total = 0;
    for (c, (space, shape)) in cases.iter().enumerate() {
        let mut rng = trial_rng(1000 + c as u64, 0);
        for _ in 0..1000 {
            let f: CoordVector<Rational> = random_vector(&mut rng, space.dim(), shape)?;
            total += 1;
            if space.norm(&f)? != enumerate_oracle(space, &f)? {
                mismatches += 1;
            }
        }
    }
    outcome(mismatches == 0, format!("{mismatches} mismatches in {total} exact comparisons over 4 spaces"))
}

fn sandwiches() -> Result<Outcome> {
    // (space, k, upper factor)
    let cases = [
        (make_fkn(2, 4, 8)?, 2, 1),
        (make_fkn(3, 9, 18)?, 3, 1),
        (make_xn(2, 2, 16)?, 2, 2),
        (make_xn(3, 4, 64)?, 3, 3),
    ];
    let mut violations = 0;
    let mut checks = 0;
    for (c, (space, k, upper)) in cases.iter().enumerate() {
        let shape = VectorShape::full(space.dim());
        let mut rng = trial_rng(2000 + c as u64, 0);
        for _ in 0..1000 {
            let f: CoordVector<Rational> = random_vector(&mut rng, space.dim(), &shape)?;
            let n = space.norm(&f)?;
            let linf = f.linf();
            violations += usize::from(!(linf.clone() / Rational::from_usize(*k) <= n && n <= linf * Rational::from_usize(*upper)));
            let g = f.to_f64();
            let nf = space.norm(&g)?;
            let lf = g.linf();
            violations += usize::from(!((lf / *k as f64).le_tol(&nf, SANDWICH_REL_TOL) && nf.le_tol(&(lf * *upper as f64), SANDWICH_REL_TOL)));
            checks += 2;
        }
    }
    outcome(violations == 0, format!("{violations} violations in {checks} checks (rational exact, float rel 1e-12)"))
}

fn coordinate_witnesses() -> Result<Outcome> {
    let mut failures = 0;
    let mut worst = Rational::from_usize(0);
    for (c, (space, k)) in [(make_fkn(2, 4, 8)?, 2), (make_fkn(3, 9, 18)?, 3)].iter().enumerate() {
        let shape = VectorShape::full(space.dim());
        let mut rng = trial_rng(3000 + c as u64, 0);
        for _ in 0..1000 {
            let f: CoordVector<Rational> = random_unit(space, &mut rng, &shape)?;
            let r = coordinate_witness(space, &f, 0.0)?;
            let w = r.worst().expect("one input");
            let ok = r.h_norm == q(1, 1) && r.bound == q(1, 1) + Rational::recip_usize(*k) && w <= r.bound;
            failures += usize::from(!ok || !r.passed());
            worst = Rational::max_of(worst, w - r.bound.clone());
        }
    }
    let space = make_fkn(2, 4, 8)?;
    let spike = coordinate_witness(&space, &CoordVector::basis(8, 1, q(2, 1))?, 0.0)?;
    let spike_ok = spike.worst() == Some(q(1, 1));
    outcome(
        failures == 0 && spike_ok,
        format!("{failures} failures in 2000 trials; max(value - bound) = {worst}; f = 2e_1 gives {}", spike.worst().unwrap()),
    )
}

fn pair_witnesses() -> Result<Outcome> {
    let m = 4096;
    let mut failures = 0;
    let mut worst_excess = f64::NEG_INFINITY;
    for big_n in [2usize, 4] {
        let space = make_xn(2, big_n, m)?;
        let shape = VectorShape { nnz: 12, support: 64, magnitude: 3, spike: Some(3), noise: 1e-3, noise_support: m };
        for rep in 0..100 {
            let mut rng = trial_rng(4000 + big_n as u64 * 1000, rep);
            let fs = (0..5).map(|_| random_unit::<f64, _>(&space, &mut rng, &shape)).collect::<Result<Vec<_>>>()?;
            let r = pair_witness(&space, &fs, FLOAT_REL_TOL)?;
            let idx: Vec<usize> = r.h.support().collect();
            let shape_ok = idx.len() == 2 && r.h.get(idx[0]) == 1.0 && r.h.get(idx[1]) == -1.0;
            let bound = 1.0 + 1.0 / big_n as f64;
            let w = r.worst().unwrap();
            worst_excess = worst_excess.max(w - bound);
            failures += usize::from(!(shape_ok && r.passed() && (r.h_norm - 1.0).abs() <= FLOAT_REL_TOL && w.le_tol(&bound, FLOAT_REL_TOL)));
        }
    }
    let x2 = make_xn(2, 2, 16)?;
    let hand = pair_witness(&x2, &[CoordVector::basis(16, 4, q(2, 1))?], 0.0)?;
    let hand_ok = hand.worst() == Some(q(3, 2));
    outcome(
        failures == 0 && hand_ok,
        format!("{failures} failures in 200 runs of K = 5; max(value - bound) = {worst_excess:.3e}; 2e_4 gives {}", hand.worst().unwrap()),
    )
}

fn lasq_failure() -> Result<Outcome> {
    let space = make_xn(2, 2, 16)?;
    let cfg = ModulusConfig::new(200, 60, 5);
    let sweep = refute_lasq_sweep(&space, &cfg, false)?;
    let threshold = 7.0 / 6.0;
    let search_ok = sweep.modulus.value_upper >= threshold && sweep.failures.is_empty() && sweep.certified == 200;
    let f: CoordVector<Rational> = build_counterexample(&space)?;
    let eps = q(1, 8);
    let shape = VectorShape::full(16);
    let mut failures = 0;
    for i in 0..200 {
        let h: CoordVector<Rational> = random_unit(&space, &mut trial_rng(5000, i), &shape)?;
        let ok = match refute_unit_h(&space, &f, &h, &eps, 0.0) {
            Ok(cert) => verify_certificate(&space, &f, &h, &cert, 0.0)?.passed() && cert.achieved > q(9, 8),
            Err(_) => false,
        };
        failures += usize::from(!ok);
    }
    outcome(
        search_ok && failures == 0,
        format!(
            "best found {:.6} (>= 7/6), {} of 200 search candidates certified; {failures} certificate failures on 200 random h",
            sweep.modulus.value_upper, sweep.certified
        ),
    )
}

fn component_witnesses() -> Result<Outcome> {
    let space = make_c0_sum(&[(2, 2, 32), (2, 4, 32), (2, 6, 32)])?;
    let eps = q(1, 4);
    let shapes: Vec<VectorShape> = (0..3).map(|_| VectorShape::sparse(6, 8)).collect();
    let mut failures = 0;
    let mut worst = q(0, 1);
    for i in 0..100 {
        let mut rng = trial_rng(6000, i);
        let fs = (0..3).map(|_| random_unit_sum::<Rational, _>(&space, &mut rng, &shapes, 0.7)).collect::<Result<Vec<_>>>()?;
        let r = component_witness(&space, &fs, &eps, 0.0)?;
        let w = r.worst().unwrap();
        let ok = r.placement == vec![3] && r.bound == q(7, 6) && w <= q(7, 6) && r.passed();
        failures += usize::from(!ok);
        worst = Rational::max_of(worst, w);
    }
    outcome(failures == 0, format!("{failures} failures in 100 triples; M = 6, bound 7/6, worst {worst}"))
}

fn john_bound() -> Result<Outcome> {
    let square = vec![vec![1.0, 1.0], vec![1.0, -1.0], vec![-1.0, 1.0], vec![-1.0, -1.0]];
    let fit = mvee(&square, MVEE_TOL)?;
    let qm = fit.ellipsoid.q();
    let mvee_ok = (qm[(0, 0)] - 0.5).abs() <= MVEE_ENTRY_TOL
        && (qm[(1, 1)] - 0.5).abs() <= MVEE_ENTRY_TOL
        && qm[(0, 1)].abs() <= MVEE_ENTRY_TOL;
    let (x, _) = contact_point(&square, &fit.ellipsoid, 1e-6)?;
    let grid = john_bound_certificate(&square, &JohnBoundConfig { samples: 0, seed: 0, grid_res: Some(1e-3), tol: JOHN_BOUND_SLACK })?;
    let grid_ok = grid.violations == 0 && (grid.worst_value - 2.0).abs() <= 1e-9 && grid.grid_points > 0;
    let mut violations = 0;
    let mut min_obs = f64::INFINITY;
    for i in 0..50 {
        let vertices = random_symmetric_polytope(3, &mut trial_rng(7000, i));
        let r = john_bound_certificate(&vertices, &JohnBoundConfig { samples: 10_000, seed: 7000 + i as u64, grid_res: None, tol: JOHN_BOUND_SLACK })?;
        violations += r.violations;
        min_obs = min_obs.min(r.worst_value);
    }
    outcome(
        mvee_ok && grid_ok && violations == 0 && min_obs >= (4.0f64 / 3.0).sqrt() - JOHN_BOUND_SLACK,
        format!(
            "square Q = [{:.9}, {:.9}; {:.9}], contact {:?}, grid worst {:.12} over {} points; R^3: {violations} violations, min observed {:.6} >= {:.6}",
            qm[(0, 0)], qm[(0, 1)], qm[(1, 1)], x, grid.worst_value, grid.grid_points, min_obs, (4.0f64 / 3.0).sqrt()
        ),
    )
}

fn projection_shadow() -> Result<Outcome> {
    let mut failures = 0;
    for (c, space) in [make_xn(2, 2, 16)?, make_xn(2, 4, 32)?].iter().enumerate() {
        let shape = VectorShape::full(space.dim());
        let mut rng = trial_rng(8000 + c as u64, 0);
        for _ in 0..100 {
            let f: CoordVector<Rational> = random_vector(&mut rng, space.dim(), &shape)?;
            failures += usize::from(!monotone_limit_check(space, &f, 0.0)?.passed());
        }
    }
    outcome(failures == 0, format!("{failures} failures in 200 exact sweeps"))
}

fn tau_type() -> Result<Outcome> {
    let specs: Vec<(usize, usize, usize)> = (1..=33).map(|i| (2, 2 * i, 256)).collect();
    let space = make_c0_sum(&specs)?;
    let eps = eps_sequence(20, 1.0 / 64.0)?;
    let shapes: Vec<VectorShape> =
        (0..33).map(|c| if c < 3 { VectorShape::sparse(4, 8) } else { VectorShape::sparse(0, 0) }).collect();
    let mut rng = trial_rng(9000, 0);
    let dense = (0..20).map(|_| random_unit_sum::<f64, _>(&space, &mut rng, &shapes, 1.0)).collect::<Result<Vec<_>>>()?;
    let seq = super_sequence(&space, &dense, &eps, FLOAT_REL_TOL)?;
    let mut xs: Vec<SumVector<f64>> = vec![space.zero()];
    for d in &dense {
        xs.push(d.clone());
        xs.push(sum_scale(d, &2.0));
    }
    let mut failures = 0;
    let mut worst = 0.0f64;
    for x in &xs {
        let t = type_tau(&space, x, &seq, &dense)?;
        let dev = (t.tau - t.norm_x.max(1.0)).abs();
        worst = worst.max(dev - t.density_gap);
        failures += usize::from(dev > 2.0 / 64.0 + t.density_gap + 1e-12);
    }
    outcome(
        seq.passed() && failures == 0,
        format!("sequence of {} steps holds: {}; {failures} of {} points outside 2/64 + gap (worst excess {worst:.3e})", seq.steps.len(), seq.passed(), xs.len()),
    )
}

fn linf_transfer() -> Result<Outcome> {
    let left = make_fkn(2, 4, 8)?;
    let right_space = make_xn(2, 4, 32)?;
    let right = RightFactor::Single(right_space.clone());
    let mut failures = 0;
    for i in 0..100 {
        let mut rng = trial_rng(10_000, i);
        let w: CoordVector<Rational> = random_vector(&mut rng, 8, &VectorShape::full(8))?;
        let x: CoordVector<Rational> = random_unit(&right_space, &mut rng, &VectorShape::sparse(8, 8))?;
        let wn = left.norm(&w)?;
        let w = if wn == q(0, 1) { w } else { w.scale(&(Rational::random(&mut rng, 1).abs() / wn)) };
        let r = linf_transfer_witness(&left, &right, &[w], &[vec![x]], 0.0)?;
        let ok = r.passed() && r.identity_holds && r.report.bound == q(5, 4);
        failures += usize::from(!ok);
    }
    outcome(failures == 0, format!("{failures} failures in 100 pairs; bound 5/4 with the exact max identity"))
}

fn main() {
    type Criterion = (&'static str, fn() -> Result<Outcome>, Duration);
    let criteria: [Criterion; 10] = [
        ("oracle equivalence (exact)", oracle_equivalence, Duration::from_secs(60)),
        ("sandwich inequalities for F_{k,n} and X_N", sandwiches, Duration::from_secs(600)),
        ("coordinate witness in F_{k,n}", coordinate_witnesses, Duration::from_secs(600)),
        ("pair witness in X_N, m = 4096", pair_witnesses, Duration::from_secs(120)),
        ("no good witness at the counterexample", lasq_failure, Duration::from_secs(600)),
        ("component witness in the c0-sum", component_witnesses, Duration::from_secs(600)),
        ("John ellipsoid lower bound", john_bound, Duration::from_secs(300)),
        ("projection monotonicity", projection_shadow, Duration::from_secs(600)),
        ("witness sequence and tau(x) = max(|x|, 1)", tau_type, Duration::from_secs(600)),
        ("witness transfer to the l_inf-sum", linf_transfer, Duration::from_secs(600)),
    ];
    let mut failed = 0;
    for (i, (name, run, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = run();
        let elapsed = start.elapsed();
        let (passed, detail) = match result {
            Ok(o) => (o.passed && elapsed <= *budget, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        failed += usize::from(!passed);
        let tag = if passed { "PASS" } else { "FAIL" };
        println!("[{tag}] {:>2}. {name}: {detail} ({:.1}s, budget {}s)", i + 1, elapsed.as_secs_f64(), budget.as_secs());
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
