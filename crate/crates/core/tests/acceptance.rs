//! End-to-end acceptance run: one PASS or FAIL line per criterion, exit
//! status 1 when any criterion fails.

use std::time::{Duration, Instant};

use icregime::model::{
    DiscreteBroadcastChannel, DiscreteTwoOutputChannel, GaussianIC, StochasticMatrix,
    TwoOutputSystem, UserSet,
};
use icregime::regimes::{
    degraded_equivalent, gaussian_3user_check, gaussian_kuser_check, kuser_regime_gains,
};
use icregime::regions::{
    membership, quasi_random_rates, region_full, region_simplified, sum_capacity, support, vertices,
};
use icregime::verifier::{
    bc_more_capable_order, bc_sum_capacity, corollary1_gap, degradation_feasibility, grid_min_gap,
    make_degraded_channel, random_stochastic, sample_lemma1_gap, sample_lemma3_gap_n2,
    sample_lemma4_gap, GridSpec, Mode, SampleSpec, GAP_TOL,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome, Duration);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn h2(p: f64) -> f64 {
    if p <= 0.0 || p >= 1.0 {
        0.0
    } else {
        -p * p.log2() - (1.0 - p) * (1.0 - p).log2()
    }
}

/// Best subset bound over the listed receivers, unit powers and unit noise.
fn mac_bound(gains: &[Vec<f64>], s: UserSet, receivers: impl Iterator<Item = usize>) -> f64 {
    receivers
        .map(|j| 0.5 * (1.0 + s.iter().map(|i| gains[j][i] * gains[j][i]).sum::<f64>()).log2())
        .fold(f64::INFINITY, f64::min)
}

fn two_user_reduction() -> Outcome {
    let values = [0.25, 0.5, 1.0, 1.5, 2.0, 4.0];
    let mut cells = 0;
    for a in values {
        for b in values {
            let ic = GaussianIC::with_unit_powers(vec![vec![1.0, a], vec![b, 1.0]]).map_err(|e| e.to_string())?;
            let got = gaussian_kuser_check(&ic, 0).map_err(|e| e.to_string())?.pass;
            let want = a.abs() >= 1.0 && b.abs() >= 1.0;
            ensure(got == want, || format!("a = {a}, b = {b}: pass = {got}, expected {want}"))?;
            cells += 1;
        }
    }
    Ok(format!("{cells} cells match"))
}

fn three_user_example() -> Outcome {
    let (a13, a21, a32) = (2.0, 3.0, 2.0);
    let by_hand = vec![
        vec![1.0, a13 * a32, a13],
        vec![a21, 1.0, a21 * a13],
        vec![a32 * a21, a32, 1.0],
    ];
    let gains = kuser_regime_gains(&[a13, a21, a32]);
    ensure(gains == by_hand, || format!("generated gains {gains:?} differ from {by_hand:?}"))?;
    let ic = GaussianIC::with_unit_powers(gains).map_err(|e| e.to_string())?;
    ensure(gaussian_3user_check(&ic).map_err(|e| e.to_string())?.pass, || "3-user check fails".into())?;
    ensure(gaussian_kuser_check(&ic, 0).map_err(|e| e.to_string())?.pass, || "cyclic check fails".into())?;
    let row_sums: Vec<f64> = by_hand.iter().map(|r| r.iter().map(|g| g * g).sum()).collect();
    ensure(row_sums == [21.0, 46.0, 41.0], || format!("row power sums {row_sums:?}"))?;
    let oracle = 0.5 * (1.0 + row_sums[0]).log2();
    let c = sum_capacity(&ic).map_err(|e| e.to_string())?;
    ensure((c - oracle).abs() <= 1e-9, || format!("sum capacity {c}, expected {oracle}"))?;
    ensure((c - 2.229716).abs() <= 1e-6, || format!("sum capacity {c}, expected 2.229716"))?;
    Ok(format!("sum capacity {c:.6}"))
}

fn region_redundancy() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut points = 0;
    for n in 0..100 {
        let k = if n % 2 == 0 { 3 } else { 4 };
        let free: Vec<f64> = (0..k)
            .map(|_| {
                let m = rng.random_range(1.0..=3.0);
                if rng.random_bool(0.5) { -m } else { m }
            })
            .collect();
        let gains = kuser_regime_gains(&free);
        let ic = GaussianIC::with_unit_powers(gains.clone()).map_err(|e| e.to_string())?;
        let full = region_full(&ic).map_err(|e| e.to_string())?;
        let simp = region_simplified(&ic).map_err(|e| e.to_string())?;
        for s in full.subsets() {
            let (f, g) = (full.bound(s), simp.bound(s));
            ensure((f - g).abs() <= 1e-9, || format!("instance {n}, {s}: full {f}, simplified {g}"))?;
            let oracle = mac_bound(&gains, s, s.iter());
            ensure((g - oracle).abs() <= 1e-9, || format!("instance {n}, {s}: bound {g}, oracle {oracle}"))?;
        }
        for r in quasi_random_rates(&full, &simp, 1000) {
            let a = membership(&full, &r).map_err(|e| e.to_string())?.inside;
            let b = membership(&simp, &r).map_err(|e| e.to_string())?.inside;
            ensure(a == b, || format!("instance {n}: membership differs at {:?}", r.rates()))?;
            points += 1;
        }
    }
    Ok(format!("100 instances, {points} membership queries agree"))
}

fn random_degraded(rng: &mut ChaCha8Rng) -> Result<DiscreteTwoOutputChannel, String> {
    let mu1 = rng.random_range(1..=2);
    let mu2 = rng.random_range(0..=1);
    let alphabets: Vec<usize> = (0..mu1 + mu2).map(|_| rng.random_range(2..=3)).collect();
    let tuples: usize = alphabets.iter().product();
    let (y2, y1) = (rng.random_range(2..=3), rng.random_range(2..=3));
    let base = random_stochastic(tuples, y2, 1.0, rng);
    let garble = random_stochastic(y2, y1, 1.0, rng);
    make_degraded_channel(alphabets, mu1, &base, &garble).map_err(|e| e.to_string())
}

fn lemma_ground_truth() -> Outcome {
    let grid = GridSpec::new(8).map_err(|e| e.to_string())?;
    let mut worst = f64::INFINITY;
    for n in 0..50u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(1000 + n);
        let ch = random_degraded(&mut rng)?;
        let spec = SampleSpec::new(200, n).map_err(|e| e.to_string())?;
        let moved: Vec<usize> = (0..ch.mu1() - 1).collect();
        let g = grid_min_gap(&ch, &grid).map_err(|e| e.to_string())?;
        ensure(g.mode == Mode::Grid, || format!("channel {n}: grid fell back to sampling"))?;
        let results = [
            ("grid", g),
            ("lemma1", sample_lemma1_gap(&ch, 3, &spec).map_err(|e| e.to_string())?),
            ("lemma3", sample_lemma3_gap_n2(&ch, 3, &spec).map_err(|e| e.to_string())?),
            ("lemma4", sample_lemma4_gap(&ch, 2, 3, &spec).map_err(|e| e.to_string())?),
            ("corollary1", corollary1_gap(&ch, &moved, 3, &spec).map_err(|e| e.to_string())?),
        ];
        for (name, r) in results {
            ensure(r.min_gap >= -1e-10, || format!("channel {n}, {name}: min gap {}", r.min_gap))?;
            worst = worst.min(r.min_gap);
        }
    }
    let anti = make_degraded_channel(vec![2], 1, &StochasticMatrix::bsc(0.1), &StochasticMatrix::bsc(0.125))
        .map_err(|e| e.to_string())?
        .swap_outputs();
    let bad = grid_min_gap(&anti, &grid).map_err(|e| e.to_string())?;
    let cascade = 0.1 * 0.875 + 0.9 * 0.125;
    let uniform_gap = h2(0.1) - h2(cascade);
    ensure(bad.min_gap <= uniform_gap + 1e-12, || format!("witness {} above uniform gap {uniform_gap}", bad.min_gap))?;
    ensure(bad.min_gap <= -0.25, || format!("witness min gap {}", bad.min_gap))?;
    Ok(format!("50 channels, smallest gap {worst:.3e}; witness gap {:.6}", bad.min_gap))
}

fn broadcast_capacity() -> Outcome {
    let chain = DiscreteBroadcastChannel::new(vec![
        StochasticMatrix::bsc(0.1),
        StochasticMatrix::bsc(0.2),
        StochasticMatrix::bsc(0.3),
    ])
    .map_err(|e| e.to_string())?;
    let grid = GridSpec::new(64).map_err(|e| e.to_string())?;
    let order = bc_more_capable_order(&chain, &grid).map_err(|e| e.to_string())?;
    ensure(order.order.as_deref() == Some(&[0, 1, 2][..]), || format!("order {:?}", order.order))?;
    let c = bc_sum_capacity(&chain, 0).map_err(|e| e.to_string())?.capacity;
    let oracle = 1.0 - h2(0.1);
    ensure((c - oracle).abs() <= 1e-5, || format!("BSC capacity {c}, expected {oracle}"))?;

    let erasures = DiscreteBroadcastChannel::new(vec![StochasticMatrix::bec(0.5), StochasticMatrix::bec(0.25)])
        .map_err(|e| e.to_string())?;
    let order = bc_more_capable_order(&erasures, &grid).map_err(|e| e.to_string())?;
    let top = order.order.as_ref().ok_or("erasure channels unordered")?[0];
    ensure(top == 1, || format!("strongest erasure receiver {top}"))?;
    let e = bc_sum_capacity(&erasures, top).map_err(|e| e.to_string())?.capacity;
    ensure((e - 0.75).abs() <= 1e-5, || format!("BEC capacity {e}, expected 0.75"))?;
    Ok(format!("BSC chain {c:.6}, BEC {e:.6}"))
}

fn more_capable_not_degraded() -> Outcome {
    let (bsc, bec) = (StochasticMatrix::bsc(0.1), StochasticMatrix::bec(0.4));
    let pair = DiscreteBroadcastChannel::new(vec![bsc.clone(), bec.clone()]).map_err(|e| e.to_string())?;
    let order = bc_more_capable_order(&pair, &GridSpec::new(128).map_err(|e| e.to_string())?)
        .map_err(|e| e.to_string())?;
    let o = order.order.as_ref().ok_or("pair is not ordered")?;
    let (strong, weak) = (o[0], o[1]);
    let m = order.pairwise[strong][weak];
    ensure(m >= -GAP_TOL, || format!("margins change sign: minimum {m}"))?;
    let forward = degradation_feasibility(&bsc, &bec).map_err(|e| e.to_string())?;
    let backward = degradation_feasibility(&bec, &bsc).map_err(|e| e.to_string())?;
    ensure(!forward.degraded && !backward.degraded, || {
        format!("degradation feasible: {} / {}", forward.degraded, backward.degraded)
    })?;
    Ok(format!("receiver {} more capable, minimum margin {m:.3e}, not degraded either way", strong + 1))
}

fn degraded_equivalent_match() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst: f64 = 0.0;
    for n in 0..100 {
        let mu1 = rng.random_range(1..=3);
        let mu2 = rng.random_range(0..=2);
        let magnitude = 1.0 - rng.random_range(0.0..1.0);
        let alpha = if rng.random_bool(0.5) { -magnitude } else { magnitude };
        let b: Vec<f64> = (0..mu1 + mu2).map(|_| rng.random_range(-3.0..3.0)).collect();
        let mut a: Vec<f64> = b[..mu1].iter().map(|x| alpha * x).collect();
        a.extend((0..mu2).map(|_| rng.random_range(-3.0..3.0)));
        let sys = TwoOutputSystem::new(mu1, mu2, a.clone(), b.clone()).map_err(|e| e.to_string())?;
        let d = degraded_equivalent(&sys).map_err(|e| format!("system {n}: {e}"))?;
        // expand alpha (b . X + Z2) + c . X_C + s Z' into input and noise coefficients
        let mut coeffs: Vec<f64> = b.iter().map(|x| d.alpha * x).collect();
        for (j, c) in d.corrections.iter().enumerate() {
            coeffs[mu1 + j] += c;
        }
        let variance = d.alpha * d.alpha + d.noise_scale * d.noise_scale;
        for (got, want) in coeffs.iter().zip(&a) {
            worst = worst.max((got - want).abs());
        }
        worst = worst.max((variance - 1.0).abs());
        ensure(worst <= 1e-12, || format!("system {n}: mismatch {worst:e}"))?;
    }
    Ok(format!("100 systems, largest mismatch {worst:.1e}"))
}

fn geometry_oracles() -> Outcome {
    let ic = GaussianIC::with_unit_powers(vec![vec![1.0; 2]; 2]).map_err(|e| e.to_string())?;
    let region = region_full(&ic).map_err(|e| e.to_string())?;
    let corner = 0.5 * 3f64.log2() - 0.5;
    let expected = [[0.0, 0.0], [0.5, 0.0], [0.0, 0.5], [0.5, corner], [corner, 0.5]];
    let got = vertices(&region).map_err(|e| e.to_string())?;
    ensure(got.len() == expected.len(), || format!("{} vertices", got.len()))?;
    for e in expected {
        ensure(
            got.iter().any(|v| (v.rates()[0] - e[0]).abs() <= 1e-9 && (v.rates()[1] - e[1]).abs() <= 1e-9),
            || format!("vertex {e:?} missing"),
        )?;
    }
    ensure((corner - 0.292481).abs() <= 1e-6, || format!("corner {corner}"))?;

    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let (cap1, cap2) = (region.coordinate_cap(0), region.coordinate_cap(1));
    let mut feasible = Vec::with_capacity(1_000_000);
    while feasible.len() < 1_000_000 {
        let p = [rng.random_range(0.0..=cap1), rng.random_range(0.0..=cap2)];
        let inside = region
            .subsets()
            .all(|s| s.iter().map(|i| p[i]).sum::<f64>() <= region.bound(s));
        if inside {
            feasible.push(p);
        }
    }
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let phi = rng.random_range(0.0..std::f64::consts::FRAC_PI_2);
        let d = [phi.cos(), phi.sin()];
        let brute = feasible.iter().map(|p| p[0] * d[0] + p[1] * d[1]).fold(0.0, f64::max);
        let s = support(&region, &d).map_err(|e| e.to_string())?;
        worst = worst.max((s - brute).abs());
        ensure((s - brute).abs() <= 1e-3, || format!("direction {d:?}: support {s}, brute force {brute}"))?;
    }
    Ok(format!("5 vertices match, support within {worst:.1e} of brute force"))
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("two-user strong interference reduction", two_user_reduction, Duration::from_secs(1)),
        ("three-user regime example", three_user_example, Duration::from_secs(1)),
        ("full and simplified regions agree", region_redundancy, Duration::from_secs(30)),
        ("lemma gaps on degraded channels", lemma_ground_truth, Duration::from_secs(300)),
        ("broadcast sum capacity", broadcast_capacity, Duration::from_secs(10)),
        ("more capable but not degraded", more_capable_not_degraded, Duration::from_secs(10)),
        ("degraded equivalent statistics", degraded_equivalent_match, Duration::from_secs(1)),
        ("two-user region geometry", geometry_oracles, Duration::from_secs(30)),
    ];
    let mut failed = 0;
    for (n, (name, check, limit)) in criteria.into_iter().enumerate() {
        let started = Instant::now();
        let outcome = check();
        let elapsed = started.elapsed();
        let outcome = outcome.and_then(|detail| {
            if elapsed < limit {
                Ok(detail)
            } else {
                Err(format!("took {elapsed:.2?}, limit {limit:?}"))
            }
        });
        match outcome {
            Ok(detail) => println!("PASS {}: {name} ({detail}; {elapsed:.2?})", n + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {}: {name} ({why}; {elapsed:.2?})", n + 1);
            }
        }
    }
    if failed > 0 {
        println!("{failed} of 8 criteria failed");
        std::process::exit(1);
    }
    println!("all 8 criteria passed");
}
