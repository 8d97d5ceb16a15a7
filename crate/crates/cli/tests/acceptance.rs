//! Acceptance suite. Runs without the libtest harness so that every
//! criterion prints exactly one PASS/FAIL line, then exits non-zero if any
//! criterion failed.

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use ghostcycle_cli::scan::{admissible_integral_patterns, run_scan, ScanConfig};
use ghostcycle_core::cycle::{ghost_cycle, Verdict};
use ghostcycle_core::dynamics::{iterate_cycle, iterate_integer, minimal_period, verify_periodicity};
use ghostcycle_core::generalized::{general_ghost_cycle, general_integer_oracle, GeneralizedMap};
use ghostcycle_core::padic::PadicInt;
use ghostcycle_core::patterns::{enumerate_by_length, sample_admissible, ParityPattern};
use ghostcycle_core::semilinear::{
    fiber_eventual_period, fiber_period_bruteforce, fiber_period_exact, nonsemilinearity_witness,
    LinearSet, SemilinearSet,
};
use num_bigint::{BigInt, BigUint};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn pat(x: u32, y: u32, sigma: &[u32]) -> ParityPattern {
    ParityPattern::new(x, y, sigma.to_vec()).unwrap()
}

fn jobs() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

fn trivial_cycle() -> Outcome {
    let p = pat(2, 1, &[0]);
    let ghost = ghost_cycle(&p, 64).map_err(|e| e.to_string())?;
    ensure!(ghost.constant == BigInt::from(1), "C = {}", ghost.constant);
    ensure!(*ghost.modulus.value() == BigInt::from(1), "modulus = {}", ghost.modulus);
    ensure!(ghost.n0 == PadicInt::one(64).unwrap(), "n0 = {}", ghost.n0);
    ensure!(ghost.verdict == Verdict::IntegerCycle(BigInt::from(1)), "verdict {}", ghost.verdict);
    let trace = iterate_cycle(&p, 64).map_err(|e| e.to_string())?;
    ensure!(trace.closed && trace.step_valuations == [2], "trace {:?}", trace.step_valuations);
    let orbit = iterate_integer(&BigUint::from(1u32), 10);
    ensure!(orbit.len() == 4 && orbit[3] == BigUint::from(1u32), "orbit {orbit:?}");
    Ok("(2,1,(0)) gives C = 1, modulus 1, n0 = 1, IntegerCycle(1); 1 -> 4 -> 2 -> 1".into())
}

fn first_ghost() -> Outcome {
    let p = pat(4, 2, &[0, 1]);
    let ghost = ghost_cycle(&p, 64).map_err(|e| e.to_string())?;
    let low = ghost.n0.truncate(5).unwrap();
    ensure!(*low.residue() == BigUint::from(19u32), "n0 mod 32 = {}", low.residue());
    ensure!(ghost.verdict == Verdict::Ghost, "verdict {}", ghost.verdict);
    ensure!(ghost.residual_vanishes(), "residual does not vanish");
    ensure!(verify_periodicity(&p, 64) == Ok(true), "orbit does not close at 64 bits");
    let trace = iterate_cycle(&p, 64).map_err(|e| e.to_string())?;
    ensure!(trace.step_valuations == [1, 3], "valuations {:?}", trace.step_valuations);
    Ok(format!(
        "(4,2,(0,1)): n0 = 19 mod 32, Ghost, closes with valuations (1,3) at {} bits",
        trace.final_precision
    ))
}

fn standard_scan() -> Outcome {
    // Timed single-threaded, the configuration the runtime budget refers to.
    let config = ScanConfig::new(24);
    let report = run_scan(&config).map_err(|e| e.to_string())?;
    let found = admissible_integral_patterns(&report);
    let expected: BTreeSet<_> = (1..=8)
        .map(|r| (pat(2, 1, &[0]).repeat(r), "1".to_owned()))
        .collect();
    ensure!(found == expected, "integral admissible patterns {found:?}");
    let unconfirmed = report
        .summary
        .integral_patterns
        .iter()
        .filter(|e| !e.classical_confirmed)
        .count();
    ensure!(unconfirmed == 0, "{unconfirmed} integer cycles not confirmed classically");
    let s = &report.summary;
    ensure!(s.verified == s.patterns, "{} of {} orbits verified", s.verified, s.patterns);
    Ok(format!(
        "{} patterns, {} admissible; integral admissible = r-fold (2,1,(0)) for r = 1..8, all n0 = 1",
        s.patterns, s.admissible
    ))
}

fn random_periodicity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for i in 0..1000 {
        let p = sample_admissible(&mut rng, 40);
        let trace = iterate_cycle(&p, 64).map_err(|e| format!("#{i} {p}: {e}"))?;
        ensure!(trace.closed, "#{i} {p} did not close");
        ensure!(trace.total_halvings() == p.x(), "#{i} {p}: halvings {}", trace.total_halvings());
        ensure!(trace.step_valuations == p.halvings(), "#{i} {p}: wrong valuations");
        ensure!(trace.m.iter().all(|m| m.is_unit()), "#{i} {p}: non-unit orbit point");
        ensure!(p.ell() % minimal_period(&p) == 0, "#{i} {p}: minimal period does not divide ell");
    }
    Ok("1000 random admissible patterns with ell <= 40: unit orbits close, total halvings x, minimal period divides ell".into())
}

fn fiber_periods() -> Outcome {
    let limit = BigUint::from(10_000u32);
    let mut checked = 0;
    for y in 1..=3u32 {
        let periods: Vec<(u32, BigUint)> = (1..)
            .filter_map(|x| fiber_period_exact(y, x).ok().map(|r| (x, r.period)))
            .take(15)
            .collect();
        ensure!(
            periods.windows(2).all(|w| w[0].1 < w[1].1),
            "y = {y}: periods not strictly increasing"
        );
        for (x, period) in &periods {
            if *period > limit {
                continue;
            }
            let p = u64::try_from(period).unwrap();
            let brute = fiber_period_bruteforce(y, *x, 3 * p).map_err(|e| e.to_string())?;
            ensure!(brute == p, "y = {y}, x = {x}: brute force {brute} vs {p}");
            checked += 1;
        }
        for m in [10u32, 1_000, 1_000_000] {
            let bound = BigUint::from(m);
            let w = nonsemilinearity_witness(y, &bound);
            ensure!(w.period > bound, "y = {y}, M = {m}: witness period {}", w.period);
        }
    }
    Ok(format!(
        "y in 1..=3: 15 strictly increasing periods each, {checked} brute-force agreements, witnesses beat 10, 10^3, 10^6"
    ))
}

fn random_semilinear_set(rng: &mut ChaCha8Rng) -> SemilinearSet {
    let components = (0..rng.gen_range(1..=3))
        .map(|_| {
            let base = vec![rng.gen_range(0..=8), rng.gen_range(0..=8)];
            let periods = (0..rng.gen_range(0..=3))
                .map(|_| vec![rng.gen_range(0..=6), rng.gen_range(0..=9)])
                .collect();
            LinearSet::new(base, periods).unwrap()
        })
        .collect();
    SemilinearSet::new(components).unwrap()
}

fn semilinear_bound() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut fibers = 0;
    for i in 0..200 {
        let set = random_semilinear_set(&mut rng);
        let bound = set.fiber_period_bound();
        for x in 0..=8 {
            let period = fiber_eventual_period(&set, x, 4096).map_err(|e| format!("set #{i}: {e}"))?;
            ensure!(bound.is_multiple_of(period), "set #{i} x = {x}: period {period} does not divide {bound}");
            fibers += 1;
        }
    }
    Ok(format!("200 random planar sets, {fibers} fibers, every period divides the lcm bound"))
}

fn generalized_maps() -> Outcome {
    let map = GeneralizedMap::new(5, 1).unwrap();
    let mut config = ScanConfig::new(12);
    config.map = map;
    config.jobs = jobs();
    let report = run_scan(&config).map_err(|e| e.to_string())?;
    let found = admissible_integral_patterns(&report);
    for (p, value) in [(pat(5, 2, &[0, 1]), 1), (pat(7, 3, &[0, 1, 2]), 13)] {
        ensure!(found.contains(&(p.clone(), value.to_string())), "missing {value} at {p}");
        let orbit = general_integer_oracle(map, &BigInt::from(value), 64);
        ensure!(
            orbit.len() == p.ell() as usize + 1 && orbit.last() == Some(&BigInt::from(value)),
            "oracle orbit of {value} has {} steps",
            orbit.len() - 1
        );
    }
    let mut compared = 0;
    for (p, _) in enumerate_by_length(20) {
        let general = general_ghost_cycle(GeneralizedMap::STANDARD, &p, 64).map_err(|e| e.to_string())?;
        let standard = ghost_cycle(&p, 64).map_err(|e| e.to_string())?;
        ensure!(
            general.n0 == standard.n0
                && general.verdict == standard.verdict
                && general.constant == standard.constant,
            "3n+1 specialization differs at {p}"
        );
        compared += 1;
    }
    Ok(format!(
        "5n+1 finds 1 at (5,2,(0,1)) and 13 at (7,3,(0,1,2)), both oracle-confirmed; 3n+1 specialization agrees on {compared} patterns"
    ))
}

fn random_residue(rng: &mut ChaCha8Rng, bits: u32) -> BigUint {
    let words: Vec<u32> = (0..bits.div_ceil(32)).map(|_| rng.gen()).collect();
    BigUint::from_slice(&words) % (BigUint::from(1u32) << bits)
}

fn padic_suite() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for _ in 0..2000 {
        let k = rng.gen_range(1..=256);
        let [a, b, c] = [0; 3].map(|_| PadicInt::from_biguint(&random_residue(&mut rng, k), k).unwrap());
        let zero = PadicInt::new(0, k).unwrap();
        let one = PadicInt::one(k).unwrap();
        ensure!(&a + &b == &b + &a && &a * &b == &b * &a, "commutativity at k = {k}");
        ensure!(&(&a + &b) + &c == &a + &(&b + &c), "additive associativity at k = {k}");
        ensure!(&(&a * &b) * &c == &a * &(&b * &c), "multiplicative associativity at k = {k}");
        ensure!(&a * &(&b + &c) == &(&a * &b) + &(&a * &c), "distributivity at k = {k}");
        ensure!(&a + &zero == a && &a * &one == a && &a + &(-&a) == zero, "identities at k = {k}");
    }
    let mut inversions = 0u64;
    for k in [4u32, 8, 16] {
        let one = PadicInt::one(k).unwrap();
        for u in (1u64..1 << k).step_by(2) {
            let unit = PadicInt::new(u, k).unwrap();
            let inv = unit.invert_unit().map_err(|e| e.to_string())?;
            ensure!(&unit * &inv == one, "inverse of {u} at k = {k}");
            inversions += 1;
        }
    }
    for k in [64u32, 256] {
        let modulus = BigUint::from(1u32) << k;
        // The unit group mod 2^k has exponent dividing 2^(k-1).
        let exponent = (BigUint::from(1u32) << (k - 1)) - 1u32;
        for _ in 0..500 {
            let u = random_residue(&mut rng, k) | BigUint::from(1u32);
            let inv = PadicInt::from_biguint(&u, k).unwrap().invert_unit().map_err(|e| e.to_string())?;
            ensure!(*inv.residue() == u.modpow(&exponent, &modulus), "inverse of {u} at k = {k}");
            inversions += 1;
        }
    }
    for _ in 0..2000 {
        let a = random_residue(&mut rng, 40) | BigUint::from(1u32);
        let b = random_residue(&mut rng, 40) | BigUint::from(1u32);
        let (sa, sb) = (rng.gen_range(0..60), rng.gen_range(0..60));
        let x = PadicInt::from_biguint(&(a << sa), 256).unwrap();
        let y = PadicInt::from_biguint(&(b << sb), 256).unwrap();
        let product = (&x * &y).v2().map_err(|e| e.to_string())?;
        ensure!(product == sa + sb, "v2 additivity: {product} vs {sa} + {sb}");
    }
    Ok(format!("ring laws at random precisions <= 256, {inversions} inversions checked, v2 additive"))
}

struct Criterion {
    name: &'static str,
    budget: Option<Duration>,
    run: fn() -> Outcome,
}

fn main() -> ExitCode {
    let secs = |s| Some(Duration::from_secs(s));
    let criteria = [
        Criterion { name: "trivial cycle", budget: Some(Duration::from_millis(1)), run: trivial_cycle },
        Criterion { name: "first ghost cycle", budget: None, run: first_ghost },
        Criterion { name: "scan ell <= 24", budget: secs(60), run: standard_scan },
        Criterion { name: "random periodicity", budget: secs(10), run: random_periodicity },
        Criterion { name: "fiber periods", budget: secs(30), run: fiber_periods },
        Criterion { name: "semilinear fiber bound", budget: secs(30), run: semilinear_bound },
        Criterion { name: "generalized maps", budget: None, run: generalized_maps },
        Criterion { name: "2-adic arithmetic", budget: secs(10), run: padic_suite },
    ];
    let mut failures = 0;
    for (i, c) in criteria.iter().enumerate() {
        let started = Instant::now();
        let mut outcome = (c.run)();
        let elapsed = started.elapsed();
        if let (Ok(_), Some(budget)) = (&outcome, c.budget) {
            if elapsed > budget {
                outcome = Err(format!("took {elapsed:.2?}, budget {budget:?}"));
            }
        }
        match outcome {
            Ok(detail) => println!("PASS criterion {} ({}): {detail} [{elapsed:.2?}]", i + 1, c.name),
            Err(detail) => {
                failures += 1;
                println!("FAIL criterion {} ({}): {detail} [{elapsed:.2?}]", i + 1, c.name);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
