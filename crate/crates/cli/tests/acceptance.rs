//! Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any
//! failure or overrun of its time limit.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use fpsums_cli::config::{ExperimentConfig, PrimeList};
use fpsums_cli::report::{Report, Status};
use fpsums_cli::suites::{cell_seed, run_identity_suite, run_region_suite, run_sweep, weil_rows};
use fpsums_core::charsums::{count_n, nu_map};
use fpsums_core::energy::{additive_energy, e3, t_k_fourier_check};
use fpsums_core::field::primes_up_to;
use fpsums_core::geometry::{
    collinear_triples_with, gram_structure_check, line_spectrum, pair_spectrum_identity, TripleConvention,
};
use fpsums_core::oracle::{collinear_triples_brute, count_n_brute, e3_brute, nu_map_brute};
use fpsums_core::sets::{random_set, symmetric_interval, uniform_below};
use fpsums_core::{FpSet, PrimeField, SetTag};
use rand_chacha::ChaCha8Rng;
use rand_core::SeedableRng;

const SEED: u64 = 20240601;

fn primes_in(lo: u64, hi: u64) -> Vec<u64> {
    primes_up_to(hi).into_iter().filter(|&p| p >= lo).collect()
}

/// Outcome of one criterion: a verdict and a short detail line.
type Outcome = Result<String, String>;

fn rng(tag: u64, p: u64, i: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(cell_seed(SEED, tag, p, i))
}

fn sizes(r: &mut ChaCha8Rng, count: usize, max: u64) -> Vec<u32> {
    (0..count).map(|_| 1 + uniform_below(r, max) as u32).collect()
}

fn line_mass() -> Outcome {
    let mut checked = 0;
    for p in primes_in(5, 101) {
        let f = PrimeField::new(p).unwrap();
        for i in 0..50 {
            let mut r = rng(1, p, i);
            let n = sizes(&mut r, 1, p)[0];
            let a = random_set(&f, n, cell_seed(SEED, 101, p, i)).unwrap();
            let mass = line_spectrum(&a).total_mass();
            if mass != (p as u128 + 1) * (n as u128).pow(2) {
                return Err(format!("p={p} n={n} mass={mass}"));
            }
            checked += 1;
        }
    }
    Ok(format!("{checked} sets"))
}

fn pair_identity() -> Outcome {
    let mut checked = 0;
    for p in primes_in(3, 31) {
        let f = PrimeField::new(p).unwrap();
        for i in 0..50 {
            let mut r = rng(2, p, i);
            let n = sizes(&mut r, 2, p);
            let a = random_set(&f, n[0], cell_seed(SEED, 102, p, i)).unwrap();
            let b = random_set(&f, n[1], cell_seed(SEED, 202, p, i)).unwrap();
            let (lhs, rhs) = pair_spectrum_identity(&a, &b).unwrap();
            if lhs != rhs {
                return Err(format!("p={p} lhs={lhs} rhs={rhs}"));
            }
            checked += 1;
        }
    }
    Ok(format!("{checked} pairs"))
}

fn gram() -> Outcome {
    let mut detail = Vec::new();
    for p in [2u32, 3, 5] {
        let g = gram_structure_check(p).map_err(|e| e.to_string())?;
        let pp = p as u64;
        if g.max_deviation != 0 || g.diagonal != pp * pp + pp + 1 || g.off_diagonal != pp + 1 {
            return Err(format!("p={p} {g:?}"));
        }
        detail.push(format!("p={p}:({},{})", g.diagonal, g.off_diagonal));
    }
    Ok(detail.join(" "))
}

fn triples_oracle() -> Outcome {
    let mut checked = 0;
    for p in primes_in(7, 31) {
        let f = PrimeField::new(p).unwrap();
        for i in 0..100 {
            let mut r = rng(4, p, i);
            let n = sizes(&mut r, 3, 8.min(p));
            let sets: Vec<FpSet> = (0..3)
                .map(|k| random_set(&f, n[k], cell_seed(SEED, 104 + k as u64, p, i)).unwrap())
                .collect();
            for conv in [TripleConvention::CrossMultiplied, TripleConvention::Geometric] {
                let fast = collinear_triples_with(&sets[0], &sets[1], &sets[2], conv).unwrap();
                let brute = collinear_triples_brute(&sets[0], &sets[1], &sets[2], conv);
                if fast != brute {
                    return Err(format!("p={p} sizes={n:?} {conv:?} fast={fast} brute={brute}"));
                }
            }
            checked += 1;
        }
    }
    Ok(format!("{checked} instances, both conventions"))
}

fn amplification() -> Outcome {
    let primes = primes_in(17, 61);
    for i in 0..20u64 {
        let mut r = rng(5, 0, i);
        let p = primes[uniform_below(&mut r, primes.len() as u64) as usize];
        let f = PrimeField::new(p).unwrap();
        let ns = 1 + uniform_below(&mut r, 6) as u32;
        let x = 1 + uniform_below(&mut r, 8) as u32;
        let s = random_set(&f, ns, cell_seed(SEED, 105, p, i)).unwrap();
        let xs = symmetric_interval(&f, x).unwrap();
        let ys = FpSet::from_residues(&f, [2, 3, 5, 7], SetTag::Primes).unwrap();
        let map = nu_map(&s, &xs, &ys).map_err(|e| e.to_string())?;
        let brute = nu_map_brute(&s, &xs, &ys);
        let n = count_n(&s, &xs, &ys).map_err(|e| e.to_string())?;
        let n_brute = count_n_brute(&s, &xs, &ys);
        let map_ok = map.entries.len() == brute.len() && brute.iter().all(|(&k, &v)| map.get(k) == v);
        if map.total() != map.expected_total() || map.second_moment() != n_brute || n != n_brute || !map_ok {
            return Err(format!("p={p} S={ns} X={x}"));
        }
    }
    Ok("20 instances".into())
}

fn energies() -> Outcome {
    let mut worst = 0.0f64;
    for p in primes_in(5, 61) {
        let f = PrimeField::new(p).unwrap();
        for i in 0..10 {
            let mut r = rng(6, p, i);
            let n = sizes(&mut r, 3, 8.min(p));
            let sets: Vec<FpSet> = (0..3)
                .map(|k| random_set(&f, n[k], cell_seed(SEED, 106 + k as u64, p, i)).unwrap())
                .collect();
            for k in 2..=4 {
                let refs: Vec<&FpSet> = (0..k).map(|j| &sets[j % 3]).collect();
                let c = t_k_fourier_check(&refs, k).map_err(|e| e.to_string())?;
                worst = worst.max(c.relative());
            }
            let fast = e3(&sets[0], &sets[1], &sets[2]).unwrap();
            let brute = e3_brute(&sets[0], &sets[1], &sets[2]);
            if fast != brute {
                return Err(format!("e3 p={p} fast={fast} brute={brute}"));
            }
        }
    }
    if worst > 1e-6 {
        return Err(format!("fourier relative error {worst:e}"));
    }
    let f = PrimeField::new(101).unwrap();
    let ap = FpSet::from_residues(&f, [0, 1, 2], SetTag::Derived).unwrap();
    let e = additive_energy(&ap);
    if e != 19 {
        return Err(format!("energy of {{0,1,2}} = {e}"));
    }
    Ok(format!("worst fourier error {worst:e}, E({{0,1,2}}) = 19"))
}

fn failures(rep: &Report) -> Vec<String> {
    rep.rows
        .iter()
        .filter(|r| r.status == Status::Fail)
        .map(|r| format!("{} p={} {}", r.suite, r.p, r.params))
        .collect()
}

fn inequalities() -> Outcome {
    let mut cfg = ExperimentConfig::default();
    cfg.identities.primes = PrimeList::Range("5..=61".into());
    cfg.identities.instances = 20;
    cfg.identities.max_size = 12;
    cfg.identities.gram_primes.clear();
    cfg.identities.weil_samples = 0;
    let rep = run_identity_suite(&cfg).map_err(|e| e.to_string())?;
    let bad = failures(&rep);
    if bad.is_empty() {
        Ok(format!("{} checks", rep.rows.len()))
    } else {
        Err(bad.join("; "))
    }
}

fn weil() -> Outcome {
    let mut rows = 0;
    for p in primes_in(31, 199) {
        for r in weil_rows("weil", p, 1000, 3, cell_seed(SEED, 8, p, 0)) {
            if r.status != Status::Pass {
                return Err(format!("p={p} {} measured={}", r.params, r.measured));
            }
            rows += 1;
        }
    }
    Ok(format!("{rows} checks"))
}

fn regions() -> Outcome {
    let mut cfg = ExperimentConfig::default();
    cfg.regions.grid = 200;
    let rep = run_region_suite(&cfg).map_err(|e| e.to_string())?;
    let bad = failures(&rep);
    if !bad.is_empty() {
        return Err(bad.join("; "));
    }
    let flagged = rep.rows.iter().any(|r| r.params.contains("flag=disagreement"));
    Ok(if flagged { "disagreements flagged".into() } else { "no disagreements".into() })
}

fn sweep() -> Outcome {
    let mut cfg = ExperimentConfig::default();
    cfg.max_p = Some(8191);
    let rep = run_sweep(&cfg).map_err(|e| e.to_string())?;
    let bad = failures(&rep);
    if !bad.is_empty() {
        return Err(bad.join("; "));
    }
    let reports: Vec<_> = rep.rows.iter().filter(|r| r.status == Status::Report).collect();
    if let Some(r) = reports.iter().find(|r| !r.ratio_value().is_some_and(f64::is_finite)) {
        return Err(format!("non-finite ratio at p={} {}", r.p, r.params));
    }
    for key in ["main_bound_ratio_vs_p", "poly_energy_vs_X,d=2", "poly_t_vs_X,d=2"] {
        if !rep.slopes.get(key).is_some_and(|s| s.is_some_and(f64::is_finite)) {
            return Err(format!("missing slope {key}"));
        }
    }
    let summary = rep.summary_json();
    if summary["slopes"].as_object().is_none_or(|o| o.is_empty()) {
        return Err("summary has no slopes".into());
    }
    Ok(format!("{} report rows, {} slopes", reports.len(), rep.slopes.len()))
}

fn main() -> ExitCode {
    let criteria: [(&str, Duration, fn() -> Outcome); 10] = [
        ("line mass identity", Duration::from_secs(30), line_mass),
        ("pair spectrum identity", Duration::from_secs(30), pair_identity),
        ("gram structure", Duration::from_secs(60), gram),
        ("collinear triples oracle", Duration::from_secs(120), triples_oracle),
        ("amplification identities", Duration::from_secs(60), amplification),
        ("energy cross-checks", Duration::from_secs(60), energies),
        ("exact inequalities", Duration::from_secs(60), inequalities),
        ("weil check", Duration::from_secs(120), weil),
        ("region predicates", Duration::from_secs(10), regions),
        ("skeleton sweep", Duration::from_secs(600), sweep),
    ];
    let mut all_ok = true;
    for (i, (name, limit, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let (ok, detail) = match outcome {
            Ok(d) if elapsed <= *limit => (true, d),
            Ok(d) => (false, format!("{d}; over time limit {limit:?}")),
            Err(d) => (false, d),
        };
        all_ok &= ok;
        println!(
            "criterion {:>2} {}: {name} ({:.2}s) {detail}",
            i + 1,
            if ok { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64()
        );
    }
    if all_ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
