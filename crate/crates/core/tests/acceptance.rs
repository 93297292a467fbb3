//! Acceptance criteria, one line per criterion. Runs without the libtest
//! harness so the summary is always printed.

mod common;

use std::time::{Duration, Instant};

use common::*;
use delsarte::constructions::{
    check_kernel, pd_minorant_decompose, sign_swap, sumset, urysohn_pd_kernel, DecomposeOptions,
};
use delsarte::duality::{
    delsarte_constant, solve_instance, solve_primal, verify_dual_certificate, DelsarteInstance, Extended,
};
use delsarte::functionals::{in_joint_dual, pair};
use delsarte::group::symmetrize_region;
use delsarte::spectral::is_positive_definite;
use delsarte::zd::{default_schedule, sandwich, verify_lower_witness, verify_zd_certificate};
use delsarte::{Element, GroupFunction, GroupSpec, LatticeTiling, MeasureFunctional, Rational, Region};
use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::Rng;

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let g = GroupSpec::cyclic(4).map_err(err)?;
    let omega = Region::from_ints(&[0, 1, 3]);
    let d = delsarte_constant::<Rational>(&g, &omega).map_err(err)?;
    let c = &d.certificate;
    ensure(c.alpha == q(-2, 1) && c.omega == q(-2, 1), || format!("alpha {} omega {}", c.alpha, c.omega))?;
    ensure(c.gap.is_zero() && c.certified, || format!("gap {}", c.gap))?;
    ensure(d.value == q(2, 1), || format!("constant {}", d.value))?;
    let f = GroupFunction::from_dense(&g, &[q(1, 1), q(1, 2), q(0, 1), q(1, 2)]).map_err(err)?;
    ensure(c.primal_witness == f, || format!("witness {:?}", c.primal_witness))?;
    let cert = &c.dual_certificate;
    ensure(cert.s == q(-2, 1), || format!("s {}", cert.s))?;
    let kappa = cert.kappa.to_function().map_err(err)?;
    ensure(kappa == GroupFunction::scaled_delta(&g, &e(2), q(2, 1)), || format!("kappa {kappa:?}"))?;
    let nu = cert.nu.to_function().map_err(err)?;
    let alt = GroupFunction::from_dense(&g, &[q(1, 1), q(-1, 1), q(1, 1), q(-1, 1)]).map_err(err)?;
    ensure(nu == alt, || format!("nu {nu:?}"))?;
    let inst = DelsarteInstance::<Rational>::standard(g.clone(), omega).map_err(err)?;
    let verdict = verify_dual_certificate(&inst, cert).map_err(err)?;
    ensure(verdict.valid, || format!("verification {:?}", verdict.failures))?;
    // vertex enumeration of the 2-variable LP: f = (1, a, b, a), spectrum
    // (1+2a+b, 1−b, 1−2a+b) ≥ 0, b ≤ 0, maximize 1 + 2a + b
    let mut best = q(-100, 1);
    let cons = [(q(2, 1), q(1, 1), q(-1, 1)), (q(0, 1), q(-1, 1), q(-1, 1)), (q(-2, 1), q(1, 1), q(-1, 1)), (q(0, 1), q(1, 1), q(0, 1))];
    for i in 0..cons.len() {
        for j in i + 1..cons.len() {
            // c_a a + c_b b = rhs for both rows; rows ≥ for the first three, b ≤ 0 for the last
            let (a1, b1, r1) = &cons[i];
            let (a2, b2, r2) = &cons[j];
            let det = a1.clone() * b2.clone() - a2.clone() * b1.clone();
            if det.is_zero() {
                continue;
            }
            let a = (r1.clone() * b2.clone() - r2.clone() * b1.clone()) / det.clone();
            let b = (a1.clone() * r2.clone() - a2.clone() * r1.clone()) / det;
            let feasible = cons[..3].iter().all(|(ca, cb, r)| ca.clone() * a.clone() + cb.clone() * b.clone() >= *r)
                && b <= Rational::zero();
            if feasible {
                let v = Rational::one() + q(2, 1) * a + b;
                if v > best {
                    best = v;
                }
            }
        }
    }
    ensure(best == d.value, || format!("vertex enumeration {best}"))?;
    let t = start.elapsed();
    ensure(t < Duration::from_secs(1), || format!("runtime {t:?}"))?;
    Ok(format!("D = 2, gap 0, certificate verified, {t:?}"))
}

fn criterion_2() -> Outcome {
    let mut exact = 0;
    let mut float = 0;
    for n in 2..=12u64 {
        let g = GroupSpec::cyclic(n).map_err(err)?;
        let all = Region::everything();
        let zero = Region::from_ints(&[0]);
        if g.exact_spectral() {
            let a = delsarte_constant::<Rational>(&g, &zero).map_err(err)?.value;
            let b = delsarte_constant::<Rational>(&g, &all).map_err(err)?.value;
            ensure(a == q(1, 1) && b == q(n as i64, 1), || format!("Z_{n}: {a}, {b}"))?;
            exact += 1;
        } else {
            let a = delsarte_constant::<f64>(&g, &zero).map_err(err)?.value;
            let b = delsarte_constant::<f64>(&g, &all).map_err(err)?.value;
            ensure((a - 1.0).abs() <= 1e-8 && (b - n as f64).abs() <= 1e-8, || format!("Z_{n}: {a}, {b}"))?;
            float += 1;
        }
    }
    Ok(format!("{exact} exact groups, {float} float groups"))
}

fn criterion_3() -> Outcome {
    let start = Instant::now();
    let mut rng = rng(3);
    for i in 0..200 {
        let g = random_exact_group(&mut rng);
        let omega = random_symmetric_region(&g, &mut rng, 0.4, true);
        let rho = random_even_functional::<Rational>(&g, &mut rng);
        let sigma = random_strict_pd::<Rational>(&g, &mut rng);
        let inst = DelsarteInstance::new(g.clone(), omega, None, rho, sigma).map_err(err)?;
        let cert = solve_instance(&inst).map_err(err)?.certify().map_err(err)?;
        ensure(cert.gap.is_zero(), || format!("exact instance {i}: gap {}", cert.gap))?;
        let v = verify_dual_certificate(&inst, &cert.dual_certificate).map_err(err)?;
        ensure(v.valid, || format!("exact instance {i}: {:?}", v.failures))?;
    }
    let mut worst = 0.0f64;
    for i in 0..200 {
        let n = rng.gen_range(2..=64u64);
        let g = GroupSpec::cyclic(n).map_err(err)?;
        let omega = random_symmetric_region(&g, &mut rng, 0.4, true);
        let rho = random_even_functional::<f64>(&g, &mut rng);
        let sigma = random_strict_pd::<f64>(&g, &mut rng);
        let inst = DelsarteInstance::new(g, omega, None, rho, sigma).map_err(err)?;
        let cert = solve_instance(&inst).map_err(err)?.certify().map_err(err)?;
        worst = worst.max(cert.gap.abs());
        ensure(cert.gap.abs() <= 1e-6, || format!("float instance {i}: gap {}", cert.gap))?;
    }
    let t = start.elapsed();
    ensure(t < Duration::from_secs(300), || format!("runtime {t:?}"))?;
    Ok(format!("200 exact gaps 0, 200 float gaps <= {worst:.1e}, {t:.1?}"))
}

fn criterion_4() -> Outcome {
    let mut rng = rng(4);
    for i in 0..100 {
        let g = random_exact_group(&mut rng);
        let plus = random_symmetric_region(&g, &mut rng, 0.5, true);
        let minus = if i % 4 == 0 {
            Region::everything()
        } else {
            {
            let z = rng.gen_bool(0.5);
            random_symmetric_region(&g, &mut rng, 0.5, z)
        }
        };
        let rho = random_even_functional::<Rational>(&g, &mut rng);
        let sigma = random_strict_pd::<Rational>(&g, &mut rng);
        let two = DelsarteInstance::new(g.clone(), plus.clone(), Some(minus.clone()), rho.clone(), sigma.clone()).map_err(err)?;
        let cert = solve_instance(&two).map_err(err)?.certify().map_err(err)?;
        ensure(cert.gap.is_zero(), || format!("instance {i}: gap {}", cert.gap))?;
        let v = verify_dual_certificate(&two, &cert.dual_certificate).map_err(err)?;
        ensure(v.valid, || format!("instance {i}: {:?}", v.failures))?;
        if minus.complement && minus.members.is_empty() {
            let one = DelsarteInstance::new(g, plus, None, rho, sigma).map_err(err)?;
            let a = solve_primal(&one).map_err(err)?.alpha;
            ensure(a == Extended::Finite(cert.alpha.clone()), || format!("instance {i}: one-sided {a:?} vs {}", cert.alpha))?;
        }
    }
    Ok("100 two-sided gaps 0, Omega_minus = G matches one-sided".into())
}

fn criterion_5() -> Outcome {
    let mut rng = rng(5);
    let z = GroupSpec::free(1, 200).map_err(err)?;
    for i in 0..100 {
        let mut v = vec![0i64];
        for _ in 0..rng.gen_range(0..3) {
            v.push(rng.gen_range(-3..=3));
        }
        v.sort();
        v.dedup();
        let w_ext = v.last().unwrap() - v.first().unwrap();
        let count = rng.gen_range(1..4);
        let s = random_symmetric_ints(&mut rng, 3 * w_ext + 1, 60, count);
        let s_region = Region::from_ints(&s);
        let v_region = Region::from_ints(&v);
        let r = sign_swap::<Rational>(&z, &s_region, &v_region).map_err(err)?;
        ensure(r.all_hold(), || format!("instance {i}: {}", r.to_json()))?;
        for x in &s {
            ensure(r.k.get(&e(*x)) == q(-1, 1), || format!("instance {i}: k({x}) = {}", r.k.get(&e(*x))))?;
        }
        ensure(r.k.sum().is_zero(), || format!("instance {i}: sum"))?;
        let w: Vec<Element> = sumset(&z, &v.iter().map(|&x| e(x)).collect::<Vec<_>>(), &v.iter().map(|&x| e(-x)).collect::<Vec<_>>());
        let s_el: Vec<Element> = s.iter().map(|&x| e(x)).collect();
        let sw = sumset(&z, &s_el, &w);
        let sww = sumset(&z, &sw, &w);
        for (x, val) in r.k.iter() {
            if *val > Rational::zero() {
                ensure(w.contains(x), || format!("instance {i}: positive at {x}"))?;
            } else {
                ensure(sww.contains(x), || format!("instance {i}: negative at {x}"))?;
            }
        }
        let expected = q(sw.len() as i64, v.len() as i64);
        ensure(r.value_at_zero == expected, || format!("instance {i}: k(0) = {} expected {expected}", r.value_at_zero))?;
        let pd = is_positive_definite(&r.k).map_err(err)?;
        ensure(pd.holds, || format!("instance {i}: spectral check failed"))?;
    }
    Ok("100 sign-swap functions, k(0) = mu(S+W)/mu(V)".into())
}

fn criterion_6() -> Outcome {
    let mut rng = rng(6);
    for i in 0..100 {
        let (g, k_set) = if i % 5 == 4 {
            let g = random_exact_group(&mut rng);
            let k = random_symmetric_region(&g, &mut rng, 0.5, true);
            (g, k)
        } else {
            let d = if i % 5 == 3 { 2 } else { 1 };
            let g = GroupSpec::free(d, 400).map_err(err)?;
            let pts: Vec<Element> = (0..rng.gen_range(1..5))
                .map(|_| Element::new((0..d).map(|_| rng.gen_range(-4..=4)).collect()))
                .collect();
            (g, Region::finite(pts))
        };
        let eps = q(rng.gen_range(1..10), 10);
        let kernel = urysohn_pd_kernel::<Rational>(&g, &k_set, &eps).map_err(err)?;
        let checks = check_kernel(&kernel, &k_set, &eps).map_err(err)?;
        ensure(checks.all(), || format!("instance {i}: {checks:?}"))?;
        ensure(kernel.k.get(&g.zero()) == Rational::one(), || format!("instance {i}: k(0)"))?;
        let target = Rational::one() - eps.clone();
        for x in k_set.materialize(&g) {
            ensure(kernel.k.get(&x) >= target, || format!("instance {i}: k({x}) below 1 - eps"))?;
        }
        ensure(kernel.k.iter().all(|(_, v)| *v >= Rational::zero()), || format!("instance {i}: negative value"))?;
        if g.rank() == 1 || g.is_finite() {
            let pd = is_positive_definite(&kernel.k).map_err(err)?;
            ensure(pd.holds, || format!("instance {i}: spectral check failed"))?;
        }
    }
    Ok("100 kernels, all five properties".into())
}

fn criterion_7() -> Outcome {
    let mut rng = rng(7);
    for i in 0..100 {
        let (f, a, opts) = if i % 4 == 3 {
            let n = rng.gen_range(3..=12u64);
            let g = GroupSpec::cyclic(n).map_err(err)?;
            let f = GroupFunction::from_dense(&g, &(0..n).map(|_| q(rng.gen_range(-5..=5), rng.gen_range(1..=3))).collect::<Vec<_>>())
                .map_err(err)?;
            let a: Vec<Element> = (1..n as i64).filter(|_| rng.gen_bool(0.5)).map(e).collect();
            (f, Region::finite(a), DecomposeOptions::default())
        } else {
            let z = GroupSpec::free(1, 400).map_err(err)?;
            let modulus = rng.gen_range(1..=3u64);
            let v: Vec<i64> = if rng.gen_bool(0.5) { vec![0] } else { vec![0, 1] };
            let reach = 3 * (v.len() as i64 - 1);
            let start = rng.gen_range(-8..=0i64);
            let values: Vec<Rational> = (0..rng.gen_range(1..=12)).map(|_| q(rng.gen_range(-6..=6), rng.gen_range(1..=2))).collect();
            let f = GroupFunction::from_slice(&z, start, &values).map_err(err)?;
            let a = if rng.gen_bool(0.5) {
                let r = rng.gen_range(reach..=reach + 3);
                Region::new((-r..=r).map(e), true)
            } else {
                let count = rng.gen_range(1..4);
                Region::from_ints(&random_symmetric_ints(&mut rng, reach + 1, 12, count))
            };
            (f, a, DecomposeOptions { modulus, v: Region::from_ints(&v) })
        };
        let d = pd_minorant_decompose(&f, &a, &opts).map_err(err)?;
        ensure(d.all_hold(), || format!("instance {i}: {}", d.to_json()))?;
        let g = f.group().clone();
        let pd = if g.is_finite() && !g.exact_spectral() {
            is_positive_definite(&d.p.convert::<f64>()).map_err(err)?.holds
        } else {
            is_positive_definite(&d.p).map_err(err)?.holds
        };
        ensure(pd, || format!("instance {i}: spectral check failed"))?;
        let points: Vec<Element> = if g.is_finite() {
            g.elements()
        } else {
            f.support().chain(d.p.support()).cloned().collect()
        };
        for x in points.iter().filter(|x| a.contains(x)) {
            ensure(d.p.get(x) <= f.get(x), || format!("instance {i}: p > f at {x}"))?;
        }
        ensure(d.p.minus(&d.q) == f, || format!("instance {i}: f != p - q"))?;
        let tiling = LatticeTiling::for_group(&g, opts.modulus).map_err(err)?;
        let norm = |h: &GroupFunction<Rational>| delsarte::functionals::mixed_norm_x(&tiling, h);
        ensure(norm(&d.p) <= d.norm_factor.clone() * norm(&f), || format!("instance {i}: norm bound"))?;
    }
    Ok("100 decompositions, p PD, p <= f on A, norm bound".into())
}

fn criterion_8() -> Outcome {
    let three = Region::from_ints(&[-1, 0, 1]);
    let rows = sandwich(1, &three, &default_schedule(), None).map_err(err)?;
    for r in &rows {
        let below = match &r.upper {
            Extended::Finite(u) => r.lower <= *u,
            Extended::PlusInfinity => true,
            Extended::MinusInfinity => false,
        };
        ensure(below, || format!("row ({}, {}): lower above upper", r.m, r.n))?;
        ensure(verify_lower_witness(&three, &r.lower_witness).map_err(err)?.valid, || "lower witness".into())?;
        if let Some(c) = &r.upper_certificate {
            ensure(verify_zd_certificate(&three, c).map_err(err)?.valid, || "upper certificate".into())?;
        }
    }
    let last = rows.last().unwrap();
    ensure(
        last.closed() && last.lower == q(2, 1) && (last.m, last.n) <= (1, 2),
        || format!("closes at ({}, {}) with {} / {}", last.m, last.n, last.lower, last.upper.to_text()),
    )?;
    let closed_at = (last.m, last.n);
    let rows = sandwich(1, &Region::from_ints(&[0]), &default_schedule(), None).map_err(err)?;
    let first = &rows[0];
    ensure(first.closed() && first.lower == q(1, 1) && (first.m, first.n) == (0, 1), || "Omega = {0}".into())?;
    Ok(format!("{{-1,0,1}} closes at 2 at {closed_at:?}, {{0}} closes at 1 at (0, 1)"))
}

fn criterion_9() -> Outcome {
    let mut rng = rng(9);
    let mut accepted = 0;
    for i in 0..100 {
        let g = random_exact_group(&mut rng);
        let omega = random_symmetric_region(&g, &mut rng, 0.5, true);
        let mut kappa = GroupFunction::zero(&g);
        for x in g.elements() {
            if !omega.contains(&x) && rng.gen_bool(0.5) {
                kappa.set(&x, q(rng.gen_range(0..=4), rng.gen_range(1..=3)));
            }
        }
        let nu = random_autocorrelation::<Rational>(&g, &mut rng, 3).plus(&GroupFunction::scaled_delta(&g, &g.zero(), q(rng.gen_range(0..=2), 1)));
        let mut odd = GroupFunction::zero(&g);
        for x in g.elements() {
            let v = q(rng.gen_range(-3..=3), 1);
            odd.add_at(&x, v.clone());
            odd.add_at(&g.neg(&x), -v);
        }
        let psi = MeasureFunctional::from_atoms(nu.minus(&kappa).plus(&odd));
        let v = in_joint_dual(&psi, &omega).map_err(err)?;
        ensure(v.member, || format!("member {i} rejected"))?;
        accepted += 1;
    }
    let mut rejected = 0;
    let mut tries = 0;
    while rejected < 100 {
        tries += 1;
        ensure(tries < 20_000, || format!("only {rejected} non-members found"))?;
        let g = random_exact_group(&mut rng);
        let omega = random_symmetric_region(&g, &mut rng, 0.5, true);
        let f = match rng.gen_range(0..3) {
            0 => GroupFunction::delta(&g, &g.zero()),
            1 => {
                let inst = DelsarteInstance::<Rational>::standard(g.clone(), omega.clone()).map_err(err)?;
                solve_primal(&inst).map_err(err)?.witness.unwrap()
            }
            _ => {
                // convex mix of the above with a PD function vanishing off Ω
                let inst = DelsarteInstance::<Rational>::standard(g.clone(), omega.clone()).map_err(err)?;
                let w = solve_primal(&inst).map_err(err)?.witness.unwrap();
                w.plus(&GroupFunction::scaled_delta(&g, &g.zero(), q(rng.gen_range(1..=3), 1)))
            }
        };
        let psi = MeasureFunctional::<Rational>::new(
            q(rng.gen_range(-1..=1), 1),
            random_even::<Rational>(&g, &mut rng, -3, 3),
        );
        if pair(&f, &psi) >= Rational::zero() {
            continue;
        }
        let v = in_joint_dual(&psi, &omega).map_err(err)?;
        ensure(!v.member, || format!("non-member accepted (pairing {})", pair(&f, &psi)))?;
        rejected += 1;
    }
    Ok(format!("{accepted} members accepted, {rejected} non-members rejected"))
}

fn criterion_10() -> Outcome {
    let mut rng = rng(10);
    for i in 0..60 {
        let g = random_exact_group(&mut rng);
        let omega = random_symmetric_region(&g, &mut rng, 0.5, true);
        let rho_e = random_even_functional::<Rational>(&g, &mut rng);
        let mut odd = GroupFunction::zero(&g);
        for x in g.elements() {
            let v = q(rng.gen_range(-3..=3), 1);
            odd.add_at(&x, v.clone());
            odd.add_at(&g.neg(&x), -v);
        }
        let rho = rho_e.plus(&MeasureFunctional::from_atoms(odd));
        let sigma = random_strict_pd::<Rational>(&g, &mut rng);
        let solve = |rho: &MeasureFunctional<Rational>, sigma: &MeasureFunctional<Rational>, omega: &Region| {
            let inst = DelsarteInstance::new(g.clone(), omega.clone(), None, rho.clone(), sigma.clone())?;
            solve_primal(&inst)
        };
        let a = solve(&rho, &sigma, &omega).map_err(err)?;
        let b = solve(&rho_e, &sigma, &omega).map_err(err)?;
        ensure(a.alpha == b.alpha, || format!("instance {i}: evenization {:?} vs {:?}", a.alpha, b.alpha))?;
        let c = q(rng.gen_range(1..=5), rng.gen_range(1..=5));
        let scaled = solve(&rho_e, &sigma.scale(&c), &omega).map_err(err)?;
        let expected = b.alpha.finite().unwrap().clone() / c.clone();
        ensure(scaled.alpha == Extended::Finite(expected.clone()), || format!("instance {i}: scaling gives {:?}, expected {expected}", scaled.alpha))?;
        // c times the scaled optimizer is optimal for the original problem
        let back = scaled.witness.unwrap().scale(&c);
        ensure(
            pair(&back, &sigma) == Rational::one() && Extended::Finite(pair(&back, &rho_e)) == b.alpha,
            || format!("instance {i}: rescaled optimizer"),
        )?;
        // a non-symmetric Ω against its symmetrization
        let mut raw = omega.members.iter().cloned().collect::<Vec<_>>();
        let extra: Vec<Element> = g.elements().into_iter().filter(|x| !omega.contains(x)).collect();
        if let Some(x) = extra.choose(&mut rng) {
            if g.neg(x) != *x {
                raw.push(x.clone());
            }
        }
        let lopsided = Region::finite(raw);
        let sym = symmetrize_region(&g, &lopsided);
        ensure(sym.is_symmetric(&g), || "symmetrized region not symmetric".into())?;
        let l = solve(&rho_e, &sigma, &lopsided).map_err(err)?;
        let s = solve(&rho_e, &sigma, &sym).map_err(err)?;
        ensure(l.alpha == s.alpha, || format!("instance {i}: symmetrization {:?} vs {:?}", l.alpha, s.alpha))?;
    }
    Ok("evenization, sigma scaling and symmetrization leave optima consistent".into())
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("golden Z_4 instance", criterion_1),
        ("boundary cases on Z_n", criterion_2),
        ("strong-duality sweep", criterion_3),
        ("two-sided sweep", criterion_4),
        ("sign-swap suite", criterion_5),
        ("kernel suite", criterion_6),
        ("decomposition suite", criterion_7),
        ("Z sandwich", criterion_8),
        ("dual-cone oracles", criterion_9),
        ("invariance checks", criterion_10),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let label = format!("criterion {:>2} {name}", i + 1);
        if !filter.is_empty() && !filter.iter().any(|f| label.contains(f.as_str())) {
            continue;
        }
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("PASS {label}: {detail} [{:.2?}]", start.elapsed()),
            Err(why) => {
                failed += 1;
                println!("FAIL {label}: {why} [{:.2?}]", start.elapsed());
            }
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
