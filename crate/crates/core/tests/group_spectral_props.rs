mod common;

use common::*;
use delsarte::group::symmetrize_region;
use delsarte::spectral::{
    even_odd_split, inverse_transform, is_positive_definite, is_real_sense_pd, quadratic_form, transform,
    trig_poly_min_certified, SpectrumFunction,
};
use delsarte::{Element, GroupFunction, GroupSpec, LatticeTiling, Rational, Region};
use num_traits::Zero;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng;

fn spectrum_parts(s: &SpectrumFunction<Rational>) -> (Vec<Rational>, Vec<Rational>) {
    match s {
        SpectrumFunction::Finite { re, im, .. } => {
            let im = im.clone().unwrap_or_else(|| vec![Rational::zero(); re.len()]);
            (re.clone(), im)
        }
        _ => panic!("finite spectrum expected"),
    }
}

fn float_parts(s: &SpectrumFunction<f64>) -> (Vec<f64>, Vec<f64>) {
    match s {
        SpectrumFunction::Finite { re, im, .. } => (re.clone(), im.clone().unwrap_or_else(|| vec![0.0; re.len()])),
        _ => panic!("finite spectrum expected"),
    }
}

/// Sines of the characters are rational only for exponents 1, 2 and 4.
fn odd_exact(g: &GroupSpec) -> bool {
    matches!(g.exponent(), Some(1 | 2 | 4))
}

fn random_function(g: &GroupSpec, rng: &mut impl Rng) -> GroupFunction<Rational> {
    let mut f = GroupFunction::zero(g);
    for x in g.elements() {
        if rng.gen_bool(0.5) {
            f.set(&x, q(rng.gen_range(-4..=4), rng.gen_range(1..=3)));
        }
    }
    f
}

#[test]
fn negation_is_an_involution_exhaustively() {
    for g in exact_groups().into_iter().chain((5..=12).map(|n| GroupSpec::cyclic(n).unwrap())) {
        for x in g.elements() {
            assert_eq!(g.neg(&g.neg(&x)), x);
            assert_eq!(g.add(&x, &g.neg(&x)), g.zero());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn coset_decomposition_recomposes(d in 1usize..=2, n in 1u64..=5, coords in proptest::collection::vec(-50i64..=50, 2)) {
        let t = LatticeTiling::new(d, n).unwrap();
        let x = Element::new(coords[..d].to_vec());
        let (l, b) = t.decompose(&x);
        prop_assert!(t.is_lattice_point(&l));
        prop_assert!(b.coords().iter().all(|&c| c >= 0 && c < n as i64));
        let sum: Vec<i64> = l.coords().iter().zip(b.coords()).map(|(a, b)| a + b).collect();
        prop_assert_eq!(Element::new(sum), x);
    }

    #[test]
    fn symmetrization_is_symmetric_and_inside(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let g = random_exact_group(&mut rng);
        let elems = g.elements();
        let members: Vec<Element> = elems.iter().filter(|_| rng.gen_bool(0.4)).cloned().collect();
        let omega = Region::new(members, rng.gen_bool(0.3));
        let s = symmetrize_region(&g, &omega);
        prop_assert!(s.is_symmetric(&g));
        for x in &elems {
            if s.contains(x) {
                prop_assert!(omega.contains(x) && omega.contains(&g.neg(x)));
            }
        }
        prop_assert_eq!(symmetrize_region(&g, &s).materialize(&g), s.materialize(&g));
    }

    #[test]
    fn orbits_partition_the_group(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let g = random_exact_group(&mut rng);
        let orbits = g.inversion_orbits();
        let mut all: Vec<Element> = orbits.iter().flat_map(|o| o.members.clone()).collect();
        prop_assert!(orbits.iter().all(|o| o.size() == 1 || o.size() == 2));
        all.sort();
        let n = all.len();
        all.dedup();
        prop_assert_eq!(all.len(), n);
        prop_assert_eq!(n, g.order().unwrap());
    }

    #[test]
    fn transform_round_trip(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let g = random_exact_group(&mut rng);
        let f = random_function(&g, &mut rng);
        let f = if odd_exact(&g) { f } else { f.even_odd_split().0 };
        let back = inverse_transform(&transform(&f).unwrap()).unwrap();
        prop_assert_eq!(back, f.clone());
        let n = rng.gen_range(2..=20u64);
        let h = GroupSpec::cyclic(n).unwrap();
        let f = random_function(&h, &mut rng).convert::<f64>();
        let back = inverse_transform(&transform(&f).unwrap()).unwrap();
        for x in h.elements() {
            prop_assert!((back.get(&x) - f.get(&x)).abs() <= 1e-12);
        }
    }

    #[test]
    fn convolution_theorem(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let g = random_exact_group(&mut rng);
        let f = random_function(&g, &mut rng);
        let h = random_function(&g, &mut rng);
        if odd_exact(&g) {
            let (fr, fi) = spectrum_parts(&transform(&f).unwrap());
            let (hr, hi) = spectrum_parts(&transform(&h).unwrap());
            let (cr, ci) = spectrum_parts(&transform(&f.convolve(&h)).unwrap());
            for j in 0..fr.len() {
                prop_assert_eq!(&cr[j], &(fr[j].clone() * hr[j].clone() - fi[j].clone() * hi[j].clone()));
                prop_assert_eq!(&ci[j], &(fr[j].clone() * hi[j].clone() + fi[j].clone() * hr[j].clone()));
            }
        }
        let n = rng.gen_range(2..=16u64);
        let g = GroupSpec::cyclic(n).unwrap();
        let f = random_function(&g, &mut rng).convert::<f64>();
        let h = random_function(&g, &mut rng).convert::<f64>();
        let (fr, fi) = float_parts(&transform(&f).unwrap());
        let (hr, hi) = float_parts(&transform(&h).unwrap());
        let (cr, ci) = float_parts(&transform(&f.convolve(&h)).unwrap());
        for j in 0..fr.len() {
            prop_assert!((cr[j] - (fr[j] * hr[j] - fi[j] * hi[j])).abs() < 1e-9);
            prop_assert!((ci[j] - (fr[j] * hi[j] + fi[j] * hr[j])).abs() < 1e-9);
        }
    }

    #[test]
    fn positive_definite_functions_peak_at_zero(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let g = random_exact_group(&mut rng);
        let f = if rng.gen_bool(0.5) { random_autocorrelation::<Rational>(&g, &mut rng, 4) } else { random_function(&g, &mut rng) };
        if is_positive_definite(&f).unwrap().holds {
            prop_assert!(f.is_even());
            let top = f.get(&g.zero());
            prop_assert!(g.elements().iter().all(|x| f.get(x) <= top));
        }
    }

    #[test]
    fn real_sense_is_pd_of_even_part(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let g = random_exact_group(&mut rng);
        let f = random_autocorrelation::<Rational>(&g, &mut rng, 3).plus(&random_function(&g, &mut rng).scale(&q(1, 8)));
        let (even, _) = even_odd_split(&f);
        prop_assert_eq!(is_real_sense_pd(&f).unwrap().holds, is_positive_definite(&even).unwrap().holds);
    }

    #[test]
    fn quadratic_forms_of_pd_functions(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let g = random_exact_group(&mut rng);
        let f = random_autocorrelation::<Rational>(&g, &mut rng, 4);
        prop_assert!(is_positive_definite(&f).unwrap().holds);
        let elems = g.elements();
        let points: Vec<Element> = (0..rng.gen_range(1..6)).map(|_| elems.choose(&mut rng).unwrap().clone()).collect();
        let coeffs: Vec<Rational> = points.iter().map(|_| q(rng.gen_range(-5..=5), rng.gen_range(1..=4))).collect();
        prop_assert!(quadratic_form(&f, &points, &coeffs) >= Rational::zero());
        let ff = f.convert::<f64>();
        let cf: Vec<f64> = coeffs.iter().map(|c| delsarte::Scalar::to_f64(c)).collect();
        prop_assert!(quadratic_form(&ff, &points, &cf) >= -1e-12);
    }

    #[test]
    fn torus_bound_monotone_and_below_samples(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let z = GroupSpec::free(1, 20).unwrap();
        let values: Vec<f64> = (0..rng.gen_range(1..8)).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let f = GroupFunction::from_slice(&z, -3, &values).unwrap();
        let mut last = f64::NEG_INFINITY;
        for k in 6..12 {
            let b = trig_poly_min_certified(&f, 1 << k).unwrap();
            prop_assert!(b.bound >= last - 1e-12);
            last = b.bound;
            for _ in 0..20 {
                let t: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
                let v: f64 = f.iter().map(|(x, c)| c * (x.coords()[0] as f64 * t).cos()).sum();
                prop_assert!(b.bound <= v + 1e-12);
            }
        }
    }
}
