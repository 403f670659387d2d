use fpsums_core::charsums::{count_n, nu_map, AmplificationParams};
use fpsums_core::energy::{additive_energy, e3, t_k_uniform};
use fpsums_core::geometry::{collinear_triples_with, line_spectrum, TripleConvention};
use fpsums_core::oracle::{collinear_triples_brute, count_n_brute, e3_brute};
use fpsums_core::sets::{interval, random_set, subgroup, symmetric_interval};
use fpsums_core::{FpSet, PrimeField, SetTag};

#[test]
fn interval_energy_closed_form() {
    let f = PrimeField::new(1009).unwrap();
    for n in [1u32, 2, 5, 17, 40] {
        let a = interval(&f, 3, n).unwrap();
        let n = n as u128;
        assert_eq!(additive_energy(&a), (2 * n * n * n + n) / 3);
    }
}

#[test]
fn subgroup_is_dilation_invariant() {
    let f = PrimeField::new(97).unwrap();
    let g = subgroup(&f, 12).unwrap();
    let iv = interval(&f, 1, 6).unwrap();
    let base = e3(&g, &g, &iv).unwrap();
    for &h in g.elems() {
        let moved = g.dilate(h);
        assert_eq!(moved.elems(), g.elems());
        assert_eq!(e3(&moved, &moved, &iv).unwrap(), base);
    }
}

#[test]
fn fast_counters_agree_with_brute_force() {
    let f = PrimeField::new(23).unwrap();
    for seed in 0..10 {
        let a = random_set(&f, 5, seed).unwrap();
        let b = random_set(&f, 6, seed + 100).unwrap();
        let c = random_set(&f, 4, seed + 200).unwrap();
        assert_eq!(e3(&a, &b, &c).unwrap(), e3_brute(&a, &b, &c));
        let conv = TripleConvention::Geometric;
        assert_eq!(
            collinear_triples_with(&a, &b, &c, conv).unwrap(),
            collinear_triples_brute(&a, &b, &c, conv)
        );
        let xs = symmetric_interval(&f, 3).unwrap();
        let ys = FpSet::from_residues(&f, [2, 3], SetTag::Primes).unwrap();
        assert_eq!(count_n(&a, &xs, &ys).unwrap(), count_n_brute(&a, &xs, &ys));
        assert_eq!(nu_map(&a, &xs, &ys).unwrap().second_moment(), count_n_brute(&a, &xs, &ys));
    }
}

#[test]
fn line_spectrum_of_full_field() {
    let f = PrimeField::new(11).unwrap();
    let all = FpSet::from_residues(&f, 0..11, SetTag::Derived).unwrap();
    let spec = line_spectrum(&all);
    // Every line holds exactly p points of F_p x F_p.
    assert_eq!(spec.line_count(), 11 * 11 + 11);
    assert_eq!(spec.total_mass(), 12 * 121);
    assert_eq!(t_k_uniform(&all, 2).unwrap(), 11u128.pow(3));
}

#[test]
fn amplification_defaults_are_admissible() {
    let p = 4093;
    let params = AmplificationParams::defaults(p, 63, 3).unwrap();
    assert_eq!((params.y, params.z), (1, 15));
    assert!(params.validate(63).is_ok());
    assert!(AmplificationParams::defaults(p, 59, 3).is_err());
}
