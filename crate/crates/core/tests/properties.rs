use equimap::choi::{Equivariance, LinearMap};
use equimap::detection::{random_pure_vector, sampled_detector, schmidt_rank, SCHMIDT_TOL};
use equimap::equivariant::{build_equivariant, check_ab_equivariance, decompose_equivariant, EquivariantSpec};
use equimap::matrix::Matrix;
use equimap::perm::{enumerate_sym, lex_rank, sigma_rep, GramMatrix};
use equimap::positivity::{k_positivity, positivity_profile, PSD_TOL};
use equimap::random::{complex_gaussian, random_hermitian, Seed};
use equimap::scalar::Complex;
use equimap::tensor::{partial_transpose, TensorShape};
use equimap::zoo::{choi_map, tomiyama_map};
use proptest::prelude::*;

type M = Matrix<f64>;

fn hermitian_spec(n: usize, a: usize, b: usize, seed: u64) -> EquivariantSpec<f64> {
    let mut rng = Seed(seed).rng();
    let mut spec = EquivariantSpec::zeros(n, a, b).unwrap();
    for pi in enumerate_sym(a + b + 1).unwrap() {
        let inv = pi.inverse();
        if lex_rank(&inv) < lex_rank(&pi) {
            continue;
        }
        let v: Complex<f64> = complex_gaussian(&mut rng);
        let v = if inv == pi { Complex::new(v.re, 0.0) } else { v };
        spec.set(&pi, v).unwrap();
        spec.set(&inv, v.conj()).unwrap();
    }
    spec
}

/// `(a, b)` with `a + b + 1 ≤ 4`.
fn signature() -> impl Strategy<Value = (usize, usize)> {
    (0usize..4).prop_flat_map(|k| (0..=k).prop_map(move |a| (a, k - a)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn sigma_is_a_homomorphism(k in 1usize..=4, n in 2usize..=3, i in 0usize..24, j in 0usize..24) {
        let perms = enumerate_sym(k).unwrap();
        let (pi, tau) = (&perms[i % perms.len()], &perms[j % perms.len()]);
        let lhs = &sigma_rep::<f64>(pi, n).unwrap() * &sigma_rep::<f64>(tau, n).unwrap();
        prop_assert_eq!(lhs, sigma_rep::<f64>(&pi.compose(tau), n).unwrap());
    }

    #[test]
    fn gram_entries_are_traces(i in 0usize..24, j in 0usize..24, n in 1usize..=3) {
        let g = GramMatrix::new(4, n).unwrap();
        let (pi, tau) = (&g.perms()[i], &g.perms()[j]);
        let tr = sigma_rep::<f64>(pi, n).unwrap().inner(&sigma_rep::<f64>(tau, n).unwrap());
        prop_assert_eq!(tr, Complex::new(g.get(i, j) as f64, 0.0));
    }

    #[test]
    fn partial_transpose_is_an_involution(legs in 1usize..=3, n in 2usize..=3, mask in 0u32..8, seed in any::<u64>()) {
        let shape = TensorShape::new(legs, n);
        let chosen: Vec<usize> = (0..legs).filter(|l| mask & (1 << l) != 0).collect();
        let x: M = equimap::random::ginibre(shape.total(), shape.total(), &mut Seed(seed).rng());
        let once = partial_transpose(&x, shape, &chosen).unwrap();
        prop_assert_eq!(partial_transpose(&once, shape, &chosen).unwrap(), x.clone());
        prop_assert!((once.frobenius_norm() - x.frobenius_norm()).abs() < 1e-12);
    }

    #[test]
    fn build_then_decompose_recovers_coefficients((a, b) in signature(), extra in 0usize..=2, seed in any::<u64>()) {
        let n = (a + b + 1 + extra).min(4).max(a + b + 1);
        let spec = hermitian_spec(n, a, b, seed);
        let phi = build_equivariant(&spec).unwrap();
        let dec = decompose_equivariant(phi.choi(), n, a, b).unwrap();
        prop_assert!(dec.residual < 1e-9);
        prop_assert_eq!(dec.gram_rank, spec.coeffs().len());
        for (x, y) in dec.spec.coeffs().iter().zip(spec.coeffs()) {
            prop_assert!((x - y).norm() < 1e-9);
        }
    }

    #[test]
    fn built_maps_commute_with_the_group((a, b) in signature(), n in 2usize..=3, seed in any::<u64>()) {
        let phi = build_equivariant(&hermitian_spec(n, a, b, seed)).unwrap();
        let r = check_ab_equivariance(phi.choi(), n, a, b, 20, Seed(seed ^ 1), 1e-9).unwrap();
        prop_assert!(r.passed(), "{:e}", r.max_rel_commutator_norm);
    }

    #[test]
    fn decomposition_of_deficient_gram_still_reconstructs((a, b) in signature(), seed in any::<u64>()) {
        // n = 2 < k + 1 makes the basis dependent; the fit must still be exact.
        let n = 2;
        let spec = hermitian_spec(n, a, b, seed);
        let phi = build_equivariant(&spec).unwrap();
        let dec = decompose_equivariant(phi.choi(), n, a, b).unwrap();
        prop_assert!(dec.residual < 1e-9);
        let rebuilt = build_equivariant(&dec.spec).unwrap();
        prop_assert!((rebuilt.choi() - phi.choi()).max_abs() < 1e-9);
    }

    #[test]
    fn apply_reads_blocks(n in 1usize..=3, big in 1usize..=3, seed in any::<u64>()) {
        let mut rng = Seed(seed).rng();
        let c: M = random_hermitian(n * big, &mut rng);
        let phi = LinearMap::from_choi(n, big, c, "random").unwrap();
        let x: M = equimap::random::ginibre(n, n, &mut rng);
        let mut want = M::zeros(big, big);
        for i in 0..n {
            for j in 0..n {
                want = &want + &phi.image_of_unit(i, j).scale(x[(i, j)]);
            }
        }
        prop_assert!((&phi.apply(&x).unwrap() - &want).max_abs() < 1e-12);
        let h = x.hermitian_part();
        prop_assert!(phi.apply(&h).unwrap().is_hermitian());
    }

    #[test]
    fn block_minimum_is_monotone_in_k((a, b) in signature(), seed in any::<u64>()) {
        let n = 3;
        let phi = build_equivariant(&hermitian_spec(n, a, b, seed)).unwrap();
        let k_max = n.min(phi.out_dim());
        let mins: Vec<f64> = (1..=k_max).map(|k| k_positivity(&phi, k, PSD_TOL).unwrap().min_eigenvalue).collect();
        for w in mins.windows(2) {
            prop_assert!(w[1] <= w[0] + 1e-12);
        }
        let prof = positivity_profile(&phi, PSD_TOL).unwrap();
        prop_assert!(prof.per_k.iter().skip(prof.max_k).all(|e| !e.pass));
        if phi.out_dim() >= n {
            prop_assert_eq!(prof.completely_positive, prof.max_k == n);
        }
    }

    #[test]
    fn tomiyama_profile_follows_threshold(n in 2usize..=4, lambda in 0.0f64..2.0) {
        let ks: Vec<usize> = (1..=n).filter(|&k| lambda <= 1.0 + 1.0 / ((n * k) as f64 - 1.0)).collect();
        let near = (1..=n).any(|k| (lambda - 1.0 - 1.0 / ((n * k) as f64 - 1.0)).abs() < 1e-6);
        prop_assume!(!near);
        let prof = positivity_profile(&tomiyama_map(n, lambda).unwrap(), PSD_TOL).unwrap();
        prop_assert_eq!(prof.max_k, ks.len());
    }

    #[test]
    fn random_pure_states_have_their_rank(m in 1usize..=4, n in 1usize..=4, r in 1usize..=4, seed in any::<u64>()) {
        prop_assume!(r <= m.min(n));
        let psi = random_pure_vector::<f64, _>(m, n, r, &mut Seed(seed).rng()).unwrap();
        prop_assert_eq!(schmidt_rank(&psi, m, n, SCHMIDT_TOL).unwrap(), r);
    }

    #[test]
    fn detector_families_are_prefix_closed(a in 1usize..=6, extra in 0usize..=4, seed in any::<u64>()) {
        let base = choi_map::<f64>(3).unwrap();
        let small = sampled_detector(&base, a, Seed(seed)).unwrap();
        let large = sampled_detector(&base, a + extra, Seed(seed)).unwrap();
        prop_assert_eq!(&small.unitaries[..], &large.unitaries[..a]);
    }
}

#[test]
fn single_precision_pipeline() {
    let spec = EquivariantSpec::<f32>::from_pairs(
        3,
        1,
        1,
        &[
            (equimap::Permutation::parse_cycles("(1 2)", 3).unwrap(), Complex::new(1.0, 0.0)),
            (equimap::Permutation::parse_cycles("(2 3)", 3).unwrap(), Complex::new(-0.5, 0.0)),
        ],
    )
    .unwrap();
    let phi = build_equivariant(&spec).unwrap();
    let dec = decompose_equivariant(phi.choi(), 3, 1, 1).unwrap();
    assert!(dec.residual < 1e-4);
    let r = check_ab_equivariance(phi.choi(), 3, 1, 1, 5, Seed(1), 1e-5).unwrap();
    assert!(r.passed(), "{r:?}");

    let choi = choi_map::<f32>(3).unwrap();
    assert_eq!(choi.equivariance(), Equivariance::Ab { a: 0, b: 1 });
    assert!(k_positivity(&choi, 2, 1e-5).unwrap().psd);
    assert!(!k_positivity(&choi, 3, 1e-5).unwrap().psd);
}
