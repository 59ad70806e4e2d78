//! Property suites for the criteria: separable sanity, frame invariance,
//! margin equivalences, dominance relations and the symmetric-state link to
//! two-qubit entanglement.

use num_complex::Complex64;
use spinsq_core::collective::{
    moments, product_moments, product_state, reduced_av2, rotate_moments, Axis, BlochVector,
    CollectiveMoments,
};
use spinsq_core::criteria::*;
use spinsq_core::detect::ppt_any;
use spinsq_core::op::DensityOperator;
use spinsq_core::polytope::{random_rotation, sample_separable};
use spinsq_core::rng::SplitMix64;

const TOL: f64 = 1e-9;

fn margin_of(reports: &[CriterionReport], id: CriterionId) -> Option<f64> {
    reports.iter().find(|r| r.id == id).and_then(|r| r.margin())
}

fn moments_from_sample(n: usize, k2: [f64; 3], j: [f64; 3]) -> CollectiveMoments {
    // Samples carry diagonal second moments; the off-diagonal entries of C are
    // not observed, so rebuild the moments with C = diag(k2) + off-diagonal
    // mean-field terms j_k j_l, which keeps gamma positive semidefinite.
    let mut c = [[0.0; 3]; 3];
    for a in 0..3 {
        for b in 0..3 {
            c[a][b] = if a == b { k2[a] } else { j[a] * j[b] };
        }
    }
    CollectiveMoments::from_measurements(n, j, c).unwrap()
}

/// Random mixture of product states, returned as moments (closed form) plus
/// the matching density operator when `with_state`.
fn random_separable_moments(
    rng: &mut SplitMix64,
    n: usize,
    with_state: bool,
) -> (CollectiveMoments, Option<DensityOperator>) {
    let comps = 1 + rng.below(3) as usize;
    let mut weights: Vec<f64> = (0..comps)
        .map(|_| -f64::ln(rng.next_f64().max(1e-300)))
        .collect();
    let total: f64 = weights.iter().sum();
    for w in &mut weights {
        *w /= total;
    }
    let mut j = [0.0; 3];
    let mut c = [[0.0; 3]; 3];
    let mut states = Vec::new();
    for &w in &weights {
        let blochs: Vec<BlochVector> = (0..n)
            .map(|_| {
                let v = rng.unit_vector();
                BlochVector::new(v[0], v[1], v[2]).unwrap()
            })
            .collect();
        let m = product_moments(&blochs).unwrap();
        for a in 0..3 {
            j[a] += w * m.j()[a];
            for b in 0..3 {
                c[a][b] += w * m.c()[a][b];
            }
        }
        if with_state {
            states.push((w, product_state(&blochs).unwrap()));
        }
    }
    let m = CollectiveMoments::from_measurements(n, j, c).unwrap();
    let rho = if with_state {
        let d = 1usize << n;
        let mut acc = spinsq_core::linalg::CMat::zeros(d, d);
        for (w, s) in &states {
            acc.add_assign_scaled(s.mat(), Complex64::new(*w, 0.0));
        }
        Some(
            DensityOperator::new(spinsq_core::op::ComplexOperator::new(acc, vec![2; n]).unwrap())
                .unwrap(),
        )
    } else {
        None
    };
    (m, rho)
}

fn random_pure_moments(rng: &mut SplitMix64, n: usize) -> CollectiveMoments {
    let d = 1usize << n;
    let amps: Vec<Complex64> = (0..d)
        .map(|_| Complex64::new(rng.next_f64() - 0.5, rng.next_f64() - 0.5))
        .collect();
    let rho = DensityOperator::pure(&amps, vec![2; n]).unwrap();
    moments(&rho).unwrap()
}

/// Random pure state of the symmetric subspace, as a full state vector.
fn random_symmetric_state(rng: &mut SplitMix64, n: usize) -> DensityOperator {
    let d = 1usize << n;
    let coef: Vec<Complex64> = (0..=n)
        .map(|_| Complex64::new(rng.next_f64() - 0.5, rng.next_f64() - 0.5))
        .collect();
    let mut binom = vec![1.0f64; n + 1];
    for m in 1..=n {
        binom[m] = binom[m - 1] * (n - m + 1) as f64 / m as f64;
    }
    let amps: Vec<Complex64> = (0..d)
        .map(|r| {
            let w = (r as u64).count_ones() as usize;
            coef[w] / binom[w].sqrt()
        })
        .collect();
    DensityOperator::pure(&amps, vec![2; n]).unwrap()
}

#[test]
fn separable_sanity_no_criterion_fires() {
    // 10^4 random separable states across n = 2..=6: no entanglement
    // criterion may report a violation.
    let mut rng = SplitMix64::new(0x5e9a);
    let per_n = 2000;
    for n in 2..=6usize {
        for _ in 0..per_n {
            let (m, _) = random_separable_moments(&mut rng, n, false);
            for r in evaluate_all(&m, TOL).unwrap() {
                assert!(
                    !r.violated(),
                    "criterion {} fired on a separable state (n={n}, margin {:?})",
                    r.id,
                    r.margin()
                );
            }
        }
    }
}

#[test]
fn separable_sanity_includes_polytope_sampler() {
    // The polytope sampler must agree with the criteria on its own samples.
    for n in [4usize, 6] {
        for s in sample_separable(n, 1000, 99, 4, false).unwrap() {
            let m = moments_from_sample(n, s.k2, s.j);
            let reports = evaluate_ossi(&m, TOL).unwrap();
            for r in reports {
                assert!(!r.violated(), "{} fired on sampler output", r.id);
            }
        }
    }
}

#[test]
fn symmetric_separable_states_satisfy_symmetric_forms() {
    // Mixtures of identical-factor products are symmetric, so the symmetric
    // two-qubit forms apply and must hold.
    let mut rng = SplitMix64::new(0x11);
    for n in 2..=6usize {
        for _ in 0..300 {
            let comps = 1 + rng.below(3) as usize;
            let mut weights: Vec<f64> = (0..comps).map(|_| rng.next_f64().max(1e-6)).collect();
            let total: f64 = weights.iter().sum();
            for w in &mut weights {
                *w /= total;
            }
            let mut j = [0.0; 3];
            let mut c = [[0.0; 3]; 3];
            for &w in &weights {
                let v = rng.unit_vector();
                let blochs = vec![BlochVector::new(v[0], v[1], v[2]).unwrap(); n];
                let m = product_moments(&blochs).unwrap();
                for a in 0..3 {
                    j[a] += w * m.j()[a];
                    for b in 0..3 {
                        c[a][b] += w * m.c()[a][b];
                    }
                }
            }
            let m = CollectiveMoments::from_measurements(n, j, c).unwrap();
            let reports = kcl(&m, TOL).unwrap();
            for id in [CriterionId::KclSym38, CriterionId::KclSym40] {
                let r = reports.iter().find(|r| r.id == id).unwrap();
                assert!(
                    matches!(r.outcome, Outcome::Evaluated { .. }),
                    "symmetric support not recognised"
                );
                assert!(!r.violated(), "{} fired on symmetric separable mixture", id);
            }
        }
    }
}

#[test]
fn frame_invariance_of_invariant_criteria() {
    // Margins of the rotation-invariant criteria are unchanged under 100
    // random rotations.
    let mut rng = SplitMix64::new(0xfeed);
    let mut states: Vec<CollectiveMoments> = Vec::new();
    for n in [3usize, 5] {
        states.push(random_pure_moments(&mut rng, n));
        let (sep, _) = random_separable_moments(&mut rng, n, false);
        states.push(sep);
    }
    let ids = [
        CriterionId::Inv26b,
        CriterionId::Inv26c,
        CriterionId::Inv26d,
        CriterionId::Eig28b,
        CriterionId::Eig28c,
        CriterionId::Eig28d,
        CriterionId::Orig31,
        CriterionId::Kcl37,
        CriterionId::Dicke42,
    ];
    for m in &states {
        let base = evaluate_all(m, TOL).unwrap();
        for _ in 0..100 {
            let o = random_rotation(&mut rng);
            let rotated = rotate_moments(m, &o).unwrap();
            let reports = evaluate_all(&rotated, TOL).unwrap();
            for id in ids {
                let a = margin_of(&base, id).unwrap();
                let b = margin_of(&reports, id).unwrap();
                assert!(
                    (a - b).abs() < 1e-8,
                    "{id} margin moved under rotation: {a} vs {b}"
                );
            }
            // KCLSYM-40 is invariant whenever applicable on both sides.
            let a40 = margin_of(&base, CriterionId::KclSym40);
            let b40 = margin_of(&reports, CriterionId::KclSym40);
            if let (Some(a), Some(b)) = (a40, b40) {
                assert!((a - b).abs() < 1e-8);
            }
        }
    }
}

#[test]
fn invariant_and_eigenvalue_forms_are_equivalent() {
    // The eigenvalue forms rescale the two trace inequalities by N and leave
    // the extreme-eigenvalue inequalities untouched.
    let mut rng = SplitMix64::new(0xabc);
    for n in 2..=6usize {
        for _ in 0..200 {
            let m = random_pure_moments(&mut rng, n);
            let inv = evaluate_invariant_ossi(&m, TOL).unwrap();
            let eig = evaluate_eigenspace_ossi(&m, TOL).unwrap();
            let nf = n as f64;
            let pairs = [
                (CriterionId::Inv26a, CriterionId::Eig28a, nf),
                (CriterionId::Inv26b, CriterionId::Eig28b, nf),
                (CriterionId::Inv26c, CriterionId::Eig28c, 1.0),
                (CriterionId::Inv26d, CriterionId::Eig28d, 1.0),
            ];
            for (a, b, scale) in pairs {
                let ma = margin_of(&inv, a).unwrap();
                let mb = margin_of(&eig, b).unwrap();
                assert!(
                    (ma * scale - mb).abs() < 1e-9 * (1.0 + mb.abs()),
                    "{a} vs {b}: {ma} * {scale} != {mb}"
                );
            }
            // Verdict equivalence.
            for (a, b) in [
                (CriterionId::Inv26b, CriterionId::Eig28b),
                (CriterionId::Inv26c, CriterionId::Eig28c),
                (CriterionId::Inv26d, CriterionId::Eig28d),
            ] {
                let va = inv.iter().find(|r| r.id == a).unwrap().violated();
                let vb = eig.iter().find(|r| r.id == b).unwrap().violated();
                assert_eq!(va, vb);
            }
        }
    }
}

#[test]
fn kcl_dominated_by_complete_family() {
    // On the squeezing branch (planar second moments above N/2) every
    // violation of the quadratic two-qubit criterion is caught by the same
    // per-axis inequality of the complete family. The squared form also fires
    // on the opposite branch (small planar moments), where the matching
    // per-axis inequality holds trivially; those states are still caught by
    // the family as a whole.
    let mut rng = SplitMix64::new(0xd0d0);
    let mut squeezing_branch = 0usize;
    let mut opposite_branch = 0usize;
    for n in 3..=6usize {
        for _ in 0..2500 {
            let m = random_pure_moments(&mut rng, n);
            let ossi = evaluate_ossi(&m, TOL).unwrap();
            let family_fired = ossi.iter().any(|r| r.violated());
            let kcl_reports = kcl(&m, TOL).unwrap();
            for axis in Axis::ALL {
                let kcl_v = kcl_reports
                    .iter()
                    .find(|r| r.id == CriterionId::Kcl34(axis))
                    .unwrap()
                    .violated();
                if !kcl_v {
                    continue;
                }
                let (k, l) = axis.others();
                let planar = m.second_moment(k) + m.second_moment(l) - n as f64 / 2.0;
                if planar >= 0.0 {
                    squeezing_branch += 1;
                    let ossi_v = ossi
                        .iter()
                        .find(|r| r.id == CriterionId::Ossi8c(axis))
                        .unwrap()
                        .violated();
                    assert!(
                        ossi_v,
                        "8c({axis}) missed a state detected by the quadratic form"
                    );
                } else {
                    opposite_branch += 1;
                    assert!(
                        family_fired,
                        "quadratic-form violation missed by the whole family"
                    );
                }
            }
        }
    }
    assert!(
        squeezing_branch > 15,
        "dominance test never exercised ({squeezing_branch} violations)"
    );
    let _ = opposite_branch;
}

#[test]
fn original_criterion_dominated_by_invariant_form() {
    let mut rng = SplitMix64::new(0xcafe);
    let mut fired = 0usize;
    for n in 2..=6usize {
        for _ in 0..2000 {
            let m = random_pure_moments(&mut rng, n);
            let (r3, r31) = original_squeezing(&m, TOL).unwrap();
            if r3.violated() {
                fired += 1;
                assert!(
                    r31.violated(),
                    "ratio criterion fired but the invariant form did not (margins {:?} / {:?})",
                    r3.margin(),
                    r31.margin()
                );
            }
        }
    }
    assert!(fired > 50, "dominance test never exercised ({fired} hits)");
}

#[test]
fn dicke_criterion_implies_planar_pair_correlation() {
    // A violation of the planar second-moment bound forces the realigned
    // two-site correlation above one, the two-qubit entanglement signature.
    let mut rng = SplitMix64::new(0xbead);
    let mut fired = 0usize;
    for n in 2..=5usize {
        for _ in 0..1500 {
            let d = 1usize << n;
            let amps: Vec<Complex64> = (0..d)
                .map(|_| Complex64::new(rng.next_f64() - 0.5, rng.next_f64() - 0.5))
                .collect();
            let rho = DensityOperator::pure(&amps, vec![2; n]).unwrap();
            let m = moments(&rho).unwrap();
            let (d41, _) = dicke_criterion(&m, TOL).unwrap();
            if !d41.violated() {
                continue;
            }
            fired += 1;
            // Recover the worst pair from the report and check the two-qubit
            // form by direct expectation values on the averaged pair state.
            let Some(DirectionData::AxisPermutation([k, l, _])) = d41.direction else {
                panic!("missing pair data")
            };
            let av2 = reduced_av2(&rho).unwrap();
            let pair_corr = |axis: Axis| {
                let s = spinsq_core::op::ComplexOperator::new(
                    spinsq_core::collective::pauli_mat(axis),
                    vec![2],
                )
                .unwrap();
                av2.expect(&spinsq_core::op::kron(&s, &s).unwrap())
            };
            let corr = pair_corr(k) + pair_corr(l);
            assert!(
                corr > 1.0 - 1e-9,
                "pair correlation {corr} not above one despite violation"
            );
        }
    }
    assert!(fired > 20, "Dicke dominance never exercised ({fired} hits)");
}

#[test]
fn symmetric_detected_states_have_entangled_pair() {
    // For symmetric states, detection by any moment criterion implies the
    // reduced two-qubit state is entangled (NPT).
    let mut rng = SplitMix64::new(0x600d);
    let mut detected_count = 0usize;
    for n in 3..=6usize {
        for _ in 0..250 {
            let rho = random_symmetric_state(&mut rng, n);
            let m = moments(&rho).unwrap();
            let detected = evaluate_all(&m, TOL).unwrap().iter().any(|r| r.violated());
            if !detected {
                continue;
            }
            detected_count += 1;
            let av2 = reduced_av2(&rho).unwrap();
            let verdict = ppt_any(&av2, TOL).unwrap();
            assert!(
                verdict.detected,
                "detected symmetric state with PPT pair (n={n}, witness {})",
                verdict.witness
            );
        }
    }
    assert!(
        detected_count >= 500,
        "only {detected_count} symmetric states detected"
    );
}

#[test]
fn av2_forms_match_parent_verdicts() {
    // Evaluating the rewritten forms on the averaged pair state coincides
    // with the fixed-axis family on the parent (margins scale by N(N-1)/4).
    let mut rng = SplitMix64::new(0x42);
    for n in 2..=5usize {
        for _ in 0..200 {
            let d = 1usize << n;
            let amps: Vec<Complex64> = (0..d)
                .map(|_| Complex64::new(rng.next_f64() - 0.5, rng.next_f64() - 0.5))
                .collect();
            let rho = DensityOperator::pure(&amps, vec![2; n]).unwrap();
            let m = moments(&rho).unwrap();
            let av2 = reduced_av2(&rho).unwrap();
            let forms = av2_forms(&av2, n, TOL).unwrap();
            let ossi = evaluate_ossi(&m, TOL).unwrap();
            let scale = n as f64 * (n as f64 - 1.0) / 4.0;

            let v8b = margin_of(&ossi, CriterionId::Ossi8b).unwrap();
            let v45b = margin_of(&forms, CriterionId::Av245b).unwrap();
            assert!(
                (v8b - scale * v45b).abs() < 1e-8,
                "45b mismatch: {v8b} vs {v45b}"
            );

            let min8c = Axis::ALL
                .iter()
                .map(|&a| margin_of(&ossi, CriterionId::Ossi8c(a)).unwrap())
                .fold(f64::INFINITY, f64::min);
            let v45c = margin_of(&forms, CriterionId::Av245c).unwrap();
            assert!((min8c - scale * v45c).abs() < 1e-8);

            // The variance-pair form carries an extra factor of N-1.
            let min8d = Axis::ALL
                .iter()
                .map(|&a| margin_of(&ossi, CriterionId::Ossi8d(a)).unwrap())
                .fold(f64::INFINITY, f64::min);
            let v45d = margin_of(&forms, CriterionId::Av245d).unwrap();
            assert!((min8d - scale * (n as f64 - 1.0) * v45d).abs() < 1e-8);
        }
    }
}

#[test]
fn av2_of_maximally_mixed_pair_approaches_zero_margin() {
    // With the pair state maximally mixed, the variance-sum form's margin is
    // exactly 1/(N-1): positive at any finite N, vanishing as N grows.
    let id4 = spinsq_core::linalg::CMat::identity(4).scale(Complex64::new(0.25, 0.0));
    let pair =
        DensityOperator::new(spinsq_core::op::ComplexOperator::new(id4, vec![2, 2]).unwrap())
            .unwrap();
    for n in [2usize, 4, 16, 256] {
        let forms = av2_forms(&pair, n, TOL).unwrap();
        let m = margin_of(&forms, CriterionId::Av245b).unwrap();
        assert!((m - 1.0 / (n as f64 - 1.0)).abs() < 1e-12);
        assert!(!forms.iter().any(|r| r.violated()));
    }
}

#[test]
fn rotation_scan_never_beats_invariant_verdicts() {
    // Eight-family violations found by random rotations are always already
    // visible to the invariant forms.
    let mut rng = SplitMix64::new(0x777);
    for n in [3usize, 4] {
        for _ in 0..150 {
            let m = random_pure_moments(&mut rng, n);
            let inv = evaluate_invariant_ossi(&m, TOL).unwrap();
            let inv_c = inv
                .iter()
                .find(|r| r.id == CriterionId::Inv26c)
                .unwrap()
                .violated();
            let inv_d = inv
                .iter()
                .find(|r| r.id == CriterionId::Inv26d)
                .unwrap()
                .violated();
            for _ in 0..40 {
                let o = random_rotation(&mut rng);
                let rot = rotate_moments(&m, &o).unwrap();
                let ossi = evaluate_ossi(&rot, TOL).unwrap();
                let any_c = Axis::ALL.iter().any(|&a| {
                    ossi.iter()
                        .find(|r| r.id == CriterionId::Ossi8c(a))
                        .unwrap()
                        .violated()
                });
                let any_d = Axis::ALL.iter().any(|&a| {
                    ossi.iter()
                        .find(|r| r.id == CriterionId::Ossi8d(a))
                        .unwrap()
                        .violated()
                });
                assert!(
                    !any_c || inv_c,
                    "a rotation found an 8c violation the invariant missed"
                );
                assert!(
                    !any_d || inv_d,
                    "a rotation found an 8d violation the invariant missed"
                );
            }
        }
    }
}

#[test]
fn extremal_states_sit_on_the_two_qubit_bounds() {
    // The maximal-moment extremal states saturate both the quadratic
    // two-qubit criterion (with z singled out) and the planar-moment bound.
    use spinsq_core::polytope::construct_vertex_state_a;
    for n in [4usize, 6, 10] {
        for j in [[0.0; 3], [0.0, 0.0, 0.2 * n as f64]] {
            for axis in [Axis::X, Axis::Y] {
                let rho = construct_vertex_state_a(n, j, axis).unwrap();
                let m = moments(&rho).unwrap();
                let reports = kcl(&m, TOL).unwrap();
                let r34 = margin_of(&reports, CriterionId::Kcl34(Axis::Z)).unwrap();
                assert!(r34.abs() < 1e-8, "A_{axis} quadratic margin {r34} (n={n})");
                let (d41, _) = dicke_criterion(&m, TOL).unwrap();
                let planar = d41.margin().unwrap();
                assert!(
                    planar.abs() < 1e-8,
                    "A_{axis} planar margin {planar} (n={n})"
                );
            }
        }
    }
}
