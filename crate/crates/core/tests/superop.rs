mod common;

use common::*;
use dynmap_core::bases::{gell_mann_basis, max_entangled};
use dynmap_core::generators::{pauli_channel, weyl_channel, AmplitudeDamping};
use dynmap_core::linalg::{CMatrix, CVector};
use dynmap_core::random::{self, rng_from_seed};
use dynmap_core::rate::RateFunction;
use dynmap_core::superop::*;
use dynmap_core::Error;

fn map(d: usize, f: impl Fn(&CMatrix) -> CMatrix) -> SuperOperator {
    SuperOperator::from_fn(d, |x| f(x))
}

fn dephasing(t: f64) -> SuperOperator {
    let p = (1.0 - (-t).exp()) / 2.0;
    map(2, move |x| kraus_apply(&[(1.0 - p, eye(2)), (p, sz())], x))
}

fn close(a: &CMatrix, b: &CMatrix, tol: f64) -> bool {
    (a - b).norm() <= tol
}

fn sorted(mut v: Vec<num_complex::Complex64>) -> Vec<num_complex::Complex64> {
    v.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    v
}

fn same_multiset(a: &[num_complex::Complex64], b: &[num_complex::Complex64], tol: f64) -> bool {
    let mut rest: Vec<_> = b.to_vec();
    for z in a {
        match rest.iter().position(|w| (w - z).norm() <= tol) {
            Some(i) => {
                rest.swap_remove(i);
            }
            None => return false,
        }
    }
    rest.is_empty()
}

#[test]
fn matrix_rep_examples() {
    let f = gell_mann_rep(&SuperOperator::identity(2));
    assert!(close(&f.entries, &eye(4), 1e-15));

    let t: f64 = 0.7;
    let f = gell_mann_rep(&dephasing(t));
    let e = (-t).exp();
    assert!(close(&f.entries, &diag(&[c(1.0, 0.0), c(e, 0.0), c(e, 0.0), c(1.0, 0.0)]), 1e-14));
    assert!(close(&f.entries, &pauli_rep(|x| dephasing(t).apply(x)), 1e-14));

    let g = 0.6;
    let f = gell_mann_rep(&map(2, move |x| ad_apply(c(g, 0.0), x)));
    let (q, delta) = block_decompose(&f).unwrap();
    assert!((q[0]).abs() < 1e-15 && (q[1]).abs() < 1e-15 && (q[2] - (1.0 - g * g)).abs() < 1e-14);
    let expected = nalgebra::DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![g, g, g * g]));
    assert!((delta - expected).norm() < 1e-14);
}

#[test]
fn matrix_rep_dimension_mismatch() {
    let basis = gell_mann_basis(3).unwrap();
    assert!(matches!(matrix_rep(&SuperOperator::identity(2), &basis), Err(Error::DimensionMismatch { .. })));
}

#[test]
fn block_decompose_examples() {
    let (q, _) = block_decompose(&gell_mann_rep(&dephasing(0.3))).unwrap();
    assert!(q.norm() < 1e-15);
    let (q, delta) = block_decompose(&FMatrix::identity(3)).unwrap();
    assert!(q.norm() == 0.0 && (delta - nalgebra::DMatrix::identity(8, 8)).norm() == 0.0);
    let (q, delta) = block_decompose(&gell_mann_rep(&map(2, |x| ad_apply(c(0.0, 0.0), x)))).unwrap();
    assert!((q[2] - 1.0).abs() < 1e-15 && q[0] == 0.0 && delta.norm() < 1e-15);

    let not_tp = SuperOperator::identity(2).scaled(c(0.5, 0.0));
    assert!(matches!(block_decompose(&gell_mann_rep(&not_tp)), Err(Error::NotTracePreserving(_))));
}

#[test]
fn block_decompose_reproduces_affine_action() {
    let mut rng = rng_from_seed(4);
    for d in [2, 3] {
        let basis = gell_mann_basis(d).unwrap();
        let us: Vec<CMatrix> = (0..3).map(|_| random::unitary(&mut rng, d)).collect();
        let sigma = random::density_matrix(&mut rng, d);
        let phi = map(d, move |x| {
            let mut y = &us[0] * x * us[0].adjoint() * c(0.5, 0.0) + &us[1] * x * us[1].adjoint() * c(0.3, 0.0);
            y += &sigma * (x.trace() * c(0.2, 0.0));
            y
        });
        let (q, delta) = block_decompose(&gell_mann_rep(&phi)).unwrap();
        for _ in 0..10 {
            let rho = random::density_matrix(&mut rng, d);
            let x = nalgebra::DVector::from_vec(basis.bloch_vector(&rho));
            let y = nalgebra::DVector::from_vec(basis.bloch_vector(&phi.apply(&rho)));
            assert!((&y - (&delta * &x + &q)).norm() < 1e-10);
        }
    }
}

#[test]
fn spectrum_examples() {
    let t: f64 = 1.3;
    let e = (-t).exp();
    let s = spectrum(&gell_mann_rep(&dephasing(t)));
    assert!(same_multiset(&s.eigenvalues, &[c(1.0, 0.0), c(1.0, 0.0), c(e, 0.0), c(e, 0.0)], 1e-12));
    assert!((s.eigenvalues[0] - c(1.0, 0.0)).norm() < 1e-14);

    let g = c(0.4, 0.5);
    let s = spectrum(&gell_mann_rep(&map(2, move |x| ad_apply(g, x))));
    assert!(same_multiset(&s.eigenvalues, &[c(1.0, 0.0), g, g.conj(), c(g.norm_sqr(), 0.0)], 1e-12));

    let mut rng = rng_from_seed(8);
    for d in [2, 3, 4] {
        let u = random::unitary(&mut rng, d);
        let f = gell_mann_rep(&SuperOperator::conjugation(&u));
        assert!(f.is_real(1e-12));
        let o = f.real();
        assert!((&o * o.transpose() - nalgebra::DMatrix::identity(d * d, d * d)).norm() < 1e-12);
        let s = spectrum(&f);
        assert!(s.eigenvalues.iter().all(|z| (z.norm() - 1.0).abs() < 1e-10));
        let det: f64 = s.singular_values.iter().product();
        assert!((det - f.entries.determinant().norm()).abs() < 1e-8);
        assert!(s.singular_values.windows(2).all(|w| w[0] >= w[1]));
    }
}

#[test]
fn svd_factors_reconstruct() {
    let g = c(0.3, -0.6);
    let f = gell_mann_rep(&map(2, move |x| ad_apply(g, x)));
    let s = spectrum(&f);
    let sigma = CMatrix::from_diagonal(&CVector::from_iterator(4, s.singular_values.iter().map(|&x| c(x, 0.0))));
    assert!(close(&(&s.left_factor * sigma * &s.right_factor), &f.entries, 1e-12));
}

#[test]
fn volume_factor_examples() {
    assert_eq!(volume_factor(&FMatrix::identity(2)), 1.0);
    let t: f64 = 0.9;
    assert!((volume_factor(&gell_mann_rep(&dephasing(t))) - (-2.0 * t).exp()).abs() < 1e-14);
    let l = [0.8, -0.3, 0.5];
    let f = gell_mann_rep(&map(2, move |x| pauli_channel_apply(l, x)));
    assert!((volume_factor(&f) - (l[0] * l[1] * l[2]).abs()).abs() < 1e-14);
}

#[test]
fn choi_examples() {
    let p = max_entangled(2).unwrap();
    assert!(close(&choi(&SuperOperator::identity(2)), &p.projector, 1e-15));
    let depol = map(2, |x| eye(2) * (x.trace() / c(2.0, 0.0)));
    assert!(close(&choi(&depol), &(eye(4) * c(0.25, 0.0)), 1e-15));
    let t: f64 = 0.4;
    let cm = choi(&dephasing(t));
    let v = &p.vector;
    let val = (v.adjoint() * &cm * v)[(0, 0)];
    assert!((val - c((1.0 + (-t).exp()) / 2.0, 0.0)).norm() < 1e-14);
    // diagonal in the Bell basis
    let bell_minus = CVector::from_vec(vec![c(0.5f64.sqrt(), 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-(0.5f64.sqrt()), 0.0)]);
    let off = (bell_minus.adjoint() * &cm * v)[(0, 0)];
    assert!(off.norm() < 1e-14);
    let round = SuperOperator::from_choi(&cm, 2).unwrap();
    assert!(close(round.matrix(), dephasing(t).matrix(), 1e-14));
}

#[test]
fn witness_f_examples() {
    for d in 2..=4 {
        assert!((witness_f(&SuperOperator::identity(d)) - 1.0).abs() < 1e-14);
    }
    let g = 0.35;
    assert!((witness_f(&map(2, move |x| ad_apply(c(g, 0.0), x))) - 0.25 * (1.0 + g).powi(2)).abs() < 1e-14);
    let t: f64 = 2.0;
    assert!((witness_f(&dephasing(t)) - (1.0 + (-t).exp()) / 2.0).abs() < 1e-14);
}

#[test]
fn damping_basis_dephasing_is_pauli() {
    let db = damping_basis(&dephasing(0.5)).unwrap();
    for (r, l) in db.right.iter().zip(&db.left) {
        // self-dual up to normalization: each right operator is a Pauli
        let hits = [eye(2), sx(), sy(), sz()]
            .iter()
            .filter(|p| ((p.adjoint() * r).trace().norm() / r.norm() - 2f64.sqrt()).abs() < 1e-9)
            .count();
        assert_eq!(hits, 1);
        let ratio = (l.adjoint() * r).trace();
        assert!((ratio - c(1.0, 0.0)).norm() < 1e-9);
    }
}

#[test]
fn damping_basis_weyl_channel_is_weyl_unitaries() {
    let gen = weyl_channel(3, (1..=8).map(|i| RateFunction::constant(0.1 * i as f64)).collect()).unwrap();
    let phi = gen.analytic_map(0.8).unwrap().unwrap();
    let db = damping_basis(&phi).unwrap();
    // each right eigen-operator lies in the span of the Weyl unitaries that
    // share its eigenvalue, and every unitary is an eigen-operator
    let mut hit = [false; 9];
    for (r, lambda) in db.right.iter().zip(&db.eigenvalues) {
        let mut residual = r.clone();
        for m in 0..3 {
            for n in 0..3 {
                let u = weyl(3, m, n);
                let image = phi.apply(&u);
                let mu = (u.adjoint() * &image).trace() / c(3.0, 0.0);
                assert!(close(&image, &(&u * mu), 1e-9));
                if (mu - lambda).norm() < 1e-8 {
                    let coeff = (u.adjoint() * r).trace() / c(3.0, 0.0);
                    residual -= &u * coeff;
                    if coeff.norm() > 1e-6 {
                        hit[m * 3 + n] = true;
                    }
                }
            }
        }
        assert!(residual.norm() < 1e-8);
    }
    assert!(hit.iter().all(|&b| b));
}

#[test]
fn damping_basis_invariants_amplitude_damping() {
    let g = c(0.5, 0.3);
    let phi = map(2, move |x| ad_apply(g, x));
    let db = damping_basis(&phi).unwrap();
    assert!(same_multiset(&db.eigenvalues, &[c(1.0, 0.0), g, g.conj(), c(g.norm_sqr(), 0.0)], 1e-10));
    let dual = phi.dual();
    for (a, (ra, la)) in db.right.iter().zip(&db.left).enumerate() {
        let lambda = db.eigenvalues[a];
        assert!(close(&phi.apply(ra), &(ra * lambda), 1e-9));
        assert!(close(&dual.apply(la), &(la * lambda.conj()), 1e-9));
        for (b, lb) in db.left.iter().enumerate() {
            let ip = (lb.adjoint() * ra).trace();
            let target = if a == b { 1.0 } else { 0.0 };
            assert!((ip - c(target, 0.0)).norm() < 1e-9);
        }
    }
    // σ₋ = |0⟩⟨1| is the right eigenvector for G
    let idx = db.eigenvalues.iter().position(|z| (z - g).norm() < 1e-10).unwrap();
    let r = &db.right[idx];
    assert!(r[(0, 1)].norm() > 1e-6 && r[(1, 0)].norm() < 1e-9 && r[(0, 0)].norm() < 1e-9);
}

#[test]
fn damping_basis_rejects_defective_map() {
    let mut m = CMatrix::identity(4, 4);
    m[(0, 1)] = c(1.0, 0.0);
    let phi = SuperOperator::new(2, m).unwrap();
    assert!(matches!(damping_basis(&phi), Err(Error::DefectiveMap { .. })));
    let s = spectrum(&gell_mann_rep(&phi));
    assert_eq!(s.eigenvalues.len(), 4);
}

#[test]
fn classify_examples() {
    let pauli = map(2, |x| pauli_channel_apply([0.7, 0.2, 0.4], x));
    let f = classify(&pauli);
    assert!(f.hermitian && f.normal && f.unital && f.trace_preserving && f.hermiticity_preserving);

    let ad = AmplitudeDamping::channel(c(0.5, 0.4));
    let f = classify(&ad);
    assert!(!f.hermitian && !f.normal && !f.unital && f.trace_preserving);
    let ad_oracle = map(2, |x| ad_apply(c(0.5, 0.4), x));
    assert!(close(ad.matrix(), ad_oracle.matrix(), 1e-15));

    let gen = weyl_channel(3, (1..=8).map(|i| RateFunction::constant(0.1 * i as f64)).collect()).unwrap();
    let f = classify(&gen.analytic_map(1.0).unwrap().unwrap());
    assert!(f.normal && !f.hermitian && f.unital && f.trace_preserving);
}

#[test]
fn commute_check_examples() {
    assert!(commute_check(&dephasing(0.2), &dephasing(1.7)).unwrap() < 1e-14);
    let a = pauli_channel(RateFunction::constant(1.0), RateFunction::constant(0.2), RateFunction::constant(0.0));
    let b = pauli_channel(RateFunction::constant(0.1), RateFunction::constant(0.0), RateFunction::constant(3.0));
    assert!(commute_check(&a.evaluate(0.0).unwrap(), &b.evaluate(0.0).unwrap()).unwrap() < 1e-12);

    let zdeph = map(2, |x| (sz() * x * sz() - x) * c(0.5, 0.0));
    let xdeph = map(2, |x| (sx() * x * sx() - x) * c(0.5, 0.0));
    // Pauli-diagonal generators share the Pauli eigenbasis
    assert!(commute_check(&zdeph, &xdeph).unwrap() < 1e-14);
    let rotation = SuperOperator::hamiltonian(&sx());
    assert!(commute_check(&zdeph, &rotation).unwrap() > 0.1);
    assert!(commute_check(&zdeph, &SuperOperator::identity(3)).is_err());
}

#[test]
fn ccp_test_examples() {
    let deph = map(2, |x| (sz() * x * sz() - x) * c(0.5, 0.0));
    assert!(ccp_test(&deph).unwrap().passes);

    for t in [0.1, 1.0, 3.0] {
        let gen = pauli_channel(
            RateFunction::constant(1.0),
            RateFunction::constant(1.0),
            RateFunction::tanh(1.0, 1.0).scaled(-1.0),
        );
        let r = ccp_test(&gen.evaluate(t).unwrap()).unwrap();
        assert!(!r.passes);
        // projected Choi block of ½Σγ_k(σ_kρσ_k − ρ) has eigenvalues γ_k/2
        assert!((r.min_eig + t.tanh() / 2.0).abs() < 1e-12);
    }

    let h = sx() * c(0.3, 0.0) + sy() * c(-1.1, 0.0);
    let r = ccp_test(&SuperOperator::hamiltonian(&h)).unwrap();
    assert!(r.passes && r.min_eig.abs() < 1e-12);

    assert!(matches!(ccp_test(&SuperOperator::identity(2)), Err(Error::NotTraceAnnihilating(_))));
}

#[test]
fn spectral_order_pins_unit_eigenvalue() {
    let order = order_eigenvalues(vec![c(0.2, 0.0), c(0.999, 0.0), c(0.5, 0.1), c(0.5, -0.1)]);
    assert_eq!(order[0], c(0.999, 0.0));
    let rest = sorted(order[1..].to_vec());
    assert_eq!(rest.len(), 3);
}
