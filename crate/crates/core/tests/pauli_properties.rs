use num_complex::Complex64 as C;
use pauliprop::*;
use proptest::prelude::*;

fn pauli_string(max_n: usize) -> impl Strategy<Value = PauliString> {
    (1..=max_n).prop_flat_map(|n| {
        prop::collection::vec(0..4usize, n)
            .prop_map(|d| PauliString::from_paulis(&d.into_iter().map(Pauli::from_index).collect::<Vec<_>>()))
    })
}

fn pair(max_n: usize) -> impl Strategy<Value = (PauliString, PauliString)> {
    (1..=max_n).prop_flat_map(|n| {
        let one = prop::collection::vec(0..4usize, n)
            .prop_map(|d| PauliString::from_paulis(&d.into_iter().map(Pauli::from_index).collect::<Vec<_>>()));
        (one.clone(), one)
    })
}

fn single_matrix(p: Pauli) -> [[C; 2]; 2] {
    let (o, z, i) = (C::new(1.0, 0.0), C::new(0.0, 0.0), C::new(0.0, 1.0));
    match p {
        Pauli::I => [[o, z], [z, o]],
        Pauli::X => [[z, o], [o, z]],
        Pauli::Y => [[z, -i], [i, z]],
        Pauli::Z => [[o, z], [z, -o]],
    }
}

/// Dense matrix with qubit 0 as the least significant bit of the row index.
fn dense(p: &PauliString) -> Vec<Vec<C>> {
    let n = p.n_qubits();
    let dim = 1 << n;
    (0..dim)
        .map(|r| {
            (0..dim)
                .map(|c| {
                    (0..n)
                        .map(|q| single_matrix(p.get(q))[(r >> q) & 1][(c >> q) & 1])
                        .product()
                })
                .collect()
        })
        .collect()
}

fn matmul(a: &[Vec<C>], b: &[Vec<C>]) -> Vec<Vec<C>> {
    let d = a.len();
    (0..d)
        .map(|r| (0..d).map(|c| (0..d).map(|k| a[r][k] * b[k][c]).sum()).collect())
        .collect()
}

proptest! {
    #[test]
    fn product_matches_dense_matrices((p, q) in pair(3)) {
        let (r, phase) = p.multiply(&q).unwrap();
        let (re, im) = phase.to_complex();
        let lhs = matmul(&dense(&p), &dense(&q));
        let rhs = dense(&r);
        for (a, b) in lhs.iter().flatten().zip(rhs.iter().flatten()) {
            prop_assert!((a - C::new(re, im) * b).norm() < 1e-12);
        }
    }

    #[test]
    fn squares_are_identity(p in pauli_string(130)) {
        let (r, phase) = p.multiply(&p).unwrap();
        prop_assert!(r.is_identity());
        prop_assert_eq!(phase.exponent(), 0);
    }

    #[test]
    fn commutation_matches_phase_symmetry((p, q) in pair(130)) {
        let (a, pa) = p.multiply(&q).unwrap();
        let (b, pb) = q.multiply(&p).unwrap();
        prop_assert_eq!(&a, &b);
        let commute = p.commutes(&q).unwrap();
        prop_assert_eq!(commute, pa == pb);
        if !commute {
            prop_assert_eq!((pa.exponent() + 2) % 4, pb.exponent());
        }
        prop_assert_eq!(commute, q.commutes(&p).unwrap());
    }

    #[test]
    fn weight_counts_support(p in pauli_string(200)) {
        let support = p.support();
        prop_assert_eq!(p.weight(), support.len());
        prop_assert!(support.iter().all(|&q| p.get(q) != Pauli::I));
    }

    #[test]
    fn text_forms_round_trip(p in pauli_string(90)) {
        let n = p.n_qubits();
        prop_assert_eq!(&PauliString::parse_with_qubits(&p.to_sparse_string(), n).unwrap(), &p);
        prop_assert_eq!(&PauliString::parse_with_qubits(&p.to_string(), n).unwrap(), &p);
    }

    #[test]
    fn local_index_round_trip(p in pauli_string(12), a in 0..12usize, b in 0..12usize, idx in 0..16usize) {
        let n = p.n_qubits();
        let (a, b) = (a % n, b % n);
        prop_assume!(a != b);
        let support = [a, b];
        let q = p.with_local(&support, idx);
        prop_assert_eq!(q.local_index(&support), idx);
        prop_assert_eq!(
            q.get(a).index() * 4 + q.get(b).index(),
            idx,
            "support[0] is the most significant digit"
        );
        prop_assert_eq!(&q.with_local(&support, p.local_index(&support)), &p);
    }

    #[test]
    fn truncation_splits_the_mass(
        terms in prop::collection::vec((prop::collection::vec(0..4usize, 8), -2.0f64..2.0), 1..40),
        k in 0..=8usize,
    ) {
        let mut s = PauliSumF64::new(8);
        for (d, c) in terms {
            let p = PauliString::from_paulis(&d.into_iter().map(Pauli::from_index).collect::<Vec<_>>());
            s.add_term(p, c).unwrap();
        }
        let kept = s.truncate_weight(k);
        let dropped = s.filter(|p, _| p.weight() > k);
        prop_assert!((kept.l2_mass() + dropped.l2_mass() - s.l2_mass()).abs() < 1e-12);
        prop_assert!(kept.max_weight() <= k);
        prop_assert!(s.sub(&kept).unwrap().sub(&dropped).unwrap().is_empty());
    }
}
