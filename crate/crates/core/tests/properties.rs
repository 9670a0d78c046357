use proptest::prelude::*;
use sumsets::cover::minimum_line_cover;
use sumsets::verify::proper_subsets_fail;
use sumsets::*;

fn space(q: u64, n: usize) -> Space {
    Space::new(make_field(q).unwrap(), n)
}

/// A subset of `F_q^n` from a bitmask over the canonical enumeration.
fn subset(sp: Space, mask: u64) -> PointSet {
    let size = sp.size().unwrap();
    PointSet::from_points(
        sp,
        (0..size)
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| sp.point_at(i)),
    )
    .unwrap()
}

fn small_space() -> impl Strategy<Value = Space> {
    prop::sample::select(vec![(2u64, 1usize), (2, 2), (2, 3), (3, 1), (3, 2), (5, 1)])
        .prop_map(|(q, n)| space(q, n))
}

fn pair_in(sp: Space) -> impl Strategy<Value = (Space, PointSet, PointSet)> {
    let size = sp.size().unwrap();
    let full = if size >= 64 {
        u64::MAX
    } else {
        (1u64 << size) - 1
    };
    (0..=full, 0..=full).prop_map(move |(a, b)| (sp, subset(sp, a), subset(sp, b)))
}

fn instance() -> impl Strategy<Value = (Space, PointSet, PointSet)> {
    small_space().prop_flat_map(pair_in)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn sumset_commutative_and_monotone((sp, s, t) in instance(), extra in 0u64..512) {
        prop_assert_eq!(sumset(&s, &t).unwrap(), sumset(&t, &s).unwrap());
        let bigger = s.union(&subset(sp, extra & ((1 << sp.size().unwrap()) - 1))).unwrap();
        let small = sumset(&s, &t).unwrap();
        let large = sumset(&bigger, &t).unwrap();
        prop_assert!(small.is_subset(&large));
        prop_assert_eq!(small.is_empty(), s.is_empty() || t.is_empty());
    }

    #[test]
    fn complement_sizes((sp, s, _t) in instance()) {
        let c = complement(&s, 1 << 20).unwrap();
        prop_assert_eq!(c.len() + s.len(), sp.size().unwrap() as usize);
        prop_assert!(c.iter().all(|p| !s.contains(p)));
    }

    #[test]
    fn vector_group_laws(q in prop::sample::select(vec![2u64, 3, 5, 7]), coords in prop::collection::vec((0u32..7, 0u32..7, 0u32..7), 1..5)) {
        let sp = space(q, coords.len());
        let q32 = q as u32;
        let u = sp.vector(coords.iter().map(|c| c.0 % q32).collect()).unwrap();
        let v = sp.vector(coords.iter().map(|c| c.1 % q32).collect()).unwrap();
        let w = sp.vector(coords.iter().map(|c| c.2 % q32).collect()).unwrap();
        prop_assert_eq!(sp.add(&u, &v).unwrap(), sp.add(&v, &u).unwrap());
        prop_assert_eq!(
            sp.add(&sp.add(&u, &v).unwrap(), &w).unwrap(),
            sp.add(&u, &sp.add(&v, &w).unwrap()).unwrap()
        );
        prop_assert_eq!(sp.add(&u, &sp.scale(q32 - 1, &u)).unwrap(), sp.zero());
    }

    #[test]
    fn vanishing_space_properties((sp, s, t) in instance(), d in 0usize..7) {
        let v = build_vanishing_space(&s, &t, d, 1 << 20).unwrap();
        prop_assert!(v.dim() as i64 >= v.dim_lower_bound());
        for p in v.basis() {
            prop_assert!(p.degree().unwrap_or(0) <= d);
            for x in v.complement() {
                prop_assert_eq!(eval_poly(p, x).unwrap(), 0);
            }
        }
        // row-reduced: each basis element owns a monomial no other element uses
        let coeffs: Vec<Vec<u32>> = (0..v.dim()).map(|i| v.coefficients(i)).collect();
        let m = Matrix::from_rows(sp.field(), &coeffs);
        prop_assert_eq!(m.rank(), v.dim());
    }

    #[test]
    fn sum_matrices_certified((_sp, s, t) in instance(), d in 0usize..7) {
        let v = build_vanishing_space(&s, &t, d, 1 << 20).unwrap();
        let rows = s.to_vec();
        let cols = t.to_vec();
        let half_bound = count_m(s.space().q(), s.space().n(), d / 2) * 2u32;
        for p in v.basis() {
            let m = sum_matrix(p, &rows, &cols).unwrap();
            prop_assert!(m.constant_on_equal_sums());
            // the sum-matrix map is injective on V
            prop_assert!(rows.is_empty() || cols.is_empty() || !m.entries().is_zero());
            let cert = clp_decompose(p, d).unwrap();
            prop_assert_eq!(&cert.reconstruct(s.space().field(), &rows, &cols), m.entries());
            prop_assert!(matrix_rank(m.entries()) <= cert.term_count());
            prop_assert!(num_bigint::BigUint::from(cert.term_count()) <= half_bound);
        }
    }

    #[test]
    fn pivot_basis_preserves_span((_sp, s, t) in instance(), d in 0usize..7) {
        prop_assume!(!s.is_empty() && !t.is_empty());
        let v = build_vanishing_space(&s, &t, d, 1 << 20).unwrap();
        let rows = s.to_vec();
        let cols = t.to_vec();
        let field = s.space().field();
        let mats: Vec<Matrix> = v.basis().iter().map(|p| sum_matrix(p, &rows, &cols).unwrap().into_entries()).collect();
        let flat = |ms: &[Matrix]| Matrix::from_rows(field, &ms.iter().map(|m| m.as_slice().to_vec()).collect::<Vec<_>>());
        let basis = pivot_basis(mats.clone()).unwrap();
        let before = flat(&mats);
        let after = flat(&basis.matrices);
        let mut both = mats.clone();
        both.extend(basis.matrices.iter().cloned());
        let stacked = flat(&both);
        if !mats.is_empty() {
            prop_assert_eq!(before.rank(), mats.len());
            prop_assert_eq!(after.rank(), mats.len());
            prop_assert_eq!(stacked.rank(), mats.len());
        }
        for (m, &p) in basis.matrices.iter().zip(&basis.pivots) {
            prop_assert_eq!(first_nonzero_position(m).unwrap(), p);
        }
        let distinct: std::collections::BTreeSet<_> = basis.pivots.iter().collect();
        prop_assert_eq!(distinct.len(), basis.pivots.len());
    }

    #[test]
    fn decompose_invariants((sp, s, t) in instance()) {
        let dec = decompose(&s, &t, None, &Limits::default()).unwrap();
        let c = &dec.certificate;
        prop_assert!(verify_decomposition(&s, &t, &dec.s_prime, &dec.t_prime).unwrap());
        prop_assert!(dec.s_prime.is_subset(&s) && dec.t_prime.is_subset(&t));
        prop_assert!(dec.total() as u64 <= dec.bound);
        prop_assert!(c.dim_v as i64 >= c.dim_v_lower_bound);
        prop_assert!(c.uncovered.len() as u64 <= c.q_pow_n - c.m_d);
        prop_assert!(c.cover_size <= c.rank_bound);
        prop_assert_eq!(c.cover_size, c.matching_size);
        prop_assert!(c.pivot_sums_covered >= c.dim_v);
        let sums: std::collections::BTreeSet<_> = c.pivots.iter().map(|(a, b)| sp.add(a, b).unwrap()).collect();
        prop_assert_eq!(sums.len(), c.dim_v);
        let (_, best) = choose_degree(sp.q(), sp.n());
        prop_assert_eq!(num_bigint::BigUint::from(dec.bound), best.clone());
        prop_assert!(best <= capset_bound_m(sp.q(), sp.n()));
        prop_assert_eq!(&dec, &decompose(&s, &t, None, &Limits::default()).unwrap());
    }

    #[test]
    fn baselines_ordered((_sp, s, t) in small_space().prop_flat_map(pair_in)) {
        prop_assume!(s.len() + t.len() <= 12);
        let best = oracle_min_decomposition(&s, &t, &Limits::default()).unwrap();
        let (gs, gt) = greedy_decomposition(&s, &t).unwrap();
        let dec = decompose(&s, &t, None, &Limits::default()).unwrap();
        prop_assert!(verify_decomposition(&s, &t, &best.best_s_prime, &best.best_t_prime).unwrap());
        prop_assert!(verify_decomposition(&s, &t, &gs, &gt).unwrap());
        prop_assert_eq!(best.best_total, best.best_s_prime.len() + best.best_t_prime.len());
        prop_assert!(best.best_total <= gs.len() + gt.len());
        prop_assert!(best.best_total <= dec.total());
        prop_assert!(dec.total() as u64 <= dec.bound);
    }

    #[test]
    fn line_cover_respects_valid_bounds(points in prop::collection::vec((0usize..8, 0usize..8), 0..24)) {
        let min = minimum_line_cover(&points).size();
        prop_assert!(line_cover(&points, min).is_ok());
        if min > 0 {
            prop_assert!(line_cover(&points, min - 1).is_err());
        }
    }

    #[test]
    fn sumfree_verdict_ignores_joint_permutation(
        pairs in prop::collection::btree_map(0u32..9, 0u32..9, 1..6),
        seed in any::<u64>(),
    ) {
        let sp = space(3, 2);
        let pt = |i: u32| sp.point_at(i as u64);
        let s_ord: Vec<_> = pairs.keys().map(|&i| pt(i)).collect();
        let mut t_idx: Vec<u32> = pairs.values().copied().collect();
        t_idx.sort_unstable();
        t_idx.dedup();
        prop_assume!(t_idx.len() == s_ord.len());
        let t_ord: Vec<_> = pairs.values().map(|&i| pt(i)).collect();
        let fam = OrderedPairFamily::new(sp, s_ord.clone(), t_ord.clone()).unwrap();

        let mut perm: Vec<usize> = (0..s_ord.len()).collect();
        let len = perm.len();
        perm.rotate_left((seed as usize) % len);
        let fam2 = OrderedPairFamily::new(
            sp,
            perm.iter().map(|&i| s_ord[i].clone()).collect(),
            perm.iter().map(|&i| t_ord[i].clone()).collect(),
        ).unwrap();
        prop_assert_eq!(is_matching_sumfree(&fam), is_matching_sumfree(&fam2));
    }
}

#[test]
fn ap_free_sets_need_every_element() {
    // every AP-free subset of F_3^2 with at most 12 points
    let sp = space(3, 2);
    let mut checked = 0;
    for mask in 0u64..(1 << 9) {
        let s = subset(sp, mask);
        if s.is_empty() || !is_ap_free(&s) {
            continue;
        }
        assert!(proper_subsets_fail(&s).unwrap(), "{s:?}");
        checked += 1;
    }
    assert!(checked > 100);
}

#[test]
fn binary_plane_pivots_match_dimension() {
    let sp = space(2, 2);
    let all = PointSet::full(sp, 4).unwrap();
    let v = build_vanishing_space(&all, &all, 1, 4).unwrap();
    let rows = all.to_vec();
    let mats = v
        .basis()
        .iter()
        .map(|p| sum_matrix(p, &rows, &rows).unwrap().into_entries())
        .collect();
    let basis = pivot_basis(mats).unwrap();
    assert_eq!(basis.pivots.len(), v.dim());
    assert_eq!(v.dim(), 3);
    let sums: std::collections::BTreeSet<_> = basis
        .pivots
        .iter()
        .map(|&(i, j)| sp.add(&rows[i], &rows[j]).unwrap())
        .collect();
    assert_eq!(sums.len(), basis.pivots.len());
}
