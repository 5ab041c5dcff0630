use latmax_core::lattice::{ideal_to_lattice_point, lattice_point_to_ideal, mask_of};
use latmax_core::{enumerate_ideals, linear_extension, meet_join, LatticePoint, Poset, TieBreak};
use proptest::prelude::*;

fn point(n: usize, bound: u32) -> impl Strategy<Value = LatticePoint> {
    prop::collection::vec(0..=bound, n).prop_map(move |c| LatticePoint::new(c, bound).unwrap())
}

fn two_points() -> impl Strategy<Value = (LatticePoint, LatticePoint)> {
    (1usize..5, 1u32..4).prop_flat_map(|(n, c)| (point(n, c), point(n, c)))
}

proptest! {
    #[test]
    fn meet_join_are_coordinatewise_min_max((x, y) in two_points()) {
        let (m, j) = meet_join(&x, &y).unwrap();
        for i in 0..x.dim() {
            prop_assert_eq!(m.get(i), x.get(i).min(y.get(i)));
            prop_assert_eq!(j.get(i), x.get(i).max(y.get(i)));
        }
        prop_assert!(m.le(&x) && m.le(&y) && x.le(&j) && y.le(&j));
        // absorption
        prop_assert_eq!(meet_join(&x, &j).unwrap().0, x.clone());
        prop_assert_eq!(meet_join(&x, &m).unwrap().1, x.clone());
        prop_assert_eq!(m.sum() + j.sum(), x.sum() + y.sum());
    }

    #[test]
    fn index_round_trips((x, _) in two_points()) {
        let back = LatticePoint::from_index(x.index(), x.dim(), x.bound());
        prop_assert_eq!(back, x);
    }

    #[test]
    fn ideals_are_exactly_the_down_closed_sets(size in 1usize..9, p in 0.0f64..0.6, seed in 0u64..1000) {
        let poset = Poset::random(size, p, seed).unwrap();
        let ideals = enumerate_ideals(&poset, 1 << 20).unwrap();
        let brute = (0u64..1 << size)
            .filter(|&s| (0..size).all(|e| s >> e & 1 == 0 || (0..size).all(|d| !poset.leq(d, e) || s >> d & 1 == 1)))
            .count();
        prop_assert_eq!(ideals.len(), brute);
        for a in ideals.iter().take(12) {
            for b in ideals.iter().take(12) {
                let (m, j) = meet_join(a, b).unwrap();
                prop_assert_eq!(m.mask(), a.mask() & b.mask());
                prop_assert_eq!(j.mask(), a.mask() | b.mask());
                prop_assert!(poset.is_ideal(m.mask()) && poset.is_ideal(j.mask()));
            }
        }
    }

    #[test]
    fn linear_extension_prefixes_are_ideals(size in 1usize..12, p in 0.0f64..0.6, seed in 0u64..1000, tb in 0u64..50) {
        let poset = Poset::random(size, p, seed).unwrap();
        for tie in [TieBreak::Id, TieBreak::Seeded(tb)] {
            let ext = linear_extension(&poset, tie);
            prop_assert!(ext.is_valid_for(&poset));
            let mut sorted = ext.order().to_vec();
            sorted.sort_unstable();
            prop_assert_eq!(sorted, (0..size).collect::<Vec<_>>());
            for k in 0..=size {
                prop_assert!(poset.is_ideal(mask_of(ext.order()[..k].iter().copied())));
            }
        }
    }

    #[test]
    fn chain_encoding_is_an_order_isomorphism((x, y) in two_points()) {
        let (n, c) = (x.dim(), x.bound());
        let poset = Poset::disjoint_chains(n, c as usize).unwrap();
        let ix = lattice_point_to_ideal(&x).unwrap();
        let iy = lattice_point_to_ideal(&y).unwrap();
        prop_assert!(poset.is_ideal(ix.mask()));
        prop_assert_eq!(ix.len() as u64, x.sum());
        prop_assert_eq!(x.le(&y), ix.is_subset(&iy));
        prop_assert_eq!(ideal_to_lattice_point(&poset, &ix, n, c).unwrap(), x.clone());
        let (m, j) = meet_join(&x, &y).unwrap();
        let (im, ij) = meet_join(&ix, &iy).unwrap();
        prop_assert_eq!(lattice_point_to_ideal(&m).unwrap(), im);
        prop_assert_eq!(lattice_point_to_ideal(&j).unwrap(), ij);
    }
}

#[test]
fn chain_ideal_count_matches_lattice_size() {
    for (n, c) in [(1, 1), (2, 2), (3, 2), (2, 4)] {
        let poset = Poset::disjoint_chains(n, c).unwrap();
        assert_eq!(enumerate_ideals(&poset, 1 << 20).unwrap().len(), (c + 1).pow(n as u32));
    }
}
