//! Structural properties of covers, products and Cayley graphs, checked
//! against the isomorphism engine.

use std::collections::BTreeSet;

use gridstab::abelian::{AbelianGroup, GroupElement};
use gridstab::aut::{are_isomorphic, automorphism_group, PermutationGroup};
use gridstab::cayley::{cayley_graph, ConnectionSet, GridKind, GridParams};
use gridstab::census::grid_jobs;
use gridstab::graph::Graph;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_graph(n: usize, seed: u64, density: f64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let edges: Vec<(usize, usize)> = (1..n)
        .flat_map(|j| (0..j).map(move |i| (i, j)))
        .filter(|_| rng.gen_bool(density))
        .collect();
    Graph::from_edges(n, edges).unwrap()
}

fn sweep_range() -> Vec<GridParams> {
    let mut out = Vec::new();
    for (kind, m, n, cap) in [(GridKind::Qd, 8, 12, 96), (GridKind::Tr, 6, 10, 60)] {
        for job in grid_jobs(kind, m, n, cap).unwrap() {
            if let gridstab::census::SweepJob::Grid(p) = job {
                out.push(p);
            }
        }
    }
    out
}

#[test]
fn grid_covers_are_bipartite_and_connected_exactly_when_expected() {
    for p in sweep_range() {
        let x = p.graph();
        let fx = x.structural_flags();
        let fb = x.double_cover().structural_flags();
        assert!(fb.bipartite, "{p}");
        assert_eq!(fb.connected, fx.connected && !fx.bipartite, "{p}");
    }
}

#[test]
fn cover_of_product_with_bipartite_factor() {
    let xs = [
        Graph::cycle(3).unwrap(),
        Graph::cycle(5).unwrap(),
        Graph::complete(4).unwrap(),
        Graph::moebius_ladder(6).unwrap(),
    ];
    let ys = [Graph::complete(2).unwrap(), Graph::cycle(4).unwrap(), Graph::path(3).unwrap()];
    for x in &xs {
        for y in &ys {
            let lhs = x.cartesian_product(y).double_cover();
            let rhs = x.double_cover().cartesian_product(y);
            assert!(are_isomorphic(&lhs, &rhs).unwrap());
        }
    }
    // fails without bipartiteness: B(C3 □ C3) is bipartite, B(C3) □ C3 has triangles
    let c3 = Graph::cycle(3).unwrap();
    assert!(!are_isomorphic(&c3.cartesian_product(&c3).double_cover(), &c3.double_cover().cartesian_product(&c3)).unwrap());
}

proptest! {
    #[test]
    fn cover_counts(n in 1usize..40, seed in any::<u64>(), d in 0.0f64..0.7) {
        let x = random_graph(n, seed, d);
        let b = x.double_cover();
        prop_assert_eq!(b.vertex_count(), 2 * n);
        prop_assert_eq!(b.edge_count(), 2 * x.edge_count());
        for v in 0..n {
            prop_assert_eq!(b.degree(v), x.degree(v));
            prop_assert_eq!(b.degree(v + n), x.degree(v));
        }
        prop_assert!(b.structural_flags().bipartite);
    }
}

/// A random symmetric connection set of `g`.
fn random_connection_set(g: &AbelianGroup, rng: &mut ChaCha8Rng, gens: usize) -> Option<ConnectionSet> {
    let n = g.order() as usize;
    let picks: Vec<GroupElement> = (0..gens).map(|_| g.element_at(rng.gen_range(1..n))).collect();
    ConnectionSet::symmetric(g.clone(), &picks).ok()
}

fn small_groups(max_order: u64) -> Vec<AbelianGroup> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for n in 2..=max_order {
        for moduli in [vec![n], vec![n, 2], vec![n, 3], vec![n, 2, 2], vec![n, n]] {
            let g = AbelianGroup::direct_product(&moduli).unwrap();
            if g.order() <= max_order && seen.insert(g.invariant_factors().to_vec()) {
                out.push(g);
            }
        }
    }
    out
}

#[test]
fn cayley_graphs_connect_exactly_when_s_generates() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for g in small_groups(100) {
        for k in 1..=3 {
            let Some(s) = random_connection_set(&g, &mut rng, k) else { continue };
            assert_eq!(
                cayley_graph(&s).structural_flags().connected,
                s.generates_group(),
                "{g} {s}"
            );
        }
    }
}

#[test]
fn cayley_graphs_are_vertex_transitive_and_twins_match_translations() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for g in small_groups(40) {
        for k in 1..=3 {
            let Some(s) = random_connection_set(&g, &mut rng, k) else { continue };
            let x = cayley_graph(&s);
            let aut = automorphism_group(&x).unwrap();
            assert_eq!(aut.order() % g.order(), 0u32.into(), "{g} {s}");
            assert_eq!(x.twin_pair().is_some(), s.has_translation_symmetry(), "{g} {s}");
        }
    }
    // S = {±1, ±2, ±3} in Z_8 is a union of cosets of <4>
    let z8 = AbelianGroup::cyclic(8).unwrap();
    let e = |x| z8.element(&[x]).unwrap();
    let s = ConnectionSet::symmetric(z8.clone(), &[e(1), e(2), e(3)]).unwrap();
    assert!(s.has_translation_symmetry());
    assert!(cayley_graph(&s).twin_pair().is_some());
}

/// `s + t = u + v ≠ 0` forces `{s, t} = {u, v}` on `S`.
fn has_unique_sums(g: &AbelianGroup, s: &[GroupElement]) -> bool {
    let mut sums = std::collections::HashMap::new();
    for (i, x) in s.iter().enumerate() {
        for y in &s[i..] {
            let sum = g.add(x, y);
            if g.is_zero(&sum) {
                continue;
            }
            let pair = (x.clone(), y.clone());
            if let Some(prev) = sums.insert(sum, pair.clone()) {
                if prev != pair {
                    return false;
                }
            }
        }
    }
    true
}

fn is_group_automorphism(g: &AbelianGroup, images: &[usize]) -> bool {
    let elements = g.elements();
    elements.iter().all(|x| {
        elements.iter().all(|y| {
            let lhs = images[g.index_of(&g.add(x, y))];
            let rhs = g.index_of(&g.add(&elements[images[g.index_of(x)]], &elements[images[g.index_of(y)]]));
            lhs == rhs
        })
    })
}

#[test]
fn vertex_stabilizers_of_unique_sum_cayley_graphs_are_group_automorphisms() {
    let mut checked = 0;
    for g in small_groups(24) {
        let elements = g.elements();
        let mut seen = BTreeSet::new();
        for (i, a) in elements.iter().enumerate().skip(1) {
            for b in &elements[i..] {
                for c in [None, Some(g.add(a, b))] {
                    let mut gens = vec![a.clone(), b.clone()];
                    gens.extend(c);
                    let Ok(s) = ConnectionSet::symmetric(g.clone(), &gens) else { continue };
                    if !s.generates_group() || !seen.insert(s.elements().to_vec()) {
                        continue;
                    }
                    if !has_unique_sums(&g, s.elements()) {
                        continue;
                    }
                    let x = cayley_graph(&s);
                    let aut = automorphism_group(&x).unwrap();
                    let zero = g.index_of(&g.zero());
                    let rebased = PermutationGroup::new(x.vertex_count(), aut.generators().to_vec(), &[zero]);
                    assert_eq!(rebased.base()[0], zero);
                    for p in rebased.strong_generators().iter().skip(1).flatten() {
                        assert_eq!(p.apply(zero), zero);
                        assert!(is_group_automorphism(&g, &p.images()), "{g} {s}");
                    }
                    checked += 1;
                }
            }
        }
    }
    assert!(checked > 100, "only {checked} connection sets checked");
}
