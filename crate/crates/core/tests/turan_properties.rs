//! Extremal edge-count thresholds against exhaustive and randomized graph
//! searches, cross-validated by a brute-force clique oracle that is
//! independent of the branch-and-bound search.

use num_traits::ToPrimitive;
use rand::seq::SliceRandom;
use rand::Rng;
use relumax_core::bounds::turan_max_edges;
use relumax_core::graph::{find_clique, WeightGraph};
use relumax_core::rational::rint;
use relumax_core::sampling::rng_from_seed;

/// All vertex pairs of the complete graph on `d` vertices, 1-based.
fn all_edges(d: usize) -> Vec<(usize, usize)> {
    let mut edges = Vec::new();
    for u in 1..=d {
        for v in (u + 1)..=d {
            edges.push((u, v));
        }
    }
    edges
}

fn graph_from_edges(d: usize, edges: &[(usize, usize)]) -> WeightGraph {
    WeightGraph::from_edges(d, edges).expect("valid edge list")
}

/// Independent oracle: subset enumeration for a clique of size `r`.
fn brute_force_has_clique(d: usize, edges: &[(usize, usize)], r: usize) -> bool {
    let has = |u: usize, v: usize| {
        let e = if u < v { (u, v) } else { (v, u) };
        edges.contains(&e)
    };
    fn rec(
        start: usize,
        d: usize,
        r: usize,
        chosen: &mut Vec<usize>,
        has: &dyn Fn(usize, usize) -> bool,
    ) -> bool {
        if chosen.len() == r {
            return true;
        }
        for v in start..=d {
            if chosen.iter().all(|&u| has(u, v)) {
                chosen.push(v);
                if rec(v + 1, d, r, chosen, has) {
                    return true;
                }
                chosen.pop();
            }
        }
        false
    }
    rec(1, d, r, &mut Vec::new(), &has)
}

/// Bitmasks of the three edges of every vertex triple, for fast triangle
/// detection on edge-subset masks.
fn triangle_masks(d: usize) -> Vec<u32> {
    let edges = all_edges(d);
    let index = |u: usize, v: usize| {
        let e = if u < v { (u, v) } else { (v, u) };
        edges.iter().position(|&x| x == e).unwrap()
    };
    let mut masks = Vec::new();
    for a in 1..=d {
        for b in (a + 1)..=d {
            for c in (b + 1)..=d {
                masks.push(1 << index(a, b) | 1 << index(b, c) | 1 << index(a, c));
            }
        }
    }
    masks
}

#[test]
fn no_triangle_free_graph_beats_the_threshold_exhaustively() {
    // every graph on up to 7 vertices: any graph with more edges than the
    // threshold must contain a triangle
    for d in 2..=7usize {
        let edge_count = all_edges(d).len();
        let threshold = turan_max_edges(d as u64, 3).unwrap();
        let triangles = triangle_masks(d);
        for mask in 0u32..(1u32 << edge_count) {
            if rint(mask.count_ones() as i64) <= threshold {
                continue;
            }
            let has_triangle = triangles.iter().any(|t| mask & t == *t);
            assert!(
                has_triangle,
                "triangle-free graph on {d} vertices with {} edges beats {threshold}",
                mask.count_ones()
            );
        }
    }
}

#[test]
fn no_triangle_free_graph_beats_the_threshold_randomized() {
    let mut rng = rng_from_seed(17);
    for d in [8usize, 9] {
        let edges = all_edges(d);
        let threshold = turan_max_edges(d as u64, 3).unwrap();
        for _ in 0..4000 {
            let m = rng.gen_range(0..=edges.len());
            let mut pool = edges.clone();
            pool.shuffle(&mut rng);
            let chosen = &pool[..m];
            if !brute_force_has_clique(d, chosen, 3) {
                assert!(rint(m as i64) <= threshold);
            }
        }
    }
}

#[test]
fn dense_graphs_always_contain_the_guaranteed_clique() {
    let mut rng = rng_from_seed(23);
    let mut tested = 0;
    while tested < 60 {
        let r = if tested % 2 == 0 { 3u32 } else { 4 };
        let d = rng.gen_range(if r == 3 { 3..=12usize } else { 5..=12 });
        let threshold = turan_max_edges(d as u64, r).unwrap();
        let min_edges = threshold.floor().to_integer().to_usize().unwrap() + 1;
        let all = all_edges(d);
        if min_edges > all.len() {
            continue;
        }
        let m = rng.gen_range(min_edges..=all.len());
        let mut pool = all.clone();
        pool.shuffle(&mut rng);
        let chosen: Vec<(usize, usize)> = pool[..m].to_vec();
        assert!(rint(m as i64) > threshold);

        let graph = graph_from_edges(d, &chosen);
        let found = find_clique(&graph, r as usize);
        assert!(
            found.is_some(),
            "graph on {d} vertices with {m} edges above {threshold} lacks a K{r}"
        );
        let clique = found.unwrap();
        assert_eq!(clique.len(), r as usize);
        for (i, &u) in clique.iter().enumerate() {
            for &v in &clique[i + 1..] {
                assert!(graph.has_edge(u, v));
            }
        }
        assert!(brute_force_has_clique(d, &chosen, r as usize));
        tested += 1;
    }
}

#[test]
fn clique_search_agrees_with_brute_force_on_sparse_graphs() {
    let mut rng = rng_from_seed(31);
    for _ in 0..120 {
        let d = rng.gen_range(2..=9usize);
        let all = all_edges(d);
        let m = rng.gen_range(0..=all.len());
        let mut pool = all.clone();
        pool.shuffle(&mut rng);
        let chosen: Vec<(usize, usize)> = pool[..m].to_vec();
        let graph = graph_from_edges(d, &chosen);
        for r in 2..=5usize.min(d) {
            assert_eq!(
                find_clique(&graph, r).is_some(),
                brute_force_has_clique(d, &chosen, r),
                "d={d} m={m} r={r}"
            );
        }
    }
}
