use proptest::prelude::*;
use qmw_core::graph::{FeynmanGraph, InternalEdge};
use qmw_core::quadric::{verify_conditions, QuadricNet};
use qmw_core::rational::rat;

/// A connected multigraph without self-loops: a random tree plus extra edges.
fn connected_graph() -> impl Strategy<Value = (usize, Vec<(usize, usize)>)> {
    (2usize..=6).prop_flat_map(|v| {
        let parents: Vec<_> = (1..v).map(|i| 0..i).collect();
        let extra = prop::collection::vec((0..v, 0..v), 0..5);
        (Just(v), parents, extra).prop_map(|(v, parents, extra)| {
            let mut edges: Vec<(usize, usize)> = parents
                .into_iter()
                .enumerate()
                .map(|(i, p)| (p, i + 1))
                .collect();
            edges.extend(extra.into_iter().filter(|(a, b)| a != b));
            (v, edges)
        })
    })
}

fn build(v: usize, edges: &[(usize, usize)], dimension: usize) -> FeynmanGraph {
    let vertices: Vec<String> = (0..v).map(|i| format!("v{i}")).collect();
    let internal = edges
        .iter()
        .enumerate()
        .map(|(i, &(a, b))| InternalEdge {
            id: format!("e{}", i + 1),
            source: vertices[a].clone(),
            target: vertices[b].clone(),
            mass: rat(1 + (i as i64 % 4)),
        })
        .collect();
    FeynmanGraph::new("random", dimension, vertices, internal, Vec::new()).unwrap()
}

/// Matrix-tree theorem: any cofactor of the Laplacian, by floating elimination.
#[allow(clippy::needless_range_loop)]
fn kirchhoff(v: usize, edges: &[(usize, usize)]) -> u64 {
    let n = v - 1;
    let mut l = vec![vec![0.0f64; n]; n];
    for &(a, b) in edges {
        for (x, y) in [(a, b), (b, a)] {
            if x < n {
                l[x][x] += 1.0;
                if y < n {
                    l[x][y] -= 1.0;
                }
            }
        }
    }
    let mut det = 1.0;
    for c in 0..n {
        let p = (c..n)
            .max_by(|&i, &j| l[i][c].abs().total_cmp(&l[j][c].abs()))
            .unwrap();
        if l[p][c].abs() < 1e-12 {
            return 0;
        }
        if p != c {
            l.swap(p, c);
            det = -det;
        }
        det *= l[c][c];
        for r in c + 1..n {
            let f = l[r][c] / l[c][c];
            for k in c..n {
                l[r][k] -= f * l[c][k];
            }
        }
    }
    det.round() as u64
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn counts_and_trees((v, edges) in connected_graph()) {
        let g = build(v, &edges, 2);
        let loops = edges.len() + 1 - v;
        prop_assert_eq!(g.loop_number(), loops);
        let tree = g.first_tree();
        prop_assert_eq!(tree.edge_ids(&g).len(), v - 1);
        prop_assert_eq!(tree.complement_ids(&g).len(), loops);
        prop_assert!(g.is_spanning_tree(&tree));

        let trees: Vec<_> = g.spanning_trees().collect();
        prop_assert_eq!(trees.len() as u64, kirchhoff(v, &edges));
        prop_assert!(trees.iter().all(|t| g.is_spanning_tree(t)));
        prop_assert_eq!(&trees[0], &tree);
    }

    #[test]
    fn momentum_relations_conserve((v, edges) in connected_graph()) {
        let g = build(v, &edges, 2);
        let tree = g.first_tree();
        let rel = g.momentum_relations(&tree).unwrap();
        prop_assert_eq!(rel.loop_count(), g.loop_number());
        prop_assert_eq!(rel.rank, v - 1);
        let inc = g.incidence_matrix();
        for j in 0..rel.loop_count() {
            for vertex in 0..v {
                let flow: i64 = (0..edges.len())
                    .map(|e| i64::from(inc.column(e)[vertex]) * rel.coefficients[e][j])
                    .sum();
                prop_assert_eq!(flow, 0, "vertex {} loop {}", vertex, j);
            }
        }
        for (j, &e) in rel.loop_edges.iter().enumerate() {
            let unit: Vec<i64> = (0..rel.loop_count()).map(|k| i64::from(k == j)).collect();
            prop_assert_eq!(&rel.coefficients[e], &unit);
        }
    }

    #[test]
    fn restricted_net_shape((v, edges) in connected_graph(), d in 1usize..=3) {
        let g = build(v, &edges, d);
        let loops = g.loop_number();
        let net = QuadricNet::from_graph(&g, &g.first_tree());
        if loops == 0 {
            prop_assert!(net.is_err());
            return Ok(());
        }
        let net = net.unwrap();
        prop_assert_eq!(net.ambient_dimension(), loops * d);
        prop_assert_eq!(net.form_count(), edges.len());
        let report = verify_conditions(&net);
        prop_assert!(report.real);
        for f in &net.forms {
            prop_assert!(f.form.matrix().is_symmetric());
        }
        prop_assert_eq!(QuadricNet::from_dump(&net.to_dump()).unwrap(), net);
    }
}

#[test]
fn canonical_json_is_stable() {
    let g = FeynmanGraph::sunset([rat(1), rat(2), rat(3)], 2).unwrap();
    let text = g.to_canonical_json();
    assert_eq!(
        FeynmanGraph::parse(&text).unwrap().to_canonical_json(),
        text
    );
}
