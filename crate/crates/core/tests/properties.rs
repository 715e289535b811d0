use ortho_core::drawing::{Drawing, DrawnEdge};
use ortho_core::geom::{BoxShape, Point, Side};
use ortho_core::metrics::{count_crossings, count_crossings_naive};
use ortho_core::ordering::{implied_crossings, join_collinear, order_paths};
use ortho_core::routing::{self, reduce_crossings, route_edge, EdgePath};
use ortho_core::routing_graph::RoutingGraph;
use proptest::prelude::*;

fn full_grid(cols: usize, rows: usize) -> RoutingGraph {
    let points: Vec<Point> = (0..rows).flat_map(|r| (0..cols).map(move |c| Point::new(c as f64, r as f64))).collect();
    let mut adj = vec![[None; 4]; points.len()];
    for r in 0..rows {
        for c in 0..cols {
            let v = r * cols + c;
            if c + 1 < cols {
                adj[v][Side::E.index()] = Some(v + 1);
                adj[v + 1][Side::W.index()] = Some(v);
            }
            if r + 1 < rows {
                adj[v][Side::N.index()] = Some(v + cols);
                adj[v + cols][Side::S.index()] = Some(v);
            }
        }
    }
    RoutingGraph { points, adj, port_vertices: Vec::new() }
}

fn without(mut h: RoutingGraph, cut: &[bool]) -> RoutingGraph {
    let mut k = 0;
    for v in 0..h.points.len() {
        for d in [Side::E, Side::N] {
            if let Some(w) = h.adj[v][d.index()] {
                if cut[k % cut.len()] {
                    h.adj[v][d.index()] = None;
                    h.adj[w][d.opposite().index()] = None;
                }
                k += 1;
            }
        }
    }
    h
}

fn bfs_distance(h: &RoutingGraph, s: usize, t: usize) -> Option<usize> {
    let mut dist = vec![usize::MAX; h.points.len()];
    dist[s] = 0;
    let mut queue = std::collections::VecDeque::from([s]);
    while let Some(v) = queue.pop_front() {
        for w in h.adj[v].iter().flatten() {
            if dist[*w] == usize::MAX {
                dist[*w] = dist[v] + 1;
                queue.push_back(*w);
            }
        }
    }
    (dist[t] != usize::MAX).then_some(dist[t])
}

/// Ten routes between distinct grid vertices of a 6x6 unit grid.
fn routed_instance(ends: &[usize]) -> (RoutingGraph, Vec<EdgePath>) {
    let h = full_grid(6, 6);
    let paths = ends.chunks(2).enumerate().map(|(i, e)| route_edge(&h, e[0], e[1], i, i as u32).unwrap()).collect();
    (h, paths)
}

fn distinct_ends() -> impl Strategy<Value = Vec<usize>> {
    Just((0..36).collect::<Vec<usize>>()).prop_shuffle().prop_map(|v| v[..20].to_vec())
}

fn polyline() -> impl Strategy<Value = Vec<Point>> {
    (0i32..8, 0i32..8, proptest::collection::vec(1i32..6, 1..6), any::<bool>(), any::<u32>()).prop_map(|(x, y, steps, first_h, signs)| {
        let mut p = Point::new(x as f64, y as f64);
        let mut out = vec![p];
        for (k, s) in steps.iter().enumerate() {
            let d = if (signs >> k) & 1 == 1 { *s } else { -*s } as f64;
            p = if (k % 2 == 0) == first_h { Point::new(p.x + d, p.y) } else { Point::new(p.x, p.y + d) };
            out.push(p);
        }
        out
    })
}

proptest! {
    #[test]
    fn route_length_is_the_shortest_distance(cut in proptest::collection::vec(prop::bool::weighted(0.3), 1..60), s in 0usize..36, t in 0usize..36) {
        let h = without(full_grid(6, 6), &cut);
        match (bfs_distance(&h, s, t), route_edge(&h, s, t, 0, 7)) {
            (Some(d), Ok(p)) => prop_assert!((p.length(&h) - d as f64).abs() < 1e-9),
            (None, Err(_)) => {}
            (d, r) => prop_assert!(false, "distance {:?} but route {:?}", d, r),
        }
    }

    #[test]
    fn reduced_routes_cross_at_most_once(ends in distinct_ends()) {
        let (h, mut paths) = routed_instance(&ends);
        reduce_crossings(&h, &mut paths, 10_000);
        for a in 0..paths.len() {
            for b in a + 1..paths.len() {
                prop_assert!(routing::count_crossings(&h, &paths[a].vertices, &paths[b].vertices) <= 1);
            }
        }
    }

    #[test]
    fn bundle_order_adds_at_most_one_crossing_per_pair(ends in distinct_ends()) {
        let (h, mut paths) = routed_instance(&ends);
        reduce_crossings(&h, &mut paths, 10_000);
        let order = order_paths(&h, &paths).unwrap();
        for a in 0..paths.len() {
            for b in a + 1..paths.len() {
                prop_assert!(implied_crossings(&h, &paths, &order, a, b) <= 1);
            }
        }
    }

    #[test]
    fn joined_polylines_alternate(points in polyline()) {
        let j = join_collinear(&points);
        prop_assert_eq!(j.first(), points.first());
        prop_assert_eq!(j.last(), points.last());
        let horizontal: Vec<bool> = j.windows(2).map(|w| w[0].y == w[1].y).collect();
        prop_assert!(horizontal.windows(2).all(|w| w[0] != w[1]));
        prop_assert!(j.windows(2).all(|w| w[0] != w[1]));
    }

    #[test]
    fn sweep_crossing_count_matches_naive(lines in proptest::collection::vec(polyline(), 1..8)) {
        let far = BoxShape::new(Point::new(1000.0, 1000.0), 2.0, 2.0).unwrap();
        let d = Drawing {
            boxes: vec![far],
            edges: lines
                .into_iter()
                .enumerate()
                .map(|(i, points)| DrawnEdge { id: i as u32, source: 0, target: 0, points })
                .collect(),
        };
        prop_assert_eq!(count_crossings(&d), count_crossings_naive(&d));
    }
}
