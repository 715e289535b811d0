use ortho::instance::{emit_instance, parse_instance, Instance, InstanceConfig, Mode, NudgeKind};
use ortho_core::geom::{BoxShape, Point};
use ortho_core::graph::{Multigraph, Vertex};
use proptest::prelude::*;

/// Instances in all three flavors: bare graph, placed boxes, placed boxes
/// with routes. A document without edges carries no routes.
fn instance(flavor: u8, n: usize, pairs: Vec<(usize, usize)>, seed: u64) -> Instance {
    let placed = flavor >= 1;
    let vertices = (0..n)
        .map(|i| {
            let center = Point::new(100.0 * i as f64 + (seed % 7) as f64 * 0.25, -((seed % 5) as f64));
            Vertex {
                id: (3 * i + 1) as u32,
                label: (i % 2 == 0).then(|| format!("v{i}")),
                shape: placed.then(|| BoxShape::new(center, 20.0 + i as f64, 10.5).unwrap()),
                position: placed.then_some(center),
            }
        })
        .collect();
    let edges = pairs.iter().enumerate().map(|(k, &(a, b))| (k as u32 * 2, (3 * (a % n) + 1) as u32, (3 * (b % n) + 1) as u32));
    let graph = Multigraph::new(vertices, edges).unwrap();
    let paths = (flavor == 2 && graph.m() > 0).then(|| {
        graph
            .edges()
            .iter()
            .map(|e| {
                let (a, b) = (graph.vertices()[e.source].position.unwrap(), graph.vertices()[e.target].position.unwrap());
                vec![Point::new(a.x, a.y + 5.25), Point::new(a.x, a.y + 30.0), Point::new(b.x, a.y + 30.0), Point::new(b.x, b.y + 5.25)]
            })
            .collect()
    });
    let config = InstanceConfig {
        mode: Some([Mode::Force, Mode::GivenPositions, Mode::GivenRouting][flavor as usize]),
        delta_min: (seed % 2 == 0).then_some(7.5),
        nudge: (seed % 3 == 0).then_some(NudgeKind::Constrained),
        passes: (seed % 4 == 0).then(|| "VH".to_string()),
        seed: Some(seed),
    };
    Instance { graph, paths, config }
}

proptest! {
    #[test]
    fn documents_round_trip(
        flavor in 0u8..3,
        n in 1usize..8,
        pairs in proptest::collection::vec((0usize..8, 0usize..8), 0..12),
        seed in 0u64..1000,
    ) {
        let inst = instance(flavor, n, pairs, seed);
        let text = emit_instance(&inst);
        prop_assert_eq!(parse_instance(&text).unwrap(), inst);
        prop_assert_eq!(emit_instance(&parse_instance(&text).unwrap()), text);
    }
}
