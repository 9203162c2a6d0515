use cxlab::hausdorff::{hausdorff_distance, HausdorffConfig, Variant};
use cxlab::quadrature::PolarGrid;
use cxlab::rng::{child_seed, substream};
use cxlab::varieties::{GraphRegion, GraphSpec};
use cxlab::volume::{gram_volume_graph, wirtinger_volume_graph};
use cxlab::{Complex64, PointCloud, UniPoly};
use proptest::prelude::*;
use rand::Rng;

fn c() -> impl Strategy<Value = Complex64> {
    (-2.0..2.0f64, -2.0..2.0f64).prop_map(|(a, b)| Complex64::new(a, b))
}

fn cloud(max: usize) -> impl Strategy<Value = PointCloud> {
    prop::collection::vec((c(), c()), 1..max).prop_map(|pts| {
        PointCloud::exact(pts.into_iter().map(|(a, b)| vec![a, b]).collect(), "random").unwrap()
    })
}

fn quadratic_graph(a: Complex64, b: Complex64) -> GraphSpec {
    GraphSpec::new("quadratic", f64::INFINITY, move |z| a * z * z + b * z)
        .unwrap()
        .with_derivative(move |z| 2.0 * a * z + b)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn roots_of_a_product_are_recovered(roots in prop::collection::vec(c(), 1..7)) {
        for (i, a) in roots.iter().enumerate() {
            for b in &roots[..i] {
                prop_assume!((a - b).norm() > 0.05);
            }
        }
        let q = UniPoly::from_roots(&roots);
        let found = cxlab::poly::univariate_roots(&q).unwrap();
        prop_assert_eq!(found.len(), roots.len());
        for r in &roots {
            let nearest = found.iter().map(|f| (f - r).norm()).fold(f64::MAX, f64::min);
            prop_assert!(nearest < 1e-6, "{r} missed by {nearest}");
        }
    }

    #[test]
    fn hausdorff_variants_are_metrics(a in cloud(20), b in cloud(20), m in cloud(20)) {
        let max = HausdorffConfig { variant: Variant::Max, ..Default::default() };
        let sum = HausdorffConfig { variant: Variant::Sum, ..Default::default() };
        let dm = |x: &PointCloud, y: &PointCloud| hausdorff_distance(x, y, &max).unwrap();
        prop_assert_eq!(dm(&a, &a), 0.0);
        prop_assert_eq!(dm(&a, &b), dm(&b, &a));
        prop_assert!(dm(&a, &b) <= dm(&a, &m) + dm(&m, &b) + 1e-12);
        let s = hausdorff_distance(&a, &b, &sum).unwrap();
        prop_assert!(dm(&a, &b) <= s + 1e-12 && s <= 2.0 * dm(&a, &b) + 1e-12);
    }

    #[test]
    fn graph_area_dominates_base_and_grows(a in c(), b in c(), r in 0.2..1.5f64) {
        let g = quadratic_graph(a, b);
        let grid = PolarGrid::new(32, 64).unwrap();
        let inner = gram_volume_graph(&g, GraphRegion::BaseDisc(r), &grid).unwrap().value;
        let outer = gram_volume_graph(&g, GraphRegion::BaseDisc(1.2 * r), &grid).unwrap().value;
        prop_assert!(inner >= std::f64::consts::PI * r * r * (1.0 - 1e-9));
        prop_assert!(outer > inner);
        let w = wirtinger_volume_graph(&g, GraphRegion::BaseDisc(r), &grid).unwrap().value;
        prop_assert!((w - inner).abs() <= 1e-9 * inner);
    }

    #[test]
    fn substreams_are_reproducible(seed in any::<u64>(), tag in 0u64..8, i in 0u64..1000) {
        let x: u64 = substream(seed, tag, i).random();
        let y: u64 = substream(seed, tag, i).random();
        prop_assert_eq!(x, y);
        prop_assert_ne!(child_seed(seed, tag, i), child_seed(seed, tag, i + 1));
    }
}
