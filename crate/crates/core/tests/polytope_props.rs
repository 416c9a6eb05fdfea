use conevol::polytope::{random_polytope, RandomOptions};
use conevol::Polytope64;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn body(n: usize, m: usize, seed: u64) -> Polytope64 {
    let opts = RandomOptions {
        symmetric: false,
        require_origin_interior: true,
    };
    random_polytope(n, m, seed, opts).unwrap()
}

fn dims() -> impl Strategy<Value = (usize, usize, u64)> {
    (2usize..=5, 0usize..6, any::<u64>()).prop_map(|(n, extra, s)| (n, n + 2 + extra, s))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn facet_normals_balance((n, m, s) in dims()) {
        let p = body(n, m, s);
        let v = p.minkowski_sum_of_normals();
        let scale = p.surface_area();
        prop_assert!(v.iter().all(|x| x.abs() <= 1e-10 * scale), "{v:?}");
    }

    #[test]
    fn cone_volumes_sum_to_volume((n, m, s) in dims()) {
        let p = body(n, m, s);
        let mu = p.cone_volume_measure().unwrap();
        prop_assert!((mu.total_mass() - p.volume()).abs() <= 1e-10 * p.volume());
    }

    #[test]
    fn rebuild_and_permutation_are_idempotent((n, m, s) in dims()) {
        let p = body(n, m, s);
        let mut pts = p.vertices().to_vec();
        let q = Polytope64::from_vertices(&pts).unwrap();
        pts.shuffle(&mut ChaCha8Rng::seed_from_u64(s));
        let r = Polytope64::from_vertices(&pts).unwrap();
        prop_assert_eq!(q.vertices().len(), p.vertices().len());
        prop_assert_eq!(r.facets().len(), p.facets().len());
        prop_assert!((r.volume() - p.volume()).abs() <= 1e-12 * p.volume());
    }

    #[test]
    fn support_is_sublinear((n, m, s) in dims(), t in 0.1f64..3.0) {
        let p = body(n, m, s);
        let mut rng = ChaCha8Rng::seed_from_u64(s ^ 1);
        let x = conevol::polytope::random_unit(&mut rng, n);
        let y = conevol::polytope::random_unit(&mut rng, n);
        let xy: Vec<f64> = x.iter().zip(&y).map(|(a, b)| a + b).collect();
        let tx: Vec<f64> = x.iter().map(|a| t * a).collect();
        prop_assert!(p.support(&xy) <= p.support(&x) + p.support(&y) + 1e-12);
        prop_assert!((p.support(&tx) - t * p.support(&x)).abs() <= 1e-12 * t);
    }

    #[test]
    fn scaling_law((n, m, s) in dims(), t in 0.2f64..4.0) {
        let p = body(n, m, s);
        let q = p.map_vertices(|v| v.iter().map(|x| t * x).collect()).unwrap();
        let k = t.powi(n as i32);
        prop_assert!((q.volume() - k * p.volume()).abs() <= 1e-11 * k * p.volume());
        let a = p.cone_volume_measure().unwrap();
        let b = q.cone_volume_measure().unwrap();
        for atom in a.atoms() {
            let w = b.weight_at(&atom.u, 1e-9).unwrap();
            prop_assert!((w - k * atom.w).abs() <= 1e-10 * k * a.total_mass());
        }
    }

    #[test]
    fn translation_keeps_volume((n, m, s) in dims(), d in -0.3f64..0.3) {
        let p = body(n, m, s);
        let q = p.map_vertices(|v| v.iter().map(|x| x + d).collect()).unwrap();
        prop_assert!((q.volume() - p.volume()).abs() <= 1e-12 * p.volume());
    }
}

#[test]
fn unit_cubes_up_to_six() {
    for n in 2..=6 {
        let pts: Vec<Vec<f64>> = (0..1usize << n)
            .map(|mask| (0..n).map(|k| (mask >> k & 1) as f64).collect())
            .collect();
        let p = Polytope64::from_vertices(&pts).unwrap();
        assert!((p.volume() - 1.0).abs() < 1e-12);
        assert_eq!(p.facets().len(), 2 * n);
        assert_eq!(p.edges().len(), n << (n - 1));
    }
}
