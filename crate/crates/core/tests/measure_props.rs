use conevol::measure::{check_scc, check_scc_essential, is_hemisphere_concentrated, Atom, DiscreteMeasure, SccStatus};
use conevol::polytope::{random_polytope, RandomOptions};
use proptest::prelude::*;

fn rotation(n: usize, angles: &[f64]) -> Vec<Vec<f64>> {
    // product of plane rotations in coordinates (k, k+1)
    let mut r: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| f64::from(u8::from(i == j))).collect()).collect();
    for (k, &a) in angles.iter().enumerate().take(n - 1) {
        let (c, s) = (a.cos(), a.sin());
        for row in r.iter_mut() {
            let (x, y) = (row[k], row[k + 1]);
            row[k] = c * x - s * y;
            row[k + 1] = s * x + c * y;
        }
    }
    r
}

fn apply(r: &[Vec<f64>], u: &[f64]) -> Vec<f64> {
    r.iter().map(|row| row.iter().zip(u).map(|(a, b)| a * b).sum()).collect()
}

fn symmetric(n: usize, pairs: usize, seed: u64) -> DiscreteMeasure<f64> {
    let opts = RandomOptions {
        symmetric: true,
        require_origin_interior: false,
    };
    random_polytope::<f64>(n, pairs, seed, opts).unwrap().cone_volume_measure().unwrap()
}

fn statuses(mu: &DiscreteMeasure<f64>) -> Vec<(usize, SccStatus)> {
    check_scc(mu).unwrap().reports.iter().map(|r| (r.dim, r.status)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(30))]

    #[test]
    fn rotation_invariant(n in 2usize..=4, seed in any::<u64>(), angles in prop::collection::vec(-3.0f64..3.0, 3)) {
        let mu = symmetric(n, n + 1, seed);
        let r = rotation(n, &angles);
        let nu = mu.map_directions(|u| apply(&r, u)).unwrap();
        let mut a = statuses(&mu);
        let mut b = statuses(&nu);
        a.sort_by_key(|x| x.0);
        b.sort_by_key(|x| x.0);
        prop_assert_eq!(a.len(), b.len());
        prop_assert_eq!(check_scc(&mu).unwrap().verdict, check_scc(&nu).unwrap().verdict);
    }

    #[test]
    fn scaling_invariant(n in 2usize..=4, seed in any::<u64>(), c in 0.01f64..100.0) {
        let mu = symmetric(n, n + 1, seed);
        let a = check_scc(&mu).unwrap();
        let b = check_scc(&mu.scaled(c).unwrap()).unwrap();
        prop_assert_eq!(a.verdict, b.verdict);
        for (x, y) in a.reports.iter().zip(&b.reports) {
            prop_assert_eq!(&x.atom_ids, &y.atom_ids);
            prop_assert_eq!(x.status, y.status);
        }
    }

    #[test]
    fn essential_reports_are_a_subset(n in 2usize..=4, seed in any::<u64>()) {
        let mu = symmetric(n, n + 1, seed);
        let all = check_scc(&mu).unwrap();
        let ess = check_scc_essential(&mu).unwrap();
        for r in &ess.reports {
            prop_assert!(all.reports.iter().any(|q| q.atom_ids == r.atom_ids));
        }
    }

    #[test]
    fn symmetric_bodies_satisfy(n in 2usize..=4, extra in 0usize..3, seed in any::<u64>()) {
        let mu = symmetric(n, n + 1 + extra, seed);
        prop_assert!(check_scc(&mu).unwrap().satisfied());
        prop_assert!(is_hemisphere_concentrated(&mu).unwrap().is_none());
    }
}

#[test]
fn open_half_plane_has_a_witness() {
    let atoms = (0..5)
        .map(|k| {
            let t = 0.3 * k as f64;
            Atom { u: vec![t.cos(), t.sin()], w: 1.0 }
        })
        .collect();
    let mu = DiscreteMeasure::new(2, atoms).unwrap();
    let v = is_hemisphere_concentrated(&mu).unwrap().unwrap();
    for a in mu.atoms() {
        assert!(a.u[0] * v[0] + a.u[1] * v[1] >= -1e-12);
    }
}
