mod common;

use klnn::neighbors::truncation_size;
use klnn::{build_index, Dataset};
use proptest::prelude::*;

// every pairwise distance, sorted by (distance, index)
fn brute_force(data: &Dataset, i: usize, m: usize) -> Vec<(usize, f64)> {
    let p = data.point(i);
    let mut all: Vec<(f64, usize)> = (0..data.n())
        .filter(|&j| j != i)
        .map(|j| {
            let d2: f64 = p.iter().zip(data.point(j)).map(|(a, b)| (a - b) * (a - b)).sum();
            (d2, j)
        })
        .collect();
    all.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    all.truncate(m);
    all.into_iter().map(|(d2, j)| (j, d2.sqrt())).collect()
}

fn check_against_brute_force(data: &Dataset, m: usize) {
    let index = build_index(data).unwrap();
    for i in 0..data.n() {
        let got: Vec<(usize, f64)> = index
            .knn(i, m)
            .unwrap()
            .entries
            .iter()
            .map(|e| (e.index, e.distance))
            .collect();
        assert_eq!(got, brute_force(data, i, m), "query {i}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn kd_tree_matches_brute_force(seed in any::<u64>(), n in 2usize..300, d in 1usize..7, m_frac in 0.0f64..1.0) {
        let data = common::normal_data(seed, n, d);
        let m = 1 + ((n - 2) as f64 * m_frac) as usize;
        check_against_brute_force(&data, m);
    }

    #[test]
    fn ties_break_toward_smaller_index(seed in any::<u64>(), n in 2usize..120, d in 1usize..4) {
        // distinct integer grid points: many exactly equal distances
        let mut r = common::rng(seed);
        let side = 2 + (n as f64).powf(1.0 / d as f64).ceil() as usize;
        let mut cells: Vec<usize> = (0..side.pow(d as u32)).collect();
        for i in (1..cells.len()).rev() {
            let j = rand::Rng::random_range(&mut r, 0..=i);
            cells.swap(i, j);
        }
        let coords: Vec<f64> = cells[..n]
            .iter()
            .flat_map(|&c| (0..d).map(move |a| ((c / side.pow(a as u32)) % side) as f64))
            .collect();
        let data = Dataset::from_flat(coords, d).unwrap();
        check_against_brute_force(&data, n - 1);
    }

    #[test]
    fn distances_scale_and_survive_rigid_motion(seed in any::<u64>(), n in 10usize..150, d in 1usize..4, s in 0.01f64..100.0) {
        let data = common::normal_data(seed, n, d);
        let index = build_index(&data).unwrap();
        let scaled = data.scaled(s).unwrap();
        let scaled_index = build_index(&scaled).unwrap();
        let q = common::random_rotation(seed ^ 1, d);
        let t: Vec<f64> = (0..d).map(|a| a as f64 * 3.5 - 1.0).collect();
        let moved = common::rigid_motion(&data, &q, &t);
        let moved_index = build_index(&moved).unwrap();
        for i in 0..n {
            let base = index.rho(i, 3.min(n - 1)).unwrap();
            let sc = scaled_index.rho(i, 3.min(n - 1)).unwrap();
            let mv = moved_index.rho(i, 3.min(n - 1)).unwrap();
            prop_assert!(common::rel_diff(sc, s * base) < 1e-12);
            prop_assert!(common::rel_diff(mv, base) < 1e-10);
        }
    }
}

#[test]
fn truncation_follows_log_n() {
    assert_eq!(truncation_size(100, 5).unwrap(), 5);
    assert_eq!(truncation_size(3200, 5).unwrap(), 9);
    assert_eq!(truncation_size(3, 2).unwrap(), 2);
    assert!(truncation_size(3, 5).is_err());
}
