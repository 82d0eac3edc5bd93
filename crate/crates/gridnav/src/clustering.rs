//! Adaptive-threshold nearest-neighbour clustering of a laser sweep into a
//! chain of obstacle clusters.
//!
//! Walking the beams from 0 to 180 degrees, a retained beam joins the
//! previous beam's cluster when the Cartesian distance between the two
//! returns is within `lambda * rho * sin(0.5 deg)` of the current beam,
//! and opens a new cluster otherwise. No-return beams and beams beyond the
//! sliding window are dropped, and a dropped gap always forces a split:
//! the space between was observed empty.

use crate::geometry::{PolarBeam, BEAM_SPACING_DEG};
use crate::world::LaserScan;

/// A contiguous run of retained beams belonging to one obstacle.
#[derive(Debug, Clone, PartialEq)]
pub struct Cluster {
    pub beams: Vec<PolarBeam>,
}

impl Cluster {
    pub fn len(&self) -> usize {
        self.beams.len()
    }

    pub fn is_empty(&self) -> bool {
        self.beams.is_empty()
    }
}

/// The ordered clusters detected in one scan.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ObstacleChain {
    pub clusters: Vec<Cluster>,
}

/// Adaptive split threshold: `lambda * rho * sin(0.5 deg)`, mm.
pub fn threshold(rho: f64, lambda: f64) -> f64 {
    debug_assert!(rho >= 0.0 && lambda > 0.0);
    lambda * rho * BEAM_SPACING_DEG.to_radians().sin()
}

/// Local Cartesian point of a beam (the robot pose is a rigid transform
/// and does not change distances between returns).
fn beam_point(beam: &PolarBeam) -> (f64, f64) {
    let a = beam.alpha().to_radians();
    (beam.rho * a.cos(), beam.rho * a.sin())
}

/// Cluster one scan. `window` is the retention cap `r_w * r` in mm.
pub fn cluster_scan(scan: &LaserScan, lambda: f64, window: f64) -> ObstacleChain {
    let mut chain = ObstacleChain::default();
    let mut current: Vec<PolarBeam> = Vec::new();
    // (point, index) of the last retained beam.
    let mut prev: Option<((f64, f64), u16)> = None;

    for (i, reading) in scan.beams.iter().enumerate() {
        let index = i as u16;
        if !reading.hit || reading.rho > window {
            // Gap: observed empty space splits clusters.
            if !current.is_empty() {
                chain.clusters.push(Cluster { beams: std::mem::take(&mut current) });
            }
            prev = None;
            continue;
        }
        let beam = PolarBeam::new(index, reading.rho);
        let p = beam_point(&beam);
        let joins = match prev {
            Some((q, _)) => {
                let dist = (p.0 - q.0).hypot(p.1 - q.1);
                dist <= threshold(beam.rho, lambda)
            }
            None => false,
        };
        if !joins && !current.is_empty() {
            chain.clusters.push(Cluster { beams: std::mem::take(&mut current) });
        }
        current.push(beam);
        prev = Some((p, index));
    }
    if !current.is_empty() {
        chain.clusters.push(Cluster { beams: current });
    }
    chain
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::BEAM_COUNT;
    use crate::world::BeamReading;
    use proptest::prelude::*;

    const LAMBDA: f64 = 1.2;
    const WINDOW: f64 = 4000.0;

    fn scan_from_ranges(ranges: &[(usize, f64)]) -> LaserScan {
        let mut scan = LaserScan::all_clear(WINDOW);
        for &(i, rho) in ranges {
            scan.beams[i] = BeamReading { rho, hit: true };
        }
        scan
    }

    /// Brute-force reference: independent single pass over retained beams.
    fn reference_chain(scan: &LaserScan, lambda: f64, window: f64) -> Vec<Vec<u16>> {
        let retained: Vec<(u16, f64)> = scan
            .beams
            .iter()
            .enumerate()
            .filter(|(_, b)| b.hit && b.rho <= window)
            .map(|(i, b)| (i as u16, b.rho))
            .collect();
        let mut groups: Vec<Vec<u16>> = Vec::new();
        for w in 0..retained.len() {
            let (idx, rho) = retained[w];
            let split = if w == 0 {
                true
            } else {
                let (pidx, prho) = retained[w - 1];
                if pidx + 1 != idx {
                    true // skipped gap
                } else {
                    let a = (f64::from(idx) * 0.5).to_radians();
                    let pa = (f64::from(pidx) * 0.5).to_radians();
                    let (x, y) = (rho * a.cos(), rho * a.sin());
                    let (px, py) = (prho * pa.cos(), prho * pa.sin());
                    let d = (x - px).hypot(y - py);
                    d > lambda * rho * 0.5f64.to_radians().sin()
                }
            };
            if split {
                groups.push(vec![idx]);
            } else {
                groups.last_mut().unwrap().push(idx);
            }
        }
        groups
    }

    fn indices(chain: &ObstacleChain) -> Vec<Vec<u16>> {
        chain
            .clusters
            .iter()
            .map(|c| c.beams.iter().map(|b| b.index).collect())
            .collect()
    }

    #[test]
    fn threshold_values() {
        assert_eq!(threshold(0.0, 1.2), 0.0);
        // 1.2 * 4000 * sin(0.5 deg)
        assert!((threshold(4000.0, 1.2) - 41.8875).abs() < 1e-3);
        assert!((threshold(1000.0, 1.2) - 10.4719).abs() < 1e-3);
    }

    #[test]
    fn all_no_return_gives_empty_chain() {
        let scan = LaserScan::all_clear(WINDOW);
        assert!(cluster_scan(&scan, LAMBDA, WINDOW).clusters.is_empty());
    }

    #[test]
    fn close_consecutive_beams_join() {
        // Chord between (1000, 0 deg) and (1005, 0.5 deg): ~10.06 mm,
        // threshold at rho=1005 ~ 10.52 mm -> one cluster.
        let scan = scan_from_ranges(&[(0, 1000.0), (1, 1005.0)]);
        let chain = cluster_scan(&scan, LAMBDA, WINDOW);
        assert_eq!(chain.clusters.len(), 1);
        assert_eq!(chain.clusters[0].len(), 2);
    }

    #[test]
    fn radial_jump_splits() {
        // rho 1000 -> 1030: ~31.2 mm > threshold -> two clusters.
        let scan = scan_from_ranges(&[(0, 1000.0), (1, 1030.0)]);
        let chain = cluster_scan(&scan, LAMBDA, WINDOW);
        assert_eq!(chain.clusters.len(), 2);
    }

    #[test]
    fn gap_forces_split_even_when_points_close() {
        // Beams 0 and 2 retained with equal range, beam 1 missing: the
        // points are ~17 mm apart (threshold ~21 mm would join) but the
        // observed-empty gap splits them.
        let scan = scan_from_ranges(&[(0, 2000.0), (2, 2000.0)]);
        let chain = cluster_scan(&scan, LAMBDA, WINDOW);
        assert_eq!(chain.clusters.len(), 2);
    }

    #[test]
    fn beams_beyond_window_skipped() {
        let mut scan = scan_from_ranges(&[(10, 1000.0), (11, 1005.0)]);
        scan.beams[12] = BeamReading { rho: WINDOW + 1.0, hit: true };
        let chain = cluster_scan(&scan, LAMBDA, WINDOW);
        assert_eq!(chain.clusters.len(), 1);
        assert_eq!(chain.clusters[0].len(), 2);
    }

    #[test]
    fn matches_reference_on_random_scans() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand::rngs::StdRng::seed_from_u64(42);
        for _ in 0..1000 {
            let mut scan = LaserScan::all_clear(WINDOW);
            let n = rng.gen_range(0..=16);
            let mut placed = 0;
            while placed < n {
                let i = rng.gen_range(0..BEAM_COUNT);
                if !scan.beams[i].hit {
                    scan.beams[i] = BeamReading { rho: rng.gen_range(100.0..5000.0), hit: true };
                    placed += 1;
                }
            }
            let chain = cluster_scan(&scan, LAMBDA, WINDOW);
            assert_eq!(indices(&chain), reference_chain(&scan, LAMBDA, WINDOW));
        }
    }

    proptest! {
        #[test]
        fn partition_covers_all_retained_beams(seed in any::<u64>()) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
            let mut scan = LaserScan::all_clear(WINDOW);
            for i in 0..BEAM_COUNT {
                if rng.gen_bool(0.3) {
                    scan.beams[i] = BeamReading { rho: rng.gen_range(100.0..4500.0), hit: true };
                }
            }
            let retained: Vec<u16> = scan.beams.iter().enumerate()
                .filter(|(_, b)| b.hit && b.rho <= WINDOW)
                .map(|(i, _)| i as u16)
                .collect();
            let chain = cluster_scan(&scan, LAMBDA, WINDOW);
            let mut seen: Vec<u16> = chain.clusters.iter()
                .flat_map(|c| c.beams.iter().map(|b| b.index))
                .collect();
            // Contiguity within each cluster.
            for c in &chain.clusters {
                for pair in c.beams.windows(2) {
                    prop_assert_eq!(pair[0].index + 1, pair[1].index);
                }
            }
            seen.sort_unstable();
            prop_assert_eq!(seen, retained);
        }

        #[test]
        fn equal_range_pairs_always_join(rho in 100.0f64..3999.0, start in 0usize..359) {
            // Chord 2 rho sin(0.25 deg) < 1.2 rho sin(0.5 deg).
            let scan = scan_from_ranges(&[(start, rho), (start + 1, rho)]);
            let chain = cluster_scan(&scan, LAMBDA, WINDOW);
            prop_assert_eq!(chain.clusters.len(), 1);
        }

        #[test]
        fn bigger_jump_never_merges(rho in 500.0f64..3000.0, jump in 0.0f64..500.0, extra in 1.0f64..500.0) {
            let base = cluster_scan(&scan_from_ranges(&[(0, rho), (1, rho + jump)]), LAMBDA, WINDOW);
            let more = cluster_scan(&scan_from_ranges(&[(0, rho), (1, rho + jump + extra)]), LAMBDA, WINDOW);
            prop_assert!(more.clusters.len() >= base.clusters.len());
        }
    }
}
