//! Obstacle classification and motion estimation.
//!
//! Classification is a fixed decision tree over the match against the
//! previous scan: the maximal spatial correlation decides new vs static
//! outright, and the middle band falls through to the center-distance and
//! coincidence tests.

use serde::{Deserialize, Serialize};

use crate::analysis::MatchScore;
use crate::geometry::{normalize_deg, GlobalPoint};

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct RecognitionThresholds {
    /// Below this correlation the obstacle is new.
    pub theta_s1: f64,
    /// Above this correlation the obstacle is static.
    pub theta_s2: f64,
    /// Center-distance threshold, grid-edge units.
    pub theta_delta: f64,
    /// Coincidence threshold.
    pub theta_xi: f64,
}

impl Default for RecognitionThresholds {
    fn default() -> Self {
        RecognitionThresholds {
            theta_s1: 0.30,
            theta_s2: 0.7,
            theta_delta: 0.4,
            theta_xi: 0.5,
        }
    }
}

impl RecognitionThresholds {
    pub fn validate(&self) -> Result<(), String> {
        if !(0.0 < self.theta_s1 && self.theta_s1 < self.theta_s2 && self.theta_s2 < 1.0) {
            return Err("need 0 < theta_s1 < theta_s2 < 1".into());
        }
        if self.theta_delta < 0.0 {
            return Err("theta_delta must be >= 0".into());
        }
        if !(0.0..=1.0).contains(&self.theta_xi) {
            return Err("theta_xi must be in [0, 1]".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ObstacleClass {
    New,
    Static,
    Dynamic,
}

/// Decision tree over (sigma_max, delta, xi). `None` match means an empty
/// previous chain, i.e. sigma_max = 0 and the obstacle is new.
pub fn classify(best_match: Option<&MatchScore>, th: &RecognitionThresholds) -> ObstacleClass {
    let m = match best_match {
        Some(m) => m,
        None => return ObstacleClass::New,
    };
    if m.sigma < th.theta_s1 {
        ObstacleClass::New
    } else if m.sigma > th.theta_s2 {
        ObstacleClass::Static
    } else if m.delta < th.theta_delta {
        ObstacleClass::Static
    } else if m.xi < th.theta_xi {
        ObstacleClass::Dynamic
    } else {
        ObstacleClass::Static
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct MotionEstimate {
    /// mm/s.
    pub v: f64,
    /// Direction in degrees, measured from the +y axis (atan2 of dx, dy),
    /// normalized to [0, 360).
    pub alpha: f64,
    /// Displacement over one scan period, mm.
    pub d: f64,
    /// True when both deltas were zero and alpha is meaningless.
    pub zero_displacement: bool,
}

/// Constant-velocity estimate between two matched center positions.
pub fn estimate_motion(pos_t: &GlobalPoint, pos_prev: &GlobalPoint, t_period: f64) -> MotionEstimate {
    debug_assert!(t_period > 0.0);
    let dx = pos_t.x - pos_prev.x;
    let dy = pos_t.y - pos_prev.y;
    if dx == 0.0 && dy == 0.0 {
        return MotionEstimate { v: 0.0, alpha: 0.0, d: 0.0, zero_displacement: true };
    }
    let d = dx.hypot(dy);
    MotionEstimate {
        v: d / t_period,
        alpha: normalize_deg(dx.atan2(dy).to_degrees()),
        d,
        zero_displacement: false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn score(sigma: f64, delta: f64, xi: f64) -> MatchScore {
        MatchScore { sigma, delta, xi, eta: 0.0 }
    }

    #[test]
    fn default_threshold_cases() {
        let th = RecognitionThresholds::default();
        assert_eq!(classify(Some(&score(0.2, 0.0, 0.0)), &th), ObstacleClass::New);
        assert_eq!(classify(Some(&score(0.8, 0.0, 0.0)), &th), ObstacleClass::Static);
        assert_eq!(classify(Some(&score(0.5, 0.2, 0.0)), &th), ObstacleClass::Static);
        assert_eq!(classify(Some(&score(0.5, 0.6, 0.3)), &th), ObstacleClass::Dynamic);
        assert_eq!(classify(Some(&score(0.5, 0.6, 0.9)), &th), ObstacleClass::Static);
        assert_eq!(classify(None, &th), ObstacleClass::New);
    }

    #[test]
    fn boundary_values_take_else_branch() {
        let th = RecognitionThresholds::default();
        // sigma exactly at theta_s1 is not "< theta_s1": falls through.
        assert_eq!(classify(Some(&score(0.30, 0.0, 0.0)), &th), ObstacleClass::Static);
        // sigma exactly at theta_s2 is not "> theta_s2": middle band.
        assert_eq!(classify(Some(&score(0.7, 0.6, 0.3)), &th), ObstacleClass::Dynamic);
        // delta at threshold: not "< theta_delta".
        assert_eq!(classify(Some(&score(0.5, 0.4, 0.3)), &th), ObstacleClass::Dynamic);
        // xi at threshold: not "< theta_xi" -> static.
        assert_eq!(classify(Some(&score(0.5, 0.6, 0.5)), &th), ObstacleClass::Static);
    }

    #[test]
    fn zero_displacement_flagged() {
        let p = GlobalPoint::new(10.0, 20.0);
        let m = estimate_motion(&p, &p, 1.0);
        assert!(m.zero_displacement);
        assert_eq!(m.v, 0.0);
        assert_eq!(m.alpha, 0.0);
    }

    #[test]
    fn three_four_five_displacement() {
        let m = estimate_motion(&GlobalPoint::new(300.0, 400.0), &GlobalPoint::new(0.0, 0.0), 1.0);
        assert!((m.d - 500.0).abs() < 1e-9);
        assert!((m.v - 500.0).abs() < 1e-9);
        assert!((m.alpha - 36.8698976).abs() < 1e-4);
    }

    #[test]
    fn horizontal_motion_does_not_divide_by_zero() {
        // Literal arctan(dx/dy) is singular at dy = 0; atan2 handles it.
        let m = estimate_motion(&GlobalPoint::new(100.0, 0.0), &GlobalPoint::new(0.0, 0.0), 1.0);
        assert!((m.alpha - 90.0).abs() < 1e-9);
    }

    proptest! {
        #[test]
        fn classify_is_total(sigma in 0.0f64..=1.0, delta in 0.0f64..8.0, xi in 0.0f64..=1.0) {
            let th = RecognitionThresholds::default();
            // Any triple yields exactly one of the three labels.
            let label = classify(Some(&score(sigma, delta, xi)), &th);
            prop_assert!(matches!(
                label,
                ObstacleClass::New | ObstacleClass::Static | ObstacleClass::Dynamic
            ));
        }

        #[test]
        fn speed_scales_with_period(dx in -2000.0f64..2000.0, dy in -2000.0f64..2000.0, t in 0.1f64..4.0) {
            prop_assume!(dx != 0.0 || dy != 0.0);
            let m = estimate_motion(&GlobalPoint::new(dx, dy), &GlobalPoint::new(0.0, 0.0), t);
            prop_assert!((m.v * t - m.d).abs() < 1e-9);
            prop_assert!((0.0..360.0).contains(&m.alpha));
        }
    }
}
