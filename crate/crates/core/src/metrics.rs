//! Weighted data-reuse intensity and the quantities derived from it.
//!
//! All intensities are MACs per data element. The weighted intensity is
//!
//! ```text
//! DI(α) = (α · M_c/A + (1 − α) · M_c/W) / 4
//! ```
//!
//! and the disparity `d_f = 100 · (AI_c − DI) / AI_c` measures how far the
//! conventional cumulative intensity `AI_c = M_c / (W + A)` is from it.

use serde::Serialize;

use crate::error::MetricError;
use crate::profile::NetworkProfile;

/// Coefficient that reproduces the observed correlation plateau.
pub const DEFAULT_ALPHA: f64 = 0.80;

fn positive(value: f64, what: &'static str) -> Result<f64, MetricError> {
    if value > 0.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(MetricError::NonPositive(what))
    }
}

fn check_alpha(alpha: f64) -> Result<f64, MetricError> {
    if (0.0..=1.0).contains(&alpha) {
        Ok(alpha)
    } else {
        Err(MetricError::AlphaOutOfRange(alpha))
    }
}

/// Weight reuse `M_c/W` and activation reuse `M_c/A`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Reuse {
    pub weight: f64,
    pub activation: f64,
}

impl Reuse {
    pub fn new(weight: f64, activation: f64) -> Result<Self, MetricError> {
        Ok(Self {
            weight: positive(weight, "weight reuse")?,
            activation: positive(activation, "activation reuse")?,
        })
    }

    /// `A / W`, which equals weight reuse over activation reuse.
    pub fn a_over_w(&self) -> f64 {
        self.weight / self.activation
    }

    /// The cumulative intensity implied by the two ratios.
    pub fn ai_c(&self) -> f64 {
        self.weight * self.activation / (self.weight + self.activation)
    }
}

/// `AI_c` recovered from the two reuse ratios; the MAC count cancels.
pub fn ai_from_reuse(weight_reuse: f64, activation_reuse: f64) -> Result<f64, MetricError> {
    Ok(Reuse::new(weight_reuse, activation_reuse)?.ai_c())
}

pub fn weighted_intensity(reuse: &Reuse, alpha: f64) -> Result<f64, MetricError> {
    let alpha = check_alpha(alpha)?;
    Ok((alpha * reuse.activation + (1.0 - alpha) * reuse.weight) / 4.0)
}

/// Relative disparity between `AI_c` and `DI(α)`, in percent.
pub fn disparity(reuse: &Reuse, alpha: f64) -> Result<f64, MetricError> {
    let ai = reuse.ai_c();
    let di = weighted_intensity(reuse, alpha)?;
    Ok(100.0 * (ai - di) / ai)
}

/// Disparity at α = 0.8 expressed through `A/W` alone:
/// `75 − 20·(W/A) − 5·(A/W)`.
pub fn disparity_closed_form(a_over_w: f64) -> f64 {
    75.0 - 20.0 / a_over_w - 5.0 * a_over_w
}

/// Where a network sits on the activation/weight balance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum ReuseCase {
    /// A ≪ W: activation reuse dominates and `AI_c` tracks weight reuse.
    ActivationsScarce,
    /// A ≈ W.
    Balanced,
    /// A ≫ W.
    ActivationsDominant,
}

impl ReuseCase {
    pub fn as_str(self) -> &'static str {
        match self {
            ReuseCase::ActivationsScarce => "ActivationsScarce",
            ReuseCase::Balanced => "Balanced",
            ReuseCase::ActivationsDominant => "ActivationsDominant",
        }
    }
}

impl std::fmt::Display for ReuseCase {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// `A/W` cut points for [`classify_case`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CaseThresholds {
    pub low: f64,
    pub high: f64,
}

impl Default for CaseThresholds {
    fn default() -> Self {
        Self {
            low: 1.0 / 3.0,
            high: 3.0,
        }
    }
}

pub fn classify_case(a_over_w: f64, thresholds: CaseThresholds) -> ReuseCase {
    if a_over_w < thresholds.low {
        ReuseCase::ActivationsScarce
    } else if a_over_w > thresholds.high {
        ReuseCase::ActivationsDominant
    } else {
        ReuseCase::Balanced
    }
}

/// Slack in `AI_c ≤ (M_c/A + M_c/W) / 4`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundCheck {
    pub holds: bool,
    pub slack: f64,
    /// Slack relative to the bound.
    pub relative_slack: f64,
}

const BOUND_TOLERANCE: f64 = 1e-9;

pub fn reuse_bound(ai_c: f64, reuse: &Reuse) -> BoundCheck {
    let bound = (reuse.activation + reuse.weight) / 4.0;
    let slack = bound - ai_c;
    BoundCheck {
        holds: slack >= -BOUND_TOLERANCE * bound.max(1.0),
        slack,
        relative_slack: slack / bound,
    }
}

/// [`reuse_bound`] using the profile's own counts for `AI_c`.
pub fn profile_reuse_bound(profile: &NetworkProfile) -> Result<BoundCheck, MetricError> {
    Ok(reuse_bound(profile.ai_c(), &profile.reuse()?))
}

/// Design objective `M_c · (1/DI)^k`; `k = 0` reduces to `M_c`.
pub fn automl_metric(macs: f64, di: f64, k: f64) -> Result<f64, MetricError> {
    if !(0.0..1.0).contains(&k) {
        return Err(MetricError::ExponentOutOfRange(k));
    }
    let di = positive(di, "weighted intensity")?;
    Ok(macs * di.recip().powf(k))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DerivedMetrics {
    pub alpha: f64,
    pub ai_c: f64,
    pub di: f64,
    pub d_f: f64,
    pub case: ReuseCase,
}

pub fn derive_metrics(
    reuse: &Reuse,
    alpha: f64,
    thresholds: CaseThresholds,
) -> Result<DerivedMetrics, MetricError> {
    Ok(DerivedMetrics {
        alpha,
        ai_c: reuse.ai_c(),
        di: weighted_intensity(reuse, alpha)?,
        d_f: disparity(reuse, alpha)?,
        case: classify_case(reuse.a_over_w(), thresholds),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    const ALEXNET: (f64, f64) = (11.85, 361.50);
    const VGG16: (f64, f64) = (111.81, 537.15);

    fn reuse((w, a): (f64, f64)) -> Reuse {
        Reuse::new(w, a).unwrap()
    }

    #[test]
    fn weighted_intensity_reference_rows() {
        assert!(close(weighted_intensity(&reuse(ALEXNET), 0.8).unwrap(), 72.89, 0.01));
        assert!(close(weighted_intensity(&reuse(VGG16), 0.8).unwrap(), 113.02, 0.01));
        let r = reuse(VGG16);
        assert_eq!(weighted_intensity(&r, 1.0).unwrap(), r.activation / 4.0);
        assert_eq!(weighted_intensity(&r, 0.0).unwrap(), r.weight / 4.0);
        assert_eq!(
            weighted_intensity(&r, 1.2),
            Err(MetricError::AlphaOutOfRange(1.2))
        );
    }

    #[test]
    fn ai_from_reuse_rows() {
        assert!(close(ai_from_reuse(11.85, 361.50).unwrap(), 11.48, 0.02));
        assert!(close(ai_from_reuse(124.80, 12.36).unwrap(), 11.24, 0.02));
        assert_eq!(ai_from_reuse(7.0, 7.0).unwrap(), 3.5);
        assert!(ai_from_reuse(0.0, 1.0).is_err());
    }

    #[test]
    fn disparity_rows() {
        assert!(close(disparity(&reuse(ALEXNET), 0.8).unwrap(), -535.16, 0.5));
        let nin = reuse((146.05, 291.34));
        assert!(close(disparity(&nin, 0.8).unwrap(), 32.60, 0.1));
        assert!(close(disparity(&reuse((5.0, 5.0)), 0.8).unwrap(), 50.0, 1e-12));
    }

    #[test]
    fn disparity_matches_closed_form() {
        for (w, a) in [ALEXNET, VGG16, (146.05, 291.34), (3.0, 300.0), (500.0, 2.0)] {
            let r = reuse((w, a));
            let def = disparity(&r, 0.8).unwrap();
            let closed = disparity_closed_form(r.a_over_w());
            assert!((def - closed).abs() <= 1e-9 * def.abs().max(1.0));
        }
    }

    #[test]
    fn case_taxonomy() {
        let t = CaseThresholds::default();
        assert_eq!(classify_case(0.03, t), ReuseCase::ActivationsScarce);
        assert_eq!(classify_case(1.83, t), ReuseCase::Balanced);
        assert_eq!(classify_case(32.80, t), ReuseCase::ActivationsDominant);
        assert_eq!(classify_case(4.80, t), ReuseCase::ActivationsDominant);
    }

    #[test]
    fn bound_slack() {
        let r = reuse(ALEXNET);
        let b = reuse_bound(11.48, &r);
        assert!(b.holds);
        assert!(close(b.slack, 81.86, 0.01));

        let eq = NetworkProfile::from_counts(1000, 40, 40);
        let b = profile_reuse_bound(&eq).unwrap();
        assert!(b.relative_slack.abs() < 1e-12);
    }

    #[test]
    fn automl_objective() {
        assert_eq!(automl_metric(5e8, 42.0, 0.0).unwrap(), 5e8);
        assert!(close(automl_metric(1e9, 100.0, 0.5).unwrap(), 1e8, 1e-3));
        assert!(automl_metric(1e9, 0.0, 0.5).is_err());
        assert!(automl_metric(1e9, 1.0, 1.0).is_err());
        let penalty = |di: f64| di.recip().powf(0.5);
        assert!(close(penalty(12.43) / penalty(72.89), 2.42, 0.005));
    }
}
