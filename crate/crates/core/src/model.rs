//! Losses, the prediction rule and learning-rate schedules shared by every learner.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sparse::Label;

/// Convex, differentiable margin loss with derivative bounded by 1 in magnitude.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Loss {
    /// `log(1 + exp(-margin))`
    #[default]
    Logistic,
    /// Hinge loss `max(0, 1 - margin)` with the kink replaced by a parabola
    /// on `[1 - half_width, 1 + half_width]`.
    SmoothedHinge { half_width: f64 },
}

impl Loss {
    pub fn smoothed_hinge() -> Self {
        Loss::SmoothedHinge { half_width: 1.0 }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Loss::Logistic => Ok(()),
            Loss::SmoothedHinge { half_width } if half_width > 0.0 && half_width.is_finite() => Ok(()),
            Loss::SmoothedHinge { half_width } => Err(Error::usage(format!(
                "smoothed hinge half-width must be positive, got {half_width}"
            ))),
        }
    }

    pub fn value(&self, margin: f64) -> Result<f64> {
        check_finite(margin)?;
        Ok(self.value_unchecked(margin))
    }

    pub fn grad(&self, margin: f64) -> Result<f64> {
        check_finite(margin)?;
        Ok(self.grad_unchecked(margin))
    }

    #[inline]
    pub(crate) fn value_unchecked(&self, margin: f64) -> f64 {
        match *self {
            Loss::Logistic => {
                if margin >= 0.0 {
                    (-margin).exp().ln_1p()
                } else {
                    -margin + margin.exp().ln_1p()
                }
            }
            Loss::SmoothedHinge { half_width: h } => {
                if margin >= 1.0 + h {
                    0.0
                } else if margin <= 1.0 - h {
                    1.0 - margin
                } else {
                    (1.0 + h - margin).powi(2) / (4.0 * h)
                }
            }
        }
    }

    #[inline]
    pub(crate) fn grad_unchecked(&self, margin: f64) -> f64 {
        match *self {
            Loss::Logistic => -1.0 / (1.0 + margin.exp()),
            Loss::SmoothedHinge { half_width: h } => {
                if margin >= 1.0 + h {
                    0.0
                } else if margin <= 1.0 - h {
                    -1.0
                } else {
                    -(1.0 + h - margin) / (2.0 * h)
                }
            }
        }
    }
}

fn check_finite(margin: f64) -> Result<()> {
    if margin.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(format!("non-finite margin {margin}")))
    }
}

/// `+1` for non-negative margins, `-1` otherwise.
#[inline]
pub fn predict_label(margin: f64) -> Label {
    if margin >= 0.0 {
        Label::Positive
    } else {
        Label::Negative
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScheduleKind {
    Constant,
    InverseSqrt,
    InverseStronglyConvex,
}

impl ScheduleKind {
    pub(crate) fn id(self) -> u64 {
        match self {
            ScheduleKind::Constant => 0,
            ScheduleKind::InverseSqrt => 1,
            ScheduleKind::InverseStronglyConvex => 2,
        }
    }

    pub(crate) fn from_id(id: u64) -> Result<Self> {
        match id {
            0 => Ok(ScheduleKind::Constant),
            1 => Ok(ScheduleKind::InverseSqrt),
            2 => Ok(ScheduleKind::InverseStronglyConvex),
            _ => Err(Error::Snapshot(format!("unknown schedule id {id}"))),
        }
    }
}

/// Learning-rate schedule `eta_t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LrSchedule {
    pub kind: ScheduleKind,
    pub eta0: f64,
    /// Only read by [`ScheduleKind::InverseStronglyConvex`].
    pub lambda: f64,
}

impl Default for LrSchedule {
    fn default() -> Self {
        Self::inverse_sqrt(0.1)
    }
}

impl LrSchedule {
    pub fn constant(eta0: f64) -> Self {
        Self {
            kind: ScheduleKind::Constant,
            eta0,
            lambda: 0.0,
        }
    }

    pub fn inverse_sqrt(eta0: f64) -> Self {
        Self {
            kind: ScheduleKind::InverseSqrt,
            eta0,
            lambda: 0.0,
        }
    }

    pub fn inverse_strongly_convex(eta0: f64, lambda: f64) -> Self {
        Self {
            kind: ScheduleKind::InverseStronglyConvex,
            eta0,
            lambda,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eta0 > 0.0 && self.eta0.is_finite()) {
            return Err(Error::usage(format!("initial learning rate must be positive, got {}", self.eta0)));
        }
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            return Err(Error::usage(format!("schedule lambda must be nonnegative, got {}", self.lambda)));
        }
        Ok(())
    }

    #[inline]
    pub fn rate(&self, t: u64) -> f64 {
        let t = t as f64;
        match self.kind {
            ScheduleKind::Constant => self.eta0,
            ScheduleKind::InverseSqrt => self.eta0 / (t + 1.0).sqrt(),
            ScheduleKind::InverseStronglyConvex => self.eta0 / (1.0 + self.eta0 * self.lambda * t),
        }
    }
}

/// Hyperparameters common to every online learner.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    pub loss: Loss,
    pub schedule: LrSchedule,
    /// l2 regularization strength.
    pub lambda: f64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            loss: Loss::Logistic,
            schedule: LrSchedule::default(),
            lambda: 0.0,
        }
    }
}

impl OptimizerConfig {
    pub fn new(loss: Loss, schedule: LrSchedule, lambda: f64) -> Self {
        Self {
            loss,
            schedule,
            lambda,
        }
    }

    /// The per-step decay `1 - eta_t * lambda` must stay positive; the
    /// largest step is `eta0` for every schedule.
    pub fn validate(&self) -> Result<()> {
        self.loss.validate()?;
        self.schedule.validate()?;
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            return Err(Error::usage(format!("lambda must be nonnegative, got {}", self.lambda)));
        }
        if self.schedule.eta0 * self.lambda >= 1.0 {
            return Err(Error::usage("eta0 * lambda must be below 1"));
        }
        Ok(())
    }
}
