//! Channel models, IRS phase control, closed-form ergodic rates and a Monte Carlo
//! engine for mmWave systems where several operators each deploy their own IRS.

pub mod channel;
pub mod error;
pub mod irs;
pub mod rates;
pub mod sim;
pub mod specfun;

pub use channel::{Geometry, Point, Rect};
pub use error::{Error, Result};
pub use irs::{EventLabel, PhaseSolver, SchemeKind, SchemePolicy};
pub use rates::{LinkBudget, MultiMoBudget, SideBudget};
pub use sim::{run_campaign, sweep, Campaign, RateReport, SweepAxis, SweepPoint, SystemConfig};
