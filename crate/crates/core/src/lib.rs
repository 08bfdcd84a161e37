//! Zero-concentrated differentially private (zCDP) confidence intervals for
//! population proportions under stratified random sampling.
//!
//! The crate is organised bottom-up:
//!
//! - [`design`], [`budget`], [`ci`], [`quantile`]: shared domain types, zCDP
//!   budget arithmetic and the standard normal quantile.
//! - [`random`]: seedable, stream-splittable randomness (Gaussian noise and
//!   exact hypergeometric counts).
//! - [`estimators`]: the non-private stratified estimator and Wald interval.
//! - [`mechanisms`]: sensitivities and the Gaussian mechanism.
//! - [`dp_ci`]: the three private interval algorithms and the
//!   difference-of-proportions interval.
//! - [`analysis`]: extrinsic variances, width ratios and reciprocal-normal
//!   moment expansions with a quadrature cross-check.
//! - [`sim`]: finite-population simulation harness.
//! - [`cli`]: the command-line front end used by the `stratdp` binary.
//!
//! ```
//! use stratdp::{Design, StratumCounts, PrivacyBudget, RandomStream};
//! use stratdp::dp_ci::{str_nz_pub_sz, DpOptions};
//!
//! let design = Design::from_sizes(&[(2000, 100), (1500, 80)]).unwrap();
//! let counts = StratumCounts::new(vec![48, 35]);
//! let budget = PrivacyBudget::new(0.05).unwrap();
//! let stream = RandomStream::new(7, 0);
//! let (ci, _strata) =
//!     str_nz_pub_sz(&stream, &design, &counts, &budget, &DpOptions::default()).unwrap();
//! assert!(ci.lower <= ci.point_estimate && ci.point_estimate <= ci.upper);
//! assert_eq!(ci.budget_spent.unwrap().rho(), 0.05);
//! ```

pub mod analysis;
pub mod budget;
pub mod ci;
pub mod cli;
pub mod design;
pub mod dp_ci;
mod error;
pub mod estimators;
pub mod mechanisms;
pub mod quantile;
pub mod random;
pub mod sim;

pub use budget::PrivacyBudget;
pub use ci::{AlgorithmTag, CiResult, ClipFlags, NoiseRecord};
pub use design::{Design, StratumCounts, StratumDesign};
pub use error::{Error, Result};
pub use quantile::normal_quantile;
pub use random::{derive_stream, RandomStream};
