//! Optimal wholesale and retail pricing for a market of two mobile network
//! operators (MNOs) and one entrant virtual operator (MVNO).
//!
//! * [`market`] holds parameters, defection and profit functions.
//! * [`solvers`] computes the closed-form optimal prices per scenario.
//! * [`oracle`] re-derives those optima by brute force and checks KKT systems.
//! * [`game`] builds the 2×2 partnership game and enumerates pure equilibria.
//!
//! ```
//! use mvno_pricing::{market::{Market, MnoId}, solvers};
//!
//! let market = Market::reference();
//! let sol = solvers::solve_part_part_fs(&market, MnoId::One);
//! assert_eq!(sol.p0, Some(30.0));
//! ```

pub mod draws;
pub mod error;
pub mod game;
pub mod grid;
pub mod market;
pub mod oracle;
pub mod solvers;

pub use error::{ModelError, OracleError};
pub use market::{CustomerFlows, DerivedQuantities, Market, MarketParams, MnoId, Scenario};
pub use solvers::{PriceSolution, Thresholds};
