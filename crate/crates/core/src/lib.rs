//! Orbital-use economics: satellite and debris dynamics, open-access and
//! planner launch behaviour, Kessler-region analysis and calibration.
//!
//! ```
//! use orbit_commons::open_access::find_steady_states;
//! use orbit_commons::scenario::Scenario;
//! let states = find_steady_states(&Scenario::qualitative())?;
//! assert_eq!(states.len(), 2);
//! # Ok::<(), orbit_commons::Error>(())
//! ```

pub mod dynamics;
pub mod calibration;
pub mod error;
pub mod grid;
pub mod open_access;
pub mod phase;
pub mod planner;
pub mod roots;
pub mod scenario;
pub mod simple_model;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/overview.md")]
    mod overview {}
    #[doc = include_str!("../../../book/src/dynamics.md")]
    mod dynamics {}
    #[doc = include_str!("../../../book/src/simple_model.md")]
    mod simple_model {}
    #[doc = include_str!("../../../book/src/open_access.md")]
    mod open_access {}
    #[doc = include_str!("../../../book/src/planner.md")]
    mod planner {}
    #[doc = include_str!("../../../book/src/phase.md")]
    mod phase {}
    #[doc = include_str!("../../../book/src/calibration.md")]
    mod calibration {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
