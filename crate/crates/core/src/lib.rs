//! Exact q-expansions of elliptic genera twisted by E8 and E8×E8 bundles,
//! together with mechanical checks of their modular and anomaly identities.

pub mod charforms;
pub mod e8char;
pub mod eisenstein;
pub mod error;
pub mod genus;
pub mod poly;
pub mod qseries;
pub mod report;
pub mod ring;
pub mod suite;
pub mod theta;
pub mod trunc;

pub use error::{Error, Result};
