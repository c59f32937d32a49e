//! Exact character theory for `GL_2` over truncated power-series rings
//! `F_q[t]/t^r`: higher Deligne-Lusztig characters at even level, the
//! associated two-variable Green functions, and machine checks of the
//! identities relating them.

pub mod classfun;
pub mod cyclo;
pub mod dl;
mod error;
pub mod experiment;
pub mod gamma;
pub mod green;
pub mod grp;
pub mod rings;
pub mod tori;

pub use cyclo::CycloNum;
pub use error::{Error, Result};
