//! Computation and numerical certification for complex Hénon maps.
//!
//! The crate covers the map itself and its filtration ([`map`]), Green
//! functions and slice renders ([`potential`]), periodic orbits and the
//! saddle cloud ([`periodic`]), interval box covers with cone-field
//! certificates for dominated splitting and hyperbolicity ([`splitting`]),
//! strong stable and local unstable manifolds ([`manifolds`]), and the
//! one-dimensional polynomial companion ([`onedim`]).

pub mod error;
pub mod interval;
pub mod io;
pub mod linalg;
pub mod manifolds;
pub mod map;
pub mod onedim;
pub mod periodic;
pub mod poly;
pub mod potential;
pub mod qrng;
pub mod splitting;
pub mod cli;

pub use error::{HenonError, Result};
pub use linalg::{Mat2C, Point2C, Vec2C, C64};
pub use map::{Direction, FiltrationData, HenonMap};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
