//! Q_p, the cyclotomic fields K_n and truncated series over them.

pub mod cyclotomic;
pub mod padic;
pub mod tseries;

pub use cyclotomic::{field, CycElem, CycField};
pub use padic::PAdicScalar;
pub use tseries::{TSeries, TVal};
