//! The functor from filtered modules to (φ,Γ)-modules over the window ring.

mod glue;
mod lattice;
pub mod polymat;

pub use glue::{det_log, det_slope_certificate, glue, glue_with_gamma, LogMat, PhiGammaModule};
pub use lattice::{build_lattices, nzero_frame, total_monodromy, LatticeFamily};
mod verify;
pub use verify::{contains, iota_mat, perturbed_sections, recover_filtered, same_filtered, verify_module, verify_sections, working_precision, Check, TMat, VerifyReport};
