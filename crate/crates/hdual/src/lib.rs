//! H-duality toolkit for fixed-step first-order methods.
//!
//! A method that runs N gradient steps with memory is a lower
//! triangular stepsize matrix H. Reflecting H across its anti-diagonal
//! gives another method whose gradient-norm guarantee mirrors the
//! original function-value guarantee. This crate builds the matrices,
//! verifies the certificates behind that correspondence, runs the
//! methods on test problems, and reproduces the continuous-time limit.

pub mod certify;
pub mod composite;
pub mod continuous;
pub mod io;
pub mod linalg;
pub mod method;
pub mod testbed;
