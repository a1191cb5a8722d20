pub mod check;
pub mod cli;
pub mod eigen;
pub mod error;
pub mod functions;
pub mod io;
pub mod matrix;
pub mod par;
pub mod pinching;
pub mod policy;
pub mod random;
pub mod spectral;
pub mod suite;
pub mod tensor;
pub mod verifier;
