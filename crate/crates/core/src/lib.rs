//! Exact verification of closed-form SDP dual certificates for cross
//! 2-intersecting families, in the k-uniform setting and on the p-biased cube,
//! with brute-force oracles for small instances.

pub mod caps;
pub mod cert_measure;
pub mod cert_uniform;
pub mod certificate;
pub mod cli;
pub mod error;
pub mod exactlin;
pub mod exactnum;
pub mod hamming;
pub mod johnson;
pub mod oracle;

pub use caps::Caps;
pub use cert_measure::DualCertificateMeasure;
pub use cert_uniform::DualCertificateUniform;
pub use error::{Error, Result};
pub use exactnum::{QuadScalar, Rational};
