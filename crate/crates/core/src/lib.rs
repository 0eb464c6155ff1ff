//! Tensor-Train vectors with TT-rounding and six orthogonalization kernels
//! (classical and modified Gram-Schmidt with and without a second pass,
//! Cholesky of the Gram matrix, and Householder reflections).
//!
//! ```
//! use ttortho::generators::{krylov_set, KrylovSetSpec};
//! use ttortho::metrics::loss_of_orthogonality;
//! use ttortho::ortho::tt_mgs2;
//!
//! let a = krylov_set(&KrylovSetSpec::new(3, 5, 4).unwrap()).unwrap();
//! let res = tt_mgs2(&a, 1e-8).unwrap();
//! assert!(loss_of_orthogonality(&res.q).unwrap() < 1e-10);
//! ```

pub mod dense;
pub mod error;
pub mod generators;
pub mod io;
pub mod metrics;
pub mod ortho;
pub mod rounding;
pub mod tt;

pub use dense::DenseMatrix;
pub use error::{Error, Result};
pub use ortho::{Kernel, OrthoResult};
pub use rounding::{tt_round, RoundingConfig, RoundingLedger, RoundingMode};
pub use tt::{Core, OperatorCore, TTMatrix, TTVector};
