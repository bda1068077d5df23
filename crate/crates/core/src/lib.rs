pub mod combi;
pub mod cover;
pub mod error;
pub mod exactnum;
pub mod match_protocol;
pub mod permext;
pub mod protocol;
pub mod slack;
pub mod sortnet;
pub mod spt_protocol;

pub use error::{Error, Result};
pub use exactnum::{mat_mul, mat_mul_eq, MatMulCheck, RatMatrix, Rational};
