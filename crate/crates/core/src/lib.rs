//! Arithmetic of ring class fields of imaginary quadratic fields at the prime 2.

pub mod bigcomplex;
pub mod cache;
pub mod cm;
pub mod elliptic;
pub mod formalgroup;
pub mod iwasawa;
pub mod linalg;
pub mod lll;
pub mod nf;
pub mod order;
pub mod padic;
pub mod pipeline;
pub mod poly;
pub mod units;
mod serde_util;
