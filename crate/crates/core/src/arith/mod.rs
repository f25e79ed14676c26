//! Exact arithmetic over F_p, F_p[t] and F_p(t).

mod fp;
mod modulus;
mod poly;
mod ratfunc;

pub use fp::FpElem;
pub use modulus::PrimeModulus;
pub use poly::FpPoly;
pub use ratfunc::RatFunc;
pub(crate) use modulus::is_prime_u64;

use std::sync::atomic::{AtomicUsize, Ordering};

use crate::error::{Error, Result};

/// Default cap on the number of coefficients of any dense polynomial
/// produced by a degree-growing operation.
pub const DEFAULT_DEGREE_CAP: usize = 1_000_000;

static DEGREE_CAP: AtomicUsize = AtomicUsize::new(DEFAULT_DEGREE_CAP);

/// Current cap on dense polynomial length (coefficients, i.e. degree + 1).
pub fn degree_cap() -> usize {
    DEGREE_CAP.load(Ordering::Relaxed)
}

/// Changes the process-wide dense polynomial length cap.
pub fn set_degree_cap(cap: usize) {
    DEGREE_CAP.store(cap.max(1), Ordering::Relaxed);
}

/// Rejects a prospective dense polynomial of `len` coefficients.
pub(crate) fn check_len(len: u128) -> Result<()> {
    let cap = degree_cap() as u128;
    if len > cap {
        return Err(Error::Resource(format!(
            "dense polynomial with {len} coefficients exceeds the degree cap of {cap}"
        )));
    }
    Ok(())
}
