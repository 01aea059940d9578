//! Ground truth by enumeration over finite fields.
//!
//! Loops that scan large index ranges are split over a rayon pool whose size
//! comes from `KSTACK_WORKERS` (default: rayon's choice). Totals are exact
//! integer sums, so results do not depend on the schedule.

mod cubic;
mod field;
mod groups;

use std::time::Instant;

use num_rational::BigRational;
use num_bigint::BigInt;
use serde_json::{json, Value};

use crate::error::{Error, Result};

pub use cubic::{mass_m13, smooth_cubic_count, CubicForm, CubicOracle, CENSUS_MAX_Q, MONOMIALS};
pub use field::{Elt, FieldContext, MAX_ORDER};
pub use groups::{
    conjugacy_classes, cycle_type, gl_count, monomial_quotient_mass, permutations,
    scaling_quotient_mass, sigma_class_mass, Stratum,
};

/// Environment variable holding the number of enumeration workers.
pub const WORKERS_ENV: &str = "KSTACK_WORKERS";

/// Enumeration budget: at most this many candidates per scan.
pub const ENUMERATION_BUDGET: u64 = 100_000_000;

pub(crate) fn check_budget(q: u64, exponent: u32, what: &str) -> Result<()> {
    match q.checked_pow(exponent) {
        Some(n) if n <= ENUMERATION_BUDGET => Ok(()),
        _ => Err(Error::BudgetExceeded(format!(
            "{what}: {q}^{exponent} candidates exceeds {ENUMERATION_BUDGET}"
        ))),
    }
}

pub(crate) fn worker_pool() -> rayon::ThreadPool {
    let n = std::env::var(WORKERS_ENV)
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .unwrap_or(0);
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build()
        .expect("thread pool")
}

/// An exact groupoid mass and how it was obtained.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MassResult {
    pub value: BigRational,
    pub method: String,
    pub elapsed_ms: u64,
}

impl MassResult {
    pub(crate) fn new(value: BigRational, method: String, start: Instant) -> Self {
        Self {
            value,
            method,
            elapsed_ms: start.elapsed().as_millis() as u64,
        }
    }

    /// `{"mass": {"num": ..., "den": ...}, "method": ..., "elapsed_ms": ...}`.
    pub fn to_json(&self) -> Value {
        json!({
            "mass": rational_json(&self.value),
            "method": self.method,
            "elapsed_ms": self.elapsed_ms,
        })
    }
}

/// An integer as a JSON number, or as a decimal string beyond 64 bits.
pub fn integer_json(n: &BigInt) -> Value {
    i64::try_from(n).map_or_else(|_| Value::String(n.to_string()), Value::from)
}

/// `{"num": ..., "den": ...}` in lowest terms with positive denominator.
pub fn rational_json(x: &BigRational) -> Value {
    json!({"num": integer_json(x.numer()), "den": integer_json(x.denom())})
}
