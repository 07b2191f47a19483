//! Process-wide numerical tolerance.
//!
//! Every partial-sum inequality, normalization check and rank count in the
//! crate is evaluated against this value. It defaults to `1e-9`.

use std::sync::atomic::{AtomicU64, Ordering};

pub const DEFAULT_EPSILON: f64 = 1e-9;

// f64 bits of DEFAULT_EPSILON
static EPSILON_BITS: AtomicU64 = AtomicU64::new(0x3E11_2E0B_E826_D695);

/// Current tolerance.
pub fn epsilon() -> f64 {
    f64::from_bits(EPSILON_BITS.load(Ordering::Relaxed))
}

/// Replace the global tolerance. Non-positive or non-finite values are ignored.
pub fn set_epsilon(eps: f64) {
    if eps.is_finite() && eps > 0.0 {
        EPSILON_BITS.store(eps.to_bits(), Ordering::Relaxed);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_bits_match_constant() {
        assert_eq!(f64::from_bits(0x3E11_2E0B_E826_D695), DEFAULT_EPSILON);
    }
}
