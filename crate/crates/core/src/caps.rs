//! Size caps for materialized matrices.

/// Environment variable that overrides both caps with a single value.
pub const CAP_ENV: &str = "CROSS_SDP_CAP";

/// Largest matrix dimensions the exact routines will build.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Caps {
    /// Bound on `C(n, k)` for Johnson matrices and on `2 C(n, k)` for an assembled `S`.
    pub uniform: usize,
    /// Bound on `2^n` for cube matrices and on `2 * 2^n` for an assembled `S`.
    pub measure: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            uniform: 150,
            measure: 128,
        }
    }
}

impl Caps {
    /// Defaults, overridden by `CROSS_SDP_CAP` when it parses as an integer.
    pub fn from_env() -> Self {
        match std::env::var(CAP_ENV).ok().and_then(|v| v.trim().parse().ok()) {
            Some(cap) => Caps {
                uniform: cap,
                measure: cap,
            },
            None => Caps::default(),
        }
    }
}
