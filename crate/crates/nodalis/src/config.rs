//! Resource bounds.

/// Environment variable that overrides both bounds.
pub const MAX_N_ENV: &str = "NODALIS_MAX_N";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    /// Largest vertex count accepted by graph enumeration.
    pub max_n: usize,
    /// Largest `δ` accepted by the node-count pipeline.
    pub max_delta: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_n: 7,
            max_delta: 4,
        }
    }
}

impl Limits {
    /// Defaults, with both bounds replaced by `NODALIS_MAX_N` when it parses.
    pub fn from_env() -> Self {
        match std::env::var(MAX_N_ENV)
            .ok()
            .and_then(|v| v.trim().parse::<usize>().ok())
        {
            Some(v) => Limits {
                max_n: v,
                max_delta: v,
            },
            None => Limits::default(),
        }
    }
}
