use std::thread;
use std::time::Duration;

use serde::{Deserialize, Serialize};

/// Exponential backoff for transport calls.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RetryPolicy {
    /// Total attempts including the first one; at least 1.
    pub max_attempts: u32,
    pub base_delay_ms: u64,
    pub max_delay_ms: u64,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        Self {
            max_attempts: 3,
            base_delay_ms: 500,
            max_delay_ms: 8_000,
        }
    }
}

impl RetryPolicy {
    pub fn no_delay(max_attempts: u32) -> Self {
        Self {
            max_attempts,
            base_delay_ms: 0,
            max_delay_ms: 0,
        }
    }

    fn delay(&self, attempt: u32) -> Duration {
        let factor = 1u64 << attempt.min(16);
        Duration::from_millis(self.base_delay_ms.saturating_mul(factor).min(self.max_delay_ms))
    }

    /// Runs `op` until it succeeds or the attempt budget is spent. Returns
    /// the last error together with the number of attempts made.
    pub fn run<T, E, F>(&self, op: F) -> Result<T, (E, u32)>
    where
        F: FnMut(u32) -> Result<T, E>,
    {
        self.run_if(op, |_| true)
    }

    /// Like [`RetryPolicy::run`], but gives up at once on errors for which
    /// `retryable` is false.
    pub fn run_if<T, E, F, R>(&self, mut op: F, retryable: R) -> Result<T, (E, u32)>
    where
        F: FnMut(u32) -> Result<T, E>,
        R: Fn(&E) -> bool,
    {
        let attempts = self.max_attempts.max(1);
        let mut attempt = 0;
        loop {
            match op(attempt) {
                Ok(v) => return Ok(v),
                Err(e) if attempt + 1 >= attempts || !retryable(&e) => return Err((e, attempt + 1)),
                Err(_) => {
                    let d = self.delay(attempt);
                    if !d.is_zero() {
                        thread::sleep(d);
                    }
                    attempt += 1;
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn succeeds_after_transient_failures() {
        let policy = RetryPolicy::no_delay(3);
        let out: Result<u32, (&str, u32)> =
            policy.run(|attempt| if attempt < 2 { Err("down") } else { Ok(attempt) });
        assert_eq!(out, Ok(2));
    }

    #[test]
    fn gives_up_after_budget() {
        let policy = RetryPolicy::no_delay(2);
        let mut calls = 0;
        let out: Result<(), (&str, u32)> = policy.run(|_| {
            calls += 1;
            Err("down")
        });
        assert_eq!(out, Err(("down", 2)));
        assert_eq!(calls, 2);
    }

    #[test]
    fn backoff_is_capped() {
        let p = RetryPolicy { max_attempts: 10, base_delay_ms: 100, max_delay_ms: 1_000 };
        assert_eq!(p.delay(0), Duration::from_millis(100));
        assert_eq!(p.delay(2), Duration::from_millis(400));
        assert_eq!(p.delay(9), Duration::from_millis(1_000));
    }

    #[test]
    fn permanent_errors_are_not_retried() {
        let mut calls = 0;
        let out: Result<(), (&str, u32)> = RetryPolicy::no_delay(5).run_if(
            |_| {
                calls += 1;
                Err("bad request")
            },
            |e| *e != "bad request",
        );
        assert_eq!(out, Err(("bad request", 1)));
        assert_eq!(calls, 1);
    }
}
