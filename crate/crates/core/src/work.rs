//! Instrumented work counter.
//!
//! Refinement, quotient scans and lifting charge one unit per adjacency
//! entry or representation entry they touch. The counter is thread-local so
//! concurrent pipelines do not interfere. A soft limit lets callers abort
//! speculative work (probing) once a budget is spent.

use std::cell::Cell;

thread_local! {
    static COUNTER: Cell<u64> = const { Cell::new(0) };
    static LIMIT: Cell<u64> = const { Cell::new(u64::MAX) };
}

#[inline]
pub fn charge(units: usize) {
    COUNTER.with(|c| c.set(c.get().wrapping_add(units as u64)));
}

#[inline]
pub fn count() -> u64 {
    COUNTER.with(|c| c.get())
}

/// True once the counter has passed the active limit.
#[inline]
pub fn exhausted() -> bool {
    count() > LIMIT.with(|l| l.get())
}

/// Runs `f` and returns its result together with the work it charged.
pub fn measure<T>(f: impl FnOnce() -> T) -> (T, u64) {
    let start = count();
    let out = f();
    (out, count() - start)
}

/// Runs `f` with a limit of `budget` further units. Nested limits keep the
/// tighter one.
pub fn with_budget<T>(budget: u64, f: impl FnOnce() -> T) -> T {
    let deadline = count().saturating_add(budget);
    let prev = LIMIT.with(|l| l.replace(l.get().min(deadline)));
    let out = f();
    LIMIT.with(|l| l.set(prev));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn budget_nests_and_restores() {
        let (_, spent) = measure(|| {
            with_budget(10, || {
                charge(5);
                assert!(!exhausted());
                with_budget(100, || {
                    charge(6);
                    assert!(exhausted());
                });
            });
            assert!(!exhausted());
        });
        assert_eq!(spent, 11);
    }
}
