//! Bounded fan-out over a slice with order-preserving results.

use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::sync::Mutex;
use std::thread;

/// Applies `f` to every item using at most `limit` worker threads, so no
/// more than `limit` calls are ever outstanding. Results come back in input
/// order. Once `halt` returns true for some result, no further items are
/// dispatched; undispatched slots are `None`.
pub fn bounded_map<I, O, F, H>(items: &[I], limit: usize, f: F, halt: H) -> Vec<Option<O>>
where
    I: Sync,
    O: Send,
    F: Fn(usize, &I) -> O + Sync,
    H: Fn(&O) -> bool + Sync,
{
    let workers = limit.max(1).min(items.len());
    let slots: Vec<Mutex<Option<O>>> = items.iter().map(|_| Mutex::new(None)).collect();
    if workers == 0 {
        return Vec::new();
    }
    let next = AtomicUsize::new(0);
    let stop = AtomicBool::new(false);

    thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                if stop.load(Ordering::SeqCst) {
                    break;
                }
                let i = next.fetch_add(1, Ordering::SeqCst);
                if i >= items.len() {
                    break;
                }
                let out = f(i, &items[i]);
                if halt(&out) {
                    stop.store(true, Ordering::SeqCst);
                }
                *slots[i].lock().expect("result slot poisoned") = Some(out);
            });
        }
    });

    slots
        .into_iter()
        .map(|m| m.into_inner().expect("result slot poisoned"))
        .collect()
}

/// [`bounded_map`] without early stopping.
pub fn map_all<I, O, F>(items: &[I], limit: usize, f: F) -> Vec<O>
where
    I: Sync,
    O: Send,
    F: Fn(usize, &I) -> O + Sync,
{
    bounded_map(items, limit, f, |_| false)
        .into_iter()
        .map(|o| o.expect("every item dispatched"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::time::Duration;

    #[test]
    fn preserves_order() {
        let items: Vec<u64> = (0..50).collect();
        let out = map_all(&items, 7, |_, x| {
            thread::sleep(Duration::from_micros((50 - x) * 20));
            x * 2
        });
        assert_eq!(out, items.iter().map(|x| x * 2).collect::<Vec<_>>());
    }

    #[test]
    fn never_exceeds_limit() {
        let inflight = AtomicUsize::new(0);
        let peak = AtomicUsize::new(0);
        let items = vec![(); 40];
        map_all(&items, 3, |_, _| {
            let now = inflight.fetch_add(1, Ordering::SeqCst) + 1;
            peak.fetch_max(now, Ordering::SeqCst);
            thread::sleep(Duration::from_millis(2));
            inflight.fetch_sub(1, Ordering::SeqCst);
        });
        assert!(peak.load(Ordering::SeqCst) <= 3);
    }

    #[test]
    fn halts_dispatch() {
        let items: Vec<usize> = (0..100).collect();
        let out = bounded_map(&items, 1, |_, x| *x, |x| *x == 10);
        assert_eq!(out[10], Some(10));
        assert!(out[11..].iter().all(Option::is_none));
    }

    #[test]
    fn empty_input() {
        let items: Vec<u8> = Vec::new();
        assert!(map_all(&items, 4, |_, x| *x).is_empty());
    }
}
