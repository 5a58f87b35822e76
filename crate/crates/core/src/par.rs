//! Data-parallel helpers. With the `parallel` feature they run on rayon unless
//! sequential mode has been forced at runtime; otherwise they are plain loops.

use std::sync::atomic::{AtomicBool, Ordering};

static FORCE_SEQUENTIAL: AtomicBool = AtomicBool::new(false);

/// Force (or release) sequential execution process-wide.
pub fn set_sequential(on: bool) {
    FORCE_SEQUENTIAL.store(on, Ordering::SeqCst);
}

pub fn is_parallel() -> bool {
    cfg!(feature = "parallel") && !FORCE_SEQUENTIAL.load(Ordering::Relaxed)
}

pub fn map<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if is_parallel() {
        use rayon::prelude::*;
        return items.par_iter().map(f).collect();
    }
    items.iter().map(f).collect()
}

/// Some element satisfying `f`; the sequential path returns the first one.
pub fn find_any<T, F>(items: &[T], f: F) -> Option<&T>
where
    T: Sync,
    F: Fn(&T) -> bool + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if is_parallel() {
        use rayon::prelude::*;
        return items.par_iter().find_any(|x| f(x));
    }
    items.iter().find(|x| f(x))
}

pub fn all<T, F>(items: &[T], f: F) -> bool
where
    T: Sync,
    F: Fn(&T) -> bool + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if is_parallel() {
        use rayon::prelude::*;
        return items.par_iter().all(f);
    }
    items.iter().all(f)
}

pub fn filter<T, F>(items: &[T], f: F) -> Vec<T>
where
    T: Sync + Send + Clone,
    F: Fn(&T) -> bool + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if is_parallel() {
        use rayon::prelude::*;
        return items.par_iter().filter(|x| f(x)).cloned().collect();
    }
    items.iter().filter(|x| f(x)).cloned().collect()
}

/// Some index in 0..n satisfying `f`.
pub fn find_index<F>(n: u64, f: F) -> Option<u64>
where
    F: Fn(u64) -> bool + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if is_parallel() {
        use rayon::prelude::*;
        return (0..n).into_par_iter().find_any(|&i| f(i));
    }
    (0..n).find(|&i| f(i))
}

/// Indices in 0..n satisfying `f`, ascending.
pub fn filter_index<F>(n: u64, f: F) -> Vec<u64>
where
    F: Fn(u64) -> bool + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if is_parallel() {
        use rayon::prelude::*;
        return (0..n).into_par_iter().filter(|&i| f(i)).collect();
    }
    (0..n).filter(|&i| f(i)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn both_modes_agree() {
        let v: Vec<u64> = (0..1000).collect();
        let a = map(&v, |x| x * x);
        set_sequential(true);
        let b = map(&v, |x| x * x);
        let c = filter(&v, |x| x % 7 == 0);
        set_sequential(false);
        assert_eq!(a, b);
        assert_eq!(c, filter(&v, |x| x % 7 == 0));
        assert!(all(&v, |&x| x < 1000));
        assert_eq!(find_any(&v, |&x| x == 500), Some(&500));
    }
}
