//! Data-parallel helpers with a sequential fallback.
//!
//! With the `parallel` feature the [`Execution::Parallel`] mode maps over a
//! rayon pool; without it every mode runs on the calling thread. Results are
//! always returned in index order.

/// How row-wise work (signatures, similarity rows, weight rows) is executed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Sequential,
    #[default]
    Parallel,
}

impl Execution {
    /// Whether this mode actually fans out in the current build.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Execution::Parallel
    }
}

/// `(0..n).map(f)` collected in order.
pub fn map_range<T, F>(exec: Execution, n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        use rayon::prelude::*;
        return (0..n).into_par_iter().map(f).collect();
    }
    let _ = exec;
    (0..n).map(f).collect()
}

/// Fill fixed-width rows of `out` in place: `f(row_index, row)`.
pub fn for_each_row<T, F>(exec: Execution, out: &mut [T], width: usize, f: F)
where
    T: Send,
    F: Fn(usize, &mut [T]) + Sync + Send,
{
    if width == 0 {
        return;
    }
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        use rayon::prelude::*;
        out.par_chunks_mut(width)
            .enumerate()
            .for_each(|(i, row)| f(i, row));
        return;
    }
    let _ = exec;
    out.chunks_mut(width)
        .enumerate()
        .for_each(|(i, row)| f(i, row));
}

/// Number of workers the parallel mode would use.
pub fn current_threads() -> usize {
    #[cfg(feature = "parallel")]
    {
        rayon::current_num_threads()
    }
    #[cfg(not(feature = "parallel"))]
    {
        1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn modes_agree() {
        let seq = map_range(Execution::Sequential, 100, |i| i * i);
        let par = map_range(Execution::Parallel, 100, |i| i * i);
        assert_eq!(seq, par);

        let mut a = vec![0usize; 12];
        let mut b = vec![0usize; 12];
        for_each_row(Execution::Sequential, &mut a, 4, |i, r| {
            r.iter_mut().for_each(|x| *x = i)
        });
        for_each_row(Execution::Parallel, &mut b, 4, |i, r| {
            r.iter_mut().for_each(|x| *x = i)
        });
        assert_eq!(a, b);
        assert_eq!(a[11], 2);
    }
}
