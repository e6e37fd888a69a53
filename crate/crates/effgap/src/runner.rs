use effgap_core::simulate::RepRunner;
use effgap_core::Result;
use rayon::prelude::*;
use rayon::ThreadPool;

/// Runs replications on a rayon pool. Outcomes come back in replication
/// order, and each replication seeds its own generator, so the result does
/// not depend on the number of workers.
pub struct RayonRunner {
    pool: ThreadPool,
}

impl RayonRunner {
    /// `threads = None` uses every available core.
    pub fn new(threads: Option<usize>) -> std::result::Result<Self, rayon::ThreadPoolBuildError> {
        let mut b = rayon::ThreadPoolBuilder::new();
        if let Some(t) = threads {
            b = b.num_threads(t.max(1));
        }
        Ok(Self { pool: b.build()? })
    }
}

impl RepRunner for RayonRunner {
    fn run(&self, reps: usize, job: &(dyn Fn(usize) -> Result<f64> + Sync)) -> Vec<Result<f64>> {
        self.pool
            .install(|| (0..reps).into_par_iter().map(job).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use effgap_core::simulate::Sequential;

    #[test]
    fn order_matches_sequential() {
        let job = |i: usize| Ok((i as f64).sqrt());
        let a = RayonRunner::new(Some(4)).unwrap().run(1000, &job);
        assert_eq!(a, Sequential.run(1000, &job));
    }
}
