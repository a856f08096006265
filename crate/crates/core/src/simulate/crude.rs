use alloc::format;

use crate::rng::StreamRng;
use crate::scale::{scaled_threshold, ScaleFunction};
use crate::tails::TailModel;
use crate::{Error, Result};

use super::{binomial_stderr, chunk_count, chunk_len, Estimate, Executor, Method};

/// Fraction of `reps` replications with `S_n - n mu > x sqrt(n g(log n))`.
///
/// Chunk `k` of the replications draws from stream `k` of `seed`.
pub fn crude_mc<E: Executor>(
    model: &TailModel,
    g: &ScaleFunction,
    n: u64,
    x: f64,
    reps: u64,
    seed: u64,
    exec: &E,
) -> Result<Estimate> {
    if reps < 1000 {
        return Err(Error::invalid(
            "reps",
            format!("must be >= 1000, got {reps}"),
        ));
    }
    if !(x > 0.0) {
        return Err(Error::invalid("x", format!("must be > 0, got {x}")));
    }
    let threshold = scaled_threshold(g, x, n as f64)?;
    let mu = model.moments().mean;
    if !mu.is_finite() {
        return Err(Error::invalid("model", "mean must be finite"));
    }
    let center = n as f64 * mu;
    let hits: u64 = exec
        .map_chunks(chunk_count(reps), |k| {
            let mut rng = StreamRng::new(seed, k as u64);
            let mut hits = 0u64;
            for _ in 0..chunk_len(reps, k) {
                let mut s = 0.0;
                for _ in 0..n {
                    s += model.sample_with(&mut rng);
                }
                if s - center > threshold {
                    hits += 1;
                }
            }
            hits
        })
        .into_iter()
        .sum();
    let p = hits as f64 / reps as f64;
    let log_p = if hits == 0 {
        f64::NEG_INFINITY
    } else {
        crate::math::ln(p)
    };
    let mut e = Estimate::from_log(
        g,
        n,
        x,
        log_p,
        binomial_stderr(p, reps),
        Method::Crude,
        hits,
        reps,
    );
    e.p_hat = p;
    Ok(e)
}
