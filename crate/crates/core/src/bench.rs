//! Wall-time comparison of the fast decision on S against dense elimination on A.

use std::time::{Duration, Instant};

use crate::analysis::decide;
use crate::boundary::build_boundary;
use crate::cyclolinalg::{rank_mod_prime_until, sparse_rank_until, ZwMatrix};
use crate::error::Result;
use crate::numtheory::binomial;
use crate::report::BenchRow;
use crate::scomplex::{build_complex, ComplexSpec};

/// A timed run that may have been abandoned at its deadline.
#[derive(Debug, Clone, PartialEq)]
pub struct Timed {
    /// Median over completed repetitions, or the elapsed time when abandoned.
    pub ms: f64,
    /// Whether A was found rank deficient; `None` when the deadline passed.
    pub singular: Option<bool>,
}

impl Timed {
    pub fn completed(&self) -> bool {
        self.singular.is_some()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchResult {
    pub n: u64,
    pub c: u64,
    pub fast: Timed,
    /// Certified exact rank of the dense A.
    pub exact: Timed,
    /// Rank of the dense A modulo one word-size prime.
    pub modp: Timed,
}

impl BenchResult {
    /// Verdicts of all methods that finished agree.
    pub fn agree(&self) -> bool {
        let v = self.fast.singular;
        [&self.exact, &self.modp]
            .iter()
            .all(|t| t.singular.is_none() || t.singular == v)
    }

    /// Rows `n,method,median_ms`; an abandoned method is reported as `<method>_lower_bound`.
    pub fn rows(&self) -> Vec<BenchRow> {
        [
            ("fast", &self.fast),
            ("exact", &self.exact),
            ("modp", &self.modp),
        ]
        .into_iter()
        .map(|(name, t)| BenchRow {
            n: self.n,
            method: if t.completed() {
                name.to_string()
            } else {
                format!("{name}_lower_bound")
            },
            median_ms: (t.ms * 1000.0).round() / 1000.0,
        })
        .collect()
    }
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        (v[m - 1] + v[m]) / 2.0
    }
}

fn ms(d: Duration) -> f64 {
    d.as_secs_f64() * 1000.0
}

/// Repeats `f` up to `reps` times, stopping early when half the budget is used.
fn timed(reps: usize, budget: Duration, mut f: impl FnMut(Instant) -> Option<bool>) -> Timed {
    let mut times = Vec::new();
    let mut verdict = None;
    let start = Instant::now();
    for _ in 0..reps.max(1) {
        let t = Instant::now();
        match f(start + budget) {
            Some(v) => {
                times.push(ms(t.elapsed()));
                verdict = Some(v);
            }
            None if times.is_empty() => {
                return Timed {
                    ms: ms(t.elapsed()),
                    singular: None,
                }
            }
            None => break,
        }
        if start.elapsed() * 2 > budget {
            break;
        }
    }
    Timed {
        ms: median(times),
        singular: verdict,
    }
}

/// Times the three methods on X_{2,n,c}; the dense methods give up after `budget`.
pub fn bench_instance(
    n: u64,
    c: u64,
    reps: usize,
    budget: Duration,
    seed: u64,
) -> Result<BenchResult> {
    let full = binomial(n - 1, 2) as usize;
    let mut fast_err = None;
    let fast = timed(reps, Duration::MAX / 4, |_| match decide(n, c) {
        Ok(d) => Some(d.singular),
        Err(e) => {
            fast_err = Some(e);
            Some(false)
        }
    });
    if let Some(e) = fast_err {
        return Err(e);
    }
    let a = build_boundary(&build_complex(ComplexSpec::new(2, n, c)?)?)?;
    let zw = ZwMatrix::from_int_rows(a.n_cols, a.int_rows());
    let exact = timed(reps, budget, |deadline| {
        sparse_rank_until(zw.clone(), seed, Some(deadline)).map(|r| r < full)
    });
    let modp = timed(reps, budget, |deadline| {
        rank_mod_prime_until(&zw, seed, Some(deadline)).map(|(_, r)| r < full)
    });
    Ok(BenchResult {
        n,
        c,
        fast,
        exact,
        modp,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_instance_agrees() {
        let r = bench_instance(13, 5, 3, Duration::from_secs(60), 0).unwrap();
        assert!(r.fast.completed() && r.exact.completed() && r.modp.completed());
        assert_eq!(r.fast.singular, Some(true));
        assert!(r.agree());
        assert_eq!(r.rows().len(), 3);
    }

    #[test]
    fn deadline_is_reported_as_lower_bound() {
        let r = bench_instance(59, 3, 1, Duration::from_millis(1), 0).unwrap();
        assert!(!r.exact.completed());
        assert!(r.rows().iter().any(|row| row.method == "exact_lower_bound"));
        assert!(r.agree());
    }
}
