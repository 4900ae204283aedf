//! Which element of a rank interval `[i, j]` is the first one chosen as a
//! splitter, and with what probability.
//!
//! A run stores ranks relative to each subproblem, so the walk carries the
//! absolute rank offset of the current subproblem.

use num::Zero;

use crate::error::{Error, Result};
use crate::exec::{self, Execution};
use crate::prob_core::{ratio, ExactRational};
use crate::quicksort_space::{enumerate, enumerate_all, Run, RunSpace, DEFAULT_ENUM_CAP};

/// Ranks `i..=j` among `n` elements.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RankInterval {
    n: usize,
    i: usize,
    j: usize,
}

impl RankInterval {
    pub fn new(n: usize, i: usize, j: usize) -> Result<Self> {
        if 1 <= i && i <= j && j <= n {
            Ok(RankInterval { n, i, j })
        } else {
            Err(Error::InvalidInterval { n, i, j })
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn low(&self) -> usize {
        self.i
    }

    pub fn high(&self) -> usize {
        self.j
    }

    pub fn size(&self) -> usize {
        self.j - self.i + 1
    }

    pub fn contains(&self, rank: usize) -> bool {
        (self.i..=self.j).contains(&rank)
    }

    /// Every interval of every size for `n` elements.
    pub fn all(n: usize) -> impl Iterator<Item = RankInterval> {
        (1..=n).flat_map(move |i| (i..=n).map(move |j| RankInterval { n, i, j }))
    }
}

/// The absolute rank of the first splitter that lands inside `interval`.
///
/// A size-one subproblem has no splitter step; its single element counts as
/// chosen, which only matters for singleton intervals.
pub fn first_splitter_in_interval(run: &Run, n: usize, interval: &RankInterval) -> Result<usize> {
    if interval.n != n {
        return Err(Error::InvalidInterval {
            n,
            i: interval.i,
            j: interval.j,
        });
    }
    run.validate(n)?;
    Ok(first_splitter_unchecked(run, n, interval))
}

fn first_splitter_unchecked(mut run: &Run, mut size: usize, interval: &RankInterval) -> usize {
    let mut offset = 0;
    loop {
        match run {
            Run::Leaf => {
                // a valid run only reaches a leaf holding the whole interval
                debug_assert!(size == 1 && interval.i == interval.j && offset + 1 == interval.i);
                return offset + 1;
            }
            Run::Node { rank, left, right } => {
                let absolute = offset + rank;
                if interval.contains(absolute) {
                    return absolute;
                }
                if absolute < interval.i {
                    run = right;
                    offset = absolute;
                    size -= rank;
                } else {
                    run = left;
                    size = rank - 1;
                }
            }
        }
    }
}

/// `P(first splitter in interval = i + k)` for `k = 0..s`, over `space`.
pub fn splitter_distribution(
    space: &RunSpace,
    interval: &RankInterval,
    exec: Execution,
) -> Vec<ExactRational> {
    let s = interval.size();
    let n = space.n();
    let runs: Vec<(&Run, &ExactRational)> = space.runs().iter().zip(space.weights()).collect();
    exec::fold_slice(
        exec,
        &runs,
        || vec![ExactRational::zero(); s],
        |mut acc, (run, w)| {
            acc[first_splitter_unchecked(run, n, interval) - interval.i] += *w;
            acc
        },
        |mut a, b| {
            for (x, y) in a.iter_mut().zip(b) {
                *x += y;
            }
            a
        },
    )
}

pub fn splitter_prob_exact(n: usize, interval: &RankInterval, q: usize) -> Result<ExactRational> {
    if !interval.contains(q) {
        return Err(Error::RankOutOfInterval {
            q,
            i: interval.i,
            j: interval.j,
        });
    }
    if interval.n != n {
        return Err(Error::InvalidInterval {
            n,
            i: interval.i,
            j: interval.j,
        });
    }
    let space = enumerate(n)?;
    let mut dist = splitter_distribution(&space, interval, Execution::Sequential);
    Ok(dist.swap_remove(q - interval.i))
}

/// Probability that the elements of ranks `i < j` are compared, i.e. that
/// one of them is the first splitter chosen in `[i, j]`.
pub fn compare_prob_exact(n: usize, i: usize, j: usize) -> Result<ExactRational> {
    if !(1 <= i && i < j && j <= n) {
        return Err(Error::BadPair { n, i, j });
    }
    compare_prob_exact_in(&enumerate(n)?, i, j)
}

/// [`compare_prob_exact`] over an already enumerated space.
pub fn compare_prob_exact_in(space: &RunSpace, i: usize, j: usize) -> Result<ExactRational> {
    let n = space.n();
    if !(1 <= i && i < j && j <= n) {
        return Err(Error::BadPair { n, i, j });
    }
    let interval = RankInterval::new(n, i, j)?;
    let dist = splitter_distribution(space, &interval, Execution::Sequential);
    Ok(&dist[0] + &dist[dist.len() - 1])
}

/// A `(n, interval, q)` triple whose probability differs from `1/s`.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitterException {
    pub interval: RankInterval,
    pub q: usize,
    pub probability: ExactRational,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SplitterSweep {
    pub n_max: usize,
    pub triples_checked: usize,
    pub exceptions: Vec<SplitterException>,
    /// Intervals whose probabilities do not sum to one.
    pub unsplit: Vec<RankInterval>,
}

impl SplitterSweep {
    pub fn passed(&self) -> bool {
        self.exceptions.is_empty() && self.unsplit.is_empty()
    }
}

/// Checks `P(first splitter in [i, j] = q) = 1/(j - i + 1)` for each
/// `q` of each interval, for `1 <= n <= n_max`.
pub fn verify_splitter_lemma(n_max: usize, exec: Execution) -> Result<SplitterSweep> {
    verify_splitter_lemma_with_cap(n_max, DEFAULT_ENUM_CAP, exec)
}

pub fn verify_splitter_lemma_with_cap(
    n_max: usize,
    cap: usize,
    exec: Execution,
) -> Result<SplitterSweep> {
    let spaces = enumerate_all(n_max, cap)?;
    let jobs: Vec<(&RunSpace, RankInterval)> = spaces
        .iter()
        .skip(1)
        .flat_map(|space| RankInterval::all(space.n()).map(move |iv| (space, iv)))
        .collect();
    let results = exec::map_slice(exec, &jobs, |(space, interval)| {
        (
            *interval,
            splitter_distribution(space, interval, Execution::Sequential),
        )
    });

    let mut sweep = SplitterSweep {
        n_max,
        triples_checked: 0,
        exceptions: Vec::new(),
        unsplit: Vec::new(),
    };
    for (interval, dist) in results {
        let expected = ratio(1, interval.size() as i64);
        let total: ExactRational = dist.iter().sum();
        if total != ratio(1, 1) {
            sweep.unsplit.push(interval);
        }
        for (k, p) in dist.into_iter().enumerate() {
            sweep.triples_checked += 1;
            if p != expected {
                sweep.exceptions.push(SplitterException {
                    interval,
                    q: interval.i + k,
                    probability: p,
                });
            }
        }
    }
    Ok(sweep)
}
