//! The probability space of QuickSort runs on `n` distinct elements.
//!
//! `Q_0 = Q_1 = {⊥}`. For `n >= 2` a run picks a splitter rank `i` uniformly
//! from `1..=n` and continues with independent runs on the `i - 1` smaller
//! and `n - i` larger elements, so
//! `q_n(i, a, b) = (1/n) · q_{i-1}(a) · q_{n-i}(b)` and
//! `t_n(i, a, b) = n - 1 + t_{i-1}(a) + t_{n-i}(b)`.
//!
//! [`enumerate`] materializes the space directly from that recursion;
//! [`build_via_core`] builds it a second way from the generic composition
//! primitives of [`crate::prob_core`].

use std::collections::BTreeMap;
use std::fmt;

use num::{BigUint, One, Zero};

use crate::error::{Error, Result};
use crate::prob_core::{
    self, audit_total, conditional_compose_with, integer, product, ratio, ExactRational,
    FiniteSpace,
};

mod run;

pub use run::{comparisons, run_probability, Run, RunTree};

pub const DEFAULT_ENUM_CAP: usize = 12;

/// `(Q_n, q_n)` with every run listed.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSpace {
    n: usize,
    runs: Vec<Run>,
    weights: Vec<ExactRational>,
    comparisons: Vec<u64>,
}

impl RunSpace {
    fn base(n: usize) -> RunSpace {
        RunSpace {
            n,
            runs: vec![Run::Leaf],
            weights: vec![ExactRational::one()],
            comparisons: vec![0],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.runs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.runs.is_empty()
    }

    pub fn runs(&self) -> &[Run] {
        &self.runs
    }

    pub fn weights(&self) -> &[ExactRational] {
        &self.weights
    }

    /// `t_n` for each run, parallel to [`RunSpace::runs`].
    pub fn comparison_counts(&self) -> &[u64] {
        &self.comparisons
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Run, &ExactRational, u64)> {
        self.runs
            .iter()
            .zip(&self.weights)
            .zip(&self.comparisons)
            .map(|((r, w), &t)| (r, w, t))
    }

    /// `E(t_n) = Σ q_n(run) · t_n(run)`.
    pub fn expected_comparisons(&self) -> ExactRational {
        let mut total = ExactRational::zero();
        for (_, w, t) in self.iter() {
            if t != 0 {
                total += w * integer(t as i64);
            }
        }
        total
    }

    /// Distribution of `t_n`.
    pub fn comparison_pmf(&self) -> BTreeMap<u64, ExactRational> {
        let mut pmf = BTreeMap::new();
        for (_, w, t) in self.iter() {
            *pmf.entry(t).or_insert_with(ExactRational::zero) += w;
        }
        pmf
    }

    /// The same space as a generic [`FiniteSpace`] labelled by runs.
    pub fn to_finite_space(&self) -> FiniteSpace<Run> {
        prob_core::make_space(self.runs.clone(), self.weights.clone())
            .expect("run spaces are normalized")
    }
}

fn check_cap(n: usize, cap: usize) -> Result<()> {
    if n > cap {
        Err(Error::TooLarge {
            what: "run enumeration",
            n,
            cap,
        })
    } else {
        Ok(())
    }
}

/// `Q_n` under the default cap.
pub fn enumerate(n: usize) -> Result<RunSpace> {
    enumerate_with_cap(n, DEFAULT_ENUM_CAP)
}

pub fn enumerate_with_cap(n: usize, cap: usize) -> Result<RunSpace> {
    Ok(enumerate_all(n, cap)?.pop().expect("at least Q_0"))
}

/// `Q_0, …, Q_{n_max}`. Each space is assembled from the earlier ones.
///
/// Runs are ordered by root rank, then by the left subrun's position in its
/// own space, then by the right subrun's.
pub fn enumerate_all(n_max: usize, cap: usize) -> Result<Vec<RunSpace>> {
    check_cap(n_max, cap)?;
    let mut spaces: Vec<RunSpace> = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        let space = if n <= 1 {
            RunSpace::base(n)
        } else {
            let total = run_count(n).try_into().expect("capped sizes fit in usize");
            let mut runs = Vec::with_capacity(total);
            let mut weights = Vec::with_capacity(total);
            let mut counts = Vec::with_capacity(total);
            let pick = ratio(1, n as i64);
            for i in 1..=n {
                let (left, right) = (&spaces[i - 1], &spaces[n - i]);
                for (a, wa, ta) in left.iter() {
                    let wia = &pick * wa;
                    for (b, wb, tb) in right.iter() {
                        runs.push(Run::node(i, a.clone(), b.clone()));
                        weights.push(&wia * wb);
                        counts.push(n as u64 - 1 + ta + tb);
                    }
                }
            }
            RunSpace {
                n,
                runs,
                weights,
                comparisons: counts,
            }
        };
        let total: ExactRational = space.weights.iter().sum();
        assert!(audit_total(&total), "Q_{n} sums to {total}");
        spaces.push(space);
    }
    Ok(spaces)
}

/// `|Q_n|` by the counting version of the same recursion:
/// `C_0 = C_1 = 1`, `C_n = Σ_{i=1..n} C_{i-1} C_{n-i}`.
pub fn run_count(n: usize) -> BigUint {
    let mut counts: Vec<BigUint> = vec![BigUint::one(); 2];
    for m in 2..=n {
        let c = (1..=m).map(|i| &counts[i - 1] * &counts[m - i]).sum();
        counts.push(c);
    }
    counts.swap_remove(n)
}

pub fn expected_comparisons_by_enumeration(n: usize) -> Result<ExactRational> {
    Ok(enumerate(n)?.expected_comparisons())
}

pub fn comparison_pmf(n: usize) -> Result<BTreeMap<u64, ExactRational>> {
    Ok(enumerate(n)?.comparison_pmf())
}

/// Outcome labels of the composed construction: the nested tuples
/// `(i, (a, b))` the composition rules produce, with `⊥` at the bottom.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Nested {
    Bottom,
    Rank(usize),
    Pair(Box<Nested>, Box<Nested>),
}

impl fmt::Display for Nested {
    /// Flattens `(i, (a, b))` to the run notation `(i,a,b)`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Nested::Bottom => f.write_str("⊥"),
            Nested::Rank(i) => write!(f, "{i}"),
            Nested::Pair(head, tail) => match tail.as_ref() {
                Nested::Pair(a, b) => write!(f, "({head},{a},{b})"),
                other => write!(f, "({head},{other})"),
            },
        }
    }
}

/// `Q_n` built from the generic primitives: the uniform rank space `S_k`
/// conditionally composed with the products `Q_{i-1} × Q_{k-i}`.
pub fn build_via_core(n: usize) -> Result<FiniteSpace<Nested>> {
    build_via_core_with_cap(n, DEFAULT_ENUM_CAP)
}

pub fn build_via_core_with_cap(n: usize, cap: usize) -> Result<FiniteSpace<Nested>> {
    check_cap(n, cap)?;
    let mut spaces: Vec<FiniteSpace<Nested>> = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let space = if k <= 1 {
            FiniteSpace::point(Nested::Bottom)
        } else {
            let ranks = FiniteSpace::uniform((1..=k).collect())?;
            let composed = conditional_compose_with(&ranks, |&i| {
                Some(product(&spaces[i - 1], &spaces[k - i]))
            })?;
            composed.map_labels(|(i, (a, b))| {
                Nested::Pair(
                    Box::new(Nested::Rank(*i)),
                    Box::new(Nested::Pair(Box::new(a.clone()), Box::new(b.clone()))),
                )
            })?
        };
        spaces.push(space);
    }
    Ok(spaces.pop().expect("at least Q_0"))
}

/// Whether the composed construction and the enumeration assign the same
/// weight to the same runs, compared through their serialized notation.
pub fn same_distribution(composed: &FiniteSpace<Nested>, enumerated: &RunSpace) -> bool {
    let mut lhs: Vec<(String, ExactRational)> = composed
        .iter()
        .map(|(l, w)| (l.to_string(), w.clone()))
        .collect();
    let mut rhs: Vec<(String, ExactRational)> = enumerated
        .runs
        .iter()
        .zip(&enumerated.weights)
        .map(|(r, w)| (r.to_string(), w.clone()))
        .collect();
    lhs.sort();
    rhs.sort();
    lhs == rhs
}
