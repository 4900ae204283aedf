//! Expected comparisons `T(n) = E(t_n)` from the recurrence
//! `T(n) = n - 1 + (1/n) Σ_{i=1..n} (T(i-1) + T(n-i))`, evaluated in its
//! prefix-sum form `T(n) = n - 1 + (2/n) Σ_{i<n} T(i)`.

use num::Zero;

use crate::error::{Error, Result};
use crate::prob_core::{integer, ratio, ExactRational};

pub const DEFAULT_EXACT_CAP: usize = 2000;
pub const DEFAULT_BOUND_SCAN: usize = 100_000;
/// Absolute slack allowed when comparing against the floating-point bound.
pub const BOUND_GUARD: f64 = 1e-6;

/// `T(0), …, T(n_max)` as exact rationals.
#[derive(Debug, Clone, PartialEq)]
pub struct TExactTable {
    values: Vec<ExactRational>,
}

impl TExactTable {
    pub fn build(n_max: usize) -> Result<Self> {
        Self::build_with_cap(n_max, DEFAULT_EXACT_CAP)
    }

    pub fn build_with_cap(n_max: usize, cap: usize) -> Result<Self> {
        check_cap(n_max, cap)?;
        let mut values = Vec::with_capacity(n_max + 1);
        let mut prefix = ExactRational::zero();
        values.push(ExactRational::zero());
        for n in 1..=n_max {
            prefix += &values[n - 1];
            values.push(integer(n as i64 - 1) + ratio(2, n as i64) * &prefix);
        }
        Ok(TExactTable { values })
    }

    pub fn n_max(&self) -> usize {
        self.values.len() - 1
    }

    pub fn get(&self, n: usize) -> Option<&ExactRational> {
        self.values.get(n)
    }

    pub fn values(&self) -> &[ExactRational] {
        &self.values
    }
}

fn check_cap(n: usize, cap: usize) -> Result<()> {
    if n > cap {
        Err(Error::TooLarge {
            what: "exact recurrence",
            n,
            cap,
        })
    } else {
        Ok(())
    }
}

pub fn t_exact(n: usize) -> Result<ExactRational> {
    t_exact_with_cap(n, DEFAULT_EXACT_CAP)
}

pub fn t_exact_with_cap(n: usize, cap: usize) -> Result<ExactRational> {
    let mut table = TExactTable::build_with_cap(n, cap)?;
    Ok(table.values.swap_remove(n))
}

/// `T(0), …, T(n_max)` in double precision.
pub fn t_float_table(n_max: usize) -> Vec<f64> {
    let mut values = Vec::with_capacity(n_max + 1);
    let mut prefix = 0.0f64;
    values.push(0.0);
    for n in 1..=n_max {
        prefix += values[n - 1];
        values.push((n - 1) as f64 + 2.0 * prefix / n as f64);
    }
    values
}

pub fn t_float(n: usize) -> f64 {
    t_float_table(n)[n]
}

/// `2 n ln n`, taken as 0 at `n = 0`.
pub fn upper_bound(n: usize) -> f64 {
    if n == 0 {
        0.0
    } else {
        let n = n as f64;
        2.0 * n * n.ln()
    }
}

/// First `n` in `1..=n_max` with `T(n) > 2 n ln n + BOUND_GUARD`, if any.
pub fn bound_check(n_max: usize) -> Option<usize> {
    let table = t_float_table(n_max);
    (1..=n_max).find(|&n| table[n] > upper_bound(n) + BOUND_GUARD)
}

/// `Σ_{1≤i<j≤n} 2/(j-i+1)`, summed by gap: `Σ_{s=2..n} (n-s+1) · 2/s`.
pub fn indicator_sum(n: usize) -> Result<ExactRational> {
    indicator_sum_with_cap(n, DEFAULT_EXACT_CAP)
}

pub fn indicator_sum_with_cap(n: usize, cap: usize) -> Result<ExactRational> {
    check_cap(n, cap)?;
    let mut total = ExactRational::zero();
    for s in 2..=n {
        total += ratio(2 * (n - s + 1) as i64, s as i64);
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// `2(n+1)H_n - 4n`, an independent closed form for the recurrence.
    fn harmonic_closed_form(n: usize) -> ExactRational {
        let h: ExactRational = (1..=n).map(|k| ratio(1, k as i64)).sum();
        integer(2 * (n as i64 + 1)) * h - integer(4 * n as i64)
    }

    #[test]
    fn small_values() {
        assert_eq!(t_exact(0).unwrap(), integer(0));
        assert_eq!(t_exact(1).unwrap(), integer(0));
        assert_eq!(t_exact(2).unwrap(), integer(1));
        assert_eq!(t_exact(3).unwrap(), ratio(8, 3));
        assert_eq!(t_exact(5).unwrap(), ratio(37, 5));
    }

    #[test]
    fn table_satisfies_the_unsimplified_recurrence() {
        let table = TExactTable::build(40).unwrap();
        let t = table.values();
        assert_eq!(table.n_max(), 40);
        for n in 2..=40 {
            let sum: ExactRational = (1..=n).map(|i| &t[i - 1] + &t[n - i]).sum();
            assert_eq!(t[n], integer(n as i64 - 1) + sum / integer(n as i64));
        }
    }

    #[test]
    fn matches_harmonic_closed_form() {
        let table = TExactTable::build(300).unwrap();
        for n in 0..=300 {
            assert_eq!(table.get(n).unwrap(), &harmonic_closed_form(n), "n = {n}");
        }
    }

    #[test]
    fn float_examples() {
        assert_eq!(t_float(2), 1.0);
        assert!((t_float(4) - 29.0 / 6.0).abs() < 1e-12);
        let t100 = t_float(100);
        assert!(t100 > 0.0 && t100 < upper_bound(100));
        assert!((t100 - 647.85).abs() < 0.005);
    }

    #[test]
    fn bound_examples() {
        assert_eq!(bound_check(1), None);
        assert_eq!(bound_check(10), None);
        assert!((upper_bound(3) - 6.5917).abs() < 1e-4);
    }

    #[test]
    fn indicator_examples() {
        assert_eq!(indicator_sum(2).unwrap(), integer(1));
        assert_eq!(indicator_sum(3).unwrap(), ratio(8, 3));
        assert_eq!(indicator_sum(6).unwrap(), t_exact(6).unwrap());
        assert_eq!(indicator_sum(0).unwrap(), integer(0));
    }

    #[test]
    fn indicator_grouping_matches_pair_sum() {
        for n in 0..=30usize {
            let mut pairs = ExactRational::zero();
            for i in 1..=n {
                for j in i + 1..=n {
                    pairs += ratio(2, (j - i + 1) as i64);
                }
            }
            assert_eq!(indicator_sum(n).unwrap(), pairs);
        }
    }

    #[test]
    fn caps() {
        assert!(matches!(t_exact(2001), Err(Error::TooLarge { .. })));
        assert!(indicator_sum_with_cap(11, 10).is_err());
    }

    #[test]
    fn strictly_increasing_from_two() {
        let t = TExactTable::build(200).unwrap();
        for n in 2..200 {
            assert!(t.values()[n + 1] > t.values()[n]);
        }
    }
}
