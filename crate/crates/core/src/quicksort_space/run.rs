use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num::{BigInt, One};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::prob_core::ExactRational;

/// One run of QuickSort: the tree of splitter choices.
///
/// `Leaf` is a subproblem of size 0 or 1, where nothing happens. `Node`
/// chooses the splitter of relative rank `rank` (1-based, within its own
/// subproblem) and continues with the `rank - 1` smaller elements on the
/// left and the rest on the right. The subproblem size is not stored; it is
/// carried down from the root.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Run {
    Leaf,
    Node {
        rank: usize,
        left: Arc<Run>,
        right: Arc<Run>,
    },
}

impl Run {
    pub fn node(rank: usize, left: Run, right: Run) -> Run {
        Run::Node {
            rank,
            left: Arc::new(left),
            right: Arc::new(right),
        }
    }

    pub fn is_valid_for(&self, n: usize) -> bool {
        match self {
            Run::Leaf => n <= 1,
            Run::Node { rank, left, right } => {
                n >= 2
                    && (1..=n).contains(rank)
                    && left.is_valid_for(rank - 1)
                    && right.is_valid_for(n - rank)
            }
        }
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        if self.is_valid_for(n) {
            Ok(())
        } else {
            Err(Error::InvalidRun { n })
        }
    }

    /// Calls `visit(size)` once per internal node with the size of the
    /// subproblem that node partitions. Assumes `self` is valid for `n`.
    pub(crate) fn for_each_partition(&self, n: usize, visit: &mut impl FnMut(usize)) {
        if let Run::Node { rank, left, right } = self {
            visit(n);
            left.for_each_partition(rank - 1, visit);
            right.for_each_partition(n - rank, visit);
        }
    }

    /// Notation with `bottom` standing for a leaf, e.g. `(1,⊥,(2,⊥,⊥))`.
    pub fn notation(&self, bottom: &str) -> String {
        let mut out = String::new();
        self.write_notation(bottom, &mut out);
        out
    }

    fn write_notation(&self, bottom: &str, out: &mut String) {
        match self {
            Run::Leaf => out.push_str(bottom),
            Run::Node { rank, left, right } => {
                out.push('(');
                out.push_str(&rank.to_string());
                out.push(',');
                left.write_notation(bottom, out);
                out.push(',');
                right.write_notation(bottom, out);
                out.push(')');
            }
        }
    }

    /// Structured form: `None` for a leaf.
    pub fn to_tree(&self) -> Option<RunTree> {
        match self {
            Run::Leaf => None,
            Run::Node { rank, left, right } => Some(RunTree {
                rank: *rank,
                left: left.to_tree().map(Box::new),
                right: right.to_tree().map(Box::new),
            }),
        }
    }

    pub fn from_tree(tree: Option<&RunTree>) -> Run {
        match tree {
            None => Run::Leaf,
            Some(t) => Run::node(
                t.rank,
                Run::from_tree(t.left.as_deref()),
                Run::from_tree(t.right.as_deref()),
            ),
        }
    }
}

/// Displays in the `⊥` notation.
impl fmt::Display for Run {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.notation("⊥"))
    }
}

/// JSON shape of a run; leaves are `null`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunTree {
    pub rank: usize,
    pub left: Option<Box<RunTree>>,
    pub right: Option<Box<RunTree>>,
}

/// Parses `⊥`/`_` notation. Whitespace between tokens is ignored.
impl FromStr for Run {
    type Err = Error;

    fn from_str(s: &str) -> Result<Run> {
        let mut parser = Parser { src: s, pos: 0 };
        let run = parser.run()?;
        parser.skip_ws();
        if parser.pos != s.len() {
            return Err(parser.fail("trailing input"));
        }
        Ok(run)
    }
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl Parser<'_> {
    fn fail(&self, reason: &'static str) -> Error {
        Error::ParseRun {
            offset: self.pos,
            reason,
        }
    }

    fn skip_ws(&mut self) {
        let rest = &self.src[self.pos..];
        self.pos += rest.len() - rest.trim_start().len();
    }

    fn eat(&mut self, token: &str) -> bool {
        self.skip_ws();
        if self.src[self.pos..].starts_with(token) {
            self.pos += token.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, token: &str, reason: &'static str) -> Result<()> {
        if self.eat(token) {
            Ok(())
        } else {
            Err(self.fail(reason))
        }
    }

    fn run(&mut self) -> Result<Run> {
        if self.eat("⊥") || self.eat("_") {
            return Ok(Run::Leaf);
        }
        self.expect("(", "expected `(`, `⊥` or `_`")?;
        self.skip_ws();
        let digits = self.src[self.pos..]
            .bytes()
            .take_while(u8::is_ascii_digit)
            .count();
        if digits == 0 {
            return Err(self.fail("expected a rank"));
        }
        let rank = self.src[self.pos..self.pos + digits]
            .parse()
            .map_err(|_| self.fail("rank out of range"))?;
        self.pos += digits;
        self.expect(",", "expected `,`")?;
        let left = self.run()?;
        self.expect(",", "expected `,`")?;
        let right = self.run()?;
        self.expect(")", "expected `)`")?;
        Ok(Run::node(rank, left, right))
    }
}

/// `q_n(run)`: the product of `1 / size` over every partition step.
pub fn run_probability(run: &Run, n: usize) -> Result<ExactRational> {
    run.validate(n)?;
    let mut denominator = BigInt::one();
    run.for_each_partition(n, &mut |size| denominator *= size);
    Ok(ExactRational::new(BigInt::one(), denominator))
}

/// `t_n(run)`: a partition of `m` elements costs `m - 1` comparisons.
pub fn comparisons(run: &Run, n: usize) -> Result<u64> {
    run.validate(n)?;
    let mut total = 0u64;
    run.for_each_partition(n, &mut |size| total += size as u64 - 1);
    Ok(total)
}
