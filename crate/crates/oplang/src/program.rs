use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use cvrp_core::{CostEvaluator, Instance, Solution};
use hgs_solver::{Crossover, CrossoverContext, OperatorFault};
use thiserror::Error;

use crate::interp::{execute, ExecBudget};
use crate::normalize::{resolve, Hasher, NodeHash, Stmt};
use crate::{ast, parser};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CompileError {
    #[error("parse error at {line}:{col}: {message}")]
    Parse {
        line: usize,
        col: usize,
        message: String,
    },
    #[error("static check failed at {line}:{col}: {message}")]
    StaticCheck {
        line: usize,
        col: usize,
        message: String,
    },
}

/// 128-bit structural hash of a normalized program.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Fingerprint(pub [u8; 16]);

impl fmt::Display for Fingerprint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&hex::encode(self.0))
    }
}

impl FromStr for Fingerprint {
    type Err = hex::FromHexError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut out = [0u8; 16];
        hex::decode_to_slice(s, &mut out)?;
        Ok(Fingerprint(out))
    }
}

/// A compiled operator: source, surface tree, normalized tree, fingerprint
/// and subtree shingles.
#[derive(Debug, Clone)]
pub struct OperatorProgram {
    source: String,
    ast: Vec<ast::Stmt>,
    pub(crate) body: Vec<Stmt>,
    pub(crate) num_slots: usize,
    fingerprint: Fingerprint,
    /// Multiset of subtree digests, as digest -> multiplicity.
    shingles: BTreeMap<NodeHash, u32>,
}

impl OperatorProgram {
    pub fn compile(source: &str) -> Result<Self, CompileError> {
        let ast = parser::parse(source)?;
        let resolved = resolve(&ast)?;
        let mut digests = Vec::new();
        let root = Hasher {
            shingles: &mut digests,
        }
        .block(&resolved.body);
        let mut shingles = BTreeMap::new();
        for d in digests {
            *shingles.entry(d).or_insert(0) += 1;
        }
        Ok(OperatorProgram {
            source: source.to_owned(),
            ast,
            body: resolved.body,
            num_slots: resolved.num_slots,
            fingerprint: Fingerprint(root),
            shingles,
        })
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn ast(&self) -> &[ast::Stmt] {
        &self.ast
    }

    pub fn normalized(&self) -> &[Stmt] {
        &self.body
    }

    pub fn fingerprint(&self) -> Fingerprint {
        self.fingerprint
    }

    /// Number of subtrees, counted with multiplicity.
    pub fn num_shingles(&self) -> usize {
        self.shingles.values().map(|&n| n as usize).sum()
    }

    pub fn execute(
        &self,
        ctx: &mut CrossoverContext<'_>,
        inst: &Instance,
        cost: &CostEvaluator,
        budget: ExecBudget,
    ) -> Result<Solution, crate::ExecError> {
        execute(self, ctx, inst, cost, budget)
    }

    /// Binds a budget so the program can be handed to the solver.
    pub fn with_budget(&self, budget: ExecBudget) -> ProgramOperator<'_> {
        ProgramOperator {
            program: self,
            budget,
        }
    }
}

/// Multiset Jaccard index over subtree shingles: sum of per-digest minimum
/// counts over sum of maximum counts.
pub fn similarity(a: &OperatorProgram, b: &OperatorProgram) -> f64 {
    let mut inter = 0u64;
    let mut union = 0u64;
    let mut ia = a.shingles.iter().peekable();
    let mut ib = b.shingles.iter().peekable();
    loop {
        match (ia.peek(), ib.peek()) {
            (Some((ka, &na)), Some((kb, &nb))) => match ka.cmp(kb) {
                std::cmp::Ordering::Equal => {
                    inter += u64::from(na.min(nb));
                    union += u64::from(na.max(nb));
                    ia.next();
                    ib.next();
                }
                std::cmp::Ordering::Less => {
                    union += u64::from(na);
                    ia.next();
                }
                std::cmp::Ordering::Greater => {
                    union += u64::from(nb);
                    ib.next();
                }
            },
            (Some((_, &n)), None) | (None, Some((_, &n))) => {
                union += u64::from(n);
                ia.next();
                ib.next();
            }
            (None, None) => break,
        }
    }
    if union == 0 {
        1.0
    } else {
        inter as f64 / union as f64
    }
}

/// A compiled program plus its budget, usable as a solver crossover.
#[derive(Debug, Clone, Copy)]
pub struct ProgramOperator<'p> {
    pub program: &'p OperatorProgram,
    pub budget: ExecBudget,
}

impl Crossover for ProgramOperator<'_> {
    fn crossover(
        &self,
        ctx: &mut CrossoverContext<'_>,
        inst: &Instance,
        cost: &CostEvaluator,
    ) -> Result<Solution, OperatorFault> {
        execute(self.program, ctx, inst, cost, self.budget).map_err(|e| OperatorFault(e.to_string()))
    }
}
