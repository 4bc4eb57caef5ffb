use std::collections::BTreeMap;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BlockKind {
    Psd,
    /// A diagonal block, i.e. a vector of nonnegative scalars.
    NonnegDiag,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct BlockSpec {
    pub side: usize,
    pub kind: BlockKind,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum Sense {
    #[default]
    Min,
    Max,
}

/// Block-diagonal symmetric matrix keyed by `(block, i, j)` with `i ≤ j`.
/// An off-diagonal key stands for both `(i, j)` and `(j, i)`. Exact zeros are
/// never stored.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct BlockSparse {
    entries: BTreeMap<(usize, usize, usize), f64>,
}

impl BlockSparse {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, block: usize, i: usize, j: usize, v: f64) {
        let key = if i <= j { (block, i, j) } else { (block, j, i) };
        let slot = self.entries.entry(key).or_insert(0.0);
        *slot += v;
        if *slot == 0.0 {
            self.entries.remove(&key);
        }
    }

    pub fn get(&self, block: usize, i: usize, j: usize) -> f64 {
        let key = if i <= j { (block, i, j) } else { (block, j, i) };
        self.entries.get(&key).copied().unwrap_or(0.0)
    }

    /// Entries in `(block, i, j)` order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, usize, f64)> + '_ {
        self.entries.iter().map(|(&(b, i, j), &v)| (b, i, j, v))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Constraint {
    pub coeffs: BlockSparse,
    pub rhs: f64,
}

/// `min/max ⟨C, X⟩` subject to `⟨A_i, X⟩ = b_i` and every block of `X` in its
/// cone. The dual of the min form is `max b'y` with `C − Σ y_i A_i ⪰ 0`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SdpProblem {
    blocks: Vec<BlockSpec>,
    constraints: Vec<Constraint>,
    objective: BlockSparse,
    sense: Sense,
    comments: Vec<String>,
}

impl SdpProblem {
    pub fn new(sense: Sense) -> Self {
        SdpProblem {
            sense,
            ..Self::default()
        }
    }

    pub fn add_block(&mut self, kind: BlockKind, side: usize) -> usize {
        self.blocks.push(BlockSpec { side, kind });
        self.blocks.len() - 1
    }

    pub fn add_constraint(&mut self, rhs: f64) -> usize {
        self.constraints.push(Constraint {
            coeffs: BlockSparse::new(),
            rhs,
        });
        self.constraints.len() - 1
    }

    fn check_entry(&self, block: usize, i: usize, j: usize) -> Result<()> {
        let spec = self
            .blocks
            .get(block)
            .ok_or_else(|| Error::Invalid(format!("block {block} does not exist")))?;
        if i >= spec.side || j >= spec.side {
            return Err(Error::Invalid(format!(
                "entry ({i},{j}) outside block {block} of side {}",
                spec.side
            )));
        }
        if spec.kind == BlockKind::NonnegDiag && i != j {
            return Err(Error::Invalid(format!(
                "off-diagonal entry ({i},{j}) in diagonal block {block}"
            )));
        }
        Ok(())
    }

    pub fn add_constraint_entry(&mut self, con: usize, block: usize, i: usize, j: usize, v: f64) -> Result<()> {
        self.check_entry(block, i, j)?;
        let c = self
            .constraints
            .get_mut(con)
            .ok_or_else(|| Error::Invalid(format!("constraint {con} does not exist")))?;
        c.coeffs.add(block, i, j, v);
        Ok(())
    }

    pub fn add_objective_entry(&mut self, block: usize, i: usize, j: usize, v: f64) -> Result<()> {
        self.check_entry(block, i, j)?;
        self.objective.add(block, i, j, v);
        Ok(())
    }

    pub fn set_rhs(&mut self, con: usize, rhs: f64) {
        self.constraints[con].rhs = rhs;
    }

    /// Free-form metadata, written as SDPA comment lines.
    pub fn push_comment(&mut self, line: impl Into<String>) {
        self.comments.push(line.into());
    }

    pub fn blocks(&self) -> &[BlockSpec] {
        &self.blocks
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn num_constraints(&self) -> usize {
        self.constraints.len()
    }

    pub fn objective(&self) -> &BlockSparse {
        &self.objective
    }

    pub fn sense(&self) -> Sense {
        self.sense
    }

    pub fn comments(&self) -> &[String] {
        &self.comments
    }

    pub fn rhs(&self) -> Vec<f64> {
        self.constraints.iter().map(|c| c.rhs).collect()
    }

    pub(crate) fn from_parts(
        blocks: Vec<BlockSpec>,
        constraints: Vec<Constraint>,
        objective: BlockSparse,
        sense: Sense,
        comments: Vec<String>,
    ) -> Result<Self> {
        let p = SdpProblem {
            blocks,
            constraints,
            objective,
            sense,
            comments,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let all = std::iter::once(&self.objective).chain(self.constraints.iter().map(|c| &c.coeffs));
        for m in all {
            for (b, i, j, v) in m.iter() {
                self.check_entry(b, i, j)?;
                if !v.is_finite() {
                    return Err(Error::Invalid(format!("non-finite coefficient in block {b}")));
                }
            }
        }
        if self.constraints.iter().any(|c| !c.rhs.is_finite()) {
            return Err(Error::Invalid("non-finite right-hand side".into()));
        }
        if self.constraints.is_empty() && self.objective.is_empty() {
            return Err(Error::Invalid("problem has neither constraints nor objective".into()));
        }
        Ok(())
    }
}
