use nalgebra::DMatrix;

use crate::error::{FsbpError, Result};
use crate::funcspace::Interval;
use crate::operators::FsbpOperatorSet;

/// `I` uniform blocks partitioning a physical interval, each carrying the
/// reference operator mapped onto it.
///
/// Blocks of equal width share one set of mapped matrices; only the node
/// coordinates differ. Adjacent blocks duplicate their common endpoint.
#[derive(Clone, Debug)]
pub struct BlockMesh {
    domain: Interval,
    blocks: Vec<Interval>,
    op: FsbpOperatorSet,
    nodes: Vec<f64>,
}

impl BlockMesh {
    pub fn uniform(reference: &FsbpOperatorSet, domain: Interval, count: usize) -> Result<Self> {
        if count == 0 {
            return Err(FsbpError::Config("a mesh needs at least one block".into()));
        }
        if reference.d2.is_none() {
            return Err(FsbpError::MissingSecondDerivative);
        }
        let h = domain.width() / count as f64;
        let blocks: Vec<Interval> = (0..count)
            .map(|i| {
                let left = domain.left + i as f64 * h;
                let right = if i + 1 == count { domain.right } else { domain.left + (i + 1) as f64 * h };
                Interval::new(left, right)
            })
            .collect::<Result<_>>()?;
        let op = reference.map_to_block(blocks[0]);
        let nodes = blocks
            .iter()
            .flat_map(|b| reference.nodes.iter().map(move |&x| reference.element.map_point(b, x)))
            .collect();
        Ok(Self { domain, blocks, op, nodes })
    }

    pub fn domain(&self) -> Interval {
        self.domain
    }

    pub fn blocks(&self) -> &[Interval] {
        &self.blocks
    }

    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }

    /// Nodes per block.
    pub fn n(&self) -> usize {
        self.op.n()
    }

    /// Total number of unknowns `I·N`.
    pub fn len(&self) -> usize {
        self.blocks.len() * self.op.n()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// The operator on any one block.
    pub fn op(&self) -> &FsbpOperatorSet {
        &self.op
    }

    pub fn d1(&self) -> &DMatrix<f64> {
        &self.op.d1
    }

    pub fn d2(&self) -> &DMatrix<f64> {
        self.op.d2()
    }

    /// All node coordinates, block after block.
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Quadrature weights matching [`nodes`](Self::nodes).
    pub fn weights(&self) -> Vec<f64> {
        (0..self.blocks.len()).flat_map(|_| self.op.p.iter().copied()).collect()
    }

    /// Smallest distance between two nodes of one block.
    pub fn min_spacing(&self) -> f64 {
        self.op.nodes.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min)
    }

    /// `Σ_i 𝟏ᵀ P u⁽ⁱ⁾`
    pub fn mass(&self, u: &[f64]) -> f64 {
        u.chunks(self.n()).map(|b| b.iter().zip(self.op.p.iter()).map(|(v, w)| v * w).sum::<f64>()).sum()
    }

    /// `Σ_i u⁽ⁱ⁾ᵀ P u⁽ⁱ⁾`
    pub fn energy(&self, u: &[f64]) -> f64 {
        u.chunks(self.n()).map(|b| b.iter().zip(self.op.p.iter()).map(|(v, w)| v * v * w).sum::<f64>()).sum()
    }

    pub fn sample(&self, f: impl Fn(f64) -> f64) -> Vec<f64> {
        self.nodes.iter().map(|&x| f(x)).collect()
    }

    pub(crate) fn check_len(&self, len: usize) -> Result<()> {
        if len != self.len() {
            return Err(FsbpError::ShapeMismatch(format!("state has {len} entries, mesh has {}", self.len())));
        }
        Ok(())
    }
}
