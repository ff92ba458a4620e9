//! Coordinate search over a tuple of unitaries plus free real weights.

use crate::linalg::{polar_unitary, ComplexMatrix};
use crate::optim::{coordinate_search, CoordinateProblem, Generator, SearchOptions, SearchOutcome};

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct BlockPoint {
    pub blocks: Vec<ComplexMatrix>,
    pub weights: Vec<f64>,
}

impl BlockPoint {
    pub fn unitaries(blocks: Vec<ComplexMatrix>) -> Self {
        BlockPoint { blocks, weights: Vec::new() }
    }

    /// Re-projects every block onto the unitary group.
    pub fn cleaned(&self) -> Self {
        BlockPoint { blocks: self.blocks.iter().map(polar_unitary).collect(), weights: self.weights.clone() }
    }
}

struct BlockProblem<'a, F> {
    point: BlockPoint,
    value: f64,
    objective: &'a F,
    offsets: Vec<usize>,
}

enum Coord {
    Block(usize, Generator),
    Weight(usize),
}

impl<F: Fn(&BlockPoint) -> f64> BlockProblem<'_, F> {
    fn locate(&self, coord: usize) -> Coord {
        for (b, w) in self.offsets.windows(2).enumerate() {
            if coord < w[1] {
                return Coord::Block(b, Generator::nth(self.point.blocks[b].rows(), coord - w[0]));
            }
        }
        Coord::Weight(coord - self.offsets[self.offsets.len() - 1])
    }

    fn moved(&mut self, coord: usize, t: f64) {
        match self.locate(coord) {
            Coord::Block(b, g) => g.apply_left(&mut self.point.blocks[b], t),
            Coord::Weight(i) => self.point.weights[i] += t,
        }
    }
}

impl<F: Fn(&BlockPoint) -> f64> CoordinateProblem for BlockProblem<'_, F> {
    fn dimension(&self) -> usize {
        self.offsets[self.offsets.len() - 1] + self.point.weights.len()
    }

    fn value(&self) -> f64 {
        self.value
    }

    fn trial(&mut self, coord: usize, t: f64) -> f64 {
        match self.locate(coord) {
            Coord::Block(b, g) => {
                let saved = self.point.blocks[b].clone();
                g.apply_left(&mut self.point.blocks[b], t);
                let v = (self.objective)(&self.point);
                self.point.blocks[b] = saved;
                v
            }
            Coord::Weight(i) => {
                let saved = self.point.weights[i];
                self.point.weights[i] += t;
                let v = (self.objective)(&self.point);
                self.point.weights[i] = saved;
                v
            }
        }
    }

    fn commit(&mut self, coord: usize, t: f64, value: f64) {
        self.moved(coord, t);
        self.value = value;
    }
}

/// Runs the shared coordinate search from `start`.
pub(crate) fn search_blocks<F>(start: BlockPoint, objective: &F, opts: &SearchOptions) -> (BlockPoint, SearchOutcome)
where
    F: Fn(&BlockPoint) -> f64,
{
    let mut offsets = vec![0];
    for b in &start.blocks {
        offsets.push(offsets[offsets.len() - 1] + Generator::count(b.rows()));
    }
    let value = objective(&start);
    let mut problem = BlockProblem { point: start, value, objective, offsets };
    let out = coordinate_search(&mut problem, opts);
    (problem.point, out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{haar_unitary, seeded_rng};

    #[test]
    fn finds_a_target_unitary() {
        let mut rng = seeded_rng(4);
        let target = haar_unitary(3, &mut rng);
        let f = |p: &BlockPoint| (&p.blocks[0] - &target).frobenius_norm().powi(2) + (p.weights[0] - 0.3).powi(2);
        let start = BlockPoint { blocks: vec![ComplexMatrix::identity(3)], weights: vec![0.0] };
        let (best, out) = search_blocks(start, &f, &SearchOptions { target: 1e-20, ..Default::default() });
        assert!(out.value < 1e-12, "value {}", out.value);
        assert!(best.blocks[0].unitarity_defect() < 1e-12);
    }
}
