//! Per-agent compensator blocks applied blockwise to stacked signals.

use crate::compensators::LtiBlock;

#[derive(Debug, Clone, Copy)]
pub(crate) enum Part {
    A,
    B,
    C,
    D,
}

/// Nonzero entries `(row, col, value)` of one block matrix.
type Triplets = Vec<(usize, usize, f64)>;

#[derive(Debug, Clone)]
pub(crate) struct Bank {
    blocks: Vec<LtiBlock>,
    io_off: Vec<usize>,
    st_off: Vec<usize>,
    /// Per block, the nonzeros of `A, B, C, D`.
    sparse: Vec<[Triplets; 4]>,
}

fn triplets(m: &nalgebra::DMatrix<f64>) -> Triplets {
    let mut t = Vec::new();
    for c in 0..m.ncols() {
        for r in 0..m.nrows() {
            let v = m[(r, c)];
            if v != 0.0 {
                t.push((r, c, v));
            }
        }
    }
    t
}

impl Bank {
    pub fn new(blocks: Vec<LtiBlock>) -> Self {
        let mut io_off = vec![0];
        let mut st_off = vec![0];
        for b in &blocks {
            io_off.push(io_off.last().unwrap() + b.io_dim());
            st_off.push(st_off.last().unwrap() + b.state_dim());
        }
        let sparse = blocks
            .iter()
            .map(|b| [triplets(b.a()), triplets(b.b()), triplets(b.c()), triplets(b.d())])
            .collect();
        Self {
            blocks,
            io_off,
            st_off,
            sparse,
        }
    }

    pub fn blocks(&self) -> &[LtiBlock] {
        &self.blocks
    }

    pub fn state_dim(&self) -> usize {
        *self.st_off.last().unwrap()
    }

    pub fn io_range(&self, i: usize) -> std::ops::Range<usize> {
        self.io_off[i]..self.io_off[i + 1]
    }

    pub fn state_range(&self, i: usize) -> std::ops::Range<usize> {
        self.st_off[i]..self.st_off[i + 1]
    }

    pub fn has_feedthrough(&self) -> bool {
        self.blocks.iter().any(LtiBlock::has_feedthrough)
    }

    /// `out += scale · M · input` for the block-diagonal stack of part `M`.
    pub fn apply(&self, part: Part, input: &[f64], out: &mut [f64], scale: f64) {
        for i in 0..self.blocks.len() {
            let (k, in_r, out_r) = match part {
                Part::A => (0, self.state_range(i), self.state_range(i)),
                Part::B => (1, self.io_range(i), self.state_range(i)),
                Part::C => (2, self.state_range(i), self.io_range(i)),
                Part::D => (3, self.io_range(i), self.io_range(i)),
            };
            let inp = &input[in_r];
            let o = &mut out[out_r];
            for &(r, c, v) in &self.sparse[i][k] {
                o[r] += scale * v * inp[c];
            }
        }
    }
}
