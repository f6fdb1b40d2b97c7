use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::cones::Bound;

/// A named contiguous slice of the flat state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub name: String,
    pub offset: usize,
    pub len: usize,
}

impl Segment {
    pub fn range(&self) -> Range<usize> {
        self.offset..self.offset + self.len
    }
}

/// Segment map of a flat state vector plus the admissible set of every
/// component.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateLayout {
    segments: Vec<Segment>,
    bounds: Vec<Bound>,
}

impl StateLayout {
    pub(crate) fn builder() -> LayoutBuilder {
        LayoutBuilder::default()
    }

    pub fn dim(&self) -> usize {
        self.bounds.len()
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn segment(&self, name: &str) -> Option<&Segment> {
        self.segments.iter().find(|s| s.name == name)
    }

    /// Range of a segment; empty when the segment is absent.
    pub fn range(&self, name: &str) -> Range<usize> {
        self.segment(name).map_or(0..0, Segment::range)
    }

    pub fn bounds(&self) -> &[Bound] {
        &self.bounds
    }

    /// `true` for components evolving under a projection.
    pub fn projected_mask(&self) -> Vec<bool> {
        self.bounds.iter().map(Bound::is_projected).collect()
    }

    /// Column labels `segment[index]` in state order.
    pub fn column_names(&self) -> Vec<String> {
        self.segments
            .iter()
            .flat_map(|s| (0..s.len).map(move |i| format!("{}[{}]", s.name, i)))
            .collect()
    }

    /// Whether every component lies in its admissible set up to `tol`.
    pub fn admits(&self, s: &[f64], tol: f64) -> bool {
        s.len() == self.dim() && s.iter().zip(&self.bounds).all(|(&v, b)| b.admits(v, tol))
    }
}

#[derive(Default)]
pub(crate) struct LayoutBuilder {
    segments: Vec<Segment>,
    bounds: Vec<Bound>,
}

impl LayoutBuilder {
    /// Appends a segment (skipped when empty) and returns its range.
    pub fn push(&mut self, name: &str, len: usize, bound: Bound) -> Range<usize> {
        self.push_with(name, (0..len).map(|_| bound).collect())
    }

    pub fn push_with(&mut self, name: &str, bounds: Vec<Bound>) -> Range<usize> {
        let offset = self.bounds.len();
        let len = bounds.len();
        if len > 0 {
            self.segments.push(Segment {
                name: name.to_string(),
                offset,
                len,
            });
            self.bounds.extend(bounds);
        }
        offset..offset + len
    }

    pub fn finish(self) -> StateLayout {
        StateLayout {
            segments: self.segments,
            bounds: self.bounds,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn segments_cover_the_state() {
        let mut b = StateLayout::builder();
        b.push("x", 2, Bound::Free);
        b.push("empty", 0, Bound::Free);
        b.push("lam", 3, Bound::NonNegative);
        let l = b.finish();
        assert_eq!(l.dim(), 5);
        assert_eq!(l.segments().len(), 2);
        assert_eq!(l.range("lam"), 2..5);
        assert_eq!(l.range("missing"), 0..0);
        assert_eq!(l.projected_mask(), vec![false, false, true, true, true]);
        assert_eq!(l.column_names()[2], "lam[0]");
        assert!(!l.admits(&[0.0, 0.0, -1.0, 0.0, 0.0], 1e-12));
    }
}
