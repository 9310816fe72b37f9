//! Top-down patch hierarchy over the image grid.
//!
//! Level 1 is the full image. Each node's rectangle is split into a 2×2
//! (p = 4) or 3×3 (p = 9) grid of children, so level `i` has `p^(i−1)`
//! nodes. Uneven sides are split with the larger pieces first: a side of 5
//! under a 2-split becomes 3 then 2.

use crate::data::{normalize_columns_lenient, DataGallery};
use crate::error::{Error, Result};

/// Axis-aligned pixel rectangle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Rect {
    pub top: usize,
    pub left: usize,
    pub height: usize,
    pub width: usize,
}

impl Rect {
    /// Row-major pixel indices into an image of width `image_width`.
    pub fn pixel_indices(&self, image_width: usize) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.height * self.width);
        for r in self.top..self.top + self.height {
            for c in self.left..self.left + self.width {
                out.push(r * image_width + c);
            }
        }
        out
    }

    fn contains(&self, other: &Rect) -> bool {
        other.top >= self.top
            && other.left >= self.left
            && other.top + other.height <= self.top + self.height
            && other.left + other.width <= self.left + self.width
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PatchNode {
    /// 1-based level; 1 is the root.
    pub level: usize,
    pub index_in_level: usize,
    pub rect: Rect,
    /// Strictly increasing row indices into the full gallery.
    pub pixel_indices: Vec<usize>,
    /// Indices into the next level's node list; empty at the leaves.
    pub children: Vec<usize>,
    pub parent: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct PatchHierarchy {
    height: usize,
    width: usize,
    patches_per_level: usize,
    overlap_fraction: f64,
    levels: Vec<Vec<PatchNode>>,
}

/// Splits `len` into `parts` pieces, larger pieces first. Returns (offset, size).
fn split_side(len: usize, parts: usize) -> Vec<(usize, usize)> {
    let base = len / parts;
    let extra = len % parts;
    let mut out = Vec::with_capacity(parts);
    let mut offset = 0;
    for k in 0..parts {
        let size = base + usize::from(k < extra);
        out.push((offset, size));
        offset += size;
    }
    out
}

/// Grows `[offset, offset+size)` by `grow` on every side not touching the
/// parent boundary, clipped to `[0, len)`.
fn expand(offset: usize, size: usize, len: usize, grow: usize) -> (usize, usize) {
    let start = if offset > 0 { offset.saturating_sub(grow) } else { 0 };
    let end = if offset + size < len {
        (offset + size + grow).min(len)
    } else {
        len
    };
    (start, end - start)
}

pub fn build_hierarchy(
    height: usize,
    width: usize,
    levels: usize,
    patches_per_level: usize,
    overlap_fraction: f64,
) -> Result<PatchHierarchy> {
    let grid = match patches_per_level {
        4 => 2,
        9 => 3,
        p => {
            return Err(Error::InvalidConfig(format!(
                "patches per level must be 4 or 9, got {p}"
            )))
        }
    };
    if levels == 0 {
        return Err(Error::InvalidConfig("at least one level is required".into()));
    }
    if !(0.0..0.5).contains(&overlap_fraction) {
        return Err(Error::InvalidConfig(format!(
            "overlap fraction {overlap_fraction} outside [0, 0.5)"
        )));
    }
    if height == 0 || width == 0 {
        return Err(Error::InvalidConfig("empty image geometry".into()));
    }
    let root_rect = Rect {
        top: 0,
        left: 0,
        height,
        width,
    };
    let mut all = vec![vec![PatchNode {
        level: 1,
        index_in_level: 0,
        rect: root_rect,
        pixel_indices: root_rect.pixel_indices(width),
        children: Vec::new(),
        parent: None,
    }]];
    for level in 2..=levels {
        let mut next = Vec::new();
        let parents = all.last_mut().expect("root level exists");
        for (pi, parent) in parents.iter_mut().enumerate() {
            let pr = parent.rect;
            let rows = split_side(pr.height, grid);
            let cols = split_side(pr.width, grid);
            for &(ro, rh) in &rows {
                for &(co, cw) in &cols {
                    if rh < 2 || cw < 2 {
                        return Err(Error::PatchTooSmall {
                            level,
                            height: rh,
                            width: cw,
                        });
                    }
                    let (ro2, rh2) = expand(ro, rh, pr.height, (overlap_fraction * rh as f64).round() as usize);
                    let (co2, cw2) = expand(co, cw, pr.width, (overlap_fraction * cw as f64).round() as usize);
                    let rect = Rect {
                        top: pr.top + ro2,
                        left: pr.left + co2,
                        height: rh2,
                        width: cw2,
                    };
                    parent.children.push(next.len());
                    next.push(PatchNode {
                        level,
                        index_in_level: next.len(),
                        rect,
                        pixel_indices: rect.pixel_indices(width),
                        children: Vec::new(),
                        parent: Some(pi),
                    });
                }
            }
        }
        all.push(next);
    }
    if levels == 1 && (height < 2 || width < 2) {
        return Err(Error::PatchTooSmall {
            level: 1,
            height,
            width,
        });
    }
    Ok(PatchHierarchy {
        height,
        width,
        patches_per_level,
        overlap_fraction,
        levels: all,
    })
}

impl PatchHierarchy {
    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn num_levels(&self) -> usize {
        self.levels.len()
    }

    pub fn patches_per_level(&self) -> usize {
        self.patches_per_level
    }

    pub fn overlap_fraction(&self) -> f64 {
        self.overlap_fraction
    }

    pub fn root(&self) -> &PatchNode {
        &self.levels[0][0]
    }

    /// Nodes of a 1-based level.
    pub fn level(&self, level: usize) -> &[PatchNode] {
        &self.levels[level - 1]
    }

    pub fn nodes_by_level(&self) -> &[Vec<PatchNode>] {
        &self.levels
    }

    pub fn node_count(&self) -> usize {
        self.levels.iter().map(Vec::len).sum()
    }

    /// Checks containment of every child in its parent and, without
    /// overlap, that siblings tile the parent exactly.
    pub fn check_consistency(&self) -> bool {
        for (li, nodes) in self.levels.iter().enumerate() {
            if nodes.len() != self.patches_per_level.pow(li as u32) {
                return false;
            }
            let Some(children) = self.levels.get(li + 1) else {
                continue;
            };
            for parent in nodes {
                let mut union: Vec<usize> = Vec::new();
                for &c in &parent.children {
                    let child = &children[c];
                    if !parent.rect.contains(&child.rect) {
                        return false;
                    }
                    union.extend(&child.pixel_indices);
                }
                if self.overlap_fraction == 0.0 {
                    union.sort_unstable();
                    if union != parent.pixel_indices {
                        return false;
                    }
                }
            }
        }
        true
    }
}

/// Rows of `g` selected by the node's pixels, with the node's geometry and
/// columns rescaled to unit norm (all-zero patch columns stay zero).
pub fn extract_patch_gallery(g: &DataGallery, node: &PatchNode) -> Result<DataGallery> {
    if node.pixel_indices.last().is_some_and(|&i| i >= g.dim()) {
        return Err(Error::GeometryMismatch(format!(
            "patch indexes pixel {} of a {}-pixel gallery",
            node.pixel_indices.last().unwrap(),
            g.dim()
        )));
    }
    let mut sub = g.data().select_rows(node.pixel_indices.iter());
    normalize_columns_lenient(&mut sub);
    DataGallery::new(
        sub,
        node.rect.height,
        node.rect.width,
        g.labels().map(<[usize]>::to_vec),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;

    #[test]
    fn four_by_four_split() {
        let h = build_hierarchy(4, 4, 2, 4, 0.0).unwrap();
        assert_eq!(h.level(2).len(), 4);
        assert_eq!(h.level(2)[0].pixel_indices, vec![0, 1, 4, 5]);
        assert!(h.level(2).iter().all(|n| n.rect.height == 2 && n.rect.width == 2));
        assert!(h.check_consistency());
    }

    #[test]
    fn face_geometry_leaves() {
        let h = build_hierarchy(48, 42, 2, 4, 0.0).unwrap();
        assert!(h.level(2).iter().all(|n| n.rect.height == 24 && n.rect.width == 21));
    }

    #[test]
    fn odd_sides_split_larger_first() {
        let h = build_hierarchy(5, 5, 2, 4, 0.0).unwrap();
        let sizes: Vec<(usize, usize)> = h.level(2).iter().map(|n| (n.rect.height, n.rect.width)).collect();
        assert_eq!(sizes, vec![(3, 3), (3, 2), (2, 3), (2, 2)]);
        assert!(h.check_consistency());
    }

    #[test]
    fn three_levels_of_nine() {
        let h = build_hierarchy(36, 36, 3, 9, 0.0).unwrap();
        assert_eq!(h.level(3).len(), 81);
        assert_eq!(h.node_count(), 91);
        assert!(h.check_consistency());
    }

    #[test]
    fn overlap_expands_interior_sides() {
        let h = build_hierarchy(32, 32, 2, 9, 0.25).unwrap();
        let first = &h.level(2)[0];
        assert_eq!((first.rect.top, first.rect.left), (0, 0));
        assert_eq!(first.rect.height, 11 + 3);
        let center = &h.level(2)[4];
        assert_eq!(center.rect.top, 11 - 3);
        assert_eq!(center.rect.height, 11 + 6);
        assert!(h.check_consistency());
    }

    #[test]
    fn too_small_leaves_fail() {
        assert!(matches!(
            build_hierarchy(3, 8, 2, 4, 0.0),
            Err(Error::PatchTooSmall { .. })
        ));
    }

    #[test]
    fn extract_corner_patch() {
        let data = DMatrix::from_fn(16, 2, |i, j| (i + 1 + j) as f64);
        let g = DataGallery::new(data.clone(), 4, 4, None).unwrap();
        let h = build_hierarchy(4, 4, 2, 4, 0.0).unwrap();
        let p = extract_patch_gallery(&g, &h.level(2)[0]).unwrap();
        assert_eq!((p.height(), p.width(), p.dim()), (2, 2, 4));
        let raw = data.select_rows([0usize, 1, 4, 5].iter());
        for j in 0..2 {
            let expect = raw.column(j) / raw.column(j).norm();
            assert!((p.data().column(j) - expect).norm() < 1e-15);
        }
    }
}
