use crate::geometry::{Aabb, Vec3};

use super::Triangle;

const LEAF_SIZE: usize = 4;

/// Node boxes are padded so that hits lying exactly on a box face are never
/// culled by slab-test rounding.
const BOX_PAD: f64 = 1e-7;

#[derive(Debug, Clone)]
enum Node {
    Inner { bounds: Aabb, left: usize, right: usize },
    Leaf { bounds: Aabb, start: usize, end: usize },
}

impl Node {
    fn bounds(&self) -> &Aabb {
        match self {
            Node::Inner { bounds, .. } | Node::Leaf { bounds, .. } => bounds,
        }
    }
}

/// Median-split bounding volume hierarchy over a fixed triangle list.
#[derive(Debug, Clone)]
pub struct Bvh {
    nodes: Vec<Node>,
    /// Triangle indices, permuted so every leaf owns a contiguous range.
    order: Vec<usize>,
}

impl Bvh {
    pub fn build(triangles: &[Triangle]) -> Bvh {
        let mut bvh = Bvh { nodes: Vec::new(), order: (0..triangles.len()).collect() };
        let centroids: Vec<Vec3> = triangles.iter().map(Triangle::centroid).collect();
        let boxes: Vec<Aabb> = triangles.iter().map(Triangle::bounds).collect();
        if !triangles.is_empty() {
            bvh.build_node(&centroids, &boxes, 0, triangles.len());
        }
        bvh
    }

    fn build_node(&mut self, centroids: &[Vec3], boxes: &[Aabb], start: usize, end: usize) -> usize {
        let mut bounds = Aabb::EMPTY;
        let mut centre_bounds = Aabb::EMPTY;
        for &i in &self.order[start..end] {
            bounds = bounds.union(boxes[i]);
            centre_bounds.grow(centroids[i]);
        }
        let bounds = Aabb {
            min: bounds.min - Vec3::splat(BOX_PAD),
            max: bounds.max + Vec3::splat(BOX_PAD),
        };
        let slot = self.nodes.len();
        if end - start <= LEAF_SIZE {
            self.nodes.push(Node::Leaf { bounds, start, end });
            return slot;
        }
        let axis = centre_bounds.largest_axis();
        let mid = start + (end - start) / 2;
        self.order[start..end].select_nth_unstable_by(mid - start, |&a, &b| {
            centroids[a][axis].total_cmp(&centroids[b][axis]).then(a.cmp(&b))
        });
        // placeholder, patched once children exist
        self.nodes.push(Node::Leaf { bounds, start, end });
        let left = self.build_node(centroids, boxes, start, mid);
        let right = self.build_node(centroids, boxes, mid, end);
        self.nodes[slot] = Node::Inner { bounds, left, right };
        slot
    }

    /// Number of triangle references stored in leaves.
    pub fn leaf_reference_count(&self) -> usize {
        self.nodes
            .iter()
            .map(|n| match n {
                Node::Leaf { start, end, .. } => end - start,
                Node::Inner { .. } => 0,
            })
            .sum()
    }

    /// Triangle indices covered by the leaves, in leaf order.
    pub fn leaf_triangles(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.order.len());
        for n in &self.nodes {
            if let Node::Leaf { start, end, .. } = n {
                out.extend_from_slice(&self.order[*start..*end]);
            }
        }
        out
    }

    /// Closest hit as `(triangle index, t)`; ties in `t` go to the lower index.
    pub fn closest(&self, triangles: &[Triangle], origin: Vec3, dir: Vec3, t_min: f64) -> Option<(usize, f64)> {
        if self.nodes.is_empty() {
            return None;
        }
        let inv_dir = Vec3::new(1.0 / dir.x, 1.0 / dir.y, 1.0 / dir.z);
        let mut best: Option<(usize, f64)> = None;
        let mut stack = Vec::with_capacity(64);
        stack.push(0usize);
        while let Some(n) = stack.pop() {
            let t_max = best.map_or(f64::INFINITY, |(_, t)| t);
            let node = &self.nodes[n];
            if node.bounds().hit(origin, inv_dir, t_min, t_max).is_none() {
                continue;
            }
            match *node {
                Node::Leaf { start, end, .. } => {
                    for &i in &self.order[start..end] {
                        if let Some(t) = triangles[i].hit(origin, dir, t_min, f64::INFINITY) {
                            let better = match best {
                                None => true,
                                Some((j, bt)) => t < bt || (t == bt && i < j),
                            };
                            if better {
                                best = Some((i, t));
                            }
                        }
                    }
                }
                Node::Inner { left, right, .. } => {
                    stack.push(right);
                    stack.push(left);
                }
            }
        }
        best
    }
}
