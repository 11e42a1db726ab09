//! Triangle-mesh scenes with per-surface acoustic materials.
//!
//! Scenes are loaded from a small Wavefront subset (see [`obj`]) plus a TOML
//! material table (see [`materials`]), indexed with a BVH, and are immutable
//! afterwards. All queries take `&self`, so a scene can be shared freely across
//! threads.

mod bvh;
pub mod materials;
pub mod obj;

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Aabb, Vec3};

pub use bvh::Bvh;
pub use materials::{BandLayout, Material, MaterialTable, NUM_BANDS};

/// Minimum triangle area accepted at load time (m^2).
pub const MIN_TRIANGLE_AREA: f64 = 1e-12;

/// Parametric distance below which a re-traced ray ignores hits.
pub const RETRACE_T_MIN: f64 = 1e-4;

/// Offset applied along the surface normal when leaving a hit point.
pub const SURFACE_OFFSET: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Triangle {
    pub v0: Vec3,
    pub v1: Vec3,
    pub v2: Vec3,
    pub material_id: usize,
}

impl Triangle {
    pub fn area(&self) -> f64 {
        0.5 * (self.v1 - self.v0).cross(self.v2 - self.v0).norm()
    }

    pub fn bounds(&self) -> Aabb {
        let mut b = Aabb::new(self.v0, self.v1);
        b.grow(self.v2);
        b
    }

    pub fn centroid(&self) -> Vec3 {
        (self.v0 + self.v1 + self.v2) / 3.0
    }

    /// Möller–Trumbore. Returns the ray parameter of the hit, if any, in `(t_min, t_max)`.
    #[inline]
    pub fn hit(&self, origin: Vec3, dir: Vec3, t_min: f64, t_max: f64) -> Option<f64> {
        let e1 = self.v1 - self.v0;
        let e2 = self.v2 - self.v0;
        let p = dir.cross(e2);
        let det = e1.dot(p);
        if det.abs() < 1e-18 {
            return None;
        }
        let inv_det = 1.0 / det;
        let s = origin - self.v0;
        let u = s.dot(p) * inv_det;
        if !(0.0..=1.0).contains(&u) {
            return None;
        }
        let q = s.cross(e1);
        let v = dir.dot(q) * inv_det;
        if v < 0.0 || u + v > 1.0 {
            return None;
        }
        let t = e2.dot(q) * inv_det;
        (t > t_min && t < t_max).then_some(t)
    }
}

/// Closest intersection of a ray with the scene.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Hit {
    pub t: f64,
    /// Unit normal, oriented against the incoming ray.
    pub normal: Vec3,
    pub material_id: usize,
    pub triangle: usize,
}

#[derive(Debug)]
pub struct Scene {
    triangles: Vec<Triangle>,
    materials: Vec<Material>,
    bands: BandLayout,
    bvh: Bvh,
    bounds: Aabb,
}

impl Scene {
    /// Parse a mesh and a material table and build the scene.
    pub fn load(mesh_source: &str, materials_source: &str) -> Result<Scene> {
        let table = MaterialTable::parse(materials_source)?;
        let mesh = obj::parse(mesh_source)?;
        Scene::from_mesh(mesh, table)
    }

    pub fn load_files(mesh: &std::path::Path, materials: &std::path::Path) -> Result<Scene> {
        Scene::load(&std::fs::read_to_string(mesh)?, &std::fs::read_to_string(materials)?)
    }

    pub fn from_mesh(mesh: obj::ObjMesh, table: MaterialTable) -> Result<Scene> {
        let mut triangles = Vec::with_capacity(mesh.faces.len());
        for (index, face) in mesh.faces.iter().enumerate() {
            let material_id = table.index_of(&face.material).ok_or_else(|| Error::UnknownMaterial {
                face: index,
                name: face.material.clone(),
            })?;
            let [a, b, c] = face.vertices;
            triangles.push(Triangle {
                v0: mesh.vertices[a],
                v1: mesh.vertices[b],
                v2: mesh.vertices[c],
                material_id,
            });
        }
        Scene::new(triangles, table.materials, table.bands)
    }

    pub fn new(triangles: Vec<Triangle>, materials: Vec<Material>, bands: BandLayout) -> Result<Scene> {
        if triangles.is_empty() {
            return Err(Error::InvalidArgument("scene has no triangles".into()));
        }
        let mut bounds = Aabb::EMPTY;
        for (face, tri) in triangles.iter().enumerate() {
            if !(tri.v0.is_finite() && tri.v1.is_finite() && tri.v2.is_finite()) {
                return Err(Error::InvalidArgument(format!("face {face} has non-finite vertices")));
            }
            let area = tri.area();
            if !(area > MIN_TRIANGLE_AREA) {
                return Err(Error::DegenerateTriangle { face, area });
            }
            if tri.material_id >= materials.len() {
                return Err(Error::UnknownMaterial { face, name: format!("#{}", tri.material_id) });
            }
            bounds = bounds.union(tri.bounds());
        }
        let bvh = Bvh::build(&triangles);
        Ok(Scene { triangles, materials, bands, bvh, bounds })
    }

    pub fn triangles(&self) -> &[Triangle] {
        &self.triangles
    }

    pub fn materials(&self) -> &[Material] {
        &self.materials
    }

    pub fn material(&self, id: usize) -> &Material {
        &self.materials[id]
    }

    pub fn bands(&self) -> &BandLayout {
        &self.bands
    }

    pub fn bounds(&self) -> Aabb {
        self.bounds
    }

    pub fn bvh(&self) -> &Bvh {
        &self.bvh
    }

    /// Nearest hit with `t > t_min`, using the BVH.
    pub fn intersect(&self, origin: Vec3, direction: Vec3, t_min: f64) -> Option<Hit> {
        debug_assert!((direction.norm() - 1.0).abs() < 1e-9, "direction must be unit length");
        let (index, t) = self.bvh.closest(&self.triangles, origin, direction, t_min)?;
        Some(self.make_hit(index, t, direction))
    }

    /// Nearest hit by testing every triangle. Reference for [`Scene::intersect`].
    pub fn intersect_exhaustive(&self, origin: Vec3, direction: Vec3, t_min: f64) -> Option<Hit> {
        let mut best: Option<(usize, f64)> = None;
        // strict `<` keeps the lowest index on ties
        for (i, tri) in self.triangles.iter().enumerate() {
            let t_max = best.map_or(f64::INFINITY, |(_, t)| t);
            if let Some(t) = tri.hit(origin, direction, t_min, t_max) {
                best = Some((i, t));
            }
        }
        best.map(|(index, t)| self.make_hit(index, t, direction))
    }

    /// True when nothing blocks the open segment between `a` and `b`.
    pub fn visible(&self, a: Vec3, b: Vec3) -> bool {
        let delta = b - a;
        let distance = delta.norm();
        let dir = delta / distance;
        match self.intersect(a, dir, 0.0) {
            Some(hit) => hit.t >= distance,
            None => true,
        }
    }

    fn make_hit(&self, index: usize, t: f64, direction: Vec3) -> Hit {
        let tri = &self.triangles[index];
        let mut normal = (tri.v1 - tri.v0).cross(tri.v2 - tri.v0).normalized();
        if normal.dot(direction) > 0.0 {
            normal = -normal;
        }
        Hit { t, normal, material_id: tri.material_id, triangle: index }
    }

    /// Total surface area of all triangles.
    pub fn surface_area(&self) -> f64 {
        self.triangles.iter().map(Triangle::area).sum()
    }

    /// Enclosed volume and surface area of a closed, consistently oriented mesh.
    ///
    /// Vertices are welded by exact coordinate equality. Every directed edge must
    /// be matched by exactly one opposite edge; otherwise the offending edges
    /// are returned in the error.
    pub fn analytic_volume_and_area(&self) -> Result<(f64, f64)> {
        let boundary = self.open_edges();
        if !boundary.is_empty() {
            return Err(Error::NotWatertight { edges: boundary });
        }
        // signed tetrahedra relative to the box centre to limit cancellation
        let c = self.bounds.centroid();
        let mut six_v = 0.0;
        for t in &self.triangles {
            six_v += (t.v0 - c).dot((t.v1 - c).cross(t.v2 - c));
        }
        Ok(((six_v / 6.0).abs(), self.surface_area()))
    }

    fn open_edges(&self) -> Vec<(Vec3, Vec3)> {
        let key = |v: Vec3| [v.x.to_bits(), v.y.to_bits(), v.z.to_bits()];
        let mut ids: HashMap<[u64; 3], usize> = HashMap::new();
        let mut positions = Vec::new();
        let mut directed: HashMap<(usize, usize), usize> = HashMap::new();
        for t in &self.triangles {
            let mut vid = [0usize; 3];
            for (slot, v) in vid.iter_mut().zip([t.v0, t.v1, t.v2]) {
                *slot = *ids.entry(key(v)).or_insert_with(|| {
                    positions.push(v);
                    positions.len() - 1
                });
            }
            for k in 0..3 {
                *directed.entry((vid[k], vid[(k + 1) % 3])).or_default() += 1;
            }
        }
        let mut bad: Vec<(usize, usize)> = directed
            .iter()
            .filter(|(&(a, b), &count)| count != 1 || directed.get(&(b, a)) != Some(&1))
            .map(|(&e, _)| e)
            .collect();
        bad.sort_unstable();
        bad.into_iter().map(|(a, b)| (positions[a], positions[b])).collect()
    }
}
