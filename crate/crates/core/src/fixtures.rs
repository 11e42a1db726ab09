//! Procedural test scenes: simple closed shapes, a hall with pillars and a
//! corridor of three coupled rooms.
//!
//! Rectilinear scenes are built on a grid of cells whose faces are emitted
//! wherever an air cell borders a solid or outside cell. Every emitted quad uses
//! the shared grid coordinates, so the resulting meshes are watertight and
//! consistently oriented (normals point out of the air volume).

use crate::error::Result;
use crate::geometry::{Aabb, Vec3};
use crate::scene::{obj, Scene};

/// Mesh text plus material table text, ready for [`Scene::load`].
#[derive(Clone, Debug)]
pub struct SceneSource {
    pub mesh: String,
    pub materials: String,
}

impl SceneSource {
    pub fn load(&self) -> Result<Scene> {
        Scene::load(&self.mesh, &self.materials)
    }
}

fn uniform_materials(name: &str, absorption: [f64; 4]) -> String {
    format!("[materials]\n{name} = {absorption:?}\n")
}

/// Air volume made of boxes minus solid boxes, meshed on their common grid.
#[derive(Clone, Debug, Default)]
pub struct RectilinearBuilder {
    air: Vec<Aabb>,
    solid: Vec<Aabb>,
    floor: Option<String>,
    ceiling: Option<String>,
    wall: Option<String>,
}

impl RectilinearBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn air(mut self, b: Aabb) -> Self {
        self.air.push(b);
        self
    }

    pub fn solid(mut self, b: Aabb) -> Self {
        self.solid.push(b);
        self
    }

    /// Materials for downward-, upward- and sideways-facing boundary faces.
    pub fn materials(mut self, floor: &str, ceiling: &str, wall: &str) -> Self {
        self.floor = Some(floor.into());
        self.ceiling = Some(ceiling.into());
        self.wall = Some(wall.into());
        self
    }

    fn breakpoints(&self, axis: usize) -> Vec<f64> {
        let mut xs: Vec<f64> = self.air.iter().chain(&self.solid).flat_map(|b| [b.min[axis], b.max[axis]]).collect();
        xs.sort_by(f64::total_cmp);
        xs.dedup();
        xs
    }

    /// Triangles with their material names.
    pub fn triangles(&self) -> Vec<([Vec3; 3], String)> {
        let grid = [self.breakpoints(0), self.breakpoints(1), self.breakpoints(2)];
        let dims = [grid[0].len() - 1, grid[1].len() - 1, grid[2].len() - 1];
        let is_air = |c: [usize; 3]| {
            let centre = Vec3::new(
                0.5 * (grid[0][c[0]] + grid[0][c[0] + 1]),
                0.5 * (grid[1][c[1]] + grid[1][c[1] + 1]),
                0.5 * (grid[2][c[2]] + grid[2][c[2] + 1]),
            );
            self.air.iter().any(|b| b.contains(centre)) && !self.solid.iter().any(|b| b.contains(centre))
        };
        let floor = self.floor.as_deref().unwrap_or("wall");
        let ceiling = self.ceiling.as_deref().unwrap_or("wall");
        let wall = self.wall.as_deref().unwrap_or("wall");

        let mut out = Vec::new();
        for i in 0..dims[0] {
            for j in 0..dims[1] {
                for k in 0..dims[2] {
                    let cell = [i, j, k];
                    if !is_air(cell) {
                        continue;
                    }
                    for axis in 0..3 {
                        for positive in [false, true] {
                            let neighbour_air = if positive {
                                cell[axis] + 1 < dims[axis] && {
                                    let mut n = cell;
                                    n[axis] += 1;
                                    is_air(n)
                                }
                            } else {
                                cell[axis] > 0 && {
                                    let mut n = cell;
                                    n[axis] -= 1;
                                    is_air(n)
                                }
                            };
                            if neighbour_air {
                                continue;
                            }
                            let material = match (axis, positive) {
                                (2, false) => floor,
                                (2, true) => ceiling,
                                _ => wall,
                            };
                            let [a, b] = cell_face(&grid, cell, axis, positive);
                            out.push((a, material.to_string()));
                            out.push((b, material.to_string()));
                        }
                    }
                }
            }
        }
        out
    }

    pub fn mesh_text(&self) -> String {
        let tris = self.triangles();
        obj::write(tris.iter().map(|(v, m)| (*v, m.as_str())))
    }
}

/// The two triangles of one cell face, wound so the normal points along
/// `+axis` (or `-axis` when `positive` is false).
fn cell_face(grid: &[Vec<f64>; 3], cell: [usize; 3], axis: usize, positive: bool) -> [[Vec3; 3]; 2] {
    let u = (axis + 1) % 3;
    let v = (axis + 2) % 3;
    let plane = grid[axis][cell[axis] + usize::from(positive)];
    let (u0, u1) = (grid[u][cell[u]], grid[u][cell[u] + 1]);
    let (v0, v1) = (grid[v][cell[v]], grid[v][cell[v] + 1]);
    let point = |cu: f64, cv: f64| {
        let mut p = [0.0; 3];
        p[axis] = plane;
        p[u] = cu;
        p[v] = cv;
        Vec3::new(p[0], p[1], p[2])
    };
    // e_u x e_v = e_axis for cyclic (axis, u, v)
    let mut quad = [point(u0, v0), point(u1, v0), point(u1, v1), point(u0, v1)];
    if !positive {
        quad.reverse();
    }
    [[quad[0], quad[1], quad[2]], [quad[0], quad[2], quad[3]]]
}

/// Axis-aligned box room `[−x/2, x/2] × [−y/2, y/2] × [−z/2, z/2]` with one material.
pub fn prism_with_absorption(x: f64, y: f64, z: f64, absorption: [f64; 4]) -> SceneSource {
    let half = Vec3::new(x, y, z) * 0.5;
    SceneSource {
        mesh: RectilinearBuilder::new().air(Aabb::new(-half, half)).mesh_text(),
        materials: uniform_materials("wall", absorption),
    }
}

pub fn prism(x: f64, y: f64, z: f64) -> SceneSource {
    prism_with_absorption(x, y, z, [0.2; 4])
}

/// Cube of edge `edge` centred on the origin.
pub fn cube(edge: f64) -> SceneSource {
    prism(edge, edge, edge)
}

pub fn cube_with_absorption(edge: f64, absorption: f64) -> SceneSource {
    prism_with_absorption(edge, edge, edge, [absorption; 4])
}

/// Square pyramid with base side `base` on `z = 0`, centred on the z axis, apex at height `height`.
pub fn square_pyramid(base: f64, height: f64) -> SceneSource {
    let h = base / 2.0;
    let corners = [Vec3::new(-h, -h, 0.0), Vec3::new(h, -h, 0.0), Vec3::new(h, h, 0.0), Vec3::new(-h, h, 0.0)];
    let apex = Vec3::new(0.0, 0.0, height);
    let mut tris = vec![[corners[0], corners[3], corners[2]], [corners[0], corners[2], corners[1]]];
    for k in 0..4 {
        tris.push([corners[k], corners[(k + 1) % 4], apex]);
    }
    SceneSource {
        mesh: obj::write(tris.into_iter().map(|t| (t, "wall"))),
        materials: uniform_materials("wall", [0.2; 4]),
    }
}

/// Pillar cross-section side used by [`pillar_room`] (m).
pub const PILLAR_SIDE: f64 = 0.8;

/// 12 m × 6 m × 5 m hall (x, y, z) with eight full-height square pillars in two rows of four.
pub fn pillar_room() -> SceneSource {
    let mut builder = RectilinearBuilder::new().air(Aabb::new(Vec3::ZERO, Vec3::new(12.0, 6.0, 5.0)));
    let h = PILLAR_SIDE / 2.0;
    for &x in &[1.5, 4.5, 7.5, 10.5] {
        for &y in &[2.0, 4.0] {
            builder = builder.solid(Aabb::new(Vec3::new(x - h, y - h, 0.0), Vec3::new(x + h, y + h, 5.0)));
        }
    }
    SceneSource { mesh: builder.mesh_text(), materials: uniform_materials("wall", [0.2; 4]) }
}

/// A closed shape from the mean-free-path validation set, with a source position inside it.
#[derive(Clone, Debug)]
pub struct ValidationShape {
    pub name: &'static str,
    pub dimensions: &'static str,
    pub source: SceneSource,
    pub source_position: Vec3,
}

pub fn table1_shapes() -> Vec<ValidationShape> {
    vec![
        ValidationShape {
            name: "Cube",
            dimensions: "5",
            source: cube(5.0),
            source_position: Vec3::new(0.3, -0.2, 0.1),
        },
        ValidationShape {
            name: "Rect. Prism",
            dimensions: "(2,3,4)",
            source: prism(2.0, 3.0, 4.0),
            source_position: Vec3::new(0.1, 0.2, -0.3),
        },
        ValidationShape {
            name: "Sq. Pyramid",
            dimensions: "(2.8,3) (b,h)",
            source: square_pyramid(2.8, 3.0),
            source_position: Vec3::new(0.1, -0.15, 0.8),
        },
        ValidationShape {
            name: "Room with Pillars",
            dimensions: "(5,6,12)",
            source: pillar_room(),
            source_position: Vec3::new(6.0, 3.1, 2.5),
        },
    ]
}

/// Three rooms of 135, 256 and 125 m^3 joined by doorways through 0.2 m walls.
#[derive(Clone, Debug)]
pub struct CorridorFixture {
    pub source: SceneSource,
    pub rooms: Vec<Aabb>,
    /// Doorway volumes between consecutive rooms.
    pub apertures: Vec<Aabb>,
    /// Listener path through all three rooms.
    pub path: Vec<Vec3>,
}

pub const CORRIDOR_PATH_POINTS: usize = 60;

/// Shape parameters of the corridor; rooms are laid out along +x, centred on y = 0.
#[derive(Clone, Debug, PartialEq)]
pub struct CorridorLayout {
    /// `(length x, width y, height z)` per room.
    pub rooms: Vec<(f64, f64, f64)>,
    pub wall_thickness: f64,
    pub door_width: f64,
    pub door_height: f64,
    /// Listener path height and lateral offset.
    pub path_y: f64,
    pub path_z: f64,
    /// Distance kept between the path ends and the end walls.
    pub end_margin: f64,
}

impl Default for CorridorLayout {
    fn default() -> Self {
        CorridorLayout {
            // 135, 256 and 125 m^3
            rooms: vec![(15.0, 3.0, 3.0), (18.0, 256.0 / 54.0, 3.0), (12.5, 2.5, 4.0)],
            wall_thickness: 0.2,
            door_width: 0.6,
            door_height: 1.8,
            path_y: 0.2,
            path_z: 1.5,
            end_margin: 0.5,
        }
    }
}

pub fn corridor() -> CorridorFixture {
    corridor_with_points(CORRIDOR_PATH_POINTS)
}

pub fn corridor_with_points(n_points: usize) -> CorridorFixture {
    CorridorLayout::default().build(n_points)
}

impl CorridorLayout {
    pub fn build(&self, n_points: usize) -> CorridorFixture {
        let mut x = 0.0;
        let rooms: Vec<Aabb> = self
            .rooms
            .iter()
            .map(|&(l, w, h)| {
                let room = Aabb::new(Vec3::new(x, -w / 2.0, 0.0), Vec3::new(x + l, w / 2.0, h));
                x += l + self.wall_thickness;
                room
            })
            .collect();
        let half = self.door_width / 2.0;
        let apertures: Vec<Aabb> = rooms
            .windows(2)
            .map(|w| Aabb::new(Vec3::new(w[0].max.x, -half, 0.0), Vec3::new(w[1].min.x, half, self.door_height)))
            .collect();
        let mut builder = RectilinearBuilder::new().materials("floor", "ceiling", "wall");
        for b in rooms.iter().chain(&apertures) {
            builder = builder.air(*b);
        }
        let materials = "[materials]\n\
            ceiling = [0.10, 0.12, 0.14, 0.16]\n\
            floor = [0.14, 0.16, 0.18, 0.20]\n\
            wall = [0.10, 0.12, 0.14, 0.16]\n"
            .to_string();

        let start = rooms[0].min.x + self.end_margin;
        let end = rooms[rooms.len() - 1].max.x - self.end_margin;
        let path = (0..n_points)
            .map(|i| {
                let s = if n_points > 1 { i as f64 / (n_points - 1) as f64 } else { 0.0 };
                Vec3::new(start + s * (end - start), self.path_y, self.path_z)
            })
            .collect();
        CorridorFixture { source: SceneSource { mesh: builder.mesh_text(), materials }, rooms, apertures, path }
    }
}

impl CorridorFixture {
    /// Distance from `p` to the nearest doorway volume.
    pub fn aperture_distance(&self, p: Vec3) -> f64 {
        self.apertures.iter().map(|a| a.distance_to(p)).fold(f64::INFINITY, f64::min)
    }

    /// Index of the room containing `p`, if any.
    pub fn room_of(&self, p: Vec3) -> Option<usize> {
        self.rooms.iter().position(|r| r.contains(p))
    }

    pub fn path_csv(&self) -> String {
        let mut out = String::from("x,y,z\n");
        for p in &self.path {
            out.push_str(&format!("{},{},{}\n", p.x, p.y, p.z));
        }
        out
    }
}
