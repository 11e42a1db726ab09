//! Wavefront subset: `v x y z`, `f a b c` (1-based, negative indices count
//! from the end, `a/b/c` forms keep only the position index) and
//! `usemtl name`. Faces before the first `usemtl` use the material `default`.
//! Comments and `o`, `g`, `s`, `vn`, `vt`, `mtllib` lines are ignored.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::geometry::Vec3;

#[derive(Clone, Debug, PartialEq)]
pub struct ObjFace {
    /// 0-based vertex indices.
    pub vertices: [usize; 3],
    pub material: String,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ObjMesh {
    pub vertices: Vec<Vec3>,
    pub faces: Vec<ObjFace>,
}

pub fn parse(text: &str) -> Result<ObjMesh> {
    let mut mesh = ObjMesh::default();
    let mut material = String::from("default");
    for (n, raw) in text.lines().enumerate() {
        let line_no = n + 1;
        let err = |message: String| Error::Parse { line: line_no, message };
        let line = raw.split('#').next().unwrap_or("").trim();
        let mut words = line.split_whitespace();
        let Some(tag) = words.next() else { continue };
        match tag {
            "v" => {
                let coords: Vec<f64> = words
                    .by_ref()
                    .take(3)
                    .map(|w| w.parse::<f64>().map_err(|e| err(format!("bad coordinate `{w}`: {e}"))))
                    .collect::<Result<_>>()?;
                if coords.len() != 3 {
                    return Err(err("vertex needs 3 coordinates".into()));
                }
                let v = Vec3::new(coords[0], coords[1], coords[2]);
                if !v.is_finite() {
                    return Err(err("non-finite vertex".into()));
                }
                mesh.vertices.push(v);
            }
            "f" => {
                let refs: Vec<&str> = words.collect();
                if refs.len() != 3 {
                    return Err(err(format!("face has {} vertices; only triangles are supported", refs.len())));
                }
                let mut vertices = [0usize; 3];
                for (slot, r) in vertices.iter_mut().zip(&refs) {
                    let first = r.split('/').next().unwrap_or("");
                    let idx: i64 = first.parse().map_err(|e| err(format!("bad face index `{r}`: {e}")))?;
                    let count = mesh.vertices.len() as i64;
                    let resolved = match idx {
                        i if i > 0 && i <= count => i - 1,
                        i if i < 0 && -i <= count => count + i,
                        _ => return Err(err(format!("face index {idx} out of range (1..={count})"))),
                    };
                    *slot = resolved as usize;
                }
                mesh.faces.push(ObjFace { vertices, material: material.clone() });
            }
            "usemtl" => {
                material = words.next().ok_or_else(|| err("usemtl needs a name".into()))?.to_string();
            }
            "o" | "g" | "s" | "vn" | "vt" | "mtllib" => {}
            other => return Err(err(format!("unsupported statement `{other}`"))),
        }
    }
    Ok(mesh)
}

/// Serialize triangles to the same subset. Vertices are emitted per face.
pub fn write<'a>(triangles: impl IntoIterator<Item = ([Vec3; 3], &'a str)>) -> String {
    let mut out = String::new();
    let mut current: Option<&str> = None;
    let mut next_index = 1;
    for (verts, material) in triangles {
        for v in verts {
            let _ = writeln!(out, "v {} {} {}", v.x, v.y, v.z);
        }
        if current != Some(material) {
            let _ = writeln!(out, "usemtl {material}");
            current = Some(material);
        }
        let _ = writeln!(out, "f {} {} {}", next_index, next_index + 1, next_index + 2);
        next_index += 3;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_faces_and_materials() {
        let text = "# tri\nv 0 0 0\nv 1 0 0\nv 0 1 0\nusemtl wall\nf 1 2/5 -1\n";
        let mesh = parse(text).unwrap();
        assert_eq!(mesh.vertices.len(), 3);
        assert_eq!(mesh.faces, vec![ObjFace { vertices: [0, 1, 2], material: "wall".into() }]);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let err = parse("v 0 0 0\nv 1 0 zero\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
        let err = parse("v 0 0 0\nv 1 0 0\nv 0 1 0\nv 1 1 0\nf 1 2 3 4\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 5, .. }), "{err}");
        let err = parse("v 0 0 0\nf 1 2 3\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
    }

    #[test]
    fn written_text_parses_back() {
        let tri = [Vec3::new(0.0, 0.0, 0.0), Vec3::new(1.5, 0.0, 0.0), Vec3::new(0.0, 0.25, 3.0)];
        let text = write([(tri, "a"), (tri, "b")]);
        let mesh = parse(&text).unwrap();
        assert_eq!(mesh.faces.len(), 2);
        assert_eq!(mesh.faces[1].material, "b");
        assert_eq!(mesh.vertices[5], tri[2]);
    }
}
