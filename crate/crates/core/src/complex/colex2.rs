//! Closed 2-colexes: trivalent, 3-colorable cellulations of the sphere.
//!
//! Built as duals of 3-colored triangulations: triangles become vertices and
//! each triangulation vertex becomes a face colored like it.

use crate::error::{Error, Result};
use std::collections::{BTreeMap, BTreeSet};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Colex2 {
    pub n: usize,
    /// Face vertex sets.
    pub faces: Vec<Vec<usize>>,
    pub face_color: Vec<u8>,
}

impl Colex2 {
    /// Dual of a triangulation given by vertex colors and triangles.
    pub fn from_triangulation(colors: &[u8], triangles: &[[usize; 3]]) -> Result<Colex2> {
        let mut faces = vec![Vec::new(); colors.len()];
        for (t, tri) in triangles.iter().enumerate() {
            for &v in tri {
                faces[v].push(t);
            }
        }
        let c = Colex2 { n: triangles.len(), faces, face_color: colors.to_vec() };
        c.validate()?;
        Ok(c)
    }

    /// Sphere 2-colex family. Size 1 is the cube (dual of the octahedron), size 2
    /// the truncated octahedron (dual of the subdivided tetrahedron) and size 3
    /// the dual of the subdivided octahedron.
    pub fn sphere(size: usize) -> Result<Colex2> {
        let octa_tris: Vec<[usize; 3]> = {
            // vertices +-x, +-y, +-z as 0..6: (axis, sign) -> 2*axis + sign
            let mut t = Vec::new();
            for sx in 0..2 {
                for sy in 0..2 {
                    for sz in 0..2 {
                        t.push([sx, 2 + sy, 4 + sz]);
                    }
                }
            }
            t
        };
        match size {
            1 => {
                let colors: Vec<u8> = (0..6).map(|v| (v / 2) as u8).collect();
                Colex2::from_triangulation(&colors, &octa_tris)
            }
            2 => {
                let tet: Vec<[usize; 3]> = vec![[0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3]];
                let (colors, tris) = barycentric(4, &tet);
                Colex2::from_triangulation(&colors, &tris)
            }
            3 => {
                let (colors, tris) = barycentric(6, &octa_tris);
                Colex2::from_triangulation(&colors, &tris)
            }
            _ => Err(Error::Invalid(format!("sphere 2-colex size {size} not available (1..=3)"))),
        }
    }

    /// Every vertex lies in exactly three faces of distinct colors; faces have
    /// even length; the face graph has Euler characteristic 2.
    pub fn validate(&self) -> Result<()> {
        let err = |m: String| Err(Error::InvalidColex(m));
        let mut around = vec![Vec::new(); self.n];
        for (f, vs) in self.faces.iter().enumerate() {
            if vs.len() < 2 || vs.len() % 2 == 1 {
                return err(format!("face {f} has {} vertices", vs.len()));
            }
            for &v in vs {
                around[v].push(self.face_color[f]);
            }
        }
        for (v, cs) in around.iter().enumerate() {
            let set: BTreeSet<u8> = cs.iter().copied().collect();
            if cs.len() != 3 || set.len() != 3 {
                return err(format!("vertex {v} is not trivalent and 3-colored"));
            }
        }
        // trivalent: E = 3V/2; sphere: V - E + F = 2
        let chi = self.n as i64 - (3 * self.n / 2) as i64 + self.faces.len() as i64;
        if chi != 2 {
            return err(format!("Euler characteristic {chi}, expected 2"));
        }
        Ok(())
    }
}

/// Barycentric subdivision of a closed triangle surface; vertices are colored
/// by the dimension of the simplex they subdivide.
fn barycentric(nv: usize, tris: &[[usize; 3]]) -> (Vec<u8>, Vec<[usize; 3]>) {
    let mut colors: Vec<u8> = vec![0; nv];
    let mut edge_id: BTreeMap<[usize; 2], usize> = BTreeMap::new();
    for t in tris {
        for (a, b) in [(t[0], t[1]), (t[0], t[2]), (t[1], t[2])] {
            let key = [a.min(b), a.max(b)];
            if !edge_id.contains_key(&key) {
                edge_id.insert(key, colors.len());
                colors.push(1);
            }
        }
    }
    let mut out = Vec::new();
    for t in tris {
        let c = colors.len();
        colors.push(2);
        for &(a, b) in &[(t[0], t[1]), (t[1], t[0]), (t[0], t[2]), (t[2], t[0]), (t[1], t[2]), (t[2], t[1])] {
            let e = edge_id[&[a.min(b), a.max(b)]];
            out.push([a, e, c]);
        }
    }
    (colors, out)
}
