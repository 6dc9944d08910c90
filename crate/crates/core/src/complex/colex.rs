//! Tetrahedral 3-colexes.
//!
//! Built as the dual of a 4-colored triangulation of the ball: triangulation
//! tetrahedra become colex vertices (qubits), non-corner triangulation vertices
//! become 3-cells, triangulation edges become faces and shared triangles become
//! colex edges. The four corner vertices stand for the four boundary facets.
//!
//! The triangulation is a region of the body-centred cubic (disphenoid)
//! tetrahedral honeycomb, which is 4-colorable, capped by one cone per facet.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;

pub const COLOR_NAMES: [char; 4] = ['r', 'g', 'b', 'y'];
pub type Color = u8;

pub fn color_name(c: Color) -> char {
    COLOR_NAMES[c as usize]
}

pub fn parse_color(s: &str) -> Option<Color> {
    let mut it = s.chars();
    let c = it.next()?;
    if it.next().is_some() {
        return None;
    }
    COLOR_NAMES.iter().position(|&n| n == c).map(|i| i as Color)
}

/// The two colors other than `a` and `b`.
pub fn complement(a: Color, b: Color) -> [Color; 2] {
    let v: Vec<Color> = (0..4).filter(|&c| c != a && c != b).collect();
    [v[0], v[1]]
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColexFace {
    pub vertices: Vec<usize>,
    /// Sorted color pair.
    pub colors: [Color; 2],
    /// Boundary facet color for faces on a facet.
    pub facet: Option<Color>,
    /// Adjacent 3-cells (derived).
    pub cells: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColexCell {
    pub vertices: Vec<usize>,
    pub color: Color,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Colex {
    pub n: usize,
    /// Colex edges; `None` as second endpoint marks a dangling boundary edge.
    pub edges: Vec<(usize, Option<usize>)>,
    pub faces: Vec<ColexFace>,
    pub cells: Vec<ColexCell>,
    /// Color of the boundary facet holding the encoded qubit.
    pub outer: Color,
}

type P3 = [i32; 3];

fn vcolor(p: &P3) -> Color {
    if p[0].rem_euclid(2) == 0 {
        ((p[0].div_euclid(2) + p[1].div_euclid(2) + p[2].div_euclid(2)).rem_euclid(2)) as Color
    } else {
        2 + (((p[0] - 1) / 2 + (p[1] - 1) / 2 + (p[2] - 1) / 2).rem_euclid(2)) as Color
    }
}

/// Disphenoid tetrahedra within the half-planes `-(n_i . p) <= c_i`.
fn honeycomb_region(cs: [i32; 4]) -> Vec<[P3; 4]> {
    const NORMALS: [P3; 4] = [[1, 1, 1], [1, -1, -1], [-1, 1, -1], [-1, -1, 1]];
    let inside = |p: &P3| {
        NORMALS.iter().zip(cs).all(|(n, c)| -(n[0] * p[0] + n[1] * p[1] + n[2] * p[2]) <= c)
    };
    let r = 2 * (cs.iter().map(|c| c.abs()).max().unwrap() + 4);
    let mut out = BTreeSet::new();
    for x in (-r..=r).step_by(2) {
        for y in (-r..=r).step_by(2) {
            for z in (-r..=r).step_by(2) {
                let a = [x, y, z];
                for i in 0..3 {
                    let mut b = a;
                    b[i] += 2;
                    let (j, k) = ((i + 1) % 3, (i + 2) % 3);
                    let sq: Vec<P3> = [(1, 1), (1, -1), (-1, -1), (-1, 1)]
                        .iter()
                        .map(|&(sj, sk)| {
                            let mut h = a;
                            h[i] += 1;
                            h[j] += sj;
                            h[k] += sk;
                            h
                        })
                        .collect();
                    for t in 0..4 {
                        let mut tet = [a, b, sq[t], sq[(t + 1) % 4]];
                        if tet.iter().all(inside) {
                            tet.sort();
                            out.insert(tet);
                        }
                    }
                }
            }
        }
    }
    out.into_iter().collect()
}

/// Colored triangulation of the ball with four corner vertices.
#[derive(Clone, Debug)]
pub struct Triangulation {
    pub colors: Vec<Color>,
    /// Corner vertex for each facet color.
    pub corners: [usize; 4],
    pub tets: Vec<[usize; 4]>,
}

fn sorted3(mut t: [usize; 3]) -> [usize; 3] {
    t.sort_unstable();
    t
}

fn faces_of(t: &[usize; 4]) -> [([usize; 3], usize); 4] {
    [
        (sorted3([t[1], t[2], t[3]]), t[0]),
        (sorted3([t[0], t[2], t[3]]), t[1]),
        (sorted3([t[0], t[1], t[3]]), t[2]),
        (sorted3([t[0], t[1], t[2]]), t[3]),
    ]
}

impl Triangulation {
    /// Capped honeycomb region for colex size `size >= 1`.
    pub fn tetrahedral(size: usize) -> Result<Self> {
        if size == 0 {
            return Err(Error::Invalid("colex size must be at least 1".into()));
        }
        let k = size as i32 - 1;
        let region = honeycomb_region([k, k + 1, k + 2, k + 3]);
        let mut ids: BTreeMap<P3, usize> = BTreeMap::new();
        for t in &region {
            for p in t {
                let next = ids.len();
                ids.entry(*p).or_insert(next);
            }
        }
        // re-index in coordinate order
        let pts: Vec<P3> = ids.keys().copied().collect();
        let ids: HashMap<P3, usize> = pts.iter().enumerate().map(|(i, p)| (*p, i)).collect();
        let mut colors: Vec<Color> = pts.iter().map(vcolor).collect();
        let mut tets: Vec<[usize; 4]> = region
            .iter()
            .map(|t| {
                let mut v = [ids[&t[0]], ids[&t[1]], ids[&t[2]], ids[&t[3]]];
                v.sort_unstable();
                v
            })
            .collect();

        // boundary triangles grouped by the color they miss
        let mut tri: HashMap<[usize; 3], Vec<usize>> = HashMap::new();
        for t in &tets {
            for (f, opp) in faces_of(t) {
                tri.entry(f).or_default().push(opp);
            }
        }
        let mut boundary: Vec<([usize; 3], Color)> = tri
            .iter()
            .filter(|(_, o)| o.len() == 1)
            .map(|(f, o)| (*f, colors[o[0]]))
            .collect();
        boundary.sort();
        let region_of: HashMap<[usize; 3], Color> = boundary.iter().copied().collect();

        let nb = colors.len();
        let corners = [nb, nb + 1, nb + 2, nb + 3];
        colors.extend([0, 1, 2, 3]);

        // cone tets
        for (f, c) in &boundary {
            let mut t = [f[0], f[1], f[2], corners[*c as usize]];
            t.sort_unstable();
            tets.push(t);
        }
        // seam edges between regions
        let mut edge_regions: BTreeMap<[usize; 2], BTreeSet<Color>> = BTreeMap::new();
        let mut vertex_regions: BTreeMap<usize, BTreeSet<Color>> = BTreeMap::new();
        for (f, c) in &region_of {
            for (a, b) in [(f[0], f[1]), (f[0], f[2]), (f[1], f[2])] {
                edge_regions.entry([a, b]).or_default().insert(*c);
            }
            for &v in f {
                vertex_regions.entry(v).or_default().insert(*c);
            }
        }
        for (e, rs) in &edge_regions {
            if rs.len() == 2 {
                let r: Vec<Color> = rs.iter().copied().collect();
                let mut t = [e[0], e[1], corners[r[0] as usize], corners[r[1] as usize]];
                t.sort_unstable();
                tets.push(t);
            } else if rs.len() > 2 {
                return Err(Error::InvalidColex("boundary edge in three regions".into()));
            }
        }
        let mut triple = 0;
        for (v, rs) in &vertex_regions {
            match rs.len() {
                1 | 2 => {}
                3 => {
                    let missing: Vec<Color> = (0..4).filter(|c| !rs.contains(c)).collect();
                    if colors[*v] != missing[0] {
                        return Err(Error::InvalidColex("triple point has the wrong color".into()));
                    }
                    let r: Vec<usize> = rs.iter().map(|&c| corners[c as usize]).collect();
                    let mut t = [*v, r[0], r[1], r[2]];
                    t.sort_unstable();
                    tets.push(t);
                    triple += 1;
                }
                _ => return Err(Error::InvalidColex("boundary vertex meets all regions".into())),
            }
        }
        if triple != 4 {
            return Err(Error::InvalidColex(format!("expected 4 triple points, found {triple}")));
        }
        let tr = Triangulation { colors, corners, tets };
        tr.check()?;
        Ok(tr)
    }

    /// Each tetrahedron has four colors; each triangle lies in at most two
    /// tetrahedra; the link of every vertex is connected; Euler characteristic 1.
    pub fn check(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidColex(m.into()));
        let mut tri: HashMap<[usize; 3], usize> = HashMap::new();
        let mut edges = BTreeSet::new();
        for t in &self.tets {
            let cs: BTreeSet<Color> = t.iter().map(|&v| self.colors[v]).collect();
            if cs.len() != 4 {
                return bad("tetrahedron without four colors");
            }
            for (f, _) in faces_of(t) {
                *tri.entry(f).or_default() += 1;
            }
            for a in 0..4 {
                for b in a + 1..4 {
                    edges.insert([t[a], t[b]]);
                }
            }
        }
        if tri.values().any(|&c| c > 2) {
            return bad("triangle shared by more than two tetrahedra");
        }
        let nv = self.colors.len() as i64;
        let chi = nv - edges.len() as i64 + tri.len() as i64 - self.tets.len() as i64;
        if chi != 1 {
            return Err(Error::InvalidColex(format!("Euler characteristic {chi}, expected 1")));
        }
        Ok(())
    }

    pub fn to_colex(&self, outer: Color) -> Colex {
        let corner_color: HashMap<usize, Color> =
            self.corners.iter().enumerate().map(|(c, &v)| (v, c as Color)).collect();
        let n = self.tets.len();
        // cells: non-corner vertices in index order
        let mut cell_of = vec![None; self.colors.len()];
        let mut cells = Vec::new();
        for v in 0..self.colors.len() {
            if !corner_color.contains_key(&v) {
                cell_of[v] = Some(cells.len());
                cells.push(ColexCell { vertices: Vec::new(), color: self.colors[v] });
            }
        }
        let mut face_map: BTreeMap<[usize; 2], Vec<usize>> = BTreeMap::new();
        let mut tri: BTreeMap<[usize; 3], Vec<usize>> = BTreeMap::new();
        for (q, t) in self.tets.iter().enumerate() {
            for &v in t {
                if let Some(c) = cell_of[v] {
                    cells[c].vertices.push(q);
                }
            }
            for a in 0..4 {
                for b in a + 1..4 {
                    if cell_of[t[a]].is_some() || cell_of[t[b]].is_some() {
                        face_map.entry([t[a], t[b]]).or_default().push(q);
                    }
                }
            }
            for (f, _) in faces_of(t) {
                tri.entry(f).or_default().push(q);
            }
        }
        let faces = face_map
            .into_iter()
            .map(|([a, b], vertices)| {
                let mut colors = complement(self.colors[a], self.colors[b]);
                colors.sort_unstable();
                let facet = corner_color.get(&a).or(corner_color.get(&b)).copied();
                let cells = [a, b].iter().filter_map(|&v| cell_of[v]).collect();
                ColexFace { vertices, colors, facet, cells }
            })
            .collect();
        let edges = tri
            .into_values()
            .map(|ts| (ts[0], ts.get(1).copied()))
            .collect();
        Colex { n, edges, faces, cells, outer }
    }
}

impl Colex {
    /// Tetrahedral colex of the given size; the outer facet is colored b.
    pub fn tetrahedral(size: usize) -> Result<Colex> {
        let c = Triangulation::tetrahedral(size)?.to_colex(2);
        c.validate()?;
        Ok(c)
    }

    /// Faces lying on the facet of color `c`.
    pub fn facet_faces(&self, c: Color) -> impl Iterator<Item = usize> + '_ {
        self.faces.iter().enumerate().filter(move |(_, f)| f.facet == Some(c)).map(|(i, _)| i)
    }

    /// Vertices on the facet of color `c`.
    pub fn facet_vertices(&self, c: Color) -> BTreeSet<usize> {
        self.facet_faces(c).flat_map(|f| self.faces[f].vertices.iter().copied()).collect()
    }

    /// Relabeled color of an outer face: A, B or C by the cell color it borders.
    pub fn outer_label(&self, face: usize) -> Option<char> {
        let f = &self.faces[face];
        if f.facet != Some(self.outer) {
            return None;
        }
        let cell = self.cells[f.cells[0]].color;
        let others: Vec<Color> = (0..4).filter(|&c| c != self.outer).collect();
        others.iter().position(|&c| c == cell).map(|i| ['A', 'B', 'C'][i])
    }

    /// Regions (cells, then facets as `cells.len() + color`) containing each vertex.
    pub fn vertex_regions(&self) -> Vec<Vec<usize>> {
        let mut regions = vec![Vec::new(); self.n];
        for (i, c) in self.cells.iter().enumerate() {
            for &v in &c.vertices {
                regions[v].push(i);
            }
        }
        for col in 0..4 {
            for v in self.facet_vertices(col) {
                regions[v].push(self.cells.len() + col as usize);
            }
        }
        regions
    }

    pub fn region_color(&self, r: usize) -> Color {
        if r < self.cells.len() {
            self.cells[r].color
        } else {
            (r - self.cells.len()) as Color
        }
    }

    pub fn validate(&self) -> Result<()> {
        let err = |m: String| Err(Error::InvalidColex(m));
        let mut degree = vec![0usize; self.n];
        for &(a, b) in &self.edges {
            if a >= self.n || b.is_some_and(|b| b >= self.n) || Some(a) == b {
                return err(format!("bad edge ({a}, {b:?})"));
            }
            degree[a] += 1;
            if let Some(b) = b {
                degree[b] += 1;
            }
        }
        if let Some(v) = degree.iter().position(|&d| d != 4) {
            return err(format!("vertex {v} has valence {}", degree[v]));
        }
        for (i, f) in self.faces.iter().enumerate() {
            if f.vertices.len() < 4 || f.vertices.len() % 2 == 1 {
                return err(format!("face {i} has {} vertices", f.vertices.len()));
            }
            let mut around: Vec<Color> = f.cells.iter().map(|&c| self.cells[c].color).collect();
            around.extend(f.facet);
            if around.len() != 2 || around[0] == around[1] {
                return err(format!("face {i} is not between two distinct regions"));
            }
            let mut want = complement(around[0], around[1]);
            want.sort_unstable();
            if want != f.colors {
                return err(format!("face {i} violates the color-pair rule"));
            }
            for &c in &f.cells {
                if !f.vertices.iter().all(|v| self.cells[c].vertices.binary_search(v).is_ok()) {
                    return err(format!("face {i} not contained in its cell {c}"));
                }
            }
        }
        let regions = self.vertex_regions();
        for (v, r) in regions.iter().enumerate() {
            let set: BTreeSet<Color> = r.iter().map(|&x| self.region_color(x)).collect();
            if r.len() != 4 || set.len() != 4 {
                return err(format!("vertex {v} is not in four differently colored regions"));
            }
        }
        // interior edges connect vertices sharing exactly three regions
        for &(a, b) in &self.edges {
            if let Some(b) = b {
                let shared = regions[b].iter().filter(|r| regions[a].contains(r)).count();
                if shared != 3 {
                    return err(format!("edge ({a}, {b}) shares {shared} region colors"));
                }
            }
        }
        if !(0..4).contains(&self.outer) || self.facet_faces(self.outer).next().is_none() {
            return err("outer facet missing".into());
        }
        Ok(())
    }

    /// Color of an interior edge: the one region color its endpoints do not share.
    pub fn edge_color(&self, e: usize) -> Option<Color> {
        let (a, b) = self.edges[e];
        let b = b?;
        let regions = self.vertex_regions();
        regions[a].iter().find(|r| !regions[b].contains(r)).map(|&r| self.region_color(r))
    }

    pub fn to_text(&self) -> String {
        let mut s = String::from("# selfcorr colex v1\n");
        let _ = writeln!(s, "VERTICES {}", self.n);
        let _ = writeln!(s, "EDGES {}", self.edges.len());
        for (i, (a, b)) in self.edges.iter().enumerate() {
            match b {
                Some(b) => writeln!(s, "{i} {a} {b}"),
                None => writeln!(s, "{i} {a} -"),
            }
            .unwrap();
        }
        let _ = writeln!(s, "FACES {}", self.faces.len());
        for (i, f) in self.faces.iter().enumerate() {
            let vs: Vec<String> = f.vertices.iter().map(|v| v.to_string()).collect();
            let _ = writeln!(s, "{i} {}", vs.join(" "));
        }
        let _ = writeln!(s, "CELLS {}", self.cells.len());
        for (i, c) in self.cells.iter().enumerate() {
            let vs: Vec<String> = c.vertices.iter().map(|v| v.to_string()).collect();
            let _ = writeln!(s, "{i} {}", vs.join(" "));
        }
        s.push_str("COLORS\n");
        for (i, c) in self.cells.iter().enumerate() {
            let _ = writeln!(s, "cell {i} {}", color_name(c.color));
        }
        for (i, f) in self.faces.iter().enumerate() {
            let pair: String = f.colors.iter().map(|&c| color_name(c)).collect();
            match f.facet {
                Some(c) => writeln!(s, "face {i} {pair} facet {}", color_name(c)),
                None => writeln!(s, "face {i} {pair}"),
            }
            .unwrap();
        }
        let _ = writeln!(s, "outer {}", color_name(self.outer));
        s
    }

    /// Strict parser for the text format; errors carry 1-based line numbers.
    pub fn from_text(text: &str) -> Result<Colex> {
        let lines: Vec<(usize, &str)> = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
            .collect();
        let perr = |line: usize, m: &str| Error::Parse(format!("line {line}: {m}"));
        let num = |line: usize, t: &str| {
            t.parse::<usize>().map_err(|_| perr(line, &format!("expected integer, got {t:?}")))
        };
        let mut pos = 0;
        let section = |name: &str, pos: &mut usize| -> Result<usize> {
            let &(ln, l) = lines.get(*pos).ok_or_else(|| Error::Parse(format!("missing {name} section")))?;
            *pos += 1;
            let toks: Vec<&str> = l.split_whitespace().collect();
            if toks.len() != 2 || toks[0] != name {
                return Err(perr(ln, &format!("expected '{name} <count>'")));
            }
            num(ln, toks[1])
        };
        let rows = |name: &str, count: usize, pos: &mut usize| -> Result<Vec<(usize, Vec<&str>)>> {
            let mut out = Vec::with_capacity(count);
            for i in 0..count {
                let &(ln, l) = lines
                    .get(*pos)
                    .ok_or_else(|| Error::Parse(format!("{name}: expected {count} rows")))?;
                *pos += 1;
                let toks: Vec<&str> = l.split_whitespace().collect();
                if toks.first().map(|t| num(ln, t)).transpose()? != Some(i) {
                    return Err(perr(ln, &format!("expected row id {i}")));
                }
                out.push((ln, toks[1..].to_vec()));
            }
            Ok(out)
        };
        let n = section("VERTICES", &mut pos)?;
        let c = section("EDGES", &mut pos)?;
        let edge_rows = rows("EDGES", c, &mut pos)?;
        let c = section("FACES", &mut pos)?;
        let face_rows = rows("FACES", c, &mut pos)?;
        let c = section("CELLS", &mut pos)?;
        let cell_rows = rows("CELLS", c, &mut pos)?;
        let vertex = |ln: usize, t: &str| -> Result<usize> {
            let v = num(ln, t)?;
            if v >= n {
                return Err(perr(ln, &format!("vertex {v} out of range")));
            }
            Ok(v)
        };
        let mut edges = Vec::new();
        for (ln, toks) in &edge_rows {
            if toks.len() != 2 {
                return Err(perr(*ln, "edge needs two endpoints"));
            }
            let a = vertex(*ln, toks[0])?;
            let b = if toks[1] == "-" { None } else { Some(vertex(*ln, toks[1])?) };
            edges.push((a, b));
        }
        let list = |ln: usize, toks: &[&str]| -> Result<Vec<usize>> {
            let mut v = toks.iter().map(|t| vertex(ln, t)).collect::<Result<Vec<_>>>()?;
            v.sort_unstable();
            if v.windows(2).any(|w| w[0] == w[1]) {
                return Err(perr(ln, "repeated vertex"));
            }
            if v.is_empty() {
                return Err(perr(ln, "empty vertex list"));
            }
            Ok(v)
        };
        let face_vs: Vec<Vec<usize>> = face_rows.iter().map(|(ln, t)| list(*ln, t)).collect::<Result<_>>()?;
        let cell_vs: Vec<Vec<usize>> = cell_rows.iter().map(|(ln, t)| list(*ln, t)).collect::<Result<_>>()?;

        let &(ln, l) = lines.get(pos).ok_or_else(|| Error::Parse("missing COLORS section".into()))?;
        if l != "COLORS" {
            return Err(perr(ln, "expected COLORS"));
        }
        let mut cell_color = vec![None; cell_vs.len()];
        let mut face_color = vec![None; face_vs.len()];
        let mut face_facet = vec![None; face_vs.len()];
        let mut outer = None;
        for &(ln, l) in &lines[pos + 1..] {
            let toks: Vec<&str> = l.split_whitespace().collect();
            let color = |t: &str| parse_color(t).ok_or_else(|| perr(ln, &format!("bad color {t:?}")));
            match toks.as_slice() {
                ["cell", id, c] => {
                    let id = num(ln, id)?;
                    let slot = cell_color.get_mut(id).ok_or_else(|| perr(ln, "cell id out of range"))?;
                    if slot.replace(color(c)?).is_some() {
                        return Err(perr(ln, "cell colored twice"));
                    }
                }
                ["face", id, pair, rest @ ..] => {
                    let id = num(ln, id)?;
                    if id >= face_vs.len() {
                        return Err(perr(ln, "face id out of range"));
                    }
                    let cs: Vec<Color> = pair.chars().map(|c| color(&c.to_string())).collect::<Result<_>>()?;
                    if cs.len() != 2 || cs[0] == cs[1] {
                        return Err(perr(ln, "face color must be two distinct colors"));
                    }
                    let mut p = [cs[0], cs[1]];
                    p.sort_unstable();
                    if face_color[id].replace(p).is_some() {
                        return Err(perr(ln, "face colored twice"));
                    }
                    match rest {
                        [] => {}
                        ["facet", c] => face_facet[id] = Some(color(c)?),
                        _ => return Err(perr(ln, "trailing tokens after face color")),
                    }
                }
                ["outer", c] => {
                    if outer.replace(color(c)?).is_some() {
                        return Err(perr(ln, "outer given twice"));
                    }
                }
                _ => return Err(perr(ln, "unrecognized COLORS entry")),
            }
        }
        let cells: Vec<ColexCell> = cell_vs
            .into_iter()
            .zip(&cell_color)
            .enumerate()
            .map(|(i, (vertices, c))| {
                c.map(|color| ColexCell { vertices, color })
                    .ok_or_else(|| Error::Parse(format!("cell {i} has no color")))
            })
            .collect::<Result<_>>()?;
        let mut faces = Vec::with_capacity(face_vs.len());
        for (i, vertices) in face_vs.into_iter().enumerate() {
            let colors = face_color[i].ok_or_else(|| Error::Parse(format!("face {i} has no color")))?;
            let adj = cells
                .iter()
                .enumerate()
                .filter(|(_, c)| vertices.iter().all(|v| c.vertices.binary_search(v).is_ok()))
                .map(|(j, _)| j)
                .collect();
            faces.push(ColexFace { vertices, colors, facet: face_facet[i], cells: adj });
        }
        let outer = outer.ok_or_else(|| Error::Parse("missing outer color".into()))?;
        let c = Colex { n, edges, faces, cells, outer };
        c.validate()?;
        Ok(c)
    }
}
