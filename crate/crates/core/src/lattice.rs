//! Code/ancilla geometry of the X-cube lattice.
//!
//! Code qubits sit on the edges of a cubic lattice, ancillae at cube centres.
//! Two boundary modes are supported:
//!
//! * [`Boundary::Periodic3D`]: an `lx × ly × lz` torus of cubes, `3·lx·ly·lz`
//!   edges. With `lz = 1` the vertical edges close onto themselves; every list
//!   below is then a multiset and all operators built from it are reduced
//!   mod 2 (see [`Lattice::self_wrapped_vertical`]).
//! * [`Boundary::OneStoreyOpen`]: a single storey of `lx × ly` cubes with open
//!   in-plane boundaries (two horizontal layers of bonds plus the vertical
//!   bonds between them).
//!
//! Dense indices: code qubits are ordered by `(z, y, x, axis)`, ancillae by
//! `(z, y, x)`. In a simulation register code qubit `k` is qubit `k` and
//! ancilla `j` is qubit `code_count + j`.
//!
//! The twelve edges of a cube with origin vertex `o` are listed axis-major:
//! the four X edges at `o + d1·ŷ + d2·ẑ`, then the four Y edges at
//! `o + d1·x̂ + d2·ẑ`, then the four Z edges at `o + d1·x̂ + d2·ŷ`, each with
//! `(d1, d2)` running `(0,0), (1,0), (0,1), (1,1)`. Movement round `i` of the
//! scheduler pairs every ancilla with its `i`-th edge in this order.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Vertex = [usize; 3];

const OFFSETS: [(usize, usize); 4] = [(0, 0), (1, 0), (0, 1), (1, 1)];
const ABSENT: u32 = u32::MAX;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Axis {
        Axis::ALL[i]
    }

    /// The two remaining axes in increasing order.
    pub fn others(self) -> (Axis, Axis) {
        match self {
            Axis::X => (Axis::Y, Axis::Z),
            Axis::Y => (Axis::X, Axis::Z),
            Axis::Z => (Axis::X, Axis::Y),
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Axis::X => 'x',
            Axis::Y => 'y',
            Axis::Z => 'z',
        }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Plane {
    Xy,
    Xz,
    Yz,
}

impl Plane {
    pub const ALL: [Plane; 3] = [Plane::Xy, Plane::Xz, Plane::Yz];

    pub fn axes(self) -> (Axis, Axis) {
        match self {
            Plane::Xy => (Axis::X, Axis::Y),
            Plane::Xz => (Axis::X, Axis::Z),
            Plane::Yz => (Axis::Y, Axis::Z),
        }
    }

    pub fn contains(self, axis: Axis) -> bool {
        let (a, b) = self.axes();
        a == axis || b == axis
    }

    /// The plane spanned by two distinct axes.
    pub fn spanned_by(a: Axis, b: Axis) -> Option<Plane> {
        match (a.min(b), a.max(b)) {
            (Axis::X, Axis::Y) => Some(Plane::Xy),
            (Axis::X, Axis::Z) => Some(Plane::Xz),
            (Axis::Y, Axis::Z) => Some(Plane::Yz),
            _ => None,
        }
    }
}

impl fmt::Display for Plane {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Plane::Xy => "xy",
            Plane::Xz => "xz",
            Plane::Yz => "yz",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Boundary {
    #[serde(rename = "periodic3d")]
    Periodic3D,
    OneStoreyOpen,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LatticeSpec {
    pub lx: usize,
    pub ly: usize,
    pub lz: usize,
    pub boundary: Boundary,
}

impl LatticeSpec {
    pub fn new(lx: usize, ly: usize, lz: usize, boundary: Boundary) -> Result<Self> {
        let spec = LatticeSpec { lx, ly, lz, boundary };
        spec.validate()?;
        Ok(spec)
    }

    pub fn periodic(lx: usize, ly: usize, lz: usize) -> Result<Self> {
        Self::new(lx, ly, lz, Boundary::Periodic3D)
    }

    pub fn one_storey(lx: usize, ly: usize) -> Result<Self> {
        Self::new(lx, ly, 1, Boundary::OneStoreyOpen)
    }

    pub fn validate(&self) -> Result<()> {
        if self.lx < 2 || self.ly < 2 {
            return Err(Error::InvalidSpec(format!(
                "lx and ly must be at least 2 (got lx={}, ly={})",
                self.lx, self.ly
            )));
        }
        if self.lz < 1 {
            return Err(Error::InvalidSpec("lz must be at least 1".into()));
        }
        if self.boundary == Boundary::OneStoreyOpen && self.lz != 1 {
            return Err(Error::InvalidSpec(format!("one-storey lattices have lz = 1 (got lz={})", self.lz)));
        }
        Ok(())
    }

    pub fn is_periodic(&self) -> bool {
        self.boundary == Boundary::Periodic3D
    }

    fn vertex_extent(&self) -> [usize; 3] {
        match self.boundary {
            Boundary::Periodic3D => [self.lx, self.ly, self.lz],
            Boundary::OneStoreyOpen => [self.lx + 1, self.ly + 1, 2],
        }
    }
}

/// An edge of the cubic lattice: the bond from `vertex` to `vertex + axis`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CodeQubitId {
    pub vertex: Vertex,
    pub axis: Axis,
}

/// A cube, identified by its lowest-corner vertex.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct AncillaId(pub [usize; 3]);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct StarSite {
    pub vertex: Vertex,
    pub plane: Plane,
}

/// A planar star term: the four edges at `site.vertex` lying in `site.plane`,
/// ordered `[+a, -a, +b, -b]` for the plane axes `(a, b)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Star {
    pub site: StarSite,
    pub members: [usize; 4],
    /// Two members coincide (self-wrapped vertical edge).
    pub degenerate: bool,
}

/// A dual layer: every cube whose `axis` coordinate equals `index`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DualLayer {
    pub axis: Axis,
    pub index: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lattice {
    spec: LatticeSpec,
    code_ids: Vec<CodeQubitId>,
    ancilla_ids: Vec<AncillaId>,
    code_lookup: Vec<u32>,
    ancilla_adj: Vec<[usize; 12]>,
    code_adj: Vec<Vec<usize>>,
    stars: Vec<Star>,
    undefined_stars: Vec<StarSite>,
    edge_stars: Vec<Vec<usize>>,
    self_wrapped_vertical: bool,
}

impl Lattice {
    pub fn build(spec: LatticeSpec) -> Result<Lattice> {
        spec.validate()?;
        let ext = spec.vertex_extent();
        let slots = ext[0] * ext[1] * ext[2];

        let mut lattice = Lattice {
            spec,
            code_ids: Vec::new(),
            ancilla_ids: Vec::new(),
            code_lookup: vec![ABSENT; slots * 3],
            ancilla_adj: Vec::new(),
            code_adj: Vec::new(),
            stars: Vec::new(),
            undefined_stars: Vec::new(),
            edge_stars: Vec::new(),
            self_wrapped_vertical: spec.is_periodic() && spec.lz == 1,
        };

        for z in 0..ext[2] {
            for y in 0..ext[1] {
                for x in 0..ext[0] {
                    for axis in Axis::ALL {
                        let vertex = [x, y, z];
                        if lattice.shift(vertex, axis, 1).is_some() {
                            let slot = lattice.vertex_slot(vertex) * 3 + axis.index();
                            lattice.code_lookup[slot] = lattice.code_ids.len() as u32;
                            lattice.code_ids.push(CodeQubitId { vertex, axis });
                        }
                    }
                }
            }
        }

        for z in 0..spec.lz {
            for y in 0..spec.ly {
                for x in 0..spec.lx {
                    lattice.ancilla_ids.push(AncillaId([x, y, z]));
                }
            }
        }

        lattice.ancilla_adj = lattice.ancilla_ids.iter().map(|a| lattice.enumerate_cube_edges(a.0)).collect();

        lattice.code_adj = vec![Vec::with_capacity(4); lattice.code_ids.len()];
        for (k, id) in lattice.code_ids.clone().into_iter().enumerate() {
            let (b1, b2) = id.axis.others();
            for (d1, d2) in OFFSETS {
                let origin =
                    lattice.shift(id.vertex, b1, -(d1 as i64)).and_then(|v| lattice.shift(v, b2, -(d2 as i64)));
                if let Some(a) = origin.and_then(|v| lattice.ancilla_index(AncillaId(v))) {
                    lattice.code_adj[k].push(a);
                }
            }
        }

        lattice.edge_stars = vec![Vec::new(); lattice.code_ids.len()];
        for z in 0..ext[2] {
            for y in 0..ext[1] {
                for x in 0..ext[0] {
                    for plane in Plane::ALL {
                        let site = StarSite { vertex: [x, y, z], plane };
                        match lattice.star_members_at(site) {
                            Some((members, degenerate)) => {
                                let idx = lattice.stars.len();
                                for e in odd_members(&members) {
                                    lattice.edge_stars[e].push(idx);
                                }
                                lattice.stars.push(Star { site, members, degenerate });
                            }
                            None => lattice.undefined_stars.push(site),
                        }
                    }
                }
            }
        }

        Ok(lattice)
    }

    pub fn spec(&self) -> &LatticeSpec {
        &self.spec
    }

    pub fn code_count(&self) -> usize {
        self.code_ids.len()
    }

    pub fn ancilla_count(&self) -> usize {
        self.ancilla_ids.len()
    }

    /// Size of the simulation register: code qubits followed by ancillae.
    pub fn total_qubits(&self) -> usize {
        self.code_count() + self.ancilla_count()
    }

    pub fn ancilla_qubit(&self, ancilla: usize) -> usize {
        self.code_count() + ancilla
    }

    /// Periodic `lz = 1`: vertical edges start and end on the same vertex, so
    /// each cube lists its horizontal edges twice.
    pub fn self_wrapped_vertical(&self) -> bool {
        self.self_wrapped_vertical
    }

    pub fn code_id(&self, k: usize) -> CodeQubitId {
        self.code_ids[k]
    }

    pub fn code_ids(&self) -> &[CodeQubitId] {
        &self.code_ids
    }

    pub fn ancilla_id(&self, a: usize) -> AncillaId {
        self.ancilla_ids[a]
    }

    pub fn ancilla_ids(&self) -> &[AncillaId] {
        &self.ancilla_ids
    }

    pub fn code_index(&self, id: CodeQubitId) -> Option<usize> {
        if !self.vertex_in_range(id.vertex) {
            return None;
        }
        let slot = self.vertex_slot(id.vertex) * 3 + id.axis.index();
        match self.code_lookup[slot] {
            ABSENT => None,
            k => Some(k as usize),
        }
    }

    pub fn ancilla_index(&self, id: AncillaId) -> Option<usize> {
        let [x, y, z] = id.0;
        if x < self.spec.lx && y < self.spec.ly && z < self.spec.lz {
            Some((z * self.spec.ly + y) * self.spec.lx + x)
        } else {
            None
        }
    }

    /// The 12 edges of cube `a` in canonical order (a multiset when
    /// [`Self::self_wrapped_vertical`]).
    pub fn ancilla_adj(&self, a: usize) -> &[usize; 12] {
        &self.ancilla_adj[a]
    }

    /// Same list as [`Self::ancilla_adj`]; the cube term's support.
    pub fn cube_sites(&self, a: usize) -> &[usize; 12] {
        &self.ancilla_adj[a]
    }

    /// Cubes containing edge `k`, in the order of the `(d1, d2)` offsets.
    pub fn code_adj(&self, k: usize) -> &[usize] {
        &self.code_adj[k]
    }

    /// Defined star terms.
    pub fn stars(&self) -> &[Star] {
        &self.stars
    }

    /// Star positions whose four edges do not all exist (open boundary).
    pub fn undefined_stars(&self) -> &[StarSite] {
        &self.undefined_stars
    }

    pub fn star_index(&self, site: StarSite) -> Option<usize> {
        self.stars.iter().position(|s| s.site == site)
    }

    /// Stars in which edge `k` appears an odd number of times.
    pub fn edge_stars(&self, k: usize) -> &[usize] {
        &self.edge_stars[k]
    }

    /// Cubes in which edge `k` appears an odd number of times.
    pub fn edge_cubes_odd(&self, k: usize) -> Vec<usize> {
        odd_members(&self.code_adj[k])
    }

    pub fn star_members(&self, vertex: Vertex, plane: Plane) -> Result<StarMembers> {
        if !self.vertex_in_range(vertex) {
            return Err(Error::UndefinedStabilizer { vertex, plane });
        }
        let site = StarSite { vertex, plane };
        let (members, degenerate) = self.star_members_at(site).ok_or(Error::UndefinedStabilizer { vertex, plane })?;
        Ok(StarMembers { edges: members.map(|k| self.code_ids[k]), indices: members, degenerate })
    }

    /// Translate a vertex by `delta` along `axis`. Periodic lattices wrap;
    /// open lattices return `None` outside the vertex range.
    pub fn shift(&self, v: Vertex, axis: Axis, delta: i64) -> Option<Vertex> {
        let ext = self.spec.vertex_extent();
        let i = axis.index();
        let mut out = v;
        if self.spec.is_periodic() {
            out[i] = (v[i] as i64 + delta).rem_euclid(ext[i] as i64) as usize;
        } else {
            let t = v[i] as i64 + delta;
            if t < 0 || t >= ext[i] as i64 {
                return None;
            }
            out[i] = t as usize;
        }
        Some(out)
    }

    pub fn vertex_in_range(&self, v: Vertex) -> bool {
        let ext = self.spec.vertex_extent();
        v.iter().zip(ext).all(|(&c, e)| c < e)
    }

    pub fn vertex_slot(&self, v: Vertex) -> usize {
        let ext = self.spec.vertex_extent();
        (v[2] * ext[1] + v[1]) * ext[0] + v[0]
    }

    pub fn vertex_count(&self) -> usize {
        let ext = self.spec.vertex_extent();
        ext[0] * ext[1] * ext[2]
    }

    /// Vertex slots of the 8 corners of cube `a` (with repeats when wrapped).
    pub fn cube_vertices(&self, a: usize) -> [usize; 8] {
        let o = self.ancilla_ids[a].0;
        let mut out = [0; 8];
        for (i, slot) in out.iter_mut().enumerate() {
            let v = self
                .shift(o, Axis::X, (i & 1) as i64)
                .and_then(|v| self.shift(v, Axis::Y, ((i >> 1) & 1) as i64))
                .and_then(|v| self.shift(v, Axis::Z, ((i >> 2) & 1) as i64))
                .expect("cube corners exist");
            *slot = self.vertex_slot(v);
        }
        out
    }

    pub fn cubes_share_vertex(&self, a: usize, b: usize) -> bool {
        let va = self.cube_vertices(a);
        let vb = self.cube_vertices(b);
        va.iter().any(|v| vb.contains(v))
    }

    /// The cube next to `a` across a face, if it exists.
    pub fn cube_neighbor(&self, a: usize, axis: Axis, delta: i64) -> Option<usize> {
        let o = self.ancilla_ids[a].0;
        let i = axis.index();
        let ext = [self.spec.lx, self.spec.ly, self.spec.lz];
        let mut c = o;
        if self.spec.is_periodic() {
            c[i] = (o[i] as i64 + delta).rem_euclid(ext[i] as i64) as usize;
        } else {
            let t = o[i] as i64 + delta;
            if t < 0 || t >= ext[i] as i64 {
                return None;
            }
            c[i] = t as usize;
        }
        self.ancilla_index(AncillaId(c))
    }

    /// The separation axis if `a` and `b` are distinct face-adjacent cubes.
    pub fn face_adjacent_axis(&self, a: usize, b: usize) -> Option<Axis> {
        if a == b {
            return None;
        }
        Axis::ALL
            .into_iter()
            .find(|&axis| self.cube_neighbor(a, axis, 1) == Some(b) || self.cube_neighbor(a, axis, -1) == Some(b))
    }

    /// All dual layers (periodic lattices only; open lattices have none).
    pub fn dual_layers(&self) -> Vec<DualLayer> {
        if !self.spec.is_periodic() {
            return Vec::new();
        }
        let ext = [self.spec.lx, self.spec.ly, self.spec.lz];
        Axis::ALL
            .into_iter()
            .flat_map(|axis| (0..ext[axis.index()]).map(move |index| DualLayer { axis, index }))
            .collect()
    }

    pub fn layer_cubes(&self, layer: DualLayer) -> Vec<usize> {
        (0..self.ancilla_count()).filter(|&a| self.ancilla_ids[a].0[layer.axis.index()] == layer.index).collect()
    }

    fn enumerate_cube_edges(&self, origin: Vertex) -> [usize; 12] {
        let mut out = [0; 12];
        let mut i = 0;
        for axis in Axis::ALL {
            let (b1, b2) = axis.others();
            for (d1, d2) in OFFSETS {
                let v = self
                    .shift(origin, b1, d1 as i64)
                    .and_then(|v| self.shift(v, b2, d2 as i64))
                    .expect("cube corner exists");
                out[i] = self.code_index(CodeQubitId { vertex: v, axis }).expect("cube edge exists");
                i += 1;
            }
        }
        out
    }

    fn star_members_at(&self, site: StarSite) -> Option<([usize; 4], bool)> {
        let (a, b) = site.plane.axes();
        let v = site.vertex;
        let edge =
            |vertex: Option<Vertex>, axis| vertex.and_then(|vertex| self.code_index(CodeQubitId { vertex, axis }));
        let members =
            [edge(Some(v), a), edge(self.shift(v, a, -1), a), edge(Some(v), b), edge(self.shift(v, b, -1), b)];
        if members.iter().any(Option::is_none) {
            return None;
        }
        let members = members.map(Option::unwrap);
        let degenerate = members[0] == members[1] || members[2] == members[3];
        Some((members, degenerate))
    }

    pub fn to_document(&self) -> LatticeDocument {
        LatticeDocument {
            schema: LATTICE_SCHEMA.to_string(),
            spec: self.spec,
            code_count: self.code_count(),
            ancilla_count: self.ancilla_count(),
            self_wrapped_vertical: self.self_wrapped_vertical,
            code_qubits: self.code_ids.clone(),
            ancillae: self.ancilla_ids.clone(),
            ancilla_adj: self.ancilla_adj.clone(),
            code_adj: self.code_adj.clone(),
            stars: self.stars.clone(),
            undefined_stars: self.undefined_stars.clone(),
        }
    }

    /// Rebuild from a document, checking that every stored map matches a
    /// fresh build of its spec.
    pub fn from_document(doc: &LatticeDocument) -> Result<Lattice> {
        if doc.schema != LATTICE_SCHEMA {
            return Err(Error::Document(format!("unknown schema {:?}", doc.schema)));
        }
        let lattice = Lattice::build(doc.spec)?;
        if lattice.to_document() != *doc {
            return Err(Error::Document("stored index maps differ from a fresh build of the same lattice".into()));
        }
        Ok(lattice)
    }
}

/// Elements of a multiset that occur an odd number of times, sorted.
pub fn odd_members(items: &[usize]) -> Vec<usize> {
    let mut sorted = items.to_vec();
    sorted.sort_unstable();
    let mut out = Vec::with_capacity(sorted.len());
    let mut i = 0;
    while i < sorted.len() {
        let mut j = i;
        while j < sorted.len() && sorted[j] == sorted[i] {
            j += 1;
        }
        if (j - i) % 2 == 1 {
            out.push(sorted[i]);
        }
        i = j;
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StarMembers {
    pub edges: [CodeQubitId; 4],
    pub indices: [usize; 4],
    pub degenerate: bool,
}

pub const LATTICE_SCHEMA: &str = "xcube.lattice/v1";

/// Versioned JSON form of a [`Lattice`]. Field names:
/// `schema`, `spec`, `code_count`, `ancilla_count`, `self_wrapped_vertical`,
/// `code_qubits` (dense order), `ancillae` (dense order), `ancilla_adj`
/// (12 code indices per ancilla), `code_adj` (ancilla indices per code
/// qubit), `stars`, `undefined_stars`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeDocument {
    pub schema: String,
    pub spec: LatticeSpec,
    pub code_count: usize,
    pub ancilla_count: usize,
    pub self_wrapped_vertical: bool,
    pub code_qubits: Vec<CodeQubitId>,
    pub ancillae: Vec<AncillaId>,
    pub ancilla_adj: Vec<[usize; 12]>,
    pub code_adj: Vec<Vec<usize>>,
    pub stars: Vec<Star>,
    pub undefined_stars: Vec<StarSite>,
}
