//! Text documents for structures, maps, colourings and pipeline manifests.
//!
//! Documents are TOML. Pair lists are written sorted, so serializing a parsed
//! document reproduces it byte for byte.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::arrow::Coloring;
use crate::construction::{ConstructionError, Picture};
use crate::partite::{APartiteRnGraph, PartiteError};
use crate::structures::{Homomorphism, OrderedPoset, OrderedStructure, Relation, RnGraph, StructureError, VertexId};

#[derive(Debug, Error)]
pub enum DocumentError {
    #[error("parse error: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("missing field `{field}` for kind {kind}")]
    Missing { kind: &'static str, field: &'static str },
    #[error("expected a {expected} document, found {found}")]
    WrongKind {
        expected: &'static str,
        found: &'static str,
    },
    #[error("coloring entry {0:?} uses a colour out of range")]
    ColorOutOfRange(Vec<VertexId>),
    #[error(transparent)]
    Structure(#[from] StructureError),
    #[error(transparent)]
    Partite(#[from] PartiteError),
    #[error(transparent)]
    Construction(#[from] ConstructionError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DocumentKind {
    Poset,
    Rn,
    Apartite,
    Picture,
    Hom,
    Coloring,
}

impl DocumentKind {
    pub fn as_str(self) -> &'static str {
        match self {
            DocumentKind::Poset => "poset",
            DocumentKind::Rn => "rn",
            DocumentKind::Apartite => "apartite",
            DocumentKind::Picture => "picture",
            DocumentKind::Hom => "hom",
            DocumentKind::Coloring => "coloring",
        }
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGraph {
    n: usize,
    order: Vec<VertexId>,
    #[serde(rename = "R")]
    r: Vec<[VertexId; 2]>,
    #[serde(rename = "N", default, skip_serializing_if = "Option::is_none")]
    nrel: Option<Vec<[VertexId; 2]>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEntry {
    copy: Vec<VertexId>,
    color: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDocument {
    kind: DocumentKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    order: Option<Vec<VertexId>>,
    #[serde(rename = "R", default, skip_serializing_if = "Option::is_none")]
    r: Option<Vec<[VertexId; 2]>>,
    #[serde(rename = "N", default, skip_serializing_if = "Option::is_none")]
    nrel: Option<Vec<[VertexId; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    parts: Option<Vec<Vec<VertexId>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    map: Option<Vec<VertexId>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    colors: Option<usize>,
    #[serde(rename = "A", default, skip_serializing_if = "Option::is_none")]
    a: Option<RawGraph>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    host: Option<RawGraph>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    entries: Option<Vec<RawEntry>>,
}

impl RawDocument {
    fn empty(kind: DocumentKind, name: Option<&str>) -> Self {
        RawDocument {
            kind,
            name: name.map(str::to_owned),
            n: None,
            order: None,
            r: None,
            nrel: None,
            parts: None,
            map: None,
            colors: None,
            a: None,
            host: None,
            entries: None,
        }
    }

    fn set_graph(&mut self, g: &RawGraph) {
        self.n = Some(g.n);
        self.order = Some(g.order.clone());
        self.r = Some(g.r.clone());
        self.nrel = g.nrel.clone();
    }

    fn graph(&self) -> Result<RawGraph, DocumentError> {
        let kind = self.kind.as_str();
        Ok(RawGraph {
            n: self.n.ok_or(DocumentError::Missing { kind, field: "n" })?,
            order: self
                .order
                .clone()
                .ok_or(DocumentError::Missing { kind, field: "order" })?,
            r: self.r.clone().ok_or(DocumentError::Missing { kind, field: "R" })?,
            nrel: self.nrel.clone(),
        })
    }
}

fn pairs(rel: &Relation) -> Vec<[VertexId; 2]> {
    rel.iter().map(|(x, y)| [x, y]).collect()
}

fn relation(pairs: &[[VertexId; 2]]) -> Relation {
    pairs.iter().map(|&[x, y]| (x, y)).collect()
}

fn raw_rn(g: &RnGraph) -> RawGraph {
    RawGraph {
        n: g.vertex_count(),
        order: g.order().as_slice().to_vec(),
        r: pairs(g.r()),
        nrel: Some(pairs(g.n())),
    }
}

fn rn_from_raw(g: &RawGraph) -> Result<RnGraph, DocumentError> {
    let nrel = g.nrel.as_deref().map(relation).unwrap_or_default();
    Ok(RnGraph::new(g.n, relation(&g.r), nrel, g.order.clone())?)
}

/// Any structure a document can hold.
#[derive(Debug, Clone)]
pub enum Structure {
    Poset(OrderedPoset),
    Rn(RnGraph),
    APartite(APartiteRnGraph),
    Picture(Picture),
}

impl Structure {
    pub fn kind(&self) -> DocumentKind {
        match self {
            Structure::Poset(_) => DocumentKind::Poset,
            Structure::Rn(_) => DocumentKind::Rn,
            Structure::APartite(_) => DocumentKind::Apartite,
            Structure::Picture(_) => DocumentKind::Picture,
        }
    }

    /// The structure as an RN graph; posets become complete RN graphs.
    pub fn to_rn(&self) -> RnGraph {
        match self {
            Structure::Poset(p) => p.to_complete_rn(),
            Structure::Rn(g) => g.clone(),
            Structure::APartite(e) => e.base().clone(),
            Structure::Picture(p) => p.base().clone(),
        }
    }

    /// Parts in order, for partite structures.
    pub fn parts(&self) -> Option<Vec<Vec<VertexId>>> {
        match self {
            Structure::APartite(e) => Some(e.parts().to_vec()),
            Structure::Picture(p) => Some(p.parts()),
            _ => None,
        }
    }
}

/// A parsed document with its optional name.
#[derive(Debug, Clone)]
pub struct Named<T> {
    pub name: Option<String>,
    pub value: T,
}

pub fn structure_to_toml(s: &Structure, name: Option<&str>) -> String {
    let mut doc = RawDocument::empty(s.kind(), name);
    match s {
        Structure::Poset(p) => doc.set_graph(&RawGraph {
            n: p.vertex_count(),
            order: p.order().as_slice().to_vec(),
            r: pairs(p.r()),
            nrel: None,
        }),
        Structure::Rn(g) => doc.set_graph(&raw_rn(g)),
        Structure::APartite(e) => {
            doc.set_graph(&raw_rn(e.base()));
            doc.parts = Some(e.parts().to_vec());
            doc.a = Some(raw_rn(e.a()));
        }
        Structure::Picture(p) => {
            doc.set_graph(&raw_rn(p.base()));
            doc.map = Some(p.part_map().to_vec());
            doc.host = Some(raw_rn(p.host()));
        }
    }
    toml::to_string(&doc).expect("documents always serialize")
}

pub fn parse_structure(text: &str) -> Result<Named<Structure>, DocumentError> {
    let doc: RawDocument = toml::from_str(text)?;
    let kind = doc.kind.as_str();
    let value = match doc.kind {
        DocumentKind::Poset => {
            let g = doc.graph()?;
            if g.nrel.is_some() {
                return Err(DocumentError::WrongKind {
                    expected: "rn",
                    found: "poset",
                });
            }
            Structure::Poset(OrderedPoset::new(g.n, relation(&g.r), g.order)?)
        }
        DocumentKind::Rn => Structure::Rn(rn_from_raw(&doc.graph()?)?),
        DocumentKind::Apartite => {
            let base = rn_from_raw(&doc.graph()?)?;
            let a = rn_from_raw(doc.a.as_ref().ok_or(DocumentError::Missing { kind, field: "A" })?)?;
            let parts = doc
                .parts
                .clone()
                .ok_or(DocumentError::Missing { kind, field: "parts" })?;
            Structure::APartite(APartiteRnGraph::new(&a, parts, base)?)
        }
        DocumentKind::Picture => {
            let base = rn_from_raw(&doc.graph()?)?;
            let host = rn_from_raw(
                doc.host
                    .as_ref()
                    .ok_or(DocumentError::Missing { kind, field: "host" })?,
            )?;
            let map = doc.map.clone().ok_or(DocumentError::Missing { kind, field: "map" })?;
            Structure::Picture(Picture::new(base, host, map)?)
        }
        DocumentKind::Hom | DocumentKind::Coloring => {
            return Err(DocumentError::WrongKind {
                expected: "structure",
                found: kind,
            })
        }
    };
    Ok(Named { name: doc.name, value })
}

pub fn hom_to_toml(h: &Homomorphism, name: Option<&str>) -> String {
    let mut doc = RawDocument::empty(DocumentKind::Hom, name);
    doc.map = Some(h.map().to_vec());
    toml::to_string(&doc).expect("documents always serialize")
}

pub fn parse_hom(text: &str) -> Result<Named<Homomorphism>, DocumentError> {
    let doc: RawDocument = toml::from_str(text)?;
    if doc.kind != DocumentKind::Hom {
        return Err(DocumentError::WrongKind {
            expected: "hom",
            found: doc.kind.as_str(),
        });
    }
    let map = doc.map.ok_or(DocumentError::Missing {
        kind: "hom",
        field: "map",
    })?;
    Ok(Named {
        name: doc.name,
        value: Homomorphism::new(map),
    })
}

pub fn coloring_to_toml(c: &Coloring, name: Option<&str>) -> String {
    let mut doc = RawDocument::empty(DocumentKind::Coloring, name);
    doc.colors = Some(c.colors());
    doc.entries = Some(
        c.iter()
            .map(|(copy, color)| RawEntry {
                copy: copy.to_vec(),
                color,
            })
            .collect(),
    );
    toml::to_string(&doc).expect("documents always serialize")
}

pub fn parse_coloring(text: &str) -> Result<Named<Coloring>, DocumentError> {
    let doc: RawDocument = toml::from_str(text)?;
    if doc.kind != DocumentKind::Coloring {
        return Err(DocumentError::WrongKind {
            expected: "coloring",
            found: doc.kind.as_str(),
        });
    }
    let colors = doc.colors.ok_or(DocumentError::Missing {
        kind: "coloring",
        field: "colors",
    })?;
    let mut c = Coloring::new(colors);
    for e in doc.entries.unwrap_or_default() {
        if e.color >= colors {
            return Err(DocumentError::ColorOutOfRange(e.copy));
        }
        c.set(e.copy, e.color);
    }
    Ok(Named {
        name: doc.name,
        value: c,
    })
}

/// Hex SHA-256 of `bytes`.
pub fn digest(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Graphviz rendering: solid arcs for R, dashed arcs for N, an invisible chain
/// along the linear order, and one cluster per part.
pub fn to_dot(s: &Structure, name: &str) -> String {
    let g = s.to_rn();
    let mut out = String::new();
    let _ = writeln!(out, "digraph \"{}\" {{", name.replace('"', "'"));
    out.push_str("  rankdir=LR;\n  node [shape=circle];\n");
    match s.parts() {
        Some(parts) => {
            for (i, part) in parts.iter().enumerate() {
                let _ = writeln!(out, "  subgraph cluster_{i} {{");
                let _ = writeln!(out, "    label=\"X{}\";", i + 1);
                for v in part {
                    let _ = writeln!(out, "    {v};");
                }
                out.push_str("  }\n");
            }
        }
        None => {
            for pos in 0..g.vertex_count() {
                let _ = writeln!(out, "  {};", g.order().at(pos));
            }
        }
    }
    for pos in 1..g.vertex_count() {
        let _ = writeln!(
            out,
            "  {} -> {} [style=invis, weight=10];",
            g.order().at(pos - 1),
            g.order().at(pos)
        );
    }
    for (x, y) in g.r().iter() {
        let _ = writeln!(out, "  {x} -> {y};");
    }
    for (x, y) in g.n().iter() {
        let _ = writeln!(out, "  {x} -> {y} [style=dashed];");
    }
    out.push_str("}\n");
    out
}

/// Record of a tower run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub a_file: String,
    pub a_digest: String,
    pub b_file: String,
    pub b_digest: String,
    pub oracle: String,
    pub ell_max: usize,
    pub lambda: usize,
    pub carry_forward: bool,
    pub certified: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub condition: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truncated: Option<String>,
    #[serde(default)]
    pub stages: Vec<ManifestStage>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManifestStage {
    pub ell: usize,
    pub file: String,
    pub digest: String,
    pub vertices: usize,
    pub r_edges: usize,
    pub n_edges: usize,
    pub certified: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub condition: Option<String>,
    pub carried_forward: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hom_file: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hom_digest: Option<String>,
    #[serde(default)]
    pub steps: Vec<ManifestStep>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManifestStep {
    pub step: usize,
    pub a_copy: Vec<VertexId>,
    pub subsystem_vertices: usize,
    pub witness_vertices: usize,
    pub product_vertices: usize,
    pub glued_copies: usize,
    pub picture_vertices: usize,
    pub certified: bool,
    pub ell_rn: bool,
}

impl Manifest {
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("manifests always serialize")
    }

    pub fn parse(text: &str) -> Result<Self, DocumentError> {
        Ok(toml::from_str(text)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construction::build_picture_zero;

    fn rn(n: usize, r: &[(usize, usize)], nr: &[(usize, usize)]) -> RnGraph {
        RnGraph::with_identity_order(n, r.iter().copied().collect(), nr.iter().copied().collect()).unwrap()
    }

    #[test]
    fn rn_round_trip_is_byte_identical() {
        let g = RnGraph::new(
            3,
            [(2, 1)].into_iter().collect(),
            [(2, 0)].into_iter().collect(),
            vec![2, 0, 1],
        )
        .unwrap();
        let text = structure_to_toml(&Structure::Rn(g.clone()), Some("g"));
        let back = parse_structure(&text).unwrap();
        assert_eq!(back.name.as_deref(), Some("g"));
        assert_eq!(back.value.to_rn(), g);
        assert_eq!(structure_to_toml(&back.value, back.name.as_deref()), text);
    }

    #[test]
    fn unsorted_input_is_canonicalised() {
        let text = "kind = \"rn\"\nn = 3\norder = [0, 1, 2]\nR = [[1, 2], [0, 1]]\nN = [[0, 2]]\n";
        let s = parse_structure(text).unwrap().value;
        let canon = structure_to_toml(&s, None);
        assert!(canon.contains("R = [[0, 1], [1, 2]]"), "{canon}");
        assert_eq!(structure_to_toml(&parse_structure(&canon).unwrap().value, None), canon);
    }

    #[test]
    fn poset_documents() {
        let p = OrderedPoset::chain(3).unwrap();
        let text = structure_to_toml(&Structure::Poset(p), None);
        assert!(!text.contains("N ="));
        assert!(matches!(parse_structure(&text).unwrap().value, Structure::Poset(_)));
        let bad = "kind = \"poset\"\nn = 3\norder = [0, 1, 2]\nR = [[0, 1], [1, 2]]\n";
        assert!(matches!(
            parse_structure(bad),
            Err(DocumentError::Structure(StructureError::NotTransitive(..)))
        ));
        let overlap = "kind = \"rn\"\nn = 2\norder = [0, 1]\nR = [[0, 1]]\nN = [[0, 1]]\n";
        assert!(matches!(
            parse_structure(overlap),
            Err(DocumentError::Structure(StructureError::NotDisjoint(0, 1)))
        ));
        assert!(matches!(
            parse_structure("kind = \"rn\"\nn = 2\n"),
            Err(DocumentError::Missing { .. })
        ));
        assert!(matches!(parse_structure("kind = "), Err(DocumentError::Parse(_))));
    }

    #[test]
    fn apartite_and_picture_round_trip() {
        let a = OrderedPoset::chain(2).unwrap().to_complete_rn();
        let e = APartiteRnGraph::new(&a, vec![vec![0, 1], vec![2]], rn(3, &[(0, 2)], &[])).unwrap();
        let text = structure_to_toml(&Structure::APartite(e.clone()), None);
        let back = parse_structure(&text).unwrap().value;
        assert_eq!(structure_to_toml(&back, None), text);
        assert_eq!(back.parts().unwrap(), e.parts());

        let pic = build_picture_zero(&OrderedPoset::chain(3).unwrap().to_complete_rn(), &a).unwrap();
        let text = structure_to_toml(&Structure::Picture(pic.clone()), None);
        let back = parse_structure(&text).unwrap().value;
        assert_eq!(structure_to_toml(&back, None), text);
        assert_eq!(back.to_rn(), *pic.base());
    }

    #[test]
    fn hom_and_coloring_round_trip() {
        let h = Homomorphism::new(vec![0, 0, 1]);
        let text = hom_to_toml(&h, Some("h"));
        assert_eq!(parse_hom(&text).unwrap().value, h);
        let mut c = Coloring::new(2);
        c.set(vec![1, 2], 1);
        c.set(vec![0, 1], 0);
        let text = coloring_to_toml(&c, None);
        let back = parse_coloring(&text).unwrap().value;
        assert_eq!(back.get(&[1, 2]), Some(1));
        assert_eq!(coloring_to_toml(&back, None), text);
        assert!(parse_hom(&text).is_err());
    }

    #[test]
    fn digests_are_stable() {
        assert_eq!(
            digest(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }

    #[test]
    fn dot_export() {
        let chain = Structure::Poset(OrderedPoset::chain(2).unwrap());
        let dot = to_dot(&chain, "c");
        assert_eq!(dot.matches("0 -> 1;").count(), 1);
        assert!(!dot.contains("dashed"));
        let anti = Structure::Rn(OrderedPoset::antichain(2).unwrap().to_complete_rn());
        assert_eq!(to_dot(&anti, "a").matches("[style=dashed]").count(), 1);
        let a = OrderedPoset::chain(2).unwrap().to_complete_rn();
        let e = APartiteRnGraph::new(&a, vec![vec![0], vec![1]], rn(2, &[(0, 1)], &[])).unwrap();
        assert_eq!(
            to_dot(&Structure::APartite(e), "e")
                .matches("subgraph cluster_")
                .count(),
            2
        );
    }

    #[test]
    fn manifest_round_trip() {
        let m = Manifest {
            a_file: "a.toml".into(),
            a_digest: digest(b"a"),
            b_file: "b.toml".into(),
            b_digest: digest(b"b"),
            oracle: "search".into(),
            ell_max: 3,
            lambda: 3,
            carry_forward: true,
            certified: true,
            condition: None,
            truncated: None,
            stages: vec![ManifestStage {
                ell: 2,
                file: "stage-2.toml".into(),
                digest: digest(b"c"),
                vertices: 3,
                r_edges: 3,
                n_edges: 0,
                certified: true,
                condition: None,
                carried_forward: false,
                hom_file: None,
                hom_digest: None,
                steps: vec![ManifestStep {
                    step: 1,
                    a_copy: vec![0],
                    subsystem_vertices: 2,
                    witness_vertices: 3,
                    product_vertices: 3,
                    glued_copies: 3,
                    picture_vertices: 15,
                    certified: true,
                    ell_rn: true,
                }],
            }],
        };
        let text = m.to_toml();
        assert_eq!(Manifest::parse(&text).unwrap(), m);
    }
}
