//! Versioned JSON documents for every model kind.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::deformations::{DeformationError, Family};
use crate::ingest::{IngestError, ScalarGrid};
use crate::morse_tree::{Node, NodeKind, Outer, PlaneTree, TreeEdge};
use crate::pl::{Pl, PlError};
use crate::profile::{Annulus, ProfileError, RhoProfile};
use crate::rational::QStr;
use crate::reeb_surface::{SEdge, SVertex, SurfaceReebGraph};
use crate::sphere::{HeightProfile, SphereError};

pub const VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("malformed document: {0}")]
    Json(String),
    #[error("unsupported version {0}")]
    Version(u32),
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Shape(#[from] PlError),
    #[error(transparent)]
    Profile(#[from] ProfileError),
    #[error(transparent)]
    Sphere(#[from] SphereError),
    #[error(transparent)]
    Deformation(#[from] DeformationError),
    #[error(transparent)]
    Grid(#[from] IngestError),
}

fn version() -> u32 {
    VERSION
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KindDto {
    Extremum,
    Saddle,
}

impl From<NodeKind> for KindDto {
    fn from(k: NodeKind) -> Self {
        match k {
            NodeKind::Extremum => KindDto::Extremum,
            NodeKind::Saddle => KindDto::Saddle,
        }
    }
}

impl From<KindDto> for NodeKind {
    fn from(k: KindDto) -> Self {
        match k {
            KindDto::Extremum => NodeKind::Extremum,
            KindDto::Saddle => NodeKind::Saddle,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileDto {
    pub rho: Vec<[QStr; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub area_lo: Option<QStr>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub level_at_lo: Option<QStr>,
}

impl ProfileDto {
    fn pl(&self) -> Result<Pl, ModelError> {
        let pl = Pl::new(self.rho.iter().map(|[a, r]| (a.0.clone(), r.0.clone())).collect())?;
        if let Some(lo) = &self.area_lo {
            if &lo.0 != pl.x0() {
                return Err(ModelError::Invalid("area_lo differs from the first breakpoint".into()));
            }
        }
        Ok(pl)
    }

    pub fn to_rho(&self) -> Result<RhoProfile, ModelError> {
        Ok(RhoProfile::from_pl(self.pl()?))
    }

    pub fn to_annulus(&self) -> Result<Annulus, ModelError> {
        let level = self.level_at_lo.as_ref().ok_or_else(|| ModelError::Invalid("profile needs level_at_lo".into()))?;
        Ok(Annulus::new(self.to_rho()?, level.0.clone()))
    }

    pub fn from_rho(p: &RhoProfile) -> Self {
        ProfileDto {
            rho: p.breakpoints().iter().map(|(a, r)| [QStr(a.clone()), QStr(r.clone())]).collect(),
            area_lo: Some(QStr(p.area_lo().clone())),
            level_at_lo: None,
        }
    }

    pub fn from_annulus(a: &Annulus) -> Self {
        ProfileDto { level_at_lo: Some(QStr(a.geom.level_at_lo.clone())), ..Self::from_rho(&a.profile) }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeDto {
    pub name: String,
    pub kind: KindDto,
    pub level: QStr,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeEdgeDto {
    pub name: String,
    pub inner: String,
    /// `null` for the edge at the boundary.
    pub outer: Option<String>,
    pub profile: ProfileDto,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlaneTreeDoc {
    #[serde(default = "version")]
    pub version: u32,
    pub nodes: Vec<NodeDto>,
    pub edges: Vec<TreeEdgeDto>,
}

impl PlaneTreeDoc {
    pub fn to_tree(&self) -> Result<PlaneTree, ModelError> {
        check_version(self.version)?;
        let index = names(self.nodes.iter().map(|n| &n.name), "node")?;
        let find = |s: &str| index.get(s).copied().ok_or_else(|| ModelError::Invalid(format!("unknown node {s:?}")));
        let nodes = self.nodes.iter().map(|n| Node { name: n.name.clone(), kind: n.kind.into(), level: n.level.0.clone() }).collect();
        let mut edges = Vec::with_capacity(self.edges.len());
        for e in &self.edges {
            edges.push(TreeEdge {
                name: e.name.clone(),
                inner: find(&e.inner)?,
                outer: match &e.outer {
                    None => Outer::Boundary,
                    Some(o) => Outer::Node(find(o)?),
                },
                annulus: e.profile.to_annulus()?,
            });
        }
        Ok(PlaneTree { nodes, edges })
    }

    pub fn from_tree(t: &PlaneTree) -> Self {
        PlaneTreeDoc {
            version: VERSION,
            nodes: t.nodes.iter().map(|n| NodeDto { name: n.name.clone(), kind: n.kind.into(), level: QStr(n.level.clone()) }).collect(),
            edges: t
                .edges
                .iter()
                .map(|e| TreeEdgeDto {
                    name: e.name.clone(),
                    inner: t.nodes[e.inner].name.clone(),
                    outer: match e.outer {
                        Outer::Boundary => None,
                        Outer::Node(o) => Some(t.nodes[o].name.clone()),
                    },
                    profile: ProfileDto::from_annulus(&e.annulus),
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VertexDto {
    pub id: String,
    pub kind: KindDto,
    pub level: QStr,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurfaceEdgeDto {
    pub id: String,
    pub ends: [String; 2],
    #[serde(default)]
    pub profile: Option<ProfileDto>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurfaceDoc {
    #[serde(default = "version")]
    pub version: u32,
    pub genus: u32,
    pub vertices: Vec<VertexDto>,
    pub edges: Vec<SurfaceEdgeDto>,
}

impl SurfaceDoc {
    pub fn to_surface(&self) -> Result<SurfaceReebGraph, ModelError> {
        check_version(self.version)?;
        let index = names(self.vertices.iter().map(|v| &v.id), "vertex")?;
        let find = |s: &str| index.get(s).copied().ok_or_else(|| ModelError::Invalid(format!("unknown vertex {s:?}")));
        let vertices = self.vertices.iter().map(|v| SVertex { id: v.id.clone(), kind: v.kind.into(), level: v.level.0.clone() }).collect();
        let mut edges = Vec::with_capacity(self.edges.len());
        for e in &self.edges {
            edges.push(SEdge {
                id: e.id.clone(),
                ends: [find(&e.ends[0])?, find(&e.ends[1])?],
                annulus: e.profile.as_ref().map(ProfileDto::to_annulus).transpose()?,
            });
        }
        Ok(SurfaceReebGraph { genus: self.genus, vertices, edges })
    }

    pub fn from_surface(g: &SurfaceReebGraph) -> Self {
        SurfaceDoc {
            version: VERSION,
            genus: g.genus,
            vertices: g.vertices.iter().map(|v| VertexDto { id: v.id.clone(), kind: v.kind.into(), level: QStr(v.level.clone()) }).collect(),
            edges: g
                .edges
                .iter()
                .map(|e| SurfaceEdgeDto {
                    id: e.id.clone(),
                    ends: [g.vertices[e.ends[0]].id.clone(), g.vertices[e.ends[1]].id.clone()],
                    profile: e.annulus.as_ref().map(ProfileDto::from_annulus),
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SphereDoc {
    #[serde(default = "version")]
    pub version: u32,
    pub dh: Vec<[QStr; 2]>,
    pub h0: QStr,
}

impl SphereDoc {
    pub fn to_profile(&self) -> Result<HeightProfile, ModelError> {
        check_version(self.version)?;
        let dh = Pl::new(self.dh.iter().map(|[z, v]| (z.0.clone(), v.0.clone())).collect())?;
        Ok(HeightProfile::new(dh, self.h0.0.clone())?)
    }

    pub fn from_profile(h: &HeightProfile) -> Self {
        SphereDoc {
            version: VERSION,
            dh: h.dh.points().iter().map(|(z, v)| [QStr(z.clone()), QStr(v.clone())]).collect(),
            h0: QStr(h.h0.clone()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FamilyDto {
    Linear {
        from: PlaneTreeDoc,
        to: PlaneTreeDoc,
    },
    Special {
        g: ProfileDto,
        #[serde(default)]
        flatten_width: Option<QStr>,
        #[serde(default)]
        inside: Vec<PlaneTreeDoc>,
    },
    Shift {
        model: PlaneTreeDoc,
        rate: QStr,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyDoc {
    #[serde(default = "version")]
    pub version: u32,
    pub family: FamilyDto,
}

impl FamilyDoc {
    pub fn to_family(&self) -> Result<Family, ModelError> {
        check_version(self.version)?;
        Ok(match &self.family {
            FamilyDto::Linear { from, to } => Family::Linear { from: from.to_tree()?, to: to.to_tree()? },
            FamilyDto::Special { g, flatten_width, inside } => {
                let inside = inside.iter().map(PlaneTreeDoc::to_tree).collect::<Result<_, _>>()?;
                Family::special(&g.to_rho()?, flatten_width.as_ref().map(|w| &w.0), inside)?
            }
            FamilyDto::Shift { model, rate } => Family::Shift { base: model.to_tree()?, rate: rate.0.clone() },
        })
    }

    pub fn from_family(f: &Family) -> Self {
        let family = match f {
            Family::Linear { from, to } => FamilyDto::Linear { from: PlaneTreeDoc::from_tree(from), to: PlaneTreeDoc::from_tree(to) },
            Family::Special { td, inside } => FamilyDto::Special {
                g: ProfileDto::from_rho(&RhoProfile::from_pl(td.g.clone())),
                flatten_width: None,
                inside: inside.iter().map(PlaneTreeDoc::from_tree).collect(),
            },
            Family::Shift { base, rate } => FamilyDto::Shift { model: PlaneTreeDoc::from_tree(base), rate: QStr(rate.clone()) },
        };
        FamilyDoc { version: VERSION, family }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridDoc {
    #[serde(default = "version")]
    pub version: u32,
    pub width: usize,
    pub height: usize,
    pub spacing: f64,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModelDocument {
    PlaneTree(PlaneTreeDoc),
    Surface(SurfaceDoc),
    Sphere(SphereDoc),
    Family(FamilyDoc),
    Grid(GridDoc),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Model {
    PlaneTree(PlaneTree),
    Surface(SurfaceReebGraph),
    Sphere(HeightProfile),
    Family(Family),
    Grid(ScalarGrid),
}

impl Model {
    pub fn kind(&self) -> &'static str {
        match self {
            Model::PlaneTree(_) => "plane_tree",
            Model::Surface(_) => "surface",
            Model::Sphere(_) => "sphere",
            Model::Family(_) => "family",
            Model::Grid(_) => "grid",
        }
    }
}

fn check_version(v: u32) -> Result<(), ModelError> {
    if v == VERSION {
        Ok(())
    } else {
        Err(ModelError::Version(v))
    }
}

fn names<'a>(it: impl Iterator<Item = &'a String>, what: &str) -> Result<HashMap<String, usize>, ModelError> {
    let mut m = HashMap::new();
    for (i, n) in it.enumerate() {
        if m.insert(n.clone(), i).is_some() {
            return Err(ModelError::Invalid(format!("duplicate {what} {n:?}")));
        }
    }
    Ok(m)
}

impl ModelDocument {
    pub fn to_model(&self) -> Result<Model, ModelError> {
        Ok(match self {
            ModelDocument::PlaneTree(d) => Model::PlaneTree(d.to_tree()?),
            ModelDocument::Surface(d) => Model::Surface(d.to_surface()?),
            ModelDocument::Sphere(d) => Model::Sphere(d.to_profile()?),
            ModelDocument::Family(d) => Model::Family(d.to_family()?),
            ModelDocument::Grid(d) => {
                check_version(d.version)?;
                Model::Grid(ScalarGrid::new(d.width, d.height, d.spacing, d.values.clone())?)
            }
        })
    }

    pub fn from_model(m: &Model) -> Self {
        match m {
            Model::PlaneTree(t) => ModelDocument::PlaneTree(PlaneTreeDoc::from_tree(t)),
            Model::Surface(g) => ModelDocument::Surface(SurfaceDoc::from_surface(g)),
            Model::Sphere(h) => ModelDocument::Sphere(SphereDoc::from_profile(h)),
            Model::Family(f) => ModelDocument::Family(FamilyDoc::from_family(f)),
            Model::Grid(g) => ModelDocument::Grid(GridDoc {
                version: VERSION,
                width: g.width,
                height: g.height,
                spacing: g.spacing,
                values: g.values.clone(),
            }),
        }
    }
}

pub fn parse_document(data: &[u8]) -> Result<ModelDocument, ModelError> {
    serde_json::from_slice(data).map_err(|e| ModelError::Json(e.to_string()))
}

pub fn parse_model(data: &[u8]) -> Result<Model, ModelError> {
    parse_document(data)?.to_model()
}

pub fn to_json(m: &Model) -> String {
    let mut s = serde_json::to_string_pretty(&ModelDocument::from_model(m)).expect("serializable");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::morse_tree::models::{double_mountain, single_mountain};
    use crate::rational::q;
    use crate::reeb_surface::models::genus2_figure;

    fn fixpoint(m: &Model) {
        let once = to_json(m);
        let back = parse_model(once.as_bytes()).unwrap();
        assert_eq!(&back, m);
        assert_eq!(to_json(&back), once);
    }

    #[test]
    fn roundtrips() {
        fixpoint(&Model::PlaneTree(double_mountain()));
        fixpoint(&Model::PlaneTree(PlaneTree::empty()));
        fixpoint(&Model::Surface(genus2_figure()));
        let h = HeightProfile::new(Pl::new(vec![(q(0, 1), q(0, 1)), (q(1, 1), q(1, 2))]).unwrap(), q(-1, 3)).unwrap();
        fixpoint(&Model::Sphere(h));
        fixpoint(&Model::Family(Family::Linear { from: single_mountain(), to: single_mountain() }));
        fixpoint(&Model::Family(Family::Shift { base: single_mountain(), rate: q(2, 3) }));
        let g = RhoProfile::new(vec![(q(2, 1), q(0, 1)), (q(3, 1), q(5, 2)), (q(4, 1), q(0, 1))]).unwrap();
        fixpoint(&Model::Family(Family::special(&g, None, vec![single_mountain()]).unwrap()));
        fixpoint(&Model::Grid(ScalarGrid::zeros(4, 3, 0.5).unwrap()));
    }

    #[test]
    fn hand_written_document() {
        let doc = r#"{"kind":"plane_tree","version":1,
            "nodes":[{"name":"max","kind":"extremum","level":1}],
            "edges":[{"name":"e","inner":"max","outer":null,
                      "profile":{"rho":[[0,"-2"],["1","0"]],"area_lo":"0","level_at_lo":"1"}}]}"#;
        assert_eq!(parse_model(doc.as_bytes()).unwrap(), Model::PlaneTree(single_mountain()));
    }

    #[test]
    fn rejects() {
        let e = |s: &str| parse_model(s.as_bytes()).unwrap_err();
        assert!(matches!(e("{"), ModelError::Json(_)));
        assert!(matches!(e(r#"{"kind":"sphere","version":2,"dh":[[0,0],[1,0]],"h0":0}"#), ModelError::Version(2)));
        assert!(matches!(e(r#"{"kind":"sphere","dh":[[0,0],[1,0.5]],"h0":0}"#), ModelError::Json(_)));
        assert!(matches!(e(r#"{"kind":"sphere","dh":[[0,0],[2,0]],"h0":0}"#), ModelError::Sphere(_)));
        assert!(matches!(
            e(r#"{"kind":"plane_tree","nodes":[],"edges":[{"name":"e","inner":"x","outer":null,"profile":{"rho":[[0,0],[1,0]],"level_at_lo":0}}]}"#),
            ModelError::Invalid(_)
        ));
    }
}
