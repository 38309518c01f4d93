use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Structural measurements computed directly from the graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PrimitiveKind {
    Degree,
    InDegree,
    OutDegree,
    WeightedDegree,
    /// 2-stars centered at the node: `deg * (deg - 1) / 2`.
    Wedges,
    Triangles,
    EgonetInternalEdges,
    EgonetExternalEdges,
    CoreNumber,
}

impl PrimitiveKind {
    pub const ALL: [PrimitiveKind; 9] = [
        PrimitiveKind::Degree,
        PrimitiveKind::InDegree,
        PrimitiveKind::OutDegree,
        PrimitiveKind::WeightedDegree,
        PrimitiveKind::Wedges,
        PrimitiveKind::Triangles,
        PrimitiveKind::EgonetInternalEdges,
        PrimitiveKind::EgonetExternalEdges,
        PrimitiveKind::CoreNumber,
    ];

    /// The standard primitive set. Directed graphs get in- and out-degree in
    /// addition to total degree.
    pub fn standard(directed: bool) -> Vec<PrimitiveKind> {
        use PrimitiveKind::*;
        let mut kinds = vec![Degree];
        if directed {
            kinds.extend([InDegree, OutDegree]);
        }
        kinds.extend([
            WeightedDegree,
            Wedges,
            Triangles,
            EgonetInternalEdges,
            EgonetExternalEdges,
            CoreNumber,
        ]);
        kinds
    }

    pub fn name(self) -> &'static str {
        match self {
            PrimitiveKind::Degree => "degree",
            PrimitiveKind::InDegree => "in-degree",
            PrimitiveKind::OutDegree => "out-degree",
            PrimitiveKind::WeightedDegree => "weighted-degree",
            PrimitiveKind::Wedges => "wedges",
            PrimitiveKind::Triangles => "triangles",
            PrimitiveKind::EgonetInternalEdges => "egonet-internal",
            PrimitiveKind::EgonetExternalEdges => "egonet-external",
            PrimitiveKind::CoreNumber => "core-number",
        }
    }
}

impl fmt::Display for PrimitiveKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PrimitiveKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let alias = match s {
            "wedge-count" | "two-stars" => "wedges",
            "triangle-count" => "triangles",
            "egonet-internal-edges" => "egonet-internal",
            "egonet-external-edges" => "egonet-external",
            other => other,
        };
        PrimitiveKind::ALL
            .into_iter()
            .find(|k| k.name() == alias)
            .ok_or_else(|| Error::Unknown {
                what: "primitive",
                name: s.to_string(),
            })
    }
}

/// Neighborhood aggregates used to build recursive features.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Operator {
    Sum,
    Mean,
    Max,
    Min,
    /// Most frequent floored value among neighbors; ties go to the smaller value.
    Mode,
}

impl Operator {
    pub const ALL: [Operator; 5] = [
        Operator::Sum,
        Operator::Mean,
        Operator::Max,
        Operator::Min,
        Operator::Mode,
    ];

    pub fn standard() -> Vec<Operator> {
        vec![Operator::Sum, Operator::Mean]
    }

    pub fn name(self) -> &'static str {
        match self {
            Operator::Sum => "sum",
            Operator::Mean => "mean",
            Operator::Max => "max",
            Operator::Min => "min",
            Operator::Mode => "mode",
        }
    }
}

impl fmt::Display for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Operator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Operator::ALL
            .into_iter()
            .find(|op| op.name() == s)
            .ok_or_else(|| Error::Unknown {
                what: "operator",
                name: s.to_string(),
            })
    }
}

/// How a feature column is produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Recipe {
    Primitive(PrimitiveKind),
    /// Caller-supplied node attribute column, by position.
    Attribute(usize),
    /// `op` applied over each node's neighbors to the feature with id `base`.
    Composite {
        op: Operator,
        base: usize,
    },
}

/// A reproducible feature definition. Descriptor lists are ordered by `id`
/// and every composite refers to an earlier id, so a list can be replayed on
/// any graph.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "DescriptorRecord", try_from = "DescriptorRecord")]
pub struct FeatureDescriptor {
    pub id: usize,
    pub recipe: Recipe,
    pub iteration: usize,
}

impl FeatureDescriptor {
    pub fn primitive(id: usize, kind: PrimitiveKind) -> Self {
        FeatureDescriptor {
            id,
            recipe: Recipe::Primitive(kind),
            iteration: 0,
        }
    }

    pub fn composite(id: usize, op: Operator, base: usize, iteration: usize) -> Self {
        FeatureDescriptor {
            id,
            recipe: Recipe::Composite { op, base },
            iteration,
        }
    }

    /// Human-readable recipe such as `mean(sum(degree))`, resolved against
    /// the rest of `list`.
    pub fn describe(&self, list: &[FeatureDescriptor]) -> String {
        match self.recipe {
            Recipe::Primitive(kind) => kind.name().to_string(),
            Recipe::Attribute(i) => format!("attr{i}"),
            Recipe::Composite { op, base } => match list.iter().find(|d| d.id == base) {
                Some(b) => format!("{op}({})", b.describe(list)),
                None => format!("{op}(#{base})"),
            },
        }
    }
}

/// Checks ids are strictly increasing and every composite base names an
/// earlier descriptor in the list.
pub fn validate_descriptors(list: &[FeatureDescriptor]) -> Result<()> {
    let mut prev: Option<usize> = None;
    for (pos, d) in list.iter().enumerate() {
        if prev.is_some_and(|p| d.id <= p) {
            return Err(Error::MalformedDescriptors(format!(
                "ids not strictly increasing at position {pos}"
            )));
        }
        if let Recipe::Composite { base, .. } = d.recipe {
            if base >= d.id || !list[..pos].iter().any(|e| e.id == base) {
                return Err(Error::MalformedDescriptors(format!(
                    "feature {} refers to missing or later base {base}",
                    d.id
                )));
            }
        }
        prev = Some(d.id);
    }
    Ok(())
}

#[derive(Serialize, Deserialize)]
struct DescriptorRecord {
    id: usize,
    kind: String,
    primitive: Option<String>,
    operator: Option<String>,
    base: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    attribute: Option<usize>,
    iteration: usize,
}

impl From<FeatureDescriptor> for DescriptorRecord {
    fn from(d: FeatureDescriptor) -> Self {
        let mut rec = DescriptorRecord {
            id: d.id,
            kind: String::new(),
            primitive: None,
            operator: None,
            base: None,
            attribute: None,
            iteration: d.iteration,
        };
        match d.recipe {
            Recipe::Primitive(kind) => {
                rec.kind = "primitive".into();
                rec.primitive = Some(kind.name().into());
            }
            Recipe::Attribute(i) => {
                rec.kind = "attribute".into();
                rec.attribute = Some(i);
            }
            Recipe::Composite { op, base } => {
                rec.kind = "composite".into();
                rec.operator = Some(op.name().into());
                rec.base = Some(base);
            }
        }
        rec
    }
}

impl TryFrom<DescriptorRecord> for FeatureDescriptor {
    type Error = Error;

    fn try_from(rec: DescriptorRecord) -> Result<Self> {
        let missing = |field: &str| {
            Error::MalformedDescriptors(format!("descriptor {} lacks {field}", rec.id))
        };
        let recipe = match rec.kind.as_str() {
            "primitive" => Recipe::Primitive(
                rec.primitive
                    .as_deref()
                    .ok_or_else(|| missing("primitive"))?
                    .parse()?,
            ),
            "attribute" => Recipe::Attribute(rec.attribute.ok_or_else(|| missing("attribute"))?),
            "composite" => Recipe::Composite {
                op: rec
                    .operator
                    .as_deref()
                    .ok_or_else(|| missing("operator"))?
                    .parse()?,
                base: rec.base.ok_or_else(|| missing("base"))?,
            },
            other => {
                return Err(Error::Unknown {
                    what: "descriptor kind",
                    name: other.to_string(),
                })
            }
        };
        Ok(FeatureDescriptor {
            id: rec.id,
            recipe,
            iteration: rec.iteration,
        })
    }
}
