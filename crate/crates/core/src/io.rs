//! JSON schemas for every on-disk object.
//!
//! Conventions: complex scalars are two-element arrays `[re, im]`; a
//! matrix is a row-major array of rows; an algebra element is an array of
//! square block matrices; block and point indices in files are 1-based.
//!
//! A dynamical system file carries either an explicit normal form
//!
//! ```json
//! {"algebra": {"blocks": [2, 1]},
//!  "endomorphism": {"mult": [[0, 2], [0, 1]],
//!                    "unitaries": [..., ...],
//!                    "slack": [0, 0]}}
//! ```
//!
//! or a commutative point system `{"commutative": {"points": 3, "map":
//! {"1": 2, "2": 3, "3": 3}}}`, which compiles to the normal form on
//! loading. Matrix-element files list their support as
//! `{"entries": [{"i": 0, "j": 1, "value": [...]}]}` (positions are the
//! 0-based ℕ×ℕ coordinates, not block indices); loading rejects entries
//! that violate the corner constraint beyond the configured tolerance.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::algebra::{AlgebraElement, BlockAlgebra, Ideal};
use crate::endo::{CommutativeSystem, Endomorphism, ExtendedSystem};
use crate::matcalc::CpMatrix;
use crate::rep::{BlockRep, CovariantRep, PathRep};
use crate::{CMat, Complex, Error, Result, Tol};

type JsonMatrix = Vec<Vec<[f64; 2]>>;

fn matrix_to_json(m: &CMat) -> JsonMatrix {
    (0..m.nrows())
        .map(|r| (0..m.ncols()).map(|c| [m[(r, c)].re, m[(r, c)].im]).collect())
        .collect()
}

fn matrix_from_json(rows: &JsonMatrix, expect: Option<(usize, usize)>) -> Result<CMat> {
    let nrows = rows.len();
    let ncols = rows.first().map(|r| r.len()).unwrap_or(0);
    if rows.iter().any(|r| r.len() != ncols) {
        return Err(Error::Parse("ragged matrix rows".into()));
    }
    if let Some((er, ec)) = expect {
        if er != nrows || ec != ncols {
            return Err(Error::Parse(format!(
                "matrix is {nrows}x{ncols}, expected {er}x{ec}"
            )));
        }
    }
    Ok(CMat::from_fn(nrows, ncols, |r, c| {
        Complex::new(rows[r][c][0], rows[r][c][1])
    }))
}

/// Serialize an algebra element as an array of block matrices.
pub fn element_to_json(x: &AlgebraElement) -> Value {
    serde_json::to_value(x.blocks().iter().map(matrix_to_json).collect::<Vec<_>>())
        .expect("serializing plain data")
}

/// Parse an algebra element against a known algebra shape.
pub fn element_from_json(value: &Value, algebra: &BlockAlgebra) -> Result<AlgebraElement> {
    let raw: Vec<JsonMatrix> = serde_json::from_value(value.clone())?;
    if raw.len() != algebra.block_count() {
        return Err(Error::Parse(format!(
            "element has {} blocks, algebra has {}",
            raw.len(),
            algebra.block_count()
        )));
    }
    let blocks = raw
        .iter()
        .zip(algebra.block_dims())
        .map(|(rows, &n)| matrix_from_json(rows, Some((n, n))))
        .collect::<Result<Vec<_>>>()?;
    Ok(algebra.element(blocks))
}

#[derive(Debug, Serialize, Deserialize)]
struct AlgebraSchema {
    blocks: Vec<usize>,
}

#[derive(Debug, Serialize, Deserialize)]
struct EndomorphismSchema {
    mult: Vec<Vec<usize>>,
    unitaries: Vec<JsonMatrix>,
    slack: Vec<usize>,
}

#[derive(Debug, Serialize, Deserialize)]
struct CommutativeSchema {
    points: usize,
    /// 1-based point -> 1-based image; missing keys are outside the domain.
    map: std::collections::BTreeMap<String, usize>,
}

#[derive(Debug, Serialize, Deserialize)]
struct SystemSchema {
    #[serde(skip_serializing_if = "Option::is_none")]
    algebra: Option<AlgebraSchema>,
    #[serde(skip_serializing_if = "Option::is_none")]
    endomorphism: Option<EndomorphismSchema>,
    #[serde(skip_serializing_if = "Option::is_none")]
    commutative: Option<CommutativeSchema>,
}

/// A loaded system: the normal form plus the point description when the
/// file used the commutative shorthand.
pub struct LoadedSystem {
    pub endo: Endomorphism,
    pub commutative: Option<CommutativeSystem>,
}

/// Parse a system file.
pub fn system_from_str(text: &str, tol: Tol) -> Result<LoadedSystem> {
    let schema: SystemSchema = serde_json::from_str(text)?;
    match (schema.algebra, schema.endomorphism, schema.commutative) {
        (_, _, Some(c)) => {
            let mut map = vec![None; c.points];
            for (k, v) in &c.map {
                let from: usize = k
                    .parse()
                    .map_err(|_| Error::Parse(format!("map key `{k}` is not a point")))?;
                if from == 0 || from > c.points || *v == 0 || *v > c.points {
                    return Err(Error::Parse(format!("map entry {k} -> {v} out of range")));
                }
                map[from - 1] = Some(v - 1);
            }
            let commutative = CommutativeSystem::new(c.points, map)?;
            Ok(LoadedSystem { endo: commutative.compile(tol), commutative: Some(commutative) })
        }
        (Some(a), Some(e), None) => {
            let algebra = BlockAlgebra::new(a.blocks);
            let unitaries = e
                .unitaries
                .iter()
                .zip(algebra.block_dims())
                .map(|(rows, &n)| matrix_from_json(rows, Some((n, n))))
                .collect::<Result<Vec<_>>>()?;
            let endo = Endomorphism::new(algebra, e.mult, unitaries, e.slack, tol)?;
            Ok(LoadedSystem { endo, commutative: None })
        }
        _ => Err(Error::Parse(
            "system file needs either `commutative` or both `algebra` and `endomorphism`".into(),
        )),
    }
}

/// Serialize a system in normal form.
pub fn system_to_json(endo: &Endomorphism) -> Value {
    serde_json::to_value(SystemSchema {
        algebra: Some(AlgebraSchema { blocks: endo.algebra().block_dims().to_vec() }),
        endomorphism: Some(EndomorphismSchema {
            mult: endo.multiplicities().to_vec(),
            unitaries: endo.unitaries().iter().map(matrix_to_json).collect(),
            slack: endo.slack().to_vec(),
        }),
        commutative: None,
    })
    .expect("serializing plain data")
}

#[derive(Debug, Serialize, Deserialize)]
struct IdealSchema {
    /// 1-based block indices.
    blocks_in: Vec<usize>,
}

/// Parse an ideal file against an algebra.
pub fn ideal_from_str(text: &str, algebra: &BlockAlgebra) -> Result<Ideal> {
    let schema: IdealSchema = serde_json::from_str(text)?;
    let mut blocks = Vec::with_capacity(schema.blocks_in.len());
    for b in schema.blocks_in {
        if b == 0 || b > algebra.block_count() {
            return Err(Error::Parse(format!(
                "block {b} out of range 1..={}",
                algebra.block_count()
            )));
        }
        blocks.push(b - 1);
    }
    Ok(algebra.ideal(blocks))
}

pub fn ideal_to_json(ideal: &Ideal) -> Value {
    serde_json::to_value(IdealSchema {
        blocks_in: ideal.blocks().iter().map(|b| b + 1).collect(),
    })
    .expect("serializing plain data")
}

#[derive(Debug, Serialize, Deserialize)]
struct EntrySchema {
    i: usize,
    j: usize,
    value: Value,
}

#[derive(Debug, Serialize, Deserialize)]
struct MatrixElementSchema {
    entries: Vec<EntrySchema>,
}

/// Parse a matrix-element file; corner violations beyond the system
/// tolerance are rejected.
pub fn cpmatrix_from_str(text: &str, sys: &Endomorphism) -> Result<CpMatrix> {
    let schema: MatrixElementSchema = serde_json::from_str(text)?;
    let entries = schema
        .entries
        .iter()
        .map(|e| {
            let v = element_from_json(&e.value, sys.algebra())?;
            Ok(((e.i, e.j), v))
        })
        .collect::<Result<Vec<_>>>()?;
    CpMatrix::from_entries(sys, entries)
}

pub fn cpmatrix_to_json(m: &CpMatrix) -> Value {
    serde_json::to_value(MatrixElementSchema {
        entries: m
            .entries()
            .map(|(&(i, j), v)| EntrySchema { i, j, value: element_to_json(v) })
            .collect(),
    })
    .expect("serializing plain data")
}

#[derive(Debug, Serialize, Deserialize)]
struct PiSchema {
    multiplicities: Vec<usize>,
    unitary: JsonMatrix,
}

#[derive(Debug, Serialize, Deserialize)]
struct RepSchema {
    dim: usize,
    pi: PiSchema,
    #[serde(rename = "U")]
    u: JsonMatrix,
    #[serde(skip_serializing_if = "Option::is_none")]
    nodes: Option<Vec<NodeSchema>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    defect_shell: Option<Vec<usize>>,
}

#[derive(Debug, Serialize, Deserialize)]
struct NodeSchema {
    /// 1-based point label.
    label: usize,
    kind: String,
    depth: usize,
}

/// Parse a representation file.
pub fn rep_from_str(text: &str, sys: &Endomorphism) -> Result<CovariantRep> {
    let schema: RepSchema = serde_json::from_str(text)?;
    let basis = matrix_from_json(&schema.pi.unitary, Some((schema.dim, schema.dim)))?;
    let pi = BlockRep::new(sys.algebra(), schema.pi.multiplicities, basis)?;
    if pi.dim() != schema.dim {
        return Err(Error::Parse(format!(
            "declared dim {} does not match multiplicities ({})",
            schema.dim,
            pi.dim()
        )));
    }
    let u = matrix_from_json(&schema.u, Some((schema.dim, schema.dim)))?;
    CovariantRep::new(sys, pi, u)
}

pub fn rep_to_json(rep: &CovariantRep) -> Value {
    serde_json::to_value(RepSchema {
        dim: rep.dim(),
        pi: PiSchema {
            multiplicities: rep.pi().multiplicities().to_vec(),
            unitary: matrix_to_json(rep.pi().basis()),
        },
        u: matrix_to_json(rep.u()),
        nodes: None,
        defect_shell: None,
    })
    .expect("serializing plain data")
}

/// Serialize a path representation with its node metadata.
pub fn path_rep_to_json(path: &PathRep) -> Value {
    let mut value = rep_to_json(path.rep());
    let nodes: Vec<NodeSchema> = path
        .nodes()
        .iter()
        .map(|n| NodeSchema {
            label: n.label + 1,
            kind: match n.kind {
                crate::rep::NodeKind::Chain => "chain".into(),
                crate::rep::NodeKind::Cycle => "cycle".into(),
            },
            depth: n.depth,
        })
        .collect();
    value["nodes"] = serde_json::to_value(nodes).expect("serializing plain data");
    value["defect_shell"] =
        serde_json::to_value(path.defect_shell()).expect("serializing plain data");
    value
}

/// Structural report for an extended system, loadable back as a system.
pub fn extended_system_to_json(ext: &ExtendedSystem) -> Value {
    let mut value = system_to_json(ext.endomorphism());
    value["first_summand_source_blocks"] =
        serde_json::to_value(ext.first_blocks().iter().map(|b| b + 1).collect::<Vec<_>>())
            .expect("serializing plain data");
    value["second_summand_source_blocks"] =
        serde_json::to_value(ext.second_blocks().iter().map(|b| b + 1).collect::<Vec<_>>())
            .expect("serializing plain data");
    value["kernel"] = ideal_to_json(&ext.endomorphism().kernel());
    value["kernel_unit"] = element_to_json(&ext.kernel_unit());
    value
}
