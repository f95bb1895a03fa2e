//! Problem files: `{"version": 1, "kind": ..., "payload": {...}, "seed": n}`.

use std::path::Path;

use num_complex::Complex64;
use polyext::agler::PolyPickData;
use polyext::disk::PolyPoint;
use polyext::linalg::CMatrix;
use polyext::pick::DiskPickData;
use polyext::poly::MultiPoly;
use polyext::variety::{builtin_rational_inner_graph, builtin_sum, builtin_v0, AlgebraicVariety};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::CliError;

pub type Pair = [f64; 2];

pub fn complex(p: Pair) -> Complex64 {
    Complex64::new(p[0], p[1])
}

fn complexes(ps: &[Pair]) -> Vec<Complex64> {
    ps.iter().copied().map(complex).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    DiskPick,
    PolyPick,
    Variety,
    Tuple,
    Experiment,
}

impl Kind {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::DiskPick => "disk_pick",
            Self::PolyPick => "poly_pick",
            Self::Variety => "variety",
            Self::Tuple => "tuple",
            Self::Experiment => "experiment",
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub version: u32,
    pub kind: Kind,
    pub payload: Value,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DerivativeSpec {
    pub node: usize,
    pub value: Pair,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiskPickPayload {
    pub nodes: Vec<Pair>,
    pub targets: Vec<Pair>,
    #[serde(default)]
    pub derivatives: Vec<DerivativeSpec>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolyPickPayload {
    pub nodes: Vec<Vec<Pair>>,
    pub targets: Vec<Pair>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Term {
    pub exp: Vec<u32>,
    pub coef: Pair,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VarietyPayload {
    pub builtin: Option<String>,
    pub omega: Option<Pair>,
    pub a: Option<Pair>,
    pub b: Option<Pair>,
    pub dim: Option<usize>,
    pub generators: Option<Vec<Vec<Term>>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TuplePayload {
    pub nodes: Vec<Vec<Pair>>,
    pub kernel: Vec<Vec<Pair>>,
    pub matrices: Vec<Vec<Vec<Pair>>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentPayload {
    pub variety: VarietyPayload,
    pub nodes: Vec<Vec<Pair>>,
    pub targets: Vec<Pair>,
    pub phi: Option<Vec<Term>>,
}

impl ProblemFile {
    pub fn read(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let file: Self = serde_json::from_str(text).map_err(|e| CliError::Input(format!("malformed problem file: {e}")))?;
        if file.version != 1 {
            return Err(CliError::Input(format!("unsupported version {}", file.version)));
        }
        Ok(file)
    }

    pub fn expect(&self, kinds: &[Kind]) -> Result<(), CliError> {
        if kinds.contains(&self.kind) {
            Ok(())
        } else {
            let names: Vec<&str> = kinds.iter().map(|k| k.as_str()).collect();
            Err(CliError::Input(format!("expected kind {}, found {}", names.join(" or "), self.kind.as_str())))
        }
    }

    pub fn payload<T: serde::de::DeserializeOwned>(&self) -> Result<T, CliError> {
        serde_json::from_value(self.payload.clone()).map_err(|e| CliError::Input(format!("invalid {} payload: {e}", self.kind.as_str())))
    }
}

impl DiskPickPayload {
    pub fn data(&self) -> Result<DiskPickData, CliError> {
        let derivatives = self.derivatives.iter().map(|d| (d.node, complex(d.value))).collect();
        Ok(DiskPickData::with_derivatives(complexes(&self.nodes), complexes(&self.targets), derivatives)?)
    }
}

pub fn poly_points(nodes: &[Vec<Pair>]) -> Result<Vec<PolyPoint>, CliError> {
    nodes.iter().map(|n| Ok(PolyPoint::new(complexes(n))?)).collect()
}

pub fn poly_data(nodes: &[Vec<Pair>], targets: &[Pair]) -> Result<PolyPickData, CliError> {
    Ok(PolyPickData::new(poly_points(nodes)?, complexes(targets))?)
}

impl PolyPickPayload {
    pub fn data(&self) -> Result<PolyPickData, CliError> {
        poly_data(&self.nodes, &self.targets)
    }
}

pub fn poly_from_terms(d: usize, terms: &[Term]) -> Result<MultiPoly, CliError> {
    Ok(MultiPoly::new(d, terms.iter().map(|t| (t.exp.clone(), complex(t.coef))).collect())?)
}

pub fn matrix(rows: &[Vec<Pair>]) -> Result<CMatrix, CliError> {
    let n = rows.len();
    if rows.iter().any(|r| r.len() != n) {
        return Err(CliError::Input("matrix must be square".into()));
    }
    Ok(CMatrix::from_fn(n, n, |i, j| complex(rows[i][j])))
}

/// Known names after `builtin:`.
pub const BUILTINS: [&str; 3] = ["v0", "sum", "rational_inner"];

fn builtin(name: &str, p: Option<&VarietyPayload>) -> Result<AlgebraicVariety, CliError> {
    match name {
        "v0" => Ok(builtin_v0()),
        "sum" => Ok(builtin_sum()),
        "rational_inner" => {
            let get = |f: fn(&VarietyPayload) -> Option<Pair>, name: &str| {
                p.and_then(f).map(complex).ok_or_else(|| CliError::Input(format!("rational_inner needs `{name}`")))
            };
            Ok(builtin_rational_inner_graph(get(|p| p.omega, "omega")?, get(|p| p.a, "a")?, get(|p| p.b, "b")?)?)
        }
        other => Err(CliError::Input(format!("unknown builtin `{other}`; known: {}", BUILTINS.join(", ")))),
    }
}

impl VarietyPayload {
    pub fn variety(&self) -> Result<AlgebraicVariety, CliError> {
        if let Some(name) = &self.builtin {
            return builtin(name, Some(self));
        }
        let (Some(d), Some(gens)) = (self.dim, &self.generators) else {
            return Err(CliError::Input("variety needs `builtin` or both `dim` and `generators`".into()));
        };
        let gens = gens.iter().map(|g| poly_from_terms(d, g)).collect::<Result<Vec<_>, _>>()?;
        Ok(AlgebraicVariety::new(d, gens)?)
    }
}

/// A variety from `builtin:<name>` or a problem file of kind `variety`.
pub fn load_variety(input: &str) -> Result<AlgebraicVariety, CliError> {
    if let Some(name) = input.strip_prefix("builtin:") {
        return builtin(name, None);
    }
    let file = ProblemFile::read(Path::new(input))?;
    file.expect(&[Kind::Variety])?;
    file.payload::<VarietyPayload>()?.variety()
}

/// Parses `0.3`, `-0.4i`, `0.1+0.2i`, `i`, `1e-3-2e-2i`.
pub fn parse_complex(s: &str) -> Result<Complex64, String> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || format!("cannot parse complex number `{s}`");
    let Some(body) = t.strip_suffix('i') else {
        return t.parse::<f64>().map(|x| Complex64::new(x, 0.0)).map_err(|_| bad());
    };
    let split = body
        .char_indices()
        .skip(1)
        .filter(|&(k, c)| (c == '+' || c == '-') && !matches!(body.as_bytes()[k - 1], b'e' | b'E'))
        .map(|(k, _)| k)
        .last();
    let (re, im) = match split {
        Some(k) => (&body[..k], &body[k..]),
        None => ("0", body),
    };
    let im = match im {
        "" | "+" => 1.0,
        "-" => -1.0,
        x => x.parse::<f64>().map_err(|_| bad())?,
    };
    Ok(Complex64::new(re.parse::<f64>().map_err(|_| bad())?, im))
}
