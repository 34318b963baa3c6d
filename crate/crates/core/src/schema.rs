//! JSON documents for root data, forms, extensions, cochains, triples and
//! reports.
//!
//! Indices in quadratic-form keys `"i,j"` are 0-based. Field elements,
//! places and residues are strings in the element syntax of [`crate::fields`].

use std::collections::BTreeMap;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::bd::BDTriple;
use crate::error::{Error, Result};
use crate::extensions::{Coefficient, CoefficientGroup, MonomialCochain, MonomialCocycleExtension, QuadraticFunction};
use crate::fields::{Field, FieldElement, Place};
use crate::ktheory::K2Coordinates;
use crate::lattice::{
    matrix_from_rows, matrix_rows, BilinearIncarnation, IntMatrix, Lattice, QuadraticForm, RootDatum,
};
use crate::residue_functors::{EZObject, IntegralModelReport, ResidualExtension};

/// Parses a JSON document, reporting the failing position as the token.
pub fn from_json<T: DeserializeOwned>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| {
        let line = text.lines().nth(e.line().saturating_sub(1)).unwrap_or("");
        let token: String = line.chars().skip(e.column().saturating_sub(1)).take(24).collect();
        Error::parse(
            if token.is_empty() {
                format!("{}:{}", e.line(), e.column())
            } else {
                token
            },
            e.to_string(),
        )
    })
}

/// Pretty JSON with a trailing newline. Output is deterministic: all maps
/// are ordered.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

fn square(rows: &[Vec<i64>], n: usize, what: &str) -> Result<IntMatrix> {
    if rows.len() != n {
        return Err(Error::parse(what, format!("expected {n} rows, found {}", rows.len())));
    }
    if let Some(r) = rows.iter().find(|r| r.len() != n) {
        return Err(Error::parse(what, format!("row {r:?} does not have length {n}")));
    }
    matrix_from_rows(rows, n)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RootDatumJson {
    pub rank: usize,
    pub roots: Vec<Vec<i64>>,
    pub coroots: Vec<Vec<i64>>,
    #[serde(default)]
    pub label: String,
}

impl RootDatumJson {
    pub fn from_root_datum(rd: &RootDatum) -> Self {
        RootDatumJson {
            rank: rd.rank(),
            roots: rd.roots().to_vec(),
            coroots: rd.coroots().to_vec(),
            label: rd.label().to_string(),
        }
    }

    pub fn build(&self) -> Result<RootDatum> {
        let label = if self.label.is_empty() { "custom" } else { &self.label };
        RootDatum::new(label, self.rank, self.roots.clone(), self.coroots.clone())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadraticFormJson {
    pub rank: usize,
    pub upper: BTreeMap<String, i64>,
}

impl QuadraticFormJson {
    pub fn from_form(q: &QuadraticForm) -> Self {
        let n = q.lattice().rank();
        let mut upper = BTreeMap::new();
        for i in 0..n {
            for j in i..n {
                let c = q.coefficient(i, j);
                if c != 0 {
                    upper.insert(format!("{i},{j}"), c);
                }
            }
        }
        QuadraticFormJson { rank: n, upper }
    }

    pub fn build(&self, lattice: &Lattice) -> Result<QuadraticForm> {
        if self.rank != lattice.rank() {
            return Err(Error::parse(
                self.rank.to_string(),
                format!("quadratic form of rank {} on {lattice}", self.rank),
            ));
        }
        let mut entries = Vec::new();
        for (k, v) in &self.upper {
            let bad = || Error::parse(k.as_str(), "expected a key \"i,j\" with 0 ≤ i ≤ j < rank");
            let (a, b) = k.split_once(',').ok_or_else(bad)?;
            let i: usize = a.trim().parse().map_err(|_| bad())?;
            let j: usize = b.trim().parse().map_err(|_| bad())?;
            if i > j || j >= self.rank {
                return Err(bad());
            }
            entries.push(((i, j), *v));
        }
        QuadraticForm::from_entries(lattice.clone(), entries)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IncarnationJson {
    pub rank: usize,
    pub matrix: Vec<Vec<i64>>,
}

impl IncarnationJson {
    pub fn from_incarnation(c: &BilinearIncarnation) -> Self {
        IncarnationJson {
            rank: c.rank(),
            matrix: matrix_rows(c.matrix()),
        }
    }

    pub fn build(&self) -> Result<BilinearIncarnation> {
        BilinearIncarnation::new(Lattice::new(self.rank, "Y"), square(&self.matrix, self.rank, "matrix")?)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", deny_unknown_fields)]
pub enum CoeffJson {
    #[serde(rename = "Fx")]
    Units { field: String },
    #[serde(rename = "Z")]
    Integers,
    #[serde(rename = "resx")]
    ResidueUnits { field: String, place: String },
    #[serde(rename = "mu2")]
    Mu2,
}

impl CoeffJson {
    pub fn from_group(g: &CoefficientGroup) -> Self {
        match g {
            CoefficientGroup::Units(f) => CoeffJson::Units { field: f.to_string() },
            CoefficientGroup::Integers => CoeffJson::Integers,
            CoefficientGroup::ResidueUnits { field, place } => CoeffJson::ResidueUnits {
                field: field.to_string(),
                place: place.to_string(),
            },
            CoefficientGroup::Mu2 => CoeffJson::Mu2,
        }
    }

    pub fn build(&self) -> Result<CoefficientGroup> {
        Ok(match self {
            CoeffJson::Units { field } => CoefficientGroup::Units(Field::parse(field)?),
            CoeffJson::Integers => CoefficientGroup::Integers,
            CoeffJson::ResidueUnits { field, place } => {
                let f = Field::parse(field)?;
                let place = f.parse_place(place)?;
                if place.is_archimedean() {
                    return Err(Error::parse(place.to_string(), "residue units need a finite place"));
                }
                CoefficientGroup::ResidueUnits { field: f, place }
            }
            CoeffJson::Mu2 => CoefficientGroup::Mu2,
        })
    }
}

pub fn coefficient_to_string(a: &Coefficient) -> String {
    a.to_string()
}

pub fn parse_coefficient(group: &CoefficientGroup, s: &str) -> Result<Coefficient> {
    let a = match group {
        CoefficientGroup::Units(f) => {
            let u = f.parse_element(s)?;
            if u.is_zero() {
                return Err(Error::parse(s, "coefficient must be a unit"));
            }
            Coefficient::Unit(u)
        }
        CoefficientGroup::Integers => {
            Coefficient::Int(s.trim().parse().map_err(|_| Error::parse(s, "expected an integer"))?)
        }
        CoefficientGroup::Mu2 => match s.trim() {
            "1" => Coefficient::Sign(1),
            "-1" | "−1" => Coefficient::Sign(-1),
            _ => return Err(Error::parse(s, "expected 1 or -1")),
        },
        CoefficientGroup::ResidueUnits { field, .. } => {
            let k = group.residue_field()?;
            let value = match field {
                Field::Rational => {
                    let n: i128 = s
                        .trim()
                        .parse()
                        .map_err(|_| Error::parse(s, "expected an integer residue"))?;
                    let p = k.characteristic() as i128;
                    crate::fields::Poly::constant(k.characteristic(), n.rem_euclid(p) as u64)
                }
                Field::Function { .. } => match field.parse_element(s)? {
                    FieldElement::Function(r) if r.denom().is_one() => r.numer().clone(),
                    _ => return Err(Error::parse(s, "expected a polynomial residue")),
                },
            };
            let r = k.element(value);
            if r.is_zero() {
                return Err(Error::parse(s, "residue must be nonzero"));
            }
            Coefficient::Residue(r)
        }
    };
    group.check(&a)?;
    Ok(a)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermJson {
    pub base: String,
    pub form: Vec<Vec<i64>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExtensionJson {
    pub rank: usize,
    pub coeff: CoeffJson,
    pub terms: Vec<TermJson>,
}

impl ExtensionJson {
    pub fn from_extension(e: &MonomialCocycleExtension) -> Self {
        ExtensionJson {
            rank: e.rank(),
            coeff: CoeffJson::from_group(e.coeff()),
            terms: e
                .terms()
                .iter()
                .map(|(a, b)| TermJson {
                    base: coefficient_to_string(a),
                    form: matrix_rows(b),
                })
                .collect(),
        }
    }

    pub fn build(&self, lattice: &Lattice) -> Result<MonomialCocycleExtension> {
        if self.rank != lattice.rank() {
            return Err(Error::parse(
                self.rank.to_string(),
                format!("extension of rank {} on {lattice}", self.rank),
            ));
        }
        let coeff = self.coeff.build()?;
        let terms = self
            .terms
            .iter()
            .map(|t| Ok((parse_coefficient(&coeff, &t.base)?, square(&t.form, self.rank, "form")?)))
            .collect::<Result<_>>()?;
        MonomialCocycleExtension::new(lattice.clone(), coeff, terms)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CochainTermJson {
    pub base: String,
    /// Symmetric matrix `B` of `Σ_{i<j} B_ij y_i y_j + Σ B_ii C(y_i, 2)`.
    pub form: Vec<Vec<i64>>,
    pub linear: Vec<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CochainJson {
    pub rank: usize,
    pub coeff: CoeffJson,
    pub terms: Vec<CochainTermJson>,
}

impl CochainJson {
    pub fn from_cochain(c: &MonomialCochain) -> Self {
        CochainJson {
            rank: c.base().rank(),
            coeff: CoeffJson::from_group(c.coeff()),
            terms: c
                .terms()
                .iter()
                .map(|(a, q)| CochainTermJson {
                    base: coefficient_to_string(a),
                    form: matrix_rows(q.form()),
                    linear: q.linear_part().to_vec(),
                })
                .collect(),
        }
    }

    pub fn build(&self, lattice: &Lattice) -> Result<MonomialCochain> {
        if self.rank != lattice.rank() {
            return Err(Error::parse(
                self.rank.to_string(),
                format!("cochain of rank {} on {lattice}", self.rank),
            ));
        }
        let coeff = self.coeff.build()?;
        let terms = self
            .terms
            .iter()
            .map(|t| {
                if t.linear.len() != self.rank {
                    return Err(Error::parse("linear", format!("expected {} entries", self.rank)));
                }
                let form = square(&t.form, self.rank, "form")?;
                let q = QuadraticFunction::new(form, t.linear.clone())
                    .map_err(|_| Error::parse("form", "cochain form must be symmetric"))?;
                Ok((parse_coefficient(&coeff, &t.base)?, q))
            })
            .collect::<Result<_>>()?;
        MonomialCochain::new(lattice.clone(), coeff, terms)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TripleJson {
    #[serde(rename = "rootDatum")]
    pub root_datum: RootDatumJson,
    #[serde(rename = "Q")]
    pub q: QuadraticFormJson,
    #[serde(rename = "D")]
    pub d: ExtensionJson,
    pub p: Vec<Vec<i64>>,
    pub phi: CochainJson,
}

impl TripleJson {
    pub fn from_triple(t: &BDTriple) -> Self {
        TripleJson {
            root_datum: RootDatumJson::from_root_datum(t.root_datum()),
            q: QuadraticFormJson::from_form(t.q()),
            d: ExtensionJson::from_extension(t.d()),
            p: matrix_rows(t.p().matrix()),
            phi: CochainJson::from_cochain(t.phi()),
        }
    }

    pub fn build(&self) -> Result<BDTriple> {
        let rd = self.root_datum.build()?;
        let p = rd.coroot_inclusion();
        if self.p != matrix_rows(p.matrix()) {
            return Err(Error::parse("p", "p must be the simple coroots as columns"));
        }
        let q = self.q.build(rd.y_lattice())?;
        let d = self.d.build(rd.y_lattice())?;
        let phi = self.phi.build(&rd.y_sc())?;
        BDTriple::new(rd, q, d, phi)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoordJson {
    pub place: String,
    pub value: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymbolJson {
    pub coords: Vec<CoordJson>,
    pub sign2: i8,
    #[serde(rename = "signReal")]
    pub sign_real: i8,
}

impl SymbolJson {
    pub fn from_coordinates(k: &K2Coordinates) -> Self {
        SymbolJson {
            coords: k
                .tame()
                .iter()
                .map(|(p, v)| CoordJson {
                    place: p.to_string(),
                    value: v.to_string(),
                })
                .collect(),
            sign2: k.sign2(),
            sign_real: k.sign_real(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResidualJson {
    pub place: String,
    pub cocycle: ExtensionJson,
    pub split: bool,
    pub splitting: Option<CochainJson>,
}

impl ResidualJson {
    pub fn from_residual(r: &ResidualExtension) -> Result<Self> {
        Ok(ResidualJson {
            place: r.place.to_string(),
            cocycle: ExtensionJson::from_extension(&r.cocycle.simplify()?),
            split: r.is_split()?,
            splitting: r.splitting.as_ref().map(CochainJson::from_cochain),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EzJson {
    pub yprime: ExtensionJson,
    pub nu0: CochainJson,
    pub p: Vec<Vec<i64>>,
    pub psi: Vec<i64>,
}

impl EzJson {
    pub fn from_ez(e: &EZObject) -> Self {
        EzJson {
            yprime: ExtensionJson::from_extension(&e.yprime),
            nu0: CochainJson::from_cochain(&e.nu0),
            p: matrix_rows(e.p.matrix()),
            psi: e.psi.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EquationJson {
    pub row: usize,
    pub column: usize,
    pub divisor: i64,
    pub value: i64,
    pub equation: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObstructionJson {
    pub equations: Vec<EquationJson>,
    pub invariants: Vec<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelReportJson {
    pub place: String,
    pub exists: bool,
    pub witness: Option<CochainJson>,
    pub h: Option<Vec<i64>>,
    pub obstruction: Option<ObstructionJson>,
    #[serde(rename = "torsorRank")]
    pub torsor_rank: usize,
    pub kernel: Vec<Vec<i64>>,
    pub complement: Vec<Vec<i64>>,
    pub torsion: Vec<i64>,
    pub psi: Vec<i64>,
}

impl ModelReportJson {
    pub fn from_report(place: &Place, r: &IntegralModelReport) -> Self {
        ModelReportJson {
            place: place.to_string(),
            exists: r.exists,
            witness: r.witness.as_ref().map(CochainJson::from_cochain),
            h: r.h.clone(),
            obstruction: r.obstruction.as_ref().map(|o| ObstructionJson {
                equations: o
                    .obstructions
                    .iter()
                    .map(|e| EquationJson {
                        row: e.row,
                        column: e.column,
                        divisor: e.divisor,
                        value: e.value,
                        equation: e.to_string(),
                    })
                    .collect(),
                invariants: o.invariants.clone(),
            }),
            torsor_rank: r.torsor_rank,
            kernel: r.kernel.clone(),
            complement: r.complement.clone(),
            torsion: r.torsion.clone(),
            psi: r.psi.clone(),
        }
    }
}
