//! Z-graded Lie algebras given by basis ids, a degree function and a
//! structure-constant oracle, plus the graded modules the cohomology engine
//! works with.
//!
//! Built-ins: the Witt algebra `[e_n, e_m] = (m - n) e_{n+m}`, its universal
//! central extension (the Virasoro algebra), and a closed three-element slice
//! `{e_{-1}, e_0, e_1}` used as a finite test algebra. Custom algebras are
//! loaded from JSON structure-constant tables and validated at load time.
//! Structure constants of the built-ins are computed on demand from the
//! closed-form formulas, never tabulated.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_traits::Zero;
use serde::Deserialize;

use crate::error::EngineError;
use crate::rational::{self, Rational};
use crate::Result;

/// Basis element of a graded Lie algebra: `Indexed(n)` is e_n (or its
/// central-extension lift), `Central` is the central element t of degree 0.
///
/// The ordering puts `Central` after every `Indexed` id so that canonical
/// sorted tuples are reproducible.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum BasisId {
    Indexed(i64),
    Central,
}

impl BasisId {
    pub fn index(self) -> Option<i64> {
        match self {
            BasisId::Indexed(n) => Some(n),
            BasisId::Central => None,
        }
    }
}

impl fmt::Display for BasisId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BasisId::Indexed(n) => write!(f, "e_{n}"),
            BasisId::Central => write!(f, "t"),
        }
    }
}

/// Finite rational linear combination of basis ids; no zero coefficients are
/// stored.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct LinearCombination {
    terms: BTreeMap<BasisId, Rational>,
}

impl LinearCombination {
    pub fn zero() -> Self {
        LinearCombination::default()
    }

    pub fn single(id: BasisId, coeff: Rational) -> Self {
        let mut lc = LinearCombination::zero();
        lc.add_term(id, coeff);
        lc
    }

    pub fn add_term(&mut self, id: BasisId, coeff: Rational) {
        if coeff.is_zero() {
            return;
        }
        let entry = self.terms.remove(&id).unwrap_or_else(Rational::zero) + coeff;
        if !entry.is_zero() {
            self.terms.insert(id, entry);
        }
    }

    pub fn add(&mut self, other: &LinearCombination) {
        for (id, c) in &other.terms {
            self.add_term(*id, c.clone());
        }
    }

    pub fn scale(&mut self, factor: &Rational) {
        if factor.is_zero() {
            self.terms.clear();
            return;
        }
        for c in self.terms.values_mut() {
            *c = &*c * factor;
        }
    }

    pub fn coefficient(&self, id: BasisId) -> Rational {
        self.terms.get(&id).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (BasisId, &Rational)> {
        self.terms.iter().map(|(&id, c)| (id, c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
}

impl fmt::Display for LinearCombination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (id, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{}*{}", rational::format(c), id)?;
        }
        Ok(())
    }
}

/// The defining 2-cocycle of the central extension:
/// `alpha(n, m) = -(1/12)(n^3 - n)` when `m = -n`, zero otherwise.
#[derive(Clone, Copy, Debug, Default)]
pub struct CentralExtensionCocycle;

impl CentralExtensionCocycle {
    pub fn alpha(&self, n: i64, m: i64) -> Rational {
        if m != -n {
            return Rational::zero();
        }
        rational::frac(-(n * n * n - n), 12)
    }
}

#[derive(Clone, Debug)]
struct CustomAlgebra {
    has_center: bool,
    /// Declared basis ids with their degrees, in id order.
    degrees: BTreeMap<BasisId, i64>,
    /// Structure constants for sorted pairs (a < b).
    brackets: BTreeMap<(BasisId, BasisId), LinearCombination>,
}

#[derive(Clone, Debug)]
enum AlgebraKind {
    Witt,
    Virasoro,
    Sl2Slice,
    Custom(Arc<CustomAlgebra>),
}

/// A Z-graded Lie algebra. Values are immutable after construction and cheap
/// to clone; they can be shared freely across concurrent jobs.
#[derive(Clone, Debug)]
pub struct GradedAlgebra {
    name: String,
    kind: AlgebraKind,
}

/// The Witt algebra: `[e_n, e_m] = (m - n) e_{n+m}`, no center.
pub fn witt() -> GradedAlgebra {
    GradedAlgebra {
        name: "witt".into(),
        kind: AlgebraKind::Witt,
    }
}

/// The Virasoro algebra: the Witt bracket twisted by the central term
/// `-(1/12)(n^3 - n)` on opposite indices, with `[., t] = 0`.
pub fn virasoro() -> GradedAlgebra {
    GradedAlgebra {
        name: "virasoro".into(),
        kind: AlgebraKind::Virasoro,
    }
}

/// Closed three-element test algebra on `{e_{-1}, e_0, e_1}` with the Witt
/// bracket; isomorphic to sl2.
pub fn sl2_slice() -> GradedAlgebra {
    GradedAlgebra {
        name: "sl2_slice".into(),
        kind: AlgebraKind::Sl2Slice,
    }
}

impl GradedAlgebra {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn has_center(&self) -> bool {
        match &self.kind {
            AlgebraKind::Witt | AlgebraKind::Sl2Slice => false,
            AlgebraKind::Virasoro => true,
            AlgebraKind::Custom(c) => c.has_center,
        }
    }

    pub fn is_virasoro(&self) -> bool {
        matches!(self.kind, AlgebraKind::Virasoro)
    }

    pub fn degree(&self, id: BasisId) -> i64 {
        match (&self.kind, id) {
            (_, BasisId::Central) => 0,
            (AlgebraKind::Custom(c), _) => {
                c.degrees.get(&id).copied().unwrap_or_else(|| {
                    panic!("basis id {id} not declared in algebra {}", self.name)
                })
            }
            (_, BasisId::Indexed(n)) => n,
        }
    }

    /// The bracket oracle. Bilinear, antisymmetric and degree-additive.
    pub fn bracket(&self, a: BasisId, b: BasisId) -> LinearCombination {
        match &self.kind {
            AlgebraKind::Witt => match (a, b) {
                (BasisId::Indexed(n), BasisId::Indexed(m)) => {
                    LinearCombination::single(BasisId::Indexed(n + m), rational::int(m - n))
                }
                _ => panic!("central element in a centerless algebra"),
            },
            AlgebraKind::Virasoro => match (a, b) {
                (BasisId::Indexed(n), BasisId::Indexed(m)) => {
                    let mut lc =
                        LinearCombination::single(BasisId::Indexed(n + m), rational::int(m - n));
                    lc.add_term(BasisId::Central, CentralExtensionCocycle.alpha(n, m));
                    lc
                }
                _ => LinearCombination::zero(),
            },
            AlgebraKind::Sl2Slice => match (a, b) {
                (BasisId::Indexed(n), BasisId::Indexed(m)) => {
                    assert!(n.abs() <= 1 && m.abs() <= 1, "index outside the slice");
                    // (m - n) vanishes whenever |n + m| = 2, so the bracket
                    // closes on the slice.
                    LinearCombination::single(BasisId::Indexed(n + m), rational::int(m - n))
                }
                _ => panic!("central element in a centerless algebra"),
            },
            AlgebraKind::Custom(c) => {
                if a == b {
                    return LinearCombination::zero();
                }
                let (lo, hi, sign) = if a < b { (a, b, 1) } else { (b, a, -1) };
                let mut lc = c.brackets.get(&(lo, hi)).cloned().unwrap_or_default();
                if sign < 0 {
                    lc.scale(&rational::int(-1));
                }
                lc
            }
        }
    }

    /// Basis ids whose index lies in `[-radius, radius]`, plus the central
    /// element when the algebra has one. Sorted in canonical id order.
    pub fn basis_in_window(&self, radius: i64) -> Vec<BasisId> {
        assert!(radius >= 0, "negative radius");
        let mut out: Vec<BasisId> = match &self.kind {
            AlgebraKind::Witt | AlgebraKind::Virasoro => {
                (-radius..=radius).map(BasisId::Indexed).collect()
            }
            AlgebraKind::Sl2Slice => (-radius.min(1)..=radius.min(1))
                .map(BasisId::Indexed)
                .collect(),
            AlgebraKind::Custom(c) => c
                .degrees
                .keys()
                .copied()
                .filter(|id| match id {
                    BasisId::Indexed(n) => n.abs() <= radius,
                    BasisId::Central => false,
                })
                .collect(),
        };
        if self.has_center() {
            out.push(BasisId::Central);
        }
        out
    }

    /// Full basis for finite, bracket-closed algebras; `None` for the
    /// infinite built-ins.
    pub fn finite_basis(&self) -> Option<Vec<BasisId>> {
        match &self.kind {
            AlgebraKind::Witt | AlgebraKind::Virasoro => None,
            AlgebraKind::Sl2Slice => Some(vec![
                BasisId::Indexed(-1),
                BasisId::Indexed(0),
                BasisId::Indexed(1),
            ]),
            AlgebraKind::Custom(c) => Some(c.degrees.keys().copied().collect()),
        }
    }
}

/// JSON wire format for custom algebras: basis ids with degrees and nonzero
/// structure constants as exact fraction strings.
#[derive(Deserialize)]
struct CustomAlgebraFile {
    name: String,
    #[serde(default)]
    has_center: bool,
    basis: Vec<CustomBasisEntry>,
    #[serde(default)]
    brackets: Vec<CustomBracketEntry>,
}

#[derive(Deserialize)]
struct CustomBasisEntry {
    id: String,
    degree: i64,
}

#[derive(Deserialize)]
struct CustomBracketEntry {
    left: String,
    right: String,
    terms: BTreeMap<String, String>,
}

fn parse_basis_id(s: &str) -> Result<BasisId> {
    if s == "t" {
        return Ok(BasisId::Central);
    }
    s.parse::<i64>().map(BasisId::Indexed).map_err(|_| {
        EngineError::Parse(format!(
            "invalid basis id {s:?} (expected integer or \"t\")"
        ))
    })
}

/// Load a custom algebra from its JSON description and validate it:
/// degree-additivity and closure of every bracket, antisymmetry by
/// construction, the Jacobi identity on all basis triples, and central
/// bookkeeping when a center is declared.
pub fn custom_from_json(json: &str) -> Result<GradedAlgebra> {
    let file: CustomAlgebraFile =
        serde_json::from_str(json).map_err(|e| EngineError::Parse(e.to_string()))?;
    let mut degrees = BTreeMap::new();
    for entry in &file.basis {
        let id = parse_basis_id(&entry.id)?;
        if id == BasisId::Central {
            if !file.has_center {
                return Err(EngineError::InvalidAlgebra(
                    "central element declared without has_center".into(),
                ));
            }
            if entry.degree != 0 {
                return Err(EngineError::InvalidAlgebra("deg(t) must be 0".into()));
            }
        }
        if degrees.insert(id, entry.degree).is_some() {
            return Err(EngineError::InvalidAlgebra(format!(
                "duplicate basis id {id}"
            )));
        }
    }
    if file.has_center && !degrees.contains_key(&BasisId::Central) {
        return Err(EngineError::InvalidAlgebra(
            "has_center set but no \"t\" in basis".into(),
        ));
    }
    let mut brackets = BTreeMap::new();
    for entry in &file.brackets {
        let left = parse_basis_id(&entry.left)?;
        let right = parse_basis_id(&entry.right)?;
        if left >= right {
            return Err(EngineError::InvalidAlgebra(format!(
                "bracket [{left},{right}] must be listed with left < right"
            )));
        }
        let mut lc = LinearCombination::zero();
        for (id_str, coeff_str) in &entry.terms {
            lc.add_term(parse_basis_id(id_str)?, rational::parse(coeff_str)?);
        }
        if brackets.insert((left, right), lc).is_some() {
            return Err(EngineError::InvalidAlgebra(format!(
                "duplicate bracket [{left},{right}]"
            )));
        }
    }
    let algebra = GradedAlgebra {
        name: file.name,
        kind: AlgebraKind::Custom(Arc::new(CustomAlgebra {
            has_center: file.has_center,
            degrees,
            brackets,
        })),
    };
    validate_custom(&algebra)?;
    Ok(algebra)
}

fn validate_custom(alg: &GradedAlgebra) -> Result<()> {
    let basis = alg.finite_basis().expect("custom algebras are finite");
    let AlgebraKind::Custom(custom) = &alg.kind else {
        unreachable!()
    };
    for (&(a, b), lc) in &custom.brackets {
        for (id, _) in lc.iter() {
            if !custom.degrees.contains_key(&id) {
                return Err(EngineError::InvalidAlgebra(format!(
                    "bracket [{a},{b}] leaves the declared basis (term {id})"
                )));
            }
            if alg.degree(id) != alg.degree(a) + alg.degree(b) {
                return Err(EngineError::InvalidAlgebra(format!(
                    "bracket [{a},{b}] is not degree-additive at term {id}"
                )));
            }
        }
        if alg.has_center() && (a == BasisId::Central || b == BasisId::Central) && !lc.is_zero() {
            return Err(EngineError::InvalidAlgebra(format!(
                "[{a},{b}] must vanish (central)"
            )));
        }
    }
    // Jacobi on all triples: [[a,b],c] + [[b,c],a] + [[c,a],b] = 0.
    for &a in &basis {
        for &b in &basis {
            for &c in &basis {
                let mut total = LinearCombination::zero();
                for (x, y, z) in [(a, b, c), (b, c, a), (c, a, b)] {
                    for (id, coeff) in alg.bracket(x, y).iter() {
                        let mut inner = alg.bracket(id, z);
                        inner.scale(coeff);
                        total.add(&inner);
                    }
                }
                if !total.is_zero() {
                    return Err(EngineError::InvalidAlgebra(format!(
                        "Jacobi identity fails on ({a},{b},{c})"
                    )));
                }
            }
        }
    }
    Ok(())
}

/// Which module a cohomology computation takes values in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ModuleKind {
    /// One-dimensional module in degree zero with zero action.
    Trivial,
    /// The algebra acting on itself through the bracket.
    Adjoint,
    /// The Virasoro algebra acting on the Witt basis through the projection;
    /// the central element acts as zero.
    WittQuotient,
}

impl ModuleKind {
    pub fn parse(s: &str) -> Result<ModuleKind> {
        match s {
            "trivial" => Ok(ModuleKind::Trivial),
            "adjoint" => Ok(ModuleKind::Adjoint),
            "witt_quotient" => Ok(ModuleKind::WittQuotient),
            _ => Err(EngineError::Parse(format!("unknown module kind {s:?}"))),
        }
    }
}

/// A graded module over a graded Lie algebra, described by a degree function
/// on module basis ids and an action oracle. Module basis ids reuse
/// `BasisId`; the trivial module's unit is carried by `Indexed(0)`.
#[derive(Clone, Debug)]
pub struct GradedModule {
    name: String,
    kind: ModuleKind,
    algebra: GradedAlgebra,
}

/// Build one of the supported modules over `alg`. `witt_quotient` is only
/// valid over the Virasoro algebra.
pub fn module_of(alg: &GradedAlgebra, kind: ModuleKind) -> Result<GradedModule> {
    if kind == ModuleKind::WittQuotient && !alg.is_virasoro() {
        return Err(EngineError::Unsupported(
            "witt_quotient module requires the Virasoro algebra".into(),
        ));
    }
    let name = match kind {
        ModuleKind::Trivial => "trivial",
        ModuleKind::Adjoint => "adjoint",
        ModuleKind::WittQuotient => "witt_quotient",
    };
    Ok(GradedModule {
        name: name.into(),
        kind,
        algebra: alg.clone(),
    })
}

impl GradedModule {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> ModuleKind {
        self.kind
    }

    pub fn algebra(&self) -> &GradedAlgebra {
        &self.algebra
    }

    pub fn degree_of(&self, v: BasisId) -> i64 {
        match self.kind {
            ModuleKind::Trivial => 0,
            ModuleKind::Adjoint => self.algebra.degree(v),
            ModuleKind::WittQuotient => v.index().unwrap_or(0),
        }
    }

    /// The action oracle `a . v` over the module basis.
    pub fn action(&self, a: BasisId, v: BasisId) -> LinearCombination {
        match self.kind {
            ModuleKind::Trivial => LinearCombination::zero(),
            ModuleKind::Adjoint => self.algebra.bracket(a, v),
            ModuleKind::WittQuotient => match (a, v) {
                (BasisId::Central, _) => LinearCombination::zero(),
                (BasisId::Indexed(n), BasisId::Indexed(m)) => {
                    LinearCombination::single(BasisId::Indexed(n + m), rational::int(m - n))
                }
                (_, BasisId::Central) => panic!("central element is not a quotient-module id"),
            },
        }
    }

    /// Module basis elements of the given degree, in canonical order. This
    /// enumerates the full (unwindowed) module: cochain values are not
    /// truncated, only cochain arguments are.
    pub fn basis_of_degree(&self, n: i64) -> Vec<BasisId> {
        match self.kind {
            ModuleKind::Trivial => {
                if n == 0 {
                    vec![BasisId::Indexed(0)]
                } else {
                    vec![]
                }
            }
            ModuleKind::Adjoint => match self.algebra.finite_basis() {
                Some(basis) => basis
                    .into_iter()
                    .filter(|&id| self.algebra.degree(id) == n)
                    .collect(),
                None => {
                    let mut out = vec![BasisId::Indexed(n)];
                    if self.algebra.has_center() && n == 0 {
                        out.push(BasisId::Central);
                    }
                    out
                }
            },
            ModuleKind::WittQuotient => vec![BasisId::Indexed(n)],
        }
    }

    /// Full module basis for finite modules; `None` when infinite.
    pub fn finite_basis(&self) -> Option<Vec<BasisId>> {
        match self.kind {
            ModuleKind::Trivial => Some(vec![BasisId::Indexed(0)]),
            ModuleKind::Adjoint => self.algebra.finite_basis(),
            ModuleKind::WittQuotient => None,
        }
    }

    /// Human-readable name of a module basis element.
    pub fn render_target(&self, v: BasisId) -> String {
        match self.kind {
            ModuleKind::Trivial => "1".into(),
            _ => v.to_string(),
        }
    }
}
