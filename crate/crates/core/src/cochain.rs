//! Homogeneous alternating q-cochains and their coboundary operator.
//!
//! A degree-d q-cochain sends a tuple of homogeneous algebra elements of
//! total degree n to a module element of degree n + d. Coefficients are
//! stored on strictly sorted tuples only (alternating canonical form), keyed
//! by the module basis element they multiply. The coboundary operator is
//!
//! ```text
//! (delta_q psi)(x_1,...,x_{q+1}) =
//!     sum_{i<j} (-1)^{i+j+1} psi([x_i,x_j], x_1,...,^x_i,...,^x_j,...,x_{q+1})
//!   + sum_i    (-1)^i       x_i . psi(x_1,...,^x_i,...,x_{q+1})
//! ```
//!
//! (1-based indices, hats mark omitted arguments) and is the single source of
//! truth for every expansion in the engine; closed-form per-arity formulas are
//! only used as derived test fixtures.

use std::collections::BTreeMap;

use num_traits::Zero;
use serde_json::json;

use crate::algebra::{BasisId, GradedAlgebra, GradedModule, LinearCombination};
use crate::error::EngineError;
use crate::rational::{self, Rational};
use crate::Result;

/// A sorted tuple together with the sign of the permutation that sorted it;
/// sign 0 iff the tuple has a repeated entry.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TupleSign {
    pub tuple: Vec<BasisId>,
    pub sign: i8,
}

/// Sort a tuple of basis ids, tracking the permutation sign.
pub fn canonicalize(tuple: &[BasisId]) -> TupleSign {
    let mut sorted = tuple.to_vec();
    let mut sign = 1i8;
    // Insertion sort with swap counting; tuples are tiny.
    for i in 1..sorted.len() {
        let mut j = i;
        while j > 0 && sorted[j - 1] > sorted[j] {
            sorted.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
    }
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return TupleSign {
            tuple: sorted,
            sign: 0,
        };
    }
    TupleSign {
        tuple: sorted,
        sign,
    }
}

/// Render a tuple as `"i,j,k"` with `t` for the central element.
pub fn tuple_string(tuple: &[BasisId]) -> String {
    tuple
        .iter()
        .map(|id| match id {
            BasisId::Indexed(n) => n.to_string(),
            BasisId::Central => "t".to_string(),
        })
        .collect::<Vec<_>>()
        .join(",")
}

fn parse_tuple(s: &str) -> Result<Vec<BasisId>> {
    if s.is_empty() {
        return Ok(vec![]);
    }
    s.split(',')
        .map(|part| {
            let part = part.trim();
            if part == "t" {
                Ok(BasisId::Central)
            } else {
                part.parse::<i64>()
                    .map(BasisId::Indexed)
                    .map_err(|_| EngineError::Parse(format!("invalid tuple component {part:?}")))
            }
        })
        .collect()
}

/// Where a cochain's coefficients are defined.
///
/// `Global` cochains are genuine finitely-supported cochains on the whole
/// algebra: an absent coefficient is zero everywhere. `Window(R)` cochains
/// are truncations: coefficients are only defined on tuples whose indices
/// all lie in `[-R, R]`, and referencing anything outside is an error.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Domain {
    Global,
    Window(i64),
}

impl Domain {
    pub fn contains(&self, tuple: &[BasisId]) -> bool {
        match self {
            Domain::Global => true,
            Domain::Window(r) => tuple
                .iter()
                .all(|id| id.index().is_none_or(|n| n.abs() <= *r)),
        }
    }
}

type CoeffKey = (Vec<BasisId>, BasisId);

/// Degree-d, arity-q alternating cochain with values in a graded module.
#[derive(Clone, Debug)]
pub struct HomogeneousCochain {
    arity: usize,
    degree: i64,
    module: GradedModule,
    domain: Domain,
    coeffs: BTreeMap<CoeffKey, Rational>,
}

impl HomogeneousCochain {
    pub fn new(arity: usize, degree: i64, module: GradedModule, domain: Domain) -> Self {
        HomogeneousCochain {
            arity,
            degree,
            module,
            domain,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn degree(&self) -> i64 {
        self.degree
    }

    pub fn module(&self) -> &GradedModule {
        &self.module
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn support_len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&CoeffKey, &Rational)> {
        self.coeffs.iter()
    }

    fn tuple_degree(&self, tuple: &[BasisId]) -> i64 {
        tuple
            .iter()
            .map(|&id| self.module.algebra().degree(id))
            .sum()
    }

    /// Add `value` to the coefficient at `tuple` (any order) toward `target`.
    /// The target's module degree must equal the tuple degree plus d; for the
    /// trivial module this enforces that coefficients exist only on tuples of
    /// total degree -d.
    pub fn insert(&mut self, tuple: &[BasisId], target: BasisId, value: Rational) -> Result<()> {
        if tuple.len() != self.arity {
            return Err(EngineError::Parse(format!(
                "tuple arity {} does not match cochain arity {}",
                tuple.len(),
                self.arity
            )));
        }
        let ts = canonicalize(tuple);
        if ts.sign == 0 || value.is_zero() {
            return Ok(());
        }
        if !self.domain.contains(&ts.tuple) {
            return Err(EngineError::UndefinedReference(tuple_string(&ts.tuple)));
        }
        let expected = self.tuple_degree(&ts.tuple) + self.degree;
        if self.module.degree_of(target) != expected {
            return Err(EngineError::Parse(format!(
                "target {target} has degree {}, expected {} at tuple ({})",
                self.module.degree_of(target),
                expected,
                tuple_string(&ts.tuple)
            )));
        }
        let signed = if ts.sign < 0 { -value } else { value };
        let key = (ts.tuple, target);
        let entry = self.coeffs.remove(&key).unwrap_or_else(Rational::zero) + signed;
        if !entry.is_zero() {
            self.coeffs.insert(key, entry);
        }
        Ok(())
    }

    /// Insert toward the unique module target at the tuple's degree; errors
    /// when no target exists or when the target is ambiguous (e.g. the
    /// degree-zero component of the Virasoro adjoint module).
    pub fn insert_scalar(&mut self, tuple: &[BasisId], value: Rational) -> Result<()> {
        let d = self.tuple_degree(tuple) + self.degree;
        let targets = self.module.basis_of_degree(d);
        match targets.as_slice() {
            [single] => self.insert(tuple, *single, value),
            [] => Err(EngineError::Parse(format!(
                "no module target of degree {d} at tuple ({})",
                tuple_string(tuple)
            ))),
            _ => Err(EngineError::Parse(format!(
                "ambiguous module target of degree {d}; name it explicitly"
            ))),
        }
    }

    /// Raw coefficient at a strictly sorted tuple. `None` when the tuple is
    /// outside the stored domain.
    pub fn coefficient(&self, tuple: &[BasisId], target: BasisId) -> Option<Rational> {
        debug_assert!(
            tuple.windows(2).all(|w| w[0] < w[1]),
            "tuple must be strictly sorted"
        );
        if !self.domain.contains(tuple) {
            return None;
        }
        Some(
            self.coeffs
                .get(&(tuple.to_vec(), target))
                .cloned()
                .unwrap_or_else(Rational::zero),
        )
    }

    /// Sign-adjusted value on an arbitrary tuple, as a combination of module
    /// basis elements of the matching degree.
    pub fn evaluate(&self, tuple: &[BasisId]) -> Result<LinearCombination> {
        assert_eq!(tuple.len(), self.arity, "tuple arity mismatch");
        let ts = canonicalize(tuple);
        if ts.sign == 0 {
            return Ok(LinearCombination::zero());
        }
        if !self.domain.contains(&ts.tuple) {
            return Err(EngineError::UndefinedReference(tuple_string(&ts.tuple)));
        }
        let degree = self.tuple_degree(&ts.tuple) + self.degree;
        let mut out = LinearCombination::zero();
        let sign = rational::int(ts.sign as i64);
        for target in self.module.basis_of_degree(degree) {
            if let Some(c) = self.coeffs.get(&(ts.tuple.clone(), target)) {
                out.add_term(target, c * &sign);
            }
        }
        Ok(out)
    }

    /// The coboundary coefficient of this cochain at one sorted tuple, or an
    /// `UndefinedReference` error when the expansion leaves the stored
    /// domain.
    pub fn differential_value(
        &self,
        alg: &GradedAlgebra,
        tuple: &[BasisId],
    ) -> Result<LinearCombination> {
        assert_eq!(
            tuple.len(),
            self.arity + 1,
            "differential tuple arity mismatch"
        );
        debug_assert!(tuple.windows(2).all(|w| w[0] < w[1]));
        let target_degree = self.tuple_degree(tuple) + self.degree;
        let mut out = LinearCombination::zero();
        for target in self.module.basis_of_degree(target_degree) {
            let row = delta_row(alg, &self.module, self.degree, tuple, target);
            let mut acc = Rational::zero();
            for ((ref_tuple, ref_target), coeff) in row {
                let stored = self
                    .coefficient(&ref_tuple, ref_target)
                    .ok_or_else(|| EngineError::UndefinedReference(tuple_string(&ref_tuple)))?;
                if !stored.is_zero() {
                    acc += coeff * stored;
                }
            }
            out.add_term(target, acc);
        }
        Ok(out)
    }

    /// Materialize the coboundary on all sorted (q+1)-tuples of the window
    /// with the given radius. Fails with `UndefinedReference` when the
    /// expansion needs a source coefficient outside this cochain's domain.
    pub fn differential(&self, alg: &GradedAlgebra, out_radius: i64) -> Result<HomogeneousCochain> {
        let mut out = HomogeneousCochain::new(
            self.arity + 1,
            self.degree,
            self.module.clone(),
            Domain::Window(out_radius),
        );
        let ids = alg.basis_in_window(out_radius);
        for tuple in combinations(&ids, self.arity + 1) {
            let value = self.differential_value(alg, &tuple)?;
            for (target, coeff) in value.iter() {
                out.insert(&tuple, target, coeff.clone())?;
            }
        }
        Ok(out)
    }

    /// Serialize as `{"tuple[|t]": "p/q"}` coefficient map plus shape
    /// metadata. The `|t` suffix marks coefficients toward the central
    /// element.
    pub fn to_json(&self) -> serde_json::Value {
        let mut coeffs = serde_json::Map::new();
        for ((tuple, target), value) in &self.coeffs {
            let mut key = tuple_string(tuple);
            if *target == BasisId::Central {
                key.push_str("|t");
            }
            coeffs.insert(key, json!(rational::format(value)));
        }
        json!({
            "arity": self.arity,
            "degree": self.degree,
            "algebra": self.module.algebra().name(),
            "module": self.module.name(),
            "window": match self.domain {
                Domain::Global => serde_json::Value::Null,
                Domain::Window(r) => json!(r),
            },
            "coefficients": serde_json::Value::Object(coeffs),
        })
    }

    /// Rebuild a cochain serialized by `to_json`; the module is supplied by
    /// the caller since algebra objects are not serialized.
    pub fn from_json(value: &serde_json::Value, module: GradedModule) -> Result<Self> {
        let get = |k: &str| {
            value
                .get(k)
                .ok_or_else(|| EngineError::Parse(format!("missing field {k:?}")))
        };
        let arity = get("arity")?
            .as_u64()
            .ok_or_else(|| EngineError::Parse("arity must be an integer".into()))?
            as usize;
        let degree = get("degree")?
            .as_i64()
            .ok_or_else(|| EngineError::Parse("degree must be an integer".into()))?;
        let domain = match get("window")? {
            serde_json::Value::Null => Domain::Global,
            v => Domain::Window(
                v.as_i64()
                    .ok_or_else(|| EngineError::Parse("window must be an integer".into()))?,
            ),
        };
        let mut out = HomogeneousCochain::new(arity, degree, module, domain);
        let coeffs = get("coefficients")?
            .as_object()
            .ok_or_else(|| EngineError::Parse("coefficients must be an object".into()))?;
        for (key, val) in coeffs {
            let (tuple_part, central_target) = match key.strip_suffix("|t") {
                Some(prefix) => (prefix, true),
                None => (key.as_str(), false),
            };
            let tuple = parse_tuple(tuple_part)?;
            let coeff = rational::parse(
                val.as_str()
                    .ok_or_else(|| EngineError::Parse("coefficient must be a string".into()))?,
            )?;
            if central_target {
                out.insert(&tuple, BasisId::Central, coeff)?;
            } else {
                let d = out.tuple_degree(&tuple) + degree;
                let target = out
                    .module
                    .basis_of_degree(d)
                    .into_iter()
                    .find(|&t| t != BasisId::Central)
                    .ok_or_else(|| {
                        EngineError::Parse(format!("no module target of degree {d} for {key:?}"))
                    })?;
                out.insert(&tuple, target, coeff)?;
            }
        }
        Ok(out)
    }
}

/// Split a finitely-supported (not necessarily homogeneous) coefficient
/// table into its homogeneous parts, keyed by degree. The parts sum back to
/// the input.
pub fn decompose(
    arity: usize,
    module: &GradedModule,
    entries: impl IntoIterator<Item = (Vec<BasisId>, BasisId, Rational)>,
) -> Result<BTreeMap<i64, HomogeneousCochain>> {
    let mut out: BTreeMap<i64, HomogeneousCochain> = BTreeMap::new();
    for (tuple, target, value) in entries {
        if value.is_zero() {
            continue;
        }
        let tuple_degree: i64 = tuple.iter().map(|&id| module.algebra().degree(id)).sum();
        let d = module.degree_of(target) - tuple_degree;
        out.entry(d)
            .or_insert_with(|| HomogeneousCochain::new(arity, d, module.clone(), Domain::Global))
            .insert(&tuple, target, value)?;
    }
    out.retain(|_, c| !c.is_zero());
    Ok(out)
}

/// One scalar row of the coboundary operator: the linear functional
/// expressing the `target` component of `(delta psi)(tuple)` in the
/// coefficients of `psi`. Keys are (sorted source tuple, source target);
/// entries with net coefficient zero are dropped.
pub fn delta_row(
    alg: &GradedAlgebra,
    module: &GradedModule,
    degree: i64,
    tuple: &[BasisId],
    target: BasisId,
) -> Vec<(CoeffKey, Rational)> {
    let mut acc: BTreeMap<CoeffKey, Rational> = BTreeMap::new();
    let mut add = |key: CoeffKey, value: Rational| {
        if value.is_zero() {
            return;
        }
        let entry = acc.remove(&key).unwrap_or_else(Rational::zero) + value;
        if !entry.is_zero() {
            acc.insert(key, entry);
        }
    };
    let n = tuple.len();
    // Bracket terms: (-1)^{i+j+1} psi([x_i,x_j], rest) with 1-based i < j.
    for pi in 0..n {
        for pj in (pi + 1)..n {
            let sign = if (pi + pj) % 2 == 0 { -1i64 } else { 1 };
            let lc = alg.bracket(tuple[pi], tuple[pj]);
            if lc.is_zero() {
                continue;
            }
            let mut rest: Vec<BasisId> = Vec::with_capacity(n - 1);
            for (p, &id) in tuple.iter().enumerate() {
                if p != pi && p != pj {
                    rest.push(id);
                }
            }
            for (b, coeff) in lc.iter() {
                let mut raw = Vec::with_capacity(n - 1);
                raw.push(b);
                raw.extend_from_slice(&rest);
                let ts = canonicalize(&raw);
                if ts.sign == 0 {
                    continue;
                }
                let total = rational::int(sign * ts.sign as i64) * coeff;
                add((ts.tuple, target), total);
            }
        }
    }
    // Module terms: (-1)^i x_i . psi(rest), 1-based i.
    for pi in 0..n {
        let sign = if pi % 2 == 0 { -1i64 } else { 1 };
        let mut rest: Vec<BasisId> = Vec::with_capacity(n - 1);
        for (p, &id) in tuple.iter().enumerate() {
            if p != pi {
                rest.push(id);
            }
        }
        let rest_degree: i64 = rest
            .iter()
            .map(|&id| module.algebra().degree(id))
            .sum::<i64>()
            + degree;
        for v in module.basis_of_degree(rest_degree) {
            let action = module.action(tuple[pi], v);
            let c = action.coefficient(target);
            if !c.is_zero() {
                add((rest.clone(), v), rational::int(sign) * c);
            }
        }
    }
    acc.into_iter().collect()
}

/// Sorted k-element combinations of `ids` (which must be sorted), in
/// lexicographic order.
pub fn combinations(ids: &[BasisId], k: usize) -> Vec<Vec<BasisId>> {
    let mut out = Vec::new();
    if k > ids.len() {
        return out;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.iter().map(|&i| ids[i]).collect());
        // Advance the combination.
        let mut pos = k;
        loop {
            if pos == 0 {
                return out;
            }
            pos -= 1;
            if idx[pos] != pos + ids.len() - k {
                break;
            }
        }
        if idx[pos] == pos + ids.len() - k {
            return out;
        }
        idx[pos] += 1;
        for p in (pos + 1)..k {
            idx[p] = idx[p - 1] + 1;
        }
    }
}
