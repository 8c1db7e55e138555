//! Finite-window cocycle/coboundary systems and stabilized cohomology
//! dimensions.
//!
//! The infinite complex is truncated with a three-radius scheme: cocycle
//! constraints are imposed on tuples with indices in `[-r, r]`, cochain
//! coefficients live on tuples within `[-2r, 2r]`, and coboundary generators
//! are drawn from source tuples within `[-4r, 4r]`. Pairwise index sums of
//! inner tuples stay inside the variable window, so no constraint is ever
//! dropped for undefinedness, and every coboundary generator restricted to
//! the variable window satisfies the constraint rows exactly. Dimensions are
//! reported on the projection to the inner `[-r, r]` coordinates: rim
//! cochains are constrained by conditions the window cannot see, so the raw
//! kernel dimension overcounts, while the inner projection stabilizes as the
//! radius grows.

use std::collections::HashMap;
use std::time::Instant;

use num_traits::Zero;

use crate::algebra::{BasisId, GradedAlgebra, GradedModule};
use crate::cochain::{combinations, delta_row, tuple_string};
use crate::error::EngineError;
use crate::linalg::{Echelon, SparseMatrix, SparseVec};
use crate::rational::Rational;
use crate::Result;

/// The three nested radii of a window: constraints at `r`, cochain variables
/// at `2r`, coboundary sources at `4r`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct WindowSpec {
    constraint_radius: i64,
}

impl WindowSpec {
    pub fn new(constraint_radius: i64) -> Self {
        assert!(constraint_radius >= 0, "negative constraint radius");
        WindowSpec { constraint_radius }
    }

    pub fn constraint_radius(&self) -> i64 {
        self.constraint_radius
    }

    pub fn variable_radius(&self) -> i64 {
        2 * self.constraint_radius
    }

    pub fn generator_radius(&self) -> i64 {
        4 * self.constraint_radius
    }
}

/// Per-(q, d, r) dimension report.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WindowReport {
    pub algebra: String,
    pub module: String,
    pub q: usize,
    pub d: i64,
    pub r: i64,
    pub dim_projected_cocycles: usize,
    pub dim_projected_coboundaries: usize,
    pub h: usize,
    pub constraint_rows: usize,
    pub coefficient_cols: usize,
    pub elapsed_ms: u64,
}

/// A cochain coefficient: (strictly sorted tuple, module target).
pub type CoeffKey = (Vec<BasisId>, BasisId);

pub fn coeff_key_string(key: &CoeffKey) -> String {
    format!("({})->{}", tuple_string(&key.0), key.1)
}

/// Deterministically ordered coefficient columns for arity-q degree-d
/// cochains on a window.
struct ColumnSpace {
    keys: Vec<CoeffKey>,
    index: HashMap<CoeffKey, usize>,
}

impl ColumnSpace {
    fn build(alg: &GradedAlgebra, module: &GradedModule, q: usize, d: i64, radius: i64) -> Self {
        let ids = alg.basis_in_window(radius);
        let mut keys = Vec::new();
        for tuple in combinations(&ids, q) {
            let degree: i64 = tuple.iter().map(|&id| alg.degree(id)).sum::<i64>() + d;
            for target in module.basis_of_degree(degree) {
                keys.push((tuple.clone(), target));
            }
        }
        let index = keys
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, k)| (k, i))
            .collect();
        ColumnSpace { keys, index }
    }

    fn len(&self) -> usize {
        self.keys.len()
    }
}

/// Assembled cocycle system: one row per (inner tuple, module target), one
/// column per cochain coefficient on the variable window.
pub struct CocycleSystem {
    pub col_keys: Vec<CoeffKey>,
    pub row_keys: Vec<CoeffKey>,
    /// Sparse rows in column-index form, aligned with `row_keys`.
    pub rows: Vec<Vec<(usize, Rational)>>,
}

impl CocycleSystem {
    pub fn to_matrix(&self) -> SparseMatrix {
        let mut m = SparseMatrix::new(self.rows.len(), self.col_keys.len());
        for (r, row) in self.rows.iter().enumerate() {
            for (c, v) in row {
                m.add_to(r, *c, v);
            }
        }
        m
    }
}

fn build_cocycle_system(
    alg: &GradedAlgebra,
    module: &GradedModule,
    q: usize,
    d: i64,
    w: WindowSpec,
) -> Result<CocycleSystem> {
    let columns = ColumnSpace::build(alg, module, q, d, w.variable_radius());
    let inner_ids = alg.basis_in_window(w.constraint_radius());
    let mut row_keys = Vec::new();
    let mut rows = Vec::new();
    for tuple in combinations(&inner_ids, q + 1) {
        let degree: i64 = tuple.iter().map(|&id| alg.degree(id)).sum::<i64>() + d;
        for target in module.basis_of_degree(degree) {
            let mut row = Vec::new();
            for (key, coeff) in delta_row(alg, module, d, &tuple, target) {
                match columns.index.get(&key) {
                    Some(&c) => row.push((c, coeff)),
                    None => {
                        return Err(EngineError::UndefinedReference(coeff_key_string(&key)));
                    }
                }
            }
            row_keys.push((tuple.clone(), target));
            rows.push(row);
        }
    }
    Ok(CocycleSystem {
        col_keys: columns.keys,
        row_keys,
        rows,
    })
}

/// The coefficient keys of the inner `[-r, r]` projection, in projection
/// order. Equals the variable-window column list filtered to inner tuples;
/// both enumerations are lexicographic, so the orders agree.
pub fn inner_coefficient_keys(
    alg: &GradedAlgebra,
    module: &GradedModule,
    q: usize,
    d: i64,
    w: WindowSpec,
) -> Vec<CoeffKey> {
    ColumnSpace::build(alg, module, q, d, w.constraint_radius()).keys
}

/// The coefficient keys of the variable-window column space, in the column
/// order used by `assemble_cocycle_system` and the coboundary generators.
pub fn cocycle_column_keys(
    alg: &GradedAlgebra,
    module: &GradedModule,
    q: usize,
    d: i64,
    w: WindowSpec,
) -> Vec<CoeffKey> {
    ColumnSpace::build(alg, module, q, d, w.variable_radius()).keys
}

/// The cocycle system `delta_q psi = 0` as a sparse matrix: columns are the
/// canonical q-tuple coefficients on the variable window, rows the cocycle
/// conditions at inner tuples.
pub fn assemble_cocycle_system(
    alg: &GradedAlgebra,
    module: &GradedModule,
    q: usize,
    d: i64,
    w: WindowSpec,
) -> Result<SparseMatrix> {
    Ok(build_cocycle_system(alg, module, q, d, w)?.to_matrix())
}

fn build_coboundary_generators(
    alg: &GradedAlgebra,
    module: &GradedModule,
    q: usize,
    d: i64,
    w: WindowSpec,
    columns: &ColumnSpace,
) -> Result<(Vec<CoeffKey>, Vec<SparseVec>)> {
    if q == 0 {
        return Err(EngineError::Unsupported(
            "coboundary generators need q >= 1".into(),
        ));
    }
    let source_ids = alg.basis_in_window(w.generator_radius());
    let mut gen_keys = Vec::new();
    let mut gen_index: HashMap<CoeffKey, usize> = HashMap::new();
    for tuple in combinations(&source_ids, q - 1) {
        let degree: i64 = tuple.iter().map(|&id| alg.degree(id)).sum::<i64>() + d;
        for target in module.basis_of_degree(degree) {
            let key = (tuple.clone(), target);
            gen_index.insert(key.clone(), gen_keys.len());
            gen_keys.push(key);
        }
    }
    let mut generators = vec![SparseVec::new(columns.len()); gen_keys.len()];
    // Column-by-column expansion of delta_{q-1}: the sources referenced by a
    // window tuple all lie inside the generator radius (pairwise sums of
    // variable-window indices), so this scatter reaches every generator that
    // is visible on the window.
    for (col, (tuple, target)) in columns.keys.iter().enumerate() {
        for (key, coeff) in delta_row(alg, module, d, tuple, *target) {
            match gen_index.get(&key) {
                Some(&g) => generators[g].add_to(col, &coeff),
                None => {
                    return Err(EngineError::UndefinedReference(coeff_key_string(&key)));
                }
            }
        }
    }
    Ok((gen_keys, generators))
}

/// One coboundary generator per canonical (q-1)-tuple coefficient with
/// indices in `[-4r, 4r]`: the coefficient vector of `delta_{q-1}` of that
/// basis cochain, restricted to the variable window. Generators of far
/// sources restrict to zero vectors and are included for completeness.
pub fn assemble_coboundary_generators(
    alg: &GradedAlgebra,
    module: &GradedModule,
    q: usize,
    d: i64,
    w: WindowSpec,
) -> Result<Vec<SparseVec>> {
    let columns = ColumnSpace::build(alg, module, q, d, w.variable_radius());
    Ok(build_coboundary_generators(alg, module, q, d, w, &columns)?.1)
}

/// Everything `windowed_h` computes, including the reduced projected
/// coboundary basis used by generator-class checks.
pub struct WindowDetails {
    pub report: WindowReport,
    /// Coefficient keys of the inner `[-r, r]` projection, in column order.
    pub inner_keys: Vec<CoeffKey>,
    /// Row basis of the projected coboundary space over `inner_keys`.
    pub coboundary_basis: Vec<Vec<(usize, Rational)>>,
}

/// Windowed cohomology dimension h^q_(d) with full details.
pub fn windowed_details(
    alg: &GradedAlgebra,
    module: &GradedModule,
    q: usize,
    d: i64,
    w: WindowSpec,
) -> Result<WindowDetails> {
    let start = Instant::now();
    let system = build_cocycle_system(alg, module, q, d, w)?;
    let columns = ColumnSpace {
        index: system
            .col_keys
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, k)| (k, i))
            .collect(),
        keys: system.col_keys.clone(),
    };

    let generators = if q == 0 {
        Vec::new()
    } else {
        let (_, gens) = build_coboundary_generators(alg, module, q, d, w, &columns)?;
        gens
    };

    // Radii soundness: every generator restricted to the window must satisfy
    // every constraint row exactly (delta delta = 0 with all referenced
    // terms defined). This implies pi(B) is contained in pi(Z).
    let mut col_to_rows: HashMap<usize, Vec<(usize, Rational)>> = HashMap::new();
    for (r, row) in system.rows.iter().enumerate() {
        for (c, v) in row {
            col_to_rows.entry(*c).or_default().push((r, v.clone()));
        }
    }
    for (g, gen) in generators.iter().enumerate() {
        if gen.is_zero_vec() {
            continue;
        }
        let mut acc: HashMap<usize, Rational> = HashMap::new();
        for (col, value) in gen.iter() {
            if let Some(rows) = col_to_rows.get(&col) {
                for (row, m) in rows {
                    let entry = acc.entry(*row).or_insert_with(Rational::zero);
                    *entry += m * value;
                }
            }
        }
        if let Some((row, _)) = acc.iter().find(|(_, v)| !v.is_zero()) {
            return Err(EngineError::WindowInconsistency {
                generator: format!("generator {g}"),
                constraint: coeff_key_string(&system.row_keys[*row]),
            });
        }
    }

    // Inner projection coordinates: coefficients whose tuple lies within the
    // constraint radius.
    let r = w.constraint_radius();
    let is_inner = |key: &CoeffKey| {
        key.0
            .iter()
            .all(|id| id.index().is_none_or(|n| n.abs() <= r))
    };
    let inner_cols: Vec<usize> = (0..system.col_keys.len())
        .filter(|&c| is_inner(&system.col_keys[c]))
        .collect();
    let inner_keys: Vec<CoeffKey> = inner_cols
        .iter()
        .map(|&c| system.col_keys[c].clone())
        .collect();
    let inner_pos: HashMap<usize, usize> = inner_cols
        .iter()
        .enumerate()
        .map(|(i, &c)| (c, i))
        .collect();

    // dim pi(Z) = rank([M; E_inner]) - rank(M): stacking a unit row per inner
    // coordinate kills exactly the kernel vectors that vanish on the inner
    // window.
    let mut ech = Echelon::from_rows(&system.rows);
    let rank_m = ech.rank();
    let one = crate::rational::one();
    for &c in &inner_cols {
        ech.insert(&[(c, one.clone())]);
    }
    let dim_z_proj = ech.rank() - rank_m;

    // dim pi(B): rank of the generators projected to the inner coordinates.
    let projected: Vec<Vec<(usize, Rational)>> = generators
        .iter()
        .map(|gen| {
            gen.iter()
                .filter_map(|(c, v)| inner_pos.get(&c).map(|&p| (p, v.clone())))
                .collect::<Vec<_>>()
        })
        .filter(|row: &Vec<_>| !row.is_empty())
        .collect();
    let b_ech = Echelon::from_rows(&projected);
    let dim_b_proj = b_ech.rank();
    assert!(
        dim_z_proj >= dim_b_proj,
        "pi(B) escaped pi(Z) despite exact soundness check"
    );

    let report = WindowReport {
        algebra: alg.name().to_string(),
        module: module.name().to_string(),
        q,
        d,
        r,
        dim_projected_cocycles: dim_z_proj,
        dim_projected_coboundaries: dim_b_proj,
        h: dim_z_proj - dim_b_proj,
        constraint_rows: system.rows.len(),
        coefficient_cols: system.col_keys.len(),
        elapsed_ms: start.elapsed().as_millis() as u64,
    };
    Ok(WindowDetails {
        report,
        inner_keys,
        coboundary_basis: b_ech.rows_rational(),
    })
}

/// Windowed cohomology dimension: h = dim pi(Z) - dim pi(B) on the inner
/// projection.
pub fn windowed_h(
    alg: &GradedAlgebra,
    module: &GradedModule,
    q: usize,
    d: i64,
    w: WindowSpec,
) -> Result<WindowReport> {
    Ok(windowed_details(alg, module, q, d, w)?.report)
}

/// Stabilization verdict over an ascending radius schedule.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Stable(usize),
    Unstable,
}

pub struct ScanOutcome {
    pub reports: Vec<WindowReport>,
    pub verdict: Verdict,
}

/// Run `windowed_h` per radius; the verdict is "stable at v" iff the last
/// half (rounded up) of the reports agree on h. The threshold is a reporting
/// convention, not a theorem; callers get the full dimension-vs-radius
/// table regardless.
pub fn stabilization_scan(
    alg: &GradedAlgebra,
    module: &GradedModule,
    q: usize,
    d: i64,
    radii: &[i64],
) -> Result<ScanOutcome> {
    if radii.len() < 2 || radii.windows(2).any(|w| w[0] >= w[1]) {
        return Err(EngineError::Parse(
            "radii must be ascending with at least 2 entries".into(),
        ));
    }
    let reports: Vec<WindowReport> = radii
        .iter()
        .map(|&r| windowed_h(alg, module, q, d, WindowSpec::new(r)))
        .collect::<Result<_>>()?;
    Ok(ScanOutcome {
        verdict: scan_verdict(&reports),
        reports,
    })
}

/// Verdict for an already-computed ascending report sequence.
pub fn scan_verdict(reports: &[WindowReport]) -> Verdict {
    let tail = reports.len().div_ceil(2);
    let last = &reports[reports.len() - tail..];
    let h = last[0].h;
    if last.iter().all(|rep| rep.h == h) {
        Verdict::Stable(h)
    } else {
        Verdict::Unstable
    }
}

/// Exact dim H^q for a finite, bracket-closed algebra, computed on the full
/// complex without any windowing: dim C^q - rank(delta_q) - rank(delta_{q-1}).
pub fn full_cohomology(alg: &GradedAlgebra, module: &GradedModule, q: usize) -> Result<usize> {
    let basis = alg
        .finite_basis()
        .ok_or_else(|| EngineError::Unsupported("full_cohomology needs a finite algebra".into()))?;
    let module_basis = module
        .finite_basis()
        .ok_or_else(|| EngineError::Unsupported("full_cohomology needs a finite module".into()))?;

    let space = |arity: usize| -> Vec<CoeffKey> {
        let mut keys = Vec::new();
        for tuple in combinations(&basis, arity) {
            for &target in &module_basis {
                keys.push((tuple.clone(), target));
            }
        }
        keys
    };

    let delta_rank = |arity: usize| -> usize {
        // Rank of delta_arity : C^arity -> C^{arity+1} over the full bases.
        let cols = space(arity);
        let index: HashMap<CoeffKey, usize> = cols
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, k)| (k, i))
            .collect();
        let mut ech = Echelon::new();
        for tuple in combinations(&basis, arity + 1) {
            for &target in &module_basis {
                let mut row = Vec::new();
                for (key, coeff) in delta_row_full(alg, module, &tuple, target, &module_basis) {
                    row.push((index[&key], coeff));
                }
                ech.insert(&row);
            }
        }
        ech.rank()
    };

    let dim_cq = space(q).len();
    let rank_out = delta_rank(q);
    let rank_in = if q == 0 { 0 } else { delta_rank(q - 1) };
    Ok(dim_cq - rank_out - rank_in)
}

/// Coboundary expansion over a full finite module basis, without degree
/// bookkeeping; only used by the untruncated oracle.
fn delta_row_full(
    alg: &GradedAlgebra,
    module: &GradedModule,
    tuple: &[BasisId],
    target: BasisId,
    module_basis: &[BasisId],
) -> Vec<(CoeffKey, Rational)> {
    use crate::cochain::canonicalize;
    let mut acc: std::collections::BTreeMap<CoeffKey, Rational> = Default::default();
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
    for pi in 0..n {
        for pj in (pi + 1)..n {
            let sign = if (pi + pj) % 2 == 0 { -1i64 } else { 1 };
            let lc = alg.bracket(tuple[pi], tuple[pj]);
            let mut rest: Vec<BasisId> = Vec::new();
            for (p, &id) in tuple.iter().enumerate() {
                if p != pi && p != pj {
                    rest.push(id);
                }
            }
            for (b, coeff) in lc.iter() {
                let mut raw = vec![b];
                raw.extend_from_slice(&rest);
                let ts = canonicalize(&raw);
                if ts.sign != 0 {
                    add(
                        (ts.tuple, target),
                        crate::rational::int(sign * ts.sign as i64) * coeff,
                    );
                }
            }
        }
    }
    for pi in 0..n {
        let sign = if pi % 2 == 0 { -1i64 } else { 1 };
        let mut rest: Vec<BasisId> = Vec::new();
        for (p, &id) in tuple.iter().enumerate() {
            if p != pi {
                rest.push(id);
            }
        }
        for &v in module_basis {
            let c = module.action(tuple[pi], v).coefficient(target);
            if !c.is_zero() {
                add((rest.clone(), v), crate::rational::int(sign) * c);
            }
        }
    }
    acc.into_iter().collect()
}
