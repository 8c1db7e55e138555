//! Closed-form distinguished cocycles with machine certification: the
//! Godbillon-Vey 3-cocycle with trivial coefficients and the
//! central-extension 2-cocycle, together with cocycle and non-coboundary
//! certificates against the windowed engine.

use num_traits::Zero;

use crate::algebra::{module_of, BasisId, GradedAlgebra, ModuleKind};
use crate::cochain::{combinations, tuple_string, Domain, HomogeneousCochain};
use crate::error::EngineError;
use crate::linalg::{solve, SparseMatrix, SparseVec};
use crate::rational::{self, Rational};
use crate::window::{windowed_details, WindowSpec};
use crate::Result;

fn e(n: i64) -> BasisId {
    BasisId::Indexed(n)
}

/// The Godbillon-Vey 3-cocycle with trivial coefficients, up to the free
/// normalization constant A != 0:
/// GV(e_n, e_m, e_k) = A (m-n)(2m+n)(m+2n) when k = -(n+m), zero otherwise.
#[derive(Clone, Debug)]
pub struct GVCocycle {
    a: Rational,
}

impl Default for GVCocycle {
    fn default() -> Self {
        GVCocycle { a: rational::one() }
    }
}

impl GVCocycle {
    pub fn new(a: Rational) -> Result<Self> {
        if a.is_zero() {
            return Err(EngineError::Parse(
                "normalization constant A must be nonzero".into(),
            ));
        }
        Ok(GVCocycle { a })
    }

    pub fn a(&self) -> &Rational {
        &self.a
    }

    /// GV(e_n, e_m, e_k). The polynomial factor vanishes on repeated
    /// arguments and changes sign under every transposition, so this is
    /// fully alternating as written.
    pub fn value(&self, n: i64, m: i64, k: i64) -> Rational {
        if k != -(n + m) {
            return Rational::zero();
        }
        &self.a * rational::int((m - n) * (2 * m + n) * (m + 2 * n))
    }

    /// Materialize as a degree-zero 3-cochain with trivial coefficients on a
    /// window. On an algebra with a center, every tuple containing the
    /// central element gets the value zero (the trivial extension).
    pub fn as_cochain(&self, alg: &GradedAlgebra, radius: i64) -> Result<HomogeneousCochain> {
        let module = module_of(alg, ModuleKind::Trivial)?;
        let unit = module.basis_of_degree(0)[0];
        let mut c = HomogeneousCochain::new(3, 0, module, Domain::Window(radius));
        for i in -radius..=radius {
            for j in (i + 1)..=radius {
                let k = -(i + j);
                if k <= j || k > radius {
                    continue;
                }
                c.insert(&[e(i), e(j), e(k)], unit, self.value(i, j, k))?;
            }
        }
        Ok(c)
    }
}

/// Outcome of a cocycle certification: every inner-window constraint is
/// evaluated exactly; the first failing tuple is reported.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CocycleCertificate {
    Cocycle { constraints_checked: usize },
    Fails { tuple: String },
}

impl CocycleCertificate {
    pub fn is_cocycle(&self) -> bool {
        matches!(self, CocycleCertificate::Cocycle { .. })
    }
}

/// Evaluate every cocycle constraint of `c` on tuples with indices in
/// `[-radius, radius]`. The cochain's window must cover twice the radius so
/// that no constraint reference is undefined.
pub fn certify_cocycle(
    c: &HomogeneousCochain,
    alg: &GradedAlgebra,
    radius: i64,
) -> Result<CocycleCertificate> {
    let ids = alg.basis_in_window(radius);
    let mut checked = 0;
    for tuple in combinations(&ids, c.arity() + 1) {
        let v = c.differential_value(alg, &tuple)?;
        checked += 1;
        if !v.is_zero() {
            return Ok(CocycleCertificate::Fails {
                tuple: tuple_string(&tuple),
            });
        }
    }
    Ok(CocycleCertificate::Cocycle {
        constraints_checked: checked,
    })
}

/// Non-coboundary certificate: the inner restriction of `c` is tested for
/// membership in the span of the projected coboundary generators by exact
/// linear solving.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NonCoboundaryCertificate {
    /// True when no generator combination reproduces the inner restriction.
    pub is_noncoboundary: bool,
    /// The functional argument at (e_{-1}, e_0, e_1) for 3-cochains: every
    /// coboundary generator has coordinate zero there while the candidate
    /// does not. `None` when the coordinate does not exist in the window.
    pub functional_check: Option<bool>,
}

/// Decide whether `c` (restricted to the inner window) is a coboundary by
/// solving the generator system exactly.
pub fn certify_noncoboundary(
    c: &HomogeneousCochain,
    alg: &GradedAlgebra,
    radius: i64,
) -> Result<NonCoboundaryCertificate> {
    let module = c.module().clone();
    let spec = WindowSpec::new(radius);
    let details = windowed_details(alg, &module, c.arity(), c.degree(), spec)?;
    let inner_index: std::collections::HashMap<_, usize> = details
        .inner_keys
        .iter()
        .cloned()
        .enumerate()
        .map(|(i, k)| (k, i))
        .collect();

    // The raw generator system: one column per coboundary generator, one row
    // per inner coordinate.
    let gens =
        crate::window::assemble_coboundary_generators(alg, &module, c.arity(), c.degree(), spec)?;
    let col_keys = crate::window::cocycle_column_keys(alg, &module, c.arity(), c.degree(), spec);
    let mut m = SparseMatrix::new(details.inner_keys.len(), gens.len());
    for (g, gen) in gens.iter().enumerate() {
        for (col, value) in gen.iter() {
            if let Some(&row) = inner_index.get(&col_keys[col]) {
                m.add_to(row, g, value);
            }
        }
    }
    let mut b = SparseVec::new(details.inner_keys.len());
    for (key, row) in inner_index.iter() {
        let coeff = c
            .coefficient(&key.0, key.1)
            .ok_or_else(|| EngineError::UndefinedReference(tuple_string(&key.0)))?;
        b.set(*row, coeff);
    }
    let is_noncoboundary = solve(&m, &b).is_none();

    // Functional argument on the distinguished triple.
    let functional_check = if c.arity() == 3 {
        let triple = vec![e(-1), e(0), e(1)];
        details
            .inner_keys
            .iter()
            .find(|key| key.0 == triple)
            .map(|key| {
                let row = inner_index[key];
                let gens_vanish = (0..gens.len()).all(|g| m.get(row, g).is_zero());
                let c_nonzero = !b.get(row).is_zero();
                gens_vanish && c_nonzero
            })
    } else {
        None
    };

    Ok(NonCoboundaryCertificate {
        is_noncoboundary,
        functional_check,
    })
}

/// Span test against an already-computed projected coboundary basis (for
/// example one loaded from the scan cache): true when adjoining the inner
/// restriction of `c` raises the span dimension by exactly one.
pub fn class_extends_basis(
    c: &HomogeneousCochain,
    inner_keys: &[crate::window::CoeffKey],
    coboundary_basis: &[Vec<(usize, Rational)>],
) -> Result<bool> {
    let mut ech = crate::linalg::Echelon::new();
    for row in coboundary_basis {
        ech.insert(row);
    }
    let base = ech.rank();
    let mut c_row = Vec::new();
    for (i, key) in inner_keys.iter().enumerate() {
        let coeff = c
            .coefficient(&key.0, key.1)
            .ok_or_else(|| EngineError::UndefinedReference(tuple_string(&key.0)))?;
        if !coeff.is_zero() {
            c_row.push((i, coeff));
        }
    }
    ech.insert(&c_row);
    Ok(ech.rank() == base + 1)
}

/// Does the class of `c` generate the windowed cohomology? True when
/// adjoining the inner restriction of `c` to the projected coboundary basis
/// raises its span dimension by exactly one.
pub fn class_extends_coboundaries(
    c: &HomogeneousCochain,
    alg: &GradedAlgebra,
    radius: i64,
) -> Result<bool> {
    let module = c.module().clone();
    let details = windowed_details(alg, &module, c.arity(), c.degree(), WindowSpec::new(radius))?;
    class_extends_basis(c, &details.inner_keys, &details.coboundary_basis)
}

/// The central-extension 2-cocycle as a degree-zero cochain with trivial
/// coefficients on the Witt algebra, on the given window.
pub fn alpha_as_cochain(alg: &GradedAlgebra, radius: i64) -> Result<HomogeneousCochain> {
    let module = module_of(alg, ModuleKind::Trivial)?;
    let unit = module.basis_of_degree(0)[0];
    let alpha = crate::algebra::CentralExtensionCocycle;
    let mut c = HomogeneousCochain::new(2, 0, module, Domain::Window(radius));
    for n in 1..=radius {
        c.insert(&[e(-n), e(n)], unit, alpha.alpha(-n, n))?;
    }
    Ok(c)
}

/// Full verification of the central-extension 2-cocycle: cocycle on windows
/// up to radius 8, not a coboundary, and its class generates the
/// one-dimensional windowed h^2 with trivial coefficients.
pub fn virasoro_alpha_check() -> Result<bool> {
    let w = crate::algebra::witt();
    for r in [4, 6, 8] {
        let c = alpha_as_cochain(&w, 2 * r)?;
        if !certify_cocycle(&c, &w, r)?.is_cocycle() {
            return Ok(false);
        }
    }
    let r = 6;
    let c = alpha_as_cochain(&w, 2 * r)?;
    if !certify_noncoboundary(&c, &w, r)?.is_noncoboundary {
        return Ok(false);
    }
    let triv = module_of(&w, ModuleKind::Trivial)?;
    let h2 = crate::window::windowed_h(&w, &triv, 2, 0, WindowSpec::new(r))?;
    if h2.h != 1 {
        return Ok(false);
    }
    class_extends_coboundaries(&c, &w, r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{virasoro, witt};
    use crate::rational::{frac, int};
    use rand::{Rng, SeedableRng};

    #[test]
    fn gv_value_examples() {
        let gv = GVCocycle::default();
        assert_eq!(gv.value(1, 0, -1), int(-2));
        assert!(gv.value(2, 3, 1).is_zero(), "k != -(n+m)");
        assert!(gv.value(1, 1, -2).is_zero(), "repeated argument");
    }

    #[test]
    fn gv_value_is_alternating() {
        let gv = GVCocycle::new(frac(3, 7)).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2);
        for _ in 0..50 {
            let n = rng.gen_range(-10i64..=10);
            let m = rng.gen_range(-10i64..=10);
            let k = -(n + m);
            let base = gv.value(n, m, k);
            assert_eq!(gv.value(m, n, k), -base.clone());
            assert_eq!(gv.value(n, k, m), -base.clone());
            assert_eq!(gv.value(k, m, n), -base.clone());
            assert_eq!(gv.value(m, k, n), base.clone());
            assert_eq!(gv.value(k, n, m), base.clone());
        }
    }

    #[test]
    fn gv_value_matches_determinant_form() {
        // Independent oracle: cofactor expansion of the 3x3 matrix with rows
        // (1,1,1), (n,m,-(n+m)), (n^2,m^2,(n+m)^2).
        let det = |n: i64, m: i64| -> i64 {
            let row1 = [1i64, 1, 1];
            let row2 = [n, m, -(n + m)];
            let row3 = [n * n, m * m, (n + m) * (n + m)];
            row1[0] * (row2[1] * row3[2] - row2[2] * row3[1])
                - row1[1] * (row2[0] * row3[2] - row2[2] * row3[0])
                + row1[2] * (row2[0] * row3[1] - row2[1] * row3[0])
        };
        let a = frac(5, 3);
        let gv = GVCocycle::new(a.clone()).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        for _ in 0..50 {
            let n = rng.gen_range(-12i64..=12);
            let m = rng.gen_range(-12i64..=12);
            assert_eq!(
                gv.value(n, m, -(n + m)),
                &a * int(det(n, m)),
                "at ({n},{m})"
            );
        }
    }

    #[test]
    fn gv_as_cochain_values() {
        let w = witt();
        let gv = GVCocycle::default();
        let c = gv.as_cochain(&w, 8).unwrap();
        // The alternating formula evaluated in canonical order.
        let unit = c.module().basis_of_degree(0)[0];
        assert_eq!(c.coefficient(&[e(-1), e(0), e(1)], unit).unwrap(), int(2));
        let v = c.evaluate(&[e(1), e(0), e(-1)]).unwrap();
        assert_eq!(v.coefficient(unit), int(-2), "GV(e_1,e_0,e_-1) = -2A");
        // Off the zero-sum locus everything vanishes.
        assert!(c.evaluate(&[e(1), e(2), e(3)]).unwrap().is_zero());
    }

    #[test]
    fn gv_extension_vanishes_on_central_tuples() {
        let v = virasoro();
        let gv = GVCocycle::default();
        let c = gv.as_cochain(&v, 6).unwrap();
        let val = c.evaluate(&[e(1), e(-1), BasisId::Central]).unwrap();
        assert!(val.is_zero());
    }

    #[test]
    fn gv_is_a_cocycle_on_small_windows() {
        let gv = GVCocycle::default();
        for alg in [witt(), virasoro()] {
            let c = gv.as_cochain(&alg, 8).unwrap();
            let cert = certify_cocycle(&c, &alg, 4).unwrap();
            assert!(cert.is_cocycle(), "{}", alg.name());
        }
    }

    #[test]
    fn perturbed_gv_fails_certification() {
        let w = witt();
        let gv = GVCocycle::default();
        let mut c = gv.as_cochain(&w, 8).unwrap();
        let unit = c.module().basis_of_degree(0)[0];
        c.insert(&[e(-3), e(1), e(2)], unit, int(1)).unwrap();
        let cert = certify_cocycle(&c, &w, 4).unwrap();
        match cert {
            CocycleCertificate::Fails { tuple } => assert!(!tuple.is_empty()),
            CocycleCertificate::Cocycle { .. } => panic!("perturbation must break the cocycle"),
        }
    }

    #[test]
    fn gv_is_not_a_coboundary() {
        let w = witt();
        let gv = GVCocycle::default();
        let c = gv.as_cochain(&w, 8).unwrap();
        let cert = certify_noncoboundary(&c, &w, 4).unwrap();
        assert!(cert.is_noncoboundary);
        assert_eq!(cert.functional_check, Some(true));
        assert!(class_extends_coboundaries(&c, &w, 4).unwrap());
    }

    #[test]
    fn coboundaries_are_coboundaries() {
        // delta of a random 2-cochain must be detected as a coboundary, and
        // so must the zero cochain (the trivial coboundary).
        let w = witt();
        let module = module_of(&w, ModuleKind::Trivial).unwrap();
        let unit = module.basis_of_degree(0)[0];
        let mut chi = HomogeneousCochain::new(2, 0, module.clone(), Domain::Global);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        for n in 1..=16 {
            chi.insert(&[e(-n), e(n)], unit, int(rng.gen_range(-9i64..=9)))
                .unwrap();
        }
        let psi = chi.differential(&w, 8).unwrap();
        let cert = certify_noncoboundary(&psi, &w, 4).unwrap();
        assert!(!cert.is_noncoboundary);

        let zero = HomogeneousCochain::new(3, 0, module, Domain::Window(8));
        let cert = certify_noncoboundary(&zero, &w, 4).unwrap();
        assert!(!cert.is_noncoboundary, "zero is the trivial coboundary");
    }

    #[test]
    fn certification_is_invariant_under_rescaling() {
        let w = witt();
        for a in [int(1), int(-4), frac(2, 9)] {
            let gv = GVCocycle::new(a).unwrap();
            let c = gv.as_cochain(&w, 6).unwrap();
            assert!(certify_cocycle(&c, &w, 3).unwrap().is_cocycle());
            assert!(certify_noncoboundary(&c, &w, 3).unwrap().is_noncoboundary);
        }
        assert!(GVCocycle::new(int(0)).is_err());
    }

    #[test]
    fn alpha_examples_and_certification() {
        let alpha = crate::algebra::CentralExtensionCocycle;
        assert_eq!(alpha.alpha(2, -2), frac(-1, 2));
        assert!(alpha.alpha(1, -1).is_zero());
        assert!(virasoro_alpha_check().unwrap());
    }
}
