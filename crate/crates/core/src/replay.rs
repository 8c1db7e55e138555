//! Mechanical replay of the vanishing arguments for low-dimensional
//! cohomology of the Witt algebra: the degree-reduction homotopy through
//! e_0, the normalization of a degree-zero 3-cocycle by an explicitly
//! constructed 2-cochain, and the level-by-level annihilation walk that
//! certifies every coefficient of the normalized cocycle is zero.
//!
//! Replays work on windowed coefficient tables. Every recurrence consumes
//! window margin (its references reach beyond the tuple it certifies), so a
//! replay reports the certified sub-window on which all referenced
//! coefficients were available, instead of claiming the full window.
//! Recurrence orderings follow the narrative of the proof exactly; the
//! orderings are what guarantee that no recurrence denominator vanishes.

use std::collections::{HashMap, HashSet};

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::algebra::{self, BasisId, GradedAlgebra, ModuleKind};
use crate::cochain::{combinations, Domain, HomogeneousCochain};
use crate::error::EngineError;
use crate::rational::{self, Rational};
use crate::Result;

fn e(n: i64) -> BasisId {
    BasisId::Indexed(n)
}

fn int(n: i64) -> Rational {
    rational::int(n)
}

/// One replay step: which rule fired, at which tuple, and the value it
/// assigned or verified.
#[derive(Clone, Debug)]
pub struct LogEntry {
    pub step: usize,
    pub anchor: String,
    pub tuple: Vec<i64>,
    pub value: Rational,
}

impl LogEntry {
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "step": self.step,
            "anchor": self.anchor,
            "tuple": self.tuple,
            "value": rational::format(&self.value),
        })
    }
}

#[derive(Default)]
struct ReplayLog {
    entries: Vec<LogEntry>,
}

impl ReplayLog {
    fn push(&mut self, anchor: &str, tuple: &[i64], value: Rational) {
        self.entries.push(LogEntry {
            step: self.entries.len(),
            anchor: anchor.to_string(),
            tuple: tuple.to_vec(),
            value,
        });
    }
}

/// Windowed coefficient table of a degree-zero 3-cochain on the Witt algebra
/// with adjoint values: psi(e_i, e_j, e_k) = psi_{i,j,k} e_{i+j+k}.
/// Coefficients are defined exactly on triples with all indices in
/// `[-window, window]`.
#[derive(Clone, Debug)]
pub struct Psi3 {
    window: i64,
    coeffs: HashMap<(i64, i64, i64), Rational>,
}

fn sort3(i: i64, j: i64, k: i64) -> ((i64, i64, i64), i64) {
    let mut v = [i, j, k];
    let mut sign = 1i64;
    for a in 1..3 {
        let mut b = a;
        while b > 0 && v[b - 1] > v[b] {
            v.swap(b - 1, b);
            sign = -sign;
            b -= 1;
        }
    }
    if v[0] == v[1] || v[1] == v[2] {
        sign = 0;
    }
    ((v[0], v[1], v[2]), sign)
}

impl Psi3 {
    pub fn new(window: i64) -> Self {
        assert!(window >= 0);
        Psi3 {
            window,
            coeffs: HashMap::new(),
        }
    }

    pub fn window(&self) -> i64 {
        self.window
    }

    /// Set the coefficient at a strictly sorted triple.
    pub fn set_sorted(&mut self, i: i64, j: i64, k: i64, value: Rational) {
        assert!(i < j && j < k, "triple must be strictly sorted");
        assert!(
            i.abs() <= self.window && k.abs() <= self.window && j.abs() <= self.window,
            "triple outside window"
        );
        if value.is_zero() {
            self.coeffs.remove(&(i, j, k));
        } else {
            self.coeffs.insert((i, j, k), value);
        }
    }

    /// Signed coefficient psi_{i,j,k}; `None` when any index leaves the
    /// window, `Some(0)` on repeated indices.
    pub fn get(&self, i: i64, j: i64, k: i64) -> Option<Rational> {
        if i.abs() > self.window || j.abs() > self.window || k.abs() > self.window {
            return None;
        }
        let (key, sign) = sort3(i, j, k);
        if sign == 0 {
            return Some(Rational::zero());
        }
        let v = self
            .coeffs
            .get(&key)
            .cloned()
            .unwrap_or_else(Rational::zero);
        Some(if sign < 0 { -v } else { v })
    }

    /// Extract a table from a windowed degree-zero arity-3 cochain with
    /// adjoint Witt values.
    pub fn from_cochain(c: &HomogeneousCochain) -> Result<Psi3> {
        if c.arity() != 3 || c.degree() != 0 {
            return Err(EngineError::Unsupported(
                "replay tables need a degree-zero 3-cochain".into(),
            ));
        }
        let Domain::Window(window) = c.domain() else {
            return Err(EngineError::Unsupported(
                "replay tables need a windowed cochain".into(),
            ));
        };
        let mut out = Psi3::new(window);
        for ((tuple, _target), value) in c.iter() {
            let idx: Vec<i64> = tuple
                .iter()
                .map(|id| id.index().expect("Witt tuple"))
                .collect();
            out.set_sorted(idx[0], idx[1], idx[2], value.clone());
        }
        Ok(out)
    }
}

/// Partial degree-zero 2-cochain under construction, gauge-fixed by
/// phi_{i,1} = 0 for all i and phi_{-1,2} = 0. Entries not yet defined by a
/// recurrence read as `None`.
#[derive(Clone, Debug, Default)]
pub struct Phi2 {
    defined: HashMap<(i64, i64), Rational>,
}

impl Phi2 {
    /// Signed value phi_{a,b}; the gauge conventions are built in.
    pub fn get(&self, a: i64, b: i64) -> Option<Rational> {
        if a == b {
            return Some(Rational::zero());
        }
        if a == 1 || b == 1 {
            return Some(Rational::zero());
        }
        if (a, b) == (-1, 2) || (a, b) == (2, -1) {
            return Some(Rational::zero());
        }
        let (lo, hi, sign) = if a < b { (a, b, 1) } else { (b, a, -1) };
        self.defined
            .get(&(lo, hi))
            .map(|v| if sign < 0 { -v } else { v.clone() })
    }

    fn set(&mut self, a: i64, b: i64, value: Rational) {
        assert!(a != b && a != 1 && b != 1, "gauge-fixed entry");
        assert!((a, b) != (-1, 2) && (a, b) != (2, -1), "gauge-fixed entry");
        let (lo, hi, flip) = if a < b { (a, b, false) } else { (b, a, true) };
        let stored = if flip { -value } else { value };
        let prev = self.defined.insert((lo, hi), stored);
        assert!(prev.is_none(), "phi_({a},{b}) defined twice");
    }

    pub fn defined_len(&self) -> usize {
        self.defined.len()
    }
}

/// Outcome of the normalization: the original cocycle, the constructed
/// 2-cochain, and the ordered construction log. The normalized cocycle
/// psi' = psi - delta(phi) is exposed coefficient-wise through `psi_prime`.
pub struct NormalizationState {
    pub psi: Psi3,
    pub phi: Phi2,
    pub log: Vec<LogEntry>,
}

impl NormalizationState {
    /// (delta phi)_{i,j,k} for the degree-zero coboundary expansion; `None`
    /// when a needed phi entry is undefined. Terms with zero multiplier are
    /// skipped before looking at availability.
    pub fn delta_phi(&self, i: i64, j: i64, k: i64) -> Option<Rational> {
        let mut acc = Rational::zero();
        let terms: [(i64, i64, i64); 6] = [
            (j - i, i + j, k),
            (k - j, k + j, i),
            (i - k, i + k, j),
            (-(j + k - i), j, k),
            (i + k - j, i, k),
            (-(i + j - k), i, j),
        ];
        for (mult, a, b) in terms {
            if mult == 0 {
                continue;
            }
            acc += int(mult) * self.phi.get(a, b)?;
        }
        Some(acc)
    }

    /// psi'_{i,j,k} = psi_{i,j,k} - (delta phi)_{i,j,k}, where computable.
    pub fn psi_prime(&self, i: i64, j: i64, k: i64) -> Option<Rational> {
        let (_, sign) = sort3(i, j, k);
        if sign == 0 {
            return Some(Rational::zero());
        }
        Some(self.psi.get(i, j, k)? - self.delta_phi(i, j, k)?)
    }

    /// The full 4-argument cocycle condition evaluated on psi' at
    /// (e_a, e_b, e_c, e_d); `None` when any referenced coefficient is not
    /// computable.
    pub fn cocycle_condition_prime(&self, a: i64, b: i64, c: i64, d: i64) -> Option<Rational> {
        let p = |i, j, k| self.psi_prime(i, j, k);
        let mut acc = Rational::zero();
        let bracket_terms: [(i64, i64, i64, i64); 6] = [
            (b - a, a + b, c, d),
            (-(c - a), a + c, b, d),
            (d - a, a + d, b, c),
            (c - b, c + b, a, d),
            (-(d - b), d + b, a, c),
            (d - c, d + c, a, b),
        ];
        for (mult, x, y, z) in bracket_terms {
            if mult == 0 {
                continue;
            }
            acc += int(mult) * p(x, y, z)?;
        }
        let action_terms: [(i64, i64, i64, i64); 4] = [
            (-(b + c + d - a), b, c, d),
            (a + c + d - b, a, c, d),
            (-(a + b + d - c), a, b, d),
            (a + b + c - d, a, b, c),
        ];
        for (mult, x, y, z) in action_terms {
            if mult == 0 {
                continue;
            }
            acc += int(mult) * p(x, y, z)?;
        }
        Some(acc)
    }
}

/// Normalize a degree-zero 3-cocycle by an explicitly constructed 2-cochain
/// so that the normalized cocycle psi' vanishes on the pivot families
/// psi'_{i,j,1} (i <= 0), psi'_{i,j,-1} (i,j > 0), psi'_{i,-1,2} and
/// psi'_{-4,2,-2}, wherever those coefficients are computable on the window.
///
/// The construction runs in three sign cases. Case 1 defines phi on
/// non-positive index pairs by a descending recurrence seeded by the gauge.
/// Case 2 works down the second-column pivots (-3,2,-1), the descending
/// column-two recurrence, the (-4,2,-2) and (0,2,-1) pivots, then sweeps
/// mixed-sign pairs with an ascending recurrence. Case 3 fills positive
/// pairs by a double recurrence. Window radius must be at least 8: the
/// pivot chain touches indices down to -6 and the tuple (-4,2,-2).
pub fn normalize_3cocycle(psi: &Psi3) -> Result<NormalizationState> {
    let w = psi.window();
    if w < 8 {
        return Err(EngineError::WindowTooSmall { got: w, need: 8 });
    }
    let mut phi = Phi2::default();
    let mut log = ReplayLog::default();
    log.push("normalize/gauge", &[], Rational::zero());

    let guard = |den: i64, what: &str| -> Result<Rational> {
        if den == 0 {
            return Err(EngineError::DivisionGuard(what.to_string()));
        }
        Ok(int(den))
    };

    // Case 1: non-positive pairs. The coboundary condition at (i, j, 1)
    // with the gauge phi_{.,1} = 0 reads
    //   psi_{i,j,1} = -(i+j-1) phi_{i,j} + (i-1) phi_{i+1,j} - (j-1) phi_{j+1,i},
    // solved for phi_{i,j} with i descending from 0 and j < i descending.
    for i in (-w..=0).rev() {
        for j in (-w..i).rev() {
            let den = guard(i + j - 1, &format!("case1 at ({i},{j})"))?;
            let (Some(a), Some(b), Some(psi_val)) =
                (phi.get(i + 1, j), phi.get(j + 1, i), psi.get(i, j, 1))
            else {
                continue;
            };
            let value = (int(i - 1) * a - int(j - 1) * b - psi_val) / den;
            phi.set(i, j, value.clone());
            log.push("normalize/case1", &[i, j], value);
        }
    }

    // Case 2 seed: the coboundary condition at (-3, 2, -1) collapses to
    //   psi_{-3,2,-1} = -2 phi_{-4,2} - 6 phi_{-3,-1}.
    {
        let psi_val = psi.get(-3, 2, -1).expect("within window for w >= 8");
        let p = phi.get(-3, -1).expect("case 1 range");
        let value = -(psi_val + int(6) * p) / int(2);
        phi.set(-4, 2, value.clone());
        log.push("normalize/case2/seed(-3,2,-1)", &[-4, 2], value);
    }

    // Case 2 descent: the coboundary condition at (i, 2, -1) defines
    //   phi_{i-1,2} = (3+i)/(i+1) phi_{i,2} + psi_{i,2,-1}/(i+1)
    //               - (i-3)/(i+1) phi_{i,-1} + (i-2)/(i+1) phi_{i+2,-1}
    // for i = -4, -5, ... downward.
    for i in (-w..=-4).rev() {
        let den = guard(i + 1, &format!("case2 descent at ({i},2,-1)"))?;
        let (Some(c2), Some(m1), Some(m2), Some(psi_val)) = (
            phi.get(i, 2),
            phi.get(i, -1),
            phi.get(i + 2, -1),
            psi.get(i, 2, -1),
        ) else {
            continue;
        };
        let value = (int(3 + i) * c2 + psi_val - int(i - 3) * m1 + int(i - 2) * m2) / den;
        phi.set(i - 1, 2, value.clone());
        log.push("normalize/case2/column2-descent", &[i - 1, 2], value);
    }

    // Case 2 pivot: the coboundary condition at (-4, 2, -2),
    //   psi_{-4,2,-2} = -2 phi_{-6,2} - 8 phi_{-4,-2} - 4 phi_{0,-4} - 4 phi_{2,-2},
    // defines phi_{2,-2} and annihilates psi'_{-4,2,-2}.
    {
        let psi_val = psi.get(-4, 2, -2).expect("within window");
        let a = phi.get(-6, 2).expect("column-2 descent");
        let b = phi.get(-4, -2).expect("case 1 range");
        let c = phi.get(0, -4).expect("case 1 range");
        let value = -(psi_val + int(2) * a + int(8) * b) / int(4) - c;
        phi.set(2, -2, value.clone());
        log.push("normalize/case2/seed(-4,2,-2)", &[2, -2], value);
    }

    // Case 2: reusing the descent relation at i = -2 now that phi_{-2,2}
    // is known; defines phi_{-3,2}.
    {
        let den = guard(-2 + 1, "case2 descent at (-2,2,-1)")?;
        let c2 = phi.get(-2, 2).expect("just defined");
        let m1 = phi.get(-2, -1).expect("case 1 range");
        let m2 = phi.get(0, -1).expect("case 1 range");
        let psi_val = psi.get(-2, 2, -1).expect("within window");
        let value = (int(3 - 2) * c2 + psi_val - int(-2 - 3) * m1 + int(-2 - 2) * m2) / den;
        phi.set(-3, 2, value.clone());
        log.push("normalize/case2/column2-descent", &[-3, 2], value);
    }

    // Case 2 pivot: the coboundary condition at (0, 2, -1),
    //   psi_{0,2,-1} = -3 phi_{0,2} - 3 phi_{0,-1}.
    {
        let psi_val = psi.get(0, 2, -1).expect("within window");
        let m = phi.get(0, -1).expect("case 1 range");
        let value = -m - psi_val / int(3);
        phi.set(0, 2, value.clone());
        log.push("normalize/case2/seed(0,2,-1)", &[0, 2], value);
    }

    // Case 2 ascent: the coboundary condition at (i, j, 1) rearranged as
    //   phi_{i,j+1} = (i+j-1)/(j-1) phi_{i,j} - (i-1)/(j-1) phi_{i+1,j}
    //              + psi_{i,j,1}/(j-1),
    // i fixed from 0 downward, j ascending from 2.
    for i in (-w..=0).rev() {
        for j in 2..=w {
            let den = guard(j - 1, &format!("case2 ascent at ({i},{j},1)"))?;
            let (Some(a), Some(b), Some(psi_val)) =
                (phi.get(i, j), phi.get(i + 1, j), psi.get(i, j, 1))
            else {
                continue;
            };
            let value = (int(i + j - 1) * a - int(i - 1) * b + psi_val) / den;
            phi.set(i, j + 1, value.clone());
            log.push("normalize/case2/row-ascent", &[i, j + 1], value);
        }
    }

    // Case 3: positive pairs. The coboundary condition at (i, j, -1) gives
    //   phi_{i,j} = [(i+1) phi_{i-1,j} + (j+1) phi_{i,j-1} - psi_{i,j,-1}
    //             + (i-j-1) phi_{i,-1} + (1+i-j) phi_{j,-1}
    //             + (j-i) phi_{i+j,-1}] / (1+i+j),
    // i ascending from 2, j > i ascending. The phi_{.,-1} entries come from
    // the mixed-sign sweep; the phi_{i+j,-1} reference is what limits the
    // reachable pairs to i + j <= w + 1.
    let mut i = 2;
    while 2 * i <= w {
        let mut j = i + 1;
        while i + j <= w + 1 {
            let den = guard(1 + i + j, &format!("case3 at ({i},{j},-1)"))?;
            let refs = (
                phi.get(i - 1, j),
                phi.get(i, j - 1),
                phi.get(i, -1),
                phi.get(j, -1),
                phi.get(i + j, -1),
                psi.get(i, j, -1),
            );
            let (Some(a), Some(b), Some(m1), Some(m2), Some(m3), Some(psi_val)) = refs else {
                j += 1;
                continue;
            };
            let value = (int(i + 1) * a + int(j + 1) * b - psi_val
                + int(i - j - 1) * m1
                + int(1 + i - j) * m2
                + int(j - i) * m3)
                / den;
            phi.set(i, j, value.clone());
            log.push("normalize/case3", &[i, j], value);
            j += 1;
        }
        i += 1;
    }

    let state = NormalizationState {
        psi: psi.clone(),
        phi,
        log: log.entries,
    };

    // Verify the normalization result on every computable coefficient:
    // psi'_{i,j,1} = 0 (i <= 0), psi'_{i,j,-1} = 0 (i,j > 0),
    // psi'_{i,-1,2} = 0, psi'_{-4,2,-2} = 0.
    let check = |i: i64, j: i64, k: i64| -> Result<()> {
        if let Some(v) = state.psi_prime(i, j, k) {
            if !v.is_zero() {
                return Err(EngineError::NonzeroResidual {
                    tuple: format!("({i},{j},{k})"),
                    value: rational::format(&v),
                });
            }
        }
        Ok(())
    };
    for i in -w..=0 {
        for j in -w..=w {
            check(i, j, 1)?;
        }
    }
    for i in 1..=w {
        for j in 1..=w {
            check(i, j, -1)?;
        }
    }
    for i in -w..=w {
        check(i, -1, 2)?;
    }
    check(-4, 2, -2)?;
    Ok(state)
}

/// Certificate produced by a level walk: the ordered list of checked
/// coefficients, the radius of the sub-window on which every coefficient
/// was both computable and verified zero, and any nonzero residuals.
#[derive(Clone, Debug)]
pub struct VanishCertificate {
    pub checked_levels: Vec<i64>,
    pub certified_radius: i64,
    pub checked: Vec<Vec<i64>>,
    pub residuals: Vec<(Vec<i64>, Rational)>,
    pub log: Vec<LogEntry>,
}

/// Walk the level order of the vanishing argument on a normalized cocycle:
/// level zero, levels +-1, the level +-2 pivot chains (including the two
/// quadratic-discriminant identities, whose quadratic factors have negative
/// discriminant and never vanish), then induction over the remaining levels.
/// Asserts every targeted coefficient is exactly zero within the certified
/// sub-window.
pub fn level_vanish_check(state: &NormalizationState) -> Result<VanishCertificate> {
    let w = state.psi.window();
    let mut log = ReplayLog::default();
    let mut seen: HashSet<(i64, i64, i64)> = HashSet::new();
    let mut checked: Vec<Vec<i64>> = Vec::new();
    let mut residuals: Vec<(Vec<i64>, Rational)> = Vec::new();

    let check = |anchor: &str,
                 i: i64,
                 j: i64,
                 k: i64,
                 seen: &mut HashSet<(i64, i64, i64)>,
                 log: &mut ReplayLog,
                 checked: &mut Vec<Vec<i64>>,
                 residuals: &mut Vec<(Vec<i64>, Rational)>|
     -> bool {
        let (key, sign) = sort3(i, j, k);
        if sign == 0 {
            return true;
        }
        if seen.contains(&key) {
            return true;
        }
        match state.psi_prime(i, j, k) {
            None => false,
            Some(v) => {
                seen.insert(key);
                log.push(anchor, &[i, j, k], v.clone());
                checked.push(vec![key.0, key.1, key.2]);
                if !v.is_zero() {
                    residuals.push((vec![i, j, k], v));
                }
                true
            }
        }
    };

    // Replays the full cocycle condition on psi' at a pivot quadruple; the
    // condition is inherited from psi, so a nonzero value means the input
    // was not a cocycle on the window.
    let replay_condition = |anchor: &str, q: [i64; 4], log: &mut ReplayLog| -> Result<()> {
        if let Some(v) = state.cocycle_condition_prime(q[0], q[1], q[2], q[3]) {
            log.push(anchor, &q, v.clone());
            if !v.is_zero() {
                return Err(EngineError::NotACocycle(format!(
                    "({},{},{},{})",
                    q[0], q[1], q[2], q[3]
                )));
            }
        }
        Ok(())
    };

    macro_rules! chk {
        ($anchor:expr, $i:expr, $j:expr, $k:expr) => {
            check(
                $anchor,
                $i,
                $j,
                $k,
                &mut seen,
                &mut log,
                &mut checked,
                &mut residuals,
            )
        };
    }

    // Level zero, negative pair: descending recurrence from the cocycle
    // condition at (i, j, 0, 1).
    for i in (-w..=-1).rev() {
        for j in (-w..i).rev() {
            chk!("level0/negative", i, j, 0);
        }
    }
    // Level zero, mixed: the column-two chain. At i = -3 the relation
    // psi_{i-1,2,0} = (i+3)/(i+1) psi_{i,2,0} has a vanishing numerator and
    // forces psi_{-4,2,0} = 0 outright.
    replay_condition("level0/two-zero@i=-3", [-3, 2, 0, -1], &mut log)?;
    chk!("level0/two-zero", -4, 2, 0);
    for i in (-w..=-4).rev() {
        replay_condition("level0/two-zero", [i, 2, 0, -1], &mut log)?;
        chk!("level0/two-zero", i - 1, 2, 0);
    }
    replay_condition("level0/pivot(2,-2,0)", [-4, 2, -2, 0], &mut log)?;
    chk!("level0/pivot(2,-2,0)", 2, -2, 0);
    replay_condition("level0/two-zero@i=-2", [-2, 2, 0, -1], &mut log)?;
    chk!("level0/two-zero", -3, 2, 0);
    for i in (-w..=0).rev() {
        chk!("level0/column2", i, 2, 0);
    }
    // Level zero, mixed ascent from the cocycle condition at (i, j, 0, 1).
    for i in (-w..=-1).rev() {
        for j in 3..=w {
            chk!("level0/mixed-ascent", i, j, 0);
        }
    }
    // Level zero, positive pair: ascending recurrence from (i, j, 0, -1).
    for i in 1..=w {
        for j in (i + 1)..=w {
            chk!("level0/positive", i, j, 0);
        }
    }

    // Levels +-1 completion (the pivot families were already annihilated by
    // the normalization).
    for i in (-w..=-2).rev() {
        for j in (-w..i).rev() {
            chk!("level-1/negative", i, j, -1);
        }
    }
    for i in (-w..=-2).rev() {
        for j in 3..=w {
            chk!("level-1/mixed", i, j, -1);
        }
    }
    for i in 2..=w {
        for j in (i + 1)..=w {
            chk!("level1/positive", i, j, 1);
        }
    }

    // Level -2, negative pair: descending recurrence from (i, j, -2, 1).
    for i in (-w..=-3).rev() {
        for j in (-w..i).rev() {
            chk!("level-2/negative", i, j, -2);
        }
    }

    // Level +-2 pivot chain. The (-3,2,-2,-1) condition transfers the
    // normalized zero at (-4,2,-2) to (-3,2,-2).
    replay_condition("level2/pivot(-3,2,-2,-1)", [-3, 2, -2, -1], &mut log)?;
    chk!("level2/pivot", -3, 2, -2);
    for j in 2..=w {
        replay_condition("level2/ladder(-3,j,-2,1)", [-3, j, -2, 1], &mut log)?;
        chk!("level2/ladder", j, -3, -2);
    }
    // Column (i, 3, 2): the (-3,3,2,-2) condition closes the three-term
    // chain built from (i, 3, 2, -1) and forces psi_{-2,3,2} = 0.
    replay_condition("level2/pivot(-3,3,2,-2)", [-3, 3, 2, -2], &mut log)?;
    chk!("level2/column32", -2, 3, 2);
    for i in (-w..=-2).rev() {
        replay_condition("level2/column32", [i, 3, 2, -1], &mut log)?;
        chk!("level2/column32", i - 1, 3, 2);
    }

    // Level -2, mixed: downward induction on i with the even-discriminant
    // identity (i-3)(i^2-3i+8) psi_{i,2,-2} = 0 at each step, replayed
    // through the cocycle condition at (i, 3, -2, 2).
    for i in (-w..=-4).rev() {
        replay_condition("level-2/discriminant-even", [i, 3, -2, 2], &mut log)?;
        chk!("level-2/induction-base", i, 2, -2);
        for j in 3..=w {
            chk!("level-2/induction", i, j, -2);
        }
    }
    // Level +2, mixed: downward induction on j with the odd-discriminant
    // identity (j+3)(j^2+3j+8) psi_{-2,j,2} = 0, replayed through the
    // cocycle condition at (-3, j, 2, -2).
    for j in 4..=w {
        replay_condition("level2/discriminant-odd", [-3, j, 2, -2], &mut log)?;
        chk!("level2/induction-base", -2, j, 2);
        for i in (-w..=-3).rev() {
            chk!("level2/induction", i, j, 2);
        }
    }
    // Level +2, positive pair: ascending recurrence from (i, j, 2, -1).
    for i in 3..=w {
        for j in (i + 1)..=w {
            chk!("level2/positive", i, j, 2);
        }
    }

    // Generic levels by induction on |k|: every remaining coefficient,
    // grouped by the largest absolute index.
    let mut remaining: Vec<(i64, i64, i64)> = Vec::new();
    for i in -w..=w {
        for j in (i + 1)..=w {
            for k in (j + 1)..=w {
                if !seen.contains(&(i, j, k)) {
                    remaining.push((i, j, k));
                }
            }
        }
    }
    remaining.sort_by_key(|&(i, j, k)| (i.abs().max(j.abs()).max(k.abs()), i, j, k));
    for (i, j, k) in remaining {
        chk!("level-k/induction", i, j, k);
    }

    if let Some((tuple, value)) = residuals.first() {
        return Err(EngineError::NonzeroResidual {
            tuple: format!("({},{},{})", tuple[0], tuple[1], tuple[2]),
            value: rational::format(value),
        });
    }

    // Certified radius: the largest c such that every sorted triple within
    // [-c, c] was computable and verified.
    let mut certified = 0;
    'outer: for c in 1..=w {
        for i in -c..=c {
            for j in (i + 1)..=c {
                for k in (j + 1)..=c {
                    if !seen.contains(&(i, j, k)) {
                        break 'outer;
                    }
                }
            }
        }
        certified = c;
    }

    let mut checked_levels = vec![0i64];
    for l in 1..=w {
        checked_levels.push(l);
        checked_levels.push(-l);
    }
    Ok(VanishCertificate {
        checked_levels,
        certified_radius: certified,
        checked,
        residuals,
        log: log.entries,
    })
}

/// Windowed coefficient table of a degree-zero 1-cochain on the Witt
/// algebra: psi(e_i) = psi_i e_i.
#[derive(Clone, Debug)]
pub struct Psi1 {
    window: i64,
    coeffs: HashMap<i64, Rational>,
}

impl Psi1 {
    pub fn new(window: i64) -> Self {
        Psi1 {
            window,
            coeffs: HashMap::new(),
        }
    }

    pub fn window(&self) -> i64 {
        self.window
    }

    pub fn set(&mut self, i: i64, value: Rational) {
        assert!(i.abs() <= self.window);
        if value.is_zero() {
            self.coeffs.remove(&i);
        } else {
            self.coeffs.insert(i, value);
        }
    }

    pub fn get(&self, i: i64) -> Option<Rational> {
        if i.abs() > self.window {
            return None;
        }
        Some(self.coeffs.get(&i).cloned().unwrap_or_else(Rational::zero))
    }
}

/// Replay of the first-cohomology vanishing walk: normalize psi_1 = 0 by the
/// inner derivation along psi_1 e_0, then run the j = 1 ladder in both
/// directions and the (3, 2) pivot that forces psi_2 = 0. Certifies
/// psi_i = 0 for all |i| <= window.
pub fn h1_replay(psi: &Psi1) -> Result<VanishCertificate> {
    let w = psi.window();
    if w < 5 {
        // The pivot condition on (e_3, e_2) references psi_5.
        return Err(EngineError::WindowTooSmall { got: w, need: 5 });
    }
    let mut log = ReplayLog::default();
    let psi1 = psi.get(1).expect("within window");
    log.push("h1/normalize", &[1], psi1.clone());
    let prime = |i: i64| -> Option<Rational> { Some(psi.get(i)? - int(i) * &psi1) };

    // Cocycle conditions (j - i)(psi_{i+j} - psi_j - psi_i) = 0 are inherited
    // from the input; verify them on the computable range first.
    for i in -w..=w {
        for j in (i + 1)..=w {
            if (i + j).abs() > w {
                continue;
            }
            let v = int(j - i) * (prime(i + j).unwrap() - prime(j).unwrap() - prime(i).unwrap());
            if !v.is_zero() {
                return Err(EngineError::NotACocycle(format!("({i},{j})")));
            }
        }
    }

    let mut residuals: Vec<(Vec<i64>, Rational)> = Vec::new();
    let mut checked: Vec<Vec<i64>> = Vec::new();
    let mut check = |anchor: &str, i: i64, log: &mut ReplayLog| {
        let v = prime(i).expect("within window");
        log.push(anchor, &[i], v.clone());
        checked.push(vec![i]);
        if !v.is_zero() {
            residuals.push((vec![i], v));
        }
    };

    // The (0,1) condition forces psi_0 = 0; the descending ladder at (i,1)
    // propagates it to all i < 0.
    check("h1/ladder-down", 0, &mut log);
    for i in (-w..=-1).rev() {
        check("h1/ladder-down", i, &mut log);
    }
    // The ascending ladder pins psi_i = psi_2 for i > 1; the pivot condition
    // at (3, 2), psi_5 - psi_2 - psi_3 = 0, then forces psi_2 = 0.
    let p2 = prime(2).unwrap();
    for i in 3..=w {
        let diff = prime(i).unwrap() - &p2;
        log.push("h1/ladder-up", &[i], diff.clone());
        if !diff.is_zero() {
            return Err(EngineError::NotACocycle(format!("ladder at ({},1)", i - 1)));
        }
    }
    let pivot = prime(5).unwrap() - prime(2).unwrap() - prime(3).unwrap();
    log.push("h1/pivot(3,2)", &[3, 2], pivot);
    check("h1/pivot(3,2)", 2, &mut log);
    for i in 3..=w {
        check("h1/ladder-up", i, &mut log);
    }
    check("h1/normalized", 1, &mut log);

    if let Some((tuple, value)) = residuals.first() {
        return Err(EngineError::NonzeroResidual {
            tuple: format!("({})", tuple[0]),
            value: rational::format(value),
        });
    }
    Ok(VanishCertificate {
        checked_levels: (-w..=w).collect(),
        certified_radius: w,
        checked,
        residuals,
        log: log.entries,
    })
}

/// Result of the degree-reduction homotopy: the (q-1)-cochain phi with
/// psi = delta(phi) verified coefficient-wise on the inner half-window.
pub struct FuksHomotopy {
    pub phi: HomogeneousCochain,
    /// Radius of the inner window on which the residual psi - delta(phi)
    /// was verified to vanish exactly.
    pub residual_radius: i64,
}

/// The degree-reduction homotopy for a homogeneous cocycle of degree d != 0:
/// phi(x_1,...,x_{q-1}) := -(1/d) psi(x_1,...,x_{q-1}, e_0). For a cocycle,
/// psi - delta(phi) vanishes identically; the residual is checked exactly on
/// the inner half-window and any nonzero value is an error.
pub fn fuks_homotopy(psi: &HomogeneousCochain, alg: &GradedAlgebra) -> Result<FuksHomotopy> {
    let d = psi.degree();
    if d == 0 {
        return Err(EngineError::Unsupported(
            "degree-reduction homotopy needs nonzero degree".into(),
        ));
    }
    if psi.arity() == 0 {
        return Err(EngineError::Unsupported("homotopy needs arity >= 1".into()));
    }
    let Domain::Window(w) = psi.domain() else {
        return Err(EngineError::Unsupported(
            "homotopy expects a windowed cochain".into(),
        ));
    };
    let inner = w / 2;

    // Cocycle precondition on the inner window; the homotopy identity relies
    // on it.
    let ids_inner = alg.basis_in_window(inner);
    for tuple in combinations(&ids_inner, psi.arity() + 1) {
        let v = psi.differential_value(alg, &tuple)?;
        if !v.is_zero() {
            return Err(EngineError::NotACocycle(crate::cochain::tuple_string(
                &tuple,
            )));
        }
    }

    let mut phi =
        HomogeneousCochain::new(psi.arity() - 1, d, psi.module().clone(), Domain::Window(w));
    let scale = -rational::frac(1, 1) / int(d);
    let ids = alg.basis_in_window(w);
    for tuple in combinations(&ids, psi.arity() - 1) {
        if tuple.contains(&e(0)) {
            continue;
        }
        let mut extended: Vec<BasisId> = tuple.clone();
        extended.push(e(0));
        let mut value = psi.evaluate(&extended)?;
        if value.is_zero() {
            continue;
        }
        value.scale(&scale);
        for (target, coeff) in value.iter() {
            phi.insert(&tuple, target, coeff.clone())?;
        }
    }

    // Exact residual check on the inner half-window.
    for tuple in combinations(&ids_inner, psi.arity()) {
        let mut residual = psi.evaluate(&tuple)?;
        let mut delta = phi.differential_value(alg, &tuple)?;
        delta.scale(&int(-1));
        residual.add(&delta);
        if !residual.is_zero() {
            return Err(EngineError::NonzeroResidual {
                tuple: crate::cochain::tuple_string(&tuple),
                value: residual.to_string(),
            });
        }
    }
    Ok(FuksHomotopy {
        phi,
        residual_radius: inner,
    })
}

/// Random global cochain on the Witt algebra with adjoint values: one random
/// small rational per sorted tuple within the support radius.
pub fn random_witt_cochain(
    seed: u64,
    arity: usize,
    degree: i64,
    support_radius: i64,
) -> HomogeneousCochain {
    let w = algebra::witt();
    let adj = algebra::module_of(&w, ModuleKind::Adjoint).expect("adjoint over witt");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut c = HomogeneousCochain::new(arity, degree, adj, Domain::Global);
    let ids = w.basis_in_window(support_radius);
    for tuple in combinations(&ids, arity) {
        let num = rng.gen_range(-9i64..=9);
        let den = rng.gen_range(1i64..=4);
        let total: i64 = tuple.iter().map(|id| id.index().unwrap()).sum();
        c.insert(&tuple, e(total + degree), rational::frac(num, den))
            .expect("target matches degree");
    }
    c
}

/// Coboundary fixture: delta of a seeded random (arity-1)-cochain supported
/// on four times the window radius, materialized on the window. On a finite
/// window arbitrary cocycles cannot be sampled independently; coboundaries
/// are fully general here because the cohomology the fixtures exercise
/// vanishes.
pub fn coboundary_fixture(
    seed: u64,
    arity: usize,
    degree: i64,
    window: i64,
) -> Result<HomogeneousCochain> {
    assert!(arity >= 1);
    let w = algebra::witt();
    let source = random_witt_cochain(seed, arity - 1, degree, 4 * window);
    source.differential(&w, window)
}

/// Degree-zero 3-cocycle replay fixture.
pub fn psi3_fixture(seed: u64, window: i64) -> Result<Psi3> {
    Psi3::from_cochain(&coboundary_fixture(seed, 3, 0, window)?)
}

/// Degree-zero 1-cocycle fixture psi_i = c * i, the coboundary of c e_0.
pub fn psi1_fixture(scale: &Rational, window: i64) -> Psi1 {
    let mut psi = Psi1::new(window);
    for i in -window..=window {
        psi.set(i, scale * int(i));
    }
    psi
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::module_of;
    use crate::rational::frac;

    #[test]
    fn psi3_alternating_access() {
        let mut psi = Psi3::new(4);
        psi.set_sorted(-1, 0, 2, frac(3, 2));
        assert_eq!(psi.get(-1, 0, 2).unwrap(), frac(3, 2));
        assert_eq!(psi.get(0, -1, 2).unwrap(), frac(-3, 2));
        assert_eq!(psi.get(2, 0, -1).unwrap(), frac(-3, 2));
        assert!(psi.get(1, 1, 2).unwrap().is_zero());
        assert!(psi.get(5, 0, -1).is_none(), "outside window");
    }

    #[test]
    fn phi_gauge_is_built_in() {
        let phi = Phi2::default();
        assert!(phi.get(7, 1).unwrap().is_zero());
        assert!(phi.get(1, -3).unwrap().is_zero());
        assert!(phi.get(-1, 2).unwrap().is_zero());
        assert!(phi.get(2, -1).unwrap().is_zero());
        assert!(phi.get(4, 4).unwrap().is_zero());
        assert!(phi.get(0, -1).is_none(), "not yet defined");
    }

    #[test]
    fn delta_phi_matches_generic_differential() {
        // The closed-form degree-zero coboundary expansion used by the
        // replay must agree with the generic machinery on a gauge-respecting
        // random 2-cochain.
        let w = algebra::witt();
        let adj = module_of(&w, ModuleKind::Adjoint).unwrap();
        let chi = random_witt_cochain(5, 2, 0, 8);
        let mut gauged = HomogeneousCochain::new(2, 0, adj, Domain::Global);
        let mut phi = Phi2::default();
        for a in -8..=8i64 {
            for b in (a + 1)..=8 {
                if a == 1 || b == 1 || (a, b) == (-1, 2) {
                    continue;
                }
                let v = chi.evaluate(&[e(a), e(b)]).unwrap().coefficient(e(a + b));
                gauged.insert(&[e(a), e(b)], e(a + b), v.clone()).unwrap();
                phi.set(a, b, v);
            }
        }
        let state = NormalizationState {
            psi: Psi3::new(16),
            phi,
            log: vec![],
        };
        for (i, j, k) in [
            (-2i64, 0i64, 3i64),
            (-3, -2, 2),
            (0, 2, 3),
            (-3, -1, 0),
            (2, 3, 4),
        ] {
            let via_replay = state.delta_phi(i, j, k).unwrap();
            let via_generic = gauged
                .differential_value(&w, &[e(i), e(j), e(k)])
                .unwrap()
                .coefficient(e(i + j + k));
            assert_eq!(via_replay, via_generic, "mismatch at ({i},{j},{k})");
        }
    }

    #[test]
    fn normalize_zero_cocycle() {
        let psi = Psi3::new(8);
        let state = normalize_3cocycle(&psi).unwrap();
        for entry in &state.log {
            if entry.anchor.starts_with("normalize/case") {
                assert!(entry.value.is_zero(), "phi must vanish for psi = 0");
            }
        }
        let cert = level_vanish_check(&state).unwrap();
        assert!(cert.residuals.is_empty());
        assert!(cert.certified_radius >= 4);
    }

    #[test]
    fn normalize_rejects_small_window() {
        let psi = Psi3::new(5);
        assert!(matches!(
            normalize_3cocycle(&psi),
            Err(EngineError::WindowTooSmall { need: 8, .. })
        ));
    }

    #[test]
    fn normalization_case2_pivot_formula() {
        // phi_{0,2} = -phi_{0,-1} - psi_{0,2,-1}/3.
        let psi = psi3_fixture(42, 8).unwrap();
        let state = normalize_3cocycle(&psi).unwrap();
        let lhs = state.phi.get(0, 2).unwrap();
        let rhs = -state.phi.get(0, -1).unwrap() - psi.get(0, 2, -1).unwrap() / int(3);
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn normalization_annihilates_pivot_families() {
        let psi = psi3_fixture(7, 8).unwrap();
        let state = normalize_3cocycle(&psi).unwrap();
        for i in -8..=0 {
            for j in -8..=8 {
                if let Some(v) = state.psi_prime(i, j, 1) {
                    assert!(v.is_zero(), "psi'_{{{i},{j},1}} != 0");
                }
            }
        }
        for i in 1..=8 {
            for j in (i + 1)..=8 {
                if let Some(v) = state.psi_prime(i, j, -1) {
                    assert!(v.is_zero(), "psi'_{{{i},{j},-1}} != 0");
                }
            }
        }
        assert!(state.psi_prime(-4, 2, -2).unwrap().is_zero());
    }

    #[test]
    fn end_to_end_replay_on_seeded_fixtures() {
        for seed in [1u64, 2, 3] {
            let psi = psi3_fixture(seed, 8).unwrap();
            let state = normalize_3cocycle(&psi).unwrap();
            let cert = level_vanish_check(&state).unwrap();
            assert!(cert.residuals.is_empty(), "seed {seed}");
            assert!(
                cert.certified_radius >= 4,
                "seed {seed}: {}",
                cert.certified_radius
            );
        }
    }

    #[test]
    fn constructed_phi_agrees_with_generic_coboundary() {
        // The normalization is cohomologically neutral: psi - psi' must be
        // delta of the constructed phi also when delta is computed by the
        // generic machinery instead of the replay's closed form.
        let w = algebra::witt();
        let adj = module_of(&w, ModuleKind::Adjoint).unwrap();
        let psi = psi3_fixture(21, 8).unwrap();
        let state = normalize_3cocycle(&psi).unwrap();
        let mut phi_cochain = HomogeneousCochain::new(2, 0, adj, Domain::Global);
        for a in -16..=16i64 {
            for b in (a + 1)..=16 {
                if let Some(v) = state.phi.get(a, b) {
                    phi_cochain.insert(&[e(a), e(b)], e(a + b), v).unwrap();
                }
            }
        }
        for (i, j, k) in [
            (-2i64, 1i64, 3i64),
            (-3, -1, 2),
            (0, 2, 4),
            (-4, -2, -1),
            (1, 2, 3),
        ] {
            let Some(expected) = state.delta_phi(i, j, k) else {
                panic!("delta_phi must be computable at ({i},{j},{k})");
            };
            let generic = phi_cochain
                .differential_value(&w, &[e(i), e(j), e(k)])
                .unwrap()
                .coefficient(e(i + j + k));
            assert_eq!(generic, expected, "mismatch at ({i},{j},{k})");
            let diff = psi.get(i, j, k).unwrap() - state.psi_prime(i, j, k).unwrap();
            assert_eq!(diff, expected, "psi - psi' != delta(phi) at ({i},{j},{k})");
        }
    }

    #[test]
    fn replay_log_is_deterministic() {
        let run = |seed: u64| {
            let psi = psi3_fixture(seed, 8).unwrap();
            let state = normalize_3cocycle(&psi).unwrap();
            let cert = level_vanish_check(&state).unwrap();
            let mut all: Vec<String> = state.log.iter().map(|l| l.to_json().to_string()).collect();
            all.extend(cert.log.iter().map(|l| l.to_json().to_string()));
            all
        };
        assert_eq!(run(11), run(11));
        assert_ne!(run(11), run(12), "different seeds give different tables");
    }

    #[test]
    fn level_check_reports_nonzero_residual() {
        // Perturb a coboundary fixture off the cocycle space; the walk must
        // fail loudly rather than certify.
        let mut psi = psi3_fixture(3, 8).unwrap();
        let bump = psi.get(2, 3, 4).unwrap() + int(1);
        psi.set_sorted(2, 3, 4, bump);
        let state = normalize_3cocycle(&psi).unwrap();
        let out = level_vanish_check(&state);
        assert!(
            matches!(
                out,
                Err(EngineError::NonzeroResidual { .. }) | Err(EngineError::NotACocycle(_))
            ),
            "perturbed input must not certify"
        );
    }

    #[test]
    fn h1_replay_on_coboundary_and_zero() {
        let psi = psi1_fixture(&frac(7, 3), 8);
        let cert = h1_replay(&psi).unwrap();
        assert!(cert.residuals.is_empty());
        assert_eq!(cert.certified_radius, 8);

        let zero = Psi1::new(6);
        assert!(h1_replay(&zero).unwrap().residuals.is_empty());

        let mut bad = psi1_fixture(&int(1), 8);
        bad.set(4, int(100));
        assert!(h1_replay(&bad).is_err());
    }

    #[test]
    fn fuks_homotopy_q1() {
        // psi = delta_0 (a e_d): psi(e_n) = -a (d - n) e_{n+d}; the homotopy
        // must reproduce phi up to the gauge freedom killed by d != 0.
        let w = algebra::witt();
        let adj = module_of(&w, ModuleKind::Adjoint).unwrap();
        let d = 2i64;
        let mut source = HomogeneousCochain::new(0, d, adj, Domain::Global);
        source.insert(&[], e(d), frac(5, 4)).unwrap();
        let psi = source.differential(&w, 8).unwrap();
        let out = fuks_homotopy(&psi, &w).unwrap();
        assert_eq!(out.phi.arity(), 0);
        // phi = -(1/d) psi(e_0) = -(1/2) * (-5/4)(2-0) e_2 = 5/4 e_2.
        assert_eq!(out.phi.coefficient(&[], e(d)).unwrap(), frac(5, 4));
    }

    #[test]
    fn fuks_homotopy_q3_random_coboundary() {
        let w = algebra::witt();
        for (seed, d) in [(1u64, 2i64), (2, -1), (3, 1), (4, -2)] {
            let psi = coboundary_fixture(seed, 3, d, 10).unwrap();
            let out = fuks_homotopy(&psi, &w).unwrap();
            assert_eq!(out.residual_radius, 5);
        }
    }

    #[test]
    fn fuks_homotopy_rejects_degree_zero_and_zero_input() {
        let w = algebra::witt();
        let psi = coboundary_fixture(5, 3, 0, 8).unwrap();
        assert!(fuks_homotopy(&psi, &w).is_err());

        let adj = module_of(&w, ModuleKind::Adjoint).unwrap();
        let zero = HomogeneousCochain::new(3, 2, adj, Domain::Window(8));
        let out = fuks_homotopy(&zero, &w).unwrap();
        assert!(out.phi.is_zero(), "phi = 0 for psi = 0");
    }

    #[test]
    fn fuks_homotopy_rejects_non_cocycles() {
        let w = algebra::witt();
        let mut psi = coboundary_fixture(6, 3, 1, 10).unwrap();
        psi.insert(&[e(-1), e(0), e(2)], e(2), int(1)).unwrap();
        assert!(matches!(
            fuks_homotopy(&psi, &w),
            Err(EngineError::NotACocycle(_))
        ));
    }
}
