//! The topology-change decision engine.
//!
//! Given a description of a critical level being passed — manifold
//! dimension, the critical points on the level with their indices, and
//! optionally the vector-bundle context of a natural Hamiltonian — `verdict`
//! answers whether the homology of the level sets MUST change, MAY fail to
//! change (with a named counterexample), or no implemented rule applies.
//! `allowed_deltas` encodes the admissible per-dimension Betti-number
//! changes for a single critical point of index `k` away from the middle
//! dimension, and `check_conformance` tests computed sweeps against them.

use num_rational::BigRational;
use serde::Serialize;
use thiserror::Error;

use crate::chaincore::{CellComplex, CoefficientSpec};
use crate::homology::{cycle_class_order, CycleChain, HomologyError};
use crate::levelset::{Level, SweepTable};

#[derive(Debug, Error)]
pub enum RuleError {
    #[error("critical point index {index} out of range for manifold dimension {m}")]
    IndexOutOfRange { index: usize, m: usize },
    #[error("query has no critical points")]
    EmptyQuery,
    #[error("manifold dimension must be at least 1")]
    BadDimension,
    #[error("the delta rules do not constrain the middle dimension k = m/2 (k={0})")]
    MiddleDimension(usize),
    #[error("bundle context: euler number given but the bundle is not closed orientable over an orientable base")]
    EulerNeedsOrientedClosed,
    #[error("bundle rank {rank} does not match manifold dimension {m} (expected m = 2 rank)")]
    RankMismatch { rank: usize, m: usize },
    #[error(transparent)]
    Homology(#[from] HomologyError),
}

/// One critical point (or a symmetric family of `count` points of the same
/// index) on the critical level.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriticalPointRecord {
    pub value: f64,
    pub index: usize,
    pub count: usize,
    /// `Some(true/false)` when it is known whether this point is a global
    /// maximum of the base potential; `None` when unknown.
    pub is_global_max_of_v: Option<bool>,
    pub non_degenerate: bool,
}

impl CriticalPointRecord {
    pub fn new(value: f64, index: usize) -> Self {
        CriticalPointRecord {
            value,
            index,
            count: 1,
            is_global_max_of_v: None,
            non_degenerate: true,
        }
    }

    pub fn with_count(mut self, count: usize) -> Self {
        self.count = count;
        self
    }

    pub fn global_max(mut self, yes: bool) -> Self {
        self.is_global_max_of_v = Some(yes);
        self
    }
}

/// Vector-bundle context for natural Hamiltonians `H = K + V` on a rank-`n`
/// bundle over an `n`-manifold.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BundleContext {
    pub rank: usize,
    pub base_closed: bool,
    pub base_orientable: bool,
    pub bundle_orientable: bool,
    /// Defined only for closed orientable bundles over orientable bases.
    pub euler_number: Option<i64>,
    /// The bundle restricted outside a disk in the base is trivial.
    pub trivial_outside_disk: bool,
    pub is_cotangent: bool,
}

impl BundleContext {
    pub fn validate(&self) -> Result<(), RuleError> {
        if self.euler_number.is_some()
            && !(self.base_closed && self.base_orientable && self.bundle_orientable)
        {
            return Err(RuleError::EulerNeedsOrientedClosed);
        }
        Ok(())
    }
}

/// A critical-level pass to be judged.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LevelPassQuery {
    /// Dimension of the ambient manifold (level sets have dimension m-1).
    pub m: usize,
    pub points: Vec<CriticalPointRecord>,
    pub bundle: Option<BundleContext>,
    /// Palais-Smale-type assumptions declared to hold.
    pub assumptions_hold: bool,
}

impl LevelPassQuery {
    pub fn new(m: usize, points: Vec<CriticalPointRecord>) -> Self {
        LevelPassQuery {
            m,
            points,
            bundle: None,
            assumptions_hold: true,
        }
    }

    pub fn with_bundle(mut self, bundle: BundleContext) -> Self {
        self.bundle = Some(bundle);
        self
    }

    pub fn validate(&self) -> Result<(), RuleError> {
        if self.m == 0 {
            return Err(RuleError::BadDimension);
        }
        if self.points.is_empty() {
            return Err(RuleError::EmptyQuery);
        }
        for p in &self.points {
            if p.index > self.m {
                return Err(RuleError::IndexOutOfRange {
                    index: p.index,
                    m: self.m,
                });
            }
        }
        if let Some(b) = &self.bundle {
            b.validate()?;
            if self.m != 2 * b.rank {
                return Err(RuleError::RankMismatch {
                    rank: b.rank,
                    m: self.m,
                });
            }
        }
        Ok(())
    }

    /// The query for `-f`: every index `k` replaced by `m - k`.
    pub fn mirrored(&self) -> LevelPassQuery {
        let mut q = self.clone();
        for p in &mut q.points {
            p.index = self.m - p.index;
        }
        q
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Outcome {
    MustChange,
    MayNotChange,
    NoRule,
}

/// What distinguishes the two sides when a change is forced, or which known
/// example blocks the conclusion.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Witness {
    /// A coefficient system distinguishing the levels.
    Coefficients(CoefficientSpec),
    /// Real coefficients (same Betti numbers as the rationals).
    RealCoefficients,
    /// Named counterexample family with equal homology on both sides.
    Counterexample(String),
}

impl std::fmt::Display for Witness {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Witness::Coefficients(c) => write!(f, "{c}"),
            Witness::RealCoefficients => write!(f, "R"),
            Witness::Counterexample(name) => write!(f, "{name}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    pub outcome: Outcome,
    /// Primary rule citation (first hit in the fixed cascade).
    pub rule: String,
    /// Every applicable rule, primary first.
    pub all_rules: Vec<String>,
    pub witness: Option<Witness>,
    pub reason: Option<String>,
}

impl Verdict {
    fn must(rules: Vec<&str>, witness: Option<Witness>) -> Self {
        Verdict {
            outcome: Outcome::MustChange,
            rule: rules[0].to_string(),
            all_rules: rules.into_iter().map(str::to_string).collect(),
            witness,
            reason: None,
        }
    }
}

/// The rule cascade. Fixed priority; all applicable rules are reported.
///
/// 1. every point has the same index `k != m/2` -> must change;
/// 2. some point of index `k != m/2` with no other point of index
///    `k-1`, `k+1` or `m-k` -> must change;
/// with a bundle context:
/// 3. a single point that is not a global maximum -> must change;
/// 4. `L >= 3` global maxima -> must change;
/// 5. `L = 1` and euler number not `+-1` -> must change, witnessed by
///    `Z_|e|` (real coefficients when `e = 0`);
/// 6. `L = 2` and euler number nonzero -> must change (real witness);
/// 7. trivial outside a disk and rank not 2, 4 or 8 -> must change;
/// otherwise may-not-change with a named counterexample when one is known,
/// else no rule.
pub fn verdict(q: &LevelPassQuery) -> Result<Verdict, RuleError> {
    q.validate()?;
    if !q.assumptions_hold {
        return Ok(Verdict {
            outcome: Outcome::NoRule,
            rule: "none".into(),
            all_rules: Vec::new(),
            witness: None,
            reason: Some("compactness assumptions not declared".into()),
        });
    }
    if q.points.iter().any(|p| !p.non_degenerate) {
        return Ok(Verdict {
            outcome: Outcome::NoRule,
            rule: "none".into(),
            all_rules: Vec::new(),
            witness: None,
            reason: Some("degenerate critical point on the level".into()),
        });
    }
    let m = q.m;
    let middle = |k: usize| 2 * k == m;
    let mut rules: Vec<&str> = Vec::new();

    // 1: uniform index away from the middle
    let first = q.points[0].index;
    if q.points.iter().all(|p| p.index == first) && !middle(first) {
        rules.push("thm:level");
    }
    // 2: an index away from the middle isolated from k-1, k+1 and m-k
    for p in &q.points {
        let k = p.index;
        if middle(k) {
            continue;
        }
        let forbidden = [k.checked_sub(1), Some(k + 1), Some(m - k)];
        let clash = q
            .points
            .iter()
            .any(|other| forbidden.iter().flatten().any(|&f| other.index == f));
        if !clash {
            rules.push("thm:level2");
            break;
        }
    }
    // bundle rules, in the fixed cascade order
    let mut euler_witness: Option<Witness> = None;
    if let Some(b) = &q.bundle {
        let total: usize = q.points.iter().map(|p| p.count).sum();
        let global_count: usize = q
            .points
            .iter()
            .filter(|p| p.is_global_max_of_v == Some(true))
            .map(|p| p.count)
            .sum();
        let all_global = q.points.iter().all(|p| p.is_global_max_of_v == Some(true));
        if total == 1 && q.points[0].is_global_max_of_v == Some(false) {
            rules.push("cor:not_global_maximum");
        }
        if all_global && global_count >= 3 {
            rules.push("cor:many_global_maxima");
        }
        if let Some(e) = b.euler_number {
            if all_global && global_count == 1 && e != 1 && e != -1 {
                rules.push("thm:closed_manifold(1)");
                euler_witness = Some(if e == 0 {
                    Witness::RealCoefficients
                } else {
                    Witness::Coefficients(CoefficientSpec::IntegersMod(e.unsigned_abs()))
                });
            }
            if all_global && global_count == 2 && e != 0 {
                rules.push("thm:closed_manifold(2)");
            }
        }
        if b.trivial_outside_disk && ![2, 4, 8].contains(&b.rank) {
            rules.push("prop:adams");
        }
    }

    if !rules.is_empty() {
        // the witness follows the primary rule: Betti-based rules
        // distinguish over any field, the L=1 Euler rule names Z_|e|
        let witness = match rules[0] {
            "thm:closed_manifold(1)" => euler_witness,
            "thm:closed_manifold(2)" => Some(Witness::RealCoefficients),
            "prop:adams" => None,
            _ => Some(Witness::Coefficients(CoefficientSpec::Rationals)),
        };
        return Ok(Verdict::must(rules, witness));
    }

    // no change forced: name a counterexample when one is known
    if let Some(b) = &q.bundle {
        if b.euler_number == Some(1) || b.euler_number == Some(-1) {
            return Ok(Verdict {
                outcome: Outcome::MayNotChange,
                rule: "remark:hopf".into(),
                all_rules: vec!["remark:hopf".into()],
                witness: Some(Witness::Counterexample("Hopf bundle".into())),
                reason: None,
            });
        }
        return Ok(Verdict {
            outcome: Outcome::NoRule,
            rule: "none".into(),
            all_rules: Vec::new(),
            witness: None,
            reason: Some("euler number unknown or rules inapplicable".into()),
        });
    }
    if m % 2 == 0 && q.points.iter().all(|p| middle(p.index)) {
        let name = match m {
            2 => "RP(2) perfect Morse".to_string(),
            4 => "CP(2) perfect Morse".to_string(),
            _ => format!("RP({m}) perfect Morse"),
        };
        return Ok(Verdict {
            outcome: Outcome::MayNotChange,
            rule: "ex:nonor".into(),
            all_rules: vec!["ex:nonor".into()],
            witness: Some(Witness::Counterexample(name)),
            reason: None,
        });
    }
    Ok(Verdict {
        outcome: Outcome::NoRule,
        rule: "none".into(),
        all_rules: Vec::new(),
        witness: None,
        reason: Some("mixed indices outside the implemented rules".into()),
    })
}

/// Admissible per-dimension Betti deltas for a pass of a single
/// non-degenerate critical point of index `k` on an `m`-manifold, away from
/// the middle dimension.
///
/// For `k > m/2` the pass is mirrored through `g = -f`: the same point has
/// `g`-index `m - k`, and the `g`-pass sees the two levels in the opposite
/// order, so the constraints apply to the negated deltas. The set of
/// dimensions where a change is admissible is symmetric in `k <-> m - k`
/// and needs no transformation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DeltaRule {
    pub m: usize,
    /// Index normalized to the lower half (`min(k, m - k)`).
    pub k: usize,
    /// True when the rule was mirrored from index `m - k`.
    pub mirrored: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum DeltaViolation {
    /// Nonzero delta in a dimension where no change is admissible.
    ForbiddenDimension { dim: usize, delta: i64 },
    /// `j_{k-1}` and `j_k` are both nonzero.
    BothActive { jk1: i64, jk: i64 },
    /// `j_{k-1} = 0` but `j_k` is not an admissible increment.
    BadIncrement { jk: i64, allowed_two: bool },
    /// `j_k = 0` but `j_{k-1}` is not `-1`.
    BadDecrement { jk1: i64 },
}

impl DeltaRule {
    /// Dimensions of the level set in which a delta is admissible.
    pub fn allowed_dims(&self) -> Vec<usize> {
        let (m, k) = (self.m, self.k);
        let mut dims: Vec<usize> = [
            k.checked_sub(1),
            Some(k),
            (m - k).checked_sub(1),
            Some(m - k),
            m.checked_sub(2),
            m.checked_sub(1),
        ]
        .into_iter()
        .flatten()
        .filter(|&d| d + 1 <= m)
        .collect();
        dims.sort_unstable();
        dims.dedup();
        dims
    }

    /// Checks observed per-dimension Betti deltas (index = level-set
    /// dimension; missing entries are zero). For a mirrored rule the deltas
    /// are negated first.
    pub fn check(&self, deltas: &[i64]) -> Vec<DeltaViolation> {
        let m = self.m;
        let sign: i64 = if self.mirrored { -1 } else { 1 };
        let view = |d: usize| -> i64 { sign * deltas.get(d).copied().unwrap_or(0) };
        let mut violations = Vec::new();
        let allowed: std::collections::BTreeSet<usize> =
            self.allowed_dims().into_iter().collect();
        for (d, &j) in deltas.iter().enumerate() {
            if j != 0 && !allowed.contains(&d) {
                violations.push(DeltaViolation::ForbiddenDimension { dim: d, delta: j });
            }
        }
        let k = self.k;
        let jk = view(k);
        let jk1 = if k == 0 { 0 } else { view(k - 1) };
        if jk1 != 0 && jk != 0 {
            violations.push(DeltaViolation::BothActive { jk1, jk });
        }
        if jk1 == 0 {
            let allowed_two = 2 * k == m - 1;
            let ok = jk == 1 || (allowed_two && jk == 2);
            if !ok {
                violations.push(DeltaViolation::BadIncrement { jk, allowed_two });
            }
        }
        if jk == 0 && jk1 != -1 {
            violations.push(DeltaViolation::BadDecrement { jk1 });
        }
        violations
    }
}

/// Constraint set for a single index-`k` pass on an `m`-manifold.
/// Rejects the middle dimension `k = m/2`.
pub fn allowed_deltas(k: usize, m: usize) -> Result<DeltaRule, RuleError> {
    if m == 0 {
        return Err(RuleError::BadDimension);
    }
    if k > m {
        return Err(RuleError::IndexOutOfRange { index: k, m });
    }
    if 2 * k == m {
        return Err(RuleError::MiddleDimension(k));
    }
    if 2 * k < m {
        Ok(DeltaRule {
            m,
            k,
            mirrored: false,
        })
    } else {
        Ok(DeltaRule {
            m,
            k: m - k,
            mirrored: true,
        })
    }
}

/// Admissible change of the `(n-1)`-Betti number of the level sets when
/// passing a non-degenerate local maximum of the base potential.
pub fn maxima_delta_rule(is_global: bool) -> Vec<i64> {
    if is_global {
        vec![-1, 0, 1]
    } else {
        vec![-1]
    }
}

/// Conformance of a computed sweep against declared critical points.
#[derive(Debug, Clone, Serialize)]
pub struct ConformanceReport {
    pub entries: Vec<ConformanceEntry>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConformanceEntry {
    pub interval: (Level, Level),
    pub jumped: bool,
    pub declared: Vec<CriticalPointRecord>,
    pub status: ConformanceStatus,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum ConformanceStatus {
    Conformant,
    Violation(Vec<DeltaViolation>),
    /// The delta rules do not apply (middle dimension or several points).
    Exempt(String),
    /// Jump with no declared point, or declared point with no level pair.
    Misaligned(String),
}

impl ConformanceReport {
    pub fn violations(&self) -> usize {
        self.entries
            .iter()
            .filter(|e| matches!(e.status, ConformanceStatus::Violation(_)))
            .count()
    }

    pub fn is_conformant(&self) -> bool {
        self.violations() == 0
    }
}

/// Checks every interval of the sweep with the critical points declared in
/// it: a single clean index-`k` point away from the middle dimension must
/// produce deltas inside `allowed_deltas(k, m)`; other intervals are exempt
/// or flagged as misaligned. Misalignment is reported, not fatal.
pub fn check_conformance(
    table: &SweepTable,
    declared: &[(f64, Vec<CriticalPointRecord>)],
    m: usize,
) -> Result<ConformanceReport, RuleError> {
    if m == 0 {
        return Err(RuleError::BadDimension);
    }
    let mut entries = Vec::new();
    for w in 0..table.entries.len().saturating_sub(1) {
        let (lo, hi) = (&table.entries[w], &table.entries[w + 1]);
        let (la, lb) = (lo.level.as_f64(), hi.level.as_f64());
        let inside: Vec<CriticalPointRecord> = declared
            .iter()
            .filter(|(v, _)| *v > la && *v < lb)
            .flat_map(|(_, recs)| recs.iter().cloned())
            .collect();
        let jumped = lo.summary != hi.summary;
        let max_dim = lo.summary.dims.len().max(hi.summary.dims.len()).max(m);
        let deltas: Vec<i64> = (0..max_dim)
            .map(|l| hi.summary.betti(l) as i64 - lo.summary.betti(l) as i64)
            .collect();
        let status = if inside.is_empty() {
            if jumped {
                ConformanceStatus::Misaligned("jump without a declared critical value".into())
            } else {
                ConformanceStatus::Conformant
            }
        } else if inside.len() > 1 || inside[0].count > 1 {
            ConformanceStatus::Exempt("several critical points on the level".into())
        } else if !inside[0].non_degenerate {
            ConformanceStatus::Exempt("degenerate critical point".into())
        } else {
            let k = inside[0].index;
            if 2 * k == m {
                ConformanceStatus::Exempt("middle dimension".into())
            } else {
                let rule = allowed_deltas(k, m)?;
                let violations = rule.check(&deltas);
                if violations.is_empty() {
                    ConformanceStatus::Conformant
                } else {
                    ConformanceStatus::Violation(violations)
                }
            }
        };
        entries.push(ConformanceEntry {
            interval: (lo.level.clone(), hi.level.clone()),
            jumped,
            declared: inside,
            status,
        });
    }
    Ok(ConformanceReport { entries })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum MiddleDimVerdict {
    Different,
    Inconclusive,
}

/// The middle-dimension criterion: the two levels differ when the attaching
/// cycles have different orders in the homology of the common part `U`.
pub fn middle_dim_criterion(
    u: &CellComplex,
    z_a: &CycleChain,
    z_b: &CycleChain,
) -> Result<MiddleDimVerdict, RuleError> {
    let oa = cycle_class_order(u, z_a)?;
    let ob = cycle_class_order(u, z_b)?;
    Ok(if oa != ob {
        MiddleDimVerdict::Different
    } else {
        MiddleDimVerdict::Inconclusive
    })
}

/// Convenience for building PL sweep conformance inputs: pair each distinct
/// critical value with its records.
pub fn declared_from_pl(
    criticals: &[(BigRational, CriticalPointRecord)],
) -> Vec<(f64, Vec<CriticalPointRecord>)> {
    use crate::levelset::rational_to_f64;
    let mut grouped: Vec<(f64, Vec<CriticalPointRecord>)> = Vec::new();
    let mut sorted: Vec<_> = criticals.to_vec();
    sorted.sort_by(|a, b| a.0.cmp(&b.0));
    for (v, rec) in sorted {
        let vf = rational_to_f64(&v);
        match grouped.last_mut() {
            Some((lv, recs)) if *lv == vf => recs.push(rec),
            _ => grouped.push((vf, vec![rec])),
        }
    }
    grouped
}

#[cfg(test)]
mod tests;
