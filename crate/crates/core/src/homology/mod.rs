//! Homology over `Q`, `F_p`, `Z` and `Z_k`; relative homology of pairs;
//! induced maps; orders of cycle classes.
//!
//! Integral homology runs Smith normal form on the boundary matrices after
//! exact unit-pivot reduction; `Z_k` homology is always derived from the
//! integral summary by universal coefficients (`Z_k` is not a PID for
//! composite `k`, so direct reduction would be unsound). Field Betti numbers
//! come from exact elimination. Everything is deterministic.

pub mod field;
pub mod reduce;
pub mod snf;

use std::collections::BTreeSet;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::chaincore::{
    check_face_closed, CellComplex, CellId, CoefficientError, CoefficientSpec, ComplexBuilder,
    SubcomplexError,
};
use field::{FMatrix, Field, HomologySpace, PrimeField, Rationals};
use reduce::{reduced_core, CoreComplex};
use snf::{smith_normal_form, IntMatrix};

#[derive(Debug, Error)]
pub enum HomologyError {
    #[error("coefficient system {0} is not a field")]
    NotAField(CoefficientSpec),
    #[error(transparent)]
    BadCoefficient(#[from] CoefficientError),
    #[error(transparent)]
    BadSubcomplex(#[from] SubcomplexError),
    #[error("chain is not a cycle: boundary is nonzero on cell {0}")]
    NotACycle(CellId),
    #[error("chain map does not commute with boundaries at source cell {0}")]
    NotAChainMap(CellId),
    #[error("cell index out of range: {0}")]
    OutOfRange(CellId),
    #[error("summary has {0} coefficients; integral summary required")]
    NotIntegral(CoefficientSpec),
    #[error("modulus {0} is below 2")]
    BadModulus(u64),
}

/// Per-dimension result: free rank plus invariant factors.
///
/// For field coefficients `torsion` is empty. For `Z` it is the invariant
/// factor list (sorted, each dividing the next). For `Z_k` the cyclic
/// decomposition is normalized so that full `Z_k` factors count toward
/// `betti` and the strictly smaller cyclic factors are listed in `torsion`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DimSummary {
    pub betti: usize,
    pub torsion: Vec<u64>,
}

impl DimSummary {
    fn is_trivial(&self) -> bool {
        self.betti == 0 && self.torsion.is_empty()
    }
}

/// Homology of a complex in one coefficient system, canonically normalized:
/// torsion sorted ascending, trailing trivial dimensions trimmed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HomologySummary {
    pub coeff: CoefficientSpec,
    pub dims: Vec<DimSummary>,
}

impl HomologySummary {
    pub fn new(coeff: CoefficientSpec, mut dims: Vec<DimSummary>) -> Self {
        for d in &mut dims {
            d.torsion.sort_unstable();
        }
        while dims.last().is_some_and(DimSummary::is_trivial) {
            dims.pop();
        }
        HomologySummary { coeff, dims }
    }

    pub fn betti(&self, l: usize) -> usize {
        self.dims.get(l).map_or(0, |d| d.betti)
    }

    pub fn torsion(&self, l: usize) -> &[u64] {
        self.dims.get(l).map_or(&[], |d| d.torsion.as_slice())
    }

    /// Betti numbers padded/truncated to length `len`.
    pub fn betti_vector(&self, len: usize) -> Vec<usize> {
        (0..len).map(|l| self.betti(l)).collect()
    }

    /// Poincare polynomial coefficients (field summaries).
    pub fn poincare(&self) -> Vec<i64> {
        self.dims.iter().map(|d| d.betti as i64).collect()
    }

    /// Alternating sum of Betti numbers.
    pub fn euler_characteristic(&self) -> i64 {
        self.dims
            .iter()
            .enumerate()
            .map(|(d, s)| {
                let b = s.betti as i64;
                if d % 2 == 0 {
                    b
                } else {
                    -b
                }
            })
            .sum()
    }
}

impl Serialize for HomologySummary {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Dim<'a> {
            betti: usize,
            torsion: &'a [u64],
        }
        let mut map = serializer.serialize_map(Some(2))?;
        map.serialize_entry("coeff", &self.coeff.to_string())?;
        let dims: std::collections::BTreeMap<String, Dim> = self
            .dims
            .iter()
            .enumerate()
            .map(|(d, s)| {
                (
                    d.to_string(),
                    Dim {
                        betti: s.betti,
                        torsion: &s.torsion,
                    },
                )
            })
            .collect();
        map.serialize_entry("dims", &dims)?;
        map.end()
    }
}

impl std::fmt::Display for HomologySummary {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[{}] ", self.coeff)?;
        let parts: Vec<String> = self
            .dims
            .iter()
            .enumerate()
            .map(|(d, s)| {
                if s.torsion.is_empty() {
                    format!("b{d}={}", s.betti)
                } else {
                    let t: Vec<String> = s.torsion.iter().map(|t| t.to_string()).collect();
                    format!("b{d}={} t{d}=[{}]", s.betti, t.join(","))
                }
            })
            .collect();
        write!(f, "{}", parts.join(" "))
    }
}

/// Homology in the requested coefficient system.
pub fn homology(c: &CellComplex, coeff: &CoefficientSpec) -> Result<HomologySummary, HomologyError> {
    coeff.validate()?;
    match coeff {
        CoefficientSpec::Rationals | CoefficientSpec::PrimeField(_) => {
            let betti = homology_field(c, coeff)?;
            Ok(HomologySummary::new(
                coeff.clone(),
                betti
                    .into_iter()
                    .map(|b| DimSummary {
                        betti: b,
                        torsion: Vec::new(),
                    })
                    .collect(),
            ))
        }
        CoefficientSpec::Integers => Ok(homology_integral(c)),
        CoefficientSpec::IntegersMod(k) => homology_mod_k(&homology_integral(c), *k),
    }
}

/// Betti numbers over a coefficient field, by exact elimination on the
/// reduced core.
pub fn homology_field(c: &CellComplex, coeff: &CoefficientSpec) -> Result<Vec<usize>, HomologyError> {
    coeff.validate()?;
    let core = reduced_core(c);
    match coeff {
        CoefficientSpec::Rationals => Ok(core_betti(&Rationals, &core)),
        CoefficientSpec::PrimeField(p) => Ok(core_betti(&PrimeField::new(*p), &core)),
        other => Err(HomologyError::NotAField(other.clone())),
    }
}

fn core_betti<F: Field>(f: &F, core: &CoreComplex) -> Vec<usize> {
    let top = core.counts.len();
    let mut ranks = vec![0usize; top + 1];
    for d in 1..top {
        let rows = core.counts[d - 1];
        ranks[d] = field::sparse_rank(f, rows, &core.columns[d]);
    }
    (0..top)
        .map(|d| core.counts[d] - ranks[d] - ranks[d + 1])
        .collect()
}

/// Integral homology: Betti numbers and invariant factors via Smith normal
/// form of the reduced boundary matrices.
pub fn homology_integral(c: &CellComplex) -> HomologySummary {
    let core = reduced_core(c);
    let top = core.counts.len();
    let mut ranks = vec![0usize; top + 1];
    let mut torsion: Vec<Vec<u64>> = vec![Vec::new(); top + 1];
    for d in 1..top {
        let m = IntMatrix::from_sparse_columns(core.counts[d - 1], &core.columns[d]);
        let snf = smith_normal_form(&m, false);
        ranks[d] = snf.rank;
        torsion[d - 1] = snf
            .diag
            .iter()
            .filter(|x| !x.is_one())
            .map(|x| u64::try_from(x).expect("invariant factor exceeds u64"))
            .collect();
    }
    let dims = (0..top)
        .map(|d| DimSummary {
            betti: core.counts[d] - ranks[d] - ranks[d + 1],
            torsion: torsion[d].clone(),
        })
        .collect();
    HomologySummary::new(CoefficientSpec::Integers, dims)
}

/// `Z_k` homology from an integral summary, by universal coefficients:
/// `H_l(X; Z_k) = (Z_k)^{b_l} + sum_t Z_gcd(t,k) (t in torsion_l)
///                           + sum_t Z_gcd(t,k) (t in torsion_{l-1})`.
pub fn homology_mod_k(integral: &HomologySummary, k: u64) -> Result<HomologySummary, HomologyError> {
    if integral.coeff != CoefficientSpec::Integers {
        return Err(HomologyError::NotIntegral(integral.coeff.clone()));
    }
    if k < 2 {
        return Err(HomologyError::BadModulus(k));
    }
    // one dimension above the last integral entry can still carry a Tor
    // contribution from the torsion below it
    let top = integral.dims.len() + 1;
    let mut dims = Vec::with_capacity(top);
    for l in 0..top {
        let mut factors: Vec<u64> = Vec::new();
        factors.extend(std::iter::repeat(k).take(integral.betti(l)));
        for &t in integral.torsion(l) {
            factors.push(t.gcd(&k));
        }
        if l > 0 {
            for &t in integral.torsion(l - 1) {
                factors.push(t.gcd(&k));
            }
        }
        let betti = factors.iter().filter(|&&f| f == k).count();
        let torsion: Vec<u64> = factors.into_iter().filter(|&f| f >= 2 && f < k).collect();
        dims.push(DimSummary { betti, torsion });
    }
    Ok(HomologySummary::new(CoefficientSpec::IntegersMod(k), dims))
}

/// Field Betti numbers predicted from an integral summary by universal
/// coefficients; the cross-check for `homology_field` over `F_p`.
pub fn field_betti_from_integral(integral: &HomologySummary, p: u64) -> Vec<usize> {
    let top = integral.dims.len() + 1;
    (0..top)
        .map(|l| {
            integral.betti(l)
                + integral.torsion(l).iter().filter(|&&t| t % p == 0).count()
                + if l > 0 {
                    integral.torsion(l - 1).iter().filter(|&&t| t % p == 0).count()
                } else {
                    0
                }
        })
        .collect()
}

/// The subcomplex spanned by a face-closed cell set, densely reindexed.
pub fn subcomplex(c: &CellComplex, s: &BTreeSet<CellId>) -> Result<CellComplex, HomologyError> {
    check_face_closed(c, s)?;
    let top = c.dim().map_or(0, |d| d + 1);
    let mut maps: Vec<Vec<Option<usize>>> = Vec::with_capacity(top);
    for d in 0..top {
        let mut next = 0;
        let mut map = vec![None; c.cell_count(d)];
        for idx in 0..c.cell_count(d) {
            if s.contains(&CellId::new(d, idx)) {
                map[idx] = Some(next);
                next += 1;
            }
        }
        maps.push(map);
    }
    let mut b = ComplexBuilder::new();
    for d in 0..top {
        for idx in 0..c.cell_count(d) {
            let id = CellId::new(d, idx);
            if maps[d][idx].is_none() {
                continue;
            }
            let boundary: Vec<(usize, i64)> = c
                .boundary_of(id)
                .map(|(f, coeff)| (maps[d - 1][f].expect("face-closed"), coeff))
                .collect();
            b.add_cell(d, &boundary, c.label(id).map(str::to_owned));
        }
    }
    Ok(b.build())
}

/// The quotient chain complex `C(X)/C(A)`: cells of `s` deleted, their
/// incidences dropped. Its homology is the relative homology `H(X, A)`.
pub fn quotient_complex(c: &CellComplex, s: &BTreeSet<CellId>) -> Result<CellComplex, HomologyError> {
    check_face_closed(c, s)?;
    let top = c.dim().map_or(0, |d| d + 1);
    let mut maps: Vec<Vec<Option<usize>>> = Vec::with_capacity(top);
    for d in 0..top {
        let mut next = 0;
        let mut map = vec![None; c.cell_count(d)];
        for idx in 0..c.cell_count(d) {
            if !s.contains(&CellId::new(d, idx)) {
                map[idx] = Some(next);
                next += 1;
            }
        }
        maps.push(map);
    }
    let mut b = ComplexBuilder::new();
    for d in 0..top {
        for idx in 0..c.cell_count(d) {
            let id = CellId::new(d, idx);
            if maps[d][idx].is_none() {
                continue;
            }
            let boundary: Vec<(usize, i64)> = c
                .boundary_of(id)
                .filter_map(|(f, coeff)| maps[d - 1][f].map(|nf| (nf, coeff)))
                .collect();
            b.add_cell(d, &boundary, c.label(id).map(str::to_owned));
        }
    }
    Ok(b.build())
}

/// Relative homology `H(X, A)` of a pair, computed on the quotient chain
/// complex.
pub fn relative_homology(
    c: &CellComplex,
    s: &BTreeSet<CellId>,
    coeff: &CoefficientSpec,
) -> Result<HomologySummary, HomologyError> {
    let q = quotient_complex(c, s)?;
    homology(&q, coeff)
}

/// A sparse integer chain in one dimension of a complex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycleChain {
    pub dim: usize,
    pub entries: Vec<(usize, i64)>,
}

impl CycleChain {
    pub fn new(dim: usize, entries: Vec<(usize, i64)>) -> Self {
        CycleChain { dim, entries }
    }

    fn dense(&self, n: usize) -> Result<Vec<BigInt>, HomologyError> {
        let mut v = vec![BigInt::zero(); n];
        for &(i, c) in &self.entries {
            if i >= n {
                return Err(HomologyError::OutOfRange(CellId::new(self.dim, i)));
            }
            v[i] += BigInt::from(c);
        }
        Ok(v)
    }
}

/// Order of a homology class in `{1, 2, ...}` or infinite.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CycleOrder {
    Finite(BigUint),
    Infinite,
}

impl CycleOrder {
    pub fn finite_u64(&self) -> Option<u64> {
        match self {
            CycleOrder::Finite(n) => u64::try_from(n).ok(),
            CycleOrder::Infinite => None,
        }
    }
}

impl std::fmt::Display for CycleOrder {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CycleOrder::Finite(n) => write!(f, "{n}"),
            CycleOrder::Infinite => write!(f, "inf"),
        }
    }
}

/// Least `n >= 1` such that `n z` is a boundary; infinite when no multiple
/// bounds. Order 1 means `z` itself bounds. The input must be a cycle.
pub fn cycle_class_order(c: &CellComplex, z: &CycleChain) -> Result<CycleOrder, HomologyError> {
    let n_here = c.cell_count(z.dim);
    let v = z.dense(n_here)?;
    // cycle check, exact over Z
    if z.dim > 0 {
        let mut acc = vec![BigInt::zero(); c.cell_count(z.dim - 1)];
        for &(i, coeff) in &z.entries {
            for (f, c2) in c.boundary_of(CellId::new(z.dim, i)) {
                acc[f] += BigInt::from(coeff) * BigInt::from(c2);
            }
        }
        if let Some(bad) = acc.iter().position(|x| !x.is_zero()) {
            return Err(HomologyError::NotACycle(CellId::new(z.dim - 1, bad)));
        }
    }
    if v.iter().all(Zero::is_zero) {
        return Ok(CycleOrder::Finite(BigUint::one()));
    }
    let cols: Vec<Vec<(usize, i64)>> = (0..c.cell_count(z.dim + 1))
        .map(|j| c.boundary_of(CellId::new(z.dim + 1, j)).collect())
        .collect();
    let m = IntMatrix::from_sparse_columns(n_here, &cols);
    let snf = smith_normal_form(&m, true);
    let p = snf.p.expect("transform requested");
    let w = p.apply(&v);
    let mut order = BigUint::one();
    for (i, wi) in w.iter().enumerate() {
        if wi.is_zero() {
            continue;
        }
        if i >= snf.rank {
            return Ok(CycleOrder::Infinite);
        }
        let d = &snf.diag[i];
        let g = d.gcd(wi);
        let ni = (d / g).magnitude().clone();
        order = order.lcm(&ni);
    }
    Ok(CycleOrder::Finite(order))
}

/// A chain map between complexes, one integer matrix per dimension
/// (rows = target cells, cols = source cells).
pub type ChainMap = Vec<IntMatrix>;

/// The identity chain map of a complex.
pub fn identity_chain_map(c: &CellComplex) -> ChainMap {
    let top = c.dim().map_or(0, |d| d + 1);
    (0..top).map(|d| IntMatrix::identity(c.cell_count(d))).collect()
}

/// Induced map on homology in degree `l`, in the deterministic homology
/// bases, over a field (`Q` or `F_p`; `Z` is computed over `Q` and reports
/// the action on the free part).
pub fn induced_map(
    chain_map: &ChainMap,
    source: &CellComplex,
    target: &CellComplex,
    l: usize,
    coeff: &CoefficientSpec,
) -> Result<InducedMatrix, HomologyError> {
    coeff.validate()?;
    check_chain_map(chain_map, source, target)?;
    match coeff {
        CoefficientSpec::Rationals | CoefficientSpec::Integers => {
            Ok(InducedMatrix::Rational(induced_entries(&Rationals, chain_map, source, target, l)))
        }
        CoefficientSpec::PrimeField(p) => {
            let f = PrimeField::new(*p);
            Ok(InducedMatrix::ModP(*p, induced_entries(&f, chain_map, source, target, l)))
        }
        other => Err(HomologyError::NotAField(other.clone())),
    }
}

fn check_chain_map(
    chain_map: &ChainMap,
    source: &CellComplex,
    target: &CellComplex,
) -> Result<(), HomologyError> {
    let top_s = source.dim().map_or(0, |d| d + 1);
    for d in 1..top_s {
        if d >= chain_map.len() {
            break;
        }
        // target boundary composed with M_d vs M_{d-1} composed with source
        // boundary, column by column (one column per source d-cell)
        for j in 0..source.cell_count(d) {
            let mut lhs = vec![BigInt::zero(); target.cell_count(d - 1)];
            for i in 0..target.cell_count(d) {
                let mij = chain_map[d].at(i, j);
                if mij.is_zero() {
                    continue;
                }
                for (f, c2) in target.boundary_of(CellId::new(d, i)) {
                    lhs[f] += mij * BigInt::from(c2);
                }
            }
            let mut rhs = vec![BigInt::zero(); target.cell_count(d - 1)];
            for (f, c2) in source.boundary_of(CellId::new(d, j)) {
                for i in 0..target.cell_count(d - 1) {
                    let m = chain_map[d - 1].at(i, f);
                    if !m.is_zero() {
                        rhs[i] += m * BigInt::from(c2);
                    }
                }
            }
            if lhs != rhs {
                return Err(HomologyError::NotAChainMap(CellId::new(d, j)));
            }
        }
    }
    Ok(())
}

fn induced_entries<F: Field>(
    f: &F,
    chain_map: &ChainMap,
    source: &CellComplex,
    target: &CellComplex,
    l: usize,
) -> Vec<Vec<F::Elem>> {
    let hs = homology_space(f, source, l);
    let ht = homology_space(f, target, l);
    let m = chain_map
        .get(l)
        .cloned()
        .unwrap_or_else(|| IntMatrix::zeros(target.cell_count(l), source.cell_count(l)));
    let mut entries: Vec<Vec<F::Elem>> = vec![Vec::with_capacity(hs.betti()); ht.betti()];
    for rep in &hs.reps {
        let mut image = vec![f.zero(); target.cell_count(l)];
        for (j, x) in rep.iter().enumerate() {
            if f.is_zero(x) {
                continue;
            }
            for i in 0..target.cell_count(l) {
                let mij = m.at(i, j);
                if !mij.is_zero() {
                    let coeff = field_from_bigint(f, mij);
                    let v = f.add(&image[i], &f.mul(&coeff, x));
                    image[i] = v;
                }
            }
        }
        let coords = ht.project(&image).expect("image of a cycle is a cycle");
        for (r, val) in coords.into_iter().enumerate() {
            entries[r].push(val);
        }
    }
    entries
}

fn field_from_bigint<F: Field>(f: &F, n: &BigInt) -> F::Elem {
    match i64::try_from(n) {
        Ok(v) => f.embed(v),
        Err(_) => {
            // decompose into i64 limbs
            let mut acc = f.zero();
            let base = f.embed(1 << 32);
            let mut rest = n.clone();
            let mut scale = f.one();
            while !rest.is_zero() {
                let limb = i64::try_from(&rest % (1i64 << 32)).unwrap();
                acc = f.add(&acc, &f.mul(&scale, &f.embed(limb)));
                scale = f.mul(&scale, &base);
                rest /= 1i64 << 32;
            }
            acc
        }
    }
}

/// Matrix of an induced map on homology.
#[derive(Debug, Clone)]
pub enum InducedMatrix {
    Rational(Vec<Vec<num_rational::BigRational>>),
    ModP(u64, Vec<Vec<u64>>),
}

impl InducedMatrix {
    pub fn nrows(&self) -> usize {
        match self {
            InducedMatrix::Rational(m) => m.len(),
            InducedMatrix::ModP(_, m) => m.len(),
        }
    }

    pub fn ncols(&self) -> usize {
        match self {
            InducedMatrix::Rational(m) => m.first().map_or(0, Vec::len),
            InducedMatrix::ModP(_, m) => m.first().map_or(0, Vec::len),
        }
    }

    pub fn rank(&self) -> usize {
        match self {
            InducedMatrix::Rational(m) => {
                let f = Rationals;
                let mut fm = FMatrix::zeros(&f, m.len(), m.first().map_or(0, Vec::len));
                for (i, row) in m.iter().enumerate() {
                    for (j, v) in row.iter().enumerate() {
                        *fm.at_mut(i, j) = v.clone();
                    }
                }
                fm.rank(&f)
            }
            InducedMatrix::ModP(p, m) => {
                let f = PrimeField::new(*p);
                let mut fm = FMatrix::zeros(&f, m.len(), m.first().map_or(0, Vec::len));
                for (i, row) in m.iter().enumerate() {
                    for (j, v) in row.iter().enumerate() {
                        *fm.at_mut(i, j) = *v;
                    }
                }
                fm.rank(&f)
            }
        }
    }

    /// True when this is the identity matrix.
    pub fn is_identity(&self) -> bool {
        if self.nrows() != self.ncols() {
            return false;
        }
        match self {
            InducedMatrix::Rational(m) => m.iter().enumerate().all(|(i, row)| {
                row.iter().enumerate().all(|(j, v)| {
                    if i == j {
                        v.is_one()
                    } else {
                        v.is_zero()
                    }
                })
            }),
            InducedMatrix::ModP(p, m) => m.iter().enumerate().all(|(i, row)| {
                row.iter()
                    .enumerate()
                    .all(|(j, v)| if i == j { v % p == 1 } else { v % p == 0 })
            }),
        }
    }
}

fn boundary_cols(c: &CellComplex, d: usize) -> Vec<Vec<(usize, i64)>> {
    (0..c.cell_count(d))
        .map(|j| c.boundary_of(CellId::new(d, j)).collect())
        .collect()
}

fn homology_space<F: Field>(f: &F, c: &CellComplex, l: usize) -> HomologySpace<F> {
    let n = c.cell_count(l);
    let d_here = if l == 0 {
        (0, Vec::new())
    } else {
        (c.cell_count(l - 1), boundary_cols(c, l))
    };
    let d_above = boundary_cols(c, l + 1);
    HomologySpace::new(f, n, (d_here.0, &d_here.1), &d_above)
}

/// Ranks of the three maps of the long exact sequence of the pair `(X, A)`
/// in degree `l`: the inclusion `i_l: H_l(A) -> H_l(X)`, the quotient
/// `j_l: H_l(X) -> H_l(X, A)`, and the connecting map
/// `d_l: H_l(X, A) -> H_{l-1}(A)`. Field coefficients only.
pub fn les_ranks(
    c: &CellComplex,
    s: &BTreeSet<CellId>,
    coeff: &CoefficientSpec,
    l: usize,
) -> Result<(usize, usize, usize), HomologyError> {
    match coeff {
        CoefficientSpec::Rationals => les_ranks_impl(&Rationals, c, s, l),
        CoefficientSpec::PrimeField(p) => les_ranks_impl(&PrimeField::new(*p), c, s, l),
        other => Err(HomologyError::NotAField(other.clone())),
    }
}

fn les_ranks_impl<F: Field>(
    f: &F,
    c: &CellComplex,
    s: &BTreeSet<CellId>,
    l: usize,
) -> Result<(usize, usize, usize), HomologyError> {
    let a = subcomplex(c, s)?;
    let q = quotient_complex(c, s)?;
    let top = c.dim().map_or(0, |d| d + 1);
    // per-dim index maps between X and A / Q coordinates
    let mut a_of: Vec<Vec<Option<usize>>> = Vec::with_capacity(top);
    let mut q_of: Vec<Vec<Option<usize>>> = Vec::with_capacity(top);
    for d in 0..top {
        let mut na = 0;
        let mut nq = 0;
        let mut am = vec![None; c.cell_count(d)];
        let mut qm = vec![None; c.cell_count(d)];
        for idx in 0..c.cell_count(d) {
            if s.contains(&CellId::new(d, idx)) {
                am[idx] = Some(na);
                na += 1;
            } else {
                qm[idx] = Some(nq);
                nq += 1;
            }
        }
        a_of.push(am);
        q_of.push(qm);
    }

    let h_a = homology_space(f, &a, l);
    let h_x = homology_space(f, c, l);
    let h_q = homology_space(f, &q, l);
    let h_a_below = if l > 0 {
        Some(homology_space(f, &a, l - 1))
    } else {
        None
    };

    // rank of i_l
    let mut i_cols: Vec<Vec<F::Elem>> = Vec::new();
    for rep in &h_a.reps {
        let mut v = vec![f.zero(); c.cell_count(l)];
        for idx in 0..c.cell_count(l) {
            if let Some(ai) = a_of.get(l).and_then(|m| m[idx]) {
                v[idx] = rep[ai].clone();
            }
        }
        i_cols.push(h_x.project(&v).expect("inclusion of a cycle"));
    }
    let rank_i = rank_of_columns(f, h_x.betti(), &i_cols);

    // rank of j_l
    let mut j_cols: Vec<Vec<F::Elem>> = Vec::new();
    for rep in &h_x.reps {
        let mut v = vec![f.zero(); q.cell_count(l)];
        for idx in 0..c.cell_count(l) {
            if let Some(qi) = q_of.get(l).and_then(|m| m[idx]) {
                v[qi] = rep[idx].clone();
            }
        }
        j_cols.push(h_q.project(&v).expect("projection of a cycle"));
    }
    let rank_j = rank_of_columns(f, h_q.betti(), &j_cols);

    // rank of the connecting map
    let rank_conn = match h_a_below {
        None => 0,
        Some(h_ab) => {
            let mut cols: Vec<Vec<F::Elem>> = Vec::new();
            for rep in &h_q.reps {
                // lift to X coordinates
                let mut lift = vec![f.zero(); c.cell_count(l)];
                for idx in 0..c.cell_count(l) {
                    if let Some(qi) = q_of.get(l).and_then(|m| m[idx]) {
                        lift[idx] = rep[qi].clone();
                    }
                }
                // the boundary of the lift is supported on A
                let mut dx = vec![f.zero(); c.cell_count(l - 1)];
                for idx in 0..c.cell_count(l) {
                    if f.is_zero(&lift[idx]) {
                        continue;
                    }
                    for (face, coeff) in c.boundary_of(CellId::new(l, idx)) {
                        let contrib = f.mul(&lift[idx], &f.embed(coeff));
                        dx[face] = f.add(&dx[face], &contrib);
                    }
                }
                let mut da = vec![f.zero(); a.cell_count(l - 1)];
                for (face, v) in dx.into_iter().enumerate() {
                    match a_of[l - 1][face] {
                        Some(ai) => da[ai] = v,
                        None => debug_assert!(
                            f.is_zero(&v),
                            "lift of a relative cycle has boundary outside A"
                        ),
                    }
                }
                cols.push(h_ab.project(&da).expect("connecting image is a cycle"));
            }
            rank_of_columns(f, h_ab.betti(), &cols)
        }
    };
    Ok((rank_i, rank_j, rank_conn))
}

fn rank_of_columns<F: Field>(f: &F, rows: usize, cols: &[Vec<F::Elem>]) -> usize {
    let mut m = FMatrix::zeros(f, rows, cols.len());
    for (j, col) in cols.iter().enumerate() {
        m.set_column(j, col);
    }
    m.rank(f)
}

/// Subadditivity defect of Poincare polynomials for a sublevel pair:
/// returns `Q` with `P_a + P_rel - P_b = (1 + t) Q(t)` when `Q` exists with
/// nonnegative coefficients, `None` otherwise.
pub fn subadditivity_quotient(p_a: &[i64], p_rel: &[i64], p_b: &[i64]) -> Option<Vec<i64>> {
    let n = p_a.len().max(p_rel.len()).max(p_b.len());
    let coeff = |p: &[i64], i: usize| p.get(i).copied().unwrap_or(0);
    let d: Vec<i64> = (0..n)
        .map(|i| coeff(p_a, i) + coeff(p_rel, i) - coeff(p_b, i))
        .collect();
    let mut q = Vec::with_capacity(n);
    let mut prev = 0i64;
    for (i, &di) in d.iter().enumerate() {
        let qi = di - prev;
        if qi < 0 {
            return None;
        }
        if i + 1 == n && qi != 0 {
            return None;
        }
        if i + 1 < n {
            q.push(qi);
        }
        prev = qi;
    }
    Some(q)
}
