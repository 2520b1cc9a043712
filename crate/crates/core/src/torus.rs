//! Exact decision of topological generation in finite-dimensional tori, over
//! a formal rational basis.
//!
//! A [`SymbolicReal`] is an exact element `q·1 + Σ qⱼ·bⱼ` of the Q-vector
//! space spanned by `1` and finitely many symbols `b1, …, bk` that are
//! formally linearly independent over Q together with 1. The symbols stand in
//! for concrete real numbers whose only rational relations are the visible
//! ones, so Kronecker's criterion (m points generate `(R/Z)^d` densely iff
//! the only rational vector `λ` making every combination `λ·α_ℓ` rational is
//! `λ = 0`) becomes an exact rank computation over Q: stack, per generator,
//! the k × d matrix of irrational-basis coefficients and test for rank `d`.
//!
//! The counterexample construction assigns each generator a block of
//! coordinates carrying fresh symbols, and the obstruction verifier replays
//! the λ-extraction that defeats every lift drawn from the generator's own
//! exhausted span.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::abelian::{smith_normal_form, IntMatrix};
use crate::{Error, Result};

/// The declared ambient basis `{1, b1, …, bk}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Basis {
    symbols: usize,
}

impl Basis {
    pub fn new(symbols: usize) -> Basis {
        Basis { symbols }
    }

    pub fn symbol_count(&self) -> usize {
        self.symbols
    }

    pub fn contains_symbol(&self, j: usize) -> bool {
        1 <= j && j <= self.symbols
    }
}

/// `q·1 + Σ qⱼ·bⱼ` with exact rational coefficients; equality is
/// coefficient-wise. Zero coefficients are never stored.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Default)]
pub struct SymbolicReal {
    rational: BigRational,
    terms: BTreeMap<usize, BigRational>,
}

impl SymbolicReal {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn from_rational(q: BigRational) -> Self {
        SymbolicReal {
            rational: q,
            terms: BTreeMap::new(),
        }
    }

    pub fn from_integer(n: i64) -> Self {
        Self::from_rational(BigRational::from_integer(BigInt::from(n)))
    }

    /// The basis symbol `bj` (j >= 1).
    pub fn symbol(j: usize) -> Self {
        assert!(j >= 1, "symbols are numbered from 1");
        let mut terms = BTreeMap::new();
        terms.insert(j, BigRational::one());
        SymbolicReal {
            rational: BigRational::zero(),
            terms,
        }
    }

    pub fn new(rational: BigRational, terms: BTreeMap<usize, BigRational>) -> Self {
        let terms = terms.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        SymbolicReal { rational, terms }
    }

    pub fn rational_part(&self) -> &BigRational {
        &self.rational
    }

    pub fn terms(&self) -> &BTreeMap<usize, BigRational> {
        &self.terms
    }

    pub fn coefficient(&self, symbol: usize) -> BigRational {
        self.terms
            .get(&symbol)
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    pub fn is_rational(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.rational.is_zero() && self.terms.is_empty()
    }

    pub fn max_symbol(&self) -> usize {
        self.terms.keys().next_back().copied().unwrap_or(0)
    }

    pub fn add(&self, other: &SymbolicReal) -> SymbolicReal {
        let mut terms = self.terms.clone();
        for (&j, c) in &other.terms {
            let entry = terms.entry(j).or_insert_with(BigRational::zero);
            *entry += c;
        }
        SymbolicReal::new(&self.rational + &other.rational, terms)
    }

    pub fn neg(&self) -> SymbolicReal {
        SymbolicReal {
            rational: -self.rational.clone(),
            terms: self.terms.iter().map(|(&j, c)| (j, -c.clone())).collect(),
        }
    }

    pub fn sub(&self, other: &SymbolicReal) -> SymbolicReal {
        self.add(&other.neg())
    }

    pub fn scale(&self, factor: &BigRational) -> SymbolicReal {
        if factor.is_zero() {
            return SymbolicReal::zero();
        }
        SymbolicReal {
            rational: &self.rational * factor,
            terms: self.terms.iter().map(|(&j, c)| (j, c * factor)).collect(),
        }
    }

    /// Applies an injective renaming to the basis symbols.
    pub fn relabel_symbols(&self, map: &BTreeMap<usize, usize>) -> Result<SymbolicReal> {
        let mut terms = BTreeMap::new();
        for (&j, c) in &self.terms {
            let &to = map.get(&j).ok_or(Error::SymbolOutsideBasis(j))?;
            if terms.insert(to, c.clone()).is_some() {
                return Err(Error::InvalidArgument(
                    "symbol relabeling is not injective".into(),
                ));
            }
        }
        Ok(SymbolicReal {
            rational: self.rational.clone(),
            terms,
        })
    }
}

impl fmt::Debug for SymbolicReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Renders the literal grammar: rational part first, then `+`/`-` joined
/// `q*bN` terms, e.g. `1/2 + 3*b1 - b2`. Zero prints as `0`.
impl fmt::Display for SymbolicReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        if !self.rational.is_zero() {
            write!(f, "{}", self.rational)?;
            first = false;
        }
        for (&j, c) in &self.terms {
            let negative = c.is_negative();
            let magnitude = c.abs();
            if first {
                if negative {
                    write!(f, "-")?;
                }
                first = false;
            } else if negative {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            if magnitude.is_one() {
                write!(f, "b{j}")?;
            } else {
                write!(f, "{magnitude}*b{j}")?;
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

fn parse_rational(text: &str) -> Result<BigRational> {
    let bad = || Error::Parse(format!("invalid rational `{text}`"));
    match text.split_once('/') {
        Some((num, den)) => {
            let num = BigInt::from_str(num).map_err(|_| bad())?;
            let den = BigInt::from_str(den).map_err(|_| bad())?;
            if den.is_zero() {
                return Err(Error::Parse(format!("zero denominator in `{text}`")));
            }
            Ok(BigRational::new(num, den))
        }
        None => Ok(BigRational::from_integer(
            BigInt::from_str(text).map_err(|_| bad())?,
        )),
    }
}

fn parse_symbol(text: &str) -> Result<usize> {
    let bad = || Error::Parse(format!("invalid basis symbol `{text}`"));
    let digits = text.strip_prefix('b').ok_or_else(bad)?;
    let j: usize = digits.parse().map_err(|_| bad())?;
    if j == 0 {
        return Err(bad());
    }
    Ok(j)
}

/// Parses the symbolic-real literal grammar: `q` (rational, `a/b` or integer)
/// and terms `q*bN` or bare `bN`, joined by `+`/`-`; whitespace insignificant.
impl FromStr for SymbolicReal {
    type Err = Error;

    fn from_str(s: &str) -> Result<SymbolicReal> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(Error::Parse("empty symbolic literal".into()));
        }
        let mut rational = BigRational::zero();
        let mut terms: BTreeMap<usize, BigRational> = BTreeMap::new();
        let mut chars = compact.chars().peekable();
        let mut sign = BigRational::one();
        // Leading sign.
        if let Some(&c) = chars.peek() {
            if c == '+' {
                chars.next();
            } else if c == '-' {
                sign = -sign;
                chars.next();
            }
        }
        let mut term = String::new();
        let flush = |term: &mut String,
                     sign: &BigRational,
                     rational: &mut BigRational,
                     terms: &mut BTreeMap<usize, BigRational>|
         -> Result<()> {
            if term.is_empty() {
                return Err(Error::Parse("empty term in symbolic literal".into()));
            }
            if term.contains('b') {
                let (coefficient, symbol) = match term.split_once('*') {
                    Some((q, b)) => (parse_rational(q)?, parse_symbol(b)?),
                    None => (BigRational::one(), parse_symbol(term)?),
                };
                let entry = terms.entry(symbol).or_insert_with(BigRational::zero);
                *entry += coefficient * sign;
            } else {
                *rational += parse_rational(term)? * sign;
            }
            term.clear();
            Ok(())
        };
        for c in chars {
            match c {
                '+' | '-' => {
                    flush(&mut term, &sign, &mut rational, &mut terms)?;
                    sign = if c == '-' {
                        -BigRational::one()
                    } else {
                        BigRational::one()
                    };
                }
                _ => term.push(c),
            }
        }
        flush(&mut term, &sign, &mut rational, &mut terms)?;
        Ok(SymbolicReal::new(rational, terms))
    }
}

/// A point of the torus `(R/Z)^d`: coordinates are symbolic reals read modulo
/// Z, with the rational part normalized into `[0, 1)`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TorusPoint {
    coords: Vec<SymbolicReal>,
}

impl TorusPoint {
    pub fn new(coords: Vec<SymbolicReal>) -> TorusPoint {
        let coords = coords
            .into_iter()
            .map(|c| {
                let reduced = &c.rational - c.rational.floor();
                SymbolicReal {
                    rational: reduced,
                    terms: c.terms,
                }
            })
            .collect();
        TorusPoint { coords }
    }

    pub fn zero(dimension: usize) -> TorusPoint {
        TorusPoint {
            coords: vec![SymbolicReal::zero(); dimension],
        }
    }

    pub fn dimension(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[SymbolicReal] {
        &self.coords
    }

    pub fn coord(&self, i: usize) -> &SymbolicReal {
        &self.coords[i]
    }

    pub fn max_symbol(&self) -> usize {
        self.coords
            .iter()
            .map(|c| c.max_symbol())
            .max()
            .unwrap_or(0)
    }

    /// Adds a rational vector, coordinate-wise (mod Z).
    pub fn translated(&self, shift: &[BigRational]) -> Result<TorusPoint> {
        if shift.len() != self.dimension() {
            return Err(Error::DimensionMismatch {
                expected: self.dimension(),
                got: shift.len(),
            });
        }
        Ok(TorusPoint::new(
            self.coords
                .iter()
                .zip(shift)
                .map(|(c, q)| c.add(&SymbolicReal::from_rational(q.clone())))
                .collect(),
        ))
    }

    pub fn relabel_symbols(&self, map: &BTreeMap<usize, usize>) -> Result<TorusPoint> {
        Ok(TorusPoint {
            coords: self
                .coords
                .iter()
                .map(|c| c.relabel_symbols(map))
                .collect::<Result<_>>()?,
        })
    }
}

impl fmt::Display for TorusPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// The coordinate-forgetting epimorphism `(R/Z)^J -> (R/Z)^I` for
/// `I ⊆ J = {0, …, source_dim−1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TorusProjection {
    source_dim: usize,
    kept: Vec<usize>,
}

impl TorusProjection {
    pub fn new(source_dim: usize, kept: Vec<usize>) -> Result<TorusProjection> {
        let mut sorted = kept.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != kept.len() {
            return Err(Error::InvalidArgument(
                "kept coordinates must be distinct".into(),
            ));
        }
        if sorted.iter().any(|&i| i >= source_dim) {
            return Err(Error::InvalidArgument(
                "kept coordinate outside the source".into(),
            ));
        }
        Ok(TorusProjection {
            source_dim,
            kept: sorted,
        })
    }

    /// The identity projection on `(R/Z)^d`.
    pub fn identity(dim: usize) -> TorusProjection {
        TorusProjection {
            source_dim: dim,
            kept: (0..dim).collect(),
        }
    }

    pub fn source_dim(&self) -> usize {
        self.source_dim
    }

    pub fn kept(&self) -> &[usize] {
        &self.kept
    }

    /// The forgotten coordinates `J \ I`, ascending.
    pub fn added(&self) -> Vec<usize> {
        (0..self.source_dim)
            .filter(|i| self.kept.binary_search(i).is_err())
            .collect()
    }

    pub fn project(&self, point: &TorusPoint) -> Result<TorusPoint> {
        if point.dimension() != self.source_dim {
            return Err(Error::DimensionMismatch {
                expected: self.source_dim,
                got: point.dimension(),
            });
        }
        Ok(TorusPoint::new(
            self.kept.iter().map(|&i| point.coord(i).clone()).collect(),
        ))
    }
}

fn validate_points(points: &[TorusPoint], dim: usize, basis: &Basis) -> Result<()> {
    for p in points {
        if p.dimension() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: p.dimension(),
            });
        }
        let max = p.max_symbol();
        if max > basis.symbol_count() {
            return Err(Error::SymbolOutsideBasis(max));
        }
    }
    Ok(())
}

/// The m·k × d matrix of irrational-basis coefficients, rows indexed by
/// (generator, symbol), denominators cleared row-wise.
fn coefficient_matrix(points: &[TorusPoint], dim: usize, basis: &Basis) -> IntMatrix {
    let k = basis.symbol_count();
    let mut matrix = IntMatrix::zero(points.len() * k, dim);
    for (l, p) in points.iter().enumerate() {
        for j in 1..=k {
            let row: Vec<BigRational> = (0..dim).map(|i| p.coord(i).coefficient(j)).collect();
            let lcm = row.iter().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
            for (i, q) in row.iter().enumerate() {
                let cleared = q.numer() * (&lcm / q.denom());
                matrix.set(l * k + (j - 1), i, cleared);
            }
        }
    }
    matrix
}

/// Kronecker's criterion at finite dimension: the points generate `(R/Z)^d`
/// densely iff the stacked coefficient matrix has rank `d` over Q
/// (equivalently, the only rational λ with every combination λ·α_ℓ rational
/// is λ = 0).
pub fn kronecker_generates(points: &[TorusPoint], dim: usize, basis: &Basis) -> Result<bool> {
    validate_points(points, dim, basis)?;
    Ok(coefficient_matrix(points, dim, basis).rank() == dim)
}

/// A nonzero rational λ with λ·α_ℓ rational for every generator, when one
/// exists (i.e. exactly when the points do not generate). Computed by
/// rational elimination, independent of the fraction-free rank route.
pub fn kronecker_witness(
    points: &[TorusPoint],
    dim: usize,
    basis: &Basis,
) -> Result<Option<Vec<BigRational>>> {
    validate_points(points, dim, basis)?;
    if dim == 0 {
        return Ok(None);
    }
    let k = basis.symbol_count();
    // Rows of the constraint system M λ = 0 over Q.
    let mut rows: Vec<Vec<BigRational>> = Vec::new();
    for p in points {
        for j in 1..=k {
            rows.push((0..dim).map(|i| p.coord(i).coefficient(j)).collect());
        }
    }
    // Reduced row echelon form.
    let mut pivot_of_col: Vec<Option<usize>> = vec![None; dim];
    let mut next_row = 0usize;
    for col in 0..dim {
        let Some(r) = (next_row..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(next_row, r);
        let inv = rows[next_row][col].recip();
        for x in rows[next_row].iter_mut() {
            *x *= &inv;
        }
        for r in 0..rows.len() {
            if r != next_row && !rows[r][col].is_zero() {
                let factor = rows[r][col].clone();
                for c in 0..dim {
                    let delta = &factor * &rows[next_row][c];
                    rows[r][c] -= delta;
                }
            }
        }
        pivot_of_col[col] = Some(next_row);
        next_row += 1;
    }
    let Some(free_col) = (0..dim).find(|&c| pivot_of_col[c].is_none()) else {
        return Ok(None);
    };
    let mut lambda = vec![BigRational::zero(); dim];
    lambda[free_col] = BigRational::one();
    for col in 0..dim {
        if let Some(r) = pivot_of_col[col] {
            lambda[col] = -rows[r][free_col].clone();
        }
    }
    Ok(Some(lambda))
}

/// When every coordinate is rational the generated subgroup is finite; its
/// order is `D^d` divided by the index of the denominator-cleared lattice,
/// computed by Smith normal form. Returns `None` when any coordinate has an
/// irrational component.
pub fn rational_closure_order(points: &[TorusPoint], dim: usize) -> Result<Option<BigUint>> {
    for p in points {
        if p.dimension() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: p.dimension(),
            });
        }
    }
    if points
        .iter()
        .any(|p| p.coords().iter().any(|c| !c.is_rational()))
    {
        return Ok(None);
    }
    let denominator_lcm = points.iter().fold(BigInt::one(), |acc, p| {
        p.coords()
            .iter()
            .fold(acc, |a, c| a.lcm(c.rational_part().denom()))
    });
    // Columns: D·e_i for the integer lattice, then D·α_ℓ per generator.
    let mut matrix = IntMatrix::zero(dim, dim + points.len());
    for i in 0..dim {
        matrix.set(i, i, denominator_lcm.clone());
    }
    for (l, p) in points.iter().enumerate() {
        for i in 0..dim {
            let q = p.coord(i).rational_part();
            matrix.set(i, dim + l, q.numer() * (&denominator_lcm / q.denom()));
        }
    }
    let snf = smith_normal_form(&matrix);
    let index: BigInt = snf
        .invariant_factors
        .iter()
        .fold(BigInt::one(), |acc, f| acc * f);
    let total = num_traits::pow::pow(denominator_lcm, dim);
    let (order, remainder) = total.div_rem(&index);
    assert!(remainder.is_zero(), "lattice index divides D^d");
    Ok(Some(order.to_biguint().expect("order is positive")))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LiftPolicy {
    /// Lift coordinates may use any element of the declared ambient span.
    AmbientOnly,
    /// Each new coordinate of each generator receives a fresh formally
    /// independent symbol appended to the basis.
    FreshSymbols,
}

/// A successful lift together with the basis it lives over (extended when
/// fresh symbols were introduced).
#[derive(Clone, Debug)]
pub struct TorusLift {
    pub points: Vec<TorusPoint>,
    pub basis: Basis,
}

#[derive(Clone, Debug)]
pub enum TorusLiftOutcome {
    Found(TorusLift),
    /// No ambient lift can generate: every ambient lift's coefficient matrix
    /// has at most `ambient_rank_bound` = m·k independent rows, below the
    /// target dimension. When the tuple has counterexample shape and the
    /// projection adds a single coordinate, the explicit λ-extraction
    /// certificate is attached.
    Obstructed {
        ambient_rank_bound: usize,
        target_dim: usize,
        certificate: Option<ObstructionCertificate>,
    },
}

impl TorusLiftOutcome {
    pub fn found(&self) -> Option<&TorusLift> {
        match self {
            TorusLiftOutcome::Found(lift) => Some(lift),
            TorusLiftOutcome::Obstructed { .. } => None,
        }
    }
}

/// Lifts a generating tuple of `(R/Z)^I` through a coordinate-forgetting
/// projection from `(R/Z)^J`.
///
/// Under `FreshSymbols` this always succeeds. Under `AmbientOnly` an exact
/// rank analysis decides: a generating ambient lift exists iff `m·k >= |J|`,
/// in which case one is constructed greedily; otherwise no ambient lift can
/// generate and the obstruction (with certificate, for counterexample-shaped
/// tuples) is returned.
pub fn find_generating_lift_torus(
    proj: &TorusProjection,
    points: &[TorusPoint],
    policy: LiftPolicy,
    basis: &Basis,
) -> Result<TorusLiftOutcome> {
    let target_dim = proj.kept().len();
    validate_points(points, target_dim, basis)?;
    if !kronecker_generates(points, target_dim, basis)? {
        return Err(Error::NotGenerating);
    }
    let source_dim = proj.source_dim();
    let added = proj.added();
    let position_in_kept: BTreeMap<usize, usize> = proj
        .kept()
        .iter()
        .enumerate()
        .map(|(t, &i)| (i, t))
        .collect();
    if added.is_empty() {
        return Ok(TorusLiftOutcome::Found(TorusLift {
            points: points.to_vec(),
            basis: *basis,
        }));
    }
    match policy {
        LiftPolicy::FreshSymbols => {
            let mut next = basis.symbol_count() + 1;
            let lifted: Vec<TorusPoint> = points
                .iter()
                .map(|p| {
                    TorusPoint::new(
                        (0..source_dim)
                            .map(|i| match position_in_kept.get(&i) {
                                Some(&t) => p.coord(t).clone(),
                                None => {
                                    let s = SymbolicReal::symbol(next);
                                    next += 1;
                                    s
                                }
                            })
                            .collect(),
                    )
                })
                .collect();
            let extended = Basis::new(next - 1);
            assert!(
                kronecker_generates(&lifted, source_dim, &extended)?,
                "fresh-symbol lifts generate"
            );
            Ok(TorusLiftOutcome::Found(TorusLift {
                points: lifted,
                basis: extended,
            }))
        }
        LiftPolicy::AmbientOnly => {
            let m = points.len();
            let k = basis.symbol_count();
            let rows = m * k;
            if rows < source_dim {
                let certificate = match shape_of(points, basis) {
                    Ok(shape) if added.len() == 1 => {
                        Some(certificate_from_shape(proj, &shape, points.len(), basis))
                    }
                    _ => None,
                };
                return Ok(TorusLiftOutcome::Obstructed {
                    ambient_rank_bound: rows,
                    target_dim: source_dim,
                    certificate,
                });
            }
            // Columns over Q^(m·k): the fixed kept columns from the tuple,
            // then one standard basis column per new coordinate, chosen
            // greedily to extend the rank. A standard basis column at row
            // (ℓ, j) is the lift that puts the single symbol b_j into
            // generator ℓ's new coordinate.
            let mut columns: Vec<Vec<BigRational>> = Vec::new();
            for t in 0..target_dim {
                let mut col = vec![BigRational::zero(); rows];
                for (l, p) in points.iter().enumerate() {
                    for j in 1..=k {
                        col[l * k + (j - 1)] = p.coord(t).coefficient(j);
                    }
                }
                columns.push(col);
            }
            let rank_of = |cols: &[Vec<BigRational>]| -> usize {
                let mut matrix = IntMatrix::zero(rows, cols.len());
                for (c, col) in cols.iter().enumerate() {
                    let lcm = col.iter().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
                    for (r, q) in col.iter().enumerate() {
                        matrix.set(r, c, q.numer() * (&lcm / q.denom()));
                    }
                }
                matrix.rank()
            };
            let mut assignment: BTreeMap<usize, (usize, usize)> = BTreeMap::new();
            for &coord in &added {
                let current = rank_of(&columns);
                let mut chosen = None;
                for t in 0..rows {
                    let mut col = vec![BigRational::zero(); rows];
                    col[t] = BigRational::one();
                    columns.push(col);
                    if rank_of(&columns) > current {
                        chosen = Some((t / k, t % k + 1));
                        break;
                    }
                    columns.pop();
                }
                let (l, j) = chosen.expect("rank below m*k always extendable");
                assignment.insert(coord, (l, j));
            }
            let lifted: Vec<TorusPoint> = points
                .iter()
                .enumerate()
                .map(|(l, p)| {
                    TorusPoint::new(
                        (0..source_dim)
                            .map(|i| match position_in_kept.get(&i) {
                                Some(&t) => p.coord(t).clone(),
                                None => match assignment.get(&i) {
                                    Some(&(owner, j)) if owner == l => SymbolicReal::symbol(j),
                                    _ => SymbolicReal::zero(),
                                },
                            })
                            .collect(),
                    )
                })
                .collect();
            assert!(
                kronecker_generates(&lifted, source_dim, basis)?,
                "constructed ambient lift generates"
            );
            Ok(TorusLiftOutcome::Found(TorusLift {
                points: lifted,
                basis: *basis,
            }))
        }
    }
}

/// Builds the block counterexample tuple: generator ℓ is supported on its
/// block of coordinates, with a fresh distinct basis symbol per coordinate.
/// The result provably generates `(R/Z)^d` (checked before returning).
pub fn build_counterexample(n: usize, sizes: &[usize], basis: &Basis) -> Result<Vec<TorusPoint>> {
    if sizes.len() != n {
        return Err(Error::InvalidArgument(format!(
            "expected {n} block sizes, got {}",
            sizes.len()
        )));
    }
    if sizes.contains(&0) {
        return Err(Error::InvalidArgument("block sizes must be >= 1".into()));
    }
    let dim: usize = sizes.iter().sum();
    if basis.symbol_count() < dim {
        return Err(Error::BasisTooSmall {
            need: dim,
            have: basis.symbol_count(),
        });
    }
    let mut owner = Vec::with_capacity(dim);
    for (l, &s) in sizes.iter().enumerate() {
        owner.extend(std::iter::repeat_n(l, s));
    }
    let points: Vec<TorusPoint> = (0..n)
        .map(|l| {
            TorusPoint::new(
                (0..dim)
                    .map(|c| {
                        if owner[c] == l {
                            SymbolicReal::symbol(c + 1)
                        } else {
                            SymbolicReal::zero()
                        }
                    })
                    .collect(),
            )
        })
        .collect();
    assert!(
        kronecker_generates(&points, dim, basis)?,
        "block tuple generates by construction"
    );
    Ok(points)
}

/// Per-coordinate block structure recovered from a counterexample tuple.
struct CounterexampleShape {
    owner: Vec<usize>,
    symbol: Vec<usize>,
}

fn shape_of(points: &[TorusPoint], basis: &Basis) -> Result<CounterexampleShape> {
    let dim = points.first().map_or(0, |p| p.dimension());
    if dim == 0 {
        return Err(Error::NotCounterexampleShape("empty tuple".into()));
    }
    let mut owner = vec![usize::MAX; dim];
    let mut symbol = vec![0usize; dim];
    let mut used: BTreeSet<usize> = BTreeSet::new();
    for (l, p) in points.iter().enumerate() {
        let mut support = 0usize;
        for c in 0..dim {
            let terms = p.coord(c).terms();
            if terms.is_empty() {
                continue;
            }
            if terms.len() > 1 {
                return Err(Error::NotCounterexampleShape(format!(
                    "coordinate {c} of generator {l} mixes basis symbols"
                )));
            }
            let (&j, coefficient) = terms.iter().next().expect("nonempty");
            if !coefficient.is_one() {
                return Err(Error::NotCounterexampleShape(format!(
                    "coordinate {c} of generator {l} has coefficient {coefficient} != 1"
                )));
            }
            if owner[c] != usize::MAX {
                return Err(Error::NotCounterexampleShape(format!(
                    "coordinate {c} is supported by two generators"
                )));
            }
            if !used.insert(j) {
                return Err(Error::NotCounterexampleShape(format!(
                    "symbol b{j} is used twice"
                )));
            }
            owner[c] = l;
            symbol[c] = j;
            support += 1;
        }
        if support == 0 {
            return Err(Error::NotCounterexampleShape(format!(
                "generator {l} is rational"
            )));
        }
    }
    if let Some(c) = owner.iter().position(|&o| o == usize::MAX) {
        return Err(Error::NotCounterexampleShape(format!(
            "coordinate {c} carries no basis symbol"
        )));
    }
    // The ambient basis must be exhausted by the tuple, mirroring a tuple
    // whose blocks each span everything available to lifts.
    let expected: BTreeSet<usize> = (1..=basis.symbol_count()).collect();
    if used != expected {
        return Err(Error::AmbientBasisMismatch(format!(
            "tuple uses {} of {} ambient symbols",
            used.len(),
            basis.symbol_count()
        )));
    }
    Ok(CounterexampleShape { owner, symbol })
}

/// Certificate that no block-respecting ambient lift through the projection
/// can generate. The λ vector is given as explicit (linear) rational
/// functions of the unknown lift coefficients: writing generator ℓ's new
/// coordinate as `q_ℓ + Σ_{i in block ℓ} c_i · b_{symbol(i)}`, the vector
/// with `λ_i = −c_i` and `λ_{j0} = 1` makes every combination `λ·g_ℓ`
/// collapse to the rational `q_ℓ`, and its last entry is 1, so it is never
/// zero.
#[derive(Clone, Debug)]
pub struct ObstructionCertificate {
    source_dim: usize,
    kept: Vec<usize>,
    j0: usize,
    block_owner: Vec<usize>,
    coord_symbol: Vec<usize>,
    generators: usize,
    basis: Basis,
}

fn certificate_from_shape(
    proj: &TorusProjection,
    shape: &CounterexampleShape,
    generators: usize,
    basis: &Basis,
) -> ObstructionCertificate {
    let added = proj.added();
    ObstructionCertificate {
        source_dim: proj.source_dim(),
        kept: proj.kept().to_vec(),
        j0: added[0],
        block_owner: shape.owner.clone(),
        coord_symbol: shape.symbol.clone(),
        generators,
        basis: *basis,
    }
}

/// The data of one instantiated lift: a rational part per generator and one
/// coefficient per kept coordinate (the coefficient its owner's new
/// coordinate puts on that coordinate's symbol).
#[derive(Clone, Debug)]
pub struct LiftInstance {
    pub coefficients: Vec<BigRational>,
    pub rational_parts: Vec<BigRational>,
}

/// What one instantiation check produced.
#[derive(Clone, Debug)]
pub struct ObstructionWitness {
    pub lambda: Vec<BigRational>,
    /// The rational value of λ·g_ℓ per generator.
    pub combinations: Vec<BigRational>,
}

impl ObstructionCertificate {
    pub fn j0(&self) -> usize {
        self.j0
    }

    pub fn block_owner(&self) -> &[usize] {
        &self.block_owner
    }

    pub fn coord_symbol(&self) -> &[usize] {
        &self.coord_symbol
    }

    /// λ for a concrete coefficient assignment, indexed over the source
    /// coordinates.
    pub fn lambda(&self, instance: &LiftInstance) -> Vec<BigRational> {
        let mut lambda = vec![BigRational::zero(); self.source_dim];
        for (t, &coord) in self.kept.iter().enumerate() {
            lambda[coord] = -instance.coefficients[t].clone();
        }
        lambda[self.j0] = BigRational::one();
        lambda
    }

    /// The lift the instance describes: kept coordinates are copied from the
    /// tuple, the new coordinate of generator ℓ is
    /// `q_ℓ + Σ_{owner(i)=ℓ} c_i·b_{symbol(i)}`.
    pub fn instantiate_lift(
        &self,
        points: &[TorusPoint],
        instance: &LiftInstance,
    ) -> Result<Vec<TorusPoint>> {
        if instance.coefficients.len() != self.kept.len() {
            return Err(Error::DimensionMismatch {
                expected: self.kept.len(),
                got: instance.coefficients.len(),
            });
        }
        if instance.rational_parts.len() != self.generators {
            return Err(Error::DimensionMismatch {
                expected: self.generators,
                got: instance.rational_parts.len(),
            });
        }
        let position_in_kept: BTreeMap<usize, usize> =
            self.kept.iter().enumerate().map(|(t, &i)| (i, t)).collect();
        Ok(points
            .iter()
            .enumerate()
            .map(|(l, p)| {
                TorusPoint::new(
                    (0..self.source_dim)
                        .map(|i| {
                            if let Some(&t) = position_in_kept.get(&i) {
                                return p.coord(t).clone();
                            }
                            // The added coordinate, over the generator's own
                            // block span.
                            let mut terms = BTreeMap::new();
                            for (t, (&o, &s)) in
                                self.block_owner.iter().zip(&self.coord_symbol).enumerate()
                            {
                                if o == l {
                                    terms.insert(s, instance.coefficients[t].clone());
                                }
                            }
                            SymbolicReal::new(instance.rational_parts[l].clone(), terms)
                        })
                        .collect(),
                )
            })
            .collect())
    }

    /// Checks one instantiation end to end: λ is nonzero, every combination
    /// λ·g_ℓ is rational, and the instantiated lift fails the generation
    /// criterion.
    pub fn check_instantiation(
        &self,
        points: &[TorusPoint],
        instance: &LiftInstance,
    ) -> Result<ObstructionWitness> {
        let lift = self.instantiate_lift(points, instance)?;
        let lambda = self.lambda(instance);
        if lambda.iter().all(|x| x.is_zero()) {
            return Err(Error::InvalidArgument("lambda vanished".into()));
        }
        let mut combinations = Vec::with_capacity(lift.len());
        for g in &lift {
            let mut combo = SymbolicReal::zero();
            for (j, coefficient) in lambda.iter().enumerate() {
                combo = combo.add(&g.coord(j).scale(coefficient));
            }
            if !combo.is_rational() {
                return Err(Error::InvalidArgument("combination is not rational".into()));
            }
            combinations.push(combo.rational_part().clone());
        }
        if kronecker_generates(&lift, self.source_dim, &self.basis)? {
            return Err(Error::InvalidArgument(
                "instantiated lift unexpectedly generates".into(),
            ));
        }
        Ok(ObstructionWitness {
            lambda,
            combinations,
        })
    }
}

/// Replays the λ-extraction for a counterexample tuple against a projection
/// adding exactly one coordinate, producing the symbolic certificate.
pub fn verify_obstruction(
    points: &[TorusPoint],
    proj: &TorusProjection,
    basis: &Basis,
) -> Result<ObstructionCertificate> {
    let dim = proj.kept().len();
    validate_points(points, dim, basis)?;
    let added = proj.added();
    if added.len() != 1 {
        return Err(Error::InvalidArgument(
            "projection must add exactly one coordinate".into(),
        ));
    }
    let shape = shape_of(points, basis)?;
    if !kronecker_generates(points, dim, basis)? {
        return Err(Error::NotGenerating);
    }
    Ok(certificate_from_shape(proj, &shape, points.len(), basis))
}

/// Outcome of sampling random rational instantiations of a certificate.
#[derive(Clone, Debug)]
pub struct ObstructionSampleReport {
    pub trials: usize,
    pub passes: usize,
    /// The witness of the last trial, for reporting.
    pub last_witness: Option<ObstructionWitness>,
}

impl ObstructionSampleReport {
    pub fn all_passed(&self) -> bool {
        self.passes == self.trials
    }
}

/// Draws `trials` random rational instantiations (deterministically from
/// `seed`) and checks each against the certificate.
pub fn obstruction_random_check(
    certificate: &ObstructionCertificate,
    points: &[TorusPoint],
    trials: usize,
    seed: u64,
) -> Result<ObstructionSampleReport> {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut rand_rational = move || {
        BigRational::new(
            BigInt::from(rng.gen_range(-9i64..=9)),
            BigInt::from(rng.gen_range(1i64..=9)),
        )
    };
    let mut passes = 0;
    let mut last_witness = None;
    for _ in 0..trials {
        let instance = LiftInstance {
            coefficients: (0..certificate.kept.len())
                .map(|_| rand_rational())
                .collect(),
            rational_parts: (0..certificate.generators)
                .map(|_| rand_rational())
                .collect(),
        };
        if let Ok(witness) = certificate.check_instantiation(points, &instance) {
            passes += 1;
            last_witness = Some(witness);
        }
    }
    Ok(ObstructionSampleReport {
        trials,
        passes,
        last_witness,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn point(coords: Vec<SymbolicReal>) -> TorusPoint {
        TorusPoint::new(coords)
    }

    #[test]
    fn literal_round_trip() {
        for text in [
            "0",
            "1/2",
            "-3",
            "b1",
            "1/2 + 3*b1 - b2",
            "-1/2 - b3",
            "2/3*b2",
        ] {
            let parsed: SymbolicReal = text.parse().unwrap();
            let reparsed: SymbolicReal = parsed.to_string().parse().unwrap();
            assert_eq!(parsed, reparsed, "round-trip of {text}");
        }
    }

    #[test]
    fn literal_whitespace_insensitive() {
        let a: SymbolicReal = "1/2+3*b1-b2".parse().unwrap();
        let b: SymbolicReal = " 1/2 + 3*b1 - b2 ".parse().unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn literal_rejects_garbage() {
        assert!("".parse::<SymbolicReal>().is_err());
        assert!("b0".parse::<SymbolicReal>().is_err());
        assert!("1/0".parse::<SymbolicReal>().is_err());
        assert!("x1".parse::<SymbolicReal>().is_err());
        assert!("1 + + b1".parse::<SymbolicReal>().is_err());
    }

    #[test]
    fn torus_point_normalizes_rational_parts() {
        let p = point(vec![SymbolicReal::from_rational(rat(7, 2))]);
        assert_eq!(p.coord(0).rational_part(), &rat(1, 2));
        let q = point(vec![SymbolicReal::from_rational(rat(-1, 3))]);
        assert_eq!(q.coord(0).rational_part(), &rat(2, 3));
    }

    #[test]
    fn kronecker_examples() {
        let basis = Basis::new(2);
        // A single formal symbol generates the circle.
        assert!(kronecker_generates(&[point(vec![SymbolicReal::symbol(1)])], 1, &basis).unwrap());
        // A rational point does not.
        assert!(!kronecker_generates(
            &[point(vec![SymbolicReal::from_rational(rat(1, 2))])],
            1,
            &basis
        )
        .unwrap());
        // (b1, b2) generates the 2-torus.
        assert!(kronecker_generates(
            &[point(vec![
                SymbolicReal::symbol(1),
                SymbolicReal::symbol(2)
            ])],
            2,
            &basis
        )
        .unwrap());
        // (b1, 2·b1) does not: λ = (2, −1) is a rational relation.
        assert!(!kronecker_generates(
            &[point(vec![
                SymbolicReal::symbol(1),
                SymbolicReal::symbol(1).scale(&rat(2, 1)),
            ])],
            2,
            &basis
        )
        .unwrap());
    }

    #[test]
    fn kronecker_witness_agrees_with_decision() {
        let basis = Basis::new(2);
        let failing = [point(vec![
            SymbolicReal::symbol(1),
            SymbolicReal::symbol(1).scale(&rat(2, 1)),
        ])];
        let witness = kronecker_witness(&failing, 2, &basis).unwrap().unwrap();
        assert!(witness.iter().any(|x| !x.is_zero()));
        // The witness annihilates the irrational parts of every generator.
        for p in &failing {
            let combo = (0..2).fold(SymbolicReal::zero(), |acc, i| {
                acc.add(&p.coord(i).scale(&witness[i]))
            });
            assert!(combo.is_rational());
        }
        let generating = [point(vec![
            SymbolicReal::symbol(1),
            SymbolicReal::symbol(2),
        ])];
        assert!(kronecker_witness(&generating, 2, &basis).unwrap().is_none());
    }

    #[test]
    fn kronecker_dimension_validation() {
        let basis = Basis::new(1);
        assert!(matches!(
            kronecker_generates(&[point(vec![SymbolicReal::symbol(1)])], 2, &basis),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(matches!(
            kronecker_generates(&[point(vec![SymbolicReal::symbol(2)])], 1, &basis),
            Err(Error::SymbolOutsideBasis(2))
        ));
    }

    #[test]
    fn rational_closure_order_examples() {
        let half = point(vec![SymbolicReal::from_rational(rat(1, 2))]);
        assert_eq!(
            rational_closure_order(&[half], 1).unwrap(),
            Some(BigUint::from(2u32))
        );
        let p = point(vec![
            SymbolicReal::from_rational(rat(1, 2)),
            SymbolicReal::from_rational(rat(1, 3)),
        ]);
        assert_eq!(
            rational_closure_order(&[p], 2).unwrap(),
            Some(BigUint::from(6u32))
        );
        let irrational = point(vec![SymbolicReal::symbol(1)]);
        assert_eq!(rational_closure_order(&[irrational], 1).unwrap(), None);
    }

    #[test]
    fn fresh_symbol_lift_example() {
        let basis = Basis::new(1);
        let proj = TorusProjection::new(2, vec![0]).unwrap();
        let h = vec![point(vec![SymbolicReal::symbol(1)])];
        let outcome =
            find_generating_lift_torus(&proj, &h, LiftPolicy::FreshSymbols, &basis).unwrap();
        let lift = outcome.found().unwrap();
        assert_eq!(lift.basis.symbol_count(), 2);
        assert_eq!(lift.points[0].coord(0), &SymbolicReal::symbol(1));
        assert_eq!(lift.points[0].coord(1), &SymbolicReal::symbol(2));
    }

    #[test]
    fn ambient_only_obstruction_example() {
        // One generator, ambient basis exhausted by it: no ambient lift to
        // the 2-torus can generate.
        let basis = Basis::new(1);
        let proj = TorusProjection::new(2, vec![0]).unwrap();
        let h = vec![point(vec![SymbolicReal::symbol(1)])];
        let outcome =
            find_generating_lift_torus(&proj, &h, LiftPolicy::AmbientOnly, &basis).unwrap();
        match outcome {
            TorusLiftOutcome::Obstructed {
                ambient_rank_bound,
                target_dim,
                certificate,
            } => {
                assert_eq!((ambient_rank_bound, target_dim), (1, 2));
                let certificate = certificate.expect("counterexample shape");
                let instance = LiftInstance {
                    coefficients: vec![rat(3, 4)],
                    rational_parts: vec![rat(1, 5)],
                };
                let witness = certificate.check_instantiation(&h, &instance).unwrap();
                assert_eq!(witness.lambda, vec![rat(-3, 4), rat(1, 1)]);
                assert_eq!(witness.combinations, vec![rat(1, 5)]);
            }
            TorusLiftOutcome::Found(_) => panic!("expected obstruction"),
        }
    }

    #[test]
    fn ambient_only_succeeds_when_rank_allows() {
        // Two ambient symbols, one used: the greedy construction finds an
        // ambient lift of (b1) to the 2-torus using b2.
        let basis = Basis::new(2);
        let proj = TorusProjection::new(2, vec![0]).unwrap();
        let h = vec![point(vec![SymbolicReal::symbol(1)])];
        let outcome =
            find_generating_lift_torus(&proj, &h, LiftPolicy::AmbientOnly, &basis).unwrap();
        let lift = outcome.found().expect("rank analysis allows a lift");
        assert!(kronecker_generates(&lift.points, 2, &basis).unwrap());
        assert_eq!(lift.points[0].coord(0), &SymbolicReal::symbol(1));
    }

    #[test]
    fn identity_projection_returns_the_tuple() {
        let basis = Basis::new(1);
        let proj = TorusProjection::identity(1);
        let h = vec![point(vec![SymbolicReal::symbol(1)])];
        for policy in [LiftPolicy::AmbientOnly, LiftPolicy::FreshSymbols] {
            let outcome = find_generating_lift_torus(&proj, &h, policy, &basis).unwrap();
            assert_eq!(outcome.found().unwrap().points, h);
        }
    }

    #[test]
    fn lift_rejects_non_generating_tuple() {
        let basis = Basis::new(1);
        let proj = TorusProjection::new(2, vec![0]).unwrap();
        let h = vec![point(vec![SymbolicReal::from_rational(rat(1, 2))])];
        assert_eq!(
            find_generating_lift_torus(&proj, &h, LiftPolicy::FreshSymbols, &basis).unwrap_err(),
            Error::NotGenerating
        );
    }

    #[test]
    fn build_counterexample_examples() {
        let basis = Basis::new(1);
        let h = build_counterexample(1, &[1], &basis).unwrap();
        assert_eq!(h[0].coord(0), &SymbolicReal::symbol(1));

        let basis = Basis::new(2);
        let h = build_counterexample(1, &[2], &basis).unwrap();
        assert_eq!(h[0].coords().len(), 2);
        assert!(kronecker_generates(&h, 2, &basis).unwrap());

        let h = build_counterexample(2, &[1, 1], &basis).unwrap();
        assert_eq!(h[0].coord(0), &SymbolicReal::symbol(1));
        assert!(h[0].coord(1).is_zero());
        assert!(h[1].coord(0).is_zero());
        assert_eq!(h[1].coord(1), &SymbolicReal::symbol(2));
    }

    #[test]
    fn build_counterexample_rejects_small_basis() {
        let basis = Basis::new(1);
        assert_eq!(
            build_counterexample(1, &[2], &basis).unwrap_err(),
            Error::BasisTooSmall { need: 2, have: 1 }
        );
    }

    #[test]
    fn projection_validation() {
        assert!(TorusProjection::new(2, vec![0, 0]).is_err());
        assert!(TorusProjection::new(2, vec![2]).is_err());
        let proj = TorusProjection::new(3, vec![0, 2]).unwrap();
        assert_eq!(proj.added(), vec![1]);
        let p = TorusPoint::new(vec![
            SymbolicReal::symbol(1),
            SymbolicReal::symbol(2),
            SymbolicReal::symbol(3),
        ]);
        assert_eq!(
            proj.project(&p).unwrap().coords(),
            &[SymbolicReal::symbol(1), SymbolicReal::symbol(3)]
        );
    }

    #[test]
    fn verify_obstruction_requires_single_added_coordinate() {
        let basis = Basis::new(1);
        let proj = TorusProjection::new(3, vec![0]).unwrap();
        let h = build_counterexample(1, &[1], &basis).unwrap();
        assert!(matches!(
            verify_obstruction(&h, &proj, &basis),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn verify_obstruction_rejects_rational_tuples() {
        let basis = Basis::new(1);
        let proj = TorusProjection::new(2, vec![0]).unwrap();
        let h = vec![point(vec![SymbolicReal::from_rational(rat(1, 3))])];
        assert!(matches!(
            verify_obstruction(&h, &proj, &basis),
            Err(Error::NotCounterexampleShape(_))
        ));
    }

    #[test]
    fn verify_obstruction_requires_exhausted_basis() {
        let basis = Basis::new(3);
        let proj = TorusProjection::new(3, vec![0, 1]).unwrap();
        let h = build_counterexample(2, &[1, 1], &Basis::new(2)).unwrap();
        assert!(matches!(
            verify_obstruction(&h, &proj, &basis),
            Err(Error::AmbientBasisMismatch(_))
        ));
    }

    #[test]
    fn obstruction_certificate_two_blocks() {
        let basis = Basis::new(2);
        let proj = TorusProjection::new(3, vec![0, 1]).unwrap();
        let h = build_counterexample(2, &[1, 1], &basis).unwrap();
        let certificate = verify_obstruction(&h, &proj, &basis).unwrap();
        let report = obstruction_random_check(&certificate, &h, 50, 7).unwrap();
        assert!(report.all_passed());
        let witness = report.last_witness.unwrap();
        assert_eq!(witness.lambda.len(), 3);
        assert_eq!(witness.lambda[2], rat(1, 1));
    }

    #[test]
    fn rational_shift_does_not_change_generation() {
        let basis = Basis::new(2);
        let h = vec![point(vec![
            SymbolicReal::symbol(1),
            SymbolicReal::symbol(2),
        ])];
        let shifted: Vec<TorusPoint> = h
            .iter()
            .map(|p| p.translated(&[rat(1, 3), rat(5, 7)]).unwrap())
            .collect();
        assert_eq!(
            kronecker_generates(&h, 2, &basis).unwrap(),
            kronecker_generates(&shifted, 2, &basis).unwrap()
        );
    }

    #[test]
    fn relabeling_preserves_generation() {
        let basis = Basis::new(2);
        let h = vec![point(vec![
            SymbolicReal::symbol(1),
            SymbolicReal::symbol(2),
        ])];
        let map: BTreeMap<usize, usize> = [(1, 2), (2, 1)].into_iter().collect();
        let relabeled: Vec<TorusPoint> =
            h.iter().map(|p| p.relabel_symbols(&map).unwrap()).collect();
        assert_eq!(
            kronecker_generates(&h, 2, &basis).unwrap(),
            kronecker_generates(&relabeled, 2, &basis).unwrap()
        );
    }
}
