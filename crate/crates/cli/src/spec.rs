//! Input grammars: group specifications (named families or 1-based cycle
//! notation), homomorphism specifications (`gI -> word` lines), generator
//! words, torus point lists, and the whitespace-separated matrix file format.

use std::sync::Arc;

use gaschutz_core::group::{families, FiniteGroup, GroupHom};
use gaschutz_core::perm::Permutation;
use gaschutz_core::torus::TorusPoint;
use gaschutz_core::{Error, Result};
use num_bigint::BigInt;

/// A parsed group specification: a named family or explicit generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GroupSpec {
    Cyclic(usize),
    Dihedral(usize),
    Symmetric(usize),
    Alternating(usize),
    Klein,
    Quaternion8,
    ElemAbelian(usize, usize),
    Explicit(Vec<Permutation>),
}

impl GroupSpec {
    pub fn parse(text: &str) -> Result<GroupSpec> {
        let trimmed = text.trim();
        if trimmed.is_empty() {
            return Err(Error::Parse("empty group spec".into()));
        }
        if trimmed.starts_with('(') {
            let gens = trimmed
                .split(';')
                .map(|part| parse_cycles(part.trim()))
                .collect::<Result<Vec<_>>>()?;
            return Ok(GroupSpec::Explicit(gens));
        }
        let mut parts = trimmed.split(':');
        let name = parts.next().expect("split is nonempty");
        let args: Vec<&str> = parts.collect();
        let arity = |want: usize| -> Result<()> {
            if args.len() != want {
                return Err(Error::Parse(format!(
                    "family `{name}` takes {want} parameter(s), got {}",
                    args.len()
                )));
            }
            Ok(())
        };
        let number = |text: &str| -> Result<usize> {
            text.parse()
                .map_err(|_| Error::Parse(format!("invalid number `{text}`")))
        };
        match name {
            "cyclic" => {
                arity(1)?;
                Ok(GroupSpec::Cyclic(number(args[0])?))
            }
            "dihedral" => {
                arity(1)?;
                Ok(GroupSpec::Dihedral(number(args[0])?))
            }
            "sym" => {
                arity(1)?;
                Ok(GroupSpec::Symmetric(number(args[0])?))
            }
            "alt" => {
                arity(1)?;
                Ok(GroupSpec::Alternating(number(args[0])?))
            }
            "klein" => {
                arity(0)?;
                Ok(GroupSpec::Klein)
            }
            "quaternion8" => {
                arity(0)?;
                Ok(GroupSpec::Quaternion8)
            }
            "elem-abelian" => {
                arity(2)?;
                Ok(GroupSpec::ElemAbelian(number(args[0])?, number(args[1])?))
            }
            _ => Err(Error::Parse(format!("unknown group family `{name}`"))),
        }
    }

    /// Canonical printing; parses back to the same group.
    pub fn print(&self) -> String {
        match self {
            GroupSpec::Cyclic(m) => format!("cyclic:{m}"),
            GroupSpec::Dihedral(m) => format!("dihedral:{m}"),
            GroupSpec::Symmetric(k) => format!("sym:{k}"),
            GroupSpec::Alternating(k) => format!("alt:{k}"),
            GroupSpec::Klein => "klein".into(),
            GroupSpec::Quaternion8 => "quaternion8".into(),
            GroupSpec::ElemAbelian(p, k) => format!("elem-abelian:{p}:{k}"),
            GroupSpec::Explicit(gens) => gens
                .iter()
                .map(|g| g.to_string())
                .collect::<Vec<_>>()
                .join("; "),
        }
    }

    /// Builds the group and the indices of its canonical generators.
    pub fn realize(&self, cap: usize) -> Result<(Arc<FiniteGroup>, Vec<usize>)> {
        match self {
            GroupSpec::Cyclic(m) => families::cyclic(*m, cap),
            GroupSpec::Dihedral(m) => families::dihedral(*m, cap),
            GroupSpec::Symmetric(k) => families::symmetric(*k, cap),
            GroupSpec::Alternating(k) => families::alternating(*k, cap),
            GroupSpec::Klein => families::klein(cap),
            GroupSpec::Quaternion8 => families::quaternion8(cap),
            GroupSpec::ElemAbelian(p, k) => families::elem_abelian(*p, *k, cap),
            GroupSpec::Explicit(gens) => {
                let degree = gens.iter().map(|g| g.degree()).max().unwrap_or(0);
                let padded = gens
                    .iter()
                    .map(|g| g.padded(degree))
                    .collect::<Result<Vec<_>>>()?;
                let group = FiniteGroup::from_generators(&padded, cap)?;
                let indices = padded
                    .iter()
                    .map(|g| group.index_of(g).expect("generator lies in its closure"))
                    .collect();
                Ok((group, indices))
            }
        }
    }
}

/// Parses 1-based disjoint cycle notation, e.g. `(1 2)(3 4)`; `()` is the
/// identity. The degree is the largest point mentioned.
pub fn parse_cycles(text: &str) -> Result<Permutation> {
    let compact = text.trim();
    let bad = |msg: &str| Error::Parse(format!("invalid cycle notation `{compact}`: {msg}"));
    if compact.is_empty() {
        return Err(bad("empty"));
    }
    let mut cycles: Vec<Vec<usize>> = Vec::new();
    let mut rest = compact;
    while !rest.is_empty() {
        if !rest.starts_with('(') {
            return Err(bad("expected '('"));
        }
        let close = rest.find(')').ok_or_else(|| bad("missing ')'"))?;
        let inner = &rest[1..close];
        let points = inner
            .split_whitespace()
            .map(|tok| {
                let p: usize = tok
                    .parse()
                    .map_err(|_| bad(&format!("bad point `{tok}`")))?;
                if p == 0 {
                    return Err(bad("points are 1-based"));
                }
                Ok(p - 1)
            })
            .collect::<Result<Vec<usize>>>()?;
        if !points.is_empty() {
            cycles.push(points);
        }
        rest = rest[close + 1..].trim_start();
    }
    let degree = cycles
        .iter()
        .flat_map(|c| c.iter())
        .max()
        .map_or(0, |&m| m + 1);
    let mut images: Vec<usize> = (0..degree).collect();
    let mut touched = vec![false; degree];
    for cycle in &cycles {
        for window in 0..cycle.len() {
            let from = cycle[window];
            let to = cycle[(window + 1) % cycle.len()];
            if touched[from] {
                return Err(bad("point repeated across cycles"));
            }
            touched[from] = true;
            images[from] = to;
        }
    }
    Permutation::from_images(images)
}

/// A word in the generators: factors `gN` or `gN^k` (or `e`), joined by `*`.
pub type Word = Vec<(usize, i64)>;

pub fn parse_word(text: &str) -> Result<Word> {
    let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = |msg: String| Error::Parse(format!("invalid word `{text}`: {msg}"));
    if compact.is_empty() {
        return Err(bad("empty".into()));
    }
    let mut word = Vec::new();
    for factor in compact.split('*') {
        if factor == "e" {
            continue;
        }
        let body = factor
            .strip_prefix('g')
            .ok_or_else(|| bad(format!("factor `{factor}` must be e or gN")))?;
        let (index_text, exponent) = match body.split_once('^') {
            Some((i, k)) => (
                i,
                k.parse::<i64>()
                    .map_err(|_| bad(format!("bad exponent in `{factor}`")))?,
            ),
            None => (body, 1),
        };
        let index: usize = index_text
            .parse()
            .map_err(|_| bad(format!("bad generator index in `{factor}`")))?;
        if index == 0 {
            return Err(bad("generator indices are 1-based".into()));
        }
        word.push((index, exponent));
    }
    Ok(word)
}

pub fn print_word(word: &Word) -> String {
    if word.is_empty() {
        return "e".into();
    }
    word.iter()
        .map(|&(g, k)| {
            if k == 1 {
                format!("g{g}")
            } else {
                format!("g{g}^{k}")
            }
        })
        .collect::<Vec<_>>()
        .join("*")
}

/// Evaluates a word against a group's generator list.
pub fn eval_word(group: &Arc<FiniteGroup>, generators: &[usize], word: &Word) -> Result<usize> {
    let mut value = group.identity();
    for &(g, k) in word {
        if g > generators.len() {
            return Err(Error::Parse(format!(
                "word references g{g} but the group has {} generator(s)",
                generators.len()
            )));
        }
        let base = if k >= 0 {
            generators[g - 1]
        } else {
            group.inv(generators[g - 1])
        };
        for _ in 0..k.unsigned_abs() {
            value = group.mul(value, base);
        }
    }
    Ok(value)
}

/// A homomorphism specification: lines `gI -> word`, separated by `;` or
/// newlines.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomSpec {
    pub assignments: Vec<(usize, Word)>,
}

impl HomSpec {
    pub fn parse(text: &str) -> Result<HomSpec> {
        let mut assignments = Vec::new();
        for line in text.split([';', '\n']) {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let (lhs, rhs) = line
                .split_once("->")
                .ok_or_else(|| Error::Parse(format!("hom line `{line}` is missing `->`")))?;
            let lhs = lhs.trim();
            let index_text = lhs.strip_prefix('g').unwrap_or(lhs);
            let index: usize = index_text
                .parse()
                .map_err(|_| Error::Parse(format!("bad source generator `{lhs}`")))?;
            if index == 0 {
                return Err(Error::Parse("generator indices are 1-based".into()));
            }
            assignments.push((index, parse_word(rhs)?));
        }
        if assignments.is_empty() {
            return Err(Error::Parse("empty hom spec".into()));
        }
        Ok(HomSpec { assignments })
    }

    pub fn print(&self) -> String {
        self.assignments
            .iter()
            .map(|(g, w)| format!("g{g} -> {}", print_word(w)))
            .collect::<Vec<_>>()
            .join("; ")
    }

    /// Builds the homomorphism mapping source generators to the evaluated
    /// target words.
    pub fn build(
        &self,
        source: &Arc<FiniteGroup>,
        source_generators: &[usize],
        target: &Arc<FiniteGroup>,
        target_generators: &[usize],
    ) -> Result<GroupHom> {
        let mut pairs = Vec::with_capacity(self.assignments.len());
        for (g, word) in &self.assignments {
            if *g > source_generators.len() {
                return Err(Error::Parse(format!(
                    "hom spec references g{g} but the source has {} generator(s)",
                    source_generators.len()
                )));
            }
            pairs.push((
                source_generators[*g - 1],
                eval_word(target, target_generators, word)?,
            ));
        }
        GroupHom::from_generator_images(source, target, &pairs)
    }
}

/// Comma-separated words over the target generators, e.g. `g1,g1*g2`.
pub fn parse_tuple(
    group: &Arc<FiniteGroup>,
    generators: &[usize],
    text: &str,
) -> Result<Vec<usize>> {
    text.split(',')
        .map(|word| eval_word(group, generators, &parse_word(word)?))
        .collect()
}

/// Semicolon-separated points, comma-separated coordinates, each a symbolic
/// real literal: `b1,0;0,b2`.
pub fn parse_points(text: &str) -> Result<Vec<TorusPoint>> {
    text.split(';')
        .map(|point| {
            let coords = point
                .split(',')
                .map(|c| c.trim().parse())
                .collect::<Result<Vec<_>>>()?;
            Ok(TorusPoint::new(coords))
        })
        .collect()
}

pub fn print_points(points: &[TorusPoint]) -> String {
    points
        .iter()
        .map(|p| {
            p.coords()
                .iter()
                .map(|c| c.to_string())
                .collect::<Vec<_>>()
                .join(", ")
        })
        .collect::<Vec<_>>()
        .join("; ")
}

/// Matrix file format: first line `rows cols`, then row-major integers,
/// whitespace-separated.
pub fn parse_matrix(text: &str) -> Result<gaschutz_core::abelian::IntMatrix> {
    let mut tokens = text.split_whitespace();
    let mut number = |what: &str| -> Result<BigInt> {
        let tok = tokens
            .next()
            .ok_or_else(|| Error::Parse(format!("matrix file ended while reading {what}")))?;
        tok.parse()
            .map_err(|_| Error::Parse(format!("bad integer `{tok}` in matrix file")))
    };
    let rows: usize = number("row count")?
        .try_into()
        .map_err(|_| Error::Parse("negative row count".into()))?;
    let cols: usize = number("column count")?
        .try_into()
        .map_err(|_| Error::Parse("negative column count".into()))?;
    let mut entries = Vec::with_capacity(rows * cols);
    for _ in 0..rows * cols {
        entries.push(number("an entry")?);
    }
    if tokens.next().is_some() {
        return Err(Error::Parse("trailing tokens in matrix file".into()));
    }
    gaschutz_core::abelian::IntMatrix::from_entries(rows, cols, entries)
}

#[allow(dead_code)] // round-trip counterpart of parse_matrix, used by tests
pub fn print_matrix(matrix: &gaschutz_core::abelian::IntMatrix) -> String {
    let mut out = format!("{} {}\n", matrix.rows(), matrix.cols());
    for i in 0..matrix.rows() {
        let row: Vec<String> = (0..matrix.cols())
            .map(|j| matrix.get(i, j).to_string())
            .collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

pub fn parse_sizes(text: &str) -> Result<Vec<usize>> {
    text.split(',')
        .map(|tok| {
            tok.trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad block size `{tok}`")))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use gaschutz_core::perm::DEFAULT_ORDER_CAP;

    #[test]
    fn group_spec_round_trips() {
        for text in [
            "cyclic:12",
            "dihedral:8",
            "sym:4",
            "alt:4",
            "klein",
            "quaternion8",
            "elem-abelian:3:2",
            "(1 2); (1 2 3)",
        ] {
            let spec = GroupSpec::parse(text).unwrap();
            let printed = spec.print();
            let reparsed = GroupSpec::parse(&printed).unwrap();
            let (a, _) = spec.realize(DEFAULT_ORDER_CAP).unwrap();
            let (b, _) = reparsed.realize(DEFAULT_ORDER_CAP).unwrap();
            assert_eq!(a.elements(), b.elements(), "round-trip of {text}");
        }
    }

    #[test]
    fn explicit_gens_are_padded_to_common_degree() {
        let spec = GroupSpec::parse("(1 2); (3 4)").unwrap();
        let (group, gens) = spec.realize(DEFAULT_ORDER_CAP).unwrap();
        assert_eq!(group.order(), 4);
        assert_eq!(gens.len(), 2);
    }

    #[test]
    fn cycle_parsing() {
        assert_eq!(parse_cycles("()").unwrap(), Permutation::identity(0));
        assert_eq!(
            parse_cycles("(1 2)(3 4)").unwrap(),
            Permutation::from_images(vec![1, 0, 3, 2]).unwrap()
        );
        assert!(parse_cycles("(0 1)").is_err());
        assert!(parse_cycles("(1 2)(2 3)").is_err());
        assert!(parse_cycles("1 2").is_err());
    }

    #[test]
    fn cycle_print_parse_round_trip() {
        // Printing drops fixed trailing points, so compare after padding back.
        for images in [vec![1, 0, 3, 2], vec![1, 2, 0], vec![0, 1, 2]] {
            let p = Permutation::from_images(images).unwrap();
            let reparsed = parse_cycles(&p.to_string()).unwrap();
            assert_eq!(reparsed.padded(p.degree()).unwrap(), p);
        }
    }

    #[test]
    fn word_round_trip_and_eval() {
        let word = parse_word("g1*g2^-1*g1^3").unwrap();
        assert_eq!(parse_word(&print_word(&word)).unwrap(), word);
        assert_eq!(parse_word("e").unwrap(), Vec::new());

        let (s3, gens) = GroupSpec::parse("sym:3")
            .unwrap()
            .realize(DEFAULT_ORDER_CAP)
            .unwrap();
        let t = eval_word(&s3, &gens, &parse_word("g1").unwrap()).unwrap();
        assert_eq!(t, gens[0]);
        let id = eval_word(&s3, &gens, &parse_word("g1*g1").unwrap()).unwrap();
        assert_eq!(id, s3.identity());
        let inv = eval_word(&s3, &gens, &parse_word("g2^-1*g2").unwrap()).unwrap();
        assert_eq!(inv, s3.identity());
    }

    #[test]
    fn hom_spec_round_trip_and_build() {
        let spec = HomSpec::parse("g1 -> g1; g2 -> g1*g2^-1").unwrap();
        assert_eq!(HomSpec::parse(&spec.print()).unwrap(), spec);

        let (c4, g4) = GroupSpec::parse("cyclic:4")
            .unwrap()
            .realize(DEFAULT_ORDER_CAP)
            .unwrap();
        let (c2, g2) = GroupSpec::parse("cyclic:2")
            .unwrap()
            .realize(DEFAULT_ORDER_CAP)
            .unwrap();
        let hom = HomSpec::parse("g1 -> g1")
            .unwrap()
            .build(&c4, &g4, &c2, &g2)
            .unwrap();
        assert!(hom.is_surjective());
        assert_eq!(hom.kernel().order(), 2);
    }

    #[test]
    fn matrix_round_trip() {
        let m = parse_matrix("2 3\n1 -2 3\n0 5 -6\n").unwrap();
        assert_eq!(m.rows(), 2);
        assert_eq!(m.cols(), 3);
        let printed = print_matrix(&m);
        assert_eq!(parse_matrix(&printed).unwrap(), m);
        assert!(parse_matrix("2 2\n1 2 3").is_err());
        assert!(parse_matrix("1 1\n1 extra").is_err());
    }

    #[test]
    fn points_round_trip() {
        let points = parse_points("b1, 0; 1/2 + b2, 3*b1").unwrap();
        assert_eq!(points.len(), 2);
        let printed = print_points(&points);
        assert_eq!(parse_points(&printed).unwrap(), points);
    }
}
