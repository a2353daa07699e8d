//! Generator words and right actions on fibers.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Letter {
    pub generator: usize,
    pub inverse: bool,
}

impl Letter {
    pub fn new(generator: usize, inverse: bool) -> Self {
        Self { generator, inverse }
    }

    pub fn inv(self) -> Self {
        Self {
            generator: self.generator,
            inverse: !self.inverse,
        }
    }
}

/// A word in the generators and their inverses, read left to right.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Word(pub Vec<Letter>);

impl Word {
    pub fn trivial() -> Self {
        Self(Vec::new())
    }

    pub fn letter(generator: usize, inverse: bool) -> Self {
        Self(vec![Letter::new(generator, inverse)])
    }

    /// Parses whitespace-separated tokens `name`, `name^-1` or `name^k`.
    /// The empty string and `"e"` (unless `e` is a generator) are trivial.
    pub fn parse(text: &str, generators: &[String]) -> Result<Self> {
        let mut letters = Vec::new();
        for token in text.split_whitespace() {
            let (name, power) = match token.split_once('^') {
                Some((n, p)) => {
                    let p: i64 = p.parse().map_err(|_| Error::InvalidWord(text.to_string()))?;
                    (n, p)
                }
                None => (token, 1),
            };
            let Some(generator) = generators.iter().position(|g| g == name) else {
                if name == "e" && power == 1 {
                    continue;
                }
                return Err(Error::UnknownGenerator(name.to_string()));
            };
            for _ in 0..power.unsigned_abs() {
                letters.push(Letter::new(generator, power < 0));
            }
        }
        Ok(Self(letters))
    }

    pub fn is_trivial(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn inverse(&self) -> Self {
        Self(self.0.iter().rev().map(|l| l.inv()).collect())
    }

    pub fn concat(&self, other: &Word) -> Self {
        let mut w = self.0.clone();
        w.extend_from_slice(&other.0);
        Self(w)
    }

    /// Free reduction.
    pub fn reduced(&self) -> Self {
        let mut out: Vec<Letter> = Vec::with_capacity(self.0.len());
        for &l in &self.0 {
            if out.last() == Some(&l.inv()) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        Self(out)
    }

    pub fn display(&self, generators: &[String]) -> String {
        if self.0.is_empty() {
            return "e".into();
        }
        self.0
            .iter()
            .map(|l| {
                let name = generators.get(l.generator).map(String::as_str).unwrap_or("?");
                if l.inverse {
                    format!("{name}^-1")
                } else {
                    name.to_string()
                }
            })
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// A point of a fiber.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FiberPoint {
    Index(usize),
    Int(i64),
    Lattice(Vec<i64>),
    /// Reduced word of the free group.
    Free(Vec<Letter>),
    Pair(Box<FiberPoint>, Box<FiberPoint>),
}

impl fmt::Display for FiberPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FiberPoint::Index(i) => write!(f, "{i}"),
            FiberPoint::Int(i) => write!(f, "{i}"),
            FiberPoint::Lattice(v) => {
                let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
                write!(f, "({})", parts.join(","))
            }
            FiberPoint::Free(w) => {
                if w.is_empty() {
                    return write!(f, "e");
                }
                for (i, l) in w.iter().enumerate() {
                    if i > 0 {
                        write!(f, " ")?;
                    }
                    write!(f, "g{}", l.generator)?;
                    if l.inverse {
                        write!(f, "^-1")?;
                    }
                }
                Ok(())
            }
            FiberPoint::Pair(a, b) => write!(f, "<{a}|{b}>"),
        }
    }
}

impl Serialize for FiberPoint {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// How the generators act. Every generator acts bijectively.
#[derive(Debug, Clone, PartialEq)]
pub enum ActionKind {
    /// Every generator is the identity on `0..size`.
    Trivial { size: usize },
    /// Generator `g` adds `shifts[g]` modulo `order`.
    Cyclic { order: usize, shifts: Vec<i64> },
    /// Generator `g` adds `steps[g]` on `ℤ`.
    Integer { steps: Vec<i64> },
    /// Generator `g` adds the vector `steps[g]` on `ℤ^d`.
    Lattice { steps: Vec<Vec<i64>> },
    /// The free group on the generators acting on itself by right
    /// multiplication.
    Free,
    /// Generator `g` maps `i` to `perms[g][i]`.
    Permutation { perms: Vec<Vec<usize>>, inverses: Vec<Vec<usize>> },
    /// Coordinatewise action on a product of fibers.
    Product(Box<ActionKind>, Box<ActionKind>),
}

/// Generators acting on the right on a fiber: `y · g`.
#[derive(Debug, Clone, PartialEq)]
pub struct MonodromyAction {
    generators: Vec<String>,
    kind: ActionKind,
}

fn invert_permutation(p: &[usize]) -> Result<Vec<usize>> {
    let mut inv = vec![usize::MAX; p.len()];
    for (i, &j) in p.iter().enumerate() {
        if j >= p.len() || inv[j] != usize::MAX {
            return Err(Error::InvalidAction(format!("{p:?} is not a permutation")));
        }
        inv[j] = i;
    }
    Ok(inv)
}

impl MonodromyAction {
    pub fn new(generators: Vec<String>, kind: ActionKind) -> Result<Self> {
        let mut seen = std::collections::BTreeSet::new();
        for g in &generators {
            if g.is_empty() || g.contains(char::is_whitespace) || g.contains('^') {
                return Err(Error::InvalidAction(format!("bad generator name `{g}`")));
            }
            if !seen.insert(g) {
                return Err(Error::InvalidAction(format!("generator `{g}` listed twice")));
            }
        }
        Self::validate(&kind, generators.len())?;
        Ok(Self { generators, kind })
    }

    fn validate(kind: &ActionKind, k: usize) -> Result<()> {
        let count = |n: usize, what: &str| {
            if n == k {
                Ok(())
            } else {
                Err(Error::InvalidAction(format!("{what} has {n} entries for {k} generators")))
            }
        };
        match kind {
            ActionKind::Trivial { size } => {
                if *size == 0 {
                    return Err(Error::InvalidAction("empty fiber".into()));
                }
            }
            ActionKind::Cyclic { order, shifts } => {
                if *order == 0 {
                    return Err(Error::InvalidAction("cyclic order must be positive".into()));
                }
                count(shifts.len(), "shifts")?;
            }
            ActionKind::Integer { steps } => count(steps.len(), "steps")?,
            ActionKind::Lattice { steps } => {
                count(steps.len(), "steps")?;
                let d = steps.first().map(Vec::len).unwrap_or(0);
                if d == 0 || steps.iter().any(|s| s.len() != d) {
                    return Err(Error::InvalidAction("lattice steps must share a positive dimension".into()));
                }
            }
            ActionKind::Free => {}
            ActionKind::Permutation { perms, inverses } => {
                count(perms.len(), "permutations")?;
                let n = perms.first().map(Vec::len).unwrap_or(0);
                if n == 0 || perms.iter().any(|p| p.len() != n) {
                    return Err(Error::InvalidAction("permutations must share a positive degree".into()));
                }
                for (p, q) in perms.iter().zip(inverses) {
                    if invert_permutation(p)? != *q {
                        return Err(Error::InvalidAction("inverse table mismatch".into()));
                    }
                }
            }
            ActionKind::Product(a, b) => {
                Self::validate(a, k)?;
                Self::validate(b, k)?;
            }
        }
        Ok(())
    }

    pub fn trivial(generators: Vec<String>, size: usize) -> Result<Self> {
        Self::new(generators, ActionKind::Trivial { size })
    }

    pub fn cyclic(generators: Vec<String>, order: usize, shifts: Vec<i64>) -> Result<Self> {
        Self::new(generators, ActionKind::Cyclic { order, shifts })
    }

    pub fn integer(generators: Vec<String>, steps: Vec<i64>) -> Result<Self> {
        Self::new(generators, ActionKind::Integer { steps })
    }

    pub fn lattice(generators: Vec<String>, steps: Vec<Vec<i64>>) -> Result<Self> {
        Self::new(generators, ActionKind::Lattice { steps })
    }

    pub fn free(generators: Vec<String>) -> Result<Self> {
        Self::new(generators, ActionKind::Free)
    }

    pub fn permutation(generators: Vec<String>, perms: Vec<Vec<usize>>) -> Result<Self> {
        let inverses = perms.iter().map(|p| invert_permutation(p)).collect::<Result<_>>()?;
        Self::new(generators, ActionKind::Permutation { perms, inverses })
    }

    pub fn product(left: MonodromyAction, right: MonodromyAction) -> Result<Self> {
        if left.generators != right.generators {
            return Err(Error::InvalidAction("product factors must share generator names".into()));
        }
        Self::new(left.generators, ActionKind::Product(Box::new(left.kind), Box::new(right.kind)))
    }

    pub fn generators(&self) -> &[String] {
        &self.generators
    }

    pub fn kind(&self) -> &ActionKind {
        &self.kind
    }

    pub fn parse_word(&self, text: &str) -> Result<Word> {
        Word::parse(text, &self.generators)
    }

    /// Fiber size, `None` when infinite.
    pub fn fiber_size(&self) -> Option<usize> {
        fn size(k: &ActionKind) -> Option<usize> {
            match k {
                ActionKind::Trivial { size } => Some(*size),
                ActionKind::Cyclic { order, .. } => Some(*order),
                ActionKind::Permutation { perms, .. } => Some(perms[0].len()),
                ActionKind::Integer { .. } | ActionKind::Lattice { .. } | ActionKind::Free => None,
                ActionKind::Product(a, b) => Some(size(a)?.checked_mul(size(b)?)?),
            }
        }
        size(&self.kind)
    }

    /// All fiber points in canonical order (finite fibers only).
    pub fn fiber(&self) -> Result<Vec<FiberPoint>> {
        fn list(k: &ActionKind) -> Result<Vec<FiberPoint>> {
            match k {
                ActionKind::Trivial { size } => Ok((0..*size).map(FiberPoint::Index).collect()),
                ActionKind::Cyclic { order, .. } => Ok((0..*order).map(FiberPoint::Index).collect()),
                ActionKind::Permutation { perms, .. } => Ok((0..perms[0].len()).map(FiberPoint::Index).collect()),
                ActionKind::Integer { .. } | ActionKind::Lattice { .. } | ActionKind::Free => Err(Error::InfiniteFiber),
                ActionKind::Product(a, b) => {
                    let (la, lb) = (list(a)?, list(b)?);
                    Ok(la
                        .iter()
                        .flat_map(|x| lb.iter().map(move |y| FiberPoint::Pair(Box::new(x.clone()), Box::new(y.clone()))))
                        .collect())
                }
            }
        }
        list(&self.kind)
    }

    /// The distinguished fiber point (index 0, the origin, or the identity).
    pub fn base_point(&self) -> FiberPoint {
        fn bp(k: &ActionKind) -> FiberPoint {
            match k {
                ActionKind::Trivial { .. } | ActionKind::Cyclic { .. } | ActionKind::Permutation { .. } => {
                    FiberPoint::Index(0)
                }
                ActionKind::Integer { .. } => FiberPoint::Int(0),
                ActionKind::Lattice { steps } => FiberPoint::Lattice(vec![0; steps[0].len()]),
                ActionKind::Free => FiberPoint::Free(Vec::new()),
                ActionKind::Product(a, b) => FiberPoint::Pair(Box::new(bp(a)), Box::new(bp(b))),
            }
        }
        bp(&self.kind)
    }

    pub fn contains(&self, y: &FiberPoint) -> bool {
        fn has(k: &ActionKind, y: &FiberPoint, ngen: usize) -> bool {
            match (k, y) {
                (ActionKind::Trivial { size }, FiberPoint::Index(i)) => i < size,
                (ActionKind::Cyclic { order, .. }, FiberPoint::Index(i)) => i < order,
                (ActionKind::Permutation { perms, .. }, FiberPoint::Index(i)) => *i < perms[0].len(),
                (ActionKind::Integer { .. }, FiberPoint::Int(_)) => true,
                (ActionKind::Lattice { steps }, FiberPoint::Lattice(v)) => v.len() == steps[0].len(),
                (ActionKind::Free, FiberPoint::Free(w)) => {
                    w.iter().all(|l| l.generator < ngen) && w.windows(2).all(|p| p[1] != p[0].inv())
                }
                (ActionKind::Product(a, b), FiberPoint::Pair(x, z)) => has(a, x, ngen) && has(b, z, ngen),
                _ => false,
            }
        }
        has(&self.kind, y, self.generators.len())
    }

    /// `y · l`.
    pub fn act_letter(&self, y: &FiberPoint, l: Letter) -> Result<FiberPoint> {
        if l.generator >= self.generators.len() {
            return Err(Error::UnknownGenerator(format!("#{}", l.generator)));
        }
        fn go(k: &ActionKind, y: &FiberPoint, l: Letter) -> Result<FiberPoint> {
            let sign = if l.inverse { -1 } else { 1 };
            Ok(match (k, y) {
                (ActionKind::Trivial { size }, FiberPoint::Index(i)) if i < size => FiberPoint::Index(*i),
                (ActionKind::Cyclic { order, shifts }, FiberPoint::Index(i)) if i < order => {
                    let n = *order as i64;
                    FiberPoint::Index((*i as i64 + sign * shifts[l.generator]).rem_euclid(n) as usize)
                }
                (ActionKind::Permutation { perms, inverses }, FiberPoint::Index(i)) if *i < perms[0].len() => {
                    let table = if l.inverse { &inverses[l.generator] } else { &perms[l.generator] };
                    FiberPoint::Index(table[*i])
                }
                (ActionKind::Integer { steps }, FiberPoint::Int(i)) => FiberPoint::Int(
                    i.checked_add(sign * steps[l.generator])
                        .ok_or_else(|| Error::Overflow("integer fiber".into()))?,
                ),
                (ActionKind::Lattice { steps }, FiberPoint::Lattice(v)) if v.len() == steps[0].len() => {
                    FiberPoint::Lattice(v.iter().zip(&steps[l.generator]).map(|(a, b)| a + sign * b).collect())
                }
                (ActionKind::Free, FiberPoint::Free(w)) => {
                    let mut w = w.clone();
                    if w.last() == Some(&l.inv()) {
                        w.pop();
                    } else {
                        w.push(l);
                    }
                    FiberPoint::Free(w)
                }
                (ActionKind::Product(a, b), FiberPoint::Pair(x, z)) => {
                    FiberPoint::Pair(Box::new(go(a, x, l)?), Box::new(go(b, z, l)?))
                }
                _ => return Err(Error::InvalidAction(format!("{y} is not in the fiber"))),
            })
        }
        go(&self.kind, y, l)
    }

    /// `y · w`.
    pub fn act(&self, y: &FiberPoint, w: &Word) -> Result<FiberPoint> {
        let mut p = y.clone();
        for &l in &w.0 {
            p = self.act_letter(&p, l)?;
        }
        Ok(p)
    }

    /// `y · w⁻¹`.
    pub fn act_inverse(&self, y: &FiberPoint, w: &Word) -> Result<FiberPoint> {
        self.act(y, &w.inverse())
    }

    /// Whether every generator acts as the identity on every point (decided
    /// from the catalog entry, not by sampling).
    pub fn word_is_identity(&self, w: &Word) -> bool {
        fn ident(k: &ActionKind, w: &Word) -> bool {
            match k {
                ActionKind::Trivial { .. } => true,
                ActionKind::Cyclic { order, shifts } => {
                    let s: i64 = w.0.iter().map(|l| if l.inverse { -shifts[l.generator] } else { shifts[l.generator] }).sum();
                    s.rem_euclid(*order as i64) == 0
                }
                ActionKind::Integer { steps } => {
                    w.0.iter().map(|l| if l.inverse { -steps[l.generator] } else { steps[l.generator] }).sum::<i64>() == 0
                }
                ActionKind::Lattice { steps } => (0..steps[0].len()).all(|d| {
                    w.0.iter().map(|l| if l.inverse { -steps[l.generator][d] } else { steps[l.generator][d] }).sum::<i64>() == 0
                }),
                ActionKind::Free => w.reduced().is_trivial(),
                ActionKind::Permutation { perms, inverses } => (0..perms[0].len()).all(|i| {
                    let mut j = i;
                    for l in &w.0 {
                        j = if l.inverse { inverses[l.generator][j] } else { perms[l.generator][j] };
                    }
                    j == i
                }),
                ActionKind::Product(a, b) => ident(a, w) && ident(b, w),
            }
        }
        ident(&self.kind, w)
    }

    /// Symmetrized generating set `{g, g⁻¹}` as single-letter words.
    pub fn symmetric_letters(&self) -> Vec<Word> {
        (0..self.generators.len())
            .flat_map(|g| [Word::letter(g, false), Word::letter(g, true)])
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(n: &[&str]) -> Vec<String> {
        n.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn words_parse_and_invert() {
        let g = names(&["a", "b"]);
        let w = Word::parse("a b^-1", &g).unwrap();
        assert_eq!(w.0, vec![Letter::new(0, false), Letter::new(1, true)]);
        assert_eq!(w.inverse().display(&g), "b a^-1");
        assert_eq!(Word::parse("a^2", &g).unwrap().len(), 2);
        assert!(Word::parse("", &g).unwrap().is_trivial());
        assert!(matches!(Word::parse("c", &g), Err(Error::UnknownGenerator(_))));
        assert!(Word::parse("a a^-1", &g).unwrap().reduced().is_trivial());
    }

    #[test]
    fn free_action_reduces() {
        let act = MonodromyAction::free(names(&["a", "b"])).unwrap();
        let e = act.base_point();
        let w = act.parse_word("a b b^-1 a^-1").unwrap();
        assert_eq!(act.act(&e, &w).unwrap(), e);
        let y = act.act(&e, &act.parse_word("a b").unwrap()).unwrap();
        assert_eq!(act.act_inverse(&act.act(&y, &w).unwrap(), &w).unwrap(), y);
    }

    #[test]
    fn permutations_are_validated() {
        assert!(MonodromyAction::permutation(names(&["s"]), vec![vec![0, 0, 1]]).is_err());
        let s3 = MonodromyAction::permutation(names(&["s", "t"]), vec![vec![1, 0, 2], vec![1, 2, 0]]).unwrap();
        assert_eq!(s3.fiber_size(), Some(3));
        let t = Word::letter(1, false);
        let y = s3.act(&FiberPoint::Index(0), &t).unwrap();
        assert_eq!(y, FiberPoint::Index(1));
        assert_eq!(s3.act_inverse(&y, &t).unwrap(), FiberPoint::Index(0));
        assert!(s3.word_is_identity(&Word::parse("t t t", s3.generators()).unwrap()));
    }

    #[test]
    fn products_and_cyclic() {
        let g = names(&["a"]);
        let p = MonodromyAction::product(
            MonodromyAction::cyclic(g.clone(), 3, vec![1]).unwrap(),
            MonodromyAction::trivial(g, 2).unwrap(),
        )
        .unwrap();
        assert_eq!(p.fiber_size(), Some(6));
        assert_eq!(p.fiber().unwrap().len(), 6);
        let y = p.act(&p.base_point(), &Word::letter(0, true)).unwrap();
        assert_eq!(y, FiberPoint::Pair(Box::new(FiberPoint::Index(2)), Box::new(FiberPoint::Index(0))));
    }
}
