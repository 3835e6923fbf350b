//! Noncommutative words, expression parsing, and reduction to the
//! canonical ladder normal form.
//!
//! Elements are linear combinations of words over one of two alphabets:
//! `{x, y, z}` or the ladder alphabet `{Jp, Jm, z}` with `Jp = x + i y`,
//! `Jm = x - i y`. Mixing the two is rejected. Reduction orders every word
//! as `Jp^a z^b Jm^c` using the rewrite rules
//!
//! ```text
//! z  Jp -> Jp z + k Jp
//! Jm z  -> z Jm + k Jm        (words without Jp)
//! z  Jm -> Jm z - k Jm        (words still holding a Jp)
//! Jm Jp -> u - k z - z^2
//! Jp Jm -> u + k z - z^2
//! ```
//!
//! The elimination rules come from the Casimir relation combined with
//! `[Jp, Jm] = 2 k z`; they remove `Jp` and `Jm` from a common term. While
//! a word still holds both ladder letters they are marched toward each
//! other until a pair annihilates (the two z-commutation rules are applied
//! in the direction that brings them together); once only one ladder
//! letter survives, the word is sorted into `Jp^a z^b` or `z^b Jm^c`. Each
//! rule decreases a well-founded measure (J-pair count, then misordered
//! adjacent pairs), so reduction terminates, and the surviving monomials
//! are linearly independent in the quotient algebra, which makes the
//! normal form canonical regardless of application order.
//!
//! The reducer counts rule applications. That count is the cost measure
//! for the slow decomposition path in the benchmark harness.

use crate::coeff::{GaussRational, ParamPoly};
use crate::{Error, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};

/// Generator letters. `Z` belongs to both alphabets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Gen {
    X,
    Y,
    Z,
    Jp,
    Jm,
}

impl Gen {
    fn is_xy(self) -> bool {
        matches!(self, Gen::X | Gen::Y)
    }

    fn is_ladder(self) -> bool {
        matches!(self, Gen::Jp | Gen::Jm)
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Gen::X => "x",
            Gen::Y => "y",
            Gen::Z => "z",
            Gen::Jp => "Jp",
            Gen::Jm => "Jm",
        }
    }
}

/// A finite word over the generators; the empty word is the identity.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Default)]
pub struct Word(pub Vec<Gen>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn single(g: Gen) -> Self {
        Word(vec![g])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }

    fn uses_xy(&self) -> bool {
        self.0.iter().any(|g| g.is_xy())
    }

    fn uses_ladder(&self) -> bool {
        self.0.iter().any(|g| g.is_ladder())
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<&str> = self.0.iter().map(|g| g.symbol()).collect();
        write!(f, "{}", parts.join("*"))
    }
}

/// A linear combination of words with [`ParamPoly`] coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FreeElement {
    terms: BTreeMap<Word, ParamPoly>,
}

impl FreeElement {
    pub fn zero() -> Self {
        FreeElement::default()
    }

    pub fn one() -> Self {
        FreeElement::from_word(Word::empty(), ParamPoly::one())
    }

    pub fn gen(g: Gen) -> Self {
        FreeElement::from_word(Word::single(g), ParamPoly::one())
    }

    pub fn scalar(c: ParamPoly) -> Self {
        FreeElement::from_word(Word::empty(), c)
    }

    pub fn from_word(w: Word, c: ParamPoly) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(w, c);
        }
        FreeElement { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &ParamPoly)> {
        self.terms.iter()
    }

    pub fn add_term(&mut self, w: Word, c: &ParamPoly) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(w.clone()).or_insert_with(ParamPoly::zero);
        *entry = entry.add(c);
        if entry.is_zero() {
            self.terms.remove(&w);
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (w, c) in &other.terms {
            out.add_term(w.clone(), c);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&ParamPoly::from_int(-1)))
    }

    pub fn scale(&self, c: &ParamPoly) -> Self {
        let mut out = FreeElement::zero();
        for (w, v) in &self.terms {
            out.add_term(w.clone(), &v.mul(c));
        }
        out
    }

    pub fn max_word_len(&self) -> usize {
        self.terms.keys().map(Word::len).max().unwrap_or(0)
    }

    fn uses_xy(&self) -> bool {
        self.terms.keys().any(Word::uses_xy)
    }

    fn uses_ladder(&self) -> bool {
        self.terms.keys().any(Word::uses_ladder)
    }

    fn check_alphabet(&self) -> Result<()> {
        if self.uses_xy() && self.uses_ladder() {
            Err(Error::MixedAlphabet)
        } else {
            Ok(())
        }
    }
}

/// Bilinear word-concatenation product in the free algebra.
pub fn mul_free(f: &FreeElement, g: &FreeElement) -> Result<FreeElement> {
    let mut out = FreeElement::zero();
    for (wf, cf) in &f.terms {
        for (wg, cg) in &g.terms {
            out.add_term(wf.concat(wg), &cf.mul(cg));
        }
    }
    out.check_alphabet()?;
    Ok(out)
}

/// Hermitian conjugate: reverses words, conjugates coefficients, swaps
/// `Jp <-> Jm` (since `(x + i y)^dagger = x - i y`); `x`, `y`, `z` are
/// fixed.
pub fn dagger_free(f: &FreeElement) -> FreeElement {
    let mut out = FreeElement::zero();
    for (w, c) in &f.terms {
        let rev: Vec<Gen> = w
            .0
            .iter()
            .rev()
            .map(|g| match g {
                Gen::Jp => Gen::Jm,
                Gen::Jm => Gen::Jp,
                other => *other,
            })
            .collect();
        out.add_term(Word(rev), &c.conjugate());
    }
    out
}

/// Substitutes `x = (Jp + Jm)/2`, `y = (Jp - Jm)/(2i)` and expands.
pub fn to_ladder(f: &FreeElement) -> FreeElement {
    let half = GaussRational::from_ratio(1, 2);
    // 1/(2i) = -i/2
    let half_over_i = GaussRational::new(
        BigRational::zero(),
        -BigRational::new(BigInt::one(), BigInt::from(2)),
    );
    let mut out = FreeElement::zero();
    for (w, c) in &f.terms {
        let mut acc: Vec<(Vec<Gen>, GaussRational)> = vec![(Vec::new(), GaussRational::one())];
        for g in &w.0 {
            let choices: Vec<(Gen, GaussRational)> = match g {
                Gen::X => vec![(Gen::Jp, half.clone()), (Gen::Jm, half.clone())],
                Gen::Y => vec![
                    (Gen::Jp, half_over_i.clone()),
                    (Gen::Jm, half_over_i.neg()),
                ],
                other => vec![(*other, GaussRational::one())],
            };
            let mut next = Vec::with_capacity(acc.len() * choices.len());
            for (prefix, coeff) in &acc {
                for (letter, factor) in &choices {
                    let mut word = prefix.clone();
                    word.push(*letter);
                    next.push((word, coeff.mul(factor)));
                }
            }
            acc = next;
        }
        for (letters, factor) in acc {
            out.add_term(Word(letters), &c.scale(&factor));
        }
    }
    out
}

/// Canonical normal form: a linear combination of ordered monomials
/// `Jp^a z^b Jm^c` keyed by `(a, b, c)`. Quotient reduction never leaves
/// `Jp` and `Jm` in a common term, so its keys always have `a = 0` or
/// `c = 0`; the enveloping reduction uses the full PBW key range.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct NormalForm {
    terms: BTreeMap<(u32, u32, u32), ParamPoly>,
}

impl NormalForm {
    pub fn zero() -> Self {
        NormalForm::default()
    }

    pub fn one() -> Self {
        NormalForm::monomial(0, 0, 0, ParamPoly::one())
    }

    pub fn jp() -> Self {
        NormalForm::monomial(1, 0, 0, ParamPoly::one())
    }

    pub fn jm() -> Self {
        NormalForm::monomial(0, 0, 1, ParamPoly::one())
    }

    pub fn z() -> Self {
        NormalForm::monomial(0, 1, 0, ParamPoly::one())
    }

    pub fn monomial(a: u32, b: u32, c: u32, coeff: ParamPoly) -> Self {
        let mut terms = BTreeMap::new();
        if !coeff.is_zero() {
            terms.insert((a, b, c), coeff);
        }
        NormalForm { terms }
    }

    pub fn scalar(c: ParamPoly) -> Self {
        NormalForm::monomial(0, 0, 0, c)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(u32, u32, u32), &ParamPoly)> {
        self.terms.iter()
    }

    pub fn coeff(&self, a: u32, b: u32, c: u32) -> ParamPoly {
        self.terms
            .get(&(a, b, c))
            .cloned()
            .unwrap_or_else(ParamPoly::zero)
    }

    pub fn add_term(&mut self, key: (u32, u32, u32), c: &ParamPoly) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(key).or_insert_with(ParamPoly::zero);
        *entry = entry.add(c);
        if entry.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (key, c) in &other.terms {
            out.add_term(*key, c);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&ParamPoly::from_int(-1)))
    }

    pub fn scale(&self, c: &ParamPoly) -> Self {
        let mut out = NormalForm::zero();
        for (key, v) in &self.terms {
            out.add_term(*key, &v.mul(c));
        }
        out
    }

    /// Word degree of the largest monomial.
    pub fn degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|(a, b, c)| a + b + c)
            .max()
            .unwrap_or(0)
    }

    /// Hermitian conjugate. `(Jp^a z^b Jm^c)^dagger = Jp^c z^b Jm^a` is
    /// already ordered, so no rewriting happens.
    pub fn dagger(&self) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|(&(a, b, c), v)| ((c, b, a), v.conjugate()))
            .collect();
        NormalForm { terms }
    }

    /// Back to the free algebra (ladder alphabet).
    pub fn to_free(&self) -> FreeElement {
        let mut out = FreeElement::zero();
        for (&(a, b, c), coeff) in &self.terms {
            let mut letters = Vec::with_capacity((a + b + c) as usize);
            letters.extend(std::iter::repeat(Gen::Jp).take(a as usize));
            letters.extend(std::iter::repeat(Gen::Z).take(b as usize));
            letters.extend(std::iter::repeat(Gen::Jm).take(c as usize));
            out.add_term(Word(letters), coeff);
        }
        out
    }

    /// Groups terms by the ladder index `m = a - c`. Each group maps
    /// z-degree to its coefficient: the polynomial `p` in the eigenvector
    /// shape `Jp^m p(z)` (or `Jm^-m p(z)` for `m < 0`).
    pub fn sectors(&self) -> BTreeMap<i64, BTreeMap<u32, ParamPoly>> {
        let mut out: BTreeMap<i64, BTreeMap<u32, ParamPoly>> = BTreeMap::new();
        for (&(a, b, c), coeff) in &self.terms {
            let m = a as i64 - c as i64;
            let sector = out.entry(m).or_default();
            let entry = sector.entry(b).or_insert_with(ParamPoly::zero);
            *entry = entry.add(coeff);
        }
        out
    }

    /// The ladder index `m` when every term lives in one sector.
    pub fn single_sector(&self) -> Option<i64> {
        let sectors = self.sectors();
        if sectors.len() == 1 {
            sectors.keys().next().copied()
        } else {
            None
        }
    }

    /// Splits into weight-homogeneous parts: the weight of a term is the
    /// word degree plus the coefficient-monomial weight.
    pub fn split_by_weight(&self) -> BTreeMap<i64, NormalForm> {
        let mut out: BTreeMap<i64, NormalForm> = BTreeMap::new();
        for (&(a, b, c), coeff) in &self.terms {
            let word_deg = (a + b + c) as i64;
            for (w, part) in coeff.split_by_weight() {
                out.entry(w + word_deg)
                    .or_insert_with(NormalForm::zero)
                    .add_term((a, b, c), &part);
            }
        }
        out
    }

    /// Common total weight, if the element is weight homogeneous.
    pub fn homogeneous_weight(&self) -> Option<i64> {
        let split = self.split_by_weight();
        if split.len() == 1 {
            split.keys().next().copied()
        } else {
            None
        }
    }

    /// Substitutes exact rational parameter values into every coefficient.
    pub fn specialize(&self, k0: &BigRational, u0: &BigRational) -> Result<NormalForm> {
        let mut out = NormalForm::zero();
        for (key, coeff) in &self.terms {
            out.add_term(*key, &ParamPoly::constant(coeff.eval(k0, u0)?));
        }
        Ok(out)
    }
}

impl fmt::Display for NormalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (&(a, b, c), coeff) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let mut word = Vec::new();
            if a > 0 {
                word.push(if a == 1 { "Jp".into() } else { format!("Jp^{a}") });
            }
            if b > 0 {
                word.push(if b == 1 { "z".into() } else { format!("z^{b}") });
            }
            if c > 0 {
                word.push(if c == 1 { "Jm".into() } else { format!("Jm^{c}") });
            }
            if word.is_empty() {
                write!(f, "({coeff})")?;
            } else {
                write!(f, "({coeff})*{}", word.join("*"))?;
            }
        }
        Ok(())
    }
}

/// Which quotient the reducer works in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RuleSystem {
    /// Full quotient: the Casimir is eliminated eagerly, `Jp`/`Jm` never
    /// share a term.
    Quotient,
    /// Enveloping algebra only: `Jm Jp -> Jp Jm - 2 k z`, Casimir kept.
    Enveloping,
}

/// Total rewrite-rule applications since process start.
static REWRITE_STEPS: AtomicU64 = AtomicU64::new(0);

/// Snapshot of the global rewrite-step counter (benchmark instrumentation).
pub fn rewrite_steps_total() -> u64 {
    REWRITE_STEPS.load(Ordering::Relaxed)
}

fn is_redex(pair: (Gen, Gen), has_jp: bool, quotient: bool) -> bool {
    match pair {
        (Gen::Z, Gen::Jp) | (Gen::Jm, Gen::Jp) => true,
        (Gen::Jp, Gen::Jm) => quotient,
        // March a lone Jm left toward a waiting Jp so the pair cancels.
        (Gen::Z, Gen::Jm) => quotient && has_jp,
        // Sort z before Jm once no Jp is left (always, in the enveloping
        // PBW order).
        (Gen::Jm, Gen::Z) => !quotient || !has_jp,
        _ => false,
    }
}

fn first_redex(word: &[Gen], system: RuleSystem) -> Option<usize> {
    let quotient = system == RuleSystem::Quotient;
    let has_jp = word.contains(&Gen::Jp);
    (0..word.len().saturating_sub(1))
        .find(|&idx| is_redex((word[idx], word[idx + 1]), has_jp, quotient))
}

fn find_redexes(word: &[Gen], system: RuleSystem) -> Vec<usize> {
    let quotient = system == RuleSystem::Quotient;
    let has_jp = word.contains(&Gen::Jp);
    (0..word.len().saturating_sub(1))
        .filter(|&idx| is_redex((word[idx], word[idx + 1]), has_jp, quotient))
        .collect()
}

/// Applies the rule at `pos` and returns the replacement terms.
fn apply_rule(
    word: &[Gen],
    pos: usize,
    coeff: &ParamPoly,
    system: RuleSystem,
) -> Vec<(Word, ParamPoly)> {
    let prefix = &word[..pos];
    let suffix = &word[pos + 2..];
    let glue = |mid: &[Gen]| {
        let mut v = Vec::with_capacity(prefix.len() + mid.len() + suffix.len());
        v.extend_from_slice(prefix);
        v.extend_from_slice(mid);
        v.extend_from_slice(suffix);
        Word(v)
    };
    let kappa = coeff.mul_monomial(1, 0);
    match (word[pos], word[pos + 1]) {
        // z Jp -> Jp z + k Jp
        (Gen::Z, Gen::Jp) => vec![
            (glue(&[Gen::Jp, Gen::Z]), coeff.clone()),
            (glue(&[Gen::Jp]), kappa),
        ],
        // Jm z -> z Jm + k Jm
        (Gen::Jm, Gen::Z) => vec![
            (glue(&[Gen::Z, Gen::Jm]), coeff.clone()),
            (glue(&[Gen::Jm]), kappa),
        ],
        // z Jm -> Jm z - k Jm
        (Gen::Z, Gen::Jm) => vec![
            (glue(&[Gen::Jm, Gen::Z]), coeff.clone()),
            (glue(&[Gen::Jm]), kappa.neg()),
        ],
        // Jm Jp -> u - k z - z^2   (quotient)
        //       -> Jp Jm - 2 k z   (enveloping)
        (Gen::Jm, Gen::Jp) => match system {
            RuleSystem::Quotient => vec![
                (glue(&[]), coeff.mul_monomial(0, 1)),
                (glue(&[Gen::Z]), kappa.neg()),
                (glue(&[Gen::Z, Gen::Z]), coeff.neg()),
            ],
            RuleSystem::Enveloping => vec![
                (glue(&[Gen::Jp, Gen::Jm]), coeff.clone()),
                (glue(&[Gen::Z]), kappa.scale(&GaussRational::from_int(-2))),
            ],
        },
        // Jp Jm -> u + k z - z^2
        (Gen::Jp, Gen::Jm) => vec![
            (glue(&[]), coeff.mul_monomial(0, 1)),
            (glue(&[Gen::Z]), kappa),
            (glue(&[Gen::Z, Gen::Z]), coeff.neg()),
        ],
        other => unreachable!("not a redex: {other:?}"),
    }
}

fn word_to_key(word: &[Gen]) -> (u32, u32, u32) {
    let a = word.iter().take_while(|g| **g == Gen::Jp).count();
    let c = word.iter().rev().take_while(|g| **g == Gen::Jm).count();
    let b = word.len() - a - c;
    debug_assert!(word[a..a + b].iter().all(|g| *g == Gen::Z));
    (a as u32, b as u32, c as u32)
}

/// Exhaustive reduction of a ladder-alphabet element. Returns the normal
/// form and the number of rule applications. `rng` picks redexes at random
/// when given; otherwise reduction is leftmost on the first pending word.
fn reduce(
    f: &FreeElement,
    system: RuleSystem,
    mut rng: Option<&mut ChaCha8Rng>,
) -> (NormalForm, u64) {
    let mut pending: BTreeMap<Word, ParamPoly> = f.terms.clone();
    let mut done = NormalForm::zero();
    let mut steps = 0u64;

    while !pending.is_empty() {
        let word = match rng.as_deref_mut() {
            Some(r) => {
                let idx = r.gen_range(0..pending.len());
                pending.keys().nth(idx).unwrap().clone()
            }
            None => pending.keys().next().unwrap().clone(),
        };
        let coeff = pending.remove(&word).unwrap();
        if coeff.is_zero() {
            continue;
        }
        let pos = match rng.as_deref_mut() {
            Some(r) => {
                let redexes = find_redexes(&word.0, system);
                if redexes.is_empty() {
                    done.add_term(word_to_key(&word.0), &coeff);
                    continue;
                }
                redexes[r.gen_range(0..redexes.len())]
            }
            None => match first_redex(&word.0, system) {
                Some(pos) => pos,
                None => {
                    done.add_term(word_to_key(&word.0), &coeff);
                    continue;
                }
            },
        };
        steps += 1;
        for (w, c) in apply_rule(&word.0, pos, &coeff, system) {
            if c.is_zero() {
                continue;
            }
            let entry = pending.entry(w.clone()).or_insert_with(ParamPoly::zero);
            *entry = entry.add(&c);
            if entry.is_zero() {
                pending.remove(&w);
            }
        }
    }
    REWRITE_STEPS.fetch_add(steps, Ordering::Relaxed);
    (done, steps)
}

/// Reduces to the canonical normal form, routing `x`/`y` words through the
/// ladder substitution first.
pub fn normalize(f: &FreeElement) -> Result<NormalForm> {
    normalize_counted(f).map(|(nf, _)| nf)
}

/// [`normalize`] plus the rewrite-step count.
pub fn normalize_counted(f: &FreeElement) -> Result<(NormalForm, u64)> {
    f.check_alphabet()?;
    let ladder = if f.uses_xy() { to_ladder(f) } else { f.clone() };
    Ok(reduce(&ladder, RuleSystem::Quotient, None))
}

/// Normalization with randomized redex choices; exercises confluence.
/// Agrees with [`normalize`] on every input.
pub fn normalize_randomized(f: &FreeElement, rng: &mut ChaCha8Rng) -> Result<NormalForm> {
    f.check_alphabet()?;
    let ladder = if f.uses_xy() { to_ladder(f) } else { f.clone() };
    Ok(reduce(&ladder, RuleSystem::Quotient, Some(rng)).0)
}

/// Reduction inside the enveloping algebra (no Casimir elimination):
/// canonical PBW coefficients of `Jp^a z^b Jm^c`. Used by the symmetric
/// calculus, where the Casimir must stay a free central element.
pub fn normalize_enveloping(f: &FreeElement) -> Result<NormalForm> {
    f.check_alphabet()?;
    let ladder = if f.uses_xy() { to_ladder(f) } else { f.clone() };
    Ok(reduce(&ladder, RuleSystem::Enveloping, None).0)
}

/// Product in the quotient: concatenates monomials pairwise and reduces.
/// This is the instrumented slow route; its step count feeds the
/// benchmark comparison.
pub fn nf_mul(f: &NormalForm, g: &NormalForm) -> NormalForm {
    nf_mul_counted(f, g).0
}

/// [`nf_mul`] plus the rewrite-step count.
pub fn nf_mul_counted(f: &NormalForm, g: &NormalForm) -> (NormalForm, u64) {
    let product = mul_free(&f.to_free(), &g.to_free()).expect("ladder alphabet is closed");
    reduce(&product, RuleSystem::Quotient, None)
}

// ---------------------------------------------------------------------------
// Expression grammar
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Int(BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer {
            src: src.as_bytes(),
            pos: 0,
        }
    }

    fn error(&self, msg: &str) -> Error {
        Error::Syntax {
            pos: self.pos,
            msg: msg.to_string(),
        }
    }

    fn tokens(mut self) -> Result<Vec<(usize, Token)>> {
        let mut out = Vec::new();
        while self.pos < self.src.len() {
            let start = self.pos;
            let ch = self.src[self.pos];
            match ch {
                b' ' | b'\t' | b'\n' | b'\r' => {
                    self.pos += 1;
                }
                b'+' => {
                    out.push((start, Token::Plus));
                    self.pos += 1;
                }
                b'-' => {
                    out.push((start, Token::Minus));
                    self.pos += 1;
                }
                b'*' => {
                    out.push((start, Token::Star));
                    self.pos += 1;
                }
                b'/' => {
                    out.push((start, Token::Slash));
                    self.pos += 1;
                }
                b'^' => {
                    out.push((start, Token::Caret));
                    self.pos += 1;
                }
                b'(' => {
                    out.push((start, Token::LParen));
                    self.pos += 1;
                }
                b')' => {
                    out.push((start, Token::RParen));
                    self.pos += 1;
                }
                b'0'..=b'9' => {
                    let mut end = self.pos;
                    while end < self.src.len() && self.src[end].is_ascii_digit() {
                        end += 1;
                    }
                    let text = std::str::from_utf8(&self.src[self.pos..end]).unwrap();
                    out.push((start, Token::Int(text.parse().unwrap())));
                    self.pos = end;
                }
                c if c.is_ascii_alphabetic() => {
                    let mut end = self.pos;
                    while end < self.src.len() && self.src[end].is_ascii_alphanumeric() {
                        end += 1;
                    }
                    let text = std::str::from_utf8(&self.src[self.pos..end]).unwrap();
                    out.push((start, Token::Ident(text.to_string())));
                    self.pos = end;
                }
                _ => return Err(self.error("unexpected character")),
            }
        }
        Ok(out)
    }
}

struct Parser {
    tokens: Vec<(usize, Token)>,
    pos: usize,
    end: usize,
}

/// Values during parsing: `R` is only legal under an even power, so it is
/// carried as its own case until the exponent is seen.
#[derive(Debug, Clone)]
enum PValue {
    Elem(FreeElement),
    RadiusAtom,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|(_, t)| t)
    }

    fn here(&self) -> usize {
        self.tokens
            .get(self.pos)
            .map(|(p, _)| *p)
            .unwrap_or(self.end)
    }

    fn bump(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).map(|(_, t)| t.clone());
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, msg: &str) -> Error {
        Error::Syntax {
            pos: self.here(),
            msg: msg.to_string(),
        }
    }

    fn expr(&mut self) -> Result<FreeElement> {
        let mut negate = false;
        loop {
            match self.peek() {
                Some(Token::Minus) => {
                    negate = !negate;
                    self.bump();
                }
                Some(Token::Plus) => {
                    self.bump();
                }
                _ => break,
            }
        }
        let mut acc = self.term()?;
        if negate {
            acc = acc.scale(&ParamPoly::from_int(-1));
        }
        loop {
            match self.peek() {
                Some(Token::Plus) => {
                    self.bump();
                    acc = acc.add(&self.term()?);
                }
                Some(Token::Minus) => {
                    self.bump();
                    acc = acc.sub(&self.term()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<FreeElement> {
        let mut acc = self.factor()?;
        while matches!(self.peek(), Some(Token::Star)) {
            self.bump();
            let rhs = self.factor()?;
            acc = mul_free(&acc, &rhs)?;
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<FreeElement> {
        let value = self.primary()?;
        let exponent = if matches!(self.peek(), Some(Token::Caret)) {
            self.bump();
            let mut negative = false;
            if matches!(self.peek(), Some(Token::Minus)) {
                negative = true;
                self.bump();
            }
            match self.bump() {
                Some(Token::Int(n)) => {
                    let n: i64 = n
                        .to_string()
                        .parse()
                        .map_err(|_| self.error("exponent too large"))?;
                    Some(if negative { -n } else { n })
                }
                _ => return Err(self.error("expected integer exponent after ^")),
            }
        } else {
            None
        };

        match value {
            PValue::RadiusAtom => {
                let e = exponent
                    .ok_or_else(|| self.error("bare R is not in the algebra; use R^2 (= u)"))?;
                if e < 0 || e % 2 != 0 {
                    return Err(self.error("only even nonnegative powers of R are allowed"));
                }
                Ok(FreeElement::scalar(ParamPoly::monomial(
                    0,
                    e / 2,
                    GaussRational::one(),
                )))
            }
            PValue::Elem(elem) => match exponent {
                None => Ok(elem),
                Some(e) if e >= 0 => {
                    let mut acc = FreeElement::one();
                    for _ in 0..e {
                        acc = mul_free(&acc, &elem)?;
                    }
                    Ok(acc)
                }
                Some(e) => {
                    // Negative powers only for invertible scalar monomials.
                    let inv = invert_scalar(&elem).ok_or_else(|| {
                        self.error("negative exponent on a non-invertible factor")
                    })?;
                    let mut acc = FreeElement::one();
                    for _ in 0..(-e) {
                        acc = mul_free(&acc, &inv)?;
                    }
                    Ok(acc)
                }
            },
        }
    }

    fn primary(&mut self) -> Result<PValue> {
        match self.bump() {
            Some(Token::Int(n)) => {
                // Optional rational literal a/b.
                if matches!(self.peek(), Some(Token::Slash)) {
                    self.bump();
                    match self.bump() {
                        Some(Token::Int(d)) => {
                            if d.is_zero() {
                                return Err(self.error("zero denominator"));
                            }
                            Ok(PValue::Elem(FreeElement::scalar(ParamPoly::constant(
                                GaussRational::from_rational(BigRational::new(n, d)),
                            ))))
                        }
                        _ => Err(self.error("expected integer denominator")),
                    }
                } else {
                    Ok(PValue::Elem(FreeElement::scalar(ParamPoly::constant(
                        GaussRational::from_rational(BigRational::from(n)),
                    ))))
                }
            }
            Some(Token::Ident(name)) => match name.as_str() {
                "x" => Ok(PValue::Elem(FreeElement::gen(Gen::X))),
                "y" => Ok(PValue::Elem(FreeElement::gen(Gen::Y))),
                "z" => Ok(PValue::Elem(FreeElement::gen(Gen::Z))),
                "Jp" => Ok(PValue::Elem(FreeElement::gen(Gen::Jp))),
                "Jm" => Ok(PValue::Elem(FreeElement::gen(Gen::Jm))),
                "i" => Ok(PValue::Elem(FreeElement::scalar(ParamPoly::constant(
                    GaussRational::i(),
                )))),
                "k" => Ok(PValue::Elem(FreeElement::scalar(ParamPoly::kappa()))),
                "u" => Ok(PValue::Elem(FreeElement::scalar(ParamPoly::u()))),
                "R" => Ok(PValue::RadiusAtom),
                _ => {
                    self.pos -= 1;
                    Err(self.error(&format!("unknown symbol `{name}`")))
                }
            },
            Some(Token::Minus) => {
                let inner = self.factor()?;
                Ok(PValue::Elem(inner.scale(&ParamPoly::from_int(-1))))
            }
            Some(Token::LParen) => {
                let inner = self.expr()?;
                match self.bump() {
                    Some(Token::RParen) => Ok(PValue::Elem(inner)),
                    _ => Err(self.error("expected )")),
                }
            }
            _ => Err(self.error("expected an atom")),
        }
    }
}

/// Inverts a one-term scalar whose coefficient monomial is `u`-free.
fn invert_scalar(elem: &FreeElement) -> Option<FreeElement> {
    let mut it = elem.terms();
    let (word, coeff) = it.next()?;
    if it.next().is_some() || !word.is_empty() {
        return None;
    }
    let mut mono = coeff.terms();
    let (&(ke, ue), c) = mono.next()?;
    if mono.next().is_some() || ue != 0 {
        return None;
    }
    Some(FreeElement::scalar(ParamPoly::monomial(-ke, 0, c.inv())))
}

/// Parses the expression grammar: atoms `x y z Jp Jm i k R u`, rational
/// literals `a/b`, operators `+ - * ^`, parentheses. `R^2` folds to `u`;
/// bare or odd powers of `R` are rejected.
pub fn parse(text: &str) -> Result<FreeElement> {
    let tokens = Lexer::new(text).tokens()?;
    let end = text.len();
    let mut parser = Parser {
        tokens,
        pos: 0,
        end,
    };
    let elem = parser.expr()?;
    if parser.pos != parser.tokens.len() {
        return Err(parser.error("unexpected trailing input"));
    }
    elem.check_alphabet()?;
    Ok(elem)
}
