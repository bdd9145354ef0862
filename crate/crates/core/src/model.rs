//! Game model: alphabet, sender types, prior and single-letter utilities.
//!
//! Utilities are exact rationals. On construction every table entry is also
//! brought to a common denominator so that comparisons between `n`-letter
//! averages reduce to comparisons of integer sums ([`Horizon::score`]);
//! the `1/n` factor never changes an order and is dropped.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use alloc::{format, vec};
use core::fmt;

use num_integer::Integer;

use crate::error::{Error, Result};
use crate::rational::Rational;

/// Largest magnitude allowed for a scaled utility or prior weight. Sums over
/// any enumerable horizon stay far below `i64::MAX`.
const SCALED_LIMIT: i128 = 1 << 40;

/// Dense index of a sender type.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SenderTypeId(pub usize);

/// Lexicographic index of a sequence in `𝒳ⁿ`; the vertex id used by graphs
/// and the element type of questionnaires.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SeqId(pub usize);

impl fmt::Display for SeqId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A history of symbol ids.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Sequence(Vec<u16>);

impl Sequence {
    /// Wraps a list of symbol ids. Validity is checked by the model when the
    /// sequence is used.
    pub fn new(letters: Vec<u16>) -> Self {
        Self(letters)
    }

    /// Symbol ids in order.
    pub fn letters(&self) -> &[u16] {
        &self.0
    }

    /// Length `n`.
    pub fn len(&self) -> usize {
        self.0.len()
    }

    /// True for the empty sequence (never valid in a model).
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Concatenation `self ‖ other`.
    pub fn concat(&self, other: &Sequence) -> Sequence {
        let mut letters = self.0.clone();
        letters.extend_from_slice(&other.0);
        Sequence(letters)
    }
}

impl From<&[u16]> for Sequence {
    fn from(letters: &[u16]) -> Self {
        Self(letters.to_vec())
    }
}

/// Whether a type strictly prefers truth-telling letter by letter.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Honesty {
    /// `𝒰(x,x,λ) > 𝒰(x',x,λ)` for every `x' ≠ x`.
    Honest,
    /// Some column has a report at least as good as the truth.
    Other,
}

/// A validated game model. Immutable after construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Model {
    alphabet: Vec<String>,
    types: Vec<String>,
    prior: Vec<Rational>,
    /// `[λ][report][truth]`, row-major.
    utility: Vec<Rational>,
    scaled: Vec<i64>,
    prior_weights: Vec<i64>,
    prior_denom: i64,
    honest: Vec<bool>,
}

impl Model {
    /// Validates and builds a model.
    ///
    /// `utility[λ][i][j]` is `𝒰(report = i, truth = j, λ)`.
    pub fn new(
        alphabet: Vec<String>,
        types: Vec<String>,
        prior: Vec<Rational>,
        utility: Vec<Vec<Vec<Rational>>>,
    ) -> Result<Self> {
        let k = alphabet.len();
        if k < 2 {
            return Err(Error::TooFewSymbols(k));
        }
        if k > u16::MAX as usize + 1 {
            return Err(Error::TooManySymbols(k));
        }
        if types.is_empty() {
            return Err(Error::NoTypes);
        }
        check_labels(&alphabet)?;
        check_labels(&types)?;

        if prior.len() != types.len() {
            return Err(Error::PriorShape {
                expected: types.len(),
                found: prior.len(),
            });
        }
        for (p, label) in prior.iter().zip(&types) {
            if p.is_negative() {
                return Err(Error::NegativePrior(label.clone()));
            }
        }
        let total: Rational = prior.iter().sum();
        if total != Rational::ONE {
            return Err(Error::PriorNotNormalized(total));
        }

        if utility.len() != types.len() {
            let label = types
                .get(utility.len())
                .cloned()
                .unwrap_or_else(|| "<extra>".to_string());
            return Err(Error::MissingUtility {
                type_label: label,
                detail: format!("expected {} tables, found {}", types.len(), utility.len()),
            });
        }
        let mut flat = Vec::with_capacity(types.len() * k * k);
        for (table, label) in utility.iter().zip(&types) {
            if table.len() != k {
                return Err(Error::MissingUtility {
                    type_label: label.clone(),
                    detail: format!("expected {k} rows, found {}", table.len()),
                });
            }
            for (i, row) in table.iter().enumerate() {
                if row.len() != k {
                    return Err(Error::MissingUtility {
                        type_label: label.clone(),
                        detail: format!("row {i}: expected {k} entries, found {}", row.len()),
                    });
                }
                flat.extend_from_slice(row);
            }
        }

        let scaled = to_common_denominator(&flat)?.0;
        let (prior_weights, prior_denom) = to_common_denominator(&prior)?;

        let mut model = Self {
            alphabet,
            types,
            prior,
            utility: flat,
            scaled,
            prior_weights,
            prior_denom,
            honest: Vec::new(),
        };
        model.honest = (0..model.types.len())
            .map(|t| model.diagonal_dominates(SenderTypeId(t)))
            .collect();
        Ok(model)
    }

    /// The two-type model with `𝒳 = {0,1,2}`, types `h` (honest) and `d`
    /// (dishonest), prior `1/3, 2/3`.
    ///
    /// The honest table is `1` on the diagonal and `0` elsewhere; the
    /// dishonest table prefers lying in every column.
    pub fn example1() -> Self {
        let r = |v: i64| Rational::from(v);
        let honest = vec![
            vec![r(1), r(0), r(0)],
            vec![r(0), r(1), r(0)],
            vec![r(0), r(0), r(1)],
        ];
        // Rows are reports, columns are truths.
        let dishonest = vec![
            vec![r(1), r(2), r(1)],
            vec![r(2), r(1), r(1)],
            vec![r(0), r(0), r(0)],
        ];
        Self::new(
            vec!["0".into(), "1".into(), "2".into()],
            vec!["h".into(), "d".into()],
            vec![
                Rational::new(1, 3).expect("nonzero"),
                Rational::new(2, 3).expect("nonzero"),
            ],
            vec![honest, dishonest],
        )
        .expect("built-in model is valid")
    }

    /// Number of symbols `|𝒳|`.
    pub fn alphabet_size(&self) -> usize {
        self.alphabet.len()
    }

    /// Symbol labels in id order.
    pub fn alphabet(&self) -> &[String] {
        &self.alphabet
    }

    /// Number of types `|Λ|`.
    pub fn type_count(&self) -> usize {
        self.types.len()
    }

    /// Type labels in id order.
    pub fn type_labels(&self) -> &[String] {
        &self.types
    }

    /// All type ids in order.
    pub fn types(&self) -> impl Iterator<Item = SenderTypeId> + '_ {
        (0..self.types.len()).map(SenderTypeId)
    }

    /// Label of a type.
    pub fn type_label(&self, lambda: SenderTypeId) -> &str {
        &self.types[lambda.0]
    }

    /// Looks up a type by label.
    pub fn type_by_label(&self, label: &str) -> Result<SenderTypeId> {
        self.types
            .iter()
            .position(|t| t == label)
            .map(SenderTypeId)
            .ok_or_else(|| Error::UnknownType(label.to_string()))
    }

    /// Checks that a type id is in range.
    pub fn check_type(&self, lambda: SenderTypeId) -> Result<()> {
        if lambda.0 < self.types.len() {
            Ok(())
        } else {
            Err(Error::UnknownType(format!("#{}", lambda.0)))
        }
    }

    /// `P_Λ(λ)`.
    pub fn prior(&self, lambda: SenderTypeId) -> Rational {
        self.prior[lambda.0]
    }

    /// Prior as integer weights over [`Model::prior_denom`].
    pub fn prior_weight(&self, lambda: SenderTypeId) -> i64 {
        self.prior_weights[lambda.0]
    }

    /// Common denominator of the prior.
    pub fn prior_denom(&self) -> i64 {
        self.prior_denom
    }

    /// Single-letter utility `𝒰(report, truth, λ)`.
    pub fn utility(&self, lambda: SenderTypeId, report: u16, truth: u16) -> Rational {
        self.utility[self.offset(lambda, report, truth)]
    }

    /// Single-letter utility over the model-wide common denominator.
    pub fn scaled_utility(&self, lambda: SenderTypeId, report: u16, truth: u16) -> i64 {
        self.scaled[self.offset(lambda, report, truth)]
    }

    fn offset(&self, lambda: SenderTypeId, report: u16, truth: u16) -> usize {
        let k = self.alphabet.len();
        (lambda.0 * k + report as usize) * k + truth as usize
    }

    fn diagonal_dominates(&self, lambda: SenderTypeId) -> bool {
        let k = self.alphabet.len() as u16;
        (0..k).all(|truth| {
            let diag = self.scaled_utility(lambda, truth, truth);
            (0..k)
                .filter(|&r| r != truth)
                .all(|r| diag > self.scaled_utility(lambda, r, truth))
        })
    }

    /// Strict diagonal dominance of the single-letter table.
    pub fn classify_type(&self, lambda: SenderTypeId) -> Honesty {
        if self.honest[lambda.0] {
            Honesty::Honest
        } else {
            Honesty::Other
        }
    }

    /// Shorthand for `classify_type(λ) == Honesty::Honest`.
    pub fn is_honest(&self, lambda: SenderTypeId) -> bool {
        self.honest[lambda.0]
    }

    /// Checks that every letter of `seq` is a symbol id and `seq` is nonempty.
    pub fn check_sequence(&self, seq: &Sequence) -> Result<()> {
        if seq.is_empty() {
            return Err(Error::ZeroHorizon);
        }
        match seq
            .letters()
            .iter()
            .find(|&&l| l as usize >= self.alphabet.len())
        {
            Some(bad) => Err(Error::InvalidSymbol(format!("#{bad}"))),
            None => Ok(()),
        }
    }

    /// Averaged utility `(1/n) Σᵢ 𝒰(reportedᵢ, truthᵢ, λ)`, exactly.
    pub fn sequence_utility(
        &self,
        lambda: SenderTypeId,
        reported: &Sequence,
        truth: &Sequence,
    ) -> Result<Rational> {
        self.check_type(lambda)?;
        if reported.len() != truth.len() {
            return Err(Error::LengthMismatch {
                expected: truth.len(),
                found: reported.len(),
            });
        }
        self.check_sequence(reported)?;
        self.check_sequence(truth)?;
        let sum: Rational = reported
            .letters()
            .iter()
            .zip(truth.letters())
            .map(|(&r, &t)| self.utility(lambda, r, t))
            .sum();
        Ok(sum / Rational::from(truth.len()))
    }

    /// `|𝒳|ⁿ`, or an error if it exceeds `budget`.
    pub fn sequence_count(&self, n: usize, budget: usize) -> Result<usize> {
        if n == 0 {
            return Err(Error::ZeroHorizon);
        }
        let exceeded = Error::EnumerationBudget {
            alphabet: self.alphabet.len(),
            n,
            budget,
        };
        let n32 = u32::try_from(n).map_err(|_| exceeded.clone())?;
        match self.alphabet.len().checked_pow(n32) {
            Some(c) if c <= budget => Ok(c),
            _ => Err(exceeded),
        }
    }

    /// All of `𝒳ⁿ` in lexicographic order of symbol ids.
    pub fn enumerate_sequences(&self, n: usize, budget: usize) -> Result<Vec<Sequence>> {
        let h = Horizon::new(self, n, budget)?;
        Ok(h.ids().map(|id| h.sequence(id)).collect())
    }

    /// Display form of a sequence: letters concatenated when every symbol
    /// label is one character, otherwise comma-separated.
    pub fn sequence_label(&self, seq: &Sequence) -> String {
        let sep = if self.single_char_labels() { "" } else { "," };
        let parts: Vec<&str> = seq
            .letters()
            .iter()
            .map(|&l| {
                self.alphabet
                    .get(l as usize)
                    .map(String::as_str)
                    .unwrap_or("?")
            })
            .collect();
        parts.join(sep)
    }

    /// Inverse of [`Model::sequence_label`]. Comma-separated labels are
    /// always accepted; without commas and with one-character symbol labels
    /// each character is a letter.
    pub fn parse_sequence(&self, text: &str) -> Result<Sequence> {
        let text = text.trim();
        let lookup = |label: &str| -> Result<u16> {
            self.alphabet
                .iter()
                .position(|a| a == label)
                .map(|p| p as u16)
                .ok_or_else(|| Error::InvalidSymbol(label.to_string()))
        };
        let letters = if text.contains(',') || !self.single_char_labels() {
            text.split(',')
                .map(|p| lookup(p.trim()))
                .collect::<Result<Vec<_>>>()?
        } else {
            let mut buf = [0u8; 4];
            text.chars()
                .map(|c| lookup(c.encode_utf8(&mut buf)))
                .collect::<Result<Vec<_>>>()?
        };
        let seq = Sequence(letters);
        self.check_sequence(&seq)?;
        Ok(seq)
    }

    fn single_char_labels(&self) -> bool {
        self.alphabet.iter().all(|a| a.chars().count() == 1)
    }
}

fn check_labels(labels: &[String]) -> Result<()> {
    for (i, label) in labels.iter().enumerate() {
        if label.is_empty() {
            return Err(Error::EmptyLabel);
        }
        if labels[..i].contains(label) {
            return Err(Error::DuplicateLabel(label.clone()));
        }
    }
    Ok(())
}

/// Brings `values` over their least common denominator, returning the
/// numerators and the denominator.
fn to_common_denominator(values: &[Rational]) -> Result<(Vec<i64>, i64)> {
    let mut denom: i128 = 1;
    for v in values {
        denom = denom.lcm(&v.denom());
        if denom > SCALED_LIMIT {
            return Err(Error::ScaleOverflow);
        }
    }
    let numers = values
        .iter()
        .map(|v| {
            let scaled = v
                .numer()
                .checked_mul(denom / v.denom())
                .filter(|s| s.abs() <= SCALED_LIMIT)
                .ok_or(Error::ScaleOverflow)?;
            Ok(scaled as i64)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((numers, denom as i64))
}

/// `𝒳ⁿ` materialized for one model and horizon.
///
/// Sequence ids are lexicographic: id `Σ xᵢ·|𝒳|^{n-1-i}`.
#[derive(Debug, Clone)]
pub struct Horizon<'m> {
    model: &'m Model,
    n: usize,
    count: usize,
    digits: Vec<u16>,
}

impl<'m> Horizon<'m> {
    /// Enumerates `𝒳ⁿ`, failing if `|𝒳|ⁿ > budget`.
    pub fn new(model: &'m Model, n: usize, budget: usize) -> Result<Self> {
        let count = model.sequence_count(n, budget)?;
        let k = model.alphabet_size();
        let mut digits = vec![0u16; count * n];
        for id in 0..count {
            let mut rest = id;
            for pos in (0..n).rev() {
                digits[id * n + pos] = (rest % k) as u16;
                rest /= k;
            }
        }
        Ok(Self {
            model,
            n,
            count,
            digits,
        })
    }

    /// Owning model.
    pub fn model(&self) -> &'m Model {
        self.model
    }

    /// Horizon `n`.
    pub fn n(&self) -> usize {
        self.n
    }

    /// `|𝒳|ⁿ`.
    pub fn len(&self) -> usize {
        self.count
    }

    /// Always false: `|𝒳| ≥ 2` and `n ≥ 1`.
    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    /// Every sequence id in lexicographic order.
    pub fn ids(&self) -> impl Iterator<Item = SeqId> {
        (0..self.count).map(SeqId)
    }

    /// Letters of sequence `id`.
    pub fn letters(&self, id: usize) -> &[u16] {
        &self.digits[id * self.n..(id + 1) * self.n]
    }

    /// Sequence with the given id.
    pub fn sequence(&self, id: SeqId) -> Sequence {
        Sequence(self.letters(id.0).to_vec())
    }

    /// Id of a sequence of this horizon.
    pub fn id_of(&self, seq: &Sequence) -> Result<SeqId> {
        if seq.len() != self.n {
            return Err(Error::LengthMismatch {
                expected: self.n,
                found: seq.len(),
            });
        }
        self.model.check_sequence(seq)?;
        let k = self.model.alphabet_size();
        Ok(SeqId(
            seq.letters().iter().fold(0, |acc, &l| acc * k + l as usize),
        ))
    }

    /// Fails unless `id < |𝒳|ⁿ`.
    pub fn check(&self, id: SeqId) -> Result<()> {
        if id.0 < self.count {
            Ok(())
        } else {
            Err(Error::SequenceOutOfRange {
                id: id.0,
                count: self.count,
            })
        }
    }

    /// Display label of sequence `id`.
    pub fn label(&self, id: SeqId) -> String {
        self.model.sequence_label(&self.sequence(id))
    }

    /// `Σᵢ 𝒰(reportedᵢ, truthᵢ, λ)` over the model's common denominator,
    /// i.e. `n · D · 𝒰ₙ` for a fixed positive `D`. Order-equivalent to the
    /// averaged utility.
    pub fn score(&self, lambda: SenderTypeId, reported: usize, truth: usize) -> i64 {
        self.letters(reported)
            .iter()
            .zip(self.letters(truth))
            .map(|(&r, &t)| self.model.scaled_utility(lambda, r, t))
            .sum()
    }
}
