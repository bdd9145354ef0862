//! Questionnaires, λ-partitions and the receiver's optimization.
//!
//! For a questionnaire `I`, the λ-partition `Ī_λ` holds the members a type-`λ`
//! sender strictly prefers to report truthfully over every other member of
//! `I`. The receiver's worst-case value of any strategy with image `I` is
//! `Σ_λ P(λ)·|Ī_λ|`, so the equilibrium problem is a search over nonempty
//! subsets of `𝒳ⁿ`.
//!
//! Partitions are antitone: removing members never shrinks `Ī_λ` on the
//! members that remain. Hence replacing `I` by `∪_λ Ī_λ` never lowers the
//! objective, an optimum is attained on a set whose every member lies in
//! some partition, and once a member falls out of every partition no
//! superset can bring it back. [`solve_exact`] prunes on exactly that.

use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::{Horizon, SenderTypeId, SeqId};
use crate::rational::Rational;

/// A set of sequences of one horizon, ordered lexicographically.
pub type SeqSet = BTreeSet<SeqId>;

fn check_members(h: &Horizon<'_>, members: &SeqSet) -> Result<()> {
    if members.is_empty() {
        return Err(Error::EmptySet);
    }
    members.iter().try_for_each(|&id| h.check(id))
}

/// `Ī_λ`: members `x` with `𝒰ₙ(x,x,λ) > 𝒰ₙ(y,x,λ)` for every other member `y`.
///
/// A singleton is its own partition (the condition is vacuous).
pub fn lambda_partition(h: &Horizon<'_>, members: &SeqSet, lambda: SenderTypeId) -> Result<SeqSet> {
    check_members(h, members)?;
    h.model().check_type(lambda)?;
    if h.model().is_honest(lambda) {
        return Ok(members.clone());
    }
    Ok(members
        .iter()
        .copied()
        .filter(|&x| {
            let truthful = h.score(lambda, x.0, x.0);
            members
                .iter()
                .all(|&y| y == x || truthful > h.score(lambda, y.0, x.0))
        })
        .collect())
}

/// `Σ_λ P(λ)·|Ī_λ|` for the questionnaire `members`.
pub fn receiver_objective(h: &Horizon<'_>, members: &SeqSet) -> Result<Rational> {
    let model = h.model();
    model
        .types()
        .map(|t| Ok(model.prior(t) * Rational::from(lambda_partition(h, members, t)?.len())))
        .sum()
}

/// A questionnaire with its partitions and objective.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Questionnaire {
    /// Horizon `n`.
    pub n: usize,
    /// The questionnaire `I`.
    pub members: SeqSet,
    /// `Ī_λ` for each type, in type order.
    pub partitions: Vec<SeqSet>,
    /// `Σ_λ P(λ)·|Ī_λ|`.
    pub objective: Rational,
}

impl Questionnaire {
    /// Computes partitions and objective of `members`.
    pub fn new(h: &Horizon<'_>, members: SeqSet) -> Result<Self> {
        let model = h.model();
        let partitions = model
            .types()
            .map(|t| lambda_partition(h, &members, t))
            .collect::<Result<Vec<_>>>()?;
        let objective = model
            .types()
            .zip(&partitions)
            .map(|(t, p)| model.prior(t) * Rational::from(p.len()))
            .sum();
        Ok(Self {
            n: h.n(),
            members,
            partitions,
            objective,
        })
    }
}

/// A receiver decoding map in canonical form: identity on the questionnaire,
/// a fixed member everywhere else.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReceiverStrategy {
    n: usize,
    universe: usize,
    members: SeqSet,
    fallback: SeqId,
}

impl ReceiverStrategy {
    /// Horizon `n`.
    pub fn n(&self) -> usize {
        self.n
    }

    /// `|𝒳ⁿ|`, the size of the domain.
    pub fn universe(&self) -> usize {
        self.universe
    }

    /// `image(g)`.
    pub fn image(&self) -> &SeqSet {
        &self.members
    }

    /// Sequence every non-member decodes to.
    pub fn fallback(&self) -> SeqId {
        self.fallback
    }

    /// `g(y)`.
    pub fn apply(&self, y: SeqId) -> SeqId {
        if self.members.contains(&y) {
            y
        } else {
            self.fallback
        }
    }

    /// Smallest `y` with `g(y) = z`, if any.
    pub fn least_preimage(&self, z: SeqId) -> Option<SeqId> {
        (0..self.universe).map(SeqId).find(|&y| self.apply(y) == z)
    }

    /// The identity map, whose image is all of `𝒳ⁿ`.
    pub fn identity(h: &Horizon<'_>) -> Self {
        Self {
            n: h.n(),
            universe: h.len(),
            members: h.ids().collect(),
            fallback: SeqId(0),
        }
    }

    /// The constant map onto `x`.
    pub fn constant(h: &Horizon<'_>, x: SeqId) -> Result<Self> {
        canonical_strategy(h, [x].into_iter().collect(), x)
    }
}

/// `g(x) = x` on `members`, `g(x) = fallback` elsewhere.
pub fn canonical_strategy(
    h: &Horizon<'_>,
    members: SeqSet,
    fallback: SeqId,
) -> Result<ReceiverStrategy> {
    check_members(h, &members)?;
    if !members.contains(&fallback) {
        return Err(Error::FallbackNotMember);
    }
    Ok(ReceiverStrategy {
        n: h.n(),
        universe: h.len(),
        members,
        fallback,
    })
}

/// [`canonical_strategy`] with the lexicographically smallest member as
/// fallback.
pub fn default_strategy(h: &Horizon<'_>, members: SeqSet) -> Result<ReceiverStrategy> {
    let fallback = *members.first().ok_or(Error::EmptySet)?;
    canonical_strategy(h, members, fallback)
}

/// Iterates `I ← ∪_λ Ī_λ` to a fixpoint, returning every iterate starting
/// with `members`. Stops early (keeping the last nonempty iterate) if the
/// union becomes empty.
pub fn closure_trace(h: &Horizon<'_>, members: &SeqSet) -> Result<Vec<SeqSet>> {
    check_members(h, members)?;
    let mut trace = vec![members.clone()];
    let mut value = receiver_objective(h, members)?;
    loop {
        let current = trace.last().expect("trace is nonempty");
        let mut next = SeqSet::new();
        for t in h.model().types() {
            next.extend(lambda_partition(h, current, t)?);
        }
        if next.is_empty() || &next == current {
            return Ok(trace);
        }
        let next_value = receiver_objective(h, &next)?;
        if next_value < value {
            return Err(Error::ClosureRegressed);
        }
        value = next_value;
        trace.push(next);
    }
}

/// Final iterate of [`closure_trace`].
pub fn reduce_closure(h: &Horizon<'_>, members: &SeqSet) -> Result<SeqSet> {
    Ok(closure_trace(h, members)?.pop().expect("trace is nonempty"))
}

/// How an [`EquilibriumResult`] was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchMode {
    /// Exhaustive; the optimum is certified.
    Exact,
    /// Local search; a lower bound on the optimum.
    Heuristic,
}

/// Counters from a search.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SearchStats {
    /// Questionnaires whose objective was evaluated.
    pub examined: u64,
    /// Branches cut by the dead-member rule.
    pub pruned: u64,
    /// Outcome of cross-checking the pruned optimum against full
    /// enumeration; `None` if not run.
    pub pruning_validated: Option<bool>,
}

/// Best questionnaire(s) found by a search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquilibriumResult {
    /// Horizon `n`.
    pub n: usize,
    /// `D*(g*)`: best objective found.
    pub optimum: Rational,
    /// Questionnaires attaining `optimum`, lexicographically ordered and
    /// capped; the first is the designated equilibrium questionnaire.
    pub maximizers: Vec<SeqSet>,
    /// True if more maximizers existed than the cap retained.
    pub truncated: bool,
    /// Exact or heuristic.
    pub mode: SearchMode,
    /// Search counters.
    pub stats: SearchStats,
}

impl EquilibriumResult {
    /// The designated equilibrium questionnaire.
    pub fn questionnaire(&self) -> &SeqSet {
        &self.maximizers[0]
    }

    /// Canonical strategy realizing the designated questionnaire.
    pub fn strategy(&self, h: &Horizon<'_>) -> Result<ReceiverStrategy> {
        default_strategy(h, self.questionnaire().clone())
    }
}

/// Options for [`solve_exact`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SolveOptions {
    /// Use the dead-member pruning rule.
    pub prune: bool,
    /// When pruning, also run full enumeration if `|𝒳ⁿ|` is at most this
    /// and fall back to it on disagreement.
    pub validate_up_to: usize,
    /// Largest `|𝒳ⁿ|` accepted.
    pub subset_budget: usize,
    /// Maximizers retained.
    pub report_cap: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            prune: true,
            validate_up_to: 10,
            subset_budget: 20,
            report_cap: 16,
        }
    }
}

/// Integer form of the objective: numerators over `prior_denom`.
struct Scorer<'h, 'm> {
    h: &'h Horizon<'m>,
    weights: Vec<i64>,
    all_types: u64,
    diag: Vec<Vec<i64>>,
}

impl<'h, 'm> Scorer<'h, 'm> {
    fn new(h: &'h Horizon<'m>) -> Result<Self> {
        let model = h.model();
        let types = model.type_count();
        if types > 64 {
            return Err(Error::TooManyTypes(types));
        }
        Ok(Self {
            h,
            weights: model.types().map(|t| model.prior_weight(t)).collect(),
            all_types: if types == 64 { !0 } else { (1u64 << types) - 1 },
            diag: model
                .types()
                .map(|t| (0..h.len()).map(|x| h.score(t, x, x)).collect())
                .collect(),
        })
    }

    /// Types for which truth `a` is strictly better than reporting `b`.
    fn beats(&self, a: usize, b: usize) -> u64 {
        if a == b {
            return self.all_types;
        }
        let mut mask = 0;
        for (t, diag) in self.diag.iter().enumerate() {
            if diag[a] > self.h.score(SenderTypeId(t), b, a) {
                mask |= 1 << t;
            }
        }
        mask
    }

    fn weight(&self, mask: u64) -> i64 {
        let mut mask = mask;
        let mut total = 0;
        while mask != 0 {
            total += self.weights[mask.trailing_zeros() as usize];
            mask &= mask - 1;
        }
        total
    }

    fn to_rational(&self, numer: i64) -> Rational {
        Rational::new(numer as i128, self.h.model().prior_denom() as i128)
            .expect("prior denominator is positive")
    }

    /// Per-member type masks of `members`.
    fn alive(&self, members: &[usize]) -> Vec<u64> {
        members
            .iter()
            .map(|&x| {
                members
                    .iter()
                    .fold(self.all_types, |acc, &y| acc & self.beats(x, y))
            })
            .collect()
    }

    fn objective(&self, members: &[usize]) -> i64 {
        self.alive(members)
            .into_iter()
            .map(|m| self.weight(m))
            .sum()
    }
}

/// Keeps the `cap` lexicographically smallest tied maximizers.
struct Leaderboard {
    best: Option<i64>,
    sets: BTreeSet<SeqSet>,
    cap: usize,
    truncated: bool,
}

impl Leaderboard {
    fn new(cap: usize) -> Self {
        Self {
            best: None,
            sets: BTreeSet::new(),
            cap: cap.max(1),
            truncated: false,
        }
    }

    fn offer(&mut self, value: i64, members: impl FnOnce() -> SeqSet) {
        match self.best {
            Some(b) if value < b => {}
            Some(b) if value == b => {
                self.sets.insert(members());
                if self.sets.len() > self.cap {
                    self.sets.pop_last();
                    self.truncated = true;
                }
            }
            _ => {
                self.best = Some(value);
                self.sets.clear();
                self.sets.insert(members());
                self.truncated = false;
            }
        }
    }
}

/// Maximizes the receiver objective over all nonempty subsets of `𝒳ⁿ`.
pub fn solve_exact(h: &Horizon<'_>, options: &SolveOptions) -> Result<EquilibriumResult> {
    let count = h.len();
    if count > options.subset_budget || count > 63 {
        return Err(Error::SubsetBudget {
            sequences: count,
            budget: options.subset_budget.min(63),
        });
    }
    let scorer = Scorer::new(h)?;

    if !options.prune {
        return Ok(enumerate_all(&scorer, options.report_cap));
    }

    let beats: Vec<u64> = (0..count)
        .flat_map(|a| (0..count).map(move |b| (a, b)))
        .map(|(a, b)| scorer.beats(a, b))
        .collect();
    let mut dfs = Dfs {
        scorer: &scorer,
        beats,
        count,
        board: Leaderboard::new(options.report_cap),
        stats: SearchStats::default(),
        members: Vec::new(),
        alive: Vec::new(),
    };
    dfs.extend(0);
    let mut result = finish(&scorer, dfs.board, dfs.stats, SearchMode::Exact);

    if count <= options.validate_up_to {
        let full = enumerate_all(&scorer, options.report_cap);
        let agrees = full.optimum == result.optimum;
        if !agrees {
            result = full;
        }
        result.stats.pruning_validated = Some(agrees);
    }
    Ok(result)
}

fn finish(
    scorer: &Scorer<'_, '_>,
    board: Leaderboard,
    stats: SearchStats,
    mode: SearchMode,
) -> EquilibriumResult {
    EquilibriumResult {
        n: scorer.h.n(),
        optimum: scorer.to_rational(board.best.expect("at least one set evaluated")),
        maximizers: board.sets.into_iter().collect(),
        truncated: board.truncated,
        mode,
        stats,
    }
}

/// Every nonempty subset, partitions recomputed from scores per subset.
fn enumerate_all(scorer: &Scorer<'_, '_>, cap: usize) -> EquilibriumResult {
    let h = scorer.h;
    let count = h.len();
    let mut board = Leaderboard::new(cap);
    let mut stats = SearchStats::default();
    let mut members = Vec::with_capacity(count);
    for mask in 1u64..(1u64 << count) {
        members.clear();
        members.extend((0..count).filter(|i| mask >> i & 1 == 1));
        let value: i64 = h
            .model()
            .types()
            .map(|t| {
                let kept = members
                    .iter()
                    .filter(|&&x| {
                        let truthful = h.score(t, x, x);
                        members
                            .iter()
                            .all(|&y| y == x || truthful > h.score(t, y, x))
                    })
                    .count();
                h.model().prior_weight(t) * kept as i64
            })
            .sum();
        stats.examined += 1;
        board.offer(value, || members.iter().copied().map(SeqId).collect());
    }
    finish(scorer, board, stats, SearchMode::Exact)
}

struct Dfs<'s, 'h, 'm> {
    scorer: &'s Scorer<'h, 'm>,
    beats: Vec<u64>,
    count: usize,
    board: Leaderboard,
    stats: SearchStats,
    members: Vec<usize>,
    alive: Vec<u64>,
}

impl Dfs<'_, '_, '_> {
    fn beats(&self, a: usize, b: usize) -> u64 {
        self.beats[a * self.count + b]
    }

    fn extend(&mut self, start: usize) {
        for c in start..self.count {
            let c_alive = self
                .members
                .iter()
                .fold(self.scorer.all_types, |acc, &m| acc & self.beats(c, m));
            if c_alive == 0 {
                self.stats.pruned += 1;
                continue;
            }
            let updated: Vec<u64> = self
                .members
                .iter()
                .zip(&self.alive)
                .map(|(&m, &a)| a & self.beats(m, c))
                .collect();
            if updated.contains(&0) {
                self.stats.pruned += 1;
                continue;
            }

            let saved = core::mem::replace(&mut self.alive, updated);
            self.members.push(c);
            self.alive.push(c_alive);

            let value: i64 = self.alive.iter().map(|&a| self.scorer.weight(a)).sum();
            self.stats.examined += 1;
            let members = &self.members;
            self.board
                .offer(value, || members.iter().copied().map(SeqId).collect());
            self.extend(c + 1);

            self.members.pop();
            self.alive = saved;
        }
    }
}

/// Options for [`solve_heuristic`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HeuristicOptions {
    /// Zero-gain additions allowed during greedy growth.
    pub patience: usize,
    /// Cap on improving local-search moves.
    pub max_moves: usize,
}

impl Default for HeuristicOptions {
    fn default() -> Self {
        Self {
            patience: 4,
            max_moves: 10_000,
        }
    }
}

/// Greedy growth followed by add/drop/swap local search. Deterministic for a
/// given seed; the result is not certified.
pub fn solve_heuristic(
    h: &Horizon<'_>,
    seed: u64,
    options: &HeuristicOptions,
) -> Result<EquilibriumResult> {
    let scorer = Scorer::new(h)?;
    let count = h.len();
    let mut order: Vec<usize> = (0..count).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));

    let mut stats = SearchStats::default();
    let mut members = vec![order[0]];
    let mut inside = vec![false; count];
    inside[order[0]] = true;
    let mut alive = scorer.alive(&members);
    let mut patience = options.patience;

    // Greedy growth with the incremental gain of adding one member.
    loop {
        let mut best: Option<(i64, usize, u64, Vec<u64>)> = None;
        for &c in order.iter().filter(|&&c| !inside[c]) {
            let c_alive = members
                .iter()
                .fold(scorer.all_types, |acc, &m| acc & scorer.beats(c, m));
            let updated: Vec<u64> = members
                .iter()
                .zip(&alive)
                .map(|(&m, &a)| a & scorer.beats(m, c))
                .collect();
            let before: i64 = alive.iter().map(|&a| scorer.weight(a)).sum();
            let after: i64 =
                scorer.weight(c_alive) + updated.iter().map(|&a| scorer.weight(a)).sum::<i64>();
            stats.examined += 1;
            let gain = after - before;
            if best.as_ref().is_none_or(|b| gain > b.0) {
                best = Some((gain, c, c_alive, updated));
            }
        }
        match best {
            Some((gain, c, c_alive, updated)) if gain > 0 || (gain == 0 && patience > 0) => {
                if gain == 0 {
                    patience -= 1;
                }
                members.push(c);
                inside[c] = true;
                alive = updated;
                alive.push(c_alive);
            }
            _ => break,
        }
    }

    let mut value = scorer.objective(&members);
    let mut moves = 0;
    'search: while moves < options.max_moves {
        if members.len() > 1 {
            for i in 0..members.len() {
                let mut trial = members.clone();
                trial.remove(i);
                stats.examined += 1;
                let v = scorer.objective(&trial);
                if v > value {
                    inside[members[i]] = false;
                    members = trial;
                    value = v;
                    moves += 1;
                    continue 'search;
                }
            }
        }
        for &c in order.iter().filter(|&&c| !inside[c]) {
            let mut trial = members.clone();
            trial.push(c);
            stats.examined += 1;
            let v = scorer.objective(&trial);
            if v > value {
                inside[c] = true;
                members = trial;
                value = v;
                moves += 1;
                continue 'search;
            }
        }
        for i in 0..members.len() {
            for &c in order.iter().filter(|&&c| !inside[c]) {
                let mut trial = members.clone();
                trial[i] = c;
                stats.examined += 1;
                let v = scorer.objective(&trial);
                if v > value {
                    inside[members[i]] = false;
                    inside[c] = true;
                    members = trial;
                    value = v;
                    moves += 1;
                    continue 'search;
                }
            }
        }
        break;
    }

    let mut board = Leaderboard::new(1);
    board.offer(value, || members.iter().copied().map(SeqId).collect());
    Ok(finish(&scorer, board, stats, SearchMode::Heuristic))
}
