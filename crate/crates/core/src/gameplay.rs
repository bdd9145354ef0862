//! Sender best responses computed by brute force.
//!
//! This module evaluates the pessimistic receiver value of a strategy
//! straight from the game definition, without λ-partitions: the sender's
//! best-response set is a product over truths `x` of per-`x` argmax sets,
//! so the worst case over best responses recovers exactly the `x` whose
//! argmax is `{x}`. Utilities are evaluated as exact rational averages,
//! independently of the integer scores used by the solvers.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::equilibrium::{ReceiverStrategy, SeqSet};
use crate::error::{Error, Result};
use crate::model::{Horizon, SenderTypeId, SeqId, Sequence};
use crate::rational::Rational;

/// The decoded outcomes a best-responding sender can induce for one truth.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BestReportOutcome {
    /// The sender's true history.
    pub truth: SeqId,
    /// `argmax_{z ∈ image(g)} 𝒰ₙ(z, truth, λ)`.
    pub outcomes: SeqSet,
    /// The attained maximum utility.
    pub utility: Rational,
}

fn check_strategy(h: &Horizon<'_>, g: &ReceiverStrategy) -> Result<()> {
    if g.n() != h.n() || g.universe() != h.len() {
        return Err(Error::HorizonMismatch);
    }
    Ok(())
}

/// Best decoded outcomes for a type-`λ` sender with history `truth`.
pub fn best_reports(
    h: &Horizon<'_>,
    g: &ReceiverStrategy,
    lambda: SenderTypeId,
    truth: SeqId,
) -> Result<BestReportOutcome> {
    check_strategy(h, g)?;
    h.check(truth)?;
    let model = h.model();
    let truth_seq = h.sequence(truth);
    let image: Vec<(SeqId, Sequence)> = g.image().iter().map(|&z| (z, h.sequence(z))).collect();

    let mut best: Option<Rational> = None;
    let mut outcomes = SeqSet::new();
    for (z, z_seq) in &image {
        let u = model.sequence_utility(lambda, z_seq, &truth_seq)?;
        match best {
            Some(b) if u < b => {}
            Some(b) if u == b => {
                outcomes.insert(*z);
            }
            _ => {
                best = Some(u);
                outcomes.clear();
                outcomes.insert(*z);
            }
        }
    }
    Ok(BestReportOutcome {
        truth,
        outcomes,
        utility: best.expect("strategy image is nonempty"),
    })
}

/// Histories recovered under every best response of type `λ`.
pub fn robust_recovery_set(
    h: &Horizon<'_>,
    g: &ReceiverStrategy,
    lambda: SenderTypeId,
) -> Result<SeqSet> {
    let mut out = SeqSet::new();
    for x in h.ids() {
        let best = best_reports(h, g, lambda, x)?;
        if best.outcomes.len() == 1 && best.outcomes.contains(&x) {
            out.insert(x);
        }
    }
    Ok(out)
}

/// Histories recovered under at least one best response of type `λ`.
///
/// Diagnostic only: the receiver value is defined by the worst case over
/// best responses, not this optimistic count.
pub fn optimistic_recovery_set(
    h: &Horizon<'_>,
    g: &ReceiverStrategy,
    lambda: SenderTypeId,
) -> Result<SeqSet> {
    let mut out = SeqSet::new();
    for x in h.ids() {
        if best_reports(h, g, lambda, x)?.outcomes.contains(&x) {
            out.insert(x);
        }
    }
    Ok(out)
}

/// Per-type recovery under a fixed receiver strategy.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypeRecovery {
    /// The type.
    pub lambda: SenderTypeId,
    /// Histories recovered under every best response.
    pub robust: SeqSet,
    /// `|ℬ(g, λ)|`, or `None` if it does not fit in a `u128`.
    pub best_responses: Option<u128>,
}

/// Receiver value of a strategy with per-type detail.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RecoveryReport {
    /// One entry per type, in type order.
    pub per_type: Vec<TypeRecovery>,
    /// `D*(g) = Σ_λ P(λ)·|robust(λ)|`.
    pub dstar: Rational,
}

/// Computes [`RecoveryReport`] for `g`.
pub fn recovery_report(h: &Horizon<'_>, g: &ReceiverStrategy) -> Result<RecoveryReport> {
    check_strategy(h, g)?;
    let model = h.model();
    let outside = (g.universe() - g.image().len()) as u128;
    let mut per_type = Vec::with_capacity(model.type_count());
    for lambda in model.types() {
        let mut robust = SeqSet::new();
        let mut count: Option<u128> = Some(1);
        for x in h.ids() {
            let best = best_reports(h, g, lambda, x)?;
            if best.outcomes.len() == 1 && best.outcomes.contains(&x) {
                robust.insert(x);
            }
            // Each optimal outcome z can be reached by reporting any preimage.
            let reports: u128 = best
                .outcomes
                .iter()
                .map(|&z| if z == g.fallback() { 1 + outside } else { 1 })
                .sum();
            count = count.and_then(|c| c.checked_mul(reports));
        }
        per_type.push(TypeRecovery {
            lambda,
            robust,
            best_responses: count,
        });
    }
    let dstar = per_type
        .iter()
        .map(|t| model.prior(t.lambda) * Rational::from(t.robust.len()))
        .sum();
    Ok(RecoveryReport { per_type, dstar })
}

/// `D*(g)`: prior-weighted count of histories recovered under the worst
/// best response.
pub fn dstar(h: &Horizon<'_>, g: &ReceiverStrategy) -> Result<Rational> {
    let model = h.model();
    let mut total = Rational::ZERO;
    for lambda in model.types() {
        let robust = robust_recovery_set(h, g, lambda)?;
        total = total + model.prior(lambda) * Rational::from(robust.len());
    }
    Ok(total)
}

/// How a sender picks among equally good outcomes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TiePolicy {
    /// Pick an outcome other than the truth whenever one is optimal
    /// (smallest such), realizing the receiver's worst case.
    Adversarial,
    /// Pick the smallest optimal outcome.
    Lexicographic,
    /// Pick uniformly with a generator seeded from `(seed, truth)`.
    Random(u64),
}

/// One play of the game.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SessionOutcome {
    /// The sender's history.
    pub truth: SeqId,
    /// What the sender reported (smallest preimage of `decoded`).
    pub reported: SeqId,
    /// `g(reported)`.
    pub decoded: SeqId,
    /// `decoded == truth`.
    pub recovered: bool,
}

/// Plays one session: the sender best-responds under `policy`.
pub fn simulate(
    h: &Horizon<'_>,
    g: &ReceiverStrategy,
    lambda: SenderTypeId,
    truth: SeqId,
    policy: TiePolicy,
) -> Result<SessionOutcome> {
    let best = best_reports(h, g, lambda, truth)?;
    let options: Vec<SeqId> = best.outcomes.iter().copied().collect();
    let decoded = match policy {
        TiePolicy::Lexicographic => options[0],
        TiePolicy::Adversarial => options
            .iter()
            .copied()
            .find(|&z| z != truth)
            .unwrap_or(options[0]),
        TiePolicy::Random(seed) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(truth.0 as u64);
            options[rng.random_range(0..options.len())]
        }
    };
    let reported = g
        .least_preimage(decoded)
        .expect("image members are their own preimage");
    Ok(SessionOutcome {
        truth,
        reported,
        decoded,
        recovered: decoded == truth,
    })
}

/// A full sender strategy: one session per history, in id order.
pub fn sender_strategy(
    h: &Horizon<'_>,
    g: &ReceiverStrategy,
    lambda: SenderTypeId,
    policy: TiePolicy,
) -> Result<Vec<SessionOutcome>> {
    h.ids().map(|x| simulate(h, g, lambda, x, policy)).collect()
}
