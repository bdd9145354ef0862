//! Rate of information extraction and its bounds.
//!
//! For every horizon `n` and every equilibrium strategy `g*`,
//! `α(∪_λ G_λⁿ) ≤ D*(g*) ≤ Σ_λ P(λ)·α(G_λⁿ)`. Roots are taken only for
//! display; every comparison made here is on exact integers or rationals.

use alloc::vec::Vec;

use crate::equilibrium::{solve_exact, solve_heuristic, HeuristicOptions, SolveOptions};
use crate::error::Result;
use crate::graph::{
    build_sender_graph, independence_number, max_independent_set, type_graphs_and_union, MisMode,
};
use crate::model::{Horizon, Model, SenderTypeId};
use crate::rational::Rational;
use crate::Budgets;

/// `R = D*^{1/n}`, exact for perfect powers.
pub fn rate(dstar: Rational, n: usize) -> f64 {
    assert!(n >= 1, "horizon must be positive");
    if let (Some(p), Some(q)) = (exact_root(dstar.numer(), n), exact_root(dstar.denom(), n)) {
        return p as f64 / q as f64;
    }
    libm::pow(dstar.to_f64(), 1.0 / n as f64)
}

fn exact_root(value: i128, n: usize) -> Option<i128> {
    if value < 0 {
        return None;
    }
    let guess = libm::round(libm::pow(value as f64, 1.0 / n as f64)) as i128;
    let exp = u32::try_from(n).ok()?;
    (guess.saturating_sub(1)..=guess + 1)
        .filter(|r| *r >= 0)
        .find(|r| r.checked_pow(exp) == Some(value))
}

/// Finite-horizon sandwich around the equilibrium value.
#[derive(Debug, Clone, PartialEq)]
pub struct RateBounds {
    /// Horizon `n`.
    pub n: usize,
    /// `α(∪_λ G_λⁿ)`.
    pub union_alpha: usize,
    /// `α(G_λⁿ)` per type, in type order.
    pub type_alphas: Vec<usize>,
    /// `Σ_λ P(λ)·α(G_λⁿ)`.
    pub upper_value: Rational,
    /// `D*(g*)` when an equilibrium was solved.
    pub achieved_value: Option<Rational>,
    /// `union_alpha^{1/n}`.
    pub lower: f64,
    /// `upper_value^{1/n}`.
    pub upper: f64,
    /// `achieved_value^{1/n}`.
    pub achieved: Option<f64>,
    /// `union_alpha` is an exact independence number.
    pub lower_certified: bool,
    /// Every `α(G_λⁿ)` is exact.
    pub upper_certified: bool,
    /// `achieved_value` is the exact optimum.
    pub achieved_certified: bool,
}

impl RateBounds {
    /// Checks `lower ≤ achieved ≤ upper` on the exact values. `None` when
    /// no equilibrium was solved.
    pub fn sandwich_holds(&self) -> Option<bool> {
        self.achieved_value
            .map(|a| Rational::from(self.union_alpha) <= a && a <= self.upper_value)
    }
}

/// Builds all sender graphs at horizon `n`, computes their independence
/// numbers and, if `solve`, the equilibrium value.
///
/// Fields degrade to uncertified values (greedy independent sets, heuristic
/// search) when the exact budgets are exceeded.
pub fn finite_bounds(
    model: &Model,
    n: usize,
    solve: bool,
    budgets: &Budgets,
) -> Result<RateBounds> {
    let h = Horizon::new(model, n, budgets.enumeration)?;
    let (graphs, union) = type_graphs_and_union(&h, budgets.graph)?;
    let (union_alpha, lower_certified) = independence_number(&union, budgets.mis);
    let mut upper_certified = true;
    let mut type_alphas = Vec::with_capacity(graphs.len());
    for g in &graphs {
        let (a, certified) = independence_number(g, budgets.mis);
        upper_certified &= certified;
        type_alphas.push(a);
    }
    let upper_value: Rational = model
        .types()
        .zip(&type_alphas)
        .map(|(t, &a)| model.prior(t) * Rational::from(a))
        .sum();

    let (achieved_value, achieved_certified) = if !solve {
        (None, false)
    } else if h.len() <= budgets.subset {
        let options = SolveOptions {
            subset_budget: budgets.subset,
            report_cap: budgets.report_cap,
            ..SolveOptions::default()
        };
        (Some(solve_exact(&h, &options)?.optimum), true)
    } else {
        let r = solve_heuristic(&h, 0, &HeuristicOptions::default())?;
        (Some(r.optimum), false)
    };

    Ok(RateBounds {
        n,
        lower: rate(Rational::from(union_alpha), n),
        upper: rate(upper_value, n),
        achieved: achieved_value.map(|a| rate(a, n)),
        union_alpha,
        type_alphas,
        upper_value,
        achieved_value,
        lower_certified,
        upper_certified,
        achieved_certified,
    })
}

/// Supermultiplicativity witness `α(G^{m+n}) ≥ α(G^m)·α(G^n)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FeketeWitness {
    /// Type checked.
    pub lambda: SenderTypeId,
    /// First horizon.
    pub m: usize,
    /// Second horizon.
    pub n: usize,
    /// `α(G_λ^m)`.
    pub alpha_m: usize,
    /// `α(G_λ^n)`.
    pub alpha_n: usize,
    /// `α(G_λ^{m+n})`.
    pub alpha_sum: usize,
    /// `alpha_sum ≥ alpha_m · alpha_n`.
    pub holds: bool,
}

impl FeketeWitness {
    fn new(lambda: SenderTypeId, m: usize, n: usize, alphas: &[usize]) -> Self {
        let (alpha_m, alpha_n, alpha_sum) = (alphas[m - 1], alphas[n - 1], alphas[m + n - 1]);
        Self {
            lambda,
            m,
            n,
            alpha_m,
            alpha_n,
            alpha_sum,
            holds: alpha_sum as u128 >= alpha_m as u128 * alpha_n as u128,
        }
    }
}

/// Exact `α(G_λᵏ)` for `k = 1..=n_max`.
pub fn alpha_sequence(
    model: &Model,
    lambda: SenderTypeId,
    n_max: usize,
    budgets: &Budgets,
) -> Result<Vec<usize>> {
    (1..=n_max)
        .map(|k| {
            let h = Horizon::new(model, k, budgets.enumeration)?;
            let g = build_sender_graph(&h, lambda, budgets.graph)?;
            Ok(max_independent_set(&g, MisMode::Exact, budgets.mis)?.size)
        })
        .collect()
}

/// Exact `α(∪_λ G_λⁿ)`.
pub fn union_alpha(model: &Model, n: usize, budgets: &Budgets) -> Result<usize> {
    let h = Horizon::new(model, n, budgets.enumeration)?;
    let (_, union) = type_graphs_and_union(&h, budgets.graph)?;
    Ok(max_independent_set(&union, MisMode::Exact, budgets.mis)?.size)
}

/// Checks `α(G_λ^{m+n}) ≥ α(G_λ^m)·α(G_λ^n)` with exact independence numbers.
pub fn fekete_check(
    model: &Model,
    lambda: SenderTypeId,
    m: usize,
    n: usize,
    budgets: &Budgets,
) -> Result<FeketeWitness> {
    model.check_type(lambda)?;
    let mut alphas = alloc::vec![0; m + n];
    for k in [m, n, m + n] {
        let h = Horizon::new(model, k, budgets.enumeration)?;
        let g = build_sender_graph(&h, lambda, budgets.graph)?;
        alphas[k - 1] = max_independent_set(&g, MisMode::Exact, budgets.mis)?.size;
    }
    Ok(FeketeWitness::new(lambda, m, n, &alphas))
}

/// Finite-horizon view of the asymptotic bounds
/// `α(∪_λ G_λ) ≤ limsup R(g*ₙ) ≤ lim α(G_{λ*}ⁿ)^{1/n}`.
#[derive(Debug, Clone, PartialEq)]
pub struct AsymptoticReport {
    /// Type with the largest single-letter independence number (lowest id
    /// on ties).
    pub lambda_star: SenderTypeId,
    /// `alphas[λ][k-1] = α(G_λᵏ)` for every type.
    pub alphas: Vec<Vec<usize>>,
    /// `α(G_{λ*}ᵏ)^{1/k}` for `k = 1..=n_max`.
    pub xi_estimates: Vec<f64>,
    /// `max_k α(G_{λ*}ᵏ)^{1/k}`, a certified lower estimate of the limit.
    pub xi_lower: f64,
    /// `α(∪_λ G_λ)` at `n = 1`, the asymptotic floor.
    pub union_floor: usize,
    /// Supermultiplicativity witnesses for `λ*`, all `m ≤ n`, `m + n ≤ n_max`.
    pub fekete_witnesses: Vec<FeketeWitness>,
}

impl AsymptoticReport {
    /// Exact independence numbers of `G_{λ*}ᵏ`.
    pub fn star_alphas(&self) -> &[usize] {
        &self.alphas[self.lambda_star.0]
    }
}

/// Computes [`AsymptoticReport`] up to horizon `n_max`.
pub fn asymptotic_bounds(
    model: &Model,
    n_max: usize,
    budgets: &Budgets,
) -> Result<AsymptoticReport> {
    assert!(n_max >= 1, "n_max must be positive");
    let alphas = model
        .types()
        .map(|t| alpha_sequence(model, t, n_max, budgets))
        .collect::<Result<Vec<_>>>()?;
    let lambda_star = model.types().fold(SenderTypeId(0), |best, t| {
        if alphas[t.0][0] > alphas[best.0][0] {
            t
        } else {
            best
        }
    });
    let star = &alphas[lambda_star.0];
    let xi_estimates: Vec<f64> = star
        .iter()
        .enumerate()
        .map(|(i, &a)| rate(Rational::from(a), i + 1))
        .collect();
    let xi_lower = xi_estimates.iter().copied().fold(f64::MIN, f64::max);
    let union_floor = union_alpha(model, 1, budgets)?;
    let mut fekete_witnesses = Vec::new();
    for m in 1..=n_max {
        for n in m..=n_max {
            if m + n <= n_max {
                fekete_witnesses.push(FeketeWitness::new(lambda_star, m, n, star));
            }
        }
    }
    Ok(AsymptoticReport {
        lambda_star,
        xi_estimates,
        xi_lower,
        union_floor,
        fekete_witnesses,
        alphas,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const H: SenderTypeId = SenderTypeId(0);
    const D: SenderTypeId = SenderTypeId(1);

    #[test]
    fn roots() {
        assert_eq!(rate(Rational::new(4, 3).unwrap(), 1), 4.0 / 3.0);
        for n in 1..6 {
            assert_eq!(rate(Rational::ONE, n), 1.0);
        }
        assert_eq!(rate(Rational::from(9i64), 2), 3.0);
        assert_eq!(rate(Rational::from(27i64), 3), 3.0);
        assert_eq!(rate(Rational::new(8, 27).unwrap(), 3), 2.0 / 3.0);
        assert!((rate(Rational::from(2i64), 2) - core::f64::consts::SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn example1_single_letter_bounds() {
        let m = Model::example1();
        let b = finite_bounds(&m, 1, true, &Budgets::default()).unwrap();
        assert_eq!(b.union_alpha, 1);
        assert_eq!(b.type_alphas, alloc::vec![3, 1]);
        assert_eq!(b.upper_value, Rational::new(5, 3).unwrap());
        assert_eq!(b.achieved_value, Some(Rational::new(4, 3).unwrap()));
        assert!(b.lower_certified && b.upper_certified && b.achieved_certified);
        assert_eq!(b.sandwich_holds(), Some(true));
    }

    #[test]
    fn example1_two_letter_bounds() {
        let m = Model::example1();
        let b = finite_bounds(&m, 2, true, &Budgets::default()).unwrap();
        assert_eq!(b.union_alpha, 1);
        assert_eq!(b.upper_value, Rational::new(11, 3).unwrap());
        assert_eq!(b.sandwich_holds(), Some(true));
        assert!(b.achieved_certified);
    }

    #[test]
    fn fekete_examples() {
        let m = Model::example1();
        let w = fekete_check(&m, D, 1, 1, &Budgets::default()).unwrap();
        assert_eq!(
            (w.alpha_m, w.alpha_n, w.alpha_sum, w.holds),
            (1, 1, 1, true)
        );
        let w = fekete_check(&m, H, 1, 2, &Budgets::default()).unwrap();
        assert_eq!(
            (w.alpha_m, w.alpha_n, w.alpha_sum, w.holds),
            (3, 9, 27, true)
        );
    }

    #[test]
    fn example1_asymptotics() {
        let m = Model::example1();
        let r = asymptotic_bounds(&m, 3, &Budgets::default()).unwrap();
        assert_eq!(r.lambda_star, H);
        assert_eq!(r.star_alphas(), &[3, 9, 27]);
        assert!(r.xi_estimates.iter().all(|&x| x == 3.0));
        assert_eq!(r.union_floor, 1);
        assert_eq!(r.fekete_witnesses.len(), 2);
        assert!(r.fekete_witnesses.iter().all(|w| w.holds));
    }
}
