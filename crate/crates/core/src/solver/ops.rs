//! Building blocks of the firefly searches.

use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::Rng;

use super::params::InitScheme;
use crate::error::{Error, Result};
use crate::objectives::Bounds;
use crate::rng::{substream, Purpose};

/// Correlation group of an individual, by closeness of its cost to the best.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Subpop {
    High,
    Medium,
    Low,
}

/// `a` is no worse than `b` everywhere and strictly better somewhere.
pub fn pareto_dominates(a: &[f64], b: &[f64]) -> Result<bool> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch(a.len(), b.len()));
    }
    let mut strictly = false;
    for (x, y) in a.iter().zip(b) {
        if x > y {
            return Ok(false);
        }
        if x < y {
            strictly = true;
        }
    }
    Ok(strictly)
}

pub fn pair_distance(a: &[f64], b: &[f64]) -> f64 {
    libm::sqrt(a.iter().zip(b).map(|(x, y)| (y - x) * (y - x)).sum())
}

/// Sizes of the high, medium and low groups for a population of `n`.
pub fn partition_sizes(n: usize) -> [usize; 3] {
    let (q, r) = (n / 3, n % 3);
    [q + usize::from(r > 0), q + usize::from(r > 1), q]
}

/// Splits a population into thirds by `|phi_i - phi_best|`, ascending, ties
/// broken by index.
pub fn partition(phi: &[f64], best_phi: f64) -> Vec<Subpop> {
    let mut order: Vec<usize> = (0..phi.len()).collect();
    order.sort_by(|&i, &j| (phi[i] - best_phi).abs().total_cmp(&(phi[j] - best_phi).abs()).then(i.cmp(&j)));
    let [h, m, _] = partition_sizes(phi.len());
    let mut out = alloc::vec![Subpop::Low; phi.len()];
    for (rank, &i) in order.iter().enumerate() {
        out[i] = if rank < h {
            Subpop::High
        } else if rank < h + m {
            Subpop::Medium
        } else {
            Subpop::Low
        };
    }
    out
}

/// Initial positions inside `bounds`.
pub fn init_population(scheme: InitScheme, pop: usize, bounds: &Bounds, seed: u64) -> Vec<Vec<f64>> {
    let dim = bounds.dim();
    let mut out = alloc::vec![alloc::vec![0.0; dim]; pop];
    match scheme {
        InitScheme::Stratified => {
            for d in 0..dim {
                let mut rng = substream(seed, Purpose::Init, 0, d as u64);
                let mut strata: Vec<usize> = (0..pop).collect();
                strata.shuffle(&mut rng);
                for (i, s) in strata.into_iter().enumerate() {
                    let u = (s as f64 + rng.gen::<f64>()) / pop as f64;
                    out[i][d] = bounds.lower[d] + bounds.width(d) * u;
                }
            }
        }
        InitScheme::Uniform => {
            for (i, x) in out.iter_mut().enumerate() {
                let mut rng = substream(seed, Purpose::Init, 1, i as u64);
                for (d, v) in x.iter_mut().enumerate() {
                    *v = bounds.lower[d] + bounds.width(d) * rng.gen::<f64>();
                }
            }
        }
    }
    for x in &mut out {
        bounds.project(x);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dominance_examples() {
        assert!(pareto_dominates(&[1.0, 2.0], &[2.0, 2.0]).unwrap());
        assert!(!pareto_dominates(&[1.0, 2.0], &[2.0, 1.0]).unwrap());
        assert!(!pareto_dominates(&[1.0, 2.0], &[1.0, 2.0]).unwrap());
        assert!(pareto_dominates(&[1.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn partition_examples() {
        assert_eq!(partition_sizes(81), [27, 27, 27]);
        assert_eq!(partition_sizes(82), [28, 27, 27]);
        assert_eq!(partition_sizes(83), [28, 28, 27]);
        let groups = partition(&[0.0; 6], 0.0);
        assert_eq!(
            groups,
            [Subpop::High, Subpop::High, Subpop::Medium, Subpop::Medium, Subpop::Low, Subpop::Low]
        );
        let phi = [5.0, 0.1, 3.0, 0.2, 9.0, 1.0];
        let groups = partition(&phi, 0.1);
        assert_eq!(groups[1], Subpop::High);
        assert_eq!(groups[4], Subpop::Low);
    }

    #[test]
    fn stratified_init_covers_every_stratum() {
        let b = Bounds::srl();
        let pop = init_population(InitScheme::Stratified, 81, &b, 3);
        assert_eq!(pop.len(), 81);
        for d in 0..5 {
            let mut seen = [false; 81];
            for x in &pop {
                let s = ((x[d] - b.lower[d]) / b.width(d) * 81.0).floor() as usize;
                seen[s.min(80)] = true;
            }
            assert!(seen.iter().all(|&s| s));
        }
        assert!(pop.iter().all(|x| b.contains(x)));
        assert_eq!(pop, init_population(InitScheme::Stratified, 81, &b, 3));
        assert_ne!(pop, init_population(InitScheme::Stratified, 81, &b, 4));
    }
}
