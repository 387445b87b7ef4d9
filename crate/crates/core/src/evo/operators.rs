//! Variation and selection operators over lattice-index genomes.

use rand::seq::{index, SliceRandom};
use rand::Rng;

use crate::error::{Error, Result};
use crate::horizon::{ActionLattice, CandidateSequence, HorizonProblem};

/// Latin hypercube initialisation.
///
/// For each gene position the `m` individuals draw one index from each of `m`
/// equal-width bins spanning `[0, |actions|)`; which individual gets which bin
/// is shuffled independently per position.
#[allow(clippy::needless_range_loop)]
pub fn lhs_init<R: Rng + ?Sized>(
    lattice: &ActionLattice,
    horizon: usize,
    m: usize,
    rng: &mut R,
) -> Vec<CandidateSequence> {
    let na = lattice.len();
    let width = na as f64 / m as f64;
    let mut genes = vec![vec![0usize; horizon]; m];
    let mut bins: Vec<usize> = (0..m).collect();
    for pos in 0..horizon {
        bins.shuffle(rng);
        for (member, &bin) in bins.iter().enumerate() {
            let x = (bin as f64 + rng.gen::<f64>()) * width;
            let idx = (x.floor() as usize).min(na - 1);
            genes[member][pos] = idx;
        }
    }
    genes.into_iter().map(CandidateSequence::new).collect()
}

/// Fitness used for roulette selection: `(J_max - J_i) + epsilon`.
pub fn fitness(costs: &[f64], epsilon: f64) -> Vec<f64> {
    let j_max = costs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    costs.iter().map(|&j| (j_max - j) + epsilon).collect()
}

/// Fitness-proportionate sampler over a fixed cost vector.
#[derive(Debug, Clone)]
pub struct Roulette {
    cumulative: Vec<f64>,
}

impl Roulette {
    pub fn new(costs: &[f64], epsilon: f64) -> Self {
        let mut acc = 0.0;
        let cumulative = fitness(costs, epsilon)
            .into_iter()
            .map(|f| {
                acc += f;
                acc
            })
            .collect();
        Self { cumulative }
    }

    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let total = *self.cumulative.last().expect("empty roulette");
        let r = rng.gen::<f64>() * total;
        // rounding can leave r a sliver past the last bucket
        self.cumulative
            .partition_point(|&c| c <= r)
            .min(self.cumulative.len() - 1)
    }
}

/// Fitness-proportionate draw of one index.
pub fn select<R: Rng + ?Sized>(costs: &[f64], epsilon: f64, rng: &mut R) -> usize {
    Roulette::new(costs, epsilon).draw(rng)
}

/// Alternating-segment crossover at the given sorted cut positions.
///
/// A cut `c` splits between gene `c - 1` and gene `c`.
pub fn crossover_at(
    a: &CandidateSequence,
    b: &CandidateSequence,
    cuts: &[usize],
) -> (CandidateSequence, CandidateSequence) {
    let mut c1 = Vec::with_capacity(a.len());
    let mut c2 = Vec::with_capacity(a.len());
    let mut swapped = false;
    let mut next_cut = cuts.iter().peekable();
    for i in 0..a.len() {
        while next_cut.peek().is_some_and(|&&c| c == i) {
            swapped = !swapped;
            next_cut.next();
        }
        let (x, y) = if swapped {
            (b.genes[i], a.genes[i])
        } else {
            (a.genes[i], b.genes[i])
        };
        c1.push(x);
        c2.push(y);
    }
    (CandidateSequence::new(c1), CandidateSequence::new(c2))
}

/// Multi-point crossover with `k` distinct cut positions drawn without replacement.
pub fn crossover<R: Rng + ?Sized>(
    a: &CandidateSequence,
    b: &CandidateSequence,
    k: usize,
    rng: &mut R,
) -> Result<(CandidateSequence, CandidateSequence)> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            what: "crossover parents".into(),
            expected: a.len(),
            found: b.len(),
        });
    }
    let n = a.len();
    if n < 2 || k == 0 || k >= n {
        return Err(Error::InvalidParameter(format!(
            "crossover needs 1 <= k < N, got k={k}, N={n}"
        )));
    }
    let mut cuts: Vec<usize> = index::sample(rng, n - 1, k)
        .into_iter()
        .map(|c| c + 1)
        .collect();
    cuts.sort_unstable();
    Ok(crossover_at(a, b, &cuts))
}

/// Replaces each gene with probability `p_mut` by a uniformly drawn lattice index.
pub fn mutate<R: Rng + ?Sized>(
    u: &CandidateSequence,
    lattice_len: usize,
    p_mut: f64,
    rng: &mut R,
) -> CandidateSequence {
    let genes = u
        .genes
        .iter()
        .map(|&g| {
            if p_mut > 0.0 && rng.gen::<f64>() < p_mut {
                rng.gen_range(0..lattice_len)
            } else {
                g
            }
        })
        .collect();
    CandidateSequence::new(genes)
}

/// First-improvement hill climb over single-gene replacements.
///
/// Genes are visited round-robin and replacements tried in lattice order; the
/// first cost reduction is accepted and the climb moves on to the next gene.
/// Stops after `budget` evaluations or a full sweep without improvement.
/// Returns the refined sequence, its cost and the evaluations spent.
pub fn local_search(
    u: &CandidateSequence,
    cost: f64,
    hp: &HorizonProblem,
    budget: usize,
) -> (CandidateSequence, f64, usize) {
    let n = u.len();
    let na = hp.lattice.len();
    let mut genes = u.genes.clone();
    let mut best = cost;
    let mut evals = 0;
    if n == 0 || na < 2 {
        return (u.clone(), cost, 0);
    }
    let mut gene = 0;
    let mut since_improvement = 0;
    'outer: while evals < budget && since_improvement < n {
        let original = genes[gene];
        let mut improved = false;
        for g in 0..na {
            if g == original {
                continue;
            }
            if evals == budget {
                genes[gene] = original;
                break 'outer;
            }
            genes[gene] = g;
            let c = hp.cost_unchecked(&genes);
            evals += 1;
            if c < best {
                best = c;
                improved = true;
                break;
            }
        }
        if !improved {
            genes[gene] = original;
            since_improvement += 1;
        } else {
            since_improvement = 0;
        }
        gene = (gene + 1) % n;
    }
    (CandidateSequence::new(genes), best, evals)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn lattice(n: usize) -> ActionLattice {
        use crate::types::ControlAction;
        ActionLattice::from_actions(
            (0..n)
                .map(|i| ControlAction::charge(i as f64 * 10.0))
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn lhs_full_population_is_permutation() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let l = lattice(8);
        let pop = lhs_init(&l, 5, 8, &mut rng);
        for pos in 0..5 {
            let mut col: Vec<usize> = pop.iter().map(|u| u.genes[pos]).collect();
            col.sort_unstable();
            assert_eq!(col, (0..8).collect::<Vec<_>>());
        }
    }

    #[test]
    fn lhs_bins_of_width_two() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let l = lattice(8);
        for _ in 0..50 {
            let pop = lhs_init(&l, 3, 4, &mut rng);
            for pos in 0..3 {
                let mut hist = [0usize; 4];
                for u in &pop {
                    hist[u.genes[pos] / 2] += 1;
                }
                assert_eq!(hist, [1, 1, 1, 1]);
            }
        }
    }

    #[test]
    fn lhs_single_member() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let pop = lhs_init(&lattice(5), 4, 1, &mut rng);
        assert_eq!(pop.len(), 1);
        assert!(pop[0].genes.iter().all(|&g| g < 5));
    }

    #[test]
    fn equal_costs_give_uniform_fitness() {
        let f = fitness(&[3.0, 3.0, 3.0], 1e-9);
        assert!(f.iter().all(|&x| x == 1e-9));
    }

    #[test]
    fn dominant_candidate_is_almost_always_selected() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let hits = (0..10_000)
            .filter(|_| select(&[0.0, 10.0], 1e-9, &mut rng) == 0)
            .count();
        assert_eq!(hits, 10_000);
    }

    #[test]
    fn roulette_skips_zero_weight_buckets() {
        let r = Roulette::new(&[5.0, 0.0, 5.0], 0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        assert!((0..1000).all(|_| r.draw(&mut rng) == 1));
    }

    #[test]
    fn single_cut_crossover() {
        let a = CandidateSequence::new(vec![1, 2, 3, 4]);
        let b = CandidateSequence::new(vec![5, 6, 7, 8]);
        let (c1, c2) = crossover_at(&a, &b, &[2]);
        assert_eq!(c1.genes, vec![1, 2, 7, 8]);
        assert_eq!(c2.genes, vec![5, 6, 3, 4]);
    }

    #[test]
    fn identical_parents_reproduce_themselves() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let a = CandidateSequence::new(vec![3, 1, 4, 1, 5]);
        let (c1, c2) = crossover(&a, &a, 2, &mut rng).unwrap();
        assert_eq!(c1, a);
        assert_eq!(c2, a);
    }

    #[test]
    fn crossover_rejects_mismatched_parents() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let a = CandidateSequence::new(vec![0, 1, 2]);
        let b = CandidateSequence::new(vec![0, 1]);
        assert!(matches!(
            crossover(&a, &b, 1, &mut rng),
            Err(Error::LengthMismatch { .. })
        ));
        assert!(crossover(&a, &a, 3, &mut rng).is_err());
    }

    #[test]
    fn mutation_edge_cases() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let u = CandidateSequence::new(vec![0, 3, 2, 1]);
        assert_eq!(mutate(&u, 4, 0.0, &mut rng), u);
        let z = CandidateSequence::new(vec![0; 6]);
        assert_eq!(mutate(&z, 1, 1.0, &mut rng), z);
    }
}
