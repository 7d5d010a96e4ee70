use rand::Rng;

use crate::spaces::tree::TreeWord;

/// Lazy random walk on the 3-regular tree: each step stays put with
/// probability 1/4 and otherwise moves to one of the three neighbours.
pub fn lazy_walk_3regular<R: Rng + ?Sized>(
    start: &TreeWord,
    steps: usize,
    rng: &mut R,
) -> TreeWord {
    let mut w = start.clone();
    for _ in 0..steps {
        let u: u8 = rng.random_range(0..4);
        if u == 3 {
            continue;
        }
        if w.is_origin() {
            w.push(u);
        } else if u == 0 {
            w.pop();
        } else {
            w.push(u - 1);
        }
    }
    w
}

/// Law of the distance from the start after a number of lazy steps.
#[derive(Clone, Debug, PartialEq)]
pub struct DistanceDistribution {
    pub steps: usize,
    /// `probs[d]` is the probability of ending at distance `d`.
    pub probs: Vec<f64>,
}

impl DistanceDistribution {
    pub fn mean(&self) -> f64 {
        self.probs
            .iter()
            .enumerate()
            .map(|(d, p)| d as f64 * p)
            .sum()
    }

    /// `E d^2`, the Fréchet variance of the walk's endpoint.
    pub fn second_moment(&self) -> f64 {
        self.probs
            .iter()
            .enumerate()
            .map(|(d, p)| (d * d) as f64 * p)
            .sum()
    }
}

/// Exact distance law by dynamic programming on the distance alone.
pub fn walk_distance_distribution(steps: usize) -> DistanceDistribution {
    let mut probs = vec![0.0; steps + 1];
    probs[0] = 1.0;
    let mut next = vec![0.0; steps + 1];
    for s in 0..steps {
        next.iter_mut().for_each(|p| *p = 0.0);
        next[0] += 0.25 * probs[0];
        next[1] += 0.75 * probs[0];
        for d in 1..=s {
            let p = probs[d];
            next[d - 1] += 0.25 * p;
            next[d] += 0.25 * p;
            next[d + 1] += 0.5 * p;
        }
        std::mem::swap(&mut probs, &mut next);
    }
    DistanceDistribution { steps, probs }
}
