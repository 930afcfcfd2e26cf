//! Index chains `0 <= l_1 <= j_1 < l_2 <= j_2 < ... < l_m <= j_m < n`.

/// One admissible tuple `((l_1, j_1), ..., (l_m, j_m))` below the horizon `n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IndexChain {
    pairs: Vec<(usize, usize)>,
    horizon: usize,
}

impl IndexChain {
    /// Returns `None` unless the pairs satisfy the chain inequalities.
    pub fn new(pairs: Vec<(usize, usize)>, horizon: usize) -> Option<Self> {
        let chain = IndexChain { pairs, horizon };
        chain.is_valid().then_some(chain)
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    fn is_valid(&self) -> bool {
        let ordered = self.pairs.iter().all(|&(l, j)| l <= j)
            && self.pairs.windows(2).all(|w| w[0].1 < w[1].0);
        ordered && self.pairs.last().map_or(true, |&(_, j)| j < self.horizon)
    }
}

/// Lexicographic odometer over all chains of length `m` below `n`.
///
/// The state is the flat tuple `(l_1, j_1, ..., l_m, j_m)`. A step increments
/// the rightmost position that still has room and resets everything after it
/// to the smallest admissible values.
#[derive(Debug, Clone)]
pub struct IndexChains {
    n: usize,
    state: Vec<usize>,
    fresh: bool,
    done: bool,
}

impl IndexChains {
    pub fn new(m: usize, n: usize) -> Self {
        let state = (0..2 * m).map(|p| p / 2).collect();
        IndexChains {
            n,
            state,
            fresh: true,
            done: m > n,
        }
    }

    // A strict step sits between position p and p+1 whenever p is odd.
    fn max_at(&self, p: usize) -> usize {
        let last = self.state.len() - 1;
        let strict_after = (p..last).filter(|q| q % 2 == 1).count();
        self.n - 1 - strict_after
    }

    fn advance(&mut self) -> bool {
        let Some(p) = (0..self.state.len())
            .rev()
            .find(|&p| self.state[p] < self.max_at(p))
        else {
            return false;
        };
        self.state[p] += 1;
        for q in p + 1..self.state.len() {
            self.state[q] = self.state[q - 1] + usize::from((q - 1) % 2 == 1);
        }
        true
    }

    fn current(&self) -> IndexChain {
        IndexChain {
            pairs: self.state.chunks(2).map(|c| (c[0], c[1])).collect(),
            horizon: self.n,
        }
    }
}

impl Iterator for IndexChains {
    type Item = IndexChain;

    fn next(&mut self) -> Option<IndexChain> {
        if self.done {
            return None;
        }
        if self.fresh {
            self.fresh = false;
        } else if !self.advance() {
            self.done = true;
            return None;
        }
        Some(self.current())
    }
}
