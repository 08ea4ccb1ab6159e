use serde::{Deserialize, Serialize};

/// One operator of the list L the moment matrix is built from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Letter {
    Id,
    /// Bob's (LHS) state σ.
    State,
    /// Assemblage member σ_{a|x}.
    Member { a: u8, x: u8 },
    /// Target projector B^targ_{b|y}.
    Targ { b: u8, y: u8 },
    /// Lab projector B^ε_{b|y}.
    Lab { b: u8, y: u8 },
}

impl Letter {
    /// Letters that square to themselves.
    fn idempotent(&self) -> bool {
        matches!(self, Letter::Id | Letter::State | Letter::Targ { .. } | Letter::Lab { .. })
    }

    /// Whether `self · other` vanishes identically.
    fn annihilates(&self, other: &Letter) -> bool {
        match (self, other) {
            (Letter::Targ { b, y }, Letter::Targ { b: b2, y: y2 }) | (Letter::Lab { b, y }, Letter::Lab { b: b2, y: y2 }) => {
                y == y2 && b != b2
            }
            _ => false,
        }
    }
}

/// Canonical form of a word: identities dropped and repeated projectors merged.
/// Returns `None` for words that vanish.
pub fn reduce(word: &[Letter]) -> Option<Vec<Letter>> {
    let mut out: Vec<Letter> = Vec::with_capacity(word.len());
    for &l in word {
        if l == Letter::Id {
            continue;
        }
        if let Some(last) = out.last() {
            if *last == l && l.idempotent() {
                continue;
            }
            if last.annihilates(&l) {
                return None;
            }
        }
        out.push(l);
    }
    Some(out)
}

/// The ordered monomial list 𝒮 indexing the rows of a moment matrix.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MonomialList {
    pub letters: Vec<Letter>,
    pub words: Vec<Vec<Letter>>,
}

impl MonomialList {
    /// {𝟙} alone.
    pub fn trivial() -> Self {
        Self { letters: vec![Letter::Id], words: vec![vec![]] }
    }

    /// Words of length ≤ `level` over {σ, B^targ_{b|y}, B^ε_{b|y}}, plus 𝟙.
    ///
    /// Level 1 is the operator list itself: side 2 + 4·n_y.
    pub fn witness(n_y: usize, level: usize) -> Self {
        let mut letters = vec![Letter::State];
        letters.extend(targ_lab(n_y));
        Self::from_letters(letters, level)
    }

    /// Words of length ≤ `level` over {σ_{a|x}, B^targ_{b|y}, B^ε_{b|y}}, plus 𝟙.
    pub fn assemblage(n_x: usize, n_y: usize, level: usize) -> Self {
        let mut letters: Vec<Letter> =
            (0..n_x).flat_map(|x| (0..2).map(move |a| Letter::Member { a, x: x as u8 })).collect();
        letters.extend(targ_lab(n_y));
        Self::from_letters(letters, level)
    }

    /// All reduced, non-vanishing, distinct words of length ≤ `level`.
    pub fn from_letters(letters: Vec<Letter>, level: usize) -> Self {
        let mut words: Vec<Vec<Letter>> = vec![vec![]];
        let mut frontier: Vec<Vec<Letter>> = vec![vec![]];
        for _ in 0..level {
            let mut next = Vec::new();
            for w in &frontier {
                for &l in &letters {
                    let mut cand = w.clone();
                    cand.push(l);
                    if let Some(r) = reduce(&cand) {
                        if r.len() == cand.len() && !words.contains(&r) {
                            words.push(r.clone());
                            next.push(r);
                        }
                    }
                }
            }
            frontier = next;
        }
        let mut all = vec![Letter::Id];
        all.extend(letters);
        Self { letters: all, words }
    }

    /// Appends extra words (reduced and deduplicated).
    pub fn with_words(mut self, extra: &[Vec<Letter>]) -> Self {
        for w in extra {
            if let Some(r) = reduce(w) {
                if !self.words.contains(&r) {
                    self.words.push(r);
                }
            }
        }
        self
    }

    pub fn side(&self) -> usize {
        self.words.len()
    }

    pub fn index_of(&self, word: &[Letter]) -> Option<usize> {
        let r = reduce(word)?;
        self.words.iter().position(|w| *w == r)
    }
}

fn targ_lab(n_y: usize) -> Vec<Letter> {
    let mut v = Vec::with_capacity(4 * n_y);
    for y in 0..n_y as u8 {
        for b in 0..2 {
            v.push(Letter::Targ { b, y });
        }
    }
    for y in 0..n_y as u8 {
        for b in 0..2 {
            v.push(Letter::Lab { b, y });
        }
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn level_one_has_side_fourteen_for_three_targets() {
        assert_eq!(MonomialList::witness(3, 1).side(), 14);
    }

    #[test]
    fn reduction_drops_orthogonal_products() {
        let t0 = Letter::Targ { b: 0, y: 1 };
        let t1 = Letter::Targ { b: 1, y: 1 };
        assert_eq!(reduce(&[t0, t1]), None);
        assert_eq!(reduce(&[t0, Letter::Id, t0]), Some(vec![t0]));
    }
}
