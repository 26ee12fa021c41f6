//! Global alignment with affine gaps, used for sequence identity.
//!
//! Scores: match +1, mismatch -1, gap opening -2 (first gap position),
//! gap extension -1 (each further position). Among equally scoring
//! alignments the one with the most identical columns is chosen, then the
//! shortest, which makes identity symmetric in its arguments.

use std::cmp::Ordering;

const MATCH: i64 = 1;
const MISMATCH: i64 = -1;
const GAP_OPEN: i64 = -2;
const GAP_EXTEND: i64 = -1;

/// Lexicographic objective: (score, matches, -length).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Cell(i64, i64, i64);

impl Cell {
    const NEG: Cell = Cell(i64::MIN / 4, 0, 0);

    fn add(self, score: i64, matches: i64) -> Cell {
        Cell(self.0 + score, self.1 + matches, self.2 - 1)
    }
}

impl PartialOrd for Cell {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Cell {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.0, self.1, self.2).cmp(&(other.0, other.1, other.2))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AlignmentSummary {
    pub score: i64,
    pub matches: usize,
    pub length: usize,
}

impl AlignmentSummary {
    pub fn identity(&self) -> f64 {
        if self.length == 0 {
            return 0.0;
        }
        self.matches as f64 / self.length as f64
    }
}

pub fn align_global(a: &str, b: &str) -> AlignmentSummary {
    let a = a.as_bytes();
    let b = b.as_bytes();
    let (n, m) = (a.len(), b.len());
    let w = m + 1;
    // diag: ends in an aligned pair; up: a[i] against a gap; left: b[j]
    // against a gap.
    let mut diag = vec![Cell::NEG; (n + 1) * w];
    let mut up = vec![Cell::NEG; (n + 1) * w];
    let mut left = vec![Cell::NEG; (n + 1) * w];
    diag[0] = Cell(0, 0, 0);
    for i in 1..=n {
        let prev = if i == 1 {
            diag[0].add(GAP_OPEN, 0)
        } else {
            up[(i - 1) * w].add(GAP_EXTEND, 0)
        };
        up[i * w] = prev;
    }
    for j in 1..=m {
        left[j] = if j == 1 {
            diag[0].add(GAP_OPEN, 0)
        } else {
            left[j - 1].add(GAP_EXTEND, 0)
        };
    }
    for i in 1..=n {
        for j in 1..=m {
            let k = i * w + j;
            let same = a[i - 1] == b[j - 1];
            let s = if same { MATCH } else { MISMATCH };
            let d = (i - 1) * w + (j - 1);
            diag[k] = diag[d].max(up[d]).max(left[d]).add(s, same as i64);
            let u = (i - 1) * w + j;
            up[k] = diag[u]
                .add(GAP_OPEN, 0)
                .max(up[u].add(GAP_EXTEND, 0))
                .max(left[u].add(GAP_OPEN, 0));
            let l = i * w + (j - 1);
            left[k] = diag[l]
                .add(GAP_OPEN, 0)
                .max(left[l].add(GAP_EXTEND, 0))
                .max(up[l].add(GAP_OPEN, 0));
        }
    }
    let end = n * w + m;
    let best = diag[end].max(up[end]).max(left[end]);
    AlignmentSummary {
        score: best.0,
        matches: best.1 as usize,
        length: (-best.2) as usize,
    }
}

/// Identical columns divided by alignment length (gaps included).
pub fn sequence_identity(a: &str, b: &str) -> f64 {
    align_global(a, b).identity()
}
