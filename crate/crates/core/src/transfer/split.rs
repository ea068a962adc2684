use serde::Serialize;

use crate::linalg::SparseMatrix;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum CfLabel {
    C,
    F,
}

/// Coarse/fine partition of the unknowns.
#[derive(Clone, Debug, PartialEq)]
pub struct CfSplit {
    pub labels: Vec<CfLabel>,
    /// Coarse index of each C point, `None` at F points.
    pub coarse_index: Vec<Option<usize>>,
}

impl CfSplit {
    pub fn from_labels(labels: Vec<CfLabel>) -> Self {
        let mut next = 0;
        let coarse_index = labels
            .iter()
            .map(|l| match l {
                CfLabel::C => {
                    next += 1;
                    Some(next - 1)
                }
                CfLabel::F => None,
            })
            .collect();
        Self {
            labels,
            coarse_index,
        }
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn n_coarse(&self) -> usize {
        self.labels.iter().filter(|l| **l == CfLabel::C).count()
    }

    pub fn is_c(&self, i: usize) -> bool {
        self.labels[i] == CfLabel::C
    }

    pub fn c_points(&self) -> Vec<usize> {
        (0..self.n()).filter(|&i| self.is_c(i)).collect()
    }

    pub fn coarsening_ratio(&self) -> f64 {
        self.n_coarse() as f64 / self.n() as f64
    }

    /// True when every F point has a strong C neighbour in `s`.
    pub fn is_admissible(&self, s: &SparseMatrix) -> bool {
        (0..self.n())
            .filter(|&i| !self.is_c(i))
            .all(|i| s.row_iter(i).any(|(j, _)| self.is_c(j)))
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum State {
    Undecided,
    C,
    F,
}

/// Ruge-Stuben first pass. The measure of a point is the number of points
/// that strongly depend on it; ties go to the lowest index. F points left
/// without a strong C neighbour are converted to C afterwards.
pub fn cf_split(s: &SparseMatrix) -> CfSplit {
    assert_eq!(s.rows(), s.cols(), "strength graph must be square");
    let n = s.rows();
    let st = s.transpose();
    let mut lambda: Vec<i64> = (0..n).map(|i| st.row(i).0.len() as i64).collect();
    let mut state = vec![State::Undecided; n];

    // points with no strong links in either direction are kept as coarse
    for i in 0..n {
        if s.row(i).0.is_empty() && st.row(i).0.is_empty() {
            state[i] = State::C;
        }
    }

    loop {
        let mut best: Option<usize> = None;
        for i in 0..n {
            if state[i] != State::Undecided {
                continue;
            }
            if best.map_or(true, |b| lambda[i] > lambda[b]) {
                best = Some(i);
            }
        }
        let Some(i) = best else { break };
        if lambda[i] <= 0 {
            // nobody left depends on an undecided point
            for k in 0..n {
                if state[k] == State::Undecided {
                    state[k] = if s.row(k).0.is_empty() { State::C } else { State::F };
                }
            }
            break;
        }
        state[i] = State::C;
        for &j in st.row(i).0 {
            if state[j] != State::Undecided {
                continue;
            }
            state[j] = State::F;
            for &k in s.row(j).0 {
                if state[k] == State::Undecided {
                    lambda[k] += 1;
                }
            }
        }
        for &k in s.row(i).0 {
            if state[k] == State::Undecided {
                lambda[k] -= 1;
            }
        }
    }

    // repair sweep
    for i in 0..n {
        if state[i] == State::F && !s.row(i).0.iter().any(|&j| state[j] == State::C) {
            state[i] = State::C;
        }
    }

    CfSplit::from_labels(
        state
            .into_iter()
            .map(|x| if x == State::C { CfLabel::C } else { CfLabel::F })
            .collect(),
    )
}
