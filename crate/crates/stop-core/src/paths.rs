//! All-pairs minimum travel times.

use crate::scalar::Scalar;

/// Dense all-pairs minimum travel times; `+∞` marks unreachable pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct MinTimeMatrix<T> {
    n: usize,
    values: Vec<T>,
}

impl<T: Scalar> MinTimeMatrix<T> {
    /// Floyd–Warshall over the arcs for which `weight` returns a value.
    pub fn floyd_warshall(n: usize, weight: impl Fn(usize, usize) -> Option<T>) -> Self {
        let mut values = vec![T::infinity(); n * n];
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    values[i * n + j] = T::zero();
                } else if let Some(w) = weight(i, j) {
                    values[i * n + j] = w;
                }
            }
        }
        for k in 0..n {
            for i in 0..n {
                let ik = values[i * n + k];
                if ik == T::infinity() {
                    continue;
                }
                for j in 0..n {
                    let via = ik + values[k * n + j];
                    if via < values[i * n + j] {
                        values[i * n + j] = via;
                    }
                }
            }
        }
        MinTimeMatrix { n, values }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        self.values[i * self.n + j]
    }

    pub fn is_reachable(&self, i: usize, j: usize) -> bool {
        self.get(i, j) < T::infinity()
    }
}
