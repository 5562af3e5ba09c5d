//! Symmetric banded storage and Cholesky factorization.
//!
//! A bandwidth of `n − 1` gives the dense case, so one code path serves
//! both the slot-chained programs and small dense ones.

/// Lower band of a symmetric `n × n` matrix: entry `(i, j)` with
/// `0 ≤ i − j ≤ bandwidth`.
#[derive(Debug, Clone, PartialEq)]
pub struct BandedMatrix {
    n: usize,
    bandwidth: usize,
    data: Vec<f64>,
}

impl BandedMatrix {
    pub fn zeros(n: usize, bandwidth: usize) -> Self {
        let bandwidth = bandwidth.min(n.saturating_sub(1));
        Self {
            n,
            bandwidth,
            data: vec![0.0; n * (bandwidth + 1)],
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn bandwidth(&self) -> usize {
        self.bandwidth
    }

    fn slot(&self, i: usize, j: usize) -> usize {
        debug_assert!(i >= j && i - j <= self.bandwidth, "({i}, {j}) outside the band");
        i * (self.bandwidth + 1) + (i - j)
    }

    /// Entry `(i, j)` of the symmetric matrix; zero outside the band.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (i, j) = if i >= j { (i, j) } else { (j, i) };
        if i - j > self.bandwidth {
            0.0
        } else {
            self.data[self.slot(i, j)]
        }
    }

    /// Adds `v` to the symmetric pair `(i, j)`, `(j, i)`.
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let (i, j) = if i >= j { (i, j) } else { (j, i) };
        let s = self.slot(i, j);
        self.data[s] += v;
    }

    pub fn add_diagonal(&mut self, v: f64) {
        for i in 0..self.n {
            let s = self.slot(i, i);
            self.data[s] += v;
        }
    }

    pub fn max_abs_diagonal(&self) -> f64 {
        (0..self.n)
            .map(|i| self.data[self.slot(i, i)].abs())
            .fold(0.0, f64::max)
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        for i in 0..self.n {
            let lo = i.saturating_sub(self.bandwidth);
            for j in lo..=i {
                let a = self.data[self.slot(i, j)];
                y[i] += a * x[j];
                if i != j {
                    y[j] += a * x[i];
                }
            }
        }
        y
    }

    /// Cholesky factor `L` with `A = L Lᵀ`, or `None` if `A` is not
    /// numerically positive definite.
    pub fn cholesky(&self) -> Option<CholeskyFactor> {
        let n = self.n;
        let bw = self.bandwidth;
        let w = bw + 1;
        let mut l = self.data.clone();
        for j in 0..n {
            let lo = j.saturating_sub(bw);
            let mut s = l[j * w];
            for k in lo..j {
                let v = l[j * w + (j - k)];
                s -= v * v;
            }
            if !(s > 0.0) || !s.is_finite() {
                return None;
            }
            let d = s.sqrt();
            l[j * w] = d;
            for i in j + 1..(j + bw + 1).min(n) {
                let lo_i = i.saturating_sub(bw);
                let mut s = l[i * w + (i - j)];
                for k in lo_i..j {
                    s -= l[i * w + (i - k)] * l[j * w + (j - k)];
                }
                l[i * w + (i - j)] = s / d;
            }
        }
        Some(CholeskyFactor {
            n,
            bandwidth: bw,
            data: l,
        })
    }
}

#[derive(Debug, Clone)]
pub struct CholeskyFactor {
    n: usize,
    bandwidth: usize,
    data: Vec<f64>,
}

impl CholeskyFactor {
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        let bw = self.bandwidth;
        let w = bw + 1;
        let mut y = b.to_vec();
        for i in 0..n {
            let lo = i.saturating_sub(bw);
            let mut s = y[i];
            for k in lo..i {
                s -= self.data[i * w + (i - k)] * y[k];
            }
            y[i] = s / self.data[i * w];
        }
        for i in (0..n).rev() {
            let hi = (i + bw + 1).min(n);
            let mut s = y[i];
            for k in i + 1..hi {
                s -= self.data[k * w + (k - i)] * y[k];
            }
            y[i] = s / self.data[i * w];
        }
        y
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tridiagonal(n: usize) -> BandedMatrix {
        let mut a = BandedMatrix::zeros(n, 1);
        for i in 0..n {
            a.add(i, i, 4.0);
            if i > 0 {
                a.add(i, i - 1, -1.0);
            }
        }
        a
    }

    #[test]
    fn solves_tridiagonal() {
        let a = tridiagonal(50);
        let x: Vec<f64> = (0..50).map(|i| (i as f64 * 0.37).sin()).collect();
        let b = a.mul_vec(&x);
        let sol = a.cholesky().unwrap().solve(&b);
        for (s, e) in sol.iter().zip(&x) {
            assert!((s - e).abs() < 1e-12);
        }
    }

    #[test]
    fn dense_bandwidth_matches_band() {
        let band = tridiagonal(6);
        let mut dense = BandedMatrix::zeros(6, 10);
        assert_eq!(dense.bandwidth(), 5);
        for i in 0..6 {
            for j in 0..=i {
                dense.add(i, j, band.get(i, j));
            }
        }
        let b = vec![1.0, -2.0, 0.5, 3.0, 0.0, 1.0];
        let x1 = band.cholesky().unwrap().solve(&b);
        let x2 = dense.cholesky().unwrap().solve(&b);
        for (a, b) in x1.iter().zip(&x2) {
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn rejects_indefinite() {
        let mut a = BandedMatrix::zeros(2, 1);
        a.add(0, 0, 1.0);
        a.add(1, 1, 1.0);
        a.add(1, 0, 2.0);
        assert!(a.cholesky().is_none());
    }
}
