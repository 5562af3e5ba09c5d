//! Smooth convex building blocks with analytic gradients and Hessians.
//!
//! Each function acts on a small subset of the program variables, its
//! support; `evaluate` receives the support values in support order and
//! returns derivatives in the same local coordinates.

use std::fmt;

/// Value, gradient and row-major Hessian in local coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub value: f64,
    pub gradient: Vec<f64>,
    pub hessian: Vec<f64>,
}

impl Evaluation {
    fn zeros(k: usize, value: f64) -> Self {
        Self {
            value,
            gradient: vec![0.0; k],
            hessian: vec![0.0; k * k],
        }
    }
}

pub trait SmoothFunction: fmt::Debug + Send + Sync {
    /// Global indices of the variables the function depends on.
    fn support(&self) -> &[usize];

    /// Function value; `+∞` outside the domain.
    fn value(&self, local: &[f64]) -> f64;

    fn evaluate(&self, local: &[f64]) -> Evaluation;

    fn is_convex(&self) -> bool {
        true
    }

    fn is_affine(&self) -> bool {
        false
    }
}

/// `aᵀz + c`.
#[derive(Debug, Clone, PartialEq)]
pub struct Affine {
    support: Vec<usize>,
    coeffs: Vec<f64>,
    constant: f64,
}

impl Affine {
    pub fn new(terms: &[(usize, f64)], constant: f64) -> Self {
        Self {
            support: terms.iter().map(|t| t.0).collect(),
            coeffs: terms.iter().map(|t| t.1).collect(),
            constant,
        }
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn constant(&self) -> f64 {
        self.constant
    }
}

impl SmoothFunction for Affine {
    fn support(&self) -> &[usize] {
        &self.support
    }

    fn value(&self, local: &[f64]) -> f64 {
        self.constant + dot(&self.coeffs, local)
    }

    fn evaluate(&self, local: &[f64]) -> Evaluation {
        let k = self.support.len();
        Evaluation {
            value: self.value(local),
            gradient: self.coeffs.clone(),
            hessian: vec![0.0; k * k],
        }
    }

    fn is_affine(&self) -> bool {
        true
    }
}

/// `zᵀMz + bᵀz + c` with symmetric `M`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticForm {
    support: Vec<usize>,
    matrix: Vec<f64>,
    linear: Vec<f64>,
    constant: f64,
    convex: bool,
}

impl QuadraticForm {
    /// `matrix` is row-major `k × k` and is symmetrized on construction.
    pub fn new(support: Vec<usize>, matrix: Vec<f64>, linear: Vec<f64>, constant: f64) -> Self {
        let k = support.len();
        assert_eq!(matrix.len(), k * k, "quadratic matrix must be k × k");
        assert_eq!(linear.len(), k, "quadratic linear part must have length k");
        let mut m = matrix;
        for i in 0..k {
            for j in 0..i {
                let avg = 0.5 * (m[i * k + j] + m[j * k + i]);
                m[i * k + j] = avg;
                m[j * k + i] = avg;
            }
        }
        let convex = is_psd(&m, k);
        Self {
            support,
            matrix: m,
            linear,
            constant,
            convex,
        }
    }

    /// `Σ wᵢ zᵢ² + bᵀz + c` over `support`.
    pub fn diagonal(support: Vec<usize>, weights: &[f64], linear: Vec<f64>, constant: f64) -> Self {
        let k = support.len();
        let mut m = vec![0.0; k * k];
        for (i, w) in weights.iter().enumerate() {
            m[i * k + i] = *w;
        }
        Self::new(support, m, linear, constant)
    }

    /// `coeff · ((x_a − x_b)² + (y_a − y_b)²) + c` on support
    /// `[x_a, x_b, y_a, y_b]`.
    pub fn displacement(xa: usize, xb: usize, ya: usize, yb: usize, coeff: f64, constant: f64) -> Self {
        let c = coeff;
        #[rustfmt::skip]
        let m = vec![
            c, -c, 0.0, 0.0,
            -c, c, 0.0, 0.0,
            0.0, 0.0, c, -c,
            0.0, 0.0, -c, c,
        ];
        Self::new(vec![xa, xb, ya, yb], m, vec![0.0; 4], constant)
    }
}

impl SmoothFunction for QuadraticForm {
    fn support(&self) -> &[usize] {
        &self.support
    }

    fn value(&self, local: &[f64]) -> f64 {
        let k = self.support.len();
        let mut quad = 0.0;
        for i in 0..k {
            let row = &self.matrix[i * k..(i + 1) * k];
            quad += local[i] * dot(row, local);
        }
        quad + dot(&self.linear, local) + self.constant
    }

    fn evaluate(&self, local: &[f64]) -> Evaluation {
        let k = self.support.len();
        let gradient = (0..k)
            .map(|i| 2.0 * dot(&self.matrix[i * k..(i + 1) * k], local) + self.linear[i])
            .collect();
        Evaluation {
            value: self.value(local),
            gradient,
            hessian: self.matrix.iter().map(|m| 2.0 * m).collect(),
        }
    }

    fn is_convex(&self) -> bool {
        self.convex
    }
}

/// `coeff / z₀² + aᵀz + c` for `z₀ > 0`, where `z₀` is the first support
/// entry; `+∞` for `z₀ ≤ 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct InverseSquare {
    support: Vec<usize>,
    coeff: f64,
    linear: Vec<f64>,
    constant: f64,
}

impl InverseSquare {
    pub fn new(support: Vec<usize>, coeff: f64, linear: Vec<f64>, constant: f64) -> Self {
        assert!(!support.is_empty(), "inverse-square term needs its variable");
        assert_eq!(linear.len(), support.len());
        Self {
            support,
            coeff,
            linear,
            constant,
        }
    }
}

impl SmoothFunction for InverseSquare {
    fn support(&self) -> &[usize] {
        &self.support
    }

    fn value(&self, local: &[f64]) -> f64 {
        let q = local[0];
        if q <= 0.0 {
            return f64::INFINITY;
        }
        self.coeff / (q * q) + dot(&self.linear, local) + self.constant
    }

    fn evaluate(&self, local: &[f64]) -> Evaluation {
        let k = self.support.len();
        let q = local[0];
        if q <= 0.0 {
            return Evaluation::zeros(k, f64::INFINITY);
        }
        let mut eval = Evaluation::zeros(k, self.value(local));
        eval.gradient.copy_from_slice(&self.linear);
        eval.gradient[0] -= 2.0 * self.coeff / (q * q * q);
        eval.hessian[0] = 6.0 * self.coeff / (q * q * q * q);
        eval
    }

    fn is_convex(&self) -> bool {
        self.coeff >= 0.0
    }
}

/// Displacement norms below this are treated as this value in the
/// Hessian of [`DisplacementCube`].
pub const DISPLACEMENT_FLOOR: f64 = 1e-9;

/// `coeff · ‖(x_a − x_b, y_a − y_b)‖³` on support `[x_a, x_b, y_a, y_b]`.
#[derive(Debug, Clone, PartialEq)]
pub struct DisplacementCube {
    support: [usize; 4],
    coeff: f64,
}

impl DisplacementCube {
    pub fn new(xa: usize, xb: usize, ya: usize, yb: usize, coeff: f64) -> Self {
        Self {
            support: [xa, xb, ya, yb],
            coeff,
        }
    }
}

impl SmoothFunction for DisplacementCube {
    fn support(&self) -> &[usize] {
        &self.support
    }

    fn value(&self, local: &[f64]) -> f64 {
        let r = (local[0] - local[1]).hypot(local[2] - local[3]);
        self.coeff * r * r * r
    }

    fn evaluate(&self, local: &[f64]) -> Evaluation {
        let v = [local[0] - local[1], local[2] - local[3]];
        let norm = v[0].hypot(v[1]);
        let r = norm.max(DISPLACEMENT_FLOOR);
        let c = self.coeff;
        let gv = [3.0 * c * norm * v[0], 3.0 * c * norm * v[1]];
        let hv = [
            [3.0 * c * (r + v[0] * v[0] / r), 3.0 * c * v[0] * v[1] / r],
            [3.0 * c * v[0] * v[1] / r, 3.0 * c * (r + v[1] * v[1] / r)],
        ];
        // Local coordinates map to v through rows (1, −1, 0, 0), (0, 0, 1, −1).
        let jac = [[1.0, -1.0, 0.0, 0.0], [0.0, 0.0, 1.0, -1.0]];
        let mut eval = Evaluation::zeros(4, c * norm * norm * norm);
        for i in 0..4 {
            eval.gradient[i] = jac[0][i] * gv[0] + jac[1][i] * gv[1];
            for j in 0..4 {
                let mut h = 0.0;
                for a in 0..2 {
                    for b in 0..2 {
                        h += jac[a][i] * hv[a][b] * jac[b][j];
                    }
                }
                eval.hessian[i * 4 + j] = h;
            }
        }
        eval
    }

    fn is_convex(&self) -> bool {
        self.coeff >= 0.0
    }
}

/// Sum of functions over the union of their supports.
#[derive(Debug)]
pub struct Sum {
    support: Vec<usize>,
    terms: Vec<(Box<dyn SmoothFunction>, Vec<usize>)>,
}

impl Sum {
    pub fn new(terms: Vec<Box<dyn SmoothFunction>>) -> Self {
        let mut support: Vec<usize> = terms.iter().flat_map(|t| t.support().to_vec()).collect();
        support.sort_unstable();
        support.dedup();
        let terms = terms
            .into_iter()
            .map(|t| {
                let positions = t
                    .support()
                    .iter()
                    .map(|g| support.binary_search(g).expect("index is in the union"))
                    .collect();
                (t, positions)
            })
            .collect();
        Self { support, terms }
    }
}

impl SmoothFunction for Sum {
    fn support(&self) -> &[usize] {
        &self.support
    }

    fn value(&self, local: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(f, pos)| {
                let sub: Vec<f64> = pos.iter().map(|&p| local[p]).collect();
                f.value(&sub)
            })
            .sum()
    }

    fn evaluate(&self, local: &[f64]) -> Evaluation {
        let k = self.support.len();
        let mut eval = Evaluation::zeros(k, 0.0);
        for (f, pos) in &self.terms {
            let sub: Vec<f64> = pos.iter().map(|&p| local[p]).collect();
            let e = f.evaluate(&sub);
            eval.value += e.value;
            let m = pos.len();
            for a in 0..m {
                eval.gradient[pos[a]] += e.gradient[a];
                for b in 0..m {
                    eval.hessian[pos[a] * k + pos[b]] += e.hessian[a * m + b];
                }
            }
        }
        eval
    }

    fn is_convex(&self) -> bool {
        self.terms.iter().all(|(f, _)| f.is_convex())
    }

    fn is_affine(&self) -> bool {
        self.terms.iter().all(|(f, _)| f.is_affine())
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Positive semidefiniteness via Cholesky of a slightly shifted copy.
fn is_psd(m: &[f64], k: usize) -> bool {
    let scale = (0..k).map(|i| m[i * k + i].abs()).fold(0.0, f64::max).max(1e-300);
    let mut l = m.to_vec();
    for i in 0..k {
        l[i * k + i] += 1e-10 * scale;
    }
    for j in 0..k {
        let mut s = l[j * k + j];
        for p in 0..j {
            s -= l[j * k + p] * l[j * k + p];
        }
        if s < 0.0 {
            return false;
        }
        let d = s.sqrt();
        l[j * k + j] = d;
        for i in j + 1..k {
            let mut s = l[i * k + j];
            for p in 0..j {
                s -= l[i * k + p] * l[j * k + p];
            }
            l[i * k + j] = if d > 0.0 { s / d } else { 0.0 };
        }
    }
    true
}

/// Largest central-difference gradient error of `f` at `at`, each entry
/// relative to `max(|∂f/∂zᵢ|, 1)`.
pub fn gradient_mismatch(f: &dyn SmoothFunction, at: &[f64]) -> f64 {
    let g = f.evaluate(at).gradient;
    (0..at.len())
        .map(|i| {
            let h = 1e-6 * at[i].abs().max(1.0);
            let mut up = at.to_vec();
            let mut dn = at.to_vec();
            up[i] += h;
            dn[i] -= h;
            let fd = (f.value(&up) - f.value(&dn)) / (2.0 * h);
            (fd - g[i]).abs() / g[i].abs().max(1.0)
        })
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check_fd(f: &dyn SmoothFunction, at: &[f64]) {
        let e = f.evaluate(at);
        assert!((e.value - f.value(at)).abs() <= 1e-12 * e.value.abs().max(1.0));
        let k = at.len();
        for i in 0..k {
            let h = 1e-6 * at[i].abs().max(1.0);
            let mut up = at.to_vec();
            let mut dn = at.to_vec();
            up[i] += h;
            dn[i] -= h;
            let fd = (f.value(&up) - f.value(&dn)) / (2.0 * h);
            let scale = e.gradient[i].abs().max(1.0);
            assert!(
                (fd - e.gradient[i]).abs() <= 1e-5 * scale,
                "grad {i}: {fd} vs {}",
                e.gradient[i]
            );
            let gu = f.evaluate(&up).gradient;
            let gd = f.evaluate(&dn).gradient;
            for j in 0..k {
                let fdh = (gu[j] - gd[j]) / (2.0 * h);
                let exact = e.hessian[j * k + i];
                assert!((fdh - exact).abs() <= 1e-4 * exact.abs().max(1.0), "hess {i},{j}");
                assert_eq!(e.hessian[i * k + j], e.hessian[j * k + i]);
            }
        }
    }

    #[test]
    fn affine_and_quadratic_derivatives() {
        check_fd(&Affine::new(&[(0, 2.0), (3, -1.5)], 0.25), &[0.3, -0.7]);
        let q = QuadraticForm::diagonal(vec![0, 1, 2], &[1.0, 1.0, 0.0], vec![0.0, 0.0, -1.0], 0.25);
        check_fd(&q, &[0.4, -1.2, 0.9]);
        assert!(q.is_convex());
        let d = QuadraticForm::displacement(0, 1, 2, 3, 3.0, -1.0);
        check_fd(&d, &[1.0, 0.2, -0.5, 0.7]);
        assert!(d.is_convex());
        let indefinite = QuadraticForm::new(vec![0, 1], vec![0.0, 1.0, 1.0, 0.0], vec![0.0; 2], 0.0);
        assert!(!indefinite.is_convex());
    }

    #[test]
    fn inverse_square_and_cube_derivatives() {
        let f = InverseSquare::new(vec![0, 1, 2], 1.0, vec![-0.5, 0.3, 0.0], 0.1);
        check_fd(&f, &[0.7, 1.0, -2.0]);
        assert_eq!(f.value(&[0.0, 1.0, 1.0]), f64::INFINITY);
        let c = DisplacementCube::new(0, 1, 2, 3, 0.7);
        check_fd(&c, &[1.0, 0.2, -0.5, 0.7]);
        let at_rest = c.evaluate(&[1.0, 1.0, 2.0, 2.0]);
        assert!(at_rest.hessian.iter().all(|h| h.is_finite() && h.abs() < 1e-8));
    }

    #[test]
    fn sum_merges_supports() {
        let s = Sum::new(vec![
            Box::new(Affine::new(&[(5, 1.0)], 0.0)),
            Box::new(DisplacementCube::new(2, 5, 7, 8, 1.0)),
            Box::new(QuadraticForm::displacement(2, 5, 7, 8, 0.5, 0.0)),
        ]);
        assert_eq!(s.support(), &[2, 5, 7, 8]);
        check_fd(&s, &[0.3, 1.1, -0.4, 0.2]);
        assert!(s.is_convex());
        assert!(!s.is_affine());
    }
}
