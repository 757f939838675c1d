//! Small dense univariate polynomials with ascending coefficients.

use nalgebra::{Complex, DMatrix};

#[derive(Debug, Clone, PartialEq)]
pub struct Poly(pub Vec<f64>);

impl Poly {
    pub fn new(coeffs: Vec<f64>) -> Poly {
        Poly(coeffs)
    }

    pub fn constant(c: f64) -> Poly {
        Poly(vec![c])
    }

    pub fn degree(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.0.iter().rev().fold(0.0, |acc, c| acc * x + c)
    }

    /// `Σ |c_i| |x|^i`, the scale of rounding error in [`Poly::eval`].
    pub fn eval_abs(&self, x: f64) -> f64 {
        let x = x.abs();
        self.0.iter().rev().fold(0.0, |acc, c| acc * x + c.abs())
    }

    pub fn derivative(&self) -> Poly {
        if self.0.len() <= 1 {
            return Poly(vec![0.0]);
        }
        Poly(self.0.iter().enumerate().skip(1).map(|(i, c)| c * i as f64).collect())
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out = vec![0.0; self.0.len() + other.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in other.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly(out)
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        let n = self.0.len().max(other.0.len());
        Poly(
            (0..n)
                .map(|i| self.0.get(i).copied().unwrap_or(0.0) - other.0.get(i).copied().unwrap_or(0.0))
                .collect(),
        )
    }

    pub fn scale(&self, k: f64) -> Poly {
        Poly(self.0.iter().map(|c| c * k).collect())
    }

    /// Drop leading coefficients below `rel · max_abs`.
    pub fn trimmed(&self, rel: f64) -> Poly {
        let cutoff = rel * self.max_abs();
        let mut c = self.0.clone();
        while c.len() > 1 && c.last().is_some_and(|x| x.abs() <= cutoff) {
            c.pop();
        }
        Poly(c)
    }

    /// All complex roots as eigenvalues of the companion matrix.
    pub fn roots(&self) -> Vec<Complex<f64>> {
        let n = self.degree();
        if n == 0 {
            return Vec::new();
        }
        let lead = self.0[n];
        let mut m = DMatrix::<f64>::zeros(n, n);
        for i in 1..n {
            m[(i, i - 1)] = 1.0;
        }
        for i in 0..n {
            m[(i, n - 1)] = -self.0[i] / lead;
        }
        m.complex_eigenvalues().iter().copied().collect()
    }

    /// Newton iterations on a simple root; keeps the best iterate.
    pub fn polish(&self, x0: f64, iters: usize) -> f64 {
        let d = self.derivative();
        let mut x = x0;
        let mut best = (self.eval(x).abs(), x);
        for _ in 0..iters {
            let dp = d.eval(x);
            if dp == 0.0 {
                break;
            }
            let next = x - self.eval(x) / dp;
            if !next.is_finite() {
                break;
            }
            x = next;
            let r = self.eval(x).abs();
            if r < best.0 {
                best = (r, x);
            } else if r >= best.0 && x == best.1 {
                break;
            }
        }
        best.1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn companion_roots_of_known_quartic() {
        // (x − 1)(x − 2)(x + 3)(x − 0.5)
        let p = Poly::new(vec![1.0, -1.0]).mul(&Poly::new(vec![-2.0, 1.0]));
        let p = p.mul(&Poly::new(vec![3.0, 1.0])).mul(&Poly::new(vec![-0.5, 1.0]));
        let mut r: Vec<f64> = p.roots().iter().map(|z| z.re).collect();
        r.sort_by(f64::total_cmp);
        for (got, want) in r.iter().zip([-3.0, 0.5, 1.0, 2.0]) {
            assert!((got - want).abs() < 1e-12, "{got} vs {want}");
        }
    }

    #[test]
    fn derivative_and_eval() {
        let p = Poly::new(vec![1.0, 2.0, 3.0]);
        assert_eq!(p.eval(2.0), 17.0);
        assert_eq!(p.derivative(), Poly::new(vec![2.0, 6.0]));
        assert_eq!(Poly::new(vec![1.0, 2.0, 1e-20]).trimmed(1e-14).degree(), 1);
    }
}
