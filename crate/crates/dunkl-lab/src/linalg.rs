//! Small dense linear algebra for reflection groups.
//!
//! Everything here operates on `&[f64]` slices in low dimension (d <= 3 in
//! practice, but nothing assumes that). Orthogonal d x d matrices are stored
//! row-major in a flat `Vec`; the sizes involved never justify a matrix
//! library.

/// Euclidean inner product.
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Squared Euclidean norm.
pub fn norm_sq(a: &[f64]) -> f64 {
    dot(a, a)
}

/// Euclidean norm.
pub fn norm(a: &[f64]) -> f64 {
    norm_sq(a).sqrt()
}

/// Max-abs distance between two vectors (used for dedup with tolerances).
pub fn linf_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// Square row-major matrix of side `d`.
#[derive(Debug, Clone, PartialEq)]
pub struct SquareMatrix {
    pub d: usize,
    pub data: Vec<f64>,
}

impl SquareMatrix {
    pub fn identity(d: usize) -> Self {
        let mut data = vec![0.0; d * d];
        for i in 0..d {
            data[i * d + i] = 1.0;
        }
        SquareMatrix { d, data }
    }

    /// Reflection matrix I - (2/<a,a>) a a^T for a nonzero vector `a`.
    pub fn reflection(alpha: &[f64]) -> Self {
        let d = alpha.len();
        let scale = 2.0 / norm_sq(alpha);
        let mut m = SquareMatrix::identity(d);
        for i in 0..d {
            for j in 0..d {
                m.data[i * d + j] -= scale * alpha[i] * alpha[j];
            }
        }
        m
    }

    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.d + j]
    }

    /// Matrix-vector product `self * x`.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let d = self.d;
        let mut out = vec![0.0; d];
        for i in 0..d {
            out[i] = dot(&self.data[i * d..(i + 1) * d], x);
        }
        out
    }

    /// Matrix-vector product writing into a caller-provided buffer
    /// (allocation-free path for simulation loops).
    pub fn apply_into(&self, x: &[f64], out: &mut [f64]) {
        let d = self.d;
        for i in 0..d {
            out[i] = dot(&self.data[i * d..(i + 1) * d], x);
        }
    }

    /// Matrix product `self * other`.
    pub fn matmul(&self, other: &SquareMatrix) -> Self {
        let d = self.d;
        debug_assert_eq!(d, other.d);
        let mut data = vec![0.0; d * d];
        for i in 0..d {
            for j in 0..d {
                let mut s = 0.0;
                for l in 0..d {
                    s += self.at(i, l) * other.at(l, j);
                }
                data[i * d + j] = s;
            }
        }
        SquareMatrix { d, data }
    }

    pub fn transpose(&self) -> Self {
        let d = self.d;
        let mut data = vec![0.0; d * d];
        for i in 0..d {
            for j in 0..d {
                data[j * d + i] = self.at(i, j);
            }
        }
        SquareMatrix { d, data }
    }

    /// Max-abs entry distance to another matrix.
    pub fn linf_dist(&self, other: &SquareMatrix) -> f64 {
        linf_dist(&self.data, &other.data)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reflection_is_involutive_and_orthogonal() {
        let alpha = [0.3, -1.2, 0.7];
        let s = SquareMatrix::reflection(&alpha);
        let id = SquareMatrix::identity(3);
        assert!(s.matmul(&s).linf_dist(&id) < 1e-14);
        assert!(s.matmul(&s.transpose()).linf_dist(&id) < 1e-14);
    }

    #[test]
    fn reflection_negates_its_axis() {
        let alpha = [2.0f64.sqrt(), 0.0];
        let s = SquareMatrix::reflection(&alpha);
        let y = s.apply(&alpha);
        assert!(linf_dist(&y, &[-(2.0f64.sqrt()), 0.0]) < 1e-15);
    }
}
