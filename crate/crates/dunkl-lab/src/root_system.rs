//! Finite reflection groups, root systems, and invariant multiplicities.
//!
//! A reduced root system R in R^d is a finite set of nonzero vectors, closed
//! under its own reflections, with R intersect (R alpha) = {+-alpha} for each
//! alpha in R. Together with a reflection-invariant multiplicity function
//! k : R -> [0, inf) it determines
//!
//! * the weight w_k(x) = prod_{alpha in R} |<x, alpha>|^{k(alpha)}, which is
//!   positively homogeneous of degree (m - d),
//! * the effective dimension m = d + sum_{alpha in R} k(alpha)
//!   = d + 2 sum_{alpha in R_+} k(alpha),
//!
//! and the associated differential-difference Laplacian handled elsewhere in
//! this crate. All roots are normalized to squared length 2, so each
//! reflection is sigma_alpha(x) = x - <alpha, x> alpha.
//!
//! Supported families: products of rank-one systems on coordinate axes,
//! dihedral systems I2(n), the rank-two system B2, and fully custom input
//! (which is validated from scratch).

use crate::error::{Error, Result};
use crate::linalg::{dot, linf_dist, norm_sq, SquareMatrix};
use serde::{Deserialize, Serialize};

/// Squared-length tolerance for custom roots (inputs must be pre-normalized).
pub const ROOT_NORM_TOL: f64 = 1e-9;
/// Tolerance for structural identities (closure, matrix orthogonality).
pub const STRUCTURE_TOL: f64 = 1e-12;
/// Deduplication tolerance for group elements and root matching.
pub const DEDUP_TOL: f64 = 1e-8;
/// Default cap on reflection-group enumeration.
pub const GROUP_CAP: usize = 10_000;

/// Declarative description of a root system; the serialization format used
/// by config files maps onto this enum.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum FamilySpec {
    /// d independent rank-one factors along the coordinate axes; `k[i]` is
    /// the multiplicity of the i-th axis root sqrt(2) e_i.
    A1Product { k: Vec<f64> },
    /// Dihedral system I2(n) in the plane. `k` holds one value (all roots)
    /// for odd n, or two values (the two alternating orbits) for even n.
    Dihedral { order: usize, k: Vec<f64> },
    /// Rank-two B-type system: the axis orbit (classically short) and the
    /// diagonal orbit (classically long). Both orbits are stored normalized
    /// to squared length 2, so the names refer to the orbit structure, not
    /// the stored lengths.
    BRank2 { k_short: f64, k_long: f64 },
    /// Explicit positive roots (each of squared length 2) with multiplicities.
    Custom {
        d: usize,
        positive_roots: Vec<Vec<f64>>,
        k: Vec<f64>,
    },
}

/// A validated root system with invariant multiplicity.
#[derive(Debug, Clone)]
pub struct RootSystem {
    d: usize,
    positive_roots: Vec<Vec<f64>>,
    multiplicity: Vec<f64>,
    m: f64,
    family: FamilySpec,
}

/// One element of the reflection group W generated by the root reflections.
#[derive(Debug, Clone)]
pub struct GroupElement {
    pub matrix: SquareMatrix,
    /// Length of the shortest generator word found for this element.
    pub word_length: usize,
}

/// Reflection of `x` in the hyperplane orthogonal to `alpha`
/// (any nonzero `alpha`; the formula is scale-invariant in `alpha`).
pub fn reflect(alpha: &[f64], x: &[f64]) -> Vec<f64> {
    let coeff = 2.0 * dot(alpha, x) / norm_sq(alpha);
    x.iter().zip(alpha).map(|(xi, ai)| xi - coeff * ai).collect()
}

/// In-place variant of [`reflect`] for hot loops.
pub fn reflect_in_place(alpha: &[f64], x: &mut [f64]) {
    let coeff = 2.0 * dot(alpha, x) / norm_sq(alpha);
    for (xi, ai) in x.iter_mut().zip(alpha) {
        *xi -= coeff * ai;
    }
}

/// Sign-canonicalize a vector so its first nonzero coordinate is positive;
/// used to pick one representative per +-pair of roots. Coordinates below
/// the dedup tolerance count as zero so floating-point noise cannot decide
/// the sign.
fn canonical_sign(v: &mut [f64]) {
    for &c in v.iter() {
        if c.abs() <= DEDUP_TOL {
            continue;
        }
        if c < 0.0 {
            for x in v.iter_mut() {
                *x = -*x;
            }
        }
        return;
    }
}

/// Max-abs distance from `a` to the +-pair of `b`.
fn linf_dist_up_to_sign(a: &[f64], b: &[f64]) -> f64 {
    let direct = linf_dist(a, b);
    let flipped = a
        .iter()
        .zip(b)
        .map(|(x, y)| (x + y).abs())
        .fold(0.0, f64::max);
    direct.min(flipped)
}

impl RootSystem {
    /// Build and validate a root system from its declarative description.
    pub fn build(spec: &FamilySpec) -> Result<Self> {
        let (d, roots, k) = match spec {
            FamilySpec::A1Product { k } => {
                if k.is_empty() {
                    return Err(Error::InvalidInput(
                        "rank-one product needs at least one multiplicity".into(),
                    ));
                }
                let d = k.len();
                let s = 2.0f64.sqrt();
                let mut roots = Vec::with_capacity(d);
                for i in 0..d {
                    let mut r = vec![0.0; d];
                    r[i] = s;
                    roots.push(r);
                }
                (d, roots, k.clone())
            }
            FamilySpec::Dihedral { order, k } => {
                let n = *order;
                if n < 1 {
                    return Err(Error::InvalidInput("dihedral order must be >= 1".into()));
                }
                let ks: Vec<f64> = match (k.len(), n % 2) {
                    (1, _) => vec![k[0]; n],
                    (2, 0) => (0..n).map(|j| k[j % 2]).collect(),
                    (2, 1) => {
                        return Err(Error::InvalidInput(
                            "odd dihedral systems have a single root orbit; give one multiplicity"
                                .into(),
                        ))
                    }
                    _ => {
                        return Err(Error::InvalidInput(
                            "dihedral multiplicity list must have one or two entries".into(),
                        ))
                    }
                };
                let s = 2.0f64.sqrt();
                let mut roots = Vec::with_capacity(n);
                for j in 0..n {
                    // Mirror lines at angles j*pi/n; roots are their unit
                    // normals scaled to squared length 2.
                    let th = j as f64 * std::f64::consts::PI / n as f64;
                    let mut r = vec![-s * th.sin(), s * th.cos()];
                    canonical_sign(&mut r);
                    roots.push(r);
                }
                (2, roots, ks)
            }
            FamilySpec::BRank2 { k_short, k_long } => {
                let s = 2.0f64.sqrt();
                let roots = vec![
                    vec![s, 0.0],
                    vec![0.0, s],
                    vec![1.0, 1.0],
                    vec![1.0, -1.0],
                ];
                let k = vec![*k_short, *k_short, *k_long, *k_long];
                (2, roots, k)
            }
            FamilySpec::Custom {
                d,
                positive_roots,
                k,
            } => {
                if positive_roots.len() != k.len() {
                    return Err(Error::InvalidInput(format!(
                        "{} roots but {} multiplicities",
                        positive_roots.len(),
                        k.len()
                    )));
                }
                if positive_roots.is_empty() {
                    return Err(Error::InvalidInput("empty root list".into()));
                }
                for r in positive_roots {
                    if r.len() != *d {
                        return Err(Error::InvalidInput(format!(
                            "root {r:?} does not have dimension {d}"
                        )));
                    }
                }
                let mut roots = positive_roots.clone();
                for r in &mut roots {
                    canonical_sign(r);
                }
                (*d, roots, k.clone())
            }
        };
        let sys = RootSystem {
            d,
            positive_roots: roots,
            multiplicity: k,
            m: 0.0,
            family: spec.clone(),
        };
        sys.validate()
    }

    /// Product of rank-one systems; `k[i]` multiplies the i-th axis.
    pub fn a1_product(k: &[f64]) -> Result<Self> {
        Self::build(&FamilySpec::A1Product { k: k.to_vec() })
    }

    /// Dihedral system I2(n); see [`FamilySpec::Dihedral`] for `k`.
    pub fn dihedral(order: usize, k: &[f64]) -> Result<Self> {
        Self::build(&FamilySpec::Dihedral {
            order,
            k: k.to_vec(),
        })
    }

    /// Rank-two B2 with short/long orbit multiplicities.
    pub fn b_rank2(k_short: f64, k_long: f64) -> Result<Self> {
        Self::build(&FamilySpec::BRank2 { k_short, k_long })
    }

    /// Custom positive roots (squared length 2) with multiplicities.
    pub fn custom(d: usize, positive_roots: Vec<Vec<f64>>, k: Vec<f64>) -> Result<Self> {
        Self::build(&FamilySpec::Custom {
            d,
            positive_roots,
            k,
        })
    }

    fn validate(mut self) -> Result<Self> {
        // Roots normalized: |alpha|^2 = 2.
        for r in &self.positive_roots {
            let n2 = norm_sq(r);
            if (n2 - 2.0).abs() > ROOT_NORM_TOL {
                return Err(Error::UnnormalizedRoot {
                    root: r.clone(),
                    norm_sq: n2,
                });
            }
        }
        // Nonnegative multiplicities.
        for (r, &kv) in self.positive_roots.iter().zip(&self.multiplicity) {
            if !(kv >= 0.0) || !kv.is_finite() {
                return Err(Error::InvalidInput(format!(
                    "multiplicity {kv} on root {r:?} is not a finite nonnegative number"
                )));
            }
        }
        // Reduced: no two positive roots parallel (R cap R alpha = {+-alpha}).
        for i in 0..self.positive_roots.len() {
            for j in (i + 1)..self.positive_roots.len() {
                let a = &self.positive_roots[i];
                let b = &self.positive_roots[j];
                if linf_dist(a, b) < DEDUP_TOL {
                    return Err(Error::NotARootSystem(format!(
                        "duplicate root {a:?} (entries {i} and {j})"
                    )));
                }
                let cosine = dot(a, b) / 2.0; // both have |.|^2 = 2
                if cosine.abs() > 1.0 - 1e-9 {
                    return Err(Error::NotARootSystem(format!(
                        "roots {a:?} and {b:?} are parallel"
                    )));
                }
            }
        }
        // Closure under reflections, and multiplicity invariance: for each
        // pair (alpha, beta), sigma_alpha(beta) must again be a root carrying
        // the same multiplicity as beta.
        for i in 0..self.positive_roots.len() {
            let alpha = self.positive_roots[i].clone();
            for j in 0..self.positive_roots.len() {
                let beta = &self.positive_roots[j];
                let image = reflect(&alpha, beta);
                let mut found = None;
                for (l, cand) in self.positive_roots.iter().enumerate() {
                    if linf_dist_up_to_sign(&image, cand) <= STRUCTURE_TOL.max(DEDUP_TOL) {
                        found = Some(l);
                        break;
                    }
                }
                let Some(l) = found else {
                    return Err(Error::NotARootSystem(format!(
                        "reflection of {beta:?} in {alpha:?} gives {image:?}, which is not a root"
                    )));
                };
                if (self.multiplicity[l] - self.multiplicity[j]).abs() > STRUCTURE_TOL {
                    return Err(Error::NonInvariantMultiplicity {
                        root_a: beta.clone(),
                        k_a: self.multiplicity[j],
                        root_b: self.positive_roots[l].clone(),
                        k_b: self.multiplicity[l],
                    });
                }
            }
        }
        // Effective dimension must make the process transient.
        let ksum: f64 = self.multiplicity.iter().sum();
        self.m = self.d as f64 + 2.0 * ksum;
        if self.m <= 2.0 {
            return Err(Error::MTooSmall { m: self.m });
        }
        Ok(self)
    }

    /// Ambient dimension d.
    pub fn dimension(&self) -> usize {
        self.d
    }

    /// Positive-root representatives (one per +-pair), squared length 2.
    pub fn positive_roots(&self) -> &[Vec<f64>] {
        &self.positive_roots
    }

    /// Multiplicities aligned with [`Self::positive_roots`].
    pub fn multiplicities(&self) -> &[f64] {
        &self.multiplicity
    }

    /// The description this system was built from.
    pub fn family(&self) -> &FamilySpec {
        &self.family
    }

    /// Effective dimension m = d + 2 sum_{R_+} k. Radial quantities (exit
    /// times, Green kernels, the Bessel-type radial part of the process) see
    /// this dimension instead of d.
    pub fn effective_dimension(&self) -> f64 {
        self.m
    }

    /// The full system R = R_+ union -R_+ with multiplicities.
    pub fn full_system(&self) -> Vec<(Vec<f64>, f64)> {
        let mut out = Vec::with_capacity(2 * self.positive_roots.len());
        for (r, &k) in self.positive_roots.iter().zip(&self.multiplicity) {
            out.push((r.clone(), k));
            out.push((r.iter().map(|c| -c).collect(), k));
        }
        out
    }

    /// The weight w_k(x) = prod_{alpha in R} |<x, alpha>|^{k(alpha)},
    /// taken over the FULL system, so each positive root contributes its
    /// factor squared: prod_{R_+} |<x, alpha>|^{2 k(alpha)}.
    pub fn weight(&self, x: &[f64]) -> f64 {
        let mut w = 1.0;
        for (r, &k) in self.positive_roots.iter().zip(&self.multiplicity) {
            if k == 0.0 {
                continue;
            }
            let ip = dot(r, x).abs();
            w *= ip.powf(2.0 * k);
        }
        w
    }

    /// Degree of positive homogeneity of [`Self::weight`]: m - d.
    pub fn weight_degree(&self) -> f64 {
        self.m - self.d as f64
    }

    /// Enumerate the reflection group W by breadth-first composition of the
    /// generating reflections, deduplicating matrices to [`DEDUP_TOL`].
    /// Fails with [`Error::GroupTooLarge`] beyond `cap` elements
    /// (use [`GROUP_CAP`] unless testing the guard itself).
    pub fn enumerate_group(&self, cap: usize) -> Result<Vec<GroupElement>> {
        let generators: Vec<SquareMatrix> = self
            .positive_roots
            .iter()
            .map(|r| SquareMatrix::reflection(r))
            .collect();
        let mut elements = vec![GroupElement {
            matrix: SquareMatrix::identity(self.d),
            word_length: 0,
        }];
        let mut frontier: Vec<usize> = vec![0];
        let mut depth = 0usize;
        while !frontier.is_empty() {
            depth += 1;
            let mut next = Vec::new();
            for &idx in &frontier {
                let base = elements[idx].matrix.clone();
                for g in &generators {
                    let cand = g.matmul(&base);
                    let known = elements
                        .iter()
                        .any(|e| e.matrix.linf_dist(&cand) <= DEDUP_TOL);
                    if !known {
                        elements.push(GroupElement {
                            matrix: cand,
                            word_length: depth,
                        });
                        next.push(elements.len() - 1);
                        if elements.len() > cap {
                            return Err(Error::GroupTooLarge { cap });
                        }
                    }
                }
            }
            frontier = next;
        }
        Ok(elements)
    }
}
