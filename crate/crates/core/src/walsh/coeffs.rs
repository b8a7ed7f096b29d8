//! Walsh coefficients of symmetric constraints and their conjugated
//! (inverse-DFT-folded) form.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, OnceLock, RwLock};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::formula::ConstraintKind;

/// Identifies a symmetric constraint up to its literals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ShapeKey {
    pub kind: ConstraintKind,
    pub arity: usize,
}

impl ShapeKey {
    pub fn new(kind: ConstraintKind, arity: usize) -> Self {
        ShapeKey { kind, arity }
    }
}

/// Degree-indexed Walsh coefficients, ordered from degree `k` down to
/// degree 0 so that `coeffs[m]` multiplies `e_{k-m}`.
#[derive(Debug, Clone, PartialEq)]
pub struct WalshCoeffs {
    coeffs: Vec<f64>,
}

impl WalshCoeffs {
    pub fn from_vec(coeffs: Vec<f64>) -> Self {
        assert!(!coeffs.is_empty());
        WalshCoeffs { coeffs }
    }

    pub fn arity(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.coeffs
    }

    /// Coefficient of every degree-`d` monomial.
    pub fn degree(&self, d: usize) -> f64 {
        self.coeffs[self.arity() - d]
    }
}

/// Exact Walsh coefficients in `[e_k, ..., e_0]` order.
///
/// Grouping assignments by their number `t` of True literals, the
/// coefficient of a degree-`i` monomial is
/// `2^-k * sum_t f(t) * [z^t] (1 - z)^i (1 + z)^(k - i)`,
/// with `f(t) = -1` when the constraint holds and `+1` otherwise.
pub fn symmetric_walsh_coeffs_exact(kind: ConstraintKind, arity: usize) -> Vec<BigRational> {
    let k = arity;
    let truth: Vec<i32> = (0..=k).map(|t| if kind.holds(t, k) { -1 } else { 1 }).collect();
    let denom = BigInt::one() << k;

    let mut by_degree = Vec::with_capacity(k + 1);
    for i in 0..=k {
        let poly = krawtchouk_generator(i, k);
        let mut num = BigInt::zero();
        for (t, c) in poly.iter().enumerate() {
            if truth[t] > 0 {
                num += c;
            } else {
                num -= c;
            }
        }
        by_degree.push(BigRational::new(num, denom.clone()));
    }
    by_degree.reverse();
    by_degree
}

// Coefficients of (1 - z)^i (1 + z)^(k - i).
fn krawtchouk_generator(i: usize, k: usize) -> Vec<BigInt> {
    let mut poly = vec![BigInt::one()];
    for step in 0..k {
        let minus = step < i;
        let mut next = vec![BigInt::zero(); poly.len() + 1];
        for (d, c) in poly.iter().enumerate() {
            next[d] += c;
            if minus {
                next[d + 1] -= c;
            } else {
                next[d + 1] += c;
            }
        }
        poly = next;
    }
    poly
}

pub fn symmetric_walsh_coeffs(kind: ConstraintKind, arity: usize) -> WalshCoeffs {
    let coeffs =
        symmetric_walsh_coeffs_exact(kind, arity).iter().map(|r| r.to_f64().expect("finite rational")).collect();
    WalshCoeffs { coeffs }
}

/// `exp(-2πi * p / n)`, reduced modulo `n` before evaluating.
pub fn root_of_unity(p: i64, n: usize) -> Complex64 {
    let r = p.rem_euclid(n as i64);
    let theta = -2.0 * PI * r as f64 / n as f64;
    Complex64::new(theta.cos(), theta.sin())
}

/// Walsh coefficients with the inverse DFT folded in.
///
/// For a point with leaf sequences `γ_i[j] = ω^j + x_i`, the constraint
/// value is `Re(Σ_j ccoeffs[j] * Π_i γ_i[j])`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConjugatedCoeffs {
    ccoeffs: Vec<Complex64>,
    roots: Vec<Complex64>,
}

impl ConjugatedCoeffs {
    pub fn arity(&self) -> usize {
        self.ccoeffs.len() - 1
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.ccoeffs
    }

    /// `[1, ω, ..., ω^k]`.
    pub fn roots(&self) -> &[Complex64] {
        &self.roots
    }

    /// The base frequency `ω = exp(-2πi / (k + 1))`.
    pub fn base_freq(&self) -> Complex64 {
        self.roots.get(1).copied().unwrap_or(Complex64::one())
    }
}

/// `f̃ = f̂ · W⁻¹` with `W[i][j] = ω^(ij)` and `W⁻¹ = conj(W) / (k + 1)`.
pub fn conjugate_coeffs(wc: &WalshCoeffs) -> ConjugatedCoeffs {
    let n = wc.coeffs.len();
    let scale = 1.0 / n as f64;
    let ccoeffs = (0..n)
        .map(|j| {
            wc.coeffs.iter().enumerate().map(|(m, &c)| root_of_unity(-((m * j) as i64), n) * c).sum::<Complex64>()
                * scale
        })
        .collect();
    let roots = (0..n).map(|j| root_of_unity(j as i64, n)).collect();
    ConjugatedCoeffs { ccoeffs, roots }
}

/// Both coefficient forms for one constraint shape.
#[derive(Debug, Clone)]
pub struct Shape {
    pub key: ShapeKey,
    pub walsh: WalshCoeffs,
    pub conjugated: ConjugatedCoeffs,
}

impl Shape {
    pub fn new(key: ShapeKey) -> Self {
        let walsh = symmetric_walsh_coeffs(key.kind, key.arity);
        let conjugated = conjugate_coeffs(&walsh);
        Shape { key, walsh, conjugated }
    }
}

/// Shared, lazily filled map from constraint shape to coefficients.
#[derive(Debug, Default)]
pub struct CoeffCache {
    shapes: RwLock<HashMap<ShapeKey, Arc<Shape>>>,
}

impl CoeffCache {
    pub fn new() -> Self {
        Self::default()
    }

    /// Process-wide cache.
    pub fn global() -> &'static CoeffCache {
        static CACHE: OnceLock<CoeffCache> = OnceLock::new();
        CACHE.get_or_init(CoeffCache::new)
    }

    pub fn get(&self, key: ShapeKey) -> Arc<Shape> {
        if let Some(s) = self.shapes.read().expect("cache lock poisoned").get(&key) {
            return Arc::clone(s);
        }
        // Computed outside the write lock; a racing insert of the same key is harmless.
        let shape = Arc::new(Shape::new(key));
        let mut map = self.shapes.write().expect("cache lock poisoned");
        Arc::clone(map.entry(key).or_insert(shape))
    }

    pub fn len(&self) -> usize {
        self.shapes.read().expect("cache lock poisoned").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}
