//! Polynomial fields on spheres with a fixed parity under `s -> -s`.
//!
//! Only monomials whose total degree matches the parity are ever stored, so
//! `p(-s) = -p(s)` (odd) or `p(-s) = p(s)` (even) holds exactly in floating
//! point, not just approximately.

use rand::Rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    /// `+1` for even, `-1` for odd.
    pub fn sign(self) -> i8 {
        match self {
            Parity::Even => 1,
            Parity::Odd => -1,
        }
    }

    pub fn from_sign(sign: i8) -> Option<Self> {
        match sign {
            1 => Some(Parity::Even),
            -1 => Some(Parity::Odd),
            _ => None,
        }
    }

    fn admits(self, degree: u32) -> bool {
        (degree % 2 == 1) == (self == Parity::Odd)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Monomial {
    pub exponents: Vec<u32>,
    pub coeff: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ParityPolynomial {
    dim: usize,
    parity: Parity,
    terms: Vec<Monomial>,
}

impl ParityPolynomial {
    /// Fails if a monomial has the wrong length or the wrong degree parity.
    pub fn new(dim: usize, parity: Parity, terms: Vec<Monomial>) -> Option<Self> {
        let ok = terms
            .iter()
            .all(|t| t.exponents.len() == dim && parity.admits(t.exponents.iter().sum()));
        ok.then_some(Self { dim, parity, terms })
    }

    /// The coordinate function `s -> s[axis]`.
    pub fn coordinate(dim: usize, axis: usize) -> Self {
        let mut exponents = vec![0; dim];
        exponents[axis] = 1;
        Self {
            dim,
            parity: Parity::Odd,
            terms: vec![Monomial {
                exponents,
                coeff: 1.0,
            }],
        }
    }

    pub fn constant(dim: usize, value: f64) -> Self {
        Self {
            dim,
            parity: Parity::Even,
            terms: vec![Monomial {
                exponents: vec![0; dim],
                coeff: value,
            }],
        }
    }

    /// Every admissible monomial up to `max_degree` with a uniform coefficient in `[-1, 1]`.
    pub fn random<R: Rng + ?Sized>(
        dim: usize,
        parity: Parity,
        max_degree: u32,
        rng: &mut R,
    ) -> Self {
        let terms = exponent_vectors(dim, max_degree)
            .into_iter()
            .filter(|e| parity.admits(e.iter().sum()))
            .map(|exponents| Monomial {
                exponents,
                coeff: rng.gen_range(-1.0..=1.0),
            })
            .collect();
        Self { dim, parity, terms }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    pub fn terms(&self) -> &[Monomial] {
        &self.terms
    }

    pub fn scaled(mut self, factor: f64) -> Self {
        self.terms.iter_mut().for_each(|t| t.coeff *= factor);
        self
    }

    pub fn eval(&self, s: &[f64]) -> f64 {
        debug_assert_eq!(s.len(), self.dim);
        self.terms
            .iter()
            .map(|t| {
                t.exponents
                    .iter()
                    .zip(s)
                    .fold(t.coeff, |acc, (&e, &x)| acc * x.powi(e as i32))
            })
            .sum()
    }
}

/// All exponent vectors of length `dim` with total degree `<= max_degree`, in
/// graded lexicographic order.
fn exponent_vectors(dim: usize, max_degree: u32) -> Vec<Vec<u32>> {
    fn fill(prefix: &mut Vec<u32>, dim: usize, remaining: u32, out: &mut Vec<Vec<u32>>) {
        if prefix.len() + 1 == dim {
            prefix.push(remaining);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for e in (0..=remaining).rev() {
            prefix.push(e);
            fill(prefix, dim, remaining - e, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    for degree in 0..=max_degree {
        fill(&mut Vec::with_capacity(dim), dim, degree, &mut out);
    }
    out
}

/// Vector-valued polynomial map whose components share one parity.
#[derive(Clone, Debug, PartialEq)]
pub struct ParityMap {
    components: Vec<ParityPolynomial>,
}

impl ParityMap {
    pub fn new(components: Vec<ParityPolynomial>) -> Option<Self> {
        let first = components.first()?;
        let uniform = components
            .iter()
            .all(|c| c.dim == first.dim && c.parity == first.parity);
        uniform.then_some(Self { components })
    }

    pub fn random<R: Rng + ?Sized>(
        dim: usize,
        outputs: usize,
        parity: Parity,
        max_degree: u32,
        rng: &mut R,
    ) -> Self {
        Self {
            components: (0..outputs)
                .map(|_| ParityPolynomial::random(dim, parity, max_degree, rng))
                .collect(),
        }
    }

    pub fn components(&self) -> &[ParityPolynomial] {
        &self.components
    }

    pub fn eval(&self, s: &[f64]) -> Vec<f64> {
        self.components.iter().map(|c| c.eval(s)).collect()
    }
}
