//! Sparse multivariate complex polynomials.
//!
//! Terms are kept in a `BTreeMap` keyed by exponent vectors under graded
//! lexicographic order, so iteration, printing and serialisation are byte
//! stable. Coefficients that are exactly zero are dropped; tiny nonzero ones
//! are kept.

mod roots;
mod text;
mod univariate;

pub use roots::univariate_roots;
pub use univariate::UniPoly;

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{check_dim, LabError, Result};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

/// Exponent vector ordered graded-lexicographically.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Exponents(pub Vec<u32>);

impl Exponents {
    pub fn total(&self) -> u32 {
        self.0.iter().sum()
    }
}

impl Ord for Exponents {
    fn cmp(&self, other: &Self) -> Ordering {
        self.total()
            .cmp(&other.total())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Exponents {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// One stored term.
#[derive(Clone, Debug, PartialEq)]
pub struct Monomial {
    pub exponents: Vec<u32>,
    pub coefficient: Complex64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Polynomial {
    nvars: usize,
    terms: BTreeMap<Exponents, Complex64>,
}

impl Polynomial {
    pub fn zero(nvars: usize) -> Self {
        Polynomial {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: Complex64) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(vec![0; nvars], c);
        p
    }

    /// The coordinate function z_i.
    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        let mut p = Self::zero(nvars);
        p.add_term(e, ONE);
        p
    }

    pub fn from_terms<I>(nvars: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<u32>, Complex64)>,
    {
        let mut p = Self::zero(nvars);
        for (e, c) in terms {
            check_dim(nvars, e.len())?;
            p.add_term(e, c);
        }
        Ok(p)
    }

    /// Accumulate `c * z^e`, dropping the term if it cancels exactly.
    pub fn add_term(&mut self, e: Vec<u32>, c: Complex64) {
        debug_assert_eq!(e.len(), self.nvars);
        let key = Exponents(e);
        let entry = self.terms.entry(key.clone()).or_insert(ZERO);
        *entry += c;
        if *entry == ZERO {
            self.terms.remove(&key);
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Total degree; zero for constants and for the zero polynomial.
    pub fn degree(&self) -> u32 {
        self.terms.keys().map(Exponents::total).max().unwrap_or(0)
    }

    /// Terms in descending graded-lex order.
    pub fn monomials(&self) -> impl Iterator<Item = Monomial> + '_ {
        self.terms.iter().rev().map(|(e, c)| Monomial {
            exponents: e.0.clone(),
            coefficient: *c,
        })
    }

    pub fn coefficient(&self, e: &[u32]) -> Complex64 {
        self.terms
            .get(&Exponents(e.to_vec()))
            .copied()
            .unwrap_or(ZERO)
    }

    pub fn max_coefficient(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut totals = self.terms.keys().map(Exponents::total);
        match totals.next() {
            None => true,
            Some(d) => totals.all(|t| t == d),
        }
    }

    /// Highest exponent of variable `i` over all terms.
    pub fn degree_in(&self, i: usize) -> u32 {
        self.terms.keys().map(|e| e.0[i]).max().unwrap_or(0)
    }

    pub fn scale(&self, c: Complex64) -> Self {
        let mut p = Self::zero(self.nvars);
        for (e, v) in &self.terms {
            p.add_term(e.0.clone(), v * c);
        }
        p
    }

    /// Evaluate at `z` with Neumaier-compensated accumulation over terms.
    pub fn eval(&self, z: &[Complex64]) -> Result<Complex64> {
        check_dim(self.nvars, z.len())?;
        Ok(self.eval_unchecked(z))
    }

    pub(crate) fn eval_unchecked(&self, z: &[Complex64]) -> Complex64 {
        let powers = power_table(z, |i| self.degree_in(i));
        let mut re = Neumaier::default();
        let mut im = Neumaier::default();
        for (e, c) in &self.terms {
            let mut t = *c;
            for (i, &k) in e.0.iter().enumerate() {
                if k > 0 {
                    t *= powers[i][k as usize];
                }
            }
            re.add(t.re);
            im.add(t.im);
        }
        Complex64::new(re.total(), im.total())
    }

    /// Holomorphic partial derivative with respect to z_j, as a polynomial.
    pub fn partial(&self, j: usize) -> Self {
        let mut p = Self::zero(self.nvars);
        for (e, c) in &self.terms {
            let k = e.0[j];
            if k > 0 {
                let mut d = e.0.clone();
                d[j] -= 1;
                p.add_term(d, c * k as f64);
            }
        }
        p
    }

    pub fn gradient(&self, z: &[Complex64]) -> Result<Vec<Complex64>> {
        check_dim(self.nvars, z.len())?;
        Ok((0..self.nvars)
            .map(|j| self.partial(j).eval_unchecked(z))
            .collect())
    }

    /// Insert a new variable at `position` and pad every term to total degree
    /// `deg(p)` with it.
    pub fn homogenize(&self, position: usize) -> Result<Self> {
        if self.is_zero() {
            return Err(LabError::input("cannot homogenize the zero polynomial"));
        }
        if position > self.nvars {
            return Err(LabError::input(format!(
                "homogenizing position {position} out of range for {} variables",
                self.nvars
            )));
        }
        let d = self.degree();
        let mut p = Self::zero(self.nvars + 1);
        for (e, c) in &self.terms {
            let mut f = e.0.clone();
            f.insert(position, d - e.total());
            p.add_term(f, *c);
        }
        Ok(p)
    }

    /// Set variable `position` to 1 and remove it.
    pub fn dehomogenize(&self, position: usize) -> Result<Self> {
        if position >= self.nvars || self.nvars < 2 {
            return Err(LabError::input("dehomogenizing position out of range"));
        }
        let mut p = Self::zero(self.nvars - 1);
        for (e, c) in &self.terms {
            let mut f = e.0.clone();
            f.remove(position);
            p.add_term(f, *c);
        }
        Ok(p)
    }

    /// Substitute z = M y, returning q(y) = p(M y).
    pub fn compose_linear(&self, m: &nalgebra::DMatrix<Complex64>) -> Result<Self> {
        check_dim(self.nvars, m.nrows())?;
        let ny = m.ncols();
        let lin: Vec<Polynomial> = (0..self.nvars)
            .map(|i| {
                let mut l = Polynomial::zero(ny);
                for j in 0..ny {
                    let mut e = vec![0; ny];
                    e[j] = 1;
                    l.add_term(e, m[(i, j)]);
                }
                l
            })
            .collect();
        let mut out = Polynomial::zero(ny);
        for (e, c) in &self.terms {
            let mut t = Polynomial::constant(ny, *c);
            for (i, &k) in e.0.iter().enumerate() {
                for _ in 0..k {
                    t = &t * &lin[i];
                }
            }
            out = &out + &t;
        }
        Ok(out)
    }

    /// Substitute z_i -> s_i z_i coordinatewise.
    pub fn scale_variables(&self, s: &[Complex64]) -> Result<Self> {
        check_dim(self.nvars, s.len())?;
        let mut p = Self::zero(self.nvars);
        for (e, c) in &self.terms {
            let mut t = *c;
            for (i, &k) in e.0.iter().enumerate() {
                t *= s[i].powu(k);
            }
            p.add_term(e.0.clone(), t);
        }
        Ok(p)
    }

    /// q(t) = p(base + t dir), by direct expansion of each term.
    pub fn restrict_to_line(&self, base: &[Complex64], dir: &[Complex64]) -> Result<UniPoly> {
        check_dim(self.nvars, base.len())?;
        check_dim(self.nvars, dir.len())?;
        if dir.iter().all(|c| *c == ZERO) {
            return Err(LabError::input("restrict_to_line: zero direction"));
        }
        Ok(self.restrict_unchecked(base, dir))
    }

    pub(crate) fn restrict_unchecked(&self, base: &[Complex64], dir: &[Complex64]) -> UniPoly {
        let d = self.degree() as usize;
        // powers[i][k] = (base_i + t dir_i)^k as ascending coefficient vectors
        let powers: Vec<Vec<Vec<Complex64>>> = (0..self.nvars)
            .map(|i| {
                let kmax = self.degree_in(i) as usize;
                let mut out = Vec::with_capacity(kmax + 1);
                out.push(vec![ONE]);
                for k in 1..=kmax {
                    let prev: &Vec<Complex64> = &out[k - 1];
                    let mut next = vec![ZERO; k + 1];
                    for (j, a) in prev.iter().enumerate() {
                        next[j] += a * base[i];
                        next[j + 1] += a * dir[i];
                    }
                    out.push(next);
                }
                out
            })
            .collect();
        let mut acc = vec![(Neumaier::default(), Neumaier::default()); d + 1];
        for (e, c) in &self.terms {
            let mut t = vec![*c];
            for (i, &k) in e.0.iter().enumerate() {
                if k > 0 {
                    t = univariate::convolve(&t, &powers[i][k as usize]);
                }
            }
            for (j, v) in t.iter().enumerate() {
                acc[j].0.add(v.re);
                acc[j].1.add(v.im);
            }
        }
        UniPoly::new(
            acc.into_iter()
                .map(|(r, i)| Complex64::new(r.total(), i.total()))
                .collect(),
        )
    }
}

fn power_table(z: &[Complex64], kmax: impl Fn(usize) -> u32) -> Vec<Vec<Complex64>> {
    z.iter()
        .enumerate()
        .map(|(i, &x)| {
            let k = kmax(i) as usize;
            let mut v = Vec::with_capacity(k + 1);
            v.push(ONE);
            for j in 1..=k {
                let prev = v[j - 1];
                v.push(prev * x);
            }
            v
        })
        .collect()
}

/// Neumaier's improved Kahan summation.
#[derive(Default, Clone, Copy)]
pub(crate) struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    pub(crate) fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub(crate) fn total(&self) -> f64 {
        self.sum + self.comp
    }
}

impl<'a> Add<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        assert_eq!(self.nvars, rhs.nvars, "variable count mismatch");
        let mut p = self.clone();
        for (e, c) in &rhs.terms {
            p.add_term(e.0.clone(), *c);
        }
        p
    }
}

impl<'a> Sub<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        self + &(-rhs)
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        self.scale(-ONE)
    }
}

impl<'a> Mul<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        assert_eq!(self.nvars, rhs.nvars, "variable count mismatch");
        let mut p = Polynomial::zero(self.nvars);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                let e = ea.0.iter().zip(&eb.0).map(|(a, b)| a + b).collect();
                p.add_term(e, ca * cb);
            }
        }
        p
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&text::format_polynomial(self))
    }
}

impl std::str::FromStr for Polynomial {
    type Err = LabError;
    fn from_str(s: &str) -> Result<Self> {
        text::parse_polynomial(s, None)
    }
}

impl Polynomial {
    /// Parse the text format, fixing the number of variables (otherwise it
    /// is one more than the highest variable index that appears).
    pub fn parse(s: &str, nvars: Option<usize>) -> Result<Self> {
        text::parse_polynomial(s, nvars)
    }
}

/// A list of polynomials in a common ambient space.
#[derive(Clone, Debug, PartialEq)]
pub struct PolySystem {
    polys: Vec<Polynomial>,
    claimed_codim: usize,
}

impl PolySystem {
    pub fn new(polys: Vec<Polynomial>, claimed_codim: usize) -> Result<Self> {
        let first = polys
            .first()
            .ok_or_else(|| LabError::input("empty polynomial system"))?;
        let n = first.nvars();
        if let Some(bad) = polys.iter().find(|p| p.nvars() != n) {
            return Err(LabError::Dimension {
                expected: n,
                got: bad.nvars(),
            });
        }
        if claimed_codim == 0 {
            return Err(LabError::input("claimed codimension must be positive"));
        }
        Ok(PolySystem {
            polys,
            claimed_codim,
        })
    }

    pub fn hypersurface(p: Polynomial) -> Self {
        PolySystem {
            polys: vec![p],
            claimed_codim: 1,
        }
    }

    pub fn polys(&self) -> &[Polynomial] {
        &self.polys
    }

    pub fn nvars(&self) -> usize {
        self.polys[0].nvars()
    }

    pub fn claimed_codim(&self) -> usize {
        self.claimed_codim
    }

    pub fn map(&self, f: impl Fn(&Polynomial) -> Result<Polynomial>) -> Result<Self> {
        Ok(PolySystem {
            polys: self.polys.iter().map(f).collect::<Result<_>>()?,
            claimed_codim: self.claimed_codim,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn p(s: &str) -> Polynomial {
        s.parse().unwrap()
    }

    #[test]
    fn eval_examples() {
        let q = Polynomial::parse("z1^2 + z2^2", Some(3)).unwrap();
        assert_eq!(
            q.eval(&[c(0.0, 0.0), c(1.0, 0.0), c(0.0, 1.0)]).unwrap(),
            c(0.0, 0.0)
        );
        let one = Polynomial::constant(2, c(1.0, 0.0));
        assert_eq!(one.eval(&[c(3.0, -1.0), c(7.0, 2.0)]).unwrap(), c(1.0, 0.0));
        let conic = p("z0*z2 - z1^2");
        assert_eq!(
            conic
                .eval(&[c(1.0, 0.0), c(2.0, 0.0), c(4.0, 0.0)])
                .unwrap(),
            c(0.0, 0.0)
        );
    }

    #[test]
    fn eval_dimension_mismatch() {
        let q = p("z0 + z1");
        assert!(matches!(
            q.eval(&[c(1.0, 0.0)]),
            Err(LabError::Dimension { .. })
        ));
    }

    #[test]
    fn gradient_examples() {
        let q = p("z0^2");
        assert_eq!(q.gradient(&[c(3.0, 0.0)]).unwrap(), vec![c(6.0, 0.0)]);
        let q = p("z0*z1");
        let (a, b) = (c(1.5, -2.0), c(0.25, 4.0));
        assert_eq!(q.gradient(&[a, b]).unwrap(), vec![b, a]);
        let q = p("z0^3 + z1^3 + z2^3");
        let one = c(1.0, 0.0);
        assert_eq!(q.gradient(&[one, one, one]).unwrap(), vec![c(3.0, 0.0); 3]);
    }

    #[test]
    fn homogenize_examples() {
        let q = Polynomial::parse("z1 - z0^2", Some(2)).unwrap();
        // variables (z1, z2) of the example are (z0, z1) here; new var at 0
        let h = q.homogenize(0).unwrap();
        assert_eq!(h, p("z0*z2 - z1^2"));
        let lin = p("z0 + 1");
        assert_eq!(lin.homogenize(0).unwrap(), p("z1 + z0"));
        let hom = p("z0*z1 + z1^2");
        let h = hom.homogenize(2).unwrap();
        assert!(h.monomials().all(|m| m.exponents[2] == 0));
        assert!(Polynomial::zero(2).homogenize(0).is_err());
    }

    #[test]
    fn restrict_examples() {
        let par = Polynomial::parse("z1 - z0^2", Some(2)).unwrap();
        let q = par
            .restrict_to_line(&[c(0.0, 0.0), c(0.0, 0.0)], &[c(1.0, 0.0), c(0.0, 0.0)])
            .unwrap();
        assert_eq!(q.coeffs(), &[c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)]);
        let z = Polynomial::var(2, 0);
        let q = z
            .restrict_to_line(&[c(5.0, 0.0), c(0.0, 0.0)], &[c(0.0, 0.0), c(1.0, 0.0)])
            .unwrap();
        assert_eq!(q.eval(c(3.7, 1.0)), c(5.0, 0.0));
        let conic = p("z0*z2 - z1^2");
        let q = conic
            .restrict_to_line(
                &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)],
                &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0)],
            )
            .unwrap();
        assert_eq!(q.coeffs(), &[c(0.0, 0.0), c(1.0, 0.0), c(-1.0, 0.0)]);
        assert!(conic
            .restrict_to_line(&[c(1.0, 0.0); 3], &[c(0.0, 0.0); 3])
            .is_err());
    }

    #[test]
    fn compose_with_permutation_swaps_variables() {
        let q = p("z1 - z0^2");
        let m = crate::linalg::permutation(&[1, 0]);
        assert_eq!(q.compose_linear(&m).unwrap(), p("z0 - z1^2"));
    }

    #[test]
    fn exact_cancellation_drops_terms() {
        let a = p("z0 + z1");
        let b = Polynomial::parse("z0", Some(2)).unwrap();
        let d = &a - &b;
        assert_eq!(d.num_terms(), 1);
        let tiny = Polynomial::from_terms(1, [(vec![1], c(1e-300, 0.0))]).unwrap();
        assert_eq!(tiny.num_terms(), 1);
    }

    fn arb_poly() -> impl Strategy<Value = Polynomial> {
        prop::collection::vec(
            (
                prop::collection::vec(0u32..4, 3),
                (-2.0f64..2.0, -2.0f64..2.0),
            ),
            1..6,
        )
        .prop_filter_map("nonzero", |terms| {
            let q = Polynomial::from_terms(3, terms.into_iter().map(|(e, (a, b))| (e, c(a, b))))
                .ok()?;
            (!q.is_zero()).then_some(q)
        })
    }

    fn arb_point(n: usize) -> impl Strategy<Value = Vec<Complex64>> {
        prop::collection::vec((-1.5f64..1.5, -1.5f64..1.5).prop_map(|(a, b)| c(a, b)), n)
    }

    proptest! {
        #[test]
        fn dehomogenization_identity(q in arb_poly(), z in arb_point(3)) {
            let h = q.homogenize(0).unwrap();
            let mut w = vec![c(1.0, 0.0)];
            w.extend_from_slice(&z);
            let lhs = h.eval(&w).unwrap();
            let rhs = q.eval(&z).unwrap();
            prop_assert!((lhs - rhs).norm() <= 1e-10 * (1.0 + rhs.norm()));
        }

        #[test]
        fn homogeneity(q in arb_poly(), w in arb_point(4), (lr, li) in (0.2f64..2.0, -2.0f64..2.0)) {
            let h = q.homogenize(0).unwrap();
            let lam = c(lr, li);
            let scaled: Vec<_> = w.iter().map(|x| x * lam).collect();
            let lhs = h.eval(&scaled).unwrap();
            let rhs = lam.powu(q.degree()) * h.eval(&w).unwrap();
            prop_assert!((lhs - rhs).norm() <= 1e-9 * (1.0 + rhs.norm()));
        }

        #[test]
        fn gradient_matches_central_differences(q in arb_poly(), z in arb_point(3)) {
            let g = q.gradient(&z).unwrap();
            let h = 1e-5;
            for j in 0..3 {
                let mut zp = z.clone();
                let mut zm = z.clone();
                zp[j] += h;
                zm[j] -= h;
                let fd = (q.eval(&zp).unwrap() - q.eval(&zm).unwrap()) / (2.0 * h);
                let scale = 1.0 + g[j].norm();
                prop_assert!((fd - g[j]).norm() <= 1e-6 * scale, "{fd} vs {}", g[j]);
            }
        }

        #[test]
        fn restriction_matches_evaluation(q in arb_poly(), base in arb_point(3), dir in arb_point(3), (tr, ti) in (-10.0f64..10.0, -10.0f64..10.0)) {
            prop_assume!(dir.iter().any(|x| x.norm() > 1e-3));
            let u = q.restrict_to_line(&base, &dir).unwrap();
            let t = c(tr, ti);
            prop_assume!(t.norm() <= 10.0);
            let pt: Vec<_> = base.iter().zip(&dir).map(|(b, d)| b + t * d).collect();
            let direct = q.eval(&pt).unwrap();
            let tol = 1e-10 * (1.0 + t.norm()).powi(q.degree() as i32);
            prop_assert!((u.eval(t) - direct).norm() <= tol);
        }

        #[test]
        fn text_round_trip(q in arb_poly()) {
            let s = q.to_string();
            let back = Polynomial::parse(&s, Some(3)).unwrap();
            prop_assert_eq!(back, q);
        }
    }
}
