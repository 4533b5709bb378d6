//! Exact polynomials in `(z, conj z)` used to build reference solutions and
//! check differential identities at the coefficient level, with no grids or
//! rounding beyond complex arithmetic on the coefficients themselves.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::field::{sample_field, DiskField};
use crate::grid::GridRef;

#[derive(Debug, Clone, Default)]
pub struct ZPoly {
    /// coefficient of `z^a conj(z)^b`
    terms: BTreeMap<(u32, u32), Complex64>,
}

impl ZPoly {
    pub fn zero() -> Self {
        ZPoly::default()
    }

    pub fn constant(c: Complex64) -> Self {
        let mut p = ZPoly::zero();
        p.add_term(0, 0, c);
        p
    }

    /// `sum_m coeffs[m] z^m`.
    pub fn in_z(coeffs: &[Complex64]) -> Self {
        let mut p = ZPoly::zero();
        for (m, &c) in coeffs.iter().enumerate() {
            p.add_term(m as u32, 0, c);
        }
        p
    }

    pub fn add_term(&mut self, a: u32, b: u32, c: Complex64) {
        if c.norm() == 0.0 {
            return;
        }
        let e = self.terms.entry((a, b)).or_insert(Complex64::new(0.0, 0.0));
        *e += c;
        if e.norm() == 0.0 {
            self.terms.remove(&(a, b));
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (u32, u32, Complex64)> + '_ {
        self.terms.iter().map(|(&(a, b), &c)| (a, b, c))
    }

    pub fn add(&self, other: &ZPoly) -> ZPoly {
        let mut out = self.clone();
        for (a, b, c) in other.terms() {
            out.add_term(a, b, c);
        }
        out
    }

    pub fn scale(&self, s: Complex64) -> ZPoly {
        let mut out = ZPoly::zero();
        for (a, b, c) in self.terms() {
            out.add_term(a, b, c * s);
        }
        out
    }

    pub fn mul(&self, other: &ZPoly) -> ZPoly {
        let mut out = ZPoly::zero();
        for (a1, b1, c1) in self.terms() {
            for (a2, b2, c2) in other.terms() {
                out.add_term(a1 + a2, b1 + b2, c1 * c2);
            }
        }
        out
    }

    /// `conj(p)(z) = conj(p(z))`: swaps the exponents and conjugates.
    pub fn conj(&self) -> ZPoly {
        let mut out = ZPoly::zero();
        for (a, b, c) in self.terms() {
            out.add_term(b, a, c.conj());
        }
        out
    }

    pub fn wirt_d(&self) -> ZPoly {
        let mut out = ZPoly::zero();
        for (a, b, c) in self.terms() {
            if a > 0 {
                out.add_term(a - 1, b, c * a as f64);
            }
        }
        out
    }

    pub fn wirt_db(&self) -> ZPoly {
        let mut out = ZPoly::zero();
        for (a, b, c) in self.terms() {
            if b > 0 {
                out.add_term(a, b - 1, c * b as f64);
            }
        }
        out
    }

    /// Horner evaluation of `outer(inner(z))` for `outer = sum c_m w^m`.
    pub fn compose_in(outer: &[Complex64], inner: &ZPoly) -> ZPoly {
        let mut acc = ZPoly::zero();
        for &c in outer.iter().rev() {
            acc = acc.mul(inner);
            acc.add_term(0, 0, c);
        }
        acc
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        let zb = z.conj();
        self.terms()
            .map(|(a, b, c)| c * z.powu(a) * zb.powu(b))
            .sum()
    }

    pub fn max_coeff(&self) -> f64 {
        self.terms().map(|(_, _, c)| c.norm()).fold(0.0, f64::max)
    }

    /// Largest `|a - b|` over the terms: the angular band the polynomial
    /// occupies on circles.
    pub fn mode_band(&self) -> u32 {
        self.terms()
            .map(|(a, b, _)| a.abs_diff(b))
            .max()
            .unwrap_or(0)
    }

    /// Fourier modes of the restriction to `|z| = 1`: term `z^a conj(z)^b`
    /// contributes to mode `a - b`.
    pub fn trace_modes(&self) -> Vec<(i64, Complex64)> {
        let mut acc: BTreeMap<i64, Complex64> = BTreeMap::new();
        for (a, b, c) in self.terms() {
            *acc.entry(a as i64 - b as i64)
                .or_insert(Complex64::new(0.0, 0.0)) += c;
        }
        acc.into_iter().collect()
    }

    pub fn sample(&self, grid: &GridRef) -> DiskField {
        sample_field(grid, |z| self.eval(z))
    }
}
