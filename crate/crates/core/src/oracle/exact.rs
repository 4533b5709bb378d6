//! Closed-form solution families for the identity-map equation, built
//! symbolically and self-checked by exact coefficient cancellation before
//! anything is sampled onto a grid.

use num_complex::Complex64;

use crate::boundary::BoundaryFunction;
use crate::canon::CanonicalParams;
use crate::error::{Error, Result};
use crate::field::DiskField;
use crate::grid::GridRef;
use crate::oracle::zpoly::ZPoly;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolutionFamily {
    /// tau = 0: plane isotropic case, generated by a holomorphic polynomial.
    Lame,
    /// sigma = 0, tau > 0: generated by a polynomial in `conj(z) - z/tau`.
    Skew,
}

#[derive(Debug, Clone)]
pub struct ExactSolutionSpec {
    pub family: SolutionFamily,
    /// Coefficients of the generating polynomial, constant term first.
    pub poly_coeffs: Vec<Complex64>,
    pub params: CanonicalParams,
}

impl ExactSolutionSpec {
    fn check(&self) -> Result<()> {
        match self.family {
            SolutionFamily::Lame if self.params.tau != 0.0 => {
                Err(Error::FamilyConstraint("holomorphic family needs tau = 0"))
            }
            SolutionFamily::Skew if self.params.sigma != 0.0 || self.params.tau <= 0.0 => Err(
                Error::FamilyConstraint("skew family needs sigma = 0 and tau > 0"),
            ),
            _ => Ok(()),
        }
    }

    /// The solution as an exact polynomial in `(z, conj z)`.
    pub fn build_poly(&self) -> Result<ZPoly> {
        self.check()?;
        let f = match self.family {
            SolutionFamily::Lame => {
                // phi + conj(phi) - sigma * conj(z) * phi'
                let phi = ZPoly::in_z(&self.poly_coeffs);
                let mut zbar_dphi = ZPoly::zero();
                for (a, b, c) in phi.wirt_d().terms() {
                    zbar_dphi.add_term(a, b + 1, c);
                }
                phi.add(&phi.conj())
                    .add(&zbar_dphi.scale(Complex64::new(-self.params.sigma, 0.0)))
            }
            SolutionFamily::Skew => {
                // psi(conj(z) - z/tau)
                let mut inner = ZPoly::zero();
                inner.add_term(0, 1, Complex64::new(1.0, 0.0));
                inner.add_term(1, 0, Complex64::new(-1.0 / self.params.tau, 0.0));
                ZPoly::compose_in(&self.poly_coeffs, &inner)
            }
        };

        // Coefficient-level check that f solves the canonical equation:
        // dd̄ f + t*(alpha0 * d²f + beta0 * d²(conj f)) must cancel exactly.
        let p = &self.params;
        let dd = |q: &ZPoly| q.wirt_d().wirt_d();
        let residual = f
            .wirt_db()
            .wirt_d()
            .add(&dd(&f).scale(Complex64::new(p.t_norm * p.alpha0, 0.0)))
            .add(&dd(&f.conj()).scale(Complex64::new(p.t_norm * p.beta0, 0.0)));
        let scale = f.max_coeff().max(1.0);
        if residual.max_coeff() > 1e-12 * scale {
            return Err(Error::FamilyConstraint(
                "generated polynomial fails the equation identity",
            ));
        }
        Ok(f)
    }
}

/// Sample an exact family member on a grid along with its circle trace.
pub fn exact_solution(
    spec: &ExactSolutionSpec,
    grid: &GridRef,
) -> Result<(DiskField, BoundaryFunction)> {
    let f = spec.build_poly()?;
    if f.mode_band() as usize > grid.max_mode() {
        return Err(Error::GridMismatch(
            "exact solution occupies angular modes beyond the grid band",
        ));
    }
    let field = f.sample(grid);
    let trace = BoundaryFunction::from_modes(grid.max_mode(), &f.trace_modes())?;
    Ok((field, trace))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canon::canonical_params;
    use crate::grid::make_grid;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn lame_square(sigma: f64) -> ExactSolutionSpec {
        ExactSolutionSpec {
            family: SolutionFamily::Lame,
            poly_coeffs: vec![c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)],
            params: canonical_params(0.0, sigma).unwrap(),
        }
    }

    #[test]
    fn lame_square_matches_closed_form() {
        // phi = z^2, sigma = 0.5: f = z^2 + conj(z)^2 - z conj(z)
        let f = lame_square(0.5).build_poly().unwrap();
        let terms: Vec<_> = f.terms().collect();
        assert_eq!(
            terms,
            vec![
                (0, 2, c(1.0, 0.0)),
                (1, 1, c(-1.0, 0.0)),
                (2, 0, c(1.0, 0.0))
            ]
        );
    }

    #[test]
    fn lame_square_trace_modes() {
        let grid = make_grid(8, 12).unwrap();
        let (field, trace) = exact_solution(&lame_square(0.5), &grid).unwrap();
        assert!((trace.coeff(2) - c(1.0, 0.0)).norm() < 1e-15);
        assert!((trace.coeff(-2) - c(1.0, 0.0)).norm() < 1e-15);
        assert!((trace.coeff(0) - c(-1.0, 0.0)).norm() < 1e-15);
        assert!((trace.coeff(1)).norm() < 1e-15);
        // sampled field agrees with direct polynomial evaluation
        let w = Complex64::from_polar(0.62, 1.1);
        let direct = w * w + w.conj() * w.conj() - w * w.conj();
        let sampled = crate::field::synthesize(&field, &[(0.62, 1.1)]).unwrap()[0];
        assert!((sampled - direct).norm() < 1e-12);
    }

    #[test]
    fn skew_square_matches_closed_form() {
        // psi = w^2, tau = 0.5: f = conj(z)^2 - 4 z conj(z) + 4 z^2
        let spec = ExactSolutionSpec {
            family: SolutionFamily::Skew,
            poly_coeffs: vec![c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)],
            params: canonical_params(0.5, 0.0).unwrap(),
        };
        let f = spec.build_poly().unwrap();
        let terms: Vec<_> = f.terms().collect();
        assert_eq!(
            terms,
            vec![
                (0, 2, c(1.0, 0.0)),
                (1, 1, c(-4.0, 0.0)),
                (2, 0, c(4.0, 0.0))
            ]
        );
        let modes = f.trace_modes();
        assert_eq!(
            modes,
            vec![(-2, c(1.0, 0.0)), (0, c(-4.0, 0.0)), (2, c(4.0, 0.0))]
        );
    }

    #[test]
    fn degree_one_family_is_affine() {
        // phi = z: f = z + conj(z) - sigma*conj(z), second derivatives vanish
        let spec = ExactSolutionSpec {
            family: SolutionFamily::Lame,
            poly_coeffs: vec![c(0.0, 0.0), c(1.0, 0.0)],
            params: canonical_params(0.0, 0.3).unwrap(),
        };
        let f = spec.build_poly().unwrap();
        let terms: Vec<_> = f.terms().collect();
        assert_eq!(terms, vec![(0, 1, c(0.7, 0.0)), (1, 0, c(1.0, 0.0))]);
    }

    #[test]
    fn family_constraints_enforced() {
        let bad_lame = ExactSolutionSpec {
            family: SolutionFamily::Lame,
            poly_coeffs: vec![c(0.0, 0.0), c(1.0, 0.0)],
            params: canonical_params(0.2, 0.3).unwrap(),
        };
        assert!(bad_lame.build_poly().is_err());
        let bad_skew = ExactSolutionSpec {
            family: SolutionFamily::Skew,
            poly_coeffs: vec![c(0.0, 0.0), c(1.0, 0.0)],
            params: canonical_params(0.0, 0.0).unwrap(),
        };
        assert!(bad_skew.build_poly().is_err());
    }

    #[test]
    fn quartic_lame_passes_identity_check() {
        let spec = ExactSolutionSpec {
            family: SolutionFamily::Lame,
            poly_coeffs: vec![c(0.0, 0.0); 4]
                .into_iter()
                .chain([c(1.0, -0.5)])
                .collect(),
            params: canonical_params(0.0, 0.8).unwrap(),
        };
        let f = spec.build_poly().unwrap();
        assert_eq!(f.mode_band(), 4);
    }

    #[test]
    fn band_larger_than_grid_rejected() {
        let grid = make_grid(1, 8).unwrap();
        let (err,) = match exact_solution(&lame_square(0.5), &grid) {
            Err(e) => (e,),
            Ok(_) => panic!("expected band mismatch"),
        };
        assert!(matches!(err, Error::GridMismatch(_)));
    }
}
