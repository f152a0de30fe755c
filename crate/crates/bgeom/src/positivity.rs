//! Nefness, Zariski decomposition, bigness and volumes, all relative to
//! the tracked curve set of a model.
//!
//! The decomposition is computed by the standard iteration: starting from
//! the empty support, repeatedly add every tracked curve the current
//! positive part meets negatively, and resolve the negative part on the
//! enlarged support by solving against its Gram matrix. Support only ever
//! grows, so the loop terminates after at most `#tracked` rounds.

use num_traits::Zero;

use crate::lattice::{DivisorClass, SurfaceModel};
use crate::matrix;
use crate::rat::Rat;
use crate::{Error, Result};

/// Result of a tracked-nefness test.
#[derive(Clone, Debug)]
pub struct NefReport {
    pub nef: bool,
    /// Curves met negatively, with the offending products.
    pub violations: Vec<(String, Rat)>,
}

/// `D` is nef relative to the tracked curves when `D · C ≥ 0` for every
/// tracked curve `C`.
pub fn is_nef_tracked(model: &SurfaceModel, d: &DivisorClass) -> Result<NefReport> {
    model.check_divisor(d)?;
    let mut violations = Vec::new();
    for curve in model.curves() {
        let product = model.inner(d.coeffs(), &curve.class);
        if product < Rat::zero() {
            violations.push((curve.name.clone(), product));
        }
    }
    Ok(NefReport {
        nef: violations.is_empty(),
        violations,
    })
}

/// A Zariski decomposition `D = P + N`: the positive part is tracked-nef
/// and orthogonal to the support of the negative part, which is effective
/// with negative-definite Gram matrix.
#[derive(Clone, Debug)]
pub struct ZariskiDecomposition {
    pub p: DivisorClass,
    pub n: DivisorClass,
    /// Tracked curves carrying `N` with a nonzero (hence positive)
    /// coefficient.
    pub support: Vec<String>,
    /// Coefficients of `N` on its support.
    pub coefficients: Vec<(String, Rat)>,
}

/// Computes the Zariski decomposition of `D` relative to the tracked
/// curves. Signals [`Error::NotPseudoeffective`] when the accumulated
/// support fails to be negative definite or the negative part picks up a
/// negative coefficient.
pub fn zariski(model: &SurfaceModel, d: &DivisorClass) -> Result<ZariskiDecomposition> {
    model.check_divisor(d)?;
    let curves = model.curves();
    let mut support: Vec<usize> = Vec::new();

    loop {
        let gram: Vec<Vec<Rat>> = support
            .iter()
            .map(|&i| {
                support
                    .iter()
                    .map(|&j| model.inner(&curves[i].class, &curves[j].class))
                    .collect()
            })
            .collect();
        if !matrix::is_negative_definite(&gram) {
            return Err(Error::NotPseudoeffective);
        }
        let rhs: Vec<Rat> = support
            .iter()
            .map(|&i| model.inner(d.coeffs(), &curves[i].class))
            .collect();
        let n_coeffs = match matrix::solve(&gram, &rhs) {
            Some(c) => c,
            None => return Err(Error::NotPseudoeffective),
        };
        if n_coeffs.iter().any(|c| c < &Rat::zero()) {
            return Err(Error::NotPseudoeffective);
        }

        let mut n_vec = vec![Rat::zero(); model.rank()];
        for (&i, c) in support.iter().zip(&n_coeffs) {
            if c.is_zero() {
                continue;
            }
            for (acc, x) in n_vec.iter_mut().zip(&curves[i].class) {
                *acc += c * x;
            }
        }
        let p_vec: Vec<Rat> = d.coeffs().iter().zip(&n_vec).map(|(a, b)| a - b).collect();

        let mut grew = false;
        for (i, curve) in curves.iter().enumerate() {
            if support.contains(&i) {
                continue;
            }
            if model.inner(&p_vec, &curve.class) < Rat::zero() {
                support.push(i);
                grew = true;
            }
        }
        if grew {
            support.sort_unstable();
            continue;
        }

        let p = model.divisor(p_vec)?;
        let n = model.divisor(n_vec)?;
        let coefficients: Vec<(String, Rat)> = support
            .iter()
            .zip(&n_coeffs)
            .filter(|(_, c)| !c.is_zero())
            .map(|(&i, c)| (curves[i].name.clone(), c.clone()))
            .collect();
        let support = coefficients.iter().map(|(n, _)| n.clone()).collect();
        return Ok(ZariskiDecomposition {
            p,
            n,
            support,
            coefficients,
        });
    }
}

/// The volume of `D`: `P²` when the Zariski decomposition exists and its
/// positive part is big, and `0` otherwise. Non-pseudoeffective input
/// yields `0` rather than an error.
pub fn volume(model: &SurfaceModel, d: &DivisorClass) -> Result<Rat> {
    model.check_divisor(d)?;
    match zariski(model, d) {
        Ok(decomposition) => {
            let p2 = model.self_intersection(&decomposition.p)?;
            if p2 > Rat::zero() {
                Ok(p2)
            } else {
                Ok(Rat::zero())
            }
        }
        Err(Error::NotPseudoeffective) => Ok(Rat::zero()),
        Err(e) => Err(e),
    }
}

/// `D` is big exactly when its volume is positive.
pub fn is_big(model: &SurfaceModel, d: &DivisorClass) -> Result<bool> {
    Ok(volume(model, d)? > Rat::zero())
}
