//! Generalized polarized pairs: b-divisor traces, discrepancies,
//! glc/gklt classification and pair volumes.
//!
//! A pair consists of a carrier (a smooth model or a contraction target),
//! boundary coefficients on tracked curves, and a nef part living on the
//! top smooth model. The nef part on a contraction target is always the
//! pushforward of the one upstairs, pulled back numerically; the engine
//! never accepts an independent choice.

use std::collections::BTreeMap;

use num_traits::Zero;

use crate::divisors::Contraction;
use crate::lattice::{DivisorClass, SurfaceModel};
use crate::positivity::{is_nef_tracked, volume};
use crate::rat::{rint, Rat};
use crate::{Error, Result};

/// What a generalized pair lives on.
#[derive(Clone, Debug)]
pub enum Carrier {
    Smooth(SurfaceModel),
    Contracted(Contraction),
}

impl Carrier {
    /// The top smooth model: the model itself, or the contraction source.
    pub fn top_model(&self) -> &SurfaceModel {
        match self {
            Carrier::Smooth(model) => model,
            Carrier::Contracted(contraction) => contraction.source(),
        }
    }

    fn boundary_curve_names(&self) -> Vec<&str> {
        match self {
            Carrier::Smooth(model) => model.curves().iter().map(|c| c.name.as_str()).collect(),
            Carrier::Contracted(c) => c.target_curves().iter().map(|c| c.name.as_str()).collect(),
        }
    }
}

/// A generalized polarized pair: boundary coefficients on the carrier's
/// tracked curves, a tracked-nef class `M` on the top smooth model, and a
/// Cartier index `r` with `rM` integral.
#[derive(Clone, Debug)]
pub struct GenPair {
    carrier: Carrier,
    boundary: BTreeMap<String, Rat>,
    nef_part: DivisorClass,
    cartier_index: u32,
}

impl GenPair {
    pub fn new(
        carrier: Carrier,
        boundary: BTreeMap<String, Rat>,
        nef_part: DivisorClass,
        cartier_index: u32,
    ) -> Result<Self> {
        if cartier_index == 0 {
            return Err(Error::PreconditionUnmet(
                "Cartier index must be positive".to_string(),
            ));
        }
        let names = carrier.boundary_curve_names();
        for (name, coeff) in &boundary {
            if !names.contains(&name.as_str()) {
                return Err(Error::UnknownCurveName(name.clone()));
            }
            if coeff < &Rat::zero() {
                return Err(Error::PreconditionUnmet(format!(
                    "boundary coefficient of `{name}` must be nonnegative"
                )));
            }
        }
        let top = carrier.top_model();
        top.check_divisor(&nef_part)?;
        let report = is_nef_tracked(top, &nef_part)?;
        if !report.nef {
            return Err(Error::NotNef(
                report.violations.into_iter().map(|(n, _)| n).collect(),
            ));
        }
        if !nef_part.scale(&rint(cartier_index as i64)).is_integral() {
            return Err(Error::PreconditionUnmet(format!(
                "{cartier_index}·M must have integer coefficients"
            )));
        }
        Ok(GenPair {
            carrier,
            boundary,
            nef_part,
            cartier_index,
        })
    }

    pub fn carrier(&self) -> &Carrier {
        &self.carrier
    }

    pub fn boundary(&self) -> &BTreeMap<String, Rat> {
        &self.boundary
    }

    pub fn nef_part(&self) -> &DivisorClass {
        &self.nef_part
    }

    pub fn cartier_index(&self) -> u32 {
        self.cartier_index
    }
}

/// glc/gklt verdicts.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PairClass {
    Gklt,
    Glc,
    NotGlc,
}

impl PairClass {
    pub fn as_str(self) -> &'static str {
        match self {
            PairClass::Gklt => "gklt",
            PairClass::Glc => "glc",
            PairClass::NotGlc => "not_glc",
        }
    }
}

fn validate_base_boundary(model: &SurfaceModel, boundary: &BTreeMap<String, Rat>) -> Result<()> {
    for name in boundary.keys() {
        match model.curve(name) {
            Some(c) if !c.exceptional => {}
            _ => return Err(Error::UnknownCurveName(name.clone())),
        }
    }
    Ok(())
}

/// Coefficients of the log pullback `B_Y` on the prime tracked curves of
/// the tower, defined by `K_Y + B_Y = π*(K + B)`: the boundary keeps its
/// coefficients on strict transforms, and the exceptional curve over a
/// center of multiplicity `m` (computed with coefficients) appears with
/// coefficient `m - 1`.
pub fn log_pullback_coefficients(
    model: &SurfaceModel,
    boundary: &BTreeMap<String, Rat>,
) -> Result<Vec<(String, Rat)>> {
    validate_base_boundary(model, boundary)?;
    let base_curves = model.base().curves().len();
    let mut coeffs: Vec<(String, Rat)> = model.curves()[..base_curves]
        .iter()
        .map(|c| {
            let b = boundary.get(&c.name).cloned().unwrap_or_else(Rat::zero);
            (c.name.clone(), b)
        })
        .collect();

    for (j, center) in model.centers().iter().enumerate() {
        let mult: Rat = coeffs
            .iter()
            .map(|(name, coeff)| coeff * rint(center.multiplicity(name) as i64))
            .sum();
        let name = model.curves()[base_curves + j].name.clone();
        coeffs.push((name, mult - rint(1)));
    }
    Ok(coeffs)
}

/// Discrepancies of the tower exceptional curves with respect to the base
/// pair: `a_E = -coeff_E(B_Y)`.
pub fn tower_discrepancies(
    model: &SurfaceModel,
    boundary: &BTreeMap<String, Rat>,
) -> Result<Vec<(String, Rat)>> {
    let base_curves = model.base().curves().len();
    Ok(log_pullback_coefficients(model, boundary)?
        .into_iter()
        .skip(base_curves)
        .map(|(name, c)| (name, -c))
        .collect())
}

/// Trace of the b-divisor `M_B` on the tower: the strict transform of the
/// boundary plus the reduced exceptional divisor.
pub fn trace_mb(model: &SurfaceModel, boundary: &BTreeMap<String, Rat>) -> Result<DivisorClass> {
    validate_base_boundary(model, boundary)?;
    let mut acc = model.zero_divisor();
    for (name, coeff) in boundary {
        let class = model.curve_class(name)?;
        acc = &acc + &class.scale(coeff);
    }
    for curve in model.curves().iter().filter(|c| c.exceptional) {
        let class = model.curve_class(&curve.name)?;
        acc = &acc + &class;
    }
    Ok(acc)
}

/// Trace of the b-divisor `L_B` on the tower: the coefficient-wise
/// nonnegative part of the log pullback `B_Y`.
pub fn trace_lb(model: &SurfaceModel, boundary: &BTreeMap<String, Rat>) -> Result<DivisorClass> {
    let mut acc = model.zero_divisor();
    for (name, coeff) in log_pullback_coefficients(model, boundary)? {
        if coeff > Rat::zero() {
            acc = &acc + &model.curve_class(&name)?.scale(&coeff);
        }
    }
    Ok(acc)
}

/// Generalized discrepancies of the contracted curves: the coefficients
/// `a_i` in `K_X + f⁻¹₊B' + M = f*(K_{X'} + B' + M') + Σ aᵢEᵢ`, with
/// `M' = f₊M` and `f*` the numerical pullback. Solved exactly against the
/// negative-definite exceptional Gram matrix.
pub fn discrepancies(
    contraction: &Contraction,
    boundary: &BTreeMap<String, Rat>,
    nef_part: &DivisorClass,
) -> Result<Vec<(String, Rat)>> {
    let source = contraction.source();
    source.check_divisor(nef_part)?;
    let report = is_nef_tracked(source, nef_part)?;
    if !report.nef {
        return Err(Error::NotNef(
            report.violations.into_iter().map(|(n, _)| n).collect(),
        ));
    }
    for (name, coeff) in boundary {
        if !contraction.target_curves().iter().any(|c| &c.name == name) {
            return Err(Error::UnknownCurveName(name.clone()));
        }
        if coeff < &Rat::zero() {
            return Err(Error::PreconditionUnmet(format!(
                "boundary coefficient of `{name}` must be nonnegative"
            )));
        }
    }

    let mut lhs = source.canonical_class();
    for (name, coeff) in boundary {
        lhs = &lhs + &source.curve_class(name)?.scale(coeff);
    }
    lhs = &lhs + nef_part;

    let down = contraction.pushforward(&lhs)?;
    let lifted = contraction.numerical_pullback(&down)?;
    let exceptional_part = &lhs - &lifted;
    contraction.exceptional_coordinates(&exceptional_part)
}

/// Classifies a pair as gklt / glc / not glc.
///
/// On a contraction carrier the verdict is only sound when the source is
/// a log resolution of the target pair; without that assertion the engine
/// refuses to classify (the discrepancies themselves remain available).
pub fn classify(pair: &GenPair) -> Result<PairClass> {
    let mut worst = PairClass::Gklt;
    let mut observe = |gklt_ok: bool, glc_ok: bool| {
        if !glc_ok {
            worst = PairClass::NotGlc;
        } else if !gklt_ok && worst == PairClass::Gklt {
            worst = PairClass::Glc;
        }
    };

    for coeff in pair.boundary.values() {
        observe(coeff < &rint(1), coeff <= &rint(1));
    }
    if let Carrier::Contracted(contraction) = &pair.carrier {
        if !contraction.is_log_resolution() {
            return Err(Error::NotLogResolution);
        }
        for (_, a) in discrepancies(contraction, &pair.boundary, &pair.nef_part)? {
            observe(a > rint(-1), a >= rint(-1));
        }
    }
    Ok(worst)
}

/// The volume of `K + B + M` for the pair.
///
/// On a smooth carrier this is a direct Zariski volume. On a contraction
/// it is computed on the smooth source as
/// `vol(K_src + L_{B'} + f*(f₊M))`, where `L_{B'}` is the nonnegative part
/// of the numerical log pullback of `K' + B'`; both routes agree where
/// both apply.
pub fn pair_volume(pair: &GenPair) -> Result<Rat> {
    match &pair.carrier {
        Carrier::Smooth(model) => {
            let mut d = model.canonical_class();
            for (name, coeff) in &pair.boundary {
                d = &d + &model.curve_class(name)?.scale(coeff);
            }
            d = &d + &pair.nef_part;
            volume(model, &d)
        }
        Carrier::Contracted(contraction) => {
            let source = contraction.source();
            // Log pullback of K' + B' without the nef part.
            let zero_m = source.zero_divisor();
            let discs = discrepancies(contraction, &pair.boundary, &zero_m)?;

            let mut d = source.canonical_class();
            for (name, coeff) in &pair.boundary {
                d = &d + &source.curve_class(name)?.scale(coeff);
            }
            for (name, a) in discs {
                let clamped = -a;
                if clamped > Rat::zero() {
                    d = &d + &source.curve_class(&name)?.scale(&clamped);
                }
            }
            let m_prime = contraction.pushforward(&pair.nef_part)?;
            let m_lift = contraction.numerical_pullback(&m_prime)?;
            d = &d + &m_lift;
            volume(source, &d)
        }
    }
}

/// The finite DCC generator set `{1 - 1/n : 1 ≤ n ≤ max_n} ∪ extra`,
/// sorted and deduplicated. Membership in boundary-coefficient sets is a
/// property of instances, not of the engine, so it is exposed as a plain
/// predicate utility.
pub fn standard_dcc_set(max_n: u32, extra: &[Rat]) -> Vec<Rat> {
    let mut set: Vec<Rat> = (1..=max_n.max(1))
        .map(|n| rint(1) - Rat::new(1.into(), (n as i64).into()))
        .collect();
    set.extend_from_slice(extra);
    set.sort();
    set.dedup();
    set
}

pub fn in_dcc_set(set: &[Rat], x: &Rat) -> bool {
    set.contains(x)
}
