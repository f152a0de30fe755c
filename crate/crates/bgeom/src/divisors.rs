//! Divisor calculus along towers and contractions.
//!
//! A [`Contraction`] collapses a negative-definite set of tracked curves
//! on a smooth model. The target's class group is the quotient by the
//! contracted span; the numerical pullback is the unique linear section
//! landing in the orthogonal complement, which exists and is unique
//! because the exceptional Gram matrix is negative definite.

use num_traits::Zero;

use crate::lattice::{fresh_model_id, DivisorClass, ModelId, SurfaceModel, TrackedCurve};
use crate::matrix;
use crate::rat::{rint, Rat};
use crate::{Error, Result};

/// A smooth source model plus a negative-definite set of tracked curves
/// to contract. The target may be singular; its classes are tracked in a
/// quotient basis, with the Mumford intersection form induced by the
/// numerical pullback.
///
/// `is_log_resolution` is a user assertion that the source together with
/// its tracked curves is a log resolution of the target; the engine only
/// verifies the lattice-checkable necessary conditions.
#[derive(Clone, Debug)]
pub struct Contraction {
    source: SurfaceModel,
    contracted: Vec<String>,
    contracted_idx: Vec<usize>,
    exceptional_gram: Vec<Vec<Rat>>,
    target_id: ModelId,
    /// Indices of source basis vectors whose images form the quotient basis.
    quotient_basis: Vec<usize>,
    target_basis_names: Vec<String>,
    /// Numerical pullbacks of the quotient basis vectors.
    basis_lifts: Vec<Vec<Rat>>,
    target_gram: Vec<Vec<Rat>>,
    target_canonical: Vec<Rat>,
    target_curves: Vec<TrackedCurve>,
    is_log_resolution: bool,
}

impl Contraction {
    /// Builds a contraction of the named tracked curves.
    ///
    /// Fails with [`Error::SingularGram`] when the intersection matrix of
    /// the contracted curves is not negative definite, and with
    /// [`Error::DuplicateCurveName`] / [`Error::UnknownCurveName`] on bad
    /// name lists.
    pub fn new(
        source: &SurfaceModel,
        contracted: &[&str],
        is_log_resolution: bool,
    ) -> Result<Self> {
        let mut contracted_idx = Vec::with_capacity(contracted.len());
        for name in contracted {
            let idx = source
                .curves()
                .iter()
                .position(|c| &c.name == name)
                .ok_or_else(|| Error::UnknownCurveName(name.to_string()))?;
            if contracted_idx.contains(&idx) {
                return Err(Error::DuplicateCurveName(name.to_string()));
            }
            contracted_idx.push(idx);
        }

        let classes: Vec<&[Rat]> = contracted_idx
            .iter()
            .map(|&i| source.curves()[i].class.as_slice())
            .collect();
        let s = classes.len();
        let mut exceptional_gram = vec![vec![Rat::zero(); s]; s];
        for i in 0..s {
            for j in 0..s {
                exceptional_gram[i][j] = source.inner(classes[i], classes[j]);
            }
        }
        if !matrix::is_negative_definite(&exceptional_gram) {
            return Err(Error::SingularGram);
        }

        // Pick source basis vectors whose images span the quotient.
        let rank = source.rank();
        let mut span = matrix::RowSpace::new();
        for class in &classes {
            span.insert(class);
        }
        let mut quotient_basis = Vec::with_capacity(rank - s);
        for i in 0..rank {
            let mut unit = vec![Rat::zero(); rank];
            unit[i] = rint(1);
            if span.insert(&unit) {
                quotient_basis.push(i);
            }
        }
        debug_assert_eq!(quotient_basis.len(), rank - s);

        // Numerical pullback of each quotient basis vector: orthogonalize
        // the unit lift against the contracted span.
        let mut basis_lifts = Vec::with_capacity(quotient_basis.len());
        for &i in &quotient_basis {
            let mut unit = vec![Rat::zero(); rank];
            unit[i] = rint(1);
            let lift = orthogonalize(source, &exceptional_gram, &classes, unit)?;
            basis_lifts.push(lift);
        }

        let target_rank = quotient_basis.len();
        let mut target_gram = vec![vec![Rat::zero(); target_rank]; target_rank];
        for i in 0..target_rank {
            for j in 0..target_rank {
                target_gram[i][j] = source.inner(&basis_lifts[i], &basis_lifts[j]);
            }
        }

        let target_basis_names = quotient_basis
            .iter()
            .map(|&i| source.basis_names()[i].clone())
            .collect();

        let target_id = fresh_model_id();
        let mut contraction = Contraction {
            source: source.clone(),
            contracted: contracted.iter().map(|s| s.to_string()).collect(),
            contracted_idx,
            exceptional_gram,
            target_id,
            quotient_basis,
            target_basis_names,
            basis_lifts,
            target_gram,
            target_canonical: Vec::new(),
            target_curves: Vec::new(),
            is_log_resolution,
        };

        contraction.target_canonical = contraction
            .quotient_coordinates(source.canonical_class().coeffs())?
            .to_vec();
        contraction.target_curves = source
            .curves()
            .iter()
            .enumerate()
            .filter(|(i, _)| !contraction.contracted_idx.contains(i))
            .map(|(_, c)| {
                Ok(TrackedCurve {
                    name: c.name.clone(),
                    class: contraction.quotient_coordinates(&c.class)?,
                    exceptional: c.exceptional,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(contraction)
    }

    pub fn source(&self) -> &SurfaceModel {
        &self.source
    }

    pub fn contracted(&self) -> &[String] {
        &self.contracted
    }

    pub fn is_log_resolution(&self) -> bool {
        self.is_log_resolution
    }

    pub fn target_id(&self) -> ModelId {
        self.target_id
    }

    pub fn target_rank(&self) -> usize {
        self.quotient_basis.len()
    }

    pub fn target_basis_names(&self) -> &[String] {
        &self.target_basis_names
    }

    /// Pushforwards of the non-contracted tracked curves, in target
    /// coordinates, keeping their source names.
    pub fn target_curves(&self) -> &[TrackedCurve] {
        &self.target_curves
    }

    pub fn target_curve_class(&self, name: &str) -> Result<DivisorClass> {
        let c = self
            .target_curves
            .iter()
            .find(|c| c.name == name)
            .ok_or_else(|| Error::UnknownCurveName(name.to_string()))?;
        Ok(DivisorClass::new(self.target_id, c.class.clone()))
    }

    /// The numerical canonical class of the target (pushforward of the
    /// source canonical class).
    pub fn target_canonical_class(&self) -> DivisorClass {
        DivisorClass::new(self.target_id, self.target_canonical.clone())
    }

    pub fn target_divisor(&self, coeffs: Vec<Rat>) -> Result<DivisorClass> {
        if coeffs.len() != self.target_rank() {
            return Err(Error::ModelMismatch);
        }
        Ok(DivisorClass::new(self.target_id, coeffs))
    }

    pub fn target_zero(&self) -> DivisorClass {
        DivisorClass::new(self.target_id, vec![Rat::zero(); self.target_rank()])
    }

    /// Gram matrix of the contracted curves.
    pub fn exceptional_gram(&self) -> &[Vec<Rat>] {
        &self.exceptional_gram
    }

    /// Mumford intersection form on the target, i.e. the form of the
    /// numerical pullbacks of the quotient basis.
    pub fn mumford_gram(&self) -> &[Vec<Rat>] {
        &self.target_gram
    }

    /// Mumford intersection product of two target classes.
    pub fn target_intersect(&self, d1: &DivisorClass, d2: &DivisorClass) -> Result<Rat> {
        self.check_target_divisor(d1)?;
        self.check_target_divisor(d2)?;
        Ok(matrix::form(&self.target_gram, d1.coeffs(), d2.coeffs()))
    }

    pub fn check_target_divisor(&self, d: &DivisorClass) -> Result<()> {
        if d.model_id() != self.target_id || d.coeffs().len() != self.target_rank() {
            return Err(Error::ModelMismatch);
        }
        Ok(())
    }

    fn quotient_coordinates(&self, source_class: &[Rat]) -> Result<Vec<Rat>> {
        let rank = self.source.rank();
        let mut cols: Vec<Vec<Rat>> = self
            .contracted_idx
            .iter()
            .map(|&i| self.source.curves()[i].class.clone())
            .collect();
        for &i in &self.quotient_basis {
            let mut unit = vec![Rat::zero(); rank];
            unit[i] = rint(1);
            cols.push(unit);
        }
        let solution = matrix::solve_in_span(&cols, source_class)
            .ok_or_else(|| Error::Internal("quotient coordinates must exist".to_string()))?;
        Ok(solution[self.contracted_idx.len()..].to_vec())
    }

    /// Pushforward: coordinates of the class in the quotient by the
    /// contracted span. Linear, surjective, and a left inverse of the
    /// numerical pullback.
    pub fn pushforward(&self, d: &DivisorClass) -> Result<DivisorClass> {
        self.source.check_divisor(d)?;
        Ok(DivisorClass::new(
            self.target_id,
            self.quotient_coordinates(d.coeffs())?,
        ))
    }

    /// Numerical pullback: the unique lift intersecting every contracted
    /// curve trivially.
    pub fn numerical_pullback(&self, d: &DivisorClass) -> Result<DivisorClass> {
        self.check_target_divisor(d)?;
        let rank = self.source.rank();
        let mut coeffs = vec![Rat::zero(); rank];
        for (c, lift) in d.coeffs().iter().zip(&self.basis_lifts) {
            if c.is_zero() {
                continue;
            }
            for (acc, l) in coeffs.iter_mut().zip(lift) {
                *acc += c * l;
            }
        }
        Ok(DivisorClass::new(self.source.id(), coeffs))
    }

    /// Expresses a class supported on the contracted curves in terms of
    /// them. Fails with [`Error::NotExceptional`] when the pushforward of
    /// `d` is nonzero.
    pub fn exceptional_coordinates(&self, d: &DivisorClass) -> Result<Vec<(String, Rat)>> {
        self.source.check_divisor(d)?;
        if !self.pushforward(d)?.is_zero() {
            return Err(Error::NotExceptional);
        }
        let products: Vec<Rat> = self
            .contracted_idx
            .iter()
            .map(|&i| {
                self.source
                    .inner(d.coeffs(), &self.source.curves()[i].class)
            })
            .collect();
        let coords = matrix::solve(&self.exceptional_gram, &products).ok_or(Error::SingularGram)?;
        Ok(self.contracted.iter().cloned().zip(coords).collect())
    }
}

fn orthogonalize(
    source: &SurfaceModel,
    exceptional_gram: &[Vec<Rat>],
    classes: &[&[Rat]],
    lift: Vec<Rat>,
) -> Result<Vec<Rat>> {
    if classes.is_empty() {
        return Ok(lift);
    }
    let rhs: Vec<Rat> = classes.iter().map(|c| -source.inner(&lift, c)).collect();
    let correction = matrix::solve(exceptional_gram, &rhs).ok_or(Error::SingularGram)?;
    let mut out = lift;
    for (a, class) in correction.iter().zip(classes) {
        if a.is_zero() {
            continue;
        }
        for (o, c) in out.iter_mut().zip(*class) {
            *o += a * c;
        }
    }
    Ok(out)
}

/// The class of the iterated strict transform of a tracked base curve on
/// the top model of the tower.
pub fn strict_transform(model: &SurfaceModel, base_curve: &str) -> Result<DivisorClass> {
    match model.curve(base_curve) {
        Some(c) if !c.exceptional => model.curve_class(base_curve),
        _ => Err(Error::UnknownCurveName(base_curve.to_string())),
    }
}

/// Outcome of a Negativity Lemma instance check, for a class supported on
/// the contracted curves.
///
/// Convention: the hypothesis is `D · E_k ≥ 0` for every contracted curve
/// `E_k`; the conclusion is that `-D` is effective, i.e. every coefficient
/// of `D` on the contracted curves is `≤ 0`.
#[derive(Clone, Debug)]
pub struct NegativityCheck {
    /// `D · E_k` for each contracted curve.
    pub products: Vec<(String, Rat)>,
    /// Coefficients of `D` on the contracted curves.
    pub coefficients: Vec<(String, Rat)>,
    /// Whether `D · E_k ≥ 0` held for every contracted curve.
    pub hypothesis_met: bool,
    /// `Some(true)` when the hypothesis held and `-D ≥ 0` was verified;
    /// `None` when the hypothesis failed (the lemma asserts nothing).
    pub conclusion: Option<bool>,
}

/// Checks one instance of the Negativity Lemma on a contraction. The
/// conclusion can never come out false for valid inputs; if it did, an
/// internal consistency error is raised.
pub fn check_negativity(contraction: &Contraction, d: &DivisorClass) -> Result<NegativityCheck> {
    let coefficients = contraction.exceptional_coordinates(d)?;
    let products: Vec<(String, Rat)> = contraction
        .contracted_idx
        .iter()
        .zip(&contraction.contracted)
        .map(|(&i, name)| {
            (
                name.clone(),
                contraction
                    .source
                    .inner(d.coeffs(), &contraction.source.curves()[i].class),
            )
        })
        .collect();
    let hypothesis_met = products.iter().all(|(_, p)| !(p < &Rat::zero()));
    let conclusion = if hypothesis_met {
        let nonpositive = coefficients.iter().all(|(_, c)| !(c > &Rat::zero()));
        if !nonpositive {
            return Err(Error::Internal(
                "Negativity Lemma conclusion failed on a valid instance".to_string(),
            ));
        }
        Some(true)
    } else {
        None
    };
    Ok(NegativityCheck {
        products,
        coefficients,
        hypothesis_met,
        conclusion,
    })
}
