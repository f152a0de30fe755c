//! Picard lattices of base surfaces and blow-up towers.
//!
//! A [`SurfaceModel`] is a base surface together with an ordered list of
//! blow-up centers. Classes live in the total-transform basis: the
//! pullbacks of the base generators followed by the total transforms
//! `e₁ … e_k` of the exceptional divisors, one per center. In this basis
//! the Gram matrix is the orthogonal sum of the base form and `-I`, so
//! pullback along the tower is coordinate inclusion. Strict transforms
//! are derived curve classes, never basis vectors.

use std::collections::BTreeMap;
use std::ops::{Add, Neg, Sub};
use std::sync::atomic::{AtomicU64, Ordering};

use num_traits::Zero;

use crate::matrix;
use crate::rat::{rint, Rat};
use crate::{Error, Result};

static NEXT_MODEL_ID: AtomicU64 = AtomicU64::new(1);

/// Opaque identity of a model's coordinate system. Divisor classes carry
/// it so that cross-model arithmetic is rejected instead of silently
/// mixing bases.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct ModelId(u64);

pub(crate) fn fresh_model_id() -> ModelId {
    ModelId(NEXT_MODEL_ID.fetch_add(1, Ordering::Relaxed))
}

/// A base surface given purely by lattice data: a nondegenerate symmetric
/// intersection form of signature `(1, rank-1)`, the canonical class, and
/// a list of tracked irreducible curves.
///
/// Geometric realizability of raw data is the caller's responsibility;
/// only the lattice-checkable invariants are enforced.
#[derive(Clone, Debug)]
pub struct BaseSurface {
    name: String,
    basis_names: Vec<String>,
    gram: Vec<Vec<Rat>>,
    canonical: Vec<Rat>,
    curves: Vec<(String, Vec<Rat>)>,
    effective_cone_complete: bool,
}

impl BaseSurface {
    /// The projective plane: rank 1, `L² = 1`, `K = -3L`, tracked line `L`.
    pub fn p2() -> Self {
        BaseSurface {
            name: "P2".to_string(),
            basis_names: vec!["L".to_string()],
            gram: vec![vec![rint(1)]],
            canonical: vec![rint(-3)],
            curves: vec![("L".to_string(), vec![rint(1)])],
            effective_cone_complete: true,
        }
    }

    /// The Hirzebruch surface `F_n` in the basis (negative section `C0`,
    /// fibre `f`): `C0² = -n`, `C0·f = 1`, `f² = 0`, `K = -2C0 - (n+2)f`.
    pub fn hirzebruch(n: u32) -> Self {
        BaseSurface {
            name: format!("F{n}"),
            basis_names: vec!["C0".to_string(), "f".to_string()],
            gram: vec![vec![rint(-(n as i64)), rint(1)], vec![rint(1), rint(0)]],
            canonical: vec![rint(-2), rint(-(n as i64) - 2)],
            curves: vec![
                ("C0".to_string(), vec![rint(1), rint(0)]),
                ("f".to_string(), vec![rint(0), rint(1)]),
            ],
            effective_cone_complete: true,
        }
    }

    /// A geometrically ruled surface over a genus-one curve with invariant
    /// `e = n`, in the basis (section `C0` with `C0² = -n`, fibre `f`):
    /// `K = -2C0 - n·f`. For `n ≥ 1` contracting `C0` produces the cone
    /// over a degree-`n` elliptic normal curve.
    pub fn ruled_genus1(n: u32) -> Self {
        BaseSurface {
            name: format!("ruled1({n})"),
            basis_names: vec!["C0".to_string(), "f".to_string()],
            gram: vec![vec![rint(-(n as i64)), rint(1)], vec![rint(1), rint(0)]],
            canonical: vec![rint(-2), rint(-(n as i64))],
            curves: vec![
                ("C0".to_string(), vec![rint(1), rint(0)]),
                ("f".to_string(), vec![rint(0), rint(1)]),
            ],
            effective_cone_complete: true,
        }
    }

    /// A base surface from raw lattice data. Checks symmetry, Hodge-index
    /// signature `(1, rank-1)`, dimension agreement and name uniqueness.
    pub fn raw(
        name: &str,
        basis_names: Option<Vec<String>>,
        gram: Vec<Vec<Rat>>,
        canonical: Vec<Rat>,
        curves: Vec<(String, Vec<Rat>)>,
    ) -> Result<Self> {
        let rank = gram.len();
        if rank == 0 {
            return Err(Error::InvalidBase("rank must be positive".to_string()));
        }
        if !matrix::is_symmetric(&gram) {
            return Err(Error::InvalidBase(
                "intersection form must be a square symmetric matrix".to_string(),
            ));
        }
        if matrix::signature(&gram) != (1, rank - 1, 0) {
            return Err(Error::InvalidBase(format!(
                "intersection form must have signature (1, {})",
                rank - 1
            )));
        }
        if canonical.len() != rank {
            return Err(Error::InvalidBase(
                "canonical class length must equal the rank".to_string(),
            ));
        }
        let basis_names = match basis_names {
            Some(names) => {
                if names.len() != rank {
                    return Err(Error::InvalidBase(
                        "basis name count must equal the rank".to_string(),
                    ));
                }
                names
            }
            None => (1..=rank).map(|i| format!("b{i}")).collect(),
        };
        let mut seen_basis = std::collections::BTreeSet::new();
        for n in &basis_names {
            if !seen_basis.insert(n.clone()) {
                return Err(Error::DuplicateCurveName(n.clone()));
            }
        }
        // A curve may share its name with a basis vector (the line on P²);
        // tracked names win during resolution.
        let mut curve_names = std::collections::BTreeSet::new();
        for (cname, class) in &curves {
            if class.len() != rank {
                return Err(Error::InvalidBase(format!(
                    "curve `{cname}` class length must equal the rank"
                )));
            }
            if !curve_names.insert(cname.clone()) {
                return Err(Error::DuplicateCurveName(cname.clone()));
            }
        }
        Ok(BaseSurface {
            name: name.to_string(),
            basis_names,
            gram,
            canonical,
            curves,
            effective_cone_complete: false,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn rank(&self) -> usize {
        self.gram.len()
    }

    pub fn gram(&self) -> &[Vec<Rat>] {
        &self.gram
    }

    pub fn canonical(&self) -> &[Rat] {
        &self.canonical
    }

    pub fn basis_names(&self) -> &[String] {
        &self.basis_names
    }

    pub fn curves(&self) -> &[(String, Vec<Rat>)] {
        &self.curves
    }

    /// Whether the tracked curves of this base are hand-verified to
    /// generate the effective cone, making tracked-relative nefness and
    /// volumes exact. True for the shipped presets, false for raw data.
    pub fn effective_cone_complete(&self) -> bool {
        self.effective_cone_complete
    }
}

/// One blow-up center, described by the multiplicities of the tracked
/// curves passing through it (absent means multiplicity zero).
///
/// Exceptional curves are smooth, so their multiplicity is at most 1, and
/// at most two exceptional curves may meet the center.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BlowupCenter {
    multiplicities: BTreeMap<String, u32>,
}

impl BlowupCenter {
    pub fn new(multiplicities: BTreeMap<String, u32>) -> Self {
        let multiplicities = multiplicities.into_iter().filter(|(_, m)| *m > 0).collect();
        BlowupCenter { multiplicities }
    }

    /// A center away from every tracked curve.
    pub fn generic() -> Self {
        Self::default()
    }

    pub fn on(pairs: &[(&str, u32)]) -> Self {
        Self::new(pairs.iter().map(|(n, m)| (n.to_string(), *m)).collect())
    }

    pub fn multiplicity(&self, curve: &str) -> u32 {
        self.multiplicities.get(curve).copied().unwrap_or(0)
    }

    pub fn multiplicities(&self) -> &BTreeMap<String, u32> {
        &self.multiplicities
    }
}

/// A tracked irreducible curve on a model: its name, its class in the
/// model's basis and whether it is exceptional over the base.
#[derive(Clone, Debug, PartialEq)]
pub struct TrackedCurve {
    pub name: String,
    pub class: Vec<Rat>,
    pub exceptional: bool,
}

/// A divisor class: exact-rational coefficients in the basis of one model
/// (a [`SurfaceModel`] or a contraction target).
#[derive(Clone, Debug, PartialEq)]
pub struct DivisorClass {
    model: ModelId,
    coeffs: Vec<Rat>,
}

impl DivisorClass {
    pub(crate) fn new(model: ModelId, coeffs: Vec<Rat>) -> Self {
        DivisorClass { model, coeffs }
    }

    pub fn model_id(&self) -> ModelId {
        self.model
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn scale(&self, factor: &Rat) -> DivisorClass {
        DivisorClass {
            model: self.model,
            coeffs: self.coeffs.iter().map(|c| c * factor).collect(),
        }
    }

    /// Whether all coefficients are integers (the Cartier proxy used for
    /// `r·M` checks).
    pub fn is_integral(&self) -> bool {
        self.coeffs.iter().all(crate::rat::is_integer)
    }

    fn assert_same_model(&self, other: &DivisorClass) {
        assert_eq!(
            self.model, other.model,
            "divisor classes live on different models"
        );
    }
}

impl Add for &DivisorClass {
    type Output = DivisorClass;
    fn add(self, rhs: &DivisorClass) -> DivisorClass {
        self.assert_same_model(rhs);
        DivisorClass {
            model: self.model,
            coeffs: self
                .coeffs
                .iter()
                .zip(&rhs.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &DivisorClass {
    type Output = DivisorClass;
    fn sub(self, rhs: &DivisorClass) -> DivisorClass {
        self.assert_same_model(rhs);
        DivisorClass {
            model: self.model,
            coeffs: self
                .coeffs
                .iter()
                .zip(&rhs.coeffs)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl Neg for &DivisorClass {
    type Output = DivisorClass;
    fn neg(self) -> DivisorClass {
        DivisorClass {
            model: self.model,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

/// A base surface with an ordered tower of blow-ups, carrying the extended
/// intersection form, the canonical class and the strict transforms of all
/// tracked curves. Immutable after construction.
#[derive(Clone, Debug)]
pub struct SurfaceModel {
    id: ModelId,
    base: BaseSurface,
    centers: Vec<BlowupCenter>,
    basis_names: Vec<String>,
    gram: Vec<Vec<Rat>>,
    canonical: Vec<Rat>,
    curves: Vec<TrackedCurve>,
}

/// Builds a model from a base surface and a tower of centers.
///
/// Each center may only reference curves that exist at its stage; the
/// multiplicity of an exceptional curve must be 0 or 1, and at most two
/// exceptional curves may pass through one center.
pub fn build_model(base: BaseSurface, centers: Vec<BlowupCenter>) -> Result<SurfaceModel> {
    let names: Vec<String> = (1..=centers.len()).map(|i| format!("E{i}")).collect();
    build_model_named(base, centers, names)
}

pub(crate) fn build_model_named(
    base: BaseSurface,
    centers: Vec<BlowupCenter>,
    exceptional_names: Vec<String>,
) -> Result<SurfaceModel> {
    assert_eq!(centers.len(), exceptional_names.len());
    let base_rank = base.rank();
    let rank = base_rank + centers.len();

    let mut curves: Vec<TrackedCurve> = base
        .curves
        .iter()
        .map(|(name, class)| {
            let mut padded = class.clone();
            padded.resize(rank, Rat::zero());
            TrackedCurve {
                name: name.clone(),
                class: padded,
                exceptional: false,
            }
        })
        .collect();

    for e in &exceptional_names {
        if base.basis_names.contains(e) || base.curves.iter().any(|(n, _)| n == e) {
            return Err(Error::DuplicateCurveName(e.clone()));
        }
    }

    for (j, center) in centers.iter().enumerate() {
        let e_idx = base_rank + j;
        let mut exceptional_hits = 0usize;
        for (cname, &mult) in center.multiplicities() {
            let curve = curves
                .iter()
                .find(|c| &c.name == cname)
                .ok_or_else(|| Error::UnknownCurveName(cname.clone()))?;
            if curve.exceptional {
                if mult > 1 {
                    return Err(Error::InvalidMultiplicity {
                        center: j,
                        reason: format!(
                            "exceptional curve `{cname}` is smooth; multiplicity {mult} > 1"
                        ),
                    });
                }
                exceptional_hits += 1;
            }
        }
        if exceptional_hits > 2 {
            return Err(Error::InvalidMultiplicity {
                center: j,
                reason: format!(
                    "{exceptional_hits} exceptional curves through one center breaks the \
                     simple normal crossing configuration"
                ),
            });
        }
        for curve in curves.iter_mut() {
            let mult = center.multiplicity(&curve.name);
            if mult > 0 {
                curve.class[e_idx] = &curve.class[e_idx] - &rint(mult as i64);
            }
        }
        let mut class = vec![Rat::zero(); rank];
        class[e_idx] = rint(1);
        curves.push(TrackedCurve {
            name: exceptional_names[j].clone(),
            class,
            exceptional: true,
        });
    }

    // Extended form: orthogonal sum of the base form and -I.
    let mut gram = vec![vec![Rat::zero(); rank]; rank];
    for i in 0..base_rank {
        for j in 0..base_rank {
            gram[i][j] = base.gram[i][j].clone();
        }
    }
    for i in base_rank..rank {
        gram[i][i] = rint(-1);
    }

    // K = pullback of the base canonical class plus the total transforms.
    let mut canonical = base.canonical.clone();
    canonical.resize(rank, Rat::zero());
    for c in canonical.iter_mut().skip(base_rank) {
        *c = rint(1);
    }

    let mut basis_names: Vec<String> = if centers.is_empty() {
        base.basis_names.clone()
    } else {
        base.basis_names.iter().map(|n| format!("pi{n}")).collect()
    };
    basis_names.extend(exceptional_names.iter().cloned());

    Ok(SurfaceModel {
        id: fresh_model_id(),
        base,
        centers,
        basis_names,
        gram,
        canonical,
        curves,
    })
}

impl SurfaceModel {
    pub fn id(&self) -> ModelId {
        self.id
    }

    pub fn rank(&self) -> usize {
        self.gram.len()
    }

    pub fn base(&self) -> &BaseSurface {
        &self.base
    }

    pub fn centers(&self) -> &[BlowupCenter] {
        &self.centers
    }

    /// Number of blow-ups in the tower.
    pub fn depth(&self) -> usize {
        self.centers.len()
    }

    pub fn gram(&self) -> &[Vec<Rat>] {
        &self.gram
    }

    pub fn basis_names(&self) -> &[String] {
        &self.basis_names
    }

    pub fn curves(&self) -> &[TrackedCurve] {
        &self.curves
    }

    pub fn curve(&self, name: &str) -> Option<&TrackedCurve> {
        self.curves.iter().find(|c| c.name == name)
    }

    /// The class of a tracked curve as a divisor.
    pub fn curve_class(&self, name: &str) -> Result<DivisorClass> {
        let curve = self
            .curve(name)
            .ok_or_else(|| Error::UnknownCurveName(name.to_string()))?;
        Ok(DivisorClass::new(self.id, curve.class.clone()))
    }

    /// The canonical class `K = π*K_base + Σ eᵢ`.
    pub fn canonical_class(&self) -> DivisorClass {
        DivisorClass::new(self.id, self.canonical.clone())
    }

    pub fn zero_divisor(&self) -> DivisorClass {
        DivisorClass::new(self.id, vec![Rat::zero(); self.rank()])
    }

    /// Wraps coefficients as a divisor class on this model.
    pub fn divisor(&self, coeffs: Vec<Rat>) -> Result<DivisorClass> {
        if coeffs.len() != self.rank() {
            return Err(Error::ModelMismatch);
        }
        Ok(DivisorClass::new(self.id, coeffs))
    }

    /// Integer-coefficient convenience wrapper.
    pub fn divisor_i64(&self, coeffs: &[i64]) -> Result<DivisorClass> {
        self.divisor(coeffs.iter().map(|&c| rint(c)).collect())
    }

    /// Pullback of a base class along the whole tower: coordinate
    /// inclusion in the total-transform basis.
    pub fn include_from_base(&self, base_class: &[Rat]) -> Result<DivisorClass> {
        if base_class.len() != self.base.rank() {
            return Err(Error::ModelMismatch);
        }
        let mut coeffs = base_class.to_vec();
        coeffs.resize(self.rank(), Rat::zero());
        Ok(DivisorClass::new(self.id, coeffs))
    }

    /// Verifies that a divisor belongs to this model.
    pub fn check_divisor(&self, d: &DivisorClass) -> Result<()> {
        if d.model != self.id || d.coeffs.len() != self.rank() {
            return Err(Error::ModelMismatch);
        }
        Ok(())
    }

    pub(crate) fn inner(&self, a: &[Rat], b: &[Rat]) -> Rat {
        matrix::form(&self.gram, a, b)
    }

    /// Exact intersection product `D1 · D2`.
    pub fn intersect(&self, d1: &DivisorClass, d2: &DivisorClass) -> Result<Rat> {
        self.check_divisor(d1)?;
        self.check_divisor(d2)?;
        Ok(self.inner(&d1.coeffs, &d2.coeffs))
    }

    pub fn self_intersection(&self, d: &DivisorClass) -> Result<Rat> {
        self.intersect(d, d)
    }

    /// Signature `(n₊, n₋, n₀)` of the extended Gram matrix; `(1, rank-1, 0)`
    /// for every buildable model by the Hodge index theorem.
    pub fn signature(&self) -> (usize, usize, usize) {
        matrix::signature(&self.gram)
    }

    /// The model truncated to its first `depth` blow-ups.
    pub fn truncate(&self, depth: usize) -> Result<SurfaceModel> {
        if depth > self.depth() {
            return Err(Error::PreconditionUnmet(format!(
                "cannot truncate a depth-{} tower at {}",
                self.depth(),
                depth
            )));
        }
        let names = self.basis_names[self.base.rank()..self.base.rank() + depth].to_vec();
        build_model_named(self.base.clone(), self.centers[..depth].to_vec(), names)
    }

    /// Pushforward along the tower truncation at `depth`: the first
    /// `base rank + depth` coordinates of the class.
    pub fn pushforward_to_truncation(
        &self,
        truncated: &SurfaceModel,
        d: &DivisorClass,
    ) -> Result<DivisorClass> {
        self.check_divisor(d)?;
        if truncated.base.rank() != self.base.rank() || truncated.depth() > self.depth() {
            return Err(Error::ModelMismatch);
        }
        Ok(DivisorClass::new(
            truncated.id,
            d.coeffs[..truncated.rank()].to_vec(),
        ))
    }

    /// Replaces the exceptional markers of the tracked curves, keeping
    /// their order. Used when a blow-down rebuilds a model from raw data,
    /// which cannot tell transported exceptional curves apart.
    pub(crate) fn with_exceptional_flags(mut self, flags: &[bool]) -> SurfaceModel {
        assert_eq!(flags.len(), self.curves.len());
        for (c, &f) in self.curves.iter_mut().zip(flags) {
            c.exceptional = f;
        }
        self
    }

    /// Resolves a name to a class: tracked curves first, then basis
    /// vectors. On a depth-1 tower the bare name `E` resolves to the
    /// unique exceptional curve, and `K` resolves to the canonical class
    /// unless shadowed by a tracked curve.
    pub fn resolve_name(&self, name: &str) -> Option<DivisorClass> {
        if let Some(c) = self.curve(name) {
            return Some(DivisorClass::new(self.id, c.class.clone()));
        }
        if let Some(idx) = self.basis_names.iter().position(|n| n == name) {
            let mut coeffs = vec![Rat::zero(); self.rank()];
            coeffs[idx] = rint(1);
            return Some(DivisorClass::new(self.id, coeffs));
        }
        if name == "E" {
            let mut exceptional = self.curves.iter().filter(|c| c.exceptional);
            if let (Some(e), None) = (exceptional.next(), exceptional.next()) {
                return Some(DivisorClass::new(self.id, e.class.clone()));
            }
        }
        if name == "K" {
            return Some(self.canonical_class());
        }
        None
    }
}
