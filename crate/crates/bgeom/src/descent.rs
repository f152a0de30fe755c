//! Descent of nef divisor classes along birational morphisms of smooth
//! surfaces: the blow-up nef criterion, contraction of `(-1)`-curves, and
//! the structure algorithm that blows down every exceptional `(-1)`-curve
//! the class meets trivially.

use num_traits::Zero;

use crate::lattice::{build_model_named, BlowupCenter, DivisorClass, ModelId, SurfaceModel};
use crate::matrix;
use crate::positivity::is_nef_tracked;
use crate::rat::{rint, Rat};
use crate::{Error, Result};

/// Tests whether the pullback of a nef class minus the new exceptional
/// divisor stays nef after blowing up `center`: this holds exactly when
/// `M · C ≥ mult_center(C)` for every tracked curve `C`.
///
/// Both the multiplicity criterion and the direct nefness test on the
/// blown-up model are evaluated; a disagreement would be an engine bug
/// and raises [`Error::CriterionMismatch`].
pub fn blowup_nef_criterion(
    model: &SurfaceModel,
    m: &DivisorClass,
    center: &BlowupCenter,
) -> Result<bool> {
    model.check_divisor(m)?;
    let report = is_nef_tracked(model, m)?;
    if !report.nef {
        return Err(Error::NotNef(
            report.violations.into_iter().map(|(n, _)| n).collect(),
        ));
    }

    let mut by_multiplicity = true;
    for curve in model.curves() {
        let mult = rint(center.multiplicity(&curve.name) as i64);
        if model.inner(m.coeffs(), &curve.class) < mult {
            by_multiplicity = false;
            break;
        }
    }

    let mut centers = model.centers().to_vec();
    centers.push(center.clone());
    let mut names: Vec<String> = model.basis_names()[model.base().rank()..].to_vec();
    names.push(next_exceptional_name(model));
    let blown_up = build_model_named(model.base().clone(), centers, names)?;
    let mut coeffs = m.coeffs().to_vec();
    coeffs.push(rint(-1));
    let candidate = blown_up.divisor(coeffs)?;
    let direct = is_nef_tracked(&blown_up, &candidate)?.nef;

    if direct != by_multiplicity {
        return Err(Error::CriterionMismatch(format!(
            "multiplicity criterion says {by_multiplicity}, direct nefness says {direct}"
        )));
    }
    Ok(by_multiplicity)
}

fn next_exceptional_name(model: &SurfaceModel) -> String {
    let mut k = model.depth() + 1;
    loop {
        let name = format!("E{k}");
        if model.curve(&name).is_none() && !model.basis_names().contains(&name) {
            return name;
        }
        k += 1;
    }
}

/// A single blow-down of a tracked `(-1)`-curve, with its class-transport
/// map `D ↦ D + (D·E)E` expressed in target coordinates.
#[derive(Clone, Debug)]
pub struct BlowDown {
    target: SurfaceModel,
    source_id: ModelId,
    contracted: String,
    /// Index of the removed tower center when the contracted curve was a
    /// pure exceptional basis vector.
    removed_center: Option<usize>,
    /// Class of the contracted curve on the source.
    curve_class: Vec<Rat>,
    /// Source classes of the target basis (tower surgery keeps the
    /// surviving basis vectors; the raw path picks projected units).
    target_basis_in_source: Vec<Vec<Rat>>,
    source_gram: Vec<Vec<Rat>>,
}

impl BlowDown {
    pub fn target(&self) -> &SurfaceModel {
        &self.target
    }

    pub fn contracted_curve(&self) -> &str {
        &self.contracted
    }

    pub fn removed_center(&self) -> Option<usize> {
        self.removed_center
    }

    /// Transports a class to the blown-down model: the orthogonal
    /// projection `D + (D·E)E` written in the target basis.
    pub fn transport(&self, d: &DivisorClass) -> Result<DivisorClass> {
        if d.model_id() != self.source_id {
            return Err(Error::ModelMismatch);
        }
        let de = matrix::form(&self.source_gram, d.coeffs(), &self.curve_class);
        let mut projected = d.coeffs().to_vec();
        if !de.is_zero() {
            for (p, e) in projected.iter_mut().zip(&self.curve_class) {
                *p += &de * e;
            }
        }
        let cols: Vec<Vec<Rat>> = self.target_basis_in_source.clone();
        let coords = matrix::solve_in_span(&cols, &projected).ok_or_else(|| {
            Error::Internal("projected class must lie in the target span".to_string())
        })?;
        self.target.divisor(coords)
    }
}

/// Contracts a tracked curve with `E² = -1` and `K·E = -1`.
///
/// When the curve is a pure exceptional basis vector the tower simply
/// loses that center; otherwise the target is rebuilt as a raw base on a
/// basis of the orthogonal complement.
pub fn contract_minus_one_curve(model: &SurfaceModel, name: &str) -> Result<BlowDown> {
    let curve = model
        .curve(name)
        .ok_or_else(|| Error::UnknownCurveName(name.to_string()))?
        .clone();
    let e = model.curve_class(name)?;
    let e2 = model.self_intersection(&e)?;
    if e2 != rint(-1) {
        return Err(Error::NotMinusOneCurve {
            name: name.to_string(),
            reason: format!("self-intersection is {e2}"),
        });
    }
    let ke = model.intersect(&model.canonical_class(), &e)?;
    if ke != rint(-1) {
        return Err(Error::NotMinusOneCurve {
            name: name.to_string(),
            reason: format!("K·E is {ke}"),
        });
    }

    let base_rank = model.base().rank();
    let rank = model.rank();

    // Pure basis vector e_i: tower surgery.
    let basis_position = (base_rank..rank).find(|&i| {
        curve.class[i] == rint(1)
            && curve
                .class
                .iter()
                .enumerate()
                .all(|(j, c)| j == i || c.is_zero())
    });
    if let Some(i) = basis_position {
        let center_idx = i - base_rank;
        let mut centers = model.centers().to_vec();
        centers.remove(center_idx);
        let mut names: Vec<String> = model.basis_names()[base_rank..].to_vec();
        names.remove(center_idx);
        let target = build_model_named(model.base().clone(), centers, names)?;
        let target_basis_in_source = (0..rank)
            .filter(|&j| j != i)
            .map(|j| {
                let mut unit = vec![Rat::zero(); rank];
                unit[j] = rint(1);
                unit
            })
            .collect();
        return Ok(BlowDown {
            target,
            source_id: model.id(),
            contracted: name.to_string(),
            removed_center: Some(center_idx),
            curve_class: curve.class.clone(),
            target_basis_in_source,
            source_gram: model.gram().to_vec(),
        });
    }

    // General (-1)-curve: build the orthogonal complement as a raw base.
    let project = |v: &[Rat]| -> Vec<Rat> {
        let ve = matrix::form(model.gram(), v, &curve.class);
        v.iter()
            .zip(&curve.class)
            .map(|(x, e)| x + &ve * e)
            .collect()
    };
    let mut span = matrix::RowSpace::new();
    let mut chosen: Vec<Vec<Rat>> = Vec::new();
    let mut chosen_names: Vec<String> = Vec::new();
    for j in 0..rank {
        let mut unit = vec![Rat::zero(); rank];
        unit[j] = rint(1);
        let p = project(&unit);
        if span.insert(&p) {
            chosen.push(p);
            chosen_names.push(model.basis_names()[j].clone());
        }
    }
    debug_assert_eq!(chosen.len(), rank - 1);

    let target_rank = chosen.len();
    let mut gram = vec![vec![Rat::zero(); target_rank]; target_rank];
    for a in 0..target_rank {
        for b in 0..target_rank {
            gram[a][b] = matrix::form(model.gram(), &chosen[a], &chosen[b]);
        }
    }
    let in_target = |v: &[Rat]| -> Result<Vec<Rat>> {
        matrix::solve_in_span(&chosen, &project(v))
            .ok_or_else(|| Error::Internal("projection must land in the chosen span".to_string()))
    };
    let canonical = in_target(model.canonical_class().coeffs())?;
    let curves = model
        .curves()
        .iter()
        .filter(|c| c.name != name)
        .map(|c| Ok((c.name.clone(), in_target(&c.class)?)))
        .collect::<Result<Vec<_>>>()?;
    let survivors: Vec<bool> = model
        .curves()
        .iter()
        .filter(|c| c.name != name)
        .map(|c| c.exceptional)
        .collect();
    let base = crate::lattice::BaseSurface::raw(
        &format!("{}/({})", model.base().name(), name),
        Some(chosen_names),
        gram,
        canonical,
        curves,
    )?;
    let target = build_model_named(base, vec![], vec![])?;
    // Raw bases lose the exceptional markers; restore them.
    let target = target.with_exceptional_flags(&survivors);

    Ok(BlowDown {
        target,
        source_id: model.id(),
        contracted: name.to_string(),
        removed_center: None,
        curve_class: curve.class,
        target_basis_in_source: chosen,
        source_gram: model.gram().to_vec(),
    })
}

/// Result of descending a nef class down a tower: the intermediate model
/// between the top and the base, the descended class, and the contraction
/// log.
#[derive(Clone, Debug)]
pub struct DescentResult {
    pub intermediate_model: SurfaceModel,
    pub m_prime: DivisorClass,
    pub contractions_performed: Vec<String>,
    /// Blow-ups remaining between the base and the intermediate model.
    pub blowup_count: usize,
    /// Original tower indices of the retained centers.
    pub kept_centers: Vec<usize>,
    /// The bound `M² - M_Y²` the count is measured against; the count may
    /// be strictly smaller.
    pub drop_bound: Rat,
}

/// Descends a tracked-nef integral class `M_Y` on a tower by repeatedly
/// contracting exceptional `(-1)`-curves met trivially, until every
/// remaining exceptional `(-1)`-curve is met positively.
///
/// The output satisfies, and this function verifies: the pullback of the
/// descended class equals `M_Y`; its pushforward to the base equals that
/// of `M_Y`; the number of retained blow-ups is at most `M² - M_Y²`; and
/// every surviving exceptional `(-1)`-curve is met positively.
pub fn descend_nef(model: &SurfaceModel, m: &DivisorClass) -> Result<DescentResult> {
    model.check_divisor(m)?;
    let report = is_nef_tracked(model, m)?;
    if !report.nef {
        return Err(Error::NotNef(
            report.violations.into_iter().map(|(n, _)| n).collect(),
        ));
    }
    if !m.is_integral() {
        return Err(Error::PreconditionUnmet(
            "descent requires an integral (Cartier) class".to_string(),
        ));
    }

    let base_rank = model.base().rank();
    let mut current = model.clone();
    let mut m_cur = m.clone();
    let mut kept: Vec<usize> = (0..model.depth()).collect();
    let mut contracted_names = Vec::new();

    loop {
        let eligible = current.curves().iter().find_map(|c| {
            if !c.exceptional {
                return None;
            }
            let product = current.inner(m_cur.coeffs(), &c.class);
            let is_unit = (base_rank..current.rank()).any(|i| {
                c.class[i] == rint(1)
                    && c.class
                        .iter()
                        .enumerate()
                        .all(|(j, x)| j == i || x.is_zero())
            });
            (is_unit && product.is_zero()).then(|| c.name.clone())
        });
        let Some(name) = eligible else { break };
        let blow_down = contract_minus_one_curve(&current, &name)?;
        let center = blow_down
            .removed_center()
            .ok_or_else(|| Error::Internal("descent contracts tower centers only".to_string()))?;
        m_cur = blow_down.transport(&m_cur)?;
        current = blow_down.target().clone();
        kept.remove(center);
        contracted_names.push(name);
    }

    // Invariants of the descent output; a failure here is an engine bug.
    let m_base: Vec<Rat> = m.coeffs()[..base_rank].to_vec();
    let mut lifted = vec![Rat::zero(); model.rank()];
    lifted[..base_rank].clone_from_slice(&m_base);
    for (pos, &orig) in kept.iter().enumerate() {
        lifted[base_rank + orig] = m_cur.coeffs()[base_rank + pos].clone();
    }
    if &lifted != m.coeffs() {
        return Err(Error::Internal(
            "pullback of the descended class must equal the input".to_string(),
        ));
    }
    if m_cur.coeffs()[..base_rank] != m_base {
        return Err(Error::Internal(
            "pushforward to the base must be preserved".to_string(),
        ));
    }
    let m2_base = matrix::form(model.base().gram(), &m_base, &m_base);
    let m2_top = model.self_intersection(m)?;
    let drop = &m2_base - &m2_top;
    if rint(kept.len() as i64) > drop {
        return Err(Error::Internal(
            "retained blow-up count exceeds the self-intersection drop".to_string(),
        ));
    }
    // On a tower every exceptional (-1)-curve is a pure basis vector, so
    // restricting to unit form checks exactly the curves descent acts on.
    for c in current.curves() {
        if !c.exceptional {
            continue;
        }
        let is_unit = (base_rank..current.rank()).any(|i| {
            c.class[i] == rint(1)
                && c.class
                    .iter()
                    .enumerate()
                    .all(|(j, x)| j == i || x.is_zero())
        });
        if is_unit && !(current.inner(m_cur.coeffs(), &c.class) > Rat::zero()) {
            return Err(Error::Internal(format!(
                "terminal model keeps `{}` with trivial product",
                c.name
            )));
        }
    }

    Ok(DescentResult {
        intermediate_model: current,
        m_prime: m_cur,
        contractions_performed: contracted_names,
        blowup_count: kept.len(),
        kept_centers: kept,
        drop_bound: drop,
    })
}

/// Asserts that the pushforward of a tracked-nef class stays tracked-nef
/// on every tower truncation. Returns `true`; a violation would be an
/// internal error (this is a property-test hook, the statement is a
/// theorem for smooth surfaces).
pub fn check_pushforward_nef_tower(model: &SurfaceModel, m: &DivisorClass) -> Result<bool> {
    model.check_divisor(m)?;
    let report = is_nef_tracked(model, m)?;
    if !report.nef {
        return Err(Error::NotNef(
            report.violations.into_iter().map(|(n, _)| n).collect(),
        ));
    }
    for depth in 0..model.depth() {
        let truncated = model.truncate(depth)?;
        let image = model.pushforward_to_truncation(&truncated, m)?;
        let down = is_nef_tracked(&truncated, &image)?;
        if !down.nef {
            return Err(Error::Internal(format!(
                "pushforward to depth {depth} lost nefness"
            )));
        }
    }
    Ok(true)
}

/// The blow-down analogue of [`check_pushforward_nef_tower`].
pub fn check_pushforward_nef_blowdown(blow_down: &BlowDown, m: &DivisorClass) -> Result<bool> {
    let image = blow_down.transport(m)?;
    let report = is_nef_tracked(blow_down.target(), &image)?;
    if !report.nef {
        return Err(Error::Internal(
            "pushforward along a (-1)-contraction lost nefness".to_string(),
        ));
    }
    Ok(true)
}

/// Verdict of a trivial-blow-up check.
#[derive(Clone, Debug)]
pub struct TrivialBlowupReport {
    pub holds: bool,
    /// An exceptional curve met nontrivially, when the check fails.
    pub witness: Option<String>,
}

/// For a tower whose centers all lie over a curve `C` met trivially by
/// the pushforward of a nef class `M'`, verifies that `M'` is trivial
/// against every exceptional curve, i.e. `M'` is the pullback of its
/// pushforward.
pub fn check_trivial_blowup(
    model: &SurfaceModel,
    curve: &str,
    m_top: &DivisorClass,
) -> Result<TrivialBlowupReport> {
    model.check_divisor(m_top)?;
    let base_rank = model.base().rank();
    let base_curve = model
        .base()
        .curves()
        .iter()
        .find(|(n, _)| n == curve)
        .ok_or_else(|| Error::UnknownCurveName(curve.to_string()))?;

    let report = is_nef_tracked(model, m_top)?;
    if !report.nef {
        return Err(Error::PreconditionUnmet(
            "the class must be tracked-nef".to_string(),
        ));
    }
    let m_base: Vec<Rat> = m_top.coeffs()[..base_rank].to_vec();
    let mc = matrix::form(model.base().gram(), &m_base, &base_curve.1);
    if !mc.is_zero() {
        return Err(Error::PreconditionUnmet(format!(
            "the pushforward must meet `{curve}` trivially, got {mc}"
        )));
    }
    // Every center must lie on the curve or on exceptional curves over it.
    let mut over: Vec<String> = vec![curve.to_string()];
    for (j, center) in model.centers().iter().enumerate() {
        let touches = over.iter().any(|n| center.multiplicity(n) > 0);
        if !touches {
            return Err(Error::PreconditionUnmet(format!(
                "center {j} does not lie over `{curve}`"
            )));
        }
        over.push(model.curves()[model.base().curves().len() + j].name.clone());
    }

    for c in model.curves().iter().filter(|c| c.exceptional) {
        if !model.inner(m_top.coeffs(), &c.class).is_zero() {
            return Ok(TrivialBlowupReport {
                holds: false,
                witness: Some(c.name.clone()),
            });
        }
    }
    // Equivalent formulation: the class is the pullback of its pushforward.
    let pullback_equal = m_top.coeffs()[base_rank..].iter().all(|c| c.is_zero());
    if !pullback_equal {
        return Err(Error::Internal(
            "trivial products must force the pullback form".to_string(),
        ));
    }
    Ok(TrivialBlowupReport {
        holds: true,
        witness: None,
    })
}
