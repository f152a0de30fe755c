//! Shared test support: random lattice instances and an exhaustive
//! Zariski oracle kept independent of the engine's iterative algorithm.

#![allow(dead_code)]

use bgeom::lattice::{build_model, BaseSurface, BlowupCenter, DivisorClass, SurfaceModel};
use bgeom::rat::{rint, Rat};
use num_traits::Zero;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Local bilinear form evaluation, keeping the oracle self-contained.
pub fn pairing(gram: &[Vec<Rat>], a: &[Rat], b: &[Rat]) -> Rat {
    let mut acc = Rat::zero();
    for (i, ai) in a.iter().enumerate() {
        if ai.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate() {
            if !bj.is_zero() {
                acc += ai * &gram[i][j] * bj;
            }
        }
    }
    acc
}

// ---------------------------------------------------------------------
// Independent exact linear algebra (forward elimination with back
// substitution, no normalization), used only by the oracle below.
// ---------------------------------------------------------------------

/// Solves `A x = b` by forward elimination and back substitution.
pub fn indep_solve(a: &[Vec<Rat>], b: &[Rat]) -> Option<Vec<Rat>> {
    let n = a.len();
    let mut m: Vec<Vec<Rat>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !m[r][col].is_zero())?;
        m.swap(col, pivot);
        for r in (col + 1)..n {
            if m[r][col].is_zero() {
                continue;
            }
            let factor = &m[r][col] / &m[col][col];
            for j in col..=n {
                let delta = &factor * &m[col][j];
                m[r][j] = &m[r][j] - &delta;
            }
        }
    }
    let mut x = vec![Rat::zero(); n];
    for row in (0..n).rev() {
        let mut acc = m[row][n].clone();
        for col in (row + 1)..n {
            acc -= &m[row][col] * &x[col];
        }
        x[row] = acc / &m[row][row];
    }
    Some(x)
}

/// Determinant by fraction-free elimination.
pub fn indep_det(a: &[Vec<Rat>]) -> Rat {
    let n = a.len();
    let mut m = a.to_vec();
    let mut det = rint(1);
    for col in 0..n {
        let pivot = match (col..n).find(|&r| !m[r][col].is_zero()) {
            Some(p) => p,
            None => return Rat::zero(),
        };
        if pivot != col {
            m.swap(col, pivot);
            det = -det;
        }
        det *= m[col][col].clone();
        for r in (col + 1)..n {
            if m[r][col].is_zero() {
                continue;
            }
            let factor = &m[r][col] / &m[col][col];
            for j in col..n {
                let delta = &factor * &m[col][j];
                m[r][j] = &m[r][j] - &delta;
            }
        }
    }
    det
}

/// Negative definiteness by the alternating signs of the leading
/// principal minors: `(-1)^k det_k > 0`.
pub fn indep_negative_definite(a: &[Vec<Rat>]) -> bool {
    let n = a.len();
    for k in 1..=n {
        let minor: Vec<Vec<Rat>> = (0..k).map(|i| a[i][..k].to_vec()).collect();
        let det = indep_det(&minor);
        let expected_positive = k % 2 == 0;
        if det.is_zero() {
            return false;
        }
        if (det > Rat::zero()) != expected_positive {
            return false;
        }
    }
    true
}

// ---------------------------------------------------------------------
// Random instance generators.
// ---------------------------------------------------------------------

pub fn preset_bases() -> Vec<BaseSurface> {
    vec![
        BaseSurface::p2(),
        BaseSurface::hirzebruch(0),
        BaseSurface::hirzebruch(1),
        BaseSurface::hirzebruch(2),
        BaseSurface::ruled_genus1(1),
        BaseSurface::ruled_genus1(2),
        BaseSurface::ruled_genus1(3),
    ]
}

/// P²- and F_n-type bases only (the regime of the Zariski oracle suite).
pub fn plane_and_hirzebruch() -> Vec<BaseSurface> {
    vec![
        BaseSurface::p2(),
        BaseSurface::hirzebruch(0),
        BaseSurface::hirzebruch(1),
        BaseSurface::hirzebruch(2),
    ]
}

/// A random center on at most two tracked curves of the current model
/// state, each with multiplicity 1, subject to the pairwise-meeting
/// guard `C·C' ≥ 1` that keeps configurations geometrically sensible.
pub fn random_center(rng: &mut ChaCha8Rng, model: &SurfaceModel) -> BlowupCenter {
    let curves = model.curves();
    let k = *[0usize, 1, 1, 1, 2, 2].choose(rng).unwrap();
    if k == 0 || curves.is_empty() {
        return BlowupCenter::generic();
    }
    let first = rng.gen_range(0..curves.len());
    if k == 1 {
        return BlowupCenter::on(&[(curves[first].name.as_str(), 1)]);
    }
    let partners: Vec<usize> = (0..curves.len())
        .filter(|&j| {
            j != first && pairing(model.gram(), &curves[first].class, &curves[j].class) >= rint(1)
        })
        .collect();
    match partners.choose(rng) {
        Some(&second) => BlowupCenter::on(&[
            (curves[first].name.as_str(), 1),
            (curves[second].name.as_str(), 1),
        ]),
        None => BlowupCenter::on(&[(curves[first].name.as_str(), 1)]),
    }
}

/// A random tower of depth up to `max_depth` over the given base, with
/// simple-normal-crossing style centers.
pub fn random_tower(rng: &mut ChaCha8Rng, base: BaseSurface, max_depth: usize) -> SurfaceModel {
    let depth = rng.gen_range(0..=max_depth);
    let mut model = build_model(base.clone(), vec![]).unwrap();
    let mut centers = Vec::new();
    for _ in 0..depth {
        let center = random_center(rng, &model);
        centers.push(center);
        model = build_model(base.clone(), centers.clone()).unwrap();
    }
    model
}

/// A random divisor with integer coefficients in `[lo, hi]`.
pub fn random_divisor(
    rng: &mut ChaCha8Rng,
    model: &SurfaceModel,
    lo: i64,
    hi: i64,
) -> DivisorClass {
    let coeffs: Vec<i64> = (0..model.rank()).map(|_| rng.gen_range(lo..=hi)).collect();
    model.divisor_i64(&coeffs).unwrap()
}

/// An integral ample class on the base of the model.
pub fn ample_base_class(model: &SurfaceModel, scale: i64) -> Vec<i64> {
    let base = model.base();
    match base.rank() {
        1 => vec![scale],
        2 => {
            // C0 + (n+1)f is ample-type for F_n and the genus-one presets.
            let n = -match base.gram()[0][0].numer().try_into() {
                Ok(v) => v,
                Err(_) => 0i64,
            };
            vec![scale, scale * (n + 1)]
        }
        r => vec![scale; r],
    }
}

/// A random integral tracked-nef class: the pullback of an ample base
/// class minus a small exceptional combination, filtered by nefness.
pub fn random_nef(rng: &mut ChaCha8Rng, model: &SurfaceModel) -> DivisorClass {
    let base_rank = model.base().rank();
    for _ in 0..40 {
        let scale = rng.gen_range(1..=4i64);
        let mut coeffs: Vec<i64> = ample_base_class(model, scale);
        coeffs.resize(model.rank(), 0);
        for c in coeffs.iter_mut().skip(base_rank) {
            *c = -rng.gen_range(0..=2i64);
        }
        let candidate = model.divisor_i64(&coeffs).unwrap();
        if bgeom::positivity::is_nef_tracked(model, &candidate)
            .unwrap()
            .nef
        {
            return candidate;
        }
    }
    // The plain pullback of an ample class is always tracked-nef.
    let mut coeffs = ample_base_class(model, 2);
    coeffs.resize(model.rank(), 0);
    model.divisor_i64(&coeffs).unwrap()
}

/// A random boundary with coefficients in `[0,1]` on the base curves.
pub fn random_lc_boundary(
    rng: &mut ChaCha8Rng,
    model: &SurfaceModel,
) -> std::collections::BTreeMap<String, Rat> {
    let choices = [
        Rat::zero(),
        Rat::new(1.into(), 2.into()),
        Rat::new(2.into(), 3.into()),
        Rat::new(1.into(), 4.into()),
        rint(1),
    ];
    model
        .base()
        .curves()
        .iter()
        .filter_map(|(name, _)| {
            let c = choices.choose(rng).unwrap().clone();
            (!c.is_zero()).then(|| (name.clone(), c))
        })
        .collect()
}

// ---------------------------------------------------------------------
// Exhaustive Zariski oracle.
// ---------------------------------------------------------------------

pub struct OracleDecomposition {
    pub p: Vec<Rat>,
    pub n: Vec<Rat>,
    pub support: Vec<String>,
}

/// Tries every subset of tracked curves: keeps those with negative
/// definite Gram, solves for a nonnegative `N` supported there with
/// `P·C = 0` on the subset and `P·C ≥ 0` everywhere, and checks that all
/// qualifying subsets produce one and the same decomposition.
pub fn zariski_oracle(model: &SurfaceModel, d: &DivisorClass) -> Option<OracleDecomposition> {
    let curves = model.curves();
    let count = curves.len();
    assert!(count <= 16, "oracle is exponential in the curve count");
    let mut result: Option<(Vec<Rat>, Vec<Rat>, Vec<String>)> = None;

    for mask in 0u32..(1 << count) {
        let subset: Vec<usize> = (0..count).filter(|i| mask & (1 << i) != 0).collect();
        let gram: Vec<Vec<Rat>> = subset
            .iter()
            .map(|&i| {
                subset
                    .iter()
                    .map(|&j| pairing(model.gram(), &curves[i].class, &curves[j].class))
                    .collect()
            })
            .collect();
        if !indep_negative_definite(&gram) {
            continue;
        }
        let rhs: Vec<Rat> = subset
            .iter()
            .map(|&i| pairing(model.gram(), d.coeffs(), &curves[i].class))
            .collect();
        let Some(coeffs) = indep_solve(&gram, &rhs) else {
            continue;
        };
        if coeffs.iter().any(|c| c < &Rat::zero()) {
            continue;
        }
        let mut n_vec = vec![Rat::zero(); model.rank()];
        for (&i, c) in subset.iter().zip(&coeffs) {
            for (acc, x) in n_vec.iter_mut().zip(&curves[i].class) {
                *acc += c * x;
            }
        }
        let p_vec: Vec<Rat> = d.coeffs().iter().zip(&n_vec).map(|(a, b)| a - b).collect();
        let p_nef = curves
            .iter()
            .all(|c| pairing(model.gram(), &p_vec, &c.class) >= Rat::zero());
        if !p_nef {
            continue;
        }
        let support: Vec<String> = subset
            .iter()
            .zip(&coeffs)
            .filter(|(_, c)| !c.is_zero())
            .map(|(&i, _)| curves[i].name.clone())
            .collect();
        match &result {
            None => result = Some((p_vec, n_vec, support)),
            Some((p0, n0, s0)) => {
                assert_eq!(p0, &p_vec, "oracle found two distinct positive parts");
                assert_eq!(n0, &n_vec, "oracle found two distinct negative parts");
                assert_eq!(s0, &support, "oracle found two distinct supports");
            }
        }
    }
    result.map(|(p, n, support)| OracleDecomposition { p, n, support })
}

/// A random contraction: a greedy negative-definite subset of tracked
/// curves, in shuffled order.
pub fn random_contraction(
    rng: &mut ChaCha8Rng,
    model: &SurfaceModel,
    max_curves: usize,
) -> Option<bgeom::Contraction> {
    let mut order: Vec<usize> = (0..model.curves().len()).collect();
    order.shuffle(rng);
    let mut picked: Vec<usize> = Vec::new();
    for i in order {
        if picked.len() >= max_curves {
            break;
        }
        let candidate: Vec<usize> = picked.iter().copied().chain([i]).collect();
        let gram: Vec<Vec<Rat>> = candidate
            .iter()
            .map(|&a| {
                candidate
                    .iter()
                    .map(|&b| {
                        pairing(
                            model.gram(),
                            &model.curves()[a].class,
                            &model.curves()[b].class,
                        )
                    })
                    .collect()
            })
            .collect();
        if indep_negative_definite(&gram) {
            picked = candidate;
        }
    }
    if picked.is_empty() {
        return None;
    }
    let names: Vec<&str> = picked
        .iter()
        .map(|&i| model.curves()[i].name.as_str())
        .collect();
    Some(bgeom::Contraction::new(model, &names, false).unwrap())
}
