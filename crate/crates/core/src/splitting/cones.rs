//! Cone-field certificates for dominated splitting and hyperbolicity.
//!
//! Each box B carries a unitary frame (v, v⊥) with v an estimate of E^s at
//! the box centre. In frame coordinates a tangent vector is (a, c), and
//!
//! * the vertical cone C(α) = {|⟨w, v⟩| ≥ α‖w‖} is {|c| ≤ k(α)|a|},
//!   k(α) = √(1 − α²)/α;
//! * its complement is the horizontal cone H(α) = {|a| < t(α)|c|}, t = 1/k.
//!
//! For an edge B → B' of the transition graph let M = P_{B'}* D(B) P_B with
//! D(B) the interval differential over B. The edge passes when M sends
//! H_B(α) into H_{B'}(rα), which is equivalent to D⁻¹ C_{B'}(rα) ⊂ C_B(α).
//! With |c| = 1 and |a| ≤ t this is checked as
//! (|m₁₁|t + |m₁₂|)/(|m₂₂| − |m₂₁|t) ≤ t(rα)·(1 − margin), and the same
//! denominator bounds the growth of the c-component along the edge.
//!
//! Minimising the growth over chains gives a lower bound m_H for ‖Dᴺw‖ on
//! horizontal vectors. Vertical vectors are bounded through the determinant:
//! for v with Dᴺv in the vertical cone and w horizontal,
//! ‖Dᴺv‖·‖Dᴺw‖·sin∠(Dᴺv, Dᴺw) = |Jac|ᴺ·sin∠(v, w), and the angle between
//! the two cones at the end of the chain is bounded below in closed form.
//! No vertical vector is ever pushed forward numerically.

use super::cover::{grid_box, GridBox, JuliaCover};
use crate::error::{HenonError, Result};
use crate::interval::{IntervalMatrix2C, MapEnclosure};
use crate::io::{map_from_value, map_to_value};
use crate::linalg::{canonical_phase, Mat2C, Point2C, Vec2C};
use crate::map::HenonMap;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;

pub const DEFAULT_DEPTHS: [usize; 5] = [2, 4, 6, 8, 12];
pub const DEFAULT_MARGIN: f64 = 1e-3;
pub const DEFAULT_RHO: f64 = 0.5;
pub const DEFAULT_ALPHA: f64 = 0.9;
pub const DEFAULT_R: f64 = 0.5;
pub const EDGE_EVALUATION_CAP: usize = 10_000_000;

/// Slope bound of the vertical cone of aperture α.
pub fn cone_slope(alpha: f64) -> f64 {
    (1.0 - alpha * alpha).max(0.0).sqrt() / alpha
}

/// Lower bound on sin∠ between C(α₁) and H(α₂), α₂ < α₁.
pub fn cone_separation(alpha1: f64, alpha2: f64) -> f64 {
    let k1 = cone_slope(alpha1);
    let k2 = cone_slope(alpha2);
    ((1.0 - k1 / k2) / ((1.0 + k1 * k1) * (1.0 + 1.0 / (k2 * k2))).sqrt()).max(0.0)
}

/// Most contracted right singular direction of the longest usable
/// differential product along the forward orbit; falls back to (0, 1).
pub fn stable_frame_direction(map: &HenonMap, z: Point2C, radius: f64, max_steps: usize) -> Vec2C {
    let mut w = z;
    let mut prod: Option<Mat2C> = None;
    for _ in 0..max_steps {
        let d = map.differential(w) * prod.unwrap_or_else(Mat2C::identity);
        let s = d.max_abs();
        if !(s.is_finite() && s > 0.0) {
            break;
        }
        prod = Some(d.scale(1.0 / s));
        w = map.apply_unchecked(w);
        if !w.is_finite() || w.sup_norm() > 8.0 * radius {
            break;
        }
    }
    match prod {
        Some(m) => canonical_phase(m.top_right_singular().perp()),
        None => Point2C::real(0.0, 1.0),
    }
}

/// Frames and apertures for a cover.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConeParams {
    /// Per-box vertical direction (unit).
    pub frames: Vec<Vec2C>,
    /// Per-box aperture in (0, 1).
    pub alpha: Vec<f64>,
    /// Contraction factor of the aperture under pull-back, in (0, 1).
    pub r: f64,
    /// Chain lengths tried, ascending.
    pub depths: Vec<usize>,
    pub rho: f64,
    pub margin: f64,
}

impl ConeParams {
    pub fn for_cover(map: &HenonMap, cover: &JuliaCover, alpha: f64, r: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0 && r > 0.0 && r < 1.0) {
            return Err(HenonError::InvalidArgument(
                "cone aperture and contraction must lie in (0, 1)".into(),
            ));
        }
        let frames = cover
            .boxes
            .par_iter()
            .map(|b| stable_frame_direction(map, b.bx.center(), cover.radius, 24))
            .collect();
        Ok(ConeParams {
            frames,
            alpha: vec![alpha; cover.len()],
            r,
            depths: DEFAULT_DEPTHS.to_vec(),
            rho: DEFAULT_RHO,
            margin: DEFAULT_MARGIN,
        })
    }

    pub fn with_depths(mut self, depths: Vec<usize>) -> Self {
        self.depths = depths;
        self
    }

    fn frame(&self, k: usize) -> Mat2C {
        let v = self.frames[k];
        Mat2C::from_columns(v, v.perp())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", content = "reason", rename_all = "lowercase")]
pub enum BoxStatus {
    Verified,
    Failed(String),
}

impl BoxStatus {
    pub fn is_verified(&self) -> bool {
        matches!(self, BoxStatus::Verified)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoxReport {
    pub index: [u32; 4],
    pub bounds: [[f64; 2]; 4],
    #[serde(flatten)]
    pub status: BoxStatus,
    pub alpha: f64,
    pub frame: Vec2C,
    /// Upper bound of ‖Dᴺv‖/‖Dᴺw‖ over chains from the box.
    pub worst_ratio: f64,
    /// Lower bound of ‖Dᴺw‖ for unit horizontal w over chains from the box.
    pub expansion: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertParams {
    pub map: Value,
    pub radius: f64,
    pub level: usize,
    pub r: f64,
    pub margin: f64,
    pub depths: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SplittingCertificate {
    pub params: CertParams,
    pub boxes: Vec<BoxReport>,
    #[serde(rename = "N")]
    pub n: usize,
    pub rho: f64,
    /// Effective constant: max over n ≤ N of ratio bound / ρⁿ.
    #[serde(rename = "C")]
    pub c: f64,
    pub lambda_u: Option<f64>,
}

impl SplittingCertificate {
    pub fn verified_count(&self) -> usize {
        self.boxes.iter().filter(|b| b.status.is_verified()).count()
    }

    pub fn failed_count(&self) -> usize {
        self.boxes.len() - self.verified_count()
    }

    pub fn all_verified(&self) -> bool {
        !self.boxes.is_empty() && self.failed_count() == 0
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// Failed boxes whose bounds contain `z`.
    pub fn failed_boxes_containing(&self, z: &Point2C) -> Vec<&BoxReport> {
        self.boxes
            .iter()
            .filter(|b| !b.status.is_verified())
            .filter(|b| crate::interval::ComplexBox::from_bounds(b.bounds).contains(z))
            .collect()
    }
}

struct EdgeData {
    /// Growth lower bound per edge, 0 when the cone test fails.
    growth: Vec<Vec<f64>>,
    cone_ok: Vec<bool>,
}

fn evaluate_edges(
    enc: &MapEnclosure,
    cover: &JuliaCover,
    succ: &[Vec<u32>],
    cone: &ConeParams,
) -> EdgeData {
    let frames: Vec<Mat2C> = (0..cover.len()).map(|k| cone.frame(k)).collect();
    let rows: Vec<(Vec<f64>, bool)> = (0..cover.len())
        .into_par_iter()
        .map(|b| {
            let (_, d) = enc.enclose(&cover.boxes[b].bx);
            let t = 1.0 / cone_slope(cone.alpha[b]);
            let right = d * IntervalMatrix2C::point(&frames[b]);
            let mut ok = !succ[b].is_empty();
            let g = succ[b]
                .iter()
                .map(|&s| {
                    let s = s as usize;
                    let m = (IntervalMatrix2C::point(&frames[s].adjoint()) * right).m;
                    let t_img = 1.0 / cone_slope(cone.r * cone.alpha[s]);
                    let den = m[1][1].mig() - m[1][0].mag() * t;
                    let num = m[0][0].mag() * t + m[0][1].mag();
                    if den > 0.0 && num.is_finite() && num / den <= t_img * (1.0 - cone.margin) {
                        den
                    } else {
                        ok = false;
                        0.0
                    }
                })
                .collect();
            (g, ok)
        })
        .collect();
    let (growth, cone_ok) = rows.into_iter().unzip();
    EdgeData { growth, cone_ok }
}

/// Minimal chain growth W_n(B) for n = 0..=n_max.
fn chain_growth(growth: &[Vec<f64>], succ: &[Vec<u32>], n_max: usize) -> Vec<Vec<f64>> {
    let mut w = vec![vec![1.0; succ.len()]];
    for n in 1..=n_max {
        let prev = &w[n - 1];
        let next: Vec<f64> = (0..succ.len())
            .into_par_iter()
            .map(|b| {
                succ[b]
                    .iter()
                    .zip(&growth[b])
                    .map(|(&s, &g)| g * prev[s as usize])
                    .fold(f64::INFINITY, f64::min)
            })
            .map(|v| if v.is_finite() { v } else { 0.0 })
            .collect();
        w.push(next);
    }
    w
}

fn box_frame_ok(v: &Vec2C) -> bool {
    v.is_finite() && (v.norm() - 1.0).abs() < 1e-12
}

/// Shared verification core for certificates and re-checks.
fn certify(
    map: &HenonMap,
    cover: &JuliaCover,
    cone: &ConeParams,
    lambda_u: Option<f64>,
    preset_failures: &[Option<String>],
) -> SplittingCertificate {
    let enc = MapEnclosure::new(map);
    let succ = cover.transitions(&enc);
    let edges: usize = succ.iter().map(|s| s.len()).sum();
    let n_max = cone.depths.iter().copied().max().unwrap_or(0);
    let over_cap = edges.saturating_mul(n_max.max(1)) > EDGE_EVALUATION_CAP;
    let data = evaluate_edges(&enc, cover, &succ, cone);
    let w = chain_growth(&data.growth, &succ, n_max);
    let jac = map.jacobian().norm();
    let separation = (0..cover.len())
        .map(|k| cone_separation(cone.alpha[k], cone.r * cone.alpha[k]))
        .fold(f64::INFINITY, f64::min);

    let horizontal_scale: Vec<f64> = cone
        .alpha
        .iter()
        .map(|&a| {
            let t = 1.0 / cone_slope(a);
            (1.0 + t * t).sqrt()
        })
        .collect();
    let expansion = |b: usize, n: usize| w[n][b] / horizontal_scale[b];
    let ratio = |b: usize, n: usize| {
        let m = expansion(b, n);
        jac.powi(n as i32) / (m * m * separation)
    };

    let status_at = |b: usize, n: usize| -> BoxStatus {
        if let Some(Some(reason)) = preset_failures.get(b) {
            return BoxStatus::Failed(reason.clone());
        }
        if over_cap {
            return BoxStatus::Failed("chain evaluation cap exceeded".into());
        }
        if !box_frame_ok(&cone.frames[b]) {
            return BoxStatus::Failed("frame is not a unit vector".into());
        }
        if !data.cone_ok[b] {
            return BoxStatus::Failed("cone containment".into());
        }
        let m = expansion(b, n);
        if !(m > 0.0) {
            return BoxStatus::Failed("chain through a failing edge".into());
        }
        let rho_n = cone.rho.powi(n as i32);
        let q = ratio(b, n);
        if !(q <= rho_n * (1.0 - cone.margin)) {
            return BoxStatus::Failed(format!("domination ratio {q:.3e} above rho^N = {rho_n:.3e}"));
        }
        if let Some(lu) = lambda_u {
            let target = lu.powi(n as i32);
            if !(m >= target * (1.0 + cone.margin)) {
                return BoxStatus::Failed(format!("expansion {m:.3e} below lambda_u^N = {target:.3e}"));
            }
            let contraction = jac.powi(n as i32) / (m * separation);
            if !(contraction <= (1.0 - cone.margin) / target) {
                return BoxStatus::Failed(format!("contraction {contraction:.3e} above lambda_u^-N"));
            }
        }
        BoxStatus::Verified
    };

    // First depth with every box verified, else the one verifying the most.
    let mut chosen: Option<(usize, Vec<BoxStatus>)> = None;
    for &n in &cone.depths {
        let st: Vec<BoxStatus> = (0..cover.len()).into_par_iter().map(|b| status_at(b, n)).collect();
        let good = st.iter().filter(|s| s.is_verified()).count();
        let all = good == st.len();
        let better = match &chosen {
            None => true,
            Some((_, prev)) => good > prev.iter().filter(|s| s.is_verified()).count(),
        };
        if better {
            chosen = Some((n, st));
        }
        if all {
            break;
        }
    }
    let (n, statuses) = chosen.unwrap_or((0, Vec::new()));

    let mut c_eff: f64 = 0.0;
    for (b, st) in statuses.iter().enumerate() {
        if st.is_verified() {
            for k in 1..=n {
                c_eff = c_eff.max(ratio(b, k) / cone.rho.powi(k as i32));
            }
        }
    }

    let boxes = cover
        .boxes
        .iter()
        .zip(statuses)
        .enumerate()
        .map(|(b, (gb, status))| BoxReport {
            index: gb.index,
            bounds: gb.bx.bounds(),
            status,
            alpha: cone.alpha[b],
            frame: cone.frames[b],
            worst_ratio: if n > 0 { ratio(b, n) } else { f64::INFINITY },
            expansion: if n > 0 { expansion(b, n) } else { 0.0 },
        })
        .collect();

    SplittingCertificate {
        params: CertParams {
            map: map_to_value(map),
            radius: cover.radius,
            level: cover.level,
            r: cone.r,
            margin: cone.margin,
            depths: cone.depths.clone(),
        },
        boxes,
        n,
        rho: cone.rho,
        c: c_eff,
        lambda_u,
    }
}

fn check_cone(cover: &JuliaCover, cone: &ConeParams) -> Result<()> {
    if cone.frames.len() != cover.len() || cone.alpha.len() != cover.len() {
        return Err(HenonError::InvalidArgument(
            "cone parameters do not match the cover".into(),
        ));
    }
    if cone.depths.is_empty() || cone.depths.contains(&0) {
        return Err(HenonError::InvalidArgument("chain depths must be positive".into()));
    }
    Ok(())
}

/// Certifies the cone condition and the N-step domination bound on every box.
pub fn verify_dominated_splitting(
    map: &HenonMap,
    cover: &JuliaCover,
    cone: &ConeParams,
) -> Result<SplittingCertificate> {
    check_cone(cover, cone)?;
    Ok(certify(map, cover, cone, None, &[]))
}

/// Domination plus N-step expansion ≥ λ_uᴺ on horizontal vectors and the
/// matching contraction on vertical ones.
pub fn verify_hyperbolicity(
    map: &HenonMap,
    cover: &JuliaCover,
    cone: &ConeParams,
    lambda_u: f64,
) -> Result<SplittingCertificate> {
    check_cone(cover, cone)?;
    if !(lambda_u > 1.0) {
        return Err(HenonError::InvalidArgument("lambda_u must exceed 1".into()));
    }
    Ok(certify(map, cover, cone, Some(lambda_u), &[]))
}

/// Outcome of re-verifying a stored certificate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RecheckReport {
    pub claimed_verified: usize,
    pub reverified: usize,
    /// (box position, reason) for every claimed box that did not re-verify.
    pub mismatches: Vec<(usize, String)>,
}

impl RecheckReport {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// Rebuilds the transition graph from the stored boxes, recomputes every
/// check and compares with the recorded results. Boxes not on the dyadic
/// grid of the recorded radius and level fail.
pub fn recheck(cert: &SplittingCertificate) -> Result<RecheckReport> {
    let map = map_from_value(&cert.params.map)?;
    let p = &cert.params;
    if p.level > super::cover::MAX_LEVEL || !(p.radius > 0.0) {
        return Err(HenonError::Certificate("bad cover parameters".into()));
    }
    let boxes: Vec<GridBox> = cert
        .boxes
        .iter()
        .map(|b| GridBox {
            index: b.index,
            bx: crate::interval::ComplexBox::from_bounds(b.bounds),
        })
        .collect();
    let grid_failures: Vec<Option<String>> = cert
        .boxes
        .iter()
        .map(|b| {
            let side = 1u64 << p.level;
            if b.index.iter().any(|&i| i as u64 >= side) {
                return Some("index outside the grid".into());
            }
            (grid_box(p.radius, p.level, b.index).bounds() != b.bounds)
                .then(|| "bounds not on the dyadic grid".to_string())
        })
        .collect();
    let mut order: Vec<usize> = (0..boxes.len()).collect();
    order.sort_by_key(|&k| boxes[k].index);
    if order.windows(2).any(|w| boxes[w[0]].index == boxes[w[1]].index) {
        return Err(HenonError::Certificate("duplicate box index".into()));
    }
    // The cover sorts by index, so cover position i holds file position order[i].
    let cover = JuliaCover::from_boxes(p.radius, p.level, boxes, false);
    let pos_of = order;
    let cone = ConeParams {
        frames: pos_of.iter().map(|&k| cert.boxes[k].frame).collect(),
        alpha: pos_of.iter().map(|&k| cert.boxes[k].alpha).collect(),
        r: p.r,
        depths: vec![cert.n.max(1)],
        rho: cert.rho,
        margin: p.margin,
    };
    if cone.alpha.iter().any(|&a| !(a > 0.0 && a < 1.0)) || !(cone.r > 0.0 && cone.r < 1.0) {
        return Err(HenonError::Certificate("cone parameters out of range".into()));
    }
    let failures: Vec<Option<String>> = pos_of.iter().map(|&k| grid_failures[k].clone()).collect();
    let fresh = certify(&map, &cover, &cone, cert.lambda_u, &failures);

    let mut report = RecheckReport {
        claimed_verified: 0,
        reverified: 0,
        mismatches: Vec::new(),
    };
    for (ci, &k) in pos_of.iter().enumerate() {
        let old = &cert.boxes[k];
        if !old.status.is_verified() {
            continue;
        }
        report.claimed_verified += 1;
        let new = &fresh.boxes[ci];
        match &new.status {
            BoxStatus::Failed(reason) => report.mismatches.push((k, reason.clone())),
            BoxStatus::Verified if new.worst_ratio != old.worst_ratio || new.expansion != old.expansion => {
                report.mismatches.push((k, "recorded bounds differ from recomputation".into()))
            }
            BoxStatus::Verified => report.reverified += 1,
        }
    }
    Ok(report)
}

/// Subdivides the cover once, with children inheriting frames and apertures.
pub fn refine(
    map: &HenonMap,
    cover: &JuliaCover,
    cone: &ConeParams,
    opts: &super::cover::CoverOptions,
) -> (JuliaCover, ConeParams) {
    let fine = super::cover::refine_cover(map, cover, opts);
    let parent_of = |gb: &GridBox| {
        let idx = gb.index.map(|i| i / 2);
        cover.index_of(&idx).expect("child of a cover box")
    };
    let parents: Vec<usize> = fine.boxes.iter().map(parent_of).collect();
    let cone = ConeParams {
        frames: parents.iter().map(|&p| cone.frames[p]).collect(),
        alpha: parents.iter().map(|&p| cone.alpha[p]).collect(),
        ..cone.clone()
    };
    (fine, cone)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::line_sin;
    use crate::splitting::cover::{build_julia_cover, CoverOptions};

    fn horseshoe() -> (HenonMap, JuliaCover) {
        let f = HenonMap::real(&[-6.0, 0.0, 1.0], 0.001).unwrap();
        let r = f.filtration_radius().unwrap().radius;
        let cover = build_julia_cover(&f, r, &CoverOptions::new(6)).unwrap();
        (f, cover)
    }

    #[test]
    fn separation_is_positive_only_for_nested_apertures() {
        assert!(cone_separation(0.9, 0.45) > 0.0);
        assert_eq!(cone_separation(0.5, 0.9), 0.0);
        assert!((cone_slope(1.0 / 2f64.sqrt()) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn frame_matches_stable_eigenvector_at_saddle() {
        let b = 0.001;
        let f = HenonMap::real(&[-6.0, 0.0, 1.0], b).unwrap();
        let x = ((1.0 + b) + ((1.0 + b) * (1.0 + b) + 24.0f64).sqrt()) / 2.0;
        let z = Point2C::real(x, x);
        // Eigenvalues of [[2x, −b], [1, 0]]; the stable one has eigenvector (λ, 1).
        let ls = x - (x * x - b).sqrt();
        let v = Point2C::real(ls, 1.0).normalized();
        let w = stable_frame_direction(&f, z, 4.0005, 30);
        assert!(line_sin(&v, &w) < 1e-8, "{}", line_sin(&v, &w));
    }

    #[test]
    fn horseshoe_is_hyperbolic_and_rechecks() {
        let (f, cover) = horseshoe();
        let cone = ConeParams::for_cover(&f, &cover, DEFAULT_ALPHA, DEFAULT_R).unwrap();
        let cert = verify_hyperbolicity(&f, &cover, &cone, 1.5).unwrap();
        assert!(cert.all_verified(), "{} failed", cert.failed_count());
        assert!(cert.c > 0.0 && cert.rho == DEFAULT_RHO);
        let back = SplittingCertificate::from_json(&cert.to_json().unwrap()).unwrap();
        assert_eq!(back, cert);
        let rc = recheck(&back).unwrap();
        assert!(rc.passed() && rc.reverified == cert.boxes.len());
    }

    #[test]
    fn recheck_detects_tampering() {
        let (f, cover) = horseshoe();
        let cone = ConeParams::for_cover(&f, &cover, DEFAULT_ALPHA, DEFAULT_R).unwrap();
        let mut cert = verify_dominated_splitting(&f, &cover, &cone).unwrap();
        cert.boxes[3].worst_ratio *= 0.5;
        let rc = recheck(&cert).unwrap();
        assert!(!rc.passed());
        assert_eq!(rc.mismatches.len(), 1);
    }

    #[test]
    fn misaligned_frames_fail() {
        let (f, cover) = horseshoe();
        let mut cone = ConeParams::for_cover(&f, &cover, DEFAULT_ALPHA, DEFAULT_R).unwrap();
        for v in cone.frames.iter_mut() {
            *v = v.perp();
        }
        let cert = verify_dominated_splitting(&f, &cover, &cone).unwrap();
        assert!(cert.failed_count() > 0);
        assert!(cert.boxes.iter().all(|b| b.status.is_verified() || !matches!(&b.status, BoxStatus::Failed(r) if r.is_empty())));
    }

    #[test]
    fn certificate_is_deterministic() {
        let (f, cover) = horseshoe();
        let cone = ConeParams::for_cover(&f, &cover, DEFAULT_ALPHA, DEFAULT_R).unwrap();
        let a = verify_dominated_splitting(&f, &cover, &cone).unwrap();
        let b = verify_dominated_splitting(&f, &cover, &cone).unwrap();
        assert_eq!(a.to_json().unwrap(), b.to_json().unwrap());
    }

    #[test]
    fn refinement_keeps_verified_boxes() {
        let (f, cover) = horseshoe();
        let cone = ConeParams::for_cover(&f, &cover, DEFAULT_ALPHA, DEFAULT_R).unwrap();
        let coarse = verify_dominated_splitting(&f, &cover, &cone).unwrap();
        assert!(coarse.all_verified());
        let (fine, fine_cone) = refine(&f, &cover, &cone, &CoverOptions::new(7));
        assert!(fine.len() >= cover.len());
        let cert = verify_dominated_splitting(&f, &fine, &fine_cone).unwrap();
        assert!(cert.all_verified());
    }

    #[test]
    fn rejects_bad_parameters() {
        let (f, cover) = horseshoe();
        assert!(ConeParams::for_cover(&f, &cover, 1.0, 0.5).is_err());
        assert!(ConeParams::for_cover(&f, &cover, 0.9, 0.0).is_err());
        let cone = ConeParams::for_cover(&f, &cover, 0.9, 0.5).unwrap();
        assert!(verify_hyperbolicity(&f, &cover, &cone, 1.0).is_err());
    }
}
