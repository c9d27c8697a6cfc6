//! Acceptance criteria, one PASS/FAIL line each. Exits non-zero if any fails.

use henonlab::manifolds::{linearize, local_stable_disk, stable_factor};
use henonlab::onedim::{julia_sample_1d, periodic_cycles_1d, verify_1d_hyperbolicity, Poly1D};
use henonlab::periodic::{
    classify_orbit, find_periodic_orbits, hausdorff_distance, semi_parabolic_parameter, OrbitSearch, OrbitType,
    PeriodicOrbit, PointCloud, DEFAULT_NEUTRAL_BAND,
};
use henonlab::potential::{GreenOptions, MembershipTag, Potential, SliceSpec};
use henonlab::splitting::{
    build_julia_cover, recheck, sampling_oracle, verify_dominated_splitting, verify_hyperbolicity, ConeParams,
    CoverOptions, OracleOptions, DEFAULT_ALPHA, DEFAULT_R,
};
use henonlab::{Direction, HenonMap, Point2C, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

type Outcome = (bool, String);

fn horseshoe() -> HenonMap {
    HenonMap::real(&[-6.0, 0.0, 1.0], 0.001).unwrap()
}

fn random_point(rng: &mut ChaCha8Rng, half: f64) -> Point2C {
    let mut c = || C64::new(rng.gen_range(-half..half), rng.gen_range(-half..half));
    Point2C::new(c(), c())
}

fn automorphism() -> Outcome {
    let maps = [
        HenonMap::real(&[-1.0, 0.0, 1.0], 0.3).unwrap(),
        HenonMap::new(
            vec![C64::new(-0.12, 0.75), C64::new(0.0, 0.0), C64::new(1.0, 0.0)],
            C64::from_polar(0.4, 1.0),
        )
        .unwrap(),
        HenonMap::compose(vec![
            (vec![C64::new(0.2, 0.0), C64::new(0.0, 0.0), C64::new(1.0, 0.0)], C64::new(0.5, 0.0)),
            (vec![C64::new(-0.5, 0.1), C64::new(0.3, 0.0), C64::new(0.0, 0.0), C64::new(1.0, 0.0)], C64::new(0.0, 0.7)),
        ])
        .unwrap(),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let (mut inv_err, mut det_err) = (0.0_f64, 0.0_f64);
    for f in &maps {
        for _ in 0..10_000 {
            let z = random_point(&mut rng, 1.0);
            let back = f.apply_inverse(f.apply(z).unwrap()).unwrap();
            inv_err = inv_err.max((back - z).norm());
            det_err = det_err.max((f.differential(z).det().norm() - f.jacobian().norm()).abs());
        }
    }
    (
        inv_err < 1e-12 && det_err < 1e-12,
        format!("3 maps × 10⁴ points: max |f⁻¹f(z) − z| = {inv_err:.2e}, max ||det Df| − |b|| = {det_err:.2e} (tol 1e-12)"),
    )
}

fn green_equation() -> Outcome {
    let maps = [
        horseshoe(),
        HenonMap::real(&[-1.0, 0.0, 1.0], 0.3).unwrap(),
        HenonMap::new(
            vec![C64::new(-0.12, 0.75), C64::new(0.0, 0.0), C64::new(1.0, 0.0)],
            C64::new(0.0, 0.2),
        )
        .unwrap(),
    ];
    let opts = GreenOptions::default();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst = 0.0_f64;
    for f in &maps {
        let pot = Potential::new(f).unwrap();
        let mut found = 0;
        while found < 1000 {
            let z = random_point(&mut rng, pot.radius());
            if !matches!(pot.classify(z, 200), MembershipTag::EscapesForward(_)) {
                continue;
            }
            let g = pot.green(z, Direction::Forward, &opts).unwrap();
            let g1 = pot.green(f.apply(z).unwrap(), Direction::Forward, &opts).unwrap();
            worst = worst.max((g1 - 2.0 * g).abs());
            found += 1;
        }
    }
    (worst < 1e-6, format!("3 maps × 10³ escaping points: max |G⁺(f z) − 2G⁺(z)| = {worst:.2e} (tol 1e-6)"))
}

fn fixed_points() -> Outcome {
    let f = HenonMap::real(&[0.0, 0.0, 1.0], 0.05).unwrap();
    let orbits = find_periodic_orbits(&f, 1, &OrbitSearch::new(&f, 200).unwrap()).unwrap();
    let near = |p: (f64, f64)| {
        orbits
            .iter()
            .find(|o| (o.points[0] - Point2C::real(p.0, p.1)).norm() < 1e-8)
            .cloned()
    };
    let l2 = (2.1 + 4.21f64.sqrt()) / 2.0;
    let (a, s) = (near((0.0, 0.0)), near((1.05, 1.05)));
    let ok_a = a.as_ref().is_some_and(|o| {
        o.kind == OrbitType::Attracting && (o.lambda1.norm() - 0.05f64.sqrt()).abs() < 1e-8 && (o.lambda2.norm() - 0.05f64.sqrt()).abs() < 1e-8
    });
    let ok_s = s
        .as_ref()
        .is_some_and(|o| o.kind == OrbitType::Saddle && (o.lambda2 - C64::new(l2, 0.0)).norm() < 1e-8);
    let detail = format!(
        "{} orbits; (0,0): {:?} |λ| = {:?}; (1.05,1.05): {:?} λ₂ = {:?} vs {l2:.12}",
        orbits.len(),
        a.as_ref().map(|o| o.kind),
        a.as_ref().map(|o| o.lambda2.norm()),
        s.as_ref().map(|o| o.kind),
        s.as_ref().map(|o| o.lambda2.re),
    );
    (orbits.len() == 2 && ok_a && ok_s, detail)
}

fn horseshoe_certificate() -> Outcome {
    let t = Instant::now();
    let f = horseshoe();
    let r = f.filtration_radius().unwrap().radius;
    let cover = build_julia_cover(&f, r, &CoverOptions::new(8)).unwrap();
    let cone = ConeParams::for_cover(&f, &cover, DEFAULT_ALPHA, DEFAULT_R).unwrap();
    let split = verify_dominated_splitting(&f, &cover, &cone).unwrap();
    let hyp = verify_hyperbolicity(&f, &cover, &cone, 1.5).unwrap();
    let mut search = OrbitSearch::new(&f, 500).unwrap();
    search.radius = r;
    let anchors = henonlab::periodic::harvest_saddles(&f, 6, &search).unwrap();
    let mut opts = OracleOptions::new(100_000, 7);
    opts.anchors = anchors.points;
    let rep = sampling_oracle(&f, &hyp, &opts);
    let secs = t.elapsed().as_secs_f64();
    let ok = split.all_verified()
        && split.n <= 8
        && hyp.all_verified()
        && hyp.lambda_u.is_some_and(|l| l >= 1.5)
        && rep.segments == 100_000
        && rep.passed()
        && secs < 300.0;
    (
        ok,
        format!(
            "{} boxes; splitting {}/{} at N = {}; hyperbolicity {}/{} at N = {} with λ_u = {:?}; oracle {} segments, {} violations; {secs:.1} s",
            split.boxes.len(),
            split.verified_count(),
            split.boxes.len(),
            split.n,
            hyp.verified_count(),
            hyp.boxes.len(),
            hyp.n,
            hyp.lambda_u,
            rep.segments,
            rep.violations
        ),
    )
}

fn semi_parabolic() -> Outcome {
    let b = 0.1;
    let f = HenonMap::real(&[semi_parabolic_parameter(b), 0.0, 1.0], b).unwrap();
    let z = Point2C::real(0.55, 0.55);
    let orbit = PeriodicOrbit::from_cycle(&f, vec![z], DEFAULT_NEUTRAL_BAND).unwrap();
    let kind = classify_orbit(&f, &orbit, DEFAULT_NEUTRAL_BAND);
    let l2_err = (orbit.lambda2 - C64::new(1.0, 0.0)).norm();
    let r = f.filtration_radius().unwrap().radius;
    let cover = build_julia_cover(&f, r, &CoverOptions::new(5)).unwrap();
    let cone = ConeParams::for_cover(&f, &cover, DEFAULT_ALPHA, DEFAULT_R).unwrap();
    let cert = verify_hyperbolicity(&f, &cover, &cone, 1.0 + 1e-9).unwrap();
    let containing = cert.failed_boxes_containing(&z).len();
    (
        l2_err < 1e-12 && kind == OrbitType::SemiParabolic && containing > 0,
        format!("|λ₂ − 1| = {l2_err:.1e}, type {kind:?}, {containing} Failed boxes contain (0.55, 0.55) ({} of {} failed)", cert.failed_count(), cert.boxes.len()),
    )
}

fn j_equals_jstar() -> Outcome {
    let t = Instant::now();
    let f = horseshoe();
    let r = f.filtration_radius().unwrap().radius;
    let mut search = OrbitSearch::new(&f, 1).unwrap();
    let mut pts = Vec::new();
    for n in 1..=10 {
        search.seed_count = 400 * n * n;
        for o in find_periodic_orbits(&f, n, &search).unwrap() {
            if o.kind == OrbitType::Saddle {
                pts.extend(o.points);
            }
        }
    }
    let cloud = PointCloud::new("saddles", pts);
    let cover = build_julia_cover(&f, r, &CoverOptions::new(9)).unwrap();
    let centres = PointCloud::new("cover", cover.boxes.iter().map(|b| b.bx.center()));
    let h = hausdorff_distance(&cloud, &centres).unwrap();
    let diag = cover.boxes[0].bx.diagonal();
    let secs = t.elapsed().as_secs_f64();
    (
        h < 3.0 * diag && secs < 600.0,
        format!(
            "{} saddle points, {} boxes: Hausdorff {h:.4} = {:.2} diagonals (limit 3); {secs:.1} s",
            cloud.len(),
            centres.len(),
            h / diag
        ),
    )
}

fn stable_manifolds() -> Outcome {
    let sad = HenonMap::real(&[0.0, 0.0, 1.0], 0.05).unwrap();
    let z = Point2C::real(1.05, 1.05);
    let ls = 1.05 - (1.05f64 * 1.05 - 0.05).sqrt();
    let disk = local_stable_disk(&sad, z, 0.05, 10, 40).unwrap();
    let tangent = henonlab::linalg::line_sin(&disk.tangent, &Point2C::real(ls, 1.0));

    let f = horseshoe();
    let search = OrbitSearch::new(&f, 200).unwrap();
    let mut bases = Vec::new();
    for n in 1..=4 {
        for o in find_periodic_orbits(&f, n, &search).unwrap() {
            if o.kind == OrbitType::Saddle {
                bases.extend(o.points);
            }
        }
    }
    bases.truncate(10);
    let mut invariance = disk.invariance_residual;
    let mut functional = 0.0_f64;
    let mut samples = 0;
    let mut runs = vec![(sad.clone(), z)];
    runs.extend(bases.iter().map(|&p| (f.clone(), p)));
    for (map, p) in &runs {
        let d = local_stable_disk(map, *p, 0.05, 10, 40).unwrap();
        invariance = invariance.max(d.invariance_residual);
        let lambda = stable_factor(map, *p).unwrap();
        let fp = map.apply_unchecked(*p);
        for s in &d.samples[1..] {
            let u = linearize(map, *p, s.point, 1e-12).unwrap().u;
            let v = linearize(map, fp, map.apply_unchecked(s.point), 1e-12).unwrap().u;
            functional = functional.max((v - lambda * u).norm());
            samples += 1;
        }
    }
    (
        invariance < 1e-8 && functional < 1e-8 && tangent < 1e-8 && bases.len() == 10,
        format!(
            "{} base points, {samples} samples: invariance {invariance:.2e}, functional equation {functional:.2e}, saddle tangent angle {tangent:.2e} (tol 1e-8)",
            runs.len()
        ),
    )
}

fn one_dimensional() -> Outcome {
    let cantor = Poly1D::real(&[-6.0, 0.0, 1.0]).unwrap();
    let j = julia_sample_1d(&cantor, 2000, 20, 0).unwrap();
    let hyp = verify_1d_hyperbolicity(&cantor, &j, 20);
    let para = Poly1D::real(&[0.25, 0.0, 1.0]).unwrap();
    let jp = julia_sample_1d(&para, 2000, 20, 0).unwrap();
    let para_hyp = verify_1d_hyperbolicity(&para, &jp, 20);

    let b = 1e-4;
    let f = HenonMap::real(&[-6.0, 0.0, 1.0], b).unwrap();
    let search = OrbitSearch::new(&f, 400).unwrap();
    let mut worst = 0.0_f64;
    let mut count = 0;
    for n in 1..=4 {
        let cycles: Vec<C64> = periodic_cycles_1d(&cantor, n, 64, 0).unwrap().into_iter().flatten().collect();
        for o in find_periodic_orbits(&f, n, &search).unwrap() {
            if o.kind != OrbitType::Saddle {
                continue;
            }
            for p in &o.points {
                let d = cycles.iter().map(|c| (c - p.x).norm()).fold(f64::INFINITY, f64::min);
                worst = worst.max(d);
                count += 1;
            }
        }
    }
    let ok = matches!(hyp, Some((1, m)) if m >= 3.46) && para_hyp.is_none() && count > 0 && worst < 1e-2;
    (
        ok,
        format!("z²−6: {hyp:?}; z²+1/4: {para_hyp:?}; {count} saddle points at b = 1e-4, max distance to 1D cycles {worst:.2e} (tol 1e-2)"),
    )
}

fn measure_zero() -> Outcome {
    let f = horseshoe();
    let pot = Potential::new(&f).unwrap();
    let r = pot.radius();
    let slice = SliceSpec::horizontal(C64::new(0.0, 0.0), (-r, r), (-r, r));
    let a = pot.area_estimate(&slice, &[6, 7, 8, 9, 10], &GreenOptions::default()).unwrap();
    let ratios: Vec<f64> = a.windows(2).map(|w| w[0] / w[1]).collect();
    (
        ratios.iter().all(|&q| q >= 1.5),
        format!("area bounds {:.4?}, ratios {:.2?} (limit 1.5)", a, ratios),
    )
}

fn determinism() -> Outcome {
    let f = horseshoe();
    let r = f.filtration_radius().unwrap().radius;
    let certify = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| {
            let cover = build_julia_cover(&f, r, &CoverOptions::new(7)).unwrap();
            let cone = ConeParams::for_cover(&f, &cover, DEFAULT_ALPHA, DEFAULT_R).unwrap();
            verify_hyperbolicity(&f, &cover, &cone, 1.5).unwrap()
        })
    };
    let one = certify(1);
    let four = certify(4);
    let identical = one.to_json().unwrap() == four.to_json().unwrap();

    let mut tampered = one.clone();
    tampered.boxes[0].worst_ratio *= 0.5;
    let caught = recheck(&tampered).unwrap().mismatches.len();
    let clean = recheck(&one).unwrap().passed();

    let b = 0.1;
    let g = HenonMap::real(&[semi_parabolic_parameter(b), 0.0, 1.0], b).unwrap();
    let rg = g.filtration_radius().unwrap().radius;
    let cover = build_julia_cover(&g, rg, &CoverOptions::new(5)).unwrap();
    let cone = ConeParams::for_cover(&g, &cover, DEFAULT_ALPHA, DEFAULT_R).unwrap();
    let mixed = verify_dominated_splitting(&g, &cover, &cone).unwrap();
    let violations = sampling_oracle(&f, &one, &OracleOptions::new(20_000, 11)).violations
        + sampling_oracle(&g, &mixed, &OracleOptions::new(20_000, 12)).violations;
    (
        identical && caught > 0 && clean && violations == 0,
        format!(
            "1 vs 4 workers identical: {identical}; tampered box caught: {caught} mismatch(es), clean recheck: {clean}; oracle violations on verified boxes: {violations} ({} + {} verified boxes)",
            one.verified_count(),
            mixed.verified_count()
        ),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("automorphism suite", automorphism),
        ("Green functional equation", green_equation),
        ("fixed-point ground truth", fixed_points),
        ("horseshoe dominated splitting and hyperbolicity", horseshoe_certificate),
        ("semi-parabolic obstruction", semi_parabolic),
        ("J = J* desk check", j_equals_jstar),
        ("stable-manifold suite", stable_manifolds),
        ("one-dimensional companion", one_dimensional),
        ("measure-zero trend", measure_zero),
        ("determinism and soundness", determinism),
    ];
    let mut failures = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let (ok, detail) = match catch_unwind(AssertUnwindSafe(check)) {
            Ok(r) => r,
            Err(e) => {
                let msg = e
                    .downcast_ref::<String>()
                    .cloned()
                    .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_default();
                (false, format!("panicked: {msg}"))
            }
        };
        if !ok {
            failures += 1;
        }
        println!(
            "{} {:>2} {name}: {detail} [{:.2} s]",
            if ok { "PASS" } else { "FAIL" },
            k + 1,
            t.elapsed().as_secs_f64()
        );
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures > 0 {
        std::process::exit(1);
    }
}
