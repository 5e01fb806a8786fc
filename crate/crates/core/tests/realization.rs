//! End-to-end prototype: a chained twist system whose invariant set traces
//! the 4-strand skeleton word s3 s1 s2 s2 s1 s3, through the staged
//! localized-rotation construction.

use std::collections::BTreeSet;
use std::sync::Arc;

use braidforce::dynamics::{
    build_chained_isotopy, ChainParams, Composed, LocalRotation, PlaneMap,
};
use braidforce::forcing::{classify_case, force, Case, ForceOptions, ForcingQuery, Realization};
use braidforce::word::{ColoredWord, PositiveWord};

fn stage_a(k: usize) -> Vec<Arc<dyn PlaneMap<f64>>> {
    let delta = -std::f64::consts::PI / k as f64;
    (0..k)
        .map(|_| {
            let left = LocalRotation { center: (-0.5, 0.0), r1: 0.3, r2: 0.48, angle: delta };
            let right = LocalRotation { center: (0.5, 0.0), r1: 0.3, r2: 0.48, angle: delta };
            Arc::new(Composed { maps: vec![Arc::new(left), Arc::new(right)] })
                as Arc<dyn PlaneMap<f64>>
        })
        .collect()
}

fn stage_b(k: usize) -> Vec<Arc<dyn PlaneMap<f64>>> {
    let delta = -2.0 * std::f64::consts::PI / k as f64;
    (0..k)
        .map(|_| {
            Arc::new(LocalRotation { center: (0.0, 0.0), r1: 0.3, r2: 0.7, angle: delta })
                as Arc<dyn PlaneMap<f64>>
        })
        .collect()
}

fn example_realization(k: usize) -> Realization<f64> {
    let mut gs = stage_a(k);
    gs.extend(stage_b(k));
    gs.extend(stage_a(k));
    let chain = build_chained_isotopy(gs, ChainParams::default()).expect("twist check passes");
    Realization {
        chain,
        invariant_set: vec![(-0.75, 0.0), (-0.25, 0.0), (0.25, 0.0), (0.75, 0.0)],
    }
}

#[test]
fn staged_realization_forces_a_fixed_point() {
    let t0 = std::time::Instant::now();
    let k = 6;
    let realization = example_realization(k);
    println!("chain period: {} ({:?})", realization.chain.period(), t0.elapsed());
    assert!(realization.chain.marker_deviation().unwrap() < 1e-9);

    let skeleton = PositiveWord::new(4, vec![3, 1, 2, 2, 1, 3]).unwrap();
    let case = classify_case(&realization, &skeleton).unwrap();
    println!("case: {case:?} ({:?})", t0.elapsed());
    assert_eq!(case, Case::DualRoute { lambda: 3 * k });

    let gamma = PositiveWord::new(5, vec![4, 1, 2, 3, 2, 2, 3, 2, 1, 4]).unwrap();
    let colored = ColoredWord::new(gamma, BTreeSet::from([3])).unwrap();
    let query = ForcingQuery { skeleton, colored, realization: Some(realization) };
    let report = force(&query, &ForceOptions::default()).unwrap();
    println!("elapsed: {:?}", t0.elapsed());
    println!("lower bound: {}", report.lower_bound);
    println!("found: {}", report.found.len());
    for f in &report.found {
        println!(
            "  residual {:.2e} inside {} x0..3 {:?}",
            f.residual,
            f.inside_disc,
            &f.strand[..4.min(f.strand.len())]
        );
    }
    if let Some(checks) = &report.orbit_checks {
        println!("checks ok: {} violations: {:?}", checks.ok(), checks.violations);
    }
    assert_eq!(report.lower_bound, 1);
    assert!(!report.found.is_empty());
    let best = &report.found[0];
    assert!(best.residual < 1e-9);
    assert!(best.inside_disc);
    assert!(report.orbit_checks.as_ref().unwrap().ok());
}
