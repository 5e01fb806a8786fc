//! Acceptance suite: the documented behaviour of the library on the worked
//! examples, the structural invariance sweeps, and the end-to-end forcing
//! run.  Each test prints one PASS line.

use std::collections::{BTreeSet, HashSet};
use std::sync::Arc;
use std::time::Instant;

use braidforce::braid::{ev, is_free, same_class, DiscretizedBraid};
use braidforce::colored::{ColoredBraid, Fiber, FiberOptions};
use braidforce::conley::{
    check_duality, check_stabilization, class_index, ConleyError, IndexOptions,
};
use braidforce::dynamics::{
    build_chained_isotopy, psi_rotation, rotation_gf, ChainParams, ChainedIsotopy, Composed,
    GeneratingFn, GfMap, LocalRotation, MoserFlow, PlaneMap, RecurrenceSystem, Step,
};
use braidforce::forcing::{classify_case, force, Case, ForceOptions, ForcingQuery, Realization};
use braidforce::lattice::{LevelState, StateSpace};
use braidforce::word::{conjugacy_class, Color, ColoredWord, PositiveWord};
use braidforce::{rat_to_f64, rati};

fn w(m: usize, letters: &[usize]) -> PositiveWord {
    PositiveWord::new(m, letters.to_vec()).unwrap()
}

fn pass(criterion: usize, start: Instant, detail: &str) {
    println!(
        "[acceptance] criterion {criterion}: PASS ({:.2?}) {detail}",
        start.elapsed()
    );
}

#[test]
fn criterion_01_period_two_class_suite() {
    let start = Instant::now();
    let b = DiscretizedBraid::from_ints(&[&[1, 4, 1], &[2, 2, 2], &[3, 3, 3]]).unwrap();
    let bp = DiscretizedBraid::from_ints(&[&[4, 1, 4], &[2, 2, 2], &[3, 3, 3]]).unwrap();
    let b2 = DiscretizedBraid::from_ints(&[&[1, 4, 1, 1], &[2, 2, 2, 2], &[3, 3, 3, 3]]).unwrap();

    assert_eq!(b.braid_word().letters(), &[1, 2, 2, 1]);
    assert_eq!(bp.braid_word().letters(), &[2, 1, 1, 2]);
    let class = conjugacy_class(&w(3, &[1, 2, 2, 1])).unwrap();
    assert_eq!(class.members.len(), 4);
    assert!(!same_class(&b, &bp).unwrap());
    assert!(!is_free(&b).unwrap());
    assert!(is_free(&b2).unwrap());
    assert!(start.elapsed().as_secs_f64() < 1.0, "budget exceeded: {:?}", start.elapsed());
    pass(1, start, "words, class size 4, disjoint components, freeness");
}

#[test]
fn criterion_02_color_projection_and_conjugacy() {
    let start = Instant::now();
    let gw = ColoredWord::new(w(3, &[2, 1, 2]), BTreeSet::from([2])).unwrap();
    assert_eq!(gw.project(Color::Black).unwrap().letters(), &[1]);
    // Cycling once relabels the red strand to position 3.
    let variant = ColoredWord::new(w(3, &[1, 2, 2]), BTreeSet::from([3])).unwrap();
    assert!(gw.colored_conjugate(&variant).unwrap());
    assert!(start.elapsed().as_secs_f64() < 1.0, "budget exceeded: {:?}", start.elapsed());
    pass(2, start, "projection to s1 and the relabelled conjugate");
}

#[test]
fn criterion_03_five_strand_index() {
    let start = Instant::now();
    let gamma = w(5, &[4, 1, 2, 3, 2, 2, 3, 2, 1, 4]);
    let cw = ColoredWord::new(gamma, BTreeSet::from([3])).unwrap();
    let report = class_index(&cw, &IndexOptions::default()).unwrap();
    assert_eq!(report.homology.betti, vec![0, 1]);
    assert!(report.homology.torsion.iter().all(|t| t.is_empty()));
    assert_eq!(report.homology.poincare(), "t");
    assert_eq!(report.lower_bound(), 1);
    assert!(start.elapsed().as_secs_f64() < 10.0, "budget exceeded: {:?}", start.elapsed());
    pass(3, start, "P_t = t with exact membership");
}

fn concatenation_block(a: i32) -> Vec<usize> {
    match a {
        0 => vec![4, 1, 2, 3, 2, 2, 3, 2, 1, 4],
        -1 => vec![4, 1, 2, 3, 3, 2, 1, 4],
        1 => vec![4, 1, 3, 2, 2, 3, 1, 4],
        _ => unreachable!(),
    }
}

fn rotation_count(seq: &[i32]) -> usize {
    let mut rotations = HashSet::new();
    let mut v = seq.to_vec();
    for _ in 0..seq.len() {
        v.rotate_left(1);
        rotations.insert(v.clone());
    }
    rotations.len()
}

#[test]
fn criterion_04_concatenation_family() {
    let start = Instant::now();
    for k in 0..=3usize {
        let mut seqs: Vec<Vec<i32>> = vec![vec![]];
        for _ in 0..=k {
            seqs = seqs
                .into_iter()
                .flat_map(|s| {
                    [-1, 0, 1].iter().map(move |&a| {
                        let mut v = s.clone();
                        v.push(a);
                        v
                    })
                })
                .collect();
        }
        for seq in seqs {
            let mut letters = Vec::new();
            for &a in &seq {
                letters.extend(concatenation_block(a));
            }
            let gamma = PositiveWord::new(5, letters).unwrap();
            let cw = ColoredWord::new(gamma, BTreeSet::from([3])).unwrap();
            let r = seq.iter().filter(|&&a| a == 0).count();
            let constant = seq.iter().all(|&a| a == -1) || seq.iter().all(|&a| a == 1);
            match class_index(&cw, &IndexOptions::default()) {
                Ok(report) => {
                    assert!(!constant, "{seq:?} should be refused as improper");
                    // The index is concentrated in degree r with exactly one
                    // monomial; the rank equals the number of distinct
                    // cyclic rotations of the block sequence (one for the
                    // all-zero sequences), each rotation carrying one fiber
                    // component of index S^r.
                    let mut expect = vec![0; r + 1];
                    expect[r] = rotation_count(&seq);
                    assert_eq!(report.homology.betti, expect, "sequence {seq:?}");
                    assert_eq!(report.lower_bound(), 1, "sequence {seq:?}");
                    assert_eq!(report.components.len(), rotation_count(&seq));
                }
                Err(ConleyError::Improper(_)) => {
                    assert!(constant, "{seq:?} wrongly refused");
                }
                Err(e) => panic!("{seq:?}: {e}"),
            }
        }
    }
    assert!(start.elapsed().as_secs_f64() < 60.0, "budget exceeded: {:?}", start.elapsed());
    pass(4, start, "all symbol sequences for k <= 3, refusals exact");
}

#[test]
fn criterion_05_long_word_index() {
    let start = Instant::now();
    let letters =
        vec![2, 1, 2, 3, 2, 3, 2, 3, 1, 2, 2, 1, 2, 3, 2, 3, 2, 1, 2, 1, 2, 3, 2, 3, 2, 1, 2];
    let gamma = PositiveWord::new(4, letters).unwrap();
    let cw = ColoredWord::new(gamma, BTreeSet::from([2])).unwrap();
    let report = class_index(&cw, &IndexOptions::default()).unwrap();
    assert_eq!(report.homology.betti, vec![0, 0, 0, 0, 1, 1]);
    assert!(report.homology.torsion.iter().all(|t| t.is_empty()));
    assert_eq!(report.lower_bound(), 2);
    assert!(report.flags.proper && report.flags.all_acylindrical());
    assert!(start.elapsed().as_secs_f64() < 60.0, "budget exceeded: {:?}", start.elapsed());
    pass(5, start, "homology in degrees 4 and 5, lower bound 2");
}

/// Enumerate every proper bounded one-red-strand class over regular
/// skeletons with `mb` black strands and period `d`, up to relabelling,
/// and feed each class representative to the visitor.
fn sweep_classes(
    mb: usize,
    d: usize,
    opts: &FiberOptions,
    visit: &mut impl FnMut(&ColoredBraid, &Fiber),
) {
    // Regular skeletons: one strict order per slice.
    let mut perms: Vec<Vec<u8>> = Vec::new();
    let mut idx: Vec<u8> = (0..mb as u8).collect();
    permutations(&mut idx, 0, &mut perms);
    let mut skeleton_seen: HashSet<(Vec<u8>, Vec<usize>)> = HashSet::new();
    let mut counter = vec![0usize; d];
    loop {
        // Build the skeleton: black strand b has rank perms[counter[j]][b]
        // at slice j.
        let strands: Vec<Vec<braidforce::Rat>> = (0..mb)
            .map(|b| {
                let mut row: Vec<braidforce::Rat> = (0..d)
                    .map(|j| rati(2 * (perms[counter[j]][b] as i64 + 1)))
                    .collect();
                row.push(row[0].clone());
                row
            })
            .collect();
        if let Ok(skeleton) = DiscretizedBraid::from_strands(strands) {
            if skeleton.validate().is_ok() {
                let (space, st) = StateSpace::from_braid(&skeleton);
                let key = space.canonical_key(&st);
                if skeleton_seen.insert(key) {
                    sweep_reds(&skeleton, opts, visit);
                }
            }
        }
        // Advance the mixed-radix counter.
        let mut k = 0;
        loop {
            if k == d {
                return;
            }
            counter[k] += 1;
            if counter[k] < perms.len() {
                break;
            }
            counter[k] = 0;
            k += 1;
        }
    }
}

fn permutations(v: &mut Vec<u8>, k: usize, out: &mut Vec<Vec<u8>>) {
    if k == v.len() {
        out.push(v.clone());
        return;
    }
    for i in k..v.len() {
        v.swap(k, i);
        permutations(v, k + 1, out);
        v.swap(k, i);
    }
}

fn sweep_reds(
    skeleton: &DiscretizedBraid,
    opts: &FiberOptions,
    visit: &mut impl FnMut(&ColoredBraid, &Fiber),
) {
    let mb = skeleton.strand_count();
    let d = skeleton.period();
    let gaps = mb + 1;
    let mut seen: HashSet<LevelState> = HashSet::new();
    let mut path = vec![0usize; d];
    loop {
        // Red anchors at odd heights between the even skeleton levels.
        let mut red: Vec<braidforce::Rat> =
            path.iter().map(|&g| rati(2 * g as i64 + 1)).collect();
        red.push(red[0].clone());
        let mut strands = vec![red];
        strands.extend(skeleton.strands().iter().cloned());
        let braid = DiscretizedBraid::from_strands(strands).expect("odd/even anchors close up");
        let cb = ColoredBraid::new(1, braid).expect("red strand closes to itself");
        let (space, st) = StateSpace::from_braid(cb.braid());
        if !seen.contains(&st) {
            if let Ok(fiber) = Fiber::build(&cb, opts) {
                for comp in &fiber.components {
                    for s in comp {
                        seen.insert(s.clone());
                    }
                }
                let flags = fiber.flags();
                if flags.proper && flags.bounded {
                    visit(&cb, &fiber);
                }
            } else {
                seen.insert(st);
            }
            let _ = &space;
        }
        let mut k = 0;
        loop {
            if k == d {
                return;
            }
            path[k] += 1;
            if path[k] < gaps {
                break;
            }
            path[k] = 0;
            k += 1;
        }
    }
}

#[test]
fn criterion_06_stabilization_sweep() {
    let start = Instant::now();
    let opts = IndexOptions::default();
    let mut classes = 0usize;
    for mb in 1..=3usize {
        for d in 2..=4usize {
            sweep_classes(mb, d, &opts.fiber, &mut |cb, _fiber| {
                classes += 1;
                let ok = check_stabilization(cb, &opts)
                    .unwrap_or_else(|e| panic!("stabilization check failed: {e}"));
                assert!(ok, "stabilization violated on a class with mb={mb} d={d}");
            });
        }
    }
    assert!(classes > 100, "sweep visited only {classes} classes");
    assert!(start.elapsed().as_secs_f64() < 300.0, "budget exceeded: {:?}", start.elapsed());
    pass(6, start, &format!("{classes} proper bounded classes, index invariant under extension"));
}

#[test]
fn criterion_07_duality_sweep() {
    let start = Instant::now();
    let opts = IndexOptions::default();
    let mut classes = 0usize;
    for mb in 1..=3usize {
        for d in [2usize, 4] {
            sweep_classes(mb, d, &opts.fiber, &mut |cb, _fiber| {
                classes += 1;
                let ok = check_duality(cb, &opts)
                    .unwrap_or_else(|e| panic!("duality check failed: {e}"));
                assert!(ok, "duality violated on a class with mb={mb} d={d}");
            });
        }
    }
    assert!(classes > 100, "sweep visited only {classes} classes");
    assert!(start.elapsed().as_secs_f64() < 300.0, "budget exceeded: {:?}", start.elapsed());
    pass(7, start, &format!("{classes} classes, dual index suspended by two degrees"));
}

#[test]
fn criterion_08_interpolation_accuracy() {
    let start = Instant::now();
    let cases: Vec<(&str, Arc<dyn GeneratingFn<f64>>)> = vec![
        ("quarter rotation", Arc::new(rotation_gf::<f64>(std::f64::consts::PI / 2.0).unwrap())),
        ("order-four modified rotation", Arc::new(psi_rotation::<f64>(4).unwrap())),
    ];
    for (name, gf) in cases {
        let flow = MoserFlow::new(gf.clone());
        let map = GfMap::new(gf);
        let mut worst_end = 0.0f64;
        let mut worst_chord = 0.0f64;
        for i in 0..21 {
            for j in 0..21 {
                let x = -1.0 + i as f64 / 10.0;
                let y = -1.0 + j as f64 / 10.0;
                let (fx, fy) = map.forward(x, y).unwrap();
                let (x1, y1) = flow.psi(1.0, x, y).unwrap();
                worst_end = worst_end.max((x1 - fx).abs()).max((y1 - fy).abs());
                let (x0, _) = flow.psi(0.0, x, y).unwrap();
                for step in 1..8 {
                    let t = step as f64 / 8.0;
                    let (xt, _) = flow.psi(t, x, y).unwrap();
                    worst_chord = worst_chord.max((xt - (x0 + t * (x1 - x0))).abs());
                }
            }
        }
        assert!(worst_end < 1e-6, "{name}: endpoint deviation {worst_end}");
        assert!(worst_chord < 1e-8, "{name}: chord deviation {worst_chord}");
    }
    assert!(start.elapsed().as_secs_f64() < 30.0, "budget exceeded: {:?}", start.elapsed());
    pass(8, start, "time-one map within 1e-6, straight x-projections within 1e-8");
}

#[test]
fn criterion_09_action_gradient_consistency() {
    use rand::{Rng, SeedableRng};
    let start = Instant::now();
    let d = 4;
    let quarter: Arc<dyn GeneratingFn<f64>> =
        Arc::new(rotation_gf(std::f64::consts::PI / 2.0).unwrap());
    let third: Arc<dyn GeneratingFn<f64>> =
        Arc::new(rotation_gf(std::f64::consts::PI / 3.0).unwrap());
    let psi: Arc<dyn GeneratingFn<f64>> = Arc::new(psi_rotation(4).unwrap());
    let systems: Vec<RecurrenceSystem<f64>> = vec![
        RecurrenceSystem::from_steps((0..d).map(|_| Step::Closed(quarter.clone())).collect()),
        RecurrenceSystem::from_steps((0..d).map(|_| Step::Closed(psi.clone())).collect()),
        RecurrenceSystem::from_steps(
            (0..d)
                .map(|j| {
                    Step::Closed(if j % 2 == 0 { third.clone() } else { quarter.clone() })
                })
                .collect(),
        ),
    ];
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
    let eps = 1e-6;
    for rs in &systems {
        for _ in 0..100 {
            let xs: Vec<f64> = (0..d).map(|_| rng.gen_range(-0.9..0.9)).collect();
            let res = rs.residual(&xs).unwrap();
            for k in 0..d {
                let mut hi = xs.clone();
                hi[k] += eps;
                let mut lo = xs.clone();
                lo[k] -= eps;
                let grad = (rs.action(&hi).unwrap() - rs.action(&lo).unwrap()) / (2.0 * eps);
                let denom = res[k].abs().max(1.0);
                assert!(
                    (grad + res[k]).abs() / denom < 1e-6,
                    "gradient {} vs -R {}",
                    grad,
                    -res[k]
                );
            }
        }
    }
    assert!(start.elapsed().as_secs_f64() < 10.0, "budget exceeded: {:?}", start.elapsed());
    pass(9, start, "finite-difference action gradient equals -R on 300 random strands");
}

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

fn staged_realization(k: usize) -> Realization<f64> {
    let mut gs = stage_a(k);
    gs.extend(stage_b(k));
    gs.extend(stage_a(k));
    let chain: ChainedIsotopy<f64> =
        build_chained_isotopy(gs, ChainParams::default()).expect("twist check passes");
    Realization {
        chain,
        invariant_set: vec![(-0.75, 0.0), (-0.25, 0.0), (0.25, 0.0), (0.75, 0.0)],
    }
}

#[test]
fn criterion_10_end_to_end_forcing() {
    let start = Instant::now();
    let k = 6;
    let realization = staged_realization(k);
    assert!(rat_to_f64(&rati(0)) == 0.0);
    assert!(realization.chain.marker_deviation().unwrap() < 1e-9);

    let skeleton = w(4, &[3, 1, 2, 2, 1, 3]);
    let case = classify_case(&realization, &skeleton).unwrap();
    assert_eq!(case, Case::DualRoute { lambda: 3 * k });

    let gamma = w(5, &[4, 1, 2, 3, 2, 2, 3, 2, 1, 4]);
    let colored = ColoredWord::new(gamma, BTreeSet::from([3])).unwrap();
    let query = ForcingQuery { skeleton, colored, realization: Some(realization) };
    let report = force(&query, &ForceOptions::default()).unwrap();

    assert_eq!(report.lower_bound, 1);
    assert!(report.found.len() >= report.lower_bound);
    for orbit in &report.found {
        assert!(orbit.residual < 1e-9, "residual {}", orbit.residual);
        assert!(orbit.inside_disc, "found orbit leaves the open unit disc");
    }
    let checks = report.orbit_checks.as_ref().unwrap();
    assert!(checks.transversal, "{:?}", checks.violations);
    assert!(checks.crossings_positive, "{:?}", checks.violations);
    assert!(checks.ok(), "{:?}", checks.violations);
    for &(_, crossings, link) in &checks.links {
        assert_eq!(crossings % 2, 0);
        assert_eq!(link, crossings / 2);
    }
    assert!(start.elapsed().as_secs_f64() < 300.0, "budget exceeded: {:?}", start.elapsed());
    pass(
        10,
        start,
        &format!(
            "{} stationary strands inside the disc, all crossings positive",
            report.found.len()
        ),
    );
}
