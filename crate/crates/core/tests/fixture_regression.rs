//! Frozen values for the two marker-level fixture cases. Reference numbers
//! were computed separately with 60-digit arithmetic from the closed forms.

#![allow(clippy::excessive_precision)]

use dipstr_core::{
    augment, compute_lr, empirical_k_hat, parse_allele, theta_moments, AlleleDatabase, CaseInput,
    DipClass, Genotype, KPrior, Method, Observation, PriorConfig,
};

fn base_db() -> AlleleDatabase {
    let counts = [
        ("L9", 1),
        ("L10", 18),
        ("L11", 25),
        ("L12", 20),
        ("L13", 15),
        ("S11", 40),
        ("S12", 30),
        ("S13", 27),
        ("S14", 20),
        ("S15", 10),
    ];
    let entries = counts
        .iter()
        .flat_map(|&(label, c)| std::iter::repeat_n(parse_allele(label).unwrap(), c))
        .collect();
    AlleleDatabase::new(entries, "fixture")
}

fn case(suspect: (&str, &str), observed: &[&str]) -> CaseInput {
    CaseInput::new(
        "MID1950-D20S473",
        Genotype::parse("S11", "S11").unwrap(),
        Genotype::parse(suspect.0, suspect.1).unwrap(),
        Observation::from_alleles(observed.iter().map(|l| parse_allele(l).unwrap()).collect())
            .unwrap(),
    )
    .unwrap()
}

fn case1() -> CaseInput {
    case(("L2", "L13"), &["L2", "L13"])
}

fn case2() -> CaseInput {
    case(("L2", "S12"), &["L2"])
}

fn prior(alpha: f64, m: usize) -> PriorConfig {
    PriorConfig::new(m, alpha, KPrior::Uniform).unwrap()
}

// (alpha, full, plugin, gt) as log10 LR
const CASE1: [(f64, f64, f64, f64); 3] = [
    (
        0.5,
        2.9904023705338536,
        2.9789973902802641,
        3.0012360245363161,
    ),
    (
        1.0,
        2.8788955009117458,
        2.8715736096210702,
        2.8929471229856999,
    ),
    (2.0, 2.7323964923537253, 2.72858615871099, 2.748394602449165),
];

const CASE2: [(f64, f64, f64, f64); 3] = [
    (
        0.5,
        2.0718254815880171,
        2.0664524934779085,
        2.0773234016055053,
    ),
    (
        1.0,
        1.959661501513313,
        1.9562425592752544,
        1.9668241145559839,
    ),
    (
        2.0,
        1.8100583432790316,
        1.8081956472030182,
        1.8182500092686427,
    ),
];

fn check(case: &CaseInput, table: &[(f64, f64, f64, f64)]) {
    let db = base_db();
    for &(alpha, full, plugin, gt) in table {
        for (method, expected) in [
            (Method::FullBayes, full),
            (Method::ClassicalPlugin, plugin),
            (Method::GoodTuringEmpirical, gt),
        ] {
            let got = compute_lr(case, &db, &prior(alpha, 100), method)
                .unwrap()
                .log10_lr;
            assert!(
                (got - expected).abs() < 1e-12,
                "alpha={alpha} {method}: {got} vs {expected}"
            );
        }
    }
}

#[test]
fn case1_log10_lr() {
    check(&case1(), &CASE1);
}

#[test]
fn case2_log10_lr() {
    check(&case2(), &CASE2);
}

#[test]
fn augmented_summaries() {
    let db = base_db();
    assert_eq!(db.len(), 206);
    let c1 = case1();
    let a1 = augment(&db, &c1.suspect, &c1.victim);
    assert_eq!((a1.n_l(), a1.n_s(), a1.total()), (81, 129, 210));
    assert_eq!((a1.l.k_b, a1.l.n1), (6, 2));
    let c2 = case2();
    let a2 = augment(&db, &c2.suspect, &c2.victim);
    assert_eq!((a2.n_l(), a2.l.k_b, a2.l.n1), (80, 6, 2));

    let k_hat = |alpha| empirical_k_hat(&a1.l, alpha, 100);
    assert_eq!((k_hat(0.5), k_hat(1.0), k_hat(2.0)), (10, 8, 7));
}

#[test]
fn case1_side_l_moments() {
    let db = base_db();
    let c1 = case1();
    let adb = augment(&db, &c1.suspect, &c1.victim);
    let l2 = parse_allele("L2").unwrap();
    let l13 = parse_allele("L13").unwrap();
    let p = prior(1.0, 100);
    let two = theta_moments(DipClass::L, &adb, &p, &l2, Some(&l13)).unwrap();
    let rel = |a: f64, b: f64| ((a - b) / b).abs();
    assert!(rel(two.e_theta_i_theta_j.unwrap(), 6.6080680000435820862e-4) < 1e-12);
    let single = theta_moments(DipClass::L, &adb, &p, &l13, None).unwrap();
    assert!(rel(single.e_theta_i_sq, 5.9472612000392238776e-3) < 1e-12);
    let single = theta_moments(DipClass::L, &adb, &p, &l2, None).unwrap();
    assert!(rel(single.e_theta_i_times_othermass, 5.3917338958824770972e-3) < 1e-12);
}

#[test]
fn larger_m_changes_nothing_visible() {
    let db = base_db();
    let at = |m| {
        compute_lr(&case1(), &db, &prior(1.0, m), Method::FullBayes)
            .unwrap()
            .log10_lr
    };
    let (a, b, c) = (at(50), at(100), at(200));
    assert!((a - b).abs() < 1e-9 && (b - c).abs() < 1e-9);
}
