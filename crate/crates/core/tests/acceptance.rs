//! Acceptance suite: one line per criterion, non-zero exit if any gate fails.
//!
//! Oracles here are independent of the library where possible: determinants come
//! from nalgebra's LU, Kronecker products and interpolation are rebuilt locally.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use nalgebra::DMatrix;
use rand::Rng;
use rand_chacha::ChaCha20Rng;

use hyperinv::audit::{audit, claims_experiment, AuditConfig, AuditVerdict, Group, Quantity};
use hyperinv::bloch::{
    apply_local, gell_mann_bases, induced_matrix, reconstruct, represent, BlochBasis, GroupTag, State,
};
use hyperinv::hyperdet::{
    det222, det222_epsilon, hdet_with, hyper_charpoly_interpolated, hyper_charpoly_with, HdetConfig,
};
use hyperinv::hypermatrix::{chain_multiply, mode_multiply, paired_identity};
use hyperinv::invariants::{
    compare_fingerprints, fingerprint, fingerprint_with_bases, CompareScope, Guarantee, Verdict,
};
use hyperinv::io::StateFile;
use hyperinv::sampling::{
    ginibre, random_bloch_rotation, random_chain, random_density, random_sl, rng_from_seed, DEFAULT_COND_CAP,
};
use hyperinv::{c64, Complex64, HyperMatrix, Matrix};

struct Outcome {
    pass: bool,
    detail: String,
}

fn gate(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn na(m: &Matrix) -> DMatrix<Complex64> {
    DMatrix::from_fn(m.rows(), m.cols(), |i, j| m[(i, j)])
}

fn oracle_det(m: &Matrix) -> Complex64 {
    na(m).determinant()
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / a.norm().max(b.norm()).max(1e-300)
}

fn random_tensor(format: &[usize], rng: &mut ChaCha20Rng) -> HyperMatrix {
    let n = format.iter().product();
    HyperMatrix::new(format.to_vec(), ginibre(1, n, rng).into_vec()).unwrap()
}

fn e(x: f64) -> String {
    format!("{x:.2e}")
}

fn criterion_1() -> Outcome {
    let mut rng = rng_from_seed(101);
    let cfg = HdetConfig::default();
    let mut worst: f64 = 0.0;
    for t in 0..100 {
        let n = if t % 2 == 0 { 4 } else { 9 };
        let m = ginibre(n, n, &mut rng);
        let h = hdet_with(&HyperMatrix::from_matrix(&m), &cfg).unwrap();
        worst = worst.max(rel(h, oracle_det(&m)));
    }
    gate(worst < 1e-10, format!("max rel err {} over 100 matrices of size 4 and 9 (tol 1e-10)", e(worst)))
}

fn criterion_2() -> Outcome {
    let mut rng = rng_from_seed(102);
    let cfg = HdetConfig::default();
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let a = random_tensor(&[4, 4, 4, 4], &mut rng);
        let base = hdet_with(&a, &cfg).unwrap();
        let k = rng.random_range(0..4);
        let b = ginibre(4, 4, &mut rng);
        let moved = hdet_with(&mode_multiply(&b, k, &a).unwrap(), &cfg).unwrap();
        worst = worst.max(rel(moved, oracle_det(&b) * base));
    }
    gate(worst < 1e-8, format!("max rel err {} over 50 tensors 4x4x4x4 (tol 1e-8)", e(worst)))
}

fn criterion_3() -> Outcome {
    let mut rng = rng_from_seed(103);
    let mut forms: f64 = 0.0;
    for _ in 0..1000 {
        let a = random_tensor(&[2, 2, 2], &mut rng);
        let (x, y) = (det222(&a).unwrap(), det222_epsilon(&a).unwrap());
        forms = forms.max((x - y).norm() / x.norm().max(1.0));
    }
    let mut mult: f64 = 0.0;
    for _ in 0..100 {
        let a = random_tensor(&[2, 2, 2], &mut rng);
        let k = rng.random_range(0..3);
        let b = ginibre(2, 2, &mut rng);
        let want = oracle_det(&b).powu(2) * det222(&a).unwrap();
        mult = mult.max(rel(det222(&mode_multiply(&b, k, &a).unwrap()).unwrap(), want));
    }
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let t = 1.0 / 3f64.sqrt();
    let ghz =
        HyperMatrix::from_fn(
            vec![2, 2, 2],
            |i| if i == [0, 0, 0] || i == [1, 1, 1] { c64(s, 0.0) } else { c64(0.0, 0.0) },
        )
        .unwrap();
    let w =
        HyperMatrix::from_fn(vec![2, 2, 2], |i| if i.iter().sum::<usize>() == 1 { c64(t, 0.0) } else { c64(0.0, 0.0) })
            .unwrap();
    let g = (det222(&ghz).unwrap() - c64(0.25, 0.0)).norm();
    let wv = det222(&w).unwrap().norm();
    gate(
        forms < 1e-12 && mult < 1e-10 && g < 1e-12 && wv < 1e-12,
        format!(
            "forms agree to {} (1e-12), multiplicativity {} (1e-10), |GHZ-1/4| {}, |W| {} (1e-12)",
            e(forms),
            e(mult),
            e(g),
            e(wv)
        ),
    )
}

fn criterion_4() -> Outcome {
    let mut rng = rng_from_seed(104);
    let shapes: [&[usize]; 8] = [&[2], &[3], &[2, 2], &[2, 3], &[3, 3], &[2, 2, 2], &[2, 3, 2], &[3, 3, 3]];
    let mut round: f64 = 0.0;
    for dims in shapes {
        for rank in [1, 3] {
            let rho = random_density(dims, rank, &mut rng).unwrap();
            let back = reconstruct(&represent(&rho).unwrap(), dims).unwrap();
            round = round.max(back.matrix().max_abs_diff(rho.matrix()));
        }
    }
    let mut chain_err: f64 = 0.0;
    for _ in 0..50 {
        let rho = random_density(&[2, 2], 4, &mut rng).unwrap();
        let (g, _) = random_chain(&[2, 2], GroupTag::SpecialLinear, &mut rng, DEFAULT_COND_CAP).unwrap();
        let direct = represent(&apply_local(&rho, &g).unwrap()).unwrap();
        let via = chain_multiply(&g.induced().unwrap(), &represent(&rho).unwrap()).unwrap();
        chain_err = chain_err.max(direct.max_abs_diff(&via));
    }
    gate(
        round < 1e-12 && chain_err < 1e-10,
        format!(
            "round trip {} (1e-12) over dims in {{2,3}}, parties <= 3; induced chain {} (1e-10) over 50 SL chains",
            e(round),
            e(chain_err)
        ),
    )
}

fn kron(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let (p, q) = (b.nrows(), b.ncols());
    DMatrix::from_fn(a.nrows() * p, a.ncols() * q, |i, j| a[(i / p, j / q)] * b[(i % p, j % q)])
}

fn criterion_5() -> Outcome {
    let mut rng = rng_from_seed(105);
    let mut induced: f64 = 0.0;
    for (d, count) in [(2, 100), (3, 50)] {
        for _ in 0..count {
            let a = random_sl(d, &mut rng, DEFAULT_COND_CAP).unwrap().matrix;
            let b = induced_matrix(&a).unwrap().into_matrix();
            induced = induced.max((oracle_det(&b) - c64(1.0, 0.0)).norm());
        }
    }
    let mut lemma: f64 = 0.0;
    for m in 1..=4 {
        for n in 1..=4 {
            let a = na(&ginibre(m, m, &mut rng));
            let c = na(&ginibre(n, n, &mut rng));
            let lhs = kron(&c.transpose(), &a).determinant();
            let rhs = a.determinant().powu(n as u32) * c.determinant().powu(m as u32);
            lemma = lemma.max(rel(lhs, rhs));
        }
    }
    gate(
        induced < 1e-8 && lemma < 1e-10,
        format!(
            "|det B - 1| {} (1e-8) over 100 SL(2) + 50 SL(3); Kronecker det identity {} (1e-10)",
            e(induced),
            e(lemma)
        ),
    )
}

fn criterion_6() -> Outcome {
    let mut rng = rng_from_seed(106);
    let mut worst: f64 = 0.0;
    let mut verdicts = true;
    for s in 0..10 {
        let rank = 1 + s % 3;
        let rho = State::Density(random_density(&[2, 2, 2, 2], rank, &mut rng).unwrap());
        let cfg = AuditConfig::new(Group::Slocc, 20, 1e-6, 600 + s as u64);
        let reports = audit(&rho, &[Quantity::Entry("hdet.c0@v1".into())], &cfg).unwrap();
        worst = worst.max(reports[0].max_relative_deviation);
        verdicts &= reports[0].verdict == AuditVerdict::Invariant;
    }
    gate(
        worst < 1e-6 && verdicts,
        format!("constant coefficient max rel dev {} (1e-6) over 10 states x 20 SL chains; all verdicts INVARIANT: {verdicts}", e(worst)),
    )
}

/// Solves the Vandermonde system for the coefficients through `(x_j, y_j)`.
fn vandermonde_fit(xs: &[f64], ys: &[Complex64]) -> Vec<Complex64> {
    let n = xs.len();
    let v = DMatrix::from_fn(n, n, |i, j| c64(xs[i].powi(j as i32), 0.0));
    let y = nalgebra::DVector::from_column_slice(ys);
    v.lu().solve(&y).expect("distinct nodes").iter().copied().collect()
}

fn criterion_7() -> Outcome {
    let mut rng = rng_from_seed(107);
    let cfg = HdetConfig::default();
    let ident = paired_identity(4, 4).unwrap();
    let (mut interp, mut oracle, mut constant): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for _ in 0..20 {
        let a = random_tensor(&[4, 4, 4, 4], &mut rng);
        let exact = hyper_charpoly_with(&a, &cfg).unwrap();
        let scale = exact.coeffs().iter().map(|z| z.norm()).fold(0.0, f64::max);
        let lib = hyper_charpoly_interpolated(&a, &cfg).unwrap();
        let xs: Vec<f64> = (0..=4).map(|j| 2.0 * (j as f64 - 2.0)).collect();
        let ys: Vec<Complex64> =
            xs.iter().map(|&x| hdet_with(&ident.scale(c64(x, 0.0)).sub(&a).unwrap(), &cfg).unwrap()).collect();
        let fit = vandermonde_fit(&xs, &ys);
        for (k, f) in fit.iter().enumerate() {
            interp = interp.max((exact.coeff(k) - lib.coeff(k)).norm() / scale);
            oracle = oracle.max((exact.coeff(k) - f).norm() / scale);
        }
        let h = hdet_with(&a, &cfg).unwrap();
        constant = constant.max((exact.coeff(0) - h).norm() / h.norm().max(1.0));
    }
    gate(
        interp < 1e-8 && oracle < 1e-8 && constant < 1e-12,
        format!(
            "vs library interpolation {}, vs local Vandermonde fit {} (1e-8, relative to largest coefficient); c0 vs (-1)^4 hdet {} (1e-12)",
            e(interp),
            e(oracle),
            e(constant)
        ),
    )
}

fn criterion_8() -> Outcome {
    let mut rng = rng_from_seed(108);
    let cfg = HdetConfig::default();
    let mut shared: f64 = 0.0;
    let mut per_party: f64 = 0.0;
    for dims in [&[2usize, 2][..], &[2, 2, 2, 2][..]] {
        let rho = random_density(dims, 2, &mut rng).unwrap();
        let base = fingerprint_with_bases(&rho, &gell_mann_bases(dims).unwrap(), &cfg).unwrap();
        for _ in 0..20 {
            let r = random_bloch_rotation(2, &mut rng);
            let b = BlochBasis::gell_mann(2).unwrap().rotate(&r).unwrap();
            let fp = fingerprint_with_bases(&rho, &vec![b; dims.len()], &cfg).unwrap();
            for (x, y) in base.entries.iter().zip(&fp.entries) {
                shared = shared.max((x.value - y.value).norm() / x.value.norm().max(1e-12));
            }
            let bases: Vec<BlochBasis> = dims
                .iter()
                .map(|&d| BlochBasis::gell_mann(d).unwrap().rotate(&random_bloch_rotation(d, &mut rng)).unwrap())
                .collect();
            let fp = fingerprint_with_bases(&rho, &bases, &cfg).unwrap();
            for (x, y) in base.entries.iter().zip(&fp.entries) {
                if x.guarantee != Guarantee::Claimed {
                    per_party = per_party.max((x.value - y.value).norm() / x.value.norm().max(1e-12));
                }
            }
        }
    }
    gate(
        shared < 1e-8 && per_party < 1e-8,
        format!(
            "shared SO(3) rotation, all entries {}; independent per-party rotations, guaranteed entries {} (1e-8), 2 and 4 qubits",
            e(shared),
            e(per_party)
        ),
    )
}

fn data_file(name: &str) -> State {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data/states").join(name);
    StateFile::parse(&std::fs::read_to_string(&path).unwrap()).unwrap().into_state().unwrap()
}

fn criterion_9() -> Outcome {
    let cfg = HdetConfig::default();
    let ghz = fingerprint(&data_file("ghz3.json"), &cfg).unwrap();
    let w = fingerprint(&data_file("w3.json"), &cfg).unwrap();
    let c = compare_fingerprints(&ghz, &w, 1e-8, CompareScope::All).unwrap();
    let separated =
        c.verdict == Verdict::NecessarilyInequivalent && c.differences.iter().any(|d| d.name == "pure.det222@v1");
    let mut rng = rng_from_seed(109);
    let mut consistent = true;
    for dims in [&[2usize, 2][..], &[2, 2, 2, 2][..]] {
        let rho = random_density(dims, 3, &mut rng).unwrap();
        let (g, _) = random_chain(dims, GroupTag::SpecialLinear, &mut rng, DEFAULT_COND_CAP).unwrap();
        let moved = apply_local(&rho, &g).unwrap();
        let a = fingerprint(&State::Density(rho), &cfg).unwrap();
        let b = fingerprint(&State::Density(moved), &cfg).unwrap();
        let c = compare_fingerprints(&a, &b, 1e-8, CompareScope::GuaranteedUnder(Group::Slocc)).unwrap();
        consistent &= c.verdict == Verdict::Consistent && c.compared > 0;
    }
    gate(
        separated && consistent,
        format!("ghz3 vs w3 NECESSARILY_INEQUIVALENT via det222: {separated}; rho vs SL-transformed rho CONSISTENT (2 and 4 qubits): {consistent}"),
    )
}

fn criterion_10() {
    let (seed, trials, tol) = (2024, 20, 1e-9);
    let studies = claims_experiment(seed, trials, tol, &HdetConfig::default()).unwrap();
    println!("[INFO] 10 standing experiment on claimed coefficients (seed {seed}, {trials} trials, tol {}):", e(tol));
    for s in studies {
        println!("       {} ({})", s.claim, s.state);
        for r in s.reports {
            println!(
                "         {:<18} max {:>9}  median {:>9}  {:?}",
                r.invariant,
                e(r.max_relative_deviation),
                e(r.median_relative_deviation),
                r.verdict
            );
        }
    }
}

fn main() -> ExitCode {
    type Criterion = (&'static str, fn() -> Outcome);
    let criteria: [Criterion; 9] = [
        ("hdet reduces to the determinant", criterion_1),
        ("hdet multiplicativity", criterion_2),
        ("second hyperdeterminant", criterion_3),
        ("Bloch layer", criterion_4),
        ("induced-action determinants", criterion_5),
        ("guaranteed SLOCC invariance at 4 qubits", criterion_6),
        ("hyper-charpoly consistency", criterion_7),
        ("basis independence", criterion_8),
        ("classification smoke test", criterion_9),
    ];
    let mut failures = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = run();
        if !o.pass {
            failures += 1;
        }
        let tag = if o.pass { "PASS" } else { "FAIL" };
        println!("[{tag}] {} {name}: {} [{:.2}s]", k + 1, o.detail, start.elapsed().as_secs_f64());
    }
    criterion_10();
    println!("acceptance: {} passed, {failures} failed", criteria.len() - failures);
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
