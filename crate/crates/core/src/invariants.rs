//! Named invariant fingerprints.
//!
//! Each family is picked by the state's shape:
//!
//! | state | family | entries |
//! |---|---|---|
//! | density, two parties, `d × d` | `bipartite` | `F_1..F_{d²}` of `det(λI − A)`; for qubits also trace, minor sums, det |
//! | density, two parties, `d_1 ≠ d_2` | `rectangular` | `det(AAᵗ)`, `det(AᵗA)` |
//! | density, `2n ≥ 4` parties of equal `d` | `even-partite` | coefficients `c_0..c_{d²}` of `hdet(λ I_paired − A)` |
//! | pure, `d × d` | `pure-bipartite` | determinant of the amplitude matrix |
//! | pure, `2 × 2 × 2` | `pure-three-qubit` | 2×2×2 hyperdeterminant and `τ = 4|Det|` |
//!
//! Every entry carries a [`Guarantee`]: what it is provably invariant under. Entries
//! tagged `claimed` are emitted for study but are not asserted invariant under
//! local operations; the audit module measures them.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::audit::Group;
use crate::bloch::{gell_mann_bases, represent_with, BlochBasis, DensityState, PureState, State};
use crate::error::{dim_err, invalid, Result};
use crate::hyperdet::{charpoly_coeffs, det222, hyper_charpoly_with, principal_minor_sum, HdetConfig};
use crate::hypermatrix::format_string;
use crate::matrix::Matrix;

/// Basis normalization and ordering the Bloch-based values are quoted in.
pub const CONVENTION: &str = "gell-mann;tr(s_i s_j)=d*delta_ij;order=id,sym,asym,diag;v1";

/// Relative deviations are floored at this absolute scale.
pub const DEVIATION_FLOOR: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Guarantee {
    /// Independent of the state.
    Constant,
    /// Invariant under `SL(d_1) ⊗ ⋯ ⊗ SL(d_n)` (hence also under local unitaries).
    Slocc,
    /// Invariant under local unitaries.
    LocalUnitary,
    /// Invariance asserted in the literature but not implied by multiplicativity.
    Claimed,
}

impl Guarantee {
    /// Whether the value is provably unchanged by the given group.
    ///
    /// Basis rotations here are the shared `1 ⊕ SO(d² − 1)` changes of Bloch basis,
    /// under which every Bloch-derived entry is unchanged.
    pub fn covers(self, group: Group) -> bool {
        matches!(
            (self, group),
            (_, Group::Identity | Group::BasisRotation)
                | (Guarantee::Constant | Guarantee::Slocc, _)
                | (Guarantee::LocalUnitary, Group::Lu)
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StateKind {
    Density,
    Pure,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    Bipartite,
    Rectangular,
    EvenPartite,
    PureBipartite,
    PureThreeQubit,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FingerprintEntry {
    pub name: String,
    #[serde(with = "complex_pair")]
    pub value: Complex64,
    pub guarantee: Guarantee,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InvariantFingerprint {
    pub kind: StateKind,
    pub family: Family,
    pub dims: Vec<usize>,
    pub convention: String,
    pub entries: Vec<FingerprintEntry>,
}

impl InvariantFingerprint {
    fn new(kind: StateKind, family: Family, dims: &[usize]) -> Self {
        Self { kind, family, dims: dims.to_vec(), convention: CONVENTION.to_string(), entries: Vec::new() }
    }

    fn push(&mut self, name: impl Into<String>, value: Complex64, guarantee: Guarantee) {
        // adding +0 turns a negative zero into a positive one
        let value = value + Complex64::new(0.0, 0.0);
        self.entries.push(FingerprintEntry { name: name.into(), value, guarantee });
    }

    pub fn get(&self, name: &str) -> Option<Complex64> {
        self.entries.iter().find(|e| e.name == name).map(|e| e.value)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|e| e.name.as_str())
    }
}

pub(crate) mod complex_pair {
    use num_complex::Complex64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(z: &Complex64, s: S) -> Result<S::Ok, S::Error> {
        [z.re, z.im].serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Complex64, D::Error> {
        let [re, im] = <[f64; 2]>::deserialize(d)?;
        Ok(Complex64::new(re, im))
    }
}

fn bloch_matrix(rho: &DensityState, bases: &[BlochBasis]) -> Result<Matrix> {
    represent_with(rho, bases)?.to_matrix()
}

fn require_parties(rho: &DensityState, n: usize) -> Result<()> {
    if rho.parties() != n {
        return invalid(format!("expected {n} parties, state has dims {}", format_string(rho.dims())));
    }
    Ok(())
}

/// Characteristic-polynomial invariants of a `d × d` bipartite state.
pub fn bipartite_fingerprint(rho: &DensityState) -> Result<InvariantFingerprint> {
    bipartite_fingerprint_with(rho, &gell_mann_bases(rho.dims())?)
}

pub fn bipartite_fingerprint_with(rho: &DensityState, bases: &[BlochBasis]) -> Result<InvariantFingerprint> {
    require_parties(rho, 2)?;
    let (d1, d2) = (rho.dims()[0], rho.dims()[1]);
    if d1 != d2 {
        return invalid(format!("unequal local dimensions {d1} and {d2}; use the rectangular family"));
    }
    let a = bloch_matrix(rho, bases)?;
    let n = d1 * d1;
    let p = charpoly_coeffs(&a)?;
    let mut fp = InvariantFingerprint::new(StateKind::Density, Family::Bipartite, rho.dims());
    for i in 1..=n {
        let g = if i == n { Guarantee::Slocc } else { Guarantee::Claimed };
        fp.push(format!("charpoly.F{i}@v1"), p.descending(n, i), g);
    }
    if d1 == 2 {
        fp.push("minors.trace@v1", principal_minor_sum(&a, 1)?, Guarantee::Claimed);
        fp.push("minors.sum2@v1", principal_minor_sum(&a, 2)?, Guarantee::Claimed);
        fp.push("minors.sum3@v1", principal_minor_sum(&a, 3)?, Guarantee::Claimed);
        fp.push("minors.det@v1", principal_minor_sum(&a, 4)?, Guarantee::Slocc);
    }
    Ok(fp)
}

/// `det(AAᵗ)` and `det(AᵗA)` of the rectangular Bloch matrix of a `d_1 × d_2` state.
pub fn rectangular_fingerprint(rho: &DensityState) -> Result<InvariantFingerprint> {
    rectangular_fingerprint_with(rho, &gell_mann_bases(rho.dims())?)
}

pub fn rectangular_fingerprint_with(rho: &DensityState, bases: &[BlochBasis]) -> Result<InvariantFingerprint> {
    require_parties(rho, 2)?;
    let a = bloch_matrix(rho, bases)?;
    let at = a.transpose();
    let mut fp = InvariantFingerprint::new(StateKind::Density, Family::Rectangular, rho.dims());
    fp.push("gram.det_AAt@v1", (&a * &at).det()?, Guarantee::LocalUnitary);
    fp.push("gram.det_AtA@v1", (&at * &a).det()?, Guarantee::LocalUnitary);
    Ok(fp)
}

/// Coefficients of the hyper-characteristic polynomial of an even-partite state.
pub fn even_partite_fingerprint(rho: &DensityState, cfg: &HdetConfig) -> Result<InvariantFingerprint> {
    even_partite_fingerprint_with(rho, &gell_mann_bases(rho.dims())?, cfg)
}

pub fn even_partite_fingerprint_with(
    rho: &DensityState,
    bases: &[BlochBasis],
    cfg: &HdetConfig,
) -> Result<InvariantFingerprint> {
    let dims = rho.dims();
    if dims.len() < 2 || !dims.len().is_multiple_of(2) {
        return invalid(format!("even-partite invariants need an even party count, got {}", dims.len()));
    }
    if dims.iter().any(|&d| d != dims[0]) {
        return invalid(format!("even-partite invariants need equal local dimensions, got {}", format_string(dims)));
    }
    let a = represent_with(rho, bases)?;
    let n = dims[0] * dims[0];
    let p = hyper_charpoly_with(&a, cfg)?;
    let mut fp = InvariantFingerprint::new(StateKind::Density, Family::EvenPartite, dims);
    for k in 0..=n {
        let g = match k {
            0 => Guarantee::Slocc,
            k if k == n => Guarantee::Constant,
            _ => Guarantee::Claimed,
        };
        fp.push(format!("hdet.c{k}@v1"), p.coeff(k), g);
    }
    Ok(fp)
}

/// Determinant of the `d × d` amplitude matrix of a bipartite pure state.
pub fn pure_bipartite_det(phi: &PureState) -> Result<Complex64> {
    let dims = phi.dims();
    if dims.len() != 2 || dims[0] != dims[1] {
        return dim_err(format!("expected a square bipartite amplitude matrix, got {}", format_string(dims)));
    }
    phi.amplitudes().to_matrix()?.det()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ThreeQubitDet {
    pub det: Complex64,
    /// `4 |Det|`.
    pub tangle: f64,
}

pub fn pure_three_qubit_det(phi: &PureState) -> Result<ThreeQubitDet> {
    let det = det222(phi.amplitudes())?;
    Ok(ThreeQubitDet { det, tangle: 4.0 * det.norm() })
}

pub fn pure_fingerprint(phi: &PureState) -> Result<InvariantFingerprint> {
    match phi.dims() {
        [a, b] if a == b => {
            let mut fp = InvariantFingerprint::new(StateKind::Pure, Family::PureBipartite, phi.dims());
            fp.push("pure.det@v1", pure_bipartite_det(phi)?, Guarantee::Slocc);
            Ok(fp)
        }
        [2, 2, 2] => {
            let t = pure_three_qubit_det(phi)?;
            let mut fp = InvariantFingerprint::new(StateKind::Pure, Family::PureThreeQubit, phi.dims());
            fp.push("pure.det222@v1", t.det, Guarantee::Slocc);
            fp.push("pure.tangle@v1", Complex64::new(t.tangle, 0.0), Guarantee::Slocc);
            Ok(fp)
        }
        dims => invalid(format!("no pure-state invariant family for dims {}", format_string(dims))),
    }
}

/// Fingerprint for any supported state shape, Gell-Mann bases.
pub fn fingerprint(state: &State, cfg: &HdetConfig) -> Result<InvariantFingerprint> {
    match state {
        State::Density(rho) => fingerprint_with_bases(rho, &gell_mann_bases(rho.dims())?, cfg),
        State::Pure(phi) => pure_fingerprint(phi),
    }
}

/// Density-state fingerprint computed in the given per-party bases.
pub fn fingerprint_with_bases(
    rho: &DensityState,
    bases: &[BlochBasis],
    cfg: &HdetConfig,
) -> Result<InvariantFingerprint> {
    let dims = rho.dims();
    match dims.len() {
        2 if dims[0] == dims[1] => bipartite_fingerprint_with(rho, bases),
        2 => rectangular_fingerprint_with(rho, bases),
        n if n % 2 == 0 && dims.iter().all(|&d| d == dims[0]) => even_partite_fingerprint_with(rho, bases, cfg),
        _ => invalid(format!("no mixed-state invariant family for dims {}", format_string(dims))),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    NecessarilyInequivalent,
    Consistent,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CompareScope {
    All,
    /// Only entries whose guarantee covers the group.
    GuaranteedUnder(Group),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Difference {
    pub name: String,
    #[serde(with = "complex_pair")]
    pub left: Complex64,
    #[serde(with = "complex_pair")]
    pub right: Complex64,
    pub relative_deviation: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Comparison {
    pub verdict: Verdict,
    pub compared: usize,
    pub differences: Vec<Difference>,
}

/// `|a − b| / max(|a|, |b|, floor)`.
pub fn relative_deviation(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / a.norm().max(b.norm()).max(DEVIATION_FLOOR)
}

/// Necessary-condition comparison: reports `NecessarilyInequivalent` when some
/// shared invariant in scope differs by more than `tol` (relative, with an absolute
/// floor of 1e-12), `Consistent` otherwise. It never certifies equivalence.
pub fn compare_fingerprints(
    left: &InvariantFingerprint,
    right: &InvariantFingerprint,
    tol: f64,
    scope: CompareScope,
) -> Result<Comparison> {
    if left.kind != right.kind || left.family != right.family || left.dims != right.dims {
        return dim_err(format!(
            "cannot compare {:?}/{:?} {} with {:?}/{:?} {}",
            left.kind,
            left.family,
            format_string(&left.dims),
            right.kind,
            right.family,
            format_string(&right.dims)
        ));
    }
    if left.convention != right.convention {
        return invalid(format!("conventions differ: {} vs {}", left.convention, right.convention));
    }
    let mut compared = 0;
    let mut differences = Vec::new();
    for e in &left.entries {
        let in_scope = match scope {
            CompareScope::All => true,
            CompareScope::GuaranteedUnder(g) => e.guarantee.covers(g),
        };
        let Some(other) = right.get(&e.name) else { continue };
        if !in_scope {
            continue;
        }
        compared += 1;
        let dev = relative_deviation(e.value, other);
        if dev > tol && (e.value - other).norm() > DEVIATION_FLOOR {
            differences.push(Difference { name: e.name.clone(), left: e.value, right: other, relative_deviation: dev });
        }
    }
    let verdict = if differences.is_empty() { Verdict::Consistent } else { Verdict::NecessarilyInequivalent };
    Ok(Comparison { verdict, compared, differences })
}
