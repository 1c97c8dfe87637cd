//! Benchmark precision-matrix topologies, Gaussian data simulation, and
//! the loss and classification scores used to compare estimators.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::data::DataMatrix;
use crate::dist::standard_normal;
use crate::error::{domain_check, Error, Result};
use crate::linalg::SymmetricMatrix;
use crate::rng::RngStream;
use crate::structure::AdjacencyMatrix;

/// Minimum eigenvalue a generated model must have before repair kicks in.
pub const MIN_MODEL_EIGENVALUE: f64 = 0.01;
/// Weight placed on each scale-free graph edge.
pub const SCALE_FREE_EDGE_WEIGHT: f64 = 0.5;
/// Added to each absolute row sum to make the scale-free model dominant.
pub const SCALE_FREE_DIAG_MARGIN: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ModelId {
    M1,
    M2,
    M3,
    M4,
    M5,
    M6,
}

impl ModelId {
    pub const ALL: [ModelId; 6] = [
        ModelId::M1,
        ModelId::M2,
        ModelId::M3,
        ModelId::M4,
        ModelId::M5,
        ModelId::M6,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ModelId::M1 => "M1",
            ModelId::M2 => "M2",
            ModelId::M3 => "M3",
            ModelId::M4 => "M4",
            ModelId::M5 => "M5",
            ModelId::M6 => "M6",
        }
    }

    pub fn structure(self) -> &'static str {
        match self {
            ModelId::M1 => "AR(1)",
            ModelId::M2 => "AR(2)",
            ModelId::M3 => "scale-free",
            ModelId::M4 => "band",
            ModelId::M5 => "cluster",
            ModelId::M6 => "circle",
        }
    }

    fn index(self) -> u64 {
        self as u64
    }
}

impl std::fmt::Display for ModelId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for ModelId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ModelId::ALL
            .into_iter()
            .find(|m| m.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::ParameterDomain(format!("unknown model {s:?}; expected M1..M6")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub model: ModelId,
    /// 1 or 2.
    pub component: u8,
    pub p: usize,
    /// Seed for the random graph of the scale-free model.
    pub seed: u64,
}

impl ModelSpec {
    pub fn new(model: ModelId, component: u8, p: usize, seed: u64) -> Self {
        Self {
            model,
            component,
            p,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        domain_check(self.component == 1 || self.component == 2, || {
            format!("component must be 1 or 2, got {}", self.component)
        })?;
        domain_check(self.p >= 4, || format!("models need p >= 4, got {}", self.p))?;
        if matches!(self.model, ModelId::M4 | ModelId::M5) {
            domain_check(self.p % 2 == 0, || {
                format!("{} uses two p/2 blocks and needs even p, got {}", self.model, self.p)
            })?;
        }
        Ok(())
    }
}

/// A generated precision matrix with the ridge (if any) added to keep it
/// safely positive definite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratedModel {
    pub spec: ModelSpec,
    pub omega: SymmetricMatrix,
    /// `ε` in `Ω + εI`; zero when no repair was needed.
    pub ridge: f64,
}

/// Returns the precision matrix of `spec`, repaired if necessary.
pub fn generate_model(spec: &ModelSpec) -> Result<SymmetricMatrix> {
    Ok(generate_model_repaired(spec)?.omega)
}

/// Builds the raw matrix, then adds the smallest ridge `εI` lifting the
/// minimum eigenvalue to [`MIN_MODEL_EIGENVALUE`] when it falls below.
pub fn generate_model_repaired(spec: &ModelSpec) -> Result<GeneratedModel> {
    let raw = raw_model(spec)?;
    let min_ev = raw.min_eigenvalue();
    let (omega, ridge) = if min_ev < MIN_MODEL_EIGENVALUE {
        let eps = MIN_MODEL_EIGENVALUE - min_ev;
        let omega = SymmetricMatrix::from_fn(raw.dim(), |i, j| {
            raw.get(i, j) + if i == j { eps } else { 0.0 }
        });
        (omega, eps)
    } else {
        (raw, 0.0)
    };
    if !omega.is_positive_definite() {
        return Err(Error::NotPositiveDefinite);
    }
    Ok(GeneratedModel {
        spec: *spec,
        omega,
        ridge,
    })
}

fn raw_model(spec: &ModelSpec) -> Result<SymmetricMatrix> {
    spec.validate()?;
    let p = spec.p;
    let first = spec.component == 1;
    let m = match spec.model {
        ModelId::M1 => {
            let base: f64 = if first { 0.7 } else { 0.75 };
            SymmetricMatrix::from_fn(p, |i, j| base.powi(i.abs_diff(j) as i32))
        }
        ModelId::M2 => {
            let scale = if first { 0.1 } else { 1.0 };
            SymmetricMatrix::from_fn(p, |i, j| {
                scale
                    * match i.abs_diff(j) {
                        0 => 1.0,
                        1 => 0.5,
                        2 => 0.25,
                        _ => 0.0,
                    }
            })
        }
        ModelId::M3 => {
            let full = scale_free_model(p, spec.seed);
            if first {
                full.scaled(0.5)
            } else {
                full
            }
        }
        ModelId::M4 | ModelId::M5 => {
            let (diag, a, b) = match (spec.model, first) {
                (ModelId::M4, true) => (1.0, 0.2, 0.5),
                (ModelId::M4, false) => (1.0, 0.7, 0.9),
                (_, true) => (1.0, 0.5, 0.5),
                (_, false) => (2.0, 1.0, 1.0),
            };
            let half = p / 2;
            SymmetricMatrix::from_fn(p, |i, j| {
                if i == j {
                    diag
                } else if i < half && j < half {
                    a
                } else if i >= half && j >= half {
                    b
                } else {
                    0.0
                }
            })
        }
        ModelId::M6 => {
            let (diag, band, corner) = if first { (2.0, 1.0, 0.45) } else { (4.0, 2.0, 0.95) };
            SymmetricMatrix::from_fn(p, |i, j| {
                if i == j {
                    diag
                } else if i.abs_diff(j) == 1 {
                    band
                } else if i.abs_diff(j) == p - 1 {
                    corner
                } else {
                    0.0
                }
            })
        }
    };
    Ok(m)
}

/// Barabási–Albert graph with one edge per new vertex, as an edge list.
/// Each new vertex attaches to an existing one with probability
/// proportional to its degree.
pub fn barabasi_albert_edges(p: usize, seed: u64) -> Vec<(usize, usize)> {
    let mut rng = RngStream::new(seed);
    let mut edges = Vec::with_capacity(p.saturating_sub(1));
    if p < 2 {
        return edges;
    }
    edges.push((0, 1));
    // Every endpoint appears once per incident edge, so a uniform pick
    // from this list is a degree-proportional pick.
    let mut endpoints = vec![0usize, 1];
    for v in 2..p {
        let target = endpoints[rng.random_range(0..endpoints.len())];
        edges.push((target, v));
        endpoints.push(target);
        endpoints.push(v);
    }
    edges
}

fn scale_free_model(p: usize, seed: u64) -> SymmetricMatrix {
    let mut m = SymmetricMatrix::zeros(p);
    for (i, j) in barabasi_albert_edges(p, seed) {
        m.set(i, j, SCALE_FREE_EDGE_WEIGHT);
    }
    for i in 0..p {
        let row: f64 = (0..p).filter(|&j| j != i).map(|j| m.get(i, j).abs()).sum();
        m.set(i, i, row + SCALE_FREE_DIAG_MARGIN);
    }
    m
}

/// `n` independent draws from `N(0, Ω^{-1})`, one per row.
pub fn simulate_data(omega: &SymmetricMatrix, n: usize, rng: &mut RngStream) -> Result<DataMatrix> {
    domain_check(n >= 1, || "need at least one observation".into())?;
    let chol = omega.cholesky()?;
    let p = omega.dim();
    let mut values = Vec::with_capacity(n * p);
    let mut z = vec![0.0; p];
    for _ in 0..n {
        z.iter_mut().for_each(|v| *v = standard_normal(rng));
        // x = L^{-T} z has covariance (L Lᵀ)^{-1}.
        chol.solve_upper_in_place(&mut z);
        values.extend_from_slice(&z);
    }
    DataMatrix::new(n, p, values)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LossReport {
    /// Largest absolute column sum of the error.
    pub l1: f64,
    /// Frobenius norm of the error.
    pub l2: f64,
    /// Mean absolute difference of the ascending spectra.
    pub el1: f64,
    /// Mean squared difference of the ascending spectra.
    pub el2: f64,
}

pub fn loss_report(estimate: &SymmetricMatrix, truth: &SymmetricMatrix) -> Result<LossReport> {
    let diff = estimate.sub(truth)?;
    let p = truth.dim() as f64;
    let (ge, gt) = (estimate.eigenvalues(), truth.eigenvalues());
    let el1 = ge.iter().zip(&gt).map(|(a, b)| (a - b).abs()).sum::<f64>() / p;
    let el2 = ge.iter().zip(&gt).map(|(a, b)| (a - b).powi(2)).sum::<f64>() / p;
    Ok(LossReport {
        l1: diff.l1_norm(),
        l2: diff.frobenius_norm(),
        el1,
        el2,
    })
}

/// Edge-recovery scores over unordered pairs `i < j`.
///
/// Conventions for empty denominators: with no true edges and no
/// predicted edges, sensitivity, precision and F1 are 1; with no true
/// edges but some predictions, sensitivity is 0 and flagged; with no
/// predictions, precision is 0 and flagged; with no true non-edges,
/// specificity is 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationReport {
    pub se: f64,
    pub sp: f64,
    pub pr: f64,
    pub f1: f64,
    pub ac: f64,
    pub tp: usize,
    pub tn: usize,
    pub fp: usize,
    pub fn_: usize,
    pub flags: Vec<String>,
}

pub fn classification_report(
    estimated: &AdjacencyMatrix,
    truth: &AdjacencyMatrix,
) -> Result<ClassificationReport> {
    if estimated.dim() != truth.dim() {
        return Err(Error::Shape(format!(
            "graphs have {} and {} vertices",
            estimated.dim(),
            truth.dim()
        )));
    }
    let p = truth.dim();
    let (mut tp, mut tn, mut fp, mut fn_) = (0, 0, 0, 0);
    for i in 0..p {
        for j in i + 1..p {
            match (estimated.get(i, j), truth.get(i, j)) {
                (true, true) => tp += 1,
                (false, false) => tn += 1,
                (true, false) => fp += 1,
                (false, true) => fn_ += 1,
            }
        }
    }
    let mut flags = Vec::new();
    let ratio = |num: usize, den: usize| num as f64 / den as f64;
    let (se, pr, f1) = if tp + fn_ == 0 && fp == 0 {
        (1.0, 1.0, 1.0)
    } else {
        let se = if tp + fn_ == 0 {
            flags.push("sensitivity undefined: no true edges".to_string());
            0.0
        } else {
            ratio(tp, tp + fn_)
        };
        let pr = if tp + fp == 0 {
            flags.push("precision undefined: no predicted edges".to_string());
            0.0
        } else {
            ratio(tp, tp + fp)
        };
        (se, pr, ratio(2 * tp, 2 * tp + fp + fn_))
    };
    let sp = if tn + fp == 0 { 1.0 } else { ratio(tn, tn + fp) };
    Ok(ClassificationReport {
        se,
        sp,
        pr,
        f1,
        ac: 0.5 * (se + sp),
        tp,
        tn,
        fp,
        fn_,
        flags,
    })
}

/// Stream index for model-level randomness, unique per model and size.
pub(crate) fn model_stream(model: ModelId, p: usize, rep: usize) -> u64 {
    ((model.index() * 1_000_003 + p as u64) << 24) + rep as u64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::scatter_matrix;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn spec(model: ModelId, component: u8, p: usize) -> ModelSpec {
        ModelSpec::new(model, component, p, 7)
    }

    #[test]
    fn m1_entries() {
        // p = 3 is below the benchmark minimum, so build it at p = 4.
        let m = generate_model(&spec(ModelId::M1, 2, 4)).unwrap();
        assert_eq!(m.get(0, 1), 0.75);
        assert_eq!(m.get(0, 2), 0.5625);
    }

    #[test]
    fn m6_corners() {
        let m = generate_model(&spec(ModelId::M6, 1, 5)).unwrap();
        assert_eq!(m.diagonal(), vec![2.0; 5]);
        assert_eq!(m.get(0, 4), 0.45);
        assert_eq!(m.get(1, 2), 1.0);
        assert_eq!(m.get(0, 2), 0.0);
    }

    #[test]
    fn m2_component_one_is_a_tenth() {
        let a = generate_model(&spec(ModelId::M2, 1, 10)).unwrap();
        let b = generate_model(&spec(ModelId::M2, 2, 10)).unwrap();
        for i in 0..10 {
            for j in 0..10 {
                assert_abs_diff_eq!(a.get(i, j), 0.1 * b.get(i, j), epsilon = 1e-15);
            }
        }
        assert_eq!(b.get(3, 5), 0.25);
        assert_eq!(b.get(3, 6), 0.0);
    }

    #[test]
    fn block_models_need_even_p() {
        assert!(generate_model(&spec(ModelId::M4, 1, 9)).is_err());
        assert!(generate_model(&spec(ModelId::M5, 2, 7)).is_err());
        assert!(generate_model(&spec(ModelId::M2, 1, 3)).is_err());
        assert!(generate_model(&spec(ModelId::M2, 3, 10)).is_err());
    }

    #[test]
    fn block_layout() {
        let m = generate_model(&spec(ModelId::M4, 2, 6)).unwrap();
        assert_eq!(m.get(0, 2), 0.7);
        assert_eq!(m.get(3, 5), 0.9);
        assert_eq!(m.get(2, 3), 0.0);
        let m = generate_model(&spec(ModelId::M5, 2, 6)).unwrap();
        assert_eq!(m.get(1, 1), 2.0);
        assert_eq!(m.get(4, 5), 1.0);
    }

    #[test]
    fn scale_free_is_a_tree_and_seeded() {
        let e = barabasi_albert_edges(30, 5);
        assert_eq!(e.len(), 29);
        assert_eq!(e, barabasi_albert_edges(30, 5));
        assert_ne!(e, barabasi_albert_edges(30, 6));
        let m2 = generate_model(&spec(ModelId::M3, 2, 30)).unwrap();
        let m1 = generate_model(&spec(ModelId::M3, 1, 30)).unwrap();
        assert_eq!(m1, m2.scaled(0.5));
        for i in 0..30 {
            let row: f64 = (0..30).filter(|&j| j != i).map(|j| m2.get(i, j)).sum();
            assert_abs_diff_eq!(m2.get(i, i), row + 0.1, epsilon = 1e-12);
        }
    }

    #[test]
    fn all_models_positive_definite() {
        for model in ModelId::ALL {
            for comp in [1, 2] {
                for p in [4, 10, 30, 50, 100] {
                    let g = generate_model_repaired(&spec(model, comp, p)).unwrap();
                    assert!(g.omega.min_eigenvalue() >= MIN_MODEL_EIGENVALUE - 1e-9);
                    if model == ModelId::M4 {
                        assert_eq!(g.ridge, 0.0, "block constants below 1 keep M4 PD");
                    }
                }
            }
        }
    }

    #[test]
    fn simulated_identity_covariance() {
        let mut rng = RngStream::new(3);
        let n = 100_000;
        let y = simulate_data(&SymmetricMatrix::identity(3), n, &mut rng).unwrap();
        let cov = scatter_matrix(&y).unwrap().scaled(1.0 / (n - 1) as f64);
        let err = cov.sub(&SymmetricMatrix::identity(3)).unwrap().frobenius_norm();
        assert!(err / 3f64.sqrt() < 0.02, "relative error {err}");
    }

    #[test]
    fn simulated_precision_recovered() {
        let mut rng = RngStream::new(4);
        let n = 100_000;
        let omega = generate_model(&spec(ModelId::M1, 2, 5)).unwrap();
        let y = simulate_data(&omega, n, &mut rng).unwrap();
        let prec = scatter_matrix(&y)
            .unwrap()
            .scaled(1.0 / (n - 1) as f64)
            .inverse()
            .unwrap();
        let rel = prec.sub(&omega).unwrap().frobenius_norm() / omega.frobenius_norm();
        assert!(rel < 0.05, "relative error {rel}");
    }

    #[test]
    fn simulation_is_seeded_and_checks_pd() {
        let omega = generate_model(&spec(ModelId::M6, 2, 6)).unwrap();
        let a = simulate_data(&omega, 20, &mut RngStream::new(1)).unwrap();
        let b = simulate_data(&omega, 20, &mut RngStream::new(1)).unwrap();
        assert_eq!(a, b);
        let bad = SymmetricMatrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 1.0]]).unwrap();
        assert!(simulate_data(&bad, 5, &mut RngStream::new(1)).is_err());
    }

    #[test]
    fn losses_hand_computed() {
        let eye = SymmetricMatrix::identity(2);
        let z = loss_report(&eye, &eye).unwrap();
        assert_eq!((z.l1, z.l2, z.el1, z.el2), (0.0, 0.0, 0.0, 0.0));

        let est = SymmetricMatrix::from_rows(&[vec![1.0, 0.1], vec![0.1, 1.0]]).unwrap();
        let r = loss_report(&est, &eye).unwrap();
        assert_abs_diff_eq!(r.l1, 0.1, epsilon = 1e-12);
        assert_abs_diff_eq!(r.l2, 0.02f64.sqrt(), epsilon = 1e-12);
        assert_abs_diff_eq!(r.el1, 0.1, epsilon = 1e-12);
        assert_abs_diff_eq!(r.el2, 0.01, epsilon = 1e-12);

        let r = loss_report(&SymmetricMatrix::from_diagonal(&[2.0, 1.0]), &SymmetricMatrix::from_diagonal(&[1.0, 2.0]))
            .unwrap();
        assert_abs_diff_eq!(r.l1, 1.0);
        assert_abs_diff_eq!(r.el1, 0.0, epsilon = 1e-12);
        assert!(loss_report(&eye, &SymmetricMatrix::identity(3)).is_err());
    }

    fn graph(p: usize, edges: &[(usize, usize)]) -> AdjacencyMatrix {
        AdjacencyMatrix::from_fn(p, |i, j| edges.contains(&(i, j)))
    }

    #[test]
    fn classification_examples() {
        let truth = graph(5, &[(0, 1), (1, 2), (2, 3), (3, 4)]);
        let perfect = classification_report(&truth, &truth).unwrap();
        assert_eq!((perfect.se, perfect.sp, perfect.pr, perfect.f1, perfect.ac), (1.0, 1.0, 1.0, 1.0, 1.0));

        let est = graph(5, &[(0, 1), (1, 2), (2, 3), (0, 4)]);
        let r = classification_report(&est, &truth).unwrap();
        assert_eq!((r.tp, r.fp, r.fn_, r.tn), (3, 1, 1, 5));
        assert_abs_diff_eq!(r.se, 0.75);
        assert_abs_diff_eq!(r.pr, 0.75);
        assert_abs_diff_eq!(r.f1, 0.75);

        let r = classification_report(&AdjacencyMatrix::empty(5), &truth).unwrap();
        assert_eq!((r.se, r.sp, r.ac), (0.0, 1.0, 0.5));
        assert_eq!(r.flags.len(), 1);
    }

    #[test]
    fn classification_empty_truth_conventions() {
        let empty = AdjacencyMatrix::empty(4);
        let r = classification_report(&empty, &empty).unwrap();
        assert_eq!((r.se, r.pr, r.f1, r.sp), (1.0, 1.0, 1.0, 1.0));
        let r = classification_report(&graph(4, &[(0, 1)]), &empty).unwrap();
        assert_eq!(r.se, 0.0);
        assert!(r.flags.iter().any(|f| f.contains("sensitivity")));
    }

    #[test]
    fn model_names_round_trip() {
        for m in ModelId::ALL {
            assert_eq!(m.name().parse::<ModelId>().unwrap(), m);
        }
        assert_eq!("m3".parse::<ModelId>().unwrap(), ModelId::M3);
        assert!("M7".parse::<ModelId>().is_err());
    }

    proptest! {
        #[test]
        fn f1_and_balanced_accuracy_identities(
            est in prop::collection::vec(any::<bool>(), 15),
            tru in prop::collection::vec(any::<bool>(), 15),
        ) {
            let build = |v: &[bool]| {
                let mut it = v.iter();
                AdjacencyMatrix::from_fn(6, |_, _| *it.next().unwrap())
            };
            let r = classification_report(&build(&est), &build(&tru)).unwrap();
            prop_assert_eq!(r.tp + r.tn + r.fp + r.fn_, 15);
            prop_assert!((r.ac - 0.5 * (r.se + r.sp)).abs() < 1e-15);
            if 2 * r.tp + r.fp + r.fn_ > 0 {
                let f1 = 2.0 * r.tp as f64 / (2 * r.tp + r.fp + r.fn_) as f64;
                prop_assert!((r.f1 - f1).abs() < 1e-15);
            }
            for v in [r.se, r.sp, r.pr, r.f1, r.ac] {
                prop_assert!((0.0..=1.0).contains(&v));
            }
        }

        #[test]
        fn spectral_losses_invariant_under_joint_rotation(theta in 0.0f64..6.28, a in 0.5f64..3.0, b in -0.4f64..0.4) {
            let rot = |m: &SymmetricMatrix| {
                let (c, s) = (theta.cos(), theta.sin());
                let q = nalgebra::DMatrix::from_row_slice(2, 2, &[c, -s, s, c]);
                SymmetricMatrix::from_nalgebra(&(&q * m.to_nalgebra() * q.transpose())).unwrap()
            };
            let truth = SymmetricMatrix::from_rows(&[vec![a, b], vec![b, 1.0]]).unwrap();
            let est = SymmetricMatrix::from_rows(&[vec![1.0, 0.2], vec![0.2, 2.0]]).unwrap();
            let r0 = loss_report(&est, &truth).unwrap();
            let r1 = loss_report(&rot(&est), &rot(&truth)).unwrap();
            prop_assert!((r0.el1 - r1.el1).abs() < 1e-9);
            prop_assert!((r0.el2 - r1.el2).abs() < 1e-9);
            prop_assert!((r0.l2 - r1.l2).abs() < 1e-9);
        }
    }
}
