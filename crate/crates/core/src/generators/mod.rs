//! Seeded instance generators.
//!
//! Random classes (`random_qp`, `random_eq_qp`) and application classes
//! (`control`, `portfolio`, `huber`, `lasso`, `svm`) draw all data from a
//! ChaCha8 stream seeded by [`GenSpec::seed`], so output is bit-reproducible.
//! The worst-case classes (`nesterov_chain`, `bilinear_game`, `sc_minimax`)
//! are deterministic in `(n, mu, l)`.
//!
//! Every instance carries a feasible certificate; worst-case instances also
//! carry their known optimum. [`generate`] checks both before returning.

mod ml;
mod random;
mod worst_case;

use std::fmt;
use std::str::FromStr;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{PrimalDualPoint, QuadraticProgram, SparseMatrix};

pub use ml::{
    control_from_data, gen_control, gen_huber, gen_lasso, gen_portfolio, gen_svm, huber_from_data, lasso_from_data,
    portfolio_from_data, svm_from_data,
};
pub use random::{gen_random_eq_qp, gen_random_qp};
pub use worst_case::{
    bilinear_game_from, gen_bilinear_game, gen_nesterov_chain, gen_sc_minimax, sc_minimax_from, solve_tridiagonal,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProblemClass {
    RandomQp,
    RandomEqQp,
    Control,
    Portfolio,
    Huber,
    Lasso,
    Svm,
    NesterovChain,
    BilinearGame,
    ScMinimax,
}

impl ProblemClass {
    pub const ALL: [ProblemClass; 10] = [
        ProblemClass::RandomQp,
        ProblemClass::RandomEqQp,
        ProblemClass::Control,
        ProblemClass::Portfolio,
        ProblemClass::Huber,
        ProblemClass::Lasso,
        ProblemClass::Svm,
        ProblemClass::NesterovChain,
        ProblemClass::BilinearGame,
        ProblemClass::ScMinimax,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ProblemClass::RandomQp => "random_qp",
            ProblemClass::RandomEqQp => "random_eq_qp",
            ProblemClass::Control => "control",
            ProblemClass::Portfolio => "portfolio",
            ProblemClass::Huber => "huber",
            ProblemClass::Lasso => "lasso",
            ProblemClass::Svm => "svm",
            ProblemClass::NesterovChain => "nesterov_chain",
            ProblemClass::BilinearGame => "bilinear_game",
            ProblemClass::ScMinimax => "sc_minimax",
        }
    }

    pub fn is_worst_case(self) -> bool {
        matches!(self, ProblemClass::NesterovChain | ProblemClass::BilinearGame | ProblemClass::ScMinimax)
    }

    /// Rough constraint-plus-objective nonzero count at size `n`.
    fn nnz_estimate(self, n: usize, density: f64) -> f64 {
        let n = n as f64;
        let d = density;
        match self {
            ProblemClass::RandomQp => n * n * (d * d * n).min(1.0) + 10.0 * n * n * d,
            ProblemClass::RandomEqQp => n * n * (d * d * n).min(1.0) + 0.5 * n * n * d,
            ProblemClass::Control => 10.0 * (n * n * d + 0.5 * n * n * d + 4.0 * n),
            ProblemClass::Portfolio => n * n * 0.05 + 4.0 * n,
            ProblemClass::Huber | ProblemClass::Lasso | ProblemClass::Svm => 10.0 * n * n * d + 30.0 * n,
            ProblemClass::NesterovChain => 3.0 * n,
            ProblemClass::BilinearGame => n * n,
            ProblemClass::ScMinimax => 3.0 * n + 1.0,
        }
    }
}

impl fmt::Display for ProblemClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ProblemClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ProblemClass::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown problem class '{s}'")))
    }
}

/// Size presets by approximate nonzero count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SizePreset {
    Tiny,
    Small,
    Medium,
    Large,
}

impl SizePreset {
    pub fn target_nnz(self) -> f64 {
        match self {
            SizePreset::Tiny => 1e3,
            SizePreset::Small => 3e5,
            SizePreset::Medium => 3e6,
            SizePreset::Large => 3e7,
        }
    }
}

impl FromStr for SizePreset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "tiny" => Ok(SizePreset::Tiny),
            "small" => Ok(SizePreset::Small),
            "medium" => Ok(SizePreset::Medium),
            "large" => Ok(SizePreset::Large),
            _ => Err(Error::InvalidArgument(format!("unknown size preset '{s}'"))),
        }
    }
}

pub const DEFAULT_DENSITY: f64 = 0.15;
pub const DEFAULT_MU: f64 = 1.0;
pub const DEFAULT_L: f64 = 100.0;

/// Generator input. `n` is the class's base dimension: variables for the
/// random classes, features for the regression classes, assets for
/// portfolio, states for control and the chain length for worst-case
/// classes. `mu` and `l` are used by worst-case classes only.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GenSpec {
    pub class: ProblemClass,
    pub n: usize,
    pub density: f64,
    pub seed: u64,
    pub mu: f64,
    pub l: f64,
}

impl GenSpec {
    pub fn new(class: ProblemClass, n: usize, seed: u64) -> Self {
        GenSpec { class, n, density: DEFAULT_DENSITY, seed, mu: DEFAULT_MU, l: DEFAULT_L }
    }

    /// Smallest `n` whose estimated nonzero count reaches the preset target.
    pub fn preset(class: ProblemClass, preset: SizePreset, seed: u64) -> Self {
        let target = preset.target_nnz();
        let (mut lo, mut hi) = (1usize, 2usize);
        while class.nnz_estimate(hi, DEFAULT_DENSITY) < target {
            lo = hi;
            hi *= 2;
        }
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if class.nnz_estimate(mid, DEFAULT_DENSITY) < target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        GenSpec::new(class, hi.max(2), seed)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidArgument("n must be at least 1".into()));
        }
        if !(self.density > 0.0 && self.density <= 1.0) {
            return Err(Error::InvalidArgument(format!("density {} outside (0, 1]", self.density)));
        }
        if self.class.is_worst_case() && !(self.mu > 0.0 && self.l > self.mu && self.l.is_finite()) {
            return Err(Error::InvalidArgument(format!("need L > mu > 0, got mu={} L={}", self.mu, self.l)));
        }
        Ok(())
    }
}

/// Data recorded alongside a generated problem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceMetadata {
    pub class: ProblemClass,
    pub n: usize,
    pub seed: u64,
    pub density: Option<f64>,
    pub mu: Option<f64>,
    pub l: Option<f64>,
    pub measured_condition: Option<f64>,
    pub feasible_point: Option<Vec<f64>>,
    pub known_optimum: Option<PrimalDualPoint>,
    pub optimal_objective: Option<f64>,
}

impl InstanceMetadata {
    pub fn new(class: ProblemClass, n: usize, seed: u64) -> Self {
        InstanceMetadata {
            class,
            n,
            seed,
            density: None,
            mu: None,
            l: None,
            measured_condition: None,
            feasible_point: None,
            known_optimum: None,
            optimal_objective: None,
        }
    }

    pub fn from_spec(spec: &GenSpec) -> Self {
        InstanceMetadata { density: Some(spec.density), ..InstanceMetadata::new(spec.class, spec.n, spec.seed) }
    }
}

#[derive(Debug, Clone)]
pub struct Instance {
    pub problem: QuadraticProgram,
    pub metadata: InstanceMetadata,
}

pub(crate) fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random sparse matrix triplets: each column receives `Binomial(rows,
/// density)` standard normal entries in distinct rows. Triplets are sorted
/// by column, then row.
pub(crate) fn sparse_gaussian(r: &mut ChaCha8Rng, rows: usize, cols: usize, density: f64) -> Vec<(usize, usize, f64)> {
    let mut out = Vec::new();
    if rows == 0 {
        return out;
    }
    let count = Binomial::new(rows as u64, density.clamp(0.0, 1.0)).expect("valid binomial");
    for j in 0..cols {
        let k = count.sample(r) as usize;
        let mut idx = sample(r, rows, k).into_vec();
        idx.sort_unstable();
        for i in idx {
            out.push((i, j, StandardNormal.sample(r)));
        }
    }
    out
}

/// Unconstrained `min ½xᵀHx + hᵀx` on the chain data.
fn gen_chain_qp(spec: &GenSpec) -> Result<Instance> {
    let (h_mat, h) = gen_nesterov_chain(spec.n, spec.mu, spec.l)?;
    let neg: Vec<f64> = h.iter().map(|v| -v).collect();
    let x = solve_tridiagonal(&h_mat, &neg);
    let n = spec.n;
    let p = QuadraticProgram::new("nesterov_chain", h_mat, h, SparseMatrix::zeros(0, n), vec![], SparseMatrix::zeros(0, n), vec![])?;
    let objective = p.objective(&x);
    let star = PrimalDualPoint { x: x.clone(), y_ineq: vec![], y_eq: vec![] };
    Ok(Instance {
        problem: p,
        metadata: InstanceMetadata {
            mu: Some(spec.mu),
            l: Some(spec.l),
            feasible_point: Some(x),
            optimal_objective: Some(objective),
            known_optimum: Some(star),
            ..InstanceMetadata::new(ProblemClass::NesterovChain, n, spec.seed)
        },
    })
}

/// Application-class dispatch.
pub fn gen_ml_instance(spec: &GenSpec) -> Result<Instance> {
    spec.validate()?;
    match spec.class {
        ProblemClass::Control => gen_control(spec),
        ProblemClass::Portfolio => gen_portfolio(spec),
        ProblemClass::Huber => gen_huber(spec),
        ProblemClass::Lasso => gen_lasso(spec),
        ProblemClass::Svm => gen_svm(spec),
        other => Err(Error::InvalidArgument(format!("{other} is not an application class"))),
    }
}

/// Generates an instance of any class and verifies its certificates.
pub fn generate(spec: &GenSpec) -> Result<Instance> {
    spec.validate()?;
    let mut inst = match spec.class {
        ProblemClass::RandomQp => gen_random_qp(spec)?,
        ProblemClass::RandomEqQp => gen_random_eq_qp(spec)?,
        ProblemClass::NesterovChain => gen_chain_qp(spec)?,
        ProblemClass::BilinearGame => {
            crate::diagnostics::dense::check_cap(spec.n, crate::diagnostics::DENSE_CAP)?;
            gen_bilinear_game(spec.n, spec.mu, spec.l)?
        }
        ProblemClass::ScMinimax => gen_sc_minimax(spec.n, spec.mu, spec.l)?,
        _ => gen_ml_instance(spec)?,
    };
    inst.metadata.seed = spec.seed;
    inst.problem.name = format!("{}_n{}_s{}", spec.class, spec.n, spec.seed);
    verify_certificates(&inst)?;
    Ok(inst)
}

fn verify_certificates(inst: &Instance) -> Result<()> {
    let p = &inst.problem;
    if let Some(x) = &inst.metadata.feasible_point {
        let scale = 1.0 + p.b_ineq.iter().chain(&p.b_eq).fold(0.0f64, |m, v| m.max(v.abs()));
        let viol = p.max_violation(x);
        if !(viol <= 1e-9 * scale) {
            return Err(Error::Oracle(format!("certificate violates constraints by {viol:e}")));
        }
    }
    if let Some(z) = &inst.metadata.known_optimum {
        if p.n() <= crate::diagnostics::DENSE_CAP {
            let r = crate::diagnostics::rel_kkt(p, z)?.relkkt;
            if !(r <= 1e-8) {
                return Err(Error::Oracle(format!("recorded optimum has relative KKT error {r:e}")));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagnostics::symmetric_eigenvalues;
    use proptest::prelude::*;

    #[test]
    fn class_names_round_trip() {
        for c in ProblemClass::ALL {
            assert_eq!(c.as_str().parse::<ProblemClass>().unwrap(), c);
            assert_eq!(serde_json::to_string(&c).unwrap(), format!("\"{c}\""));
        }
        assert!("bogus".parse::<ProblemClass>().is_err());
    }

    #[test]
    fn presets_grow() {
        for c in ProblemClass::ALL {
            let sizes: Vec<usize> = [SizePreset::Tiny, SizePreset::Small, SizePreset::Medium]
                .into_iter()
                .map(|p| GenSpec::preset(c, p, 0).n)
                .collect();
            assert!(sizes[0] < sizes[1] && sizes[1] < sizes[2], "{c}: {sizes:?}");
        }
    }

    #[test]
    fn tiny_presets_hit_order_of_magnitude() {
        for c in ProblemClass::ALL {
            let inst = generate(&GenSpec::preset(c, SizePreset::Tiny, 1)).unwrap();
            let p = &inst.problem;
            let nnz = (p.q.nnz() + p.a_ineq.nnz() + p.a_eq.nnz()) as f64;
            assert!((1e2..1e4).contains(&nnz), "{c}: {nnz}");
        }
    }

    #[test]
    fn chain_class_optimum() {
        let inst = generate(&GenSpec::new(ProblemClass::NesterovChain, 5, 0)).unwrap();
        let star = inst.metadata.known_optimum.unwrap();
        assert!(crate::diagnostics::rel_kkt(&inst.problem, &star).unwrap().relkkt < 1e-12);
    }

    #[test]
    fn invalid_specs_rejected() {
        assert!(generate(&GenSpec::new(ProblemClass::Lasso, 0, 0)).is_err());
        let mut s = GenSpec::new(ProblemClass::BilinearGame, 4, 0);
        s.l = 0.5;
        assert!(generate(&s).is_err());
        s.density = 0.0;
        assert!(s.validate().is_err());
    }

    #[test]
    fn sparse_gaussian_shape() {
        let t = sparse_gaussian(&mut rng(3), 40, 30, 0.2);
        assert!(t.iter().all(|&(i, j, _)| i < 40 && j < 30));
        let frac = t.len() as f64 / 1200.0;
        assert!((0.1..0.3).contains(&frac));
        let mut seen = t.iter().map(|&(i, j, _)| (i, j)).collect::<Vec<_>>();
        seen.dedup();
        assert_eq!(seen.len(), t.len());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn generators_are_convex_and_deterministic(class_idx in 0usize..10, n in 2usize..9, seed in 0u64..1000) {
            let spec = GenSpec::new(ProblemClass::ALL[class_idx], n, seed);
            let a = generate(&spec).unwrap();
            let b = generate(&spec).unwrap();
            prop_assert_eq!(&a.problem.q, &b.problem.q);
            prop_assert_eq!(&a.problem.a_ineq, &b.problem.a_ineq);
            prop_assert_eq!(&a.problem.a_eq, &b.problem.a_eq);
            prop_assert_eq!(&a.problem.c, &b.problem.c);
            prop_assert_eq!(&a.problem.b_ineq, &b.problem.b_ineq);
            prop_assert_eq!(&a.problem.b_eq, &b.problem.b_eq);
            prop_assert!(a.problem.q.is_symmetric(1e-14));
            let ev = symmetric_eigenvalues(&a.problem.q);
            prop_assert!(ev[0] >= -1e-9);
        }
    }
}
