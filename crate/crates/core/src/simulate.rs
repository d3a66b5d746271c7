//! Synthetic models with known graphs and the TPR/FPR replication study.
//!
//! Rows are drawn independently. Within a row the structured variables are
//! drawn first in the order they are listed for each model, then the noise
//! terms, then the independent standard-normal columns.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, StandardNormal, StudentT};
use rayon::prelude::*;

use crate::codec::{derive_seed, CodecOptions};
use crate::config::SelectionConfig;
use crate::data::DataMatrix;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::precision::{
    glasso_path, lambda_path, npn_skeptic, sample_correlation, CovarianceMatrix, PgConfig,
};
use crate::selection::ggm_recover;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
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

    /// Smallest `p` leaving room for the structured block plus one noise column.
    pub fn min_p(self) -> usize {
        match self {
            ModelId::M5 | ModelId::M6 => 13,
            _ => 7,
        }
    }
}

impl fmt::Display for ModelId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

impl FromStr for ModelId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ModelId::ALL
            .into_iter()
            .find(|m| m.to_string().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidParameter(format!("unknown model `{s}`")))
    }
}

/// How the parameter of `Ex(a)` is read.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ExpConvention {
    /// `a` is the rate; mean `1/a`.
    #[default]
    Rate,
    /// `a` is the mean.
    Mean,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SimModel {
    pub id: ModelId,
    pub p: usize,
    pub n: usize,
    pub seed: u64,
    pub exp: ExpConvention,
}

impl SimModel {
    /// `p = 100`, rate convention.
    pub fn new(id: ModelId, n: usize, seed: u64) -> Self {
        Self {
            id,
            p: 100,
            n,
            seed,
            exp: ExpConvention::Rate,
        }
    }

    pub fn with_p(self, p: usize) -> Self {
        Self { p, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if self.p < self.id.min_p() {
            return Err(Error::BadDimension {
                model: self.id.to_string(),
                min: self.id.min_p(),
                p: self.p,
            });
        }
        if self.n < 2 {
            return Err(Error::TooFewRows(self.n));
        }
        Ok(())
    }
}

/// Ground-truth graph of a model (0-based vertices).
pub fn true_graph(id: ModelId, p: usize) -> Result<Graph> {
    if p < id.min_p() {
        return Err(Error::BadDimension {
            model: id.to_string(),
            min: id.min_p(),
            p,
        });
    }
    let edges: Vec<(usize, usize)> = match id {
        ModelId::M1 | ModelId::M2 | ModelId::M3 | ModelId::M4 => {
            vec![(0, 1), (0, 2), (2, 3), (4, 5)]
        }
        ModelId::M5 | ModelId::M6 => {
            let mut e = vec![(0, 1)];
            for j in 0..10 {
                e.push((j, j + 2));
                e.push((j + 1, j + 2));
            }
            e
        }
    };
    Graph::from_edges(p, edges)
}

fn exponential(param: f64, convention: ExpConvention) -> Exp<f64> {
    let rate = match convention {
        ExpConvention::Rate => param,
        ExpConvention::Mean => 1.0 / param,
    };
    Exp::new(rate).expect("positive rate")
}

/// `n` i.i.d. rows of the model and its true graph.
pub fn generate(model: &SimModel) -> Result<(DataMatrix, Graph)> {
    model.validate()?;
    let (n, p) = (model.n, model.p);
    let mut rng = ChaCha8Rng::seed_from_u64(model.seed);
    let ex1 = exponential(1.0, model.exp);
    let ex3 = exponential(3.0, model.exp);
    let t3 = StudentT::new(3.0).expect("positive df");
    let mut values = Vec::with_capacity(n * p);
    let mut row = vec![0.0; p];
    for _ in 0..n {
        fill_row(model.id, &mut row, &mut rng, &ex1, &ex3, &t3);
        values.extend_from_slice(&row);
    }
    let data = DataMatrix::from_row_major(n, p, values, None)?;
    Ok((data, true_graph(model.id, p)?))
}

fn fill_row<R: Rng>(
    id: ModelId,
    x: &mut [f64],
    rng: &mut R,
    ex1: &Exp<f64>,
    ex3: &Exp<f64>,
    t3: &StudentT<f64>,
) {
    let normal = |rng: &mut R| -> f64 { StandardNormal.sample(rng) };
    let structured = match id {
        ModelId::M1 | ModelId::M2 | ModelId::M3 | ModelId::M4 => {
            let heavy = matches!(id, ModelId::M1 | ModelId::M3);
            let (x2, x4, x6) = if heavy {
                (ex1.sample(rng), t3.sample(rng), ex3.sample(rng))
            } else {
                (normal(rng), normal(rng), normal(rng))
            };
            let (e1, e2, e3) = (normal(rng), normal(rng), normal(rng));
            let linear = matches!(id, ModelId::M1 | ModelId::M2);
            let (x1, x3, x5) = if linear {
                let x3 = 0.1 * x4 + e1;
                (0.2 * x2 + x3 + e2, x3, 0.1 * x6 + e3)
            } else {
                let x3 = 0.1 * x4.exp() + e1;
                (0.2 * x2.sin() + x3.sin() + e2, x3, 0.2 * x6.exp() + e3)
            };
            x[..6].copy_from_slice(&[x1, x2, x3, x4, x5, x6]);
            6
        }
        ModelId::M5 | ModelId::M6 => {
            let nonlinear = id == ModelId::M6;
            if nonlinear {
                x[0] = normal(rng);
                x[1] = normal(rng);
            } else {
                x[0] = ex1.sample(rng);
                x[1] = ex3.sample(rng);
            }
            for j in 0..10 {
                let e = normal(rng);
                x[j + 2] = if nonlinear {
                    0.2 * x[j].sin() + 0.3 * x[j + 1].sin() + e
                } else {
                    0.2 * x[j] + 0.3 * x[j + 1] + e
                };
            }
            12
        }
    };
    for v in &mut x[structured..] {
        *v = normal(rng);
    }
}

/// True and false positive rates over unordered pairs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rates {
    pub tpr: f64,
    pub fpr: f64,
}

pub fn tpr_fpr(predicted: &Graph, truth: &Graph) -> Result<Rates> {
    if predicted.p() != truth.p() {
        return Err(Error::DimensionMismatch(predicted.p(), truth.p()));
    }
    let p = truth.p();
    let pairs = p * (p - 1) / 2;
    let positives = truth.edge_count();
    if positives == 0 {
        return Err(Error::NoTrueEdges);
    }
    if positives == pairs {
        return Err(Error::NoTrueNonEdges);
    }
    let hits = predicted.edges().intersection(truth.edges()).count();
    let false_hits = predicted.edge_count() - hits;
    Ok(Rates {
        tpr: hits as f64 / positives as f64,
        fpr: false_hits as f64 / (pairs - positives) as f64,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    /// Thresholded conditional dependence coefficients.
    Ggm,
    /// Glasso support on the sample correlation.
    Glasso,
    /// Glasso support on the skeptic correlation.
    GlassoNpn,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::Ggm, Method::Glasso, Method::GlassoNpn];

    pub fn name(self) -> &'static str {
        match self {
            Method::Ggm => "ggm",
            Method::Glasso => "glasso",
            Method::GlassoNpn => "glasso-npn",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.to_ascii_lowercase().replace('_', "-");
        Method::ALL
            .into_iter()
            .find(|m| m.name() == key || (key == "glassonpn" && *m == Method::GlassoNpn))
            .ok_or_else(|| Error::InvalidParameter(format!("unknown method `{s}`")))
    }
}

/// Settings for the methods compared in a study.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StudyConfig {
    /// GGM threshold; `None` means `1/n`.
    pub lambda: Option<f64>,
    pub codec: CodecOptions,
    /// Number of glasso penalties; the smallest one is used.
    pub path_len: usize,
    /// Smallest penalty as a fraction of the largest.
    pub path_ratio: f64,
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for StudyConfig {
    fn default() -> Self {
        Self {
            lambda: None,
            codec: CodecOptions::default(),
            path_len: 10,
            path_ratio: 0.1,
            tol: 1e-4,
            max_iter: 500,
        }
    }
}

/// One replication of one method.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricsRecord {
    pub model: ModelId,
    pub method: Method,
    pub n: usize,
    pub replication: usize,
    pub tpr: f64,
    pub fpr: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FailureRecord {
    pub replication: usize,
    pub method: Method,
    pub message: String,
}

/// Averages over the successful replications of one method.
#[derive(Debug, Clone, PartialEq)]
pub struct MethodSummary {
    pub model: ModelId,
    pub method: Method,
    pub n: usize,
    pub reps: usize,
    pub failures: usize,
    pub mean_tpr: f64,
    pub mean_fpr: f64,
    pub sd_tpr: f64,
    pub sd_fpr: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StudyReport {
    pub summaries: Vec<MethodSummary>,
    pub records: Vec<MetricsRecord>,
    pub failures: Vec<FailureRecord>,
}

impl StudyReport {
    pub fn summary(&self, method: Method) -> Option<&MethodSummary> {
        self.summaries.iter().find(|s| s.method == method)
    }
}

/// Seed of replication `r` in a study seeded with `study_seed`.
pub fn replication_seed(study_seed: u64, r: usize) -> u64 {
    derive_seed(study_seed, r as u64)
}

/// Recovers a graph from `data` with one of the compared methods.
pub fn run_method(
    method: Method,
    data: &DataMatrix,
    seed: u64,
    config: &StudyConfig,
) -> Result<Graph> {
    match method {
        Method::Ggm => {
            let lambda = config.lambda.unwrap_or(1.0 / data.n() as f64);
            let sel = SelectionConfig::new(lambda, seed)?;
            Ok(ggm_recover(data, &sel, &config.codec)?.graph)
        }
        Method::Glasso => glasso_smallest(&sample_correlation(data), config),
        Method::GlassoNpn => glasso_smallest(&npn_skeptic(data), config),
    }
}

fn glasso_smallest(s: &CovarianceMatrix, config: &StudyConfig) -> Result<Graph> {
    let lambdas = lambda_path(s, config.path_len, config.path_ratio);
    let pg = PgConfig {
        lambda: 0.0,
        t_n: 1.0,
        tol: config.tol,
        max_iter: config.max_iter,
    };
    let path = glasso_path(s, &lambdas, &pg)?;
    Ok(path
        .last()
        .map_or_else(|| Graph::empty(s.p()), |k| k.support()))
}

/// Runs `reps` replications of every method on `model`.
///
/// Replication `r` draws its data and tie-breaking from
/// [`replication_seed`]`(model.seed, r)`, so the report does not depend on
/// scheduling.
pub fn run_study(
    model: &SimModel,
    methods: &[Method],
    reps: usize,
    config: &StudyConfig,
) -> Result<StudyReport> {
    model.validate()?;
    if reps == 0 {
        return Err(Error::InvalidParameter("reps must be at least 1".into()));
    }
    let outcomes: Vec<Vec<(Method, Result<Rates>)>> = (0..reps)
        .into_par_iter()
        .map(|r| {
            let seed = replication_seed(model.seed, r);
            let sample = generate(&SimModel { seed, ..*model });
            methods
                .iter()
                .map(|&m| {
                    let rates = sample
                        .as_ref()
                        .map_err(Clone::clone)
                        .and_then(|(data, truth)| {
                            run_method(m, data, seed, config).and_then(|g| tpr_fpr(&g, truth))
                        });
                    (m, rates)
                })
                .collect()
        })
        .collect();

    let mut records = Vec::new();
    let mut failures = Vec::new();
    for (r, per_method) in outcomes.into_iter().enumerate() {
        for (method, rates) in per_method {
            match rates {
                Ok(Rates { tpr, fpr }) => records.push(MetricsRecord {
                    model: model.id,
                    method,
                    n: model.n,
                    replication: r,
                    tpr,
                    fpr,
                }),
                Err(e) => failures.push(FailureRecord {
                    replication: r,
                    method,
                    message: e.to_string(),
                }),
            }
        }
    }
    let summaries = methods
        .iter()
        .map(|&method| {
            let tprs: Vec<f64> = records
                .iter()
                .filter(|x| x.method == method)
                .map(|x| x.tpr)
                .collect();
            let fprs: Vec<f64> = records
                .iter()
                .filter(|x| x.method == method)
                .map(|x| x.fpr)
                .collect();
            MethodSummary {
                model: model.id,
                method,
                n: model.n,
                reps,
                failures: failures.iter().filter(|f| f.method == method).count(),
                mean_tpr: mean(&tprs),
                mean_fpr: mean(&fprs),
                sd_tpr: sd(&tprs),
                sd_fpr: sd(&fprs),
            }
        })
        .collect();
    Ok(StudyReport {
        summaries,
        records,
        failures,
    })
}

fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        f64::NAN
    } else {
        xs.iter().sum::<f64>() / xs.len() as f64
    }
}

/// Sample standard deviation; 0 for a single value.
fn sd(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return if xs.is_empty() { f64::NAN } else { 0.0 };
    }
    let m = mean(xs);
    (xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() - 1) as f64).sqrt()
}
