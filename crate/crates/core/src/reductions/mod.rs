//! Product constructions for the window objectives and the objective dispatcher.

mod product;
mod rr;
mod threshold;

use serde::Serialize;
use thiserror::Error;

use crate::model::{Arena, Family, ObjectiveKind, ObjectiveSpec, SpecError};
use crate::solvers::{SolverError, WinningRegions};

pub(crate) use product::Step;
pub use product::{Construction, Payload, ProductArena, ProductObjective, ProductState};
pub use rr::{build_rr_instance, solve_request_response, RequestResponsePair, RrSolution};
pub use threshold::{bounded_threshold, fixed_product_bound};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ReductionError {
    #[error(transparent)]
    Spec(#[from] SpecError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error("history product is one-dimensional")]
    HistoryDimensions,
    #[error("the history product applies to fixed parity-response objectives only")]
    HistoryNotApplicable,
    #[error("the request-response route applies to bounded objectives only")]
    RequestResponseNotApplicable,
    #[error("instance too large for bounded solving")]
    ThresholdOverflow,
    #[error("{0} request-response pairs exceed the supported 64")]
    TooManyPairs(usize),
    #[error("generalized reachability supports at most 32 target sets, got {0}")]
    TooManyTargets(usize),
    #[error("initial vertex index {0} outside the arena")]
    UnknownInitial(usize),
}

/// Algorithm selection for the window objectives.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize)]
pub enum Via {
    /// Counter product for FixPR, window product for FixWP, thresholds for bounded
    /// objectives (falling back to request-response when the product would be too large).
    #[default]
    Auto,
    /// History product for FixPR.
    History,
    /// Request-response encoding for bounded objectives.
    RequestResponse,
    /// Thresholds for bounded objectives regardless of product size.
    Threshold,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolveOptions {
    pub via: Via,
    /// Largest fixed-λ product (by its a-priori bound) the automatic route builds for
    /// bounded objectives before switching to the request-response encoding.
    pub max_threshold_states: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { via: Via::Auto, max_threshold_states: 2.0e6 }
    }
}

impl SolveOptions {
    pub fn via(via: Via) -> SolveOptions {
        SolveOptions { via, ..SolveOptions::default() }
    }
}

/// Which construction decided the objective.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Route {
    Classical,
    VisitedSet,
    WindowProduct,
    CounterProduct,
    HistoryProduct,
    RequestResponse,
}

#[derive(Clone, Debug)]
pub struct SolveResult {
    pub spec: ObjectiveSpec,
    pub route: Route,
    /// λ of the fixed product that was solved (the threshold for bounded objectives).
    pub lambda: Option<u32>,
    /// Threshold computed for a bounded objective, if any.
    pub threshold: Option<u32>,
    /// Winner of every source vertex.
    pub regions: WinningRegions,
    pub product: ProductArena,
    /// Product regions with memoryless strategies, when the route provides them.
    pub product_regions: Option<WinningRegions>,
}

impl SolveResult {
    pub fn product_objective(&self) -> ProductObjective {
        self.product.objective()
    }
}

/// Decides `spec` on every vertex of `arena` with default options.
pub fn solve(arena: &Arena, spec: &ObjectiveSpec, initial: Option<usize>) -> Result<SolveResult, ReductionError> {
    solve_with(arena, spec, initial, &SolveOptions::default())
}

pub fn solve_with(
    arena: &Arena,
    spec: &ObjectiveSpec,
    initial: Option<usize>,
    options: &SolveOptions,
) -> Result<SolveResult, ReductionError> {
    spec.check_for(arena)?;
    if let Some(v) = initial.filter(|&v| v >= arena.len()) {
        return Err(ReductionError::UnknownInitial(v));
    }
    if options.via == Via::History && spec.kind != ObjectiveKind::FixPR {
        return Err(ReductionError::HistoryNotApplicable);
    }
    if options.via == Via::RequestResponse && !spec.kind.is_bounded() {
        return Err(ReductionError::RequestResponseNotApplicable);
    }
    let identity = |objective: ProductObjective, target: Vec<bool>| Construction::Identity { objective, target };
    let n = arena.len();
    let (construction, route) = match spec.kind {
        ObjectiveKind::Parity => {
            if arena.dims() != 1 {
                return Err(SolverError::ParityDimensions.into());
            }
            (identity(ProductObjective::Parity, vec![true; n]), Route::Classical)
        }
        ObjectiveKind::Reach => (identity(ProductObjective::Reachability, spec.target_mask(0, n)), Route::Classical),
        ObjectiveKind::Safe => (identity(ProductObjective::Safety, spec.target_mask(0, n)), Route::Classical),
        ObjectiveKind::Buchi => (identity(ProductObjective::Buchi, spec.target_mask(0, n)), Route::Classical),
        ObjectiveKind::CoBuchi => (identity(ProductObjective::CoBuchi, spec.target_mask(0, n)), Route::Classical),
        ObjectiveKind::GenReach => {
            if spec.targets.len() > 32 {
                return Err(ReductionError::TooManyTargets(spec.targets.len()));
            }
            (Construction::visited(arena, &spec.targets), Route::VisitedSet)
        }
        ObjectiveKind::FixPR | ObjectiveKind::FixWP => {
            let lambda = spec.lambda.unwrap();
            fixed_construction(arena, spec.family().unwrap(), lambda, spec.direct, options.via)?
        }
        ObjectiveKind::BndPR | ObjectiveKind::BndWP => return solve_bounded(arena, spec, options),
    };
    let product = ProductArena::build(arena, construction);
    let product_regions = product.solve();
    Ok(SolveResult {
        spec: spec.clone(),
        route,
        lambda: spec.lambda,
        threshold: None,
        regions: product.project(&product_regions),
        product,
        product_regions: Some(product_regions),
    })
}

fn fixed_construction(
    arena: &Arena,
    family: Family,
    lambda: u32,
    direct: bool,
    via: Via,
) -> Result<(Construction, Route), ReductionError> {
    Ok(match family {
        Family::WP => (Construction::window(lambda, direct), Route::WindowProduct),
        Family::PR if via == Via::History => {
            if arena.dims() != 1 {
                return Err(ReductionError::HistoryDimensions);
            }
            (Construction::history(lambda, direct), Route::HistoryProduct)
        }
        // With λ = 1 every position must carry an even priority, which is exactly the
        // window product at λ = 1.
        Family::PR if lambda == 1 => (Construction::window(1, direct), Route::WindowProduct),
        Family::PR => (Construction::counter(arena, lambda, direct), Route::CounterProduct),
    })
}

fn solve_bounded(arena: &Arena, spec: &ObjectiveSpec, options: &SolveOptions) -> Result<SolveResult, ReductionError> {
    let family = spec.family().unwrap();
    let threshold = match options.via {
        Via::RequestResponse => None,
        _ => match bounded_threshold(arena, family) {
            Ok(t) => Some(t),
            Err(e) if options.via == Via::Threshold => return Err(e),
            Err(_) => None,
        },
    };
    let use_threshold = match (options.via, threshold) {
        (Via::Threshold, Some(_)) => true,
        (Via::Auto, Some(t)) => fixed_product_bound(arena, family, t) <= options.max_threshold_states,
        _ => false,
    };
    if use_threshold {
        let t = threshold.unwrap();
        let (construction, route) = fixed_construction(arena, family, t, spec.direct, Via::Auto)?;
        let product = ProductArena::build(arena, construction);
        let product_regions = product.solve();
        return Ok(SolveResult {
            spec: spec.clone(),
            route,
            lambda: Some(t),
            threshold,
            regions: product.project(&product_regions),
            product,
            product_regions: Some(product_regions),
        });
    }
    let pairs = build_rr_instance(arena);
    let rr = solve_request_response(arena, &pairs, spec.direct)?;
    Ok(SolveResult {
        spec: spec.clone(),
        route: Route::RequestResponse,
        lambda: None,
        threshold,
        regions: rr.regions,
        product: rr.product,
        product_regions: rr.product_regions,
    })
}

/// The seven window objectives that take a λ, plus the bounded ones, in a fixed order.
pub fn window_specs(lambda: u32) -> Vec<ObjectiveSpec> {
    let mut out = Vec::new();
    for direct in [true, false] {
        out.push(ObjectiveSpec::fix_pr(lambda, direct));
        out.push(ObjectiveSpec::fix_wp(lambda, direct));
        out.push(ObjectiveSpec::bnd_pr(direct));
        out.push(ObjectiveSpec::bnd_wp(direct));
    }
    out
}
