//! Numerical laboratory for historic (non-convergent) behavior of ergodic
//! averages.
//!
//! The crate simulates a small catalog of dynamical systems, computes Birkhoff
//! and sub-additive averages along orbits, probes whether the sets of points
//! with convergent averages have empty interior, constructs points whose
//! averages provably oscillate, and evaluates Lyapunov exponents of linear
//! cocycles and local entropies of cylinder measures.

pub mod baire;
pub mod birkhoff;
pub mod cocycle;
pub mod entropy;
pub mod error;
pub mod irregular;
pub mod observable;
pub mod point;
pub mod sampler;
pub mod subadditive;
pub mod sum;
pub mod system;
pub mod word;

pub use baire::{
    criterion_check, criterion_check_subadditive, e_set_membership, escaper_probe, find_escape,
    lambda_membership, replay_escaper, Cover, CriterionVerdict, LambdaQuery, LambdaReport, Verdict,
};
pub use birkhoff::{
    birkhoff_average, empirical_signature, oscillation, signature_distance, tail_bounds, trace,
    AverageTrace, CheckpointPolicy, RunningAverages, TailBounds,
};
pub use cocycle::{spectral_norm, CocycleBounds, CocycleSpec, CocycleWalk, ProductAccumulator};
pub use entropy::{
    brin_katok_trace, weak_gibbs_check, weak_gibbs_ratio, EntropyTrace, Envelope, Measure,
};
pub use error::{LabError, Result};
pub use irregular::{build_irregular_word, BlockSchedule, GeneratedWord, IrregularWord, Tolerance};
pub use observable::Observable;
pub use point::Point;
pub use sampler::{make_dense_sample, DenseSampler, SamplerStrategy};
pub use subadditive::{
    first_integral_deviation, lyapunov_gap, m_phi_estimate, smallest_exponent_gap,
    subadditive_value, FirstIntegral, LyapunovGap, SubadditiveSpec,
};
pub use sum::CompensatedSum;
pub use system::{iterate, Orbit, SystemKind, SystemSpec};
pub use word::{PeriodicWord, Word};
