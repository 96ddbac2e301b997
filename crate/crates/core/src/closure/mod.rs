//! Weak-closure certificates.

pub mod closedness;
pub mod divergence;
pub mod pseq;
pub mod series;

pub use closedness::{
    closedness_certificate, not_weakly_supercyclic, row_sum_check, set_a_statistic, shift_orbit_ratios,
    ClosednessVerdict, RowSumReport, SetAReport, SpaceKind,
};
pub use divergence::{weak_zero_divergence, CoefSeq, DivergenceVerdict, Exponent, Tail};
pub use pseq::{
    gram_2seq_bound, gram_of_zvectors, inner_l2, orbit_certificate, pseq_perturbation_bound, GramStats,
    OrbitCertificate, PSeqEvidence, PerturbationBound, SampleEvidence,
};
pub use series::{PartialSums, Trend};
