//! Criteria for (weak) hypercyclicity and supercyclicity of bilateral weighted shifts.

pub mod families;
pub mod identities;
pub mod kappa;
pub mod salas;
pub mod wcert;
pub mod wvector;

pub use families::WeightFamily;
pub use identities::{verify_weight_identities, IdentityReport};
pub use kappa::{build_kappa, Kappa};
pub use salas::{
    d_constant, evaluate_criterion, salas_hyper_stat, salas_simplified_stats, salas_super_stat, CriterionVerdict,
    Statistic, Verdict, DEFAULT_TOL,
};
pub use wcert::{check_w_conditions, RSeq, Space, WCertificate, WReport};
pub use wvector::{build_w_vector, WVector, WVectorOptions};
