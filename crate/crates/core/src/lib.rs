//! Exact simulation of discrete-time quantum walks driven by several coins.
//!
//! The crate is organised bottom-up:
//!
//! * [`hilbert`] – sparse pure states over `(position, coin_1, ..., coin_M)`.
//! * [`operators`] – coin operators, coin-conditioned shifts and the walk step.
//! * [`transfer`] – perfect state transfer schedules on the line, cycles,
//!   complete graphs and circulant regular graphs.
//! * [`teleport`] – teleportation from coin 1 to coin 2 with exhaustive
//!   measurement-branch enumeration.
//! * [`oracle`] – an independent dense-matrix evolution used to certify
//!   schedules and cross-check the sparse engine.

pub mod error;
pub mod hilbert;
pub mod operators;
pub mod oracle;
pub mod teleport;
pub mod transfer;

pub use error::{Error, Result};
pub use hilbert::{
    fidelity_up_to_phase, inner_product, make_state, product_state, project_subsystem, BasisLabel, GraphSpec,
    OrthonormalBasis, ProjectionOutcome, Subsystem, WalkState, COIN1, COIN2, ORACLE_TOL, PRUNE_THRESHOLD, RESULT_TOL,
};
pub use num_complex::Complex64;
pub use operators::{
    apply_step, coin_matrix, commutator_check, evolve, shift_for, CoinKind, CoinOp, ShiftOp, StepSpec,
};
pub use oracle::{
    certify_schedule, dense_evolve, solve_recovery, CertificationRecord, DensePlan, DenseRun, DenseSystem, Recovery,
};
pub use teleport::{
    run_teleport, sample_branch, teleport_complete, teleport_cycle, teleport_line, teleport_regular, totient_set,
    MeasurementBranch, TeleportKind, TeleportPlan, TeleportRun,
};
pub use transfer::{
    periodicity_check, plan_complete, plan_cycle, plan_line, plan_regular, plan_revival, route_from, run_transfer,
    CaseTag, Periodicity, Placement, TransferPlan, TransferReport,
};
