//! Arrival processes and the information-restricted online engine.

mod arrival;
mod engine;

pub use arrival::{sample_arrival, ArrivalProcess};
pub use engine::{
    conservativeness, is_conservative, run_online, run_online_with, Action, ArrivalEvent, Catastrophe,
    Conservativeness, Decision, FilterStats, FreeGirls, OnlinePolicy, PolicyDiagnostics, PolicyFactory,
    PublicInfo, RunTrace, RwyStats, WeightClassStats,
};
