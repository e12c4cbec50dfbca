//! Shared fixtures for the benchmarks.

use bellscope_core::{BellState, ChshSettings, CorrelationModel, SettingPair};

pub fn singlet() -> CorrelationModel {
    CorrelationModel::Quantum(BellState::singlet())
}

pub fn photon() -> CorrelationModel {
    CorrelationModel::Quantum(BellState::photon_pair())
}

pub fn optimal_schedule() -> [SettingPair; 4] {
    ChshSettings::singlet_optimal().pairs()
}
