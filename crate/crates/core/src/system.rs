//! A scenario bundled with every statistic derived from it.

use crate::channel::ChannelStats;
use crate::closed_form::PowerControl;
use crate::error::Result;
use crate::estimation::{EstimationStats, Powers};
use crate::ris::RisModel;
use crate::scenario::Scenario;

#[derive(Clone, Debug)]
pub struct SystemModel {
    pub scenario: Scenario,
    pub ris: RisModel,
    pub stats: ChannelStats,
    pub powers: Powers,
    pub est: EstimationStats,
    pub power_control: PowerControl,
}

impl SystemModel {
    /// Builds the RIS deployment from the scenario's own config.
    pub fn new(scenario: Scenario) -> Result<Self> {
        let ris = RisModel::from_config(&scenario.config)?;
        Self::with_ris(scenario, ris)
    }

    pub fn with_ris(scenario: Scenario, ris: RisModel) -> Result<Self> {
        let stats = ChannelStats::new(&scenario, &ris);
        let powers = Powers::from_scenario(&scenario);
        let est = EstimationStats::new(&scenario, ris.noise_trace(), &stats, &powers)?;
        let power_control = PowerControl::fractional(&est, scenario.num_aps(), scenario.num_users())?;
        Ok(Self {
            scenario,
            ris,
            stats,
            powers,
            est,
            power_control,
        })
    }

    pub fn num_aps(&self) -> usize {
        self.scenario.num_aps()
    }

    pub fn num_users(&self) -> usize {
        self.scenario.num_users()
    }

    pub fn estimation_instant(&self) -> usize {
        self.est.estimation_instant
    }

    pub fn block_length(&self) -> usize {
        self.scenario.config.block_length
    }
}
