//! Staged freeze plans and token budgets for continued pretraining.
//!
//! Stage one trains only the embeddings and the outermost transformer
//! layers; stage two unfreezes everything.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::io::provenance::Provenance;

pub const INPUT_EMBEDDING: &str = "input_embedding";
pub const LM_HEAD: &str = "lm_head";
pub const DEFAULT_NAME_TEMPLATE: &str = "layers.{i}";
pub const MANIFEST_FORMAT_VERSION: u32 = 1;

pub const BOUNDARY_BUDGET: u64 = 4_000_000_000;
pub const FULL_BUDGET: u64 = 16_000_000_000;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum TrainPlanError {
    #[error("model must have at least one layer")]
    ZeroLayers,
    #[error("layer name template {0:?} must contain {{i}}")]
    BadTemplate(String),
    #[error("unknown stage {0:?}")]
    UnknownStage(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Stage {
    BoundaryAdaptation,
    FullAdaptation,
}

impl Stage {
    pub const ALL: [Stage; 2] = [Stage::BoundaryAdaptation, Stage::FullAdaptation];

    pub fn as_str(self) -> &'static str {
        match self {
            Stage::BoundaryAdaptation => "boundary-adaptation",
            Stage::FullAdaptation => "full-adaptation",
        }
    }

    pub fn default_budget(self) -> u64 {
        match self {
            Stage::BoundaryAdaptation => BOUNDARY_BUDGET,
            Stage::FullAdaptation => FULL_BUDGET,
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Stage {
    type Err = TrainPlanError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Stage::ALL
            .into_iter()
            .find(|st| st.as_str() == s)
            .ok_or_else(|| TrainPlanError::UnknownStage(s.to_owned()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GroupName {
    InputEmbedding,
    Layer(usize),
    LmHead,
}

impl GroupName {
    pub fn render(&self, template: &str) -> String {
        match self {
            GroupName::InputEmbedding => INPUT_EMBEDDING.to_owned(),
            GroupName::LmHead => LM_HEAD.to_owned(),
            GroupName::Layer(i) => template.replace("{i}", &i.to_string()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParameterGroup {
    pub name: GroupName,
    pub trainable: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FreezePlan {
    pub stage: Stage,
    pub n_layers: usize,
    /// Input embedding, layers in order, then the output head.
    pub groups: Vec<ParameterGroup>,
    pub token_budget: u64,
}

impl FreezePlan {
    pub fn trainable(&self) -> impl Iterator<Item = &GroupName> {
        self.groups.iter().filter(|g| g.trainable).map(|g| &g.name)
    }

    pub fn frozen(&self) -> impl Iterator<Item = &GroupName> {
        self.groups.iter().filter(|g| !g.trainable).map(|g| &g.name)
    }

    pub fn frozen_layer_count(&self) -> usize {
        self.frozen().filter(|g| matches!(g, GroupName::Layer(_))).count()
    }
}

fn boundary_layers(n_layers: usize) -> [usize; 4] {
    [0, 1.min(n_layers - 1), n_layers.saturating_sub(2), n_layers - 1]
}

pub fn make_freeze_plan(
    n_layers: usize,
    stage: Stage,
    budget_override: Option<u64>,
) -> Result<FreezePlan, TrainPlanError> {
    if n_layers == 0 {
        return Err(TrainPlanError::ZeroLayers);
    }
    let boundary = boundary_layers(n_layers);
    let layer_trainable = |i: usize| match stage {
        Stage::FullAdaptation => true,
        Stage::BoundaryAdaptation => boundary.contains(&i),
    };
    let mut groups = vec![ParameterGroup {
        name: GroupName::InputEmbedding,
        trainable: true,
    }];
    groups.extend((0..n_layers).map(|i| ParameterGroup {
        name: GroupName::Layer(i),
        trainable: layer_trainable(i),
    }));
    groups.push(ParameterGroup {
        name: GroupName::LmHead,
        trainable: true,
    });
    Ok(FreezePlan {
        stage,
        n_layers,
        groups,
        token_budget: budget_override.unwrap_or(stage.default_budget()),
    })
}

/// Both stages in order. `budgets` overrides the per-stage defaults.
pub fn pipeline_manifest(n_layers: usize, budgets: Option<[u64; 2]>) -> Result<Vec<FreezePlan>, TrainPlanError> {
    Stage::ALL
        .into_iter()
        .enumerate()
        .map(|(k, st)| make_freeze_plan(n_layers, st, budgets.map(|b| b[k])))
        .collect()
}

/// On-disk form of one or more freeze plans.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub format_version: u32,
    pub tool_version: String,
    pub config_hash: String,
    pub n_layers: usize,
    /// False when any budget differs from the stage default.
    pub default_budgets: bool,
    pub stages: Vec<ManifestStage>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestStage {
    pub stage: Stage,
    pub token_budget: u64,
    pub trainable: Vec<String>,
    pub frozen: Vec<String>,
}

impl Manifest {
    pub fn new(plans: &[FreezePlan], template: &str, provenance: &Provenance) -> Result<Self, TrainPlanError> {
        if !template.contains("{i}") {
            return Err(TrainPlanError::BadTemplate(template.to_owned()));
        }
        let n_layers = plans.first().map_or(0, |p| p.n_layers);
        Ok(Self {
            format_version: MANIFEST_FORMAT_VERSION,
            tool_version: provenance.tool_version.clone(),
            config_hash: provenance.config_hash.clone(),
            n_layers,
            default_budgets: plans.iter().all(|p| p.token_budget == p.stage.default_budget()),
            stages: plans
                .iter()
                .map(|p| ManifestStage {
                    stage: p.stage,
                    token_budget: p.token_budget,
                    trainable: p.trainable().map(|g| g.render(template)).collect(),
                    frozen: p.frozen().map(|g| g.render(template)).collect(),
                })
                .collect(),
        })
    }

    pub fn total_budget(&self) -> u64 {
        self.stages.iter().map(|s| s.token_budget).sum()
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("manifest serializes");
        s.push('\n');
        s
    }

    pub fn from_json(s: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::BTreeSet;

    fn trainable_set(p: &FreezePlan) -> BTreeSet<GroupName> {
        p.trainable().cloned().collect()
    }

    #[test]
    fn fifty_layer_boundary() {
        let p = make_freeze_plan(50, Stage::BoundaryAdaptation, None).unwrap();
        let want: BTreeSet<_> = [
            GroupName::InputEmbedding,
            GroupName::LmHead,
            GroupName::Layer(0),
            GroupName::Layer(1),
            GroupName::Layer(48),
            GroupName::Layer(49),
        ]
        .into();
        assert_eq!(trainable_set(&p), want);
        assert_eq!(p.token_budget, 4_000_000_000);
        assert_eq!(p.frozen_layer_count(), 46);
    }

    #[test]
    fn shallow_models_deduplicate() {
        let p = make_freeze_plan(3, Stage::BoundaryAdaptation, None).unwrap();
        assert_eq!(p.groups.len(), 5);
        assert!(p.groups.iter().all(|g| g.trainable));
        let p = make_freeze_plan(1, Stage::BoundaryAdaptation, None).unwrap();
        assert_eq!(trainable_set(&p).len(), 3);
    }

    #[test]
    fn full_stage_trains_everything() {
        let p = make_freeze_plan(50, Stage::FullAdaptation, None).unwrap();
        assert_eq!(p.frozen().count(), 0);
        assert_eq!(p.token_budget, 16_000_000_000);
    }

    #[test]
    fn zero_layers() {
        assert_eq!(
            make_freeze_plan(0, Stage::FullAdaptation, None),
            Err(TrainPlanError::ZeroLayers)
        );
        assert_eq!(pipeline_manifest(0, None), Err(TrainPlanError::ZeroLayers));
    }

    #[test]
    fn pipeline_budgets() {
        let plans = pipeline_manifest(50, None).unwrap();
        assert_eq!(plans.iter().map(|p| p.stage).collect::<Vec<_>>(), Stage::ALL);
        let prov = Provenance::for_config(&50u32);
        let m = Manifest::new(&plans, DEFAULT_NAME_TEMPLATE, &prov).unwrap();
        assert_eq!(m.total_budget(), 20_000_000_000);
        assert!(m.default_budgets);
        assert_eq!(
            m.stages[0].trainable,
            [
                "input_embedding",
                "layers.0",
                "layers.1",
                "layers.48",
                "layers.49",
                "lm_head"
            ]
        );

        let plans = pipeline_manifest(50, Some([1_000_000, 4_000_000])).unwrap();
        let m = Manifest::new(&plans, DEFAULT_NAME_TEMPLATE, &prov).unwrap();
        assert_eq!(m.total_budget(), 5_000_000);
        assert!(!m.default_budgets);
    }

    #[test]
    fn template() {
        let plans = pipeline_manifest(2, None).unwrap();
        let prov = Provenance::for_config(&2u32);
        let m = Manifest::new(&plans, "model.h.{i}.block", &prov).unwrap();
        assert_eq!(m.stages[1].trainable[1], "model.h.0.block");
        assert!(matches!(
            Manifest::new(&plans, "layers", &prov),
            Err(TrainPlanError::BadTemplate(_))
        ));
    }

    #[test]
    fn stage_names() {
        for st in Stage::ALL {
            assert_eq!(st.as_str().parse::<Stage>().unwrap(), st);
            assert_eq!(serde_json::to_string(&st).unwrap(), format!("\"{st}\""));
        }
        assert!("stage-3".parse::<Stage>().is_err());
    }

    proptest! {
        #[test]
        fn boundary_freezes_all_but_four(n in 5usize..400) {
            let p = make_freeze_plan(n, Stage::BoundaryAdaptation, None).unwrap();
            prop_assert_eq!(p.frozen_layer_count(), n - 4);
        }

        #[test]
        fn manifest_round_trips(n in 1usize..120, b1 in 1u64..u64::MAX / 2, b2 in 1u64..u64::MAX / 2) {
            let plans = pipeline_manifest(n, Some([b1, b2])).unwrap();
            let m = Manifest::new(&plans, DEFAULT_NAME_TEMPLATE, &Provenance::for_config(&n)).unwrap();
            prop_assert_eq!(Manifest::from_json(&m.to_json()).unwrap(), m);
        }
    }
}
