//! Record/replay backend used to test agent code without the engine.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use super::{Backend, EnvError, Observation, StepResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScriptedStep {
    pub action: usize,
    pub result: StepResult,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScriptedEpisode {
    pub problem_id: String,
    pub initial: Observation,
    pub steps: Vec<ScriptedStep>,
}

pub type Script = Vec<ScriptedEpisode>;

/// Plays back recorded episodes in order. Any reset or step that departs
/// from the script is an error.
#[derive(Debug, Clone, Default)]
pub struct ScriptedBackend {
    pending: VecDeque<ScriptedEpisode>,
    current: Option<(ScriptedEpisode, usize)>,
}

impl ScriptedBackend {
    pub fn new(script: Script) -> Self {
        ScriptedBackend { pending: script.into(), current: None }
    }

    pub fn remaining_episodes(&self) -> usize {
        self.pending.len()
    }
}

impl Backend for ScriptedBackend {
    fn reset(&mut self, problem: Option<&str>) -> Result<Observation, EnvError> {
        let episode = self.pending.pop_front().ok_or_else(|| EnvError::Script("no scripted episode left".into()))?;
        if let Some(id) = problem {
            if id != episode.problem_id {
                return Err(EnvError::Script(format!("reset on '{id}' but script has '{}'", episode.problem_id)));
            }
        }
        let obs = episode.initial.clone();
        self.current = Some((episode, 0));
        Ok(obs)
    }

    fn step(&mut self, action: usize) -> Result<StepResult, EnvError> {
        let (episode, pos) =
            self.current.as_mut().ok_or_else(|| EnvError::Script("step outside a scripted episode".into()))?;
        let expected = episode.steps.get(*pos).ok_or_else(|| EnvError::Script(format!("no scripted step {pos}")))?;
        if expected.action != action {
            return Err(EnvError::Script(format!("action {action} not in script (expected {})", expected.action)));
        }
        *pos += 1;
        Ok(expected.result.clone())
    }
}

/// Wraps a backend and records every successful reset and step.
pub struct Recorder<B> {
    inner: B,
    script: Script,
}

impl<B: Backend> Recorder<B> {
    pub fn new(inner: B) -> Self {
        Recorder { inner, script: Vec::new() }
    }

    pub fn script(&self) -> &Script {
        &self.script
    }

    pub fn into_parts(self) -> (B, Script) {
        (self.inner, self.script)
    }
}

impl<B: Backend> Backend for Recorder<B> {
    fn reset(&mut self, problem: Option<&str>) -> Result<Observation, EnvError> {
        let obs = self.inner.reset(problem)?;
        self.script.push(ScriptedEpisode {
            problem_id: obs.problem_id.clone(),
            initial: obs.clone(),
            steps: Vec::new(),
        });
        Ok(obs)
    }

    fn step(&mut self, action: usize) -> Result<StepResult, EnvError> {
        let result = self.inner.step(action)?;
        if let Some(episode) = self.script.last_mut() {
            episode.steps.push(ScriptedStep { action, result: result.clone() });
        }
        Ok(result)
    }
}
