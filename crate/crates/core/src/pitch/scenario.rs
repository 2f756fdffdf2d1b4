use super::PitchError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScenarioKind {
    /// Full 11-vs-11 match with kickoff restarts after goals.
    Match,
    /// One attacker with the ball, no defenders; ends on a goal or when the
    /// ball leaves play.
    EmptyGoal,
}

/// A named environment preset.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: &'static str,
    pub kind: ScenarioKind,
    /// Opponent speed and aggression scale, in [0, 1].
    pub difficulty: f64,
    pub episode_length: u32,
}

pub const SCENARIO_NAMES: [&str; 5] = ["easy", "hard", "competition", "kaggle", "empty_goal_1v0"];

impl Scenario {
    pub fn by_name(name: &str) -> Result<Self, PitchError> {
        let (kind, difficulty, episode_length) = match name {
            "easy" => (ScenarioKind::Match, 0.05, 3000),
            "hard" => (ScenarioKind::Match, 0.95, 3000),
            "competition" => (ScenarioKind::Match, 0.6, 3000),
            "kaggle" => (ScenarioKind::Match, 1.0, 3000),
            "empty_goal_1v0" => (ScenarioKind::EmptyGoal, 0.0, 400),
            _ => {
                return Err(PitchError::UnknownScenario {
                    name: name.to_string(),
                    available: SCENARIO_NAMES.join(", "),
                })
            }
        };
        let name = SCENARIO_NAMES
            .iter()
            .find(|n| **n == name)
            .expect("matched above");
        Ok(Self {
            name,
            kind,
            difficulty,
            episode_length,
        })
    }

    pub fn with_difficulty(mut self, difficulty: f64) -> Result<Self, PitchError> {
        if !(0.0..=1.0).contains(&difficulty) {
            return Err(PitchError::Difficulty(difficulty));
        }
        self.difficulty = difficulty;
        Ok(self)
    }

    pub fn with_episode_length(mut self, steps: u32) -> Self {
        self.episode_length = steps.max(1);
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets() {
        assert_eq!(Scenario::by_name("easy").unwrap().difficulty, 0.05);
        assert_eq!(Scenario::by_name("hard").unwrap().difficulty, 0.95);
        assert_eq!(Scenario::by_name("competition").unwrap().difficulty, 0.6);
        assert_eq!(Scenario::by_name("kaggle").unwrap().difficulty, 1.0);
        let eg = Scenario::by_name("empty_goal_1v0").unwrap();
        assert_eq!((eg.kind, eg.episode_length), (ScenarioKind::EmptyGoal, 400));
    }

    #[test]
    fn unknown_lists_names() {
        let msg = Scenario::by_name("nope").unwrap_err().to_string();
        for n in SCENARIO_NAMES {
            assert!(msg.contains(n), "{msg}");
        }
    }

    #[test]
    fn difficulty_bounds() {
        let s = Scenario::by_name("easy").unwrap();
        assert!(s.clone().with_difficulty(1.2).is_err());
        assert_eq!(s.with_difficulty(0.3).unwrap().difficulty, 0.3);
    }
}
