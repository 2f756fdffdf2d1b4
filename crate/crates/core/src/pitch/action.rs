use std::fmt;

use crate::gnn::NUM_ACTIONS;

/// The 19-action default football action set, in environment order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Action {
    Idle,
    Left,
    TopLeft,
    Top,
    TopRight,
    Right,
    BottomRight,
    Bottom,
    BottomLeft,
    LongPass,
    HighPass,
    ShortPass,
    Shot,
    Sprint,
    ReleaseDirection,
    ReleaseSprint,
    Slide,
    Dribble,
    ReleaseDribble,
}

impl Action {
    pub const ALL: [Action; NUM_ACTIONS] = [
        Action::Idle,
        Action::Left,
        Action::TopLeft,
        Action::Top,
        Action::TopRight,
        Action::Right,
        Action::BottomRight,
        Action::Bottom,
        Action::BottomLeft,
        Action::LongPass,
        Action::HighPass,
        Action::ShortPass,
        Action::Shot,
        Action::Sprint,
        Action::ReleaseDirection,
        Action::ReleaseSprint,
        Action::Slide,
        Action::Dribble,
        Action::ReleaseDribble,
    ];

    pub fn from_index(i: usize) -> Option<Self> {
        Self::ALL.get(i).copied()
    }

    pub fn index(self) -> usize {
        self as usize
    }

    /// Unit movement direction for the eight direction actions. `Top` is −y.
    pub fn direction(self) -> Option<[f64; 2]> {
        let d = std::f64::consts::FRAC_1_SQRT_2;
        Some(match self {
            Action::Left => [-1.0, 0.0],
            Action::TopLeft => [-d, -d],
            Action::Top => [0.0, -1.0],
            Action::TopRight => [d, -d],
            Action::Right => [1.0, 0.0],
            Action::BottomRight => [d, d],
            Action::Bottom => [0.0, 1.0],
            Action::BottomLeft => [-d, d],
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Action::Idle => "idle",
            Action::Left => "left",
            Action::TopLeft => "top_left",
            Action::Top => "top",
            Action::TopRight => "top_right",
            Action::Right => "right",
            Action::BottomRight => "bottom_right",
            Action::Bottom => "bottom",
            Action::BottomLeft => "bottom_left",
            Action::LongPass => "long_pass",
            Action::HighPass => "high_pass",
            Action::ShortPass => "short_pass",
            Action::Shot => "shot",
            Action::Sprint => "sprint",
            Action::ReleaseDirection => "release_direction",
            Action::ReleaseSprint => "release_sprint",
            Action::Slide => "sliding",
            Action::Dribble => "dribble",
            Action::ReleaseDribble => "release_dribble",
        }
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn indices_round_trip() {
        for (i, a) in Action::ALL.iter().enumerate() {
            assert_eq!(a.index(), i);
            assert_eq!(Action::from_index(i), Some(*a));
        }
        assert_eq!(Action::from_index(19), None);
    }

    #[test]
    fn directions_are_unit() {
        let n = Action::ALL.iter().filter_map(|a| a.direction()).count();
        assert_eq!(n, 8);
        for d in Action::ALL.iter().filter_map(|a| a.direction()) {
            assert!((d[0].hypot(d[1]) - 1.0).abs() < 1e-15);
        }
    }
}
