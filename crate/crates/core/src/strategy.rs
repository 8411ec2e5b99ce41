use std::fmt;

use serde::{Deserialize, Serialize};

/// One of the four pure actions of the full-duplex game.
///
/// Bit 1 is "send an assertion", bit 0 is "give feedback if an assertion
/// arrives": `S0` holds and stays silent, `S1` holds but comments, `S2` sends
/// without commenting, `S3` sends and comments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub struct Strategy(u8);

impl Strategy {
    pub const S0: Strategy = Strategy(0);
    pub const S1: Strategy = Strategy(1);
    pub const S2: Strategy = Strategy(2);
    pub const S3: Strategy = Strategy(3);
    pub const ALL: [Strategy; 4] = [Self::S0, Self::S1, Self::S2, Self::S3];

    pub fn from_index(index: usize) -> Option<Self> {
        (index < 4).then_some(Strategy(index as u8))
    }

    pub fn from_bits(send: bool, feedback: bool) -> Self {
        Strategy(((send as u8) << 1) | feedback as u8)
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn sends(self) -> bool {
        self.0 >= 2
    }

    pub fn gives_feedback(self) -> bool {
        self.0 & 1 == 1
    }
}

impl TryFrom<u8> for Strategy {
    type Error = String;

    fn try_from(v: u8) -> Result<Self, Self::Error> {
        Strategy::from_index(v as usize).ok_or_else(|| format!("strategy index {v} out of range 0..=3"))
    }
}

impl From<Strategy> for u8 {
    fn from(s: Strategy) -> u8 {
        s.0
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "S{}", self.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn encoding_is_a_bijection() {
        let expected = [(false, false), (false, true), (true, false), (true, true)];
        for (s, (send, fb)) in Strategy::ALL.iter().zip(expected) {
            assert_eq!(s.sends(), send);
            assert_eq!(s.gives_feedback(), fb);
            assert_eq!(Strategy::from_bits(send, fb), *s);
            assert_eq!(Strategy::from_index(s.index()), Some(*s));
        }
        assert_eq!(Strategy::from_index(4), None);
    }
}
