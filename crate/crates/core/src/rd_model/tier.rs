use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;

/// Spatial resolution a GOP is transcoded at, ordered by vertical resolution.
///
/// The four standard tiers are provided as constants; other heights (e.g.
/// `480p`, `2160p`) can be parsed and are assigned a 16:9 width.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ResolutionTier {
    // Field order matters for the derived ordering.
    height: u32,
    width: u32,
}

impl ResolutionTier {
    pub const P360: Self = Self::new(640, 360);
    pub const P540: Self = Self::new(960, 540);
    pub const P720: Self = Self::new(1280, 720);
    pub const P1080: Self = Self::new(1920, 1080);

    pub const STANDARD: [Self; 4] = [Self::P360, Self::P540, Self::P720, Self::P1080];

    pub const fn new(width: u32, height: u32) -> Self {
        Self { height, width }
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }
}

impl fmt::Display for ResolutionTier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}p", self.height)
    }
}

impl FromStr for ResolutionTier {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let digits = s
            .strip_suffix('p')
            .or_else(|| s.strip_suffix('P'))
            .unwrap_or(s);
        let height: u32 = digits
            .parse()
            .map_err(|_| Error::input(format!("unknown resolution {s:?}")))?;
        if let Some(tier) = Self::STANDARD.iter().find(|t| t.height == height) {
            return Ok(*tier);
        }
        if !(16..=8640).contains(&height) {
            return Err(Error::input(format!("unknown resolution {s:?}")));
        }
        // 16:9, rounded to an even width.
        let width = ((height as u64 * 16 / 9 + 1) & !1) as u32;
        Ok(Self::new(width, height))
    }
}

impl Serialize for ResolutionTier {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ResolutionTier {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ordering_follows_height() {
        let mut tiers = vec![
            ResolutionTier::P1080,
            ResolutionTier::P360,
            ResolutionTier::P720,
            ResolutionTier::P540,
        ];
        tiers.sort();
        assert_eq!(tiers, ResolutionTier::STANDARD);
    }

    #[test]
    fn parse_round_trip() {
        for t in ResolutionTier::STANDARD {
            assert_eq!(t.to_string().parse::<ResolutionTier>().unwrap(), t);
        }
        assert_eq!("1080".parse::<ResolutionTier>().unwrap().width(), 1920);
        let t: ResolutionTier = "480p".parse().unwrap();
        assert_eq!((t.width(), t.height()), (854, 480));
        assert!("abc".parse::<ResolutionTier>().is_err());
        assert!("0p".parse::<ResolutionTier>().is_err());
    }
}
