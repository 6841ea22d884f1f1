use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One end of a counting region.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Endpoint {
    NegInf,
    PosInf,
    Closed(f64),
    Open(f64),
}

impl Endpoint {
    pub fn value(&self) -> Option<f64> {
        match *self {
            Endpoint::Closed(v) | Endpoint::Open(v) => Some(v),
            _ => None,
        }
    }

    fn position(&self) -> f64 {
        match *self {
            Endpoint::NegInf => f64::NEG_INFINITY,
            Endpoint::PosInf => f64::INFINITY,
            Endpoint::Closed(v) | Endpoint::Open(v) => v,
        }
    }

    pub fn is_closed(&self) -> bool {
        matches!(self, Endpoint::Closed(_))
    }
}

/// A real interval with explicit endpoint inclusion, possibly unbounded.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    lo: Endpoint,
    hi: Endpoint,
}

impl Interval {
    pub fn new(lo: Endpoint, hi: Endpoint) -> Result<Self> {
        if matches!(lo, Endpoint::PosInf) || matches!(hi, Endpoint::NegInf) {
            return Err(Error::InvalidInterval(format!("{lo:?} .. {hi:?}")));
        }
        if let Some(v) = lo.value().into_iter().chain(hi.value()).find(|v| !v.is_finite()) {
            return Err(Error::InvalidInterval(format!("non-finite endpoint {v}")));
        }
        if lo.position() >= hi.position() {
            return Err(Error::InvalidInterval(format!("{lo:?} .. {hi:?}")));
        }
        Ok(Self { lo, hi })
    }

    /// `[lo, hi]`
    pub fn closed(lo: f64, hi: f64) -> Result<Self> {
        Self::new(Endpoint::Closed(lo), Endpoint::Closed(hi))
    }

    /// `(lo, hi)`
    pub fn open(lo: f64, hi: f64) -> Result<Self> {
        Self::new(Endpoint::Open(lo), Endpoint::Open(hi))
    }

    /// `(lo, hi]`
    pub fn left_open(lo: f64, hi: f64) -> Result<Self> {
        Self::new(Endpoint::Open(lo), Endpoint::Closed(hi))
    }

    pub fn real_line() -> Self {
        Self {
            lo: Endpoint::NegInf,
            hi: Endpoint::PosInf,
        }
    }

    pub fn lo(&self) -> Endpoint {
        self.lo
    }

    pub fn hi(&self) -> Endpoint {
        self.hi
    }

    pub fn is_bounded(&self) -> bool {
        self.lo.value().is_some() && self.hi.value().is_some()
    }

    /// Finite `(lo, hi)` positions, if bounded.
    pub fn bounds(&self) -> Option<(f64, f64)> {
        Some((self.lo.value()?, self.hi.value()?))
    }

    pub fn contains(&self, x: f64) -> bool {
        let above = match self.lo {
            Endpoint::NegInf => true,
            Endpoint::Closed(v) => x >= v,
            Endpoint::Open(v) => x > v,
            Endpoint::PosInf => false,
        };
        let below = match self.hi {
            Endpoint::PosInf => true,
            Endpoint::Closed(v) => x <= v,
            Endpoint::Open(v) => x < v,
            Endpoint::NegInf => false,
        };
        above && below
    }
}

/// The counting regions used by experiments. Zeros at `1` and `-1`
/// belong to the unit regions; zeros at `0` belong to none of them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Region {
    /// `(0, 1]`
    UnitPos,
    /// `(1, inf)`
    TailPos,
    /// `[-1, 0)`
    UnitNeg,
    /// `(-inf, -1)`
    TailNeg,
    /// the real line
    All,
}

impl Region {
    pub const ALL: [Region; 5] = [
        Region::UnitPos,
        Region::TailPos,
        Region::UnitNeg,
        Region::TailNeg,
        Region::All,
    ];

    pub fn interval(self) -> Interval {
        use Endpoint::*;
        let (lo, hi) = match self {
            Region::UnitPos => (Open(0.0), Closed(1.0)),
            Region::TailPos => (Open(1.0), PosInf),
            Region::UnitNeg => (Closed(-1.0), Open(0.0)),
            Region::TailNeg => (NegInf, Open(-1.0)),
            Region::All => (NegInf, PosInf),
        };
        Interval { lo, hi }
    }

    pub fn name(self) -> &'static str {
        match self {
            Region::UnitPos => "unit_pos",
            Region::TailPos => "tail_pos",
            Region::UnitNeg => "unit_neg",
            Region::TailNeg => "tail_neg",
            Region::All => "all",
        }
    }

    pub fn parse(s: &str) -> Option<Region> {
        Region::ALL.into_iter().find(|r| r.name() == s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_empty_or_reversed() {
        assert!(Interval::closed(1.0, 1.0).is_err());
        assert!(Interval::closed(2.0, 1.0).is_err());
        assert!(Interval::new(Endpoint::PosInf, Endpoint::PosInf).is_err());
        assert!(Interval::closed(0.0, f64::NAN).is_err());
    }

    #[test]
    fn membership_follows_inclusion_flags() {
        let r = Region::UnitPos.interval();
        assert!(!r.contains(0.0));
        assert!(r.contains(1.0));
        assert!(!Region::TailPos.interval().contains(1.0));
        assert!(Region::UnitNeg.interval().contains(-1.0));
        assert!(!Region::TailNeg.interval().contains(-1.0));
    }

    #[test]
    fn region_names_round_trip() {
        for r in Region::ALL {
            assert_eq!(Region::parse(r.name()), Some(r));
        }
    }
}
