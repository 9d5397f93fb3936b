use std::fmt;
use std::ops::{Div, Mul};

use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};

/// Exact scalar `rational · π^pi_power`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PiScaled {
    pub rational: BigRational,
    pub pi_power: i32,
}

impl PiScaled {
    pub fn new(rational: BigRational, pi_power: i32) -> Self {
        PiScaled { rational, pi_power }
    }

    pub fn rational(r: BigRational) -> Self {
        Self::new(r, 0)
    }

    pub fn zero() -> Self {
        Self::new(BigRational::zero(), 0)
    }

    pub fn is_zero(&self) -> bool {
        self.rational.is_zero()
    }

    /// Sum of two values with the same power of π. Zero is compatible with
    /// every power.
    pub fn try_add(&self, o: &PiScaled) -> Result<PiScaled> {
        if self.is_zero() {
            return Ok(o.clone());
        }
        if o.is_zero() {
            return Ok(self.clone());
        }
        if self.pi_power != o.pi_power {
            return Err(Error::PiPowerMismatch(self.pi_power, o.pi_power));
        }
        Ok(PiScaled::new(&self.rational + &o.rational, self.pi_power))
    }

    pub fn to_f64(&self) -> f64 {
        self.rational.to_f64().unwrap_or(f64::NAN) * std::f64::consts::PI.powi(self.pi_power)
    }

    pub fn square(&self) -> PiScaled {
        self * self
    }
}

impl Mul for &PiScaled {
    type Output = PiScaled;
    fn mul(self, o: &PiScaled) -> PiScaled {
        PiScaled::new(&self.rational * &o.rational, self.pi_power + o.pi_power)
    }
}

impl Mul for PiScaled {
    type Output = PiScaled;
    fn mul(self, o: PiScaled) -> PiScaled {
        &self * &o
    }
}

impl Div for &PiScaled {
    type Output = PiScaled;
    fn div(self, o: &PiScaled) -> PiScaled {
        PiScaled::new(&self.rational / &o.rational, self.pi_power - o.pi_power)
    }
}

impl fmt::Display for PiScaled {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.pi_power {
            _ if self.is_zero() => write!(f, "0"),
            0 => write!(f, "{}", self.rational),
            1 => write!(f, "{}·π", self.rational),
            e => write!(f, "{}·π^{}", self.rational, e),
        }
    }
}

impl Serialize for PiScaled {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("PiScaled", 3)?;
        st.serialize_field("rational", &self.rational.to_string())?;
        st.serialize_field("pi_power", &self.pi_power)?;
        st.serialize_field("approx", &self.to_f64())?;
        st.end()
    }
}
