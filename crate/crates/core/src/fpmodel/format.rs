use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Rounding {
    NearestEven,
    TowardZero,
}

/// Digits of the smaller aligned operand kept beyond `p` in add/sub.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GuardDigits {
    Zero,
    One,
    /// The exact sum is formed, then rounded once.
    Unbounded,
}

/// A binary floating-point format together with its rounding behavior.
///
/// Values are `±m * 2^(e - p + 1)` with a `p`-bit significand `m` and
/// `emin <= e <= emax`. There are no infinities or NaNs: leaving the range is
/// reported as [`Error::Overflow`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FpFormat {
    pub precision: u32,
    pub emin: i32,
    pub emax: i32,
    pub rounding: Rounding,
    pub guard_digits: GuardDigits,
    pub flush_subnormals: bool,
}

/// Formats from the vendor survey of early shader hardware.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    Nvidia16,
    Nvidia32,
    Ati16,
    /// 16 stored mantissa bits, 7-bit exponent. The exponent range is assumed
    /// symmetric (bias 63); the vendor never documented it.
    Ati24,
    Ati32,
}

impl Preset {
    pub const ALL: [Preset; 5] = [
        Preset::Nvidia16,
        Preset::Nvidia32,
        Preset::Ati16,
        Preset::Ati24,
        Preset::Ati32,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Nvidia16 => "nvidia-16",
            Preset::Nvidia32 => "nvidia-32",
            Preset::Ati16 => "ati-16",
            Preset::Ati24 => "ati-24",
            Preset::Ati32 => "ati-32",
        }
    }
}

impl FromStr for Preset {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Preset::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::InvalidFormat(format!("unknown preset `{s}`")))
    }
}

impl FpFormat {
    pub fn new(
        precision: u32,
        emin: i32,
        emax: i32,
        rounding: Rounding,
        guard_digits: GuardDigits,
        flush_subnormals: bool,
    ) -> Result<Self> {
        let fmt = Self {
            precision,
            emin,
            emax,
            rounding,
            guard_digits,
            flush_subnormals,
        };
        fmt.validate()?;
        Ok(fmt)
    }

    pub fn validate(&self) -> Result<()> {
        if !(2..=53).contains(&self.precision) {
            return Err(Error::InvalidFormat(format!(
                "precision {} outside 2..=53",
                self.precision
            )));
        }
        if self.emin >= self.emax {
            return Err(Error::InvalidFormat(format!(
                "emin {} must be below emax {}",
                self.emin, self.emax
            )));
        }
        if self.emin < -16382 || self.emax > 16383 {
            return Err(Error::InvalidFormat(
                "exponent range exceeds [-16382, 16383]".into(),
            ));
        }
        Ok(())
    }

    /// IEEE binary32 as implemented by the host: round-to-nearest-even,
    /// exact sums, gradual underflow.
    pub fn binary32() -> Self {
        Self {
            precision: 24,
            emin: -126,
            emax: 127,
            rounding: Rounding::NearestEven,
            guard_digits: GuardDigits::Unbounded,
            flush_subnormals: false,
        }
    }

    /// Survey format with round-to-nearest, exact sums and flush-to-zero.
    pub fn preset(preset: Preset) -> Self {
        let (precision, emin, emax) = match preset {
            Preset::Nvidia16 | Preset::Ati16 => (11, -14, 15),
            Preset::Nvidia32 | Preset::Ati32 => (24, -126, 127),
            Preset::Ati24 => (17, -62, 63),
        };
        Self {
            precision,
            emin,
            emax,
            rounding: Rounding::NearestEven,
            guard_digits: GuardDigits::Unbounded,
            flush_subnormals: true,
        }
    }

    /// Chopped 32-bit arithmetic with one guard digit in add/sub.
    pub fn chopped_with_guard() -> Self {
        Self {
            rounding: Rounding::TowardZero,
            guard_digits: GuardDigits::One,
            ..Self::preset(Preset::Nvidia32)
        }
    }

    /// Chopped 32-bit arithmetic without a guard digit.
    pub fn chopped_without_guard() -> Self {
        Self {
            rounding: Rounding::TowardZero,
            guard_digits: GuardDigits::Zero,
            ..Self::preset(Preset::Nvidia32)
        }
    }

    /// Every operation returns the nearest representable value, the
    /// assumption behind the float-float error bounds.
    pub fn is_correctly_rounded_nearest(&self) -> bool {
        self.rounding == Rounding::NearestEven && self.guard_digits == GuardDigits::Unbounded
    }

    pub fn with_rounding(self, rounding: Rounding) -> Self {
        Self { rounding, ..self }
    }

    pub fn with_guard(self, guard_digits: GuardDigits) -> Self {
        Self {
            guard_digits,
            ..self
        }
    }

    pub fn with_flush(self, flush_subnormals: bool) -> Self {
        Self {
            flush_subnormals,
            ..self
        }
    }

    pub fn with_precision(self, precision: u32) -> Self {
        Self { precision, ..self }
    }
}

impl Default for FpFormat {
    fn default() -> Self {
        Self::binary32()
    }
}

impl fmt::Display for FpFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let round = match self.rounding {
            Rounding::NearestEven => "rne",
            Rounding::TowardZero => "rz",
        };
        let guard = match self.guard_digits {
            GuardDigits::Zero => "0",
            GuardDigits::One => "1",
            GuardDigits::Unbounded => "inf",
        };
        write!(
            f,
            "p={},emin={},emax={},round={},guard={},ftz={}",
            self.precision,
            self.emin,
            self.emax,
            round,
            guard,
            u8::from(self.flush_subnormals)
        )
    }
}

impl FromStr for FpFormat {
    type Err = Error;

    /// Parses `p=24,emin=-126,emax=127,round=rne|rz,guard=0|1|inf,ftz=0|1`.
    /// Missing keys take their binary32 values; `preset=<name>` selects a
    /// survey format as the starting point.
    fn from_str(s: &str) -> Result<Self> {
        let mut fmt = Self::binary32();
        let bad = |what: &str| Error::InvalidFormat(what.to_string());
        for item in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            let (key, value) = item
                .split_once('=')
                .ok_or_else(|| bad(&format!("expected key=value, got `{item}`")))?;
            let int = |v: &str| -> Result<i64> {
                v.parse()
                    .map_err(|_| bad(&format!("`{key}` needs an integer, got `{v}`")))
            };
            match key {
                "preset" => fmt = Self::preset(value.parse()?),
                "p" => {
                    fmt.precision =
                        u32::try_from(int(value)?).map_err(|_| bad("precision must be positive"))?
                }
                "emin" => fmt.emin = int(value)? as i32,
                "emax" => fmt.emax = int(value)? as i32,
                "round" => {
                    fmt.rounding = match value {
                        "rne" => Rounding::NearestEven,
                        "rz" => Rounding::TowardZero,
                        _ => return Err(bad(&format!("round must be rne or rz, got `{value}`"))),
                    }
                }
                "guard" => {
                    fmt.guard_digits = match value {
                        "0" => GuardDigits::Zero,
                        "1" => GuardDigits::One,
                        "inf" => GuardDigits::Unbounded,
                        _ => return Err(bad(&format!("guard must be 0, 1 or inf, got `{value}`"))),
                    }
                }
                "ftz" => {
                    fmt.flush_subnormals = match value {
                        "0" => false,
                        "1" => true,
                        _ => return Err(bad(&format!("ftz must be 0 or 1, got `{value}`"))),
                    }
                }
                _ => return Err(bad(&format!("unknown key `{key}`"))),
            }
        }
        fmt.validate()?;
        Ok(fmt)
    }
}
