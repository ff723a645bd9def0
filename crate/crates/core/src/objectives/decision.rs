use alloc::vec::Vec;

use crate::error::{invalid, Error, Result};

/// Box constraints of a search space.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Bounds {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl Bounds {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.len() != upper.len() {
            return Err(Error::LengthMismatch(lower.len(), upper.len()));
        }
        if lower.is_empty() {
            return Err(invalid("bounds need at least one dimension"));
        }
        if lower.iter().zip(&upper).any(|(l, u)| !(l <= u) || !l.is_finite() || !u.is_finite()) {
            return Err(invalid("every lower bound must be finite and not above its upper bound"));
        }
        Ok(Bounds { lower, upper })
    }

    /// The link-length / stance-offset box.
    pub fn srl() -> Self {
        Bounds {
            lower: DecisionVector::LOWER.to_vec(),
            upper: DecisionVector::UPPER.to_vec(),
        }
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn width(&self, i: usize) -> f64 {
        self.upper[i] - self.lower[i]
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim() && x.iter().enumerate().all(|(i, v)| *v >= self.lower[i] && *v <= self.upper[i])
    }

    /// Clamps `x` into the box in place.
    pub fn project(&self, x: &mut [f64]) {
        for (i, v) in x.iter_mut().enumerate() {
            *v = v.clamp(self.lower[i], self.upper[i]);
        }
    }
}

/// Link lengths `l1..l4` and stance offset `c`, all in metres.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DecisionVector([f64; 5]);

impl DecisionVector {
    pub const LOWER: [f64; 5] = [0.1, 0.1, 0.1, 0.1, -0.5];
    pub const UPPER: [f64; 5] = [0.6, 0.6, 0.6, 0.6, 0.5];

    pub fn new(x: [f64; 5]) -> Result<Self> {
        let x = DecisionVector(x);
        x.validate()?;
        Ok(x)
    }

    /// Skips the bound check; [`DecisionVector::validate`] can run it later.
    pub fn new_unchecked(x: [f64; 5]) -> Self {
        DecisionVector(x)
    }

    pub fn from_slice(x: &[f64]) -> Result<Self> {
        let arr: [f64; 5] = x.try_into().map_err(|_| Error::LengthMismatch(x.len(), 5))?;
        Self::new(arr)
    }

    pub fn validate(&self) -> Result<()> {
        for (index, &value) in self.0.iter().enumerate() {
            let (lower, upper) = (Self::LOWER[index], Self::UPPER[index]);
            if !(value >= lower && value <= upper) {
                return Err(Error::OutOfBounds {
                    index,
                    value,
                    lower,
                    upper,
                });
            }
        }
        Ok(())
    }

    pub fn as_array(&self) -> &[f64; 5] {
        &self.0
    }

    pub fn links(&self) -> [f64; 4] {
        [self.0[0], self.0[1], self.0[2], self.0[3]]
    }

    pub fn c(&self) -> f64 {
        self.0[4]
    }

    pub fn total_length(&self) -> f64 {
        self.0[..4].iter().sum()
    }

    /// Whether every component is strictly inside its bounds.
    pub fn strictly_inside(&self) -> bool {
        self.0
            .iter()
            .enumerate()
            .all(|(i, v)| *v > Self::LOWER[i] && *v < Self::UPPER[i])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bounds_check() {
        assert!(DecisionVector::new([0.1, 0.4, 0.3, 0.2, 0.19]).is_ok());
        assert!(matches!(
            DecisionVector::new([0.05, 0.4, 0.3, 0.2, 0.19]),
            Err(Error::OutOfBounds { index: 0, .. })
        ));
        assert!(matches!(
            DecisionVector::from_slice(&[0.1, 0.4]),
            Err(Error::LengthMismatch(2, 5))
        ));
        assert!(DecisionVector::new([0.1, 0.4, 0.3, 0.2, f64::NAN]).is_err());
    }

    #[test]
    fn projection() {
        let b = Bounds::srl();
        let mut x = [0.0, 0.7, 0.3, 0.2, -1.0];
        b.project(&mut x);
        assert_eq!(x, [0.1, 0.6, 0.3, 0.2, -0.5]);
        assert!(b.contains(&x));
        assert!(Bounds::new(alloc::vec![1.0], alloc::vec![0.0]).is_err());
    }
}
