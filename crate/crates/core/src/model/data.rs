use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Observations `y_i` at strictly increasing locations `x_i`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesData {
    locations: Vec<f64>,
    values: Vec<f64>,
}

impl SeriesData {
    pub fn new(locations: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if locations.len() != values.len() {
            return Err(Error::Data(format!(
                "{} locations but {} values",
                locations.len(),
                values.len()
            )));
        }
        if locations.len() < 2 {
            return Err(Error::Data(format!(
                "need at least 2 observations, got {}",
                locations.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Data(format!("value {i} is not finite")));
        }
        if let Some(i) = locations.iter().position(|v| !v.is_finite()) {
            return Err(Error::Data(format!("location {i} is not finite")));
        }
        if let Some(j) = locations.windows(2).position(|w| w[1] <= w[0]) {
            return Err(Error::Data(format!(
                "locations must be strictly increasing: x[{}]={} then x[{}]={}",
                j,
                locations[j],
                j + 1,
                locations[j + 1]
            )));
        }
        Ok(Self { locations, values })
    }

    /// Observations at `1, 2, ..., n`.
    pub fn regular(values: Vec<f64>) -> Result<Self> {
        let locations = (1..=values.len()).map(|i| i as f64).collect();
        Self::new(locations, values)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn locations(&self) -> &[f64] {
        &self.locations
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `w_j = x_j - x_{j-1}`; the first entry is set to 1 and never used.
    pub fn spacings(&self) -> Vec<f64> {
        std::iter::once(1.0)
            .chain(self.locations.windows(2).map(|w| w[1] - w[0]))
            .collect()
    }

    /// Same locations, values replaced.
    pub fn with_values(&self, values: Vec<f64>) -> Result<Self> {
        Self::new(self.locations.clone(), values)
    }

    pub fn negated(&self) -> Self {
        Self {
            locations: self.locations.clone(),
            values: self.values.iter().map(|v| -v).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(SeriesData::new(vec![1.0, 2.0], vec![0.0]).is_err());
        assert!(SeriesData::new(vec![1.0], vec![0.0]).is_err());
        assert!(SeriesData::new(vec![1.0, 1.0], vec![0.0, 1.0]).is_err());
        assert!(SeriesData::new(vec![2.0, 1.0], vec![0.0, 1.0]).is_err());
        assert!(SeriesData::new(vec![1.0, 2.0], vec![0.0, f64::NAN]).is_err());
        let s = SeriesData::new(vec![1.0, 2.5, 7.0], vec![0.0, 1.0, 2.0]).unwrap();
        assert_eq!(s.spacings(), vec![1.0, 1.5, 4.5]);
    }
}
