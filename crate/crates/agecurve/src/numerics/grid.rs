//! Integer age grids.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A contiguous range of integer ages, `t_min..=t_max`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AgeGrid {
    t_min: i32,
    t_max: i32,
}

impl AgeGrid {
    /// Ages 18 through 40, the default span for top-league careers.
    pub const DEFAULT: AgeGrid = AgeGrid { t_min: 18, t_max: 40 };

    pub fn new(t_min: i32, t_max: i32) -> Result<Self> {
        if t_min >= t_max {
            return Err(Error::InvalidParameter(format!(
                "age grid requires t_min < t_max, got [{t_min}, {t_max}]"
            )));
        }
        Ok(AgeGrid { t_min, t_max })
    }

    pub fn t_min(&self) -> i32 {
        self.t_min
    }

    pub fn t_max(&self) -> i32 {
        self.t_max
    }

    /// Number of ages on the grid.
    pub fn len(&self) -> usize {
        (self.t_max - self.t_min + 1) as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Iterate the integer ages `t_min..=t_max`.
    pub fn ages(&self) -> impl Iterator<Item = i32> + '_ {
        self.t_min..=self.t_max
    }

    /// Column index of an age, or `None` if the age is off the grid.
    pub fn index_of(&self, age: i32) -> Option<usize> {
        if age < self.t_min || age > self.t_max {
            None
        } else {
            Some((age - self.t_min) as usize)
        }
    }

    /// Age at a column index. Panics if the index is off the grid.
    pub fn age_at(&self, index: usize) -> i32 {
        assert!(index < self.len(), "grid index {index} out of range");
        self.t_min + index as i32
    }

    pub fn contains(&self, age: i32) -> bool {
        age >= self.t_min && age <= self.t_max
    }
}

impl Default for AgeGrid {
    fn default() -> Self {
        AgeGrid::DEFAULT
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn iteration_yields_every_integer_age() {
        let grid = AgeGrid::new(18, 40).unwrap();
        let ages: Vec<i32> = grid.ages().collect();
        assert_eq!(ages.len(), 23);
        assert_eq!(ages.first(), Some(&18));
        assert_eq!(ages.last(), Some(&40));
        for (k, t) in ages.iter().enumerate() {
            assert_eq!(grid.index_of(*t), Some(k));
            assert_eq!(grid.age_at(k), *t);
        }
    }

    #[test]
    fn degenerate_grid_rejected() {
        assert!(AgeGrid::new(25, 25).is_err());
        assert!(AgeGrid::new(30, 25).is_err());
    }

    #[test]
    fn index_of_out_of_range_is_none() {
        let grid = AgeGrid::new(20, 32).unwrap();
        assert_eq!(grid.index_of(19), None);
        assert_eq!(grid.index_of(33), None);
        assert_eq!(grid.len(), 13);
    }
}
