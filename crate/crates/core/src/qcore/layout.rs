use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;

use super::SystemLabel;
use crate::error::{Error, Result};

/// Flat-index bookkeeping for an ordered list of subsystems.
#[derive(Clone, Debug)]
pub(crate) struct Layout {
    dims: Vec<usize>,
    strides: Vec<usize>,
}

impl Layout {
    pub fn new(systems: &[SystemLabel]) -> Self {
        Self::from_dims(systems.iter().map(|s| s.dim).collect())
    }

    pub fn from_dims(dims: Vec<usize>) -> Self {
        let mut strides = vec![1; dims.len()];
        for i in (0..dims.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * dims[i + 1];
        }
        Layout { dims, strides }
    }

    pub fn total(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn dim_of(&self, positions: &[usize]) -> usize {
        positions.iter().map(|&p| self.dims[p]).product()
    }

    /// Flat-index offsets of every joint basis state of `positions`, in the
    /// order given (first position most significant).
    pub fn offsets(&self, positions: &[usize]) -> Vec<usize> {
        let mut out = vec![0usize];
        for &p in positions {
            let mut next = Vec::with_capacity(out.len() * self.dims[p]);
            for &o in &out {
                for d in 0..self.dims[p] {
                    next.push(o + d * self.strides[p]);
                }
            }
            out = next;
        }
        out
    }

    /// Positions not in `positions`, ascending.
    pub fn complement(&self, positions: &[usize]) -> Vec<usize> {
        (0..self.dims.len()).filter(|p| !positions.contains(p)).collect()
    }
}

/// Map names to positions in `systems`, rejecting unknown and repeated names.
pub(crate) fn resolve(systems: &[SystemLabel], names: &[&str]) -> Result<Vec<usize>> {
    let mut out = Vec::with_capacity(names.len());
    for &n in names {
        let p = systems
            .iter()
            .position(|s| s.name == n)
            .ok_or_else(|| Error::UnknownLabel(n.to_string()))?;
        if out.contains(&p) {
            return Err(Error::DuplicateLabel(n.to_string()));
        }
        out.push(p);
    }
    Ok(out)
}

pub(crate) fn check_unique(systems: &[SystemLabel]) -> Result<()> {
    for (i, s) in systems.iter().enumerate() {
        if systems[..i].iter().any(|t| t.name == s.name) {
            return Err(Error::DuplicateLabel(s.name.clone()));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn offsets_are_separable() {
        let l = Layout::from_dims(vec![2, 3, 2]);
        let a = l.offsets(&[0, 2]);
        let b = l.offsets(&[1]);
        let mut all: Vec<usize> = a.iter().flat_map(|x| b.iter().map(move |y| x + y)).collect();
        all.sort();
        assert_eq!(all, (0..12).collect::<Vec<_>>());
        assert_eq!(l.offsets(&[2, 0]), vec![0, 6, 1, 7]);
    }
}
