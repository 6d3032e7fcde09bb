use alloc::string::{String, ToString};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A named tensor factor.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SystemLabel {
    pub name: String,
    pub dim: usize,
}

impl SystemLabel {
    pub fn new(name: impl Into<String>, dim: usize) -> Result<Self> {
        let name = name.into();
        if name.is_empty() {
            return Err(Error::InvalidSystem {
                name,
                reason: "empty name".to_string(),
            });
        }
        if dim < 2 {
            return Err(Error::InvalidSystem {
                name,
                reason: alloc::format!("dimension {dim} < 2"),
            });
        }
        Ok(SystemLabel { name, dim })
    }

    pub fn qubit(name: impl Into<String>) -> Self {
        SystemLabel {
            name: name.into(),
            dim: 2,
        }
    }
}

impl core::fmt::Display for SystemLabel {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        if self.dim == 2 {
            write!(f, "{}", self.name)
        } else {
            write!(f, "{}[{}]", self.name, self.dim)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_trivial_dimension() {
        assert!(SystemLabel::new("Q", 1).is_err());
        assert!(SystemLabel::new("", 2).is_err());
        assert_eq!(SystemLabel::new("Q", 2).unwrap(), SystemLabel::qubit("Q"));
    }
}
