use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use super::ExprError;

/// A named coordinate chart. Every symbolic object lives on exactly one chart.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Chart {
    name: String,
    coords: Vec<String>,
}

impl Chart {
    pub fn new<S: Into<String>>(name: S, coords: Vec<String>) -> Result<Arc<Chart>, ExprError> {
        let name = name.into();
        if coords.is_empty() {
            return Err(ExprError::EmptyChart(name));
        }
        for (i, c) in coords.iter().enumerate() {
            if coords[..i].contains(c) {
                return Err(ExprError::DuplicateCoordinate {
                    chart: name,
                    coord: c.clone(),
                });
            }
        }
        Ok(Arc::new(Chart { name, coords }))
    }

    /// Chart with coordinates `<prefix>1 .. <prefix>n`.
    pub fn numbered(name: &str, prefix: &str, n: usize) -> Arc<Chart> {
        let coords = (1..=n).map(|i| format!("{prefix}{i}")).collect();
        Chart::new(name, coords).expect("numbered coordinates are distinct")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[String] {
        &self.coords
    }

    pub fn coord(&self, i: usize) -> &str {
        &self.coords[i]
    }

    pub fn index_of(&self, coord: &str) -> Option<usize> {
        self.coords.iter().position(|c| c == coord)
    }
}

impl fmt::Display for Chart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "chart {} ({})", self.name, self.coords.join(" "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_duplicates() {
        let err = Chart::new("R2", vec!["x".into(), "x".into()]).unwrap_err();
        assert!(matches!(err, ExprError::DuplicateCoordinate { .. }));
    }

    #[test]
    fn numbered_chart() {
        let c = Chart::numbered("R4", "x", 4);
        assert_eq!(c.dim(), 4);
        assert_eq!(c.index_of("x3"), Some(2));
        assert_eq!(c.to_string(), "chart R4 (x1 x2 x3 x4)");
    }
}
