use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::vandermonde::{two_pi_times, NodeSet};

type MapFn = dyn Fn(i64) -> f64 + Send + Sync;

/// The rule `n ↦ λ_n`.
#[derive(Clone)]
pub enum FrequencyMap {
    /// `λ_n = 2πn`.
    Trigonometric,
    /// Any strictly increasing real sequence indexed by the integers.
    Custom { name: String, map: Arc<MapFn> },
}

impl FrequencyMap {
    pub fn custom(
        name: impl Into<String>,
        map: impl Fn(i64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        FrequencyMap::Custom {
            name: name.into(),
            map: Arc::new(map),
        }
    }

    pub fn lambda(&self, n: i64) -> f64 {
        match self {
            FrequencyMap::Trigonometric => two_pi_times(n),
            FrequencyMap::Custom { map, .. } => map(n),
        }
    }

    pub fn is_trigonometric(&self) -> bool {
        matches!(self, FrequencyMap::Trigonometric)
    }

    pub fn name(&self) -> &str {
        match self {
            FrequencyMap::Trigonometric => "trigonometric",
            FrequencyMap::Custom { name, .. } => name,
        }
    }
}

impl fmt::Debug for FrequencyMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FrequencyMap({})", self.name())
    }
}

/// The excluded index set `A` together with the frequency map.
///
/// `indices` are stored in the order of their frequencies, so position `j`
/// (0-based) corresponds to the node `Λ_{j+1}`.
#[derive(Debug, Clone)]
pub struct ExclusionSet {
    indices: Vec<i64>,
    map: FrequencyMap,
    nodes: NodeSet,
}

impl ExclusionSet {
    pub fn trigonometric(indices: &[i64]) -> Result<Self> {
        ExclusionSet::with_map(indices, FrequencyMap::Trigonometric)
    }

    pub fn with_map(indices: &[i64], map: FrequencyMap) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::invalid("exclusion set must be nonempty"));
        }
        let mut sorted = indices.to_vec();
        sorted.sort_unstable();
        if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::invalid(format!("duplicate excluded index {}", w[0])));
        }
        let nodes = match map {
            FrequencyMap::Trigonometric => NodeSet::trigonometric(&sorted)?,
            FrequencyMap::Custom { .. } => {
                let mut pairs: Vec<(f64, i64)> =
                    sorted.iter().map(|&n| (map.lambda(n), n)).collect();
                pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
                sorted = pairs.iter().map(|p| p.1).collect();
                NodeSet::new(pairs.iter().map(|p| p.0).collect()).map_err(|e| match e {
                    Error::Singular(msg) => {
                        Error::invalid(format!("frequency map is not injective on A: {msg}"))
                    }
                    other => other,
                })?
            }
        };
        Ok(ExclusionSet {
            indices: sorted,
            map,
            nodes,
        })
    }

    /// `M = |A|`.
    pub fn m(&self) -> usize {
        self.indices.len()
    }

    pub fn indices(&self) -> &[i64] {
        &self.indices
    }

    pub fn contains(&self, n: i64) -> bool {
        self.indices.contains(&n)
    }

    /// 0-based position of `λ_m` among the sorted nodes.
    pub fn position_of(&self, m: i64) -> Option<usize> {
        self.indices.iter().position(|&i| i == m)
    }

    pub fn lambda(&self, n: i64) -> f64 {
        self.map.lambda(n)
    }

    pub fn frequency_map(&self) -> &FrequencyMap {
        &self.map
    }

    pub fn nodes(&self) -> &NodeSet {
        &self.nodes
    }

    pub fn is_trigonometric(&self) -> bool {
        self.map.is_trigonometric()
    }

    pub fn max_abs_index(&self) -> i64 {
        self.indices.iter().map(|i| i.abs()).max().unwrap_or(0)
    }

    pub(crate) fn require_trigonometric(&self, what: &str) -> Result<&[i64]> {
        if !self.is_trigonometric() {
            return Err(Error::Unsupported(format!(
                "{what} needs the trigonometric realization r_n = e^(2 pi i n t); map is {}",
                self.map.name()
            )));
        }
        Ok(&self.indices)
    }

    pub(crate) fn require_outside(&self, n: i64) -> Result<()> {
        if self.contains(n) {
            return Err(Error::Index(format!(
                "index {n} belongs to the excluded set"
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trig_nodes_are_sorted_scaled_indices() {
        let a = ExclusionSet::trigonometric(&[3, -1, 0]).unwrap();
        assert_eq!(a.indices(), &[-1, 0, 3]);
        assert_eq!(a.nodes().integer_form(), Some(&[-1, 0, 3][..]));
        assert_eq!(a.m(), 3);
        assert_eq!(a.position_of(3), Some(2));
        assert!(a.contains(0) && !a.contains(1));
    }

    #[test]
    fn rejects_empty_and_duplicates() {
        assert!(ExclusionSet::trigonometric(&[]).is_err());
        assert!(matches!(
            ExclusionSet::trigonometric(&[0, 0]),
            Err(Error::Invalid(_))
        ));
    }

    #[test]
    fn custom_map_orders_by_frequency() {
        let map = FrequencyMap::custom("decreasing", |n| -(n as f64) * 1.5);
        let a = ExclusionSet::with_map(&[0, 2], map).unwrap();
        assert_eq!(a.indices(), &[2, 0]);
        assert_eq!(a.nodes().nodes(), &[-3.0, 0.0]);
        assert!(a.nodes().integer_form().is_none());
        assert!(a.require_trigonometric("x").is_err());
    }

    #[test]
    fn non_injective_custom_map() {
        let map = FrequencyMap::custom("square", |n| (n * n) as f64);
        assert!(matches!(
            ExclusionSet::with_map(&[-1, 1], map),
            Err(Error::Invalid(_))
        ));
    }
}
