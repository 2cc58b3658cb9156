use crate::{Error, Result};

/// A finite set with a cyclic order. Labels are stored in their cyclic
/// order; `((1,n))` is `1, 2, .., n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CircleSet {
    labels: Vec<usize>,
}

impl CircleSet {
    pub fn canonical(n: usize) -> Self {
        CircleSet {
            labels: (1..=n).collect(),
        }
    }

    pub fn from_labels(labels: Vec<usize>) -> Result<Self> {
        let mut sorted = labels.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != labels.len() || labels.is_empty() {
            return Err(Error::InvalidInput(
                "circle set labels must be distinct and nonempty".into(),
            ));
        }
        Ok(CircleSet { labels })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    fn position(&self, i: usize) -> Result<usize> {
        self.labels
            .iter()
            .position(|&l| l == i)
            .ok_or_else(|| Error::IndexOutOfRange(format!("{i} is not in the circle set")))
    }

    /// `i^+`.
    pub fn succ(&self, i: usize) -> Result<usize> {
        let p = self.position(i)?;
        Ok(self.labels[(p + 1) % self.len()])
    }

    /// `i^-`.
    pub fn pred(&self, i: usize) -> Result<usize> {
        let p = self.position(i)?;
        Ok(self.labels[(p + self.len() - 1) % self.len()])
    }

    /// Cyclic distance from `i` to `j` following successors.
    pub fn distance(&self, i: usize, j: usize) -> Result<usize> {
        let (p, q) = (self.position(i)?, self.position(j)?);
        Ok((q + self.len() - p) % self.len())
    }
}

/// `]i,j[` (or `[i,j]` when `closed`): the elements met walking from `i` to
/// `j` along successors.
pub fn circle_interval(e: &CircleSet, i: usize, j: usize, closed: bool) -> Result<Vec<usize>> {
    if i == j {
        return Err(Error::InvalidInput("interval endpoints must differ".into()));
    }
    let steps = e.distance(i, j)?;
    let start = e.position(i)?;
    let n = e.len();
    let range = if closed { 0..=steps } else { 1..=steps - 1 };
    Ok(range.map(|s| e.labels[(start + s) % n]).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn intervals() {
        let e = CircleSet::canonical(5);
        assert_eq!(circle_interval(&e, 1, 4, false).unwrap(), vec![2, 3]);
        assert_eq!(circle_interval(&e, 4, 2, false).unwrap(), vec![5, 1]);
        assert_eq!(circle_interval(&e, 3, 4, true).unwrap(), vec![3, 4]);
        assert!(circle_interval(&e, 2, 2, true).is_err());
    }

    #[test]
    fn successor_and_predecessor_invert() {
        let e = CircleSet::from_labels(vec![4, 9, 1, 7]).unwrap();
        for &i in e.labels() {
            assert_eq!(e.succ(e.pred(i).unwrap()).unwrap(), i);
            let mut k = i;
            for _ in 0..e.len() {
                k = e.succ(k).unwrap();
            }
            assert_eq!(k, i);
        }
        assert!(CircleSet::from_labels(vec![1, 1]).is_err());
    }
}
