use std::fmt;

use serde::ser::{SerializeStruct, Serializer};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// A finitely supported vector indexed by `1..=dim`.
///
/// Entries are kept sorted by index and never store an explicit zero, so equality
/// of vectors is structural equality.
#[derive(Clone, PartialEq)]
pub struct CoordVector<S> {
    dim: usize,
    entries: Vec<(usize, S)>,
}

impl<S: Scalar> CoordVector<S> {
    pub fn zero(dim: usize) -> Self {
        Self { dim, entries: Vec::new() }
    }

    /// `value * e_index`.
    pub fn basis(dim: usize, index: usize, value: S) -> Result<Self> {
        Self::from_entries(dim, [(index, value)])
    }

    /// Builds a vector from `(index, value)` pairs. Duplicate indices are summed.
    pub fn from_entries<I>(dim: usize, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, S)>,
    {
        let mut raw: Vec<(usize, S)> = entries.into_iter().collect();
        for &(index, _) in &raw {
            if index == 0 || index > dim {
                return Err(Error::IndexOutOfRange { index, dim });
            }
        }
        raw.sort_by_key(|(i, _)| *i);
        let mut merged: Vec<(usize, S)> = Vec::with_capacity(raw.len());
        for (i, v) in raw {
            match merged.last_mut() {
                Some((j, acc)) if *j == i => *acc = acc.clone() + v,
                _ => merged.push((i, v)),
            }
        }
        merged.retain(|(_, v)| !v.is_zero());
        Ok(Self { dim, entries: merged })
    }

    /// Dense slice, `values[j - 1]` is coordinate `j`.
    pub fn from_dense(values: &[S]) -> Self {
        let entries = values
            .iter()
            .enumerate()
            .filter(|(_, v)| !v.is_zero())
            .map(|(i, v)| (i + 1, v.clone()))
            .collect();
        Self { dim: values.len(), entries }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[(usize, S)] {
        &self.entries
    }

    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.entries.iter().map(|(i, _)| *i)
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    /// Largest index in the support, 0 for the zero vector.
    pub fn max_index(&self) -> usize {
        self.entries.last().map_or(0, |(i, _)| *i)
    }

    pub fn get(&self, index: usize) -> S {
        match self.entries.binary_search_by_key(&index, |(i, _)| *i) {
            Ok(pos) => self.entries[pos].1.clone(),
            Err(_) => S::zero(),
        }
    }

    pub fn to_dense(&self) -> Vec<S> {
        let mut out = vec![S::zero(); self.dim];
        for (i, v) in &self.entries {
            out[i - 1] = v.clone();
        }
        out
    }

    pub fn linf(&self) -> S {
        self.entries
            .iter()
            .map(|(_, v)| v.abs())
            .fold(S::zero(), S::max_of)
    }

    pub fn scale(&self, t: &S) -> Self {
        if t.is_zero() {
            return Self::zero(self.dim);
        }
        let entries = self.entries.iter().map(|(i, v)| (*i, v.clone() * t.clone())).collect();
        Self { dim: self.dim, entries }
    }

    pub fn neg(&self) -> Self {
        let entries = self.entries.iter().map(|(i, v)| (*i, -v.clone())).collect();
        Self { dim: self.dim, entries }
    }

    /// Sum in the common ambient truncation `max(dim, other.dim)`.
    pub fn add(&self, other: &Self) -> Self {
        self.combine(other, false)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.combine(other, true)
    }

    fn combine(&self, other: &Self, subtract: bool) -> Self {
        let mut out = Vec::with_capacity(self.entries.len() + other.entries.len());
        let (mut a, mut b) = (self.entries.iter().peekable(), other.entries.iter().peekable());
        loop {
            let next = match (a.peek(), b.peek()) {
                (None, None) => break,
                (Some(_), None) => a.next().map(|(i, v)| (*i, v.clone())),
                (None, Some(_)) => b.next().map(|(i, v)| (*i, if subtract { -v.clone() } else { v.clone() })),
                (Some((i, _)), Some((j, _))) if i < j => a.next().map(|(i, v)| (*i, v.clone())),
                (Some((i, _)), Some((j, _))) if j < i => {
                    b.next().map(|(i, v)| (*i, if subtract { -v.clone() } else { v.clone() }))
                }
                _ => {
                    let (i, x) = a.next().unwrap();
                    let (_, y) = b.next().unwrap();
                    let s = if subtract { x.clone() - y.clone() } else { x.clone() + y.clone() };
                    Some((*i, s))
                }
            };
            if let Some((i, v)) = next {
                if !v.is_zero() {
                    out.push((i, v));
                }
            }
        }
        Self { dim: self.dim.max(other.dim), entries: out }
    }

    /// `P_K`: zero every coordinate above `k`.
    pub fn project(&self, k: usize) -> Self {
        let entries = self.entries.iter().filter(|(i, _)| *i <= k).cloned().collect();
        Self { dim: self.dim, entries }
    }

    /// Re-embeds the vector into a different ambient truncation.
    pub fn with_dim(&self, dim: usize) -> Result<Self> {
        if self.max_index() > dim {
            return Err(Error::IndexOutOfRange { index: self.max_index(), dim });
        }
        Ok(Self { dim, entries: self.entries.clone() })
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> CoordVector<T> {
        CoordVector::from_entries(self.dim, self.entries.iter().map(|(i, v)| (*i, f(v))))
            .expect("indices are already validated")
    }

    pub fn to_f64(&self) -> CoordVector<f64> {
        self.map(|v| v.to_f64())
    }
}

impl<S: Scalar> fmt::Debug for CoordVector<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CoordVector[dim={}](", self.dim)?;
        for (n, (i, v)) in self.entries.iter().enumerate() {
            if n > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{i}: {v}")?;
        }
        write!(f, ")")
    }
}

impl<S: Scalar> Serialize for CoordVector<S> {
    fn serialize<Ser: Serializer>(&self, serializer: Ser) -> std::result::Result<Ser::Ok, Ser::Error> {
        let coords: Vec<(usize, String)> = self
            .entries
            .iter()
            .map(|(i, v)| (*i, v.to_report_string()))
            .collect();
        let mut st = serializer.serialize_struct("CoordVector", 2)?;
        st.serialize_field("dim", &self.dim)?;
        st.serialize_field("coords", &coords)?;
        st.end()
    }
}

/// A vector of a direct sum, one [`CoordVector`] per component.
pub type SumVector<S> = Vec<CoordVector<S>>;
