//! Product spaces V_n^(p) = F_{p^{n₁}} × … × F_{p^{n_s}} and their trace
//! inner product ⟨a,b⟩_n = Σ_j Tr_{p^{n_j}/p}(a_j b_j).
//!
//! Points are addressed by a global index in [0, p^n): the mixed-radix
//! combination of component codes with the last component varying fastest,
//! i.e. enumeration is lexicographic across parts with ascending codes.

use crate::error::{Error, Result};
use crate::field::ExtField;
use std::sync::Arc;

#[derive(Debug)]
pub struct VectorSpace {
    p: u64,
    degrees: Vec<u32>,
    fields: Vec<Arc<ExtField>>,
    n: u32,
    size: u64,
    strides: Vec<u64>,
    /// Flattened part codes of every point, size × s, enumeration order.
    parts: Vec<u32>,
    /// Discrete logs of the part codes (u32::MAX at zero), same layout.
    part_logs: Vec<u32>,
}

impl PartialEq for VectorSpace {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.degrees == other.degrees
    }
}
impl Eq for VectorSpace {}

impl VectorSpace {
    pub fn new(p: u64, degrees: &[u32]) -> Result<Arc<VectorSpace>> {
        if degrees.is_empty() {
            return Err(Error::Constraint(
                "a space needs at least one component".into(),
            ));
        }
        if degrees.iter().any(|&d| d == 0) {
            return Err(Error::Constraint("component degrees must be ≥ 1".into()));
        }
        let n: u32 = degrees.iter().sum();
        let size = p
            .checked_pow(n)
            .filter(|&s| s <= crate::field::TABLE_CAP)
            .ok_or(Error::TableTooLarge { p, k: n })?;
        let fields = degrees
            .iter()
            .map(|&d| ExtField::new(p, d))
            .collect::<Result<Vec<_>>>()?;
        let mut strides = vec![1u64; degrees.len()];
        for j in (0..degrees.len().saturating_sub(1)).rev() {
            strides[j] = strides[j + 1] * fields[j + 1].size();
        }
        let s = degrees.len();
        let mut parts = vec![0u32; (size as usize) * s];
        let mut part_logs = vec![u32::MAX; (size as usize) * s];
        for idx in 0..size {
            for j in 0..s {
                let code = ((idx / strides[j]) % fields[j].size()) as u32;
                parts[idx as usize * s + j] = code;
                part_logs[idx as usize * s + j] = fields[j].log_or_sentinel(code);
            }
        }
        Ok(Arc::new(VectorSpace {
            p,
            degrees: degrees.to_vec(),
            fields,
            n,
            size,
            strides,
            parts,
            part_logs,
        }))
    }

    pub fn p(&self) -> u64 {
        self.p
    }
    pub fn degrees(&self) -> &[u32] {
        &self.degrees
    }
    pub fn components(&self) -> &[Arc<ExtField>] {
        &self.fields
    }
    /// n = Σ n_j.
    pub fn dimension(&self) -> u32 {
        self.n
    }
    /// p^n.
    pub fn size(&self) -> u64 {
        self.size
    }
    pub fn num_parts(&self) -> usize {
        self.degrees.len()
    }

    /// Part codes of the point with the given global index.
    #[inline]
    pub fn parts_of(&self, idx: u64) -> &[u32] {
        let s = self.degrees.len();
        &self.parts[idx as usize * s..idx as usize * s + s]
    }

    #[inline]
    fn logs_of(&self, idx: u64) -> &[u32] {
        let s = self.degrees.len();
        &self.part_logs[idx as usize * s..idx as usize * s + s]
    }

    /// Global index of a point given by part codes.
    pub fn index_of(&self, parts: &[u32]) -> Result<u64> {
        if parts.len() != self.degrees.len() {
            return Err(Error::SpaceMismatch);
        }
        let mut idx = 0u64;
        for (j, &c) in parts.iter().enumerate() {
            self.fields[j].check_code(c as u64)?;
            idx += c as u64 * self.strides[j];
        }
        Ok(idx)
    }

    /// Componentwise sum of two points.
    pub fn add(&self, a: u64, b: u64) -> u64 {
        let (pa, pb) = (self.parts_of(a), self.parts_of(b));
        let mut idx = 0u64;
        for j in 0..self.degrees.len() {
            idx += self.fields[j].add(pa[j], pb[j]) as u64 * self.strides[j];
        }
        idx
    }

    /// Componentwise negation.
    pub fn neg(&self, a: u64) -> u64 {
        let pa = self.parts_of(a);
        let mut idx = 0u64;
        for j in 0..self.degrees.len() {
            idx += self.fields[j].neg(pa[j]) as u64 * self.strides[j];
        }
        idx
    }

    pub fn sub(&self, a: u64, b: u64) -> u64 {
        self.add(a, self.neg(b))
    }

    /// Componentwise scaling by one field element per component.
    /// `scalars[j]` must be a code in component j's field.
    pub fn scale(&self, scalars: &[u32], x: u64) -> u64 {
        let px = self.parts_of(x);
        let mut idx = 0u64;
        for j in 0..self.degrees.len() {
            idx += self.fields[j].mul(scalars[j], px[j]) as u64 * self.strides[j];
        }
        idx
    }

    /// Trace inner product ⟨a,x⟩_n as a residue in [0, p).
    #[inline]
    pub fn inner_product(&self, a: u64, x: u64) -> u32 {
        let (la, lx) = (self.logs_of(a), self.logs_of(x));
        let mut acc = 0u64;
        for j in 0..self.degrees.len() {
            let (u, v) = (la[j], lx[j]);
            if u == u32::MAX || v == u32::MAX {
                continue;
            }
            let f = &self.fields[j];
            let q1 = f.group_order();
            let mut e = u as u64 + v as u64;
            if e >= q1 {
                e -= q1;
            }
            acc += f.trace_of_exp(e) as u64;
        }
        (acc % self.p) as u32
    }

    /// All point indices in enumeration order.
    pub fn enumerate(&self) -> impl Iterator<Item = u64> + '_ {
        0..self.size
    }

    pub fn check_index(&self, idx: u64) -> Result<u64> {
        if idx < self.size {
            Ok(idx)
        } else {
            Err(Error::CodeOutOfRange {
                code: idx,
                size: self.size,
            })
        }
    }
}

/// A point bundled with its space, for callers that want checked typed
/// arithmetic instead of raw indices.
#[derive(Debug, Clone)]
pub struct VecElem {
    space: Arc<VectorSpace>,
    index: u64,
}

impl PartialEq for VecElem {
    fn eq(&self, other: &Self) -> bool {
        self.space == other.space && self.index == other.index
    }
}
impl Eq for VecElem {}

impl VecElem {
    pub fn new(space: Arc<VectorSpace>, index: u64) -> Result<VecElem> {
        space.check_index(index)?;
        Ok(VecElem { space, index })
    }

    pub fn from_parts(space: Arc<VectorSpace>, parts: &[u32]) -> Result<VecElem> {
        let index = space.index_of(parts)?;
        Ok(VecElem { space, index })
    }

    pub fn index(&self) -> u64 {
        self.index
    }
    pub fn parts(&self) -> &[u32] {
        self.space.parts_of(self.index)
    }
    pub fn space(&self) -> &Arc<VectorSpace> {
        &self.space
    }

    fn same_space(&self, other: &VecElem) -> Result<()> {
        if self.space == other.space {
            Ok(())
        } else {
            Err(Error::SpaceMismatch)
        }
    }

    pub fn add(&self, other: &VecElem) -> Result<VecElem> {
        self.same_space(other)?;
        Ok(VecElem {
            space: self.space.clone(),
            index: self.space.add(self.index, other.index),
        })
    }

    pub fn neg(&self) -> VecElem {
        VecElem {
            space: self.space.clone(),
            index: self.space.neg(self.index),
        }
    }

    /// ⟨self, other⟩_n as a residue mod p.
    pub fn inner(&self, other: &VecElem) -> Result<u32> {
        self.same_space(other)?;
        Ok(self.space.inner_product(self.index, other.index))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn enumeration_is_lexicographic() {
        let v = VectorSpace::new(3, &[1, 1]).unwrap();
        let got: Vec<Vec<u32>> = v.enumerate().map(|i| v.parts_of(i).to_vec()).collect();
        let expect: Vec<Vec<u32>> = (0..3)
            .flat_map(|a| (0..3).map(move |b| vec![a, b]))
            .collect();
        assert_eq!(got, expect);
        assert_eq!(v.size(), 9);

        let f9 = VectorSpace::new(3, &[2]).unwrap();
        assert_eq!(f9.enumerate().count(), 9);
    }

    #[test]
    fn index_round_trip() {
        let v = VectorSpace::new(3, &[2, 1, 2]).unwrap();
        for idx in v.enumerate() {
            let parts = v.parts_of(idx).to_vec();
            assert_eq!(v.index_of(&parts).unwrap(), idx);
        }
    }

    #[test]
    fn inner_product_examples() {
        // Single component F_9: ⟨1,1⟩ = Tr_{9/3}(1) = 2.
        let v = VectorSpace::new(3, &[2]).unwrap();
        assert_eq!(v.inner_product(1, 1), 2);
        // F_3 × F_3: standard inner product; ⟨(1,2),(2,2)⟩ = 2 + 4 = 6 ≡ 0.
        let w = VectorSpace::new(3, &[1, 1]).unwrap();
        let a = w.index_of(&[1, 2]).unwrap();
        let b = w.index_of(&[2, 2]).unwrap();
        assert_eq!(w.inner_product(a, b), 0);
        // bilinearity against zero
        for x in w.enumerate() {
            assert_eq!(w.inner_product(x, 0), 0);
        }
    }

    #[test]
    fn inner_product_symmetric_bilinear_nondegenerate() {
        for degrees in [vec![2u32], vec![1, 1], vec![2, 1], vec![3]] {
            let v = VectorSpace::new(3, &degrees).unwrap();
            if v.size() > 729 {
                continue;
            }
            for a in v.enumerate() {
                for b in v.enumerate() {
                    assert_eq!(v.inner_product(a, b), v.inner_product(b, a));
                }
            }
            // additivity in the first slot
            for a in v.enumerate().step_by(3) {
                for b in v.enumerate().step_by(5) {
                    for x in v.enumerate().step_by(7) {
                        let lhs = v.inner_product(v.add(a, b), x);
                        let rhs = (v.inner_product(a, x) + v.inner_product(b, x)) % 3;
                        assert_eq!(lhs, rhs);
                    }
                }
            }
            // non-degeneracy
            for a in v.enumerate().skip(1) {
                assert!(
                    v.enumerate().any(|b| v.inner_product(a, b) != 0),
                    "degenerate at {a}"
                );
            }
        }
    }

    #[test]
    fn add_neg_consistency() {
        let v = VectorSpace::new(5, &[1, 2]).unwrap();
        for x in v.enumerate().step_by(3) {
            assert_eq!(v.add(x, v.neg(x)), 0);
            assert_eq!(v.sub(x, x), 0);
        }
    }

    #[test]
    fn typed_points_check_their_space() {
        let v = VectorSpace::new(3, &[1, 1]).unwrap();
        let w = VectorSpace::new(3, &[2]).unwrap();
        let a = VecElem::from_parts(v.clone(), &[1, 2]).unwrap();
        let b = VecElem::from_parts(v.clone(), &[2, 2]).unwrap();
        assert_eq!(a.inner(&b).unwrap(), 0);
        assert_eq!(a.add(&a.neg()).unwrap().index(), 0);
        let foreign = VecElem::new(w, 1).unwrap();
        assert!(matches!(a.inner(&foreign), Err(Error::SpaceMismatch)));
        assert!(VecElem::new(v, 9).is_err());
    }
}
