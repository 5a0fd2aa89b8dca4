//! Dyadic geometry of the unit cube.
//!
//! The grid is the family of half-open dyadic subcubes of `[0,1)^n` down to a
//! resolution level `L`. A cube at level `l` has side `2^-l` and measure
//! `2^{-nl}`; each cube at level `l < L` has `2^n` children. Any two dyadic
//! cubes are nested or disjoint, which is what makes every operator in this
//! crate a pure tree computation.
//!
//! Haar functions are tensor products of the one-dimensional profiles
//! `h^0 = |I|^{-1/2} (1_{left} - 1_{right})` and `h^1 = |I|^{-1/2} 1_I`,
//! indexed by a bit signature. A signature is cancellative (mean zero) unless
//! every bit is 1; the all-ones tensor is the normalized indicator.

use crate::error::{Error, Result};
use std::fmt;

/// Hard cap on the spatial dimension. Cell counts are `2^{n L}`, so anything
/// beyond a few dimensions is out of reach anyway.
pub const MAX_DIM: usize = 4;

/// Cap on `n * L` so that cell arrays stay within memory (`2^24` cells max).
const MAX_BITS: u32 = 24;

/// Dimension plus resolution of a finite dyadic tree over the unit cube.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct GridSpec {
    n: u32,
    level: u32,
}

impl fmt::Debug for GridSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GridSpec(n={}, L={})", self.n, self.level)
    }
}

impl fmt::Display for GridSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(n={}, L={})", self.n, self.level)
    }
}

impl GridSpec {
    pub fn new(n: u32, level: u32) -> Result<Self> {
        if n == 0 || n as usize > MAX_DIM {
            return Err(Error::parameter(format!(
                "dimension must be in 1..={MAX_DIM}, got {n}"
            )));
        }
        if n * level > MAX_BITS {
            return Err(Error::parameter(format!(
                "n*L = {} exceeds the supported cell budget (2^{MAX_BITS} cells)",
                n * level
            )));
        }
        Ok(GridSpec { n, level })
    }

    pub fn dim(&self) -> u32 {
        self.n
    }

    /// Resolution level `L`; cells live at this level.
    pub fn resolution(&self) -> u32 {
        self.level
    }

    pub fn cell_count(&self) -> usize {
        1usize << (self.n * self.level)
    }

    /// Number of cubes at level `l`.
    pub fn cubes_at(&self, l: u32) -> usize {
        debug_assert!(l <= self.level);
        1usize << (self.n * l)
    }

    /// Lebesgue measure of one resolution cell.
    pub fn cell_volume(&self) -> f64 {
        (-((self.n * self.level) as f64)).exp2()
    }

    /// Measure of a cube at level `l`.
    pub fn cube_measure(&self, l: u32) -> f64 {
        (-((self.n * l) as f64)).exp2()
    }

    pub fn top(&self) -> CubeId {
        CubeId {
            level: 0,
            coords: [0; MAX_DIM],
        }
    }

    /// Number of cancellative signatures per cube: `2^n - 1`.
    pub fn cancellative_count(&self) -> usize {
        (1usize << self.n) - 1
    }

    /// All cancellative signatures, in mask order.
    pub fn cancellative_signatures(&self) -> impl Iterator<Item = HaarSignature> {
        let n = self.n;
        let full = (1u32 << n) - 1;
        (0..full).map(move |mask| HaarSignature { mask, n })
    }

    /// All cubes at level `l`, in row-major order of the index vector.
    pub fn cubes_at_level(&self, l: u32) -> impl Iterator<Item = CubeId> + '_ {
        let n = self.n;
        (0..self.cubes_at(l) as u64).map(move |idx| CubeId::from_linear(idx, l, n))
    }

    /// Row-major linear index of a cube within its level.
    pub fn linear_index(&self, q: &CubeId) -> u64 {
        pack(&q.coords, q.level, self.n)
    }

    pub fn cube_from_linear(&self, idx: u64, level: u32) -> CubeId {
        CubeId::from_linear(idx, level, self.n)
    }

    /// Cube at level `level` containing the point `x`.
    pub fn cube_containing(&self, x: &[f64], level: u32) -> Result<CubeId> {
        if x.len() != self.n as usize {
            return Err(Error::parameter(format!(
                "point has {} coordinates, grid has dimension {}",
                x.len(),
                self.n
            )));
        }
        let side = 1u64 << level;
        let mut coords = [0u32; MAX_DIM];
        for (i, &xi) in x.iter().enumerate() {
            if !(0.0..1.0).contains(&xi) {
                return Err(Error::PointOutsideDomain);
            }
            let k = (xi * side as f64).floor() as u64;
            coords[i] = k.min(side - 1) as u32;
        }
        Ok(CubeId { level, coords })
    }

    /// Center point of the cell with the given row-major index.
    pub fn cell_center(&self, cell: usize) -> Vec<f64> {
        let q = CubeId::from_linear(cell as u64, self.level, self.n);
        let side = (1u64 << self.level) as f64;
        (0..self.n as usize)
            .map(|i| (q.coords[i] as f64 + 0.5) / side)
            .collect()
    }
}

/// A dyadic subcube of the unit cube: level plus index vector.
///
/// The cube is `prod_i [k_i 2^-l, (k_i+1) 2^-l)`. Only the first `n`
/// coordinates are meaningful; the rest stay zero.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct CubeId {
    level: u32,
    coords: [u32; MAX_DIM],
}

impl fmt::Debug for CubeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Q(l={}, k={:?})", self.level, self.coords)
    }
}

impl CubeId {
    pub fn new(level: u32, coords: &[u32]) -> Result<Self> {
        if coords.len() > MAX_DIM {
            return Err(Error::parameter("too many coordinates".to_string()));
        }
        let side = 1u64 << level;
        let mut c = [0u32; MAX_DIM];
        for (i, &k) in coords.iter().enumerate() {
            if (k as u64) >= side {
                return Err(Error::parameter(format!(
                    "index {k} out of range at level {level}"
                )));
            }
            c[i] = k;
        }
        Ok(CubeId { level, coords: c })
    }

    pub(crate) fn from_linear(idx: u64, level: u32, n: u32) -> CubeId {
        let mut coords = [0u32; MAX_DIM];
        unpack(idx, level, n, &mut coords);
        CubeId { level, coords }
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn coords(&self) -> &[u32; MAX_DIM] {
        &self.coords
    }

    /// Measure `2^{-n l}` of this cube within an `n`-dimensional grid.
    pub fn measure(&self, n: u32) -> f64 {
        (-((n * self.level) as f64)).exp2()
    }

    /// The `k`-th dyadic ancestor: the unique coarser cube `k` generations up.
    pub fn ancestor(&self, k: u32) -> Result<CubeId> {
        if k > self.level {
            return Err(Error::NoSuchAncestor {
                level: self.level,
                requested: k,
            });
        }
        let mut coords = [0u32; MAX_DIM];
        for i in 0..MAX_DIM {
            coords[i] = self.coords[i] >> k;
        }
        Ok(CubeId {
            level: self.level - k,
            coords,
        })
    }

    /// Child cube selected by a corner bitmask (bit `i` = upper half in axis `i`).
    pub fn child(&self, corner: u32) -> CubeId {
        let mut coords = [0u32; MAX_DIM];
        for i in 0..MAX_DIM {
            coords[i] = (self.coords[i] << 1) | ((corner >> i) & 1);
        }
        CubeId {
            level: self.level + 1,
            coords,
        }
    }

    /// True if `self` is contained in `other` (possibly equal).
    pub fn is_contained_in(&self, other: &CubeId) -> bool {
        if self.level < other.level {
            return false;
        }
        self.ancestor(self.level - other.level)
            .map(|a| a == *other)
            .unwrap_or(false)
    }

    /// Corner bitmask of the child of `ancestor` on the path down to `self`.
    /// Requires `self` strictly below `ancestor`.
    pub fn corner_within(&self, ancestor_level: u32) -> u32 {
        debug_assert!(self.level > ancestor_level);
        let shift = self.level - ancestor_level - 1;
        let mut corner = 0u32;
        for i in 0..MAX_DIM {
            corner |= ((self.coords[i] >> shift) & 1) << i;
        }
        corner
    }
}

/// Haar signature: one bit per axis, `0` for the oscillating profile and `1`
/// for the indicator profile. Cancellative unless all bits are 1.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct HaarSignature {
    mask: u32,
    n: u32,
}

impl fmt::Debug for HaarSignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "eps(")?;
        for i in 0..self.n {
            write!(f, "{}", (self.mask >> i) & 1)?;
        }
        write!(f, ")")
    }
}

impl HaarSignature {
    pub fn new(bits: &[u8]) -> Result<Self> {
        if bits.is_empty() || bits.len() > MAX_DIM {
            return Err(Error::parameter("signature length must be in 1..=4".into()));
        }
        let mut mask = 0u32;
        for (i, &b) in bits.iter().enumerate() {
            if b > 1 {
                return Err(Error::parameter("signature bits must be 0 or 1".into()));
            }
            mask |= (b as u32) << i;
        }
        Ok(HaarSignature {
            mask,
            n: bits.len() as u32,
        })
    }

    pub fn from_mask(mask: u32, n: u32) -> Self {
        debug_assert!(mask < (1 << n));
        HaarSignature { mask, n }
    }

    pub fn mask(&self) -> u32 {
        self.mask
    }

    pub fn dim(&self) -> u32 {
        self.n
    }

    pub fn component(&self, i: u32) -> u8 {
        ((self.mask >> i) & 1) as u8
    }

    /// True unless every component is 1 (the pure indicator tensor).
    pub fn is_cancellative(&self) -> bool {
        self.mask != (1 << self.n) - 1
    }
}

/// Sign of the level-`l` Haar tensor with signature `mask` on the child
/// selected by `corner`: each axis with a 0 bit flips sign on its upper half.
#[inline]
pub(crate) fn child_sign(mask: u32, corner: u32, full: u32) -> f64 {
    if (corner & !mask & full).count_ones() & 1 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// `2^{n l / 2}`, the modulus of a level-`l` Haar tensor.
#[inline]
pub(crate) fn haar_scale(n: u32, level: u32) -> f64 {
    ((n * level) as f64 / 2.0).exp2()
}

#[inline]
pub(crate) fn unpack(idx: u64, level: u32, n: u32, out: &mut [u32; MAX_DIM]) {
    let mask = (1u64 << level) - 1;
    for i in 0..n as usize {
        let shift = level * (n - 1 - i as u32);
        out[i] = ((idx >> shift) & mask) as u32;
    }
    for i in n as usize..MAX_DIM {
        out[i] = 0;
    }
}

#[inline]
pub(crate) fn pack(coords: &[u32; MAX_DIM], level: u32, n: u32) -> u64 {
    let mut idx = 0u64;
    for i in 0..n as usize {
        idx = (idx << level) | coords[i] as u64;
    }
    idx
}

/// Row-major index of the corner-`c` child of the cube with row-major index
/// `idx` at level `level` (result is an index at `level + 1`).
#[inline]
pub(crate) fn child_linear(idx: u64, level: u32, n: u32, corner: u32) -> u64 {
    let mut coords = [0u32; MAX_DIM];
    unpack(idx, level, n, &mut coords);
    for i in 0..n as usize {
        coords[i] = (coords[i] << 1) | ((corner >> i) & 1);
    }
    pack(&coords, level + 1, n)
}

/// Row-major index of the `k`-generations-up ancestor of `idx` at `level`.
#[inline]
pub(crate) fn ancestor_linear(idx: u64, level: u32, n: u32, k: u32) -> u64 {
    let mut coords = [0u32; MAX_DIM];
    unpack(idx, level, n, &mut coords);
    for i in 0..n as usize {
        coords[i] >>= k;
    }
    pack(&coords, level - k, n)
}

/// Corner bitmask of the child, under the level-`anc` ancestor, whose subtree
/// contains the level-`level` cube `idx`.
#[inline]
pub(crate) fn corner_under_ancestor(idx: u64, level: u32, n: u32, anc: u32) -> u32 {
    debug_assert!(level > anc);
    let mut coords = [0u32; MAX_DIM];
    unpack(idx, level, n, &mut coords);
    let shift = level - anc - 1;
    let mut corner = 0u32;
    for i in 0..n as usize {
        corner |= ((coords[i] >> shift) & 1) << i;
    }
    corner
}

/// Measure of the intersection of two dyadic cubes: the smaller measure when
/// nested, zero otherwise.
pub fn intersect_measure(n: u32, q1: &CubeId, q2: &CubeId) -> f64 {
    let (fine, coarse) = if q1.level >= q2.level { (q1, q2) } else { (q2, q1) };
    if fine.is_contained_in(coarse) {
        fine.measure(n)
    } else {
        0.0
    }
}

/// `k`-th dyadic ancestor of `q`; fails if the ancestor would leave the tree.
pub fn ancestor(q: &CubeId, k: u32) -> Result<CubeId> {
    q.ancestor(k)
}

/// Pointwise evaluation of the Haar tensor `h_q^eps` at `x`.
///
/// Zero outside `q`; modulus `|q|^{-1/2}` inside. Points on dyadic boundaries
/// resolve to the half-open cell containing them.
pub fn haar_eval(spec: &GridSpec, q: &CubeId, eps: &HaarSignature, x: &[f64]) -> Result<f64> {
    let n = spec.dim();
    if eps.n != n {
        return Err(Error::parameter("signature dimension mismatch".into()));
    }
    let at_level = spec.cube_containing(x, q.level)?;
    if at_level != *q {
        return Ok(0.0);
    }
    let below = spec.cube_containing(x, q.level + 1)?;
    let corner = below.corner_within(q.level);
    let full = (1u32 << n) - 1;
    Ok(haar_scale(n, q.level) * child_sign(eps.mask, corner, full))
}

/// Value of `h_q^eps` on a strict descendant cube `sub` (constant there).
pub fn haar_value_on(n: u32, q: &CubeId, eps: &HaarSignature, sub: &CubeId) -> f64 {
    debug_assert!(sub.level > q.level && sub.is_contained_in(q));
    let corner = sub.corner_within(q.level);
    let full = (1u32 << n) - 1;
    haar_scale(n, q.level) * child_sign(eps.mask, corner, full)
}

/// Product rule for two Haar tensors on the same cube.
///
/// `h^eps h^eta = |Q|^s h^{eps+eta}` with `s = -1/2` and `(eps+eta)_i = 1`
/// exactly when the components agree. Returns the measure exponent `s` and
/// the combined signature; the caller resolves `|Q|^s` on its cube.
pub fn haar_product(eps: &HaarSignature, eta: &HaarSignature) -> (f64, HaarSignature) {
    debug_assert_eq!(eps.n, eta.n);
    let full = (1u32 << eps.n) - 1;
    let combined = !(eps.mask ^ eta.mask) & full;
    (
        -0.5,
        HaarSignature {
            mask: combined,
            n: eps.n,
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cube(level: u32, coords: &[u32]) -> CubeId {
        CubeId::new(level, coords).unwrap()
    }

    #[test]
    fn ancestor_basic() {
        // [0, 1/4) two levels down, one generation up -> [0, 1/2)
        let q = cube(2, &[0]);
        assert_eq!(ancestor(&q, 1).unwrap(), cube(1, &[0]));
        // identity case
        assert_eq!(ancestor(&q, 0).unwrap(), q);
        // [1/2, 3/4) two generations up -> top cube
        let q = cube(2, &[2]);
        assert_eq!(ancestor(&q, 2).unwrap(), cube(0, &[0]));
        assert!(matches!(
            ancestor(&q, 3),
            Err(Error::NoSuchAncestor { .. })
        ));
    }

    #[test]
    fn intersect_measure_cases() {
        let n = 1;
        let a = cube(1, &[0]);
        let b = cube(1, &[1]);
        let top = cube(0, &[0]);
        assert_eq!(intersect_measure(n, &a, &b), 0.0);
        assert_eq!(intersect_measure(n, &a, &top), 0.5);
        assert_eq!(intersect_measure(n, &a, &a), 0.5);
    }

    #[test]
    fn dichotomy_exhaustive() {
        // any two cubes are nested or disjoint, and intersect_measure agrees
        // with explicit interval intersection
        let spec = GridSpec::new(2, 3).unwrap();
        let mut cubes = Vec::new();
        for l in 0..=3 {
            cubes.extend(spec.cubes_at_level(l));
        }
        let side = |q: &CubeId, i: usize| {
            let s = (q.level() as f64).exp2();
            (q.coords()[i] as f64 / s, (q.coords()[i] as f64 + 1.0) / s)
        };
        for q1 in &cubes {
            for q2 in &cubes {
                let mut vol = 1.0;
                for i in 0..2 {
                    let (a0, a1) = side(q1, i);
                    let (b0, b1) = side(q2, i);
                    vol *= (a1.min(b1) - a0.max(b0)).max(0.0);
                }
                let nested = q1.is_contained_in(q2) || q2.is_contained_in(q1);
                let im = intersect_measure(2, q1, q2);
                assert!((im - if nested { vol } else { 0.0 }).abs() < 1e-15);
                if !nested {
                    assert!(vol < 1e-15, "{q1:?} {q2:?} overlap without nesting");
                }
            }
        }
    }

    #[test]
    fn haar_eval_one_dim() {
        let spec = GridSpec::new(1, 3).unwrap();
        let top = spec.top();
        let e0 = HaarSignature::new(&[0]).unwrap();
        assert_eq!(haar_eval(&spec, &top, &e0, &[0.1]).unwrap(), 1.0);
        assert_eq!(haar_eval(&spec, &top, &e0, &[0.9]).unwrap(), -1.0);
        // boundary point resolves into the right half (left-closed cells)
        assert_eq!(haar_eval(&spec, &top, &e0, &[0.5]).unwrap(), -1.0);
        assert!(matches!(
            haar_eval(&spec, &top, &e0, &[1.0]),
            Err(Error::PointOutsideDomain)
        ));
        // modulus |q|^{-1/2} inside, zero outside
        let q = cube(2, &[1]); // [1/4, 1/2)
        assert_eq!(haar_eval(&spec, &q, &e0, &[0.3]).unwrap(), 2.0);
        assert_eq!(haar_eval(&spec, &q, &e0, &[0.6]).unwrap(), 0.0);
    }

    #[test]
    fn product_rule_signatures() {
        let e = |bits: &[u8]| HaarSignature::new(bits).unwrap();
        let (s, c) = haar_product(&e(&[0]), &e(&[0]));
        assert_eq!(s, -0.5);
        assert_eq!(c, e(&[1]));
        assert!(!c.is_cancellative());

        let (_, c) = haar_product(&e(&[0, 1]), &e(&[0, 1]));
        assert_eq!(c, e(&[1, 1]));

        let (_, c) = haar_product(&e(&[0, 1]), &e(&[1, 0]));
        assert_eq!(c, e(&[0, 0]));
        assert!(c.is_cancellative());
    }

    #[test]
    fn cancellative_counts() {
        let spec = GridSpec::new(2, 1).unwrap();
        assert_eq!(spec.cancellative_signatures().count(), 3);
        assert!(spec.cancellative_signatures().all(|s| s.is_cancellative()));
    }

    #[test]
    fn linear_index_roundtrip() {
        let spec = GridSpec::new(3, 2).unwrap();
        for l in 0..=2 {
            for (i, q) in spec.cubes_at_level(l).enumerate() {
                assert_eq!(spec.linear_index(&q), i as u64);
                assert_eq!(spec.cube_from_linear(i as u64, l), q);
            }
        }
    }

    #[test]
    fn child_and_corner() {
        let q = cube(1, &[1, 0]);
        let c = q.child(0b10); // upper half in axis 1
        assert_eq!(c, cube(2, &[2, 1]));
        assert_eq!(c.corner_within(1), 0b10);
        assert!(c.is_contained_in(&q));
    }
}
