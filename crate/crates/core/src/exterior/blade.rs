use std::fmt;

/// A basis monomial `e^{i₁} ∧ … ∧ e^{i_k}` with strictly increasing indices,
/// stored as a bit mask (bit `i` set ⇔ `e^i` present).
///
/// Indices are 0-based positions in the coframe. On a cylinder `ℝ × M` the
/// `dt` direction is position 0, so the base coframe `e¹ … eⁿ` lands on
/// positions `1 … n`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Blade(u32);

impl Blade {
    pub const SCALAR: Blade = Blade(0);

    pub const fn from_mask(mask: u32) -> Self {
        Blade(mask)
    }

    pub const fn basis(i: usize) -> Self {
        Blade(1 << i)
    }

    /// Builds a blade from indices in any order, returning the sign of the
    /// sorting permutation. `None` when an index repeats (the wedge vanishes).
    pub fn from_indices(indices: &[usize]) -> Option<(Self, f64)> {
        let mut blade = Blade::SCALAR;
        let mut sign = 1.0;
        for &i in indices {
            let b = Blade::basis(i);
            let s = wedge_sign(blade, b);
            if s == 0 {
                return None;
            }
            sign *= s as f64;
            blade = Blade(blade.0 | b.0);
        }
        Some((blade, sign))
    }

    pub const fn mask(self) -> u32 {
        self.0
    }

    pub const fn grade(self) -> usize {
        self.0.count_ones() as usize
    }

    pub const fn contains(self, i: usize) -> bool {
        self.0 & (1 << i) != 0
    }

    /// True when every index is below `dim`.
    pub const fn fits(self, dim: usize) -> bool {
        dim >= 32 || self.0 >> dim == 0
    }

    pub const fn complement(self, dim: usize) -> Self {
        Blade(!self.0 & full_mask(dim))
    }

    pub const fn without(self, i: usize) -> Self {
        Blade(self.0 & !(1 << i))
    }

    pub const fn with(self, i: usize) -> Self {
        Blade(self.0 | (1 << i))
    }

    pub fn indices(self) -> impl Iterator<Item = usize> {
        let mut m = self.0;
        std::iter::from_fn(move || {
            if m == 0 {
                None
            } else {
                let i = m.trailing_zeros() as usize;
                m &= m - 1;
                Some(i)
            }
        })
    }

    /// All blades of grade `k` in dimension `dim`, in increasing mask order.
    pub fn all_of_grade(dim: usize, k: usize) -> Vec<Blade> {
        (0..=full_mask(dim))
            .filter(|m| m.count_ones() as usize == k)
            .map(Blade)
            .collect()
    }
}

pub(crate) const fn full_mask(dim: usize) -> u32 {
    if dim >= 32 {
        u32::MAX
    } else {
        (1u32 << dim) - 1
    }
}

/// Sign of `e^a ∧ e^b` relative to `e^{a∪b}`; zero when the blades share an
/// index. Counts the transpositions needed to merge the two sorted lists.
pub fn wedge_sign(a: Blade, b: Blade) -> i32 {
    if a.0 & b.0 != 0 {
        return 0;
    }
    let mut swaps = 0u32;
    let mut rest = b.0;
    while rest != 0 {
        let j = rest.trailing_zeros();
        swaps += (a.0 >> j).count_ones();
        rest &= rest - 1;
    }
    if swaps % 2 == 0 {
        1
    } else {
        -1
    }
}

impl fmt::Debug for Blade {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Prints 0-based positions, e.g. `e[0,2,4]`; the scalar blade prints as `1`.
impl fmt::Display for Blade {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 == 0 {
            return write!(f, "1");
        }
        write!(f, "e[")?;
        for (n, i) in self.indices().enumerate() {
            if n > 0 {
                write!(f, ",")?;
            }
            write!(f, "{i}")?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sorting_sign() {
        // e1 ∧ e6 ∧ e4 = -e1 ∧ e4 ∧ e6
        let (b, s) = Blade::from_indices(&[1, 6, 4]).unwrap();
        assert_eq!(b, Blade::from_indices(&[1, 4, 6]).unwrap().0);
        assert_eq!(s, -1.0);
        assert!(Blade::from_indices(&[2, 3, 2]).is_none());
    }

    #[test]
    fn wedge_sign_basics() {
        let e1 = Blade::basis(1);
        let e2 = Blade::basis(2);
        assert_eq!(wedge_sign(e1, e2), 1);
        assert_eq!(wedge_sign(e2, e1), -1);
        assert_eq!(wedge_sign(e1, e1), 0);
        let e12 = e1.with(2);
        let e03 = Blade::basis(0).with(3);
        // e1 e2 e0 e3 -> e0 e1 e2 e3 needs two swaps
        assert_eq!(wedge_sign(e12, e03), 1);
    }

    #[test]
    fn grade_and_complement() {
        let b = Blade::from_mask(0b1011);
        assert_eq!(b.grade(), 3);
        assert_eq!(b.complement(5), Blade::from_mask(0b10100));
        assert_eq!(b.indices().collect::<Vec<_>>(), vec![0, 1, 3]);
        assert_eq!(Blade::all_of_grade(4, 2).len(), 6);
        assert!(b.fits(4));
        assert!(!b.fits(3));
    }
}
