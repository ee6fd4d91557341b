//! Well-ordered enumeration of the non-constant polynomials
//! irreducible over Z with positive leading coefficient.
//!
//! The order is graded by max(degree, height); inside a grade, blocks
//! run by (degree, height) ascending and each block lists coefficient
//! tuples (a_0, ..., a_d) in lexicographic order. Every grade is
//! finite, so the enumeration is a bijection with the naturals and is
//! prefix-stable.

use std::collections::VecDeque;

use num_traits::Signed;

use super::{irreducible_over_z, IntPoly};

pub struct IrreducibleEnum {
    grade: u64,
    pending: VecDeque<IntPoly>,
}

impl IrreducibleEnum {
    pub fn new() -> Self {
        IrreducibleEnum {
            grade: 0,
            pending: VecDeque::new(),
        }
    }

    fn fill_grade(&mut self) {
        self.grade += 1;
        let n = self.grade;
        for degree in 1..=n {
            for height in 1..=n {
                if degree.max(height) != n {
                    continue;
                }
                emit_block(degree as usize, height as i64, &mut self.pending);
            }
        }
    }
}

impl Default for IrreducibleEnum {
    fn default() -> Self {
        Self::new()
    }
}

impl Iterator for IrreducibleEnum {
    type Item = IntPoly;

    fn next(&mut self) -> Option<IntPoly> {
        while self.pending.is_empty() {
            self.fill_grade();
        }
        self.pending.pop_front()
    }
}

/// All members with this exact degree and height, in lex order on the
/// coefficient tuple (a_0 most significant).
fn emit_block(degree: usize, height: i64, out: &mut VecDeque<IntPoly>) {
    let min_at = |i: usize| if i == degree { 1 } else { -height };
    let mut tuple: Vec<i64> = (0..=degree).map(min_at).collect();
    'outer: loop {
        if tuple.iter().any(|c| c.abs() == height) {
            let poly = IntPoly::from_i64(&tuple);
            let irr = irreducible_over_z(&poly)
                .expect("enumeration stays under the supported degree range");
            if irr {
                out.push_back(poly);
            }
        }
        let mut i = degree + 1;
        while i > 0 {
            i -= 1;
            if tuple[i] < height {
                tuple[i] += 1;
                for j in i + 1..=degree {
                    tuple[j] = min_at(j);
                }
                continue 'outer;
            }
        }
        return;
    }
}

/// The i-th member (0-based) of the enumeration.
pub fn enumerate_i(i: usize) -> IntPoly {
    IrreducibleEnum::new()
        .nth(i)
        .expect("the enumeration is infinite")
}

/// The first `count` members.
pub fn first_members(count: usize) -> Vec<IntPoly> {
    IrreducibleEnum::new().take(count).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Signed;

    #[test]
    fn first_three_are_the_linear_height_one_tuples() {
        assert_eq!(enumerate_i(0), IntPoly::from_i64(&[-1, 1])); // x - 1
        assert_eq!(enumerate_i(1), IntPoly::from_i64(&[0, 1])); // x
        assert_eq!(enumerate_i(2), IntPoly::from_i64(&[1, 1])); // x + 1
    }

    #[test]
    fn grade_two_order() {
        let first = first_members(12);
        assert_eq!(first[3], IntPoly::from_i64(&[-2, 1])); // x - 2
        assert_eq!(first[4], IntPoly::from_i64(&[-1, 2])); // 2x - 1
        assert_eq!(first[5], IntPoly::from_i64(&[1, 2])); // 2x + 1
        assert_eq!(first[6], IntPoly::from_i64(&[2, 1])); // x + 2
        // then the degree-2 height-1 block
        assert_eq!(first[7], IntPoly::from_i64(&[-1, -1, 1]));
        assert_eq!(first[8], IntPoly::from_i64(&[-1, 1, 1]));
        assert_eq!(first[9], IntPoly::from_i64(&[1, -1, 1]));
        assert_eq!(first[10], IntPoly::from_i64(&[1, 0, 1]));
        assert_eq!(first[11], IntPoly::from_i64(&[1, 1, 1]));
    }

    #[test]
    fn outputs_are_distinct_irreducible_and_positive_leading() {
        let members = first_members(200);
        for (i, f) in members.iter().enumerate() {
            assert!(f.leading().unwrap().is_positive(), "entry {i}");
            assert!(irreducible_over_z(f).unwrap(), "entry {i}: {f}");
        }
        let mut sorted: Vec<_> = members.iter().map(|f| format!("{f}")).collect();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted.len(), members.len());
    }

    #[test]
    fn low_degrees_and_heights_appear_in_the_first_200() {
        let members = first_members(200);
        let mut expected = Vec::new();
        for a1 in 1..=3i64 {
            for a0 in -3..=3i64 {
                let f = IntPoly::from_i64(&[a0, a1]);
                if irreducible_over_z(&f).unwrap() {
                    expected.push(f);
                }
            }
        }
        for a2 in 1..=3i64 {
            for a1 in -3..=3i64 {
                for a0 in -3..=3i64 {
                    let f = IntPoly::from_i64(&[a0, a1, a2]);
                    if irreducible_over_z(&f).unwrap() {
                        expected.push(f);
                    }
                }
            }
        }
        for f in expected {
            assert!(members.contains(&f), "missing {f}");
        }
    }

    #[test]
    fn prefix_stability() {
        let a = first_members(40);
        let b = first_members(60);
        assert_eq!(&b[..40], &a[..]);
    }
}
