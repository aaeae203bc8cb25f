use num_rational::BigRational;
use num_traits::{One, Zero};

use super::poly::{poisson_bracket, PhasePoly};
use crate::error::{Error, Result};

/// A second-class constraint set with its inverted bracket matrix.
#[derive(Debug, Clone)]
pub struct ConstraintSet {
    constraints: Vec<PhasePoly>,
    brackets: Vec<Vec<BigRational>>,
    inverse: Vec<Vec<BigRational>>,
}

impl ConstraintSet {
    /// Builds `{φ_α, φ_β}` and its inverse `C^{αβ}`.
    ///
    /// Entries must be rational constants; a singular matrix means the
    /// set is not second class.
    pub fn new(constraints: Vec<PhasePoly>) -> Result<Self> {
        let n = constraints.len();
        if n == 0 {
            return Err(Error::NotSecondClass);
        }
        let mut brackets = vec![vec![BigRational::zero(); n]; n];
        for i in 0..n {
            for j in 0..n {
                let b = poisson_bracket(&constraints[i], &constraints[j])?;
                brackets[i][j] = b
                    .as_constant()
                    .ok_or_else(|| Error::NonConstantBracket(b.to_string()))?;
            }
        }
        let inverse = invert(&brackets).ok_or(Error::NotSecondClass)?;
        Ok(Self {
            constraints,
            brackets,
            inverse,
        })
    }

    pub fn constraints(&self) -> &[PhasePoly] {
        &self.constraints
    }

    pub fn bracket_matrix(&self) -> &[Vec<BigRational>] {
        &self.brackets
    }

    pub fn inverse(&self) -> &[Vec<BigRational>] {
        &self.inverse
    }
}

type RationalMatrix = Vec<Vec<BigRational>>;

/// `({φ_α, φ_β}, C^{αβ})` for a constraint list.
pub fn constraint_matrix(constraints: &[PhasePoly]) -> Result<(RationalMatrix, RationalMatrix)> {
    let cs = ConstraintSet::new(constraints.to_vec())?;
    Ok((cs.brackets, cs.inverse))
}

fn invert(m: &[Vec<BigRational>]) -> Option<Vec<Vec<BigRational>>> {
    let n = m.len();
    let mut a: Vec<Vec<BigRational>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| {
                if i == j {
                    BigRational::one()
                } else {
                    BigRational::zero()
                }
            }));
            r
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, pivot);
        let inv = BigRational::one() / a[col][col].clone();
        for v in a[col].iter_mut() {
            *v = &*v * &inv;
        }
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for k in 0..2 * n {
                    let delta = &f * &a[col][k];
                    a[r][k] -= delta;
                }
            }
        }
    }
    Some(a.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// `{A, B}* = {A, B} − {A, φ_α} C^{αβ} {φ_β, B}`.
pub fn dirac_bracket(a: &PhasePoly, b: &PhasePoly, cs: &ConstraintSet) -> Result<PhasePoly> {
    let mut out = poisson_bracket(a, b)?;
    let left: Vec<PhasePoly> = cs
        .constraints
        .iter()
        .map(|phi| poisson_bracket(a, phi))
        .collect::<Result<_>>()?;
    let right: Vec<PhasePoly> = cs
        .constraints
        .iter()
        .map(|phi| poisson_bracket(phi, b))
        .collect::<Result<_>>()?;
    for (al, l) in left.iter().enumerate() {
        if l.is_zero() {
            continue;
        }
        for (be, r) in right.iter().enumerate() {
            let c = &cs.inverse[al][be];
            if c.is_zero() || r.is_zero() {
                continue;
            }
            out = out.try_sub(&l.try_mul(r)?.scale(c))?;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::super::poly::{rat, PhaseSpace};
    use super::*;

    #[test]
    fn inverse_of_rational_matrix() {
        let m = vec![vec![rat(0, 1), rat(2, 3)], vec![rat(-2, 3), rat(0, 1)]];
        let inv = invert(&m).unwrap();
        assert_eq!(
            inv,
            vec![vec![rat(0, 1), rat(-3, 2)], vec![rat(3, 2), rat(0, 1)]]
        );
        assert!(invert(&[vec![rat(0, 1)]]).is_none());
    }

    #[test]
    fn single_constraint_is_not_second_class() {
        let s =
            PhaseSpace::new(&["x", "xd", "p0", "p1"], &[("x", "p0"), ("xd", "p1")], None).unwrap();
        let p1 = PhasePoly::var(&s, "p1").unwrap();
        assert!(matches!(
            ConstraintSet::new(vec![p1]),
            Err(Error::NotSecondClass)
        ));
    }

    #[test]
    fn non_constant_bracket_is_rejected() {
        let s = PhaseSpace::new(&["x", "p"], &[("x", "p")], None).unwrap();
        let x = PhasePoly::var(&s, "x").unwrap();
        let p = PhasePoly::var(&s, "p").unwrap();
        assert!(matches!(
            ConstraintSet::new(vec![&x * &x, p]),
            Err(Error::NonConstantBracket(_))
        ));
    }
}
