use super::poly::{Jets, PhasePoly};
use crate::error::{Error, Result};

/// Ostrogradsky momenta `Π_i = Σ_j (−d/dt)^j ∂L/∂x^{(i+j+1)}` for a
/// Lagrangian of order `n` in the jet variables, `i = 0 … n−1`.
pub fn ostrogradsky_momenta(l: &PhasePoly, jets: &Jets) -> Result<Vec<PhasePoly>> {
    let Some(n) = jets.order_of(l) else {
        return Ok(Vec::new());
    };
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut acc = PhasePoly::zero(jets.space());
        for j in 0..n - i {
            let idx = jets.index_of(i + j + 1).expect("order bounded by order_of");
            let mut term = l.derivative(idx);
            for _ in 0..j {
                term = -jets.total_derivative(&term)?;
            }
            acc = acc.try_add(&term)?;
        }
        out.push(acc);
    }
    Ok(out)
}

/// `H = Σ_i p_i x^{(i+1)} − L` with `p_i` the named momentum symbols.
pub fn canonical_hamiltonian(l: &PhasePoly, jets: &Jets, momenta: &[&str]) -> Result<PhasePoly> {
    let n = jets.order_of(l).unwrap_or(0);
    if momenta.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: momenta.len(),
        });
    }
    let mut h = -l;
    for (i, name) in momenta.iter().enumerate() {
        let p = PhasePoly::var(jets.space(), name)?;
        h = h.try_add(&p.try_mul(&jets.symbol(i + 1)?)?)?;
    }
    Ok(h)
}

/// Residuals of the generating-function relations
/// `∂f/∂Q^i − P_j ∂ξ^j/∂Q^i + Π_i` and `∂f/∂Π_i − P_j ∂ξ^j/∂Π_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratingResiduals {
    pub coordinate: Vec<PhasePoly>,
    pub momentum: Vec<PhasePoly>,
}

impl GeneratingResiduals {
    pub fn all_zero(&self) -> bool {
        self.coordinate
            .iter()
            .chain(&self.momentum)
            .all(PhasePoly::is_zero)
    }
}

fn check_lengths(q: &[&str], pi: &[&str], xi: &[PhasePoly], p: &[PhasePoly]) -> Result<()> {
    if q.len() != pi.len() {
        return Err(Error::DimensionMismatch {
            expected: q.len(),
            found: pi.len(),
        });
    }
    if xi.len() != p.len() {
        return Err(Error::DimensionMismatch {
            expected: xi.len(),
            found: p.len(),
        });
    }
    Ok(())
}

/// `Σ_j P_j ∂ξ^j/∂v`.
fn pull(var: usize, xi: &[PhasePoly], p: &[PhasePoly]) -> Result<PhasePoly> {
    let mut acc = PhasePoly::zero(xi[0].space());
    for (x, pj) in xi.iter().zip(p) {
        acc = acc.try_add(&pj.try_mul(&x.derivative(var))?)?;
    }
    Ok(acc)
}

pub fn generating_function_check(
    f: &PhasePoly,
    q: &[&str],
    pi: &[&str],
    xi: &[PhasePoly],
    p: &[PhasePoly],
) -> Result<GeneratingResiduals> {
    check_lengths(q, pi, xi, p)?;
    if xi.is_empty() {
        return Err(Error::DimensionMismatch {
            expected: 1,
            found: 0,
        });
    }
    let space = f.space();
    let mut coordinate = Vec::with_capacity(q.len());
    let mut momentum = Vec::with_capacity(q.len());
    for (qn, pn) in q.iter().zip(pi) {
        let (qi, pii) = (space.index(qn)?, space.index(pn)?);
        let r = f
            .derivative(qi)
            .try_sub(&pull(qi, xi, p)?)?
            .try_add(&PhasePoly::var_index(space, pii))?;
        coordinate.push(r);
        momentum.push(f.derivative(pii).try_sub(&pull(pii, xi, p)?)?);
    }
    Ok(GeneratingResiduals {
        coordinate,
        momentum,
    })
}

/// `(Π_i + ∂f/∂Q^i) δQ^i + (∂f/∂Π_i) δΠ_i − P_j δξ^j` with the variations
/// as symbols of the space; identically zero for a generating function.
pub fn boundary_term_residual(
    f: &PhasePoly,
    q: &[&str],
    pi: &[&str],
    xi: &[PhasePoly],
    p: &[PhasePoly],
    dq: &[&str],
    dpi: &[&str],
) -> Result<PhasePoly> {
    check_lengths(q, pi, xi, p)?;
    if dq.len() != q.len() || dpi.len() != pi.len() {
        return Err(Error::DimensionMismatch {
            expected: q.len(),
            found: dq.len().min(dpi.len()),
        });
    }
    let space = f.space();
    let mut lhs = PhasePoly::zero(space);
    let mut dxi = vec![PhasePoly::zero(space); xi.len()];
    for k in 0..q.len() {
        let (qi, pii) = (space.index(q[k])?, space.index(pi[k])?);
        let dqk = PhasePoly::var(space, dq[k])?;
        let dpk = PhasePoly::var(space, dpi[k])?;
        let coef = PhasePoly::var_index(space, pii).try_add(&f.derivative(qi))?;
        lhs = lhs
            .try_add(&coef.try_mul(&dqk)?)?
            .try_add(&f.derivative(pii).try_mul(&dpk)?)?;
        for (j, x) in xi.iter().enumerate() {
            dxi[j] = dxi[j]
                .try_add(&x.derivative(qi).try_mul(&dqk)?)?
                .try_add(&x.derivative(pii).try_mul(&dpk)?)?;
        }
    }
    let mut rhs = PhasePoly::zero(space);
    for (pj, d) in p.iter().zip(&dxi) {
        rhs = rhs.try_add(&pj.try_mul(d)?)?;
    }
    lhs.try_sub(&rhs)
}
