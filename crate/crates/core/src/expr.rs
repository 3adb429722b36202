//! Formal operator expressions and tilde conjugation.
//!
//! Tilde conjugation is defined on expressions rather than on matrices: each
//! hat mode is replaced by its tilde partner and every scalar is complex
//! conjugated, which gives `(AB)~ = ÃB̃`, `(zA + wB)~ = z*Ã + w*B̃` and
//! `(A†)~ = (Ã)†` by structural recursion. Only the bosonic rules are
//! implemented here.

use std::collections::BTreeSet;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_complex::Complex64 as C64;

use crate::error::{Result, TfdError};
use crate::fock::{BasisDescriptor, ModeId};
use crate::operator::SparseOperator;

#[derive(Clone, Debug, PartialEq)]
pub enum OperatorExpression {
    Identity,
    Lower(ModeId),
    Raise(ModeId),
    /// `n̂ = a†a`, kept as its own node so that it evaluates to an exact diagonal.
    Number(ModeId),
    Scaled(C64, Box<OperatorExpression>),
    Sum(Vec<OperatorExpression>),
    /// Left-to-right operator product.
    Product(Vec<OperatorExpression>),
    Dagger(Box<OperatorExpression>),
}

use OperatorExpression as E;

pub fn lower(mode: ModeId) -> OperatorExpression {
    E::Lower(mode)
}

pub fn raise(mode: ModeId) -> OperatorExpression {
    E::Raise(mode)
}

pub fn number(mode: ModeId) -> OperatorExpression {
    E::Number(mode)
}

impl OperatorExpression {
    pub fn scale(self, z: C64) -> Self {
        E::Scaled(z, Box::new(self))
    }

    pub fn scale_re(self, x: f64) -> Self {
        self.scale(C64::new(x, 0.0))
    }

    pub fn dagger(self) -> Self {
        E::Dagger(Box::new(self))
    }

    /// `self + self†`, assembled so that the evaluated matrix is exactly Hermitian.
    pub fn plus_hc(self) -> Self {
        let hc = self.clone().dagger();
        E::Sum(vec![self, hc])
    }

    /// Every mode the expression refers to.
    pub fn modes(&self) -> BTreeSet<ModeId> {
        let mut out = BTreeSet::new();
        self.collect_modes(&mut out);
        out
    }

    fn collect_modes(&self, out: &mut BTreeSet<ModeId>) {
        match self {
            E::Identity => {}
            E::Lower(m) | E::Raise(m) | E::Number(m) => {
                out.insert(*m);
            }
            E::Scaled(_, e) | E::Dagger(e) => e.collect_modes(out),
            E::Sum(es) | E::Product(es) => es.iter().for_each(|e| e.collect_modes(out)),
        }
    }

    /// Swaps every mode with its partner and conjugates every scalar.
    ///
    /// Applied twice this is the identity, which is the bosonic rule `(Ã)~ = +A`.
    pub fn substitute_partners(&self) -> Self {
        match self {
            E::Identity => E::Identity,
            E::Lower(m) => E::Lower(m.partner()),
            E::Raise(m) => E::Raise(m.partner()),
            E::Number(m) => E::Number(m.partner()),
            E::Scaled(z, e) => E::Scaled(z.conj(), Box::new(e.substitute_partners())),
            E::Sum(es) => E::Sum(es.iter().map(Self::substitute_partners).collect()),
            E::Product(es) => E::Product(es.iter().map(Self::substitute_partners).collect()),
            E::Dagger(e) => E::Dagger(Box::new(e.substitute_partners())),
        }
    }

    /// Tilde conjugate of an expression built from hat-mode operators only.
    pub fn tilde_conjugate(&self) -> Result<Self> {
        if let Some(m) = self.modes().into_iter().find(|m| m.is_tilde()) {
            return Err(TfdError::ExpressionContainsTildeMode(m));
        }
        Ok(self.substitute_partners())
    }

    /// Evaluates the expression to a sparse matrix on `basis`.
    pub fn evaluate(&self, basis: &Arc<BasisDescriptor>) -> Result<SparseOperator> {
        Ok(match self {
            E::Identity => SparseOperator::identity(basis),
            E::Lower(m) => SparseOperator::annihilator(*m, basis),
            E::Raise(m) => SparseOperator::creator(*m, basis),
            E::Number(m) => SparseOperator::number_operator(*m, basis),
            E::Scaled(z, e) => e.evaluate(basis)?.scale(*z),
            E::Dagger(e) => e.evaluate(basis)?.dagger(),
            E::Sum(es) => {
                let mut acc = SparseOperator::zero(basis);
                for e in es {
                    acc = acc.add(&e.evaluate(basis)?)?;
                }
                acc
            }
            E::Product(es) => {
                let mut iter = es.iter();
                match iter.next() {
                    None => SparseOperator::identity(basis),
                    Some(first) => {
                        let mut acc = first.evaluate(basis)?;
                        for e in iter {
                            acc = acc.compose(&e.evaluate(basis)?)?;
                        }
                        acc
                    }
                }
            }
        })
    }
}

impl Add for OperatorExpression {
    type Output = OperatorExpression;
    fn add(self, rhs: Self) -> Self {
        match self {
            E::Sum(mut es) => {
                es.push(rhs);
                E::Sum(es)
            }
            lhs => E::Sum(vec![lhs, rhs]),
        }
    }
}

impl Sub for OperatorExpression {
    type Output = OperatorExpression;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl Neg for OperatorExpression {
    type Output = OperatorExpression;
    fn neg(self) -> Self {
        self.scale_re(-1.0)
    }
}

impl Mul for OperatorExpression {
    type Output = OperatorExpression;
    fn mul(self, rhs: Self) -> Self {
        match self {
            E::Product(mut es) => {
                es.push(rhs);
                E::Product(es)
            }
            lhs => E::Product(vec![lhs, rhs]),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ModeId::*;

    fn basis() -> Arc<BasisDescriptor> {
        Arc::new(BasisDescriptor::from_pair_cutoffs(2, 1, 1).unwrap())
    }

    #[test]
    fn tilde_of_down_conversion_term() {
        let kappa = C64::new(0.7, 0.2);
        let hat = (lower(A) * raise(B) * raise(C)).scale(kappa);
        let tilde = hat.tilde_conjugate().unwrap();
        let expected = (lower(ATilde) * raise(BTilde) * raise(CTilde)).scale(kappa.conj());
        assert_eq!(tilde, expected);
    }

    #[test]
    fn tilde_conjugates_scalars() {
        let e = raise(A).scale(C64::new(0.0, 1.0));
        assert_eq!(e.tilde_conjugate().unwrap(), raise(ATilde).scale(C64::new(0.0, -1.0)));
    }

    #[test]
    fn tilde_of_product_is_product_of_tildes() {
        let b = basis();
        let e = raise(A) * lower(A);
        let t = e.tilde_conjugate().unwrap();
        assert_eq!(t, raise(ATilde) * lower(ATilde));
        let lhs = t.evaluate(&b).unwrap();
        let rhs = raise(ATilde).evaluate(&b).unwrap().compose(&lower(ATilde).evaluate(&b).unwrap()).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn tilde_commutes_with_dagger() {
        let b = basis();
        let e = (lower(A) * raise(B)).scale(C64::new(1.0, 2.0));
        let left = e.clone().dagger().tilde_conjugate().unwrap().evaluate(&b).unwrap();
        let right = e.tilde_conjugate().unwrap().evaluate(&b).unwrap().dagger();
        assert_eq!(left, right);
    }

    #[test]
    fn tilde_rejects_tilde_modes() {
        let e = raise(A) * lower(CTilde);
        assert_eq!(e.tilde_conjugate().unwrap_err(), TfdError::ExpressionContainsTildeMode(CTilde));
    }

    #[test]
    fn double_substitution_is_identity() {
        let e = (number(A).scale_re(2.0) + (lower(A) * raise(B) * raise(C)).scale(C64::new(0.1, 0.3)).plus_hc())
            - E::Identity.scale(C64::new(0.0, 4.0));
        assert_eq!(e.substitute_partners().substitute_partners(), e);
    }

    #[test]
    fn plus_hc_is_exactly_hermitian() {
        let b = basis();
        let e = (lower(A) * raise(B) * raise(C)).scale_re(0.37).plus_hc();
        assert_eq!(e.evaluate(&b).unwrap().hermiticity_defect(), 0.0);
    }

    #[test]
    fn hat_and_tilde_operators_commute() {
        let b = basis();
        let hats = [lower(A), raise(A), lower(B) * raise(C), number(C)];
        for h in &hats {
            let x = h.evaluate(&b).unwrap();
            for t in &hats {
                let y = t.tilde_conjugate().unwrap().evaluate(&b).unwrap();
                assert_eq!(x.commutator(&y).unwrap().nnz(), 0);
            }
        }
    }
}
