//! Certified element orders.
//!
//! An order is reported as finite only with proof on both sides: a relation
//! `w^k = 1` (a closed cycle in a coset table over the trivial subgroup, or a
//! completed enumeration), and finite quotients whose image orders have
//! least common multiple `k`. Infinite order is certified by the image in
//! the abelianization. Everything else is `Unknown`.

use std::cell::RefCell;

use num_integer::Integer;
use num_traits::ToPrimitive;

use super::coset::{encode, todd_coxeter, CosetTable, EnumerationError};
use super::quotients::search_quotients;
use super::snf::AbelianMap;
use crate::presentation::{simplify_with, Elimination, GroupPresentation, PresentationError, Simplified, Word};

/// Largest degree tried when looking for permutation quotients.
pub const QUOTIENT_MAX_DEGREE: usize = 8;

/// Cheap first pass before spending the full coset budget.
const FIRST_STAGE_COSETS: usize = 2_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FiniteCertificate {
    /// The word is the identity after Tietze eliminations.
    Eliminated,
    /// Enumeration over the trivial subgroup closed; the group is finite.
    Enumeration { group_order: usize },
    /// `w^order = 1` was traced in a partial coset table and finite quotients
    /// realise the full order.
    Bounds {
        abelian_image: u64,
        permutation_degrees: Vec<usize>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OrderVerdict {
    Finite { order: u64, certificate: FiniteCertificate },
    /// The image in `H1` has infinite order.
    Infinite,
    /// No certificate within the budget.
    Unknown { budget: usize },
}

impl OrderVerdict {
    pub fn finite_order(&self) -> Option<u64> {
        match self {
            OrderVerdict::Finite { order, .. } => Some(*order),
            _ => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, OrderVerdict::Finite { .. })
    }

    pub fn is_unknown(&self) -> bool {
        matches!(self, OrderVerdict::Unknown { .. })
    }

    pub fn token(&self) -> String {
        match self {
            OrderVerdict::Finite { order, .. } => format!("Finite({order})"),
            OrderVerdict::Infinite => "Infinite".into(),
            OrderVerdict::Unknown { .. } => "Unknown".into(),
        }
    }
}

/// Caches the work shared by every element of one presentation.
pub struct OrderOracle {
    original: GroupPresentation,
    simplified: Simplified,
    abelian: AbelianMap,
    budget: usize,
    tables: RefCell<Vec<CosetTable>>,
}

impl OrderOracle {
    pub fn new(pres: &GroupPresentation, budget: usize) -> Self {
        let simplified = simplify_with(pres, pres.generators().len(), Elimination::Aggressive);
        let abelian = AbelianMap::new(&simplified.presentation);
        OrderOracle {
            original: pres.clone(),
            simplified,
            abelian,
            budget: budget.max(1),
            tables: RefCell::new(Vec::new()),
        }
    }

    fn reduced(&self) -> &GroupPresentation {
        &self.simplified.presentation
    }

    /// Coset tables over the trivial subgroup at increasing budgets; stops
    /// at the first complete one.
    fn table(&self, stage: usize) -> Option<CosetTable> {
        let stages = self.stage_budgets();
        if stage >= stages.len() {
            return None;
        }
        let mut tables = self.tables.borrow_mut();
        while tables.len() <= stage {
            if tables.last().is_some_and(|t| t.is_complete()) {
                return None;
            }
            let t = match todd_coxeter(self.reduced(), &[], stages[tables.len()]) {
                Ok(t) => t,
                Err(EnumerationError::Exhausted { partial, .. }) => *partial,
                Err(e) => unreachable!("{e}"),
            };
            tables.push(t);
        }
        Some(tables[stage].clone())
    }

    fn stage_budgets(&self) -> Vec<usize> {
        if self.budget > FIRST_STAGE_COSETS {
            vec![FIRST_STAGE_COSETS, self.budget]
        } else {
            vec![self.budget]
        }
    }

    pub fn order(&self, w: &Word) -> Result<OrderVerdict, PresentationError> {
        self.original.check_word(w)?;
        let r = self.simplified.rewrite(w).cyclically_reduced();
        if r.is_identity() {
            return Ok(OrderVerdict::Finite {
                order: 1,
                certificate: FiniteCertificate::Eliminated,
            });
        }
        let Some(abelian) = self.abelian.image_order(self.reduced(), &r) else {
            return Ok(OrderVerdict::Infinite);
        };
        let unknown = OrderVerdict::Unknown { budget: self.budget };
        let Some(abelian) = abelian.to_u64() else {
            return Ok(unknown);
        };
        let letters = encode(self.reduced(), &r)?;

        let mut upper = None;
        let mut stage = 0;
        while let Some(table) = self.table(stage) {
            if let Some(order) = table.permutation_order(&letters) {
                return Ok(OrderVerdict::Finite {
                    order,
                    certificate: FiniteCertificate::Enumeration {
                        group_order: table.cosets(),
                    },
                });
            }
            let orbits = table.closed_orbits(&letters, table.cosets());
            if let Some(k) = orbits.into_iter().reduce(|a, b| a.gcd(&b)) {
                upper = Some(k);
                break;
            }
            stage += 1;
        }
        let Some(upper) = upper else {
            return Ok(unknown);
        };

        let mut lower = abelian;
        let mut degrees = Vec::new();
        if lower != upper {
            let relators: Vec<Vec<usize>> = self
                .reduced()
                .relators()
                .iter()
                .map(|rel| encode(self.reduced(), rel))
                .collect::<Result<_, _>>()?;
            search_quotients(
                &relators,
                self.reduced().generators().len(),
                QUOTIENT_MAX_DEGREE,
                self.budget,
                &mut |q| {
                    let o = q.order_of(&letters);
                    let next = lower.lcm(&o);
                    if next != lower {
                        lower = next;
                        degrees.push(q.degree());
                    }
                    lower == upper
                },
            );
        }
        debug_assert!(upper % lower == 0);
        if lower == upper {
            Ok(OrderVerdict::Finite {
                order: upper,
                certificate: FiniteCertificate::Bounds {
                    abelian_image: abelian,
                    permutation_degrees: degrees,
                },
            })
        } else {
            Ok(unknown)
        }
    }
}

/// Certified order of `w` in the presented group.
pub fn element_order(pres: &GroupPresentation, w: &Word, budget: usize) -> Result<OrderVerdict, PresentationError> {
    OrderOracle::new(pres, budget).order(w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presentation::{fgroup_presentation, FSignature, Generator, Role};

    fn cyclic(n: i64) -> GroupPresentation {
        GroupPresentation::new(vec![Generator::new("b", Role::Black)], vec![Word::power("b", n)]).unwrap()
    }

    #[test]
    fn cyclic_orders() {
        let p = cyclic(5);
        assert_eq!(element_order(&p, &Word::generator("b"), 1000).unwrap().finite_order(), Some(5));
        assert_eq!(element_order(&p, &Word::power("b", 2), 1000).unwrap().finite_order(), Some(5));
        assert_eq!(element_order(&p, &Word::power("b", 5), 1000).unwrap().finite_order(), Some(1));
    }

    #[test]
    fn infinite_by_abelianization() {
        let p = GroupPresentation::new(
            vec![Generator::new("a", Role::Black), Generator::new("b", Role::Black)],
            vec![Word::commutator("a", "b")],
        )
        .unwrap();
        assert_eq!(element_order(&p, &Word::generator("b"), 100).unwrap(), OrderVerdict::Infinite);
    }

    #[test]
    fn klein_bottle_abstains() {
        let p = GroupPresentation::new(
            vec![Generator::new("a", Role::Black), Generator::new("b", Role::Black)],
            vec![Word::new([("a", -1), ("b", 1), ("a", 1), ("b", 1)])],
        )
        .unwrap();
        assert!(element_order(&p, &Word::generator("b"), 2).unwrap().is_unknown());
        assert!(element_order(&p, &Word::generator("b"), 5_000).unwrap().is_unknown());
    }

    #[test]
    fn torsion_in_infinite_fgroups() {
        // Euclidean P2(2,2): infinite, but c.1 has order 2.
        let p = fgroup_presentation(&FSignature::from_genus(-1, vec![2, 2]).unwrap());
        let v = element_order(&p, &Word::generator("c.1"), 10_000).unwrap();
        assert_eq!(v.finite_order(), Some(2));
        assert!(matches!(
            v,
            OrderVerdict::Finite {
                certificate: FiniteCertificate::Bounds { .. },
                ..
            }
        ));
        // Perfect Hurwitz triangle group needs a permutation quotient.
        let p = fgroup_presentation(&FSignature::from_genus(0, vec![2, 3, 7]).unwrap());
        for (c, m) in [("c.1", 2), ("c.2", 3), ("c.3", 7)] {
            let v = element_order(&p, &Word::generator(c), 100_000).unwrap();
            assert_eq!(v.finite_order(), Some(m), "{c}");
        }
    }

    #[test]
    fn finite_fgroup_generators() {
        let p = fgroup_presentation(&FSignature::from_genus(0, vec![2, 3, 5]).unwrap());
        let v = element_order(&p, &Word::generator("c.1"), 10_000).unwrap();
        assert_eq!(v.finite_order(), Some(2));
        assert!(matches!(
            v,
            OrderVerdict::Finite {
                certificate: FiniteCertificate::Enumeration { group_order: 60 },
                ..
            }
        ));
    }

    #[test]
    fn malformed_word() {
        assert!(element_order(&cyclic(3), &Word::generator("zz"), 10).is_err());
    }
}
