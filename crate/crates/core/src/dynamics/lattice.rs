use std::collections::{HashSet, VecDeque};

use num_rational::BigRational;

use crate::domain::{Domain, DomainError, Quote, TraderType};

/// States reachable through unclipped steps, in breadth-first order.
#[derive(Debug, Clone, PartialEq)]
pub struct Lattice {
    pub states: Vec<Quote<BigRational>>,
    /// The search stopped at the state limit before closing.
    pub truncated: bool,
}

impl Lattice {
    pub fn contains(&self, q: &Quote<BigRational>) -> bool {
        self.states.contains(q)
    }
}

/// Breadth-first closure of `start` under the four atomic maps, keeping
/// only images inside `W`. Stops with `truncated` set once `max_states`
/// states are known.
pub fn reachable_lattice(
    start: &Quote<BigRational>,
    domain: &Domain<BigRational>,
    max_states: usize,
) -> Result<Lattice, DomainError> {
    domain.check(start)?;
    let mut seen: HashSet<Quote<BigRational>> = HashSet::from([start.clone()]);
    let mut states = vec![start.clone()];
    let mut queue = VecDeque::from([start.clone()]);
    while let Some(q) = queue.pop_front() {
        for ty in TraderType::ALL {
            let image = domain.matrix(ty).apply(&q);
            if !domain.contains(&image) || seen.contains(&image) {
                continue;
            }
            if states.len() >= max_states {
                return Ok(Lattice { states, truncated: true });
            }
            seen.insert(image.clone());
            states.push(image.clone());
            queue.push_back(image);
        }
    }
    Ok(Lattice { states, truncated: false })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ratio;

    fn q(b: (i64, i64), a: (i64, i64)) -> Quote<BigRational> {
        Quote::new(ratio(b.0, b.1), ratio(a.0, a.1))
    }

    #[test]
    fn first_ring_around_reference_quote() {
        let d = Domain::new(ratio(1, 2), ratio(1, 1), ratio(100, 1)).unwrap();
        let start = q((10, 1), (12, 1));
        let lattice = reachable_lattice(&start, &d, 5).unwrap();
        assert!(lattice.truncated);
        let ring: HashSet<_> = lattice.states[1..].iter().cloned().collect();
        let expected: HashSet<_> =
            [q((32, 3), (12, 1)), q((10, 1), (13, 1)), q((10, 1), (34, 3)), q((9, 1), (12, 1))].into();
        assert_eq!(ring, expected);
    }

    #[test]
    fn small_domain_closes() {
        let d = Domain::new(ratio(1, 2), ratio(1, 1), ratio(4, 1)).unwrap();
        let lattice = reachable_lattice(&q((1, 1), (5, 2)), &d, 100_000).unwrap();
        assert!(!lattice.truncated);
        assert!(lattice.states.iter().all(|s| d.contains(s)));
        assert!(lattice.contains(&q((1, 1), (5, 2))));
    }

    #[test]
    fn boundary_start_keeps_inward_images() {
        // spread exactly s_lower: the limit types would leave W
        let d = Domain::new(ratio(1, 2), ratio(1, 1), ratio(4, 1)).unwrap();
        let lattice = reachable_lattice(&q((1, 1), (2, 1)), &d, 3).unwrap();
        let ring: HashSet<_> = lattice.states[1..].iter().cloned().collect();
        assert_eq!(ring, [q((1, 1), (5, 2)), q((1, 2), (2, 1))].into());
    }
}
