use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// An assignment of a state in `0..k` to every vertex.
///
/// Binary formulations always use the 0/1 coding here; physics-Ising maps
/// state 0 to spin -1 and state 1 to spin +1 when potentials are evaluated.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Configuration {
    states: Vec<u8>,
    k: usize,
}

impl Configuration {
    pub fn new(states: Vec<u8>, k: usize) -> Result<Self> {
        if !(2..=255).contains(&k) {
            return Err(Error::invalid(format!("number of states must be in 2..=255, got {k}")));
        }
        if let Some((i, s)) = states.iter().enumerate().find(|(_, &s)| s as usize >= k) {
            return Err(Error::invalid(format!("state {s} at vertex {i} is not below k = {k}")));
        }
        Ok(Configuration { states, k })
    }

    /// Every vertex in `state`.
    pub fn constant(n: usize, k: usize, state: u8) -> Result<Self> {
        Self::new(alloc::vec![state; n], k)
    }

    /// Decodes a mixed-radix index (vertex 0 is the least significant digit).
    pub fn from_code(mut code: u64, n: usize, k: usize) -> Result<Self> {
        let mut states = Vec::with_capacity(n);
        for _ in 0..n {
            states.push((code % k as u64) as u8);
            code /= k as u64;
        }
        if code != 0 {
            return Err(Error::invalid("configuration code exceeds k^n"));
        }
        Self::new(states, k)
    }

    /// Mixed-radix index inverse to [`Configuration::from_code`].
    pub fn code(&self) -> u64 {
        self.states
            .iter()
            .rev()
            .fold(0u64, |acc, &s| acc * self.k as u64 + s as u64)
    }

    pub fn states(&self) -> &[u8] {
        &self.states
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn get(&self, i: usize) -> u8 {
        self.states[i]
    }

    pub fn set(&mut self, i: usize, state: u8) -> Result<()> {
        if i >= self.states.len() || state as usize >= self.k {
            return Err(Error::invalid(format!(
                "cannot set vertex {i} to state {state} (n = {}, k = {})",
                self.states.len(),
                self.k
            )));
        }
        self.states[i] = state;
        Ok(())
    }

    pub(crate) fn states_mut(&mut self) -> &mut [u8] {
        &mut self.states
    }

    /// The complementary binary configuration `1 - y`.
    pub fn complement(&self) -> Result<Self> {
        if self.k != 2 {
            return Err(Error::unsupported(
                "complement is only defined for binary configurations",
            ));
        }
        Ok(Configuration {
            states: self.states.iter().map(|&s| 1 - s).collect(),
            k: 2,
        })
    }

    pub fn count_of(&self, state: u8) -> usize {
        self.states.iter().filter(|&&s| s == state).count()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_out_of_range_states() {
        assert!(Configuration::new(alloc::vec![0, 1, 2], 2).is_err());
        assert!(Configuration::new(alloc::vec![0, 1], 1).is_err());
        let mut y = Configuration::constant(3, 2, 0).unwrap();
        assert!(y.set(3, 1).is_err());
        assert!(y.set(0, 2).is_err());
        y.set(2, 1).unwrap();
        assert_eq!(y.states(), &[0, 0, 1]);
    }

    #[test]
    fn code_round_trips() {
        for code in 0..81u64 {
            let y = Configuration::from_code(code, 4, 3).unwrap();
            assert_eq!(y.code(), code);
        }
        assert!(Configuration::from_code(81, 4, 3).is_err());
    }

    #[test]
    fn complement_flips_binary() {
        let y = Configuration::new(alloc::vec![0, 1, 1], 2).unwrap();
        assert_eq!(y.complement().unwrap().states(), &[1, 0, 0]);
        assert!(Configuration::constant(2, 3, 0).unwrap().complement().is_err());
    }
}
