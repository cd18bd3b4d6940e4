use std::ops::Add;

use serde::Serialize;

use super::{Instruction, Party, Program};
use crate::scalar::Real;

/// Entanglement and communication consumed by a program.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ResourceCensus {
    pub ebits: usize,
    #[serde(rename = "a_to_b")]
    pub bits_alice_to_bob: usize,
    #[serde(rename = "b_to_a")]
    pub bits_bob_to_alice: usize,
}

impl Add for ResourceCensus {
    type Output = Self;

    fn add(self, rhs: Self) -> Self {
        Self {
            ebits: self.ebits + rhs.ebits,
            bits_alice_to_bob: self.bits_alice_to_bob + rhs.bits_alice_to_bob,
            bits_bob_to_alice: self.bits_bob_to_alice + rhs.bits_bob_to_alice,
        }
    }
}

pub fn resource_census<T: Real>(p: &Program<T>) -> ResourceCensus {
    p.instructions()
        .iter()
        .fold(ResourceCensus::default(), |mut acc, ins| {
            match ins {
                Instruction::MakeBellPair { .. } => acc.ebits += 1,
                Instruction::SendBit {
                    from: Party::Alice,
                    to: Party::Bob,
                    ..
                } => acc.bits_alice_to_bob += 1,
                Instruction::SendBit {
                    from: Party::Bob,
                    to: Party::Alice,
                    ..
                } => acc.bits_bob_to_alice += 1,
                _ => {}
            }
            acc
        })
}
