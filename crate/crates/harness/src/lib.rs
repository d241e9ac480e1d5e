//! Testing infrastructure for the two calculi: random and exhaustive program
//! generation, noninterference checking and differential evaluation.

pub mod corpus;
pub mod declarative;
pub mod enumerate;
pub mod equiv;
pub mod gen;
pub mod ni;
