//! Self-similar groups, their Röver–Nekrashevych groups, and germs at
//! rational points of Cantor space.
//!
//! * [`automata`]: automaton groups, restriction, the word problem and the nucleus.
//! * [`cantor`]: cones, rational points and cone partitions.
//! * [`rn`]: elements of the Röver–Nekrashevych group as decorated cone bijections.
//! * [`germs`]: germ signatures at rational points.
//! * [`witnesses`]: tuple transporters and the stabilizer constructions.
//! * [`sample`]: seeded random words, points and elements.
//! * [`suites`]: property suites behind `ssg verify`.
//! * [`cli`]: the `ssg` command line.

pub mod automata;
pub mod builtin;
pub mod cantor;
pub mod cli;
pub mod error;
pub mod germs;
pub mod rn;
pub mod sample;
pub mod suites;
pub mod witnesses;

pub use automata::{AutomatonGroup, Gen, GroupWord, NucleusResult};
pub use cantor::{Cone, ConePartition, RationalPoint};
pub use error::{Error, Result};
pub use germs::{GermSignature, PeriodicNucleusData};
pub use rn::{RnElement, Row};
