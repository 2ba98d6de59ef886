//! Linear tetrahedral finite elements: assembled operators on vertices and their
//! per-corner (discontinuous) lifts with face jumps.

pub mod assemble;
pub mod discrete;
pub mod element;

pub use assemble::{assemble_mass, assemble_stiffness, lift_field};
pub use discrete::{discontinuity_energy, lift_discontinuous, CornerField, DiscreteOperators};
pub use element::{element_mass, element_stiffness, Block12, Material};
