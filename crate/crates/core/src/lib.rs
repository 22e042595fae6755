//! Constraint analysis for singular Lagrangian and contact (Herglotz)
//! systems: exact symbolic algebra, exterior calculus on coordinate
//! patches, Dirac and Dirac–Jacobi brackets, constraint stabilization and
//! equations of motion.

pub mod symexpr;
pub mod exterior;
pub mod mechanics;
pub mod constraint;
pub mod dynamics;
