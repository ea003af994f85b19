//! Isomonodromic deformations for the degenerate fifth Painlevé equation.
//!
//! The crate covers the moduli space of rank-two connections with regular
//! singularities at `z = 0, 1` and a ramified irregular singularity at
//! infinity, its Lax pair, the resulting Painlevé flow, numerical monodromy
//! invariants and Bäcklund transformations. Each identity is exposed as a
//! residual that can be checked numerically.

pub mod algebra;
pub mod backlund;
pub mod error;
pub mod laxpair;
pub mod moduli;
pub mod monodromy;
pub mod ode;
pub mod painleve;

pub use algebra::{Mat2, PolyZ, RatMat2};
pub use backlund::BTKind;
pub use error::{Error, Result};
pub use laxpair::{ConnectionA, DeformationB, ModuliRate};
pub use moduli::{Chart1Point, Chart2Point, ChartPoint, GaugeTransform, Theta};
pub use monodromy::{Contour, ContourConfig, CubicPoint, MonodromyInvariants, RPlusPoint};
pub use num_complex::Complex64;
pub use ode::Tolerances;
pub use painleve::{Flow, Jet, PState, Sample, TPath, Trajectory};
