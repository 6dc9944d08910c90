pub mod barrier;
pub mod bits;
pub mod clifford;
pub mod complex;
pub mod decoder;
pub mod dynamics;
pub mod error;
pub mod gf2;
pub mod gauging;
pub mod gcc;
pub mod group;
pub mod model;
pub mod pauli;
pub mod peierls;
pub mod rbh;
pub mod symmetry;

pub use bits::Bits;
pub use error::{Error, Result};
pub use group::PauliGroup;
pub use model::CodeModel;
pub use pauli::{Pauli, PauliOperator};
