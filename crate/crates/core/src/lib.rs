pub mod cli;
pub mod diffusion;
pub mod error;
pub mod gf2;
pub mod groups;
pub mod instance;
pub mod sbox;
pub mod toys;
pub mod trails;
pub mod wave;

pub use error::{Error, Result};
