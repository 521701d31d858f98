pub mod dnorm;
pub mod error;
pub mod measure;
pub mod numeric;
pub mod opuc;
pub mod perturb;
pub mod poly;
pub mod quadrature;
pub mod sobolev;
pub mod specialfn;
pub mod zeros;

pub use error::{Error, Result};
pub use measure::{Atom, Family, MeasureSpec, MomentTable, SingularPoint};
pub use num_complex::Complex64;
pub use opuc::{OpucBasis, VerblunskySeq};
pub use poly::Poly;
