//! Exact-arithmetic engine for graded Frobenius algebras of hyperkähler type
//! and their Looijenga–Lunts–Verbitsky Lie algebras.

pub mod builders;
pub mod decomposition;
pub mod endomorphism;
pub mod error;
pub mod finiteness;
pub mod forms;
pub mod hodge;
pub mod io;
pub mod lie;
pub mod linalg;
pub mod llv;
pub mod pipeline;
pub mod rational;
pub mod rep;
pub mod ring;
pub mod sl2;
pub mod subspace;

pub use endomorphism::GradedEndomorphism;
pub use error::{Error, Result};
pub use forms::QuadraticFormSpec;
pub use linalg::{Echelon, Matrix, SparseVec};
pub use rational::Q;
pub use ring::{AlgebraElement, GradedAlgebra};
