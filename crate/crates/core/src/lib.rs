pub mod error;
pub mod linalg;
pub mod poly;
pub mod quadrature;
pub mod tolerance;
pub mod sbp;
pub mod rk;
pub mod ode;
pub mod io;
pub mod catalogue;
