//! Run-time selection of statically specialized numeric kernels.
//!
//! [`dispatch`] resolves zero-based ids against type sequences and invokes
//! one monomorphized kernel member. [`select`] turns run-time facts into
//! those ids. [`mmio`], [`eig`] and [`cli`] build a dominant-eigenvalue
//! program on top whose value precision and index width are picked at run
//! time.

pub mod cli;
pub mod dispatch;
pub mod eig;
pub mod mmio;
pub mod select;
