//! Exact workbench for quantized coordinate rings of classical matrix groups.

pub mod exactalg;
pub mod rmat;
pub mod freenc;
pub mod qfun;
pub mod twistmod;
pub mod poisson;
pub mod centermod;
pub mod report;
