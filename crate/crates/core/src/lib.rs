pub mod exact;
pub mod padic;
pub mod tate;
pub mod charvar;
pub mod conic;
pub mod torsion;
pub mod loci;
pub mod cli;
