pub mod graph;
pub mod igusa;
pub mod linalg;
pub mod motive;
pub mod quadric;
pub mod rational;
pub mod renorm;
pub mod transversality;
