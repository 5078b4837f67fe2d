pub mod counting;
pub mod duality;
pub mod flip_graph;
pub mod known;
pub mod polygon;
pub mod sampling;
pub mod spectral;
pub mod tanglegram;
