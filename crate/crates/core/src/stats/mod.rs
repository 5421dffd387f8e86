//! Rank-based significance testing and principal component analysis.

pub mod gamma;
mod kruskal;
pub mod pca;

pub use kruskal::{kruskal_wallis, KruskalWallisResult};
pub use pca::{emit_biplot_data, pca, BiplotTable, PcaMode, PcaResult};
