//! Data model: validated datasets, rank transforms, dyadic median-split trees
//! over `X` and `Y`, scanning windows, and stratified `2 × 2 × T` tables.

mod dataset;
mod table;
mod tree;

pub(crate) use dataset::ranks0;
pub use dataset::{ingest_csv, rank_transform, Arity, ColumnSpec, Dataset};
pub(crate) use table::tabulate_unchecked;
pub use table::{tabulate_window, WindowTable};
pub use tree::{build_dyadic_tree, DyadicTree, TreeNode, Window, WindowGrid};
