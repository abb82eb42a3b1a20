//! Figures and tables: SVG rendering, labeled CSV grids and grid comparison.

mod compare;
mod grid;
mod svg;

pub use self::compare::{compare_grids, grid_gaps, CellDiff, ComparisonReport};
pub use self::grid::LabeledGrid;
pub use self::svg::{
    diverging_color, render_curves, render_heatmap, CurveChart, YRange, COLD_COLOR, MID_COLOR,
    WARM_COLOR,
};
