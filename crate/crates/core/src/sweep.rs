//! Cells touched by a disk of radius r sliding along a segment.
//!
//! The traversal walks the dominant axis one column (or row) at a time, the
//! way Wu's line algorithm does. In each column it starts from the cell the
//! segment passes through at the column center and grows the run outwards
//! with a corner-distance test until a cell falls out of reach. The cells of
//! one column that a convex stadium touches are contiguous, so the growth
//! stops at the first miss and the work per column is bounded.

use crate::geometry::{dist_segment_cell, Point, Segment, AGENT_RADIUS, GEOM_EPS};
use crate::grid::CellIndex;

/// Whether the open disk of radius r hits the open interior of `cell` while
/// its center moves along `s`. Touching exactly at distance r does not count.
pub fn cell_is_swept(s: &Segment, cell: CellIndex) -> bool {
    dist_segment_cell(s, cell) < AGENT_RADIUS - GEOM_EPS
}

/// Every cell within r of the segment `a -> b`, ordered along the dominant
/// axis (ascending), then ascending along the minor axis.
pub fn swept_cells(a: Point, b: Point) -> Vec<CellIndex> {
    let s = Segment::new(a, b);
    let steep = (b.y - a.y).abs() > (b.x - a.x).abs();
    // Work in (major, minor) coordinates and map back on output.
    let to_cell = |major: i32, minor: i32| {
        if steep {
            CellIndex::new(minor, major)
        } else {
            CellIndex::new(major, minor)
        }
    };
    let (ma, na, mb, nb) = if steep {
        (a.y, a.x, b.y, b.x)
    } else {
        (a.x, a.y, b.x, b.y)
    };
    let (lo, hi) = (ma.min(mb), ma.max(mb));
    // Columns whose strip comes within r of the segment's major extent.
    let first = (lo - 2.0 * AGENT_RADIUS).floor() as i32 + 1;
    let last = (hi + 2.0 * AGENT_RADIUS).ceil() as i32 - 1;

    let minor_at = |major: f64| {
        if (mb - ma).abs() <= GEOM_EPS {
            na
        } else {
            let t = ((major - ma) / (mb - ma)).clamp(0.0, 1.0);
            na + (nb - na) * t
        }
    };

    let mut out = Vec::with_capacity(3 * (last - first + 1).max(1) as usize);
    let mut column = Vec::with_capacity(4);
    for major in first..=last {
        let pivot = minor_at(major as f64).round() as i32;
        if !cell_is_swept(&s, to_cell(major, pivot)) {
            continue;
        }
        column.clear();
        let mut down = pivot - 1;
        while cell_is_swept(&s, to_cell(major, down)) {
            down -= 1;
        }
        let mut up = pivot + 1;
        while cell_is_swept(&s, to_cell(major, up)) {
            up += 1;
        }
        column.extend((down + 1..up).map(|minor| to_cell(major, minor)));
        out.extend_from_slice(&column);
    }
    out
}
