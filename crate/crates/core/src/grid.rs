use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::geometry::Point;
use crate::sweep::swept_cells;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct CellIndex {
    pub col: i32,
    pub row: i32,
}

impl CellIndex {
    pub const fn new(col: i32, row: i32) -> Self {
        Self { col, row }
    }

    pub fn center(self) -> Point {
        Point::new(self.col as f64, self.row as f64)
    }

    pub fn offset(self, dc: i32, dr: i32) -> Self {
        Self::new(self.col + dc, self.row + dr)
    }
}

impl fmt::Display for CellIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.col, self.row)
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MapError {
    #[error("line {line}: malformed header, expected `{expected}`")]
    Header { line: usize, expected: &'static str },
    #[error("line {line}: map is {found} rows/columns where the header declares {declared}")]
    Dimension {
        line: usize,
        declared: usize,
        found: usize,
    },
    #[error("line {line}, column {column}: unknown map character {ch:?}")]
    UnknownChar {
        line: usize,
        column: usize,
        ch: char,
    },
    #[error("map must be at least 1x1")]
    Empty,
}

/// Static occupancy of a rectangular grid. Immutable once built.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridMap {
    width: usize,
    height: usize,
    blocked: Vec<bool>,
}

impl GridMap {
    pub fn empty(width: usize, height: usize) -> Self {
        assert!(width >= 1 && height >= 1, "grid must be at least 1x1");
        Self {
            width,
            height,
            blocked: vec![false; width * height],
        }
    }

    /// Builds a grid from rows of map characters, row 0 first.
    pub fn from_rows<S: AsRef<str>>(rows: &[S]) -> Result<Self, MapError> {
        let height = rows.len();
        let width = rows.first().map_or(0, |r| r.as_ref().chars().count());
        if width == 0 || height == 0 {
            return Err(MapError::Empty);
        }
        let mut grid = Self::empty(width, height);
        for (row, text) in rows.iter().enumerate() {
            grid.fill_row(row, text.as_ref(), row + 1)?;
        }
        Ok(grid)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn in_bounds(&self, c: CellIndex) -> bool {
        c.col >= 0 && c.row >= 0 && (c.col as usize) < self.width && (c.row as usize) < self.height
    }

    /// Dense index of an in-bounds cell.
    pub fn index(&self, c: CellIndex) -> Option<usize> {
        self.in_bounds(c)
            .then(|| c.row as usize * self.width + c.col as usize)
    }

    pub fn cell_at(&self, index: usize) -> CellIndex {
        CellIndex::new((index % self.width) as i32, (index / self.width) as i32)
    }

    pub fn set_blocked(&mut self, c: CellIndex, blocked: bool) {
        let i = self.index(c).expect("cell out of bounds");
        self.blocked[i] = blocked;
    }

    /// Out-of-bounds cells count as blocked.
    pub fn is_traversable(&self, c: CellIndex) -> bool {
        self.index(c).is_some_and(|i| !self.blocked[i])
    }

    /// Whether a disk of radius r can slide from one cell center to the
    /// other without touching a blocked cell.
    pub fn move_is_feasible(&self, from: CellIndex, to: CellIndex) -> bool {
        if !self.is_traversable(from) || !self.is_traversable(to) {
            return false;
        }
        swept_cells(from.center(), to.center())
            .into_iter()
            .all(|c| self.is_traversable(c))
    }

    pub fn free_cells(&self) -> impl Iterator<Item = CellIndex> + '_ {
        (0..self.blocked.len())
            .filter(|&i| !self.blocked[i])
            .map(|i| self.cell_at(i))
    }

    pub fn free_count(&self) -> usize {
        self.blocked.iter().filter(|b| !**b).count()
    }

    fn fill_row(&mut self, row: usize, text: &str, line: usize) -> Result<(), MapError> {
        let found = text.chars().count();
        if found != self.width {
            return Err(MapError::Dimension {
                line,
                declared: self.width,
                found,
            });
        }
        for (col, ch) in text.chars().enumerate() {
            let blocked = match ch {
                '.' | 'G' => false,
                '@' | 'O' | 'T' | 'S' | 'W' => true,
                _ => {
                    return Err(MapError::UnknownChar {
                        line,
                        column: col + 1,
                        ch,
                    })
                }
            };
            self.blocked[row * self.width + col] = blocked;
        }
        Ok(())
    }
}

fn header_value(
    line: Option<(usize, &str)>,
    key: &'static str,
    expected: &'static str,
) -> Result<usize, MapError> {
    let (n, text) = line.ok_or(MapError::Header { line: 0, expected })?;
    let mut parts = text.split_whitespace();
    match (
        parts.next(),
        parts.next().and_then(|v| v.parse().ok()),
        parts.next(),
    ) {
        (Some(k), Some(v), None) if k == key => Ok(v),
        _ => Err(MapError::Header { line: n, expected }),
    }
}

/// Parses the octile grid-map format.
pub fn parse_map(text: &str) -> Result<GridMap, MapError> {
    let mut lines = text
        .lines()
        .map(|l| l.trim_end_matches('\r'))
        .enumerate()
        .map(|(i, l)| (i + 1, l));

    match lines.next() {
        Some((_, l)) if l.split_whitespace().eq(["type", "octile"]) => {}
        other => {
            return Err(MapError::Header {
                line: other.map_or(1, |(n, _)| n),
                expected: "type octile",
            })
        }
    }
    let height = header_value(lines.next(), "height", "height H")?;
    let width = header_value(lines.next(), "width", "width W")?;
    match lines.next() {
        Some((_, l)) if l.trim() == "map" => {}
        other => {
            return Err(MapError::Header {
                line: other.map_or(4, |(n, _)| n),
                expected: "map",
            })
        }
    }
    if width == 0 || height == 0 {
        return Err(MapError::Empty);
    }

    let mut grid = GridMap::empty(width, height);
    let mut rows = 0;
    let mut last_line = 4;
    for (n, l) in lines {
        last_line = n;
        if rows == height {
            if l.trim().is_empty() {
                continue;
            }
            return Err(MapError::Dimension {
                line: n,
                declared: height,
                found: rows + 1,
            });
        }
        grid.fill_row(rows, l, n)?;
        rows += 1;
    }
    if rows != height {
        return Err(MapError::Dimension {
            line: last_line,
            declared: height,
            found: rows,
        });
    }
    Ok(grid)
}

impl FromStr for GridMap {
    type Err = MapError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_map(s)
    }
}

impl fmt::Display for GridMap {
    /// Writes the map back in the octile format.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "type octile\nheight {}\nwidth {}\nmap",
            self.height, self.width
        )?;
        for row in 0..self.height {
            let line: String = (0..self.width)
                .map(|col| {
                    if self.blocked[row * self.width + col] {
                        '@'
                    } else {
                        '.'
                    }
                })
                .collect();
            writeln!(f, "{line}")?;
        }
        Ok(())
    }
}
