//! Text occupancy maps.
//!
//! ```text
//! 5 3
//! #####
//! #R..#
//! #####
//! ```
//!
//! The first line gives `width height`; `#` is occupied, `.` free and `R`
//! the free cell the robot starts in.

use std::fmt;

/// A grid cell as `(row, col)`.
pub type CellIndex = (usize, usize);

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Map {
    pub width: usize,
    pub height: usize,
    occupied: Vec<bool>,
    pub start: CellIndex,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MapError {
    pub line: usize,
    pub message: String,
}

impl fmt::Display for MapError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

impl std::error::Error for MapError {}

/// Maps shipped with the simulator, by name.
pub const BUNDLED: [(&str, &str); 3] = [
    ("room", include_str!("../maps/room.map")),
    ("office", include_str!("../maps/office.map")),
    ("warehouse", include_str!("../maps/warehouse.map")),
];

impl Map {
    pub fn parse(text: &str) -> Result<Map, MapError> {
        let mut lines = text.lines().enumerate();
        let err = |line: usize, message: String| MapError { line, message };
        let (_, header) = lines.next().ok_or_else(|| err(1, "empty map".into()))?;
        let dims: Vec<usize> = header
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| err(1, format!("bad dimension `{t}`"))))
            .collect::<Result<_, _>>()?;
        let [width, height] = dims[..] else {
            return Err(err(1, "expected `width height`".into()));
        };
        if width == 0 || height == 0 {
            return Err(err(1, "map must not be empty".into()));
        }
        let mut occupied = Vec::with_capacity(width * height);
        let mut start = None;
        let mut rows = 0;
        for (i, line) in lines {
            if rows == height {
                if line.trim().is_empty() {
                    continue;
                }
                return Err(err(i + 1, format!("more than {height} rows")));
            }
            let line = line.trim_end_matches('\r');
            if line.chars().count() != width {
                return Err(err(i + 1, format!("expected {width} cells, found {}", line.chars().count())));
            }
            for (col, ch) in line.chars().enumerate() {
                match ch {
                    '#' => occupied.push(true),
                    '.' => occupied.push(false),
                    'R' => {
                        if start.replace((rows, col)).is_some() {
                            return Err(err(i + 1, "more than one `R`".into()));
                        }
                        occupied.push(false);
                    }
                    other => return Err(err(i + 1, format!("unexpected `{other}`"))),
                }
            }
            rows += 1;
        }
        if rows != height {
            return Err(err(rows + 2, format!("expected {height} rows, found {rows}")));
        }
        let start = start.ok_or_else(|| err(1, "no `R` start cell".into()))?;
        Ok(Map {
            width,
            height,
            occupied,
            start,
        })
    }

    pub fn bundled(name: &str) -> Option<Map> {
        BUNDLED
            .iter()
            .find(|(n, _)| *n == name)
            .map(|(_, text)| Map::parse(text).expect("bundled maps are valid"))
    }

    /// Builds a map from an occupancy predicate.
    pub fn from_fn(width: usize, height: usize, start: CellIndex, occupied: impl Fn(CellIndex) -> bool) -> Map {
        let mut cells = Vec::with_capacity(width * height);
        for r in 0..height {
            for c in 0..width {
                cells.push((r, c) != start && occupied((r, c)));
            }
        }
        Map {
            width,
            height,
            occupied: cells,
            start,
        }
    }

    pub fn len(&self) -> usize {
        self.occupied.len()
    }

    pub fn is_empty(&self) -> bool {
        self.occupied.is_empty()
    }

    pub fn index(&self, (r, c): CellIndex) -> usize {
        r * self.width + c
    }

    pub fn contains(&self, r: i64, c: i64) -> bool {
        r >= 0 && c >= 0 && (r as usize) < self.height && (c as usize) < self.width
    }

    pub fn is_occupied(&self, cell: CellIndex) -> bool {
        self.occupied[self.index(cell)]
    }

    /// In-bounds 4-neighbors in the order north, west, east, south.
    pub fn neighbors(&self, (r, c): CellIndex) -> impl Iterator<Item = CellIndex> + '_ {
        const STEPS: [(i64, i64); 4] = [(-1, 0), (0, -1), (0, 1), (1, 0)];
        STEPS.iter().filter_map(move |(dr, dc)| {
            let (nr, nc) = (r as i64 + dr, c as i64 + dc);
            self.contains(nr, nc).then_some((nr as usize, nc as usize))
        })
    }
}

impl fmt::Display for Map {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} {}", self.width, self.height)?;
        for r in 0..self.height {
            for c in 0..self.width {
                let ch = if (r, c) == self.start {
                    'R'
                } else if self.is_occupied((r, c)) {
                    '#'
                } else {
                    '.'
                };
                write!(f, "{ch}")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}
