//! Frontier cells and grid search over the robot's knowledge.

use std::collections::VecDeque;

use crate::exec::Execution;
use crate::map::{CellIndex, Map};

/// Known and free.
pub fn is_open(map: &Map, known: &[bool], cell: CellIndex) -> bool {
    known[map.index(cell)] && !map.is_occupied(cell)
}

fn is_frontier(map: &Map, known: &[bool], cell: CellIndex) -> bool {
    is_open(map, known, cell) && map.neighbors(cell).any(|n| !known[map.index(n)])
}

/// Known free cells with at least one unknown 4-neighbor, in row-major
/// order.
pub fn frontier_cells(map: &Map, known: &[bool], exec: Execution) -> Vec<CellIndex> {
    let rows: Vec<usize> = (0..map.height).collect();
    exec.map(&rows, |&r| {
        (0..map.width)
            .map(|c| (r, c))
            .filter(|&cell| is_frontier(map, known, cell))
            .collect::<Vec<_>>()
    })
    .into_iter()
    .flatten()
    .collect()
}

/// 4-connected components of `cells`, each in row-major order, ordered by
/// their first cell.
pub fn clusters(map: &Map, cells: &[CellIndex]) -> Vec<Vec<CellIndex>> {
    let mut member = vec![false; map.len()];
    for &c in cells {
        member[map.index(c)] = true;
    }
    let mut seen = vec![false; map.len()];
    let mut out = Vec::new();
    for &start in cells {
        if seen[map.index(start)] {
            continue;
        }
        seen[map.index(start)] = true;
        let mut group = vec![start];
        let mut queue = VecDeque::from([start]);
        while let Some(c) = queue.pop_front() {
            for n in map.neighbors(c) {
                let i = map.index(n);
                if member[i] && !seen[i] {
                    seen[i] = true;
                    group.push(n);
                    queue.push_back(n);
                }
            }
        }
        group.sort_unstable();
        out.push(group);
    }
    out
}

/// Breadth-first distances over cells accepted by `passable`.
pub struct Search {
    width: usize,
    dist: Vec<u32>,
    parent: Vec<usize>,
}

pub const UNREACHED: u32 = u32::MAX;

impl Search {
    pub fn run(map: &Map, from: CellIndex, passable: impl Fn(CellIndex) -> bool) -> Search {
        let mut dist = vec![UNREACHED; map.len()];
        let mut parent = vec![usize::MAX; map.len()];
        let start = map.index(from);
        dist[start] = 0;
        let mut queue = VecDeque::from([from]);
        while let Some(c) = queue.pop_front() {
            let d = dist[map.index(c)];
            for n in map.neighbors(c) {
                let i = map.index(n);
                if dist[i] == UNREACHED && passable(n) {
                    dist[i] = d + 1;
                    parent[i] = map.index(c);
                    queue.push_back(n);
                }
            }
        }
        Search {
            width: map.width,
            dist,
            parent,
        }
    }

    pub fn distance(&self, (r, c): CellIndex) -> u32 {
        self.dist[r * self.width + c]
    }

    /// Cells after the start up to and including `to`; `None` if `to` was
    /// not reached.
    pub fn path(&self, to: CellIndex) -> Option<Vec<CellIndex>> {
        let mut i = to.0 * self.width + to.1;
        if self.dist[i] == UNREACHED {
            return None;
        }
        let mut path = Vec::with_capacity(self.dist[i] as usize);
        while self.dist[i] != 0 {
            path.push((i / self.width, i % self.width));
            i = self.parent[i];
        }
        path.reverse();
        Some(path)
    }

    pub fn reached(&self) -> usize {
        self.dist.iter().filter(|&&d| d != UNREACHED).count()
    }
}

/// Free cells 4-connected to the start on the true map.
pub fn reachable_free(map: &Map) -> Vec<bool> {
    let s = Search::run(map, map.start, |c| !map.is_occupied(c));
    s.dist.iter().map(|&d| d != UNREACHED).collect()
}
