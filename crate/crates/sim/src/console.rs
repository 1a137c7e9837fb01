//! Messages exchanged with the operator console.

use serde::{Deserialize, Serialize};

use crate::generated::types::Mode;
use crate::map::CellIndex;
use crate::simulation::Simulation;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PoseMessage {
    pub x: f64,
    pub y: f64,
    pub theta: f64,
}

/// Pushed to the console every few ticks.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct StateMessage {
    #[serde(rename = "type")]
    pub kind: String,
    pub tick: u64,
    pub pose: PoseMessage,
    pub mode: String,
    pub light_on: bool,
    pub width: usize,
    pub height: usize,
    /// One run-length encoded row per grid row, e.g. `3U2F1O`.
    pub known: Vec<String>,
    /// `[row, col]` pairs.
    pub frontiers: Vec<[usize; 2]>,
    pub pictures: usize,
}

/// Sent by the console to switch modes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SetModeMessage {
    #[serde(rename = "type")]
    pub kind: String,
    pub mode: String,
}

impl SetModeMessage {
    pub fn new(mode: Mode) -> Self {
        SetModeMessage {
            kind: "setMode".into(),
            mode: mode.label().into(),
        }
    }

    /// Parses a text frame; anything but a well-formed setMode is an error.
    pub fn parse(text: &str) -> Result<Mode, String> {
        let msg: SetModeMessage = serde_json::from_str(text).map_err(|e| e.to_string())?;
        if msg.kind != "setMode" {
            return Err(format!("unexpected message type `{}`", msg.kind));
        }
        Mode::ALL
            .into_iter()
            .find(|m| m.label() == msg.mode)
            .ok_or_else(|| format!("unknown mode `{}`", msg.mode))
    }
}

/// Run-length encodes one row of cell letters.
pub fn encode_row(cells: impl IntoIterator<Item = char>) -> String {
    let mut out = String::new();
    let mut run: Option<(char, usize)> = None;
    for c in cells {
        run = match run {
            Some((p, n)) if p == c => Some((p, n + 1)),
            Some((p, n)) => {
                out.push_str(&format!("{n}{p}"));
                Some((c, 1))
            }
            None => Some((c, 1)),
        };
    }
    if let Some((p, n)) = run {
        out.push_str(&format!("{n}{p}"));
    }
    out
}

pub fn decode_row(row: &str) -> Result<String, String> {
    let mut out = String::new();
    let mut count = String::new();
    for c in row.chars() {
        if c.is_ascii_digit() {
            count.push(c);
            continue;
        }
        let n: usize = count.parse().map_err(|_| format!("missing count before `{c}`"))?;
        out.extend(std::iter::repeat_n(c, n));
        count.clear();
    }
    if !count.is_empty() {
        return Err("trailing count".into());
    }
    Ok(out)
}

pub fn state_message(sim: &Simulation) -> StateMessage {
    let world = sim.world();
    let map = &world.map;
    let known = (0..map.height)
        .map(|r| {
            encode_row((0..map.width).map(|c| {
                if !world.is_known((r, c)) {
                    'U'
                } else if map.is_occupied((r, c)) {
                    'O'
                } else {
                    'F'
                }
            }))
        })
        .collect();
    StateMessage {
        kind: "state".into(),
        tick: sim.tick(),
        pose: PoseMessage {
            x: world.pose.x,
            y: world.pose.y,
            theta: world.pose.theta,
        },
        mode: sim.mode().label().into(),
        light_on: sim.light_on(),
        width: map.width,
        height: map.height,
        known,
        frontiers: sim.frontier().into_iter().map(|(r, c): CellIndex| [r, c]).collect(),
        pictures: sim.pictures().len(),
    }
}
