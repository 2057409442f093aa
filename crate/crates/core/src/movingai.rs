//! MovingAI `.map` and `.scen` format parsing.

use thiserror::Error;

/// Errors from parsing a MovingAI map file.
#[derive(Debug, Error)]
pub enum MapError {
    #[error("line {line}: malformed header, expected `{expected}`")]
    MalformedHeader { line: usize, expected: &'static str },

    #[error("line {line}: invalid {field} value `{value}`")]
    InvalidDimension {
        line: usize,
        field: &'static str,
        value: String,
    },

    #[error("row count mismatch: header says {expected} rows, got {got} (line {line})")]
    RowCountMismatch {
        line: usize,
        expected: usize,
        got: usize,
    },

    #[error("line {line}: row length {got} does not match width {expected}")]
    RowWidthMismatch {
        line: usize,
        expected: usize,
        got: usize,
    },
}

/// Errors from parsing a MovingAI scenario file.
#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("line {line}: expected 9 fields, got {got}")]
    FieldCount { line: usize, got: usize },

    #[error("line {line}: invalid {field} value `{value}`")]
    InvalidField {
        line: usize,
        field: &'static str,
        value: String,
    },
}

/// A 4-connected grid world parsed from a MovingAI map file.
///
/// Cells are addressed as `(x, y)` with `x` the column and `y` the row;
/// `(0, 0)` is the top-left corner.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridMap {
    width: usize,
    height: usize,
    /// Row-major; index = y * width + x.
    passable: Vec<bool>,
}

impl GridMap {
    /// Build a map directly from its passable grid (row-major).
    pub fn from_passable(width: usize, height: usize, passable: Vec<bool>) -> Self {
        assert!(width >= 1 && height >= 1, "map dimensions must be positive");
        assert_eq!(passable.len(), width * height, "grid size mismatch");
        GridMap {
            width,
            height,
            passable,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    /// True iff `(x, y)` is inside the map and traversable.
    pub fn is_passable(&self, x: usize, y: usize) -> bool {
        x < self.width && y < self.height && self.passable[y * self.width + x]
    }

    /// Serialize back to MovingAI map format ('.' passable, '@' blocked).
    pub fn to_map_format(&self) -> String {
        let mut out = String::with_capacity(self.width * self.height + 64);
        out.push_str("type octile\n");
        out.push_str(&format!("height {}\n", self.height));
        out.push_str(&format!("width {}\n", self.width));
        out.push_str("map\n");
        for y in 0..self.height {
            for x in 0..self.width {
                out.push(if self.passable[y * self.width + x] {
                    '.'
                } else {
                    '@'
                });
            }
            out.push('\n');
        }
        out
    }
}

/// One start/goal pair from a `.scen` file.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioEntry {
    pub bucket: u32,
    pub map_name: String,
    pub map_width: usize,
    pub map_height: usize,
    pub start: (usize, usize),
    pub goal: (usize, usize),
    /// Single-agent optimal length as recorded in the file. Informational
    /// only; never used for solving.
    pub optimal_length: f64,
}

/// Parse a MovingAI `.map` file.
///
/// Header is `type <t>`, `height H`, `width W`, `map`, followed by `H` rows
/// of `W` characters. Passable characters are `.`, `G` and `S`; everything
/// else (`@`, `O`, `T`, `W`, ...) is blocked.
pub fn parse_map(text: &str) -> Result<GridMap, MapError> {
    let mut lines = text.lines().enumerate();

    let mut next_nonempty = |expected: &'static str| -> Result<(usize, &str), MapError> {
        for (i, raw) in lines.by_ref() {
            let line = raw.trim_end_matches('\r').trim();
            if !line.is_empty() {
                return Ok((i + 1, line));
            }
        }
        Err(MapError::MalformedHeader { line: 0, expected })
    };

    let (line_no, type_line) = next_nonempty("type <kind>")?;
    if !type_line.starts_with("type") {
        return Err(MapError::MalformedHeader {
            line: line_no,
            expected: "type <kind>",
        });
    }

    // height and width may appear in either order.
    let mut height: Option<usize> = None;
    let mut width: Option<usize> = None;
    for _ in 0..2 {
        let (line_no, line) = next_nonempty("height/width <n>")?;
        let mut parts = line.split_whitespace();
        let key = parts.next().unwrap_or("");
        let value = parts.next().unwrap_or("");
        let slot = match key {
            "height" => &mut height,
            "width" => &mut width,
            _ => {
                return Err(MapError::MalformedHeader {
                    line: line_no,
                    expected: "height/width <n>",
                })
            }
        };
        let parsed = value
            .parse::<usize>()
            .ok()
            .filter(|&v| v >= 1)
            .ok_or_else(|| MapError::InvalidDimension {
                line: line_no,
                field: if key == "height" { "height" } else { "width" },
                value: value.to_string(),
            })?;
        *slot = Some(parsed);
    }
    let (height, width) = (height.unwrap(), width.unwrap());

    let (line_no, map_line) = next_nonempty("map")?;
    if map_line != "map" {
        return Err(MapError::MalformedHeader {
            line: line_no,
            expected: "map",
        });
    }

    let mut passable = Vec::with_capacity(width * height);
    let mut rows = 0usize;
    let mut last_line = line_no;
    for (i, raw) in lines {
        let row = raw.trim_end_matches('\r');
        if row.is_empty() {
            continue;
        }
        last_line = i + 1;
        if rows == height {
            return Err(MapError::RowCountMismatch {
                line: i + 1,
                expected: height,
                got: rows + 1,
            });
        }
        if row.chars().count() != width {
            return Err(MapError::RowWidthMismatch {
                line: i + 1,
                expected: width,
                got: row.chars().count(),
            });
        }
        passable.extend(row.chars().map(|c| matches!(c, '.' | 'G' | 'S')));
        rows += 1;
    }
    if rows != height {
        return Err(MapError::RowCountMismatch {
            line: last_line,
            expected: height,
            got: rows,
        });
    }

    Ok(GridMap {
        width,
        height,
        passable,
    })
}

/// Parse a MovingAI `.scen` file.
///
/// The leading `version ...` line is optional. Each remaining nonempty line
/// carries 9 whitespace-separated fields:
/// `bucket map width height start_x start_y goal_x goal_y optimal`.
/// Entries are returned in file order.
pub fn parse_scenario(text: &str) -> Result<Vec<ScenarioEntry>, ScenarioError> {
    let mut entries = Vec::new();
    let mut first = true;
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim_end_matches('\r').trim();
        if line.is_empty() {
            continue;
        }
        if first {
            first = false;
            if line.starts_with("version") {
                continue;
            }
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 9 {
            return Err(ScenarioError::FieldCount {
                line: i + 1,
                got: fields.len(),
            });
        }
        let int = |idx: usize, field: &'static str| -> Result<usize, ScenarioError> {
            fields[idx]
                .parse::<usize>()
                .map_err(|_| ScenarioError::InvalidField {
                    line: i + 1,
                    field,
                    value: fields[idx].to_string(),
                })
        };
        let entry = ScenarioEntry {
            bucket: int(0, "bucket")? as u32,
            map_name: fields[1].to_string(),
            map_width: int(2, "width")?,
            map_height: int(3, "height")?,
            start: (int(4, "start_x")?, int(5, "start_y")?),
            goal: (int(6, "goal_x")?, int(7, "goal_y")?),
            optimal_length: fields[8]
                .parse::<f64>()
                .map_err(|_| ScenarioError::InvalidField {
                    line: i + 1,
                    field: "optimal",
                    value: fields[8].to_string(),
                })?,
        };
        if entry.start.0 >= entry.map_width
            || entry.start.1 >= entry.map_height
            || entry.goal.0 >= entry.map_width
            || entry.goal.1 >= entry.map_height
        {
            return Err(ScenarioError::InvalidField {
                line: i + 1,
                field: "coordinates",
                value: line.to_string(),
            });
        }
        entries.push(entry);
    }
    Ok(entries)
}
