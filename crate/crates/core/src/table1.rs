//! Reference table of exact f(S,k;2) values for `k = 2..=8`, used for
//! regression runs. `None` marks cells with no published value.

use crate::sets::GapSet;

pub struct Row {
    pub label: &'static str,
    pub spec: &'static str,
    pub values: [Option<u64>; 7],
}

pub const K_MIN: usize = 2;
pub const K_MAX: usize = 8;

const fn v(x: u64) -> Option<u64> {
    Some(x)
}

pub const ROWS: &[Row] = &[
    Row {
        label: "T",
        spec: "powers(2)",
        values: [v(3), v(7), v(11), v(17), v(25), v(35), v(51)],
    },
    Row {
        label: "F",
        spec: "fibonacci",
        values: [v(3), v(5), v(9), v(11), v(15), v(19), v(21)],
    },
    Row {
        label: "P",
        spec: "primes",
        values: [v(5), v(9), v(13), v(21), v(25), v(33), None],
    },
    Row {
        label: "P+1",
        spec: "primes+1",
        values: [v(7), v(13), v(21), v(27), v(35), None, None],
    },
    Row {
        label: "P+2",
        spec: "primes+2",
        values: [v(9), v(17), v(25), v(33), None, None, None],
    },
    Row {
        label: "P+3",
        spec: "primes+3",
        values: [v(11), v(21), v(31), v(42), None, None, None],
    },
    Row {
        label: "P+4",
        spec: "primes+4",
        values: [v(13), v(25), v(37), None, None, None, None],
    },
    Row {
        label: "P+5",
        spec: "primes+5",
        values: [v(15), v(29), None, None, None, None, None],
    },
    Row {
        label: "P+6",
        spec: "primes+6",
        values: [v(17), v(33), None, None, None, None, None],
    },
    Row {
        label: "P+7",
        spec: "primes+7",
        values: [v(19), v(37), None, None, None, None, None],
    },
    Row {
        label: "S5",
        spec: "s_m(5)",
        values: [v(3), v(5), v(7), v(11), v(13), v(15), v(19)],
    },
    Row {
        label: "S6",
        spec: "s_m(6)",
        values: [v(3), v(5), v(7), v(9), v(13), v(15), v(17)],
    },
];

/// One published cell.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cell {
    pub label: &'static str,
    pub spec: &'static str,
    pub k: usize,
    pub expected: Option<u64>,
}

impl Cell {
    pub fn set(&self) -> GapSet {
        GapSet::parse(self.spec).expect("table specs parse")
    }

    /// Citation quoted in mismatch reports.
    pub fn citation(&self) -> String {
        match self.expected {
            Some(v) => format!("table: f({}, {}; 2) = {v}", self.label, self.k),
            None => format!("table: f({}, {}; 2) = ?", self.label, self.k),
        }
    }
}

/// All cells in row-major order, including the unknown ones.
pub fn cells() -> Vec<Cell> {
    ROWS.iter()
        .flat_map(|row| {
            (K_MIN..=K_MAX).map(move |k| Cell {
                label: row.label,
                spec: row.spec,
                k,
                expected: row.values[k - K_MIN],
            })
        })
        .collect()
}

/// The cells with a published value.
pub fn known_cells() -> Vec<Cell> {
    cells()
        .into_iter()
        .filter(|c| c.expected.is_some())
        .collect()
}
