//! Per-measurement gain of a controller.

use serde::Serialize;

use crate::synthesis::Controller;

/// Column norms of `B_h` and `D_h` for one measurement channel.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SensitivityRow {
    pub channel: String,
    /// Source grid (0-based) parsed from the channel suffix.
    pub grid: Option<usize>,
    pub remote: bool,
    pub b_norm: f64,
    pub d_norm: f64,
}

/// Grid number (1-based) in the trailing digits of a channel name.
fn channel_grid(name: &str) -> Option<usize> {
    let digits: String = name.chars().rev().take_while(|c| c.is_ascii_digit()).collect();
    let digits: String = digits.chars().rev().collect();
    digits.parse::<usize>().ok().filter(|&g| g > 0).map(|g| g - 1)
}

pub fn gain_sensitivity(c: &Controller) -> Vec<SensitivityRow> {
    c.measurements()
        .iter()
        .enumerate()
        .map(|(j, m)| {
            let grid = channel_grid(m);
            SensitivityRow {
                channel: m.clone(),
                grid,
                remote: grid.is_some_and(|g| !c.grids.contains(&g)),
                b_norm: c.ss.b.column(j).norm(),
                d_norm: c.ss.d.column(j).norm(),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suffix_parsing() {
        assert_eq!(channel_grid("dVdc12"), Some(11));
        assert_eq!(channel_grid("df2"), Some(1));
        assert_eq!(channel_grid("dVdc_avg"), None);
        assert_eq!(channel_grid("x0"), None);
    }
}
