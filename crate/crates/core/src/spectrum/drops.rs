use serde::{Deserialize, Serialize};

use super::TransmissionSpectrum;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Drop {
    pub center: f64,
    /// 1 − D at the minimum.
    pub depth: f64,
    /// Full width at half depth.
    pub width: f64,
    /// depth·γ²/α rounded to the nearest integer.
    pub members: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DropSet {
    pub drops: Vec<Drop>,
    /// Absolute depth threshold (1 − D) used for detection.
    pub threshold: f64,
}

impl DropSet {
    pub fn len(&self) -> usize {
        self.drops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.drops.is_empty()
    }

    pub fn total_members(&self) -> usize {
        self.drops.iter().map(|d| d.members).sum()
    }
}

/// Parabolic refinement through three equally spaced samples around a minimum.
fn refine(w: &[f64], d: &[f64], i: usize) -> (f64, f64) {
    if i == 0 || i + 1 >= d.len() {
        return (w[i], d[i]);
    }
    let (a, b, c) = (d[i - 1], d[i], d[i + 1]);
    let denom = a - 2.0 * b + c;
    if denom <= 0.0 {
        return (w[i], b);
    }
    let t = 0.5 * (a - c) / denom;
    let h = w[i + 1] - w[i];
    (w[i] + t * h, b - 0.25 * (a - c) * t)
}

fn crossing(w: &[f64], depth: &[f64], from: usize, level: f64, step: isize) -> f64 {
    let mut k = from as isize;
    while k + step >= 0 && ((k + step) as usize) < w.len() {
        let next = (k + step) as usize;
        if depth[next] < level {
            let cur = k as usize;
            let t = (depth[cur] - level) / (depth[cur] - depth[next]);
            return w[cur] + t * (w[next] - w[cur]);
        }
        k += step;
    }
    w[k as usize]
}

/// Local minima of D with depth at least `depth_threshold`; minima closer
/// than γ are merged keeping the deeper one.
pub fn detect_drops(spectrum: &TransmissionSpectrum, depth_threshold: f64) -> DropSet {
    let w = &spectrum.grid;
    let d = &spectrum.values;
    let depth: Vec<f64> = d.iter().map(|v| 1.0 - v).collect();
    let gamma = spectrum.params.linewidth_gamma;
    let unit = spectrum.params.unit_depth();
    let mut kept: Vec<(usize, f64, f64)> = Vec::new();
    for i in 1..d.len().saturating_sub(1) {
        if !(d[i] < d[i - 1] && d[i] <= d[i + 1]) {
            continue;
        }
        let (center, value) = refine(w, d, i);
        if 1.0 - value < depth_threshold {
            continue;
        }
        match kept.last_mut() {
            Some(last) if center - last.1 < gamma => {
                if value < last.2 {
                    *last = (i, center, value);
                }
            }
            _ => kept.push((i, center, value)),
        }
    }
    let drops = kept
        .into_iter()
        .map(|(i, center, value)| {
            let dep = 1.0 - value;
            let left = crossing(w, &depth, i, 0.5 * dep, -1);
            let right = crossing(w, &depth, i, 0.5 * dep, 1);
            Drop {
                center,
                depth: dep,
                width: right - left,
                members: (dep / unit).round() as usize,
            }
        })
        .collect();
    DropSet {
        drops,
        threshold: depth_threshold,
    }
}
