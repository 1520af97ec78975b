use std::f64::consts::{PI, TAU};

use crate::adopt::WrappedPhaseField;
use crate::ScalarField;

#[inline]
fn wrap_rad(x: f64) -> f64 {
    let mut w = x - TAU * (x / TAU).round();
    if w <= -PI {
        w += TAU;
    }
    w
}

/// Pixel reliability: inverse magnitude of the wrapped second differences
/// over the horizontal, vertical and both diagonal directions. Border pixels
/// get zero reliability and join a group last.
fn reliabilities(phase: &ScalarField) -> Vec<f64> {
    let rows = phase.rows();
    let cols = phase.cols();
    let p = phase.data();
    let mut rel = vec![0.0; rows * cols];
    for r in 1..rows - 1 {
        for c in 1..cols - 1 {
            let i = r * cols + c;
            let h = wrap_rad(p[i - 1] - p[i]) - wrap_rad(p[i] - p[i + 1]);
            let v = wrap_rad(p[i - cols] - p[i]) - wrap_rad(p[i] - p[i + cols]);
            let d1 = wrap_rad(p[i - cols - 1] - p[i]) - wrap_rad(p[i] - p[i + cols + 1]);
            let d2 = wrap_rad(p[i - cols + 1] - p[i]) - wrap_rad(p[i] - p[i + cols - 1]);
            let d = (h * h + v * v + d1 * d1 + d2 * d2).sqrt();
            rel[i] = 1.0 / d.max(1e-12);
        }
    }
    rel
}

struct Groups {
    parent: Vec<u32>,
    size: Vec<u32>,
    members: Vec<Vec<u32>>,
    /// Wrap count per pixel: unwrapped = phase + TAU * k.
    k: Vec<i64>,
}

impl Groups {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n as u32).collect(),
            size: vec![1; n],
            members: (0..n as u32).map(|i| vec![i]).collect(),
            k: vec![0; n],
        }
    }

    fn find(&mut self, mut i: u32) -> u32 {
        while self.parent[i as usize] != i {
            let up = self.parent[self.parent[i as usize] as usize];
            self.parent[i as usize] = up;
            i = up;
        }
        i
    }
}

/// Unwraps the phase by sorting pixel-pair edges by joint reliability and
/// merging groups with the integer wrap offset that makes the connecting
/// edge continuous; no unwrapping path is followed. Returns the unwrapped
/// displacement in pixels, anchored so the median lies within half a
/// carrier period of zero.
pub fn unwrap_phase(wrapped: &WrappedPhaseField) -> ScalarField {
    let phase = wrapped.phase();
    let rows = phase.rows();
    let cols = phase.cols();
    let n = rows * cols;
    let p = phase.data();

    let rel = reliabilities(phase);

    // Edges between horizontal and vertical 4-neighbors, most reliable first.
    let mut edges: Vec<(f64, u32, u32)> = Vec::with_capacity(2 * n);
    for r in 0..rows {
        for c in 0..cols {
            let i = (r * cols + c) as u32;
            if c + 1 < cols {
                edges.push((rel[i as usize] + rel[i as usize + 1], i, i + 1));
            }
            if r + 1 < rows {
                edges.push((rel[i as usize] + rel[i as usize + cols], i, i + cols as u32));
            }
        }
    }
    edges.sort_unstable_by(|a, b| b.0.partial_cmp(&a.0).unwrap().then(a.1.cmp(&b.1)));

    let mut groups = Groups::new(n);
    for &(_, a, b) in &edges {
        let ra = groups.find(a);
        let rb = groups.find(b);
        if ra == rb {
            continue;
        }
        let adj_a = p[a as usize] + TAU * groups.k[a as usize] as f64;
        let adj_b = p[b as usize] + TAU * groups.k[b as usize] as f64;
        let m = ((adj_a - adj_b) / TAU).round() as i64;

        // Merge the smaller group into the larger, shifting its wrap counts.
        let (keep, absorb, shift) = if groups.size[ra as usize] >= groups.size[rb as usize] {
            (ra, rb, m)
        } else {
            (rb, ra, -m)
        };
        let absorbed = std::mem::take(&mut groups.members[absorb as usize]);
        for &px in &absorbed {
            groups.k[px as usize] += shift;
            groups.parent[px as usize] = keep;
        }
        groups.size[keep as usize] += groups.size[absorb as usize];
        groups.members[keep as usize].extend(absorbed);
    }

    // Scale to displacement units and anchor the median within
    // (-period/2, period/2].
    let scale = 1.0 / (2.0 * PI * wrapped.xi_p());
    let period = 1.0 / wrapped.xi_p();
    let mut disp: Vec<f64> = (0..n)
        .map(|i| (p[i] + TAU * groups.k[i] as f64) * scale)
        .collect();

    let mut sorted = disp.clone();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let median = sorted[n / 2];
    let mut offset_periods = (median / period).round();
    let anchored = median - offset_periods * period;
    if anchored > period / 2.0 {
        offset_periods += 1.0;
    } else if anchored <= -period / 2.0 {
        offset_periods -= 1.0;
    }
    if offset_periods != 0.0 {
        let shift = offset_periods * period;
        for v in &mut disp {
            *v -= shift;
        }
    }

    ScalarField::from_vec(phase.geometry(), disp).expect("finite unwrap output")
}
