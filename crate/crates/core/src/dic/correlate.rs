use serde::{Deserialize, Serialize};

use crate::forward::DisplacementField;
use crate::grid::bicubic_sample_raw;
use crate::{Error, GridGeometry, Result, ScalarField};

/// Subpixel refinement of the correlation peak.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Subpixel {
    /// Separable quadratic fit on the 3x3 neighborhood of the integer peak.
    Quadratic3x3,
    /// Local DFT upsampling of the cross-correlation by the given factor;
    /// slower, kept as a cross-check.
    UpsampledCorrelation(u32),
}

/// Block-matching parameters: block size, search radius, node overlap
/// fraction and the subpixel mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DicParams {
    pub block: usize,
    pub search: usize,
    pub overlap: f64,
    pub subpixel: Subpixel,
}

impl DicParams {
    pub fn validate(&self, geometry: &GridGeometry) -> Result<()> {
        if self.block < 8 {
            return Err(Error::InvalidArgument(format!(
                "block must be at least 8, got {}",
                self.block
            )));
        }
        if self.search < 1 {
            return Err(Error::InvalidArgument("search radius must be at least 1".into()));
        }
        if !(0.0..1.0).contains(&self.overlap) {
            return Err(Error::InvalidArgument(format!(
                "overlap must lie in [0, 1), got {}",
                self.overlap
            )));
        }
        let min_dim = geometry.rows.min(geometry.cols);
        if self.block + 2 * self.search > min_dim {
            return Err(Error::InvalidArgument(format!(
                "block + 2*search = {} exceeds the image side {min_dim}",
                self.block + 2 * self.search
            )));
        }
        Ok(())
    }

    pub fn node_stride(&self) -> usize {
        ((self.block as f64 * (1.0 - self.overlap)).round() as usize).max(1)
    }

    /// Border width with no valid correlation data.
    pub fn invalid_margin(&self) -> usize {
        self.block / 2 + self.search
    }
}

/// Correlation window size adapted to the expected peak displacement:
/// the smallest power of two at or above 8a, clamped to [16, 64], with a
/// search radius of ceil(a) + 2.
pub fn auto_window(max_displacement: f64) -> DicParams {
    let raw = (8.0 * max_displacement).ceil().max(1.0) as usize;
    let block = raw.next_power_of_two().clamp(16, 64);
    let search = max_displacement.ceil() as usize + 2;
    DicParams { block, search, overlap: 0.75, subpixel: Subpixel::Quadratic3x3 }
}

/// One correlation node.
#[derive(Debug, Clone, Copy)]
pub struct DicNode {
    /// Block center, pixels.
    pub x: usize,
    pub y: usize,
    pub u: f64,
    pub v: f64,
    pub score: f64,
    pub valid: bool,
}

/// Correlation output: the dense interpolated field, the raw node grid and
/// the width of the invalid border.
#[derive(Debug, Clone)]
pub struct DicResult {
    pub field: DisplacementField,
    pub nodes: Vec<DicNode>,
    pub nodes_x: usize,
    pub nodes_y: usize,
    pub valid_margin: usize,
}

struct IntegralImages {
    sum: Vec<f64>,
    sum_sq: Vec<f64>,
    cols: usize,
}

impl IntegralImages {
    fn build(img: &ScalarField) -> Self {
        let rows = img.rows();
        let cols = img.cols();
        let w = cols + 1;
        let mut sum = vec![0.0; (rows + 1) * w];
        let mut sum_sq = vec![0.0; (rows + 1) * w];
        for r in 0..rows {
            let mut line = 0.0;
            let mut line_sq = 0.0;
            for c in 0..cols {
                let v = img.at(r, c);
                line += v;
                line_sq += v * v;
                sum[(r + 1) * w + c + 1] = sum[r * w + c + 1] + line;
                sum_sq[(r + 1) * w + c + 1] = sum_sq[r * w + c + 1] + line_sq;
            }
        }
        Self { sum, sum_sq, cols: w }
    }

    /// Window sums over [r0, r0+h) x [c0, c0+w).
    #[inline]
    fn window(&self, r0: usize, c0: usize, h: usize, w: usize) -> (f64, f64) {
        let stride = self.cols;
        let a = r0 * stride + c0;
        let b = r0 * stride + c0 + w;
        let c = (r0 + h) * stride + c0;
        let d = (r0 + h) * stride + c0 + w;
        (
            self.sum[d] - self.sum[b] - self.sum[c] + self.sum[a],
            self.sum_sq[d] - self.sum_sq[b] - self.sum_sq[c] + self.sum_sq[a],
        )
    }
}

fn quadratic_offset(left: f64, center: f64, right: f64) -> f64 {
    let denom = left - 2.0 * center + right;
    if denom.abs() < 1e-300 {
        0.0
    } else {
        (0.5 * (left - right) / denom).clamp(-0.5, 0.5)
    }
}

/// Upsampled cross-correlation refinement: evaluates the correlation of the
/// mean-subtracted blocks on a fine grid within +-0.5 px of the integer peak
/// via an explicit DFT sum.
fn upsampled_offset(
    ref_block: &[f64],
    def_block: &[f64],
    b: usize,
    factor: u32,
) -> Result<(f64, f64)> {
    use crate::grid::{fft2d, freq_cycles};
    use num_complex::Complex64;

    let g = GridGeometry::new(b, b)?;
    let mean_r = ref_block.iter().sum::<f64>() / ref_block.len() as f64;
    let mean_d = def_block.iter().sum::<f64>() / def_block.len() as f64;
    let rf = crate::ComplexField::from_vec(
        g,
        ref_block.iter().map(|&v| Complex64::new(v - mean_r, 0.0)).collect(),
    )?;
    let df = crate::ComplexField::from_vec(
        g,
        def_block.iter().map(|&v| Complex64::new(v - mean_d, 0.0)).collect(),
    )?;
    let fr = fft2d(&rf)?;
    let fd = fft2d(&df)?;

    let cross: Vec<Complex64> =
        fr.data().iter().zip(fd.data()).map(|(a, b)| a.conj() * b).collect();
    let freqs: Vec<f64> = (0..b).map(|k| freq_cycles(k, b)).collect();

    let steps = factor as i64;
    let mut best = (0.0, 0.0, f64::NEG_INFINITY);
    for iy in -steps..=steps {
        let ty = 0.5 * iy as f64 / steps as f64;
        for ix in -steps..=steps {
            let tx = 0.5 * ix as f64 / steps as f64;
            let mut acc = Complex64::new(0.0, 0.0);
            for ky in 0..b {
                for kx in 0..b {
                    let phase = std::f64::consts::TAU * (freqs[kx] * tx + freqs[ky] * ty);
                    acc += cross[ky * b + kx] * Complex64::new(phase.cos(), phase.sin());
                }
            }
            if acc.re > best.2 {
                best = (tx, ty, acc.re);
            }
        }
    }
    Ok((best.0, best.1))
}

/// Translational DIC: zero-normalized cross-correlation of each reference
/// block against the search window in the deformed image, integer peak plus
/// subpixel refinement, then bicubic interpolation of the node grid to a
/// dense field. Flat blocks are marked invalid and inpainted from their
/// neighbors.
pub fn dic_displacement(
    reference: &ScalarField,
    deformed: &ScalarField,
    params: &DicParams,
) -> Result<DicResult> {
    if reference.geometry() != deformed.geometry() {
        return Err(Error::InvalidGeometry("images must share a geometry".into()));
    }
    let geometry = reference.geometry();
    params.validate(&geometry)?;

    let rows = geometry.rows;
    let cols = geometry.cols;
    let b = params.block;
    let s = params.search as isize;
    let stride = params.node_stride();
    let half = b / 2;

    let integrals = IntegralImages::build(deformed);

    // Node block top-left positions: the search window must stay inside.
    let tx_range: Vec<usize> =
        (params.search..=cols - b - params.search).step_by(stride).collect();
    let ty_range: Vec<usize> =
        (params.search..=rows - b - params.search).step_by(stride).collect();
    let nodes_x = tx_range.len();
    let nodes_y = ty_range.len();
    if nodes_x == 0 || nodes_y == 0 {
        return Err(Error::InvalidArgument("no room for correlation nodes".into()));
    }

    let span = (2 * params.search + 1) as isize;
    let n_block = (b * b) as f64;
    let mut nodes = Vec::with_capacity(nodes_x * nodes_y);
    let mut scores = vec![0.0f64; (span * span) as usize];

    for &ty in &ty_range {
        for &tx in &tx_range {
            // Mean-subtracted reference block.
            let mut block = Vec::with_capacity(b * b);
            let mut mean = 0.0;
            for r in 0..b {
                for c in 0..b {
                    let v = reference.at(ty + r, tx + c);
                    block.push(v);
                    mean += v;
                }
            }
            mean /= n_block;
            for v in &mut block {
                *v -= mean;
            }
            let ref_energy: f64 = block.iter().map(|v| v * v).sum();

            let mut node = DicNode {
                x: tx + half,
                y: ty + half,
                u: 0.0,
                v: 0.0,
                score: 0.0,
                valid: false,
            };

            if ref_energy > 1e-12 {
                let ref_norm = ref_energy.sqrt();
                let mut best_score = f64::NEG_INFINITY;
                let mut best_dx = 0isize;
                let mut best_dy = 0isize;
                for dy in -s..=s {
                    let wy = (ty as isize + dy) as usize;
                    for dx in -s..=s {
                        let wx = (tx as isize + dx) as usize;
                        let mut num = 0.0;
                        for r in 0..b {
                            let drow = wy + r;
                            for c in 0..b {
                                num += block[r * b + c] * deformed.at(drow, wx + c);
                            }
                        }
                        let (dsum, dsum_sq) = integrals.window(wy, wx, b, b);
                        let dvar = dsum_sq - dsum * dsum / n_block;
                        let score = if dvar > 1e-12 {
                            (num / (ref_norm * dvar.sqrt())).clamp(-1.0, 1.0)
                        } else {
                            -1.0
                        };
                        scores[((dy + s) * span + dx + s) as usize] = score;
                        if score > best_score {
                            best_score = score;
                            best_dx = dx;
                            best_dy = dy;
                        }
                    }
                }

                if best_score > -1.0 {
                    // A perfect correlation peak is an exact integer match;
                    // fitting a parabola through its asymmetric neighbors
                    // would only add a spurious offset.
                    let (sub_x, sub_y) = if best_score >= 1.0 - 1e-12 {
                        (0.0, 0.0)
                    } else {
                        match params.subpixel {
                            Subpixel::Quadratic3x3 => {
                                let at = |dy: isize, dx: isize| {
                                    scores[((dy + s) * span + dx + s) as usize]
                                };
                                let sx = if best_dx > -s && best_dx < s {
                                    quadratic_offset(
                                        at(best_dy, best_dx - 1),
                                        at(best_dy, best_dx),
                                        at(best_dy, best_dx + 1),
                                    )
                                } else {
                                    0.0
                                };
                                let sy = if best_dy > -s && best_dy < s {
                                    quadratic_offset(
                                        at(best_dy - 1, best_dx),
                                        at(best_dy, best_dx),
                                        at(best_dy + 1, best_dx),
                                    )
                                } else {
                                    0.0
                                };
                                (sx, sy)
                            }
                            Subpixel::UpsampledCorrelation(factor) => {
                                let wy = (ty as isize + best_dy) as usize;
                                let wx = (tx as isize + best_dx) as usize;
                                let mut def_block = Vec::with_capacity(b * b);
                                for r in 0..b {
                                    for c in 0..b {
                                        def_block.push(deformed.at(wy + r, wx + c));
                                    }
                                }
                                let raw: Vec<f64> =
                                    block.iter().map(|v| v + mean).collect();
                                upsampled_offset(&raw, &def_block, b, factor)?
                            }
                        }
                    };
                    node.u = best_dx as f64 + sub_x;
                    node.v = best_dy as f64 + sub_y;
                    node.score = best_score;
                    node.valid = true;
                }
            }
            nodes.push(node);
        }
    }

    inpaint_nodes(&mut nodes, nodes_x, nodes_y);

    // Dense field by bicubic interpolation of node values in node-grid space.
    let node_u: Vec<f64> = nodes.iter().map(|n| n.u).collect();
    let node_v: Vec<f64> = nodes.iter().map(|n| n.v).collect();
    let x0 = tx_range[0] + half;
    let y0 = ty_range[0] + half;
    let mut u = ScalarField::zeros(geometry);
    let mut v = ScalarField::zeros(geometry);
    for r in 0..rows {
        let gy = (r as f64 - y0 as f64) / stride as f64;
        for c in 0..cols {
            let gx = (c as f64 - x0 as f64) / stride as f64;
            u.set(r, c, interp_node_grid(&node_u, nodes_y, nodes_x, gx, gy));
            v.set(r, c, interp_node_grid(&node_v, nodes_y, nodes_x, gx, gy));
        }
    }

    Ok(DicResult {
        field: DisplacementField::new(u, v)?,
        nodes,
        nodes_x,
        nodes_y,
        valid_margin: params.invalid_margin(),
    })
}

fn interp_node_grid(values: &[f64], ny: usize, nx: usize, gx: f64, gy: f64) -> f64 {
    match (ny < 2, nx < 2) {
        (true, true) => values[0],
        (true, false) => {
            // Single row: 1D interpolation along x via a duplicated row.
            let doubled: Vec<f64> = values.iter().chain(values.iter()).copied().collect();
            bicubic_sample_raw(&doubled, 2, nx, gx.clamp(0.0, (nx - 1) as f64), 0.0)
        }
        (false, true) => {
            let doubled: Vec<f64> =
                values.iter().flat_map(|&v| [v, v]).collect();
            bicubic_sample_raw(&doubled, ny, 2, 0.0, gy.clamp(0.0, (ny - 1) as f64))
        }
        (false, false) => bicubic_sample_raw(
            values,
            ny,
            nx,
            gx.clamp(0.0, (nx - 1) as f64),
            gy.clamp(0.0, (ny - 1) as f64),
        ),
    }
}

/// Replaces invalid nodes with the average of their valid neighbors,
/// sweeping until every node is filled.
fn inpaint_nodes(nodes: &mut [DicNode], nx: usize, ny: usize) {
    let mut filled: Vec<bool> = nodes.iter().map(|n| n.valid).collect();
    if filled.iter().all(|&f| f) {
        return;
    }
    if !filled.iter().any(|&f| f) {
        return; // nothing to copy from; zeros stand
    }
    loop {
        let mut progress = false;
        for r in 0..ny {
            for c in 0..nx {
                let i = r * nx + c;
                if filled[i] {
                    continue;
                }
                let mut sum_u = 0.0;
                let mut sum_v = 0.0;
                let mut count = 0;
                for (dr, dc) in [(-1isize, 0isize), (1, 0), (0, -1), (0, 1)] {
                    let rr = r as isize + dr;
                    let cc = c as isize + dc;
                    if rr < 0 || cc < 0 || rr >= ny as isize || cc >= nx as isize {
                        continue;
                    }
                    let j = rr as usize * nx + cc as usize;
                    if filled[j] {
                        sum_u += nodes[j].u;
                        sum_v += nodes[j].v;
                        count += 1;
                    }
                }
                if count > 0 {
                    nodes[i].u = sum_u / count as f64;
                    nodes[i].v = sum_v / count as f64;
                    filled[i] = true;
                    progress = true;
                }
            }
        }
        if !progress || filled.iter().all(|&f| f) {
            break;
        }
    }
}
