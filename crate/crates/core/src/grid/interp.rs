use crate::ScalarField;

/// Reflects `i` into [0, n) by mirroring about the first and last samples
/// (no edge duplication): f(-1) = f(1), f(n) = f(n-2).
#[inline]
pub fn mirror_index(i: isize, n: usize) -> usize {
    debug_assert!(n >= 2);
    let period = 2 * (n as isize - 1);
    let mut m = i.rem_euclid(period);
    if m >= n as isize {
        m = period - m;
    }
    m as usize
}

#[inline]
fn catmull_rom_weights(t: f64) -> [f64; 4] {
    let t2 = t * t;
    let t3 = t2 * t;
    [
        0.5 * (-t + 2.0 * t2 - t3),
        0.5 * (2.0 - 5.0 * t2 + 3.0 * t3),
        0.5 * (t + 4.0 * t2 - 3.0 * t3),
        0.5 * (-t2 + t3),
    ]
}

/// Catmull-Rom bicubic sample of a raw row-major buffer at fractional
/// coordinates, mirror boundary. Reproduces samples exactly at integer
/// coordinates.
pub fn bicubic_sample_raw(data: &[f64], rows: usize, cols: usize, x: f64, y: f64) -> f64 {
    let x0 = x.floor();
    let y0 = y.floor();
    let tx = x - x0;
    let ty = y - y0;
    let wx = catmull_rom_weights(tx);
    let wy = catmull_rom_weights(ty);

    let mut acc = 0.0;
    for (j, &wyj) in wy.iter().enumerate() {
        let ry = mirror_index(y0 as isize + j as isize - 1, rows);
        let row = &data[ry * cols..(ry + 1) * cols];
        let mut line = 0.0;
        for (i, &wxi) in wx.iter().enumerate() {
            let rx = mirror_index(x0 as isize + i as isize - 1, cols);
            line += wxi * row[rx];
        }
        acc += wyj * line;
    }
    acc
}

/// Catmull-Rom bicubic sample of a field at fractional coordinates
/// (x = column, y = row).
pub fn bicubic_sample(field: &ScalarField, x: f64, y: f64) -> f64 {
    bicubic_sample_raw(field.data(), field.rows(), field.cols(), x, y)
}
