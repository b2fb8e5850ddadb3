//! Plain PGM (P2) rendering of weight filters.

use sdae::linalg::Matrix;

/// Renders a (hidden x input) weight matrix as a plain PGM image whose
/// columns are hidden units and rows are input weights. The layer's
/// weight range maps affinely onto 0..=255; a constant layer renders as
/// uniform mid-gray 128.
pub fn filter_image(weights: &Matrix) -> String {
    let height = weights.cols(); // input dimension
    let width = weights.rows(); // hidden units
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &v in weights.data() {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    let range = hi - lo;

    let mut out = format!("P2\n{width} {height}\n255\n");
    for row in 0..height {
        for col in 0..width {
            if col > 0 {
                out.push(' ');
            }
            let value = weights.get(col, row);
            let pixel = if range == 0.0 {
                128
            } else {
                ((value - lo) / range * 255.0).round() as u32
            };
            out.push_str(&pixel.to_string());
        }
        out.push('\n');
    }
    out
}
