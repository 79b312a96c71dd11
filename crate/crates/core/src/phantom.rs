//! Synthetic test images on the 8-bit intensity scale. Objects sit on a zero
//! background, as in magnitude MR slices.

use crate::point::{Point, Shape};

/// Names of [`phantom_set`] entries, in order.
pub const PHANTOM_NAMES: [&str; 5] = ["shepp-logan", "disks", "bars", "ring", "blocks"];

/// `(value, x0, y0, a, b, angle in degrees)` on `[−1, 1]²`; values add.
const SHEPP_LOGAN: [(f64, f64, f64, f64, f64, f64); 10] = [
    (1.0, 0.0, 0.0, 0.69, 0.92, 0.0),
    (-0.8, 0.0, -0.0184, 0.6624, 0.874, 0.0),
    (-0.2, 0.22, 0.0, 0.11, 0.31, -18.0),
    (-0.2, -0.22, 0.0, 0.16, 0.41, 18.0),
    (0.1, 0.0, 0.35, 0.21, 0.25, 0.0),
    (0.1, 0.0, 0.1, 0.046, 0.046, 0.0),
    (0.1, 0.0, -0.1, 0.046, 0.046, 0.0),
    (0.1, -0.08, -0.605, 0.046, 0.023, 0.0),
    (0.1, 0.0, -0.605, 0.023, 0.023, 0.0),
    (0.1, 0.06, -0.605, 0.023, 0.046, 0.0),
];

/// Pixel-centre coordinates in `[−1, 1]`, `y` pointing up.
fn coords(shape: Shape, i: usize, j: usize) -> (f64, f64) {
    let x = (2.0 * j as f64 + 1.0) / shape.width as f64 - 1.0;
    let y = 1.0 - (2.0 * i as f64 + 1.0) / shape.height as f64;
    (x, y)
}

fn render(shape: Shape, f: impl Fn(f64, f64) -> f64) -> Point {
    let values = (0..shape.len())
        .map(|k| {
            let (x, y) = coords(shape, k / shape.width, k % shape.width);
            f(x, y).clamp(0.0, 255.0)
        })
        .collect();
    Point::image(shape, values).expect("rendered values are finite")
}

/// Modified Shepp–Logan head, scaled to `[0, 255]`.
pub fn shepp_logan(shape: Shape) -> Point {
    render(shape, |x, y| {
        let v: f64 = SHEPP_LOGAN
            .iter()
            .filter(|&&(_, x0, y0, a, b, deg)| {
                let (s, c) = deg.to_radians().sin_cos();
                let (dx, dy) = (x - x0, y - y0);
                let u = dx * c + dy * s;
                let w = -dx * s + dy * c;
                (u / a).powi(2) + (w / b).powi(2) <= 1.0
            })
            .map(|e| e.0)
            .sum();
        255.0 * v
    })
}

fn disks(shape: Shape) -> Point {
    const D: [(f64, f64, f64, f64); 5] = [
        (-0.45, 0.45, 0.3, 220.0),
        (0.4, 0.4, 0.25, 160.0),
        (-0.4, -0.4, 0.22, 110.0),
        (0.35, -0.35, 0.35, 190.0),
        (0.0, 0.0, 0.12, 250.0),
    ];
    render(shape, |x, y| {
        D.iter()
            .rev()
            .find(|&&(cx, cy, r, _)| (x - cx).powi(2) + (y - cy).powi(2) <= r * r)
            .map_or(0.0, |d| d.3)
    })
}

fn bars(shape: Shape) -> Point {
    render(shape, |x, y| {
        let band = ((x + 1.0) * 4.0).floor().clamp(0.0, 7.0);
        let base = 40.0 + 25.0 * band;
        if y.abs() > 0.7 || x.abs() > 0.85 {
            0.0
        } else {
            base
        }
    })
}

fn ring(shape: Shape) -> Point {
    render(shape, |x, y| {
        let r = x.hypot(y);
        if r < 0.25 {
            230.0
        } else if (0.5..0.75).contains(&r) {
            180.0
        } else if r < 0.9 {
            60.0 + 40.0 * x
        } else {
            0.0
        }
    })
}

fn blocks(shape: Shape) -> Point {
    const R: [(f64, f64, f64, f64, f64); 4] = [
        (-0.8, -0.1, 0.2, 0.8, 200.0),
        (0.1, 0.8, 0.3, 0.7, 120.0),
        (-0.6, 0.6, -0.7, -0.2, 240.0),
        (-0.2, 0.3, -0.1, 0.2, 80.0),
    ];
    render(shape, |x, y| {
        R.iter()
            .rev()
            .find(|&&(x0, x1, y0, y1, _)| (x0..=x1).contains(&x) && (y0..=y1).contains(&y))
            .map_or(0.0, |r| r.4)
    })
}

/// The five [`PHANTOM_NAMES`] images at the given shape.
pub fn phantom_set(shape: Shape) -> Vec<(&'static str, Point)> {
    let images = [shepp_logan(shape), disks(shape), bars(shape), ring(shape), blocks(shape)];
    PHANTOM_NAMES.into_iter().zip(images).collect()
}

pub fn phantom_by_name(name: &str, shape: Shape) -> Option<Point> {
    phantom_set(shape).into_iter().find(|(n, _)| *n == name).map(|(_, p)| p)
}

/// 16×16 `{0, 1}` image: a filled square with a notch and an off-centre bar.
pub fn binary_phantom() -> Point {
    let shape = Shape::new(16, 16);
    let values = (0..shape.len())
        .map(|k| {
            let (i, j) = (k / 16, k % 16);
            let square = (3..10).contains(&i) && (3..10).contains(&j) && !(i < 6 && j >= 7);
            let bar = (11..14).contains(&i) && (6..14).contains(&j);
            if square || bar {
                1.0
            } else {
                0.0
            }
        })
        .collect();
    Point::image(shape, values).expect("finite")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn set_is_distinct_and_in_range() {
        let set = phantom_set(Shape::new(64, 64));
        assert_eq!(set.len(), 5);
        for (i, (_, a)) in set.iter().enumerate() {
            assert!(a.values().iter().all(|v| (0.0..=255.0).contains(v)));
            for (_, b) in &set[i + 1..] {
                assert!(a.distance(b) > 100.0);
            }
        }
        assert!(phantom_by_name("ring", Shape::new(8, 8)).is_some());
        assert!(phantom_by_name("nope", Shape::new(8, 8)).is_none());
    }

    #[test]
    fn binary_phantom_is_binary() {
        let p = binary_phantom();
        assert!(p.values().iter().all(|&v| v == 0.0 || v == 1.0));
        let ones = p.values().iter().filter(|&&v| v == 1.0).count();
        assert!(ones > 40 && ones < 100);
    }
}
