//! Marching-squares iso-lines on a rectilinear grid.

use std::collections::HashMap;

#[derive(Debug, Clone, PartialEq)]
pub struct Polyline {
    pub points: Vec<(f64, f64)>,
    pub closed: bool,
}

/// Iso-lines at `level` of `values`, stored row-major with `x` fastest
/// (`values[iy * xs.len() + ix]`). Cells with NaN count as below the level.
/// The field is padded with a below-level border, so every line that reaches the
/// grid edge is closed along the edge.
pub fn marching_squares(xs: &[f64], ys: &[f64], values: &[f64], level: f64) -> Vec<Polyline> {
    let (nx, ny) = (xs.len(), ys.len());
    assert_eq!(values.len(), nx * ny, "grid shape mismatch");
    if nx == 0 || ny == 0 {
        return Vec::new();
    }

    // padded grid: one extra node on each side, placed on the boundary itself
    let px = nx + 2;
    let py = ny + 2;
    let coord = |axis: &[f64], i: usize| axis[i.saturating_sub(1).min(axis.len() - 1)];
    let value = |ix: usize, iy: usize| -> f64 {
        if ix == 0 || iy == 0 || ix == px - 1 || iy == py - 1 {
            f64::NEG_INFINITY
        } else {
            let v = values[(iy - 1) * nx + ix - 1];
            if v.is_nan() {
                f64::NEG_INFINITY
            } else {
                v
            }
        }
    };

    let crossing = |a: (usize, usize), b: (usize, usize)| -> (f64, f64) {
        let (va, vb) = (value(a.0, a.1), value(b.0, b.1));
        let t = if va.is_infinite() {
            1.0
        } else if vb.is_infinite() {
            0.0
        } else {
            ((level - va) / (vb - va)).clamp(0.0, 1.0)
        };
        let (xa, ya) = (coord(xs, a.0), coord(ys, a.1));
        let (xb, yb) = (coord(xs, b.0), coord(ys, b.1));
        (xa + t * (xb - xa), ya + t * (yb - ya))
    };

    // edge ids: 2 * node index for the edge to the right, + 1 for the edge upward
    let h_edge = |ix: usize, iy: usize| 2 * (iy * px + ix);
    let v_edge = |ix: usize, iy: usize| 2 * (iy * px + ix) + 1;
    let edge_point = |id: usize| {
        let node = id / 2;
        let (ix, iy) = (node % px, node / px);
        if id.is_multiple_of(2) {
            crossing((ix, iy), (ix + 1, iy))
        } else {
            crossing((ix, iy), (ix, iy + 1))
        }
    };

    let mut segments: Vec<(usize, usize)> = Vec::new();
    for iy in 0..py - 1 {
        for ix in 0..px - 1 {
            let v = [value(ix, iy), value(ix + 1, iy), value(ix + 1, iy + 1), value(ix, iy + 1)];
            let inside: Vec<bool> = v.iter().map(|x| *x >= level).collect();
            let e = [h_edge(ix, iy), v_edge(ix + 1, iy), h_edge(ix, iy + 1), v_edge(ix, iy)];
            let code = inside.iter().enumerate().fold(0u8, |acc, (k, b)| acc | ((*b as u8) << k));
            match code {
                0 | 15 => {}
                5 | 10 => {
                    let centre = v.iter().sum::<f64>() / 4.0;
                    let centre_inside = centre >= level;
                    // corners 0 and 2 inside for code 5
                    let diagonal_02 = code == 5;
                    if diagonal_02 == centre_inside {
                        segments.push((e[0], e[1]));
                        segments.push((e[2], e[3]));
                    } else {
                        segments.push((e[3], e[0]));
                        segments.push((e[1], e[2]));
                    }
                }
                _ => {
                    let crossed: Vec<usize> = (0..4).filter(|&k| inside[k] != inside[(k + 1) % 4]).map(|k| e[k]).collect();
                    segments.push((crossed[0], crossed[1]));
                }
            }
        }
    }

    let mut by_edge: HashMap<usize, Vec<usize>> = HashMap::new();
    for (k, (a, b)) in segments.iter().enumerate() {
        by_edge.entry(*a).or_default().push(k);
        by_edge.entry(*b).or_default().push(k);
    }
    let mut used = vec![false; segments.len()];
    let next_from = |edge: usize, used: &[bool]| -> Option<usize> {
        by_edge.get(&edge).and_then(|ks| ks.iter().copied().find(|k| !used[*k]))
    };

    let mut lines = Vec::new();
    for start in 0..segments.len() {
        if used[start] {
            continue;
        }
        used[start] = true;
        let (first, second) = segments[start];
        let mut chain = vec![first, second];
        let mut tail = second;
        while let Some(k) = next_from(tail, &used) {
            used[k] = true;
            let (a, b) = segments[k];
            tail = if a == tail { b } else { a };
            chain.push(tail);
        }
        let closed = tail == first && chain.len() > 2;
        if !closed {
            let mut head = first;
            let mut front = Vec::new();
            while let Some(k) = next_from(head, &used) {
                used[k] = true;
                let (a, b) = segments[k];
                head = if a == head { b } else { a };
                front.push(head);
            }
            front.reverse();
            front.extend(chain);
            chain = front;
        }
        let mut points: Vec<(f64, f64)> = Vec::with_capacity(chain.len());
        for id in chain {
            let p = edge_point(id);
            if points.last() != Some(&p) {
                points.push(p);
            }
        }
        if closed && points.len() > 1 && points.first() == points.last() {
            points.pop();
        }
        lines.push(Polyline { points, closed });
    }
    lines
}

impl Polyline {
    /// Signed area for closed lines (shoelace formula).
    pub fn area(&self) -> f64 {
        let n = self.points.len();
        if n < 3 {
            return 0.0;
        }
        (0..n)
            .map(|i| {
                let (x0, y0) = self.points[i];
                let (x1, y1) = self.points[(i + 1) % n];
                x0 * y1 - x1 * y0
            })
            .sum::<f64>()
            / 2.0
    }

    /// Even-odd point-in-polygon test.
    pub fn contains(&self, p: (f64, f64)) -> bool {
        let n = self.points.len();
        let mut inside = false;
        for i in 0..n {
            let (xi, yi) = self.points[i];
            let (xj, yj) = self.points[(i + n - 1) % n];
            if (yi > p.1) != (yj > p.1) && p.0 < (xj - xi) * (p.1 - yi) / (yj - yi) + xi {
                inside = !inside;
            }
        }
        inside
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn axis(n: usize, lo: f64, hi: f64) -> Vec<f64> {
        (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
    }

    #[test]
    fn circle_contour() {
        let xs = axis(61, -2.0, 2.0);
        let ys = axis(61, -2.0, 2.0);
        let values: Vec<f64> = ys.iter().flat_map(|y| xs.iter().map(move |x| 1.0 - (x * x + y * y))).collect();
        let lines = marching_squares(&xs, &ys, &values, 0.0);
        assert_eq!(lines.len(), 1);
        let c = &lines[0];
        assert!(c.closed);
        for (x, y) in &c.points {
            assert!(((x * x + y * y).sqrt() - 1.0).abs() < 5e-3);
        }
        assert!((c.area().abs() - std::f64::consts::PI).abs() < 2e-2);
        assert!(c.contains((0.0, 0.0)));
        assert!(!c.contains((1.5, 0.0)));
    }

    #[test]
    fn region_touching_edge_is_closed() {
        let xs = axis(11, 0.0, 1.0);
        let ys = axis(11, 0.0, 1.0);
        let values: Vec<f64> = ys.iter().flat_map(|_| xs.iter().copied()).collect();
        let lines = marching_squares(&xs, &ys, &values, 0.55);
        assert_eq!(lines.len(), 1);
        assert!(lines[0].closed);
        assert!((lines[0].area().abs() - 0.45).abs() < 1e-9);
    }

    #[test]
    fn nothing_above_level() {
        let xs = axis(5, 0.0, 1.0);
        let lines = marching_squares(&xs, &xs, &[0.0; 25], 0.5);
        assert!(lines.is_empty());
        let lines = marching_squares(&xs, &xs, &[f64::NAN; 25], 0.5);
        assert!(lines.is_empty());
    }

    #[test]
    fn two_islands() {
        let xs = axis(41, -3.0, 3.0);
        let values: Vec<f64> = xs
            .iter()
            .flat_map(|y| xs.iter().map(move |x| (-((x - 1.5).powi(2) + y * y)).exp() + (-((x + 1.5).powi(2) + y * y)).exp()))
            .collect();
        let lines = marching_squares(&xs, &xs, &values, 0.5);
        assert_eq!(lines.len(), 2);
        assert!(lines.iter().all(|l| l.closed));
    }
}
