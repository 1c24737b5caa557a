//! Convex hulls of finite point sets in dimension 1 and 2, their signed
//! distance, and Carathéodory decompositions of hull points.

fn cross(o: &[f64], a: &[f64], b: &[f64]) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

/// Hull vertices: `[min, max]` in 1D, counter-clockwise monotone chain in 2D.
/// Collinear input in 2D yields the two extreme points.
pub fn hull(points: &[Vec<f64>]) -> Vec<Vec<f64>> {
    if points.is_empty() {
        return Vec::new();
    }
    if points[0].len() == 1 {
        let lo = points.iter().map(|p| p[0]).fold(f64::INFINITY, f64::min);
        let hi = points.iter().map(|p| p[0]).fold(f64::NEG_INFINITY, f64::max);
        return if lo == hi { vec![vec![lo]] } else { vec![vec![lo], vec![hi]] };
    }
    let mut pts: Vec<Vec<f64>> = points.to_vec();
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    pts.dedup();
    if pts.len() <= 2 {
        return pts;
    }
    let mut lower: Vec<Vec<f64>> = Vec::new();
    for p in &pts {
        while lower.len() >= 2 && cross(&lower[lower.len() - 2], &lower[lower.len() - 1], p) <= 0.0 {
            lower.pop();
        }
        lower.push(p.clone());
    }
    let mut upper: Vec<Vec<f64>> = Vec::new();
    for p in pts.iter().rev() {
        while upper.len() >= 2 && cross(&upper[upper.len() - 2], &upper[upper.len() - 1], p) <= 0.0 {
            upper.pop();
        }
        upper.push(p.clone());
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

fn seg_dist(p: &[f64], a: &[f64], b: &[f64]) -> f64 {
    let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
    let len2 = dx * dx + dy * dy;
    let t = if len2 > 0.0 {
        (((p[0] - a[0]) * dx + (p[1] - a[1]) * dy) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    ((p[0] - a[0] - t * dx).powi(2) + (p[1] - a[1] - t * dy).powi(2)).sqrt()
}

/// Signed distance to the hull, positive in its interior.
pub fn hull_sdf(points: &[Vec<f64>], p: &[f64]) -> f64 {
    let h = hull(points);
    if p.len() == 1 {
        let (lo, hi) = (h[0][0], h[h.len() - 1][0]);
        return (p[0] - lo).min(hi - p[0]);
    }
    match h.len() {
        1 => -((p[0] - h[0][0]).powi(2) + (p[1] - h[0][1]).powi(2)).sqrt(),
        2 => -seg_dist(p, &h[0], &h[1]),
        n => {
            let d = (0..n)
                .map(|i| seg_dist(p, &h[i], &h[(i + 1) % n]))
                .fold(f64::INFINITY, f64::min);
            let inside = (0..n).all(|i| cross(&h[i], &h[(i + 1) % n], p) > 0.0);
            if inside {
                d
            } else {
                -d
            }
        }
    }
}

/// Vertices plus `k` points spread along the hull edges.
pub fn hull_boundary(points: &[Vec<f64>], k: usize, out: &mut Vec<Vec<f64>>) {
    let h = hull(points);
    out.extend(h.iter().cloned());
    if h.len() < 2 || h[0].len() == 1 {
        return;
    }
    let n = h.len();
    let per = (k / n).max(1);
    for i in 0..n {
        let (a, b) = (&h[i], &h[(i + 1) % n]);
        for j in 1..per {
            let t = j as f64 / per as f64;
            out.push(vec![a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]);
        }
    }
}

/// A decomposition `p = sum lambda_j a_{idx_j}` with at most `dim + 1`
/// vertices, `lambda_j in [0,1]`, `sum lambda_j = 1`. `None` when `p` is
/// outside the hull (beyond a relative tolerance of `1e-12`).
pub fn caratheodory(points: &[Vec<f64>], p: &[f64]) -> Option<(Vec<usize>, Vec<f64>)> {
    const TOL: f64 = 1e-12;
    let index_of = |v: &[f64]| points.iter().position(|q| q.as_slice() == v);
    let h = hull(points);
    if p.len() == 1 {
        let (lo, hi) = (h[0][0], h[h.len() - 1][0]);
        let scale = lo.abs().max(hi.abs()).max(1.0);
        if p[0] < lo - TOL * scale || p[0] > hi + TOL * scale {
            return None;
        }
        if h.len() == 1 {
            return Some((vec![index_of(&h[0])?], vec![1.0]));
        }
        let t = ((p[0] - lo) / (hi - lo)).clamp(0.0, 1.0);
        return Some((vec![index_of(&h[0])?, index_of(&h[1])?], vec![1.0 - t, t]));
    }
    let scale = points
        .iter()
        .flat_map(|q| q.iter().map(|v| v.abs()))
        .fold(1.0f64, f64::max);
    match h.len() {
        1 => {
            if seg_dist(p, &h[0], &h[0]) > TOL * scale {
                return None;
            }
            Some((vec![index_of(&h[0])?], vec![1.0]))
        }
        2 => {
            if seg_dist(p, &h[0], &h[1]) > TOL * scale {
                return None;
            }
            let (dx, dy) = (h[1][0] - h[0][0], h[1][1] - h[0][1]);
            let t = (((p[0] - h[0][0]) * dx + (p[1] - h[0][1]) * dy) / (dx * dx + dy * dy))
                .clamp(0.0, 1.0);
            Some((vec![index_of(&h[0])?, index_of(&h[1])?], vec![1.0 - t, t]))
        }
        n => {
            // Fan triangulation from vertex 0.
            for i in 1..n - 1 {
                let (a, b, c) = (&h[0], &h[i], &h[i + 1]);
                let det = cross(a, b, c);
                let l1 = cross(p, b, c) / det;
                let l2 = cross(a, p, c) / det;
                let l3 = 1.0 - l1 - l2;
                if l1 >= -TOL && l2 >= -TOL && l3 >= -TOL {
                    let lam: Vec<f64> = [l1, l2, l3].iter().map(|v| v.clamp(0.0, 1.0)).collect();
                    let s: f64 = lam.iter().sum();
                    let lam = lam.iter().map(|v| v / s).collect();
                    return Some((vec![index_of(a)?, index_of(b)?, index_of(c)?], lam));
                }
            }
            None
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interval_hull() {
        let pts = vec![vec![0.0], vec![1.0]];
        let (idx, lam) = caratheodory(&pts, &[0.5]).unwrap();
        assert_eq!(idx, vec![0, 1]);
        assert_eq!(lam, vec![0.5, 0.5]);
        assert_eq!(hull_sdf(&pts, &[0.25]), 0.25);
        assert!(caratheodory(&pts, &[1.5]).is_none());
    }

    #[test]
    fn triangle_centroid() {
        let pts = vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]];
        let (idx, lam) = caratheodory(&pts, &[1.0 / 3.0, 1.0 / 3.0]).unwrap();
        assert_eq!(idx.len(), 3);
        for l in &lam {
            assert!((l - 1.0 / 3.0).abs() < 1e-12);
        }
        assert!(hull_sdf(&pts, &[0.2, 0.2]) > 0.0);
        assert!((hull_sdf(&pts, &[-1.0, 0.0]) + 1.0).abs() < 1e-15);
    }

    #[test]
    fn monotone_chain_drops_interior_points() {
        let pts = vec![
            vec![0.0, 0.0],
            vec![2.0, 0.0],
            vec![2.0, 2.0],
            vec![0.0, 2.0],
            vec![1.0, 1.0],
            vec![1.0, 0.0],
        ];
        assert_eq!(hull(&pts).len(), 4);
    }
}
