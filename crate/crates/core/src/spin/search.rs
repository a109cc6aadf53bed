/// Golden-section minimization of a unimodal function on `[a, b]`, stopping
/// when the bracket is shorter than `tol`. Returns `(x, f(x))`.
pub fn golden_section_min(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..200 {
        if (b - a).abs() <= tol {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    if fc < fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Minimizes `f(φ)` over a periodic interval `[0, period)` by a uniform grid
/// followed by golden-section refinement around the best grid point.
pub(crate) fn periodic_min(f: impl Fn(f64) -> f64, period: f64, points: usize) -> (f64, f64) {
    let step = period / points as f64;
    let (mut best_x, mut best_f) = (0.0, f64::INFINITY);
    for i in 0..points {
        let x = i as f64 * step;
        let v = f(x);
        if v < best_f {
            best_x = x;
            best_f = v;
        }
    }
    let (x, v) = golden_section_min(&f, best_x - step, best_x + step, 1e-12);
    if v < best_f {
        (x, v)
    } else {
        (best_x, best_f)
    }
}

/// Minimizes `f(φ₁, φ₂)` over `[0, p₁) × [0, p₂)` by a uniform grid and
/// alternating golden-section refinement.
pub(crate) fn periodic_min_2d(
    f: impl Fn(f64, f64) -> f64,
    periods: (f64, f64),
    points: usize,
) -> ((f64, f64), f64) {
    let (s1, s2) = (periods.0 / points as f64, periods.1 / points as f64);
    let mut best = ((0.0, 0.0), f64::INFINITY);
    for i in 0..points {
        let x = i as f64 * s1;
        for j in 0..points {
            let y = j as f64 * s2;
            let v = f(x, y);
            if v < best.1 {
                best = ((x, y), v);
            }
        }
    }
    let ((mut x, mut y), mut v) = best;
    let (mut w1, mut w2) = (s1, s2);
    for _ in 0..40 {
        let prev = v;
        let (nx, vx) = golden_section_min(|t| f(t, y), x - w1, x + w1, 1e-13);
        if vx < v {
            x = nx;
            v = vx;
        }
        let (ny, vy) = golden_section_min(|t| f(x, t), y - w2, y + w2, 1e-13);
        if vy < v {
            y = ny;
            v = vy;
        }
        w1 = (w1 * 0.7).max(1e-9);
        w2 = (w2 * 0.7).max(1e-9);
        if prev - v <= 1e-15 * v.abs().max(1e-300) && w1 < 1e-6 {
            break;
        }
    }
    ((x, y), v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_finds_parabola_minimum() {
        let (x, v) = golden_section_min(|x| (x - 0.3).powi(2) + 1.0, -2.0, 2.0, 1e-12);
        assert!((x - 0.3).abs() < 1e-6);
        assert!((v - 1.0).abs() < 1e-12);
    }

    #[test]
    fn periodic_search_wraps() {
        let (x, v) = periodic_min(|t| -(t - 0.001).cos(), std::f64::consts::TAU, 720);
        assert!((v + 1.0).abs() < 1e-12);
        assert!((x - 0.001).abs() < 1e-5);
    }

    #[test]
    fn two_dimensional_search() {
        let f = |a: f64, b: f64| 2.0 - (a - 1.0).cos() - (b - 2.0 + 0.5 * (a - 1.0)).cos();
        let ((a, b), v) = periodic_min_2d(f, (std::f64::consts::TAU, std::f64::consts::TAU), 200);
        assert!(v < 1e-12);
        assert!((a - 1.0).abs() < 1e-5 && (b - 2.0).abs() < 1e-5);
    }
}
