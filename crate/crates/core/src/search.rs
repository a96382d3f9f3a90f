//! Golden-section search for one-dimensional minimization.

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Minimum of a unimodal `f` on `[a, b]`, located to within `tol`.
/// Returns the abscissa and the function value there.
pub fn golden_section<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, tol: f64) -> (f64, f64) {
    let (mut a, mut b) = if a <= b { (a, b) } else { (b, a) };
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while b - a > tol {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    if fc <= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_parabola_vertex() {
        let (x, fx) = golden_section(|x| (x - 0.3) * (x - 0.3) + 2.0, -1.0, 2.0, 1e-8);
        assert!((x - 0.3).abs() < 1e-7);
        assert!((fx - 2.0).abs() < 1e-12);
    }

    #[test]
    fn tolerates_infinite_values_near_an_end() {
        let f = |x: f64| if x < 0.1 { f64::INFINITY } else { (x - 0.6).abs() };
        let (x, _) = golden_section(f, 0.05, 3.0, 1e-6);
        assert!((x - 0.6).abs() < 1e-5);
    }

    #[test]
    fn endpoint_minimum_is_approached() {
        let (x, _) = golden_section(|x| x, 0.0, 1.0, 1e-6);
        assert!(x < 1e-5);
    }
}
