//! Scalar helpers shared by several modules.

/// Correctly rounded sum of a sequence of floats (Shewchuk's partials
/// algorithm, as in Python's `math.fsum`). The result does not depend on
/// the order of the inputs.
pub fn fsum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut partials: Vec<f64> = Vec::new();
    for mut x in values {
        let mut i = 0;
        for j in 0..partials.len() {
            let mut y = partials[j];
            if x.abs() < y.abs() {
                std::mem::swap(&mut x, &mut y);
            }
            let hi = x + y;
            let lo = y - (hi - x);
            if lo != 0.0 {
                partials[i] = lo;
                i += 1;
            }
            x = hi;
        }
        partials.truncate(i);
        partials.push(x);
    }
    // round the partials to a single value, handling the half-way case
    let mut n = partials.len();
    if n == 0 {
        return 0.0;
    }
    n -= 1;
    let mut hi = partials[n];
    let mut lo = 0.0;
    while n > 0 {
        n -= 1;
        let x = hi;
        let y = partials[n];
        hi = x + y;
        let yr = hi - x;
        lo = y - yr;
        if lo != 0.0 {
            break;
        }
    }
    if n > 0 && ((lo < 0.0 && partials[n - 1] < 0.0) || (lo > 0.0 && partials[n - 1] > 0.0)) {
        let y = lo * 2.0;
        let x = hi + y;
        let yr = x - hi;
        if y == yr {
            hi = x;
        }
    }
    hi
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_and_order_independent() {
        let v = [1e100, 1.0, -1e100, 1e-3, 0.1, 0.2, 0.3];
        let a = fsum(v);
        let mut r = v;
        r.reverse();
        assert_eq!(a, fsum(r));
        assert!((a - 1.601).abs() < 1e-15);
        assert_eq!(fsum([0.1; 10]), 1.0);
        assert_eq!(fsum(std::iter::empty()), 0.0);
    }
}
