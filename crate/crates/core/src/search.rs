//! Bounded scalar minimization: uniform grid scan followed by golden-section
//! refinement around the best grid point.

const INV_PHI: f64 = 0.618_033_988_749_894_9; // 1/φ

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Minimum {
    pub x: f64,
    pub value: f64,
}

#[derive(Clone, Copy, Debug)]
pub struct GridGolden {
    /// Number of grid points including both endpoints.
    pub grid_points: usize,
    /// Final bracket width.
    pub tolerance: f64,
}

impl Default for GridGolden {
    fn default() -> Self {
        GridGolden { grid_points: 65, tolerance: 1e-6 }
    }
}

impl GridGolden {
    /// Minimizes `f` on `[lo, hi]`. Ties go to the larger abscissa, and the
    /// endpoints are always candidates, so boundary minima are returned exactly.
    pub fn minimize<E, F: FnMut(f64) -> Result<f64, E>>(&self, lo: f64, hi: f64, mut f: F) -> Result<Minimum, E> {
        let n = self.grid_points.max(2);
        let step = (hi - lo) / (n - 1) as f64;
        let xs: Vec<f64> = (0..n).map(|i| if i == n - 1 { hi } else { lo + step * i as f64 }).collect();
        let mut best = Minimum { x: xs[0], value: f(xs[0])? };
        let mut best_i = 0;
        for (i, &x) in xs.iter().enumerate().skip(1) {
            let v = f(x)?;
            if v <= best.value || best.value.is_nan() {
                best = Minimum { x, value: v };
                best_i = i;
            }
        }
        if best.value == f64::NEG_INFINITY {
            return Ok(best);
        }
        let a = xs[best_i.saturating_sub(1)];
        let b = xs[(best_i + 1).min(n - 1)];
        let refined = golden_section(a, b, self.tolerance, &mut f)?;
        if refined.value < best.value {
            best = refined;
        }
        Ok(best)
    }
}

/// Golden-section search for a minimum of a unimodal `f` on `[a, b]`, stopping
/// once the bracket is narrower than `tolerance`.
pub fn golden_section<E, F: FnMut(f64) -> Result<f64, E>>(mut a: f64, mut b: f64, tolerance: f64, f: &mut F) -> Result<Minimum, E> {
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    while (b - a).abs() > tolerance {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d)?;
        }
    }
    Ok(if fc < fd { Minimum { x: c, value: fc } } else { Minimum { x: d, value: fd } })
}
