//! Small numerical building blocks shared by the spectral modules: monotone
//! bisection, adaptive Simpson quadrature and compensated summation.

/// Iteration cap for monotone inversion.
pub const BISECTION_MAX_ITER: usize = 200;

/// Failure modes of [`bisect_increasing`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BisectError {
    /// `target` lies outside `[f(lo), f(hi)]`.
    NotBracketed,
    /// The iteration cap was reached before the residual fell below tolerance.
    NoConvergence { iterations: usize },
}

/// Solves `f(x) = target` for an increasing `f` on `[lo, hi]`.
///
/// Stops as soon as `|f(x) - target| <= tol`. When the bracket collapses to
/// adjacent floats the better endpoint is returned if it meets the tolerance.
pub fn bisect_increasing<F>(
    f: F,
    target: f64,
    mut lo: f64,
    mut hi: f64,
    tol: f64,
    max_iter: usize,
) -> Result<f64, BisectError>
where
    F: Fn(f64) -> f64,
{
    let flo = f(lo);
    let fhi = f(hi);
    if (flo - target).abs() <= tol {
        return Ok(lo);
    }
    if (fhi - target).abs() <= tol {
        return Ok(hi);
    }
    if !(flo <= target && target <= fhi) {
        return Err(BisectError::NotBracketed);
    }
    for i in 0..max_iter {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        let r = fm - target;
        if r.abs() <= tol {
            return Ok(mid);
        }
        if mid <= lo || mid >= hi {
            // Bracket exhausted at float resolution.
            let (elo, ehi) = ((f(lo) - target).abs(), (f(hi) - target).abs());
            let best = if elo <= ehi { (lo, elo) } else { (hi, ehi) };
            return if best.1 <= tol {
                Ok(best.0)
            } else {
                Err(BisectError::NoConvergence { iterations: i })
            };
        }
        if r < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Err(BisectError::NoConvergence {
        iterations: max_iter,
    })
}

/// Adaptive Simpson quadrature failed to reach the tolerance within the
/// recursion depth limit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureFailure {
    pub estimate: f64,
}

/// Adaptive Simpson integration of a smooth `f` over `[a, b]`.
pub fn adaptive_simpson<F>(f: F, a: f64, b: f64, tol: f64) -> Result<f64, QuadratureFailure>
where
    F: Fn(f64) -> f64,
{
    const MAX_DEPTH: u32 = 48;
    if a == b {
        return Ok(0.0);
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    let mut failed = false;
    let v = simpson_step(&f, a, b, fa, fm, fb, whole, tol, MAX_DEPTH, &mut failed);
    if failed {
        Err(QuadratureFailure { estimate: v })
    } else {
        Ok(v)
    }
}

#[allow(clippy::too_many_arguments)]
fn simpson_step<F>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
    failed: &mut bool,
) -> f64
where
    F: Fn(f64) -> f64,
{
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    if depth == 0 {
        *failed = true;
        return left + right + delta / 15.0;
    }
    simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1, failed)
        + simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1, failed)
}

/// Neumaier compensated accumulator.
#[derive(Debug, Default, Clone, Copy)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = CompensatedSum::new();
        for x in iter {
            s.add(x);
        }
        s
    }
}

pub(crate) fn mean(xs: &[f64]) -> f64 {
    xs.iter().copied().collect::<CompensatedSum>().value() / xs.len() as f64
}

pub(crate) fn std_dev(xs: &[f64]) -> f64 {
    let m = mean(xs);
    let ss = xs
        .iter()
        .map(|x| (x - m) * (x - m))
        .collect::<CompensatedSum>()
        .value();
    (ss / xs.len() as f64).sqrt()
}

pub(crate) fn min_max(xs: &[f64]) -> (f64, f64) {
    xs.iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| {
            (lo.min(x), hi.max(x))
        })
}
