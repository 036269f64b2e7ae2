//! Independent reference computations shared by the integration tests.
//! Nothing here calls into the solvers under test.

#![allow(dead_code)]

/// Thermal entropy from its textbook form `(n+1) ln(n+1) - n ln n`.
pub fn entropy(n: f64) -> f64 {
    if n <= 0.0 {
        0.0
    } else {
        (n + 1.0) * (n + 1.0).ln() - n * n.ln()
    }
}

/// Maximiser of a unimodal function on `[a, b]` by golden-section search.
pub fn golden_max<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, iters: usize) -> (f64, f64) {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..iters {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
        if (b - a).abs() <= 1e-15 * (1.0 + a.abs()) {
            break;
        }
    }
    let x = 0.5 * (a + b);
    (x, f(x))
}

/// One independent mode for the brute-force search: capacity as a function
/// of the energy `e` put into it.
#[derive(Debug, Clone, Copy)]
pub struct BruteMode {
    pub quantum: f64,
    pub gain2: f64,
    pub noise: f64,
}

impl BruteMode {
    pub fn value(&self, e: f64) -> f64 {
        entropy(self.gain2 * e.max(0.0) / self.quantum + self.noise) - entropy(self.noise)
    }
}

/// Maximises `sum_k c_k(e_k)` over `e_k >= 0`, `sum e_k = budget`.
///
/// Exhaustive search over the simplex grid of step `budget / steps`
/// (carried out as an exact max-plus convolution, which visits the same
/// points as enumerating the grid), followed by pairwise exchange
/// refinement with golden-section line searches.
pub fn brute_force_allocation(modes: &[BruteMode], budget: f64, steps: usize) -> (f64, Vec<f64>) {
    let h = budget / steps as f64;
    let table: Vec<Vec<f64>> = modes
        .iter()
        .map(|m| (0..=steps).map(|i| m.value(i as f64 * h)).collect())
        .collect();
    // best[j][i]: best value of the first j+1 modes with i grid units
    let mut best = vec![table[0].clone()];
    let mut choice: Vec<Vec<usize>> = vec![(0..=steps).collect()];
    for t in &table[1..] {
        let prev = best.last().unwrap();
        let mut cur = vec![f64::NEG_INFINITY; steps + 1];
        let mut arg = vec![0; steps + 1];
        for i in 0..=steps {
            for k in 0..=i {
                let v = prev[i - k] + t[k];
                if v > cur[i] {
                    cur[i] = v;
                    arg[i] = k;
                }
            }
        }
        best.push(cur);
        choice.push(arg);
    }
    let mut units = vec![0usize; modes.len()];
    let mut rem = steps;
    for j in (1..modes.len()).rev() {
        units[j] = choice[j][rem];
        rem -= units[j];
    }
    units[0] = rem;
    let mut e: Vec<f64> = units.iter().map(|&u| u as f64 * h).collect();

    let total = |e: &[f64]| e.iter().zip(modes).map(|(&x, m)| m.value(x)).sum::<f64>();
    let mut value = total(&e);
    for _ in 0..200 {
        for a in 0..modes.len() {
            for b in (a + 1)..modes.len() {
                let pool = e[a] + e[b];
                let (x, _) = golden_max(|x| modes[a].value(x) + modes[b].value(pool - x), 0.0, pool, 200);
                let old = modes[a].value(e[a]) + modes[b].value(e[b]);
                let new = modes[a].value(x) + modes[b].value(pool - x);
                if new > old {
                    e[a] = x;
                    e[b] = pool - x;
                }
            }
        }
        let next = total(&e);
        if next - value <= 1e-15 {
            value = next.max(value);
            break;
        }
        value = next;
    }
    (value, e)
}

/// Composite Simpson rule on `n` (even) panels.
pub fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
    let n = n + n % 2;
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + i as f64 * h);
    }
    s * h / 3.0
}

/// Smooth bump supported on `|t - c| < w`.
pub fn bump(c: f64, w: f64) -> impl Fn(f64) -> f64 {
    move |t| {
        let x = (t - c) / w;
        if x.abs() < 1.0 {
            (-1.0 / (1.0 - x * x)).exp()
        } else {
            0.0
        }
    }
}

/// Smooth plateau: 1 on `|t - c| <= inner`, 0 beyond `outer`.
pub fn plateau(c: f64, inner: f64, outer: f64) -> impl Fn(f64) -> f64 {
    let psi = |x: f64| if x > 0.0 { (-1.0 / x).exp() } else { 0.0 };
    move |t| {
        let d = (t - c).abs();
        let x = (outer - d) / (outer - inner);
        psi(x) / (psi(x) + psi(1.0 - x))
    }
}

/// Derivative by fourth-order central differences.
pub fn derivative<F: Fn(f64) -> f64>(f: &F, t: f64, h: f64) -> f64 {
    (-f(t + 2.0 * h) + 8.0 * f(t + h) - 8.0 * f(t - h) + f(t - 2.0 * h)) / (12.0 * h)
}
