//! Line-oriented verification reports: `name value reference stat PASS|FAIL`.

use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StatKind {
    Z,
    Slope,
    Spread,
    Ratio,
    Fraction,
    Count,
    PValue,
}

impl StatKind {
    fn label(self) -> &'static str {
        match self {
            StatKind::Z => "z",
            StatKind::Slope => "slope",
            StatKind::Spread => "spread",
            StatKind::Ratio => "ratio",
            StatKind::Fraction => "fraction",
            StatKind::Count => "count",
            StatKind::PValue => "p",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckLine {
    pub name: String,
    pub value: f64,
    pub reference: f64,
    pub kind: StatKind,
    pub stat: f64,
    pub pass: bool,
}

impl fmt::Display for CheckLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {:.10e} {:.10e} {}={:.4} {}",
            self.name,
            self.value,
            self.reference,
            self.kind.label(),
            self.stat,
            if self.pass { "PASS" } else { "FAIL" }
        )
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Report {
    pub lines: Vec<CheckLine>,
}

impl Report {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, name: impl Into<String>, value: f64, reference: f64, kind: StatKind, stat: f64, pass: bool) {
        self.lines.push(CheckLine { name: name.into(), value, reference, kind, stat, pass });
    }

    pub fn extend(&mut self, other: Report) {
        self.lines.extend(other.lines);
    }

    pub fn passed(&self) -> bool {
        self.lines.iter().all(|l| l.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckLine> {
        self.lines.iter().filter(|l| !l.pass)
    }

    pub fn pass_fraction(&self) -> f64 {
        if self.lines.is_empty() {
            return 1.0;
        }
        self.lines.iter().filter(|l| l.pass).count() as f64 / self.lines.len() as f64
    }

    /// Holm step-down over the p-value lines at familywise level `level`.
    /// Each such line gets its threshold as `reference` and a recomputed
    /// verdict; other lines are untouched.
    pub fn apply_holm(&mut self, level: f64) {
        let mut idx: Vec<usize> = (0..self.lines.len()).filter(|&i| self.lines[i].kind == StatKind::PValue).collect();
        idx.sort_by(|&a, &b| self.lines[a].stat.total_cmp(&self.lines[b].stat));
        let m = idx.len();
        let mut rejecting = true;
        for (rank, &i) in idx.iter().enumerate() {
            let threshold = level / (m - rank) as f64;
            rejecting &= self.lines[i].stat < threshold;
            self.lines[i].reference = threshold;
            self.lines[i].pass = !rejecting;
        }
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for line in &self.lines {
            writeln!(f, "{line}")?;
        }
        Ok(())
    }
}

/// `(a - b) / sqrt(se_a² + se_b²)`. The error is floored at `1e-12·max(|a|,|b|)`
/// so that two exact values differing by rounding score zero-ish.
pub fn z_score(a: f64, se_a: f64, b: f64, se_b: f64) -> f64 {
    let floor = 1e-12 * a.abs().max(b.abs());
    let se = (se_a * se_a + se_b * se_b).sqrt().max(floor);
    if se == 0.0 {
        if a == b {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        (a - b) / se
    }
}

/// Mean and standard error of the mean.
pub fn mean_and_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Kolmogorov–Smirnov distance between the empirical law of `xs` and `cdf`.
pub fn ks_statistic<F: Fn(f64) -> f64>(xs: &[f64], cdf: F) -> f64 {
    let mut sorted = xs.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    sorted.iter().enumerate().fold(0.0, |d, (i, &x)| {
        let f = cdf(x);
        d.max(f - i as f64 / n).max((i + 1) as f64 / n - f)
    })
}

/// Two-sample Kolmogorov–Smirnov distance.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> f64 {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j, mut d) = (0, 0, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

/// Asymptotic p-value `P(D > d)` for effective sample size `n_eff`
/// (`n` one-sample, `nm/(n+m)` two-sample), with Stephens' correction.
pub fn ks_p_value(d: f64, n_eff: f64) -> f64 {
    let sq = n_eff.sqrt();
    let lambda = (sq + 0.12 + 0.11 / sq) * d;
    if lambda < 0.2 {
        return 1.0;
    }
    let mut sum = 0.0;
    for k in 1..=100 {
        let term = (-2.0 * (k * k) as f64 * lambda * lambda).exp();
        sum += if k % 2 == 1 { term } else { -term };
        if term < 1e-16 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}
