//! Independent oracles shared by the integration suites.
//!
//! Everything here is deliberately implemented from first principles,
//! sharing no code path with the library: the Student-t CDF through a
//! continued-fraction regularized incomplete beta, and a union-find DBSCAN.

#![allow(dead_code)]

/// ln Γ(x) by the Lanczos approximation (g = 7, 9 terms).
pub fn ln_gamma(x: f64) -> f64 {
    // The published constants carry more digits than f64 holds.
    #[allow(clippy::excessive_precision)]
    const COEFFICIENTS: [f64; 9] = [
        0.999_999_999_999_809_93,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_13,
        -176.615_029_162_140_59,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_571_6e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if x < 0.5 {
        // Reflection formula.
        let pi = std::f64::consts::PI;
        return (pi / (pi * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut acc = COEFFICIENTS[0];
    for (i, &c) in COEFFICIENTS.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    let t = x + 7.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + acc.ln()
}

/// Continued fraction for the incomplete beta (modified Lentz).
fn beta_continued_fraction(a: f64, b: f64, x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    const EPS: f64 = 3e-17;
    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=500 {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() < EPS {
            break;
        }
    }
    h
}

/// Regularized incomplete beta I_x(a, b).
pub fn incomplete_beta(a: f64, b: f64, x: f64) -> f64 {
    assert!((0.0..=1.0).contains(&x));
    if x == 0.0 {
        return 0.0;
    }
    if x == 1.0 {
        return 1.0;
    }
    let ln_front = ln_gamma(a + b) - ln_gamma(a) - ln_gamma(b) + a * x.ln() + b * (1.0 - x).ln();
    let front = ln_front.exp();
    if x < (a + 1.0) / (a + b + 2.0) {
        front * beta_continued_fraction(a, b, x) / a
    } else {
        1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b
    }
}

/// One-sided Student-t CDF, P(T <= t) with `df` degrees of freedom.
pub fn t_cdf_oracle(t: f64, df: f64) -> f64 {
    let x = df / (df + t * t);
    let half_tail = 0.5 * incomplete_beta(df / 2.0, 0.5, x);
    if t >= 0.0 {
        1.0 - half_tail
    } else {
        half_tail
    }
}

/// Reference DBSCAN built on union-find over core points, structurally
/// unlike the library's breadth-first expansion:
/// * a point is core when at least `min_pts` points (itself included) lie
///   within `eps`;
/// * core points within `eps` of each other are unioned; components are
///   numbered ascending by their minimal core index;
/// * a non-core point takes the smallest cluster id among cores within
///   `eps`, or -1 if there is none.
pub fn dbscan_reference(
    n: usize,
    d: impl Fn(usize, usize) -> f64,
    eps: f64,
    min_pts: usize,
) -> Vec<i64> {
    let core: Vec<bool> = (0..n)
        .map(|i| (0..n).filter(|&j| d(i, j) <= eps).count() >= min_pts)
        .collect();

    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut Vec<usize>, i: usize) -> usize {
        if parent[i] != i {
            let root = find(parent, parent[i]);
            parent[i] = root;
        }
        parent[i]
    }
    for (i, &i_core) in core.iter().enumerate() {
        if !i_core {
            continue;
        }
        for (j, &j_core) in core.iter().enumerate().skip(i + 1) {
            if j_core && d(i, j) <= eps {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }

    // Components numbered by minimal core index.
    let mut cluster_of_root: std::collections::BTreeMap<usize, i64> = Default::default();
    let mut next = 0i64;
    for (i, &is_core) in core.iter().enumerate() {
        if is_core {
            let root = find(&mut parent, i);
            cluster_of_root.entry(root).or_insert_with(|| {
                let id = next;
                next += 1;
                id
            });
        }
    }

    (0..n)
        .map(|i| {
            if core[i] {
                cluster_of_root[&find(&mut parent, i)]
            } else {
                (0..n)
                    .filter(|&j| core[j] && d(i, j) <= eps)
                    .map(|j| cluster_of_root[&find(&mut parent, j)])
                    .min()
                    .unwrap_or(-1)
            }
        })
        .collect()
}
