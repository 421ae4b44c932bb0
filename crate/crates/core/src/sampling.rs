//! Deterministic phase-space sample sets: dyadic radial shells in `R^{2n}`
//! (Shubin geometry) and the product grid of `|x|`- and `|xi|`-shells (SG
//! geometry).

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Sampling parameters. The same config (seed included) always yields the
/// same point set.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplingConfig {
    pub seed: u64,
    pub shell_base: f64,
    pub j_min: i32,
    pub j_max: i32,
    pub dirs_per_shell: usize,
    pub ratio_floor: f64,
    /// Shell-minimum log-log slopes below this count as a decreasing trend.
    pub trend_slope: f64,
    /// Derivative self-bound slopes above this count as growth.
    pub growth_slope: f64,
}

impl SamplingConfig {
    pub fn for_dimension(dim_n: usize) -> Self {
        SamplingConfig {
            seed: 0,
            shell_base: 2.0,
            j_min: 2,
            j_max: 12,
            dirs_per_shell: if dim_n <= 1 { 512 } else { 2048 },
            ratio_floor: 1e-3,
            trend_slope: -0.02,
            growth_slope: 0.05,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    /// Radius `R = shell_base^j_min` beyond which estimates are checked.
    pub fn radius(&self) -> f64 {
        libm::pow(self.shell_base, self.j_min as f64)
    }

    pub fn shell_radius(&self, j: i32) -> f64 {
        libm::pow(self.shell_base, j as f64)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhasePoint {
    pub x: Vec<f64>,
    pub xi: Vec<f64>,
}

impl PhasePoint {
    pub fn x_norm(&self) -> f64 {
        libm::sqrt(self.x.iter().map(|v| v * v).sum())
    }

    pub fn xi_norm(&self) -> f64 {
        libm::sqrt(self.xi.iter().map(|v| v * v).sum())
    }

    pub fn norm(&self) -> f64 {
        libm::sqrt(self.x.iter().chain(self.xi.iter()).map(|v| v * v).sum())
    }

    pub fn sq_norms(&self) -> (f64, f64) {
        (
            self.x.iter().map(|v| v * v).sum(),
            self.xi.iter().map(|v| v * v).sum(),
        )
    }
}

#[derive(Debug, Clone)]
pub struct Shell {
    pub radius: f64,
    pub points: Vec<PhasePoint>,
}

fn unit_vector(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect();
        let norm = libm::sqrt(v.iter().map(|t| t * t).sum::<f64>());
        if norm > 1e-3 && norm <= 1.0 {
            return v.into_iter().map(|t| t / norm).collect();
        }
    }
}

fn split(v: &[f64], r: f64, dim_n: usize) -> PhasePoint {
    PhasePoint {
        x: v[..dim_n].iter().map(|t| t * r).collect(),
        xi: v[dim_n..].iter().map(|t| t * r).collect(),
    }
}

/// Shells `|z| = base^j`, `j_min <= j <= j_max`. Each shell holds the signed
/// coordinate axes, directions confined to the `x`- and `xi`-subspaces, and
/// `dirs_per_shell` seeded random directions.
pub fn radial_shells(cfg: &SamplingConfig, dim_n: usize) -> Vec<Shell> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let d = 2 * dim_n;
    let mut shells = Vec::new();
    for j in cfg.j_min..=cfg.j_max {
        let r = cfg.shell_radius(j);
        let mut points = Vec::with_capacity(cfg.dirs_per_shell + 2 * d + 16);
        for k in 0..d {
            for s in [1.0, -1.0] {
                let mut v = alloc::vec![0.0; d];
                v[k] = s;
                points.push(split(&v, r, dim_n));
            }
        }
        if dim_n > 1 {
            for _ in 0..8 {
                let u = unit_vector(&mut rng, dim_n);
                let mut v = u.clone();
                v.extend(core::iter::repeat_n(0.0, dim_n));
                points.push(split(&v, r, dim_n));
                let mut w = alloc::vec![0.0; dim_n];
                w.extend(u);
                points.push(split(&w, r, dim_n));
            }
        }
        for _ in 0..cfg.dirs_per_shell {
            let v = unit_vector(&mut rng, d);
            points.push(split(&v, r, dim_n));
        }
        shells.push(Shell { radius: r, points });
    }
    shells
}

/// Radial levels used for each factor of the SG product grid: the bounded
/// band `{0, 1/2, 1}` followed by `base^j`, `1 <= j <= j_max`.
pub fn product_levels(cfg: &SamplingConfig) -> Vec<f64> {
    let mut levels = alloc::vec![0.0, 0.5, 1.0];
    for j in 1..=cfg.j_max {
        levels.push(cfg.shell_radius(j));
    }
    levels
}

/// Product grid of `|x|`- and `|xi|`-levels restricted to
/// `|x| + |xi| >= R`, grouped into shells by `max(|x|, |xi|)`.
pub fn product_shells(cfg: &SamplingConfig, dim_n: usize) -> Vec<Shell> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let levels = product_levels(cfg);
    let r_min = cfg.radius();
    let dirs = |rng: &mut ChaCha8Rng| -> Vec<Vec<f64>> {
        let mut out = Vec::new();
        for k in 0..dim_n {
            for s in [1.0, -1.0] {
                let mut v = alloc::vec![0.0; dim_n];
                v[k] = s;
                out.push(v);
            }
        }
        if dim_n > 1 {
            for _ in 0..6 {
                out.push(unit_vector(rng, dim_n));
            }
        }
        out
    };
    let mut shells: Vec<Shell> = Vec::new();
    for &rx in &levels {
        for &rxi in &levels {
            if rx + rxi < r_min {
                continue;
            }
            let key = rx.max(rxi);
            let ux = if rx == 0.0 { alloc::vec![alloc::vec![0.0; dim_n]] } else { dirs(&mut rng) };
            let uxi = if rxi == 0.0 { alloc::vec![alloc::vec![0.0; dim_n]] } else { dirs(&mut rng) };
            let idx = match shells.iter().position(|s| s.radius == key) {
                Some(i) => i,
                None => {
                    shells.push(Shell {
                        radius: key,
                        points: Vec::new(),
                    });
                    shells.len() - 1
                }
            };
            for u in &ux {
                for v in &uxi {
                    shells[idx].points.push(PhasePoint {
                        x: u.iter().map(|t| t * rx).collect(),
                        xi: v.iter().map(|t| t * rxi).collect(),
                    });
                }
            }
        }
    }
    shells.sort_by(|a, b| a.radius.total_cmp(&b.radius));
    shells
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shells_are_deterministic_and_on_radius() {
        let cfg = SamplingConfig::for_dimension(2).with_seed(7);
        let a = radial_shells(&cfg, 2);
        let b = radial_shells(&cfg, 2);
        assert_eq!(a.len(), 11);
        for (sa, sb) in a.iter().zip(&b) {
            assert_eq!(sa.points, sb.points);
            for p in &sa.points {
                assert!((p.norm() / sa.radius - 1.0).abs() < 1e-12);
            }
        }
        let c = radial_shells(&cfg.clone().with_seed(8), 2);
        assert_ne!(a[0].points, c[0].points);
    }

    #[test]
    fn product_grid_covers_band_and_region() {
        let cfg = SamplingConfig::for_dimension(1);
        let shells = product_shells(&cfg, 1);
        let pts: Vec<_> = shells.iter().flat_map(|s| s.points.iter()).collect();
        assert!(pts.iter().all(|p| p.x_norm() + p.xi_norm() >= cfg.radius() - 1e-12));
        assert!(pts.iter().any(|p| p.xi_norm() == 0.0 && p.x_norm() == 4096.0));
        assert!(pts.iter().any(|p| p.xi_norm() == 1.0 && p.x_norm() == 4096.0));
        assert!(pts.iter().any(|p| p.xi_norm() == 0.5));
    }
}
