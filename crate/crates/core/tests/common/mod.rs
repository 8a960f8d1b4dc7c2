#![allow(dead_code)]

use std::sync::Arc;

use rand::Rng;
use tselliptic::product::ProductGrid;
use tselliptic::timescale::{Grid, MeshParams, Segment, TimeScale};

/// Up to four segments, mixing intervals and isolated points, with random
/// gaps. Discrete draws are padded to at least three points.
pub fn random_timescale(rng: &mut impl Rng) -> TimeScale {
    let count = rng.gen_range(1..=4);
    let mut x = rng.gen_range(-2.0..2.0);
    let mut segs = Vec::with_capacity(count + 2);
    for _ in 0..count {
        if rng.gen_bool(0.5) {
            let hi = x + rng.gen_range(0.2..2.0);
            segs.push(Segment::Interval { lo: x, hi });
            x = hi;
        } else {
            segs.push(Segment::Point(x));
        }
        x += rng.gen_range(0.1..1.5);
    }
    while segs.len() < 3 && segs.iter().all(|s| matches!(s, Segment::Point(_))) {
        segs.push(Segment::Point(x));
        x += rng.gen_range(0.1..1.5);
    }
    TimeScale::new(segs).expect("generator produces valid time scales")
}

/// A random time scale discretized with a random step; at most ~60 points.
pub fn random_grid(rng: &mut impl Rng) -> Arc<Grid> {
    loop {
        let ts = random_timescale(rng);
        let h = rng.gen_range(0.12..0.6);
        if let Ok(g) = ts.discretize(&MeshParams::Step(h)) {
            if g.interior_len() > 0 && g.len() <= 60 {
                return Arc::new(g);
            }
        }
    }
}

/// Product of 1 to `max_dim` random grids with a bounded interior size.
pub fn random_product(rng: &mut impl Rng, max_dim: usize) -> Arc<ProductGrid> {
    loop {
        let dim = rng.gen_range(1..=max_dim);
        let axes: Vec<Arc<Grid>> = (0..dim).map(|_| random_grid(rng)).collect();
        let grid = ProductGrid::new(axes).unwrap();
        if grid.interior_len() <= 1500 {
            return Arc::new(grid);
        }
    }
}

pub fn random_vec(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

pub fn ts(s: &str) -> TimeScale {
    s.parse().unwrap()
}

pub fn grid(s: &str, h: f64) -> Arc<Grid> {
    Arc::new(ts(s).discretize(&MeshParams::Step(h)).unwrap())
}
