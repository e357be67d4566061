//! Literal scalar reference implementations. Nothing here calls library
//! arithmetic; library types only carry data in and out.

#![allow(dead_code, clippy::needless_range_loop, clippy::manual_clamp)]

use polardm::{ChannelStack, MosaicImage, Plane};

/// Whole-sample mirror: -k -> k, (n-1)+k -> (n-1)-k.
pub fn mirror(k: isize, n: usize) -> usize {
    let n = n as isize;
    let mut k = k;
    loop {
        if k < 0 {
            k = -k;
        } else if k >= n {
            k = 2 * (n - 1) - k;
        } else {
            return k as usize;
        }
    }
}

/// Row-major grid of doubles with mirrored reads.
#[derive(Clone, Debug)]
pub struct Grid {
    pub w: usize,
    pub h: usize,
    pub v: Vec<f64>,
}

impl Grid {
    pub fn new(w: usize, h: usize) -> Self {
        Grid {
            w,
            h,
            v: vec![0.0; w * h],
        }
    }

    pub fn from_plane(p: &Plane) -> Self {
        Grid {
            w: p.width(),
            h: p.height(),
            v: p.data().to_vec(),
        }
    }

    pub fn at(&self, i: isize, j: isize) -> f64 {
        self.v[mirror(i, self.h) * self.w + mirror(j, self.w)]
    }

    pub fn set(&mut self, i: usize, j: usize, x: f64) {
        self.v[i * self.w + j] = x;
    }
}

/// Channel in degrees at (i, j) for a 2x2 tile given in degrees.
pub fn channel(tile: [[u32; 2]; 2], i: isize, j: isize) -> u32 {
    tile[i.rem_euclid(2) as usize][j.rem_euclid(2) as usize]
}

pub fn tile_degrees(img: &MosaicImage) -> [[u32; 2]; 2] {
    let t = img.pattern().tile();
    [
        [t[0][0].degrees(), t[0][1].degrees()],
        [t[1][0].degrees(), t[1][1].degrees()],
    ]
}

fn slot(deg: u32) -> usize {
    match deg {
        0 => 0,
        45 => 1,
        90 => 2,
        135 => 3,
        _ => unreachable!(),
    }
}

fn orth_deg(deg: u32) -> u32 {
    (deg + 90) % 180
}

/// Four planes in the order 0, 45, 90, 135.
pub type Stack = [Grid; 4];

pub fn stack_from(s: &ChannelStack) -> Stack {
    let p = s.planes();
    [
        Grid::from_plane(&p[0]),
        Grid::from_plane(&p[1]),
        Grid::from_plane(&p[2]),
        Grid::from_plane(&p[3]),
    ]
}

pub fn max_abs_diff(a: &Stack, b: &Stack) -> f64 {
    let mut m: f64 = 0.0;
    for c in 0..4 {
        for (x, y) in a[c].v.iter().zip(&b[c].v) {
            m = m.max((x - y).abs());
        }
    }
    m
}

#[derive(Clone, Copy, Debug)]
pub enum Rule {
    Logistic,
    Ternary(f64),
}

/// omega for the first direction given v1 - v2.
fn first_weight(k: f64, rule: Rule, v1: f64, v2: f64) -> f64 {
    match rule {
        Rule::Logistic => {
            let mut x = k * (v1 - v2);
            if x > 700.0 {
                x = 700.0;
            }
            if x < -700.0 {
                x = -700.0;
            }
            1.0 / (1.0 + x.exp())
        }
        Rule::Ternary(t) => {
            let d = v1 - v2;
            if d > t {
                0.0
            } else if d < -t {
                1.0
            } else {
                0.5
            }
        }
    }
}

pub fn steepness(img: &MosaicImage, k0: f64) -> f64 {
    let d = img.plane().data();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &x in d {
        lo = lo.min(x);
        hi = hi.max(x);
    }
    k0 * (hi - lo) / 255.0
}

/// Stage one: orthogonal-channel estimate at every pixel.
pub fn orth_plane(m: &Grid, k: f64, rule: Rule) -> Grid {
    let r2 = 2.0f64.sqrt();
    let mut out = Grid::new(m.w, m.h);
    for i in 0..m.h as isize {
        for j in 0..m.w as isize {
            let c = m.at(i, j);
            let dd = (m.at(i + 1, j + 1) - m.at(i - 1, j - 1)) / (2.0 * r2);
            let dd2 = (m.at(i + 2, j + 2) + m.at(i - 2, j - 2) - 2.0 * c) / 8.0;
            let da = (m.at(i - 1, j + 1) - m.at(i + 1, j - 1)) / (2.0 * r2);
            let da2 = (m.at(i - 2, j + 2) + m.at(i + 2, j - 2) - 2.0 * c) / 8.0;
            let vd = dd.abs() + (2.0 * r2 * dd2).abs();
            let va = da.abs() + (2.0 * r2 * da2).abs();
            let wd = first_weight(k, rule, vd, va);
            let wa = 1.0 - wd;
            let mean_d = 0.5 * (m.at(i + 1, j + 1) + m.at(i - 1, j - 1));
            let mean_a = 0.5 * (m.at(i + 1, j - 1) + m.at(i - 1, j + 1));
            out.set(
                i as usize,
                j as usize,
                wd * (mean_d - dd2) + wa * (mean_a - da2),
            );
        }
    }
    out
}

/// Stage two: horizontal- and vertical-neighbor channel estimates.
pub fn hv_planes(m: &Grid, orth: &Grid, k: f64, rule: Rule) -> (Grid, Grid) {
    let mut delta = Grid::new(m.w, m.h);
    for n in 0..m.v.len() {
        delta.v[n] = m.v[n] - orth.v[n];
    }
    let mut ih = Grid::new(m.w, m.h);
    let mut iv = Grid::new(m.w, m.h);
    for i in 0..m.h as isize {
        for j in 0..m.w as isize {
            let d = |a: isize, b: isize| delta.at(i + a, j + b);
            let dh = (d(0, 1) - d(0, -1)) / 2.0;
            let dh2 = (d(0, 2) + d(0, -2) - 2.0 * d(0, 0)) / 4.0;
            let dv = (d(1, 0) - d(-1, 0)) / 2.0;
            let dv2 = (d(2, 0) + d(-2, 0) - 2.0 * d(0, 0)) / 4.0;
            let vh = dh.abs() + (2.0 * dh2).abs();
            let vv = dv.abs() + (2.0 * dv2).abs();
            let wh = first_weight(k, rule, vh, vv);
            let wv = 1.0 - wh;

            let mh2 = (m.at(i, j + 2) + m.at(i, j - 2) - 2.0 * m.at(i, j)) / 4.0;
            let mv2 = (m.at(i + 2, j) + m.at(i - 2, j) - 2.0 * m.at(i, j)) / 4.0;
            let ihh = 0.5 * (m.at(i, j + 1) + m.at(i, j - 1));
            let ihv = 0.5 * (orth.at(i + 1, j) + orth.at(i - 1, j));
            let ivh = 0.5 * (orth.at(i, j + 1) + orth.at(i, j - 1));
            let ivv = 0.5 * (m.at(i + 1, j) + m.at(i - 1, j));
            ih.set(i as usize, j as usize, wh * (ihh - mh2) + wv * (ihv - mv2));
            iv.set(i as usize, j as usize, wh * (ivh - mh2) + wv * (ivv - mv2));
        }
    }
    (ih, iv)
}

pub fn lepd(img: &MosaicImage, k0: f64, rule: Rule) -> Stack {
    let m = Grid::from_plane(img.plane());
    let tile = tile_degrees(img);
    let k = steepness(img, k0);
    let orth = orth_plane(&m, k, rule);
    let (ih, iv) = hv_planes(&m, &orth, k, rule);
    let mut out: Stack = std::array::from_fn(|_| Grid::new(m.w, m.h));
    for i in 0..m.h {
        for j in 0..m.w {
            let (si, sj) = (i as isize, j as isize);
            let own = channel(tile, si, sj);
            out[slot(own)].set(i, j, m.at(si, sj));
            out[slot(orth_deg(own))].set(i, j, orth.at(si, sj));
            out[slot(channel(tile, si, sj + 1))].set(i, j, ih.at(si, sj));
            out[slot(channel(tile, si + 1, sj))].set(i, j, iv.at(si, sj));
        }
    }
    out
}

/// Dense mirror-padded convolution with [[1,2,1],[2,4,2],[1,2,1]] / 4.
pub fn convolve_f(g: &Grid) -> Grid {
    let f = [[1.0, 2.0, 1.0], [2.0, 4.0, 2.0], [1.0, 2.0, 1.0]];
    let mut out = Grid::new(g.w, g.h);
    for i in 0..g.h as isize {
        for j in 0..g.w as isize {
            let mut s = 0.0;
            for a in -1..=1isize {
                for b in -1..=1isize {
                    s += f[(a + 1) as usize][(b + 1) as usize] * g.at(i + a, j + b);
                }
            }
            out.set(i as usize, j as usize, s / 4.0);
        }
    }
    out
}

pub fn calibrate(img: &MosaicImage, est: &Stack) -> Stack {
    let m = Grid::from_plane(img.plane());
    let tile = tile_degrees(img);
    let r2 = 2.0f64.sqrt();
    let w_hv = r2 / (1.0 + 2.0 * r2);
    let w_orth = 1.0 / (1.0 + 2.0 * r2);
    let mut out: Stack = std::array::from_fn(|_| Grid::new(m.w, m.h));
    for x in [0u32, 45, 90, 135] {
        for c in [0u32, 45, 90, 135] {
            if c == x {
                continue;
            }
            let mut sparse = Grid::new(m.w, m.h);
            for i in 0..m.h {
                for j in 0..m.w {
                    if channel(tile, i as isize, j as isize) == x {
                        let n = i * m.w + j;
                        sparse.v[n] = m.v[n] - est[slot(c)].v[n];
                    }
                }
            }
            let filled = convolve_f(&sparse);
            let w = if c == orth_deg(x) { w_orth } else { w_hv };
            for n in 0..m.v.len() {
                out[slot(x)].v[n] += w * (est[slot(c)].v[n] + filled.v[n]);
            }
        }
    }
    out
}

pub fn leic(img: &MosaicImage, k0: f64, rule: Rule) -> Stack {
    calibrate(img, &lepd(img, k0, rule))
}

/// Sparse channel plane: mosaic samples of `deg`, zero elsewhere.
pub fn sparse(img: &MosaicImage, deg: u32) -> Grid {
    let m = Grid::from_plane(img.plane());
    let tile = tile_degrees(img);
    let mut g = Grid::new(m.w, m.h);
    for i in 0..m.h {
        for j in 0..m.w {
            if channel(tile, i as isize, j as isize) == deg {
                g.set(i, j, m.v[i * m.w + j]);
            }
        }
    }
    g
}

pub fn bilinear(img: &MosaicImage) -> Stack {
    [0u32, 45, 90, 135].map(|d| convolve_f(&sparse(img, d)))
}

/// Nearest lattice sample; the lower index wins ties unless it is outside.
pub fn nearest(img: &MosaicImage) -> Stack {
    let m = Grid::from_plane(img.plane());
    let tile = tile_degrees(img);
    [0u32, 45, 90, 135].map(|d| {
        let mut g = Grid::new(m.w, m.h);
        for i in 0..m.h {
            for j in 0..m.w {
                let mut best = (usize::MAX, 0, 0);
                for a in -1..=1isize {
                    for b in -1..=1isize {
                        let (ri, rj) = (i as isize + a, j as isize + b);
                        if ri < 0 || rj < 0 || ri >= m.h as isize || rj >= m.w as isize {
                            continue;
                        }
                        if channel(tile, ri, rj) != d {
                            continue;
                        }
                        let dist = (a * a + b * b) as usize;
                        let key = (dist, ri as usize, rj as usize);
                        if key < best {
                            best = key;
                        }
                    }
                }
                g.set(i, j, m.at(best.1 as isize, best.2 as isize));
            }
        }
        g
    })
}

/// Tensor-product Catmull-Rom: 2D weights over a 4x4 neighborhood of
/// lattice samples, mirror padded.
pub fn bicubic(img: &MosaicImage) -> Stack {
    let m = Grid::from_plane(img.plane());
    let tile = tile_degrees(img);
    let cw = [-1.0 / 16.0, 9.0 / 16.0, 9.0 / 16.0, -1.0 / 16.0];
    let offs = [-3isize, -1, 1, 3];
    [0u32, 45, 90, 135].map(|d| {
        let (pr, pc) = {
            let mut p = (0, 0);
            for a in 0..2 {
                for b in 0..2 {
                    if tile[a][b] == d {
                        p = (a, b);
                    }
                }
            }
            p
        };
        let mut g = Grid::new(m.w, m.h);
        for i in 0..m.h {
            for j in 0..m.w {
                let row_on = i % 2 == pr;
                let col_on = j % 2 == pc;
                let (si, sj) = (i as isize, j as isize);
                let rows: Vec<(isize, f64)> = if row_on {
                    vec![(si, 1.0)]
                } else {
                    offs.iter().zip(cw).map(|(&o, w)| (si + o, w)).collect()
                };
                let cols: Vec<(isize, f64)> = if col_on {
                    vec![(sj, 1.0)]
                } else {
                    offs.iter().zip(cw).map(|(&o, w)| (sj + o, w)).collect()
                };
                let mut s = 0.0;
                for &(r, wr) in &rows {
                    for &(c, wc) in &cols {
                        s += wr * wc * m.at(r, c);
                    }
                }
                g.set(i, j, s);
            }
        }
        g
    })
}

/// SSIM as the mean over every valid 11x11 window, each window evaluated
/// directly with normalized Gaussian weights (sigma 1.5).
pub fn ssim(a: &Plane, b: &Plane, l: f64) -> f64 {
    let (w, h) = a.dims();
    let n = 11usize;
    let sigma: f64 = 1.5;
    let mut g = vec![vec![0.0; n]; n];
    let mut total = 0.0;
    for u in 0..n {
        for v in 0..n {
            let du = u as f64 - 5.0;
            let dv = v as f64 - 5.0;
            g[u][v] = (-(du * du + dv * dv) / (2.0 * sigma * sigma)).exp();
            total += g[u][v];
        }
    }
    let c1 = (0.01 * l).powi(2);
    let c2 = (0.03 * l).powi(2);
    let mut acc = 0.0;
    let mut count = 0usize;
    for i in 0..=h - n {
        for j in 0..=w - n {
            let (mut mx, mut my) = (0.0, 0.0);
            for u in 0..n {
                for v in 0..n {
                    let wt = g[u][v] / total;
                    mx += wt * a.get(i + u, j + v);
                    my += wt * b.get(i + u, j + v);
                }
            }
            let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
            for u in 0..n {
                for v in 0..n {
                    let wt = g[u][v] / total;
                    let dx = a.get(i + u, j + v) - mx;
                    let dy = b.get(i + u, j + v) - my;
                    sxx += wt * dx * dx;
                    syy += wt * dy * dy;
                    sxy += wt * dx * dy;
                }
            }
            acc += ((2.0 * mx * my + c1) * (2.0 * sxy + c2))
                / ((mx * mx + my * my + c1) * (sxx + syy + c2));
            count += 1;
        }
    }
    acc / count as f64
}
