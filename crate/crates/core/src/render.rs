//! Deterministic rasters and vector scenes of residue plots.
//!
//! Pixel placement uses integer arithmetic throughout. Floating point only
//! appears when SVG coordinates are printed.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rayon::prelude::*;

use crate::pattern::{admits, bundle_parameter, vertex_on_bundle, BundleVertex};
use crate::residue::{farey_fractions, qr_mod, Modulus};
use crate::{Error, Result};

const MIN_SCATTER_DIM: usize = 16;

/// Row-major grayscale raster, origin top-left.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Canvas {
    pub width: usize,
    pub height: usize,
    pub pixels: Vec<u8>,
}

impl Canvas {
    pub fn new(width: usize, height: usize, fill: u8) -> Self {
        Self { width, height, pixels: vec![fill; width * height] }
    }

    pub fn get(&self, col: usize, row: usize) -> u8 {
        self.pixels[row * self.width + col]
    }

    pub fn set(&mut self, col: usize, row: usize, v: u8) {
        self.pixels[row * self.width + col] = v;
    }
}

/// Column and row of the point `(x, r)` of a plot modulo `m`, with residue
/// 0 on the bottom row. A half-range plot stretches `[0, m/2)` over the full width.
pub fn pixel_of(x: u64, r: u64, m: u64, half_range: bool, width: usize, height: usize) -> (usize, usize) {
    let stretch = if half_range { 2 } else { 1 };
    let col = (stretch * x as u128 * width as u128 / m as u128) as usize;
    let level = (r as u128 * height as u128 / m as u128) as usize;
    (col, height - 1 - level)
}

/// Number of abscissas plotted: `x < m/2` when `half_range`, otherwise all of `[0, m)`.
pub fn plotted_len(m: u64, half_range: bool) -> u64 {
    if half_range {
        m.div_ceil(2)
    } else {
        m
    }
}

/// Black points `(x, x² mod m)` on a white background.
pub fn render_scatter(m: Modulus, width: usize, height: usize, half_range: bool) -> Result<Canvas> {
    if width < MIN_SCATTER_DIM || height < MIN_SCATTER_DIM {
        return Err(Error::InvalidArgument(format!(
            "canvas must be at least {MIN_SCATTER_DIM}×{MIN_SCATTER_DIM}, got {width}×{height}"
        )));
    }
    let mv = m.get();
    let mut canvas = Canvas::new(width, height, 255);
    for x in 0..plotted_len(mv, half_range) {
        let (col, row) = pixel_of(x, qr_mod(x as i128, m), mv, half_range, width, height);
        canvas.set(col, row, 0);
    }
    Ok(canvas)
}

/// Grayscale grid of `(x² + y²) mod m`, sampling `x = ⌊u·m/size⌋` per column
/// and `y = ⌊v·m/size⌋` per row, shaded `⌊f·255/(m−1)⌋`.
pub fn render_sum_squares(m: Modulus, size: usize) -> Result<Canvas> {
    if size < 2 {
        return Err(Error::InvalidArgument(format!("grid size must be at least 2, got {size}")));
    }
    let mv = m.get();
    let samples: Vec<u64> = (0..size)
        .map(|u| (u as u128 * mv as u128 / size as u128) as u64)
        .map(|x| qr_mod(x as i128, m))
        .collect();
    let mut canvas = Canvas::new(size, size, 0);
    canvas
        .pixels
        .par_chunks_mut(size)
        .enumerate()
        .for_each(|(row, line)| {
            let y2 = samples[row];
            for (px, &x2) in line.iter_mut().zip(&samples) {
                let f = (x2 as u128 + y2 as u128) % mv as u128;
                *px = (f * 255 / (mv as u128 - 1)) as u8;
            }
        });
    Ok(canvas)
}

/// A vertex marker that passed exact bundle membership.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Marker {
    pub vertex: BundleVertex,
}

/// One bundle curve, split into polylines at the wraps of `mod 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct Curve {
    pub n: i64,
    pub polylines: Vec<Vec<(f64, f64)>>,
}

/// Vector overlay: scatter points, bundle curves and vertex markers, all in
/// normalized coordinates `X = x/m`, `Y = (x² mod m)/m`.
#[derive(Clone, Debug, PartialEq)]
pub struct Scene {
    pub width: usize,
    pub height: usize,
    pub modulus: u64,
    /// `(x, x² mod m)`; normalized by `modulus` on output.
    pub points: Vec<(u64, u64)>,
    pub curves: Vec<Curve>,
    pub markers: Vec<Marker>,
    pub s: i128,
    /// Denominators left out because the bundle does not cover them.
    pub skipped: Vec<u64>,
}

impl Scene {
    pub fn empty(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            modulus: 1,
            points: Vec::new(),
            curves: Vec::new(),
            markers: Vec::new(),
            s: 0,
            skipped: Vec::new(),
        }
    }
}

/// Samples `(2nX − sX²) mod 1` over `X ∈ [0, 1]`, at least 512 samples per
/// unit and more for steep curves.
pub fn bundle_curve(s: i128, n: i64, samples: Option<usize>) -> Curve {
    let slope = 2 * (n.unsigned_abs() as u128) + 2 * s.unsigned_abs();
    let count = samples.unwrap_or_else(|| (slope as usize * 16).clamp(512, 1 << 16));
    let mut polylines = Vec::new();
    let mut current: Vec<(f64, f64)> = Vec::new();
    let mut last_floor = None;
    for t in 0..=count {
        let x = t as f64 / count as f64;
        let v = 2.0 * n as f64 * x - s as f64 * x * x;
        let fl = v.floor();
        if last_floor.is_some_and(|l| l != fl) && !current.is_empty() {
            polylines.push(std::mem::take(&mut current));
        }
        last_floor = Some(fl);
        current.push((x, v - fl));
    }
    if current.len() > 1 {
        polylines.push(current);
    }
    polylines.retain(|p| p.len() > 1);
    Curve { n, polylines }
}

/// Scatter points plus the predicted vertices of every reduced `a/b` with
/// `b ≤ max_denominator` and the bundle curves through them.
///
/// Denominators outside the set admitted by `lambda` are recorded in
/// `skipped`; every marker kept has passed exact membership.
pub fn overlay_predictions(
    m: Modulus,
    max_denominator: u64,
    lambda: u128,
    width: usize,
    height: usize,
) -> Result<Scene> {
    let mv = m.get();
    if (max_denominator as u128).pow(2) >= mv as u128 {
        return Err(Error::ModulusNotAboveDenominatorSquare { m: mv, b: max_denominator });
    }
    let s = bundle_parameter(m, lambda)?;
    let mut skipped = Vec::new();
    let mut markers = Vec::new();
    for b in 1..=max_denominator {
        if !admits(lambda, b) {
            skipped.push(b);
        }
    }
    for frac in farey_fractions(max_denominator)? {
        if !admits(lambda, frac.denom()) {
            continue;
        }
        markers.extend(
            vertex_on_bundle(m, lambda, frac)?
                .into_iter()
                .map(|vertex| Marker { vertex }),
        );
    }
    markers.sort_by_key(|mk| (mk.vertex.frac.denom(), mk.vertex.frac.numer(), mk.vertex.k));

    let max_n = markers.iter().map(|mk| mk.vertex.n.unsigned_abs()).max().unwrap_or(0) as i64;
    let curves = (-max_n..=max_n).map(|n| bundle_curve(s, n, None)).collect();
    let points = (0..mv).map(|x| (x, qr_mod(x as i128, m))).collect();
    Ok(Scene { width, height, modulus: mv, points, curves, markers, s, skipped })
}

/// Binary PGM (`P5`, maxval 255).
pub fn encode_pgm(canvas: &Canvas) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", canvas.width, canvas.height).into_bytes();
    out.extend_from_slice(&canvas.pixels);
    out
}

/// Parses the exact layout produced by [`encode_pgm`].
pub fn decode_pgm(bytes: &[u8]) -> Result<Canvas> {
    let bad = |why: &str| Error::Pgm(why.to_string());
    let mut fields = Vec::with_capacity(4);
    let mut pos = 0;
    while fields.len() < 4 {
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if pos >= bytes.len() {
            return Err(bad("truncated header"));
        }
        fields.push(std::str::from_utf8(&bytes[start..pos]).map_err(|_| bad("non-ascii header"))?);
        pos += 1;
    }
    if fields[0] != "P5" {
        return Err(bad("missing P5 magic"));
    }
    let num = |s: &str| s.parse::<usize>().map_err(|_| bad("bad number in header"));
    let (width, height, maxval) = (num(fields[1])?, num(fields[2])?, num(fields[3])?);
    if maxval != 255 {
        return Err(bad("maxval must be 255"));
    }
    let body = &bytes[pos..];
    if body.len() != width * height {
        return Err(bad("pixel data length mismatch"));
    }
    Ok(Canvas { width, height, pixels: body.to_vec() })
}

fn write_file(path: &Path, data: &[u8]) -> Result<()> {
    fs::write(path, data).map_err(|source| Error::Io { path: path.to_path_buf(), source })
}

pub fn write_pgm(canvas: &Canvas, path: impl AsRef<Path>) -> Result<()> {
    write_file(path.as_ref(), &encode_pgm(canvas))
}

/// SVG 1.1 document: points as unit squares, then curves by ascending `n`,
/// then markers by `(b, a, k)`. Coordinates carry six decimals.
pub fn encode_svg(scene: &Scene) -> String {
    let (w, h) = (scene.width as f64, scene.height as f64);
    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\">",
        scene.width, scene.height, scene.width, scene.height
    );
    let _ = writeln!(out, "<rect x=\"0.000000\" y=\"0.000000\" width=\"{w:.6}\" height=\"{h:.6}\" fill=\"white\"/>");

    if !scene.points.is_empty() {
        out.push_str("<g fill=\"black\">\n");
        let m = scene.modulus as f64;
        for &(x, r) in &scene.points {
            let px = x as f64 / m * w;
            let py = (1.0 - r as f64 / m) * h - 1.0;
            let _ = writeln!(out, "<rect x=\"{px:.6}\" y=\"{py:.6}\" width=\"1.000000\" height=\"1.000000\"/>");
        }
        out.push_str("</g>\n");
    }

    if !scene.curves.is_empty() {
        let mut curves: Vec<&Curve> = scene.curves.iter().collect();
        curves.sort_by_key(|c| c.n);
        out.push_str("<g fill=\"none\" stroke=\"steelblue\" stroke-width=\"0.5\">\n");
        for curve in curves {
            for line in &curve.polylines {
                let pts: Vec<String> = line
                    .iter()
                    .map(|&(x, y)| format!("{:.6},{:.6}", x * w, (1.0 - y) * h))
                    .collect();
                let _ = writeln!(out, "<polyline data-n=\"{}\" points=\"{}\"/>", curve.n, pts.join(" "));
            }
        }
        out.push_str("</g>\n");
    }

    if !scene.markers.is_empty() {
        let mut markers: Vec<&Marker> = scene.markers.iter().collect();
        markers.sort_by_key(|mk| (mk.vertex.frac.denom(), mk.vertex.frac.numer(), mk.vertex.k));
        out.push_str("<g fill=\"none\" stroke=\"crimson\" stroke-width=\"1\">\n");
        for mk in markers {
            let v = &mk.vertex;
            let _ = writeln!(
                out,
                "<circle data-frac=\"{}\" data-k=\"{}\" data-n=\"{}\" cx=\"{:.6}\" cy=\"{:.6}\" r=\"3.000000\"/>",
                v.frac,
                v.k,
                v.n,
                v.x.to_f64() * w,
                (1.0 - v.y.to_f64()) * h
            );
        }
        out.push_str("</g>\n");
    }
    out.push_str("</svg>\n");
    out
}

pub fn write_svg(scene: &Scene, path: impl AsRef<Path>) -> Result<()> {
    write_file(path.as_ref(), encode_svg(scene).as_bytes())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(v: u64) -> Modulus {
        Modulus::new(v).unwrap()
    }

    #[test]
    fn scatter_mod_four() {
        let c = render_scatter(m(4), 16, 16, false).unwrap();
        let mut expected = Canvas::new(16, 16, 255);
        // (0,0) (1,1) (2,0) (3,1)
        for (col, row) in [(0, 15), (4, 11), (8, 15), (12, 11)] {
            expected.set(col, row, 0);
        }
        assert_eq!(c, expected);
    }

    #[test]
    fn scatter_rejects_small_canvas() {
        assert!(render_scatter(m(4), 15, 16, false).is_err());
        assert!(render_scatter(m(4), 16, 8, true).is_err());
    }

    #[test]
    fn half_range_limits() {
        assert_eq!(plotted_len(7, true), 4);
        assert_eq!(plotted_len(8, true), 4);
        assert_eq!(plotted_len(8, false), 8);
    }

    #[test]
    fn sum_squares_two() {
        let c = render_sum_squares(m(2), 2).unwrap();
        assert_eq!(c.pixels, vec![0, 255, 255, 0]);
        assert!(render_sum_squares(m(2), 1).is_err());
    }

    #[test]
    fn pgm_bytes() {
        let c = Canvas { width: 2, height: 1, pixels: vec![0, 255] };
        assert_eq!(encode_pgm(&c), b"P5\n2 1\n255\n\x00\xff".to_vec());
        assert_eq!(decode_pgm(&encode_pgm(&c)).unwrap(), c);
        assert!(decode_pgm(b"P6\n2 1\n255\n\x00\xff").is_err());
        assert!(decode_pgm(b"P5\n2 1\n255\n\x00").is_err());
    }

    #[test]
    fn empty_svg_is_minimal_document() {
        let doc = encode_svg(&Scene::empty(100, 50));
        assert!(doc.starts_with("<?xml"));
        assert!(doc.contains("width=\"100\" height=\"50\""));
        assert!(doc.trim_end().ends_with("</svg>"));
        assert!(!doc.contains("<circle") && !doc.contains("<polyline"));
    }

    #[test]
    fn curve_splits_on_wrap() {
        let c = bundle_curve(0, 1, None);
        // Y = 2X mod 1 wraps at X = 1/2 and at X = 1
        assert_eq!(c.polylines.len(), 2);
        let straight = bundle_curve(0, 0, None);
        assert_eq!(straight.polylines.len(), 1);
        assert!(straight.polylines[0].iter().all(|&(_, y)| y == 0.0));
        assert!(c.polylines.iter().map(|p| p.len()).sum::<usize>() >= 512);
    }

    #[test]
    fn overlay_with_unit_denominator() {
        let scene = overlay_predictions(m(20179), 1, 5040, 64, 64).unwrap();
        let pos: Vec<_> = scene
            .markers
            .iter()
            .map(|mk| (mk.vertex.x.to_string(), mk.vertex.y.to_string()))
            .collect();
        assert_eq!(pos, [("0".to_string(), "0".to_string()), ("1".to_string(), "0".to_string())]);
    }
}
