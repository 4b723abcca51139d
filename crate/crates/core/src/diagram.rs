//! Static SVG weight diagrams for rank-2 fixtures: roots, chamber walls,
//! moment images, the signed partition cones of the pair set Z, and circles
//! on the weights with nonzero net multiplicity.
//!
//! Geometry is derived from the invariant form, so angles and lengths are
//! faithful (120° between the simple roots of A2, and so on). Floating
//! point enters only at the final viewport scaling.

use std::fmt::Write as _;

use crate::fixedpoint::FixedPointSet;
use crate::multiplicity::{multiplicity_spectrum, Window};
use crate::rootsys::Weight;
use crate::{Error, Result};

const VIEW: f64 = 1000.0;
const MARGIN: f64 = 0.08;

struct Embed {
    a: f64,
    b: f64,
    c: f64,
}

impl Embed {
    fn new(fps: &FixedPointSet) -> Embed {
        let form = &fps.pair.g.form;
        let g11 = rat_f64(form[0][0]);
        let g12 = rat_f64(form[0][1]);
        let g22 = rat_f64(form[1][1]);
        let a = g11.sqrt();
        Embed { a, b: g12 / a, c: (g22 - g12 * g12 / g11).sqrt() }
    }

    fn point(&self, w: &Weight) -> (f64, f64) {
        let x = w.0[0] as f64;
        let y = w.0[1] as f64;
        (self.a * x + self.b * y, self.c * y)
    }
}

fn rat_f64(r: crate::rootsys::Rat) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

struct Viewport {
    min_x: f64,
    min_y: f64,
    scale: f64,
}

impl Viewport {
    fn fit(points: &[(f64, f64)]) -> Viewport {
        let (mut min_x, mut max_x, mut min_y, mut max_y) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
        for &(x, y) in points {
            min_x = min_x.min(x);
            max_x = max_x.max(x);
            min_y = min_y.min(y);
            max_y = max_y.max(y);
        }
        let span = (max_x - min_x).max(max_y - min_y).max(1.0);
        let pad = span * MARGIN;
        Viewport {
            min_x: min_x - pad,
            min_y: min_y - pad,
            scale: VIEW / (span + 2.0 * pad),
        }
    }

    fn px(&self, (x, y): (f64, f64)) -> (f64, f64) {
        ((x - self.min_x) * self.scale, VIEW - (y - self.min_y) * self.scale)
    }
}

fn fmt_pt((x, y): (f64, f64)) -> String {
    format!("{x:.2},{y:.2}")
}

/// Renders the diagram; computes the spectrum over the window internally.
pub fn render_svg(fps: &FixedPointSet, window: Option<&Window>) -> Result<String> {
    if fps.rank() != 2 {
        return Err(Error::Domain(format!(
            "diagrams are planar; rank {} is unsupported",
            fps.rank()
        )));
    }
    let window = match window {
        Some(w) => w.clone(),
        None => {
            let mut w = Window::symmetric(2, 2);
            for p in &fps.points {
                for i in 0..2 {
                    w.lo[i] = w.lo[i].min(p.mu.0[i] - 2);
                    w.hi[i] = w.hi[i].max(p.mu.0[i] + 2);
                }
            }
            w
        }
    };
    let spectrum = multiplicity_spectrum(fps, &window)?;

    let embed = Embed::new(fps);
    let mut featured: Vec<(f64, f64)> = vec![embed.point(&Weight::zero(2))];
    for p in &fps.points {
        featured.push(embed.point(&p.mu));
    }
    for corner in [
        Weight(vec![window.lo[0], window.lo[1]]),
        Weight(vec![window.lo[0], window.hi[1]]),
        Weight(vec![window.hi[0], window.lo[1]]),
        Weight(vec![window.hi[0], window.hi[1]]),
    ] {
        featured.push(embed.point(&corner));
    }
    let vp = Viewport::fit(&featured);
    let ray = 3.0 * VIEW / vp.scale;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {VIEW} {VIEW}\" \
         width=\"{VIEW}\" height=\"{VIEW}\">"
    );
    svg.push_str(concat!(
        "<defs>",
        "<pattern id=\"hatch-pos\" width=\"8\" height=\"8\" patternTransform=\"rotate(45)\" ",
        "patternUnits=\"userSpaceOnUse\"><line x1=\"0\" y1=\"0\" x2=\"0\" y2=\"8\" ",
        "stroke=\"#d03030\" stroke-width=\"1.2\"/></pattern>",
        "<pattern id=\"hatch-neg\" width=\"8\" height=\"8\" patternTransform=\"rotate(-45)\" ",
        "patternUnits=\"userSpaceOnUse\"><line x1=\"0\" y1=\"0\" x2=\"0\" y2=\"8\" ",
        "stroke=\"#3050d0\" stroke-width=\"1.2\"/></pattern>",
        "<clipPath id=\"frame\"><rect x=\"0\" y=\"0\" width=\"1000\" height=\"1000\"/>",
        "</clipPath></defs>\n",
    ));
    svg.push_str("<rect width=\"1000\" height=\"1000\" fill=\"white\"/>\n");

    // Chamber walls: lines orthogonal to the positive roots, ambient thin,
    // subgroup emphasised.
    for (roots, style) in [
        (&fps.pair.g.positive_roots, "stroke=\"#dddddd\" stroke-width=\"1\""),
        (&fps.pair.k_positive_roots, "stroke=\"#999999\" stroke-width=\"2\""),
    ] {
        for alpha in roots.iter() {
            let (ax, ay) = embed.point(alpha);
            let norm = (ax * ax + ay * ay).sqrt();
            let (dx, dy) = (-ay / norm, ax / norm);
            let p1 = vp.px((dx * ray, dy * ray));
            let p2 = vp.px((-dx * ray, -dy * ray));
            let _ = writeln!(
                svg,
                "<line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" {style}/>",
                p1.0, p1.1, p2.0, p2.1
            );
        }
    }

    // Lattice points.
    for w in window.integral_weights() {
        let p = vp.px(embed.point(&w));
        let _ = writeln!(
            svg,
            "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"2.5\" fill=\"#bbbbbb\"/>",
            p.0, p.1
        );
    }

    // Signed partition cones, one per element of Z.
    svg.push_str("<g clip-path=\"url(#frame)\" fill-opacity=\"0.5\">\n");
    for z in &fps.z {
        let d = &fps.point_data[z.point];
        let w = &fps.pair.weyl_k[z.w];
        let vertex = fps.points[z.point]
            .mu
            .add(&w.apply(&fps.pair.rho_k))
            .add(&d.polar.beta_half)
            .sub(&fps.pair.rho_k)
            .sub(&d.polar.beta_plus_half);
        let sign = if d.polar.s % 2 == 0 { w.sign } else { -w.sign };
        let (fill, stroke) = if sign > 0 {
            ("url(#hatch-pos)", "#d03030")
        } else {
            ("url(#hatch-neg)", "#3050d0")
        };
        let v = embed.point(&vertex);
        let mut dirs: Vec<(f64, f64)> = Vec::new();
        let mut seen: Vec<Weight> = Vec::new();
        for g in &d.polar.b_plus {
            if seen.contains(g) {
                continue;
            }
            seen.push(g.clone());
            let (gx, gy) = embed.point(g);
            let norm = (gx * gx + gy * gy).sqrt();
            dirs.push((-gx / norm, -gy / norm));
        }
        dirs.sort_by(|a, b| {
            a.1.atan2(a.0).partial_cmp(&b.1.atan2(b.0)).expect("finite angles")
        });
        match dirs.len() {
            0 => {
                let p = vp.px(v);
                let _ = writeln!(
                    svg,
                    "<rect x=\"{:.2}\" y=\"{:.2}\" width=\"8\" height=\"8\" fill=\"{stroke}\"/>",
                    p.0 - 4.0,
                    p.1 - 4.0
                );
            }
            1 => {
                let p1 = vp.px(v);
                let p2 = vp.px((v.0 + dirs[0].0 * ray, v.1 + dirs[0].1 * ray));
                let _ = writeln!(
                    svg,
                    "<line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" \
                     stroke=\"{stroke}\" stroke-width=\"4\" stroke-dasharray=\"10 6\"/>",
                    p1.0, p1.1, p2.0, p2.1
                );
            }
            _ => {
                let mut pts = vec![fmt_pt(vp.px(v))];
                for dir in &dirs {
                    pts.push(fmt_pt(vp.px((v.0 + dir.0 * ray, v.1 + dir.1 * ray))));
                }
                let _ = writeln!(
                    svg,
                    "<polygon points=\"{}\" fill=\"{fill}\" stroke=\"{stroke}\" \
                     stroke-width=\"1\"/>",
                    pts.join(" ")
                );
            }
        }
    }
    svg.push_str("</g>\n");

    // Root arrows.
    let origin = vp.px(embed.point(&Weight::zero(2)));
    for alpha in &fps.pair.g.positive_roots {
        let tip = vp.px(embed.point(alpha));
        let _ = writeln!(
            svg,
            "<line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"black\" \
             stroke-width=\"2\"/>",
            origin.0, origin.1, tip.0, tip.1
        );
        let _ = writeln!(
            svg,
            "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"3.5\" fill=\"black\"/>",
            tip.0, tip.1
        );
    }

    // Moment images with labels.
    for p in &fps.points {
        let q = vp.px(embed.point(&p.mu));
        let _ = writeln!(
            svg,
            "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"5\" fill=\"black\"/>\
             <text x=\"{:.2}\" y=\"{:.2}\" font-size=\"22\" fill=\"black\">{}</text>",
            q.0,
            q.1,
            q.0 + 8.0,
            q.1 - 8.0,
            p.id
        );
    }

    // Circles on weights with nonzero net multiplicity.
    for (lam, mult) in &spectrum {
        let q = vp.px(embed.point(lam));
        let _ = writeln!(
            svg,
            "<circle class=\"circled\" cx=\"{:.2}\" cy=\"{:.2}\" r=\"11\" fill=\"none\" \
             stroke=\"black\" stroke-width=\"2.5\"/>",
            q.0, q.1
        );
        if *mult != 1 {
            let _ = writeln!(
                svg,
                "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"20\" fill=\"#d03030\">{mult}</text>",
                q.0 + 12.0,
                q.1 + 20.0
            );
        }
    }

    svg.push_str("</svg>\n");
    Ok(svg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixedpoint::coadjoint_fixed_point_set;
    use crate::rootsys::{build_root_system, make_pair};

    #[test]
    fn su3_diagram_has_four_circled_points() {
        let pair =
            make_pair(build_root_system("A2").unwrap(), &[Weight(vec![4, -2])]).unwrap();
        let fps = coadjoint_fixed_point_set(&pair, &Weight(vec![0, 6]), 1).unwrap();
        let svg = render_svg(&fps, Some(&Window::symmetric(2, 8))).unwrap();
        assert_eq!(svg.matches("class=\"circled\"").count(), 4);
        assert!(svg.starts_with("<svg"));
        // Deterministic output.
        let again = render_svg(&fps, Some(&Window::symmetric(2, 8))).unwrap();
        assert_eq!(svg, again);
    }

    #[test]
    fn adjoint_torus_diagram_annotates_the_double_zero_weight() {
        let pair = make_pair(build_root_system("A2").unwrap(), &[]).unwrap();
        let fps = coadjoint_fixed_point_set(&pair, &Weight(vec![2, 2]), 1).unwrap();
        let svg = render_svg(&fps, Some(&Window::symmetric(2, 6))).unwrap();
        // Eight weights, one of them (zero) with multiplicity two.
        assert_eq!(svg.matches("class=\"circled\"").count(), 7);
        assert!(svg.contains(">2</text>"));
    }

    #[test]
    fn rank_one_is_rejected() {
        let pair = make_pair(build_root_system("A1").unwrap(), &[]).unwrap();
        let fps = coadjoint_fixed_point_set(&pair, &Weight(vec![2]), 1).unwrap();
        assert!(matches!(render_svg(&fps, None), Err(Error::Domain(_))));
    }
}
