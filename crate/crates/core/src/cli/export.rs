use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::geometry::{ConvexBody, Frame, Point, ShadowClass};
use crate::median::{MedianEvaluator, MedianSampleSet};
use crate::solver::{inscribe_rhomb, SolverConfig};

/// Wavefront OBJ of a 2-parameter median mesh. Every sample with a median
/// point becomes a vertex; each grid cell whose four corners all have one
/// becomes two triangles.
pub fn median_obj(set: &MedianSampleSet) -> String {
    let r = set.resolution;
    let mut index = vec![0usize; set.samples.len()];
    let mut out = format!("# median along axis {}, {r}x{r} grid\n", set.axis + 1);
    let mut next = 1;
    for (k, s) in set.samples.iter().enumerate() {
        if let Some(p) = &s.point {
            let coords: Vec<String> = p.iter().map(|x| x.to_string()).collect();
            let _ = writeln!(out, "v {}", coords.join(" "));
            index[k] = next;
            next += 1;
        }
    }
    if set.samples.len() == r * r {
        for a in 0..r.saturating_sub(1) {
            for b in 0..r - 1 {
                let q = [index[a * r + b], index[(a + 1) * r + b], index[(a + 1) * r + b + 1], index[a * r + b + 1]];
                if q.iter().all(|&i| i > 0) {
                    let _ = writeln!(out, "f {} {} {}", q[0], q[1], q[2]);
                    let _ = writeln!(out, "f {} {} {}", q[0], q[2], q[3]);
                }
            }
        }
    }
    out
}

/// Raw samples: reduced coordinates, class, chord gap and median point
/// (empty outside the shadow).
pub fn median_csv(set: &MedianSampleSet, dim: usize) -> Result<Vec<u8>> {
    let io = |e: csv::Error| Error::Io(format!("writing CSV: {e}"));
    let mut w = csv::Writer::from_writer(Vec::new());
    let m = dim - 1;
    let mut header: Vec<String> = (1..=m).map(|k| format!("y{k}")).collect();
    header.push("class".into());
    header.push("gap".into());
    header.extend((1..=dim).map(|k| format!("x{k}")));
    w.write_record(&header).map_err(io)?;
    for s in &set.samples {
        let mut row: Vec<String> = s.y.iter().map(|x| x.to_string()).collect();
        row.push(
            match s.class {
                ShadowClass::Interior { .. } => "interior",
                ShadowClass::Boundary { .. } => "boundary",
                ShadowClass::Outside => "outside",
            }
            .into(),
        );
        row.push(s.class.gap().to_string());
        match &s.point {
            Some(p) => row.extend(p.iter().map(|x| x.to_string())),
            None => row.extend(std::iter::repeat_n(String::new(), dim)),
        }
        w.write_record(&row).map_err(io)?;
    }
    w.into_inner().map_err(|e| Error::Io(format!("writing CSV: {e}")))
}

const SVG_SIZE: f64 = 512.0;
const OUTLINE_SAMPLES: usize = 512;

/// Plot of a planar body: its outline, both medians and the inscribed rhomb.
/// The rhomb is left out, with a note, if it cannot be inscribed.
pub fn median_svg(body: &ConvexBody, frame: &Frame, resolution: usize, config: &SolverConfig) -> Result<String> {
    if body.dim() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, found: body.dim() });
    }
    body.check_dim(frame.dim())?;
    let (c, r) = body.bounding_ball();
    let half = 1.1 * r;
    let scale = SVG_SIZE / (2.0 * half);
    let px = |x: &[f64]| format!("{:.3},{:.3}", (x[0] - c[0] + half) * scale, (c[1] + half - x[1]) * scale);
    let polyline = |pts: &[String], stroke: &str, closed: bool| {
        let tag = if closed { "polygon" } else { "polyline" };
        format!(r##"  <{tag} fill="none" stroke="{stroke}" stroke-width="1.5" points="{}"/>"##, pts.join(" "))
    };

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SVG_SIZE}" height="{SVG_SIZE}" viewBox="0 0 {SVG_SIZE} {SVG_SIZE}">"#
    );
    let z0 = body.interior_point();
    let outline = (0..OUTLINE_SAMPLES)
        .map(|k| {
            let a = std::f64::consts::TAU * k as f64 / OUTLINE_SAMPLES as f64;
            body.boundary_scale(z0, &Point::from_column_slice(&[a.cos(), a.sin()])).map(|x| px(x.as_slice()))
        })
        .collect::<Result<Vec<_>>>()?;
    let _ = writeln!(out, "{}", polyline(&outline, "black", true));

    for (axis, colour) in [(0, "#1f77b4"), (1, "#d62728")] {
        let set = MedianEvaluator::new(body, frame, axis)?.median_mesh(resolution)?;
        let mut run: Vec<String> = Vec::new();
        for s in &set.samples {
            match &s.point {
                Some(p) => run.push(px(p)),
                None if !run.is_empty() => {
                    let _ = writeln!(out, "{}", polyline(&run, colour, false));
                    run.clear();
                }
                None => {}
            }
        }
        if !run.is_empty() {
            let _ = writeln!(out, "{}", polyline(&run, colour, false));
        }
    }

    match inscribe_rhomb(body, frame, config) {
        Ok((rhomb, _)) => {
            let v = &rhomb.vertices;
            let corners: Vec<String> = [&v[0], &v[2], &v[1], &v[3]].iter().map(|p| px(p.as_slice())).collect();
            let _ = writeln!(out, "{}", polyline(&corners, "#2ca02c", true));
            let _ = writeln!(
                out,
                r##"  <circle cx="{}" cy="{}" r="3" fill="#2ca02c"/>"##,
                (rhomb.center[0] - c[0] + half) * scale,
                (c[1] + half - rhomb.center[1]) * scale
            );
        }
        Err(e) => {
            let _ = writeln!(out, "  <!-- no rhomb: {} -->", e.to_string().replace("--", "-"));
        }
    }
    out.push_str("</svg>\n");
    Ok(out)
}
