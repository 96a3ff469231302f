use std::fmt::Write as _;

use crate::complexity::RegretCurvePoint;

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 500.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 170.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 60.0;

type Series = (&'static str, &'static str, fn(&RegretCurvePoint) -> f64);

/// Line chart of the sweep: Shtarkov complexity and the two worst-case
/// regrets against λ on a log axis.
pub fn render_sweep_svg(rows: &[RegretCurvePoint]) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    s.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");

    let series: [Series; 3] = [
        ("Shtarkov", "#1f77b4", |r| r.shtarkov),
        ("spike-and-tails", "#d62728", |r| r.regret_st),
        ("tilted Jeffreys", "#2ca02c", |r| r.regret_jeffreys),
    ];
    let finite: Vec<&RegretCurvePoint> = rows.iter().filter(|r| r.lam > 0.0 && r.lam.is_finite()).collect();
    let (x_lo, x_hi) = match (finite.first(), finite.last()) {
        (Some(a), Some(b)) if b.lam > a.lam => (a.lam.log10(), b.lam.log10()),
        (Some(a), _) => (a.lam.log10() - 0.5, a.lam.log10() + 0.5),
        _ => (-1.0, 1.0),
    };
    let y_hi = finite
        .iter()
        .flat_map(|r| series.iter().map(move |(_, _, f)| f(r)))
        .filter(|v| v.is_finite())
        .fold(0.0f64, f64::max)
        .max(1e-12)
        * 1.05;

    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let px = |lam: f64| LEFT + (lam.log10() - x_lo) / (x_hi - x_lo) * plot_w;
    let py = |v: f64| TOP + plot_h - (v / y_hi).clamp(0.0, 1.0) * plot_h;

    let _ = writeln!(
        s,
        r#"<rect x="{LEFT}" y="{TOP}" width="{plot_w}" height="{plot_h}" fill="none" stroke="black"/>"#
    );
    for k in (x_lo.floor() as i32)..=(x_hi.ceil() as i32) {
        let lam = 10f64.powi(k);
        let x = px(lam);
        if x < LEFT - 1e-9 || x > LEFT + plot_w + 1e-9 {
            continue;
        }
        let _ = writeln!(
            s,
            r#"<line x1="{x:.2}" y1="{y0:.2}" x2="{x:.2}" y2="{y1:.2}" stroke="black"/><text x="{x:.2}" y="{ty:.2}" text-anchor="middle">{lam}</text>"#,
            y0 = TOP + plot_h,
            y1 = TOP + plot_h + 5.0,
            ty = TOP + plot_h + 20.0
        );
    }
    for k in 0..=4 {
        let v = y_hi * f64::from(k) / 4.0;
        let y = py(v);
        let _ = writeln!(
            s,
            r#"<line x1="{x0:.2}" y1="{y:.2}" x2="{LEFT}" y2="{y:.2}" stroke="black"/><text x="{tx:.2}" y="{ty:.2}" text-anchor="end">{v:.3}</text>"#,
            x0 = LEFT - 5.0,
            tx = LEFT - 8.0,
            ty = y + 4.0
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">lambda</text>"#,
        LEFT + plot_w / 2.0,
        HEIGHT - 15.0
    );
    let _ = writeln!(
        s,
        r#"<text transform="translate(18,{:.2}) rotate(-90)" text-anchor="middle">worst-case regret</text>"#,
        TOP + plot_h / 2.0
    );

    for (i, (name, color, f)) in series.iter().enumerate() {
        let points: Vec<String> = finite
            .iter()
            .filter(|r| f(r).is_finite())
            .map(|r| format!("{:.2},{:.2}", px(r.lam), py(f(r))))
            .collect();
        let _ = writeln!(
            s,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
            points.join(" ")
        );
        let ly = TOP + 20.0 + 20.0 * i as f64;
        let lx = LEFT + plot_w + 15.0;
        let _ = writeln!(
            s,
            r#"<line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{color}" stroke-width="2"/><text x="{:.2}" y="{:.2}">{name}</text>"#,
            lx + 20.0,
            lx + 25.0,
            ly + 4.0
        );
    }
    s.push_str("</svg>\n");
    s
}
