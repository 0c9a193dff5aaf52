//! Minimal deterministic SVG writer: fixed element order, fixed two-decimal
//! coordinates, no timestamps or generator metadata, so identical inputs
//! produce byte-identical files.

pub mod power;
pub mod zipper;

/// Categorical colors shared by both figures.
pub const COLOR_PROP: &str = "#d95f02";
pub const COLOR_LINEAR: &str = "#1b9e77";
pub const COLOR_REJECT: &str = "#d62728";
pub const COLOR_MISS: &str = "#ff9896";
pub const COLOR_NEUTRAL: &str = "#555555";

pub(crate) fn fmt2(v: f64) -> String {
    let s = format!("{:.2}", v);
    // normalize negative zero so equal geometry is equal text
    if s == "-0.00" {
        "0.00".to_string()
    } else {
        s
    }
}

pub(crate) struct SvgDoc {
    width: f64,
    height: f64,
    body: String,
}

impl SvgDoc {
    pub fn new(width: f64, height: f64) -> Self {
        SvgDoc {
            width,
            height,
            body: String::new(),
        }
    }

    pub fn line(&mut self, x1: f64, y1: f64, x2: f64, y2: f64, stroke: &str, width: f64) {
        self.body.push_str(&format!(
            "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"{stroke}\" stroke-width=\"{}\"/>\n",
            fmt2(x1), fmt2(y1), fmt2(x2), fmt2(y2), fmt2(width)
        ));
    }

    pub fn dashed_line(&mut self, x1: f64, y1: f64, x2: f64, y2: f64, stroke: &str) {
        self.body.push_str(&format!(
            "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"{stroke}\" stroke-width=\"1.00\" stroke-dasharray=\"4 3\"/>\n",
            fmt2(x1), fmt2(y1), fmt2(x2), fmt2(y2)
        ));
    }

    pub fn polyline(&mut self, pts: &[(f64, f64)], stroke: &str, width: f64) {
        if pts.is_empty() {
            return;
        }
        let coords: Vec<String> = pts
            .iter()
            .map(|(x, y)| format!("{},{}", fmt2(*x), fmt2(*y)))
            .collect();
        self.body.push_str(&format!(
            "<polyline points=\"{}\" fill=\"none\" stroke=\"{stroke}\" stroke-width=\"{}\"/>\n",
            coords.join(" "),
            fmt2(width)
        ));
    }

    pub fn circle(&mut self, cx: f64, cy: f64, r: f64, fill: &str) {
        self.body.push_str(&format!(
            "<circle cx=\"{}\" cy=\"{}\" r=\"{}\" fill=\"{fill}\"/>\n",
            fmt2(cx),
            fmt2(cy),
            fmt2(r)
        ));
    }

    pub fn rect_outline(&mut self, x: f64, y: f64, w: f64, h: f64) {
        self.body.push_str(&format!(
            "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"#333333\" stroke-width=\"1.00\"/>\n",
            fmt2(x), fmt2(y), fmt2(w), fmt2(h)
        ));
    }

    pub fn text(&mut self, x: f64, y: f64, size: f64, anchor: &str, content: &str) {
        self.body.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"{}\" text-anchor=\"{anchor}\" fill=\"#222222\">{}</text>\n",
            fmt2(x),
            fmt2(y),
            fmt2(size),
            xml_escape(content)
        ));
    }

    pub fn finish(self) -> String {
        format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\">\n<rect width=\"{}\" height=\"{}\" fill=\"#ffffff\"/>\n{}</svg>\n",
            fmt2(self.width),
            fmt2(self.height),
            fmt2(self.width),
            fmt2(self.height),
            fmt2(self.width),
            fmt2(self.height),
            self.body
        )
    }
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

/// Linear data-to-pixel mapping.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Scale {
    pub d0: f64,
    pub d1: f64,
    pub p0: f64,
    pub p1: f64,
}

impl Scale {
    pub fn map(&self, v: f64) -> f64 {
        if self.d1 == self.d0 {
            return 0.5 * (self.p0 + self.p1);
        }
        self.p0 + (v - self.d0) / (self.d1 - self.d0) * (self.p1 - self.p0)
    }
}

/// Short tick label: trims trailing zeros from a fixed 2-decimal format.
pub(crate) fn tick_label(v: f64) -> String {
    let s = format!("{:.2}", v);
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".to_string()
    } else {
        s.to_string()
    }
}
