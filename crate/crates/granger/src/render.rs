//! Human-readable reports, machine formats, and static SVG figures.
//!
//! Text layouts mirror the library's print conventions; everything is
//! byte-stable across runs (no timestamps, '.' decimal point, fixed float
//! rules). SVG is assembled from string templates, no plotting dependency.

use std::path::PathBuf;

use serde::Serialize;

use crate::causality::{glance, tidy, GrangerResult};
use crate::error::{Error, Result};
use crate::lagselect::LagScanResult;
use crate::search::{causality_matrix, Adjustment, SearchResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Text,
    Csv,
    Json,
    Svg,
}

impl std::str::FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "text" => Ok(Format::Text),
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            "svg" => Ok(Format::Svg),
            other => Err(Error::InvalidArgument(format!(
                "unknown format {other:?} (expected text, csv, json, or svg)"
            ))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct RenderOptions {
    pub format: Format,
    /// When set, output is also written to this file.
    pub output_path: Option<PathBuf>,
    pub significant_color: String,
    pub insignificant_color: String,
    pub width_px: u32,
    pub height_px: u32,
}

impl Default for RenderOptions {
    fn default() -> Self {
        RenderOptions {
            format: Format::Text,
            output_path: None,
            significant_color: "#4477AA".into(),
            insignificant_color: "#CCCCCC".into(),
            width_px: 960,
            height_px: 480,
        }
    }
}

impl RenderOptions {
    fn finish(&self, content: String) -> Result<String> {
        if let Some(path) = &self.output_path {
            std::fs::write(path, &content)?;
        }
        Ok(content)
    }

    fn require_path_for_svg(&self) -> Result<()> {
        if self.format == Format::Svg && self.output_path.is_none() {
            return Err(Error::MissingOutputPath);
        }
        Ok(())
    }
}

/// Verdict-line p format: fixed four decimals.
fn fmt_p_fixed(p: f64) -> String {
    format!("{p:.4}")
}

/// Table p format: four decimals down to 5e-5, then a one-significant-digit
/// decimal (so 3.0e-7 prints as 0.0000003), falling back to scientific for
/// vanishing values.
fn fmt_p_table(p: f64) -> String {
    if p == 0.0 {
        return "0".into();
    }
    if p >= 5e-5 {
        return format!("{p:.4}");
    }
    if p < 1e-9 {
        return format!("{p:.0e}");
    }
    let mut exp = p.log10().floor() as i32;
    let mut digit = (p / 10f64.powi(exp)).round();
    if digit >= 10.0 {
        digit = 1.0;
        exp += 1;
    }
    let places = (-exp) as usize;
    format!("{:.*}", places, digit * 10f64.powi(exp))
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

// ---------------------------------------------------------------------------
// granger_result
// ---------------------------------------------------------------------------

fn granger_result_text(r: &GrangerResult) -> String {
    let mut out = String::new();
    out.push_str("Granger Causality Test\n");
    out.push_str("======================\n\n");
    out.push_str(&format!(
        "Observations: {}, Lag order: {}, Significance level: {:.3}\n\n",
        r.n, r.lag, r.alpha
    ));
    out.push_str(&verdict_line(
        &r.x_name,
        &r.y_name,
        r.x_causes_y,
        r.p_value_xy,
    ));
    out.push_str(&verdict_line(
        &r.y_name,
        &r.x_name,
        r.y_causes_x,
        r.p_value_yx,
    ));
    out
}

fn verdict_line(cause: &str, effect: &str, significant: bool, p: f64) -> String {
    if significant {
        format!(
            "{cause} -> {effect}: {cause} Granger-causes {effect} (p = {})\n",
            fmt_p_fixed(p)
        )
    } else {
        format!(
            "{cause} -> {effect}: {cause} does not Granger-cause {effect} (p = {})\n",
            fmt_p_fixed(p)
        )
    }
}

#[derive(Serialize)]
struct GrangerResultDoc<'a> {
    meta: crate::causality::GlanceRow,
    rows: &'a [crate::causality::TidyRow],
}

fn granger_result_csv(r: &GrangerResult) -> Result<String> {
    let rows = tidy(r);
    let mut wtr = csv::Writer::from_writer(Vec::new());
    wtr.write_record([
        "direction",
        "cause",
        "effect",
        "statistic",
        "p.value",
        "significant",
        "lag",
        "alpha",
        "n",
    ])
    .map_err(io_from_csv)?;
    for row in &rows {
        wtr.write_record([
            row.direction.as_str(),
            row.cause.as_str(),
            row.effect.as_str(),
            &format!("{}", row.statistic),
            &format!("{}", row.p_value),
            &format!("{}", row.significant),
            &format!("{}", r.lag),
            &format!("{}", r.alpha),
            &format!("{}", r.n),
        ])
        .map_err(io_from_csv)?;
    }
    finish_csv(wtr)
}

pub fn render_granger_result(result: &GrangerResult, opts: &RenderOptions) -> Result<String> {
    let content = match opts.format {
        Format::Text => granger_result_text(result),
        Format::Csv => granger_result_csv(result)?,
        Format::Json => {
            let doc = GrangerResultDoc {
                meta: glance(result),
                rows: &tidy(result),
            };
            to_json(&doc)?
        }
        Format::Svg => return Err(Error::UnsupportedFormat("svg")),
    };
    opts.finish(content)
}

// ---------------------------------------------------------------------------
// search
// ---------------------------------------------------------------------------

fn lag_list(lags: &[usize]) -> String {
    lags.iter()
        .map(|l| l.to_string())
        .collect::<Vec<_>>()
        .join(", ")
}

fn search_text(r: &SearchResult) -> String {
    let mut out = String::new();
    out.push_str("Granger Causality Search Results\n");
    out.push_str("================================\n\n");
    out.push_str(&format!(
        "{} variables tested: {}\n",
        r.variables.len(),
        r.variables.join(", ")
    ));
    if r.lags_tested.len() == 1 {
        out.push_str(&format!(
            "{} directed pairs examined at lag order {}\n",
            r.pairs_examined, r.lags_tested[0]
        ));
    } else {
        out.push_str(&format!(
            "{} directed pairs examined at lag orders {}\n",
            r.pairs_examined,
            lag_list(&r.lags_tested)
        ));
    }
    out.push_str(&format!(
        "{} significant relationships found (alpha = {})\n",
        r.n_significant(),
        r.alpha
    ));
    if r.adjustment != Adjustment::None {
        out.push_str(&format!("p-value adjustment: {}\n", r.adjustment));
    }
    out.push_str("\nResults (sorted by p-value):\n");

    let adjusted = r.adjustment != Adjustment::None;
    let name_w = |header: &str, get: &dyn Fn(&crate::search::SearchRow) -> usize| {
        r.rows
            .iter()
            .map(get)
            .chain(std::iter::once(header.len()))
            .max()
            .unwrap_or(header.len())
    };
    let cause_w = name_w("cause", &|row| row.cause.len());
    let effect_w = name_w("effect", &|row| row.effect.len());

    out.push_str(&format!(
        "  {:<cause_w$}  {:<effect_w$}  {:>9}  {:>3}  {}\n",
        "cause",
        "effect",
        "p.value",
        "lag",
        if adjusted {
            "p.adjusted  significant"
        } else {
            "significant"
        },
    ));
    for row in &r.rows {
        let tail = if adjusted {
            format!(
                "{:>10}  {}",
                fmt_p_table(row.p_adjusted.expect("adjustment active")),
                if row.significant { "TRUE" } else { "FALSE" }
            )
        } else {
            (if row.significant { "TRUE" } else { "FALSE" }).to_string()
        };
        out.push_str(&format!(
            "  {:<cause_w$}  {:<effect_w$}  {:>9}  {:>3}  {}\n",
            row.cause,
            row.effect,
            fmt_p_table(row.p_value),
            row.lag,
            tail,
        ));
    }
    out
}

#[derive(Serialize)]
struct SearchMeta<'a> {
    variables: &'a [String],
    lags_tested: &'a [usize],
    alpha: f64,
    pairs_examined: usize,
    adjustment: Adjustment,
    n_significant: usize,
}

#[derive(Serialize)]
struct SearchDoc<'a> {
    meta: SearchMeta<'a>,
    rows: &'a [crate::search::SearchRow],
}

fn search_csv(r: &SearchResult) -> Result<String> {
    let adjusted = r.adjustment != Adjustment::None;
    let mut wtr = csv::Writer::from_writer(Vec::new());
    let mut header = vec![
        "cause",
        "effect",
        "p.value",
        "statistic",
        "lag",
        "significant",
    ];
    if adjusted {
        header.insert(3, "p.adjusted");
    }
    wtr.write_record(&header).map_err(io_from_csv)?;
    for row in &r.rows {
        let mut rec = vec![
            row.cause.clone(),
            row.effect.clone(),
            format!("{}", row.p_value),
        ];
        if adjusted {
            rec.push(format!("{}", row.p_adjusted.expect("adjustment active")));
        }
        rec.push(format!("{}", row.statistic));
        rec.push(format!("{}", row.lag));
        rec.push(format!("{}", row.significant));
        wtr.write_record(&rec).map_err(io_from_csv)?;
    }
    finish_csv(wtr)
}

fn search_svg(r: &SearchResult, opts: &RenderOptions) -> String {
    let m = causality_matrix(r);
    let k = m.variables.len();
    let width = opts.width_px as f64;
    let height = opts.height_px as f64;

    let title_h = 30.0;
    let panel_title_h = 22.0;
    let label_w = 70.0;
    let label_h = 24.0;
    let gap = 40.0;
    let margin = 12.0;

    let panel_w = (width - 2.0 * margin - gap) / 2.0;
    let cell_w = (panel_w - label_w) / k as f64;
    let cell_h = (height - title_h - panel_title_h - label_h - 2.0 * margin) / k as f64;

    let mut s = String::new();
    s.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\">\n",
        opts.width_px, opts.height_px, opts.width_px, opts.height_px
    ));
    s.push_str(&format!(
        "  <rect x=\"0\" y=\"0\" width=\"{}\" height=\"{}\" fill=\"#FFFFFF\"/>\n",
        opts.width_px, opts.height_px
    ));
    s.push_str(&format!(
        "  <text x=\"{:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"16\" text-anchor=\"middle\">Causality matrix (alpha = {})</text>\n",
        width / 2.0,
        margin + 14.0,
        r.alpha
    ));

    for (panel, title) in [
        (0usize, "Row Granger-causes column"),
        (1usize, "Column Granger-causes row"),
    ] {
        let x0 = margin + panel as f64 * (panel_w + gap);
        let y0 = margin + title_h;
        s.push_str(&format!(
            "  <text x=\"{:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\">{}</text>\n",
            x0 + label_w + (panel_w - label_w) / 2.0,
            y0 + 14.0,
            title
        ));
        let grid_y = y0 + panel_title_h;
        // Column labels along the top of the grid? Keep them under the grid
        // to leave room for the panel title.
        for (j, name) in m.variables.iter().enumerate() {
            s.push_str(&format!(
                "  <text x=\"{:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">{}</text>\n",
                x0 + label_w + (j as f64 + 0.5) * cell_w,
                grid_y + k as f64 * cell_h + 16.0,
                xml_escape(name)
            ));
        }
        for (i, name) in m.variables.iter().enumerate() {
            s.push_str(&format!(
                "  <text x=\"{:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"end\">{}</text>\n",
                x0 + label_w - 6.0,
                grid_y + (i as f64 + 0.5) * cell_h + 4.0,
                xml_escape(name)
            ));
            for j in 0..k {
                let cx = x0 + label_w + j as f64 * cell_w;
                let cy = grid_y + i as f64 * cell_h;
                // Panel 0 is row-causes-column; panel 1 is the reverse.
                let cell = if panel == 0 {
                    m.cell(i, j)
                } else {
                    m.cell(j, i)
                };
                match cell {
                    None => {
                        s.push_str(&format!(
                            "  <rect x=\"{cx:.1}\" y=\"{cy:.1}\" width=\"{cell_w:.1}\" height=\"{cell_h:.1}\" fill=\"#FFFFFF\" stroke=\"#999999\"/>\n"
                        ));
                    }
                    Some(cell) => {
                        let fill = if cell.significant {
                            &opts.significant_color
                        } else {
                            &opts.insignificant_color
                        };
                        let text_fill = if cell.significant {
                            "#FFFFFF"
                        } else {
                            "#333333"
                        };
                        s.push_str(&format!(
                            "  <rect x=\"{cx:.1}\" y=\"{cy:.1}\" width=\"{cell_w:.1}\" height=\"{cell_h:.1}\" fill=\"{}\" stroke=\"#999999\"/>\n",
                            xml_escape(fill)
                        ));
                        s.push_str(&format!(
                            "  <text x=\"{:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\" fill=\"{}\">{}</text>\n",
                            cx + cell_w / 2.0,
                            cy + cell_h / 2.0 + 4.0,
                            text_fill,
                            fmt_p_table(cell.p_value)
                        ));
                    }
                }
            }
        }
    }
    s.push_str("</svg>\n");
    s
}

pub fn render_search(result: &SearchResult, opts: &RenderOptions) -> Result<String> {
    opts.require_path_for_svg()?;
    let content = match opts.format {
        Format::Text => search_text(result),
        Format::Csv => search_csv(result)?,
        Format::Json => {
            let doc = SearchDoc {
                meta: SearchMeta {
                    variables: &result.variables,
                    lags_tested: &result.lags_tested,
                    alpha: result.alpha,
                    pairs_examined: result.pairs_examined,
                    adjustment: result.adjustment,
                    n_significant: result.n_significant(),
                },
                rows: &result.rows,
            };
            to_json(&doc)?
        }
        Format::Svg => search_svg(result, opts),
    };
    opts.finish(content)
}

// ---------------------------------------------------------------------------
// lag scan
// ---------------------------------------------------------------------------

fn direction_summary(count: usize, total: usize) -> String {
    if count == total {
        format!("Significant at all {total} lag orders")
    } else if count == 0 {
        "Never significant".to_string()
    } else {
        format!("Significant at {count} of {total} lag orders")
    }
}

fn lag_scan_text(r: &LagScanResult) -> String {
    let total = r.lags.len();
    let mut out = String::new();
    out.push_str("Granger Lag Selection Analysis\n");
    out.push_str("==============================\n\n");
    out.push_str(&format!(
        "Variables: {} -> {} (and reverse)\n",
        r.x_name, r.y_name
    ));
    out.push_str(&format!("Lag orders tested: {}\n", lag_list(&r.lags)));
    out.push_str(&format!("Significance level: {}\n\n", r.alpha));
    out.push_str("Summary:\n");
    out.push_str(&format!(
        "  {} -> {}: {}\n",
        r.x_name,
        r.y_name,
        direction_summary(r.n_significant_xy, total)
    ));
    out.push_str(&format!(
        "  {} -> {}: {}\n",
        r.y_name,
        r.x_name,
        direction_summary(r.n_significant_yx, total)
    ));
    out.push_str("\nBest lag (by minimum p-value):\n");
    out.push_str(&format!(
        "  {} -> {}: lag = {} (p = {})\n",
        r.x_name,
        r.y_name,
        r.best_lag_xy,
        fmt_p_table(r.best_p_xy())
    ));
    out.push_str(&format!(
        "  {} -> {}: lag = {} (p = {})\n",
        r.y_name,
        r.x_name,
        r.best_lag_yx,
        fmt_p_table(r.best_p_yx())
    ));
    out
}

#[derive(Serialize)]
struct LagScanMeta<'a> {
    x_name: &'a str,
    y_name: &'a str,
    alpha: f64,
    n: usize,
    lags: &'a [usize],
    best_lag_xy: usize,
    best_lag_yx: usize,
    n_significant_xy: usize,
    n_significant_yx: usize,
}

#[derive(Serialize)]
struct LagScanDoc<'a> {
    meta: LagScanMeta<'a>,
    rows: &'a [crate::lagselect::LagRow],
}

fn lag_scan_csv(r: &LagScanResult) -> Result<String> {
    let mut wtr = csv::Writer::from_writer(Vec::new());
    wtr.write_record([
        "lag",
        "statistic_xy",
        "p_value_xy",
        "significant_xy",
        "statistic_yx",
        "p_value_yx",
        "significant_yx",
        "aic",
        "bic",
    ])
    .map_err(io_from_csv)?;
    for row in &r.per_lag {
        wtr.write_record([
            format!("{}", row.lag),
            format!("{}", row.statistic_xy),
            format!("{}", row.p_value_xy),
            format!("{}", row.significant_xy),
            format!("{}", row.statistic_yx),
            format!("{}", row.p_value_yx),
            format!("{}", row.significant_yx),
            format!("{}", row.aic),
            format!("{}", row.bic),
        ])
        .map_err(io_from_csv)?;
    }
    finish_csv(wtr)
}

fn lag_scan_svg(r: &LagScanResult, opts: &RenderOptions) -> String {
    let width = opts.width_px as f64;
    let height = opts.height_px as f64;
    let margin_left = 64.0;
    let margin_right = 180.0;
    let margin_top = 40.0;
    let margin_bottom = 52.0;
    let plot_w = width - margin_left - margin_right;
    let plot_h = height - margin_top - margin_bottom;

    let min_lag = *r.lags.first().expect("lags nonempty") as f64;
    let max_lag = *r.lags.last().expect("lags nonempty") as f64;
    let x_of = |lag: f64| {
        if max_lag > min_lag {
            margin_left + (lag - min_lag) / (max_lag - min_lag) * plot_w
        } else {
            margin_left + plot_w / 2.0
        }
    };
    let y_of = |p: f64| margin_top + (1.0 - p) * plot_h;

    let mut s = String::new();
    s.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\">\n",
        opts.width_px, opts.height_px, opts.width_px, opts.height_px
    ));
    s.push_str(&format!(
        "  <rect x=\"0\" y=\"0\" width=\"{}\" height=\"{}\" fill=\"#FFFFFF\"/>\n",
        opts.width_px, opts.height_px
    ));
    s.push_str(&format!(
        "  <text x=\"{:.1}\" y=\"24\" font-family=\"sans-serif\" font-size=\"15\" text-anchor=\"middle\">p-values across lag orders: {} and {}</text>\n",
        width / 2.0,
        xml_escape(&r.x_name),
        xml_escape(&r.y_name)
    ));

    // Axes.
    s.push_str(&format!(
        "  <line x1=\"{:.1}\" y1=\"{:.1}\" x2=\"{:.1}\" y2=\"{:.1}\" stroke=\"#000000\"/>\n",
        margin_left,
        margin_top + plot_h,
        margin_left + plot_w,
        margin_top + plot_h
    ));
    s.push_str(&format!(
        "  <line x1=\"{:.1}\" y1=\"{:.1}\" x2=\"{:.1}\" y2=\"{:.1}\" stroke=\"#000000\"/>\n",
        margin_left,
        margin_top,
        margin_left,
        margin_top + plot_h
    ));
    for tick in [0.0, 0.25, 0.5, 0.75, 1.0] {
        s.push_str(&format!(
            "  <text x=\"{:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">{:.2}</text>\n",
            margin_left - 8.0,
            y_of(tick) + 4.0,
            tick
        ));
        s.push_str(&format!(
            "  <line x1=\"{:.1}\" y1=\"{:.1}\" x2=\"{:.1}\" y2=\"{:.1}\" stroke=\"#000000\"/>\n",
            margin_left - 4.0,
            y_of(tick),
            margin_left,
            y_of(tick)
        ));
    }
    for &lag in &r.lags {
        s.push_str(&format!(
            "  <text x=\"{:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">{}</text>\n",
            x_of(lag as f64),
            margin_top + plot_h + 18.0,
            lag
        ));
    }
    s.push_str(&format!(
        "  <text x=\"{:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">lag order</text>\n",
        margin_left + plot_w / 2.0,
        height - 14.0
    ));
    s.push_str(&format!(
        "  <text x=\"18\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 18 {:.1})\">p-value</text>\n",
        margin_top + plot_h / 2.0,
        margin_top + plot_h / 2.0
    ));

    // Significance threshold.
    s.push_str(&format!(
        "  <line x1=\"{:.1}\" y1=\"{:.1}\" x2=\"{:.1}\" y2=\"{:.1}\" stroke=\"#CC3311\" stroke-dasharray=\"6 4\"/>\n",
        margin_left,
        y_of(r.alpha),
        margin_left + plot_w,
        y_of(r.alpha)
    ));
    s.push_str(&format!(
        "  <text x=\"{:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"11\" fill=\"#CC3311\">alpha = {}</text>\n",
        margin_left + plot_w + 8.0,
        y_of(r.alpha) + 4.0,
        r.alpha
    ));

    // Both directions as polylines.
    let points = |get: &dyn Fn(&crate::lagselect::LagRow) -> f64| {
        r.per_lag
            .iter()
            .map(|row| format!("{:.1},{:.1}", x_of(row.lag as f64), y_of(get(row))))
            .collect::<Vec<_>>()
            .join(" ")
    };
    s.push_str(&format!(
        "  <polyline points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"2\"/>\n",
        points(&|row| row.p_value_xy),
        xml_escape(&opts.significant_color)
    ));
    s.push_str(&format!(
        "  <polyline points=\"{}\" fill=\"none\" stroke=\"#222222\" stroke-width=\"2\" stroke-dasharray=\"7 4\"/>\n",
        points(&|row| row.p_value_yx)
    ));
    for row in &r.per_lag {
        s.push_str(&format!(
            "  <circle cx=\"{:.1}\" cy=\"{:.1}\" r=\"3\" fill=\"{}\"/>\n",
            x_of(row.lag as f64),
            y_of(row.p_value_xy),
            xml_escape(&opts.significant_color)
        ));
        s.push_str(&format!(
            "  <circle cx=\"{:.1}\" cy=\"{:.1}\" r=\"3\" fill=\"#222222\"/>\n",
            x_of(row.lag as f64),
            y_of(row.p_value_yx)
        ));
    }

    // Legend.
    let lx = margin_left + plot_w + 8.0;
    let ly = margin_top + 10.0;
    s.push_str(&format!(
        "  <line x1=\"{lx:.1}\" y1=\"{ly:.1}\" x2=\"{:.1}\" y2=\"{ly:.1}\" stroke=\"{}\" stroke-width=\"2\"/>\n",
        lx + 28.0,
        xml_escape(&opts.significant_color)
    ));
    s.push_str(&format!(
        "  <text x=\"{:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"11\">{} -&gt; {}</text>\n",
        lx + 34.0,
        ly + 4.0,
        xml_escape(&r.x_name),
        xml_escape(&r.y_name)
    ));
    let ly2 = ly + 20.0;
    s.push_str(&format!(
        "  <line x1=\"{lx:.1}\" y1=\"{ly2:.1}\" x2=\"{:.1}\" y2=\"{ly2:.1}\" stroke=\"#222222\" stroke-width=\"2\" stroke-dasharray=\"7 4\"/>\n",
        lx + 28.0
    ));
    s.push_str(&format!(
        "  <text x=\"{:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"11\">{} -&gt; {}</text>\n",
        lx + 34.0,
        ly2 + 4.0,
        xml_escape(&r.y_name),
        xml_escape(&r.x_name)
    ));

    s.push_str("</svg>\n");
    s
}

pub fn render_lag_scan(result: &LagScanResult, opts: &RenderOptions) -> Result<String> {
    opts.require_path_for_svg()?;
    let content = match opts.format {
        Format::Text => lag_scan_text(result),
        Format::Csv => lag_scan_csv(result)?,
        Format::Json => {
            let doc = LagScanDoc {
                meta: LagScanMeta {
                    x_name: &result.x_name,
                    y_name: &result.y_name,
                    alpha: result.alpha,
                    n: result.n,
                    lags: &result.lags,
                    best_lag_xy: result.best_lag_xy,
                    best_lag_yx: result.best_lag_yx,
                    n_significant_xy: result.n_significant_xy,
                    n_significant_yx: result.n_significant_yx,
                },
                rows: &result.per_lag,
            };
            to_json(&doc)?
        }
        Format::Svg => lag_scan_svg(result, opts),
    };
    opts.finish(content)
}

// ---------------------------------------------------------------------------

fn to_json<T: Serialize>(doc: &T) -> Result<String> {
    let mut s =
        serde_json::to_string_pretty(doc).map_err(|e| Error::Io(std::io::Error::other(e)))?;
    s.push('\n');
    Ok(s)
}

fn io_from_csv(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Io(std::io::Error::other(format!("{other:?}"))),
    }
}

fn finish_csv(wtr: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = wtr
        .into_inner()
        .map_err(|e| Error::Io(std::io::Error::other(e)))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}
