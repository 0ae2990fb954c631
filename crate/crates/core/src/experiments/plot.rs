use std::collections::BTreeMap;
use std::path::Path;

use plotters::coord::ranged1d::{AsRangedCoord, ValueFormatter};
use plotters::prelude::*;

use super::config::Experiment;
use super::output::{write_file, CsvTable};
use crate::error::{Error, Result};

/// Figure layout for each experiment's CSV.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlotKind {
    /// Mean joint entropy against `N`, one curve per `(L, W)`, log-scaled.
    AndersonErasure,
    /// Mean many-body entropy against `N`, one curve per `W`, log-scaled.
    MblErasure,
    /// Numeric, closed-form and asymptotic two-particle entropy against `n`.
    TbBands,
    /// Extrapolated erasure factor against `N/L` with the line `1 - N/L`.
    ErasureFactor,
    /// `<s>/N` against `N/L` per `L`, with the line `1 - N/L`.
    BellOracle,
    /// Joint against summed single-particle entropy, with the diagonal.
    TwoParticle,
}

impl PlotKind {
    pub fn for_experiment(e: Experiment) -> Self {
        match e {
            Experiment::AndersonErasure => PlotKind::AndersonErasure,
            Experiment::MblErasure => PlotKind::MblErasure,
            Experiment::TbBands => PlotKind::TbBands,
            Experiment::ErasureFactor => PlotKind::ErasureFactor,
            Experiment::BellOracle => PlotKind::BellOracle,
            Experiment::TwoParticle => PlotKind::TwoParticle,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Mark {
    Line,
    Points,
    LineAndPoints,
}

#[derive(Debug, Clone)]
struct Series {
    label: String,
    mark: Mark,
    points: Vec<(f64, f64)>,
}

#[derive(Debug, Clone)]
struct Figure {
    title: &'static str,
    x_label: &'static str,
    y_label: &'static str,
    log_y: bool,
    series: Vec<Series>,
}

/// Groups rows by the string key and keeps points with finite coordinates.
fn grouped(keys: Vec<String>, xs: Vec<f64>, ys: Vec<f64>) -> BTreeMap<String, Vec<(f64, f64)>> {
    let mut map: BTreeMap<String, Vec<(f64, f64)>> = BTreeMap::new();
    for ((k, x), y) in keys.into_iter().zip(xs).zip(ys) {
        if x.is_finite() && y.is_finite() {
            map.entry(k).or_default().push((x, y));
        }
    }
    for pts in map.values_mut() {
        pts.sort_by(|a, b| a.0.total_cmp(&b.0));
        pts.dedup();
    }
    map
}

fn reference_line(label: &str, from: f64, to: f64, f: impl Fn(f64) -> f64) -> Series {
    Series {
        label: label.into(),
        mark: Mark::Line,
        points: (0..=50).map(|i| from + (to - from) * i as f64 / 50.0).map(|x| (x, f(x))).collect(),
    }
}

fn build_figure(kind: PlotKind, t: &CsvTable) -> Result<Figure> {
    let fig = match kind {
        PlotKind::AndersonErasure => {
            let w = t.strings("W")?;
            let l = t.strings("L")?;
            let keys = l.iter().zip(&w).map(|(l, w)| format!("L={l} W={w}")).collect();
            let series = grouped(keys, t.floats("N")?, t.floats("mean_ee")?)
                .into_iter()
                .map(|(label, points)| Series {
                    label,
                    mark: Mark::LineAndPoints,
                    points: points.into_iter().filter(|p| p.1 > 0.0).collect(),
                })
                .collect();
            Figure {
                title: "Joint entanglement of near-cut Anderson states",
                x_label: "N",
                y_label: "mean EE (bit)",
                log_y: true,
                series,
            }
        }
        PlotKind::MblErasure => {
            let w = t.strings("W_over_2t")?;
            let l = t.strings("L")?;
            let keys = l.iter().zip(&w).map(|(l, w)| format!("L={l} W/2t={w}")).collect();
            let series = grouped(keys, t.floats("N")?, t.floats("mean_ee")?)
                .into_iter()
                .map(|(label, points)| Series {
                    label,
                    mark: Mark::LineAndPoints,
                    points: points.into_iter().filter(|p| p.1 > 0.0).collect(),
                })
                .collect();
            Figure {
                title: "Entanglement of max-overlap interacting eigenstates",
                x_label: "N",
                y_label: "mean EE (bit)",
                log_y: true,
                series,
            }
        }
        PlotKind::TbBands => {
            let n = t.floats("n")?;
            let l = t.strings("L")?;
            let mut series = Vec::new();
            for (label, points) in grouped(l.iter().map(|l| format!("numeric L={l}")).collect(), n.clone(), t.floats("ee_numeric")?) {
                series.push(Series { label, mark: Mark::Points, points });
            }
            let k = vec![String::new(); n.len()];
            for (label, column, mark) in [
                ("closed form", "ee_closed_form", Mark::Points),
                ("asymptotic", "ee_asymptotic", Mark::Line),
            ] {
                if let Some((_, points)) = grouped(k.clone(), n.clone(), t.floats(column)?).into_iter().next() {
                    series.push(Series { label: label.into(), mark, points });
                }
            }
            Figure {
                title: "Two-particle tight-binding entanglement",
                x_label: "n",
                y_label: "EE (bit)",
                log_y: false,
                series,
            }
        }
        PlotKind::ErasureFactor => {
            let model = t.strings("model")?;
            let w = t.strings("W")?;
            let keys = model
                .iter()
                .zip(&w)
                .map(|(m, w)| if w.is_empty() { m.clone() } else { format!("{m} W={w}") })
                .collect();
            let mut series: Vec<Series> = grouped(keys, t.floats("filling")?, t.floats("r_inf")?)
                .into_iter()
                .map(|(label, points)| Series { label, mark: Mark::Points, points })
                .collect();
            series.push(reference_line("1 - N/L", 0.0, 1.0, |x| 1.0 - x));
            Figure {
                title: "Extrapolated erasure factor",
                x_label: "N/L",
                y_label: "r_inf",
                log_y: false,
                series,
            }
        }
        PlotKind::BellOracle => {
            let l = t.floats("L")?;
            let n = t.floats("N")?;
            let mean = t.floats("exact_mean_s")?;
            let x: Vec<f64> = n.iter().zip(&l).map(|(n, l)| n / l).collect();
            let y: Vec<f64> = mean.iter().zip(&n).map(|(m, n)| if *n > 0.0 { m / n } else { f64::NAN }).collect();
            let keys = l.iter().map(|l| format!("L={l}")).collect();
            let mut series: Vec<Series> = grouped(keys, x, y)
                .into_iter()
                .map(|(label, points)| Series { label, mark: Mark::Points, points })
                .collect();
            series.push(reference_line("1 - N/L", 0.0, 1.0, |x| 1.0 - x));
            Figure {
                title: "Bell model: singly occupied pairs per particle",
                x_label: "N/L",
                y_label: "<s>/N",
                log_y: false,
                series,
            }
        }
        PlotKind::TwoParticle => {
            let l = t.strings("L")?;
            let keys = l.iter().map(|l| format!("L={l}")).collect();
            let mut series: Vec<Series> = grouped(keys, t.floats("ee_sum")?, t.floats("ee_joint")?)
                .into_iter()
                .map(|(label, points)| Series { label, mark: Mark::Points, points })
                .collect();
            series.push(reference_line("joint = sum", 0.0, 2.0, |x| x));
            Figure {
                title: "Subadditivity of random orthonormal pairs",
                x_label: "s(lambda1) + s(lambda2) (bit)",
                y_label: "joint EE (bit)",
                log_y: false,
                series,
            }
        }
    };
    if fig.series.iter().all(|s| s.points.is_empty()) {
        return Err(Error::Schema {
            path: Default::default(),
            message: "no plottable points".into(),
        });
    }
    Ok(fig)
}

fn bounds(values: impl Iterator<Item = f64>) -> (f64, f64) {
    values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)))
}

fn padded(lo: f64, hi: f64) -> (f64, f64) {
    if hi > lo {
        let pad = 0.05 * (hi - lo);
        (lo - pad, hi + pad)
    } else {
        (lo - 0.5, hi + 0.5)
    }
}

fn plot_err(e: impl std::fmt::Display) -> Error {
    Error::Plot(e.to_string())
}

fn render<Y>(fig: &Figure, y_spec: Y) -> Result<String>
where
    Y: AsRangedCoord<Value = f64>,
    Y::CoordDescType: ValueFormatter<f64>,
{
    let (x_lo, x_hi) = bounds(fig.series.iter().flat_map(|s| s.points.iter().map(|p| p.0)));
    let (x_lo, x_hi) = padded(x_lo, x_hi);
    let mut svg = String::new();
    {
        let root = SVGBackend::with_string(&mut svg, (900, 600)).into_drawing_area();
        root.fill(&WHITE).map_err(plot_err)?;
        let mut chart = ChartBuilder::on(&root)
            .caption(fig.title, ("sans-serif", 22))
            .margin(15)
            .x_label_area_size(45)
            .y_label_area_size(70)
            .build_cartesian_2d(x_lo..x_hi, y_spec)
            .map_err(plot_err)?;
        chart
            .configure_mesh()
            .x_desc(fig.x_label)
            .y_desc(fig.y_label)
            .draw()
            .map_err(plot_err)?;
        for (i, s) in fig.series.iter().enumerate() {
            let color = Palette99::pick(i).to_rgba();
            let legend_color = color;
            if matches!(s.mark, Mark::Line | Mark::LineAndPoints) {
                chart
                    .draw_series(LineSeries::new(s.points.iter().copied(), color.stroke_width(2)))
                    .map_err(plot_err)?
                    .label(s.label.clone())
                    .legend(move |(x, y)| PathElement::new(vec![(x, y), (x + 20, y)], legend_color.stroke_width(2)));
            }
            if matches!(s.mark, Mark::Points | Mark::LineAndPoints) {
                let series = chart
                    .draw_series(s.points.iter().map(|&p| Circle::new(p, 4, color.filled())))
                    .map_err(plot_err)?;
                if s.mark == Mark::Points {
                    series
                        .label(s.label.clone())
                        .legend(move |(x, y)| Circle::new((x + 10, y), 4, legend_color.filled()));
                }
            }
        }
        chart
            .configure_series_labels()
            .background_style(WHITE.mix(0.8))
            .border_style(BLACK)
            .position(SeriesLabelPosition::UpperRight)
            .draw()
            .map_err(plot_err)?;
        root.present().map_err(plot_err)?;
    }
    Ok(svg)
}

/// Renders the figure for `kind` from the CSV at `csv_path` into `svg_path`.
/// Nothing is written when the CSV is empty or lacks a required column.
pub fn emit_svg(csv_path: &Path, kind: PlotKind, svg_path: &Path) -> Result<()> {
    let table = CsvTable::read(csv_path)?;
    let fig = build_figure(kind, &table).map_err(|e| match e {
        Error::Schema { message, .. } => Error::Schema {
            path: csv_path.to_path_buf(),
            message: format!("{kind:?} plot: {message}"),
        },
        other => other,
    })?;
    let (y_lo, y_hi) = bounds(fig.series.iter().flat_map(|s| s.points.iter().map(|p| p.1)));
    let svg = if fig.log_y {
        render(&fig, (y_lo / 2.0..y_hi * 2.0).log_scale())?
    } else {
        let (lo, hi) = padded(y_lo, y_hi);
        render(&fig, lo..hi)?
    };
    write_file(svg_path, svg.as_bytes())
}
