//! Spacetime diagrams as SVG: one row per step, time running downwards.

use std::fmt::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::experiments::RunTrace;
use crate::graph::Configuration;
use crate::names::Label;
use crate::observables::{window_entropies, EntropyVariant};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Overlay {
    #[default]
    None,
    /// Red shading proportional to the window entropy of radius `r`.
    LocalEntropy(usize),
}

/// Fill colors for the `a` and `b` halves of each layer's stripe.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColorScheme {
    pub layers: Vec<(String, String)>,
    pub empty: String,
    pub stroke: String,
    pub overlay: Overlay,
}

impl ColorScheme {
    /// Port colors: green for `a`, blue for `b` on layer 1.
    pub fn ports() -> Self {
        Self {
            layers: vec![
                ("#2ca02c".into(), "#1f77b4".into()),
                ("#ff7f0e".into(), "#9467bd".into()),
                ("#8c564b".into(), "#e377c2".into()),
                ("#bcbd22".into(), "#17becf".into()),
            ],
            empty: "#ffffff".into(),
            stroke: "#000000".into(),
            overlay: Overlay::None,
        }
    }

    /// Matter in grey, radiation in red, expansion particles in green and blue.
    pub fn matter() -> Self {
        Self {
            layers: vec![
                ("#555555".into(), "#555555".into()),
                ("#d62728".into(), "#d62728".into()),
                ("#2ca02c".into(), "#1f77b4".into()),
            ],
            ..Self::ports()
        }
    }

    pub fn with_overlay(mut self, overlay: Overlay) -> Self {
        self.overlay = overlay;
        self
    }

    fn color(&self, layer: usize, b: bool) -> &str {
        let (ca, cb) = &self.layers[(layer - 1) % self.layers.len()];
        if b {
            cb
        } else {
            ca
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Geometry {
    /// Width of the widest row.
    pub width: f64,
    pub row_height: f64,
}

impl Default for Geometry {
    fn default() -> Self {
        Self { width: 800.0, row_height: 6.0 }
    }
}

pub fn spacetime_svg<L: Label>(trace: &RunTrace<L>, scheme: &ColorScheme, geo: Geometry) -> Result<String> {
    if trace.configs.is_empty() {
        return Err(Error::Domain("trace was run without keeping configurations".into()));
    }
    spacetime_svg_configs(&trace.configs, scheme, geo)
}

pub fn spacetime_svg_configs<L: Label>(
    rows: &[Configuration<L>],
    scheme: &ColorScheme,
    geo: Geometry,
) -> Result<String> {
    if rows.is_empty() {
        return Err(Error::Domain("no configurations to draw".into()));
    }
    let max = rows.iter().map(Configuration::len).max().unwrap_or(1).max(1);
    let cell = geo.width / max as f64;
    let h = geo.row_height;
    let heat: Option<Vec<Vec<f64>>> = match scheme.overlay {
        Overlay::None => None,
        Overlay::LocalEntropy(r) => {
            Some(rows.iter().map(|x| window_entropies(x, r, EntropyVariant::Slots)).collect::<Result<_>>()?)
        }
    };
    let heat_max = heat.as_ref().map(|h| h.iter().flatten().cloned().fold(0.0, f64::max)).unwrap_or(0.0);

    let mut s = String::new();
    let total_h = h * rows.len() as f64;
    writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#).unwrap();
    writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w}" height="{total_h}" viewBox="0 0 {w} {total_h}">"#,
        w = geo.width
    )
    .unwrap();
    for (t, x) in rows.iter().enumerate() {
        let y = h * t as f64;
        let x0 = (geo.width - cell * x.len() as f64) / 2.0;
        let layers = x.layers();
        let stripe = h / layers as f64;
        writeln!(s, r#"<g data-step="{t}" data-size="{}">"#, x.len()).unwrap();
        for (i, v) in x.vertices().iter().enumerate() {
            let cx = x0 + cell * i as f64;
            writeln!(
                s,
                r#"<rect x="{cx}" y="{y}" width="{cell}" height="{h}" fill="{}" stroke="{}" stroke-width="0.2"/>"#,
                scheme.empty, scheme.stroke
            )
            .unwrap();
            for layer in 1..=layers {
                let sy = y + stripe * (layer - 1) as f64;
                for (on, right) in [(v.a(layer), false), (v.b(layer), true)] {
                    if on {
                        let hx = if right { cx + cell / 2.0 } else { cx };
                        writeln!(
                            s,
                            r#"<rect x="{hx}" y="{sy}" width="{}" height="{stripe}" fill="{}"/>"#,
                            cell / 2.0,
                            scheme.color(layer, right)
                        )
                        .unwrap();
                    }
                }
            }
            if let Some(heat) = &heat {
                let e = heat[t][i];
                if e > 0.0 && heat_max > 0.0 {
                    writeln!(
                        s,
                        r##"<rect x="{cx}" y="{y}" width="{cell}" height="{h}" fill="#ff0000" fill-opacity="{:.4}"/>"##,
                        0.8 * e / heat_max
                    )
                    .unwrap();
                }
            }
        }
        writeln!(s, "</g>").unwrap();
    }
    writeln!(s, "</svg>").unwrap();
    Ok(s)
}
