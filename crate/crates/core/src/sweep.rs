//! Parameter sweeps, figure presets and CSV output.

use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::coupler::{compute_coefficients, Coefficients, CouplerParams};
use crate::error::{Error, Result};
use crate::witnesses::{self, CoherentInput};

pub const CSV_HEADER: &str = "axis,axis_value,witness,value,display_value";
pub const DEFAULT_POINTS: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    /// Interaction length `L`.
    Length,
    /// `|Γ|·L`.
    RescaledLength,
}

impl Axis {
    pub fn label(self) -> &'static str {
        match self {
            Axis::Length => "L",
            Axis::RescaledLength => "GammaL",
        }
    }

    /// Interaction length for an axis value.
    pub fn length(self, value: f64, params: &CouplerParams) -> Result<f64> {
        match self {
            Axis::Length => Ok(value),
            Axis::RescaledLength => {
                let g = params.gamma_nl.norm();
                if g == 0.0 {
                    return Err(Error::InvalidConfig(
                        "the GammaL axis needs a nonzero gamma-nl".into(),
                    ));
                }
                Ok(value / g)
            }
        }
    }
}

impl FromStr for Axis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "L" | "length" => Ok(Axis::Length),
            "GammaL" | "rescaled_length" | "rescaled-length" => Ok(Axis::RescaledLength),
            _ => Err(Error::InvalidConfig(format!(
                "unknown axis {s:?} (expected L or GammaL)"
            ))),
        }
    }
}

/// Evenly spaced points from `start` to `stop` inclusive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub start: f64,
    pub stop: f64,
    pub points: usize,
}

impl Grid {
    pub fn new(start: f64, stop: f64, points: usize) -> Result<Self> {
        let g = Self {
            start,
            stop,
            points,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.start.is_finite() && self.stop.is_finite()) {
            return Err(Error::InvalidConfig("grid bounds must be finite".into()));
        }
        if self.start < 0.0 {
            return Err(Error::InvalidConfig(format!(
                "grid start {} is negative",
                self.start
            )));
        }
        if self.start >= self.stop {
            return Err(Error::InvalidConfig(format!(
                "grid start {} is not below stop {}",
                self.start, self.stop
            )));
        }
        if self.points < 2 {
            return Err(Error::InvalidConfig(format!(
                "grid needs at least 2 points, got {}",
                self.points
            )));
        }
        Ok(())
    }

    pub fn values(&self) -> Vec<f64> {
        let n = self.points - 1;
        let span = self.stop - self.start;
        (0..=n)
            .map(|i| {
                if i == n {
                    self.stop
                } else {
                    self.start + span * i as f64 / n as f64
                }
            })
            .collect()
    }
}

/// Which witnesses a sweep evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WitnessSelector {
    /// `N_a, N_b1, N_b2`
    Mean,
    /// All twelve quadrature variances.
    Quadratures,
    /// `A_{1,j}(n), A_{2,j}(n)`
    AmplitudePowered(u32),
    /// `D_j(n)`
    Antibunching(u32),
    /// `D_ab1, D_ab2, D_b1b2`
    Intermodal,
    /// `E^{m,n}_{ab1}, E'^{m,n}_{ab1}`
    Hz(u32, u32),
    /// HZ pairs for `ab2` and `b1b2`.
    HzOther,
    Duan,
    ThreeMode,
}

impl WitnessSelector {
    /// Everything in a default report.
    pub fn all() -> Vec<WitnessSelector> {
        use WitnessSelector::*;
        vec![
            Mean,
            Quadratures,
            AmplitudePowered(2),
            AmplitudePowered(3),
            Antibunching(2),
            Antibunching(3),
            Antibunching(4),
            Antibunching(5),
            Intermodal,
            Hz(1, 1),
            Hz(2, 1),
            Hz(2, 2),
            HzOther,
            Duan,
            ThreeMode,
        ]
    }

    /// Named values; overflow to a non-finite value is an error.
    pub fn entries(self, c: &Coefficients, input: &CoherentInput) -> Result<Vec<(String, f64)>> {
        use WitnessSelector::*;
        let entries = match self {
            Mean => {
                let n = witnesses::mean_photon_numbers(c, input);
                vec![
                    ("N_a".into(), n.a),
                    ("N_b1".into(), n.b1),
                    ("N_b2".into(), n.b2),
                ]
            }
            Quadratures => {
                witnesses::quadrature_entries(&witnesses::quadrature_variances(c, input))
            }
            AmplitudePowered(n) => {
                witnesses::amplitude_entries(&witnesses::amplitude_powered_squeezing(c, input, n)?)
            }
            Antibunching(n) => {
                witnesses::antibunching_entries(&witnesses::antibunching(c, input, n)?)
            }
            Intermodal => {
                witnesses::intermodal_entries(&witnesses::intermodal_antibunching(c, input))
            }
            Hz(m, n) => witnesses::hz_entries(&witnesses::hz_entanglement(c, input, m, n)?),
            HzOther => {
                witnesses::hz_other_entries(&witnesses::hz_entanglement_other_pairs(c, input))
            }
            Duan => witnesses::duan_entries(&witnesses::duan_witness(c, input)),
            ThreeMode => witnesses::three_mode_entries(&witnesses::three_mode_witnesses(c, input)),
        };
        if entries.iter().all(|(_, v)| v.is_finite()) {
            Ok(entries)
        } else {
            Err(Error::NonFinite("witness"))
        }
    }
}

fn parse_order(s: &str, what: &str) -> Result<u32> {
    s.parse()
        .map_err(|_| Error::InvalidConfig(format!("bad {what} order {s:?}")))
}

impl FromStr for WitnessSelector {
    type Err = Error;

    /// `mean`, `quad`, `amp:N`, `D:N`, `Dij`, `hz:M:N`, `hz-other`, `duan`, `three-mode`.
    fn from_str(s: &str) -> Result<Self> {
        use WitnessSelector::*;
        let parts: Vec<&str> = s.trim().split(':').collect();
        let sel = match parts.as_slice() {
            ["mean"] => Mean,
            ["quad"] => Quadratures,
            ["amp", n] => AmplitudePowered(parse_order(n, "amp")?),
            ["D", n] => Antibunching(parse_order(n, "D")?),
            ["Dij"] => Intermodal,
            ["hz", m, n] => Hz(parse_order(m, "hz")?, parse_order(n, "hz")?),
            ["hz-other"] => HzOther,
            ["duan"] => Duan,
            ["three-mode"] => ThreeMode,
            _ => {
                return Err(Error::InvalidConfig(format!(
                    "unknown witness {s:?} (expected mean, quad, amp:N, D:N, Dij, hz:M:N, hz-other, duan or three-mode)"
                )))
            }
        };
        // reject orders the witnesses would refuse, before any evaluation
        match sel {
            AmplitudePowered(n) | Antibunching(n) if n < 2 => Err(Error::OrderTooSmall {
                name: "n",
                min: 2,
                value: n,
            }),
            Hz(m, n) if m < 1 || n < 1 => Err(Error::OrderTooSmall {
                name: if m < 1 { "m" } else { "n" },
                min: 1,
                value: m.min(n),
            }),
            _ => Ok(sel),
        }
    }
}

impl fmt::Display for WitnessSelector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use WitnessSelector::*;
        match self {
            Mean => write!(f, "mean"),
            Quadratures => write!(f, "quad"),
            AmplitudePowered(n) => write!(f, "amp:{n}"),
            Antibunching(n) => write!(f, "D:{n}"),
            Intermodal => write!(f, "Dij"),
            Hz(m, n) => write!(f, "hz:{m}:{n}"),
            HzOther => write!(f, "hz-other"),
            Duan => write!(f, "duan"),
            ThreeMode => write!(f, "three-mode"),
        }
    }
}

/// One sweep: fixed device and input, one varying length axis.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    /// The `length` field is ignored; the grid supplies it.
    pub params: CouplerParams,
    pub input: CoherentInput,
    pub axis: Axis,
    pub grid: Grid,
    pub witnesses: Vec<WitnessSelector>,
    /// Keep only these witness names; empty keeps everything selected.
    pub keep: Vec<String>,
    /// Appended to every witness name, to tell curves of one figure apart.
    pub suffix: String,
    /// Presentation factors applied to `display_value` only.
    pub display_scale: Vec<(String, f64)>,
}

impl SweepConfig {
    pub fn new(
        params: CouplerParams,
        input: CoherentInput,
        axis: Axis,
        grid: Grid,
        witnesses: Vec<WitnessSelector>,
    ) -> Self {
        Self {
            params,
            input,
            axis,
            grid,
            witnesses,
            keep: Vec::new(),
            suffix: String::new(),
            display_scale: Vec::new(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        self.grid.validate()?;
        if self.witnesses.is_empty() {
            return Err(Error::InvalidConfig("no witnesses selected".into()));
        }
        // surfaces a zero Γ on the GammaL axis as a configuration problem
        self.axis.length(self.grid.start, &self.params)?;
        Ok(())
    }

    fn scale_for(&self, name: &str) -> f64 {
        self.display_scale
            .iter()
            .find(|(n, _)| n == name)
            .map_or(1.0, |&(_, s)| s)
    }

    fn rows_at(&self, value: f64) -> Result<Vec<Row>> {
        let at = |e: Error| Error::AtGridPoint {
            value,
            source: Box::new(e),
        };
        let length = self.axis.length(value, &self.params).map_err(at)?;
        let c = compute_coefficients(&self.params.with_length(length)).map_err(at)?;
        let mut rows = Vec::new();
        for sel in &self.witnesses {
            for (name, v) in sel.entries(&c, &self.input).map_err(at)? {
                if !self.keep.is_empty() && !self.keep.contains(&name) {
                    continue;
                }
                if !v.is_finite() {
                    return Err(at(Error::NonFinite("witness")));
                }
                let display = v * self.scale_for(&name);
                rows.push(Row {
                    axis: self.axis,
                    axis_value: value,
                    witness: format!("{name}{}", self.suffix),
                    value: v,
                    display_value: display,
                });
            }
        }
        Ok(rows)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub axis: Axis,
    pub axis_value: f64,
    pub witness: String,
    pub value: f64,
    pub display_value: f64,
}

fn sort_rows(rows: &mut [Row]) {
    rows.sort_by(|a, b| {
        a.axis_value
            .total_cmp(&b.axis_value)
            .then_with(|| a.witness.cmp(&b.witness))
    });
}

fn evaluate(config: &SweepConfig) -> Result<Vec<Row>> {
    config.validate()?;
    let chunks = config
        .grid
        .values()
        .into_par_iter()
        .map(|v| config.rows_at(v))
        .collect::<Result<Vec<_>>>()?;
    Ok(chunks.into_iter().flatten().collect())
}

/// Evaluate every selected witness at every grid point, rows ordered by
/// axis value and then witness name.
pub fn run_sweep(config: &SweepConfig) -> Result<Vec<Row>> {
    let mut rows = evaluate(config)?;
    sort_rows(&mut rows);
    Ok(rows)
}

/// Several sweeps sharing one axis, merged into one ordered table.
pub fn run_sweeps(configs: &[SweepConfig]) -> Result<Vec<Row>> {
    let mut rows = Vec::new();
    for c in configs {
        rows.extend(evaluate(c)?);
    }
    sort_rows(&mut rows);
    Ok(rows)
}

pub fn format_number(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_csv<W: Write>(mut out: W, rows: &[Row]) -> io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{}",
            r.axis.label(),
            format_number(r.axis_value),
            r.witness,
            format_number(r.value),
            format_number(r.display_value)
        )?;
    }
    Ok(())
}

/// The figure presets.
pub const FIGURE_IDS: [&str; 15] = [
    "fig2a", "fig2b", "fig2c", "fig2d", "fig2e", "fig2f", "fig3a", "fig3b", "fig4a", "fig4b",
    "fig4c", "fig5a", "fig5b", "fig6", "fig7",
];

#[derive(Debug, Clone, PartialEq)]
pub struct Figure {
    pub id: String,
    pub series: Vec<SweepConfig>,
}

impl Figure {
    pub fn run(&self) -> Result<Vec<Row>> {
        run_sweeps(&self.series)
    }

    /// Replace the grid of every series.
    pub fn with_grid(mut self, grid: Grid) -> Self {
        for s in &mut self.series {
            s.grid = grid;
        }
        self
    }
}

const K: f64 = 0.1;
const GAMMA_NL: f64 = 0.001;
const DELTA_K: f64 = 1e-4;

fn preset(gamma_nl: f64, delta_k: f64, alpha: f64, gamma: f64, axis: Axis) -> SweepConfig {
    let params = CouplerParams {
        k: K.into(),
        gamma_nl: gamma_nl.into(),
        delta_k,
        length: 0.0,
    };
    let stop = match axis {
        Axis::Length => 100.0,
        Axis::RescaledLength => 0.1,
    };
    SweepConfig::new(
        params,
        CoherentInput::real(alpha, 2.0, gamma),
        axis,
        Grid {
            start: 0.0,
            stop,
            points: DEFAULT_POINTS,
        },
        Vec::new(),
    )
}

fn keep(mut c: SweepConfig, sel: &[WitnessSelector], names: &[&str], suffix: &str) -> SweepConfig {
    c.witnesses = sel.to_vec();
    c.keep = names.iter().map(|s| s.to_string()).collect();
    c.suffix = suffix.to_string();
    c
}

fn scaled(mut c: SweepConfig, scales: &[(String, f64)]) -> SweepConfig {
    c.display_scale = scales.to_vec();
    c
}

/// The preset for one figure panel.
pub fn figure(id: &str) -> Result<Figure> {
    use WitnessSelector::*;
    let quad = |j: &str| [format!("VarX_{j}"), format!("VarY_{j}")];
    let series = match id {
        "fig2a" | "fig2b" | "fig2c" => {
            let j = match id {
                "fig2a" => "a",
                "fig2b" => "b1",
                _ => "ab1",
            };
            let names = quad(j);
            let names: Vec<&str> = names.iter().map(String::as_str).collect();
            [(1e-1, "@dk=1e-1"), (1e-2, "@dk=1e-2")]
                .into_iter()
                .map(|(dk, sfx)| {
                    keep(
                        preset(GAMMA_NL, dk, 5.0, 1.0, Axis::RescaledLength),
                        &[Quadratures],
                        &names,
                        sfx,
                    )
                })
                .collect()
        }
        "fig2d" | "fig2e" | "fig2f" => {
            let j = match id {
                "fig2d" => "a",
                "fig2e" => "b1",
                _ => "ab1",
            };
            let names = quad(j);
            let names: Vec<&str> = names.iter().map(String::as_str).collect();
            [(1e-3, "@gamma_nl=1e-3"), (1e-2, "@gamma_nl=1e-2")]
                .into_iter()
                .map(|(g, sfx)| {
                    keep(
                        preset(g, DELTA_K, 5.0, 1.0, Axis::Length),
                        &[Quadratures],
                        &names,
                        sfx,
                    )
                })
                .collect()
        }
        "fig3a" | "fig3b" => {
            let j = if id == "fig3a" { "a" } else { "b1" };
            let names: Vec<String> = [2, 3]
                .iter()
                .flat_map(|n| [format!("A1_{j}_n{n}"), format!("A2_{j}_n{n}")])
                .collect();
            let names_ref: Vec<&str> = names.iter().map(String::as_str).collect();
            let scales: Vec<(String, f64)> = names[..2].iter().map(|n| (n.clone(), 10.0)).collect();
            let c = keep(
                preset(GAMMA_NL, DELTA_K, 3.0, 1.0, Axis::RescaledLength),
                &[AmplitudePowered(2), AmplitudePowered(3)],
                &names_ref,
                "",
            );
            vec![scaled(c, &scales)]
        }
        "fig4a" | "fig4b" | "fig4c" => {
            let (sel, name, gamma) = match id {
                "fig4a" => (Antibunching(2), "D_a_n2", 1.0),
                "fig4b" => (Antibunching(2), "D_b1_n2", -1.0),
                _ => (Intermodal, "D_ab1", -1.0),
            };
            [(3.0, "@alpha=3"), (5.0, "@alpha=5")]
                .into_iter()
                .map(|(alpha, sfx)| {
                    keep(
                        preset(GAMMA_NL, DELTA_K, alpha, gamma, Axis::RescaledLength),
                        &[sel],
                        &[name],
                        sfx,
                    )
                })
                .collect()
        }
        "fig5a" | "fig5b" => {
            let (j, gamma) = if id == "fig5a" {
                ("a", 1.0)
            } else {
                ("b1", -1.0)
            };
            let names: Vec<String> = (3..=5).map(|n| format!("D_{j}_n{n}")).collect();
            let names_ref: Vec<&str> = names.iter().map(String::as_str).collect();
            let scales = vec![(names[0].clone(), 400.0), (names[1].clone(), 20.0)];
            let c = keep(
                preset(GAMMA_NL, DELTA_K, 5.0, gamma, Axis::RescaledLength),
                &[Antibunching(3), Antibunching(4), Antibunching(5)],
                &names_ref,
                "",
            );
            vec![scaled(c, &scales)]
        }
        "fig6" | "fig7" => {
            let (m, n) = if id == "fig6" { (1, 1) } else { (2, 1) };
            let names = [format!("E_ab1_m{m}n{n}"), format!("Ep_ab1_m{m}n{n}")];
            let names_ref: Vec<&str> = names.iter().map(String::as_str).collect();
            [(3.0, "@alpha=3"), (5.0, "@alpha=5")]
                .into_iter()
                .map(|(alpha, sfx)| {
                    keep(
                        preset(GAMMA_NL, DELTA_K, alpha, 1.0, Axis::RescaledLength),
                        &[Hz(m, n)],
                        &names_ref,
                        sfx,
                    )
                })
                .collect()
        }
        _ => return Err(Error::UnknownFigure(id.to_string())),
    };
    Ok(Figure {
        id: id.to_string(),
        series,
    })
}

/// Parse `re`, `re+imi`, `re-imi` or `imi`, e.g. `0.1+0i` or `-1e-3-2e-4i`.
pub fn parse_complex(s: &str) -> Result<Complex64> {
    let bad = || Error::InvalidConfig(format!("bad complex number {s:?} (expected re+imi)"));
    let t = s.trim();
    if t.is_empty() {
        return Err(bad());
    }
    let Some(body) = t.strip_suffix('i') else {
        return t.parse::<f64>().map(Complex64::from).map_err(|_| bad());
    };
    // split at the last sign that is neither leading nor part of an exponent
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&i| matches!(bytes[i], b'+' | b'-') && !matches!(bytes[i - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(i) => (&body[..i], &body[i..]),
        None => ("0", body),
    };
    let im = match im {
        "+" | "" => "1",
        "-" => "-1",
        other => other,
    };
    let re: f64 = re.parse().map_err(|_| bad())?;
    let im: f64 = im.trim_start_matches('+').parse().map_err(|_| bad())?;
    Ok(Complex64::new(re, im))
}

/// Flat `key = value` lines; `#` starts a comment, blank lines are skipped.
pub fn parse_config_text(text: &str) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (no, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| {
            Error::InvalidConfig(format!("line {}: expected key=value, got {line:?}", no + 1))
        })?;
        out.push((k.trim().to_string(), v.trim().to_string()));
    }
    Ok(out)
}

/// Settings assembled from a config file and/or command-line flags; later
/// assignments win, `witness` accumulates.
#[derive(Debug, Clone, PartialEq)]
pub struct Settings {
    pub k: Complex64,
    pub gamma_nl: Complex64,
    pub delta_k: f64,
    pub length: f64,
    pub alpha: Complex64,
    pub beta: Complex64,
    pub gamma_in: Complex64,
    pub axis: Axis,
    pub start: f64,
    pub stop: f64,
    pub points: usize,
    pub witnesses: Vec<WitnessSelector>,
    pub out: Option<String>,
    pub seed: u64,
}

impl Default for Settings {
    /// Figure 2 device and input, `L = 1`, `ΓL ∈ [0, 0.1]`.
    fn default() -> Self {
        Self {
            k: K.into(),
            gamma_nl: GAMMA_NL.into(),
            delta_k: DELTA_K,
            length: 1.0,
            alpha: 5.0.into(),
            beta: 2.0.into(),
            gamma_in: 1.0.into(),
            axis: Axis::RescaledLength,
            start: 0.0,
            stop: 0.1,
            points: DEFAULT_POINTS,
            witnesses: Vec::new(),
            out: None,
            seed: 0,
        }
    }
}

fn parse_f64(key: &str, v: &str) -> Result<f64> {
    v.trim()
        .parse()
        .map_err(|_| Error::InvalidConfig(format!("{key}: bad number {v:?}")))
}

impl Settings {
    pub fn apply(&mut self, key: &str, value: &str) -> Result<()> {
        let key = key.trim().trim_start_matches("--").replace('_', "-");
        match key.as_str() {
            "k" => self.k = parse_complex(value)?,
            "gamma-nl" => self.gamma_nl = parse_complex(value)?,
            "delta-k" => self.delta_k = parse_f64(&key, value)?,
            "length" => self.length = parse_f64(&key, value)?,
            "alpha" => self.alpha = parse_complex(value)?,
            "beta" => self.beta = parse_complex(value)?,
            "gamma-in" => self.gamma_in = parse_complex(value)?,
            "axis" => self.axis = value.trim().parse()?,
            "start" => self.start = parse_f64(&key, value)?,
            "stop" => self.stop = parse_f64(&key, value)?,
            "points" => {
                self.points = value
                    .trim()
                    .parse()
                    .map_err(|_| Error::InvalidConfig(format!("points: bad count {value:?}")))?
            }
            "witness" => {
                for w in value.split(',').filter(|w| !w.trim().is_empty()) {
                    self.witnesses.push(w.parse()?);
                }
            }
            "out" => self.out = Some(value.trim().to_string()),
            "seed" => {
                self.seed = value
                    .trim()
                    .parse()
                    .map_err(|_| Error::InvalidConfig(format!("seed: bad value {value:?}")))?
            }
            other => return Err(Error::InvalidConfig(format!("unknown key {other:?}"))),
        }
        Ok(())
    }

    pub fn apply_all<'a>(
        &mut self,
        pairs: impl IntoIterator<Item = (&'a str, &'a str)>,
    ) -> Result<()> {
        for (k, v) in pairs {
            self.apply(k, v)?;
        }
        Ok(())
    }

    /// Device at `self.length`.
    pub fn params(&self) -> Result<CouplerParams> {
        CouplerParams::new(self.k, self.gamma_nl, self.delta_k, self.length)
            .map_err(|e| Error::InvalidConfig(e.to_string()))
    }

    pub fn input(&self) -> Result<CoherentInput> {
        CoherentInput::new(self.alpha, self.beta, self.gamma_in)
            .map_err(|e| Error::InvalidConfig(e.to_string()))
    }

    pub fn grid(&self) -> Result<Grid> {
        Grid::new(self.start, self.stop, self.points)
    }

    /// Selected witnesses, or all of them when none were named.
    pub fn selectors(&self) -> Vec<WitnessSelector> {
        if self.witnesses.is_empty() {
            WitnessSelector::all()
        } else {
            self.witnesses.clone()
        }
    }

    pub fn sweep_config(&self) -> Result<SweepConfig> {
        let config = SweepConfig::new(
            self.params()?,
            self.input()?,
            self.axis,
            self.grid()?,
            self.selectors(),
        );
        config.validate()?;
        Ok(config)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fig6_rows() -> Vec<Row> {
        figure("fig6").unwrap().run().unwrap()
    }

    #[test]
    fn grid_is_inclusive() {
        let g = Grid::new(0.0, 0.1, 11).unwrap();
        let v = g.values();
        assert_eq!(v.len(), 11);
        assert_eq!(v[0], 0.0);
        assert_eq!(v[10], 0.1);
    }

    #[test]
    fn bad_grids_rejected() {
        assert!(Grid::new(0.1, 0.1, 10).is_err());
        assert!(Grid::new(0.0, 0.1, 1).is_err());
        assert!(Grid::new(-1.0, 0.1, 10).is_err());
        assert!(Grid::new(0.0, f64::INFINITY, 10).is_err());
    }

    #[test]
    fn selectors_round_trip() {
        for s in WitnessSelector::all() {
            assert_eq!(s.to_string().parse::<WitnessSelector>().unwrap(), s);
        }
        assert!("D:1".parse::<WitnessSelector>().is_err());
        assert!("hz:0:1".parse::<WitnessSelector>().is_err());
        assert!("amp:x".parse::<WitnessSelector>().is_err());
        assert!("nope".parse::<WitnessSelector>().is_err());
    }

    #[test]
    fn complex_literals() {
        assert_eq!(parse_complex("0.1+0i").unwrap(), Complex64::new(0.1, 0.0));
        assert_eq!(
            parse_complex("-1e-3-2e-4i").unwrap(),
            Complex64::new(-1e-3, -2e-4)
        );
        assert_eq!(
            parse_complex("1e+2+3E-1i").unwrap(),
            Complex64::new(100.0, 0.3)
        );
        assert_eq!(parse_complex("2i").unwrap(), Complex64::new(0.0, 2.0));
        assert_eq!(parse_complex("-i").unwrap(), Complex64::new(0.0, -1.0));
        assert_eq!(parse_complex("5").unwrap(), Complex64::new(5.0, 0.0));
        for bad in ["", "i+", "1+2j", "abc", "1++2i"] {
            assert!(parse_complex(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn linear_coupler_shows_no_antibunching() {
        let mut s = Settings {
            gamma_nl: 0.0.into(),
            axis: Axis::Length,
            start: 0.0,
            stop: 5.0,
            points: 2,
            ..Settings::default()
        };
        s.apply("witness", "D:2").unwrap();
        let rows = run_sweep(&s.sweep_config().unwrap()).unwrap();
        let da: Vec<&Row> = rows.iter().filter(|r| r.witness == "D_a_n2").collect();
        assert_eq!(da.len(), 2);
        assert!(da.iter().all(|r| r.value == 0.0));
    }

    #[test]
    fn rows_are_sorted() {
        let mut s = Settings {
            points: 7,
            ..Settings::default()
        };
        s.apply("witness", "quad,D:2").unwrap();
        let rows = run_sweep(&s.sweep_config().unwrap()).unwrap();
        assert_eq!(rows.len(), 7 * 15);
        for w in rows.windows(2) {
            let key = |r: &Row| (r.axis_value, r.witness.clone());
            assert!(key(&w[0]) < key(&w[1]));
        }
    }

    #[test]
    fn zero_gamma_on_rescaled_axis_is_a_config_error() {
        let s = Settings {
            gamma_nl: 0.0.into(),
            ..Settings::default()
        };
        assert!(s.sweep_config().unwrap_err().is_config_error());
    }

    #[test]
    fn settings_apply_keys() {
        let text =
            "# device\nk = 0.2+0.1i\ngamma_nl=2e-3\n\nwitness = duan\nwitness=hz:2:1\naxis=L\n";
        let mut s = Settings::default();
        for (k, v) in parse_config_text(text).unwrap() {
            s.apply(&k, &v).unwrap();
        }
        assert_eq!(s.k, Complex64::new(0.2, 0.1));
        assert_eq!(s.gamma_nl, Complex64::new(2e-3, 0.0));
        assert_eq!(s.axis, Axis::Length);
        assert_eq!(
            s.witnesses,
            vec![WitnessSelector::Duan, WitnessSelector::Hz(2, 1)]
        );
        assert!(s.apply("colour", "red").unwrap_err().is_config_error());
        assert!(parse_config_text("just words").is_err());
    }

    #[test]
    fn unknown_figure() {
        assert!(matches!(figure("fig9"), Err(Error::UnknownFigure(_))));
    }

    #[test]
    fn every_figure_builds() {
        for id in FIGURE_IDS {
            let f = figure(id).unwrap();
            assert!(!f.series.is_empty());
            for s in &f.series {
                s.validate().unwrap();
            }
        }
    }

    #[test]
    fn fig6_columns_are_opposite() {
        let rows = fig6_rows();
        for alpha in ["3", "5"] {
            let e: Vec<&Row> = rows
                .iter()
                .filter(|r| r.witness == format!("E_ab1_m1n1@alpha={alpha}"))
                .collect();
            let ep: Vec<&Row> = rows
                .iter()
                .filter(|r| r.witness == format!("Ep_ab1_m1n1@alpha={alpha}"))
                .collect();
            assert_eq!(e.len(), DEFAULT_POINTS);
            for (x, y) in e.iter().zip(&ep) {
                assert_eq!(x.axis_value, y.axis_value);
                assert_eq!(x.value, -y.value);
            }
        }
    }

    #[test]
    fn display_scaling_only_touches_display_column() {
        let rows = figure("fig5a")
            .unwrap()
            .with_grid(Grid::new(0.0, 0.1, 3).unwrap())
            .run()
            .unwrap();
        for r in rows {
            let factor = match r.witness.as_str() {
                "D_a_n3" => 400.0,
                "D_a_n4" => 20.0,
                _ => 1.0,
            };
            assert_eq!(r.display_value, r.value * factor);
        }
    }

    #[test]
    fn csv_layout() {
        let rows = figure("fig4a")
            .unwrap()
            .with_grid(Grid::new(0.0, 0.1, 2).unwrap())
            .run()
            .unwrap();
        let mut buf = Vec::new();
        write_csv(&mut buf, &rows).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some(CSV_HEADER));
        let first = lines.next().unwrap();
        assert_eq!(
            first,
            "GammaL,0.0000000000000000e0,D_a_n2@alpha=3,0.0000000000000000e0,0.0000000000000000e0"
        );
        assert_eq!(text.lines().count(), 1 + 4);
    }
}
