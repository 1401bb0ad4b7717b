use std::fmt;

use serde::Serialize;
use wedgewalk_core::classify::{self, SeriesReport, Thresholds};
use wedgewalk_core::flow;
use wedgewalk_core::geometry::{self, Vertex};
use wedgewalk_core::network;
use wedgewalk_core::walker::{self, WalkConfig};
use wedgewalk_core::{HSequence, Profile, WedgeError};

use crate::output::{num, Csv};
use crate::{Common, Mode};

pub const SCHEMA_HINT: &str = r#"expected a profile document such as
  {"d": 2, "profiles": [{"type": "linear", "a": 1, "b": 0}, {"type": "log"}]}
profile types: table {"values": [num | "inf", ...]}, linear {"a", "b"}, power {"a"},
  exp {"base"}, log, const {"c"}, inf"#;

#[derive(Debug)]
pub enum CliError {
    /// Unreadable or malformed config.
    Config(String),
    Invalid(String),
    Core(WedgeError),
    Io(std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(WedgeError::SolverFailure { .. }) => 3,
            CliError::Io(_) => 1,
            _ => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) | CliError::Invalid(m) => f.write_str(m),
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "writing output: {e}"),
        }
    }
}

impl From<WedgeError> for CliError {
    fn from(e: WedgeError) -> Self {
        match e {
            WedgeError::Parse(m) => CliError::Config(m),
            other => CliError::Core(other),
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

fn load(common: &Common) -> Result<Profile> {
    let text = std::fs::read_to_string(&common.config)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", common.config.display())))?;
    Profile::from_json(&text).map_err(|e| match e {
        WedgeError::Parse(m) => CliError::Config(format!("{}: {m}", common.config.display())),
        other => CliError::Config(format!("{}: {other}", common.config.display())),
    })
}

fn anchor(p: &Profile, text: Option<&str>) -> Result<Vertex> {
    let Some(text) = text else {
        return Ok(p.origin());
    };
    let v = Vertex::parse(text).ok_or_else(|| {
        CliError::Invalid(format!(
            "cannot parse anchor {text:?}; expected x1,...,xd,level"
        ))
    })?;
    if v.dim() != p.dim() {
        return Err(WedgeError::DimensionMismatch {
            expected: p.dim(),
            got: v.dim(),
        }
        .into());
    }
    Ok(v)
}

fn positive(rs: &[u64]) -> Result<u64> {
    if let Some(0) = rs.iter().min() {
        return Err(CliError::Invalid("--r values must be at least 1".into()));
    }
    Ok(rs.iter().copied().max().unwrap_or(0))
}

#[derive(Serialize)]
struct ClassifyDoc<'a> {
    n_max: u64,
    thresholds: Thresholds,
    #[serde(flatten)]
    report: &'a SeriesReport,
}

pub fn classify(common: &Common, n_max: u64, th: Thresholds) -> Result<String> {
    let p = load(common)?;
    let h = HSequence::derive(&p, n_max)?;
    let report = classify::classify(&h, &p, n_max, &th)?;
    let doc = ClassifyDoc {
        n_max,
        thresholds: th,
        report: &report,
    };
    let mut text =
        serde_json::to_string_pretty(&doc).map_err(|e| CliError::Invalid(e.to_string()))?;
    text.push('\n');
    Ok(text)
}

pub fn partition(common: &Common, r: u64) -> Result<String> {
    let p = load(common)?;
    let h = HSequence::derive(&p, r)?;
    let mut csv = Csv::new(&["n", "size", "lower_bound", "upper_bound", "product"]);
    for n in 0..=r {
        let layer = geometry::boundary_layer(&h, &p, n)?;
        let mut product = 1u64;
        for i in 0..p.dim() {
            product = product.saturating_mul(h.get(i, n)? + 1);
        }
        let upper = product.saturating_mul(p.dim() as u64 + 1);
        csv.row(&[
            n.to_string(),
            layer.len().to_string(),
            product.to_string(),
            upper.to_string(),
            product.to_string(),
        ]);
    }
    Ok(csv.finish())
}

pub fn resistance(common: &Common, rs: &[u64], tol: f64) -> Result<String> {
    let p = load(common)?;
    let h = HSequence::derive(&p, positive(rs)?)?;
    let mut csv = Csv::new(&[
        "r",
        "R_exact",
        "lower_bound",
        "shorted_bound",
        "flow_energy_upper",
    ]);
    for &r in rs {
        let g = network::build_restricted(&p, &h, r)?;
        let exact = network::effective_resistance(&g, &p.origin(), &g.sinks(), tol)?;
        let upper = flow::resistance_upper_bound(&h, r, &p.origin())?;
        csv.row(&[
            r.to_string(),
            num(exact.value),
            num(network::resistance_lower_bound(&h, r)?),
            num(network::shorted_series_bound(&g, r)),
            num(upper.energy),
        ]);
    }
    Ok(csv.finish())
}

pub fn flow(common: &Common, r: u64, anchor_text: Option<&str>) -> Result<String> {
    let p = load(common)?;
    let x = anchor(&p, anchor_text)?;
    let h = HSequence::derive(&p, r)?;
    let (_, wx, bound) = flow::anchored_flow(&h, &x, r)?;
    let mut csv = Csv::new(&["u", "v", "flow"]);
    for (u, v, value) in wx.edges() {
        csv.row(&[u.to_string(), v.to_string(), num(value)]);
    }
    csv.comment(&format!(
        "energy={} cd_ratio={} kirchhoff_max_residual={}",
        num(bound.energy),
        num(bound.cd_ratio),
        num(bound.kirchhoff_residual)
    ));
    Ok(csv.finish())
}

pub fn simulate(
    common: &Common,
    mode: Mode,
    cfg: &WalkConfig,
    anchor_text: Option<&str>,
) -> Result<String> {
    if cfg.trials == 0 {
        return Err(CliError::Invalid("--trials must be at least 1".into()));
    }
    let p = load(common)?;
    let mut csv = Csv::new(&["trial", "value"]);
    match mode {
        Mode::Green => {
            let r = cfg
                .kill_r
                .ok_or_else(|| CliError::Invalid("--mode green needs --kill-r".into()))?;
            let x = anchor(&p, anchor_text)?;
            let h = HSequence::derive(&p, r)?;
            let est = walker::green_mc(&p, &h, &x, r, cfg)?;
            for (t, v) in est.samples.iter().enumerate() {
                csv.row(&[t.to_string(), num(*v)]);
            }
            csv.comment(&format!(
                "mean={} stderr={} trials={}",
                num(est.mean),
                num(est.stderr),
                cfg.trials
            ));
        }
        Mode::Collide => {
            if anchor_text.is_some() {
                return Err(CliError::Invalid(
                    "--anchor applies to green mode only".into(),
                ));
            }
            let stats = walker::collision_run(&p, cfg)?;
            for (t, c) in stats.counts.iter().enumerate() {
                csv.row(&[t.to_string(), c.to_string()]);
            }
            csv.comment(&format!(
                "mean={} stderr={} trials={}",
                num(stats.mean),
                num(stats.stderr),
                cfg.trials
            ));
            let tail: Vec<String> = stats
                .tail
                .iter()
                .map(|(k, frac)| format!("P(count>={k})={}", num(*frac)))
                .collect();
            csv.comment(&tail.join(" "));
        }
    }
    Ok(csv.finish())
}

pub fn green(common: &Common, rs: &[u64], anchor_text: Option<&str>, tol: f64) -> Result<String> {
    let p = load(common)?;
    let x = anchor(&p, anchor_text)?;
    let top = rs.iter().copied().max().unwrap_or(0);
    let h = HSequence::derive(&p, top + 1)?;
    let mut csv = Csv::new(&["r", "anchor", "green", "raw_visits", "degree", "residual"]);
    for &r in rs {
        let g = network::green_at(&p, &h, r, &x, tol)?;
        csv.row(&[
            r.to_string(),
            x.to_string(),
            num(g.value),
            num(g.raw_visits),
            g.degree.to_string(),
            num(g.residual),
        ]);
    }
    Ok(csv.finish())
}

pub fn sandwich(common: &Common, rs: &[u64], tol: f64) -> Result<String> {
    let p = load(common)?;
    let h = HSequence::derive(&p, positive(rs)?)?;
    let mut csv = Csv::new(&[
        "r",
        "lower_bound",
        "shorted_bound",
        "R_exact",
        "flow_energy_upper",
        "green_below",
        "residual",
        "ordered",
    ]);
    for &r in rs {
        let g = network::build_restricted(&p, &h, r)?;
        let lower = network::resistance_lower_bound(&h, r)?;
        let shorted = network::shorted_series_bound(&g, r);
        let exact = network::effective_resistance(&g, &p.origin(), &g.sinks(), tol)?;
        let upper = flow::resistance_upper_bound(&h, r, &p.origin())?.energy;
        // g_{V_(r-1)}(O, O), which should equal R_exact.
        let below = network::green_diagonal(&g, &p.origin(), tol)?.value;
        let ordered = lower <= shorted && shorted <= exact.value && exact.value <= upper;
        csv.row(&[
            r.to_string(),
            num(lower),
            num(shorted),
            num(exact.value),
            num(upper),
            num(below),
            num(exact.residual),
            ordered.to_string(),
        ]);
    }
    Ok(csv.finish())
}
