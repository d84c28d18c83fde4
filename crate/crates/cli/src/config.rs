use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;

use ellgenus::genus::{Gauge, GenusInstance};
use ellgenus::{Error, Result};

#[derive(Debug, Parser)]
#[command(name = "ellgenus", version, about = "Exact checks of E8-twisted elliptic genera")]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Worker threads for `all`.
    #[arg(long, global = true, env = "ELLGENUS_JOBS")]
    pub jobs: Option<usize>,
    /// Report elapsed_ms as 0 so repeated runs are byte-identical.
    #[arg(long, global = true)]
    pub no_timing: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Args, Clone)]
pub struct InstanceArgs {
    #[arg(long, default_value_t = 2)]
    pub d: u32,
    #[arg(long, default_value_t = 2)]
    pub l: u32,
    #[arg(long, default_value = "e8", value_parser = parse_gauge)]
    pub gauge: Gauge,
    #[arg(long)]
    pub q_order: Option<i64>,
    #[arg(long)]
    pub u_order: Option<u32>,
    #[arg(long)]
    pub tol: Option<f64>,
}

fn parse_gauge(s: &str) -> std::result::Result<Gauge, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// `re,im` or a bare real number.
fn parse_complex(s: &str) -> std::result::Result<Complex64, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let num = |t: &str| t.parse::<f64>().map_err(|e| format!("{t:?}: {e}"));
    match parts.as_slice() {
        [re] => Ok(Complex64::new(num(re)?, 0.0)),
        [re, im] => Ok(Complex64::new(num(re)?, num(im)?)),
        _ => Err(format!("expected re,im, got {s:?}")),
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Normalized Eisenstein series coefficients.
    EisensteinExpand {
        #[arg(long)]
        weight: u32,
        #[arg(long, default_value_t = 3)]
        order: i64,
    },
    /// Theta transformation laws at sample points and exact lattice shifts.
    ThetaCheck {
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        q_order: Option<i64>,
    },
    /// Definition route against theta route.
    RouteEquivalence(InstanceArgs),
    /// Computed a_n coefficients against their closed forms.
    PropExpansions(InstanceArgs),
    /// An anomaly case; the instance defaults to the smallest one realizing it.
    Anomaly {
        /// Value of 2d - l; inferred from --d and --l when omitted.
        #[arg(long, allow_hyphen_values = true)]
        case: Option<i64>,
        #[arg(long)]
        d: Option<u32>,
        #[arg(long)]
        l: Option<u32>,
        #[arg(long, default_value = "e8", value_parser = parse_gauge)]
        gauge: Gauge,
        #[arg(long)]
        q_order: Option<i64>,
        /// Check the closed forms instead of the computed coefficients.
        #[arg(long)]
        literal: bool,
    },
    /// A vanishing clause (1..=5) on one instance.
    Vanishing {
        #[arg(long)]
        clause: u32,
        #[command(flatten)]
        instance: InstanceArgs,
    },
    /// Projection of a_0 onto modular forms.
    DecomposeA0 {
        /// Defaults to 2d - l plus four per E8 factor.
        #[arg(long, allow_hyphen_values = true)]
        weight: Option<i64>,
        #[command(flatten)]
        instance: InstanceArgs,
    },
    /// Numeric weak Jacobi functional equations.
    JacobiNumeric {
        /// `re,im`; repeatable. Defaults to 2i and 1+1.5i.
        #[arg(long, value_parser = parse_complex)]
        tau: Vec<Complex64>,
        /// `re,im`; repeatable. Defaults to 0.2 and 0.1+0.1i.
        #[arg(long, value_parser = parse_complex)]
        z: Vec<Complex64>,
        #[command(flatten)]
        instance: InstanceArgs,
    },
    /// The full acceptance suite.
    All {
        /// Also run the supplementary diagnostics.
        #[arg(long)]
        diagnostics: bool,
    },
}

impl InstanceArgs {
    /// The instance with `q_order`/`u_order` falling back to the given
    /// defaults; `min_u` is the smallest admissible `u_order`.
    pub fn instance(&self, q_default: i64, u_default: u32, min_u: u32) -> Result<GenusInstance> {
        let u_order = self.u_order.unwrap_or(u_default);
        if u_order < min_u {
            return Err(Error::Usage(format!("this check needs --u-order ≥ {min_u}, got {u_order}")));
        }
        let mut inst = GenusInstance::new(self.d, self.l, self.gauge)?
            .with_q_order(self.q_order.unwrap_or(q_default))?
            .with_u_order(u_order)?;
        if let Some(t) = self.tol {
            inst = inst.with_tol(t)?;
        }
        Ok(inst)
    }
}
