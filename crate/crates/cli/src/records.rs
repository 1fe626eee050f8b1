//! Output records and the two emission formats. Every run writes a
//! provenance header first; re-running the command it names reproduces the
//! file byte for byte.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use serde::Serialize;

use crate::args::FormatArg;
use crate::errors::CliResult;
use crate::io::fmt_float;

#[derive(Serialize)]
pub struct Provenance<'a, T: Serialize> {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'a str,
    pub args: &'a T,
}

/// A record that knows how to render itself as one CSV row.
pub trait CsvRecord {
    fn header() -> &'static str;
    fn row(&self) -> String;
}

pub fn opt(v: Option<f64>) -> String {
    v.map(fmt_float).unwrap_or_default()
}

pub struct Emitter {
    out: Box<dyn Write>,
    format: FormatArg,
    wrote_header: bool,
}

impl Emitter {
    pub fn create(path: Option<&Path>, format: FormatArg) -> CliResult<Self> {
        let out: Box<dyn Write> = match path {
            Some(p) => Box::new(BufWriter::new(File::create(p)?)),
            None => Box::new(BufWriter::new(io::stdout())),
        };
        Ok(Self {
            out,
            format,
            wrote_header: false,
        })
    }

    pub fn provenance<T: Serialize>(&mut self, command: &str, args: &T) -> CliResult<()> {
        let p = Provenance {
            tool: "loocv",
            version: env!("CARGO_PKG_VERSION"),
            command,
            args,
        };
        let line = serde_json::to_string(&serde_json::json!({ "provenance": p }))
            .expect("provenance serializes");
        match self.format {
            FormatArg::Jsonl => writeln!(self.out, "{line}")?,
            FormatArg::Csv => writeln!(self.out, "# {line}")?,
        }
        Ok(())
    }

    pub fn record<R: Serialize + CsvRecord>(&mut self, r: &R) -> CliResult<()> {
        match self.format {
            FormatArg::Jsonl => {
                let line = serde_json::to_string(r).expect("record serializes");
                writeln!(self.out, "{line}")?;
            }
            FormatArg::Csv => {
                if !self.wrote_header {
                    writeln!(self.out, "{}", R::header())?;
                    self.wrote_header = true;
                }
                writeln!(self.out, "{}", r.row())?;
            }
        }
        Ok(())
    }

    /// Auxiliary object (marks, summaries): a JSON line, or a comment line
    /// in CSV mode.
    pub fn aux<T: Serialize>(&mut self, value: &T) -> CliResult<()> {
        let line = serde_json::to_string(value).expect("aux serializes");
        match self.format {
            FormatArg::Jsonl => writeln!(self.out, "{line}")?,
            FormatArg::Csv => writeln!(self.out, "# {line}")?,
        }
        Ok(())
    }

    pub fn finish(mut self) -> CliResult<()> {
        self.out.flush()?;
        Ok(())
    }
}

#[derive(Serialize)]
pub struct PathRecord {
    pub lambda: f64,
    pub df: usize,
    pub rho: f64,
    pub rss1: f64,
    pub rss2: Option<f64>,
    pub looe: Option<f64>,
    pub looe_se: Option<f64>,
    pub method: String,
    pub estimator: u8,
    pub unstable: bool,
    pub known_biased: bool,
}

impl CsvRecord for PathRecord {
    fn header() -> &'static str {
        "lambda,df,rho,rss1,rss2,looe,looe_se,method,estimator,unstable,known_biased"
    }

    fn row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{}",
            fmt_float(self.lambda),
            self.df,
            fmt_float(self.rho),
            fmt_float(self.rss1),
            opt(self.rss2),
            opt(self.looe),
            opt(self.looe_se),
            self.method,
            self.estimator,
            self.unstable,
            self.known_biased
        )
    }
}

#[derive(Serialize)]
pub struct SynthRecord {
    pub n: usize,
    pub m: usize,
    pub lambda: f64,
    pub samples: usize,
    pub estimator: u8,
    pub eps1_mean: f64,
    pub eps1_se: Option<f64>,
    pub eps2_mean: Option<f64>,
    pub eps2_se: Option<f64>,
    pub looe_approx1_mean: Option<f64>,
    pub looe_approx1_se: Option<f64>,
    pub looe_approx2_mean: Option<f64>,
    pub looe_approx2_se: Option<f64>,
    pub looe_naive_mean: Option<f64>,
    pub looe_naive_se: Option<f64>,
    pub rho_mean: f64,
    pub df_mean: f64,
    pub tp_mean: Option<f64>,
    pub fp_mean: Option<f64>,
    pub unstable: bool,
}

impl CsvRecord for SynthRecord {
    fn header() -> &'static str {
        "n,m,lambda,samples,estimator,eps1_mean,eps1_se,eps2_mean,eps2_se,looe_approx1_mean,looe_approx1_se,looe_approx2_mean,looe_approx2_se,looe_naive_mean,looe_naive_se,rho_mean,df_mean,tp_mean,fp_mean,unstable"
    }

    fn row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            self.n,
            self.m,
            fmt_float(self.lambda),
            self.samples,
            self.estimator,
            fmt_float(self.eps1_mean),
            opt(self.eps1_se),
            opt(self.eps2_mean),
            opt(self.eps2_se),
            opt(self.looe_approx1_mean),
            opt(self.looe_approx1_se),
            opt(self.looe_approx2_mean),
            opt(self.looe_approx2_se),
            opt(self.looe_naive_mean),
            opt(self.looe_naive_se),
            fmt_float(self.rho_mean),
            fmt_float(self.df_mean),
            opt(self.tp_mean),
            opt(self.fp_mean),
            self.unstable
        )
    }
}

#[derive(Serialize)]
pub struct ReplicaRecord {
    pub lambda: f64,
    pub rho: f64,
    pub tp: Option<f64>,
    pub fp: f64,
    pub eps1: f64,
    pub eps2: f64,
    pub looe1: f64,
    pub looe2_correct: f64,
    pub looe2_incorrect: f64,
    pub mse1: f64,
    pub mse2: f64,
    pub youden: f64,
    pub converged: bool,
}

impl CsvRecord for ReplicaRecord {
    fn header() -> &'static str {
        "lambda,rho,tp,fp,eps1,eps2,looe1,looe2_correct,looe2_incorrect,mse1,mse2,youden,converged"
    }

    fn row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{}",
            fmt_float(self.lambda),
            fmt_float(self.rho),
            opt(self.tp),
            fmt_float(self.fp),
            fmt_float(self.eps1),
            fmt_float(self.eps2),
            fmt_float(self.looe1),
            fmt_float(self.looe2_correct),
            fmt_float(self.looe2_incorrect),
            fmt_float(self.mse1),
            fmt_float(self.mse2),
            fmt_float(self.youden),
            self.converged
        )
    }
}
