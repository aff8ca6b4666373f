use num_complex::Complex64;
use ptlab::spectra::{classify_spectrum, jordan_chain, JordanChain};
use serde::Serialize;

use crate::error::{CliError, CliResult};
use crate::io::{fmt_f64, load_matrix, Table};
use crate::Ctx;

#[derive(Debug, clap::Args)]
pub struct Args {
    /// Matrix document.
    #[arg(long)]
    matrix: String,
    /// `re` or `re,im`; defaults to every defective eigenvalue.
    #[arg(long)]
    eigenvalue: Option<String>,
    /// Free chain constant, `re` or `re,im`.
    #[arg(long, default_value = "0")]
    alpha: String,
}

#[derive(Debug, Serialize)]
struct ChainOutput {
    eigenvalue: Complex64,
    alpha: Complex64,
    /// `Φ0, Φ1, …`, each as a list of `[re, im]`.
    vectors: Vec<Vec<Complex64>>,
    /// `‖(H − λ)Φ0‖`, then `‖(H − λ)Φ_{k+1} − Φ_k‖`.
    residuals: Vec<f64>,
}

#[derive(Debug, Serialize)]
struct JordanOutput {
    chains: Vec<ChainOutput>,
}

fn parse_complex(s: &str, what: &str) -> CliResult<Complex64> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let num = |t: &str| {
        t.parse::<f64>()
            .ok()
            .filter(|x| x.is_finite())
            .ok_or_else(|| CliError::parse(format!("{what}: cannot read \"{s}\" as re[,im]")))
    };
    match parts.as_slice() {
        [re] => Ok(Complex64::new(num(re)?, 0.0)),
        [re, im] => Ok(Complex64::new(num(re)?, num(im)?)),
        _ => Err(CliError::parse(format!("{what}: cannot read \"{s}\" as re[,im]"))),
    }
}

pub fn run(ctx: &Ctx, args: Args) -> CliResult<()> {
    let h = load_matrix(&args.matrix)?;
    h.require_square("matrix")?;
    let alpha = parse_complex(&args.alpha, "--alpha")?;
    let targets: Vec<Complex64> = match &args.eigenvalue {
        Some(s) => vec![parse_complex(s, "--eigenvalue")?],
        None => {
            let report = classify_spectrum(&h, &ctx.tol, None)?;
            report
                .segre
                .iter()
                .filter(|s| s.blocks.first().is_some_and(|&b| b > 1))
                .map(|s| s.eigenvalue)
                .collect()
        }
    };
    if targets.is_empty() {
        return Err(CliError::kind("matrix is diagonalizable: no Jordan chain to extract"));
    }
    let chains = targets
        .iter()
        .map(|&lam| {
            let ch: JordanChain = jordan_chain(&h, lam, &ctx.tol)?.with_alpha(alpha);
            Ok(ChainOutput {
                eigenvalue: ch.eigenvalue,
                alpha,
                residuals: ch.residuals(&h),
                vectors: ch.vectors.iter().map(|v| v.iter().copied().collect()).collect(),
            })
        })
        .collect::<CliResult<Vec<_>>>()?;
    let out = JordanOutput { chains };
    ctx.sink.emit(&out, || {
        let mut t = Table::new(&["chain", "vector", "component", "re", "im"]);
        for (c, ch) in out.chains.iter().enumerate() {
            for (k, v) in ch.vectors.iter().enumerate() {
                for (i, z) in v.iter().enumerate() {
                    t.push(vec![c.to_string(), k.to_string(), i.to_string(), fmt_f64(z.re), fmt_f64(z.im)]);
                }
            }
        }
        t
    })
}
