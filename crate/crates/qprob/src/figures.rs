//! Data series behind the published figures, keyed by the figure number of
//! the article (`fig3a`, `fig8f`, ...). Each series is a [`Payload`] that
//! carries its own normalization constraints.

use std::f64::consts::{PI, SQRT_2};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::config::Grid;
use crate::error::{QprobError, Result};
use crate::io::{Constraint, Payload, Sweep};
use crate::ising::{self, IsingQuenchSpec};
use crate::linalg::c64;
use crate::manybody;
use crate::presets;
use crate::schemes;
use crate::thermo;
use crate::tol;

pub const FIGURE_IDS: [(&str, &str); 14] = [
    ("fig2", "detector position density P(x) for rho01 = 0, 0.3, -0.3"),
    ("fig3a", "driven qubit Re q_if(t) at Omega = (sqrt2 - 1) delta"),
    ("fig3b", "driven qubit Re q_if(t) at Omega = (sqrt2 + 1) delta"),
    ("fig4", "driven qubit average work: KDQ, TPM and minus the classical bound"),
    ("fig5", "driven qubit work variance: Re and Im of the KDQ variance, TPM variance"),
    ("fig6", "two-qubit average heat against theta for eta = 0, 0.2, 0.4"),
    ("fig8", "OTOC characteristic function and aleph against t for J = 0.5, 1.5, 2.5"),
    ("fig8de", "OTOC quasiprobabilities q_nm against omega t at J = 2"),
    ("fig8f", "minimum of Re G over 0 <= t <= 20 on a (beta, J) grid"),
    ("fig9a", "qubit Loschmidt amplitude Re G(t) for delta = 0.1, 0.4, 0.7, 1.0"),
    ("fig9b", "qubit Loschmidt quasiprobabilities and aleph against delta / B"),
    ("fig10a", "Ising quench work distribution, N = 12, p = 0"),
    ("fig10b", "Ising quench work distribution, N = 12, p = 1"),
    ("fig11", "Ising quench |<W>| and variance against p"),
];

pub fn figure(id: &str) -> Result<Payload> {
    match id {
        "fig2" => fig2(),
        "fig3a" => fig3(SQRT_2 - 1.0),
        "fig3b" => fig3(SQRT_2 + 1.0),
        "fig4" => fig4(),
        "fig5" => fig5(),
        "fig6" => fig6(),
        "fig8" => fig8(),
        "fig8de" => fig8de(),
        "fig8f" => fig8f(),
        "fig9a" => fig9a(),
        "fig9b" => fig9b(),
        "fig10a" => fig10(0.0),
        "fig10b" => fig10(1.0),
        "fig11" => fig11(),
        other => Err(QprobError::InvalidParameter(format!(
            "unknown figure `{other}` (known: {})",
            FIGURE_IDS.map(|(k, _)| k).join(", ")
        ))),
    }
}

fn fig2() -> Result<Payload> {
    let mut cols = vec!["x".to_string()];
    let mut densities = Vec::new();
    let mut xs = Vec::new();
    for (name, r) in [("p_rho01_0", 0.0), ("p_rho01_p03", 0.3), ("p_rho01_m03", -0.3)] {
        let (s, spec) = presets::gaussian_detector(c64(r, 0.0), 1.0, 0.6, 1.0)?;
        let d = schemes::detector_position(&s.rho, &s.o1, &s.channel, &s.o2, &spec)?;
        xs = d.xs;
        densities.push(d.density);
        cols.push(name.into());
    }
    let mut sweep = Sweep::with_columns(cols.clone());
    for (i, &x) in xs.iter().enumerate() {
        let mut row = vec![x];
        row.extend(densities.iter().map(|d| d[i]));
        sweep.push(row);
    }
    for c in &cols[1..] {
        sweep = sweep.constrain(Constraint::Integral {
            x: "x".into(),
            y: c.clone(),
            target: 1.0,
            tol: tol::GRID_MASS_TOL,
        });
    }
    Ok(Payload::Sweep(sweep))
}

const Q_COLUMNS: [&str; 4] = ["re_q_mm", "re_q_mp", "re_q_pm", "re_q_pp"];

/// `delta = 1`, `p = c = 1/2`, two Rabi periods.
fn fig3(omega: f64) -> Result<Payload> {
    let ts = Grid::new(0.0, 4.0 * PI / omega, 401).points();
    let rows = ts
        .par_iter()
        .map(|&t| {
            let q = thermo::work_table(&thermo::driven_qubit_preset(omega, 1.0, 0.5, 0.5, t)?)?.q;
            Ok(vec![t, q[(0, 0)].re, q[(0, 1)].re, q[(1, 0)].re, q[(1, 1)].re])
        })
        .collect::<Result<Vec<_>>>()?;
    let mut sweep = Sweep::new(&["t", Q_COLUMNS[0], Q_COLUMNS[1], Q_COLUMNS[2], Q_COLUMNS[3]])
        .constrain(Constraint::row_sum(&Q_COLUMNS, 1.0));
    sweep.rows = rows;
    Ok(Payload::Sweep(sweep))
}

/// Fig. 4 and 5 parameters: `p = 1/2`, `c = -1/2`, `Omega = (1 + sqrt2) delta`.
fn driven_sweep<F>(columns: &[&str], f: F) -> Result<Payload>
where
    F: Fn(f64, &thermo::WorkProtocol) -> Result<Vec<f64>> + Sync,
{
    let omega = 1.0 + SQRT_2;
    let rows = Grid::new(0.0, 2.0, 201)
        .points()
        .par_iter()
        .map(|&x| {
            let protocol = thermo::driven_qubit_preset(omega, 1.0, 0.5, -0.5, x * PI / omega)?;
            let mut row = vec![x];
            row.extend(f(x, &protocol)?);
            Ok(row)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut sweep = Sweep::new(columns);
    sweep.rows = rows;
    Ok(Payload::Sweep(sweep))
}

fn fig4() -> Result<Payload> {
    driven_sweep(&["omega_t_over_pi", "w_kdq", "w_tpm", "minus_classical_bound"], |_, p| {
        let r = thermo::classical_bound(p)?;
        Ok(vec![r.avg_work_kdq, r.avg_work_tpm, -r.classical_bound])
    })
}

fn fig5() -> Result<Payload> {
    driven_sweep(&["omega_t_over_pi", "re_var_kdq", "im_var_kdq", "var_tpm"], |_, p| {
        let v = thermo::work_variance(p)?;
        Ok(vec![v.re, v.im, v.tpm_variance])
    })
}

/// `p = 0`, `xi = 0`, `beta_c = 10`, `beta_h = 0.1`. At `p = 0` this state
/// has a negative population, so the heat is evaluated on the raw matrix.
fn fig6() -> Result<Payload> {
    let etas = [0.0, 0.2, 0.4];
    let h = crate::linalg::diag(&[0.0, 1.0]);
    let mut sweep = Sweep::new(&["theta", "q_eta_0", "q_eta_02", "q_eta_04"]);
    for theta in Grid::new(0.0, PI, 181).points() {
        let u = thermo::partial_swap(theta);
        let mut row = vec![theta];
        for &eta in &etas {
            let x = thermo::two_qubit_heat_matrix(0.0, eta, 0.0, 10.0, 0.1);
            row.push(thermo::average_heat_functional(&x, &u, &h, 2));
        }
        sweep.push(row);
    }
    Ok(Payload::Sweep(sweep))
}

const B1: f64 = 1.0;
const B2: f64 = 1.1;
const OTOC_BETA: f64 = 10.0;

fn otoc_row(spec: &manybody::OtocSpec, t: f64, u: f64) -> Result<(Complex64, f64)> {
    let table = manybody::otoc_kdq(spec, t)?;
    Ok((table.characteristic(c64(-u, 0.0)), table.nonpositivity()))
}

fn fig8() -> Result<Payload> {
    let js = [0.5, 1.5, 2.5];
    let specs = js
        .iter()
        .map(|&j| manybody::two_qubit_otoc_preset(B1, B2, j, OTOC_BETA))
        .collect::<Result<Vec<_>>>()?;
    let mut cols = vec!["t".to_string()];
    for tag in ["05", "15", "25"] {
        cols.extend([format!("re_g_j{tag}"), format!("im_g_j{tag}"), format!("aleph_j{tag}")]);
    }
    let rows = Grid::new(0.0, 20.0, 401)
        .points()
        .par_iter()
        .map(|&t| {
            let mut row = vec![t];
            for s in &specs {
                let (g, aleph) = otoc_row(s, t, PI / 2.0)?;
                row.extend([g.re, g.im, aleph]);
            }
            Ok(row)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut sweep = Sweep::with_columns(cols);
    sweep.rows = rows;
    Ok(Payload::Sweep(sweep))
}

/// Paper labels `0 = +1`, the last branch of the ascending table.
fn fig8de() -> Result<Payload> {
    let j = 2.0;
    let spec = manybody::two_qubit_otoc_preset(B1, B2, j, OTOC_BETA)?;
    let omega = manybody::two_qubit_otoc_frequencies(B1, B2, j).0;
    let labels = [(0, 0), (0, 1), (1, 0), (1, 1)];
    let mut cols = vec!["omega_t".to_string()];
    cols.extend(labels.iter().map(|(n, m)| format!("re_q{n}{m}")));
    cols.extend(labels.iter().map(|(n, m)| format!("im_q{n}{m}")));
    let re_cols: Vec<String> = cols[1..5].to_vec();
    let im_cols: Vec<String> = cols[5..].to_vec();
    let mut sweep = Sweep::with_columns(cols);
    for wt in Grid::new(0.0, 4.0 * PI, 401).points() {
        let q = manybody::otoc_kdq(&spec, wt / omega)?.q;
        let mut row = vec![wt];
        // rows of the table are the first measurement m, columns n
        row.extend(labels.iter().map(|&(n, m)| q[(1 - m, 1 - n)].re));
        row.extend(labels.iter().map(|&(n, m)| q[(1 - m, 1 - n)].im));
        sweep.push(row);
    }
    let sweep = sweep
        .constrain(Constraint::RowSum {
            columns: re_cols,
            target: 1.0,
            tol: crate::io::NORMALIZATION_TOL,
        })
        .constrain(Constraint::RowSum {
            columns: im_cols,
            target: 0.0,
            tol: crate::io::NORMALIZATION_TOL,
        });
    Ok(Payload::Sweep(sweep))
}

/// Minimum of `Re G(pi/2, t)` over `0 <= t <= 20`.
pub fn otoc_min_re(b1: f64, b2: f64, j: f64, beta: f64, times: &[f64]) -> Result<f64> {
    let spec = manybody::two_qubit_otoc_preset(b1, b2, j, beta)?;
    times.iter().try_fold(f64::INFINITY, |m, &t| {
        Ok(m.min(manybody::otoc_characteristic_mhq(&spec, t, PI / 2.0)?))
    })
}

fn fig8f() -> Result<Payload> {
    let times = Grid::new(0.0, 20.0, 401).points();
    let pairs: Vec<(f64, f64)> = Grid::new(0.5, 10.0, 20)
        .points()
        .into_iter()
        .flat_map(|b| Grid::new(0.0, 3.0, 13).points().into_iter().map(move |j| (b, j)))
        .collect();
    let rows = pairs
        .par_iter()
        .map(|&(b, j)| Ok(vec![b, j, otoc_min_re(B1, B2, j, b, &times)?]))
        .collect::<Result<Vec<_>>>()?;
    let mut sweep = Sweep::new(&["beta", "j", "min_re_g"]);
    sweep.rows = rows;
    Ok(Payload::Sweep(sweep))
}

fn fig9a() -> Result<Payload> {
    let deltas = [0.1, 0.4, 0.7, 1.0];
    let specs = deltas
        .iter()
        .map(|&d| manybody::qubit_loschmidt_preset(1.0, d))
        .collect::<Result<Vec<_>>>()?;
    let mut sweep = Sweep::new(&["t", "re_g_d01", "re_g_d04", "re_g_d07", "re_g_d10"]);
    for t in Grid::new(0.0, 20.0, 401).points() {
        let mut row = vec![t];
        row.extend(specs.iter().map(|s| manybody::loschmidt_amplitude(s, t).re));
        sweep.push(row);
    }
    Ok(Payload::Sweep(sweep))
}

/// Paper labels `0 = upper level`, the last branch of the ascending table.
fn fig9b() -> Result<Payload> {
    let cols = ["q00", "q01", "q10", "q11"];
    let mut sweep = Sweep::new(&["delta_over_b", cols[0], cols[1], cols[2], cols[3], "aleph"])
        .constrain(Constraint::row_sum(&cols, 1.0));
    for d in Grid::new(0.0, 3.0, 301).points() {
        let table = manybody::loschmidt_kdq(&manybody::qubit_loschmidt_preset(1.0, d)?)?;
        let mut row = vec![d];
        for (n, m) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
            row.push(table.q[(1 - n, 1 - m)].re);
        }
        row.push(table.nonpositivity());
        sweep.push(row);
    }
    Ok(Payload::Sweep(sweep))
}

fn ising_spec(p: f64) -> IsingQuenchSpec {
    IsingQuenchSpec {
        n: 12,
        lambda0: 0.0,
        lambda1: 0.5,
        beta: 0.1,
        p,
    }
}

fn fig10(p: f64) -> Result<Payload> {
    Ok(Payload::distribution(&ising::assemble_distribution(&ising_spec(p))?))
}

fn fig11() -> Result<Payload> {
    let ps = Grid::new(0.0, 1.0, 11).points();
    let mut sweep = Sweep::new(&["p", "abs_mean", "variance"]);
    for r in ising::moments_sweep(&ising_spec(0.0), &ps)? {
        sweep.push(vec![r.p, r.mean.abs(), r.variance]);
    }
    Ok(Payload::Sweep(sweep))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_figure_passes_its_checks() {
        for (id, _) in FIGURE_IDS {
            if id == "fig8f" {
                continue;
            }
            let p = figure(id).unwrap_or_else(|e| panic!("{id}: {e}"));
            p.verify().unwrap_or_else(|e| panic!("{id}: {e}"));
        }
    }

    #[test]
    fn unknown_figure_is_an_error() {
        assert!(figure("fig99").is_err());
    }
}
