use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::Result;

/// Relative errors `‖u − u_ref‖ / ‖u_ref‖` in several norms.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ErrorNorms {
    pub l1: f64,
    pub l2: f64,
    pub linf: f64,
    /// Norm induced by the quadrature weights.
    pub p: f64,
}

impl ErrorNorms {
    pub fn relative(u: &[f64], reference: &[f64], weights: &[f64]) -> Self {
        let mut num = [0.0; 4];
        let mut den = [0.0; 4];
        for k in 0..u.len() {
            let (e, r) = ((u[k] - reference[k]).abs(), reference[k].abs());
            num[0] += e;
            den[0] += r;
            num[1] += e * e;
            den[1] += r * r;
            num[2] = f64::max(num[2], e);
            den[2] = f64::max(den[2], r);
            num[3] += weights[k] * e * e;
            den[3] += weights[k] * r * r;
        }
        Self {
            l1: num[0] / den[0],
            l2: (num[1] / den[1]).sqrt(),
            linf: num[2] / den[2],
            p: (num[3] / den[3]).sqrt(),
        }
    }

    pub fn nan() -> Self {
        Self { l1: f64::NAN, l2: f64::NAN, linf: f64::NAN, p: f64::NAN }
    }

    pub fn get(&self, norm: &str) -> Option<f64> {
        match norm {
            "1" | "l1" => Some(self.l1),
            "2" | "l2" => Some(self.l2),
            "inf" | "linf" => Some(self.linf),
            "P" | "p" => Some(self.p),
            _ => None,
        }
    }
}

/// Time history and final state of one run.
#[derive(Clone, Debug, Default)]
pub struct ExperimentReport {
    pub experiment: String,
    /// Space tag or baseline operator name.
    pub scheme: String,
    pub times: Vec<f64>,
    pub mass: Vec<f64>,
    pub energy: Vec<f64>,
    /// Errors at each sample when the reference is known at all times.
    pub sample_errors: Vec<Option<ErrorNorms>>,
    /// Final-time errors against the experiment's reference.
    pub errors: Option<ErrorNorms>,
    /// Node coordinates; for 2D runs the x-axis.
    pub x: Vec<f64>,
    /// y-axis of a 2D run (solution stored row by row).
    pub y: Option<Vec<f64>>,
    pub solution: Vec<f64>,
    /// `max(|m₀|, Σ P|u₀|)`, the scale of relative mass drift.
    pub mass_scale: f64,
    pub dt: f64,
    pub steps: usize,
    pub runtime_secs: f64,
}

impl ExperimentReport {
    /// `max_t |m(t) − m(0)| / mass_scale`
    pub fn mass_drift(&self) -> f64 {
        let m0 = self.mass.first().copied().unwrap_or(0.0);
        self.mass.iter().map(|m| (m - m0).abs()).fold(0.0, f64::max) / self.mass_scale
    }

    pub fn final_energy(&self) -> f64 {
        self.energy.last().copied().unwrap_or(f64::NAN)
    }

    pub fn write_history(&self, out: &mut impl Write) -> Result<()> {
        let with_errors = self.sample_errors.iter().any(Option::is_some) || self.errors.is_some();
        if with_errors {
            writeln!(out, "t,mass,energy,err_1,err_2,err_inf,err_P")?;
        } else {
            writeln!(out, "t,mass,energy")?;
        }
        let last = self.times.len().saturating_sub(1);
        for k in 0..self.times.len() {
            write!(out, "{:e},{:e},{:e}", self.times[k], self.mass[k], self.energy[k])?;
            if with_errors {
                let e = self.sample_errors.get(k).copied().flatten().or(if k == last { self.errors } else { None });
                match e {
                    Some(e) => write!(out, ",{:e},{:e},{:e},{:e}", e.l1, e.l2, e.linf, e.p)?,
                    None => write!(out, ",,,,")?,
                }
            }
            writeln!(out)?;
        }
        Ok(())
    }

    pub fn write_snapshot(&self, out: &mut impl Write) -> Result<()> {
        match &self.y {
            None => {
                writeln!(out, "x,u")?;
                for (x, u) in self.x.iter().zip(&self.solution) {
                    writeln!(out, "{x:e},{u:e}")?;
                }
            }
            Some(ys) => {
                writeln!(out, "# layout: row-major, y outer, x inner")?;
                writeln!(out, "x,y,u")?;
                let nx = self.x.len();
                for (j, y) in ys.iter().enumerate() {
                    for (i, x) in self.x.iter().enumerate() {
                        writeln!(out, "{x:e},{y:e},{:e}", self.solution[j * nx + i])?;
                    }
                }
            }
        }
        Ok(())
    }

    pub fn write_files(&self, history: &Path, snapshot: &Path) -> Result<()> {
        let mut h = std::io::BufWriter::new(fs::File::create(history)?);
        self.write_history(&mut h)?;
        h.flush()?;
        let mut s = std::io::BufWriter::new(fs::File::create(snapshot)?);
        self.write_snapshot(&mut s)?;
        s.flush()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn relative_norms() {
        let e = ErrorNorms::relative(&[1.0, 2.0], &[1.0, 1.0], &[0.5, 0.5]);
        assert_eq!(e.l1, 0.5);
        assert!((e.l2 - (0.5f64).sqrt()).abs() < 1e-15);
        assert_eq!(e.linf, 1.0);
        assert!((e.p - (0.5f64).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn history_csv_layout() {
        let r = ExperimentReport {
            times: vec![0.0, 1.0],
            mass: vec![1.0, 1.0],
            energy: vec![2.0, 1.5],
            sample_errors: vec![None, None],
            errors: Some(ErrorNorms { l1: 0.1, l2: 0.2, linf: 0.3, p: 0.4 }),
            mass_scale: 1.0,
            ..Default::default()
        };
        let mut buf = Vec::new();
        r.write_history(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "t,mass,energy,err_1,err_2,err_inf,err_P");
        assert_eq!(lines[1], "0e0,1e0,2e0,,,,");
        assert_eq!(lines[2], "1e0,1e0,1.5e0,1e-1,2e-1,3e-1,4e-1");
        assert_eq!(r.mass_drift(), 0.0);
    }
}
