use std::io::Write;

use super::engine::Trajectory;
use crate::error::{Error, Result};
use crate::scalar::Real;

pub const TRAJECTORY_HEADER: &str = "round,t,I,K,tau_B,omega,mass,x,r,S";

fn io_err(e: std::io::Error) -> Error {
    Error::Input(format!("write failed: {e}"))
}

impl<T: Real> Trajectory<T> {
    /// One row per state, reals in scientific notation with 17 significant
    /// digits.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "{TRAJECTORY_HEADER}").map_err(io_err)?;
        for s in &self.states {
            writeln!(
                w,
                "{},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                s.round,
                s.t.as_f64(),
                s.i.as_f64(),
                s.k.as_f64(),
                s.tau_b.as_f64(),
                s.omega.as_f64(),
                s.mass.as_f64(),
                s.x.as_f64(),
                s.r.as_f64(),
                s.s.as_f64(),
            )
            .map_err(io_err)?;
        }
        w.flush().map_err(io_err)
    }

    pub fn write_metadata<W: Write>(&self, mut w: W) -> Result<()> {
        serde_json::to_writer_pretty(&mut w, &self.meta)
            .map_err(|e| Error::Input(format!("write failed: {e}")))?;
        writeln!(w).map_err(io_err)
    }
}
