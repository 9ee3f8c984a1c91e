use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{BanditError, Result};
use crate::runner::experiment::{display, SweepRow, TrajectoryRow};

pub const TRAJECTORY_FILE: &str = "trajectory.csv";
pub const SWEEP_FILE: &str = "sweep.csv";
pub const SUMMARY_FILE: &str = "summary.json";
pub const LIPSCHITZ_FILE: &str = "lipschitz.csv";

/// Output files of one command, created (and so checked for writability)
/// before any simulation starts.
#[derive(Debug)]
pub struct OutputFiles {
    dir: PathBuf,
    files: Vec<(&'static str, File)>,
}

impl OutputFiles {
    pub fn prepare(dir: &Path, names: &[&'static str]) -> Result<Self> {
        std::fs::create_dir_all(dir).map_err(|e| BanditError::io(dir, e))?;
        let mut files = Vec::with_capacity(names.len());
        for &name in names {
            let path = dir.join(name);
            let file = File::create(&path).map_err(|e| BanditError::io(&path, e))?;
            files.push((name, file));
        }
        Ok(OutputFiles {
            dir: dir.to_path_buf(),
            files,
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn take(&mut self, name: &str) -> Result<(PathBuf, BufWriter<File>)> {
        let pos = self
            .files
            .iter()
            .position(|(n, _)| *n == name)
            .ok_or_else(|| {
                BanditError::Data(format!("{name} was not prepared in {}", display(&self.dir)))
            })?;
        let (_, file) = self.files.swap_remove(pos);
        Ok((self.dir.join(name), BufWriter::new(file)))
    }

    fn write_with<F>(&mut self, name: &str, body: F) -> Result<()>
    where
        F: FnOnce(&mut BufWriter<File>) -> std::io::Result<()>,
    {
        let (path, mut w) = self.take(name)?;
        body(&mut w)
            .and_then(|_| w.flush())
            .map_err(|e| BanditError::io(&path, e))
    }

    /// `run_id,t,cluster,arm,reward,cum_regret`.
    pub fn write_trajectories(&mut self, runs: &[(String, Vec<TrajectoryRow>)]) -> Result<()> {
        self.write_with(TRAJECTORY_FILE, |w| {
            writeln!(w, "run_id,t,cluster,arm,reward,cum_regret")?;
            for (id, rows) in runs {
                for r in rows {
                    writeln!(
                        w,
                        "{id},{},{},{},{},{}",
                        r.t, r.cluster, r.arm, r.reward, r.cum_regret
                    )?;
                }
            }
            Ok(())
        })
    }

    /// `p,mean_regret,std_regret,repeats`.
    pub fn write_sweep(&mut self, rows: &[SweepRow]) -> Result<()> {
        self.write_with(SWEEP_FILE, |w| {
            writeln!(w, "p,mean_regret,std_regret,repeats")?;
            for r in rows {
                writeln!(
                    w,
                    "{},{},{},{}",
                    r.p, r.mean_regret, r.std_regret, r.repeats
                )?;
            }
            Ok(())
        })
    }

    /// `arm,ell`.
    pub fn write_lipschitz(&mut self, ell: &[f64]) -> Result<()> {
        self.write_with(LIPSCHITZ_FILE, |w| {
            writeln!(w, "arm,ell")?;
            for (arm, l) in ell.iter().enumerate() {
                writeln!(w, "{arm},{l}")?;
            }
            Ok(())
        })
    }

    pub fn write_summary<S: Serialize>(&mut self, summary: &S) -> Result<()> {
        self.write_with(SUMMARY_FILE, |w| {
            serde_json::to_writer_pretty(&mut *w, summary).map_err(std::io::Error::other)?;
            writeln!(w)
        })
    }
}
