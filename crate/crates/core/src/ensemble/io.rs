//! Ensemble export and import: CSV rows and a JSON envelope carrying the
//! seed and model descriptor alongside the same rows.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::models::CorrelationModel;
use crate::primitives::Outcome;
use crate::settings::SettingLabel;

use super::Ensemble;

/// One trial as written to disk. Columns, in order:
/// `index, alice_setting, bob_setting, alice_outcome, bob_outcome`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleRow {
    pub index: u64,
    pub alice_setting: SettingLabel,
    pub bob_setting: SettingLabel,
    pub alice_outcome: Outcome,
    pub bob_outcome: Outcome,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleEnvelope {
    pub seed: u64,
    pub model: CorrelationModel,
    pub rows: Vec<EnsembleRow>,
}

pub fn write_csv<W: Write>(ensemble: &Ensemble, writer: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(writer);
    for row in ensemble.rows() {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<R: Read>(reader: R) -> Result<Vec<EnsembleRow>> {
    let mut r = csv::Reader::from_reader(reader);
    let rows = r.deserialize().collect::<std::result::Result<Vec<EnsembleRow>, _>>()?;
    Ok(rows)
}

pub fn write_json<W: Write>(ensemble: &Ensemble, writer: W) -> Result<()> {
    // Streams rows instead of materializing the envelope.
    #[derive(Serialize)]
    struct Borrowed<'a> {
        seed: u64,
        model: &'a CorrelationModel,
        rows: RowSeq<'a>,
    }
    struct RowSeq<'a>(&'a Ensemble);
    impl Serialize for RowSeq<'_> {
        fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
            s.collect_seq(self.0.rows())
        }
    }
    let mut writer = std::io::BufWriter::new(writer);
    serde_json::to_writer(
        &mut writer,
        &Borrowed { seed: ensemble.seed(), model: ensemble.model(), rows: RowSeq(ensemble) },
    )?;
    writer.write_all(b"\n")?;
    writer.flush()?;
    Ok(())
}

pub fn read_json<R: Read>(reader: R) -> Result<Ensemble> {
    let env: EnsembleEnvelope = serde_json::from_reader(std::io::BufReader::new(reader))?;
    Ensemble::from_rows(env.seed, env.model, &env.rows)
}
