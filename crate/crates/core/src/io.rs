//! Team, 2CNF, mtdf and forest file formats.
//!
//! Teams are read as CSV (header row of variable names, values trimmed) or
//! JSON (`{"vars": [...], "rows": [[...], ...]}`). Values stay text: `01` and
//! `1` are different values. Loaded teams are deduplicated and sorted
//! lexicographically so row indices in certificates are reproducible.

use std::fs;
use std::io::{Read, Write};
use std::path::Path;
use std::str::FromStr;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::reductions::{CnfInstance, MtdfInstance, UfaInstance};
use crate::team::{Team, TeamBuilder};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TeamFormat {
    Csv,
    Json,
}

impl TeamFormat {
    /// Guesses from the extension; anything other than `.json` is CSV.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("json") => TeamFormat::Json,
            _ => TeamFormat::Csv,
        }
    }
}

impl FromStr for TeamFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(TeamFormat::Csv),
            "json" => Ok(TeamFormat::Json),
            other => Err(Error::InvalidParameter(format!("unknown team format `{other}`"))),
        }
    }
}

fn check_header(vars: &[String]) -> Result<()> {
    if vars.is_empty() {
        return Err(Error::Format("empty header".into()));
    }
    if let Some(i) = vars.iter().position(|v| v.is_empty()) {
        return Err(Error::Format(format!("header column {} has no name", i + 1)));
    }
    Ok(())
}

pub fn read_team_csv(reader: impl Read) -> Result<Team> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut records = rdr.records();
    let header: Vec<String> = match records.next() {
        Some(rec) => rec?.iter().map(str::to_string).collect(),
        None => return Err(Error::Format("empty header".into())),
    };
    // A lone blank line parses as one empty field.
    if header.len() == 1 && header[0].is_empty() {
        return Err(Error::Format("empty header".into()));
    }
    check_header(&header)?;
    let mut b = TeamBuilder::new(&header)?;
    for (i, rec) in records.enumerate() {
        let rec = rec?;
        if rec.len() != header.len() {
            return Err(Error::RaggedRow {
                row: i + 1,
                expected: header.len(),
                found: rec.len(),
            });
        }
        b.push_row(rec.iter())?;
    }
    Ok(b.build().sorted())
}

#[derive(Deserialize)]
struct JsonTeamIn {
    vars: Vec<String>,
    #[serde(default)]
    rows: Vec<Vec<serde_json::Value>>,
}

#[derive(Serialize)]
struct JsonTeamOut<'a> {
    vars: &'a [String],
    rows: Vec<Vec<String>>,
}

fn json_cell(v: &serde_json::Value, row: usize) -> Result<String> {
    match v {
        serde_json::Value::String(s) => Ok(s.clone()),
        serde_json::Value::Number(n) => Ok(n.to_string()),
        serde_json::Value::Bool(b) => Ok(b.to_string()),
        other => Err(Error::Format(format!("row {row}: unsupported value {other}"))),
    }
}

pub fn read_team_json(reader: impl Read) -> Result<Team> {
    let raw: JsonTeamIn = serde_json::from_reader(reader)?;
    check_header(&raw.vars)?;
    let mut b = TeamBuilder::new(&raw.vars)?;
    for (i, row) in raw.rows.iter().enumerate() {
        if row.len() != raw.vars.len() {
            return Err(Error::RaggedRow {
                row: i + 1,
                expected: raw.vars.len(),
                found: row.len(),
            });
        }
        let cells = row.iter().map(|v| json_cell(v, i + 1)).collect::<Result<Vec<_>>>()?;
        b.push_row(cells)?;
    }
    Ok(b.build().sorted())
}

pub fn read_team(reader: impl Read, format: TeamFormat) -> Result<Team> {
    match format {
        TeamFormat::Csv => read_team_csv(reader),
        TeamFormat::Json => read_team_json(reader),
    }
}

/// Loads a team; `format` defaults to the file extension. Duplicate rows are
/// dropped and counted in [`Team::duplicates_removed`].
pub fn load_team(path: impl AsRef<Path>, format: Option<TeamFormat>) -> Result<Team> {
    let path = path.as_ref();
    let format = format.unwrap_or_else(|| TeamFormat::from_path(path));
    let file = fs::File::open(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let team = read_team(std::io::BufReader::new(file), format)?;
    if team.duplicates_removed() > 0 {
        log::info!("{}: dropped {} duplicate rows", path.display(), team.duplicates_removed());
    }
    Ok(team)
}

pub fn write_team_csv(team: &Team, writer: impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(team.vars())?;
    for r in 0..team.len() {
        w.write_record(team.row_text(r))?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_team_json(team: &Team, writer: impl Write) -> Result<()> {
    let out = JsonTeamOut {
        vars: team.vars(),
        rows: (0..team.len()).map(|r| team.row_text(r)).collect(),
    };
    serde_json::to_writer(writer, &out)?;
    Ok(())
}

pub fn team_to_csv_string(team: &Team) -> String {
    let mut buf = Vec::new();
    write_team_csv(team, &mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("csv output is utf-8")
}

pub fn save_team(team: &Team, path: impl AsRef<Path>, format: Option<TeamFormat>) -> Result<()> {
    let path = path.as_ref();
    let format = format.unwrap_or_else(|| TeamFormat::from_path(path));
    let file = fs::File::create(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let mut w = std::io::BufWriter::new(file);
    match format {
        TeamFormat::Csv => write_team_csv(team, &mut w)?,
        TeamFormat::Json => write_team_json(team, &mut w)?,
    }
    w.flush()?;
    Ok(())
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn load_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    Ok(serde_json::from_str(&read_text(path)?)?)
}

/// DIMACS-style 2CNF.
pub fn load_cnf(path: impl AsRef<Path>) -> Result<CnfInstance> {
    CnfInstance::parse_dimacs(&read_text(path.as_ref())?)
}

/// `{"pos_cliques": [[...]], "neg_cliques": [[...]]}`, optionally with
/// `num_vars`; validated.
pub fn load_mtdf(path: impl AsRef<Path>) -> Result<MtdfInstance> {
    parse_mtdf(&read_text(path.as_ref())?)
}

pub fn parse_mtdf(text: &str) -> Result<MtdfInstance> {
    let m: MtdfInstance = serde_json::from_str(text)?;
    let m = m.with_inferred_size();
    m.validate()?;
    Ok(m)
}

/// `{"edges": [[a, b], ...], "u": ..., "v": ...}`; validated.
pub fn load_ufa(path: impl AsRef<Path>) -> Result<UfaInstance> {
    let g: UfaInstance = load_json(path.as_ref())?;
    g.validate()?;
    Ok(g)
}
