//! Plain-text embedding export and re-import.
//!
//! `text` is the word2vec-style layout: a "l m" header, then one line per
//! word with the u-mean coordinates. `means+vars` appends the diagonal
//! posterior variances after the means, doubling the numeric columns.
//! Numbers are printed with 6 significant digits.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::trainer::Model;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExportFormat {
    Text,
    MeansVars,
}

impl FromStr for ExportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "text" => Ok(ExportFormat::Text),
            "means+vars" | "means-vars" => Ok(ExportFormat::MeansVars),
            other => Err(Error::InvalidArgument(format!(
                "unknown export format {other:?}, expected text or means+vars"
            ))),
        }
    }
}

impl std::fmt::Display for ExportFormat {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ExportFormat::Text => "text",
            ExportFormat::MeansVars => "means+vars",
        })
    }
}

pub fn write_text(model: &Model, out: &mut impl Write) -> Result<()> {
    writeln!(out, "{} {}", model.vocab.len(), model.hyper.dim)?;
    for (id, word) in model.vocab.words().iter().enumerate() {
        write!(out, "{word}")?;
        for x in model.u_bank[id].mean.iter() {
            write!(out, " {x:.5e}")?;
        }
        writeln!(out)?;
    }
    Ok(())
}

pub fn write_means_vars(model: &Model, out: &mut impl Write) -> Result<()> {
    writeln!(out, "{} {}", model.vocab.len(), model.hyper.dim)?;
    for (id, word) in model.vocab.words().iter().enumerate() {
        write!(out, "{word}")?;
        for x in model.u_bank[id].mean.iter() {
            write!(out, " {x:.5e}")?;
        }
        for x in model.u_bank[id].var_diag.iter() {
            write!(out, " {x:.5e}")?;
        }
        writeln!(out)?;
    }
    Ok(())
}

pub fn save(model: &Model, format: ExportFormat, path: &Path) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    match format {
        ExportFormat::Text => write_text(model, &mut out)?,
        ExportFormat::MeansVars => write_means_vars(model, &mut out)?,
    }
    out.flush()?;
    Ok(())
}

/// Re-imported text export: tokens with their mean vectors, in file order.
#[derive(Debug, Clone, PartialEq)]
pub struct TextEmbeddings {
    words: Vec<String>,
    index: HashMap<String, usize>,
    vectors: Vec<DVector<f64>>,
}

impl TextEmbeddings {
    pub fn read(path: &Path) -> Result<Self> {
        let file = File::open(path)?;
        Self::read_from(BufReader::new(file), &path.display().to_string())
    }

    pub fn read_from(reader: impl BufRead, origin: &str) -> Result<Self> {
        let fail = |line: usize, message: String| Error::DatasetFormat {
            path: origin.to_string(),
            line,
            message,
        };
        let mut lines = reader.lines().enumerate();
        let (_, header) = lines
            .next()
            .ok_or_else(|| fail(1, "empty file, expected \"l m\" header".to_string()))?;
        let header = header?;
        let dims: Vec<&str> = header.split_whitespace().collect();
        if dims.len() != 2 {
            return Err(fail(1, format!("expected \"l m\" header, got {header:?}")));
        }
        let l: usize = dims[0]
            .parse()
            .map_err(|_| fail(1, format!("bad vocabulary size {:?}", dims[0])))?;
        let m: usize = dims[1]
            .parse()
            .map_err(|_| fail(1, format!("bad dimension {:?}", dims[1])))?;

        let mut words = Vec::with_capacity(l);
        let mut index = HashMap::with_capacity(l);
        let mut vectors = Vec::with_capacity(l);
        for (i, line) in lines {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let mut fields = line.split_whitespace();
            let word = fields.next().unwrap().to_string();
            let coords: Vec<f64> = fields
                .map(|f| {
                    f.parse()
                        .map_err(|_| fail(i + 1, format!("bad coordinate {f:?}")))
                })
                .collect::<Result<_>>()?;
            if coords.len() != m {
                return Err(fail(
                    i + 1,
                    format!("expected {m} coordinates, got {}", coords.len()),
                ));
            }
            if index.insert(word.clone(), words.len()).is_some() {
                return Err(fail(i + 1, format!("duplicate token {word:?}")));
            }
            words.push(word);
            vectors.push(DVector::from_vec(coords));
        }
        if words.len() != l {
            return Err(fail(
                0,
                format!("header promised {l} words, file holds {}", words.len()),
            ));
        }
        Ok(TextEmbeddings {
            words,
            index,
            vectors,
        })
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn vector(&self, word: &str) -> Option<&DVector<f64>> {
        self.index.get(word).map(|&i| &self.vectors[i])
    }
}
