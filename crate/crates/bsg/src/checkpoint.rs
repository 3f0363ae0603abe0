//! Binary model checkpoints.
//!
//! Layout (all integers and floats little-endian):
//! magic "BSGC", format version byte, header (m, l, iterations run,
//! converged flag, seed, the ten hyperparameters), the u bank then the
//! v bank, then the vocabulary. Each factor stores mean, var_diag, the
//! precision upper triangle (row-major, diagonal included), nat_mean, and
//! the previous-iteration precision triangle and nat_mean, so training can
//! resume bit-exactly. The vocabulary is a case-folding flag followed by
//! length-prefixed UTF-8 tokens with their counts.

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Read, Write};
use std::path::Path;

use byteorder::{LittleEndian as LE, ReadBytesExt, WriteBytesExt};
use nalgebra::{DMatrix, DVector};

use crate::corpus::Vocabulary;
use crate::error::{Error, Result};
use crate::trainer::Model;
use crate::vb::{GaussianFactor, HyperParams};

pub const MAGIC: [u8; 4] = *b"BSGC";
pub const VERSION: u8 = 1;

/// Sanity caps while reading: fields beyond these mark the file corrupt
/// before any large allocation happens.
const MAX_DIM: u32 = 10_000;
const MAX_VOCAB: u32 = 50_000_000;
const MAX_TOKEN_BYTES: u32 = 1 << 20;

/// Everything in the fixed-size part of a checkpoint.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckpointInfo {
    pub dim: usize,
    pub vocab_len: usize,
    pub iterations_run: usize,
    pub converged: bool,
    pub seed: u64,
    pub hyper: HyperParams,
}

pub fn save(model: &Model, path: &Path) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    write(model, &mut out)?;
    out.flush()?;
    Ok(())
}

/// Load a full model; every failure, including unreadable files, surfaces
/// as a checkpoint error with diagnostics.
pub fn load(path: &Path) -> Result<Model> {
    let file = File::open(path)
        .map_err(|e| Error::Checkpoint(format!("cannot open {}: {e}", path.display())))?;
    read(&mut BufReader::new(file)).map_err(|e| match e {
        Error::Checkpoint(msg) => Error::Checkpoint(msg),
        other => Error::Checkpoint(other.to_string()),
    })
}

/// Read only the header of a checkpoint file.
pub fn info(path: &Path) -> Result<CheckpointInfo> {
    let file = File::open(path)
        .map_err(|e| Error::Checkpoint(format!("cannot open {}: {e}", path.display())))?;
    read_info(&mut BufReader::new(file)).map_err(|e| match e {
        Error::Checkpoint(msg) => Error::Checkpoint(msg),
        other => Error::Checkpoint(other.to_string()),
    })
}

pub fn write(model: &Model, out: &mut impl Write) -> Result<()> {
    out.write_all(&MAGIC)?;
    out.write_u8(VERSION)?;
    out.write_u32::<LE>(model.hyper.dim as u32)?;
    out.write_u32::<LE>(model.vocab.len() as u32)?;
    out.write_u64::<LE>(model.iterations_run as u64)?;
    out.write_u8(u8::from(model.converged))?;
    out.write_u64::<LE>(model.rng_seed)?;
    write_hyper(&model.hyper, out)?;
    for factor in model.u_bank.iter().chain(&model.v_bank) {
        write_factor(factor, out)?;
    }
    out.write_u8(u8::from(model.vocab.lowercased))?;
    for (word, &count) in model.vocab.words().iter().zip(model.vocab.counts()) {
        out.write_u32::<LE>(word.len() as u32)?;
        out.write_all(word.as_bytes())?;
        out.write_u64::<LE>(count)?;
    }
    Ok(())
}

pub fn read(input: &mut impl Read) -> Result<Model> {
    let info = read_info(input)?;
    let (m, l) = (info.dim, info.vocab_len);
    let mut u_bank = Vec::with_capacity(l);
    for _ in 0..l {
        u_bank.push(read_factor(input, m)?);
    }
    let mut v_bank = Vec::with_capacity(l);
    for _ in 0..l {
        v_bank.push(read_factor(input, m)?);
    }

    let lowercased = match input.read_u8().map_err(io_as_corrupt)? {
        0 => false,
        1 => true,
        other => {
            return Err(Error::Checkpoint(format!(
                "invalid case-folding flag {other}"
            )))
        }
    };
    let mut words = Vec::with_capacity(l);
    let mut counts = Vec::with_capacity(l);
    for _ in 0..l {
        let len = input.read_u32::<LE>().map_err(io_as_corrupt)?;
        if len > MAX_TOKEN_BYTES {
            return Err(Error::Checkpoint(format!("token length {len} out of range")));
        }
        let mut bytes = vec![0u8; len as usize];
        input.read_exact(&mut bytes).map_err(io_as_corrupt)?;
        let word = String::from_utf8(bytes)
            .map_err(|e| Error::Checkpoint(format!("token is not UTF-8: {e}")))?;
        let count = input.read_u64::<LE>().map_err(io_as_corrupt)?;
        words.push(word);
        counts.push(count);
    }
    let vocab = Vocabulary::from_parts(words, counts, lowercased)?;

    Ok(Model {
        vocab,
        u_bank,
        v_bank,
        hyper: info.hyper,
        iterations_run: info.iterations_run,
        converged: info.converged,
        rng_seed: info.seed,
    })
}

pub fn read_info(input: &mut impl Read) -> Result<CheckpointInfo> {
    let mut magic = [0u8; 4];
    input.read_exact(&mut magic).map_err(io_as_corrupt)?;
    if magic != MAGIC {
        return Err(Error::Checkpoint(format!(
            "bad magic {magic:02x?}, expected {MAGIC:02x?} (\"BSGC\")"
        )));
    }
    let version = input.read_u8().map_err(io_as_corrupt)?;
    if version != VERSION {
        return Err(Error::Checkpoint(format!(
            "unsupported format version {version}, expected {VERSION}"
        )));
    }
    let dim = input.read_u32::<LE>().map_err(io_as_corrupt)?;
    let vocab_len = input.read_u32::<LE>().map_err(io_as_corrupt)?;
    if dim == 0 || dim > MAX_DIM {
        return Err(Error::Checkpoint(format!("dimension {dim} out of range")));
    }
    if vocab_len == 0 || vocab_len > MAX_VOCAB {
        return Err(Error::Checkpoint(format!(
            "vocabulary size {vocab_len} out of range"
        )));
    }
    let iterations_run = input.read_u64::<LE>().map_err(io_as_corrupt)? as usize;
    let converged = match input.read_u8().map_err(io_as_corrupt)? {
        0 => false,
        1 => true,
        other => {
            return Err(Error::Checkpoint(format!(
                "invalid convergence flag {other}"
            )))
        }
    };
    let seed = input.read_u64::<LE>().map_err(io_as_corrupt)?;
    let hyper = read_hyper(input)?;
    Ok(CheckpointInfo {
        dim: dim as usize,
        vocab_len: vocab_len as usize,
        iterations_run,
        converged,
        seed,
        hyper,
    })
}

fn write_hyper(hyper: &HyperParams, out: &mut impl Write) -> Result<()> {
    out.write_u32::<LE>(hyper.dim as u32)?;
    out.write_f64::<LE>(hyper.tau)?;
    out.write_u32::<LE>(hyper.max_iterations as u32)?;
    out.write_u32::<LE>(hyper.max_window as u32)?;
    out.write_u32::<LE>(hyper.vocab_size as u32)?;
    out.write_f64::<LE>(hyper.subsample_threshold)?;
    out.write_u32::<LE>(hyper.negatives as u32)?;
    out.write_u32::<LE>(hyper.warmup_iterations as u32)?;
    out.write_f64::<LE>(hyper.stop_threshold)?;
    out.write_f64::<LE>(hyper.decay)?;
    Ok(())
}

fn read_hyper(input: &mut impl Read) -> Result<HyperParams> {
    Ok(HyperParams {
        dim: input.read_u32::<LE>().map_err(io_as_corrupt)? as usize,
        tau: input.read_f64::<LE>().map_err(io_as_corrupt)?,
        max_iterations: input.read_u32::<LE>().map_err(io_as_corrupt)? as usize,
        max_window: input.read_u32::<LE>().map_err(io_as_corrupt)? as usize,
        vocab_size: input.read_u32::<LE>().map_err(io_as_corrupt)? as usize,
        subsample_threshold: input.read_f64::<LE>().map_err(io_as_corrupt)?,
        negatives: input.read_u32::<LE>().map_err(io_as_corrupt)? as usize,
        warmup_iterations: input.read_u32::<LE>().map_err(io_as_corrupt)? as usize,
        stop_threshold: input.read_f64::<LE>().map_err(io_as_corrupt)?,
        decay: input.read_f64::<LE>().map_err(io_as_corrupt)?,
    })
}

fn write_factor(factor: &GaussianFactor, out: &mut impl Write) -> Result<()> {
    write_vector(&factor.mean, out)?;
    write_vector(&factor.var_diag, out)?;
    write_upper_triangle(&factor.precision, out)?;
    write_vector(&factor.nat_mean, out)?;
    write_upper_triangle(&factor.prev_precision, out)?;
    write_vector(&factor.prev_nat_mean, out)?;
    Ok(())
}

fn read_factor(input: &mut impl Read, m: usize) -> Result<GaussianFactor> {
    Ok(GaussianFactor {
        mean: read_vector(input, m)?,
        var_diag: read_vector(input, m)?,
        precision: read_upper_triangle(input, m)?,
        nat_mean: read_vector(input, m)?,
        prev_precision: read_upper_triangle(input, m)?,
        prev_nat_mean: read_vector(input, m)?,
    })
}

fn write_vector(v: &DVector<f64>, out: &mut impl Write) -> Result<()> {
    for &x in v.iter() {
        out.write_f64::<LE>(x)?;
    }
    Ok(())
}

fn read_vector(input: &mut impl Read, m: usize) -> Result<DVector<f64>> {
    let mut buf = vec![0f64; m];
    input.read_f64_into::<LE>(&mut buf).map_err(io_as_corrupt)?;
    Ok(DVector::from_vec(buf))
}

fn write_upper_triangle(matrix: &DMatrix<f64>, out: &mut impl Write) -> Result<()> {
    let m = matrix.nrows();
    for i in 0..m {
        for j in i..m {
            out.write_f64::<LE>(matrix[(i, j)])?;
        }
    }
    Ok(())
}

fn read_upper_triangle(input: &mut impl Read, m: usize) -> Result<DMatrix<f64>> {
    let mut matrix = DMatrix::zeros(m, m);
    for i in 0..m {
        for j in i..m {
            let x = input.read_f64::<LE>().map_err(io_as_corrupt)?;
            matrix[(i, j)] = x;
            matrix[(j, i)] = x;
        }
    }
    Ok(matrix)
}

fn io_as_corrupt(e: io::Error) -> Error {
    if e.kind() == io::ErrorKind::UnexpectedEof {
        Error::Checkpoint("truncated file".into())
    } else {
        Error::Io(e)
    }
}
