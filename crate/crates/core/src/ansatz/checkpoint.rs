//! Checkpoint serialization for ansatz parameters.
//!
//! The binary layout is versioned by an 8-byte magic: kind tag, structural
//! sizes (including the full permutation table for symmetric RBMs), then the
//! flat parameter vector as interleaved little-endian f64 pairs. A paired
//! human-readable text form round-trips the same information.

use std::io::{Read, Write};

use nalgebra::DVector;

use crate::ansatz::{
    AnsatzState, AnyAnsatz, Jastrow, MeanField, Rbm, SymmetricRbm, SymmetryGroup,
};
use crate::error::{Error, Result};
use crate::scalar::{real, to_f64, Cplx, Real};

const MAGIC: &[u8; 8] = b"NQSCKPT1";

const KIND_RBM: u8 = 0;
const KIND_SYMMETRIC: u8 = 1;
const KIND_JASTROW: u8 = 2;
const KIND_MEAN_FIELD: u8 = 3;

fn write_u32<W: Write>(w: &mut W, v: u32) -> Result<()> {
    w.write_all(&v.to_le_bytes())?;
    Ok(())
}

fn read_u32<R: Read>(r: &mut R) -> Result<u32> {
    let mut buf = [0u8; 4];
    r.read_exact(&mut buf)?;
    Ok(u32::from_le_bytes(buf))
}

fn read_u64<R: Read>(r: &mut R) -> Result<u64> {
    let mut buf = [0u8; 8];
    r.read_exact(&mut buf)?;
    Ok(u64::from_le_bytes(buf))
}

fn read_f64<R: Read>(r: &mut R) -> Result<f64> {
    let mut buf = [0u8; 8];
    r.read_exact(&mut buf)?;
    Ok(f64::from_le_bytes(buf))
}

/// Write a checkpoint in the binary layout.
pub fn save_checkpoint<T: Real, W: Write>(writer: &mut W, ansatz: &AnyAnsatz<T>) -> Result<()> {
    writer.write_all(MAGIC)?;
    match ansatz {
        AnyAnsatz::Rbm(rbm) => {
            writer.write_all(&[KIND_RBM])?;
            write_u32(writer, rbm.n_sites() as u32)?;
            write_u32(writer, rbm.n_hidden() as u32)?;
        }
        AnyAnsatz::SymmetricRbm(sym) => {
            writer.write_all(&[KIND_SYMMETRIC])?;
            write_u32(writer, sym.n_sites() as u32)?;
            write_u32(writer, sym.features() as u32)?;
            write_u32(writer, sym.group().size() as u32)?;
            for perm in sym.group().permutations() {
                for &image in perm {
                    write_u32(writer, image as u32)?;
                }
            }
        }
        AnyAnsatz::Jastrow(j) => {
            writer.write_all(&[KIND_JASTROW])?;
            write_u32(writer, j.n_sites() as u32)?;
        }
        AnyAnsatz::MeanField(m) => {
            writer.write_all(&[KIND_MEAN_FIELD])?;
            write_u32(writer, m.n_sites() as u32)?;
        }
    }
    let parameters = ansatz.parameters();
    writer.write_all(&(parameters.len() as u64).to_le_bytes())?;
    for p in parameters.iter() {
        writer.write_all(&to_f64(p.re).to_le_bytes())?;
        writer.write_all(&to_f64(p.im).to_le_bytes())?;
    }
    Ok(())
}

/// Read a checkpoint written by [`save_checkpoint`].
pub fn load_checkpoint<T: Real, R: Read>(reader: &mut R) -> Result<AnyAnsatz<T>> {
    let mut magic = [0u8; 8];
    reader.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(Error::Parse(format!(
            "bad checkpoint magic {:?}, expected {:?}",
            String::from_utf8_lossy(&magic),
            String::from_utf8_lossy(MAGIC)
        )));
    }
    let mut kind = [0u8; 1];
    reader.read_exact(&mut kind)?;
    let mut ansatz: AnyAnsatz<T> = match kind[0] {
        KIND_RBM => {
            let n = read_u32(reader)? as usize;
            let hidden = read_u32(reader)? as usize;
            AnyAnsatz::Rbm(Rbm::zeros(n, hidden)?)
        }
        KIND_SYMMETRIC => {
            let n = read_u32(reader)? as usize;
            let features = read_u32(reader)? as usize;
            let k = read_u32(reader)? as usize;
            let mut perms = Vec::with_capacity(k);
            for _ in 0..k {
                let mut perm = Vec::with_capacity(n);
                for _ in 0..n {
                    perm.push(read_u32(reader)? as usize);
                }
                perms.push(perm);
            }
            let group = SymmetryGroup::from_permutations(n, perms)?;
            AnyAnsatz::SymmetricRbm(SymmetricRbm::zeros(n, features, group)?)
        }
        KIND_JASTROW => {
            let n = read_u32(reader)? as usize;
            AnyAnsatz::Jastrow(Jastrow::zeros(n)?)
        }
        KIND_MEAN_FIELD => {
            let n = read_u32(reader)? as usize;
            AnyAnsatz::MeanField(MeanField::zeros(n)?)
        }
        other => return Err(Error::Parse(format!("unknown checkpoint kind tag {other}"))),
    };
    let count = read_u64(reader)? as usize;
    if count != ansatz.parameter_count() {
        return Err(Error::Parse(format!(
            "checkpoint holds {count} parameters, structure needs {}",
            ansatz.parameter_count()
        )));
    }
    let mut parameters = DVector::from_element(count, Cplx::new(T::zero(), T::zero()));
    for i in 0..count {
        let re = read_f64(reader)?;
        let im = read_f64(reader)?;
        parameters[i] = Cplx::new(real(re), real(im));
    }
    ansatz.set_parameters(&parameters)?;
    Ok(ansatz)
}

/// Write the human-readable text form: header lines `key=value`, optional
/// `perm` lines for the symmetry group, then one `re im` line per parameter.
pub fn save_checkpoint_text<T: Real, W: Write>(
    writer: &mut W,
    ansatz: &AnyAnsatz<T>,
) -> Result<()> {
    writeln!(writer, "kind={}", ansatz.kind().name())?;
    writeln!(writer, "n_sites={}", ansatz.n_sites())?;
    match ansatz {
        AnyAnsatz::Rbm(rbm) => writeln!(writer, "hidden={}", rbm.n_hidden())?,
        AnyAnsatz::SymmetricRbm(sym) => {
            writeln!(writer, "features={}", sym.features())?;
            writeln!(writer, "group_size={}", sym.group().size())?;
            for perm in sym.group().permutations() {
                write!(writer, "perm")?;
                for &image in perm {
                    write!(writer, " {image}")?;
                }
                writeln!(writer)?;
            }
        }
        AnyAnsatz::Jastrow(_) | AnyAnsatz::MeanField(_) => {}
    }
    let parameters = ansatz.parameters();
    writeln!(writer, "parameters={}", parameters.len())?;
    for p in parameters.iter() {
        writeln!(writer, "{} {}", to_f64(p.re), to_f64(p.im))?;
    }
    Ok(())
}

/// Read the text form written by [`save_checkpoint_text`].
pub fn load_checkpoint_text<T: Real>(text: &str) -> Result<AnyAnsatz<T>> {
    let mut kind: Option<String> = None;
    let mut n_sites: Option<usize> = None;
    let mut hidden: Option<usize> = None;
    let mut features: Option<usize> = None;
    let mut group_size: Option<usize> = None;
    let mut perms: Vec<Vec<usize>> = Vec::new();
    let mut declared: Option<usize> = None;
    let mut values: Vec<Cplx<T>> = Vec::new();

    for (line_no, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(rest) = line.strip_prefix("perm") {
            if rest.starts_with(' ') || rest.is_empty() {
                let perm: std::result::Result<Vec<usize>, _> =
                    rest.split_whitespace().map(str::parse).collect();
                perms.push(perm.map_err(|e| {
                    Error::Parse(format!("line {}: bad permutation: {e}", line_no + 1))
                })?);
                continue;
            }
        }
        if let Some((key, value)) = line.split_once('=') {
            let key = key.trim();
            let value = value.trim();
            let parse_usize = |v: &str| -> Result<usize> {
                v.parse().map_err(|e| {
                    Error::Parse(format!("line {}: bad integer {v:?}: {e}", line_no + 1))
                })
            };
            match key {
                "kind" => kind = Some(value.to_string()),
                "n_sites" => n_sites = Some(parse_usize(value)?),
                "hidden" => hidden = Some(parse_usize(value)?),
                "features" => features = Some(parse_usize(value)?),
                "group_size" => group_size = Some(parse_usize(value)?),
                "parameters" => declared = Some(parse_usize(value)?),
                other => {
                    return Err(Error::Parse(format!(
                        "line {}: unknown checkpoint key {other:?}",
                        line_no + 1
                    )))
                }
            }
            continue;
        }
        // Parameter line: `re im`.
        let mut fields = line.split_whitespace();
        let re: f64 = fields
            .next()
            .ok_or_else(|| Error::Parse(format!("line {}: empty parameter line", line_no + 1)))?
            .parse()
            .map_err(|e| Error::Parse(format!("line {}: bad value: {e}", line_no + 1)))?;
        let im: f64 = fields
            .next()
            .ok_or_else(|| {
                Error::Parse(format!("line {}: parameter needs re and im", line_no + 1))
            })?
            .parse()
            .map_err(|e| Error::Parse(format!("line {}: bad value: {e}", line_no + 1)))?;
        if fields.next().is_some() {
            return Err(Error::Parse(format!(
                "line {}: trailing fields on parameter line",
                line_no + 1
            )));
        }
        values.push(Cplx::new(real(re), real(im)));
    }

    let kind = kind.ok_or_else(|| Error::Parse("checkpoint text is missing kind=".into()))?;
    let n = n_sites.ok_or_else(|| Error::Parse("checkpoint text is missing n_sites=".into()))?;
    let mut ansatz: AnyAnsatz<T> = match kind.as_str() {
        "rbm" => {
            let h = hidden.ok_or_else(|| Error::Parse("rbm checkpoint needs hidden=".into()))?;
            AnyAnsatz::Rbm(Rbm::zeros(n, h)?)
        }
        "symmetric-rbm" => {
            let f = features
                .ok_or_else(|| Error::Parse("symmetric-rbm checkpoint needs features=".into()))?;
            let k = group_size
                .ok_or_else(|| Error::Parse("symmetric-rbm checkpoint needs group_size=".into()))?;
            if perms.len() != k {
                return Err(Error::Parse(format!(
                    "checkpoint declares {k} group elements but lists {} perm lines",
                    perms.len()
                )));
            }
            let group = SymmetryGroup::from_permutations(n, perms)?;
            AnyAnsatz::SymmetricRbm(SymmetricRbm::zeros(n, f, group)?)
        }
        "jastrow" => AnyAnsatz::Jastrow(Jastrow::zeros(n)?),
        "mean-field" => AnyAnsatz::MeanField(MeanField::zeros(n)?),
        other => return Err(Error::Parse(format!("unknown ansatz kind {other:?}"))),
    };
    if let Some(d) = declared {
        if d != values.len() {
            return Err(Error::Parse(format!(
                "checkpoint declares {d} parameters but lists {}",
                values.len()
            )));
        }
    }
    if values.len() != ansatz.parameter_count() {
        return Err(Error::Parse(format!(
            "checkpoint holds {} parameters, structure needs {}",
            values.len(),
            ansatz.parameter_count()
        )));
    }
    let parameters = DVector::from_iterator(values.len(), values.into_iter());
    ansatz.set_parameters(&parameters)?;
    Ok(ansatz)
}
