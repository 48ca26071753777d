//! Reader for NIST-style hash known-answer files (`Len = `, `Msg = `, `MD = `).

use thiserror::Error;

#[derive(Debug, Error)]
pub enum KatError {
    #[error("line {line}: {reason}")]
    Malformed { line: usize, reason: String },
    #[error("line {line}: invalid hex: {source}")]
    Hex {
        line: usize,
        #[source]
        source: hex::FromHexError,
    },
    #[error("line {line}: message has {got} bytes but Len = {len_bits} bits")]
    LengthMismatch { line: usize, len_bits: usize, got: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KatVector {
    /// Position among all vectors in the file, including skipped ones.
    pub index: usize,
    pub len_bits: usize,
    pub msg: Vec<u8>,
    pub md: Vec<u8>,
    /// 1-based line of the `Len` entry.
    pub line: usize,
}

#[derive(Debug, Clone, Default)]
pub struct KatFile {
    /// Byte-aligned vectors.
    pub vectors: Vec<KatVector>,
    /// Vectors whose length is not a multiple of 8.
    pub skipped: Vec<KatVector>,
}

#[derive(Default)]
struct Pending {
    len: Option<(usize, usize)>,
    msg: Option<Vec<u8>>,
}

fn decode_hex(value: &str, line: usize) -> Result<Vec<u8>, KatError> {
    let v = value.trim();
    if v.len() % 2 == 1 {
        let mut padded = String::with_capacity(v.len() + 1);
        padded.push('0');
        padded.push_str(v);
        return hex::decode(padded).map_err(|source| KatError::Hex { line, source });
    }
    hex::decode(v).map_err(|source| KatError::Hex { line, source })
}

pub fn parse_kat(text: &str) -> Result<KatFile, KatError> {
    let mut out = KatFile::default();
    let mut pending = Pending::default();
    let mut index = 0;

    for (n, raw) in text.lines().enumerate() {
        let line_no = n + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with('[') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(KatError::Malformed {
                line: line_no,
                reason: format!("expected `key = value`, got {line:?}"),
            });
        };
        let value = value.trim();
        match key.trim().to_ascii_lowercase().as_str() {
            "len" => {
                if pending.len.is_some() {
                    return Err(KatError::Malformed {
                        line: line_no,
                        reason: "Len without a preceding MD".into(),
                    });
                }
                let bits = value.parse::<usize>().map_err(|e| KatError::Malformed {
                    line: line_no,
                    reason: format!("bad Len {value:?}: {e}"),
                })?;
                pending.len = Some((bits, line_no));
            }
            "msg" => {
                if pending.len.is_none() {
                    return Err(KatError::Malformed { line: line_no, reason: "Msg before Len".into() });
                }
                pending.msg = Some(decode_hex(value, line_no)?);
            }
            "md" => {
                let (Some((len_bits, len_line)), Some(mut msg)) = (pending.len.take(), pending.msg.take())
                else {
                    return Err(KatError::Malformed {
                        line: line_no,
                        reason: "MD without Len and Msg".into(),
                    });
                };
                let md = decode_hex(value, line_no)?;
                // Len = 0 vectors carry a placeholder `Msg = 00`.
                let want = len_bits.div_ceil(8);
                if len_bits == 0 {
                    msg.clear();
                } else if msg.len() != want {
                    return Err(KatError::LengthMismatch { line: len_line, len_bits, got: msg.len() });
                }
                let v = KatVector { index, len_bits, msg, md, line: len_line };
                index += 1;
                if len_bits % 8 == 0 {
                    out.vectors.push(v);
                } else {
                    out.skipped.push(v);
                }
            }
            other => {
                return Err(KatError::Malformed { line: line_no, reason: format!("unknown key {other:?}") });
            }
        }
    }
    if pending.len.is_some() {
        return Err(KatError::Malformed {
            line: text.lines().count(),
            reason: "file ends inside a vector".into(),
        });
    }
    Ok(out)
}
