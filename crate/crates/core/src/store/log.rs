//! Append-only commit log.
//!
//! Layout: the magic bytes, then records of `[len u32 LE][crc32 u32 LE][payload]`
//! where the payload is a bincode-encoded [`CommitRecord`]. A torn record at the
//! tail is dropped on open; damage anywhere else is reported as corruption.

use std::fs::{File, OpenOptions};
use std::io::{Read, Seek, SeekFrom, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::store::CommitRecord;

pub const MAGIC: &[u8; 8] = b"TGDBLOG1";

#[derive(Debug)]
pub struct CommitLog {
    file: File,
    sync: bool,
}

impl CommitLog {
    /// Opens or creates the log and returns the intact records in order.
    pub fn open(path: &Path, sync: bool) -> Result<(CommitLog, Vec<CommitRecord>)> {
        let mut file = OpenOptions::new().read(true).write(true).create(true).truncate(false).open(path)?;
        let mut buf = Vec::new();
        file.read_to_end(&mut buf)?;
        if buf.len() < MAGIC.len() {
            if !MAGIC.starts_with(&buf) {
                return Err(Error::Corrupt(format!("{} is not a database log", path.display())));
            }
            file.set_len(0)?;
            file.seek(SeekFrom::Start(0))?;
            file.write_all(MAGIC)?;
            file.flush()?;
            return Ok((CommitLog { file, sync }, Vec::new()));
        }
        if &buf[..MAGIC.len()] != MAGIC {
            return Err(Error::Corrupt(format!("{} is not a database log", path.display())));
        }
        let (records, good) = decode(&buf)?;
        if good < buf.len() {
            log::warn!("discarding {} bytes of incomplete commit at end of {}", buf.len() - good, path.display());
            file.set_len(good as u64)?;
        }
        file.seek(SeekFrom::End(0))?;
        Ok((CommitLog { file, sync }, records))
    }

    pub fn append(&mut self, rec: &CommitRecord) -> Result<()> {
        let payload = bincode::serialize(rec).map_err(|e| Error::Corrupt(e.to_string()))?;
        let mut frame = Vec::with_capacity(payload.len() + 8);
        frame.extend_from_slice(&(payload.len() as u32).to_le_bytes());
        frame.extend_from_slice(&crc32fast::hash(&payload).to_le_bytes());
        frame.extend_from_slice(&payload);
        self.file.write_all(&frame)?;
        self.file.flush()?;
        if self.sync {
            self.file.sync_data()?;
        }
        Ok(())
    }
}

/// Decodes records after the magic; returns them with the length of the intact prefix.
fn decode(buf: &[u8]) -> Result<(Vec<CommitRecord>, usize)> {
    let mut pos = MAGIC.len();
    let mut out: Vec<CommitRecord> = Vec::new();
    while pos < buf.len() {
        if buf.len() - pos < 8 {
            break;
        }
        let len = u32::from_le_bytes(buf[pos..pos + 4].try_into().unwrap()) as usize;
        let crc = u32::from_le_bytes(buf[pos + 4..pos + 8].try_into().unwrap());
        let body = pos + 8;
        if buf.len() - body < len {
            break;
        }
        let payload = &buf[body..body + len];
        let last = body + len == buf.len();
        if crc32fast::hash(payload) != crc {
            if last {
                break;
            }
            return Err(Error::Corrupt(format!("checksum mismatch at offset {}", pos)));
        }
        let rec: CommitRecord =
            bincode::deserialize(payload).map_err(|e| Error::Corrupt(format!("offset {}: {}", pos, e)))?;
        let expected = out.last().map_or(rec.seq, |p| p.seq + 1);
        if rec.seq != expected {
            return Err(Error::Corrupt(format!("commit {} follows {}", rec.seq, expected - 1)));
        }
        out.push(rec);
        pos = body + len;
    }
    Ok((out, pos))
}
