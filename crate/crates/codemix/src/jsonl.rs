//! `messages.jsonl`: one message object per line.

use std::fs;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use codemix_core::corpus::{Dataset, Message};
use serde::{Deserialize, Serialize};
use unicode_normalization::UnicodeNormalization;

use crate::error::{Error, Result};

#[derive(Deserialize)]
struct InRecord {
    id: String,
    #[serde(default)]
    community: Option<String>,
    #[serde(default)]
    flair: Option<String>,
    text: String,
    #[serde(default)]
    label: Option<u8>,
    #[serde(default)]
    topic_id: Option<i64>,
}

#[derive(Serialize)]
struct OutRecord<'a> {
    id: &'a str,
    community: &'a str,
    flair: Option<&'a str>,
    text: &'a str,
    label: Option<u8>,
    topic_id: Option<i64>,
}

/// Parses one line into a message; texts are NFC-normalized.
pub fn parse_message(line: &str) -> std::result::Result<Message, String> {
    let r: InRecord = serde_json::from_str(line).map_err(|e| e.to_string())?;
    if let Some(l) = r.label {
        if l > 1 {
            return Err(format!("label {l} is not 0 or 1"));
        }
    }
    Ok(Message {
        id: r.id,
        community: r.community.unwrap_or_default(),
        flair: r.flair,
        text: r.text.nfc().collect(),
        label: r.label,
        topic_id: r.topic_id,
    })
}

pub fn message_line(m: &Message) -> String {
    let rec = OutRecord {
        id: &m.id,
        community: &m.community,
        flair: m.flair.as_deref(),
        text: &m.text,
        label: m.label,
        topic_id: m.topic_id,
    };
    serde_json::to_string(&rec).expect("message records always serialize")
}

/// Reads messages in line order. Blank lines are skipped; line numbers in
/// errors are 1-based.
pub fn read_jsonl(reader: impl Read, path: &Path) -> Result<Dataset> {
    let mut messages = Vec::new();
    for (i, line) in BufReader::new(reader).lines().enumerate() {
        let line = line.map_err(Error::io(path))?;
        let line = line.strip_prefix('\u{feff}').unwrap_or(&line);
        if line.trim().is_empty() {
            continue;
        }
        let m = parse_message(line).map_err(|message| Error::Parse {
            path: path.to_path_buf(),
            line: i + 1,
            message,
        })?;
        messages.push(m);
    }
    let tag = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    Dataset::new(messages, tag).map_err(Error::core("corpus"))
}

pub fn load_jsonl(path: impl AsRef<Path>) -> Result<Dataset> {
    let path = path.as_ref();
    let file = fs::File::open(path).map_err(Error::io(path))?;
    read_jsonl(file, path)
}

pub fn write_jsonl(mut w: impl Write, d: &Dataset) -> std::io::Result<()> {
    for m in d.messages() {
        writeln!(w, "{}", message_line(m))?;
    }
    Ok(())
}

pub fn save_jsonl(path: impl AsRef<Path>, d: &Dataset) -> Result<()> {
    let path = path.as_ref();
    let mut buf = Vec::new();
    write_jsonl(&mut buf, d).map_err(Error::io(path))?;
    fs::write(path, buf).map_err(Error::io(path))
}
