//! One-record-per-line JSON output with `": "` and `", "` separators.

use std::io::{self, Write};

use serde::Serialize;
use serde_json::ser::{Formatter, Serializer};

#[derive(Debug, Clone, Copy, Default)]
struct Spaced;

impl Formatter for Spaced {
    fn begin_array_value<W: ?Sized + Write>(&mut self, writer: &mut W, first: bool) -> io::Result<()> {
        if first {
            Ok(())
        } else {
            writer.write_all(b", ")
        }
    }

    fn begin_object_key<W: ?Sized + Write>(&mut self, writer: &mut W, first: bool) -> io::Result<()> {
        if first {
            Ok(())
        } else {
            writer.write_all(b", ")
        }
    }

    fn begin_object_value<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        writer.write_all(b": ")
    }
}

/// Writes `value` as a single line.
pub fn write_record<W: Write + ?Sized, T: Serialize + ?Sized>(out: &mut W, value: &T) -> io::Result<()> {
    let mut buf = Vec::with_capacity(128);
    value
        .serialize(&mut Serializer::with_formatter(&mut buf, Spaced))
        .map_err(io::Error::other)?;
    buf.push(b'\n');
    out.write_all(&buf)
}

/// A record body prefixed with a `"record"` discriminator.
#[derive(Serialize)]
pub struct Tagged<'a, T: Serialize> {
    pub record: &'static str,
    #[serde(flatten)]
    pub body: &'a T,
}
