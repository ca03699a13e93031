//! JSON/CSV number formatting with 17 significant digits.
//!
//! Every float is written as `d.dddddddddddddddde±x`, which round-trips
//! through `f64` parsing bit-for-bit and keeps output byte-stable.

use std::io;

use serde::Serialize;
use serde_json::ser::{CompactFormatter, Formatter, Serializer};

/// Float rendered with 17 significant digits (`{:.16e}`).
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Default)]
struct SigDigits(CompactFormatter);

impl Formatter for SigDigits {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        writer.write_all(fmt_f64(value).as_bytes())
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, value as f64)
    }
}

/// Compact JSON where every float carries 17 significant digits.
pub fn to_json_string<T: Serialize + ?Sized>(value: &T) -> String {
    let mut out = Vec::new();
    let mut ser = Serializer::with_formatter(&mut out, SigDigits::default());
    value
        .serialize(&mut ser)
        .expect("serializing into a Vec cannot fail");
    String::from_utf8(out).expect("serde_json emits UTF-8")
}
