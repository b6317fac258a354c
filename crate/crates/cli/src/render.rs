use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use infoclone::Complex64;
use num_rational::Ratio;

use crate::args::OutputArgs;

pub const SCHEMA_VERSION: u32 = 1;

/// Decimal with 12 significant digits, trailing zeros removed.
pub fn sig(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("integer exponent");
    let out = if (-5..12).contains(&exp) {
        trim_zeros(format!("{:.*}", (11 - exp).max(0) as usize, x))
    } else {
        format!("{}e{exp}", trim_zeros(mantissa.to_string()))
    };
    if out == "-0" {
        "0".into()
    } else {
        out
    }
}

fn trim_zeros(s: String) -> String {
    if !s.contains('.') {
        return s;
    }
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

pub fn complex(z: Complex64) -> String {
    format!("({}, {})", sig(z.re), sig(z.im))
}

pub fn ratio(r: Ratio<i64>) -> String {
    if *r.denom() == 1 {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn ratio_value(r: Ratio<i64>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// Resolves where a command's primary output goes.
pub struct Sink {
    target: Option<PathBuf>,
}

impl Sink {
    pub fn new(args: &OutputArgs, command: &str) -> Self {
        let target = args.output.clone().or_else(|| {
            args.output_dir
                .as_ref()
                .map(|dir| dir.join(format!("{command}.{}", args.format.extension())))
        });
        Sink { target }
    }

    /// Path for a secondary file written next to the primary output.
    pub fn sibling(&self, args: &OutputArgs, name: &str) -> Option<PathBuf> {
        args.output_dir
            .as_ref()
            .map(|dir| dir.join(name))
            .or_else(|| self.target.as_ref().and_then(|p| p.parent().map(|d| d.join(name))))
    }

    pub fn write(&self, body: &str) -> io::Result<()> {
        match &self.target {
            Some(path) => write_file(path, body),
            None => {
                let mut out = io::stdout().lock();
                out.write_all(body.as_bytes())?;
                out.flush()
            }
        }
    }
}

pub fn write_file(path: &Path, body: &str) -> io::Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    let mut out = BufWriter::new(File::create(path)?);
    out.write_all(body.as_bytes())?;
    out.flush()
}

pub fn json(value: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("JSON values always serialize");
    s.push('\n');
    s
}

pub fn pair(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(sig(0.5), "0.5");
        assert_eq!(sig(1.0), "1");
        assert_eq!(sig(1.0 / 3.0), "0.333333333333");
        assert_eq!(sig(4.0 / 7.0), "0.571428571429");
        assert_eq!(sig(-2.0 / 3.0), "-0.666666666667");
        assert_eq!(sig(123456.789), "123456.789");
        assert_eq!(sig(1e-20), "1e-20");
        assert_eq!(sig(6.02214076e23), "6.02214076e23");
        assert_eq!(sig(-1e-300 * 1e-300), "0");
        assert_eq!(sig(0.999_999_999_999_9), "1");
    }

    #[test]
    fn ratios() {
        assert_eq!(ratio(Ratio::new(16, 23)), "16/23");
        assert_eq!(ratio(Ratio::new(4, 2)), "2");
    }
}
