use std::io::Write;

/// Significant digits written for every numeric cell.
pub const SIGNIFICANT_DIGITS: usize = 10;

/// Plain decimal with [`SIGNIFICANT_DIGITS`] significant digits, no exponent
/// and no locale-dependent separators.
pub fn fmt_num(v: f64) -> String {
    if !v.is_finite() {
        return format!("{v}");
    }
    if v == 0.0 {
        return format!("{:.*}", SIGNIFICANT_DIGITS - 1, 0.0);
    }
    let magnitude = v.abs().log10().floor() as i64;
    let decimals = (SIGNIFICANT_DIGITS as i64 - 1 - magnitude).max(0) as usize;
    let s = format!("{v:.decimals$}");
    // rounding may carry into a new leading digit (9.99… → 10.0…), which only adds digits
    s
}

/// A header plus rows of already formatted cells.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl CsvTable {
    pub fn new<I, S>(header: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Self {
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push<I, S>(&mut self, row: I)
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.rows.push(row.into_iter().map(Into::into).collect());
    }

    pub fn write_to<W: Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(out);
        w.write_record(&self.header)?;
        for row in &self.rows {
            w.write_record(row)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_string_lossy(&self) -> String {
        let mut buf = Vec::new();
        self.write_to(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("cells are UTF-8")
    }

    /// Column index by header name.
    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sig_digits(s: &str) -> usize {
        s.trim_start_matches('-')
            .chars()
            .filter(char::is_ascii_digit)
            .skip_while(|c| *c == '0')
            .count()
    }

    #[test]
    fn formatting() {
        assert_eq!(fmt_num(0.5), "0.5000000000");
        assert_eq!(fmt_num(1.3634), "1.363400000");
        assert_eq!(fmt_num(0.0), "0.000000000");
        assert_eq!(fmt_num(-2.0), "-2.000000000");
        assert_eq!(fmt_num(123456789012.0), "123456789012");
        for v in [1e-12, 3.3e-5, 0.1234, 7.0, 99.99999999999, 1e6 + 0.5] {
            let s = fmt_num(v);
            assert!(!s.contains('e') && !s.contains(','), "{s}");
            assert!(sig_digits(&s) >= 9, "{v} -> {s}");
            assert!((s.parse::<f64>().unwrap() - v).abs() <= 1e-9 * v.abs());
        }
    }

    #[test]
    fn csv_round_trip() {
        let mut t = CsvTable::new(["a", "b"]);
        t.push(["1", ""]);
        assert_eq!(t.to_string_lossy(), "a,b\n1,\n");
        assert_eq!(t.column("b"), Some(1));
    }
}
