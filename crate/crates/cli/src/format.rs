//! Number formatting, CSV and Markdown emission.

use fkk_core::study::{Axis, ConvergenceTable};

/// Scientific notation with 4 significant digits and a signed two-digit
/// exponent, e.g. `2.726E-04`.
pub fn sci(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    let s = format!("{x:.3E}");
    let (mantissa, exp) = s.split_once('E').expect("E format");
    let exp: i32 = exp.parse().expect("integer exponent");
    let sign = if exp < 0 { '-' } else { '+' };
    format!("{mantissa}E{sign}{:02}", exp.abs())
}

/// Rates are printed to 4 decimals.
pub fn fixed4(x: f64) -> String {
    format!("{x:.4}")
}

/// Plain rectangular table of already formatted cells.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header).expect("in-memory write");
        for r in &self.rows {
            w.write_record(r).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("flush to memory")).expect("utf8 cells")
    }

    pub fn to_markdown(&self) -> String {
        let cols = self.header.len();
        let mut width = vec![3; cols];
        for r in std::iter::once(&self.header).chain(&self.rows) {
            for (c, cell) in r.iter().enumerate() {
                width[c] = width[c].max(cell.chars().count());
            }
        }
        let line = |cells: &[String]| {
            let padded: Vec<String> = (0..cols)
                .map(|c| format!("{:<w$}", cells.get(c).map(String::as_str).unwrap_or(""), w = width[c]))
                .collect();
            format!("| {} |\n", padded.join(" | "))
        };
        let mut out = line(&self.header);
        let rule: Vec<String> = width.iter().map(|&w| "-".repeat(w)).collect();
        out.push_str(&format!("|-{}-|\n", rule.join("-|-")));
        for r in &self.rows {
            out.push_str(&line(r));
        }
        out
    }
}

fn resolution_label(axis: Axis, r: f64) -> String {
    match axis {
        // columns are 1/tau, like the published tables
        Axis::Tau => format!("{}", (1.0 / r).round()),
        Axis::Cells => format!("{r}"),
    }
}

/// One CSV row per (alpha, resolution): `alpha,resolution,error,rate`; the
/// rate is empty on the first row of each alpha.
pub fn convergence_csv(tables: &[ConvergenceTable]) -> String {
    let mut t = Table::new(&["alpha", "resolution", "error", "rate"]);
    for table in tables {
        for row in &table.rows {
            t.push(vec![
                table.alpha.to_string(),
                row.resolution.to_string(),
                sci(row.error),
                row.rate.map(fixed4).unwrap_or_default(),
            ]);
        }
    }
    t.to_csv()
}

/// Markdown in the published layout: one error row per alpha followed by a
/// `Rate` row.
pub fn convergence_markdown(tables: &[ConvergenceTable]) -> String {
    let Some(first) = tables.first() else { return String::new() };
    let corner = match first.axis {
        Axis::Tau => "alpha \\ 1/tau",
        Axis::Cells => "alpha \\ 1/h",
    };
    let mut header = vec![corner.to_string()];
    header.extend(first.rows.iter().map(|r| resolution_label(first.axis, r.resolution)));
    let mut t = Table { header, rows: Vec::new() };
    for table in tables {
        let mut errors = vec![table.alpha.to_string()];
        errors.extend(table.rows.iter().map(|r| sci(r.error)));
        t.push(errors);
        let mut rates = vec![String::new(), "Rate".to_string()];
        rates.extend(table.rates().into_iter().map(fixed4));
        t.push(rates);
    }
    t.to_markdown()
}
