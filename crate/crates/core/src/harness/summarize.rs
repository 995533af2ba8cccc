use std::io::{Read, Write};

use super::record::format_float;
use super::run::mean_std;
use crate::{Error, Result};

/// Statistics of one metric for one group of rows.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub key: Vec<String>,
    /// Rows in the group, including ones with an empty metric cell.
    pub rows: usize,
    /// Numeric metric values that entered the statistics.
    pub count: usize,
    pub mean: f64,
    pub std: f64,
    pub min: f64,
    pub max: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryTable {
    pub group_by: Vec<String>,
    pub metric: String,
    pub rows: Vec<SummaryRow>,
}

/// Groups result rows by `group_by` (first-appearance order) and reports
/// mean, sample std, min and max of `metric`. Empty metric cells, as in
/// refused rows, are counted but excluded from the statistics.
pub fn summarize<R: Read>(input: R, group_by: &[String], metric: &str) -> Result<SummaryTable> {
    let mut reader = csv::Reader::from_reader(input);
    let headers = reader.headers()?.clone();
    let column = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::UnknownColumn(name.to_string()))
    };
    let key_cols = group_by
        .iter()
        .map(|g| column(g))
        .collect::<Result<Vec<_>>>()?;
    let metric_col = column(metric)?;

    let mut groups: Vec<(Vec<String>, usize, Vec<f64>)> = Vec::new();
    for record in reader.records() {
        let record = record?;
        let key: Vec<String> = key_cols.iter().map(|&c| record[c].to_string()).collect();
        let cell = record[metric_col].trim();
        let value = if cell.is_empty() {
            None
        } else {
            Some(cell.parse::<f64>().map_err(|e| {
                Error::Config(format!(
                    "column {metric} value {cell:?} is not numeric: {e}"
                ))
            })?)
        };
        let slot = match groups.iter().position(|(k, _, _)| *k == key) {
            Some(i) => i,
            None => {
                groups.push((key, 0, Vec::new()));
                groups.len() - 1
            }
        };
        groups[slot].1 += 1;
        groups[slot].2.extend(value);
    }

    let rows = groups
        .into_iter()
        .map(|(key, rows, values)| {
            let (mean, std) = mean_std(&values);
            let min = values.iter().copied().fold(f64::NAN, f64::min);
            let max = values.iter().copied().fold(f64::NAN, f64::max);
            SummaryRow {
                key,
                rows,
                count: values.len(),
                mean,
                std,
                min,
                max,
            }
        })
        .collect();
    Ok(SummaryTable {
        group_by: group_by.to_vec(),
        metric: metric.to_string(),
        rows,
    })
}

impl SummaryTable {
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = self.group_by.clone();
        header.extend(["rows", "count", "mean", "std", "min", "max"].map(String::from));
        w.write_record(&header)?;
        let num = |x: f64| {
            if x.is_nan() {
                String::new()
            } else {
                format_float(x)
            }
        };
        for r in &self.rows {
            let mut fields = r.key.clone();
            fields.extend([
                r.rows.to_string(),
                r.count.to_string(),
                num(r.mean),
                num(r.std),
                num(r.min),
                num(r.max),
            ]);
            w.write_record(&fields)?;
        }
        w.flush()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const CSV: &str = "arch,method,obj_true\nsris,g,2.0\nsris,g,4.0\niris,g,5.0\niris,e,\n";

    fn keys(cols: &[&str]) -> Vec<String> {
        cols.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn examples() {
        let t = summarize(CSV.as_bytes(), &keys(&["arch"]), "obj_true").unwrap();
        assert_eq!(t.rows.len(), 2);
        assert_eq!(t.rows[0].key, vec!["sris"]);
        assert_eq!(t.rows[0].mean, 3.0);
        assert_eq!(t.rows[0].min, 2.0);
        assert_eq!(t.rows[0].max, 4.0);
        assert_eq!(t.rows[1].rows, 2);
        assert_eq!(t.rows[1].count, 1);
        assert_eq!(t.rows[1].mean, 5.0);
        assert_eq!(t.rows[1].std, 0.0);
    }

    #[test]
    fn no_rows_gives_empty_table() {
        let t = summarize("arch,obj_true\n".as_bytes(), &keys(&["arch"]), "obj_true").unwrap();
        assert!(t.rows.is_empty());
        let mut out = Vec::new();
        t.write_csv(&mut out).unwrap();
        assert_eq!(
            String::from_utf8(out).unwrap(),
            "arch,rows,count,mean,std,min,max\n"
        );
    }

    #[test]
    fn no_group_columns_summarize_everything() {
        let t = summarize(CSV.as_bytes(), &[], "obj_true").unwrap();
        assert_eq!(t.rows.len(), 1);
        assert_eq!(t.rows[0].rows, 4);
        assert_eq!(t.rows[0].count, 3);
    }

    #[test]
    fn unknown_column() {
        assert!(matches!(
            summarize(CSV.as_bytes(), &keys(&["nope"]), "obj_true"),
            Err(Error::UnknownColumn(c)) if c == "nope"
        ));
        assert!(matches!(
            summarize(CSV.as_bytes(), &[], "nope"),
            Err(Error::UnknownColumn(_))
        ));
    }
}
