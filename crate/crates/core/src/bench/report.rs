use std::path::Path;

use crate::bench::BenchmarkRow;
use crate::error::{Error, Result};

pub const CSV_COLUMNS: [&str; 23] = [
    "n",
    "w",
    "h",
    "lsd",
    "ssd",
    "m",
    "trials",
    "mean_total_s",
    "std_total_s",
    "mean_t1_s",
    "mean_t2_s",
    "mean_t3_s",
    "mean_p1",
    "mean_p2",
    "mean_p3",
    "label_area",
    "map_area",
    "area_ratio",
    "mean_leader_length",
    "mean_leader_label_crossings",
    "mean_leader_leader_crossings",
    "mean_unlabeled",
    "cls_fraction",
];

/// Six significant digits, `%g` style: no trailing zeros, exponent form
/// outside `1e-4 <= |x| < 1e6`.
pub fn sig6(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let exp = x.abs().log10().floor() as i32;
    // rounding can carry into the next decade
    let rounded: f64 = format!("{x:.5e}").parse().unwrap_or(x);
    let exp = if rounded.abs() >= 10f64.powi(exp + 1) { exp + 1 } else { exp };
    if (-4..6).contains(&exp) {
        let decimals = (5 - exp).max(0) as usize;
        trim_zeros(format!("{rounded:.decimals$}"))
    } else {
        let s = format!("{x:.5e}");
        let (mant, e) = s.split_once('e').unwrap_or((&s, "0"));
        let e: i32 = e.parse().unwrap_or(0);
        format!("{}e{}{:02}", trim_zeros(mant.to_string()), if e < 0 { '-' } else { '+' }, e.abs())
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

fn record(r: &BenchmarkRow) -> Vec<String> {
    let f = sig6;
    vec![
        r.n.to_string(),
        f(r.w),
        f(r.h),
        f(r.lsd),
        f(r.ssd),
        f(r.m),
        r.trials.to_string(),
        f(r.mean_total),
        f(r.std_total),
        f(r.mean_t1),
        f(r.mean_t2),
        f(r.mean_t3),
        f(r.mean_p1),
        f(r.mean_p2),
        f(r.mean_p3),
        f(r.label_area),
        f(r.map_area),
        f(r.area_ratio),
        f(r.mean_leader_length),
        f(r.mean_leader_label_crossings),
        f(r.mean_leader_leader_crossings),
        f(r.mean_unlabeled),
        f(if r.n > 0 { r.m / r.n as f64 } else { 0.0 }),
    ]
}

/// Write one CSV line per row. An empty slice still produces the header.
pub fn emit_report(rows: &[BenchmarkRow], path: &Path) -> Result<()> {
    let csv_err = |source| Error::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    w.write_record(CSV_COLUMNS).map_err(csv_err)?;
    for r in rows {
        w.write_record(record(r)).map_err(csv_err)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn read_report(path: &Path) -> Result<Vec<BenchmarkRow>> {
    let csv_err = |source| Error::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut rd = csv::Reader::from_path(path).map_err(csv_err)?;
    let header = rd.headers().map_err(csv_err)?.clone();
    if header.iter().ne(CSV_COLUMNS) {
        return Err(Error::parse(1, "header", "unexpected column set"));
    }
    let mut rows = Vec::new();
    for (i, rec) in rd.records().enumerate() {
        let rec = rec.map_err(csv_err)?;
        let line = i + 2;
        let num = |c: usize| -> Result<f64> {
            rec[c]
                .parse::<f64>()
                .map_err(|e| Error::parse(line, CSV_COLUMNS[c], e.to_string()))
        };
        let int = |c: usize| -> Result<usize> {
            rec[c]
                .parse::<usize>()
                .map_err(|e| Error::parse(line, CSV_COLUMNS[c], e.to_string()))
        };
        rows.push(BenchmarkRow {
            n: int(0)?,
            w: num(1)?,
            h: num(2)?,
            lsd: num(3)?,
            ssd: num(4)?,
            m: num(5)?,
            trials: int(6)?,
            mean_total: num(7)?,
            std_total: num(8)?,
            mean_t1: num(9)?,
            mean_t2: num(10)?,
            mean_t3: num(11)?,
            mean_p1: num(12)?,
            mean_p2: num(13)?,
            mean_p3: num(14)?,
            label_area: num(15)?,
            map_area: num(16)?,
            area_ratio: num(17)?,
            mean_leader_length: num(18)?,
            mean_leader_label_crossings: num(19)?,
            mean_leader_leader_crossings: num(20)?,
            mean_unlabeled: num(21)?,
        });
    }
    Ok(rows)
}
