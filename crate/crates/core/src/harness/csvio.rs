use std::io::{Read, Write};
use std::str::FromStr;

use super::HarnessError;
use crate::metrics::{AggregateResult, GroupKey, ScenarioKind};

pub const HEADER: [&str; 15] = [
    "figure", "scenario", "p_k", "n_s", "tau", "N_sen", "rho", "R_sen", "d_bin_m", "source",
    "metric", "mean", "ci95", "trials", "error",
];

/// Marker in the `error` column for a one-trial aggregate whose ci95 is not
/// an estimate.
pub const SINGLE_TRIAL: &str = "single_trial";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Source {
    Analytic,
    Sim,
}

impl Source {
    pub fn as_str(&self) -> &'static str {
        match self {
            Source::Analytic => "analytic",
            Source::Sim => "sim",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    Prr,
    Throughput,
}

impl Metric {
    pub fn as_str(&self) -> &'static str {
        match self {
            Metric::Prr => "prr",
            Metric::Throughput => "throughput",
        }
    }
}

/// One line of a results file.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvRow {
    pub figure: String,
    pub key: GroupKey,
    pub source: Source,
    pub metric: Metric,
    pub mean: Option<f64>,
    pub ci95: Option<f64>,
    pub trials: Option<u32>,
    pub error: Option<String>,
}

impl CsvRow {
    pub fn analytic(figure: &str, key: GroupKey, metric: Metric, value: f64) -> Self {
        Self {
            figure: figure.to_string(),
            key,
            source: Source::Analytic,
            metric,
            mean: Some(value),
            ci95: None,
            trials: None,
            error: None,
        }
    }

    pub fn failed(
        figure: &str,
        key: GroupKey,
        source: Source,
        metric: Metric,
        error: String,
    ) -> Self {
        Self {
            figure: figure.to_string(),
            key,
            source,
            metric,
            mean: None,
            ci95: None,
            trials: None,
            error: Some(error),
        }
    }

    /// The prr and throughput rows of a simulated aggregate.
    pub fn from_aggregate(figure: &str, agg: &AggregateResult) -> [Self; 2] {
        let row = |metric, est: crate::metrics::Estimate| Self {
            figure: figure.to_string(),
            key: agg.key,
            source: Source::Sim,
            metric,
            mean: Some(est.mean),
            ci95: Some(est.ci95),
            trials: Some(agg.n_trials),
            error: agg.single_trial.then(|| SINGLE_TRIAL.to_string()),
        };
        [
            row(Metric::Prr, agg.prr),
            row(Metric::Throughput, agg.throughput),
        ]
    }

    /// True for rows that carry a failure rather than a value.
    pub fn is_failure(&self) -> bool {
        self.mean.is_none()
    }

    fn fields(&self) -> [String; 15] {
        let k = &self.key;
        [
            self.figure.clone(),
            k.scenario.as_str().to_string(),
            fmt_num(k.p_k),
            k.n_s.to_string(),
            fmt_num(k.tau),
            fmt_opt(k.n_sen),
            fmt_opt(k.rho),
            fmt_opt(k.r_sen_km),
            fmt_opt(k.d_bin_m),
            self.source.as_str().to_string(),
            self.metric.as_str().to_string(),
            fmt_opt(self.mean),
            fmt_opt(self.ci95),
            self.trials.map(|t| t.to_string()).unwrap_or_default(),
            self.error.clone().unwrap_or_default(),
        ]
    }

    fn parse(record: &csv::StringRecord) -> Result<Self, String> {
        if record.len() != HEADER.len() {
            return Err(format!(
                "expected {} fields, got {}",
                HEADER.len(),
                record.len()
            ));
        }
        let f = |i: usize| record.get(i).unwrap_or("");
        let scenario = match f(1) {
            "fully_connected" => ScenarioKind::FullyConnected,
            "partially_connected" => ScenarioKind::PartiallyConnected,
            other => return Err(format!("unknown scenario {other:?}")),
        };
        let source = match f(9) {
            "analytic" => Source::Analytic,
            "sim" => Source::Sim,
            other => return Err(format!("unknown source {other:?}")),
        };
        let metric = match f(10) {
            "prr" => Metric::Prr,
            "throughput" => Metric::Throughput,
            other => return Err(format!("unknown metric {other:?}")),
        };
        Ok(Self {
            figure: f(0).to_string(),
            key: GroupKey {
                scenario,
                p_k: parse_num(f(2))?,
                n_s: parse_num(f(3))?,
                tau: parse_num(f(4))?,
                n_sen: parse_opt(f(5))?,
                rho: parse_opt(f(6))?,
                r_sen_km: parse_opt(f(7))?,
                d_bin_m: parse_opt(f(8))?,
            },
            source,
            metric,
            mean: parse_opt(f(11))?,
            ci95: parse_opt(f(12))?,
            trials: parse_opt(f(13))?,
            error: (!f(14).is_empty()).then(|| f(14).to_string()),
        })
    }
}

/// Six significant digits, plain decimal notation.
pub fn fmt_num(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    let rounded: f64 = format!("{x:.5e}").parse().unwrap_or(x);
    format!("{rounded}")
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_num).unwrap_or_default()
}

fn parse_num<T: FromStr>(s: &str) -> Result<T, String> {
    s.parse().map_err(|_| format!("bad number {s:?}"))
}

fn parse_opt<T: FromStr>(s: &str) -> Result<Option<T>, String> {
    if s.is_empty() {
        Ok(None)
    } else {
        parse_num(s).map(Some)
    }
}

pub fn write_rows<W: Write>(out: W, rows: &[CsvRow]) -> Result<(), HarnessError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(HEADER).map_err(io_err)?;
    for row in rows {
        w.write_record(row.fields()).map_err(io_err)?;
    }
    w.flush().map_err(|e| HarnessError::Io(e.to_string()))
}

pub fn read_rows<R: Read>(input: R) -> Result<Vec<CsvRow>, HarnessError> {
    let mut r = csv::Reader::from_reader(input);
    let header = r.headers().map_err(io_err)?;
    if header.iter().ne(HEADER.iter().copied()) {
        return Err(HarnessError::Io(format!("unexpected header {header:?}")));
    }
    r.records()
        .enumerate()
        .map(|(i, rec)| {
            let rec = rec.map_err(io_err)?;
            CsvRow::parse(&rec).map_err(|e| HarnessError::Io(format!("row {}: {e}", i + 1)))
        })
        .collect()
}

pub fn rows_to_string(rows: &[CsvRow]) -> Result<String, HarnessError> {
    let mut buf = Vec::new();
    write_rows(&mut buf, rows)?;
    String::from_utf8(buf).map_err(|e| HarnessError::Io(e.to_string()))
}

fn io_err(e: csv::Error) -> HarnessError {
    HarnessError::Io(e.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn key() -> GroupKey {
        GroupKey {
            scenario: ScenarioKind::PartiallyConnected,
            p_k: 0.8,
            n_s: 5,
            tau: 10.0,
            n_sen: Some(159.0),
            rho: Some(200.0),
            r_sen_km: Some(0.4),
            d_bin_m: Some(12.5),
        }
    }

    #[test]
    fn formats_six_significant_digits() {
        assert_eq!(fmt_num(0.975381687568122), "0.975382");
        assert_eq!(fmt_num(7.99821234), "7.99821");
        assert_eq!(fmt_num(10.0), "10");
        assert_eq!(fmt_num(0.0), "0");
        assert_eq!(fmt_num(0.00012345678), "0.000123457");
        assert_eq!(fmt_num(1234567.0), "1234570");
    }

    #[test]
    fn header_and_layout() {
        let rows = vec![
            CsvRow::analytic("5a", key(), Metric::Prr, 0.954899582577519),
            CsvRow::failed(
                "5a",
                key(),
                Source::Sim,
                Metric::Throughput,
                "overload, x".into(),
            ),
        ];
        let text = rows_to_string(&rows).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "figure,scenario,p_k,n_s,tau,N_sen,rho,R_sen,d_bin_m,source,metric,mean,ci95,trials,error"
        );
        assert_eq!(
            lines.next().unwrap(),
            "5a,partially_connected,0.8,5,10,159,200,0.4,12.5,analytic,prr,0.9549,,,"
        );
        assert_eq!(
            lines.next().unwrap(),
            "5a,partially_connected,0.8,5,10,159,200,0.4,12.5,sim,throughput,,,,\"overload, x\""
        );
    }

    #[test]
    fn rejects_foreign_header() {
        assert!(read_rows("a,b\n1,2\n".as_bytes()).is_err());
    }

    fn arb_row() -> impl Strategy<Value = CsvRow> {
        let opt = || proptest::option::of(-1e6f64..1e6);
        (
            (
                0.0f64..1.0,
                1u32..20,
                1.0f64..100.0,
                opt(),
                opt(),
                opt(),
                opt(),
            ),
            (
                any::<bool>(),
                any::<bool>(),
                opt(),
                opt(),
                proptest::option::of(1u32..100),
            ),
            proptest::option::of("[a-z ,\"]{0,12}"),
        )
            .prop_map(
                |((p_k, n_s, tau, n_sen, rho, r, d), (fcn, prr, mean, ci, trials), error)| CsvRow {
                    figure: "fig".into(),
                    key: GroupKey {
                        scenario: if fcn {
                            ScenarioKind::FullyConnected
                        } else {
                            ScenarioKind::PartiallyConnected
                        },
                        p_k,
                        n_s,
                        tau,
                        n_sen,
                        rho,
                        r_sen_km: r,
                        d_bin_m: d,
                    },
                    source: if prr { Source::Sim } else { Source::Analytic },
                    metric: if prr { Metric::Prr } else { Metric::Throughput },
                    mean,
                    ci95: ci,
                    trials,
                    error: error.filter(|e| !e.is_empty()),
                },
            )
    }

    proptest! {
        #[test]
        fn round_trip_is_idempotent(rows in proptest::collection::vec(arb_row(), 0..12)) {
            let first = rows_to_string(&rows).unwrap();
            let parsed = read_rows(first.as_bytes()).unwrap();
            prop_assert_eq!(parsed.len(), rows.len());
            let second = rows_to_string(&parsed).unwrap();
            prop_assert_eq!(&first, &second);
            let reparsed = read_rows(second.as_bytes()).unwrap();
            prop_assert_eq!(parsed, reparsed);
        }
    }
}
