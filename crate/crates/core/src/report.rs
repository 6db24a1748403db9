//! Output documents: CSV tables and `key=value` reports, each preceded by
//! `#` comment lines with the version, config hash, resolved config, and the
//! column schema.

use std::fmt::Write as _;

use crate::config::RunConfig;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

fn header(command: &str, cfg: &RunConfig) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# latdisc {VERSION}");
    let _ = writeln!(out, "# command: {command}");
    let _ = writeln!(out, "# config_hash: {}", cfg.hash());
    out.push_str("# config:\n");
    for line in cfg.resolved_toml().lines() {
        if line.is_empty() {
            out.push_str("#\n");
        } else {
            let _ = writeln!(out, "#   {line}");
        }
    }
    out
}

/// A CSV document: comment header, column row, data rows.
pub fn csv_document<I, S>(command: &str, cfg: &RunConfig, columns: &[&str], rows: I) -> String
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    annotated_csv_document(command, cfg, &[], columns, rows)
}

/// [`csv_document`] with extra `# key: value` summary lines in the header.
pub fn annotated_csv_document<I, S>(command: &str, cfg: &RunConfig, notes: &[(String, String)], columns: &[&str], rows: I) -> String
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    let mut out = header(command, cfg);
    for (k, v) in notes {
        let _ = writeln!(out, "# {k}: {v}");
    }
    let cols = columns.join(",");
    let _ = writeln!(out, "# columns: {cols}");
    let _ = writeln!(out, "{cols}");
    for row in rows {
        out.push_str(row.as_ref());
        out.push('\n');
    }
    out
}

/// A `key=value` report with the same comment header.
pub fn key_value_document(command: &str, cfg: &RunConfig, pairs: &[(String, String)]) -> String {
    let mut out = header(command, cfg);
    out.push_str("# columns: key=value\n");
    for (k, v) in pairs {
        let _ = writeln!(out, "{k}={v}");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_header_layout() {
        let cfg = RunConfig::default();
        let doc = csv_document("count", &cfg, &["t", "count"], ["1,7"]);
        let lines: Vec<&str> = doc.lines().collect();
        assert_eq!(lines[0], format!("# latdisc {VERSION}"));
        assert_eq!(lines[2], format!("# config_hash: {}", cfg.hash()));
        assert!(lines.contains(&"# columns: t,count"));
        assert_eq!(lines[lines.len() - 2], "t,count");
        assert_eq!(lines[lines.len() - 1], "1,7");
        assert!(lines[..lines.len() - 2].iter().all(|l| l.starts_with('#')));
    }

    #[test]
    fn key_value_layout() {
        let cfg = RunConfig::default();
        let doc = key_value_document("body check", &cfg, &[("accepted".into(), "true".into())]);
        assert!(doc.ends_with("accepted=true\n"));
    }
}
