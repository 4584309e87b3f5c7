use serde::Serialize;

use crate::commands::Envelope;
use crate::Format;

/// CSV and text-table forms of a report body.
pub trait Render {
    fn csv(&self) -> String;
    fn table(&self) -> String;
}

pub fn render<T: Serialize + Render>(env: &Envelope<T>, format: Format) -> String {
    let header = |prefix: &str| {
        let mut h = format!(
            "{prefix}command={} seed={} outcome={} exact_rational={}\n",
            env.command,
            env.seed,
            serde_json::to_value(env.outcome)
                .ok()
                .and_then(|v| v.as_str().map(str::to_string))
                .unwrap_or_default(),
            env.exact_rational
        );
        for n in &env.notes {
            h.push_str(&format!("{prefix}note: {n}\n"));
        }
        h
    };
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(env).expect("report serializes");
            s.push('\n');
            s
        }
        Format::Csv => header("# ") + &env.report.csv(),
        Format::Table => header("") + &env.report.table(),
    }
}
