//! Line-delimited JSON log events on standard error.

use log::{Level, LevelFilter, Log, Metadata, Record};
use serde_json::json;
use std::io::Write;
use std::time::Instant;

struct JsonLogger {
    start: Instant,
    level: LevelFilter,
}

impl Log for JsonLogger {
    fn enabled(&self, metadata: &Metadata) -> bool {
        metadata.level() <= self.level
    }

    fn log(&self, record: &Record) {
        if !self.enabled(record.metadata()) {
            return;
        }
        let event = json!({
            "elapsed_ms": self.start.elapsed().as_millis() as u64,
            "level": record.level().as_str().to_lowercase(),
            "target": record.target(),
            "msg": record.args().to_string(),
        });
        let mut err = std::io::stderr().lock();
        let _ = writeln!(err, "{event}");
    }

    fn flush(&self) {
        let _ = std::io::stderr().flush();
    }
}

pub fn init(verbose: bool) {
    let level = if verbose { Level::Debug } else { Level::Info };
    let logger = JsonLogger {
        start: Instant::now(),
        level: level.to_level_filter(),
    };
    if log::set_boxed_logger(Box::new(logger)).is_ok() {
        log::set_max_level(level.to_level_filter());
    }
}
