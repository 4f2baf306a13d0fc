//! Statement input, execution and output for the shell.

use std::io::{BufRead, Write};
use std::time::{Duration, Instant};

use tgdb_core::parser::{self, ast::ParsedStatement};
use tgdb_core::{Error, Outcome, Session};

pub struct Options {
    pub time: bool,
    pub keep_going: bool,
}

/// True while `text` ends inside a bracket, string or comment.
fn needs_more(text: &str) -> bool {
    let result = parser::tokenize(text).and_then(|t| parser::check_brackets(&t));
    matches!(result, Err(Error::Syntax { ref message, .. }) if message.starts_with("unterminated"))
}

fn print_outcome(out: &mut dyn Write, o: &Outcome) {
    if let Outcome::Table(t) = o {
        let _ = out.write_all(t.render().as_bytes());
    }
}

/// Reads statements until end of input. Lines are joined while a bracket is
/// open. Errors are reported and the session continues. Returns false if
/// any statement failed.
pub fn run_repl(
    session: &mut Session,
    input: impl BufRead,
    out: &mut dyn Write,
    err: &mut dyn Write,
    prompts: bool,
) -> bool {
    let mut ok = true;
    let mut pending = String::new();
    let mut lines = input.lines();
    loop {
        if prompts {
            let _ = write!(out, "{}", if pending.is_empty() { "SQL> " } else { "> " });
            let _ = out.flush();
        }
        let Some(Ok(line)) = lines.next() else { break };
        if pending.is_empty() && line.trim().is_empty() {
            continue;
        }
        pending.push_str(&line);
        pending.push('\n');
        if needs_more(&pending) {
            continue;
        }
        let text = std::mem::take(&mut pending);
        match parser::parse_script(&text) {
            Ok(stmts) => {
                for s in stmts {
                    match session.execute(&s.statement) {
                        Ok(o) => print_outcome(out, &o),
                        Err(e) => {
                            ok = false;
                            let _ = writeln!(err, "error: {}", e);
                        }
                    }
                }
            }
            Err(e) => {
                ok = false;
                let _ = writeln!(err, "error: {}", e);
            }
        }
        let _ = out.flush();
    }
    if !pending.trim().is_empty() {
        ok = false;
        let _ = writeln!(err, "error: input ended inside an open bracket");
    }
    ok
}

/// Runs a whole script. Stops at the first failure unless `keep_going`.
pub fn run_script(session: &mut Session, src: &str, opts: &Options, out: &mut dyn Write, err: &mut dyn Write) -> bool {
    let stmts: Vec<ParsedStatement> = match parser::parse_script(src) {
        Ok(s) => s,
        Err(e) => {
            let _ = writeln!(err, "error: {}", e);
            return false;
        }
    };
    let mut ok = true;
    let mut total = Duration::ZERO;
    let mut ran = 0usize;
    for s in &stmts {
        let t0 = Instant::now();
        let res = session.execute(&s.statement);
        let dt = t0.elapsed();
        total += dt;
        ran += 1;
        if opts.time {
            let _ = writeln!(err, "line {}: {:.3} ms", s.line, dt.as_secs_f64() * 1e3);
        }
        match res {
            Ok(o) => print_outcome(out, &o),
            Err(e) => {
                ok = false;
                let _ = writeln!(err, "error at line {}: {}", s.line, e);
                if !opts.keep_going {
                    break;
                }
            }
        }
    }
    if opts.time {
        let secs = total.as_secs_f64();
        let rate = if secs > 0.0 { ran as f64 / secs } else { f64::INFINITY };
        let _ = writeln!(err, "{} statements in {:.3} s ({:.0} statements/s)", ran, secs, rate);
    }
    ok
}

#[cfg(test)]
mod tests {
    use super::*;
    use tgdb_core::Database;

    fn repl(input: &str) -> (String, String, bool) {
        let mut s = Session::new(Database::in_memory());
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let ok = run_repl(&mut s, input.as_bytes(), &mut out, &mut err, false);
        (String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap(), ok)
    }

    #[test]
    fn open_brackets_continue() {
        assert!(needs_more("[CREATE (a:P {n:1}),\n"));
        assert!(needs_more("CREATE (:P {n:'abc"));
        assert!(!needs_more("CREATE (:P {n:1})"));
        assert!(!needs_more("CREATE (:P {n:1}))"));
    }

    #[test]
    fn multiline_statement_runs_once() {
        let (out, err, ok) = repl("[CREATE (:P {n:1}),\n(:P {n:2})]\n\nMATCH (x:P) RETURN x.n\n");
        assert!(ok, "{}", err);
        assert_eq!(out, "-----\n|N|\n-----\n|1|\n|2|\n-----\n");
    }

    #[test]
    fn errors_do_not_end_the_session() {
        let (out, err, ok) = repl("MATCH x) RETURN x\nCREATE (:P {n:1})\nMATCH (x:P) RETURN x.n\n");
        assert!(!ok);
        assert!(err.starts_with("error: syntax error"), "{}", err);
        assert!(out.contains("|1|"));
    }

    #[test]
    fn rollback_discards_uncommitted_create() {
        let (out, _, ok) = repl("begin\nCREATE (:P {n:1})\nrollback\nMATCH (x:P) RETURN x.n\n");
        assert!(ok);
        assert_eq!(out, "-----\n|N|\n-----\n-----\n");
    }

    #[test]
    fn script_reports_failing_line() {
        let mut s = Session::new(Database::in_memory());
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let opts = Options { time: false, keep_going: false };
        let src = "CREATE (:P {n:1})\n\nCREATE (x)\nCREATE (:P {n:2})\n";
        assert!(!run_script(&mut s, src, &opts, &mut out, &mut err));
        let err = String::from_utf8(err).unwrap();
        assert!(err.starts_with("error at line 3:"), "{}", err);
        let n = s.with_state(|st| st.row_count());
        assert_eq!(n, 1);
    }

    #[test]
    fn keep_going_runs_the_rest() {
        let mut s = Session::new(Database::in_memory());
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let opts = Options { time: true, keep_going: true };
        let src = "CREATE (:P {n:1})\nCREATE (x)\nCREATE (:P {n:2})\n";
        assert!(!run_script(&mut s, src, &opts, &mut out, &mut err));
        let err = String::from_utf8(err).unwrap();
        assert!(err.contains("3 statements in"), "{}", err);
        assert_eq!(s.with_state(|st| st.row_count()), 2);
    }

    #[test]
    fn syntax_error_is_reported_with_line() {
        let mut s = Session::new(Database::in_memory());
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let opts = Options { time: false, keep_going: true };
        assert!(!run_script(&mut s, "CREATE (:P)\nMATCH (x RETURN x\n", &opts, &mut out, &mut err));
        let err = String::from_utf8(err).unwrap();
        assert!(err.contains("line 2"), "{}", err);
        assert_eq!(s.with_state(|st| st.row_count()), 0);
    }
}
