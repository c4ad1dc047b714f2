use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use formod::cli::{parse_order, run_text, Options, EXIT_DOMAIN};
use formod::normal::DEFAULT_DEGREE_BOUND;
use formod::CoeffField;

/// Run a session of formal-model computations.
#[derive(Parser, Debug)]
#[command(name = "formod", version)]
struct Args {
    /// Session file; standard input when absent.
    file: Option<PathBuf>,
    /// Coefficient field: `q` or `fp:<p>`.
    #[arg(long, default_value = "q")]
    field: String,
    /// Monomial order used by `gb`: `grevlex` or `lex`.
    #[arg(long, default_value = "grevlex")]
    order: String,
    /// Degree bound for normalization searches.
    #[arg(long, default_value_t = DEFAULT_DEGREE_BOUND)]
    degree_bound: u32,
    /// Emit JSON instead of text.
    #[arg(long)]
    json: bool,
    /// Name of the uniformizer variable.
    #[arg(long, default_value = "w")]
    uniformizer: String,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let setup = || -> formod::Result<Options> {
        Ok(Options {
            field: CoeffField::parse(&args.field)?,
            order: parse_order(&args.order)?,
            degree_bound: args.degree_bound,
            json: args.json,
            uniformizer: args.uniformizer.clone(),
        })
    };
    let opts = match setup() {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_DOMAIN as u8);
        }
    };
    let mut text = String::new();
    let read = match &args.file {
        Some(p) => std::fs::read_to_string(p).map(|t| text = t),
        None => std::io::stdin().read_to_string(&mut text).map(|_| ()),
    };
    if let Err(e) = read {
        eprintln!("error: cannot read input: {e}");
        return ExitCode::from(EXIT_DOMAIN as u8);
    }
    let outcome = run_text(&text, &opts);
    print!("{}", outcome.output);
    ExitCode::from(outcome.exit_code as u8)
}
