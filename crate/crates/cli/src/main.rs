//! `cscoh`: complex-symplectic cohomology of invariant complexes.

mod report;

use std::collections::BTreeMap;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use cscoh::analysis::ScanWhat;
use cscoh::cohomology::Flavor;
use cscoh::{catalog, parse_spec, Error, GaussianRational as Q, ManifoldSpec};

use report::{Format, Report};

#[derive(Parser, Debug)]
#[command(name = "cscoh", version, about = "Exact complex-symplectic cohomology of invariant complexes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Structural identities, sl2 relations, star and metric checks.
    Validate(Common),
    /// Dimension tables of the four cohomologies and of H_D.
    Cohomology(Common),
    /// Harmonic bases.
    Harmonic(Common),
    /// Hard Lefschetz Condition per flavor.
    Hlc(Common),
    /// The dbar dbar^Lambda-lemma, decided three ways.
    Lemma(Common),
    /// Dolbeault–Massey triple product of three closed forms.
    Massey {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
        #[arg(long)]
        c: String,
    },
    /// Evaluate over several parameter values, or over omega perturbations.
    Scan {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value_t = What::Lemma)]
        what: What,
        /// Direction `u` of the perturbation omega + eps*u.
        #[arg(long, requires = "eps")]
        omega_direction: Option<String>,
        #[arg(long, requires = "omega_direction")]
        eps: Option<String>,
        #[arg(long)]
        a: Option<String>,
        #[arg(long)]
        b: Option<String>,
        #[arg(long)]
        c: Option<String>,
    },
    /// Built-in manifolds.
    Catalog {
        #[command(subcommand)]
        action: Option<CatalogAction>,
        #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
        format: Format,
    },
}

#[derive(Subcommand, Debug)]
enum CatalogAction {
    List,
    /// Print an entry as a spec document.
    Show {
        name: String,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum What {
    Lemma,
    Hlc,
    Massey,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum FlavorArg {
    Dolbeault,
    DbarLambda,
    Bc,
    Aeppli,
    All,
}

#[derive(Args, Debug)]
struct Common {
    #[arg(long, conflicts_with = "spec", required_unless_present = "spec")]
    catalog: Option<String>,
    #[arg(long)]
    spec: Option<PathBuf>,
    /// `name=value,...`; in scans one name may take several values.
    #[arg(long)]
    param: Option<String>,
    #[arg(long, value_enum, default_value_t = FlavorArg::All)]
    flavor: FlavorArg,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

impl Common {
    fn flavors(&self) -> Vec<Flavor> {
        match self.flavor {
            FlavorArg::Dolbeault => vec![Flavor::Dolbeault],
            FlavorArg::DbarLambda => vec![Flavor::DbarLambda],
            FlavorArg::Bc => vec![Flavor::BottChern],
            FlavorArg::Aeppli => vec![Flavor::Aeppli],
            FlavorArg::All => Flavor::ALL.to_vec(),
        }
    }

    fn load_spec(&self) -> Result<ManifoldSpec, Error> {
        match (&self.catalog, &self.spec) {
            (Some(name), _) => catalog::spec(name),
            (None, Some(path)) => {
                let text = fs::read_to_string(path)
                    .map_err(|e| Error::Spec(format!("cannot read {}: {e}", path.display())))?;
                parse_spec(&text)
            }
            (None, None) => Err(Error::Spec("one of --catalog or --spec is required".into())),
        }
    }

    fn params(&self) -> Result<Vec<(String, Vec<Q>)>, Error> {
        parse_params(self.param.as_deref().unwrap_or(""))
    }

    /// Every parameter with exactly one value.
    fn single_params(&self) -> Result<BTreeMap<String, Q>, Error> {
        self.params()?
            .into_iter()
            .map(|(k, mut vs)| {
                if vs.len() != 1 {
                    return Err(Error::Spec(format!("parameter `{k}` takes one value here")));
                }
                Ok((k, vs.remove(0)))
            })
            .collect()
    }
}

/// `t=0,1/2,s=1` gives `t ↦ [0, 1/2]`, `s ↦ [1]`.
fn parse_params(text: &str) -> Result<Vec<(String, Vec<Q>)>, Error> {
    let mut out: Vec<(String, Vec<Q>)> = Vec::new();
    for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        match item.split_once('=') {
            Some((k, v)) => {
                let k = k.trim().to_string();
                if out.iter().any(|(p, _)| *p == k) {
                    return Err(Error::Spec(format!("parameter `{k}` given twice")));
                }
                out.push((k, vec![v.trim().parse()?]));
            }
            None => match out.last_mut() {
                Some((_, vs)) => vs.push(item.parse()?),
                None => return Err(Error::Spec(format!("expected name=value, found `{item}`"))),
            },
        }
    }
    Ok(out)
}

fn parse_values(text: &str) -> Result<Vec<Q>, Error> {
    text.split(',').map(str::trim).filter(|s| !s.is_empty()).map(str::parse).collect()
}

fn run(cli: Cli) -> Result<String, Error> {
    match cli.command {
        Command::Catalog { action, format } => Ok(match action {
            None | Some(CatalogAction::List) => report::catalog_list(format),
            Some(CatalogAction::Show { name }) => catalog::show(&name)?.to_string(),
        }),
        Command::Validate(c) => Report::load(&c.load_spec()?, &c.single_params()?, c.format)?.validate(),
        Command::Cohomology(c) => {
            Ok(Report::load(&c.load_spec()?, &c.single_params()?, c.format)?.cohomology(&c.flavors()))
        }
        Command::Harmonic(c) => {
            Ok(Report::load(&c.load_spec()?, &c.single_params()?, c.format)?.harmonic(&c.flavors()))
        }
        Command::Hlc(c) => Ok(Report::load(&c.load_spec()?, &c.single_params()?, c.format)?.hlc(&c.flavors())),
        Command::Lemma(c) => Report::load(&c.load_spec()?, &c.single_params()?, c.format)?.lemma(),
        Command::Massey { common: c, a, b, c: cc } => {
            Report::load(&c.load_spec()?, &c.single_params()?, c.format)?.massey(&a, &b, &cc)
        }
        Command::Scan { common: c, what, omega_direction, eps, a, b, c: cc } => {
            let what = match what {
                What::Lemma => ScanWhat::Lemma,
                What::Hlc => ScanWhat::Hlc(match c.flavor {
                    FlavorArg::All => Flavor::Dolbeault,
                    _ => c.flavors()[0],
                }),
                What::Massey => match (a, b, cc) {
                    (Some(a), Some(b), Some(c)) => ScanWhat::Massey { a, b, c },
                    _ => return Err(Error::Spec("--what massey needs --a, --b and --c".into())),
                },
            };
            let spec = c.load_spec()?;
            if let (Some(direction), Some(eps)) = (omega_direction, eps) {
                return report::omega_scan(
                    &spec,
                    &c.single_params()?,
                    &direction,
                    &parse_values(&eps)?,
                    &what,
                    c.format,
                );
            }
            let mut params = c.params()?;
            let scanned = match params.iter().filter(|(_, vs)| vs.len() > 1).count() {
                0 if params.len() == 1 => 0,
                1 => params.iter().position(|(_, vs)| vs.len() > 1).expect("counted"),
                _ => return Err(Error::Spec("a scan varies exactly one parameter".into())),
            };
            let (name, values) = params.remove(scanned);
            let base: BTreeMap<String, Q> = params.into_iter().map(|(k, mut vs)| (k, vs.remove(0))).collect();
            report::parameter_scan(&spec, &name, &base, &values, &what, c.format)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(text) => {
            print!("{text}");
            if !text.ends_with('\n') {
                println!();
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_internal() { 2 } else { 1 })
        }
    }
}
