//! Subcommand implementations. Each renders its report into a buffer and
//! hands it to [`emit`].

use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::Path;

use dipstr_core::oracle::{builtin_instances, validate_instance, OracleInstance, Verdict};
use dipstr_core::{
    augment, combine_loci, compute_lr, empirical_k_hat, sensitivity_sweep, CaseInput, DipClass,
    KPrior, LrResult,
};

use crate::config::{Cli, Command, LrArgs, StatsArgs, SweepArgs, ValidateArgs};
use crate::io::{read_cases, sig6, DatabaseSet};
use crate::CliError;

pub const SWEEP_HEADER: [&str; 6] = ["method", "alpha", "m", "k_prior", "log10_lr", "status"];

pub fn execute(cli: &Cli, stdout: &mut dyn Write) -> Result<(), CliError> {
    match &cli.command {
        Command::Lr(args) => cmd_lr(args, stdout),
        Command::Sweep(args) => cmd_sweep(args, stdout),
        Command::Validate(args) => cmd_validate(args, stdout),
        Command::Stats(args) => cmd_stats(args, stdout),
    }
}

fn emit(report: &[u8], out: Option<&Path>, stdout: &mut dyn Write) -> Result<(), CliError> {
    let result = match out {
        Some(path) => fs::write(path, report).map_err(|e| format!("{}: {e}", path.display())),
        None => stdout.write_all(report).map_err(|e| e.to_string()),
    };
    result.map_err(CliError::Input)
}

fn load(input: &crate::config::InputArgs) -> Result<(DatabaseSet, Vec<CaseInput>), CliError> {
    let dbs = DatabaseSet::load(&input.db)?;
    let cases = read_cases(&input.case)?;
    // resolve every locus up front so a missing database is an input error
    for case in &cases {
        dbs.for_locus(&case.locus)?;
    }
    Ok((dbs, cases))
}

fn lr_record(out: &mut String, locus: &str, args: &LrArgs, r: &LrResult) {
    let denominator = r.denominator.map_or_else(|| "NA".to_string(), sig6);
    write!(
        out,
        "locus={locus} method={} alpha={} m={} k_prior={} denominator={denominator} \
         log10_lr={} lr={} status={}",
        r.method,
        sig6(args.model.alpha),
        args.model.m,
        args.model.k_prior,
        sig6(r.log10_lr),
        sig6(r.lr),
        r.status,
    )
    .expect("writing to a String");
    for (key, value) in &r.diagnostics {
        write!(out, " {key}={}", sig6(*value)).expect("writing to a String");
    }
    out.push('\n');
}

pub fn cmd_lr(args: &LrArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let prior = args.model.prior()?;
    let (dbs, cases) = load(&args.input)?;
    let mut methods = Vec::new();
    for &m in &args.method {
        if !methods.contains(&m) {
            methods.push(m);
        }
    }

    let mut report = String::new();
    let mut per_method: Vec<Vec<LrResult>> = vec![Vec::new(); methods.len()];
    for case in &cases {
        let db = dbs.for_locus(&case.locus)?;
        for (slot, &method) in per_method.iter_mut().zip(&methods) {
            let r = compute_lr(case, db, &prior, method)?;
            lr_record(&mut report, &case.locus, args, &r);
            slot.push(r);
        }
    }
    if cases.len() > 1 {
        for results in &per_method {
            lr_record(&mut report, "combined", args, &combine_loci(results)?);
        }
    }
    emit(report.as_bytes(), args.out.as_deref(), stdout)
}

pub fn cmd_sweep(args: &SweepArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let alphas = match &args.alpha_grid {
        Some(grid) => grid.0.clone(),
        None => vec![args.alpha],
    };
    let m_values = match &args.m_grid {
        Some(grid) => grid.0.clone(),
        None => vec![args.m],
    };
    let priors = if args.k_prior.is_empty() {
        vec![KPrior::Uniform]
    } else {
        args.k_prior.clone()
    };
    let (dbs, cases) = load(&args.input)?;
    let [case] = &cases[..] else {
        return Err(CliError::Input(format!(
            "sweep takes a single-locus case file, got {} loci",
            cases.len()
        )));
    };
    let db = dbs.for_locus(&case.locus)?;
    let rows = sensitivity_sweep(case, db, &alphas, &m_values, &priors, &args.method)?;

    let mut writer = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| CliError::Input(format!("writing CSV: {e}"));
    writer.write_record(SWEEP_HEADER).map_err(csv_err)?;
    for row in &rows {
        writer
            .write_record([
                row.method.to_string(),
                row.alpha.to_string(),
                row.m.to_string(),
                row.k_prior.to_string(),
                row.log10_lr.to_string(),
                row.status.to_string(),
            ])
            .map_err(csv_err)?;
    }
    let bytes = writer
        .into_inner()
        .map_err(|e| CliError::Input(format!("writing CSV: {e}")))?;
    emit(&bytes, args.out.as_deref(), stdout)
}

fn side_name(class: DipClass) -> &'static str {
    match class {
        DipClass::L => "L",
        DipClass::S => "S",
    }
}

pub fn cmd_stats(args: &StatsArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    if !(args.alpha.is_finite() && args.alpha > 0.0) {
        return Err(CliError::Input(format!(
            "alpha must be positive, got {}",
            args.alpha
        )));
    }
    if args.m == 0 {
        return Err(CliError::Input("m must be at least 1".to_string()));
    }
    let (dbs, cases) = load(&args.input)?;
    let mut report = String::new();
    for (idx, case) in cases.iter().enumerate() {
        if idx > 0 {
            report.push('\n');
        }
        let adb = augment(dbs.for_locus(&case.locus)?, &case.suspect, &case.victim);
        let w = &mut report;
        writeln!(w, "locus={}", case.locus).expect("writing to a String");
        writeln!(w, "n={}", adb.n).expect("writing to a String");
        writeln!(w, "n_augmented={}", adb.total()).expect("writing to a String");
        for class in [DipClass::L, DipClass::S] {
            let s = adb.side(class);
            let name = side_name(class);
            let k_hat = if s.k_b == 0 {
                "NA".to_string()
            } else {
                empirical_k_hat(s, args.alpha, args.m).to_string()
            };
            writeln!(
                w,
                "n_{name}={} k_b_{name}={} n1_{name}={} k_hat_{name}={k_hat}",
                s.n_side, s.k_b, s.n1
            )
            .expect("writing to a String");
        }
        for class in [DipClass::L, DipClass::S] {
            for (allele, count) in &adb.side(class).counts {
                writeln!(w, "count {allele} {count}").expect("writing to a String");
            }
        }
    }
    emit(report.as_bytes(), args.out.as_deref(), stdout)
}

fn validation_instances(args: &ValidateArgs) -> Result<Vec<OracleInstance>, CliError> {
    let mut instances = builtin_instances();
    if let Some(case_path) = &args.case {
        let prior = args.model.prior()?;
        let dbs = DatabaseSet::load(&args.db)?;
        for case in read_cases(case_path)? {
            instances.push(OracleInstance {
                name: format!("case:{}", case.locus),
                db: dbs.for_locus(&case.locus)?.clone(),
                case,
                prior,
            });
        }
    }
    Ok(instances)
}

pub fn cmd_validate(args: &ValidateArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    if args.samples == 0 {
        return Err(CliError::Input("--samples must be positive".to_string()));
    }
    let instances = validation_instances(args)?;
    let mut report = String::new();
    writeln!(
        report,
        "{:<44} {:>12} {:>12} {:>12} {:>12}  verdict",
        "quantity", "closed_form", "estimate", "s.e.", "ESS"
    )
    .expect("writing to a String");
    let mut failed = 0;
    let mut total = 0;
    for inst in &instances {
        let row = validate_instance(inst, args.samples, args.seed)?;
        total += 1;
        if row.verdict != Verdict::Pass {
            failed += 1;
        }
        let (estimate, se, ess) = match &row.estimate {
            Some(est) => (
                sig6(est.value),
                sig6(est.std_error),
                format!("{:.1}", est.effective_sample_size),
            ),
            None => ("-".to_string(), "-".to_string(), "0".to_string()),
        };
        writeln!(
            report,
            "{:<44} {:>12} {:>12} {:>12} {:>12}  {}",
            row.quantity,
            sig6(row.closed_form),
            estimate,
            se,
            ess,
            row.verdict
        )
        .expect("writing to a String");
    }
    writeln!(
        report,
        "{} of {total} quantities within 3 s.e. (samples={}, seed={})",
        total - failed,
        args.samples,
        args.seed
    )
    .expect("writing to a String");
    emit(report.as_bytes(), args.out.as_deref(), stdout)?;
    if failed > 0 {
        return Err(CliError::ValidationFailed { failed, total });
    }
    Ok(())
}
