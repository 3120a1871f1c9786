//! Command-line demos. Probabilities print with 6 decimals, fidelities with
//! 12 significant digits. Exit status: 0 success, 1 demo failure, 2 usage.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algorithms::{self, MatrixPowers, PromiseClass};
use crate::circuits::{qft, Oracle};
use crate::crypto::{self, FactorBackend};
use crate::error::Error;
use crate::noise;
use crate::shor;
use crate::StateVector;

#[derive(Debug, Parser)]
#[command(name = "qsim", version, about = "State-vector demos of quantum gates, algorithms and codes")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Classify all four one-bit functions with one query each.
    Deutsch,
    /// Deutsch-Jozsa on a random constant and a random balanced function.
    Dj {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Grover search for one marked item.
    Grover {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        target: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Quantum Fourier transform circuit.
    Qft {
        #[arg(long)]
        n: usize,
        /// Print the gate list instead of a summary.
        #[arg(long)]
        dump_circuit: bool,
    },
    /// Phase estimation of diag(1, e^{2 pi i phase}) on |1>.
    PhaseEst {
        #[arg(long)]
        phase_turns: f64,
        #[arg(long)]
        bits: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Quantum order finding of a modulo N.
    Order {
        #[arg(long)]
        a: u64,
        #[arg(long = "N")]
        modulus: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Factor N with simulated order finding.
    Factor {
        #[arg(long = "N")]
        modulus: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 20)]
        max_attempts: usize,
    },
    /// Textbook RSA.
    #[command(subcommand)]
    Rsa(RsaCommand),
    /// One-time pad over the 30-symbol alphabet.
    #[command(subcommand)]
    Vernam(VernamCommand),
    /// Average fidelity with and without the phase-flip code, as CSV.
    DecohereCurve {
        #[arg(long)]
        gamma_t_max: f64,
        #[arg(long)]
        steps: usize,
        /// Output file, or `-` for standard output.
        #[arg(long, default_value = "-")]
        out: PathBuf,
    },
}

#[derive(Debug, Subcommand)]
pub enum RsaCommand {
    Keygen {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        q: u64,
        #[arg(long)]
        e: u64,
    },
    Encrypt {
        #[command(flatten)]
        public: PublicKey,
        #[arg(long)]
        text: String,
    },
    Decrypt {
        #[arg(long)]
        d: u64,
        #[arg(long)]
        n: u64,
        /// Space-separated cipher blocks.
        #[arg(long)]
        blocks: String,
    },
    /// Recover d by factoring n.
    Break {
        #[command(flatten)]
        public: PublicKey,
        #[arg(long, value_enum, default_value_t = Backend::Quantum)]
        backend: Backend,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 20)]
        max_attempts: usize,
    },
}

#[derive(Debug, Args)]
pub struct PublicKey {
    #[arg(long)]
    e: u64,
    #[arg(long)]
    n: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Backend {
    Quantum,
    Classical,
}

#[derive(Debug, Subcommand)]
pub enum VernamCommand {
    Encrypt {
        #[arg(long)]
        text: String,
        /// Space-separated two-digit key codes.
        #[arg(long)]
        key: String,
    },
    Decrypt {
        /// Space-separated two-digit cipher codes.
        #[arg(long)]
        codes: String,
        #[arg(long)]
        key: String,
    },
}

enum Failure {
    Lib(Error),
    Io(io::Error),
    Demo(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

type Outcome = std::result::Result<(), Failure>;

/// Parses `args` (program name first) and runs the demo.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let rendered = e.render().to_string();
            let _ = if code == 0 {
                out.write_all(rendered.as_bytes())
            } else {
                err.write_all(rendered.as_bytes())
            };
            return code;
        }
    };
    match dispatch(cli.command, out) {
        Ok(()) => 0,
        Err(failure) => {
            let msg = match failure {
                Failure::Lib(e) => e.to_string(),
                Failure::Io(e) => format!("i/o error: {e}"),
                Failure::Demo(m) => m,
            };
            let _ = writeln!(err, "error: {msg}");
            1
        }
    }
}

fn dispatch(cmd: Command, out: &mut dyn Write) -> Outcome {
    match cmd {
        Command::Deutsch => deutsch(out),
        Command::Dj { n, seed } => dj(out, n, seed),
        Command::Grover { n, target, seed } => grover(out, n, target, seed),
        Command::Qft { n, dump_circuit } => qft_demo(out, n, dump_circuit),
        Command::PhaseEst {
            phase_turns,
            bits,
            seed,
        } => phase_est(out, phase_turns, bits, seed),
        Command::Order { a, modulus, seed } => order(out, a, modulus, seed),
        Command::Factor {
            modulus,
            seed,
            max_attempts,
        } => factor(out, modulus, seed, max_attempts),
        Command::Rsa(cmd) => rsa(out, cmd),
        Command::Vernam(cmd) => vernam(out, cmd),
        Command::DecohereCurve {
            gamma_t_max,
            steps,
            out: path,
        } => decohere_curve(out, gamma_t_max, steps, &path),
    }
}

fn deutsch(out: &mut dyn Write) -> Outcome {
    let mut wrong = 0;
    for table in [[0, 0], [1, 1], [0, 1], [1, 0]] {
        let f = Oracle::new(1, 1, table.to_vec())?;
        let expected = if table[0] == table[1] {
            PromiseClass::Constant
        } else {
            PromiseClass::Balanced
        };
        let p0 = algorithms::deutsch_jozsa_zero_probability(&f)?;
        let got = classify(p0);
        writeln!(
            out,
            "f(0)={} f(1)={}: {got} (P(0) = {p0:.6}, queries = {})",
            table[0],
            table[1],
            f.queries()
        )?;
        wrong += (got != expected) as usize;
    }
    if wrong > 0 {
        return Err(Failure::Demo(format!("{wrong} functions misclassified")));
    }
    Ok(())
}

fn classify(p0: f64) -> PromiseClass {
    if p0 > 0.5 {
        PromiseClass::Constant
    } else {
        PromiseClass::Balanced
    }
}

fn dj(out: &mut dyn Write, n: usize, seed: u64) -> Outcome {
    if !(1..=crate::circuits::MAX_ORACLE_INPUT).contains(&n) {
        return Err(Failure::Demo(format!(
            "n must be in 1..={}",
            crate::circuits::MAX_ORACLE_INPUT
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let size = 1usize << n;
    let constant = vec![rng.gen_range(0..2u64); size];
    let mut balanced: Vec<u64> = (0..size).map(|x| (x < size / 2) as u64).collect();
    balanced.shuffle(&mut rng);
    let mut wrong = 0;
    for (table, expected) in [(constant, PromiseClass::Constant), (balanced, PromiseClass::Balanced)] {
        let f = Oracle::new(n, 1, table)?;
        let p0 = algorithms::deutsch_jozsa_zero_probability(&f)?;
        let got = classify(p0);
        writeln!(out, "{expected} function: classified {got} (P(0...0) = {p0:.6})")?;
        wrong += (got != expected) as usize;
    }
    if wrong > 0 {
        return Err(Failure::Demo(format!("{wrong} functions misclassified")));
    }
    Ok(())
}

fn grover(out: &mut dyn Write, n: usize, target: usize, seed: u64) -> Outcome {
    let run = algorithms::grover_search(n, target, seed)?;
    writeln!(out, "n = {n}, target = {target}, iterations = {}", run.iterations)?;
    writeln!(
        out,
        "success probability {:.6} (predicted {:.6})",
        run.success_probability, run.predicted_success
    )?;
    writeln!(out, "measured {}", run.outcome)?;
    if (run.success_probability - run.predicted_success).abs() > 1e-9 {
        return Err(Failure::Demo("success probability disagrees with prediction".into()));
    }
    Ok(())
}

fn qft_demo(out: &mut dyn Write, n: usize, dump: bool) -> Outcome {
    crate::qstate::check_capacity(n)?;
    let c = qft(n);
    if dump {
        write!(out, "{c}")?;
    } else {
        let swaps = c.len() - c.gate_count();
        writeln!(out, "QFT on {n} qubits: {} gates, {swaps} swaps", c.gate_count())?;
    }
    Ok(())
}

fn phase_est(out: &mut dyn Write, turns: f64, bits: usize, seed: u64) -> Outcome {
    let powers = MatrixPowers::phase_turns(turns);
    let one = StateVector::basis_state(1, 1)?;
    let dist = algorithms::phase_estimation_distribution(&powers, &one, bits)?;
    let est = algorithms::phase_estimate(&powers, &one, bits, seed)?;
    let best = algorithms::best_estimates(turns, bits);
    let p_best: f64 = best.iter().map(|&b| dist[b as usize]).sum();
    writeln!(
        out,
        "measured {:0width$b} -> {:.6} turns",
        est.bits,
        est.turns(),
        width = bits
    )?;
    writeln!(out, "P(best estimate) = {p_best:.6}")?;
    Ok(())
}

fn order(out: &mut dyn Write, a: u64, modulus: u64, seed: u64) -> Outcome {
    let res = shor::quantum_order_find(a, modulus, seed)?;
    writeln!(
        out,
        "measured x = {} of 2^{}",
        res.raw_measurement, res.precision
    )?;
    match res.k_over_r {
        Some(c) => writeln!(out, "convergent {c}")?,
        None => writeln!(out, "no convergent with denominator below 2^m")?,
    }
    if !res.succeeded {
        return Err(Failure::Demo(format!("order of {a} mod {modulus} not found; try another seed")));
    }
    writeln!(out, "r = {}", res.r)?;
    Ok(())
}

fn factor(out: &mut dyn Write, modulus: u64, seed: u64, max_attempts: usize) -> Outcome {
    match shor::shor_factor(modulus, seed, max_attempts) {
        Ok(report) => {
            for (i, a) in report.attempts.iter().enumerate() {
                writeln!(out, "attempt {}: {a}", i + 1)?;
            }
            if report.classical {
                writeln!(out, "classical shortcut")?;
            }
            writeln!(out, "factor: {}", report.factor)?;
            Ok(())
        }
        Err(Error::AttemptsExhausted { attempts, log }) => {
            for (i, line) in log.iter().enumerate() {
                writeln!(out, "attempt {}: {line}", i + 1)?;
            }
            Err(Failure::Demo(format!("no factor after {attempts} attempts")))
        }
        Err(e) => Err(e.into()),
    }
}

fn rsa(out: &mut dyn Write, cmd: RsaCommand) -> Outcome {
    match cmd {
        RsaCommand::Keygen { p, q, e } => {
            let k = crypto::rsa_keygen(p, q, e)?;
            writeln!(out, "n = {}", k.n)?;
            writeln!(out, "phi = {}", k.phi())?;
            writeln!(out, "e = {}", k.e)?;
            writeln!(out, "d = {}", k.d)?;
        }
        RsaCommand::Encrypt { public, text } => {
            writeln!(out, "{}", crypto::rsa_encrypt((public.e, public.n), &text)?)?;
        }
        RsaCommand::Decrypt { d, n, blocks } => {
            let blocks = crypto::parse_blocks(&blocks)?;
            writeln!(out, "{}", crypto::rsa_decrypt(d, n, &blocks)?)?;
        }
        RsaCommand::Break {
            public,
            backend,
            seed,
            max_attempts,
        } => {
            let backend = match backend {
                Backend::Quantum => FactorBackend::QuantumSim { seed, max_attempts },
                Backend::Classical => FactorBackend::Classical,
            };
            let k = crypto::break_rsa((public.e, public.n), backend)?;
            writeln!(out, "n = {} x {}", k.p.min(k.q), k.p.max(k.q))?;
            writeln!(out, "d = {}", k.d)?;
        }
    }
    Ok(())
}

fn vernam(out: &mut dyn Write, cmd: VernamCommand) -> Outcome {
    match cmd {
        VernamCommand::Encrypt { text, key } => {
            let plain = crypto::encode_text(&text)?;
            let key = crypto::parse_codes(&key)?;
            let cipher = crypto::vernam_encrypt(&plain, &key)?;
            writeln!(out, "{}", crypto::format_codes(&cipher))?;
        }
        VernamCommand::Decrypt { codes, key } => {
            let cipher = crypto::parse_codes(&codes)?;
            let key = crypto::parse_codes(&key)?;
            let plain = crypto::vernam_decrypt(&cipher, &key)?;
            writeln!(out, "{}", crypto::decode_text(&plain)?)?;
        }
    }
    Ok(())
}

fn decohere_curve(out: &mut dyn Write, gamma_t_max: f64, steps: usize, path: &PathBuf) -> Outcome {
    let points = noise::fidelity_curve(gamma_t_max, steps)?;
    if path.as_os_str() == "-" {
        noise::write_curve_csv(out, &points)?;
    } else {
        let mut file = File::create(path)?;
        noise::write_curve_csv(&mut file, &points)?;
    }
    Ok(())
}
