//! `cnr`: command-line front end for the compression-and-randomisation cipher.

mod config;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use cnr_core::cipher::{self, naive, wire, SessionHeader};
use cnr_core::codec::{self, Codebook, CommandCompressor};
use cnr_core::keystore::{self, KeySource, PersistentPool};
use cnr_core::verify::{self, Budget, CodeKind, MessageChoice, Observable, Scheme};
use cnr_core::{BigRational, Error, KeyPool};

use config::{CodecChoice, RngMode, SessionConfig};

/// Exit status when a verification or bound check fails.
const EXIT_CHECK_FAILED: u8 = 3;

#[derive(Parser)]
#[command(name = "cnr", version, about = "Compression-and-randomisation perfect cipher")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a one-time-pad key pool.
    Keygen {
        /// Pool size in bits.
        #[arg(long)]
        bits: usize,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        rng: RngArgs,
    },
    /// Build a codebook from a message-space definition.
    BuildCode {
        #[arg(long)]
        space: PathBuf,
        /// huffman | trimmed-huffman | external:<command>
        #[arg(long)]
        codec: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Encrypt one message file into a session file.
    Encrypt {
        #[command(flatten)]
        session: SessionArgs,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        rng: RngArgs,
        /// Omit the random padding. Leaks the message length; demo only.
        #[arg(long)]
        naive_leak_demo: bool,
    },
    /// Decrypt a session file.
    Decrypt {
        #[command(flatten)]
        session: SessionArgs,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Check perfect secrecy exactly, or statistically when too large.
    Verify {
        #[command(flatten)]
        model: ModelArgs,
        /// Verify the unpadded variant instead. Demo only.
        #[arg(long)]
        naive_leak_demo: bool,
        #[arg(long, default_value_t = Budget::default().max_l)]
        max_l: usize,
        #[arg(long, default_value_t = Budget::default().max_messages)]
        max_messages: usize,
        /// Encryptions for the statistical fallback.
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        #[command(flatten)]
        rng: RngArgs,
        /// Print the machine-readable report instead of the table.
        #[arg(long)]
        structured: bool,
    },
    /// Entropy, code-length bounds and length leakage of a codebook.
    Report {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        structured: bool,
    },
    /// Show a key pool's cursor and consumption history.
    Audit {
        #[arg(long)]
        key: PathBuf,
    },
}

#[derive(Args)]
struct SessionArgs {
    #[arg(long)]
    code: PathBuf,
    /// Key pool file; relative names resolve against CNR_KEY_DIR when set.
    #[arg(long)]
    key: PathBuf,
    /// Expected codec label of the codebook.
    #[arg(long)]
    codec: Option<String>,
}

#[derive(Args)]
struct ModelArgs {
    #[arg(long)]
    code: PathBuf,
    #[arg(long)]
    space: PathBuf,
    #[arg(long)]
    codec: Option<String>,
}

#[derive(Args)]
struct RngArgs {
    /// os | seeded:<u64>
    #[arg(long, default_value = "os")]
    rng: String,
    /// Permit seeded randomness for keys and pads.
    #[arg(long)]
    insecure_test: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            let kind = e
                .downcast_ref::<Error>()
                .map(Error::kind)
                .or_else(|| e.downcast_ref::<config::CliError>().map(|c| c.kind))
                .unwrap_or("Error");
            eprintln!("error kind={kind} message={:?}", format!("{e:#}"));
            ExitCode::FAILURE
        }
    }
}

fn warn_naive() {
    eprintln!("**************************************************************");
    eprintln!("* WARNING: naive mode, no random padding. Ciphertext length  *");
    eprintln!("* reveals the codeword length. Not secure. Demo use only.    *");
    eprintln!("**************************************************************");
}

fn run(command: Command) -> anyhow::Result<u8> {
    match command {
        Command::Keygen { bits, out, rng } => {
            let mode = RngMode::parse(&rng.rng, rng.insecure_test)?;
            let out = config::resolve_key_path(&out);
            let pool = keystore::generate_pool(bits, &mut *mode.source())?;
            PersistentPool::create(&out, pool.clone())?;
            println!("pool {} bits {} cursor {} -> {}", pool.id(), pool.len(), pool.cursor(), out.display());
            Ok(0)
        }

        Command::BuildCode { space, codec, out } => {
            let choice = CodecChoice::parse(&codec)?;
            let space = config::load_space(&space)?;
            let code = match &choice {
                CodecChoice::Huffman => codec::build_huffman(&space)?,
                CodecChoice::TrimmedHuffman => {
                    codec::trim_code(&codec::build_huffman(&space)?, &space)?
                }
                CodecChoice::External(cmd) => {
                    codec::wrap_external(&CommandCompressor::new(cmd)?, &space)?
                }
            };
            let book = Codebook::new(choice.label(), code);
            fs::write(&out, book.to_text())?;
            println!(
                "codebook {} messages {} l {} -> {}",
                book.codec,
                book.code.len(),
                book.code.max_len(),
                out.display()
            );
            Ok(0)
        }

        Command::Encrypt {
            session,
            input,
            out,
            rng,
            naive_leak_demo,
        } => {
            let cfg = SessionConfig::new(session.code, Some(session.key), session.codec);
            let book = cfg.load_codebook()?;
            let mut pool = cfg.open_pool()?;
            let message = fs::read(&input)?;
            let mode = RngMode::parse(&rng.rng, rng.insecure_test)?;
            let mut pad_rng = mode.source();
            let bytes = if naive_leak_demo {
                warn_naive();
                let bits = naive::encrypt_unpadded(&message, &book.code, &mut pool)?;
                let header = SessionHeader {
                    code_fingerprint: book.code.fingerprint(),
                    l: bits.len() as u32,
                };
                let c = cipher::Ciphertext::from_bits(bits);
                wire::write_session(&header, &[c], &mut *pad_rng)?
            } else {
                let rec = cipher::encrypt(&message, &book.code, &mut pool, &mut *pad_rng)?;
                eprintln!(
                    "encrypted with {} key bits (pool {} range {}..{}), l = {}",
                    rec.key_bits_used,
                    rec.pool_id,
                    rec.key_range.start,
                    rec.key_range.end,
                    rec.ciphertext.len()
                );
                let header = SessionHeader::for_code(&book.code);
                wire::write_session(&header, &[rec.ciphertext], &mut *pad_rng)?
            };
            fs::write(&out, bytes)?;
            Ok(0)
        }

        Command::Decrypt { session, input, out } => {
            let cfg = SessionConfig::new(session.code, Some(session.key), session.codec);
            let book = cfg.load_codebook()?;
            let mut pool = cfg.open_pool()?;
            let (header, frames) = wire::read_session(&fs::read(&input)?)?;
            header.check(&book.code)?;
            let mut plain = Vec::new();
            for c in &frames {
                plain.extend_from_slice(cipher::decrypt(c, &book.code, &mut pool)?);
            }
            fs::write(&out, plain)?;
            eprintln!("decrypted {} frame(s), pool cursor {}", frames.len(), pool.cursor());
            Ok(0)
        }

        Command::Verify {
            model,
            naive_leak_demo,
            max_l,
            max_messages,
            trials,
            rng,
            structured,
        } => {
            let cfg = SessionConfig::new(model.code, None, model.codec);
            let book = cfg.load_codebook()?;
            let space = config::load_space(&model.space)?;
            let budget = Budget { max_l, max_messages };
            let scheme = if naive_leak_demo {
                warn_naive();
                Scheme::Unpadded
            } else {
                Scheme::Padded
            };
            match verify::exact_secrecy_oracle(&space, &book.code, scheme, budget) {
                Ok(report) => {
                    if structured {
                        print!("{}", report.to_structured_text());
                    } else {
                        println!("{report}");
                    }
                    if scheme == Scheme::Padded {
                        let same = verify::key_discipline_equivalence(&space, &book.code, budget)?;
                        println!("key-discipline-equivalence {same}");
                    }
                    println!("{}", report.verdict);
                    Ok(if report.is_perfect() { 0 } else { EXIT_CHECK_FAILED })
                }
                Err(Error::EnumerationTooLarge(why)) if scheme == Scheme::Padded => {
                    eprintln!("exact enumeration skipped ({why}); running chi-square test");
                    let mode = RngMode::parse(&rng.rng, rng.insecure_test)?;
                    let mut key_rng = mode.source();
                    let mut pad_rng = mode.derived(1);
                    let report = verify::empirical_uniformity(
                        &space,
                        &book.code,
                        MessageChoice::Drawn,
                        trials,
                        &mut *key_rng,
                        &mut *pad_rng,
                    )?;
                    print!("{}", report.to_structured_text());
                    if report.rejects(0.01) {
                        println!("NONUNIFORM");
                        Ok(EXIT_CHECK_FAILED)
                    } else {
                        println!("UNIFORM");
                        Ok(0)
                    }
                }
                Err(e) => Err(e.into()),
            }
        }

        Command::Report {
            model,
            structured,
        } => {
            let cfg = SessionConfig::new(model.code, None, model.codec);
            let book = cfg.load_codebook()?;
            let space = config::load_space(&model.space)?;
            let bounds = verify::bound_report(&space, &book.code, CodeKind::from_label(&book.codec))?;
            let naive_leak =
                verify::leak_mutual_information(&space, &book.code, Observable::UnpaddedLength)?;
            let padded_leak =
                verify::leak_mutual_information(&space, &book.code, Observable::CiphertextLength)?;
            let cost: BigRational = cipher::key_cost(&space, &book.code)?;
            if structured {
                print!("{}", bounds.to_structured_text());
                print!("{}", naive_leak.to_structured_text());
                print!("{}", padded_leak.to_structured_text());
            } else {
                print!("{bounds}");
                println!(
                    "key cost        {:.6} bits/message",
                    cnr_core::scalar::ratio_to_f64(&cost)
                );
                println!("I(M; unpadded length)   {:.6} bits", naive_leak.mutual_information);
                println!("I(M; ciphertext length) {:.6} bits", padded_leak.mutual_information);
            }
            Ok(if bounds.all_hold() { 0 } else { EXIT_CHECK_FAILED })
        }

        Command::Audit { key } => {
            let path = config::resolve_key_path(&key);
            let pool = KeyPool::load(&path)?;
            println!("pool      {}", pool.id());
            println!("length    {}", pool.len());
            println!("cursor    {}", pool.cursor());
            println!("remaining {}", pool.remaining());
            for line in keystore::read_history(&path)? {
                println!("{line}");
            }
            Ok(0)
        }
    }
}
