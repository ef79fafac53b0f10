use std::fs;
use std::io::{BufWriter, Write};
use std::net::TcpListener;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use p3search::bench::{self, BenchConfig};
use p3search::client::{self, User};
use p3search::corpus::{zipf_corpus, Corpus};
use p3search::formats::{
    docs_from_bytes, docs_to_bytes, params_to_bytes, read_owner_keys, read_params, write_owner_keys, PARAMS_FILE,
};
use p3search::owner::{build, generate_keys, EtaChoice, Owner};
use p3search::server::Server;
use p3search::transport::{serve, Endpoint, TcpEndpoint};
use p3search::wire::{Frame, Kind, QueryResponse};
use p3search::{Error, Result};
use p3search_core::{PhraseQuery, SecureIndex};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

const INDEX_FILE: &str = "index.bin";
const DOCS_FILE: &str = "docs.bin";

/// Phrase search over an encrypted index.
#[derive(Parser)]
#[command(name = "p3search", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate owner keys and public parameters into a directory.
    Keygen {
        /// Bit length of each group order prime.
        #[arg(long, default_value_t = 32)]
        tau: u32,
        #[arg(long, default_value_t = 8)]
        dim: usize,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Encrypt a directory of text files into an index and document set.
    BuildIndex {
        #[arg(long)]
        keys: PathBuf,
        #[arg(long)]
        corpus: PathBuf,
        /// `median` or a fixed list length.
        #[arg(long, default_value = "median")]
        eta: EtaChoice,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Upload a built index and its documents to a server.
    Publish {
        #[arg(long)]
        server: String,
        /// Directory written by build-index.
        #[arg(long)]
        index: PathBuf,
    },
    /// Write a trapdoor for a phrase.
    Trapdoor {
        #[arg(long)]
        keys: PathBuf,
        #[arg(long)]
        phrase: String,
        #[arg(long)]
        conjunctive: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Send a trapdoor file to a server and print the encrypted ids.
    Query {
        #[arg(long)]
        server: String,
        #[arg(long)]
        trapdoor: PathBuf,
    },
    /// Run the server or owner role on a TCP address.
    Serve {
        #[arg(long, value_enum)]
        role: Role,
        #[arg(long, default_value = "127.0.0.1:7370")]
        listen: String,
        /// Owner key directory; owner role only.
        #[arg(long)]
        keys: Option<PathBuf>,
    },
    /// Search as a user: trapdoor from the owner, query to the server.
    Search {
        #[arg(long)]
        server: String,
        #[arg(long)]
        owner: String,
        #[arg(long)]
        phrase: String,
        #[arg(long)]
        conjunctive: bool,
        /// Print document bodies after the ids.
        #[arg(long)]
        show: bool,
    },
    /// Precision and timing benchmark against the plaintext oracle.
    Bench {
        /// Directory of text files; a Zipf corpus is generated when absent.
        #[arg(long)]
        corpus: Option<PathBuf>,
        #[arg(long, default_value_t = 200)]
        zipf_docs: usize,
        #[arg(long, value_delimiter = ',', default_value = "2,3,4,5")]
        lengths: Vec<usize>,
        #[arg(long, default_value_t = 50)]
        queries: usize,
        #[arg(long, default_value_t = 20)]
        reps: usize,
        #[arg(long, default_value = "median")]
        eta: EtaChoice,
        /// Corpus prefixes to index, e.g. 50,100,200.
        #[arg(long, value_delimiter = ',')]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 32)]
        tau: u32,
        #[arg(long, default_value_t = 8)]
        dim: usize,
        #[arg(long)]
        jsonl: Option<PathBuf>,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Role {
    Server,
    Owner,
}

enum Failure {
    Usage(String),
    Invariant(String),
    Other(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Usage(m) => Failure::Usage(m),
            e => Failure::Other(e),
        }
    }
}

impl From<p3search_core::Error> for Failure {
    fn from(e: p3search_core::Error) -> Self {
        Failure::Other(e.into())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Other(e.into())
    }
}

fn rng_from(seed: Option<u64>) -> ChaCha20Rng {
    match seed {
        Some(s) => ChaCha20Rng::seed_from_u64(s),
        None => ChaCha20Rng::from_entropy(),
    }
}

fn listen(addr: &str) -> Result<TcpListener> {
    let listener = TcpListener::bind(addr)?;
    println!("listening on {}", listener.local_addr()?);
    std::io::stdout().flush()?;
    Ok(listener)
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent)?;
    }
    Ok(fs::write(path, bytes)?)
}

fn run(command: Command) -> std::result::Result<(), Failure> {
    match command {
        Command::Keygen { tau, dim, out, seed } => {
            let keys = generate_keys(tau, dim, &mut rng_from(seed))?;
            write_owner_keys(&out, &keys)?;
            let params = keys.master.public_params();
            let digest: String = params.digest().iter().map(|b| format!("{b:02x}")).collect();
            println!("wrote keys to {} (params {digest})", out.display());
        }
        Command::BuildIndex { keys, corpus, eta, out, seed } => {
            let keys = read_owner_keys(&keys)?;
            let corpus = Corpus::load_dir(&corpus)?;
            let published = build(&keys, &corpus, eta, &mut rng_from(seed))?;
            let params = keys.master.public_params();
            fs::create_dir_all(&out)?;
            let index_bytes = published.index.to_bytes(params.group());
            write_file(&out.join(INDEX_FILE), &index_bytes)?;
            write_file(&out.join(DOCS_FILE), &docs_to_bytes(&published.docs))?;
            write_file(&out.join(PARAMS_FILE), &params_to_bytes(&params))?;
            println!(
                "indexed {} documents: {} keywords, {} lists of {} entries, {} bytes, {:.1?}",
                corpus.len(),
                published.keywords,
                published.index.lists.len(),
                published.eta,
                index_bytes.len(),
                published.build_time
            );
        }
        Command::Publish { server, index } => {
            let params = read_params(&index)?;
            let idx = SecureIndex::from_bytes(&fs::read(index.join(INDEX_FILE))?, params.group())?;
            let docs = docs_from_bytes(&fs::read(index.join(DOCS_FILE))?)?;
            client::publish(&TcpEndpoint::connect(&server)?, &params, &idx, &docs)?;
            println!("published {} lists and {} documents", idx.lists.len(), docs.len());
        }
        Command::Trapdoor { keys, phrase, conjunctive, out } => {
            let keys = read_owner_keys(&keys)?;
            let query = PhraseQuery::parse(&phrase)?;
            let t = p3search_core::gen_trapdoor(&keys.master, &query, conjunctive, &mut ChaCha20Rng::from_entropy())?;
            write_file(&out, &t.to_bytes(keys.master.bgn_pk().params()))?;
        }
        Command::Query { server, trapdoor } => {
            let frame = Frame::new(Kind::Query, fs::read(trapdoor)?);
            let reply = TcpEndpoint::connect(&server)?.call(&frame)?;
            let response = QueryResponse::parse(&reply.expect(Kind::QueryResult)?.payload)?;
            for id in response.result.matches {
                println!("{id:016x}");
            }
        }
        Command::Serve { role, listen: addr, keys } => match role {
            Role::Server => {
                if keys.is_some() {
                    return Err(Failure::Usage("the server role takes no keys".into()));
                }
                serve(listen(&addr)?, Arc::new(Server::new()))?;
            }
            Role::Owner => {
                let Some(keys) = keys else {
                    return Err(Failure::Usage("the owner role needs --keys".into()));
                };
                let owner = Owner::new(read_owner_keys(&keys)?, ChaCha20Rng::from_entropy());
                serve(listen(&addr)?, Arc::new(owner))?;
            }
        },
        Command::Search { server, owner, phrase, conjunctive, show } => {
            let owner = TcpEndpoint::connect(&owner)?;
            let server = TcpEndpoint::connect(&server)?;
            let outcome = User::new(&owner, &server).search(&phrase, conjunctive)?;
            for d in &outcome.docs {
                println!("{}", d.doc_id);
                if show {
                    println!("{}\n", String::from_utf8_lossy(&d.body));
                }
            }
            eprintln!(
                "{} matches, {} returned ids, {} pairings",
                outcome.docs.len(),
                outcome.enc_matches.len(),
                outcome.stats.pairings
            );
        }
        Command::Bench { corpus, zipf_docs, lengths, queries, reps, eta, sizes, seed, tau, dim, jsonl, csv } => {
            let corpus = match corpus {
                Some(dir) => Corpus::load_dir(&dir)?,
                None => zipf_corpus(seed, zipf_docs, 2000, 40, 200),
            };
            let cfg = BenchConfig {
                lengths,
                queries_per_length: queries,
                repetitions: reps,
                eta,
                seed,
                tau,
                dim,
                sizes,
                phrases: None,
            };
            let report = bench::run(&corpus, &cfg)?;
            if let Some(path) = jsonl {
                report.write_jsonl(BufWriter::new(fs::File::create(path)?))?;
            }
            match csv {
                Some(path) => report.write_csv(BufWriter::new(fs::File::create(path)?))?,
                None => report.write_csv(std::io::stdout().lock())?,
            }
            if !report.violations.is_empty() {
                return Err(Failure::Invariant(report.violations.join("\n")));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Invariant(m)) => {
            eprintln!("invariant violated:\n{m}");
            ExitCode::from(2)
        }
        Err(Failure::Other(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(3)
        }
    }
}
