//! Batch CLI over the similarity backends and the evaluation pipeline.
//!
//! Exit codes: 0 success, 1 configuration or parse failure, 2 unknown word
//! at query time.

use clap::{Parser, Subcommand};
use semsim::config::{RunConfig, CONFIG_ENV_VAR};
use semsim::evaluation::{
    pairwise_similarity, sweep, ConceptSet, JcnBackend, LsaBackend, ReferenceAlignment,
    ReportMetadata, SimilarityBackend, WupBackend,
};
use semsim::infocontent::{count_frequencies, IcTable};
use semsim::lsa::{self, DocumentCollection, LatentSpace, Weighting};
use semsim::taxonomy::Taxonomy;
use semsim::wordnet;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "semsim", version, about = "Semantic similarity toolkit")]
struct Cli {
    /// Config file (key=value); defaults to $SEMSIM_CONFIG when set.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Random seed override (SVD initialization).
    #[arg(long, global = true)]
    seed: Option<u64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the similarity of two concept labels under one measure.
    Sim {
        /// Measure: wup, jcn or lsa.
        measure: String,
        label1: String,
        label2: String,
    },
    /// Run the threshold-sweep evaluation and write CSV+JSON reports.
    Eval {
        set_a: PathBuf,
        set_b: PathBuf,
        reference: PathBuf,
        /// Comma-separated measures, e.g. wup,jcn,lsa.
        #[arg(long, default_value = "wup")]
        measures: String,
        /// Output directory for report files.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Train a latent space from a corpus and persist it.
    TrainLsa {
        corpus: PathBuf,
        out: PathBuf,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        weighting: Option<Weighting>,
    },
    /// Build an information-content table from a corpus and persist it.
    BuildIc { corpus: PathBuf, out: PathBuf },
    /// Parse WordNet files and dump taxonomy statistics.
    ParseWordnet { index: PathBuf, data: PathBuf },
}

enum CliError {
    /// Configuration, IO or parse failure → exit 1.
    Config(String),
    /// Unknown word / out-of-vocabulary at query time → exit 2.
    UnknownWord(String),
}

impl CliError {
    fn config(e: impl std::fmt::Display) -> CliError {
        CliError::Config(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Config(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(1)
        }
        Err(CliError::UnknownWord(message)) => {
            eprintln!("unknown word: {message}");
            ExitCode::from(2)
        }
    }
}

fn load_config(cli_config: &Option<PathBuf>, seed: Option<u64>) -> Result<RunConfig, CliError> {
    let path = cli_config
        .clone()
        .or_else(|| std::env::var(CONFIG_ENV_VAR).ok().map(PathBuf::from));
    let mut config = match path {
        Some(p) => RunConfig::from_file(&p).map_err(CliError::config)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = seed {
        config.seed = seed;
    }
    Ok(config)
}

fn load_taxonomy(config: &RunConfig) -> Result<Taxonomy, CliError> {
    if let Some(path) = &config.taxonomy_simple {
        return wordnet::load_simple_taxonomy(path).map_err(CliError::config);
    }
    if let (Some(index), Some(data)) = (&config.wordnet_index, &config.wordnet_data) {
        return wordnet::load_wordnet(index, data).map_err(CliError::config);
    }
    Err(CliError::Config(
        "no taxonomy configured (set taxonomy.simple or taxonomy.wordnet.*)".to_string(),
    ))
}

fn load_corpus(path: &Path) -> Result<DocumentCollection, CliError> {
    if path.is_dir() {
        DocumentCollection::from_dir(path).map_err(CliError::config)
    } else {
        DocumentCollection::from_single_file(path).map_err(CliError::config)
    }
}

fn build_ic_table(config: &RunConfig, taxonomy: &Taxonomy) -> Result<IcTable, CliError> {
    let corpus_path = config.ic_corpus.as_ref().ok_or_else(|| {
        CliError::Config("jcn requires ic.corpus in the config".to_string())
    })?;
    let corpus = load_corpus(corpus_path)?;
    let tokens = corpus.all_tokens();
    let ft = count_frequencies(taxonomy, &tokens);
    if ft.is_smoothing_only() {
        eprintln!("warning: no corpus token resolved in the taxonomy; IC table is smoothing-only");
    }
    Ok(IcTable::build(
        &ft,
        &taxonomy.checksum(),
        &lsa::corpus_checksum(&corpus),
    ))
}

fn train_lsa_space(config: &RunConfig) -> Result<LatentSpace, CliError> {
    let corpus_path = config.lsa_corpus.as_ref().ok_or_else(|| {
        CliError::Config("lsa requires lsa.corpus in the config".to_string())
    })?;
    let corpus = load_corpus(corpus_path)?;
    let matrix = lsa::build_matrix(&corpus, config.lsa_weighting).map_err(CliError::config)?;
    // clamp the default k to what the corpus can support
    let max_k = matrix.vocabulary.len().min(matrix.doc_ids.len());
    let k = config.lsa_k.min(max_k.saturating_sub(1).max(1));
    lsa::train(&matrix, k, config.seed, &lsa::corpus_checksum(&corpus)).map_err(CliError::config)
}

fn query_error(measure: &str, message: String) -> CliError {
    let lower = message.to_lowercase();
    if lower.contains("unknown word") || lower.contains("no in-vocabulary") {
        CliError::UnknownWord(message)
    } else {
        CliError::Config(format!("{measure}: {message}"))
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let config = load_config(&cli.config, cli.seed)?;
    match cli.command {
        Command::Sim {
            measure,
            label1,
            label2,
        } => cmd_sim(&config, &measure, &label1, &label2),
        Command::Eval {
            set_a,
            set_b,
            reference,
            measures,
            out,
        } => cmd_eval(&config, &set_a, &set_b, &reference, &measures, out),
        Command::TrainLsa {
            corpus,
            out,
            k,
            weighting,
        } => cmd_train_lsa(&config, &corpus, &out, k, weighting),
        Command::BuildIc { corpus, out } => cmd_build_ic(&config, &corpus, &out),
        Command::ParseWordnet { index, data } => cmd_parse_wordnet(&index, &data),
    }
}

fn cmd_sim(
    config: &RunConfig,
    measure: &str,
    label1: &str,
    label2: &str,
) -> Result<(), CliError> {
    let score = match measure {
        "wup" => {
            let taxonomy = load_taxonomy(config)?;
            taxonomy
                .word_similarity_wup(label1, label2)
                .map_err(|e| query_error("wup", e.to_string()))?
        }
        "jcn" => {
            let taxonomy = load_taxonomy(config)?;
            let table = build_ic_table(config, &taxonomy)?;
            table
                .word_similarity_jcn(&taxonomy, label1, label2)
                .map_err(|e| query_error("jcn", e.to_string()))?
        }
        "lsa" => {
            let space = train_lsa_space(config)?;
            space
                .similarity(label1, label2)
                .map_err(|e| query_error("lsa", e.to_string()))?
        }
        other => {
            return Err(CliError::Config(format!(
                "unknown measure {other:?} (expected wup, jcn or lsa)"
            )))
        }
    };
    println!("{score:.6}");
    Ok(())
}

fn cmd_eval(
    config: &RunConfig,
    set_a_path: &Path,
    set_b_path: &Path,
    reference_path: &Path,
    measures: &str,
    out: Option<PathBuf>,
) -> Result<(), CliError> {
    let set_a = ConceptSet::from_file(set_a_path).map_err(CliError::config)?;
    let set_b = ConceptSet::from_file(set_b_path).map_err(CliError::config)?;
    let reference = ReferenceAlignment::from_file(reference_path).map_err(CliError::config)?;
    reference
        .validate_against(&set_a, &set_b)
        .map_err(CliError::config)?;

    let out_dir = out.unwrap_or_else(|| config.output_dir.clone());
    std::fs::create_dir_all(&out_dir).map_err(CliError::config)?;

    let requested: Vec<&str> = measures.split(',').map(|m| m.trim()).collect();
    let mut summary: Vec<(String, f64, f64)> = Vec::new();

    // Backends hold references; build the shared state up front.
    let needs_taxonomy = requested.iter().any(|m| *m == "wup" || *m == "jcn");
    let taxonomy = if needs_taxonomy {
        Some(load_taxonomy(config)?)
    } else {
        None
    };
    let ic_table = if requested.contains(&"jcn") {
        Some(build_ic_table(config, taxonomy.as_ref().unwrap())?)
    } else {
        None
    };
    let space = if requested.contains(&"lsa") {
        Some(train_lsa_space(config)?)
    } else {
        None
    };

    for measure in requested {
        let backend: Box<dyn SimilarityBackend> = match measure {
            "wup" => Box::new(WupBackend(taxonomy.as_ref().unwrap())),
            "jcn" => Box::new(JcnBackend {
                taxonomy: taxonomy.as_ref().unwrap(),
                ic_table: ic_table.as_ref().unwrap(),
            }),
            "lsa" => {
                let space = space.as_ref().unwrap();
                Box::new(LsaBackend {
                    space,
                    space_id: space.corpus_checksum.clone(),
                })
            }
            other => {
                return Err(CliError::Config(format!("unknown measure {other:?}")))
            }
        };

        let matrix = pairwise_similarity(&set_a, &set_b, backend.as_ref());
        let metadata = ReportMetadata {
            measure: backend.tag(),
            set_a: set_a.domain_name.clone(),
            set_b: set_b.domain_name.clone(),
            normalization: match measure {
                "jcn" => "jcn=1/(1+distance) log=nat smoothing=add1".to_string(),
                "lsa" => "cosine in [-1,1], label=mean of token vectors".to_string(),
                _ => "wup=2*depth(lcs)/(depth(a)+depth(b))".to_string(),
            },
            taxonomy_checksum: taxonomy.as_ref().map(|t| t.checksum()),
            corpus_checksum: ic_table
                .as_ref()
                .map(|t| t.corpus_ref().to_string())
                .or_else(|| space.as_ref().map(|s| s.corpus_checksum.clone())),
            lsa_k: space.as_ref().map(|s| s.k),
            lsa_weighting: space.as_ref().map(|s| s.weighting.clone()),
            seed: Some(config.seed),
            missing_pairs: matrix.missing().len(),
            timestamp: Some(now_iso8601()),
        };
        let report =
            sweep(&matrix, &reference, &config.sweep, metadata).map_err(CliError::config)?;

        let file_tag = measure.to_string();
        let csv_path = out_dir.join(format!("report_{file_tag}.csv"));
        let json_path = out_dir.join(format!("report_{file_tag}.json"));
        report.write_csv(&csv_path).map_err(CliError::config)?;
        report.write_json(&json_path).map_err(CliError::config)?;

        if let Some(best) = report.best_f_row() {
            summary.push((backend.tag(), best.threshold, best.f_measure));
        }
    }

    println!("measure\tbest_threshold\tbest_f");
    for (tag, threshold, f) in summary {
        println!("{tag}\t{threshold:.6}\t{f:.6}");
    }
    Ok(())
}

fn cmd_train_lsa(
    config: &RunConfig,
    corpus_path: &Path,
    out_path: &Path,
    k: Option<usize>,
    weighting: Option<Weighting>,
) -> Result<(), CliError> {
    let mut config = config.clone();
    config.lsa_corpus = Some(corpus_path.to_path_buf());
    if let Some(k) = k {
        if k == 0 {
            return Err(CliError::Config("k must be positive".to_string()));
        }
        config.lsa_k = k;
    }
    if let Some(w) = weighting {
        config.lsa_weighting = w;
    }
    let space = train_lsa_space(&config)?;
    space.save(out_path).map_err(CliError::config)?;
    let top: Vec<String> = space
        .singular_values
        .iter()
        .take(5)
        .map(|s| format!("{s:.6}"))
        .collect();
    println!(
        "k={} vocabulary={} top_singular_values={}",
        space.k,
        space.vocabulary_size(),
        top.join(",")
    );
    Ok(())
}

fn cmd_build_ic(config: &RunConfig, corpus_path: &Path, out_path: &Path) -> Result<(), CliError> {
    let mut config = config.clone();
    config.ic_corpus = Some(corpus_path.to_path_buf());
    let taxonomy = load_taxonomy(&config)?;
    let table = build_ic_table(&config, &taxonomy)?;
    table.save(out_path).map_err(CliError::config)?;
    println!("synsets={} taxonomy={}", taxonomy.len(), table.taxonomy_ref());
    Ok(())
}

fn cmd_parse_wordnet(index: &Path, data: &Path) -> Result<(), CliError> {
    let taxonomy = wordnet::load_wordnet(index, data).map_err(CliError::config)?;
    let max_depth = taxonomy
        .synsets()
        .filter_map(|s| taxonomy.depth(&s.id).ok())
        .max()
        .unwrap_or(0);
    println!(
        "synsets={} lemmas={} root={} max_depth={} checksum={}",
        taxonomy.len(),
        taxonomy.lemma_index().len(),
        taxonomy.root(),
        max_depth,
        taxonomy.checksum()
    );
    Ok(())
}

fn now_iso8601() -> String {
    // Seconds since epoch; a full date formatter is not worth a dependency
    // for a provenance field.
    let secs = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    format!("unix:{secs}")
}
