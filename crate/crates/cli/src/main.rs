//! Command-line surface for the dacshund toolkit: DAC map enumeration,
//! greedy batch search, key generation, group-action evaluation, shared-key
//! derivation, benchmarking, and parameter-file validation.
//!
//! Exit codes: 0 success, 1 validation/search failure, 2 usage error.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Mutex;

use clap::{Args, Parser, Subcommand};

use dacshund::action::{
    build_parameter_set, derive_crossover, derive_shared, group_action, keygen,
    validate_public_curve, wire_decode, wire_encode, ParameterSet, WombatKey,
};
use dacshund::batching::{
    cost_estimate, search_single_b, BatchConfig, CostEstimate, CostModel, SearchStep,
};
use dacshund::dac::{enumerate_dacs, DacshundMap};
use dacshund::field::{Field, OpCounts};
use dacshund::Error;

#[derive(Parser)]
#[command(
    name = "dacshund",
    version,
    about = "dummy-free CSIDH-style group-action toolkit"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate compressed DACs and write the per-prime length map.
    Dacmap(DacmapArgs),
    /// Greedy search for DACsHUND-valid batch configurations.
    Search(SearchArgs),
    /// Derive a key deterministically from a seed.
    Keygen(KeygenArgs),
    /// Apply a key to a public curve.
    Action(ActionArgs),
    /// Validate a peer curve and derive the shared secret.
    Derive(DeriveArgs),
    /// Measure group-action operation counts across keys.
    Bench(BenchArgs),
    /// Re-validate a parameter-set file (and optionally a public key).
    Validate(ValidateArgs),
}

#[derive(Args)]
struct DacmapArgs {
    /// Maximum compressed chain length to enumerate.
    #[arg(long, default_value_t = 16)]
    max_len: u32,
    /// Largest prime target to record.
    #[arg(long, default_value_t = 600)]
    max_prime: u64,
    /// Output path for the map file.
    #[arg(long, default_value = "dacmap.txt")]
    out: PathBuf,
}

#[derive(Args)]
struct SearchArgs {
    /// Inline prime list, e.g. "11,13,17,19".
    #[arg(long, value_delimiter = ',')]
    primes: Vec<u64>,
    /// File with whitespace/comma separated primes.
    #[arg(long)]
    primes_file: Option<PathBuf>,
    /// Primes to drop from the list, e.g. "3,5,7".
    #[arg(long, value_delimiter = ',')]
    skip_primes: Vec<u64>,
    #[arg(long, default_value_t = 1)]
    batches_min: usize,
    #[arg(long, default_value_t = 8)]
    batches_max: usize,
    /// Key-space target in bits.
    #[arg(long)]
    target_bits: u64,
    /// DAC enumeration bound for the map.
    #[arg(long, default_value_t = 16)]
    max_len: u32,
    /// Exponent of 2 in p + 1 for the emitted field.
    #[arg(long, default_value_t = 2)]
    field_f: u32,
    /// Largest odd cofactor tried by the primality search.
    #[arg(long, default_value_t = 99999)]
    g_max: u64,
    /// Force the Vélu/√élu crossover instead of deriving it.
    #[arg(long)]
    crossover: Option<u64>,
    /// Name recorded in the parameter set.
    #[arg(long)]
    name: Option<String>,
    /// Parameter-set output path.
    #[arg(long, default_value = "params.txt")]
    out: PathBuf,
    /// Search report output path.
    #[arg(long, default_value = "report.tsv")]
    report: PathBuf,
    /// Checkpoint file: completed batch counts are skipped on re-runs.
    #[arg(long)]
    resume: Option<PathBuf>,
    /// Worker threads for the per-batch-count searches.
    #[arg(long, default_value_t = 1)]
    threads: usize,
}

#[derive(Args)]
struct KeygenArgs {
    #[arg(long)]
    params: PathBuf,
    /// Seed string (hashed; any length).
    #[arg(long)]
    seed: String,
    #[arg(long, default_value = "key.txt")]
    out: PathBuf,
}

#[derive(Args)]
struct ActionArgs {
    #[arg(long)]
    params: PathBuf,
    #[arg(long)]
    key: PathBuf,
    /// Input public key file (wire format); the base curve A = 0 if omitted.
    #[arg(long = "in")]
    input: Option<PathBuf>,
    #[arg(long, default_value = "public.pk")]
    out: PathBuf,
}

#[derive(Args)]
struct DeriveArgs {
    #[arg(long)]
    params: PathBuf,
    #[arg(long)]
    key: PathBuf,
    /// Peer public key file (wire format).
    #[arg(long = "in")]
    input: PathBuf,
    /// Optional binary output; hex goes to stdout either way.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long)]
    params: PathBuf,
    /// Number of distinct keys to evaluate.
    #[arg(long, default_value_t = 100)]
    trials: u32,
    /// Base seed for the per-trial keys.
    #[arg(long, default_value = "bench")]
    seed: String,
    /// Report output path (stdout always gets a copy).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ValidateArgs {
    #[arg(long)]
    params: PathBuf,
    /// Optional public key file to validate against the parameter set.
    #[arg(long)]
    public_key: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Dacmap(a) => cmd_dacmap(a),
        Command::Search(a) => cmd_search(a),
        Command::Keygen(a) => cmd_keygen(a),
        Command::Action(a) => cmd_action(a),
        Command::Derive(a) => cmd_derive(a),
        Command::Bench(a) => cmd_bench(a),
        Command::Validate(a) => cmd_validate(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn cmd_dacmap(a: DacmapArgs) -> Result<(), Error> {
    let map = enumerate_dacs(a.max_len, a.max_prime)?;
    fs::write(&a.out, map.to_text())?;
    let count = map.primes().count();
    println!("wrote {} primes to {}", count, a.out.display());
    for l in [3u64, 5, 11, 13, 17, 19] {
        if let Ok(lens) = map.lengths(l) {
            let lens: Vec<String> = lens.iter().map(|v| v.to_string()).collect();
            println!("  {l}: {{{}}}", lens.join(","));
        }
    }
    Ok(())
}

// ---- search --------------------------------------------------------------

type BOutcome = Option<(BatchConfig, CostEstimate, Vec<SearchStep>)>;

fn cmd_search(a: SearchArgs) -> Result<(), Error> {
    let mut primes = a.primes.clone();
    if let Some(path) = &a.primes_file {
        let text = fs::read_to_string(path)?;
        for tok in text.split(|c: char| c.is_whitespace() || c == ',') {
            if !tok.is_empty() {
                primes.push(
                    tok.parse()
                        .map_err(|_| Error::Format(format!("bad prime {tok:?}")))?,
                );
            }
        }
    }
    primes.retain(|l| !a.skip_primes.contains(l));
    primes.sort_unstable();
    primes.dedup();
    if primes.is_empty() {
        return Err(Error::Parameter("no primes to search over".into()));
    }

    let max_prime = *primes.last().unwrap();
    let map = enumerate_dacs(a.max_len, max_prime)?;
    let crossover = a.crossover.unwrap_or_else(|| derive_crossover(&primes, 2));
    let model = CostModel {
        crossover,
        two_exponent: a.field_f,
        g_bits: 1,
        npush: 2,
    };

    let b_min = a.batches_min.max(1);
    let b_max = a.batches_max.min(primes.len());
    let fingerprint = search_fingerprint(&primes, a.target_bits, b_min, b_max, crossover);
    let mut done: BTreeMap<usize, BOutcome> = BTreeMap::new();
    if let Some(path) = &a.resume {
        if path.exists() {
            done = load_checkpoint(path, &fingerprint, &primes)?;
            println!("resumed {} completed batch counts", done.len());
        } else {
            fs::write(path, format!("# dacshund checkpoint {fingerprint}\n"))?;
        }
    }

    let todo: Vec<usize> = (b_min..=b_max).filter(|b| !done.contains_key(b)).collect();
    let results = run_searches(&todo, &primes, &map, a.target_bits, &model, a.threads)?;
    for (b, outcome) in results {
        if let Some(path) = &a.resume {
            append_checkpoint(path, b, &outcome)?;
        }
        done.insert(b, outcome);
    }

    // estimates may come from checkpoints; recompute uniformly
    let mut best: Option<(usize, BatchConfig, CostEstimate)> = None;
    for (b, outcome) in &done {
        let Some((cfg, _, _)) = outcome else { continue };
        let est = cost_estimate(cfg, &map, &model)?;
        let better = match &best {
            None => true,
            Some((bb, _, be)) => (est.total, *b) < (be.total, *bb),
        };
        if better {
            best = Some((*b, cfg.clone(), est));
        }
    }
    let Some((best_b, config, estimate)) = best else {
        return Err(Error::SearchFailure(format!(
            "no valid configuration in {b_min}..={b_max} batches at {} bits",
            a.target_bits
        )));
    };

    let name = a
        .name
        .clone()
        .unwrap_or_else(|| format!("search-{}p-{}b", primes.len(), a.target_bits));
    println!(
        "best: {} batches, {} isogenies, model cost {}",
        best_b, estimate.isogeny_count, estimate.total
    );
    println!(
        "searching field cofactor (p = 2^{} * g * prod - 1)...",
        a.field_f
    );
    let params = build_parameter_set(&name, config, a.field_f, a.g_max, Some(crossover))?;
    fs::write(&a.out, params.to_text())?;
    println!("wrote parameter set to {}", a.out.display());

    let report = search_report(&name, &a.skip_primes, &params, &map, &model)?;
    fs::write(&a.report, &report)?;
    println!("wrote report to {}", a.report.display());
    Ok(())
}

fn run_searches(
    todo: &[usize],
    primes: &[u64],
    map: &DacshundMap,
    target_bits: u64,
    model: &CostModel,
    threads: usize,
) -> Result<Vec<(usize, BOutcome)>, Error> {
    if threads <= 1 || todo.len() <= 1 {
        let mut out = Vec::new();
        for &b in todo {
            out.push((b, search_single_b(b, primes, map, target_bits, model)?));
        }
        return Ok(out);
    }
    let next = Mutex::new(0usize);
    let results: Mutex<Vec<(usize, Result<BOutcome, Error>)>> = Mutex::new(Vec::new());
    std::thread::scope(|scope| {
        for _ in 0..threads.min(todo.len()) {
            scope.spawn(|| loop {
                let b = {
                    let mut idx = next.lock().unwrap();
                    if *idx >= todo.len() {
                        break;
                    }
                    let b = todo[*idx];
                    *idx += 1;
                    b
                };
                let r = search_single_b(b, primes, map, target_bits, model);
                results.lock().unwrap().push((b, r));
            });
        }
    });
    let mut collected = results.into_inner().unwrap();
    collected.sort_by_key(|(b, _)| *b);
    let mut out = Vec::new();
    for (b, r) in collected {
        out.push((b, r?));
    }
    Ok(out)
}

fn search_fingerprint(primes: &[u64], target: u64, bmin: usize, bmax: usize, xover: u64) -> String {
    use sha2::{Digest, Sha256};
    let mut h = Sha256::new();
    for l in primes {
        h.update(l.to_be_bytes());
    }
    h.update(target.to_be_bytes());
    h.update((bmin as u64).to_be_bytes());
    h.update((bmax as u64).to_be_bytes());
    h.update(xover.to_be_bytes());
    let d = h.finalize();
    d.iter().take(8).map(|b| format!("{b:02x}")).collect()
}

fn append_checkpoint(path: &Path, b: usize, outcome: &BOutcome) -> Result<(), Error> {
    let line = match outcome {
        None => format!("b={b} none\n"),
        Some((cfg, est, _)) => {
            let join = |it: Vec<String>| it.join(",");
            format!(
                "b={b} cost={} sizes={} bounds={} dac_lens={}\n",
                est.total,
                join(cfg.sizes.iter().map(|v| v.to_string()).collect()),
                join(cfg.bounds.iter().map(|v| v.to_string()).collect()),
                join(cfg.dac_lens.iter().map(|v| v.to_string()).collect()),
            )
        }
    };
    use std::io::Write;
    let mut f = fs::OpenOptions::new().append(true).open(path)?;
    f.write_all(line.as_bytes())?;
    Ok(())
}

fn load_checkpoint(
    path: &Path,
    fingerprint: &str,
    primes: &[u64],
) -> Result<BTreeMap<usize, BOutcome>, Error> {
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines();
    let head = lines.next().unwrap_or("");
    let expect = format!("# dacshund checkpoint {fingerprint}");
    if head.trim() != expect {
        return Err(Error::Format(
            "checkpoint belongs to a different search (inputs changed)".into(),
        ));
    }
    let mut done = BTreeMap::new();
    for line in lines {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let mut fields: BTreeMap<&str, &str> = BTreeMap::new();
        for tok in line.split_whitespace() {
            match tok.split_once('=') {
                Some((k, v)) => {
                    fields.insert(k, v);
                }
                None if tok == "none" => {
                    fields.insert("none", "");
                }
                None => return Err(Error::Format(format!("bad checkpoint token {tok:?}"))),
            }
        }
        let b: usize = fields
            .get("b")
            .and_then(|v| v.parse().ok())
            .ok_or_else(|| Error::Format("checkpoint line missing b=".into()))?;
        if fields.contains_key("none") {
            done.insert(b, None);
            continue;
        }
        let parse_list = |key: &str| -> Result<Vec<u64>, Error> {
            fields
                .get(key)
                .ok_or_else(|| Error::Format(format!("checkpoint missing {key}=")))?
                .split(',')
                .map(|t| {
                    t.parse::<u64>()
                        .map_err(|_| Error::Format(format!("bad checkpoint value {t:?}")))
                })
                .collect()
        };
        let sizes: Vec<usize> = parse_list("sizes")?.iter().map(|&v| v as usize).collect();
        let bounds: Vec<usize> = parse_list("bounds")?.iter().map(|&v| v as usize).collect();
        let dac_lens: Vec<u32> = parse_list("dac_lens")?.iter().map(|&v| v as u32).collect();
        let cfg = BatchConfig {
            primes: primes.to_vec(),
            sizes,
            bounds,
            dac_lens,
        };
        done.insert(b, Some((cfg, zero_estimate(), Vec::new())));
    }
    Ok(done)
}

/// Checkpoint rows carry configurations only; estimates are recomputed on
/// load so the files stay small and model-version agnostic.
fn zero_estimate() -> CostEstimate {
    CostEstimate {
        total: 0,
        per_batch: Vec::new(),
        isogeny_count: 0,
    }
}

fn search_report(
    name: &str,
    skipped: &[u64],
    params: &ParameterSet,
    map: &DacshundMap,
    model: &CostModel,
) -> Result<String, Error> {
    let est = cost_estimate(&params.config, map, model)?;
    let skipped_s = if skipped.is_empty() {
        "-".to_string()
    } else {
        skipped
            .iter()
            .map(|l| l.to_string())
            .collect::<Vec<_>>()
            .join(",")
    };
    let mut s = String::new();
    s.push_str("variant\tskipped\tbatches\tisogenies\tcost\tkeyspace_bits\n");
    s.push_str(&format!(
        "{name}\t{skipped_s}\t{}\t{}\t{}\t{}\n",
        params.config.batch_count(),
        est.isogeny_count,
        est.total,
        params.keyspace().bits
    ));
    s.push_str("batch\tprimes\tm\tdac_len\tbs\tgs\tcost\n");
    for i in 0..params.config.batch_count() {
        let ps: Vec<String> = params
            .config
            .batch_primes(i)
            .iter()
            .map(|l| l.to_string())
            .collect();
        s.push_str(&format!(
            "{i}\t{}\t{}\t{}\t{}\t{}\t{}\n",
            ps.join(" "),
            params.config.bounds[i],
            params.config.dac_lens[i],
            params.sqrt_params[i].bs,
            params.sqrt_params[i].gs,
            est.per_batch[i]
        ));
    }
    Ok(s)
}

// ---- key handling ----------------------------------------------------------

fn load_params(path: &Path) -> Result<ParameterSet, Error> {
    let text = fs::read_to_string(path)?;
    ParameterSet::from_text(&text)
}

fn cmd_keygen(a: KeygenArgs) -> Result<(), Error> {
    let params = load_params(&a.params)?;
    let key = keygen(a.seed.as_bytes(), &params)?;
    fs::write(&a.out, key.to_text(&params))?;
    println!("wrote key to {}", a.out.display());
    Ok(())
}

fn cmd_action(a: ActionArgs) -> Result<(), Error> {
    let params = load_params(&a.params)?;
    let key = WombatKey::from_text(&fs::read_to_string(&a.key)?, &params)?;
    let field = Field::new(params.field.clone());
    let start = match &a.input {
        None => field.zero(),
        Some(path) => {
            let bytes = fs::read(path)?;
            field.fe_from(wire_decode(&params, &bytes)?)
        }
    };
    let out = group_action(&field, &start, &key, &params)?;
    fs::write(&a.out, wire_encode(&params, &out))?;
    let c = field.counts();
    println!(
        "wrote public key to {} ({}M {}S {}A)",
        a.out.display(),
        c.mul,
        c.sqr,
        c.add
    );
    Ok(())
}

fn cmd_derive(a: DeriveArgs) -> Result<(), Error> {
    let params = load_params(&a.params)?;
    let key = WombatKey::from_text(&fs::read_to_string(&a.key)?, &params)?;
    let field = Field::new(params.field.clone());
    let bytes = fs::read(&a.input)?;
    let peer = field.fe_from(wire_decode(&params, &bytes)?);
    let shared = derive_shared(&field, &peer, &key, &params)?;
    let hex: String = shared.iter().map(|b| format!("{b:02x}")).collect();
    println!("{hex}");
    if let Some(out) = &a.out {
        fs::write(out, &shared)?;
    }
    Ok(())
}

fn cmd_bench(a: BenchArgs) -> Result<(), Error> {
    let params = load_params(&a.params)?;
    let base = Field::new(params.field.clone());
    let mut reference: Option<(OpCounts, BTreeMap<String, OpCounts>)> = None;
    for trial in 0..a.trials {
        let seed = format!("{}-{trial}", a.seed);
        let key = keygen(seed.as_bytes(), &params)?;
        let field = base.fork();
        group_action(&field, &field.zero(), &key, &params)?;
        let counts = field.counts();
        let labels = field.labeled_totals();
        match &reference {
            None => reference = Some((counts, labels)),
            Some((rc, rl)) => {
                if *rc != counts || *rl != labels {
                    return Err(Error::EvaluationIntegrity(format!(
                        "operation counts differ across keys: {rc:?} vs {counts:?}"
                    )));
                }
            }
        }
    }
    let (counts, labels) = reference.expect("at least one trial");
    let report = bench_report(&params.name, a.trials, &counts, &labels);
    print!("{report}");
    if let Some(out) = &a.out {
        fs::write(out, &report)?;
    }
    Ok(())
}

fn bench_report(
    name: &str,
    trials: u32,
    counts: &OpCounts,
    labels: &BTreeMap<String, OpCounts>,
) -> String {
    let mut s = String::new();
    s.push_str("variant\ttrials\tM\tS\tA\tfp_mults\n");
    s.push_str(&format!(
        "{name}\t{trials}\t{}\t{}\t{}\t{}\n",
        counts.mul,
        counts.sqr,
        counts.add,
        counts.fp_mults()
    ));
    s.push_str("label\tM\tS\tA\tfp_mults\n");
    for (label, c) in labels {
        s.push_str(&format!(
            "{label}\t{}\t{}\t{}\t{}\n",
            c.mul,
            c.sqr,
            c.add,
            c.fp_mults()
        ));
    }
    s
}

fn cmd_validate(a: ValidateArgs) -> Result<(), Error> {
    let params = load_params(&a.params)?;
    println!(
        "parameter set {:?}: {} primes, {} batches, keyspace {} bits",
        params.name,
        params.field.primes.len(),
        params.config.batch_count(),
        params.keyspace().bits
    );
    if let Some(pk) = &a.public_key {
        let bytes = fs::read(pk)?;
        let field = Field::new(params.field.clone());
        let v = field.fe_from(wire_decode(&params, &bytes)?);
        if !validate_public_curve(&field, &v, &params) {
            return Err(Error::InvalidPublicKey(format!(
                "{} is not a curve in the supersingular family",
                pk.display()
            )));
        }
        println!("public key {} validates", pk.display());
    }
    Ok(())
}
