//! Command-line harness: instance generation, protocol execution,
//! adversarial sweeps, and cost reporting.
//!
//! Exit codes: 0 when the verifier accepts, 1 when it rejects, 2 on a
//! setup error (malformed stream, bad flags).

use crate::basic_protocols::{count_triangles, disjointness};
use crate::gstream::{
    self, emit_stream_file, parse_disj_file, parse_stream_file, Graph, Mode, StreamUpdate,
};
use crate::matching::{
    mcm_bipartite, mcm_general_tutte_berge, mwm_bipartite, mwm_general, tsp_verify,
    MaximalityVariant,
};
use crate::oracles;
use crate::session::{AdversaryStrategy, SessionConfig, Transcript};
use crate::spanning::{bipartiteness, count_components, mst_approx};
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "graphsip",
    about = "Streaming interactive proofs for graph problems",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate an instance stream file.
    Gen {
        /// random | bipartite | metric | fixture | disj
        kind: String,
        #[arg(long, default_value_t = 8)]
        n: usize,
        /// edge probability for random/bipartite kinds
        #[arg(long, default_value_t = 0.5)]
        p: f64,
        /// weight bound (1 = unweighted)
        #[arg(long, default_value_t = 1)]
        max_weight: u64,
        /// fixture name: triangle | two-triangles | k4 | flower
        #[arg(long, default_value = "triangle")]
        name: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// output path (stdout when omitted)
        #[arg(long)]
        out: Option<String>,
    },
    /// Run a protocol session over a stream file.
    Run {
        /// triangles | disj | mcm-bipartite | mwm-bipartite | mwm-general |
        /// mcm-general | components | mst | bipartiteness | tsp
        protocol: String,
        /// stream file (`N`/`E` lines; `X`/`Y` lines for disj)
        input: String,
        /// log | const:GAMMA (default: const:3 for triangles, log
        /// elsewhere)
        #[arg(long)]
        mode: Option<String>,
        /// adversary strategy name (honest when omitted)
        #[arg(long)]
        adversary: Option<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0.1)]
        epsilon: f64,
        /// a | b (Tutte-Berge maximality variant)
        #[arg(long, default_value = "a")]
        maximality: String,
        /// declared weight bound (defaults to the stream maximum)
        #[arg(long)]
        weight_bound: Option<u64>,
        /// write the session transcript as JSON
        #[arg(long)]
        report: Option<String>,
    },
    /// Measure costs against the per-protocol formula over a size range.
    Sweep {
        /// triangles | disj | components | mcm-bipartite
        protocol: String,
        #[arg(long, default_value_t = 4)]
        n_min: usize,
        #[arg(long, default_value_t = 12)]
        n_max: usize,
        #[arg(long, default_value_t = 3)]
        trials: u64,
        #[arg(long, default_value = "log")]
        mode: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<String>,
    },
    /// Compute the brute-force reference answer for an instance.
    Oracle {
        /// triangles | mcm | mwm | components | mst | bipartite | tsp |
        /// tutte-berge | disj
        problem: String,
        input: String,
    },
}

fn parse_mode(s: &str) -> Result<Mode, String> {
    match s {
        "log" => Ok(Mode::LogRound),
        _ => match s.strip_prefix("const:") {
            Some(g) => g
                .parse::<usize>()
                .map(Mode::ConstRound)
                .map_err(|_| format!("bad mode `{s}`")),
            None => Err(format!("bad mode `{s}` (expected log or const:GAMMA)")),
        },
    }
}

fn fixture(name: &str) -> Result<(usize, Vec<StreamUpdate>), String> {
    let weighted = |edges: &[(usize, usize, u64)]| -> Vec<StreamUpdate> {
        edges
            .iter()
            .map(|&(a, b, w)| StreamUpdate::new(a, b, Some(w), 1).unwrap())
            .collect()
    };
    match name {
        "triangle" => Ok((3, weighted(&[(0, 1, 1), (0, 2, 1), (1, 2, 1)]))),
        "two-triangles" => Ok((
            6,
            weighted(&[
                (0, 1, 1),
                (0, 2, 1),
                (1, 2, 1),
                (3, 4, 1),
                (3, 5, 1),
                (4, 5, 1),
            ]),
        )),
        "k4" => Ok((
            4,
            weighted(&[
                (0, 1, 2),
                (0, 2, 1),
                (0, 3, 1),
                (1, 2, 1),
                (1, 3, 1),
                (2, 3, 2),
            ]),
        )),
        "flower" => Ok((
            5,
            weighted(&[
                (0, 1, 2),
                (1, 2, 2),
                (2, 3, 2),
                (3, 4, 2),
                (0, 4, 2),
                (1, 3, 1),
            ]),
        )),
        other => Err(format!("unknown fixture `{other}`")),
    }
}

fn load_stream(path: &str) -> Result<(usize, Vec<StreamUpdate>), String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{path}: {e}"))?;
    parse_stream_file(&text).map_err(|e| e.to_string())
}

/// Dispatches one protocol session. The transcript carries the verdict.
#[allow(clippy::too_many_arguments)]
pub fn run_protocol(
    protocol: &str,
    input_path: &str,
    mode: Mode,
    adversary: Option<AdversaryStrategy>,
    seed: u64,
    epsilon: f64,
    maximality: MaximalityVariant,
    weight_bound: Option<u64>,
) -> Result<Transcript, String> {
    let cfg = SessionConfig {
        seed,
        mode,
        adversary,
    };
    let as_str = |e: gstream::StreamError| e.to_string();
    if protocol == "disj" {
        let text = std::fs::read_to_string(input_path).map_err(|e| e.to_string())?;
        let (n, xs, ys) = parse_disj_file(&text).map_err(as_str)?;
        return disjointness(n, &xs, &ys, &cfg).map_err(as_str);
    }
    let (n, updates) = load_stream(input_path)?;
    let graph = Graph::from_updates(n, &updates).map_err(as_str)?;
    let w_bound = weight_bound.unwrap_or_else(|| graph.max_weight());
    match protocol {
        "triangles" => count_triangles(n, &updates, &cfg).map_err(as_str),
        "mcm-bipartite" => mcm_bipartite(n, &updates, &cfg).map_err(as_str),
        "mwm-bipartite" => mwm_bipartite(n, &updates, w_bound, &cfg).map_err(as_str),
        "mwm-general" => mwm_general(n, &updates, w_bound, &cfg).map_err(as_str),
        "mcm-general" => mcm_general_tutte_berge(n, &updates, maximality, &cfg).map_err(as_str),
        "components" => count_components(n, &updates, &cfg).map_err(as_str),
        "mst" => mst_approx(n, &updates, epsilon, &cfg).map_err(as_str),
        "bipartiteness" => bipartiteness(n, &updates, &cfg).map_err(as_str),
        "tsp" => tsp_verify(n, &updates, epsilon, &cfg).map_err(as_str),
        other => Err(format!("unknown protocol `{other}`")),
    }
}

/// The exact prover-to-verifier polynomial traffic (in field elements)
/// the protocol's sum-check instances produce on an n-vertex instance.
pub fn predicted_poly_elems(protocol: &str, n: usize, mode: Mode) -> Result<u64, String> {
    let per = |radices: &[u64], h_degree: u64, mode: Mode| -> Result<u64, String> {
        let grid = mode.grid(radices).map_err(|e| e.to_string())?;
        Ok(grid.d as u64 * (h_degree * (grid.ell - 1) + 1))
    };
    let n64 = n as u64;
    let mode3 = match mode {
        Mode::LogRound => Mode::LogRound,
        Mode::ConstRound(g) => Mode::ConstRound(g.max(3)),
    };
    match protocol {
        "triangles" => per(&[n64, n64, n64], 3, mode3),
        "disj" => per(&[n64], 2, mode),
        // subset over pairs (degree 2) plus the cover query (degree 3)
        "mcm-bipartite" => Ok(per(&[n64, n64], 2, mode)? + per(&[n64, n64], 3, mode)?),
        // subset over pairs plus labeled-pair maximality (window [-4, 1])
        "components" => Ok(per(&[n64, n64], 2, mode)? + per(&[n64, n64, n64], 5, mode3)?),
        other => Err(format!("no cost formula registered for `{other}`")),
    }
}

fn sweep(
    protocol: &str,
    n_min: usize,
    n_max: usize,
    trials: u64,
    mode: Mode,
    seed: u64,
) -> Result<String, String> {
    let mut csv = String::from(
        "protocol,n,trial,verdict,value,oracle,rounds,poly_elems,predicted_elems,p2v_bits,v2p_bits,space_bits\n",
    );
    for n in n_min..=n_max {
        for trial in 0..trials {
            let inst_seed = seed ^ ((n as u64) << 20) ^ trial;
            let cfg = SessionConfig::with_mode(inst_seed, mode);
            let (tr, value, reference) = match protocol {
                "triangles" => {
                    let updates = gstream::gen_random_graph(n, 0.5, 1, inst_seed);
                    let g = Graph::from_updates(n, &updates).map_err(|e| e.to_string())?;
                    let tr = count_triangles(n, &updates, &cfg).map_err(|e| e.to_string())?;
                    let v = tr.verdict.accepted_count();
                    (tr, v, Some(oracles::oracle_triangles(&g)))
                }
                "disj" => {
                    let (xs, ys) = gstream::gen_disj_pair(n, inst_seed);
                    let tr = disjointness(n, &xs, &ys, &cfg).map_err(|e| e.to_string())?;
                    let v = match tr.verdict {
                        crate::session::Verdict::Accept(crate::session::Value::Bool(b)) => {
                            Some(b as u64)
                        }
                        _ => None,
                    };
                    (tr, v, Some(oracles::oracle_disjoint(&xs, &ys) as u64))
                }
                "components" => {
                    let updates = gstream::gen_random_graph(n, 0.25, 1, inst_seed);
                    let g = Graph::from_updates(n, &updates).map_err(|e| e.to_string())?;
                    let tr = count_components(n, &updates, &cfg).map_err(|e| e.to_string())?;
                    let v = tr.verdict.accepted_count();
                    (tr, v, Some(oracles::oracle_components(&g).len() as u64))
                }
                "mcm-bipartite" => {
                    let updates = gstream::gen_bipartite_graph(n, 0.5, 1, inst_seed);
                    let g = Graph::from_updates(n, &updates).map_err(|e| e.to_string())?;
                    let tr = mcm_bipartite(n, &updates, &cfg).map_err(|e| e.to_string())?;
                    let v = tr.verdict.accepted_count();
                    (tr, v, Some(oracles::oracle_mcm(&g).0))
                }
                other => return Err(format!("sweep does not support `{other}`")),
            };
            let predicted = predicted_poly_elems(protocol, n, mode)?;
            csv.push_str(&format!(
                "{protocol},{n},{trial},{},{},{},{},{},{predicted},{},{},{}\n",
                if tr.verdict.is_accept() {
                    "accept"
                } else {
                    "reject"
                },
                value.map_or_else(|| "-".into(), |v| v.to_string()),
                reference.map_or_else(|| "-".into(), |v| v.to_string()),
                tr.meter.rounds,
                tr.total_round_poly_elems(),
                tr.meter.comm_bits_p2v,
                tr.meter.comm_bits_v2p,
                tr.meter.verifier_space_bits,
            ));
        }
    }
    Ok(csv)
}

fn oracle_answer(problem: &str, input: &str) -> Result<String, String> {
    if problem == "disj" {
        let text = std::fs::read_to_string(input).map_err(|e| e.to_string())?;
        let (_, xs, ys) = parse_disj_file(&text).map_err(|e| e.to_string())?;
        return Ok(format!("{}", oracles::oracle_disjoint(&xs, &ys)));
    }
    let (n, updates) = load_stream(input)?;
    let g = Graph::from_updates(n, &updates).map_err(|e| e.to_string())?;
    Ok(match problem {
        "triangles" => format!("{}", oracles::oracle_triangles(&g)),
        "mcm" => format!("{}", oracles::oracle_mcm(&g).0),
        "mwm" => format!("{}", oracles::oracle_mwm(&g).0),
        "components" => format!("{}", oracles::oracle_components(&g).len()),
        "mst" => match oracles::oracle_mst(&g) {
            Some(w) => format!("{w}"),
            None => "disconnected".to_string(),
        },
        "bipartite" => format!("{}", oracles::oracle_bipartite(&g)),
        "tsp" => format!("{}", oracles::oracle_tsp(&g)),
        "tutte-berge" => {
            let (bound, sep) = oracles::oracle_tutte_berge(&g);
            format!("{bound} separator={sep:?}")
        }
        other => return Err(format!("unknown problem `{other}`")),
    })
}

fn write_or_print(out: Option<&str>, content: &str) -> Result<(), String> {
    match out {
        Some(path) => std::fs::write(path, content).map_err(|e| e.to_string()),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

/// Entry point wrapped by the binary; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            eprint!("{e}");
            return 2;
        }
    };
    match dispatch(cli) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            2
        }
    }
}

fn dispatch(cli: Cli) -> Result<i32, String> {
    match cli.command {
        Command::Gen {
            kind,
            n,
            p,
            max_weight,
            name,
            seed,
            out,
        } => {
            let content = match kind.as_str() {
                "random" => emit_stream_file(n, &gstream::gen_random_graph(n, p, max_weight, seed)),
                "bipartite" => {
                    emit_stream_file(n, &gstream::gen_bipartite_graph(n, p, max_weight, seed))
                }
                "metric" => emit_stream_file(n, &gstream::gen_metric_graph(n, 3 * n as u64, seed)),
                "fixture" => {
                    let (fixture_n, updates) = fixture(&name)?;
                    emit_stream_file(fixture_n, &updates)
                }
                "disj" => {
                    let (xs, ys) = gstream::gen_disj_pair(n, seed);
                    let mut s = format!("N {n}\n");
                    for x in xs {
                        s.push_str(&format!("X {x}\n"));
                    }
                    for y in ys {
                        s.push_str(&format!("Y {y}\n"));
                    }
                    s
                }
                other => return Err(format!("unknown kind `{other}`")),
            };
            write_or_print(out.as_deref(), &content)?;
            Ok(0)
        }
        Command::Run {
            protocol,
            input,
            mode,
            adversary,
            seed,
            epsilon,
            maximality,
            weight_bound,
            report,
        } => {
            let mode = match mode {
                Some(s) => parse_mode(&s)?,
                // triangle counting factors naturally over three rounds
                None if protocol == "triangles" => Mode::ConstRound(3),
                None => Mode::LogRound,
            };
            let adversary = match adversary {
                Some(name) => Some(
                    AdversaryStrategy::parse(&name)
                        .ok_or_else(|| format!("unknown adversary `{name}`"))?,
                ),
                None => None,
            };
            let variant = match maximality.as_str() {
                "a" => MaximalityVariant::A,
                "b" => MaximalityVariant::B,
                other => return Err(format!("unknown maximality variant `{other}`")),
            };
            let tr = run_protocol(
                &protocol,
                &input,
                mode,
                adversary,
                seed,
                epsilon,
                variant,
                weight_bound,
            )?;
            if let Some(path) = report {
                std::fs::write(&path, tr.to_json()).map_err(|e| e.to_string())?;
            }
            match &tr.verdict {
                crate::session::Verdict::Accept(v) => {
                    println!(
                        "accept {v:?} rounds={} p2v_bits={} v2p_bits={} space_bits={}",
                        tr.meter.rounds,
                        tr.meter.comm_bits_p2v,
                        tr.meter.comm_bits_v2p,
                        tr.meter.verifier_space_bits
                    );
                    Ok(0)
                }
                crate::session::Verdict::Reject { stage, reason } => {
                    println!("reject at {stage}: {reason}");
                    Ok(1)
                }
            }
        }
        Command::Sweep {
            protocol,
            n_min,
            n_max,
            trials,
            mode,
            seed,
            out,
        } => {
            let mode = parse_mode(&mode)?;
            let csv = sweep(&protocol, n_min, n_max, trials, mode, seed)?;
            write_or_print(out.as_deref(), &csv)?;
            Ok(0)
        }
        Command::Oracle { problem, input } => {
            println!("{}", oracle_answer(&problem, &input)?);
            Ok(0)
        }
    }
}
