//! `rlk`: every stage of the pipeline as a subcommand with JSON input and output.
//!
//! Exit status: 0 success, 1 negative result (with certificate), 2 usage error
//! or malformed input, 3 budget exceeded.

mod commands;
mod io;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

#[derive(Parser)]
#[command(name = "rlk", version, about = "Bowtie-free graphs, their lifts and partite Ramsey constructions")]
struct Cli {
    /// Worker threads for the parallel searches; outputs do not depend on it.
    #[arg(long, global = true, default_value_t = 1)]
    threads: usize,
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct Input {
    /// JSON input file, `-` for standard input.
    #[arg(long = "in")]
    input: PathBuf,
}

#[derive(Args)]
struct CatalogueArg {
    /// Catalogue JSON; built in memory when absent.
    #[arg(long, env = "RLK_CATALOGUE")]
    catalogue: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Bowtie detection.
    Bowtie {
        #[command(subcommand)]
        cmd: BowtieCmd,
    },
    /// Goodness, completion and decomposition.
    Good {
        #[command(subcommand)]
        cmd: GoodCmd,
    },
    /// Admissible orders.
    Order {
        #[command(subcommand)]
        cmd: OrderCmd,
    },
    /// Expansions, shadows and reduced structures.
    Lift {
        #[command(subcommand)]
        cmd: LiftCmd,
    },
    /// Pair-type catalogue.
    Catalogue {
        #[command(subcommand)]
        cmd: CatalogueCmd,
    },
    /// Membership of complete structures.
    Member {
        #[command(subcommand)]
        cmd: MemberCmd,
    },
    /// Free amalgams of good graphs over centres, or of lifts.
    Amalgamate {
        #[command(subcommand)]
        cmd: AmalgamateCmd,
    },
    /// Random finite lift grown by one-point extensions.
    Generic {
        #[arg(long, default_value_t = 10)]
        steps: usize,
        #[arg(long, default_value_t = 24)]
        size_cap: usize,
        #[arg(long, default_value_t = rlk::membership::DEFAULT_MAX_CENTRE_E1)]
        max_centre_e1: usize,
    },
    /// Partite systems: the grid construction and the Partite Construction.
    Partite {
        #[command(subcommand)]
        cmd: PartiteCmd,
    },
    /// Exhaustive arrow checks.
    Arrow {
        #[command(subcommand)]
        cmd: ArrowCmd,
    },
    /// Hales-Jewett numbers by exhaustive search.
    Hj {
        #[arg(long)]
        t: usize,
        #[arg(long)]
        r: usize,
        #[arg(long)]
        cap: usize,
    },
    /// Completes a reduced structure with untyped pairs.
    Complete {
        #[command(flatten)]
        input: Input,
        /// Structure whose copies must cover the input.
        #[arg(long)]
        a: Option<PathBuf>,
    },
    /// Minimal good extensions and their order gadgets.
    Gadgets {
        #[command(flatten)]
        input: Input,
    },
}

#[derive(Subcommand)]
enum BowtieCmd {
    Check(Input),
}

#[derive(Subcommand)]
enum GoodCmd {
    Complete(Input),
    Check(Input),
    Decompose(Input),
}

#[derive(Subcommand)]
enum OrderCmd {
    /// Checks the order carried by the input graph.
    Check(Input),
    /// Adds an admissible order to a good graph.
    Make {
        #[command(flatten)]
        input: Input,
        /// Random admissible order from `--seed` instead of the default one.
        #[arg(long)]
        random: bool,
    },
}

#[derive(Subcommand)]
enum LiftCmd {
    L1(Input),
    L2(Input),
    Shadow(Input),
    Reduce(Input),
    Unreduce(Input),
}

#[derive(Subcommand)]
enum CatalogueCmd {
    Build {
        #[arg(long, default_value_t = rlk::membership::DEFAULT_MAX_CENTRE_E1)]
        max_centre_e1: usize,
        /// Writes the catalogue here and prints a summary instead.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum MemberCmd {
    Check {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        catalogue: CatalogueArg,
    },
}

#[derive(Subcommand)]
enum AmalgamateCmd {
    /// Identifies centres of two good graphs.
    Centres {
        #[arg(long)]
        g1: PathBuf,
        #[arg(long)]
        g2: PathBuf,
        /// JSON list of `[x, y]` pairs identifying `x` in g1 with `y` in g2.
        #[arg(long)]
        map: String,
    },
    /// Amalgamates two structures over a common substructure.
    Lifts {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b1: PathBuf,
        #[arg(long)]
        b2: PathBuf,
        /// JSON list: vertex `i` of a goes to `e1[i]` in b1.
        #[arg(long)]
        e1: String,
        #[arg(long)]
        e2: String,
    },
}

#[derive(Subcommand)]
enum PartiteCmd {
    /// Grid system of dimension `n` over a partite system `b`.
    Build {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        #[arg(long)]
        n: usize,
    },
    /// Pictures over the copies of `a` in `c0`.
    Construct {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        #[arg(long)]
        c0: PathBuf,
        #[arg(long, default_value_t = 5_000)]
        max_vertices: usize,
        #[arg(long, default_value_t = 64)]
        max_pictures: usize,
        #[arg(long, default_value_t = 3)]
        hj_cap: usize,
        #[command(flatten)]
        catalogue: CatalogueArg,
    },
}

#[derive(Subcommand)]
enum ArrowCmd {
    /// `c -> (b)^a_2`; partite inputs restrict to part-preserving copies of `b`.
    Verify {
        #[arg(long)]
        c: PathBuf,
        #[arg(long)]
        b: PathBuf,
        #[arg(long)]
        a: PathBuf,
        /// Largest number of colourings to enumerate.
        #[arg(long, default_value_t = 1 << 20)]
        cap: u64,
    },
}

fn dispatch(cli: Cli) -> io::Outcome {
    use commands as c;
    let seed = cli.seed;
    match cli.cmd {
        Cmd::Bowtie { cmd: BowtieCmd::Check(i) } => c::bowtie_check(&i.input),
        Cmd::Good { cmd } => match cmd {
            GoodCmd::Complete(i) => c::good_complete(&i.input),
            GoodCmd::Check(i) => c::good_check(&i.input),
            GoodCmd::Decompose(i) => c::good_decompose(&i.input),
        },
        Cmd::Order { cmd } => match cmd {
            OrderCmd::Check(i) => c::order_check(&i.input),
            OrderCmd::Make { input, random } => c::order_make(&input.input, random.then_some(seed)),
        },
        Cmd::Lift { cmd } => match cmd {
            LiftCmd::L1(i) => c::lift(&i.input, false),
            LiftCmd::L2(i) => c::lift(&i.input, true),
            LiftCmd::Shadow(i) => c::shadow(&i.input),
            LiftCmd::Reduce(i) => c::reduce(&i.input),
            LiftCmd::Unreduce(i) => c::unreduce(&i.input),
        },
        Cmd::Catalogue {
            cmd: CatalogueCmd::Build { max_centre_e1, out },
        } => c::catalogue_build(max_centre_e1, out.as_deref()),
        Cmd::Member {
            cmd: MemberCmd::Check { input, catalogue },
        } => c::member_check(&input.input, catalogue.catalogue.as_deref()),
        Cmd::Amalgamate { cmd } => match cmd {
            AmalgamateCmd::Centres { g1, g2, map } => c::amalgamate_centres(&g1, &g2, &map),
            AmalgamateCmd::Lifts { a, b1, b2, e1, e2 } => c::amalgamate_lifts(&a, &b1, &b2, &e1, &e2),
        },
        Cmd::Generic {
            steps,
            size_cap,
            max_centre_e1,
        } => c::generic(steps, seed, size_cap, max_centre_e1),
        Cmd::Partite { cmd } => match cmd {
            PartiteCmd::Build { a, b, n } => c::partite_build(&a, &b, n),
            PartiteCmd::Construct {
                a,
                b,
                c0,
                max_vertices,
                max_pictures,
                hj_cap,
                catalogue,
            } => c::partite_construct(
                &a,
                &b,
                &c0,
                rlk::ramsey::Budget {
                    max_vertices,
                    max_pictures,
                    hj_cap,
                },
                catalogue.catalogue.as_deref(),
            ),
        },
        Cmd::Arrow {
            cmd: ArrowCmd::Verify { c: cc, b, a, cap },
        } => c::arrow_verify(&cc, &b, &a, cap),
        Cmd::Hj { t, r, cap } => c::hj(t, r, cap),
        Cmd::Complete { input, a } => c::complete(&input.input, a.as_deref()),
        Cmd::Gadgets { input } => c::gadgets(&input.input),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(cli.threads.max(1)).build_global() {
        eprintln!("rlk: {e}");
        return ExitCode::from(2);
    }
    let (code, body) = match dispatch(cli) {
        Ok(r) => (r.code, r.body),
        Err(f) => (f.code, json!({ "error": f.message })),
    };
    let text = serde_json::to_string_pretty(&body).expect("values serialise");
    // A closed pipe is not an error of the computation.
    let _ = writeln!(std::io::stdout().lock(), "{text}");
    ExitCode::from(code)
}
