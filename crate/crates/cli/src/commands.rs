//! Subcommand bodies. Each returns a report; `Err` is a usage or format error.

use std::path::Path;

use num_bigint::BigInt;
use num_rational::BigRational;

use liftkit::compose::{compose_block, composed_clause_count, ComposeOptions, CompositionManifest};
use liftkit::formula::{write_dimacs, BlockPartialAssignment, BlockStructure, CnfFormula};
use liftkit::gadget::GadgetParams;
use liftkit::lab::fourier::{check_fourier_bound, find_uniform_selector};
use liftkit::lab::partition::restore_partition;
use liftkit::lab::round::{round_lemma_find, RoundThresholds};
use liftkit::lab::simplex::{bob_cleanup, verify_cleanup, CleanupConfig, CleanupShape, OrderedSimplex};
use liftkit::lab::structured::{ProductBox, StructureThresholds};
use liftkit::lab::{FiniteDistribution, LabError, Real};
use liftkit::lift::{lift_dag_refutation, lift_tree_refutation, lifted_tree_outputs, LiftOptions};
use liftkit::oracle::{min_block_width, min_depth, min_relation_depth, min_tree_size, min_width, OracleError, Outcome};
use liftkit::proof::cp::{verify_cp, CpMode, CpProof};
use liftkit::proof::dag::{verify_decision_dag, ConjunctionDag};
use liftkit::proof::protocol::{format_rational, parse_rational, RealProtocol};
use liftkit::proof::resolution::{verify_resolution, ResolutionProof};
use liftkit::relation::{CnfRelation, ComposedRelation};
use liftkit::sim::{protocol_from_tree, simulate_protocol, verify_protocol_solves, SimConfig, SimShape};
use liftkit::tree::{verify_cnf_tree, DecisionTree};

use crate::report::{artifact_path, bits_string, list, par_map, read_cnf, read_text, write_atomic, CmdResult, Report, UsageError};
use crate::{
    CleanupArgs, Cli, Command, ComposeArgs, EntropyArgs, FourierArgs, LiftDagArgs, LiftTreeArgs, Measure, MeasureArgs, Mode,
    OracleArgs, PartitionArgs, Regime, RoundArgs, SimulateArgs, VerifyCpArgs, VerifyDagArgs, VerifyResArgs,
};

/// Largest packed row set the round command enumerates.
const MAX_ROUND_ROWS: usize = 1 << 20;

pub fn run(cli: &Cli) -> CmdResult {
    let out = cli.out_dir.as_deref();
    match &cli.command {
        Command::Compose(a) => compose(a, out),
        Command::VerifyRes(a) => verify_res(a),
        Command::VerifyCp(a) => verify_cp_cmd(a),
        Command::VerifyDag(a) => verify_dag(a),
        Command::Measure(a) => measure(a, cli.jobs),
        Command::Oracle(a) => oracle(a, out),
        Command::LiftDag(a) => lift_dag(a, out),
        Command::LiftTree(a) => lift_tree(a, out),
        Command::Entropy(a) => entropy(a),
        Command::Partition(a) => partition(a),
        Command::Round(a) => round(a),
        Command::Cleanup(a) => cleanup(a),
        Command::Simulate(a) => simulate(a, cli.jobs),
        Command::Fourier(a) => fourier(a),
    }
}

fn load_blocks(path: Option<&Path>, formula: &CnfFormula) -> Result<BlockStructure, UsageError> {
    match path {
        Some(p) => {
            let b = BlockStructure::from_sidecar(&read_text(p)?)?;
            if b.var_count() != formula.var_count() {
                return Err(UsageError(format!(
                    "block structure covers {} variables, formula has {}",
                    b.var_count(),
                    formula.var_count()
                )));
            }
            Ok(b)
        }
        None => Ok(BlockStructure::singletons(formula.var_count())),
    }
}

fn rational(s: &str) -> Result<BigRational, UsageError> {
    Ok(parse_rational(s)?)
}

/// `sqrt-m` or a rational.
fn sqrt_m_or_rational(s: &str, m: usize) -> Result<Real, UsageError> {
    if s == "sqrt-m" {
        Ok(Real::root(BigRational::from_integer(BigInt::from(m)), 2))
    } else {
        Ok(Real::rat(rational(s)?))
    }
}

fn opt(v: Option<usize>) -> String {
    v.map_or_else(|| "none".into(), |v| v.to_string())
}

fn compose(a: &ComposeArgs, out: Option<&Path>) -> CmdResult {
    let f = read_cnf(&a.cnf)?;
    let blocks = load_blocks(a.blocks.as_deref(), &f)?;
    let params = GadgetParams::round_up(a.m, blocks.block_size())?;
    let expected = composed_clause_count(&f, &blocks, params.m());
    let c = compose_block(&f, &blocks, params.m(), ComposeOptions { clause_budget: a.clause_budget })?;
    let cnf_path = artifact_path(out, &a.cnf, ".lifted.cnf");
    let manifest_path = artifact_path(out, &a.cnf, ".manifest.json");
    write_atomic(&cnf_path, &write_dimacs(&c.formula))?;
    write_atomic(&manifest_path, &c.manifest(f.len()).to_json())?;
    let mut r = Report::new("compose");
    r.kv("requested_m", a.m)
        .kv("m", params.m())
        .kv("ell", params.ell())
        .kv("blocks", blocks.block_count())
        .kv("source_vars", f.var_count())
        .kv("source_clauses", f.len())
        .kv("vars", c.formula.var_count())
        .kv("clauses", c.formula.len())
        .kv("expected_clauses", expected.map_or_else(|| "overflow".into(), |n| n.to_string()))
        .kv("cnf", cnf_path.display())
        .kv("manifest", manifest_path.display());
    r.require(expected == Some(c.formula.len() as u128));
    Ok(r)
}

fn verify_res(a: &VerifyResArgs) -> CmdResult {
    let f = read_cnf(&a.cnf)?;
    let proof = ResolutionProof::parse(&read_text(&a.proof)?)?;
    let blocks = match &a.blocks {
        Some(p) => Some(load_blocks(Some(p), &f)?),
        None => None,
    };
    let mut r = Report::new("verify-res");
    r.kv("tree_like", proof.tree_like);
    match verify_resolution(&f, &proof, blocks.as_ref()) {
        Ok(m) => {
            r.kv("valid", true)
                .kv("length", m.length)
                .kv("width", m.width)
                .kv("block_width", opt(m.block_width))
                .kv("depth", opt(m.depth));
        }
        Err(e) => {
            r.kv("valid", false).fail(e);
        }
    }
    Ok(r)
}

fn verify_cp_cmd(a: &VerifyCpArgs) -> CmdResult {
    let f = read_cnf(&a.cnf)?;
    let proof = CpProof::parse(&read_text(&a.proof)?)?;
    let mode = match a.mode {
        Mode::Syntactic => CpMode::Syntactic,
        Mode::Semantic => CpMode::Semantic,
    };
    let mut r = Report::new("verify-cp");
    r.kv("mode", format!("{:?}", a.mode).to_lowercase()).kv("support_cap", a.support_cap);
    match verify_cp(&f, &proof, mode, a.support_cap) {
        Ok(m) => {
            r.kv("valid", true).kv("length", m.length).kv("depth", opt(m.depth)).kv("max_coeff_bits", m.max_coeff_bits);
        }
        Err(e) => {
            r.kv("valid", false).fail(e);
        }
    }
    Ok(r)
}

fn verify_dag(a: &VerifyDagArgs) -> CmdResult {
    let f = read_cnf(&a.cnf)?;
    let dag = ConjunctionDag::parse(&read_text(&a.dag)?)?;
    let mut r = Report::new("verify-dag");
    let result = match &a.manifest {
        Some(p) => {
            let manifest = CompositionManifest::from_json(&read_text(p)?)?;
            let layout = manifest.layout()?;
            if layout.blocks().var_count() != f.var_count() {
                return Err(UsageError("manifest does not match the source formula".into()));
            }
            r.kv("relation", "composed").kv("m", layout.params().m()).kv("ell", layout.params().ell());
            verify_decision_dag(&ComposedRelation::new(&f, &layout), &dag, a.support_cap)
        }
        None => {
            r.kv("relation", "source");
            verify_decision_dag(&CnfRelation::new(&f), &dag, a.support_cap)
        }
    };
    match result {
        Ok(m) => {
            r.kv("valid", true).kv("size", m.size).kv("depth", m.depth).kv("width", m.width);
        }
        Err(e) => {
            r.kv("valid", false).fail(e);
        }
    }
    Ok(r)
}

fn measure_name(m: Measure) -> &'static str {
    match m {
        Measure::Depth => "depth",
        Measure::TreeSize => "tree_size",
        Measure::Width => "width",
        Measure::BlockWidth => "block_width",
        Measure::RelationDepth => "relation_depth",
    }
}

fn as_u64<T>(r: Result<T, OracleError>, f: impl FnOnce(T) -> usize) -> Result<u64, OracleError> {
    r.map(|v| f(v) as u64)
}

/// The value and, where one exists, a witness tree.
fn compute(m: Measure, f: &CnfFormula, blocks: &BlockStructure) -> (Outcome, Option<DecisionTree<u32, usize>>) {
    match m {
        Measure::Depth => match min_depth(f) {
            Ok(w) => (Outcome::Value(w.value as u128), Some(w.tree)),
            Err(e) => (Err::<u64, _>(e).into(), None),
        },
        Measure::TreeSize => match min_tree_size(f) {
            Ok(w) => (Outcome::Value(w.value as u128), Some(w.tree)),
            Err(e) => (Err::<u64, _>(e).into(), None),
        },
        Measure::Width => (as_u64(min_width(f), |(w, _)| w).into(), None),
        Measure::BlockWidth => (as_u64(min_block_width(f, blocks), |(w, _)| w).into(), None),
        Measure::RelationDepth => match min_relation_depth(&CnfRelation::new(f)) {
            Ok(d) => (Outcome::Value(d.depth as u128), Some(d.tree)),
            Err(e) => (Err::<u64, _>(e).into(), None),
        },
    }
}

fn measure(a: &MeasureArgs, jobs: usize) -> CmdResult {
    let f = read_cnf(&a.cnf)?;
    let blocks = load_blocks(a.blocks.as_deref(), &f)?;
    let all = [Measure::Depth, Measure::TreeSize, Measure::Width, Measure::BlockWidth, Measure::RelationDepth];
    let outcomes = par_map(&all, jobs, |&m| compute(m, &f, &blocks).0);
    let mut r = Report::new("measure");
    r.kv("vars", f.var_count()).kv("clauses", f.len()).kv("blocks", blocks.block_count());
    for (m, o) in all.iter().zip(outcomes) {
        r.kv(measure_name(*m), o);
    }
    Ok(r)
}

fn oracle(a: &OracleArgs, out: Option<&Path>) -> CmdResult {
    let f = read_cnf(&a.cnf)?;
    let blocks = load_blocks(a.blocks.as_deref(), &f)?;
    let (outcome, tree) = compute(a.measure, &f, &blocks);
    if let Outcome::Skipped(why) = &outcome {
        return Err(UsageError(why.clone()));
    }
    let mut r = Report::new("oracle");
    r.kv(measure_name(a.measure), &outcome);
    if a.witness {
        match tree {
            Some(t) => {
                let path = artifact_path(out, &a.cnf, &format!(".{}.tree", measure_name(a.measure)));
                write_atomic(&path, &t.to_preorder())?;
                r.kv("witness", path.display());
            }
            None => {
                r.kv("witness", "none");
            }
        }
    }
    Ok(r)
}

fn lift_dag(a: &LiftDagArgs, out: Option<&Path>) -> CmdResult {
    let f = read_cnf(&a.cnf)?;
    let blocks = load_blocks(a.blocks.as_deref(), &f)?;
    let params = GadgetParams::round_up(a.m, blocks.block_size())?;
    let layout = liftkit::compose::CompositionLayout::new(blocks, params)?;
    let proof = ResolutionProof::parse(&read_text(&a.proof)?)?;
    let mut r = Report::new("lift-dag");
    let lifted = match lift_dag_refutation(&f, &proof, &layout, LiftOptions { vertex_budget: a.vertex_budget }) {
        Ok(l) => l,
        Err(e) => {
            r.fail(e);
            return Ok(r);
        }
    };
    let path = artifact_path(out, &a.proof, ".lifted.dag");
    write_atomic(&path, &lifted.to_text())?;
    let size = lifted.dag.len() as u128;
    r.kv("m", params.m())
        .kv("source_length", lifted.source_length)
        .kv("block_width", lifted.block_width)
        .kv("family_vertices", lifted.family_vertices)
        .kv("connector_vertices", lifted.connector_vertices)
        .kv("size", size)
        .kv("size_bound", lifted.size_bound())
        .kv("within_bound", size <= lifted.size_bound())
        .kv("dag", path.display());
    r.require(size <= lifted.size_bound());
    if a.verify {
        match verify_decision_dag(&ComposedRelation::new(&f, &layout), &lifted.dag, liftkit::proof::dag::DEFAULT_SUPPORT_CAP) {
            Ok(m) => {
                r.kv("verified", true).kv("depth", m.depth).kv("width", m.width);
            }
            Err(e) => {
                r.kv("verified", false).fail(e);
            }
        }
    }
    Ok(r)
}

fn lift_tree(a: &LiftTreeArgs, out: Option<&Path>) -> CmdResult {
    let f = read_cnf(&a.cnf)?;
    let blocks = load_blocks(a.blocks.as_deref(), &f)?;
    let params = GadgetParams::round_up(a.m, blocks.block_size())?;
    let tree: DecisionTree<u32, usize> = match &a.tree {
        Some(p) => DecisionTree::parse_preorder(&read_text(p)?)?,
        None => min_depth(&f).map_err(|e| UsageError(format!("no source tree: {e}")))?.tree,
    };
    let c = compose_block(&f, &blocks, params.m(), ComposeOptions::default())?;
    let mut r = Report::new("lift-tree");
    let lifted = match lift_tree_refutation(&f, &tree, &c.layout) {
        Ok(t) => t,
        Err(e) => {
            r.fail(e);
            return Ok(r);
        }
    };
    let outputs = lifted_tree_outputs(&lifted, &c);
    let path = artifact_path(out, &a.cnf, ".lifted.tree");
    write_atomic(&path, &outputs.to_preorder())?;
    let bound = tree.depth() * (params.selector_bits() + 1);
    r.kv("m", params.m())
        .kv("source_depth", tree.depth())
        .kv("depth", lifted.depth())
        .kv("depth_bound", bound)
        .kv("within_bound", lifted.depth() <= bound)
        .kv("size", lifted.size())
        .kv("tree", path.display());
    r.require(lifted.depth() <= bound);
    if a.verify {
        match verify_cnf_tree(&c.formula, &outputs) {
            Ok(()) => {
                r.kv("verified", true);
            }
            Err(e) => {
                r.kv("verified", false).fail(e);
            }
        }
    }
    Ok(r)
}

fn parse_rho(s: Option<&str>, n: usize, ell: usize) -> Result<BlockPartialAssignment, UsageError> {
    let Some(s) = s else { return Ok(BlockPartialAssignment::free(n, ell)) };
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != n {
        return Err(UsageError(format!("rho lists {} blocks, box has {n}", parts.len())));
    }
    let blocks = parts
        .iter()
        .map(|p| match *p {
            "*" => Ok(None),
            bits if bits.len() == ell && bits.chars().all(|c| c == '0' || c == '1') => {
                Ok(Some(bits.chars().map(|c| c == '1').collect()))
            }
            other => Err(UsageError(format!("rho block `{other}` is neither `*` nor {ell} bits"))),
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(BlockPartialAssignment::from_blocks(ell, blocks))
}

fn entropy(a: &EntropyArgs) -> CmdResult {
    let mut r = Report::new("entropy");
    if let Some(p) = &a.dist {
        let d = FiniteDistribution::parse(&read_text(p)?)?;
        r.kv("coords", d.arity()).kv("support", d.support().len()).kv("min_entropy", d.min_entropy());
        match d.blockwise_min_entropy()? {
            Some(b) => {
                r.kv("blockwise_min_entropy", b.value).kv("blockwise_subset", list(&b.subset));
            }
            None => {
                r.kv("blockwise_min_entropy", "inf");
            }
        }
        r.kv("deficiency", d.deficiency());
        return Ok(r);
    }
    let Some(p) = &a.box_file else { return Err(UsageError("entropy needs --dist or --box".into())) };
    let b = ProductBox::parse(&read_text(p)?)?;
    let rho = parse_rho(a.rho.as_deref(), b.blocks(), b.ell())?;
    let th = StructureThresholds::new(rational(&a.entropy_frac)?, sqrt_m_or_rational(&a.defect_bound, b.m())?);
    let structured = b.is_rho_structured(&rho, &th)?;
    r.kv("m", b.m()).kv("ell", b.ell()).kv("blocks", b.blocks()).kv("x_size", b.x().len());
    r.raw(&structured).kv("structured", structured.pass());
    let like = b.is_rho_like(&rho)?;
    r.kv("rho_like", like);
    r.require(structured.pass());
    if a.good_x {
        match b.find_good_x(&rho, &th) {
            Ok(g) => {
                r.kv("good_x", list(&g.x)).kv("union_bound_slack", format_rational(&g.slack));
            }
            Err(e) => {
                r.fail(e);
            }
        }
    }
    Ok(r)
}

fn uniform_points(d: &FiniteDistribution) -> Result<(Vec<Vec<usize>>, usize), UsageError> {
    let m = d.coords().first().map_or(0, |c| c.alphabet);
    if d.coords().iter().any(|c| c.alphabet != m) {
        return Err(UsageError("selector coordinates need one common alphabet".into()));
    }
    Ok((d.support().iter().map(|(p, _)| p.clone()).collect(), m))
}

fn partition(a: &PartitionArgs) -> CmdResult {
    let d = FiniteDistribution::parse(&read_text(&a.dist)?)?;
    let (points, m) = uniform_points(&d)?;
    let theta = match &a.theta {
        Some(t) => rational(t)?,
        None if m.is_power_of_two() && m >= 2 => {
            BigRational::new(BigInt::from(19 * m.trailing_zeros()), BigInt::from(20))
        }
        None => return Err(UsageError(format!("m = {m} is not a power of two; pass --theta"))),
    };
    let p = restore_partition(&points, m, d.arity(), &theta)?;
    let mut r = Report::new("partition");
    r.kv("m", m).kv("coords", d.arity()).kv("points", points.len()).kv("theta", format_rational(&theta)).kv("parts", p.parts.len());
    for (j, part) in p.parts.iter().enumerate() {
        r.raw(format!(
            "part={j} coords={} alpha={} size={} residual={}",
            list(&part.coords),
            list(&part.alpha),
            part.points.len(),
            part.residual_size
        ));
    }
    let check = p.check(&points);
    r.raw(&check).require(check.pass());
    Ok(r)
}

fn round(a: &RoundArgs) -> CmdResult {
    let b = ProductBox::parse(&read_text(&a.box_file)?)?;
    if b.ell() != 1 {
        return Err(UsageError("round needs one row per block".into()));
    }
    let (m, n) = (b.m(), b.blocks());
    let size: usize = (0..n).map(|i| b.rows(i, 0).len()).try_fold(1usize, |acc, k| acc.checked_mul(k)).unwrap_or(usize::MAX);
    if size > MAX_ROUND_ROWS {
        return Err(UsageError(format!("{size} packed rows; the limit is {MAX_ROUND_ROWS}")));
    }
    let mut y = vec![0u64];
    for i in 0..n {
        y = y.into_iter().flat_map(|acc| b.rows(i, 0).iter().map(move |&row| acc | row << (i * m))).collect();
    }
    let mut th = if a.micro { RoundThresholds::micro() } else { RoundThresholds::default() };
    if let Some(s) = &a.y_deficiency_bound {
        th.y_deficiency_bound = Some(rational(s)?);
    }
    let mut r = Report::new("round");
    r.kv("m", m).kv("blocks", n).kv("x_size", b.x().len()).kv("y_size", y.len());
    match round_lemma_find(m, n, b.x(), &y, &th) {
        Ok(o) => {
            r.raw(&o.preconditions)
                .kv("y_min_entropy", o.y_min_entropy)
                .kv("y_deficiency", o.y_deficiency)
                .kv("coords", list(&o.coords))
                .kv("alpha", list(&o.alpha))
                .kv("part_index", o.part_index)
                .kv("epsilon", o.epsilon.as_ref().map_or_else(|| "none".into(), format_rational));
            for br in &o.branches {
                let rows: Vec<String> =
                    br.rows.iter().map(|&row| (0..m).map(|c| if row >> c & 1 == 1 { '1' } else { '0' }).collect()).collect();
                r.raw(format!("branch z={} rows=[{}] x_size={} y_size={}", bits_string(&br.z), rows.join(","), br.x.len(), br.y.len()));
                r.raw(&br.report).require(br.report.pass());
            }
        }
        Err(e @ (LabError::NoRoundPart(_) | LabError::PreconditionFailed(_))) => {
            r.fail(e);
        }
        Err(e) => return Err(e.into()),
    }
    Ok(r)
}

fn cleanup(a: &CleanupArgs) -> CmdResult {
    let t = OrderedSimplex::parse(&read_text(&a.simplex)?)?;
    let shape = CleanupShape { m: a.m, n: a.n, ell: a.ell };
    let config = CleanupConfig {
        beta: sqrt_m_or_rational(&a.beta, a.m)?,
        error_log_density_bound: a.error_bound.as_deref().map(|s| rational(s).map(Real::rat)).transpose()?,
    };
    let result = bob_cleanup(&t, shape, &config)?;
    let check = verify_cleanup(&t, shape, &config, &result)?;
    let mut r = Report::new("cleanup");
    r.kv("m", a.m).kv("blocks", a.n).kv("ell", a.ell).kv("beta", &config.beta).kv("slices", result.slices).kv("triggers", result.triggers.len());
    for (k, errs) in result.errors.iter().enumerate() {
        r.raw(format!("errors row={},{} count={}", k / a.ell, k % a.ell, errs.len()));
    }
    r.raw(&check).require(check.pass());
    Ok(r)
}

fn parse_z(s: &str, n: usize) -> Result<Vec<bool>, UsageError> {
    if s.len() != n || !s.chars().all(|c| c == '0' || c == '1') {
        return Err(UsageError(format!("--z needs {n} bits")));
    }
    Ok(s.chars().map(|c| c == '1').collect())
}

fn simulate(a: &SimulateArgs, jobs: usize) -> CmdResult {
    let f = read_cnf(&a.cnf)?;
    let n = f.var_count() as usize;
    let shape = SimShape::new(a.m, n)?;
    let protocol = match &a.protocol {
        Some(p) => RealProtocol::from_json(&read_text(p)?)?,
        None => {
            let tree = min_depth(&f).map_err(|e| UsageError(format!("no source tree: {e}")))?.tree;
            protocol_from_tree(&f, &tree, shape)?
        }
    };
    let thresholds = match a.regime {
        Regime::Micro => RoundThresholds::micro(),
        Regime::Standard => RoundThresholds::default(),
    };
    let config = SimConfig { thresholds, budget: a.budget.unwrap_or(n), record_states: false };
    let mut r = Report::new("simulate");
    r.kv("m", a.m).kv("blocks", n).kv("protocol_depth", protocol.depth()).kv("budget", config.budget);
    if let Err(e) = verify_protocol_solves(&protocol, &f, shape) {
        r.kv("protocol_solves", false).fail(e);
        return Ok(r);
    }
    r.kv("protocol_solves", true);
    let zs: Vec<Vec<bool>> = match &a.z {
        Some(s) => vec![parse_z(s, n)?],
        None => (0u64..1 << n).map(|bits| (0..n).map(|i| bits >> (n - 1 - i) & 1 == 1).collect()).collect(),
    };
    let runs = par_map(&zs, jobs, |z| simulate_protocol(&protocol, &f, shape, &config, &mut |i| z[i]));
    let mut max_queries = 0;
    for (z, run) in zs.iter().zip(runs) {
        match run {
            Ok(sim) => {
                let falsified = f.clause(sim.output).is_some_and(|c| !c.eval(z));
                let blocks: Vec<usize> = sim.queries.iter().map(|b| b + 1).collect();
                r.raw(format!("z={} clause={} falsified={} queries={}", bits_string(z), sim.output, falsified, list(&blocks)));
                if a.z.is_some() {
                    for (k, line) in sim.transcript.iter().enumerate() {
                        r.raw(format!("step={} {line}", k + 1));
                    }
                }
                max_queries = max_queries.max(sim.queries.len());
                if !falsified {
                    r.fail(format!("clause {} is not falsified by z={}", sim.output, bits_string(z)));
                }
            }
            Err(e) => {
                r.raw(format!("z={} clause=none", bits_string(z))).fail(e);
            }
        }
    }
    r.kv("max_queries", max_queries);
    Ok(r)
}

fn fourier(a: &FourierArgs) -> CmdResult {
    let lambda = FiniteDistribution::parse(&read_text(&a.lambda)?)?;
    let gamma = FiniteDistribution::parse(&read_text(&a.gamma)?)?;
    let mut r = Report::new("fourier");
    if a.uniform_selector {
        let eps = rational(&a.epsilon)?;
        r.kv("epsilon_target", format_rational(&eps)).kv("goodness", a.goodness);
        match find_uniform_selector(&lambda, &gamma, &eps, a.goodness) {
            Ok(s) => {
                r.kv("x", list(&s.x)).kv("epsilon", format_rational(&s.epsilon));
                for c in &s.certificate {
                    r.raw(format!(
                        "subset={} bias={} bound={} good={}",
                        list(&c.subset),
                        format_rational(&c.bias),
                        format_rational(&c.bound),
                        c.good
                    ));
                }
            }
            Err(e @ LabError::NoUniformSelector { .. }) => {
                r.fail(e);
            }
            Err(e) => return Err(e.into()),
        }
        return Ok(r);
    }
    r.kv("subset", list(&a.subset));
    match check_fourier_bound(&lambda, &gamma, &a.subset) {
        Ok(c) => {
            r.kv("expectation", format_rational(&c.expectation))
                .kv("beta", &c.beta.value)
                .kv("beta_subset", list(&c.beta.subset))
                .kv("deficiency", &c.deficiency)
                .kv("bound", &c.bound)
                .kv("slack", &c.slack)
                .kv("holds", c.holds);
            r.require(c.holds);
        }
        Err(e @ LabError::EntropyTooLow { .. }) => {
            r.fail(e);
        }
        Err(e) => return Err(e.into()),
    }
    Ok(r)
}
