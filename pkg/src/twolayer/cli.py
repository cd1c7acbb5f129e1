"""Command line entry point: ``twolayer <subcommand> ...``.

Every subcommand accepts ``--config FILE`` (TOML, or a manifest JSON written by
an earlier run); explicit flags override file values. Each output is
accompanied by a manifest recording the fully resolved configuration, which can
be passed back through ``--config`` to reproduce the run.
"""

import argparse
import json
import os
import sys

import numpy as np

from . import __version__
from .errors import (EstimationError, IngestionError, NumericalError, ParameterError,
                     StructureError, TwoLayerError)

OUTPUT_DIR_ENV = "TWOLAYER_OUTPUT_DIR"

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_USAGE = 2
EXIT_PARAMETER = 3
EXIT_INPUT = 4
EXIT_STRUCTURE = 5
EXIT_ESTIMATION = 6
EXIT_NUMERICAL = 7
EXIT_CHECK_FAILED = 8

_EXIT_CODES = [
    (ParameterError, EXIT_PARAMETER),
    (IngestionError, EXIT_INPUT),
    (StructureError, EXIT_STRUCTURE),
    (EstimationError, EXIT_ESTIMATION),
    (NumericalError, EXIT_NUMERICAL),
    (TwoLayerError, EXIT_ERROR),
]

NYC_REGION_BOUNDS = (40.4, 41.4, -74.3, -73.3)


# -- config handling --------------------------------------------------------------


def _load_toml(path):
    try:
        import tomllib
    except ModuleNotFoundError:
        import tomli as tomllib
    with open(path, "rb") as fh:
        return tomllib.load(fh)


def load_config(path, command):
    """Flat ``{dest: value}`` for ``command`` from a TOML file or manifest.

    TOML keys may sit at top level or in a ``[command]`` table (the table
    wins); dashes in keys become underscores.
    """
    if not os.path.exists(path):
        raise IngestionError("config file not found", path=path)
    if path.endswith(".json"):
        with open(path) as fh:
            doc = json.load(fh)
        if doc.get("subcommand") not in (None, command):
            raise ParameterError(f"manifest is for '{doc['subcommand']}', not '{command}'")
        raw = doc.get("config", doc)
    else:
        try:
            doc = _load_toml(path)
        except ValueError as exc:
            raise IngestionError(f"invalid TOML: {exc}", path=path) from None
        raw = {k: v for k, v in doc.items() if not isinstance(v, dict)}
        raw.update(doc.get(command, {}))
    return {k.replace("-", "_"): v for k, v in raw.items()}


def _default_output(name):
    return os.path.join(os.environ.get(OUTPUT_DIR_ENV, "."), name)


def _manifest_path(output):
    if output.endswith(os.sep) or os.path.isdir(output):
        return os.path.join(output, "manifest.json")
    return output + ".manifest.json"


def write_manifest(args, outputs, inputs=()):
    config = {k: v for k, v in sorted(vars(args).items()) if k not in ("func", "config", "command")}
    doc = {
        "subcommand": args.command,
        "config": config,
        "seed": config.get("seed"),
        "inputs": list(inputs),
        "outputs": list(outputs),
        "version": __version__,
    }
    path = _manifest_path(config["output"])
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True, default=_json_default)
        fh.write("\n")
    return path


def _json_default(obj):
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, tuple):
        return list(obj)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


# -- shared helpers -----------------------------------------------------------------


def _region(values):
    from .vertex_samplers import Region
    if values is None or values == "nyc-region" or values == ["nyc-region"]:
        return Region(*NYC_REGION_BOUNDS)
    if len(values) != 4:
        raise ParameterError("region needs 'nyc-region' or four numbers: lat_min lat_max lon_min lon_max")
    return Region(*(float(x) for x in values))


def _synthetic_spec(args):
    from .generators import PRESETS, SyntheticSpec
    base = PRESETS[args.preset].to_dict()
    for key in ("n_per_part", "ba_m_target_1", "ba_m_target_2", "ba_m_aux", "extra_pairs"):
        if getattr(args, key, None) is not None:
            base[key] = getattr(args, key)
    base["seed"] = args.net_seed if getattr(args, "net_seed", None) is not None else args.seed
    spec = SyntheticSpec(**base)
    # materialize preset values so the manifest is self-contained
    for key, value in spec.to_dict().items():
        setattr(args, "net_seed" if key == "seed" else key, value)
    return spec


def _load_net(args):
    """Network from ``--net DIR`` or an in-memory ``--preset``; returns ``(net, venues)``."""
    from .generators import generate_two_layer
    from .ingestion import load_network
    if getattr(args, "net", None):
        return load_network(args.net)
    if getattr(args, "preset", None):
        return generate_two_layer(_synthetic_spec(args)), None
    raise ParameterError("give --net DIR or --preset NAME")


def _sampler(args, net, venues):
    from .vertex_samplers import RRZISampler, UniformSampler
    if args.sampler == "uniform":
        return UniformSampler(net.bridge.v_count)
    if venues is None:
        raise ParameterError("the rrzi sampler needs a network directory with venues.txt")
    return RRZISampler(venues, _region(args.region), args.k, aux_count=net.bridge.v_count)


def _add_net_args(p, preset_choices):
    p.add_argument("--net", help="network directory (target.edges, auxiliary.edges, bridge.pairs)")
    p.add_argument("--preset", choices=preset_choices,
                   help="generate the network in memory instead of reading --net")
    p.add_argument("--net-seed", type=int, default=None,
                   help="seed for --preset generation (default: --seed)")
    _add_spec_args(p)


def _add_spec_args(p):
    p.add_argument("--n-per-part", type=int, default=None, help="nodes per BA part (preset value if unset)")
    p.add_argument("--ba-m-target-1", type=int, default=None, help="BA edges per node, target part 1")
    p.add_argument("--ba-m-target-2", type=int, default=None, help="BA edges per node, target part 2")
    p.add_argument("--ba-m-aux", type=int, default=None, help="BA edges per node, auxiliary graph")
    p.add_argument("--extra-pairs", type=int, default=None, help="random bridge pairs beyond the first")


def _add_sampler_args(p):
    p.add_argument("--sampler", choices=("uniform", "rrzi"), default="uniform",
                   help="auxiliary vertex sampler (default: %(default)s)")
    p.add_argument("--k", type=int, default=50, help="RRZI result cap K (default: %(default)s)")
    p.add_argument("--region", nargs="+", default=["nyc-region"],
                   help="RRZI root: 'nyc-region' or lat_min lat_max lon_min lon_max (default: nyc-region)")


# -- subcommands ------------------------------------------------------------------


def cmd_generate(args):
    from .generators import generate_two_layer
    from .ingestion import save_network
    spec = _synthetic_spec(args)
    net = generate_two_layer(spec)
    args.output = args.output or _default_output("net")
    paths = save_network(net, args.output)
    write_manifest(args, paths)
    print(f"wrote {args.output}: target {net.target.node_count} nodes/{net.target.edge_count} edges, "
          f"auxiliary {net.auxiliary.node_count}/{net.auxiliary.edge_count}, bridge {net.bridge.edge_count}")
    return EXIT_OK


def cmd_sample(args):
    from .evaluation import TrialConfig, sample_once
    from .rng import make_rng
    net, venues = _load_net(args)
    n = net.target.node_count
    frac = args.budget / n if args.budget is not None else args.budget_frac
    starts = None if args.start is None else (args.start,)
    config = TrialConfig(args.method, args.alpha, args.beta, min(frac, 1.0), 1, args.seed,
                         args.burnin, starts)
    path = sample_once(net, config, make_rng(args.seed), _sampler(args, net, venues))
    args.output = args.output or _default_output("path.csv")
    path.to_csv(args.output)
    write_manifest(args, [args.output], [args.net] if args.net else [])
    print(f"wrote {len(path)} samples to {args.output}")
    return EXIT_OK


def cmd_estimate(args):
    from .estimators import estimate_degree_distribution, ground_truth_curve
    from .ingestion import load_network
    from .walkers import SamplePath
    net, _ = load_network(args.net)
    try:
        path = SamplePath.from_csv(args.path)
    except (OSError, KeyError, ValueError) as exc:
        raise IngestionError(f"cannot read sample path: {exc}", path=args.path) from None
    report = estimate_degree_distribution(path, net.target, args.kind, args.d_max, method=args.method,
                                          alpha=args.alpha, beta=args.beta)
    if args.truth:
        report.truth = ground_truth_curve(net.target, args.kind, len(report.theta_hat) - 1)
    args.output = args.output or _default_output("estimate.csv")
    report.to_csv(args.output)
    json_path = os.path.splitext(args.output)[0] + ".json"
    report.to_json(json_path)
    write_manifest(args, [args.output, json_path], [args.net, args.path])
    print(f"wrote {args.kind} estimate over d=0..{len(report.theta_hat) - 1} to {args.output}")
    return EXIT_OK


def cmd_evaluate(args):
    from .estimators import degree_ccdf, degree_pdf
    from .evaluation import TrialConfig, default_workers, run_trials
    net, venues = _load_net(args)
    starts = None
    if args.start_range is not None:
        lo, hi = args.start_range
        starts = tuple(range(lo, hi))
    config = TrialConfig(args.method, args.alpha, args.beta, args.budget_frac, args.runs, args.seed,
                         args.burnin, starts)
    if args.degree is not None:
        target = degree_pdf(args.degree) if args.kind == "pdf" else degree_ccdf(args.degree)
    else:
        target = args.kind
    workers = args.workers if args.workers else default_workers()
    table = run_trials(net, config, target, workers, _sampler(args, net, venues))
    args.output = args.output or _default_output("nrmse.csv")
    table.to_csv(args.output)
    json_path = os.path.splitext(args.output)[0] + ".json"
    table.to_json(json_path)
    write_manifest(args, [args.output, json_path], [args.net] if args.net else [])
    print(f"wrote NRMSE for {len(table.degrees)} bins ({config.method}, {config.runs} runs) to {args.output}")
    return EXIT_OK


def _check_detailed_balance(net, args, weights):
    from .oracles import build_modified_transition_matrix, detailed_balance_violation, rwtvsa_stationary
    P = build_modified_transition_matrix(net, args.alpha, weights)
    pi = rwtvsa_stationary(net, args.alpha, weights)
    viol = detailed_balance_violation(P, pi)
    return {"max_violation": viol, "row_sum_error": float(np.max(np.abs(P.sum(axis=1) - 1)))}, viol <= args.tol


def _check_stationary(net, args, weights):
    from .oracles import build_modified_transition_matrix, power_iteration, rwtvsa_stationary
    P = build_modified_transition_matrix(net, args.alpha, weights)
    gap = float(np.max(np.abs(power_iteration(P) - rwtvsa_stationary(net, args.alpha, weights))))
    return {"max_abs_difference": gap}, gap <= max(args.tol, 1e-8)


def _check_fixed_point(net, args, weights):
    from .weights import fixed_point_residuals, solve_fixed_point_weights
    w_u, w_v = solve_fixed_point_weights(net, args.alpha, args.beta)
    r_u, r_v = fixed_point_residuals(net, args.alpha, args.beta, w_u, w_v)
    worst = max(r_u, r_v)
    return {"residual_u": r_u, "residual_v": r_v}, worst <= max(args.tol, 1e-10)


def _check_rrzi(net, args, venues):
    from .vertex_samplers import rrzi_inclusion_oracle
    if venues is None:
        raise ParameterError("rrzi check needs venues.txt in the network directory")
    probs = rrzi_inclusion_oracle(venues, _region(args.region), args.k)
    total = sum(probs.values())
    return {"venues_reachable": len(probs), "probability_sum": total}, abs(total - 1) <= max(args.tol, 1e-12)


def cmd_oracle(args):
    net, venues = _load_net(args)
    weights = _sampler(args, net, venues).weight_table() if args.check != "rrzi" else None
    check = {"detailed-balance": _check_detailed_balance, "stationary": _check_stationary,
             "fixed-point": _check_fixed_point}.get(args.check)
    if check is None:
        report, ok = _check_rrzi(net, args, venues)
    else:
        report, ok = check(net, args, weights)
    report = {"check": args.check, "passed": bool(ok), "tolerance": args.tol, **report}
    text = json.dumps(report, indent=2, sort_keys=True)
    print(text)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text + "\n")
        write_manifest(args, [args.output], [args.net] if args.net else [])
    return EXIT_OK if ok else EXIT_CHECK_FAILED


def cmd_ingest(args):
    from .ingestion import (IdMap, build_two_layer_from_checkins, load_checkins, load_edge_list,
                            load_pairs_mapped, save_network, write_mapping)
    from .graph import TwoLayerNetwork, build_bipartite, build_graph
    args.output = args.output or _default_output("net")
    inputs = [p for p in (args.target, args.aux, args.pairs, args.checkins) if p]
    if args.checkins:
        if not args.target:
            raise ParameterError("--checkins needs the social graph via --target")
        social = load_edge_list(args.target, args.directed)
        built = build_two_layer_from_checkins(social.graph, load_checkins(args.checkins),
                                              _region(args.region), social.mapping)
        paths = save_network(built.net, args.output, built.venues)
        ext_users = social.mapping.external()
        users = IdMap((ext_users[s], i) for i, s in enumerate(built.user_ids.tolist()))
        venues = IdMap((name, i) for i, name in enumerate(built.venue_ids))
        summary = (f"{built.net.target.node_count} users, {built.net.auxiliary.node_count} venues, "
                   f"{built.raw_checkins} in-region check-ins, {built.bridge_pairs} distinct user-venue pairs")
    else:
        if not (args.target and args.pairs):
            raise ParameterError("give --checkins, or --target and --pairs (plus optional --aux)")
        social = load_edge_list(args.target, args.directed)
        users = social.mapping
        venues = IdMap()
        aux_pairs = np.zeros((0, 2), dtype=np.int64)
        if args.aux:
            aux = load_edge_list(args.aux, args.directed, venues)
            aux_pairs = aux.graph.edges()
        pairs = load_pairs_mapped(args.pairs, users, venues)
        target = build_graph(social.graph.edges(), len(users))
        net = TwoLayerNetwork(target, build_graph(aux_pairs, len(venues)),
                              build_bipartite(pairs, len(users), len(venues)))
        paths = save_network(net, args.output)
        summary = (f"{target.node_count} target nodes, {net.auxiliary.node_count} auxiliary nodes, "
                   f"{net.bridge.edge_count} bridge edges; dropped {social.duplicates} duplicate and "
                   f"{social.self_loops} self-loop lines")
    for name, mapping in (("target_ids.csv", users), ("auxiliary_ids.csv", venues)):
        paths.append(os.path.join(args.output, name))
        write_mapping(mapping, paths[-1])
    write_manifest(args, paths, inputs)
    print(f"wrote {args.output}: {summary}")
    return EXIT_OK


# -- parser -----------------------------------------------------------------------


def build_parser():
    from .evaluation import METHODS
    from .generators import PRESETS
    presets = sorted(PRESETS)
    methods = [m.lower() for m in METHODS]
    fmt = argparse.ArgumentDefaultsHelpFormatter
    parser = argparse.ArgumentParser(prog="twolayer", description="Sampling over two-layered networks.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="TOML config or manifest JSON; flags override it")
        p.add_argument("--seed", type=int, default=0, help="random seed")
        p.add_argument("-o", "--output", default=None,
                       help=f"output path (default: under ${OUTPUT_DIR_ENV} or the current directory)")

    p = sub.add_parser("generate", help="generate a synthetic network", formatter_class=fmt)
    common(p)
    p.add_argument("--preset", choices=presets, default="barbell-small")
    p.add_argument("--net-seed", type=int, default=None, help="overrides --seed for generation")
    _add_spec_args(p)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("sample", help="record one sample path", formatter_class=fmt)
    common(p)
    _add_net_args(p, presets)
    p.add_argument("--method", choices=methods, default="rwt-vsa")
    p.add_argument("--alpha", type=float, default=10.0)
    p.add_argument("--beta", type=float, default=10.0)
    p.add_argument("--budget", type=int, default=None, help="number of samples (overrides --budget-frac)")
    p.add_argument("--budget-frac", type=float, default=0.01, help="budget as a fraction of target nodes")
    p.add_argument("--start", type=int, default=None, help="start node (uniform if unset)")
    p.add_argument("--burnin", type=int, default=0, help="walk steps discarded before recording")
    _add_sampler_args(p)
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("estimate", help="degree distribution from a sample path", formatter_class=fmt)
    common(p)
    p.add_argument("--net", required=True, help="network directory")
    p.add_argument("--path", required=True, help="sample path CSV (step,node,denom,jumped)")
    p.add_argument("--kind", choices=("pdf", "ccdf"), default="ccdf")
    p.add_argument("--d-max", type=int, default=None, help="largest degree reported (max sampled if unset)")
    p.add_argument("--truth", action="store_true", help="add the exact curve as a column")
    p.add_argument("--method", default="", help="method tag stored in the report")
    p.add_argument("--alpha", type=float, default=0.0, help="alpha stored in the report")
    p.add_argument("--beta", type=float, default=0.0, help="beta stored in the report")
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("evaluate", help="NRMSE over repeated trials", formatter_class=fmt)
    common(p)
    _add_net_args(p, presets)
    p.add_argument("--method", choices=methods, default="rwt-vsa")
    p.add_argument("--alpha", type=float, default=10.0)
    p.add_argument("--beta", type=float, default=10.0)
    p.add_argument("--budget-frac", type=float, default=0.01)
    p.add_argument("--runs", type=int, default=200)
    p.add_argument("--kind", choices=("pdf", "ccdf"), default="ccdf")
    p.add_argument("--degree", type=int, default=None, help="single degree d instead of the full curve")
    p.add_argument("--start-range", type=int, nargs=2, metavar=("LO", "HI"), default=None,
                   help="draw walk starts uniformly from LO..HI-1 (all nodes if unset)")
    p.add_argument("--burnin", type=int, default=0)
    p.add_argument("--workers", type=int, default=0, help="worker processes (0: available CPUs)")
    _add_sampler_args(p)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("oracle", help="exact verification checks on small networks", formatter_class=fmt)
    common(p)
    _add_net_args(p, presets)
    p.add_argument("--check", choices=("detailed-balance", "stationary", "fixed-point", "rrzi"),
                   required=True)
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--beta", type=float, default=1.0)
    p.add_argument("--tol", type=float, default=1e-12, help="pass threshold")
    _add_sampler_args(p)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("ingest", help="convert raw files into a network directory", formatter_class=fmt)
    common(p)
    p.add_argument("--target", help="target (social) edge list")
    p.add_argument("--directed", action="store_true", help="edge lists are directed; symmetrize")
    p.add_argument("--aux", help="auxiliary edge list (optional)")
    p.add_argument("--pairs", help="bridge pair list 'u v' in the edge lists' ids")
    p.add_argument("--checkins", help="check-ins 'user time lat lon venue'")
    p.add_argument("--region", nargs="+", default=["nyc-region"],
                   help="check-in region: 'nyc-region' or lat_min lat_max lon_min lon_max")
    p.set_defaults(func=cmd_ingest)
    return parser


def parse_args(argv):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.config:
        values = load_config(args.config, args.command)
        sub = parser._subparsers._group_actions[0].choices[args.command]
        known = {a.dest for a in sub._actions}
        unknown = sorted(set(values) - known - {"output"})
        if unknown:
            raise ParameterError(f"unknown config keys: {', '.join(unknown)}")
        values.pop("config", None)
        sub.set_defaults(**values)
        args = parser.parse_args(argv)
    return args


def run_cli(argv=None):
    try:
        args = parse_args(sys.argv[1:] if argv is None else argv)
        return args.func(args)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except TwoLayerError as exc:
        print(f"error: {exc}", file=sys.stderr)
        for cls, code in _EXIT_CODES:
            if isinstance(exc, cls):
                return code
        return EXIT_ERROR


def main():
    sys.exit(run_cli())
