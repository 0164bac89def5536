"""Command-line interface: ``wcc <subcommand> ...``.

Reports are ``key value [unit]`` lines on stdout followed by a one-line
``summary``. Exit status is 0 on success, 1 on a domain error and 2 on a
usage error.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from fractions import Fraction
from pathlib import Path

from . import __version__
from .bounds import collision_and_distance, finite_bounds
from .channel import ChannelModel, binomial_tail, simulate_channel
from .concat import ConcatParams, concat_decode_detail, concat_encode, scale_plan
from .counting import pool_rate, pool_size_bound
from .expurgate import (
    build_bad_pair_graph,
    expurgate_greedy,
    expurgate_randomized,
    verify_min_distance,
)
from .formats import (
    IntegrityError,
    Manifest,
    format_codebook,
    parse_manifest,
    read_codebook,
    sha256_text,
)
from .graph import load_graph, validate_graph
from .ldp import rates_at_target
from .markov import (
    entropy_rate,
    format_chain,
    maxentropic_chain,
    parse_chain,
    quantize_n_integral,
    spectral_gaps,
    uniform_chain,
)
from .pool import (
    PoolSpec,
    PoolTemplate,
    count_admissible_prefixes,
    enumerate_pool,
    sample_codeword,
    verify_weak_constraint,
)
from .rs import DecodeFailure


def rational(tok: str) -> Fraction:
    num, sep, den = tok.partition("/")
    try:
        if not sep:
            return Fraction(int(tok))
        return Fraction(int(num), int(den))
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"expected an exact rational num/den, got {tok!r}") from None


def seed_value(tok: str) -> int:
    try:
        v = int(tok)
    except ValueError:
        raise argparse.ArgumentTypeError(f"seed must be an integer, got {tok!r}") from None
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit value")
    return v


def _emit(lines, out=None):
    text = "\n".join(lines) + "\n"
    sys.stdout.write(text)
    if out:
        Path(out).write_text(text, encoding="utf-8")


def _load_chain(graph, spec: str):
    if spec == "uniform":
        return uniform_chain(graph)
    if spec == "maxentropic":
        return maxentropic_chain(graph)[0]
    return parse_chain(Path(spec).read_text(encoding="utf-8"), graph)


def _pool_spec(args):
    graph = load_graph(args.graph)
    chain = _load_chain(graph, args.chain)
    ichain = quantize_n_integral(chain, args.n)
    return graph, PoolSpec(ichain, args.alpha, args.zeta, graph.vertex_id(args.root))


# ---------------------------------------------------------------------------
# subcommands


def cmd_analyze(args):
    g = load_graph(args.graph)
    rep = validate_graph(g)
    lines = [
        f"graph {args.graph}",
        f"graphhash {g.digest}",
        f"vertices {g.num_vertices}",
        f"edges {g.num_edges}",
        f"deterministic {str(rep.deterministic).lower()}",
        f"irreducible {str(rep.irreducible).lower()}",
        f"aperiodic {str(rep.aperiodic).lower()}",
        f"period {rep.period}",
        f"primitive {str(rep.primitive).lower()}",
        f"primitivity_exponent {rep.primitivity_exponent}",
        f"balanced {str(rep.balanced).lower()}",
        f"eulerian_cycle {str(rep.eulerian_cycle_exists).lower()}",
    ]
    if rep.irreducible:
        chain, cap = maxentropic_chain(g)
        lines.append(f"capacity {cap!r} bits/symbol")
        if args.chain != "maxentropic":
            chain = _load_chain(g, args.chain)
        gaps = spectral_gaps(chain)
        s, dist = collision_and_distance(chain)
        lines += [
            f"chain {args.chain}",
            f"entropy_rate {entropy_rate(chain)!r} bits/symbol",
            f"reversible {str(gaps.reversible).lower()}",
            f"absolute_gap {gaps.absolute_gap!r}",
            f"spectral_gap {gaps.spectral_gap!r}" if gaps.reversible else "spectral_gap none",
            f"pseudo_spectral_gap {gaps.pseudo_gap!r} (k={gaps.pseudo_gap_k})",
            f"collision_S {float(s)!r} probability",
            f"expected_rel_distance {float(dist)!r} fraction",
        ]
    _emit(lines, args.out)
    print(f"summary analyze irreducible={str(rep.irreducible).lower()}")


def cmd_capacity(args):
    g = load_graph(args.graph)
    chain, cap = maxentropic_chain(g)
    lines = [f"capacity {cap!r} bits/symbol", f"perron_value {2**cap!r}"]
    if args.out:
        Path(args.out).write_text(format_chain(chain), encoding="utf-8")
        lines.append(f"chain_file {args.out}")
    _emit(lines)
    print(f"summary capacity {cap:.6f} bits/symbol")


def cmd_quantize(args):
    g = load_graph(args.graph)
    chain = _load_chain(g, args.chain)
    ic = quantize_n_integral(chain, args.n)
    lines = [f"n {ic.n}", f"max_deviation {float(ic.max_deviation())!r} probability"]
    for e, c in zip(g.edges, ic.counts):
        lines.append(f"count {g.vertices[e.src]} {g.vertices[e.dst]} {g.alphabet[e.label]} {c}")
    _emit(lines, args.out)
    print(f"summary quantize n={ic.n}")


def cmd_pool_build(args):
    graph, spec = _pool_spec(args)
    if args.sample:
        cws = []
        attempts = 0
        for k in range(args.sample):
            c, a = sample_codeword(spec, args.seed + k)
            cws.append(c)
            attempts += a
        cws = list({c.labels: c for c in cws}.values())
        extra = [f"seed {args.seed}", f"samples {args.sample}", f"rejected_walks {attempts}"]
    else:
        cws = enumerate_pool(spec, limit=args.limit)
        extra = []
    text = format_codebook(graph, spec.n, spec.alpha, spec.zeta, spec.root, cws)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    _emit([f"n {spec.n}", f"n_prime {spec.n_prime}", f"codewords {len(cws)}"] + extra
          + ([f"codebook {args.out}"] if args.out else []))
    print(f"summary pool build codewords={len(cws)}")


def cmd_pool_verify(args):
    graph = load_graph(args.graph)
    cb = read_codebook(args.codebook)
    chain = _load_chain(graph, args.chain)
    ichain = quantize_n_integral(chain, cb.n)
    root = graph.vertex_id(cb.root)
    cws = cb.to_codewords(graph)
    bad = sum(1 for c in cws if not verify_weak_constraint(c, ichain, root))
    _emit([f"codewords {len(cws)}", f"violations {bad}", f"graphhash_ok true"])
    print(f"summary pool verify {'ok' if not bad else 'FAILED'}")
    if bad:
        raise DomainError(f"{bad} codewords violate the weak constraint")


def cmd_pool_rate(args):
    graph, spec = _pool_spec(args)
    b = pool_size_bound(spec)
    r = pool_rate(spec)
    lines = [
        f"n {spec.n}",
        f"n_prime {spec.n_prime}",
        f"log2_pool_lower {b.log2_lower!r} bits",
        f"term_entropy {b.entropy_term!r} bits",
        f"term_stirling {b.stirling_term!r} bits",
        f"term_delta {b.delta_term!r} bits",
        f"term_terminal {b.terminal_term!r} bits",
        f"log2_pool_lower_all_terminals {b.log2_lower_all_terminals!r} bits",
        f"log2_lgamma_count {b.log2_lgamma_count!r} bits",
        f"R_pool_lower {r.rate_lower!r} bits/symbol",
        f"alpha_entropy {r.alpha_entropy!r} bits/symbol",
        f"alpha_capacity {r.alpha_capacity!r} bits/symbol",
    ]
    if args.exact:
        lines.append(f"pool_exact {count_admissible_prefixes(spec)} codewords")
    _emit(lines, args.out)
    print(f"summary pool rate R_pool>={r.rate_lower:.6f} bits/symbol")


def cmd_bounds_finite(args):
    graph, spec = _pool_spec(args)
    rep = finite_bounds(spec, float(args.eps))
    _emit(rep.lines(), args.out)
    print(f"summary bounds finite ec_size>={rep.ec_size_lower:.6g}")


def cmd_bounds_asymptotic(args):
    graph = load_graph(args.graph)
    chain = _load_chain(graph, args.chain)
    _, dist = collision_and_distance(chain)
    eps = float(args.eps)
    if not 0 <= eps < float(dist):
        raise DomainError(f"eps must lie in [0, 1 - S) = [0, {float(dist):.6g})")
    r = rates_at_target(chain, float(args.alpha), float(dist) - eps, float(args.zeta))
    _emit(r.lines(), args.out)
    print(f"summary bounds asymptotic R_ec>={r.r_ec:.6f} bits/symbol")


def cmd_expurgate(args):
    graph = load_graph(args.graph)
    cb = read_codebook(args.codebook)
    if cb.kind != "pool":
        raise DomainError("expurgation needs a wccpool codebook")
    chain = _load_chain(graph, args.chain)
    spec = PoolSpec(quantize_n_integral(chain, cb.n), cb.alpha, cb.zeta, graph.vertex_id(cb.root))
    pool = cb.to_codewords(graph)
    g = build_bad_pair_graph(pool, spec, args.eps)
    pm, pf = g.pool_mass, g.exact_p_fail_eff()
    if args.mode == "greedy":
        code = expurgate_greedy(g)
    else:
        code = expurgate_randomized(g, float(pm), float(pf), args.seed)
    dist = verify_min_distance(code, spec)
    text = format_codebook(graph, spec.n, spec.alpha, spec.zeta, spec.root, code.codewords,
                           eps=args.eps, mode=code.mode_line())
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    bound = float(pm * pm / (4 * pf)) if pf else math.inf
    lines = [
        f"pool {g.size} codewords",
        f"bad_pairs {len(g.edges)}",
        f"threshold {g.threshold} fraction",
        f"pool_mass {float(pm)!r} probability",
        f"bad_pair_mass {float(g.bad_mass)!r} probability",
        f"p_fail_eff {float(pf)!r} probability",
        f"expected_size_lower {bound!r} codewords",
        f"mode {code.mode_line()}",
        f"seed {args.seed}",
        f"kept {code.size} codewords",
        f"clamped_vertices {code.clamped_vertices}",
        f"min_prefix_rel_distance {dist.min_prefix}",
        f"min_full_rel_distance {dist.min_full}",
    ]
    _emit(lines + ([f"codebook {args.out}"] if args.out else []))
    print(f"summary expurgate kept={code.size}")


def _load_concat(manifest_path, graph_path):
    graph = load_graph(graph_path)
    man = parse_manifest(Path(manifest_path).read_text(encoding="utf-8"))
    if man.graphhash != graph.digest:
        raise IntegrityError("manifest graph hash does not match the graph file")
    inner_path = Path(man.inner)
    if not inner_path.is_absolute():
        inner_path = Path(manifest_path).parent / inner_path
    inner_text = inner_path.read_text(encoding="utf-8")
    if sha256_text(inner_text) != man.innerhash:
        raise IntegrityError("inner code file does not match the manifest hash")
    from .formats import parse_codebook

    cb = parse_codebook(inner_text)
    cws = cb.to_codewords(graph)
    params = ConcatParams(graph, graph.vertex_id(cb.root), tuple(cws), man.k, man.c0)
    if params.q != man.q or params.rs.g != man.g:
        raise IntegrityError("manifest field parameters disagree with the inner code")
    return graph, params


def cmd_concat_plan(args):
    lines = []
    if args.target is not None:
        graph = load_graph(args.graph)
        chain = _load_chain(graph, args.chain)
        tpl = PoolTemplate(chain, args.alpha, args.zeta, graph.vertex_id(args.root))
        plan = scale_plan(args.target, args.c0, tpl)
        lines += plan.lines()
    if args.inner is not None:
        if args.k is None:
            raise DomainError("--K is required with --inner")
        graph = load_graph(args.graph)
        inner_text = Path(args.inner).read_text(encoding="utf-8")
        from .formats import parse_codebook

        cb = parse_codebook(inner_text)
        cws = cb.to_codewords(graph)
        params = ConcatParams(graph, graph.vertex_id(cb.root), tuple(cws), args.k, args.c0)
        lines += params.lines()
        if args.out:
            inner_ref = os.path.relpath(Path(args.inner).resolve(), Path(args.out).resolve().parent)
            man = Manifest(params.q, args.k, args.c0, inner_ref, params.rs.g, graph.digest,
                           sha256_text(inner_text))
            Path(args.out).write_text(man.to_text(), encoding="utf-8")
            lines.append(f"manifest {args.out}")
    if not lines:
        raise DomainError("concat plan needs --target and/or --inner")
    _emit(lines)
    print("summary concat plan")


def _read_symbols(graph, args):
    text = args.word if args.word is not None else Path(args.input).read_text(encoding="utf-8")
    try:
        return [graph.symbol_id(s) for s in text.split()]
    except Exception as exc:
        raise DomainError(str(exc)) from None


def cmd_concat_encode(args):
    graph, params = _load_concat(args.manifest, args.graph)
    try:
        msg = [int(x) for x in args.message.split()]
    except ValueError:
        raise DomainError("message symbols must be integers") from None
    word = concat_encode(msg, params)
    text = " ".join(graph.alphabet[s] for s in word)
    if args.out:
        Path(args.out).write_text(text + "\n", encoding="utf-8")
    _emit([f"N_con {params.n_con} symbols", f"codeword {text}"])
    print("summary concat encode weak_constraint=ok")


def cmd_concat_decode(args):
    graph, params = _load_concat(args.manifest, args.graph)
    res = concat_decode_detail(_read_symbols(graph, args), params)
    lines = [
        f"inner_symbols {' '.join(map(str, res.inner_symbols))}",
        f"inner_distances {' '.join(map(str, res.inner_distances))}",
    ]
    if res.message is None:
        _emit(lines + [f"failure {res.failure}"])
        raise DecodeFailure(res.failure)
    _emit(lines + [f"message {' '.join(map(str, res.message))}"])
    print("summary concat decode ok")


def cmd_simulate(args):
    graph, params = _load_concat(args.manifest, args.graph)
    rep = simulate_channel(params, ChannelModel(float(args.p), args.seed), args.trials)
    tail = binomial_tail(params.n, float(args.p), math.ceil(params.d_in / 2))
    _emit(rep.lines() + [f"inner_failure_binomial_bound {tail!r} probability"], args.out)
    print(f"summary simulate message_error_rate={rep.message_error_rate:.6g}")


class DomainError(Exception):
    pass


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="wcc", description="Weakly constrained Eulerian-cycle codes.")
    p.add_argument("--version", action="version", version=f"wcc {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def chain_opts(sp, graph_positional=False):
        if graph_positional:
            sp.add_argument("graph")
        else:
            sp.add_argument("--graph", required=True)
        sp.add_argument("--chain", default="maxentropic", help="uniform | maxentropic | chain file")

    def spec_opts(sp):
        chain_opts(sp)
        sp.add_argument("--n", type=int, required=True)
        sp.add_argument("--alpha", type=rational, required=True)
        sp.add_argument("--zeta", type=rational, required=True)
        sp.add_argument("--root", required=True)

    sp = sub.add_parser("analyze", help="validate a graph and report chain statistics")
    chain_opts(sp, graph_positional=True)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_analyze)

    sp = sub.add_parser("capacity", help="capacity and maxentropic chain")
    sp.add_argument("graph")
    sp.add_argument("--out", help="write the maxentropic chain file")
    sp.set_defaults(func=cmd_capacity)

    sp = sub.add_parser("quantize", help="n-integral approximation of a chain")
    chain_opts(sp)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_quantize)

    pool = sub.add_parser("pool", help="codebook construction").add_subparsers(dest="action", required=True)
    sp = pool.add_parser("build")
    spec_opts(sp)
    sp.add_argument("--limit", type=int)
    sp.add_argument("--sample", type=int, help="sample this many codewords instead of enumerating")
    sp.add_argument("--seed", type=seed_value, default=0)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_pool_build)
    sp = pool.add_parser("verify")
    chain_opts(sp)
    sp.add_argument("--codebook", required=True)
    sp.set_defaults(func=cmd_pool_verify)
    sp = pool.add_parser("rate")
    spec_opts(sp)
    sp.add_argument("--exact", action="store_true", help="also count the pool exactly")
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_pool_rate)

    bounds = sub.add_parser("bounds", help="bounds on pool and code sizes").add_subparsers(dest="action", required=True)
    sp = bounds.add_parser("finite")
    spec_opts(sp)
    sp.add_argument("--eps", type=rational, required=True)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_bounds_finite)
    sp = bounds.add_parser("asymptotic")
    chain_opts(sp)
    sp.add_argument("--alpha", type=rational, required=True)
    sp.add_argument("--zeta", type=rational, required=True)
    sp.add_argument("--eps", type=rational, required=True)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_bounds_asymptotic)

    sp = sub.add_parser("expurgate", help="extract an error-correcting subcode")
    chain_opts(sp)
    sp.add_argument("--codebook", required=True)
    sp.add_argument("--eps", type=rational, required=True)
    sp.add_argument("--mode", choices=("randomized", "greedy"), default="randomized")
    sp.add_argument("--seed", type=seed_value, default=0)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_expurgate)

    concat = sub.add_parser("concat", help="concatenated code").add_subparsers(dest="action", required=True)
    sp = concat.add_parser("plan")
    sp.add_argument("--graph", required=True)
    sp.add_argument("--chain", default="maxentropic")
    sp.add_argument("--inner", help="wccec file to build a manifest from")
    sp.add_argument("--K", dest="k", type=int)
    sp.add_argument("--c0", type=float, default=2.0)
    sp.add_argument("--target", type=int, help="target concatenated blocklength for scaling")
    sp.add_argument("--alpha", type=rational, default=Fraction(1, 2))
    sp.add_argument("--zeta", type=rational, default=Fraction(1, 10))
    sp.add_argument("--root", default=None)
    sp.add_argument("--out", help="manifest path")
    sp.set_defaults(func=cmd_concat_plan)
    sp = concat.add_parser("encode")
    sp.add_argument("--manifest", required=True)
    sp.add_argument("--graph", required=True)
    sp.add_argument("--message", required=True, help="K field symbols, space separated")
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_concat_encode)
    sp = concat.add_parser("decode")
    sp.add_argument("--manifest", required=True)
    sp.add_argument("--graph", required=True)
    grp = sp.add_mutually_exclusive_group(required=True)
    grp.add_argument("--word")
    grp.add_argument("--input")
    sp.set_defaults(func=cmd_concat_decode)

    sp = sub.add_parser("simulate", help="substitution-channel simulation of a concatenated code")
    sp.add_argument("--manifest", required=True)
    sp.add_argument("--graph", required=True)
    sp.add_argument("--p", type=rational, required=True)
    sp.add_argument("--trials", type=int, default=1000)
    sp.add_argument("--seed", type=seed_value, default=0)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_simulate)
    return p


def run_command(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.func is cmd_concat_plan and args.target is not None and args.root is None:
            parser.error("--root is required with --target")
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        args.func(args)
    except (DomainError, DecodeFailure, ValueError, OSError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


def main() -> None:
    sys.exit(run_command())


if __name__ == "__main__":
    main()
