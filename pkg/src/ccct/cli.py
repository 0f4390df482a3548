"""``ccc`` command line.

Exit status: 0 success, 1 usage, 2 format, 3 capacity, 4 key/validation,
5 internal.
"""

from __future__ import annotations

import argparse
import contextlib
import sys
from pathlib import Path

import numpy as np

from . import gexfio, hyperlayer, netsim
from .errors import CCCError, FormatError, InternalError, InvalidArgument
from .keychain import MasterKey, Nonce, derive_seeds
from .linkcodec import Ciphertext, GraphMode, capacity, capacity_curve
from .membership import BloomFilter, bloom_build, validated_members
from .pipeline import ApiBundle, channel_order, read_members
from .linkcodec import decode, encode
from .selection import select_subcommunity


class UsageError(InvalidArgument):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


@contextlib.contextmanager
def stage(name):
    try:
        yield
    except CCCError as exc:
        if not hasattr(exc, "stage"):
            exc.stage = name
        raise
    except OSError as exc:
        err = FormatError(f"{exc.filename or ''}: {exc.strerror or exc}")
        err.stage = name
        raise err from exc


# shared argument handling

def _bundle(args):
    return ApiBundle.load(args.bundle) if getattr(args, "bundle", None) else None


def _pick(args, name, bundle, attr=None):
    value = getattr(args, name, None)
    if value is None and bundle is not None:
        value = getattr(bundle, attr or name)
    return value


def _keys(args, bundle):
    if not args.key:
        raise UsageError("--key is required")
    key = MasterKey.load(args.key)
    if args.nonce:
        nonce = Nonce.load(args.nonce)
    elif bundle is not None:
        nonce = bundle.nonce
    else:
        raise UsageError("--nonce (or --bundle) is required")
    return key, nonce


def _mode(args, bundle):
    if args.mode is not None:
        return GraphMode.parse(args.mode)
    if bundle is not None:
        return bundle.mode
    return GraphMode(False, False)


def _load_graph(path, mode, bundle=None, strict=True):
    doc = gexfio.read_gexf(path, strict=strict)
    dictionary = bundle.dictionary if bundle is not None else None
    return gexfio.graph_from_gexf(doc, dictionary, loops=mode.loops)


def _membership(args, bundle):
    community = read_members(args.community) if getattr(args, "community", None) else None
    bloom_path = _pick(args, "bloom", bundle, "bloom_path")
    bloom = BloomFilter.load(bloom_path) if bloom_path else None
    if community is None and bloom is None:
        raise UsageError("need --community or --bloom (or a bundle with a filter)")
    return community, bloom


def _add_channel_args(p, payload=True):
    p.add_argument("--graph", required=True, help="carrier GEXF file")
    p.add_argument("--key", help="key file (64 hex chars)")
    p.add_argument("--nonce", help="nonce file (128 hex chars)")
    p.add_argument("--bundle", help="API bundle JSON supplying nonce, filter, mode, s, bits")
    p.add_argument("--mode", choices=[m.name for m in GraphMode.all()])
    p.add_argument("--s", type=int, help="encoding sub-community size")
    p.add_argument("--bits", type=int, help="payload length in bits")
    p.add_argument("--community", help="community member file (one node id per line)")
    p.add_argument("--bloom", help="membership filter file")
    p.add_argument("--trivial-order", action="store_true", help="skip the keyed link permutation")
    p.add_argument("--scheme", choices=["nodes", "links"], default="nodes")
    p.add_argument("--lenient", action="store_true", help="tolerate unsupported GEXF elements")
    p.add_argument("--out", required=True)


def _order_for(args, graph, key, nonce, mode, bundle):
    s = _pick(args, "s", bundle)
    if s is None:
        raise UsageError("--s is required")
    community, bloom = _membership(args, bundle)
    return channel_order(graph, key, nonce, mode, s, community=community, bloom=bloom,
                         trivial=args.trivial_order, scheme=args.scheme)


# commands

def cmd_keygen(args):
    with stage("keygen"):
        key = MasterKey.generate()
        nonce = Nonce.generate()
        key.save(args.key_out)
        nonce.save(args.nonce_out)
    print(f"key written to {args.key_out}\nnonce written to {args.nonce_out}")
    return 0


def cmd_bloom_build(args):
    bundle = None
    key, nonce = _keys(args, bundle)
    mode = GraphMode.parse(args.mode) if args.mode else GraphMode(False, False)
    with stage("parse"):
        graph = _load_graph(args.graph, mode)
        members = read_members(args.community)
    with stage("bloom"):
        seeds = derive_seeds(nonce, key)
        bf = bloom_build([graph.attributes(v) for v in sorted(members)], seeds.bloom_seed,
                         size=args.size, hashes=args.hashes)
        bf.save(args.out)
    print(f"{bf.count} members inserted, fill ratio {bf.fill_ratio():.6f}")
    return 0


def cmd_bloom_query(args):
    with stage("parse"):
        bf = BloomFilter.load(args.bloom)
        graph = _load_graph(args.graph, GraphMode(False, args.loops))
    with stage("query"):
        if args.node:
            for v in args.node:
                print(f"{v} {'true' if graph.attributes(v) in bf else 'false'}")
        else:
            for v in validated_members(graph, bf):
                print(v)
    return 0


def cmd_select(args):
    key, nonce = _keys(args, None)
    with stage("select"):
        members = read_members(args.community)
        sub = select_subcommunity(members, args.s, derive_seeds(nonce, key).sel_seed)
    for v in sub:
        print(v)
    return 0


def cmd_encode(args):
    bundle = _bundle(args)
    key, nonce = _keys(args, bundle)
    mode = _mode(args, bundle)
    with stage("parse"):
        graph = _load_graph(args.graph, mode, bundle, strict=not args.lenient)
        raw = Path(args.payload).read_bytes()
        bits = _pick(args, "bits", bundle)
        payload = Ciphertext.from_bytes(raw, bits)
    with stage("order"):
        order = _order_for(args, graph, key, nonce, mode, bundle)
    with stage("encode"):
        changes = encode(graph, order, payload)
        text = gexfio.graph_to_text(graph, bundle.dictionary if bundle else None)
        Path(args.out).write_text(text, encoding="utf-8")
    if args.verify:
        with stage("verify"):
            back = _load_graph(args.out, mode, bundle)
            if decode(back, order, len(payload)) != payload:
                raise InternalError("verification failed: decoded payload differs")
    print(f"{len(payload)} bits encoded over {len(order)} links, {changes} links changed")
    return 0


def cmd_decode(args):
    bundle = _bundle(args)
    key, nonce = _keys(args, bundle)
    mode = _mode(args, bundle)
    with stage("parse"):
        graph = _load_graph(args.graph, mode, bundle, strict=not args.lenient)
    with stage("order"):
        order = _order_for(args, graph, key, nonce, mode, bundle)
    with stage("decode"):
        bits = _pick(args, "bits", bundle)
        ct = decode(graph, order, bits)
        Path(args.out).write_bytes(ct.to_bytes())
    print(f"{len(ct)} bits decoded")
    return 0


def cmd_capacity(args):
    mode = GraphMode.parse(args.mode)
    with stage("capacity"):
        print(capacity(mode, args.s))
        if args.plot:
            lo = 1 if mode.loops else 2
            sizes = sorted(set(np.unique(np.geomspace(lo, max(args.s, lo), 200).astype(int)).tolist()))
            rows = capacity_curve(mode, sizes)
            with open(args.plot, "w", encoding="utf-8") as fh:
                fh.write(f"# s log2_bits ({mode.name})\n")
                for s, lb in rows:
                    fh.write(f"{s} {lb:.6f}\n")
    return 0


def _hyper_plan(args, h, chosen, mode):
    if isinstance(chosen[0], int):
        key, nonce = _keys(args, None)
        seeds = derive_seeds(nonce, key)
        return hyperlayer.select_plan(h, chosen, mode, seeds.sel_seed, seeds.perm_seed)
    perm_seed = None
    if args.key:
        key, nonce = _keys(args, None)
        perm_seed = derive_seeds(nonce, key).perm_seed
    return hyperlayer.build_plan(h, chosen, mode, perm_seed)


def cmd_hyper_encode(args):
    with stage("parse"):
        h, chosen, mode, payload_paths, bits = hyperlayer.load_plan_file(args.plan)
        graph = _load_graph(args.graph, mode)
    with stage("plan"):
        plan = _hyper_plan(args, h, chosen, mode)
    with stage("parse"):
        payloads = []
        for path, n in zip(payload_paths, bits):
            payloads.append(Ciphertext([]) if path is None else Ciphertext.from_bytes(Path(path).read_bytes(), n))
    with stage("encode"):
        changes = hyperlayer.encode_multi(plan, graph, payloads)
        Path(args.out).write_text(gexfio.graph_to_text(graph), encoding="utf-8")
    print(f"{len(payloads)} payloads encoded, {changes} links changed")
    return 0


def cmd_hyper_decode(args):
    with stage("parse"):
        h, chosen, mode, payload_paths, bits = hyperlayer.load_plan_file(args.plan)
        graph = _load_graph(args.graph, mode)
    with stage("plan"):
        plan = _hyper_plan(args, h, chosen, mode)
    with stage("decode"):
        lengths = [cap if n is None else n for n, cap in zip(bits, plan.capacities)]
        cts = hyperlayer.decode_multi(plan, graph, lengths)
        out = Path(args.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        for level, ct in enumerate(cts):
            (out / f"level{level}.bin").write_bytes(ct.to_bytes())
            print(f"level{level} {ct}")
    return 0


def cmd_simulate(args):
    with stage("config"):
        if args.config:
            spec, extra = netsim.load_scenario_config(args.config)
        else:
            spec, extra = netsim.DESK_SCALE, {}
        s = args.s or extra.get("s", 237)
        nbits = args.payload_bits or extra.get("payload_bits", 4096)
        mode = GraphMode(spec.directed, bool(extra.get("loops", False)))
        key = MasterKey.load(args.key) if args.key else MasterKey.generate()
        nonce = Nonce.load(args.nonce) if args.nonce else Nonce.generate()
        if args.payload:
            payload = Ciphertext.from_bytes(Path(args.payload).read_bytes(), args.payload_bits)
        else:
            payload = Ciphertext.random(nbits, np.random.default_rng(spec.seed + 1))
    with stage("scenario"):
        report, _, _ = netsim.run_scenario(spec, payload, nonce, key, s, mode,
                                           scheme=extra.get("scheme", "nodes"), dump_dir=args.dump_dir)
    text = report.to_text()
    if args.report:
        Path(args.report).write_text(text, encoding="utf-8")
    sys.stdout.write(text)
    return 0 if report.roundtrip_ok else 4


def cmd_churn(args):
    key, nonce = _keys(args, None)
    mode = GraphMode.parse(args.mode)
    with stage("parse"):
        graph = _load_graph(args.graph, mode)
        members = read_members(args.community)
    with stage("churn"):
        from .graphcore import CommunityDescriptor
        community = CommunityDescriptor(frozenset(members))
        sub = select_subcommunity(members, args.s, derive_seeds(nonce, key).sel_seed)
        rep = netsim.churn(graph, community, sub, args.steps, args.rate, args.seed)
        Path(args.out).write_text(gexfio.graph_to_text(graph), encoding="utf-8")
    print(f"steps={rep.steps} toggled={rep.toggled} skipped={rep.skipped} "
          f"invariant_violations={rep.invariant_violations}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ccc", description="Community covert channel toolkit")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser, required=True)

    p = sub.add_parser("keygen", help="generate a key and a nonce file")
    p.add_argument("--key-out", required=True)
    p.add_argument("--nonce-out", required=True)
    p.set_defaults(func=cmd_keygen)

    pb = sub.add_parser("bloom", help="membership filter").add_subparsers(
        dest="bloom_command", parser_class=_Parser, required=True)
    p = pb.add_parser("build")
    p.add_argument("--graph", required=True)
    p.add_argument("--community", required=True)
    p.add_argument("--key", required=True)
    p.add_argument("--nonce", required=True)
    p.add_argument("--mode", choices=[m.name for m in GraphMode.all()])
    p.add_argument("--size", type=int, default=1 << 20)
    p.add_argument("--hashes", type=int, default=64)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_bloom_build)
    p = pb.add_parser("query")
    p.add_argument("--bloom", required=True)
    p.add_argument("--graph", required=True)
    p.add_argument("--node", type=int, action="append")
    p.add_argument("--loops", action="store_true")
    p.set_defaults(func=cmd_bloom_query)

    p = sub.add_parser("select", help="print the keyed encoding sub-community")
    p.add_argument("--community", required=True)
    p.add_argument("--s", type=int, required=True)
    p.add_argument("--key", required=True)
    p.add_argument("--nonce", required=True)
    p.set_defaults(func=cmd_select)

    p = sub.add_parser("encode", help="write a payload into a carrier graph")
    _add_channel_args(p)
    p.add_argument("--payload", required=True, help="payload bytes")
    p.add_argument("--verify", action="store_true", help="decode the output and compare")
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("decode", help="read a payload out of a carrier graph")
    _add_channel_args(p)
    p.set_defaults(func=cmd_decode)

    p = sub.add_parser("capacity", help="bits available on an s-member sub-community")
    p.add_argument("--mode", required=True, choices=[m.name for m in GraphMode.all()])
    p.add_argument("--s", type=int, required=True)
    p.add_argument("--plot", help="write (s, log2 bits) rows up to s to this file")
    p.set_defaults(func=cmd_capacity)

    ph = sub.add_parser("hyper", help="multi-level channels").add_subparsers(
        dest="hyper_command", parser_class=_Parser, required=True)
    for name, func in (("encode", cmd_hyper_encode), ("decode", cmd_hyper_decode)):
        p = ph.add_parser(name)
        p.add_argument("--plan", required=True)
        p.add_argument("--graph", required=True)
        p.add_argument("--key")
        p.add_argument("--nonce")
        if name == "encode":
            p.add_argument("--out", required=True)
        else:
            p.add_argument("--out-dir", required=True)
        p.set_defaults(func=func)

    p = sub.add_parser("simulate", help="run an end-to-end cover-network scenario")
    p.add_argument("--config", help="scenario JSON (defaults to the desk-scale replay)")
    p.add_argument("--key")
    p.add_argument("--nonce")
    p.add_argument("--s", type=int)
    p.add_argument("--payload")
    p.add_argument("--payload-bits", type=int)
    p.add_argument("--report")
    p.add_argument("--dump-dir")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("churn", help="rewire links outside the encoding sub-community")
    p.add_argument("--graph", required=True)
    p.add_argument("--community", required=True)
    p.add_argument("--key", required=True)
    p.add_argument("--nonce", required=True)
    p.add_argument("--mode", required=True, choices=[m.name for m in GraphMode.all()])
    p.add_argument("--s", type=int, required=True)
    p.add_argument("--steps", type=int, default=1)
    p.add_argument("--rate", type=float, default=0.01)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_churn)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CCCError as exc:
        where = getattr(exc, "stage", args.command)
        print(f"ccc: error[{where}]: {exc}", file=sys.stderr)
        return exc.exit_code
    except Exception as exc:  # noqa: BLE001
        print(f"ccc: internal error[{args.command}]: {exc!r}", file=sys.stderr)
        return InternalError.exit_code


if __name__ == "__main__":
    sys.exit(main())
