"""Command line entry point: ``oric <subcommand> ...``.

Each subcommand runs one pipeline step and prints a deterministic report,
either as an aligned table or as tab-separated rows (``--format rows``).
Failures exit with status 1 and print one ``error<TAB>Kind<TAB>message``
line on stderr.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from pathlib import Path

from . import dataio, estimator, oracle, planner, synth
from .errors import MissingLabelColumn, OricError
from .patterns import Pattern


def _encoder_path(args) -> str:
    return args.encoder or f"{args.model}.encoder.json"


def _load_encoder(args):
    with open(_encoder_path(args)) as fh:
        return dataio.EncoderState.from_json(fh.read())


def _save_encoder(args, enc) -> None:
    with open(_encoder_path(args), "w") as fh:
        fh.write(enc.to_json() + "\n")


def render(header, rows, fmt: str) -> str:
    cells = [[_fmt(v) for v in r] for r in rows]
    if fmt == "rows":
        return "\n".join("\t".join(r) for r in [list(header)] + cells) + "\n"
    widths = [max([len(h)] + [len(r[i]) for r in cells]) for i, h in enumerate(header)]
    lines = ["  ".join(h.ljust(w) for h, w in zip(header, widths))]
    lines.append("  ".join("-" * w for w in widths))
    lines += ["  ".join(v.ljust(w) for v, w in zip(r, widths)) for r in cells]
    return "\n".join(lines) + "\n"


def _fmt(v) -> str:
    if isinstance(v, float):
        return f"{v:.6f}"
    if v is None:
        return "-"
    return str(v)


def _emit(args, text: str) -> None:
    out = getattr(args, "out", None)
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _add_hyper(p) -> None:
    d = estimator.OricConfig()
    p.add_argument("--chains", type=int, default=d.num_chains, help="chains per class and period (M)")
    p.add_argument("--max-length", type=int, default=d.max_length, help="maximum chain length (L)")
    p.add_argument("--max-tail-size", type=int, default=d.max_tail_size)
    p.add_argument("--d-freq", type=int, default=d.d_freq)
    p.add_argument("--d-conf", type=int, default=d.d_conf)
    p.add_argument("--gamma", type=float, default=d.gamma)
    p.add_argument("--seed", type=int, default=d.rng_seed)


def cmd_init(args) -> None:
    if args.schema:
        schema = [s for s in args.schema.split(",") if s]
    elif args.from_csv:
        with open(args.from_csv, newline="") as fh:
            header = next(csv.reader(fh))
        if args.label not in header:
            raise MissingLabelColumn(f"{args.from_csv}: no column named {args.label!r}")
        schema = [h for h in header if h != args.label]
    else:
        raise SystemExit("init needs --schema or --from-csv")
    config = estimator.OricConfig(args.chains, args.max_length, args.max_tail_size, args.seed,
                                  args.d_freq, args.d_conf, args.gamma)
    model = estimator.new_model(config, schema)
    size = dataio.save_model_file(model, args.model)
    _save_encoder(args, dataio.EncoderState(tuple(schema), args.rare_threshold))
    _emit(args, render(["model", "features", "bytes"], [[args.model, len(schema), size]], args.format))


def cmd_update(args) -> None:
    model = dataio.load_model_file(args.model)
    enc = _load_encoder(args)
    batch, enc = dataio.ingest_csv(args.data, args.label, enc, period=model.period + 1)
    rep = estimator.update(model, batch)
    size = dataio.save_model_file(model, args.model)
    _save_encoder(args, enc)
    header = ["period", "rows_neg", "rows_pos", "new_patterns", "evicted", "registry_size",
              "missing_classes", "model_bytes"]
    row = [rep.period, rep.rows_neg, rep.rows_pos, rep.new_patterns, rep.evicted, rep.registry_size,
           ",".join(map(str, rep.missing_classes)) or "-", size]
    _emit(args, render(header, [row], args.format))


def _selection(args, model):
    return estimator.select(model, d_conf=args.d_conf, d_freq=args.d_freq,
                            prune=not args.no_prune, keep_pruned=args.keep_pruned)


def _describe(pattern: Pattern, enc) -> str:
    if enc is None:
        return str(pattern)
    return "&".join(f"{enc.schema[f]}={enc.decode(f, c)}" for f, c in pattern.items)


def cmd_select(args) -> None:
    model = dataio.load_model_file(args.model)
    enc = _load_encoder(args) if os.path.exists(_encoder_path(args)) else None
    rows = [[i + 1, str(r.pattern), r.pattern.order, r.freq_pos, r.freq_neg, r.confidence,
             r.pruned_by, _describe(r.pattern, enc)]
            for i, r in enumerate(_selection(args, model))]
    header = ["rank", "pattern", "order", "freq_pos", "freq_neg", "confidence", "pruned_by", "decoded"]
    _emit(args, render(header, rows, args.format))


def cmd_emit(args) -> None:
    model = dataio.load_model_file(args.model)
    enc = _load_encoder(args)
    # emission must not change the persisted encoder
    batch, _ = dataio.ingest_csv(args.data, args.label, enc, period=model.period + 1)
    chosen = estimator.select(model, d_conf=args.d_conf, d_freq=args.d_freq)
    rates = dataio.emit_interaction_features(batch, chosen, args.features_out)
    rows = [[name, rate] for name, rate in rates.items()]
    _emit(args, render(["interaction", "positive_rate"], rows, args.format))


def cmd_plan(args) -> None:
    spec = planner.PlannerSpec(args.theta, args.eta1, args.eta2, args.p1, args.p2, args.horizon)
    res = planner.plan(spec, args.l_max)
    header = ["L_star", "M_star", "detect_prob_frequent", "detect_prob_infrequent", "multi_update_fp_bound"]
    _emit(args, render(header, [[res.L_star, res.M_star, res.detect_prob_frequent,
                                 res.detect_prob_infrequent, res.multi_update_fp_bound]], args.format))


def cmd_simulate(args) -> None:
    planted = synth.disjoint_pairs(args.planted)
    if 2 * args.planted > args.features:
        raise SystemExit("--planted needs two features per pattern")
    h = args.horizon
    pats = []
    for s in planted:
        pats.append(synth.PlantedPattern.constant(s, args.planted_pos, args.planted_neg, h))
    spec = synth.StreamSpec(args.features, args.categories, args.rows, h, args.positive_rate,
                            tuple(pats), args.seed)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    rows = []
    for t in range(1, h + 1):
        batch = synth.generate_period(spec, t)
        path = out_dir / f"period_{t:03d}.csv"
        dataio.write_batch_csv(batch, path, args.label)
        n_neg, n_pos = batch.class_counts()
        rows.append([t, str(path), n_neg, n_pos])
    truth = {"schema": list(spec.schema), "planted": [
        {"pattern": str(p.pattern), "pos": list(p.freq_schedule_pos), "neg": list(p.freq_schedule_neg)}
        for p in pats]}
    (out_dir / "planted.json").write_text(json.dumps(truth, indent=1) + "\n")
    _emit(args, render(["period", "path", "rows_neg", "rows_pos"], rows, args.format))


def _read_selection(path) -> list[str]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh, delimiter="\t")
        if reader.fieldnames is None or "pattern" not in reader.fieldnames:
            raise OricError(f"{path}: expected a rows-format report with a 'pattern' column")
        return [r["pattern"] for r in reader]


def cmd_eval_jaccard(args) -> None:
    a, b = _read_selection(args.a), _read_selection(args.b)
    j = oracle.jaccard(a, b)
    _emit(args, render(["size_a", "size_b", "intersection", "union", "jaccard"],
                       [[len(set(a)), len(set(b)), len(set(a) & set(b)), len(set(a) | set(b)), j]],
                       args.format))


def cmd_eval_exact(args) -> None:
    model = dataio.load_model_file(args.model)
    enc = _load_encoder(args)
    batch, _ = dataio.ingest_csv(args.data, args.label, enc, period=max(model.period, 1))
    chosen = estimator.select(model, d_conf=args.d_conf, d_freq=args.d_freq)
    exact = oracle.exact_scan(batch, [r.pattern for r in chosen])
    rows = []
    for i, r in enumerate(chosen):
        e = exact[r.pattern]
        rows.append([i + 1, str(r.pattern), r.freq_neg, e.freq_neg, r.freq_pos, e.freq_pos,
                     r.confidence, e.confidence])
    header = ["rank", "pattern", "est_freq_neg", "exact_freq_neg", "est_freq_pos", "exact_freq_pos",
              "est_confidence", "exact_confidence"]
    _emit(args, render(header, rows, args.format))


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="oric", description="Online random intersection chains.")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, model=True):
        if model:
            p.add_argument("--model", required=True, help="model file")
            p.add_argument("--encoder", help="encoder file (default: <model>.encoder.json)")
        p.add_argument("--format", choices=("table", "rows"), default="table")
        p.add_argument("--out", help="write the report here instead of stdout")

    p = sub.add_parser("init", help="create an empty model")
    common(p)
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--schema", help="comma-separated categorical feature names")
    g.add_argument("--from-csv", help="take feature names from this CSV header")
    p.add_argument("--label", default="label")
    p.add_argument("--rare-threshold", type=int, default=1,
                   help="categories seen fewer times share code 0")
    _add_hyper(p)
    p.set_defaults(func=cmd_init)

    p = sub.add_parser("update", help="fold one period's CSV into the model")
    common(p)
    p.add_argument("--data", required=True)
    p.add_argument("--label", default="label")
    p.set_defaults(func=cmd_update)

    def selection_flags(p):
        p.add_argument("--d-conf", type=int, default=None)
        p.add_argument("--d-freq", type=int, default=None)

    p = sub.add_parser("select", help="rank the currently detected interactions")
    common(p)
    selection_flags(p)
    p.add_argument("--no-prune", action="store_true", help="skip reluctant pruning")
    p.add_argument("--keep-pruned", action="store_true", help="list pruned entries with pruned_by")
    p.set_defaults(func=cmd_select)

    p = sub.add_parser("emit", help="write binary interaction features for a batch")
    common(p)
    selection_flags(p)
    p.add_argument("--data", required=True)
    p.add_argument("--label", default="label")
    p.add_argument("--features-out", required=True)
    p.set_defaults(func=cmd_emit)

    p = sub.add_parser("plan", help="choose chain length and count")
    common(p, model=False)
    p.add_argument("--theta", type=float, required=True)
    p.add_argument("--p1", type=float, required=True)
    p.add_argument("--p2", type=float, required=True)
    p.add_argument("--eta1", type=float, default=0.05)
    p.add_argument("--eta2", type=float, default=0.05)
    p.add_argument("--horizon", type=int, default=1)
    p.add_argument("--l-max", type=int, default=planner.L_MAX_DEFAULT)
    p.set_defaults(func=cmd_plan)

    p = sub.add_parser("simulate", help="write a synthetic stream as CSV batches")
    common(p, model=False)
    p.add_argument("--out-dir", required=True)
    p.add_argument("--features", type=int, default=23)
    p.add_argument("--categories", type=int, default=10)
    p.add_argument("--rows", type=int, default=10000)
    p.add_argument("--horizon", type=int, default=5)
    p.add_argument("--positive-rate", type=float, default=0.2)
    p.add_argument("--planted", type=int, default=5, help="number of planted order-2 patterns")
    p.add_argument("--planted-pos", type=float, default=0.5)
    p.add_argument("--planted-neg", type=float, default=0.1)
    p.add_argument("--label", default="label")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("eval", help="compare selections or check estimates against exact counts")
    esub = p.add_subparsers(dest="eval_command", required=True)
    q = esub.add_parser("jaccard", help="Jaccard index of two rows-format selection reports")
    common(q, model=False)
    q.add_argument("a")
    q.add_argument("b")
    q.set_defaults(func=cmd_eval_jaccard)
    q = esub.add_parser("exact", help="estimated vs exact frequency and confidence")
    common(q)
    selection_flags(q)
    q.add_argument("--data", required=True)
    q.add_argument("--label", default="label")
    q.set_defaults(func=cmd_eval_exact)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except OricError as exc:
        kind = getattr(exc, "kind", type(exc).__name__)
        print(f"error\t{kind}\t{' '.join(str(exc).split())}", file=sys.stderr)
        return 1
    except (OSError, ValueError) as exc:
        print(f"error\t{type(exc).__name__}\t{' '.join(str(exc).split())}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
