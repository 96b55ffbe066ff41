"""``seedsynth`` command line."""
from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from pathlib import Path

from .circuit import QubitTopology
from .errors import QasmError
from .instantiate import InstantiationConfig
from .qasm import emit_qasm, parse_qasm
from .synth import SearchConfig
from .templates import enumerate_templates

log = logging.getLogger("seedsynth")


def parse_topologies(text: str | None, n_qubits: int = 3) -> list[QubitTopology] | None:
    """``"012,021"`` -> line topologies with those vertex orders; ``None`` -> defaults."""
    if not text:
        return None
    out = []
    for part in text.split(","):
        order = tuple(int(ch) for ch in part.strip())
        if sorted(order) != list(range(n_qubits)):
            raise ValueError(f"topology {part!r} is not a labelling of {n_qubits} qubits")
        out.append(QubitTopology.line(order))
    return out


def parse_holdout(text: str | None) -> dict[str, list[int]]:
    """``"qft:5,tfim:4:6"`` -> {"qft": [5], "tfim": [4, 6]}."""
    out: dict[str, list[int]] = {}
    if not text:
        return out
    for part in text.split(","):
        fam, *widths = part.strip().split(":")
        if not fam or not widths:
            raise ValueError(f"bad holdout entry {part!r}; expected family:width[:width...]")
        out.setdefault(fam, []).extend(int(w) for w in widths)
    return out


def _ints(text: str) -> list[int]:
    return [int(x) for x in text.split(",") if x.strip()]


def _catalog(args):
    return enumerate_templates(3, args.k, parse_topologies(getattr(args, "topologies", None)))


def _search_cfg(args) -> SearchConfig:
    return SearchConfig(InstantiationConfig(epsilon=args.epsilon, rng_seed=args.seed),
                        depth_weight=args.depth_weight)


def cmd_templates(args) -> int:
    cat = _catalog(args)
    if args.out:
        cat.to_jsonl(args.out)
    print(len(cat))
    return 0


def cmd_optimize(args) -> int:
    from .pipeline import optimize

    try:
        circ = parse_qasm(Path(args.qasm_in).read_text())
    except QasmError as exc:
        print(f"error: {args.qasm_in}: {exc}", file=sys.stderr)
        return 2
    model = None
    if args.strategy == "learned":
        if not args.model:
            print("error: --strategy learned requires --model", file=sys.stderr)
            return 2
        from .recommend import Mlp

        model = Mlp.load(args.model)
    cat = _catalog(args)
    res = optimize(circ, cat, args.strategy, _search_cfg(args), model=model,
                   seeds_per_block=args.seeds_per_block, seed=args.seed, jobs=args.jobs)
    Path(args.out).write_text(emit_qasm(res.circuit))
    if args.metrics:
        res.metrics.write_csv(args.metrics, record_time=args.record_time)
    verify = res.report.to_json(Path(args.qasm_in).name)
    verify.update(holds=res.report.holds, block_count=len(res.partitioned.blocks),
                  epsilon=args.epsilon, summary=res.metrics.summary())
    verify_path = args.verify or str(Path(args.out).with_suffix(".verify.json"))
    Path(verify_path).write_text(json.dumps(verify, indent=2) + "\n")
    s = res.metrics.summary()
    print(f"blocks={s['blocks']} failed={s['failed_blocks']} mean_calls={s['mean_calls']:.2f} "
          f"cnots {s['cnot_before']}->{s['cnot_after']} total_bound={res.report.total_bound:.3e} "
          f"exact={res.report.exact_distance}")
    for r in res.metrics.records:
        if not r.ok:
            print(f"error: block {r.block} did not converge (best cost {r.cost:.3e})", file=sys.stderr)
    if not res.report.holds:
        print("error: exact distance exceeds the summed bound", file=sys.stderr)
    return 0 if res.ok else 1


def cmd_gen_dataset(args) -> int:
    from .recommend import benchmark_suite, generate_dataset, write_dataset

    cat = _catalog(args)
    suite = benchmark_suite(args.families.split(","), _ints(args.widths), args.instances, args.depth, args.seed)
    data, failures = generate_dataset(suite, cat, _search_cfg(args))
    write_dataset(args.out, data, len(cat.topologies))
    print(f"samples={len(data)} failures={failures}")
    return 0


def _load_data(path, n_tags):
    from .recommend import read_dataset

    if not Path(path).exists():
        raise FileNotFoundError(path)
    data = read_dataset(path, n_tags)
    if not data:
        raise ValueError(f"{path}: empty dataset")
    return data


def cmd_train(args) -> int:
    from .recommend import TrainConfig, new_model, split_holdout, topk_accuracy, train

    cat = _catalog(args)
    data = _load_data(args.data, len(cat.topologies))
    train_set, held = split_holdout(data, parse_holdout(args.holdout))
    if not train_set:
        raise ValueError("holdout removes every sample")
    model = new_model(cat, seed=args.seed)
    cfg = TrainConfig(epochs=args.epochs, learning_rate=args.lr, rng_seed=args.seed)
    hist = train(model, train_set, cfg)
    model.save(args.model)
    print(f"train={len(train_set)} held_out={len(held)} final_loss={hist['finetune'][-1]:.4f} "
          f"train_top1={topk_accuracy(model, train_set, 1):.3f}")
    return 0


def cmd_eval(args) -> int:
    from .pipeline import evaluate_holdout
    from .recommend import Mlp, pca_explained_variance, split_holdout

    cat = _catalog(args)
    data = _load_data(args.data, len(cat.topologies))
    holdout = parse_holdout(args.holdout)
    _, held = split_holdout(data, holdout) if holdout else ([], data)
    if not held:
        raise ValueError("no held-out samples to evaluate")
    model = Mlp.load(args.model)
    rep = evaluate_holdout(model, held, cat, _search_cfg(args), args.seeds_per_block, args.seed)
    if args.out:
        rep.write_csv(args.out)
    if args.pca_out:
        pca = pca_explained_variance([d.features for d in data])
        with open(args.pca_out, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["component_index", "cumulative_ratio"])
            for i, c in enumerate(pca.cumulative, start=1):
                w.writerow([i, repr(float(c))])
    s = rep.summary()
    print(f"held_out={s['blocks']} top1={s['top1']:.3f} top3={s['top3']:.3f} chance_top3={s['chance_top3']:.4f}")
    for t in s["top3_by_topology"]:
        print(f"  topology {t}: top1={s['top1_by_topology'][t]:.3f} top3={s['top3_by_topology'][t]:.3f}")
    for name in ("root", "learned", "random"):
        m = s[name]
        print(f"  {name}: mean_calls={m['mean_calls']:.2f} relative_cnot_ratio={m['relative_cnot_ratio']:.3f} "
              f"speedup_vs_root={m['speedup_vs_root']:.2f}")
    if args.summary:
        Path(args.summary).write_text(json.dumps(s, indent=2) + "\n")
    return 0


def cmd_bench_gen(args) -> int:
    from .benchmarks import generate

    c = generate(args.family, args.width, args.depth, args.seed)
    text = emit_qasm(c)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="seedsynth", description="Seeded bottom-up circuit synthesis.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, search=True):
        sp.add_argument("--k", type=int, default=8, help="max CNOTs per template")
        sp.add_argument("--topologies", help="comma-separated line labelings, e.g. 012,021,102")
        sp.add_argument("--seed", type=int, default=0)
        if search:
            sp.add_argument("--epsilon", type=float, default=1e-8)
            sp.add_argument("--depth-weight", type=float, default=0.01)

    sp = sub.add_parser("templates", help="export the template catalog as JSON lines")
    common(sp, search=False)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_templates)

    sp = sub.add_parser("optimize", help="resynthesize a QASM circuit block by block")
    common(sp)
    sp.add_argument("qasm_in")
    sp.add_argument("--out", required=True, help="optimized QASM")
    sp.add_argument("--metrics", help="metrics CSV (appended)")
    sp.add_argument("--verify", help="verification JSON (default: <out>.verify.json)")
    sp.add_argument("--strategy", choices=("root", "random", "learned"), default="root")
    sp.add_argument("--model")
    sp.add_argument("--seeds-per-block", type=int, default=3)
    sp.add_argument("--jobs", type=int, default=1)
    sp.add_argument("--record-time", action="store_true", help="fill wall_time_s in the metrics CSV")
    sp.set_defaults(func=cmd_optimize)

    sp = sub.add_parser("gen-dataset", help="label benchmark blocks by root-start synthesis")
    common(sp)
    sp.add_argument("--families", default="qft,tfim,random_layers")
    sp.add_argument("--widths", default="3,4,5,6")
    sp.add_argument("--instances", type=int, default=3)
    sp.add_argument("--depth", type=int, default=3)
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_gen_dataset)

    sp = sub.add_parser("train", help="train the seed recommender")
    common(sp, search=False)
    sp.add_argument("--data", required=True)
    sp.add_argument("--model", required=True, help="output model path")
    sp.add_argument("--holdout", help="family:width pairs excluded from training")
    sp.add_argument("--epochs", type=int, default=300)
    sp.add_argument("--lr", type=float, default=0.05)
    sp.set_defaults(func=cmd_train)

    sp = sub.add_parser("eval", help="held-out accuracy, call counts and PCA report")
    common(sp)
    sp.add_argument("--data", required=True)
    sp.add_argument("--model", required=True)
    sp.add_argument("--holdout", help="family:width pairs to evaluate (default: all samples)")
    sp.add_argument("--seeds-per-block", type=int, default=3)
    sp.add_argument("--out", help="per-block CSV")
    sp.add_argument("--pca-out", help="PCA CSV over all samples")
    sp.add_argument("--summary", help="summary JSON")
    sp.set_defaults(func=cmd_eval)

    sp = sub.add_parser("bench-gen", help="write a benchmark circuit as QASM")
    sp.add_argument("--family", required=True, choices=("qft", "tfim", "random_layers"))
    sp.add_argument("--width", type=int, required=True)
    sp.add_argument("--depth", type=int, default=3)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_bench_gen)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
