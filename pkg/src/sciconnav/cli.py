"""Command-line entry point wiring the pipeline into reproducible commands.

Subcommands: ingest, classify, train, validate, analogy, nav {path, hist,
centrality, odds}, serve. Every artifact-producing run writes one manifest
(resolved config, input digests, output paths, seed, timestamp) alongside its
outputs. Exit codes: 0 success, 1 domain error, 2 usage error.

Option precedence: command-line flags > --config JSON file > built-in
defaults. SCICONNAV_DATA_DIR sets the default artifact root.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from datetime import datetime, timezone
from pathlib import Path

from . import corpus as corpus_mod
from . import embed as embed_mod
from . import navgraph as nav_mod
from . import semantics as sem_mod
from . import taxonomy as tax_mod
from .errors import SciConNavError

DEFAULTS = {
    "min_pubs": 50,
    "dim": 24,
    "window": 5,
    "negatives": 5,
    "epochs": 5,
    "min_count": 5,
    "subsample": 1e-3,
    "lr": 0.025,
    "seed": 1,
    "workers": 1,
    "top_n": 20000,
    "steps": 1,
    "pivots": None,
    "port": 8040,
    "samples": 10000,
    "top_ks": "200,500,1000,1500,2000",
    "k": 20,
}


def data_root() -> Path:
    return Path(os.environ.get("SCICONNAV_DATA_DIR", "sciconnav_data"))


def sha256_file(path: Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


def write_manifest(
    command: str,
    anchor: Path,
    config: dict,
    inputs: list[Path],
    outputs: list[Path],
    seed: int | None = None,
) -> Path:
    """One manifest per run, written alongside the run's outputs."""
    if anchor.is_dir():
        manifest_path = anchor / f"{command.replace(' ', '_')}.manifest.json"
    else:
        manifest_path = anchor.with_name(anchor.name + ".manifest.json")
    payload = {
        "command": command,
        "config": config,
        "inputs": {str(p): sha256_file(Path(p)) for p in inputs},
        "outputs": [str(p) for p in outputs],
        "seed": seed,
        "timestamp": datetime.now(timezone.utc).isoformat(),
    }
    with open(manifest_path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")
    return manifest_path


class _Resolver:
    """flags > config file > defaults."""

    def __init__(self, args: argparse.Namespace):
        self.args = args
        self.config: dict = {}
        if getattr(args, "config", None):
            with open(args.config, encoding="utf-8") as fh:
                self.config = json.load(fh)
        self.resolved: dict = {}

    def get(self, key: str, default=None):
        value = getattr(self.args, key, None)
        if value is None:
            value = self.config.get(key, DEFAULTS.get(key, default) if default is None else default)
        self.resolved[key] = value
        return value


def _out_path(resolver: _Resolver, default_name: str) -> Path:
    out = resolver.get("out", default=None)
    if out is None:
        root = data_root()
        root.mkdir(parents=True, exist_ok=True)
        out = root / default_name
        resolver.resolved["out"] = str(out)
    return Path(out)


def _load_graph_inputs(resolver: _Resolver):
    concepts = Path(resolver.get("concepts"))
    edges = Path(resolver.get("edges"))
    embeddings = Path(resolver.get("embeddings"))
    taxonomy = tax_mod.load_taxonomy(concepts, edges)
    space = embed_mod.load_text(embeddings)
    classification_path = resolver.get("classification", default="")
    if classification_path:
        assignment = tax_mod.read_classification(Path(classification_path))
    else:
        assignment = tax_mod.partition_concepts(taxonomy)
    top_n = resolver.get("top_n")
    available = len([cid for cid in taxonomy.concepts if cid in space])
    if getattr(resolver.args, "top_n", None) is None and "top_n" not in resolver.config:
        top_n = min(top_n, available)
        resolver.resolved["top_n"] = top_n
    min_works = resolver.get("min_works", default=0) or None
    graph = nav_mod.build_graph(space, taxonomy, top_n=top_n, min_works=min_works)
    inputs = [concepts, edges, embeddings]
    if classification_path:
        inputs.append(Path(classification_path))
    return taxonomy, space, assignment, graph, inputs


def cmd_ingest(args: argparse.Namespace) -> int:
    resolver = _Resolver(args)
    works = Path(resolver.get("works"))
    min_pubs = resolver.get("min_pubs")
    presort = bool(resolver.get("presort", default=False))
    out = _out_path(resolver, "corpus.txt")
    corpus = corpus_mod.build_trajectories(works, min_pubs=min_pubs, presort=presort)
    out.parent.mkdir(parents=True, exist_ok=True)
    corpus.save(out)
    stats = corpus_mod.corpus_stats(corpus)
    print(
        f"authors={stats.authors} tokens={stats.tokens} vocabulary={stats.vocab_size} "
        f"seq_len_q5/q50/q95={stats.seq_len_q5:.0f}/{stats.seq_len_q50:.0f}/{stats.seq_len_q95:.0f}"
    )
    write_manifest("ingest", out, resolver.resolved, [works], [out])
    return 0


def cmd_classify(args: argparse.Namespace) -> int:
    resolver = _Resolver(args)
    concepts = Path(resolver.get("concepts"))
    edges = Path(resolver.get("edges"))
    out = _out_path(resolver, "classification.tsv")
    taxonomy = tax_mod.load_taxonomy(concepts, edges)
    report = taxonomy.load_report
    result = tax_mod.partition_concepts(taxonomy)
    out.parent.mkdir(parents=True, exist_ok=True)
    tax_mod.write_classification(result, taxonomy, out)
    print(
        f"concepts={report.total_concepts} retained={report.retained_concepts} "
        f"removed={report.removed_count} roots={report.n_roots}"
    )
    print(
        "partition "
        + " ".join(f"{name}={count}" for name, count in result.summary.items())
    )
    write_manifest("classify", out, resolver.resolved, [concepts, edges], [out])
    return 0


def cmd_train(args: argparse.Namespace) -> int:
    resolver = _Resolver(args)
    corpus_path = resolver.get("corpus", default="")
    works_path = resolver.get("works", default="")
    if corpus_path:
        corpus = corpus_mod.TrajectoryCorpus.load(Path(corpus_path))
        inputs = [Path(corpus_path)]
    elif works_path:
        corpus = corpus_mod.build_trajectories(Path(works_path), min_pubs=resolver.get("min_pubs"))
        inputs = [Path(works_path)]
    else:
        raise SciConNavError("train needs --corpus or --works")
    config = embed_mod.TrainConfig(
        dim=resolver.get("dim"),
        window=resolver.get("window"),
        negatives=resolver.get("negatives"),
        epochs=resolver.get("epochs"),
        initial_learning_rate=resolver.get("lr"),
        min_count=resolver.get("min_count"),
        subsample_threshold=resolver.get("subsample"),
        seed=resolver.get("seed"),
        workers=resolver.get("workers"),
    )
    out = _out_path(resolver, "embeddings.txt")
    space = embed_mod.train_sgns(corpus, config)
    out.parent.mkdir(parents=True, exist_ok=True)
    embed_mod.save_text(space, out)
    outputs = [out]
    if resolver.get("binary", default=False):
        binary_out = out.with_suffix(".bin")
        embed_mod.save_binary(space, binary_out)
        outputs.append(binary_out)
    print(f"trained {len(space)} x {space.dim} vectors -> {out}")
    write_manifest("train", out, resolver.resolved, inputs, outputs, seed=config.seed)
    return 0


def cmd_validate(args: argparse.Namespace) -> int:
    resolver = _Resolver(args)
    concepts = Path(resolver.get("concepts"))
    edges = Path(resolver.get("edges"))
    embeddings = Path(resolver.get("embeddings"))
    out_dir = Path(resolver.get("out", default=str(data_root() / "validation")))
    resolver.resolved["out"] = str(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    taxonomy = tax_mod.load_taxonomy(concepts, edges)
    space = embed_mod.load_text(embeddings)
    assignment = tax_mod.partition_concepts(taxonomy)
    names = {cid: c.name for cid, c in taxonomy.concepts.items()}
    groups_path = resolver.get("groups", default="")
    groups = sem_mod.load_groups_config(Path(groups_path)) if groups_path else None

    inputs = [concepts, edges, embeddings]
    outputs: list[Path] = []
    summary: dict = {"propensity": {}, "axes": {}, "skipped_axes": {}}
    for mode, stem in ((sem_mod.MODE_CLASSIFIABLE, "propensity_s_plus"), (sem_mod.MODE_INDISTINGUISHABLE, "propensity_m_minus")):
        try:
            report = sem_mod.propensity_report(space, assignment, mode)
        except SciConNavError as exc:
            summary["propensity"][mode] = {"skipped": str(exc)}
            continue
        tsv = out_dir / f"{stem}.tsv"
        sem_mod.write_report_tsv(report.rows, tsv, names)
        outputs.append(tsv)
        js = out_dir / f"{stem}.json"
        with open(js, "w", encoding="utf-8") as fh:
            json.dump(
                {
                    "mode": report.mode,
                    "rows": sem_mod.report_to_json(report.rows, names),
                    "radar": {
                        g: {r: list(q) for r, q in per.items()} for g, per in report.radar.items()
                    },
                    "shift": report.shift,
                    "p_value": report.p_value,
                    "in_median": report.in_median,
                    "out_median": report.out_median,
                    "skipped_roots": list(report.skipped_roots),
                },
                fh,
                indent=2,
            )
            fh.write("\n")
        outputs.append(js)
        summary["propensity"][mode] = {
            "shift": report.shift,
            "p_value": report.p_value,
            "skipped_roots": list(report.skipped_roots),
        }
        print(f"propensity {mode}: shift={report.shift:.4f} p={report.p_value:.3g}")

    axes_pairs = sem_mod.DEFAULT_AXES
    for from_group, to_group in axes_pairs:
        try:
            axis = sem_mod.build_axis(space, assignment, from_group, to_group, groups=groups, root_names=names)
            report = sem_mod.axis_projection_report(space, assignment, axis)
        except SciConNavError as exc:
            summary["skipped_axes"][f"{from_group}_to_{to_group}"] = str(exc)
            continue
        tsv = out_dir / f"projection_{axis.name}.tsv"
        sem_mod.write_report_tsv(report.rows, tsv, names)
        outputs.append(tsv)
        summary["axes"][axis.name] = {
            "rows": sem_mod.report_to_json(report.rows, names),
        }
        print(f"axis {axis.name}: {len(report.rows)} discipline rows")

    summary_path = out_dir / "validation_summary.json"
    with open(summary_path, "w", encoding="utf-8") as fh:
        json.dump(summary, fh, indent=2)
        fh.write("\n")
    outputs.append(summary_path)
    write_manifest("validate", out_dir, resolver.resolved, inputs, outputs)
    return 0


def cmd_analogy(args: argparse.Namespace) -> int:
    resolver = _Resolver(args)
    embeddings = Path(resolver.get("embeddings"))
    space = embed_mod.load_text(embeddings)
    seed_concept = args.seed_concept
    axis_from = resolver.get("from_id")
    axis_to = resolver.get("to_id")
    steps = resolver.get("steps")
    if args.pos and args.neg:
        raise SciConNavError("choose at most one of --pos / --neg")
    direction = "+" if args.pos else "-" if args.neg else None
    payload = run_analogy(space, seed_concept, axis_from, axis_to, direction, steps)
    out = _out_path(resolver, "analogy.json")
    out.parent.mkdir(parents=True, exist_ok=True)
    with open(out, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")
    if payload.get("result"):
        print(f"{payload['result']['id']} (similarity {payload['result']['similarity']:.4f})")
    else:
        print(f"expanded {len(payload['nodes'])} nodes / {len(payload['edges'])} edges")
    write_manifest("analogy", out, resolver.resolved, [embeddings], [out])
    return 0


def run_analogy(
    space: embed_mod.EmbeddingSpace,
    seed_concept: str,
    axis_from: str,
    axis_to: str,
    direction: str | None,
    steps: int,
) -> dict:
    """Shared analogy payload builder (CLI and service produce identical bodies).

    With a direction, repeatedly step from the last result (a chain); without
    one, expand both directions breadth-first to the given depth.
    """
    if steps < 0:
        raise SciConNavError(f"steps must be >= 0, got {steps}")
    if direction is not None:
        nodes = [{"id": seed_concept, "depth": 0}]
        edges = []
        result = None
        current = seed_concept
        for level in range(1, steps + 1):
            rid, sim = sem_mod.analogy_infer(space, current, axis_from, axis_to, direction)
            if all(n["id"] != rid for n in nodes):
                nodes.append({"id": rid, "depth": level})
            edges.append({"from": current, "to": rid, "sign": direction})
            result = {"id": rid, "similarity": sim}
            current = rid
        return {
            "seed": seed_concept,
            "axis": [axis_from, axis_to],
            "mode": "chain",
            "direction": direction,
            "steps": steps,
            "nodes": nodes,
            "edges": edges,
            "result": result,
        }
    graph = sem_mod.analogy_expand(space, seed_concept, axis_from, axis_to, depth=steps)
    return {
        "seed": seed_concept,
        "axis": [axis_from, axis_to],
        "mode": "expand",
        "direction": None,
        "steps": steps,
        "nodes": [{"id": cid, "depth": depth} for cid, depth in graph.nodes.items()],
        "edges": [{"from": f, "to": t, "sign": s} for f, t, s in graph.edges],
        "result": None,
    }


def cmd_nav_path(args: argparse.Namespace) -> int:
    resolver = _Resolver(args)
    _, _, _, graph, inputs = _load_graph_inputs(resolver)
    source = resolver.get("from_id")
    target = resolver.get("to_id")
    result = nav_mod.shortest_path(graph, source, target)
    out = _out_path(resolver, "path.json")
    out.parent.mkdir(parents=True, exist_ok=True)
    nav_mod.write_path_json(result, out)
    print(" -> ".join(result.nodes))
    print(f"distance={result.distance:.4f} steps={result.steps}")
    write_manifest("nav path", out, resolver.resolved, inputs, [out])
    return 0


def cmd_nav_hist(args: argparse.Namespace) -> int:
    resolver = _Resolver(args)
    _, _, assignment, graph, inputs = _load_graph_inputs(resolver)
    samples = resolver.get("samples")
    seed = resolver.get("seed")
    hist = nav_mod.step_size_histogram(graph, samples=samples, seed=seed, assignment=assignment)
    out = _out_path(resolver, "step_histogram.tsv")
    out.parent.mkdir(parents=True, exist_ok=True)
    nav_mod.write_histogram_tsv(hist, out)
    below5 = hist.fraction_below(5)
    print(f"pairs={hist.n_pairs} fraction_below_5_steps={below5:.4f}")
    write_manifest("nav hist", out, resolver.resolved, inputs, [out], seed=seed)
    return 0


def _compute_centrality(resolver: _Resolver, graph) -> nav_mod.CentralityReport:
    measure = resolver.get("measure", default="closeness")
    if measure == "closeness":
        return nav_mod.closeness_centrality(graph)
    if measure == "betweenness":
        pivots = resolver.get("pivots")
        seed = resolver.get("seed")
        return nav_mod.betweenness_centrality(graph, pivots=pivots, seed=seed)
    raise SciConNavError(f"unknown measure {measure!r} (closeness|betweenness)")


def cmd_nav_centrality(args: argparse.Namespace) -> int:
    resolver = _Resolver(args)
    _, _, _, graph, inputs = _load_graph_inputs(resolver)
    report = _compute_centrality(resolver, graph)
    out = _out_path(resolver, f"centrality_{report.measure}.tsv")
    out.parent.mkdir(parents=True, exist_ok=True)
    nav_mod.write_centrality_tsv(report, out)
    mode = report.exactness if report.pivots is None else f"{report.exactness} (p={report.pivots})"
    print(f"{report.measure} over {graph.n} nodes [{mode}]; top: {report.ranking[0]}")
    write_manifest("nav centrality", out, resolver.resolved, inputs, [out], seed=report.seed)
    return 0


def cmd_nav_odds(args: argparse.Namespace) -> int:
    resolver = _Resolver(args)
    _, _, assignment, graph, inputs = _load_graph_inputs(resolver)
    report = _compute_centrality(resolver, graph)
    top_ks = [int(x) for x in str(resolver.get("top_ks")).split(",") if x]
    rows = nav_mod.centrality_odds_table(report, assignment, top_ks)
    out = _out_path(resolver, f"odds_{report.measure}.tsv")
    out.parent.mkdir(parents=True, exist_ok=True)
    nav_mod.write_odds_tsv(rows, out)
    for row in rows:
        odds = f"{row.odds:.2f}" if row.odds is not None else "NA"
        print(f"top {row.top_k}: M={row.count_m} S={row.count_s} odds={odds}")
    write_manifest("nav odds", out, resolver.resolved, inputs, [out], seed=report.seed)
    return 0


def cmd_serve(args: argparse.Namespace) -> int:
    from . import service as service_mod

    resolver = _Resolver(args)
    directory = Path(resolver.get("data_dir", default=str(data_root())))
    port = resolver.get("port")
    groups_path = resolver.get("groups", default="")
    top_n = getattr(args, "top_n", None)
    bundle = service_mod.ArtifactBundle.load(
        directory,
        top_n=top_n,
        groups_path=Path(groups_path) if groups_path else None,
    )
    service_mod.serve(bundle, port=port)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sciconnav",
        description="Knowledge-navigation engine over concept embeddings",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--config", help="JSON config file (flags override it)")
        p.add_argument("--out", help="output path (defaults under the artifact root)")

    p = sub.add_parser("ingest", help="build trajectories from a works TSV")
    common(p)
    p.add_argument("--works", required=True)
    p.add_argument("--min-pubs", dest="min_pubs", type=int)
    p.add_argument("--presort", action="store_true", default=None)
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("classify", help="classify concepts against the taxonomy")
    common(p)
    p.add_argument("--concepts", required=True)
    p.add_argument("--edges", required=True)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("train", help="train embeddings on a corpus")
    common(p)
    p.add_argument("--corpus")
    p.add_argument("--works")
    p.add_argument("--min-pubs", dest="min_pubs", type=int)
    p.add_argument("--dim", type=int)
    p.add_argument("--window", type=int)
    p.add_argument("--negatives", type=int)
    p.add_argument("--epochs", type=int)
    p.add_argument("--min-count", dest="min_count", type=int)
    p.add_argument("--subsample", type=float)
    p.add_argument("--lr", type=float)
    p.add_argument("--seed", type=int)
    p.add_argument("--workers", type=int)
    p.add_argument("--binary", action="store_true", default=None, help="also write the binary variant")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("validate", help="propensity and axis-projection reports")
    common(p)
    p.add_argument("--concepts", required=True)
    p.add_argument("--edges", required=True)
    p.add_argument("--embeddings", required=True)
    p.add_argument("--groups", help="JSON groups config")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("analogy", help="analogy inference from a seed concept")
    common(p)
    p.add_argument("seed_concept")
    p.add_argument("--embeddings", required=True)
    p.add_argument("--from", dest="from_id", required=True, help="axis start concept")
    p.add_argument("--to", dest="to_id", required=True, help="axis end concept")
    p.add_argument("--pos", action="store_true", help="step along the positive direction")
    p.add_argument("--neg", action="store_true", help="step along the negative direction")
    p.add_argument("--steps", type=int)
    p.set_defaults(func=cmd_analogy)

    p = sub.add_parser("nav", help="navigation-graph analytics")
    nav_sub = p.add_subparsers(dest="nav_command", required=True)

    def nav_common(np_: argparse.ArgumentParser) -> None:
        common(np_)
        np_.add_argument("--concepts", required=True)
        np_.add_argument("--edges", required=True)
        np_.add_argument("--embeddings", required=True)
        np_.add_argument("--classification", help="reuse an exported classification TSV")
        np_.add_argument("--top-n", dest="top_n", type=int)
        np_.add_argument("--min-works", dest="min_works", type=int)

    p2 = nav_sub.add_parser("path", help="weighted shortest path")
    nav_common(p2)
    p2.add_argument("--from", dest="from_id", required=True)
    p2.add_argument("--to", dest="to_id", required=True)
    p2.set_defaults(func=cmd_nav_path)

    p2 = nav_sub.add_parser("hist", help="step-size histogram over sampled pairs")
    nav_common(p2)
    p2.add_argument("--samples", type=int)
    p2.add_argument("--seed", type=int)
    p2.set_defaults(func=cmd_nav_hist)

    p2 = nav_sub.add_parser("centrality", help="closeness or betweenness scores")
    nav_common(p2)
    p2.add_argument("--measure", choices=["closeness", "betweenness"])
    p2.add_argument("--pivots", type=int)
    p2.add_argument("--seed", type=int)
    p2.set_defaults(func=cmd_nav_centrality)

    p2 = nav_sub.add_parser("odds", help="interdisciplinary odds of top concepts")
    nav_common(p2)
    p2.add_argument("--measure", choices=["closeness", "betweenness"])
    p2.add_argument("--pivots", type=int)
    p2.add_argument("--seed", type=int)
    p2.add_argument("--top-ks", dest="top_ks")
    p2.set_defaults(func=cmd_nav_odds)

    p = sub.add_parser("serve", help="serve the query API over an artifact bundle")
    p.add_argument("--config", help="JSON config file (flags override it)")
    p.add_argument("--data-dir", dest="data_dir")
    p.add_argument("--port", type=int)
    p.add_argument("--top-n", dest="top_n", type=int)
    p.add_argument("--groups")
    p.set_defaults(func=cmd_serve)

    return parser


def run(argv: list[str]) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    try:
        return args.func(args)
    except SciConNavError as exc:
        print(str(exc), file=sys.stderr)
        return 1


def main() -> None:
    raise SystemExit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
