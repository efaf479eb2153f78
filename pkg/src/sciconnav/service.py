"""Stateless JSON query API over a frozen artifact bundle.

The bundle (taxonomy, classification, embeddings, navigation graph, axes,
2D map) loads once, digest-checked, and is immutable while served; handlers
share it read-only, and a reload builds a fresh bundle and swaps the
reference atomically between requests.
"""

from __future__ import annotations

import hashlib
import json
import threading
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from . import navgraph as nav_mod
from . import semantics as sem_mod
from .cli import run_analogy, sha256_file
from .embed import EmbeddingSpace, load_text, nearest_neighbors
from .errors import (
    BundleError,
    DegenerateAxisError,
    SciConNavError,
    UnknownConceptError,
)
from .taxonomy import (
    ClassificationResult,
    ConceptTaxonomy,
    load_taxonomy,
    partition_concepts,
    read_classification,
)

DIGEST_HEADER = "X-Bundle-Digest"
SEARCH_CAP = 50


def _pca_2d(matrix: np.ndarray) -> np.ndarray:
    if matrix.shape[0] < 2 or matrix.shape[1] < 2:
        return np.zeros((matrix.shape[0], 2))
    centered = matrix - matrix.mean(axis=0)
    _, _, vt = np.linalg.svd(centered, full_matrices=False)
    coords = centered @ vt[:2].T
    for k in range(2):
        j = int(np.argmax(np.abs(coords[:, k])))
        if coords[j, k] < 0:
            coords[:, k] = -coords[:, k]
    return coords


@dataclass
class ArtifactBundle:
    directory: Path
    taxonomy: ConceptTaxonomy
    assignment: ClassificationResult
    space: EmbeddingSpace
    graph: nav_mod.NavigationGraph
    axes: dict[str, sem_mod.FunctionalAxis]
    skipped_axes: dict[str, str]
    map2d: np.ndarray  # aligned to graph.node_ids
    digest: str
    file_digests: dict[str, str]
    top_n: int
    _centrality_cache: dict[str, nav_mod.CentralityReport] = field(default_factory=dict)
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False)

    @classmethod
    def load(
        cls,
        directory: str | Path,
        top_n: int | None = None,
        groups_path: Path | None = None,
    ) -> "ArtifactBundle":
        directory = Path(directory)
        required = {name: directory / name for name in ("concepts.tsv", "edges.tsv", "embeddings.txt")}
        missing = [name for name, p in required.items() if not p.exists()]
        if missing:
            raise BundleError(f"bundle at {directory} is missing {missing}")
        optional = directory / "classification.tsv"
        files = dict(required)
        if optional.exists():
            files["classification.tsv"] = optional

        file_digests = {name: sha256_file(p) for name, p in sorted(files.items())}
        pin_path = directory / "bundle.json"
        if pin_path.exists():
            with open(pin_path, encoding="utf-8") as fh:
                pinned = json.load(fh).get("files", {})
            for name, digest in pinned.items():
                current = file_digests.get(name)
                if current != digest:
                    raise BundleError(
                        f"digest mismatch for {name}: bundle.json pins {digest[:12]}..., "
                        f"file is {str(current)[:12]}..."
                    )
        bundle_digest = hashlib.sha256(
            "\n".join(f"{k}:{v}" for k, v in sorted(file_digests.items())).encode()
        ).hexdigest()
        if not pin_path.exists():
            with open(pin_path, "w", encoding="utf-8") as fh:
                json.dump({"files": file_digests, "bundle_digest": bundle_digest}, fh, indent=2)
                fh.write("\n")

        taxonomy = load_taxonomy(required["concepts.tsv"], required["edges.tsv"])
        space = load_text(required["embeddings.txt"])
        if optional.exists():
            assignment = read_classification(optional)
        else:
            assignment = partition_concepts(taxonomy)

        available = len([cid for cid in taxonomy.concepts if cid in space])
        effective_top_n = min(20000, available) if top_n is None else top_n
        graph = nav_mod.build_graph(space, taxonomy, top_n=effective_top_n)

        names = {cid: c.name for cid, c in taxonomy.concepts.items()}
        groups = sem_mod.load_groups_config(groups_path) if groups_path else None
        axes: dict[str, sem_mod.FunctionalAxis] = {}
        skipped: dict[str, str] = {}
        for from_group, to_group in sem_mod.DEFAULT_AXES:
            try:
                axis = sem_mod.build_axis(
                    space, assignment, from_group, to_group, groups=groups, root_names=names
                )
                axes[axis.name] = axis
            except SciConNavError as exc:
                skipped[f"{from_group}_to_{to_group}"] = str(exc)

        map2d = _pca_2d(np.vstack([space.unit_vector(cid) for cid in graph.node_ids]))
        return cls(
            directory=directory,
            taxonomy=taxonomy,
            assignment=assignment,
            space=space,
            graph=graph,
            axes=axes,
            skipped_axes=skipped,
            map2d=map2d,
            digest=bundle_digest,
            file_digests=file_digests,
            top_n=effective_top_n,
        )

    def centrality(self, measure: str) -> nav_mod.CentralityReport:
        if measure not in ("closeness", "betweenness"):
            raise SciConNavError(f"unknown measure {measure!r} (closeness|betweenness)")
        with self._lock:
            if measure not in self._centrality_cache:
                if measure == "closeness":
                    report = nav_mod.closeness_centrality(self.graph)
                elif self.graph.n <= 2000:
                    report = nav_mod.betweenness_centrality(self.graph)
                else:
                    report = nav_mod.betweenness_centrality(self.graph, pivots=256, seed=0)
                self._centrality_cache[measure] = report
            return self._centrality_cache[measure]

    def concept_payload(self, concept_id: str) -> dict:
        concept = self.taxonomy.concepts.get(concept_id)
        if concept is None:
            raise UnknownConceptError(f"unknown concept id {concept_id!r}")
        a = self.assignment.assignments.get(concept_id)
        counts = self.assignment.path_counts.get(concept_id)
        return {
            "id": concept.id,
            "name": concept.name,
            "level": concept.level,
            "works_count": concept.works_count,
            "label": a.label if a else None,
            "tag": a.root_multiplicity_tag if a else None,
            "classifiability": a.classifiability_tag if a else None,
            "ancestor_roots": sorted(a.ancestor_roots) if a else [],
            "path_counts": counts.counts if counts else {},
            "embedded": concept_id in self.space,
            "in_graph": concept_id in self.graph._index,
        }

    def name_of(self, concept_id: str) -> str:
        concept = self.taxonomy.concepts.get(concept_id)
        return concept.name if concept else concept_id


class AnalogyRequest(BaseModel):
    seed: str
    axis_from: str
    axis_to: str
    direction: str | None = None
    steps: int = 1


class PathRequest(BaseModel):
    source: str
    target: str


def _error_response(status: int, code: str, message: str, digest: str) -> JSONResponse:
    return JSONResponse(
        status_code=status,
        content={"code": code, "message": message},
        headers={DIGEST_HEADER: digest},
    )


def create_app(bundle: ArtifactBundle) -> FastAPI:
    app = FastAPI(title="sciconnav", docs_url=None, redoc_url=None)
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["GET", "POST"], allow_headers=["*"]
    )
    app.state.holder = {"bundle": bundle}

    def current() -> ArtifactBundle:
        return app.state.holder["bundle"]

    def swap(new_bundle: ArtifactBundle) -> None:
        app.state.holder = {"bundle": new_bundle}

    app.state.swap_bundle = swap

    @app.middleware("http")
    async def add_digest_header(request: Request, call_next):
        response = await call_next(request)
        response.headers[DIGEST_HEADER] = current().digest
        return response

    @app.exception_handler(SciConNavError)
    async def domain_error(request: Request, exc: SciConNavError):
        if isinstance(exc, UnknownConceptError):
            return _error_response(404, "unknown_concept", str(exc), current().digest)
        if isinstance(exc, DegenerateAxisError):
            return _error_response(400, "degenerate_axis", str(exc), current().digest)
        return _error_response(400, "bad_request", str(exc), current().digest)

    @app.exception_handler(RequestValidationError)
    async def validation_error(request: Request, exc: RequestValidationError):
        return _error_response(400, "bad_request", str(exc.errors()), current().digest)

    @app.exception_handler(Exception)
    async def internal_error(request: Request, exc: Exception):
        return _error_response(500, "internal", f"{type(exc).__name__}: {exc}", current().digest)

    @app.get("/v1/concepts")
    def search_concepts(q: str = ""):
        bundle = current()
        query = q.strip().lower()
        if not query:
            return {"query": q, "results": []}
        prefix: list[str] = []
        substring: list[str] = []
        for cid, concept in bundle.taxonomy.concepts.items():
            name = concept.name.lower()
            if name.startswith(query):
                prefix.append(cid)
            elif query in name:
                substring.append(cid)
        prefix.sort(key=lambda cid: bundle.taxonomy.concepts[cid].name)
        substring.sort(key=lambda cid: bundle.taxonomy.concepts[cid].name)
        chosen = (prefix + substring)[:SEARCH_CAP]
        return {"query": q, "results": [bundle.concept_payload(cid) for cid in chosen]}

    @app.get("/v1/concepts/{concept_id}")
    def get_concept(concept_id: str):
        return current().concept_payload(concept_id)

    @app.get("/v1/neighbors/{concept_id}")
    def get_neighbors(concept_id: str, k: int = 10):
        bundle = current()
        hits = nearest_neighbors(bundle.space, concept_id, k=k, exclude={concept_id})
        return {
            "id": concept_id,
            "k": k,
            "neighbors": [
                {"id": cid, "name": bundle.name_of(cid), "similarity": sim} for cid, sim in hits
            ],
        }

    @app.post("/v1/analogy")
    def post_analogy(body: AnalogyRequest):
        bundle = current()
        if body.direction not in (None, "+", "-"):
            raise SciConNavError(f"direction must be '+', '-' or null, got {body.direction!r}")
        payload = run_analogy(
            bundle.space, body.seed, body.axis_from, body.axis_to, body.direction, body.steps
        )
        for node in payload["nodes"]:
            node["name"] = bundle.name_of(node["id"])
        return payload

    @app.post("/v1/path")
    def post_path(body: PathRequest):
        bundle = current()
        result = nav_mod.shortest_path(bundle.graph, body.source, body.target)
        edges = []
        for u, v in zip(result.nodes, result.nodes[1:]):
            edges.append(
                {
                    "from": u,
                    "to": v,
                    "weight": bundle.graph.weight(bundle.graph.index(u), bundle.graph.index(v)),
                }
            )
        return {
            "source": result.source,
            "target": result.target,
            "nodes": [
                {"id": cid, "name": bundle.name_of(cid)} for cid in result.nodes
            ],
            "edges": edges,
            "distance": result.distance,
            "steps": result.steps,
        }

    @app.get("/v1/centrality")
    def get_centrality(measure: str = "closeness", k: int = 50):
        bundle = current()
        report = bundle.centrality(measure)
        top = report.ranking[: max(k, 0)]
        return {
            "measure": report.measure,
            "exactness": report.exactness,
            "pivots": report.pivots,
            "seed": report.seed,
            "results": [
                {
                    "id": cid,
                    "name": bundle.name_of(cid),
                    "score": report.scores[cid],
                    "rank": rank,
                }
                for rank, cid in enumerate(top, start=1)
            ],
        }

    @app.get("/v1/odds")
    def get_odds(measure: str = "closeness", ks: str = "200,500,1000,1500,2000"):
        bundle = current()
        report = bundle.centrality(measure)
        try:
            top_ks = [int(x) for x in ks.split(",") if x]
        except ValueError:
            raise SciConNavError(f"bad ks list {ks!r}") from None
        rows = nav_mod.centrality_odds_table(report, bundle.assignment, top_ks)
        return {
            "measure": measure,
            "rows": [
                {
                    "top_k": row.top_k,
                    "count_M": row.count_m,
                    "count_S": row.count_s,
                    "odds": row.odds,
                    "odds_defined": row.odds_defined,
                }
                for row in rows
            ],
        }

    @app.get("/v1/axes")
    def get_axes():
        bundle = current()
        return {
            "axes": [
                {
                    "name": name,
                    "from_group": axis.from_group.name,
                    "to_group": axis.to_group.name,
                    "from_disciplines": list(axis.from_group.discipline_ids),
                    "to_disciplines": list(axis.to_group.discipline_ids),
                }
                for name, axis in bundle.axes.items()
            ],
            "skipped": bundle.skipped_axes,
        }

    @app.get("/v1/axes/{axis_name}/projection")
    def get_projection(axis_name: str, discipline: str | None = None):
        bundle = current()
        axis = bundle.axes.get(axis_name)
        if axis is None:
            raise UnknownConceptError(f"unknown axis {axis_name!r}; known: {sorted(bundle.axes)}")
        report = sem_mod.axis_projection_report(bundle.space, bundle.assignment, axis)
        rows = report.rows
        if discipline is not None:
            rows = tuple(r for r in rows if r.discipline == discipline)
            if not rows:
                raise UnknownConceptError(f"unknown discipline {discipline!r} for axis {axis_name!r}")
        return {
            "axis": axis_name,
            "rows": [
                {
                    "discipline": r.discipline,
                    "name": bundle.name_of(r.discipline),
                    "n": r.n,
                    "mean": r.mean,
                    "q5": r.q5,
                    "q50": r.q50,
                    "q95": r.q95,
                }
                for r in rows
            ],
        }

    @app.get("/v1/map2d")
    def get_map2d():
        bundle = current()
        points = []
        for i, cid in enumerate(bundle.graph.node_ids):
            a = bundle.assignment.assignments.get(cid)
            points.append(
                {
                    "id": cid,
                    "name": bundle.name_of(cid),
                    "x": float(bundle.map2d[i, 0]),
                    "y": float(bundle.map2d[i, 1]),
                    "discipline": a.label if a else None,
                }
            )
        return {"points": points}

    return app


def serve(bundle: ArtifactBundle, port: int, host: str = "127.0.0.1") -> None:
    """Run the API server until interrupted; port bind failures propagate."""
    import uvicorn

    app = create_app(bundle)
    uvicorn.run(app, host=host, port=port, log_level="info")
