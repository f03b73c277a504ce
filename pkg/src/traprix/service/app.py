"""FastAPI application exposing the harness commands and built maps.

The command endpoints return exactly the text the CLI prints. Built maps
are kept in an in-process registry so clients can run further point
locations without rebuilding.
"""
from __future__ import annotations

import itertools
import threading

from fastapi import FastAPI, HTTPException, Request
from fastapi.responses import JSONResponse

from .. import harness
from ..errors import OutOfBox, ParseError, RebuildLimitExceeded, TraprixError
from ..geometry import point
from ..scenarios import parse_scene
from ..trapmap import TrapezoidalMap
from .models import (
    BuildRequest,
    BuildResponse,
    GenRequest,
    LocateRequest,
    LocateResponse,
    LocateResult,
    MapStats,
    QueryRequest,
    RatioRequest,
    SceneText,
    TextOutput,
)

# status codes the CLI client maps back to its exit codes
STATUS_INVALID = 422
STATUS_REBUILD_LIMIT = 409


class MapRegistry:
    def __init__(self):
        self._maps: dict[str, TrapezoidalMap] = {}
        self._ids = itertools.count(1)
        self._lock = threading.Lock()

    def add(self, dag: TrapezoidalMap) -> str:
        with self._lock:
            map_id = f"m{next(self._ids)}"
            self._maps[map_id] = dag
        return map_id

    def get(self, map_id: str) -> TrapezoidalMap:
        with self._lock:
            dag = self._maps.get(map_id)
        if dag is None:
            raise HTTPException(status_code=404, detail=f"no map {map_id!r}")
        return dag

    def remove(self, map_id: str):
        with self._lock:
            if self._maps.pop(map_id, None) is None:
                raise HTTPException(status_code=404, detail=f"no map {map_id!r}")


def create_app() -> FastAPI:
    app = FastAPI(title="traprix", version="0.1.0")
    registry = MapRegistry()
    app.state.registry = registry

    @app.exception_handler(RebuildLimitExceeded)
    async def _rebuild_limit(request: Request, exc: RebuildLimitExceeded):
        return JSONResponse(status_code=STATUS_REBUILD_LIMIT,
                            content={"detail": str(exc), "error": type(exc).__name__})

    @app.exception_handler(TraprixError)
    async def _invalid(request: Request, exc: TraprixError):
        return JSONResponse(status_code=STATUS_INVALID,
                            content={"detail": str(exc), "error": type(exc).__name__})

    @app.exception_handler(ValueError)
    async def _bad_value(request: Request, exc: ValueError):
        return JSONResponse(status_code=STATUS_INVALID,
                            content={"detail": str(exc), "error": type(exc).__name__})

    @app.get("/health")
    def health():
        return {"status": "ok"}

    @app.post("/gen", response_model=SceneText)
    def gen(req: GenRequest):
        text = harness.cmd_gen(req.kind, req.size, req.seed, req.method)
        segments = sum(1 for ln in text.splitlines() if ln and not ln.startswith(("#", "bbox")))
        return SceneText(scene=text, segments=segments)

    @app.post("/build", response_model=BuildResponse)
    def build_map(req: BuildRequest):
        scene = parse_scene(req.scene)
        result, ms = harness.build_scene(scene, req.config(), req.seed)
        row = harness.measure(result, req.scenario, req.seed, with_arrdepth=True,
                              elapsed_ms=ms if req.timing else None)
        csv_text = harness.CSV_HEADER + "\n" + harness.csv_line(row.csv_fields())
        map_id = registry.add(result.dag)
        return BuildResponse(map_id=map_id, csv=csv_text, D=row.D, L=row.L, nodes=row.nodes,
                             paths=row.paths, arrdepth=row.arrdepth, rebuilds=row.rebuilds)

    @app.post("/query", response_model=TextOutput)
    def query(req: QueryRequest):
        return TextOutput(output=harness.cmd_query(req.scene, req.queries, req.config(), req.seed))

    @app.post("/ratio", response_model=TextOutput)
    def ratio(req: RatioRequest):
        text = harness.cmd_ratio(req.scenario, req.sizes, req.repeats, req.seed,
                                 req.params.config(), req.with_arrdepth, req.timing)
        return TextOutput(output=text)

    @app.get("/maps/{map_id}", response_model=MapStats)
    def map_stats(map_id: str):
        stats = registry.get(map_id).stats()
        return MapStats(map_id=map_id, **stats._asdict())

    @app.post("/maps/{map_id}/locate", response_model=LocateResponse)
    def locate(map_id: str, req: LocateRequest):
        dag = registry.get(map_id)
        results = []
        for x, y in req.points:
            try:
                p = point(harness.parse_rational(x, None), harness.parse_rational(y, None))
            except ParseError as exc:
                raise HTTPException(status_code=STATUS_INVALID, detail=str(exc)) from None
            try:
                res = dag.locate(p)
            except OutOfBox:
                results.append(LocateResult(kind="OUTSIDE", path_len=None))
                continue
            results.append(LocateResult(kind=res.kind, path_len=res.path_len))
        return LocateResponse(results=results)

    @app.delete("/maps/{map_id}")
    def drop_map(map_id: str):
        registry.remove(map_id)
        return {"deleted": map_id}

    return app


app = create_app()
