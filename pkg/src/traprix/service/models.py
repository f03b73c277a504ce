"""Request and response bodies for the HTTP service."""
from __future__ import annotations

from typing import Literal, Optional

from pydantic import BaseModel, Field

from ..trapmap import BuildConfig

Verifier = Literal["depth", "lqpl", "arrdepth", "none"]
Order = Literal["suggested", "shuffled"]


class BuildParams(BaseModel):
    verifier: Verifier = "depth"
    seed: int = Field(0, ge=0)
    depth_c: float = Field(6.0, gt=0)
    size_c: float = Field(12.0, gt=0)
    max_rebuilds: int = Field(32, ge=0)
    order: Order = "shuffled"

    def config(self) -> BuildConfig:
        return BuildConfig(verifier=self.verifier, depth_c=self.depth_c, size_c=self.size_c,
                           max_rebuilds=self.max_rebuilds, order=self.order)


class GenRequest(BaseModel):
    kind: Literal["random", "sqrt", "recursive"]
    size: int = Field(..., ge=0, description="n for random and recursive scenes, k for sqrt")
    seed: int = Field(0, ge=0)
    method: Literal["arrangement", "rejection"] = "arrangement"


class SceneText(BaseModel):
    scene: str
    segments: int


class BuildRequest(BuildParams):
    scene: str = Field(..., description="scene file contents")
    scenario: str = "file"
    timing: bool = False


class BuildResponse(BaseModel):
    map_id: str
    csv: str
    D: int
    L: int
    nodes: int
    paths: int
    arrdepth: Optional[int]
    rebuilds: int


class QueryRequest(BuildParams):
    scene: str
    queries: str = Field(..., description="one point per line, two rationals")


class LocateRequest(BaseModel):
    points: list[tuple[str, str]]


class LocateResult(BaseModel):
    kind: Literal["FACE", "EDGE", "VERTEX", "OUTSIDE"]
    path_len: Optional[int]


class LocateResponse(BaseModel):
    results: list[LocateResult]


class TextOutput(BaseModel):
    output: str


class RatioRequest(BaseModel):
    scenario: Literal["random", "sqrt", "recursive"] = "random"
    sizes: list[int] = Field(..., min_length=1)
    repeats: int = Field(20, ge=1)
    seed: int = Field(0, ge=0)
    params: BuildParams = Field(default_factory=lambda: BuildParams(verifier="none"))
    with_arrdepth: bool = False
    timing: bool = False


class MapStats(BaseModel):
    map_id: str
    n_segments: int
    node_count: int
    leaf_count: int
    D: int
