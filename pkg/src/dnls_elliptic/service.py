"""HTTP service exposing presets, grid runs and verification."""

from __future__ import annotations

from typing import List, Optional

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, Field

from .config import RunConfig
from .presets import PRESETS
from .runner import EXIT_CONFIG, execute, verify_presets

app = FastAPI(title="dnls-elliptic", version="0.1.0")


class PresetInfo(BaseModel):
    name: str
    kappa: List[float]
    rho: List[float]
    omega1: float
    omega3: List[float]
    z: List[str]
    alpha: List[List[float]]
    task: str
    expected: str


class RunResponse(BaseModel):
    exit_code: int
    message: str
    summary: dict = Field(default_factory=dict)
    csv: Optional[str] = None


class VerifyRequest(BaseModel):
    presets: List[str] = Field(default_factory=lambda: list(PRESETS))
    n_points: int = Field(default=100, ge=1, le=1000)
    seed: int = 0


class VerifyResponse(BaseModel):
    ok: bool
    report: dict
    text: str


def _pair(z):
    z = complex(z)
    return [z.real, z.imag]


@app.get("/health")
def health():
    return {"status": "ok"}


@app.get("/presets", response_model=List[PresetInfo])
def presets():
    return [
        PresetInfo(
            name=p.name, kappa=_pair(p.kappa), rho=_pair(p.rho), omega1=p.omega1, omega3=_pair(p.omega3),
            z=[str(z) for z in p.z], alpha=[_pair(a) for a in p.alphas], task=p.task, expected=p.headline,
        )
        for p in PRESETS.values()
    ]


@app.post("/run", response_model=RunResponse)
def run(cfg: RunConfig):
    res = execute(cfg, keep_csv=True)
    if res.exit_code == EXIT_CONFIG:
        raise HTTPException(status_code=422, detail=res.message)
    return RunResponse(exit_code=res.exit_code, message=res.message, summary=res.summary, csv=res.csv)


@app.post("/verify", response_model=VerifyResponse)
def verify(req: VerifyRequest):
    unknown = [p for p in req.presets if p not in PRESETS]
    if unknown:
        raise HTTPException(status_code=422, detail=f"unknown presets: {', '.join(unknown)}")
    rep = verify_presets(req.presets, n_points=req.n_points, seed=req.seed)
    return VerifyResponse(ok=rep.ok, report=rep.to_dict(), text=rep.text())
