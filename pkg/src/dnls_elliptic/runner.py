"""Execution of resolved runs: grid evaluation, CSV and summary output.

Both the command-line tool and the HTTP service call :func:`execute`.
"""

from __future__ import annotations

import io
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import elliptic_kernel as ek
from .asymptotics import asymptotic_profile, build_frame, build_region_frame, u_asym_line, u_asym_region
from .background import derive_background, log_u0
from .config import ResolvedRun, RunConfig, resolve
from .dressing import DressingSpec
from .errors import ConfigurationError, DnlsError, HypothesisError, PoleError, SingularityError
from .harness import Report, SuiteConfig, run_suite
from .sigma_forms import build_kit, uN_derivative_free
from .spectral import make_node

__all__ = [
    "EXIT_OK",
    "EXIT_VERIFY_FAILED",
    "EXIT_CONFIG",
    "EXIT_SINGULAR",
    "THREADS_ENV",
    "RunResult",
    "thread_count",
    "build_problem",
    "evaluate_grid",
    "csv_text",
    "execute",
    "verify_presets",
]

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_CONFIG = 2
EXIT_SINGULAR = 3

THREADS_ENV = "DNLS_THREADS"

BASE_HEADER = ("xi", "t", "re_u", "im_u", "abs_u")
ASYM_HEADER = ("abs_u_asym", "abs_err")


def thread_count(default=None):
    """Worker count from ``DNLS_THREADS`` (default: CPU count)."""
    raw = os.environ.get(THREADS_ENV)
    if raw is None or raw.strip() == "":
        return default or os.cpu_count() or 1
    try:
        n = int(raw)
    except ValueError:
        raise ConfigurationError(f"{THREADS_ENV} must be a positive integer, got {raw!r}") from None
    if n < 1:
        raise ConfigurationError(f"{THREADS_ENV} must be a positive integer, got {raw!r}")
    return n


@dataclass
class RunResult:
    exit_code: int
    message: str = ""
    csv_path: str | None = None
    summary_path: str | None = None
    summary: dict = field(default_factory=dict)
    report: Report | None = None
    csv: str | None = None


def build_problem(run: ResolvedRun):
    lat = ek.build_lattice(run.omega1, run.omega3)
    bg = derive_background(run.kappa, run.rho, lat)
    spec = DressingSpec([make_node(z, bg) for z in run.z], run.alphas)
    return bg, spec


def _row_times(run: ResolvedRun):
    g = run.grid
    if run.task in ("asym-line", "asym-region") and run.asym.get("t"):
        return np.asarray(run.asym["t"], dtype=float)
    return np.linspace(g["t_min"], g["t_max"], g["n_t"])


def _asym_row(xi, t, run, spec, bg):
    kind = run.asym.get("kind")
    k = run.asym.get("k")
    if k is None:
        vals, _ = asymptotic_profile(xi, t, spec, bg, kind=kind)
        return vals
    if k > spec.N:
        raise ConfigurationError(f"asym.k = {k} exceeds the number of nodes ({spec.N})")
    sign = run.asym.get("sign") or ("+" if t >= 0 else "-")
    tt = np.full_like(xi, t)
    if kind == "line":
        return np.asarray(u_asym_line(build_frame(k, sign, spec, bg), xi, tt, spec, bg))
    return np.asarray(u_asym_region(build_region_frame(k, sign, spec, bg), xi, tt, bg))


def evaluate_grid(run: ResolvedRun, bg, spec, threads=1):
    """Evaluate the requested field on the grid, one row per time value.

    Rows are computed in parallel and assembled in their natural order.
    """
    g = run.grid
    xi = np.linspace(g["xi_min"], g["xi_max"], g["n_xi"])
    ts = _row_times(run)
    asym = run.task in ("asym-line", "asym-region")
    kit = build_kit(spec, bg) if spec.N else None

    def row(t):
        tt = np.full_like(xi, t)
        if run.task == "background" or kit is None:
            u = np.exp(np.asarray(log_u0(xi, tt, bg)))
        else:
            u = np.asarray(uN_derivative_free(xi, tt, kit))
        ua = _asym_row(xi, t, run, spec, bg) if asym else None
        return u, ua

    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        rows = list(pool.map(row, ts))
    U = np.stack([r[0] for r in rows])
    UA = np.stack([r[1] for r in rows]) if asym else None
    return xi, ts, U, UA


def _fmt(v):
    return "nan" if not math.isfinite(v) else repr(float(v))


def csv_text(xi, ts, U, UA=None):
    """CSV with one line per grid point, ``t`` outer and ``xi`` inner."""
    buf = io.StringIO()
    header = BASE_HEADER + (ASYM_HEADER if UA is not None else ())
    buf.write(",".join(header) + "\n")
    for i, t in enumerate(ts):
        for j, x in enumerate(xi):
            u = U[i, j]
            cols = [x, t, u.real, u.imag, abs(u)]
            if UA is not None:
                a = UA[i, j]
                cols += [abs(a), abs(u - a)]
            buf.write(",".join(_fmt(c) for c in cols) + "\n")
    return buf.getvalue()


def _summary(run, bg, spec, xi, ts, U, UA):
    out = {
        "label": run.label,
        "task": run.task,
        "background": bg.summary(),
        "nodes": [
            {
                "z": [n.z.real, n.z.imag],
                "alpha": [a.real, a.imag],
                "lambda": [n.lam.real, n.lam.imag],
                "y": [n.y.real, n.y.imag],
                "beta": [n.beta.real, n.beta.imag],
                "velocity": n.velocity,
                "period": n.period if n.y.imag != 0 else None,
            }
            for n, a in zip(spec.nodes, spec.alphas)
        ],
        "grid": {"n_xi": len(xi), "n_t": len(ts), "xi": [float(xi[0]), float(xi[-1])], "t": [float(ts[0]), float(ts[-1])]},
    }
    absu = np.abs(U)
    i, j = np.unravel_index(np.argmax(absu), absu.shape)
    i2, j2 = np.unravel_index(np.argmin(absu), absu.shape)
    out["stats"] = {
        "max_abs_u": float(absu[i, j]),
        "argmax": [float(xi[j]), float(ts[i])],
        "min_abs_u": float(absu[i2, j2]),
        "argmin": [float(xi[j2]), float(ts[i2])],
    }
    if UA is not None:
        err = np.abs(U - UA)
        out["stats"]["max_abs_err"] = float(np.nanmax(err)) if np.any(np.isfinite(err)) else None
        out["asym"] = {k: v for k, v in run.asym.items()}
    return out


def _to_jsonable(o):
    if isinstance(o, complex):
        return [o.real, o.imag]
    if isinstance(o, np.generic):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(f"not serializable: {type(o).__name__}")


def _write_summary(path, summary):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(summary, fh, indent=2, default=_to_jsonable)


def summary_path_for(csv_path):
    return f"{csv_path}.summary.json"


def verify_presets(names, n_points=100, seed=0) -> Report:
    return run_suite(SuiteConfig(presets=tuple(names), n_points=n_points, seed=seed))


def _verify(run: ResolvedRun):
    case = {run.label: (run.kappa, run.rho, run.omega1, run.omega3, run.z, run.alphas)}
    return run_suite(SuiteConfig(cases=case))


def execute(cfg: RunConfig, out=None, threads=None, keep_csv=False) -> RunResult:
    """Run one configuration.  Errors become exit codes, never exceptions.

    Parameters
    ----------
    out : str, optional
        CSV path; overrides ``cfg.output``.  Without either, nothing is written.
    keep_csv : bool
        Return the CSV text in the result (used by the HTTP service).
    """
    try:
        run = resolve(cfg)
        threads = threads or thread_count()
        bg, spec = build_problem(run)
        if run.task == "verify":
            rep = _verify(run)
            code = EXIT_OK if rep.ok else EXIT_VERIFY_FAILED
            path = out or run.output
            if path:
                with open(path, "w", encoding="utf-8") as fh:
                    fh.write(rep.text() + "\n")
                rep.write_json(summary_path_for(path))
            return RunResult(code, "verification passed" if rep.ok else "verification failed",
                             summary=rep.to_dict(), report=rep)
        xi, ts, U, UA = evaluate_grid(run, bg, spec, threads)
    except ConfigurationError as exc:
        return RunResult(EXIT_CONFIG, f"configuration error: {exc}")
    except HypothesisError as exc:
        return RunResult(EXIT_CONFIG, f"asymptotic hypotheses violated: {exc}")
    except (SingularityError, PoleError) as exc:
        return RunResult(EXIT_SINGULAR, f"numerical singularity: {exc}")
    except DnlsError as exc:
        return RunResult(EXIT_SINGULAR, f"numerical failure: {exc}")
    summary = _summary(run, bg, spec, xi, ts, U, UA)
    text = csv_text(xi, ts, U, UA)
    path = out or run.output
    res = RunResult(EXIT_OK, "ok", summary=summary, csv=text if keep_csv else None)
    if path:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        res.csv_path = path
        res.summary_path = summary_path_for(path)
        _write_summary(res.summary_path, summary)
    return res
