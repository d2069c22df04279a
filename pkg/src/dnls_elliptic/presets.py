"""Figure parameter sets.

Node positions may be written as arithmetic expressions in ``omega1``,
``omega3`` and ``i``; they are resolved against the lattice at load time.

Grid ranges are reconstructions chosen to contain the features of each
figure panel; the published axes are visual only.
"""

from __future__ import annotations

import ast
import operator
from dataclasses import dataclass, field

__all__ = ["Preset", "PRESETS", "get_preset", "eval_expr", "preset_table"]

_BINOPS = {
    ast.Add: operator.add,
    ast.Sub: operator.sub,
    ast.Mult: operator.mul,
    ast.Div: operator.truediv,
}
_UNOPS = {ast.UAdd: operator.pos, ast.USub: operator.neg}


def eval_expr(expr, omega1, omega3):
    """Evaluate a complex expression over ``omega1``, ``omega3`` and ``i``.

    Only numbers, those three names and ``+ - * /`` are accepted.

    >>> eval_expr("(omega1 - omega3)/2", 4.0, -2j)
    (2+1j)
    """
    names = {"omega1": complex(omega1), "omega3": complex(omega3), "i": 1j, "w1": complex(omega1),
             "w3": complex(omega3)}

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float, complex)):
            return complex(node.value)
        if isinstance(node, ast.Name) and node.id in names:
            return names[node.id]
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            return _BINOPS[type(node.op)](ev(node.left), ev(node.right))
        if isinstance(node, ast.UnaryOp) and type(node.op) in _UNOPS:
            return _UNOPS[type(node.op)](ev(node.operand))
        raise ValueError(f"unsupported element in expression {expr!r}")

    try:
        tree = ast.parse(str(expr), mode="eval")
    except SyntaxError as exc:
        raise ValueError(f"cannot parse expression {expr!r}") from exc
    return ev(tree)


@dataclass(frozen=True)
class Preset:
    name: str
    kappa: complex
    rho: complex
    omega1: float
    omega3: complex
    z: tuple
    alphas: tuple
    grid: dict
    task: str = "dress"
    headline: str = ""
    asym: dict = field(default_factory=dict)

    def nodes(self):
        """Node positions with expressions resolved."""
        return tuple(
            eval_expr(z, self.omega1, self.omega3) if isinstance(z, str) else complex(z) for z in self.z
        )


def _grid(xi, t, n=400):
    return {"xi_min": xi[0], "xi_max": xi[1], "n_xi": n, "t_min": t[0], "t_max": t[1], "n_t": n}


_FIG1 = dict(kappa=1.57j, rho=4.61 - 1.57j, omega1=4.61, omega3=-3.14j, z=("(omega1 - omega3)/2",))
_FIG2 = dict(kappa=1.9j, rho=4.47 - 2.2j, omega1=4.47, omega3=-3.51j, z=("(omega1 - omega3)/2",))
_FIG3 = dict(kappa=1.57j, rho=4.6 - 1.57j, omega1=4.6, omega3=-3.14j)
_FIG4 = dict(kappa=2.08j, rho=3.25 - 1.73j, omega1=3.25, omega3=-3.31j)

PRESETS = {
    p.name: p
    for p in [
        Preset("fig1a", **_FIG1, alphas=(1,), grid=_grid((-15, 15), (-32, 32)),
               headline="stationary; T ~ 30.2; max|u| 2.02 at (0,T/2); min 0.02 at (0,0)"),
        Preset("fig1b", **_FIG1, alphas=(0.05,), grid=_grid((-15, 15), (-32, 32)),
               headline="stationary; T ~ 30.2; not origin-symmetric"),
        Preset("fig2a", **_FIG2, alphas=(1,), grid=_grid((-30, 30), (-20, 20)),
               headline="travelling; origin-symmetric"),
        Preset("fig2b", **_FIG2, alphas=(0.05,), grid=_grid((-30, 30), (-20, 20)),
               headline="travelling; not origin-symmetric"),
        Preset("fig3a", **_FIG3, z=("omega1/2 - omega3/2", "-omega1/9 + omega3/8"), alphas=(1, 1),
               grid=_grid((-30, 30), (-15, 15)), headline="one static wave; v1 = -1.72"),
        Preset("fig3b", **_FIG3, z=("omega1/2 - 2*omega3/3", "-omega1/9 + omega3/6"), alphas=(1, 1),
               grid=_grid((-30, 30), (-15, 15)), headline="two travelling waves"),
        Preset("fig4", **_FIG4, z=("1 + i",), alphas=(1,), grid=_grid((-60, 60), (-10, 10)),
               task="asym-region", headline="z1 = 1+i; regions R1- and R1+ at t = 0",
               asym={"kind": "region", "t": [0.0]}),
        Preset("fig5", **_FIG4, z=("-0.46 - 2.06*i", "-0.65 + 4.41*i"), alphas=(1, 1),
               grid=_grid((-60, 60), (-30, 30)), task="asym-region",
               headline="v = -0.14, 0.58; regions R1-, R2+, R1+ at t = 27",
               asym={"kind": "region", "t": [27.0]}),
        Preset("fig6", **_FIG4, z=("-0.46 - 2.06*i", "-0.65 + 4.41*i"), alphas=(1, 1),
               grid=_grid((-60, 60), (-30, 30)), task="asym-line",
               headline="lines L1+-, L2+- at t = +-27", asym={"kind": "line", "t": [27.0, -27.0]}),
    ]
}


def get_preset(name) -> Preset:
    try:
        return PRESETS[name]
    except KeyError:
        raise KeyError(f"unknown preset {name!r}; choose from {', '.join(PRESETS)}") from None


def _c(z):
    z = complex(z)
    if z.imag == 0:
        return f"{z.real:g}"
    if z.real == 0:
        return f"{z.imag:g}i"
    return f"{z.real:g}{z.imag:+g}i"


def preset_table():
    """Plain-text table of every preset, one row each after the header."""
    head = f"{'name':6}  {'kappa':8} {'rho':12} {'omega1':6} {'omega3':7}  {'z':46} {'alpha':10} expected"
    rows = [head]
    for p in PRESETS.values():
        zs = ", ".join(f"z{i + 1}={z if isinstance(z, str) else _c(z)}" for i, z in enumerate(p.z))
        zs = zs.replace(" ", "").replace("*i", "i").replace(",z", ", z")
        al = ",".join(_c(a) for a in p.alphas)
        rows.append(
            f"{p.name:6}  {_c(p.kappa):8} {_c(p.rho):12} {p.omega1:<6g} {_c(p.omega3):7}  {zs:46} {al:10} {p.headline}"
        )
    return "\n".join(rows)
