"""Command-line entry point: ``rieszlab <command> [flags]``.

Every command writes CSV rows with the fixed header :data:`HEADER`. Values
are formatted with ``repr`` and rows are sorted before writing, so the same
configuration always yields the same bytes. ``wall_time_ms`` stays empty
unless ``--timing`` is given, since timings would break that guarantee.

Exit status is 0 on success, 1 on a numerical failure and 2 when the
configuration is rejected.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import hashlib
import io
import math
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from . import __version__, kernels
from .errors import ConfigError, NumericalError, RieszLabError, VerificationFailed
from .helson_szego import (
    AnalyticCertificate,
    default_grid,
    explicit_sector_certificate,
    grid_ratio,
    grid_weight,
    hs_search,
    read_certificate,
    verify_certificate,
    write_certificate,
)
from .multiplier import (
    basis_constant_section,
    hardy_section,
    make_sequence,
    max_sign_multiplier_norm,
    power_norm,
    power_schedule,
    tail_gap,
)
from .projection import aitken, exponent_scan, riesz_norm_section
from .similarity import sandwich
from .weights import WeightSpec, certified_basis_constant, fourier_coeffs, load_sampled

HEADER = ("command", "weight", "alpha", "param", "n", "quantity", "value",
          "certified_bound", "cond_estimate", "wall_time_ms", "seed")
QUANTITIES = ("sec_phi", "hs_ratio", "power_norm", "tail_gap", "basis_constant",
              "sign_norm", "floor", "upper", "lower")
COMMANDS = ("riesz-norm", "hs-certificate", "verify", "power-norms", "sweep")
WEIGHTS = {
    "constant": "constant",
    "tan-alpha": "tan_alpha",
    "abs-theta": "abs_theta_alpha",
    "step": "piecewise_step",
    "sampled": "sampled",
}
EXIT_OK, EXIT_NUMERICAL, EXIT_CONFIG = 0, 1, 2


@dataclass(frozen=True)
class RunConfig:
    command: str
    weight: str = "tan-alpha"
    alpha: float | None = None
    scale: float = 1.0
    power: float | None = None
    levels: tuple[float, ...] = ()
    breakpoints: tuple[float, ...] = ()
    samples: str | None = None
    sections: tuple[int, ...] = ()
    dim: int | None = None
    degree: int = 64
    grid: int | None = None
    iters: int = 2000
    method: str = "search"
    family: str = "gauss"
    c: float = 1.0
    lambdas: tuple[float, ...] = ()
    powers: tuple[int, ...] = ()
    tails: bool = False
    patterns: int = 0
    alphas: tuple[float, ...] = ()
    exponents: tuple[float, ...] = ()
    extrapolate: bool = False
    seed: int = 0
    tol: float = kernels.DEFAULT_TOL
    jobs: int = 1
    timing: bool = False
    cert: str | None = None
    out: str | None = None
    config: str | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}")
        if self.weight not in WEIGHTS:
            raise ConfigError(f"unknown weight {self.weight!r}; choose from {', '.join(WEIGHTS)}")
        if self.method not in ("search", "explicit"):
            raise ConfigError("method must be 'search' or 'explicit'")
        for name in ("scale", "c", "tol"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"{name} must be positive")
        for name in ("dim", "grid"):
            val = getattr(self, name)
            if val is not None and val < 2:
                raise ConfigError(f"{name} must be at least 2")
        if self.degree < 0 or self.iters < 1 or self.jobs < 1:
            raise ConfigError("degree must be >= 0, iters and jobs >= 1")
        if self.seed < 0 or self.patterns < 0:
            raise ConfigError("seed and patterns must be nonnegative")
        if any(n < 1 for n in self.sections):
            raise ConfigError("sections must be positive")
        if any(n < 0 for n in self.powers):
            raise ConfigError("powers must be nonnegative")
        if any(not a > 0 for a in self.alphas):
            raise ConfigError("alphas must be positive")
        if self.out is not None:
            parent = Path(self.out).resolve().parent
            if not parent.is_dir() or not os.access(parent, os.W_OK):
                raise ConfigError(f"output directory {parent} is not writable")

    def canonical(self) -> str:
        """Resolved settings as a config file; ``out`` and ``config`` are
        left out so the hash does not depend on where results go."""
        lines = []
        for f in dataclasses.fields(self):
            if f.name in ("out", "config"):
                continue
            val = getattr(self, f.name)
            if val is None or val == ():
                continue
            if isinstance(val, tuple):
                val = ",".join(_fmt(x) for x in val)
            lines.append(f"{f.name}={_fmt(val)}")
        return "\n".join(lines) + "\n"

    def digest(self) -> str:
        return hashlib.sha256(self.canonical().encode()).hexdigest()[:16]


@dataclass(frozen=True)
class ResultRow:
    command: str
    weight: str
    alpha: float | None
    param: str
    n: int | None
    quantity: str
    value: float | str
    certified_bound: float | None = None
    cond_estimate: float | None = None
    wall_time_ms: float | None = None
    seed: int = 0

    def __post_init__(self):
        if self.quantity not in QUANTITIES:
            raise ValueError(f"quantity {self.quantity!r} is not in the vocabulary")
        if isinstance(self.value, float) and not math.isfinite(self.value):
            raise ValueError(f"non-finite value in {self.quantity} row")

    def cells(self) -> list[str]:
        return [_fmt(getattr(self, name)) for name in HEADER]

    def sort_key(self):
        return (self.command, self.weight, _mixed_key(self.param),
                -1 if self.n is None else self.n, QUANTITIES.index(self.quantity))


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float):
        return repr(x)
    return str(x)


def _mixed_key(s: str):
    try:
        return (0, float(s), "")
    except ValueError:
        return (1, 0.0, s)


# configuration --------------------------------------------------------------


def _ints(s: str) -> tuple[int, ...]:
    return tuple(int(x) for x in str(s).split(",") if x.strip())


def _floats(s: str) -> tuple[float, ...]:
    return tuple(float(x) for x in str(s).split(",") if x.strip())


def _bool(s) -> bool:
    if isinstance(s, bool):
        return s
    v = str(s).strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {s!r}")


CONVERTERS = {
    "alpha": float, "scale": float, "power": float, "levels": _floats,
    "breakpoints": _floats, "samples": str, "sections": _ints, "dim": int,
    "degree": int, "grid": int, "iters": int, "method": str, "family": str,
    "c": float, "lambdas": _floats, "powers": _ints, "tails": _bool,
    "patterns": int, "alphas": _floats, "exponents": _floats,
    "extrapolate": _bool, "seed": int, "tol": float, "jobs": int,
    "timing": _bool, "cert": str, "out": str, "weight": str, "command": str,
}


def read_config_file(path) -> dict:
    """Flat ``key = value`` file; ``#`` starts a comment. Keys may use
    dashes or underscores; unknown keys are rejected."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    out = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key=value")
        key, val = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in CONVERTERS:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        try:
            out[key] = CONVERTERS[key](val)
        except ValueError as exc:
            raise ConfigError(f"{path}:{lineno}: bad value for {key}: {exc}") from None
    return out


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    common.add_argument("--config", help="flat key=value file; flags override it")
    common.add_argument("--weight", help=f"weight family: {', '.join(WEIGHTS)}")
    common.add_argument("--alpha", type=float, help="exponent of tan-alpha / abs-theta, in (0, 1)")
    common.add_argument("--scale", type=float, help="positive constant multiplying the weight")
    common.add_argument("--power", type=float, help="raise the weight to this power")
    common.add_argument("--levels", type=_floats, help="step weight levels, comma separated")
    common.add_argument("--breakpoints", type=_floats, help="step weight breakpoints in (-pi, pi]")
    common.add_argument("--samples", help="file of 'theta value' lines for a sampled weight")
    common.add_argument("--sections", type=_ints, help="section sizes N, comma separated")
    common.add_argument("--dim", type=int, help="Hardy section dimension M")
    common.add_argument("--degree", type=int, help="certificate degree D")
    common.add_argument("--grid", type=int, help="certificate grid size")
    common.add_argument("--iters", type=int, help="maximum certificate search fits")
    common.add_argument("--method", help="certificate construction: search or explicit")
    common.add_argument("--family", help="multiplier family: gauss or custom")
    common.add_argument("--c", type=float, help="gauss family rate, nu_k = exp(-c k^2)")
    common.add_argument("--lambdas", type=_floats, help="custom multiplier eigenvalues")
    common.add_argument("--powers", type=_ints, help="powers n for power norms")
    common.add_argument("--tails", action="store_const", const=True, help="emit tail gap rows")
    common.add_argument("--patterns", type=int, help="number of random sign patterns")
    common.add_argument("--alphas", type=_floats, help="alpha values for sweep")
    common.add_argument("--exponents", type=_floats, help="exponents a for a w**a scan")
    common.add_argument("--extrapolate", action="store_const", const=True,
                        help="add an Aitken-extrapolated sec_phi row")
    common.add_argument("--seed", type=int, help="seed for random sign patterns")
    common.add_argument("--tol", type=float, help="singular value tolerance")
    common.add_argument("--jobs", type=int, help="worker threads")
    common.add_argument("--timing", action="store_const", const=True,
                        help="fill wall_time_ms (output is then not reproducible)")
    common.add_argument("--cert", help="certificate file to write or verify")
    common.add_argument("--out", help="CSV output path (default stdout)")

    parser = argparse.ArgumentParser(prog="rieszlab", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "riesz-norm": "finite-section Riesz projection norms",
        "hs-certificate": "search for or build an analytic certificate",
        "verify": "recheck a certificate file against a weight",
        "power-norms": "power norms of a fast monotone multiplier",
        "sweep": "similarity sandwich over alphas, exponent scans",
    }
    for name in COMMANDS:
        sub.add_parser(name, parents=[common], help=helps[name])
    return parser


def resolve_config(argv=None) -> RunConfig:
    ns = vars(build_parser().parse_args(argv))
    command = ns.pop("command")
    settings = {}
    if "config" in ns:
        settings.update(read_config_file(ns["config"]))
        if settings.pop("command", command) != command:
            raise ConfigError(f"config file is for a different command than {command!r}")
    settings.update(ns)
    try:
        return RunConfig(command=command, **settings)
    except TypeError as exc:
        raise ConfigError(str(exc)) from None


def make_weight(cfg: RunConfig, alpha: float | None = None) -> WeightSpec:
    alpha = cfg.alpha if alpha is None else alpha
    kind = WEIGHTS[cfg.weight]
    if kind in ("tan_alpha", "abs_theta_alpha"):
        if alpha is None:
            raise ConfigError(f"--weight {cfg.weight} needs --alpha")
        w = WeightSpec(kind, alpha=float(alpha), scale=cfg.scale)
    elif kind == "piecewise_step":
        w = WeightSpec.piecewise_step(cfg.levels, cfg.breakpoints, scale=cfg.scale)
    elif kind == "sampled":
        if cfg.samples is None:
            raise ConfigError("--weight sampled needs --samples")
        w = load_sampled(cfg.samples).scaled(cfg.scale)
    else:
        w = WeightSpec.constant(cfg.scale)
    return w if cfg.power is None else WeightSpec.power_of(w, cfg.power)


# commands -----------------------------------------------------------------


def _alpha_of(w: WeightSpec) -> float | None:
    return w.decompose()[0].alpha


def _row(cfg: RunConfig, w: WeightSpec, param, n, quantity, value, **kw) -> ResultRow:
    if not isinstance(value, str):
        value = float(value)
    return ResultRow(cfg.command, w.ident, _alpha_of(w), str(param), n, quantity, value,
                     seed=cfg.seed, **kw)


def _error_row(cfg, w, param, n, quantity, exc) -> ResultRow:
    return _row(cfg, w, param, n, quantity, f"ERR:{type(exc).__name__}")


def _timed(cfg: RunConfig, task):
    """Run ``task() -> list[ResultRow]``; stamp wall time if asked."""
    t0 = time.perf_counter()
    rows = task()
    if not cfg.timing:
        return rows
    ms = 1000.0 * (time.perf_counter() - t0)
    return [dataclasses.replace(r, wall_time_ms=ms) for r in rows]


def _run_tasks(cfg: RunConfig, tasks) -> list[ResultRow]:
    if cfg.jobs == 1 or len(tasks) < 2:
        chunks = [_timed(cfg, t) for t in tasks]
    else:
        with ThreadPoolExecutor(max_workers=cfg.jobs) as pool:
            chunks = list(pool.map(lambda t: _timed(cfg, t), tasks))
    return [r for chunk in chunks for r in chunk]


def cmd_riesz_norm(cfg: RunConfig) -> list[ResultRow]:
    w = make_weight(cfg)
    sections = cfg.sections or (16, 32, 64)
    ft = fourier_coeffs(w, 2 * max(sections))
    bound = certified_basis_constant(w)

    def one(N):
        def task():
            r = riesz_norm_section(ft, N, cfg.tol)
            return [_row(cfg, w, "section", N, "sec_phi", r.sec_phi,
                         certified_bound=bound, cond_estimate=r.cond_estimate)]
        return task

    rows = _run_tasks(cfg, [one(N) for N in sections])
    if cfg.extrapolate:
        if len(sections) < 3:
            raise ConfigError("--extrapolate needs at least three sections")
        last = sorted((r for r in rows), key=lambda r: r.n)[-3:]
        val = aitken(*(r.value for r in last))
        rows.append(_row(cfg, w, "aitken", last[-1].n, "sec_phi", val, certified_bound=bound))
    return rows


def _certificate_path(cfg: RunConfig) -> str | None:
    if cfg.cert is not None:
        return cfg.cert
    return None if cfg.out is None else cfg.out + ".cert"


def cmd_hs_certificate(cfg: RunConfig) -> list[ResultRow]:
    w = make_weight(cfg)
    D = cfg.degree
    M = cfg.grid or default_grid(D)
    if cfg.method == "explicit":
        leaf, a, c = w.decompose()
        if leaf.family != "tan_alpha" or a != 1.0:
            raise ConfigError("--method explicit needs --weight tan-alpha")
        base = explicit_sector_certificate(leaf.alpha, D, M)
        coeffs = base.coeffs * (c / math.cos(0.5 * math.pi * leaf.alpha))
        cert = AnalyticCertificate(D, coeffs, grid_ratio(grid_weight(w, M), coeffs), M, None, w.ident)
    else:
        cert = hs_search(w, D, M, iters=cfg.iters)
    path = _certificate_path(cfg)
    if path is not None:
        write_certificate(cert, path)
    bound = cert.bound if cert.ratio < 1.0 else None
    return [_row(cfg, w, cfg.method, D, "hs_ratio", cert.ratio, certified_bound=bound)]


def cmd_verify(cfg: RunConfig) -> list[ResultRow]:
    if cfg.cert is None:
        raise ConfigError("verify needs --cert")
    w = make_weight(cfg)
    cert = read_certificate(cfg.cert)
    s = verify_certificate(cert, w)
    return [_row(cfg, w, "verified", cert.degree, "hs_ratio", s, certified_bound=cert.bound)]


def _sequence(cfg: RunConfig, M: int):
    if cfg.family == "custom":
        if len(cfg.lambdas) < M:
            raise ConfigError(f"custom family needs at least {M} lambdas")
        return make_sequence("custom", lambdas=cfg.lambdas)
    return make_sequence(cfg.family, length=M, c=cfg.c)


def cmd_power_norms(cfg: RunConfig) -> list[ResultRow]:
    w = make_weight(cfg)
    M = cfg.dim or 64
    seq = _sequence(cfg, M)
    sec = hardy_section(fourier_coeffs(w, M), M)
    bound = certified_basis_constant(w)
    param = cfg.family if cfg.family == "custom" else f"{cfg.family}:{_fmt(cfg.c)}"
    powers = cfg.powers or (0,) + power_schedule(seq, min(5, len(seq) - 1)).N

    def power_task(N):
        return lambda: [_row(cfg, w, param, N, "power_norm", power_norm(seq, sec, N, M),
                             certified_bound=bound)]

    def signs_task():
        val = max_sign_multiplier_norm(sec, M, cfg.patterns, cfg.seed)
        return [_row(cfg, w, f"signs:{cfg.patterns}", M, "sign_norm", val)]

    tasks = [power_task(N) for N in powers]
    if cfg.patterns:
        tasks.append(signs_task)
    rows = _run_tasks(cfg, tasks)
    b = basis_constant_section(sec, M)
    rows.append(_row(cfg, w, param, M, "basis_constant", b, certified_bound=bound))
    if cfg.tails:
        for n in range(1, min(5, M - 1)):
            tg = tail_gap(seq, sec, n, M, b if bound is None else bound)
            rows.append(_row(cfg, w, param, n, "tail_gap", tg.gap, certified_bound=tg.analytic_bound))
    return rows


def cmd_sweep(cfg: RunConfig) -> list[ResultRow]:
    M = cfg.dim or 64
    takes_alpha = WEIGHTS[cfg.weight] in ("tan_alpha", "abs_theta_alpha")
    if takes_alpha:
        alphas = cfg.alphas or ((cfg.alpha,) if cfg.alpha is not None else (0.2, 0.5, 0.8))
        weights = [make_weight(cfg, a) for a in alphas]
    else:
        weights = [make_weight(cfg)]
    seq = _sequence(cfg, M)

    def sandwich_task(w):
        def task():
            try:
                rep = sandwich(w, seq, M, lanczos_tol=cfg.tol)
            except RieszLabError as exc:
                return [_error_row(cfg, w, "sandwich", M, "floor", exc)]
            bound = certified_basis_constant(w)
            return [_row(cfg, w, "sandwich", M, "floor", rep.floor),
                    _row(cfg, w, "sandwich", M, "lower", rep.lower),
                    _row(cfg, w, "sandwich", M, "upper", rep.upper, certified_bound=bound)]
        return task

    def scan_task(w):
        N = cfg.sections[0] if cfg.sections else 32

        def task():
            rows = []
            for sr in exponent_scan(w, cfg.exponents, N, tol=cfg.tol):
                wa = WeightSpec.power_of(w, sr.a)
                if sr.ok:
                    rows.append(_row(cfg, wa, f"{sr.a!r}", N, "sec_phi", sr.result.sec_phi,
                                     certified_bound=certified_basis_constant(wa),
                                     cond_estimate=sr.result.cond_estimate))
                else:
                    name = sr.error.split(":", 1)[0]
                    rows.append(_row(cfg, wa, f"{sr.a!r}", N, "sec_phi", f"ERR:{name}"))
            return rows
        return task

    tasks = [sandwich_task(w) for w in weights]
    if cfg.exponents:
        tasks += [scan_task(w) for w in weights]
    return _run_tasks(cfg, tasks)


HANDLERS = {
    "riesz-norm": cmd_riesz_norm,
    "hs-certificate": cmd_hs_certificate,
    "verify": cmd_verify,
    "power-norms": cmd_power_norms,
    "sweep": cmd_sweep,
}


def render_csv(rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(HEADER)
    for r in sorted(rows, key=ResultRow.sort_key):
        writer.writerow(r.cells())
    return buf.getvalue()


def run(cfg: RunConfig) -> str:
    return render_csv(HANDLERS[cfg.command](cfg))


def main(argv=None) -> int:
    try:
        cfg = resolve_config(argv)
        digest = cfg.digest()
        print(f"config-hash {digest} seed {cfg.seed}", file=sys.stderr)
        text = run(cfg)
        if cfg.out is None:
            sys.stdout.write(text)
        else:
            Path(cfg.out).write_text(text)
            Path(cfg.out + ".config").write_text(f"# config-hash {digest}\n" + cfg.canonical())
    except (NumericalError, VerificationFailed) as exc:
        print(f"rieszlab: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except ValueError as exc:
        print(f"rieszlab: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except RieszLabError as exc:
        print(f"rieszlab: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
