"""Randomized campaigns over the inequality checks.

Each trial of a suite draws its instance from the random stream
``SeedSequence((seed, trial))`` only, so a trial can be regenerated from
``(suite, seed, trial, dim)`` alone, whatever the worker layout was.
"""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np

from . import channels as ch
from . import divergences as dv
from . import hermlin as hl
from . import inequalities as iq
from . import standard_form as sf
from .quadrature import DEFAULT_NODES, DEFAULT_T_MAX, beta_quadrature
from .reports import CheckReport

CSV_COLUMNS = ("suite", "trial", "dim", "lhs", "rhs", "gap", "pass", "vacuous", "seed", "instance_ref")
DEFAULT_FLOOR = 1e-3


# ---------------------------------------------------------------- generators

def trial_rng(seed: int, trial: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence((int(seed), int(trial))))


def _rng(seed) -> np.random.Generator:
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def random_density(dim: int, seed, faithful: bool = True, floor: float = DEFAULT_FLOOR) -> np.ndarray:
    """Wishart state ``G G* / Tr(G G*)``, mixed with ``floor * id/d`` when ``faithful``."""
    if not 0 <= floor < 1:
        raise ValueError("floor must lie in [0, 1)")
    rng = _rng(seed)
    G = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = G @ G.conj().T
    rho = (rho + rho.conj().T) / 2
    rho = rho / np.trace(rho).real
    if faithful:
        rho = (1 - floor) * rho + floor * np.eye(dim) / dim
    return rho


def random_hermitian(dim: int, seed, scale: float = 1.0) -> np.ndarray:
    rng = _rng(seed)
    G = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return scale * (G + G.conj().T) / 2


def random_psd(dim: int, seed, floor: float = 0.05) -> np.ndarray:
    """Random positive definite matrix with a random overall scale in ``[0.5, 3]``."""
    rng = _rng(seed)
    a = random_density(dim, rng, True, floor)
    return a * rng.uniform(0.5, 3.0)


def majorized_pair(dim: int, seed, c: float = 2.0, floor: float = 0.05) -> tuple[np.ndarray, np.ndarray]:
    """States with ``sigma/c <= rho <= c sigma``.

    ``rho = sigma**(1/2) m sigma**(1/2) / Tr(sigma m)`` with the spectrum of
    ``m`` inside ``[1, c']``, ``c' < c``; then ``Tr(sigma m)`` lies in
    ``[1, c']`` and both operator inequalities hold with a margin.
    """
    if c <= 1:
        raise ValueError("c must be > 1")
    rng = _rng(seed)
    sigma = random_density(dim, rng, True, floor)
    U = np.linalg.qr(rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim)))[0]
    top = 1 + (c - 1) * (1 - 1e-3)
    m = (U * rng.uniform(1.0, top, size=dim)) @ U.conj().T
    s = hl.sqrtm_psd(sigma)
    rho = hl.as_hermitian(s @ m @ s)
    return rho / np.trace(rho).real, sigma


def random_stochastic(d_in: int, d_out: int, seed, deterministic: bool = False) -> np.ndarray:
    """Column-stochastic ``d_out x d_in`` matrix; ``deterministic`` gives a surjective 0/1 map."""
    rng = _rng(seed)
    if deterministic:
        targets = np.concatenate([np.arange(d_out), rng.integers(0, d_out, size=max(0, d_in - d_out))])[:d_in]
        targets = rng.permutation(targets)
        P = np.zeros((d_out, d_in))
        P[targets, np.arange(d_in)] = 1.0
        return P
    P = rng.uniform(size=(d_out, d_in))
    return P / P.sum(axis=0, keepdims=True)


def random_diagonal_state(dim: int, seed, floor: float = DEFAULT_FLOOR) -> np.ndarray:
    rng = _rng(seed)
    p = rng.dirichlet(np.ones(dim))
    p = (1 - floor) * p + floor / dim
    return np.diag(p).astype(complex)


def faithful_channel_instance(dim: int, rng, floor: float = DEFAULT_FLOOR, max_tries: int = 20):
    """``(rho, sigma, channel)`` with faithful ``sigma`` and ``T(sigma)``; resamples otherwise."""
    for _ in range(max_tries):
        rho = random_density(dim, rng, True, floor)
        sigma = random_density(dim, rng, True, floor)
        env = int(rng.integers(1, dim + 1))
        d_out = int(rng.integers(max(1, -(-dim // env)), dim + 1)) if env > 1 else dim
        T = ch.random_channel(dim, d_out, env, int(rng.integers(2**62)))
        if hl.is_faithful(T.schrodinger(sigma)) and np.linalg.eigvalsh(T.schrodinger(sigma))[0] > 1e-10:
            return rho, sigma, T
    raise RuntimeError("could not draw an instance with faithful T(sigma)")


# ---------------------------------------------------------------- suites

@dataclass(frozen=True)
class Suite:
    """A named check with its generator kind, default tolerance and default trial count."""

    name: str
    run: Callable
    tol: float
    max_dim: int = 8
    description: str = ""
    kind: str = "faithful-pair"
    trials: int = 100


def _enc(A) -> list:
    A = np.asarray(A, dtype=complex)
    return [[[float(z.real), float(z.imag)] for z in row] for row in np.atleast_2d(A)]


def _suite_dpi(rng, dim, ctx):
    rho, sigma, T = faithful_channel_instance(dim, rng, ctx["floor"])
    return iq.check_dpi(rho, sigma, T, ctx["tol"]), {"rho": _enc(rho), "sigma": _enc(sigma), "channel": T.to_dict()}


def _improved(order):
    def run(rng, dim, ctx):
        rho, sigma, T = faithful_channel_instance(dim, rng, ctx["floor"])
        rep = iq.check_improved_dpi(rho, sigma, T, order, ctx["rule"], ctx["meas"], ctx["tol"],
                                    grid_check=ctx.get("grid_check", False))
        return rep, {"rho": _enc(rho), "sigma": _enc(sigma), "channel": T.to_dict()}
    return run


def _classical_instance(dim, rng, ctx, deterministic):
    d_out = int(rng.integers(2, dim + 1)) if dim > 2 else 2
    P = random_stochastic(dim, d_out, rng, deterministic)
    T = ch.classical_channel(P)
    rho = random_diagonal_state(dim, rng, ctx["floor"])
    sigma = random_diagonal_state(dim, rng, ctx["floor"])
    return rho, sigma, T, P


def _saturation(deterministic):
    def run(rng, dim, ctx):
        rho, sigma, T, P = _classical_instance(dim, rng, ctx, deterministic)
        rep = iq.check_measured_saturation(rho, sigma, T, ctx["rule"], ctx["meas"], ctx["tol"])
        return rep, {"p": np.diag(rho).real.tolist(), "q": np.diag(sigma).real.tolist(), "stochastic": P.tolist()}
    return run


def _suite_fidelity(rng, dim, ctx):
    rho, sigma, T = faithful_channel_instance(dim, rng, ctx["floor"])
    rep = iq.check_fidelity_bound(rho, sigma, T, ctx["rule"], ctx["meas"], ctx["tol"])
    return rep, {"rho": _enc(rho), "sigma": _enc(sigma), "channel": T.to_dict()}


RENYI_S = (0.5, 0.7, 0.9)


def _suite_renyi(rng, dim, ctx):
    s = RENYI_S[ctx["trial"] % len(RENYI_S)]
    rho, sigma, T = faithful_channel_instance(dim, rng, ctx["floor"])
    rep = iq.check_renyi_integral_bound(rho, sigma, T, s, ctx["rule"], ctx["tol"])
    return rep, {"s": s, "rho": _enc(rho), "sigma": _enc(sigma), "channel": T.to_dict()}


def _suite_recovery(rng, dim, ctx):
    _, sigma, T = faithful_channel_instance(dim, rng, ctx["floor"])
    return iq.check_perfect_recovery(T, sigma, ctx["rule"], ctx["tol"]), {"sigma": _enc(sigma), "channel": T.to_dict()}


def _suite_chain(rng, dim, ctx):
    rho = random_density(dim, rng, True, ctx["floor"])
    sigma = random_density(dim, rng, True, ctx["floor"])
    return iq.check_divergence_chain(rho, sigma, ctx["meas"], ctx["tol"]), {"rho": _enc(rho), "sigma": _enc(sigma)}


def _reference_state(dim, rng):
    # every third instance uses the tracial state
    if rng.uniform() < 1 / 3:
        return np.eye(dim, dtype=complex) / dim
    return random_density(dim, rng, True, 0.1)


def _suite_cor1(rng, dim, ctx):
    n = int(rng.integers(1, 5))
    a = [random_psd(dim, rng) for _ in range(n)]
    psi = _reference_state(dim, rng)
    r = float(rng.choice([0.25, 0.5, 0.75, 1.0]))
    p = float(rng.choice([2.0, 3.0, 4.0]))
    rep = iq.check_cor1(a, psi, r, p, tol=ctx["tol"])
    return rep, {"a": [_enc(x) for x in a], "psi": _enc(psi), "r": r, "p": p}


def _suite_alt(rng, dim, ctx):
    zeta = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    zeta = zeta / np.linalg.norm(zeta)
    psi = random_density(dim, rng, True, 0.1)
    r = float((2.0, 3.0, 4.0)[ctx["trial"] % 3])
    return iq.check_alt(zeta, psi, r, ctx["tol"]), {"zeta": _enc(zeta), "psi": _enc(psi), "r": r}


def _suite_cor3(rng, dim, ctx):
    k = int(rng.integers(1, 4))
    hs = [random_hermitian(dim, rng, 0.5) for _ in range(k)]
    psi = _reference_state(dim, rng)
    return iq.check_cor3(hs, psi, tol=ctx["tol"]), {"h": [_enc(h) for h in hs], "psi": _enc(psi)}


def _suite_hirschman(rng, dim, ctx):
    theta = float(rng.uniform(0.05, 0.45))
    mats = tuple(random_psd(dim, rng) for _ in range(int(rng.integers(1, 4))))
    phi = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    chi = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    g = iq.ScalarFamily("matrix_element", mats=mats, phi=phi, chi=chi)
    rep = iq.check_hirschman(g, theta, tol=ctx["tol"])
    return rep, {"theta": theta, "mats": [_enc(m) for m in mats], "phi": _enc(phi[None]), "chi": _enc(chi[None])}


INTERP_PAIRS = ((math.inf, 2.0), (2.0, 4.0), (1.0, 2.0), (2.0, 1.0), (1.0, 1.5))


def _suite_interpolation(rng, dim, ctx):
    p0, p1 = INTERP_PAIRS[ctx["trial"] % len(INTERP_PAIRS)]
    theta = float(rng.uniform(0.05, 0.45))
    mats = tuple(random_psd(dim, rng) for _ in range(int(rng.integers(1, 3))))
    zeta = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    psi = random_density(dim, rng, True, 0.1)
    G = iq.MatrixPowerFamily(mats, zeta)
    rep = iq.check_lp_interpolation(G, psi, p0, p1, theta, tol=ctx["tol"])
    return rep, {"p0": p0, "p1": p1, "theta": theta, "mats": [_enc(m) for m in mats], "zeta": _enc(zeta),
                 "psi": _enc(psi)}


def _majorized_channel_instance(dim, rng):
    for _ in range(20):
        rho, sigma = majorized_pair(dim, rng, 2.0)
        env = int(rng.integers(1, dim + 1))
        T = ch.random_channel(dim, dim, env, int(rng.integers(2**62)))
        if hl.is_faithful(T.schrodinger(sigma)) and hl.is_faithful(T.schrodinger(rho)):
            return rho, sigma, T
    raise RuntimeError("could not draw a majorized instance with faithful images")


def _suite_entropy_identity(rng, dim, ctx):
    rho, sigma, T = _majorized_channel_instance(dim, rng)
    hs = [random_hermitian(dim, rng, 0.5) for _ in range(20)]
    rep = iq.check_entropy_difference_identity(rho, sigma, T, hs, ctx["tol"])
    return rep, {"rho": _enc(rho), "sigma": _enc(sigma), "channel": T.to_dict()}


def _suite_trotter(rng, dim, ctx):
    rho, sigma, T = _majorized_channel_instance(dim, rng)
    h = random_hermitian(dim, rng, 0.5)
    rep = iq.check_trotter_limit(rho, sigma, h, channel=T, threshold=ctx["tol"])
    return rep, {"rho": _enc(rho), "sigma": _enc(sigma), "channel": T.to_dict(), "h": _enc(h)}


def _suite_petz_identity(rng, dim, ctx):
    _, sigma, T = faithful_channel_instance(dim, rng, ctx["floor"])
    a = random_hermitian(dim, rng) + 1j * random_hermitian(dim, rng)
    b = random_hermitian(T.d_out, rng) + 1j * random_hermitian(T.d_out, rng)
    t = float((-2, -1, 0, 1, 2)[ctx["trial"] % 5])
    rep = iq.check_petz_identity(T, sigma, a, b, t, ctx["tol"])
    return rep, {"sigma": _enc(sigma), "channel": T.to_dict(), "a": _enc(a), "b": _enc(b), "t": t}


def _suite_gamma_bound(rng, dim, ctx):
    rho, sigma, T = faithful_channel_instance(dim, rng, ctx["floor"])
    a = random_psd(dim, rng, 0.0)
    t = float(rng.uniform(-3, 3))
    rep = iq.check_gamma_petz_bound(T, rho, sigma, a, t, ctx["tol"])
    return rep, {"rho": _enc(rho), "sigma": _enc(sigma), "channel": T.to_dict(), "a": _enc(a), "t": t}


def _suite_gamma_strip(rng, dim, ctx):
    rho, sigma, T = faithful_channel_instance(dim, rng, ctx["floor"])
    return iq.check_gamma_strip(T, rho, sigma, tol=ctx["tol"]), {"rho": _enc(rho), "sigma": _enc(sigma),
                                                                 "channel": T.to_dict()}


def _suite_v(rng, dim, ctx):
    rho, _, T = faithful_channel_instance(dim, rng, ctx["floor"])
    return iq.check_v_contraction(T, rho, ctx["tol"]), {"rho": _enc(rho), "channel": T.to_dict()}


SUITES: dict[str, Suite] = {s.name: s for s in (
    Suite("dpi", _suite_dpi, 1e-8, 8, "data processing", "random-channel", 1000),
    Suite("improved_dpi", _improved("theorem"), 1e-6, 3, "loss >= S_meas(rho | recovered)", "random-channel", 500),
    Suite("improved_dpi_intro", _improved("intro"), 1e-6, 3, "loss >= S_meas(recovered | rho)", "random-channel",
          500),
    Suite("saturation", _saturation(False), 1e-6, 4, "|loss - S_meas| on classical stochastic instances",
          "classical-channel", 100),
    Suite("saturation_deterministic", _saturation(True), 1e-6, 4, "same on deterministic classical maps",
          "classical-channel", 100),
    Suite("fidelity", _suite_fidelity, 1e-6, 4, "loss >= -log F**2 and S_meas dominance", "random-channel", 300),
    Suite("renyi", _suite_renyi, 1e-6, 4, "integrated sandwiched Renyi bound, s cycled over 0.5, 0.7, 0.9",
          "random-channel", 900),
    Suite("recovery", _suite_recovery, 1e-8, 8, "recovery of the reference state", "random-channel", 1000),
    Suite("chain", _suite_chain, 1e-6, 4, "S >= S_meas >= -2 log F", "faithful-pair", 500),
    Suite("cor1", _suite_cor1, 1e-6, 4, "multi-matrix Lp bound", "faithful-pair", 300),
    Suite("alt", _suite_alt, 1e-8, 8, "Araki-Lieb-Thirring in Lp form", "faithful-pair", 300),
    Suite("cor3", _suite_cor3, 1e-6, 4, "generalized Golden-Thompson", "faithful-pair", 300),
    Suite("hirschman", _suite_hirschman, 1e-7, 4, "scalar three-lines bound", "faithful-pair", 200),
    Suite("interpolation", _suite_interpolation, 1e-6, 4, "Lp three-lines bound", "faithful-pair", 200),
    Suite("entropy_identity", _suite_entropy_identity, 1e-6, 4, "entropy loss as a variational sup",
          "majorized-pair", 100),
    Suite("trotter", _suite_trotter, 1e-4, 4, "product formula for the perturbed vector", "majorized-pair", 100),
    Suite("petz_identity", _suite_petz_identity, 1e-8, 8, "defining identity of rotated Petz maps",
          "random-channel", 200),
    Suite("gamma_bound", _suite_gamma_bound, 1e-8, 4, "Gamma on the upper line vs rotated Petz",
          "random-channel", 200),
    Suite("gamma_strip", _suite_gamma_strip, 1e-9, 4, "||Gamma(z)|| <= 1 on the strip", "random-channel", 100),
    Suite("v_contraction", _suite_v, 1e-10, 8, "||V|| <= 1", "random-channel", 200),
)}


# ---------------------------------------------------------------- campaign

@dataclass
class CampaignConfig:
    suites: list = field(default_factory=lambda: list(SUITES))
    dims: list = field(default_factory=lambda: [2, 3, 4])
    trials: int | None = None
    seed: int = 20240607
    tolerances: dict = field(default_factory=dict)
    quadrature: dict = field(default_factory=lambda: {"n_nodes": DEFAULT_NODES, "t_max": DEFAULT_T_MAX})
    floor: float = DEFAULT_FLOOR
    out: str = "campaign.csv"
    failures: str | None = None
    plots: bool = True
    workers: int = 1

    def __post_init__(self):
        if isinstance(self.suites, str):
            self.suites = [s for s in self.suites.split(",") if s]
        unknown = [s for s in self.suites if s not in SUITES]
        if unknown:
            raise ValueError(f"unknown suite(s): {', '.join(unknown)}")
        if not self.suites:
            raise ValueError("no suites selected")
        if self.trials is not None and int(self.trials) < 1:
            raise ValueError("trials must be >= 1")
        if not self.dims or any(not 2 <= int(d) <= 8 for d in self.dims):
            raise ValueError("dims must be a non-empty list of integers in [2, 8]")
        self.dims = [int(d) for d in self.dims]
        if self.workers < 1:
            raise ValueError("workers must be >= 1")
        bad = [k for k in self.tolerances if k not in SUITES]
        if bad:
            raise ValueError(f"tolerance given for unknown suite(s): {', '.join(bad)}")

    @classmethod
    def from_mapping(cls, data: dict) -> "CampaignConfig":
        known = set(cls.__dataclass_fields__)
        extra = set(data) - known
        if extra:
            raise ValueError(f"unknown config key(s): {', '.join(sorted(extra))}")
        return cls(**data)

    def trials_for(self, suite: str) -> int:
        return int(self.trials) if self.trials is not None else SUITES[suite].trials

    def tol_for(self, suite: str) -> float:
        return float(self.tolerances.get(suite, SUITES[suite].tol))


def load_config(path) -> CampaignConfig:
    """Read a JSON or YAML campaign file (by extension, JSON otherwise)."""
    path = Path(path)
    text = path.read_text()
    if path.suffix.lower() in (".yaml", ".yml"):
        import yaml
        data = yaml.safe_load(text) or {}
    else:
        data = json.loads(text)
    if not isinstance(data, dict):
        raise ValueError(f"{path}: config must be a mapping")
    return CampaignConfig.from_mapping(data)


@dataclass(frozen=True)
class InstanceDescriptor:
    """Everything needed to regenerate one trial; ``payload`` holds the instance itself."""

    suite: str
    seed: int
    trial: int
    dim: int
    kind: str
    payload: dict = field(default_factory=dict, compare=False)

    @property
    def ref(self) -> str:
        return f"{self.suite}:{self.seed}:{self.trial}:{self.dim}"


@dataclass(frozen=True)
class TrialResult:
    suite: str
    trial: int
    dim: int
    seed: int
    report: CheckReport
    payload: dict

    @property
    def instance_ref(self) -> str:
        return f"{self.suite}:{self.seed}:{self.trial}:{self.dim}"

    @property
    def descriptor(self) -> InstanceDescriptor:
        return InstanceDescriptor(self.suite, self.seed, self.trial, self.dim, SUITES[self.suite].kind,
                                  self.payload)


def run_trial(suite: str, seed: int, trial: int, dim: int, tol: float | None = None,
              quadrature: dict | None = None, floor: float = DEFAULT_FLOOR, **ctx_extra) -> TrialResult:
    """Regenerate and evaluate one trial; deterministic in its arguments."""
    spec = SUITES[suite]
    dim = min(int(dim), spec.max_dim)
    q = quadrature or {}
    ctx = {
        "tol": spec.tol if tol is None else tol,
        "rule": beta_quadrature(0.0, int(q.get("n_nodes", DEFAULT_NODES)), float(q.get("t_max", DEFAULT_T_MAX))),
        "meas": dv.MeasOptConfig(),
        "floor": floor,
        "trial": trial,
        **ctx_extra,
    }
    rng = trial_rng(seed, trial)
    try:
        report, payload = spec.run(rng, dim, ctx)
    except (ValueError, RuntimeError, np.linalg.LinAlgError) as exc:
        report = CheckReport(suite, math.nan, math.nan, math.nan, False, ctx["tol"], reason=f"error: {exc}")
        payload = {}
    report = CheckReport(report.suite if report.suite == suite else suite, report.lhs, report.rhs, report.gap,
                         report.passed, report.tol, report.vacuous, report.reason, report.instance, seed, report.extra)
    return TrialResult(suite, trial, dim, seed, report, payload)


def _task(args):
    suite, seed, trial, dim, tol, quad, floor = args
    return run_trial(suite, seed, trial, dim, tol, quad, floor)


def iter_tasks(cfg: CampaignConfig):
    for suite in cfg.suites:
        for trial in range(cfg.trials_for(suite)):
            dim = cfg.dims[trial % len(cfg.dims)]
            yield (suite, cfg.seed, trial, dim, cfg.tol_for(suite), cfg.quadrature, cfg.floor)


def execute(cfg: CampaignConfig) -> list[TrialResult]:
    tasks = list(iter_tasks(cfg))
    if cfg.workers == 1:
        return [_task(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
        return list(pool.map(_task, tasks, chunksize=max(1, len(tasks) // (8 * cfg.workers))))


def _fmt(x: float) -> str:
    return repr(float(x))


def csv_text(results: list[TrialResult]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in results:
        rep = r.report
        w.writerow([r.suite, r.trial, r.dim, _fmt(rep.lhs), _fmt(rep.rhs), _fmt(rep.gap),
                    int(rep.passed), int(rep.vacuous), r.seed, r.instance_ref])
    return buf.getvalue()


def summarize(results: list[TrialResult]) -> dict:
    out = {}
    for r in results:
        s = out.setdefault(r.suite, {"trials": 0, "passed": 0, "failed": 0, "vacuous": 0,
                                     "worst_gap": math.inf, "worst_instance": None})
        s["trials"] += 1
        rep = r.report
        if rep.passed:
            s["passed"] += 1
        else:
            s["failed"] += 1
        if rep.vacuous:
            s["vacuous"] += 1
        gap = rep.gap if not math.isnan(rep.gap) else -math.inf
        if gap < s["worst_gap"]:
            s["worst_gap"] = gap
            s["worst_instance"] = r.instance_ref
    for s in out.values():
        s["pass_rate"] = s["passed"] / s["trials"]
    return out


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (np.floating, float)):
        x = float(x)
        return x if math.isfinite(x) else repr(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.bool_,)):
        return bool(x)
    if isinstance(x, complex):
        return [x.real, x.imag]
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    return x


def failure_records(results: list[TrialResult], cfg: CampaignConfig) -> list[dict]:
    recs = []
    for r in results:
        if r.report.passed:
            continue
        recs.append(_jsonable({
            "descriptor": {"suite": r.suite, "seed": r.seed, "trial": r.trial, "dim": r.dim,
                           "kind": SUITES[r.suite].kind, "tol": r.report.tol, "quadrature": cfg.quadrature, "floor": cfg.floor},
            "gap": r.report.gap, "lhs": r.report.lhs, "rhs": r.report.rhs, "reason": r.report.reason,
            "extra": r.report.extra, "payload": r.payload,
        }))
    return recs


@dataclass
class CampaignOutcome:
    results: list
    summary: dict
    csv_path: Path
    failures_path: Path | None
    summary_path: Path
    figures: list

    @property
    def all_passed(self) -> bool:
        return all(s["failed"] == 0 for s in self.summary.values())

    @property
    def exit_code(self) -> int:
        return 0 if self.all_passed else 1


def run_campaign(cfg: CampaignConfig) -> CampaignOutcome:
    """Run every (suite, trial), write the CSV, a summary JSON, a failure sidecar and figures."""
    results = execute(cfg)
    csv_path = Path(cfg.out)
    if csv_path.parent and not csv_path.parent.exists():
        csv_path.parent.mkdir(parents=True, exist_ok=True)
    try:
        csv_path.write_text(csv_text(results))
    except OSError as exc:
        raise OSError(f"cannot write CSV to {csv_path}: {exc}") from exc
    summary = summarize(results)
    summary_path = csv_path.with_suffix(".summary.json")
    summary_path.write_text(json.dumps(_jsonable(summary), indent=2, sort_keys=True) + "\n")
    fails = failure_records(results, cfg)
    failures_path = Path(cfg.failures) if cfg.failures else csv_path.with_suffix(".failures.json")
    if fails:
        failures_path.write_text(json.dumps(fails, indent=1) + "\n")
    else:
        failures_path = None
    figures = []
    if cfg.plots:
        from .plotting import gap_histograms
        figures = gap_histograms(results, csv_path.parent / (csv_path.stem + "_figures"))
    return CampaignOutcome(results, summary, csv_path, failures_path, summary_path, figures)


def replay(record: dict) -> TrialResult:
    """Re-run a failure record from its descriptor."""
    d = record["descriptor"]
    return run_trial(d["suite"], d["seed"], d["trial"], d["dim"], d.get("tol"), d.get("quadrature"),
                     d.get("floor", DEFAULT_FLOOR))


def config_dict(cfg: CampaignConfig) -> dict:
    return _jsonable(asdict(cfg))
