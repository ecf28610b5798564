"""Numerical checks of entropy, trace and interpolation inequalities.

Every check returns a :class:`~petzlab.reports.CheckReport`. The report's
``lhs`` is always the side claimed to be the larger one, so ``gap >= -tol``
means the inequality held on the instance. Identities and residual-type
checks report ``lhs = 0`` and ``rhs = residual``.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from math import inf

import numpy as np

from . import channels as ch
from . import divergences as dv
from . import hermlin as hl
from . import standard_form as sf
from .quadrature import DEFAULT_NODES, DEFAULT_T_MAX, QuadratureRule, alpha_quadrature, beta_quadrature
from .reports import CheckReport

ORDERS = ("theorem", "intro")


def _residual_report(suite: str, residual: float, tol: float, **kw) -> CheckReport:
    return CheckReport.make(suite, 0.0, residual, tol, **kw)


def _with_pass(report: CheckReport, ok: bool, reason: str = "") -> CheckReport:
    """Tighten a report's pass flag with an additional condition."""
    if ok:
        return report
    return dataclasses.replace(report, passed=False, reason=report.reason or reason)


def _entropy_loss(rho, sigma, channel: ch.KrausChannel) -> tuple[float, np.ndarray, np.ndarray]:
    rho_B = hl.as_hermitian(channel.schrodinger(rho))
    sigma_B = hl.as_hermitian(channel.schrodinger(sigma))
    s_a = dv.relative_entropy(rho, sigma).value
    s_b = dv.relative_entropy(rho_B, sigma_B).value
    if s_a == inf:
        return inf, rho_B, sigma_B
    return s_a - s_b, rho_B, sigma_B


def check_dpi(rho, sigma, channel: ch.KrausChannel, tol: float = 1e-8) -> CheckReport:
    """``S(rho|sigma) - S(T rho|T sigma) >= 0``."""
    loss, _, _ = _entropy_loss(rho, sigma, channel)
    return CheckReport.make("dpi", loss, 0.0, tol)


def _recovered(rho, sigma, channel, rule):
    rho_B = hl.as_hermitian(channel.schrodinger(rho))
    return ch.recover_state(channel, sigma, rho_B, rule)


def check_improved_dpi(rho, sigma, channel: ch.KrausChannel, order: str = "theorem",
                       rule: QuadratureRule | None = None, cfg: dv.MeasOptConfig | None = None,
                       tol: float = 1e-6, grid_check: bool = False) -> CheckReport:
    """Entropy loss under the channel against the measured relative entropy of the recovered state.

    ``order="theorem"`` uses ``S_meas(rho | recovered)``, ``order="intro"``
    the swapped ``S_meas(recovered | rho)``. The optimizer value is a lower
    bound on the true measured entropy, so a failure here cannot be caused by
    an under-converged optimizer.
    """
    if order not in ORDERS:
        raise ValueError(f"order must be one of {ORDERS}")
    rho = hl.as_density(rho)
    sigma = hl.as_density(sigma)
    loss, _, _ = _entropy_loss(rho, sigma, channel)
    if loss == inf:
        return CheckReport.make(f"improved_dpi_{order}", inf, 0.0, tol, reason="support")
    rec = hl.as_density(_recovered(rho, sigma, channel, rule), tol=1e-8)
    rec = rec / np.trace(rec).real
    first, second = (rho, rec) if order == "theorem" else (rec, rho)
    m = dv.measured_relative_entropy(first, second, cfg)
    extra = {"order": order, "converged": m.converged}
    if grid_check and len(rho) == 2:
        g = dv.measured_grid_oracle(first, second)
        extra["grid"] = g
        extra["grid_diff"] = m.value - g
    return CheckReport.make(f"improved_dpi_{order}", loss, m.value, tol, extra=extra)


def check_measured_saturation(rho, sigma, channel: ch.KrausChannel, rule: QuadratureRule | None = None,
                              cfg: dv.MeasOptConfig | None = None, tol: float = 1e-6) -> CheckReport:
    """Two-sided check ``|loss - S_meas(rho|recovered)| <= tol``, meant for commuting instances."""
    rep = check_improved_dpi(rho, sigma, channel, "theorem", rule, cfg, tol)
    return _residual_report("saturation", abs(rep.gap), tol, extra={"loss": rep.lhs, "s_meas": rep.rhs})


def check_fidelity_bound(rho, sigma, channel: ch.KrausChannel, rule: QuadratureRule | None = None,
                         cfg: dv.MeasOptConfig | None = None, tol: float = 1e-6) -> CheckReport:
    """Entropy loss against ``-log F(recovered, rho)**2``.

    Also requires that the measured bound on the same instance dominates the
    fidelity bound up to ``tol``.
    """
    rho = hl.as_density(rho)
    sigma = hl.as_density(sigma)
    loss, _, _ = _entropy_loss(rho, sigma, channel)
    if loss == inf:
        return CheckReport.make("fidelity", inf, 0.0, tol, reason="support")
    rec = _recovered(rho, sigma, channel, rule)
    fid_rhs = dv.neg_log_fidelity(rec, rho).value
    meas = dv.measured_relative_entropy(rho, rec / np.trace(rec).real, cfg).value
    dominance = meas - fid_rhs
    rep = CheckReport.make("fidelity", loss, fid_rhs, tol, extra={"s_meas": meas, "dominance": dominance})
    return _with_pass(rep, dominance >= -tol, "dominance")


def check_renyi_integral_bound(rho, sigma, channel: ch.KrausChannel, s: float,
                               rule: QuadratureRule | None = None, tol: float = 1e-6,
                               jensen_tol: float = 1e-8) -> CheckReport:
    """Entropy loss against ``(1-s)/s * int beta_0(t) D_s(rotated_t(T rho) | rho) dt``.

    ``extra`` carries the weaker bound with the integral inside ``D_s``
    (integrated recovery channel) and the Jensen ordering between the two;
    the check fails if either of those is violated.
    """
    rho = hl.as_density(rho)
    sigma = hl.as_density(sigma)
    rule = rule if rule is not None else beta_quadrature(0.0)
    loss, rho_B, _ = _entropy_loss(rho, sigma, channel)
    if loss == inf:
        return CheckReport.make(f"renyi_{s}", inf, 0.0, tol, reason="support")
    outs = ch.rotated_petz_outputs(channel, sigma, rho_B, rule.nodes)
    ds = np.array([dv.sandwiched_renyi(hl.as_hermitian(o), rho, s).value for o in outs])
    if np.any(np.isinf(ds)):
        return CheckReport.make(f"renyi_{s}", loss, -inf, tol, reason="support")
    pref = (1 - s) / s
    outside = float(rule.integrate(ds))
    rec = hl.as_hermitian(np.tensordot(rule.weights, outs, axes=(0, 0)))
    inside = dv.sandwiched_renyi(rec, rho, s).value
    extra = {"s": s, "jensen_rhs": pref * inside, "jensen_order": outside - inside,
             "jensen_gap": loss - pref * inside}
    rep = CheckReport.make(f"renyi_{s}", loss, pref * outside, tol, extra=extra)
    rep = _with_pass(rep, outside - inside >= -jensen_tol, "jensen_order")
    return _with_pass(rep, loss - pref * inside >= -tol, "jensen_bound")


@dataclass(frozen=True)
class ScalarFamily:
    """Constructively holomorphic scalar function on the strip ``0 <= Re z <= 1/2``.

    kinds
        ``"exp"``: ``exp(c z)``; ``"constant"``: ``c``;
        ``"matrix_element"``: ``<phi| A_1**z ... A_m**z |chi>`` for PSD ``A_i``.
    """

    kind: str
    c: complex = 1.0
    mats: tuple = ()
    phi: np.ndarray | None = None
    chi: np.ndarray | None = None

    def __call__(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        if self.kind == "exp":
            return np.exp(self.c * z)
        if self.kind == "constant":
            return np.full(z.shape, complex(self.c))
        if self.kind == "matrix_element":
            fams = [hl.PowerFamily(A) for A in self.mats]
            out = np.empty(z.shape, dtype=complex)
            for idx, zz in np.ndenumerate(z):
                v = np.asarray(self.chi, dtype=complex)
                for fam in reversed(fams):
                    v = fam(zz) @ v
                out[idx] = np.vdot(self.phi, v)
            return out
        raise ValueError(f"unknown family kind {self.kind!r}")


MAX_STRIP_NODES = 16385


def _strip_bound(low, high, theta: float, n_nodes: int | None, t_max: float | None,
                 tol: float) -> tuple[float, dict]:
    """Three-lines bound ``(1-2 theta) int alpha_theta low + 2 theta int beta_theta high``.

    ``low(t)`` and ``high(t)`` are the log-moduli on the lines ``Re z = 0`` and
    ``Re z = 1/2``. A zero of the family close to a line gives a sharp
    logarithmic dip, so the node count is doubled until two successive
    bounds agree to ``tol / 10`` or ``MAX_STRIP_NODES`` is reached.
    """
    n = DEFAULT_NODES if n_nodes is None else n_nodes
    t_max = DEFAULT_T_MAX if t_max is None else t_max
    prev = None
    while True:
        ra, rb = alpha_quadrature(theta, n, t_max), beta_quadrature(theta, n, t_max)
        bound = float((1 - 2 * theta) * ra.integrate(low(ra.nodes)) + 2 * theta * rb.integrate(high(rb.nodes)))
        if prev is not None and (abs(bound - prev) <= tol / 10 or 2 * n - 1 > MAX_STRIP_NODES):
            return bound, {"n_nodes": n, "refinement": abs(bound - prev)}
        prev = bound
        n = 2 * n - 1


def check_hirschman(g: ScalarFamily, theta: float, n_nodes: int | None = None, t_max: float | None = None,
                    tol: float = 1e-7) -> CheckReport:
    """``ln|g(theta)| <= int beta_theta ln|g(1/2+it)|**(2 theta) + alpha_theta ln|g(it)|**(1-2 theta)``."""
    if not 0 < theta < 0.5:
        raise ValueError("theta must lie in (0, 1/2)")
    bound, info = _strip_bound(lambda t: np.log(np.abs(g(1j * t))), lambda t: np.log(np.abs(g(0.5 + 1j * t))),
                               theta, n_nodes, t_max, tol)
    val = float(np.log(np.abs(g(theta))))
    return CheckReport.make("hirschman", bound, val, tol, extra={"theta": theta, "kind": g.kind, **info})


@dataclass(frozen=True)
class MatrixPowerFamily:
    """Vector family ``G(z) = X_1**(s_1 z) ... X_m**(s_m z) zeta`` for PSD ``X_i``."""

    mats: tuple
    zeta: np.ndarray
    scales: tuple | None = None

    def __call__(self, z: complex) -> np.ndarray:
        scales = self.scales or (1.0,) * len(self.mats)
        v = np.asarray(self.zeta, dtype=complex)
        for X, sc in zip(reversed(self.mats), reversed(scales)):
            v = hl.mpow(X, sc * z) @ v
        return v

    def evaluator(self):
        fams = [hl.PowerFamily(X) for X in self.mats]
        scales = self.scales or (1.0,) * len(self.mats)
        zeta = np.asarray(self.zeta, dtype=complex)

        def G(z):
            v = zeta
            for fam, sc in zip(reversed(fams), reversed(scales)):
                v = fam(sc * z) @ v
            return v
        return G


def _valid_pair(p0: float, p1: float) -> bool:
    return (1 <= p0 <= 2 and 1 <= p1 <= 2) or (p0 >= 2 and p1 >= 2)


def check_lp_interpolation(G: MatrixPowerFamily, psi, p0: float, p1: float, theta: float,
                           n_nodes: int | None = None, t_max: float | None = None,
                           tol: float = 1e-6) -> CheckReport:
    """Three-lines bound for Araki-Masuda norms of a holomorphic vector family.

    ``ln ||G(theta)||_{p_theta}`` is bounded by ``(1-2 theta) int alpha_theta ln ||G(it)||_{p0}``
    plus ``2 theta int beta_theta ln ||G(1/2+it)||_{p1}``, where
    ``1/p_theta = (1-2 theta)/p0 + 2 theta/p1``.
    """
    if not _valid_pair(p0, p1):
        raise ValueError("p0, p1 must both lie in [1, 2] or both in [2, inf]")
    if not 0 < theta < 0.5:
        raise ValueError("theta must lie in (0, 1/2)")
    psi = hl.as_density(psi)
    if not hl.is_faithful(psi):
        raise ValueError("reference state must be faithful")
    inv = (1 - 2 * theta) / p0 + 2 * theta / p1
    p_theta = inf if inv == 0 else 1 / inv
    ev = G.evaluator()

    def low(ts):
        return np.array([np.log(sf.lp_norm(ev(1j * t), psi, p0)) for t in ts])

    def high(ts):
        return np.array([np.log(sf.lp_norm(ev(0.5 + 1j * t), psi, p1)) for t in ts])

    bound, info = _strip_bound(low, high, theta, n_nodes, t_max, tol)
    val = np.log(sf.lp_norm(ev(theta), psi, p_theta))
    return CheckReport.make("interpolation", bound, float(val), tol,
                            extra={"p0": p0, "p1": p1, "p_theta": p_theta, "theta": theta, **info})


def _is_tracial(psi) -> bool:
    d = len(psi)
    return bool(np.allclose(psi, np.eye(d) / d, atol=1e-14))


def _schatten_log(X, q: float) -> float:
    """``log Tr |X|**q``."""
    s = np.linalg.svd(X, compute_uv=False)
    return float(np.log(np.sum(s ** q)))


def check_cor1(a_list, psi, r: float, p: float, rule: QuadratureRule | None = None,
               tol: float = 1e-6, time_scale: float = 1.0) -> CheckReport:
    """Multi-matrix bound ``(1/r) log ||a_1**r ... a_n**r psi||_{p/r} <= int beta_{r/2} log ||a_1**(1+it) ... psi||_p``.

    ``psi`` is a faithful density matrix whose natural-cone vector is used.
    The upper-boundary powers are ``1 + i time_scale t``. For the tracial
    state both sides are also evaluated as plain trace expressions and the
    largest disagreement is stored in ``extra["trace_form_diff"]``.
    """
    if not 0 < r <= 1:
        raise ValueError("r must lie in (0, 1]")
    if p < 2:
        raise ValueError("p must be >= 2")
    psi = hl.as_density(psi)
    if not hl.is_faithful(psi):
        raise ValueError("reference state must be faithful")
    rule = rule if rule is not None else beta_quadrature(r / 2)
    fams = [hl.PowerFamily(a) for a in a_list]
    xi = sf.natural_cone_rep(psi)
    d = len(psi)

    def prod(z):
        X = np.eye(d, dtype=complex)
        for fam in fams:
            X = X @ fam(z)
        return X

    A_r = prod(r)
    small = np.log(sf.lp_norm(A_r @ xi, psi, p / r)) / r
    mats = [prod(1 + 1j * time_scale * t) for t in rule.nodes]
    vals = np.array([np.log(sf.lp_norm(M @ xi, psi, p)) for M in mats])
    big = float(rule.integrate(vals))
    extra = {"r": r, "p": p, "n_factors": len(a_list)}
    if _is_tracial(psi):
        tr_small = _schatten_log(A_r, p / r)
        tr_big = float(rule.integrate(np.array([_schatten_log(M, p) for M in mats])))
        extra["trace_small"] = tr_small
        extra["trace_big"] = tr_big
        extra["trace_form_diff"] = max(abs(p * small + np.log(d) - tr_small), abs(p * big + np.log(d) - tr_big))
    return CheckReport.make("cor1", big, float(small), tol, extra=extra)


def check_alt(zeta, psi, r: float, tol: float = 1e-8) -> CheckReport:
    """``||zeta||_{r,psi}**2 <= ||Delta_{zeta,psi}**(r/4) psi||**(4/r)`` for ``r >= 2``.

    ``zeta`` is replaced by the natural-cone vector of its state ``zeta zeta*``,
    which leaves the right side unchanged. The right side is evaluated both
    with the relative modular operator and by the trace formula
    ``Tr(w**((2-r)/4) v**(r/2) w**((2-r)/4))**(2/r)``.
    """
    if r < 2:
        raise ValueError("r must be >= 2")
    omega_z = sf.functional_of(zeta)
    w = hl.as_psd(psi)
    zp = sf.natural_cone_rep(omega_z)
    small = sf.lp_norm(zp, w, r) ** 2
    xi = sf.natural_cone_rep(w)
    vec = sf.rel_modular_apply(zp, xi, r / 4, xi)
    big = hl.hs_norm(vec) ** (4 / r)
    g = hl.mpow(w, (2 - r) / 4)
    big_trace = np.trace(g @ hl.mpow(omega_z, r / 2) @ g).real ** (2 / r)
    return CheckReport.make("alt", big, small, tol, extra={"r": r, "trace_form": big_trace,
                                                           "trace_form_diff": abs(big - big_trace)})


def check_cor3(h_list, psi, rule: QuadratureRule | None = None, tol: float = 1e-6) -> CheckReport:
    """Generalized Golden-Thompson bound for Hermitian ``h_1 ... h_k`` and a faithful state.

    ``log ||psi^(h_1+...+h_k)||**2 <= int beta_0 log(||m_t psi|| ||m_t* psi||)`` with
    ``m_t = prod_j exp((1/2+it) h_j)``. For the tracial state the two sides
    are compared with ``log Tr exp(sum h) - log d`` and
    ``int beta_0 log Tr|exp(h_1/2) exp((1/2+it)h_2) ... exp(h_k/2)|**2 - log d``.
    """
    rule = rule if rule is not None else beta_quadrature(0.0)
    psi = hl.as_density(psi)
    if not hl.is_faithful(psi):
        raise ValueError("reference state must be faithful")
    hs = [hl.as_hermitian(h) for h in h_list]
    if not hs:
        raise ValueError("need at least one h")
    d = len(psi)
    xi = sf.natural_cone_rep(psi)
    small = np.log(hl.hs_norm(sf.perturbed_vector(xi, sum(hs))) ** 2)
    decs = [hl.eigh(h) for h in hs]

    def expo(k, z):
        w, U = decs[k]
        return (U * np.exp(z * w)) @ U.conj().T

    vals = []
    trace_vals = []
    for t in rule.nodes:
        m = np.eye(d, dtype=complex)
        for k in range(len(hs)):
            m = m @ expo(k, 0.5 + 1j * t)
        vals.append(np.log(hl.hs_norm(m @ xi)) + np.log(hl.hs_norm(m.conj().T @ xi)))
        if len(hs) == 1:
            n = expo(0, 0.5)
        else:
            n = expo(0, 0.5)
            for k in range(1, len(hs) - 1):
                n = n @ expo(k, 0.5 + 1j * t)
            n = n @ expo(len(hs) - 1, 0.5)
        trace_vals.append(np.log(hl.hs_norm(n) ** 2))
    big = float(rule.integrate(np.array(vals)))
    extra = {"k": len(hs)}
    if _is_tracial(psi):
        tr_small = float(np.log(np.trace(hl.expm_herm(sum(hs))).real))
        tr_big = float(rule.integrate(np.array(trace_vals)))
        diff = max(abs(small + np.log(d) - tr_small), abs(big + np.log(d) - tr_big))
        extra.update({"trace_small": tr_small, "trace_big": tr_big, "trace_form_diff": diff})
        if len(hs) == 2:
            gt = float(np.log(np.trace(hl.expm_herm(hs[0]) @ hl.expm_herm(hs[1])).real))
            extra["golden_thompson_gap"] = gt - tr_small
            extra["golden_thompson_form_diff"] = abs(gt - tr_big)
    return CheckReport.make("cor3", big, float(small), tol, extra=extra)


def _gauge(h):
    return h - np.trace(h).real / len(h) * np.eye(len(h))


def check_entropy_difference_identity(rho, sigma, channel: ch.KrausChannel, h_samples,
                                      tol: float = 1e-6, attain_tol: float = 1e-5) -> CheckReport:
    """Entropy loss as ``sup_h Tr(rho h) - log Tr exp(log sigma + k + h)`` with the cocycle generator ``k``.

    ``rhs`` is the sampled supremum over ``h_samples`` together with the
    informed choice ``h = log rho - log sigma - k``; the check also fails if
    the informed value misses the entropy loss by more than ``attain_tol``.
    """
    rho = hl.as_density(rho)
    sigma = hl.as_density(sigma)
    if not np.isfinite(sf.majorization_constant(rho, sigma)):
        raise ValueError("entropy identity needs a mutually majorized faithful pair")
    loss, _, _ = _entropy_loss(rho, sigma, channel)
    k = ch.cocycle_generator(channel, rho, sigma)
    base = hl.logm_support(sigma) + k

    def obj(h):
        h = hl.as_hermitian(h)
        return float(np.trace(rho @ h).real - np.log(np.trace(hl.expm_herm(base + h)).real))

    informed_h = _gauge(hl.logm_support(rho) - base)
    informed = obj(informed_h)
    sampled = [obj(h) for h in h_samples]
    unnorm = float(np.trace(rho @ (hl.logm_support(rho) - base)).real)
    extra = {"informed": informed, "sampled_max": max(sampled) if sampled else -inf,
             "identity_residual": abs(loss - unnorm)}
    rep = CheckReport.make("entropy_identity", loss, max([informed] + sampled), tol, extra=extra)
    return _with_pass(rep, abs(informed - loss) <= attain_tol, "not_attained")


def trotter_vector(rho, sigma, h, n: int, channel: ch.KrausChannel | None = None, form: str = "lemma") -> np.ndarray:
    """Finite-``n`` product approximating a perturbed vector.

    ``form="lemma"``: ``(e^{h/n} D^{1/n} a_n D^{1/n} e^{h/n})**(n/4) rho**(1/2)`` with
    ``D`` the relative modular operator of ``(sigma, rho)`` and
    ``a_n = b* b``, ``b = T(sigma_B**(-1/n) rho_B**(1/n))``; needs ``4 | n``.

    ``form="araki"``: ``(D^{1/2n} e^{h_1/n} ... e^{h_k/n} D^{1/2n})**(n/2) sigma**(1/2)``
    with ``D`` the modular operator of ``sigma``; ``h`` may be a list and
    ``rho`` is unused; needs ``2 | n``.
    """
    d = len(sigma)
    if form == "lemma":
        if n % 4:
            raise ValueError("lemma form needs n divisible by 4")
        channel = channel or ch.identity_channel(d)
        rho_B = hl.as_hermitian(channel.schrodinger(rho))
        sigma_B = hl.as_hermitian(channel.schrodinger(sigma))
        b = channel.heisenberg(hl.mpow(sigma_B, -1 / n) @ hl.mpow(rho_B, 1 / n))
        a_n = b.conj().T @ b
        eh = hl.expm_herm(hl.as_hermitian(h) / n)
        left = eh @ hl.mpow(sigma, 1 / n) @ a_n @ hl.mpow(sigma, 1 / n) @ eh
        right = hl.mpow(rho, -2 / n)
        M = np.kron(left, right.T)
        v = sf.natural_cone_rep(rho).ravel()
        steps = n // 4
    elif form == "araki":
        if n % 2:
            raise ValueError("araki form needs even n")
        hs = h if isinstance(h, (list, tuple)) else [h]
        a = np.eye(d, dtype=complex)
        for hj in hs:
            a = a @ hl.expm_herm(hl.as_hermitian(hj) / n)
        s = hl.mpow(sigma, 1 / (2 * n))
        M = np.kron(s @ a @ s, hl.mpow(sigma, -1 / n).T)
        v = sf.natural_cone_rep(sigma).ravel()
        steps = n // 2
    else:
        raise ValueError(f"unknown form {form!r}")
    return (np.linalg.matrix_power(M, steps) @ v).reshape(d, d)


def trotter_target(rho, sigma, h, channel: ch.KrausChannel | None = None, form: str = "lemma") -> np.ndarray:
    if form == "lemma":
        channel = channel or ch.identity_channel(len(sigma))
        k = ch.cocycle_generator(channel, rho, sigma)
        return sf.perturbed_vector(sf.natural_cone_rep(sigma), hl.as_hermitian(h) + k)
    hs = h if isinstance(h, (list, tuple)) else [h]
    return sf.perturbed_vector(sf.natural_cone_rep(sigma), sum(hl.as_hermitian(x) for x in hs))


def check_trotter_limit(rho, sigma, h, n_sequence=tuple(2 ** k for k in range(2, 11)),
                        channel: ch.KrausChannel | None = None, form: str = "lemma",
                        threshold: float = 1e-4) -> CheckReport:
    """Distance of the product formula from its limit along ``n_sequence``.

    Passes when the distance at the largest ``n`` is at most ``threshold``
    and the distances do not increase (up to rounding) along the sequence.
    """
    rho = hl.as_density(rho)
    sigma = hl.as_density(sigma)
    if len(sigma) > 4:
        raise ValueError("trotter check is limited to dim <= 4")
    target = trotter_target(rho, sigma, h, channel, form)
    ns = sorted(n_sequence)
    devs = [hl.hs_norm(trotter_vector(rho, sigma, h, n, channel, form) - target) for n in ns]
    monotone = all(b <= a + 1e-12 for a, b in zip(devs, devs[1:]))
    rep = CheckReport.make("trotter", threshold, devs[-1], 0.0,
                           extra={"n": ns, "deviations": devs, "monotone": monotone, "form": form})
    return _with_pass(rep, monotone, "not_monotone")


def petz_identity_residual(channel: ch.KrausChannel, sigma_A, a, b, t: float) -> float:
    """Difference of the two sides of the Heisenberg-picture defining identity of the rotated Petz map.

    ``<b eta_B | J Delta_B**(it) alpha_t(a) eta_B>`` versus
    ``<T(b) eta_A | J Delta_A**(it) a eta_A>`` with ``eta = sigma**(1/2)``,
    ``Delta`` the modular operator and ``J`` the adjoint.
    """
    sigma_B = hl.as_hermitian(channel.schrodinger(sigma_A))
    alpha_a = ch.rotated_petz(channel, sigma_A, t).heisenberg(a)
    eta_A = sf.natural_cone_rep(sigma_A)
    eta_B = sf.natural_cone_rep(sigma_B)

    def side(x, y, eta):
        vec = sf.rel_modular_apply(eta, eta, 1j * t, y @ eta)
        return hl.hs_inner(x @ eta, sf.modular_conjugation(vec))

    return abs(side(b, alpha_a, eta_B) - side(channel.heisenberg(b), a, eta_A))


def check_petz_identity(channel, sigma_A, a, b, t: float, tol: float = 1e-8) -> CheckReport:
    return _residual_report("petz_identity", petz_identity_residual(channel, sigma_A, a, b, t), tol,
                            extra={"t": t})


def check_gamma_petz_bound(channel, rho_A, sigma_A, a, t: float, tol: float = 1e-8) -> CheckReport:
    """``<Gamma(1/2+it)| a Gamma(1/2+it)> <= Tr(a rotated_{-t}(rho_B))`` for PSD ``a``.

    The rotation parameter enters with a minus sign in this matrix
    convention; with ``+t`` the inequality fails on generic instances.
    """
    G = ch.gamma_vector(channel, rho_A, sigma_A, 0.5 + 1j * t)
    small = np.vdot(G, a @ G).real
    rho_B = hl.as_hermitian(channel.schrodinger(rho_A))
    big = np.trace(a @ ch.rotated_petz(channel, sigma_A, -t)(rho_B)).real
    return CheckReport.make("gamma_petz", big, small, tol, extra={"t": t})


def check_gamma_strip(channel, rho_A, sigma_A, n_re: int = 20, n_im: int = 20, t_max: float = 5.0,
                      tol: float = 1e-9) -> CheckReport:
    """Largest ``||Gamma(z)||`` on an ``n_re x n_im`` grid of the closed strip, against 1."""
    gamma = ch.GammaFamily(channel, rho_A, sigma_A)
    norms = [hl.hs_norm(gamma(x + 1j * y))
             for x in np.linspace(0, 0.5, n_re) for y in np.linspace(-t_max, t_max, n_im)]
    return CheckReport.make("gamma_strip", 1.0, max(norms), tol)


def check_v_contraction(channel, rho_A, tol: float = 1e-10) -> CheckReport:
    V = ch.v_contraction(channel, rho_A)
    return CheckReport.make("v_contraction", 1.0, hl.operator_norm(V), tol)


def check_perfect_recovery(channel, sigma_A, rule: QuadratureRule | None = None, tol: float = 1e-8) -> CheckReport:
    """Trace distance between ``sigma_A`` and its recovery from ``T(sigma_A)``."""
    sigma_B = hl.as_hermitian(channel.schrodinger(sigma_A))
    rec = ch.recover_state(channel, sigma_A, sigma_B, rule)
    return _residual_report("recovery", hl.trace_norm(rec - sigma_A), tol)


def check_divergence_chain(rho, sigma, cfg: dv.MeasOptConfig | None = None, tol: float = 1e-6) -> CheckReport:
    """``S >= S_meas >= -2 log F``; the report gap is the smaller link slack."""
    S = dv.relative_entropy(rho, sigma).value
    M = dv.measured_relative_entropy(rho, sigma, cfg).value
    F = dv.neg_log_fidelity(rho, sigma).value
    links = {"S": S, "S_meas": M, "neg_log_F": F, "upper_link": S - M, "lower_link": M - F}
    return CheckReport.make("chain", min(S - M, M - F), 0.0, tol, extra=links)
