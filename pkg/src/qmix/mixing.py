"""Distances, time evolution, mixing bounds and hypercontractivity checks.

Bounds implemented for a primitive generator with stationary state sigma
(sigma_min its smallest eigenvalue):

    chi^2 bound:        ||rho_t - sigma||_tr <= sqrt(1/sigma_min) e^{-lambda t}
    LS_1 bound:         ||rho_t - sigma||_tr <= sqrt(2 log(1/sigma_min)) e^{-alpha1 t}
    LS_2 bounds:        same prefactor with e^{-alpha2 t/2} (weakly regular)
                        or e^{-alpha2 t} (strongly regular)

The empirical worst case is sampled over the eigenprojectors of sigma
(the sigma_min projector maximizes both initial divergences) plus Haar
random pure states; every report states the sample size, since no finite
sample certifies the supremum over all inputs.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .dirichlet_gap import dirichlet
from .generators import Generator, hat_generator, lift_channel, stationary_state
from .lp_space import WeightedSpace
from .operator_core import (
    eig_hermitian,
    hermitian_part,
    left_right_super,
    matrix_function,
    random_pure_state,
    require_hermitian,
    unvec,
    vec,
)

__all__ = [
    "RelativeDensity",
    "MixingCurve",
    "trace_norm",
    "relative_entropy_states",
    "chi2_divergence",
    "distances",
    "evolve",
    "worst_case_states",
    "bound_curves",
    "mixing_time",
    "entropy_decay_check",
    "entropy_production",
    "pq_norm",
    "two_two_norm_decay",
    "discrete_vs_continuous",
    "chi2_gap_time_check",
    "hypercontractivity_check",
]

STATE_TOL = 1e-10
PINSKER_SLACK = 1e-7
DOMINATION_SLACK = 1e-7


def trace_norm(a) -> float:
    """tr|A| of a Hermitian matrix."""
    return float(np.sum(np.abs(np.linalg.eigvalsh(require_hermitian(a)))))


def _check_state(rho) -> np.ndarray:
    rho = require_hermitian(rho, name="state")
    tr = float(np.trace(rho).real)
    if abs(tr - 1.0) > STATE_TOL * max(1.0, abs(tr)):
        raise ValueError(f"state trace is {tr!r}, not 1")
    w = np.linalg.eigvalsh(rho)
    if w[0] < -STATE_TOL:
        raise ValueError(f"state has negative eigenvalue {w[0]:.3e}")
    return rho


def relative_entropy_states(rho, sigma) -> float:
    """D(rho||sigma) = tr[rho(log rho - log sigma)] with the 0*log(0) = 0
    convention on rho's null space (sigma must be full rank)."""
    rho = require_hermitian(rho)
    w, v = eig_hermitian(rho)
    w = np.clip(w, 0.0, None)
    plogp = float(np.sum(w[w > 0] * np.log(w[w > 0])))
    ws, vs = eig_hermitian(sigma)
    if ws[0] <= 0:
        raise ValueError("relative entropy needs full-rank sigma")
    log_sigma = (vs * np.log(ws)) @ vs.conj().T
    val = plogp - float(np.trace(rho @ log_sigma).real)
    return max(val, 0.0)


def chi2_divergence(rho, space: WeightedSpace) -> float:
    delta = require_hermitian(rho) - space.sigma
    return max(float(np.trace(delta @ space.gamma_inv(delta)).real), 0.0)


@dataclass
class RelativeDensity:
    """rho^sigma = Gamma^{-1}(rho); evolves under the hat generator."""
    value: np.ndarray
    space: WeightedSpace

    @classmethod
    def from_state(cls, rho, space: WeightedSpace) -> "RelativeDensity":
        rho = _check_state(rho)
        val = space.gamma_inv(rho)
        enc = float(np.trace(space.gamma(val)).real)
        if abs(enc - 1.0) > 1e-10:
            raise ArithmeticError(f"relative density encodes trace {enc!r}")
        return cls(value=val, space=space)


def distances(rho, space: WeightedSpace) -> dict:
    """Trace distance, chi^2 divergence and relative entropy to sigma.

    The Pinsker-type inequalities ||rho-sigma||_tr^2 <= 2 D(rho||sigma) and
    <= chi^2(rho, sigma) are verified on every call; a violation beyond
    slack indicates numerical breakdown and raises.
    """
    rho = _check_state(rho)
    tr = trace_norm(rho - space.sigma)
    chi2 = chi2_divergence(rho, space)
    rel = relative_entropy_states(rho, space.sigma)
    if tr ** 2 > chi2 + PINSKER_SLACK or tr ** 2 > 2.0 * rel + PINSKER_SLACK:
        raise ArithmeticError(
            f"trace-norm bound violated: tr^2={tr**2:.3e}, chi2={chi2:.3e}, 2D={2*rel:.3e}")
    return {"trace": tr, "chi2": chi2, "rel_ent": rel}


def evolve(g: Generator, rho0, t: float) -> np.ndarray:
    """rho_t = exp(t L*)(rho_0); validates the input and output states."""
    if t < 0:
        raise ValueError("evolve needs t >= 0")
    rho0 = _check_state(rho0)
    rho_t = hermitian_part(g.evolve_schrodinger(rho0, float(t)))
    tr = float(np.trace(rho_t).real)
    if abs(tr - 1.0) > 1e-9:
        raise ArithmeticError(f"evolution lost trace: {tr!r}")
    w = np.linalg.eigvalsh(rho_t)
    if w[0] < -1e-9:
        raise ArithmeticError(f"evolution lost positivity: min eig {w[0]:.3e}")
    return rho_t


def worst_case_states(space: WeightedSpace, n_haar: int = 50, seed: int = 0):
    """Initial states for worst-case sampling: all eigenprojectors of sigma
    (including the sigma_min one) plus Haar-random pure states."""
    rng = np.random.default_rng(seed)
    states = [np.outer(space.eigvecs[:, j], space.eigvecs[:, j].conj())
              for j in range(space.dim)]
    states += [random_pure_state(space.dim, rng) for _ in range(n_haar)]
    return states


@dataclass
class MixingCurve:
    times: np.ndarray
    trace_dist: np.ndarray
    chi2: np.ndarray
    rel_ent: np.ndarray
    chi2_bound: np.ndarray | None
    ls_bound_a1: np.ndarray | None
    ls_bound_a2: np.ndarray | None
    n_states: int
    domination_margin: float  # min over grid of min(bounds) - trace_dist

    def columns(self):
        cols = [("t", self.times), ("trace_dist", self.trace_dist),
                ("chi2", self.chi2), ("rel_ent", self.rel_ent)]
        for name in ("chi2_bound", "ls_bound_a1", "ls_bound_a2"):
            val = getattr(self, name)
            if val is not None:
                cols.append((name, val))
        return cols

    def to_csv(self, path):
        cols = self.columns()
        with open(path, "w") as fh:
            fh.write(",".join(name for name, _ in cols) + "\n")
            for i in range(len(self.times)):
                fh.write(",".join(f"{col[i]:.12g}" for _, col in cols) + "\n")

    def to_json(self, path=None):
        data = {name: [float(x) for x in col] for name, col in self.columns()}
        data["n_states"] = self.n_states
        data["domination_margin"] = self.domination_margin
        if path is None:
            return data
        with open(path, "w") as fh:
            json.dump(data, fh, indent=1)
        return data


def bound_curves(g: Generator, lam: float | None, alpha1: float | None, t_grid,
                 alpha2: float | None = None, strong_regular: bool = False,
                 n_haar: int = 50, seed: int = 0) -> MixingCurve:
    """Empirical worst-case distance curves plus every applicable bound.

    Bound columns are emitted only for the constants actually supplied
    (missing constants are never fabricated).  alpha2 yields the rate
    alpha2/2 under weak regularity and alpha2 when strong_regular is set.
    """
    sp = stationary_state(g)
    t_grid = np.asarray(list(t_grid), dtype=float)
    states = worst_case_states(sp, n_haar=n_haar, seed=seed)
    trace_w = np.zeros(len(t_grid))
    chi2_w = np.zeros(len(t_grid))
    rel_w = np.zeros(len(t_grid))
    for i, t in enumerate(t_grid):
        for rho0 in states:
            rho_t = evolve(g, rho0, t)
            d = distances(rho_t, sp)
            trace_w[i] = max(trace_w[i], d["trace"])
            chi2_w[i] = max(chi2_w[i], d["chi2"])
            rel_w[i] = max(rel_w[i], d["rel_ent"])
    log_inv = np.log(1.0 / sp.sigma_min)
    chi2_b = np.sqrt(1.0 / sp.sigma_min) * np.exp(-lam * t_grid) if lam is not None else None
    ls_b1 = (np.sqrt(2.0 * log_inv) * np.exp(-alpha1 * t_grid)
             if alpha1 is not None else None)
    ls_b2 = None
    if alpha2 is not None:
        rate = alpha2 if strong_regular else alpha2 / 2.0
        ls_b2 = np.sqrt(2.0 * log_inv) * np.exp(-rate * t_grid)
    margin = np.inf
    for b in (chi2_b, ls_b1, ls_b2):
        if b is not None:
            margin = min(margin, float(np.min(b - trace_w)))
    return MixingCurve(times=t_grid, trace_dist=trace_w, chi2=chi2_w, rel_ent=rel_w,
                       chi2_bound=chi2_b, ls_bound_a1=ls_b1, ls_bound_a2=ls_b2,
                       n_states=len(states), domination_margin=margin)


def mixing_time(g: Generator, epsilon: float, n_haar: int = 50, seed: int = 0,
                rtol: float = 1e-4, t_max: float = 1e6) -> float:
    """tau_mix(eps): first time the worst-case sampled trace distance drops
    to eps.  Bisection over the worst case of the sampled initial-state
    family; the result is a sampled lower-ish estimate of the true worst
    case, with the sample size set by n_haar plus the d eigenprojectors.
    """
    if not (0.0 < epsilon < 2.0):
        if epsilon >= 2.0:
            return 0.0
        raise ValueError("epsilon must be in (0, 2)")
    sp = stationary_state(g)
    states = worst_case_states(sp, n_haar=n_haar, seed=seed)

    def worst(t):
        return max(trace_norm(evolve(g, rho0, t) - sp.sigma) for rho0 in states)

    if worst(0.0) <= epsilon:
        return 0.0
    lo, hi = 0.0, 1.0
    while worst(hi) > epsilon:
        lo, hi = hi, hi * 2.0
        if hi > t_max:
            raise ArithmeticError(f"no mixing below eps={epsilon} up to t={t_max}")
    while hi - lo > rtol * max(hi, 1.0):
        mid = 0.5 * (lo + hi)
        if worst(mid) > epsilon:
            lo = mid
        else:
            hi = mid
    return hi


def entropy_decay_check(g: Generator, alpha1: float, f0, t_grid,
                        lam: float | None = None, fd_step: float = 1e-4) -> dict:
    """Decay inequalities for a relative density f evolving under Lhat:

      Var(f_t) <= e^{-2 lambda t} Var(f0)   (when lam is supplied)
      Ent_1(f_t) <= e^{-2 alpha1 t} Ent_1(f0)

    plus the finite-difference derivative identity
    d/dt Ent_1(f_t) = -2 Ehat_1(f_t) at the interior grid points.
    Returns worst margins; positive margins mean the inequalities hold.
    """
    sp = stationary_state(g)
    if isinstance(f0, RelativeDensity):
        f0 = f0.value
    f0 = require_hermitian(f0)
    hat = hat_generator(g)
    var0 = sp.variance(f0)
    ent0 = sp.ent1(f0) if np.linalg.eigvalsh(f0)[0] > 0 else None
    var_margin = np.inf
    ent_margin = np.inf
    deriv_err = 0.0
    for t in t_grid:
        ft = hermitian_part(hat.evolve_heisenberg(f0, float(t)))
        if lam is not None:
            var_margin = min(var_margin,
                             np.exp(-2.0 * lam * t) * var0 - sp.variance(ft))
        if ent0 is not None:
            ent_t = sp.ent1(ft)
            ent_margin = min(ent_margin, np.exp(-2.0 * alpha1 * t) * ent0 - ent_t)
            fp = hermitian_part(hat.evolve_heisenberg(f0, float(t) + fd_step))
            fm = hermitian_part(hat.evolve_heisenberg(f0, max(float(t) - fd_step, 0.0)))
            dt = (float(t) + fd_step) - max(float(t) - fd_step, 0.0)
            fd = (sp.ent1(fp) - sp.ent1(fm)) / dt
            analytic = -2.0 * dirichlet(g, 1.0, ft, hat=True)
            deriv_err = max(deriv_err,
                            abs(fd - analytic) / (1.0 + abs(analytic)))
    return {"var_margin": None if lam is None else var_margin,
            "ent_margin": None if ent0 is None else ent_margin,
            "deriv_rel_err": deriv_err}


def entropy_production(g: Generator, rho) -> dict:
    """Entropy production rate Pi = dS/dt + Phi for a full-rank state, with
    dS/dt = -tr[L*(rho) log rho], Phi = tr[L*(rho) log sigma] (k_B = 1) and
    the identity Pi = 2 Ehat_1(Gamma^{-1}(rho)) checked to 1e-8."""
    sp = stationary_state(g)
    rho = _check_state(rho)
    w = np.linalg.eigvalsh(rho)
    if w[0] <= 1e-12:
        raise ValueError("entropy_production needs a full-rank state (log rho)")
    log_rho = matrix_function(rho, np.log)
    lrho = g.apply_adjoint(rho)
    ds_dt = -float(np.trace(lrho @ log_rho).real)
    phi = float(np.trace(lrho @ sp.log_sigma).real)
    pi = ds_dt + phi
    pi_dirichlet = 2.0 * dirichlet(g, 1.0, sp.gamma_inv(rho), hat=True)
    scale = 1.0 + abs(pi) + abs(pi_dirichlet)
    if abs(pi - pi_dirichlet) > 1e-8 * scale:
        raise ArithmeticError(
            f"entropy production mismatch: {pi!r} vs 2*Ehat_1 = {pi_dirichlet!r}")
    return {"Pi": pi, "dS_dt": ds_dt, "Phi": phi}


def pq_norm(g: Generator, p: float, q: float, t: float, hat: bool = False,
            restarts: int = 6, budget: int = 400, seed: int = 0) -> float:
    """Lower-bound estimate of ||T_t||_{(p,sigma)->(q,sigma)} by multi-start
    maximization of ||T_t(f)||_q / ||f||_p over positive f (the supremum is
    attained on positive matrices).  This is a lower bound on the true norm,
    not a certificate."""
    from scipy.optimize import minimize
    from .ls_estimator import _expm_hermitian, _pack, _unpack
    sp = stationary_state(g)
    gen = hat_generator(g) if hat else g
    d = g.dim

    def ratio(f):
        return sp.lp_norm(q, hermitian_part(gen.evolve_heisenberg(f, t))) / sp.lp_norm(p, f)

    def neg_packed(x):
        try:
            return -ratio(_expm_hermitian(_unpack(x, d)))
        except (ValueError, ArithmeticError):
            return np.inf

    rng = np.random.default_rng(seed)
    best = ratio(np.eye(d))
    starts = [_pack(np.zeros((d, d), dtype=complex))]
    starts += [_pack(hermitian_part(rng.standard_normal((d, d))
                                    + 1j * rng.standard_normal((d, d))))
               for _ in range(restarts - 1)]
    for x0 in starts:
        res = minimize(neg_packed, x0, method="Nelder-Mead",
                       options={"maxfev": budget, "fatol": 1e-12})
        best = max(best, -res.fun)
    return float(best)


def two_two_norm_decay(g: Generator, t: float) -> float:
    """Exact ||T_t - T_inf||_{(2,sigma)->(2,sigma)}: largest singular value
    of the sigma^{1/4}-transformed superoperator on the orthogonal
    complement of the stationary direction."""
    sp = stationary_state(g)
    prop = g.heisenberg_propagator(float(t))
    t_inf = np.outer(vec(np.eye(g.dim)), vec(sp.sigma).conj())
    quarter = left_right_super(sp.sigma_power(0.25), sp.sigma_power(0.25))
    quarter_inv = left_right_super(sp.sigma_power(-0.25), sp.sigma_power(-0.25))
    m = quarter @ (prop - t_inf) @ quarter_inv
    return float(np.linalg.svd(m, compute_uv=False)[0])


def _channel_supers(kraus):
    from .operator_core import kraus_heisenberg_super, kraus_schrodinger_super
    return kraus_heisenberg_super(kraus), kraus_schrodinger_super(kraus)


def discrete_vs_continuous(kraus, n: int, rho0) -> dict:
    """chi^2 comparison of n channel steps against the lifted semigroup at
    time n, for a lazy reversible primitive channel T (L = T - id):
    chi2(T^{*n}(rho), sigma) <= chi2(e^{n L*}(rho), sigma).

    Laziness is checked as nonnegativity of the similarity-transformed
    channel spectrum; non-lazy or non-reversible inputs are rejected.
    """
    g = lift_channel(kraus)
    if not g.primitive:
        raise ValueError("channel lift is not primitive")
    if not g.reversible:
        raise ValueError("discrete/continuous comparison needs a reversible channel")
    sp = g.stationary
    _, s_schro = _channel_supers(kraus)
    quarter = left_right_super(sp.sigma_power(0.25), sp.sigma_power(0.25))
    quarter_inv = left_right_super(sp.sigma_power(-0.25), sp.sigma_power(-0.25))
    t_tilde = quarter_inv @ s_schro @ quarter
    w = np.linalg.eigvalsh(hermitian_part(t_tilde))
    if w[0] < -1e-10:
        raise ValueError(f"channel is not lazy: transformed spectrum min {w[0]:.3e}")
    rho0 = _check_state(rho0)
    rho_disc = rho0.copy()
    for _ in range(int(n)):
        rho_disc = hermitian_part(unvec(s_schro @ vec(rho_disc), g.dim))
    rho_cont = evolve(g, rho0, float(n))
    chi_d = chi2_divergence(rho_disc, sp)
    chi_c = chi2_divergence(rho_cont, sp)
    if chi_d > chi_c + 1e-9:
        raise ArithmeticError(
            f"discrete chi2 {chi_d!r} exceeds continuous {chi_c!r}")
    return {"chi2_discrete": chi_d, "chi2_continuous": chi_c, "n": int(n)}


def chi2_gap_time_check(g: Generator, alpha2: float, lam: float, c_values=(1.0, 2.0, 3.0),
                        n_haar: int = 20, seed: int = 0) -> dict:
    """At t >= log log(1/sigma_min)/(2 alpha2) + c/lambda the chi^2
    divergence is bounded by e^{2(1-c)}; returns the worst sampled margin
    (bound minus empirical) per c."""
    sp = stationary_state(g)
    states = worst_case_states(sp, n_haar=n_haar, seed=seed)
    loglog = np.log(max(np.log(1.0 / sp.sigma_min), 1.0 + 1e-12))
    out = {}
    for c in c_values:
        t = loglog / (2.0 * alpha2) + c / lam
        bound = np.exp(2.0 * (1.0 - c))
        worst = max(chi2_divergence(evolve(g, rho0, t), sp) for rho0 in states)
        out[float(c)] = {"t": float(t), "bound": float(bound),
                         "chi2_worst": float(worst), "margin": float(bound - worst)}
    return out


def hypercontractivity_check(g: Generator, alpha: float, times=(0.1, 0.5, 1.0),
                             n_probes: int = 100, seed: int = 0,
                             strong: bool = True) -> float:
    """Worst margin of ||T_t f||_{p(t)} <= ||f||_2 over random positive
    probes, with p(t) = 1 + e^{2 alpha t} (strong regularity) or
    1 + e^{alpha t} (weak).  Positive margins mean contraction holds."""
    from .operator_core import random_hermitian
    sp = stationary_state(g)
    rng = np.random.default_rng(seed)
    rate = 2.0 * alpha if strong else alpha
    margin = np.inf
    for _ in range(n_probes):
        f = matrix_function(random_hermitian(g.dim, rng, scale=0.7), np.exp,
                            eig_floor=-np.inf)
        n2 = sp.lp_norm(2.0, f)
        for t in times:
            pt = 1.0 + np.exp(rate * t)
            nt = sp.lp_norm(pt, hermitian_part(g.evolve_heisenberg(f, float(t))))
            margin = min(margin, n2 * (1.0 + 1e-7) - nt)
    return float(margin)
