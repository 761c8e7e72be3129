"""Entropy-regularized unbalanced transport between nonnegative measures on
the sphere, with the log cost c(t1, t2) = -2 log((t1.t2)+).

The primal problem solved by `hk_entropic` is

    min_{pi >= 0}  sum_ij c_ij pi_ij + KL(pi 1, mu) + KL(pi^T 1, nu)
                   + eps * KL(pi, mu x nu),

with KL(p, q) = sum p log(p/q) - p + q and the convention 0 log 0 = 0.
Pairs with nonpositive inner product carry infinite cost and are excluded
from every log-sum-exp reduction instead of being materialized as large
floats.

Iterations run in the log domain with the damping exponent 1/(1+eps) of the
unit-weight KL proximal update. After each sweep the exact optimal constant
translation of the potential pair is applied (closed form below); without it
the translation mode of the damped map contracts only at rate 1/(1+eps),
which is hopeless for small eps.

Two independent oracles back the solver: a closed form for single Diracs and
a direct projected-gradient minimization over the plan (`hk_bruteforce`).
`sinkhorn_divergence` adds the debiased value

    S_eps(mu, nu) = OT(mu, nu) - OT(mu, mu)/2 - OT(nu, nu)/2
                    + (eps/2) (TV(mu) - TV(nu))^2,

whose self-terms remove the eps * TV(mu) * TV(nu) product carried by the
plain entropic value; that product grows like eps * alpha^4 between measures
of mass alpha^2 and would otherwise swamp every large-scale comparison.
"""

from __future__ import annotations

import dataclasses

import numpy as np

from .grids import SphereGrid
from .measures import DiscreteMeasure

# Potential value standing in for +inf on atoms that cannot interact with
# the other side (dead rows/columns): exp(-2000) underflows to exactly 0.
_DEAD = 2000.0

# Floor for the internal stopping threshold on potential sup-change, just
# above double-precision noise on potentials of moderate size.
_POT_TOL_FLOOR = 1e-13


@dataclasses.dataclass(frozen=True)
class CostMatrix:
    """Pairwise transport costs between two sphere grids.

    `entries` holds -2 log(t1.t2) where the inner product is positive and
    +inf elsewhere; `mask` is True exactly on the finite entries.
    """

    entries: np.ndarray
    mask: np.ndarray

    def __post_init__(self):
        if self.entries.shape != self.mask.shape:
            raise ValueError("entries and mask shapes differ")

    @property
    def log_kernel_base(self) -> np.ndarray:
        """-entries, i.e. 2 log(t1.t2), with -inf on masked pairs."""
        return -self.entries


def cost_matrix(a: SphereGrid, b: SphereGrid) -> CostMatrix:
    """Build the -2 log((t1.t2)+) cost between two grids of equal dimension."""
    if a.dim != b.dim:
        raise ValueError("grids live in different dimensions")
    gram = np.minimum(a.gram(b), 1.0)  # clip fp overshoot so entries stay >= 0
    mask = gram > 0.0
    entries = np.full(gram.shape, np.inf)
    entries[mask] = -2.0 * np.log(gram[mask])
    entries.flags.writeable = False
    mask.flags.writeable = False
    return CostMatrix(entries=entries, mask=mask)


@dataclasses.dataclass(frozen=True)
class UotResult:
    """Converged state of one entropic evaluation.

    `value` is the primal objective recovered from the potentials; `f` and
    `g` are the dual potentials over the two supports (+inf convention on
    atoms that can only be created/destroyed). `marginal_residual` is the
    sup-norm mismatch between the plan marginals and their closed-form
    targets mu*exp(-f), nu*exp(-g), relative to 1 + the largest marginal.
    """

    value: float
    f: np.ndarray
    g: np.ndarray
    iterations: int
    marginal_residual: float
    converged: bool
    plan_mass: float


def _lse(a: np.ndarray, axis: int) -> np.ndarray:
    """Log-sum-exp along `axis`; rows of all -inf reduce to -inf."""
    amax = np.max(a, axis=axis, keepdims=True)
    amax = np.where(np.isfinite(amax), amax, 0.0)
    with np.errstate(divide="ignore"):
        out = np.log(np.sum(np.exp(a - amax), axis=axis))
    return out + np.squeeze(amax, axis=axis)


def _log_weights(w: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore"):
        return np.log(w)


def _translate(f, g, log_mu, log_nu, log_m, eps):
    """Exact optimal constant shift (s, t) of the potential pair.

    Maximizing the dual over f+s, g+t gives A e^{-s} = B e^{-t} = u with
    log u = (log A + log B + eps log M)/(eps + 2), where A = <mu, e^{-f}>,
    B = <nu, e^{-g}> and M is the current plan mass. Degenerate cases
    (empty plan or fully dead sides) skip the shift.
    """
    with np.errstate(over="ignore"):
        a = np.exp(_lse(log_mu - f, axis=0))
        b = np.exp(_lse(log_nu - g, axis=0))
    if not (np.isfinite(log_m) and a > 0.0 and b > 0.0 and np.isfinite(a) and np.isfinite(b)):
        return f, g, log_m, 0.0
    log_u = (np.log(a) + np.log(b) + eps * log_m) / (eps + 2.0)
    s = np.log(a) - log_u
    t = np.log(b) - log_u
    return f + s, g + t, log_m + (s + t) / eps, max(abs(s), abs(t))


class _AbsorbedKernel:
    """exp(log_k + fa/eps (+) ga/eps - shift) around anchor potentials.

    Rebuilding the exponential kernel at the current potentials turns each
    log-sum-exp sweep into a plain matrix-vector product against small
    remainder factors exp((f - fa)/eps); the anchors are refreshed once the
    remainder exponents drift past _DRIFT. Dead potentials (_DEAD) enter
    the kernel as -inf so their rows and columns are exactly zero. Rows
    whose product underflows to zero (or degrades to inf/nan) despite
    having unmasked entries are recomputed with the exact per-row
    log-sum-exp, so -inf results mark structurally masked rows only and
    the iterates match the direct log-domain sweeps.
    """

    # reabsorb once potentials move 60*eps from the anchor; together with
    # the cap below this leaves e^30 of headroom for the log-weights
    _DRIFT = 60.0
    # largest remainder exponent the matvec may see: keeps every product
    # below e^690 even against a shift-capped kernel entry of e^600
    _REMAINDER_CAP = 90.0

    def __init__(self, log_k, eps):
        self.log_k = log_k
        self.eps = eps
        self.kern = np.empty_like(log_k)
        finite = np.isfinite(log_k)
        self.row_alive = finite.any(axis=1)
        self.col_alive = finite.any(axis=0)
        self.shift = 0.0
        self.fa = None
        self.ga = None

    def absorb(self, f, g) -> None:
        self.fa = f.copy()
        self.ga = g.copy()
        fcol = np.where(f >= _DEAD, -np.inf, f / self.eps)
        grow = np.where(g >= _DEAD, -np.inf, g / self.eps)
        np.add(self.log_k, fcol[:, None], out=self.kern)
        np.add(self.kern, grow[None, :], out=self.kern)
        top = float(np.max(self.kern, initial=-np.inf))
        self.shift = max(0.0, top - 600.0)
        if self.shift > 0.0:
            np.subtract(self.kern, self.shift, out=self.kern)
        np.exp(self.kern, out=self.kern)

    def drifted(self, f, g) -> bool:
        cap = self._DRIFT * self.eps
        d_f = np.max(np.abs(f - self.fa), initial=0.0, where=self.row_alive)
        if d_f > cap:
            return True
        return np.max(np.abs(g - self.ga), initial=0.0, where=self.col_alive) > cap

    def row_lse(self, g, log_nu) -> np.ndarray:
        """LSE_j(log_k + g/eps + log_nu) via kern @ remainder."""
        live = self.col_alive & (g < _DEAD)
        expo = np.where(live, (g - self.ga) / self.eps, -np.inf) + log_nu
        if np.max(expo, initial=-np.inf) > self._REMAINDER_CAP:
            # a cold or far-jumped iterate; one exact sweep, then the
            # end-of-iteration drift check re-anchors
            return _lse(self.log_k + (g / self.eps + log_nu)[None, :], axis=1)
        r = self.kern @ np.exp(expo)
        out = np.log(r) + (self.shift - self.fa / self.eps)
        bad = ~np.isfinite(out) & self.row_alive
        if np.any(bad):
            out[bad] = _lse(self.log_k[bad] + (g / self.eps + log_nu)[None, :], axis=1)
        return out

    def col_lse(self, f, log_mu) -> np.ndarray:
        """LSE_i(log_k + f/eps + log_mu) via kern.T @ remainder."""
        live = self.row_alive & (f < _DEAD)
        expo = np.where(live, (f - self.fa) / self.eps, -np.inf) + log_mu
        if np.max(expo, initial=-np.inf) > self._REMAINDER_CAP:
            return _lse(self.log_k + (f / self.eps + log_mu)[:, None], axis=0)
        c = self.kern.T @ np.exp(expo)
        out = np.log(c) + (self.shift - self.ga / self.eps)
        bad = ~np.isfinite(out) & self.col_alive
        if np.any(bad):
            out[bad] = _lse(self.log_k[:, bad] + (f / self.eps + log_mu)[:, None], axis=0)
        return out


def _marginals(f, g, log_mu, log_nu, log_k, eps):
    """Plan marginals and their targets for the pair (f, g)."""
    row_lse = _lse(log_k + (g / eps + log_nu)[None, :], axis=1)
    col_lse = _lse(log_k + (f / eps + log_mu)[:, None], axis=0)
    with np.errstate(over="ignore"):
        row = np.exp(log_mu + f / eps + row_lse)
        col = np.exp(log_nu + g / eps + col_lse)
        row_target = np.exp(log_mu - f)
        col_target = np.exp(log_nu - g)
    return row, row_target, col, col_target


def _residual(row, row_target, col, col_target) -> float:
    scale = 1.0 + max(row_target.max(initial=0.0), col_target.max(initial=0.0))
    err = max(
        np.max(np.abs(row - row_target), initial=0.0),
        np.max(np.abs(col - col_target), initial=0.0),
    )
    return float(err / scale)


def hk_entropic(
    mu: DiscreteMeasure,
    nu: DiscreteMeasure,
    eps: float,
    tol: float = 1e-9,
    max_iter: int = 5000,
    cost: CostMatrix | None = None,
    f0: np.ndarray | None = None,
    g0: np.ndarray | None = None,
) -> UotResult:
    """Log-domain damped Sinkhorn for the entropic unbalanced problem.

    Stops once the potential sup-change falls below tol*eps/(1+eps) and the
    relative marginal residual falls below tol; returns a non-converged
    result with diagnostics if max_iter is hit first. `cost`, `f0`, `g0`
    allow reusing a precomputed cost matrix and warm-starting from a nearby
    solve. The zero measure needs no iterations: hk_entropic(m, 0) = TV(m).
    """
    if eps <= 0.0:
        raise ValueError("eps must be positive")
    if tol <= 0.0:
        raise ValueError("tol must be positive")
    tv_mu = mu.total_variation
    tv_nu = nu.total_variation
    if tv_mu == 0.0 or tv_nu == 0.0:
        return UotResult(
            value=tv_mu + tv_nu,
            f=np.full(len(mu.grid), np.inf),
            g=np.full(len(nu.grid), np.inf),
            iterations=0,
            marginal_residual=0.0,
            converged=True,
            plan_mass=0.0,
        )
    if cost is None:
        cost = cost_matrix(mu.grid, nu.grid)
    if cost.entries.shape != (len(mu.grid), len(nu.grid)):
        raise ValueError("cost matrix shape does not match the measures")

    log_mu = _log_weights(mu.weights)
    log_nu = _log_weights(nu.weights)
    log_k = cost.log_kernel_base / eps
    damp = 1.0 / (1.0 + eps)
    pot_tol = max(tol * eps / (1.0 + eps), _POT_TOL_FLOOR)

    f = np.zeros(len(mu.grid)) if f0 is None else np.array(f0, dtype=float)
    g = np.zeros(len(nu.grid)) if g0 is None else np.array(g0, dtype=float)

    iterations = 0
    residual = np.inf
    converged = False
    kernel = _AbsorbedKernel(log_k, eps)
    kernel.absorb(f, g)
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        for iterations in range(1, max_iter + 1):
            f_prev, g_prev = f, g
            row_lse = kernel.row_lse(g, log_nu)
            f = np.where(np.isneginf(row_lse), _DEAD, -eps * damp * row_lse)
            col_lse = kernel.col_lse(f, log_mu)
            g = np.where(np.isneginf(col_lse), _DEAD, -eps * damp * col_lse)
            log_m = _lse(col_lse + g / eps + log_nu, axis=0)
            f, g, log_m, _ = _translate(f, g, log_mu, log_nu, log_m, eps)
            delta = max(np.max(np.abs(f - f_prev)), np.max(np.abs(g - g_prev)))
            if delta < pot_tol:
                row, row_t, col, col_t = _marginals(f, g, log_mu, log_nu, log_k, eps)
                residual = _residual(row, row_t, col, col_t)
                if residual <= tol:
                    converged = True
                    break
            if kernel.drifted(f, g):
                kernel.absorb(f, g)
    if not converged:
        row, row_t, col, col_t = _marginals(f, g, log_mu, log_nu, log_k, eps)
        residual = _residual(row, row_t, col, col_t)

    plan_mass = float(np.sum(row))
    value = (
        (tv_mu - float(np.sum(row_t)))
        + (tv_nu - float(np.sum(col_t)))
        - eps * (plan_mass - tv_mu * tv_nu)
    )
    return UotResult(
        value=float(value),
        f=f,
        g=g,
        iterations=iterations,
        marginal_residual=residual,
        converged=converged,
        plan_mass=plan_mass,
    )


def hk_gradient(r: UotResult, mu: DiscreteMeasure) -> np.ndarray:
    """Gradient of the entropic value with respect to mu's weights.

    Envelope differentiation of the dual gives g_i = 1 - exp(-f_i); the
    neglected eps-order term is covered by the finite-difference tolerance.
    Refuses stale potentials from a non-converged result.
    """
    if not r.converged:
        raise ValueError("potentials are stale: the evaluation did not converge")
    if r.f.shape[0] != len(mu.grid):
        raise ValueError("result potentials do not match the measure's grid")
    with np.errstate(over="ignore"):
        return 1.0 - np.exp(-r.f)


def hk_dirac_exact(a: float, t1: np.ndarray, b: float, t2: np.ndarray) -> float:
    """Unregularized divergence between a*delta_{t1} and b*delta_{t2}.

    The single plan mass m minimizes 2m log m - m log(ab) - 2m + a + b
    - 2m log(t1.t2) at m* = sqrt(ab) * t1.t2, giving a + b - 2 sqrt(ab)
    * (t1.t2) for positive inner product and a + b otherwise.
    """
    if a < 0.0 or b < 0.0:
        raise ValueError("masses must be nonnegative")
    s = float(np.asarray(t1, dtype=float) @ np.asarray(t2, dtype=float))
    if s > 0.0:
        return float(a + b - 2.0 * np.sqrt(a * b) * s)
    return float(a + b)


def hk_bruteforce(mu: DiscreteMeasure, nu: DiscreteMeasure, iters: int = 100_000) -> float:
    """Direct minimization over the plan matrix; test-scale oracle.

    Projected gradient with Armijo backtracking from the warm start
    m*_ij = sqrt(mu_i nu_j) (t_i.t_j)+, entries clipped at 0; infeasible
    pairs stay frozen at 0. Arguments are ordered canonically first so the
    evaluation is exactly symmetric in (mu, nu).
    """
    sup_mu = np.flatnonzero(mu.weights > 0.0)
    sup_nu = np.flatnonzero(nu.weights > 0.0)
    if sup_mu.size * sup_nu.size > 64:
        raise ValueError("support product exceeds 64; bruteforce is test-scale only")
    if sup_mu.size == 0 or sup_nu.size == 0:
        return float(mu.total_variation + nu.total_variation)

    mu_w = mu.weights[sup_mu]
    nu_w = nu.weights[sup_nu]
    mu_pts = mu.grid.points[sup_mu]
    nu_pts = nu.grid.points[sup_nu]
    key_mu = (sup_mu.size, mu_w.tobytes(), mu_pts.tobytes())
    key_nu = (sup_nu.size, nu_w.tobytes(), nu_pts.tobytes())
    if key_nu < key_mu:
        mu_w, nu_w = nu_w, mu_w
        mu_pts, nu_pts = nu_pts, mu_pts

    gram = np.minimum(mu_pts @ nu_pts.T, 1.0)
    feasible = gram > 0.0
    c = np.zeros_like(gram)
    c[feasible] = -2.0 * np.log(gram[feasible])

    def objective(m):
        rows = m.sum(axis=1)
        cols = m.sum(axis=0)
        with np.errstate(divide="ignore", invalid="ignore"):
            kl_r = np.where(rows > 0.0, rows * np.log(rows / mu_w), 0.0) - rows + mu_w
            kl_c = np.where(cols > 0.0, cols * np.log(cols / nu_w), 0.0) - cols + nu_w
        return float(np.sum(c * m) + np.sum(kl_r) + np.sum(kl_c))

    m = np.sqrt(np.outer(mu_w, nu_w)) * np.where(feasible, gram, 0.0)
    val = objective(m)
    step = 1.0 / (2.0 * max(float(c.max()), 1e-3))
    stagnant = 0
    for _ in range(iters):
        rows = m.sum(axis=1)
        cols = m.sum(axis=0)
        with np.errstate(divide="ignore"):
            grad = c + np.log(rows / mu_w)[:, None] + np.log(cols / nu_w)[None, :]
        grad = np.maximum(grad, -1e15)
        accepted = False
        trial_step = step
        for _ in range(60):
            cand = np.where(feasible, np.maximum(m - trial_step * grad, 0.0), 0.0)
            cand_val = objective(cand)
            dec = float(np.sum(grad * (cand - m)))
            if cand_val <= val + 1e-4 * dec:
                accepted = True
                break
            trial_step *= 0.5
        if not accepted:
            break
        if val - cand_val <= 1e-15 * (1.0 + abs(val)):
            stagnant += 1
            if stagnant >= 100:
                m, val = cand, cand_val
                break
        else:
            stagnant = 0
        m, val = cand, cand_val
        step = min(trial_step * 2.0, 1e6)

    # Polish with exact cyclic coordinate minimization. The gradient loop
    # stalls when marginal sums approach zero (the log terms make Armijo
    # steps collapse), but each single-entry subproblem is solvable in
    # closed form: with row/col remainders R, C the optimality condition
    # (R+t)(C+t) = mu_i nu_j g_ij^2 gives t = 0 when RC already exceeds
    # the right side, else the positive quadratic root. The objective is
    # convex with unique coordinate minimizers, so the sweeps reach the
    # global optimum that the oracle role requires.
    pairs = np.argwhere(feasible)
    ksq = np.outer(mu_w, nu_w) * np.where(feasible, gram, 0.0) ** 2
    rows = m.sum(axis=1)
    cols = m.sum(axis=0)
    for _ in range(200_000):
        biggest = 0.0
        for i, j in pairs:
            old = m[i, j]
            r_rem = max(rows[i] - old, 0.0)
            c_rem = max(cols[j] - old, 0.0)
            if r_rem * c_rem >= ksq[i, j]:
                new = 0.0
            else:
                disc = (r_rem - c_rem) ** 2 + 4.0 * ksq[i, j]
                new = 0.5 * (np.sqrt(disc) - (r_rem + c_rem))
            if new != old:
                rows[i] = r_rem + new
                cols[j] = c_rem + new
                m[i, j] = new
                biggest = max(biggest, abs(new - old))
        if biggest <= 1e-14 * (1.0 + float(np.max(m, initial=0.0))):
            break
    return objective(m)


@dataclasses.dataclass(frozen=True)
class DivergenceResult:
    """Value and mu-gradient of the (optionally debiased) divergence."""

    value: float
    grad: np.ndarray
    converged: bool
    cross: UotResult
    self_mu: UotResult | None = None
    self_nu: UotResult | None = None


def self_potential(
    mu: DiscreteMeasure,
    eps: float,
    tol: float = 1e-9,
    max_iter: int = 5000,
    cost: CostMatrix | None = None,
    p0: np.ndarray | None = None,
) -> UotResult:
    """Symmetric entropic self-term OT(mu, mu) via the averaged iteration.

    The symmetric fixed point f = g = p of the damped update is reached by
    p <- (p + S(p)/(1+eps))/2 plus the same exact translation as in the
    asymmetric loop (with both shifts equal, preserving symmetry).
    """
    if eps <= 0.0:
        raise ValueError("eps must be positive")
    tv = mu.total_variation
    if tv == 0.0:
        return UotResult(
            value=0.0,
            f=np.full(len(mu.grid), np.inf),
            g=np.full(len(mu.grid), np.inf),
            iterations=0,
            marginal_residual=0.0,
            converged=True,
            plan_mass=0.0,
        )
    if cost is None:
        cost = cost_matrix(mu.grid, mu.grid)
    log_mu = _log_weights(mu.weights)
    log_k = cost.log_kernel_base / eps
    damp = 1.0 / (1.0 + eps)
    pot_tol = max(tol * eps / (1.0 + eps), _POT_TOL_FLOOR)

    p = np.zeros(len(mu.grid)) if p0 is None else np.array(p0, dtype=float)
    iterations = 0
    residual = np.inf
    converged = False
    kernel = _AbsorbedKernel(log_k, eps)
    kernel.absorb(p, p)
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        for iterations in range(1, max_iter + 1):
            p_prev = p
            lse = kernel.row_lse(p, log_mu)
            target = np.where(np.isneginf(lse), _DEAD, -eps * damp * lse)
            p = 0.5 * (p + target)
            log_m = _lse(lse + p / eps + log_mu, axis=0)
            # lse used the pre-average p on the column side; recompute mass
            # from the translated pair below only when checking convergence.
            p, _, log_m, _ = _translate(p, p.copy(), log_mu, log_mu, log_m, eps)
            delta = np.max(np.abs(p - p_prev))
            if delta < pot_tol:
                row, row_t, col, col_t = _marginals(p, p, log_mu, log_mu, log_k, eps)
                residual = _residual(row, row_t, col, col_t)
                if residual <= tol:
                    converged = True
                    break
            if kernel.drifted(p, p):
                kernel.absorb(p, p)
    if not converged:
        row, row_t, col, col_t = _marginals(p, p, log_mu, log_mu, log_k, eps)
        residual = _residual(row, row_t, col, col_t)

    plan_mass = float(np.sum(row))
    value = 2.0 * (tv - float(np.sum(row_t))) - eps * (plan_mass - tv * tv)
    return UotResult(
        value=float(value),
        f=p,
        g=p,
        iterations=iterations,
        marginal_residual=residual,
        converged=converged,
        plan_mass=plan_mass,
    )


def sinkhorn_divergence(
    mu: DiscreteMeasure,
    nu: DiscreteMeasure,
    eps: float,
    tol: float = 1e-9,
    max_iter: int = 5000,
    debias: bool = False,
    cost: CostMatrix | None = None,
    self_cost_mu: CostMatrix | None = None,
    self_nu: UotResult | None = None,
    f0: np.ndarray | None = None,
    g0: np.ndarray | None = None,
    p0: np.ndarray | None = None,
) -> DivergenceResult:
    """Entropic divergence with optional debiasing, plus its mu-gradient.

    Plain mode returns the hk_entropic value with the 1 - exp(-f) gradient.
    Debiased mode subtracts half of each self-term and adds the mass
    correction (eps/2)(TV mu - TV nu)^2; its exact envelope gradient is
    (1+eps)(exp(-p) - exp(-f)) with p the symmetric self-potential of mu
    (the TV corrections cancel). The nu self-term is constant in mu, so
    callers looping over mu may pass a cached `self_nu` result.
    """
    cross = hk_entropic(mu, nu, eps, tol=tol, max_iter=max_iter, cost=cost, f0=f0, g0=g0)
    with np.errstate(over="ignore"):
        if not debias:
            grad = 1.0 - np.exp(-cross.f)
            return DivergenceResult(
                value=cross.value, grad=grad, converged=cross.converged, cross=cross
            )
        own = self_potential(mu, eps, tol=tol, max_iter=max_iter, cost=self_cost_mu, p0=p0)
        if self_nu is None:
            self_nu = self_potential(nu, eps, tol=tol, max_iter=max_iter)
        dm = mu.total_variation - nu.total_variation
        value = cross.value - 0.5 * own.value - 0.5 * self_nu.value + 0.5 * eps * dm * dm
        grad = (1.0 + eps) * (np.exp(-own.f) - np.exp(-cross.f))
    return DivergenceResult(
        value=float(value),
        grad=grad,
        converged=cross.converged and own.converged and self_nu.converged,
        cross=cross,
        self_mu=own,
        self_nu=self_nu,
    )
