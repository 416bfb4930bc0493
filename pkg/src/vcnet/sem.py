"""Two-factor structural equation model fitted by maximum likelihood.

Social Capital (``xi``) is measured by network indicators, Performance
(``eta``) by financial indicators, and ``eta = gamma * xi + zeta``.  The
first indicator of each factor has its loading fixed at 1.  The implied
covariance of the stacked indicators ``(x, y)`` is

    Sigma = Lambda Phi Lambda' + Theta,
    Phi   = [[phi, gamma*phi], [gamma*phi, gamma^2*phi + psi]]

with ``Lambda`` block-diagonal in the two loading vectors and ``Theta`` the
diagonal error variances.  Estimation minimises

    F = ln|Sigma| + tr(S Sigma^-1) - ln|S| - p

over an unconstrained vector in which every variance enters as its log.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import SemError
from .metrics import SC_COLUMNS
from .perfstats import PERF_COLUMNS

GTOL = 1e-6
FTOL = 1e-10
MAX_ITER = 10_000

STAR_LEVELS = ((2.576, "***"), (1.96, "**"), (1.645, "*"))


def stars(z: float | None) -> str:
    """Significance stars for |z| above 1.645 / 1.96 / 2.576 (10% / 5% / 1%)."""
    if z is None or not math.isfinite(z):
        return ""
    for cut, mark in STAR_LEVELS:
        if abs(z) > cut:
            return mark
    return ""


@dataclass(frozen=True)
class ModelSpec:
    sc_indicators: tuple[str, ...]
    perf_indicators: tuple[str, ...]
    model_id: int | None = None

    def __post_init__(self):
        if len(self.sc_indicators) < 2 or len(self.perf_indicators) < 2:
            raise SemError("UNIDENTIFIED", "each latent variable needs at least two indicators")
        for name in self.sc_indicators:
            if name not in SC_COLUMNS:
                raise SemError("INVALID_MODEL", f"unknown social-capital indicator {name!r}")
        for name in self.perf_indicators:
            if name not in PERF_COLUMNS:
                raise SemError("INVALID_MODEL", f"unknown performance indicator {name!r}")

    @property
    def q_x(self) -> int:
        return len(self.sc_indicators)

    @property
    def q_y(self) -> int:
        return len(self.perf_indicators)

    @property
    def p(self) -> int:
        return self.q_x + self.q_y

    @property
    def indicators(self) -> tuple[str, ...]:
        return self.sc_indicators + self.perf_indicators

    @property
    def n_free(self) -> int:
        return (self.q_x - 1) + (self.q_y - 1) + 3 + self.p

    def param_names(self) -> list[str]:
        """Names of the free parameters in packing order."""
        names = [f"loading.{c}" for c in self.sc_indicators[1:]]
        names += [f"loading.{c}" for c in self.perf_indicators[1:]]
        names += ["gamma", "phi", "psi"]
        names += [f"error.{c}" for c in self.indicators]
        return names

    def variance_mask(self) -> np.ndarray:
        k = self.q_x - 1 + self.q_y - 1
        mask = np.zeros(self.n_free, dtype=bool)
        mask[k + 1 :] = True
        return mask


_DROPS = {
    1: ((), ()),
    2: (("structural_hole",), ()),
    3: ((), ("investment_total", "investment_exited")),
    4: (("structural_hole",), ("investment_total", "investment_exited")),
}


def build_model(model_id: int) -> ModelSpec:
    """Models 1-4: full model, minus structural hole, minus the two
    investment-volume indicators, minus all three."""
    if model_id not in _DROPS:
        raise SemError("INVALID_MODEL", f"model id must be 1, 2, 3 or 4, got {model_id!r}")
    drop_x, drop_y = _DROPS[model_id]
    return ModelSpec(
        tuple(c for c in SC_COLUMNS if c not in drop_x),
        tuple(c for c in PERF_COLUMNS if c not in drop_y),
        model_id,
    )


@dataclass
class SemParams:
    lambda_x: np.ndarray
    lambda_y: np.ndarray
    gamma: float
    phi: float
    psi: float
    theta_x: np.ndarray
    theta_y: np.ndarray

    def __post_init__(self):
        self.lambda_x = np.asarray(self.lambda_x, dtype=float)
        self.lambda_y = np.asarray(self.lambda_y, dtype=float)
        self.theta_x = np.asarray(self.theta_x, dtype=float)
        self.theta_y = np.asarray(self.theta_y, dtype=float)
        self.gamma = float(self.gamma)
        self.phi = float(self.phi)
        self.psi = float(self.psi)

    def check(self, spec: ModelSpec) -> None:
        if self.lambda_x.shape != (spec.q_x - 1,) or self.lambda_y.shape != (spec.q_y - 1,):
            raise SemError("INVALID_PARAM", "loading vector length does not match the model")
        if self.theta_x.shape != (spec.q_x,) or self.theta_y.shape != (spec.q_y,):
            raise SemError("INVALID_PARAM", "error-variance length does not match the model")
        variances = np.concatenate([[self.phi, self.psi], self.theta_x, self.theta_y])
        if not np.all(np.isfinite(variances)) or np.any(variances <= 0):
            raise SemError("INVALID_PARAM", "variances must be strictly positive")

    def pack(self) -> np.ndarray:
        return np.concatenate(
            [self.lambda_x, self.lambda_y, [self.gamma, self.phi, self.psi], self.theta_x, self.theta_y]
        )

    @classmethod
    def unpack(cls, spec: ModelSpec, vec) -> "SemParams":
        vec = np.asarray(vec, dtype=float)
        a = spec.q_x - 1
        b = a + spec.q_y - 1
        return cls(
            vec[:a],
            vec[a:b],
            vec[b],
            vec[b + 1],
            vec[b + 2],
            vec[b + 3 : b + 3 + spec.q_x],
            vec[b + 3 + spec.q_x :],
        )

    @property
    def latent_covariance(self) -> float:
        return self.gamma * self.phi


def to_unconstrained(spec: ModelSpec, params: SemParams) -> np.ndarray:
    params.check(spec)
    u = params.pack()
    mask = spec.variance_mask()
    u[mask] = np.log(u[mask])
    return u


def from_unconstrained(spec: ModelSpec, u) -> SemParams:
    v = np.array(u, dtype=float)
    mask = spec.variance_mask()
    v[mask] = np.exp(v[mask])
    return SemParams.unpack(spec, v)


def _loadings(spec: ModelSpec, params: SemParams) -> np.ndarray:
    lam = np.zeros((spec.p, 2))
    lam[0, 0] = 1.0
    lam[1 : spec.q_x, 0] = params.lambda_x
    lam[spec.q_x, 1] = 1.0
    lam[spec.q_x + 1 :, 1] = params.lambda_y
    return lam


def _latent_cov(params: SemParams) -> np.ndarray:
    g, phi, psi = params.gamma, params.phi, params.psi
    return np.array([[phi, g * phi], [g * phi, g * g * phi + psi]])


def implied_covariance(spec: ModelSpec, params: SemParams) -> np.ndarray:
    params.check(spec)
    lam = _loadings(spec, params)
    sigma = lam @ _latent_cov(params) @ lam.T
    sigma[np.diag_indices(spec.p)] += np.concatenate([params.theta_x, params.theta_y])
    return sigma


def _chol(m: np.ndarray, what: str) -> np.ndarray:
    try:
        return np.linalg.cholesky(m)
    except np.linalg.LinAlgError:
        raise SemError("NOT_PD", f"{what} is not positive definite") from None


def _logdet_from_chol(c: np.ndarray) -> float:
    return 2.0 * float(np.sum(np.log(np.diag(c))))


def fml(S, sigma) -> float:
    """ML discrepancy ``ln|Sigma| + tr(S Sigma^-1) - ln|S| - p``."""
    S = np.asarray(S, dtype=float)
    sigma = np.asarray(sigma, dtype=float)
    if S.shape != sigma.shape or S.ndim != 2 or S.shape[0] != S.shape[1]:
        raise SemError("SHAPE", "S and Sigma must be square with equal shape")
    cs = _chol(S, "S")
    cz = _chol(sigma, "Sigma")
    inv_sigma = np.linalg.inv(sigma)
    value = _logdet_from_chol(cz) + float(np.sum(S * inv_sigma)) - _logdet_from_chol(cs) - S.shape[0]
    # exact-fit rounding can leave a tiny negative
    return max(value, 0.0)


def sample_covariance(x) -> np.ndarray:
    """Unbiased (``n - 1``) covariance of the columns of ``x``."""
    x = np.asarray(x, dtype=float)
    if x.ndim != 2:
        raise SemError("SHAPE", "indicator matrix must be two-dimensional")
    n, p = x.shape
    if n <= p:
        raise SemError("RANK_DEFICIENT", f"need more than {p} rows, got {n}")
    if np.any(np.ptp(x, axis=0) == 0):
        raise SemError("ZERO_VARIANCE", "indicator matrix has a constant column")
    centred = x - x.mean(axis=0)
    s = centred.T @ centred / (n - 1)
    return (s + s.T) / 2.0


class Discrepancy:
    """``F(u)`` and its analytic gradient for fixed ``S`` and model."""

    def __init__(self, S, spec: ModelSpec):
        self.S = np.asarray(S, dtype=float)
        self.spec = spec
        if self.S.shape != (spec.p, spec.p):
            raise SemError("SHAPE", f"S must be {spec.p}x{spec.p} for this model")
        self.logdet_s = _logdet_from_chol(_chol(self.S, "S"))
        self.mask = spec.variance_mask()

    def _parts(self, u):
        params = from_unconstrained(self.spec, u)
        lam = _loadings(self.spec, params)
        sigma = lam @ _latent_cov(params) @ lam.T
        sigma[np.diag_indices(self.spec.p)] += np.concatenate([params.theta_x, params.theta_y])
        return params, lam, sigma

    def value(self, u) -> float:
        try:
            _, _, sigma = self._parts(u)
            c = np.linalg.cholesky(sigma)
        except (np.linalg.LinAlgError, FloatingPointError, OverflowError):
            return math.inf
        inv = np.linalg.inv(sigma)
        f = _logdet_from_chol(c) + float(np.sum(self.S * inv)) - self.logdet_s - self.spec.p
        return f if math.isfinite(f) else math.inf

    def gradient(self, u) -> np.ndarray:
        spec = self.spec
        params, lam, sigma = self._parts(u)
        inv = np.linalg.inv(sigma)
        g_sigma = inv - inv @ self.S @ inv
        g_sigma = (g_sigma + g_sigma.T) / 2.0
        phi_mat = _latent_cov(params)
        d_lam = 2.0 * g_sigma @ lam @ phi_mat
        k = lam.T @ g_sigma @ lam
        gam, phi = params.gamma, params.phi
        grad = np.concatenate(
            [
                d_lam[1 : spec.q_x, 0],
                d_lam[spec.q_x + 1 :, 1],
                [
                    2.0 * phi * k[0, 1] + 2.0 * gam * phi * k[1, 1],
                    k[0, 0] + 2.0 * gam * k[0, 1] + gam * gam * k[1, 1],
                    k[1, 1],
                ],
                np.diag(g_sigma),
            ]
        )
        # chain rule through the log-variance coordinates
        v = np.asarray(u, dtype=float)
        grad[self.mask] *= np.exp(v[self.mask])
        return grad

    def hessian(self, u, rel_step: float = 1e-5) -> np.ndarray:
        """Central differences of the analytic gradient, symmetrised."""
        u = np.asarray(u, dtype=float)
        k = len(u)
        h = np.zeros((k, k))
        for i in range(k):
            step = rel_step * max(1.0, abs(u[i]))
            up, dn = u.copy(), u.copy()
            up[i] += step
            dn[i] -= step
            h[:, i] = (self.gradient(up) - self.gradient(dn)) / (2.0 * step)
        return (h + h.T) / 2.0


@dataclass
class OptimResult:
    x: np.ndarray
    fun: float
    grad: np.ndarray
    iterations: int
    converged: bool
    message: str


def bfgs(fun, grad, x0, gtol=GTOL, ftol=FTOL, max_iter=MAX_ITER) -> OptimResult:
    """BFGS on the inverse Hessian with Armijo backtracking.

    Converged means ``max|grad| < gtol`` and the last relative decrease of
    the objective below ``ftol``.
    """
    x = np.array(x0, dtype=float)
    f = fun(x)
    if not math.isfinite(f):
        return OptimResult(x, f, np.full_like(x, np.nan), 0, False, "non-finite objective at start")
    g = grad(x)
    k = len(x)
    h_inv = np.eye(k)
    rel_change = 0.0
    message = "maximum iterations reached"
    it = 0
    fresh = True
    while it < max_iter:
        if np.max(np.abs(g)) < gtol and rel_change < ftol:
            return OptimResult(x, f, g, it, True, "converged")
        d = -h_inv @ g
        slope = float(g @ d)
        if slope >= 0:
            h_inv = np.eye(k)
            d = -g
            slope = float(g @ d)
            fresh = True
        t = 1.0
        accepted = False
        for _ in range(60):
            x_new = x + t * d
            f_new = fun(x_new)
            if math.isfinite(f_new) and f_new <= f + 1e-4 * t * slope:
                accepted = True
                break
            t *= 0.5
        if not accepted:
            if fresh:
                message = "line search failed"
                break
            h_inv = np.eye(k)
            fresh = True
            continue
        it += 1
        g_new = grad(x_new)
        s = x_new - x
        y = g_new - g
        sy = float(s @ y)
        rel_change = abs(f - f_new) / max(abs(f_new), 1.0)
        x, f, g = x_new, f_new, g_new
        if sy > 1e-12 * float(np.linalg.norm(s) * np.linalg.norm(y)) and sy > 0:
            if fresh:
                # scale the initial inverse Hessian to the observed curvature
                h_inv = np.eye(k) * (sy / float(y @ y))
            rho = 1.0 / sy
            hy = h_inv @ y
            h_inv = (
                h_inv
                - rho * (np.outer(s, hy) + np.outer(hy, s))
                + (rho * rho * float(y @ hy) + rho) * np.outer(s, s)
            )
            fresh = False
    converged = bool(np.max(np.abs(g)) < gtol and rel_change < ftol)
    return OptimResult(x, f, g, it, converged, "converged" if converged else message)


@dataclass
class ParamRecord:
    name: str
    estimate: float
    se: float | None
    z: float | None
    stars: str
    fixed: bool


@dataclass
class SemFit:
    spec: ModelSpec
    estimates: SemParams
    standard_errors: dict[str, float]
    z_values: dict[str, float]
    stars: dict[str, str]
    latent_covariance: float
    fml_value: float
    converged: bool
    iterations: int
    gradient_norm: float
    n: int
    se_status: str = "OK"
    message: str = ""
    metadata: dict = field(default_factory=dict)

    def estimate_vector(self) -> np.ndarray:
        return self.estimates.pack()

    def se_vector(self) -> np.ndarray:
        return np.array([self.standard_errors[k] for k in self.spec.param_names()])

    def loading(self, indicator: str) -> float:
        if indicator in (self.spec.sc_indicators[0], self.spec.perf_indicators[0]):
            return 1.0
        names = self.spec.param_names()
        return float(self.estimate_vector()[names.index(f"loading.{indicator}")])

    def records(self) -> list[ParamRecord]:
        out = [
            ParamRecord(f"loading.{self.spec.sc_indicators[0]}", 1.0, None, None, "", True),
            ParamRecord(f"loading.{self.spec.perf_indicators[0]}", 1.0, None, None, "", True),
        ]
        for name, est in zip(self.spec.param_names(), self.estimate_vector()):
            se = self.standard_errors.get(name)
            z = self.z_values.get(name)
            out.append(
                ParamRecord(
                    name,
                    float(est),
                    None if se is None or not math.isfinite(se) else float(se),
                    None if z is None or not math.isfinite(z) else float(z),
                    self.stars.get(name, ""),
                    False,
                )
            )
        out.append(ParamRecord("latent_covariance", float(self.latent_covariance), None, None, "", False))
        return out

    def to_dict(self) -> dict:
        meta = {
            "model_id": self.spec.model_id,
            "n": self.n,
            "p": self.spec.p,
            "sc_indicators": list(self.spec.sc_indicators),
            "perf_indicators": list(self.spec.perf_indicators),
            "fml_value": self.fml_value,
            "converged": self.converged,
            "iterations": self.iterations,
            "gradient_norm": self.gradient_norm,
            "se_status": self.se_status,
            "message": self.message,
        }
        meta.update(self.metadata)
        return {"model": meta, "parameters": [vars(r) for r in self.records()]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"


def fit_from_dict(doc: dict) -> SemFit:
    """Rebuild a :class:`SemFit` from :meth:`SemFit.to_dict` output."""
    meta = doc["model"]
    spec = ModelSpec(tuple(meta["sc_indicators"]), tuple(meta["perf_indicators"]), meta["model_id"])
    by_name = {r["name"]: r for r in doc["parameters"]}
    names = spec.param_names()
    est = SemParams.unpack(spec, [by_name[k]["estimate"] for k in names])
    nan = float("nan")
    ses = {k: (by_name[k]["se"] if by_name[k]["se"] is not None else nan) for k in names}
    zs = {k: (by_name[k]["z"] if by_name[k]["z"] is not None else nan) for k in names}
    extra = {
        k: v
        for k, v in meta.items()
        if k
        not in ("model_id", "n", "p", "sc_indicators", "perf_indicators", "fml_value", "converged",
                "iterations", "gradient_norm", "se_status", "message")
    }
    return SemFit(
        spec, est, ses, zs, {k: by_name[k]["stars"] for k in names},
        by_name["latent_covariance"]["estimate"], meta["fml_value"], meta["converged"],
        meta["iterations"], meta["gradient_norm"], meta["n"], meta["se_status"], meta["message"], extra,
    )


def start_values(S, spec: ModelSpec) -> SemParams:
    d = np.diag(np.asarray(S, dtype=float))
    return SemParams(
        lambda_x=np.ones(spec.q_x - 1),
        lambda_y=np.ones(spec.q_y - 1),
        gamma=0.1,
        phi=d[0] / 2.0,
        psi=d[spec.q_x] / 2.0,
        theta_x=d[: spec.q_x] / 2.0,
        theta_y=d[spec.q_x :] / 2.0,
    )


def fit(S, spec: ModelSpec, n: int, start: SemParams | None = None) -> SemFit:
    """Maximum-likelihood fit of ``spec`` to the sample covariance ``S``.

    Standard errors are ``sqrt(diag(2/(n-1) * H^-1))`` with ``H`` the Hessian
    of the discrepancy in log-variance coordinates, mapped back to the
    natural scale by the delta method.  A non-convergent run is returned
    with ``converged=False``; an indefinite Hessian sets
    ``se_status='UNRELIABLE'``.
    """
    S = np.asarray(S, dtype=float)
    if n <= spec.p:
        raise SemError("RANK_DEFICIENT", f"sample size {n} must exceed indicator count {spec.p}")
    obj = Discrepancy(S, spec)
    u0 = to_unconstrained(spec, start if start is not None else start_values(S, spec))
    res = bfgs(obj.value, obj.gradient, u0)
    est = from_unconstrained(spec, res.x)
    natural = est.pack()
    names = spec.param_names()

    se_status = "OK"
    se_u = np.full(len(names), np.nan)
    if math.isfinite(res.fun):
        hess = obj.hessian(res.x)
        try:
            eig = np.linalg.eigvalsh(hess)
            if eig.min() <= 0:
                se_status = "UNRELIABLE"
            cov_u = (2.0 / (n - 1)) * np.linalg.inv(hess)
            diag = np.diag(cov_u)
            se_u = np.where(diag > 0, np.sqrt(np.abs(diag)), np.nan)
        except np.linalg.LinAlgError:
            se_status = "UNRELIABLE"
    else:
        se_status = "UNRELIABLE"
    mask = spec.variance_mask()
    se = np.where(mask, natural * se_u, se_u)
    with np.errstate(divide="ignore", invalid="ignore"):
        z = natural / se

    return SemFit(
        spec=spec,
        estimates=est,
        standard_errors=dict(zip(names, map(float, se))),
        z_values=dict(zip(names, map(float, z))),
        stars={k: stars(float(v)) for k, v in zip(names, z)},
        latent_covariance=est.gamma * est.phi,
        fml_value=float(res.fun),
        converged=res.converged,
        iterations=res.iterations,
        gradient_norm=float(np.max(np.abs(res.grad))),
        n=int(n),
        se_status=se_status,
        message=res.message,
    )


def simulate(spec: ModelSpec, params: SemParams, n: int, seed) -> np.ndarray:
    """``n`` zero-mean normal rows with covariance ``implied_covariance``."""
    if n < 1:
        raise SemError("INVALID_PARAM", "n must be at least 1")
    sigma = implied_covariance(spec, params)
    chol = _chol(sigma, "implied covariance")
    rng = np.random.default_rng(seed)
    z = rng.standard_normal((n, spec.p))
    return z @ chol.T


def indicator_matrix(columns: dict[str, Sequence[float]], spec: ModelSpec) -> np.ndarray:
    """Stack named indicator columns in the model's indicator order."""
    return np.column_stack([np.asarray(columns[c], dtype=float) for c in spec.indicators])
