"""Shared SEM ground truth for the estimator tests."""

import numpy as np

from vcnet import sem


def theta_star(spec):
    """Free loadings 0.5, phi 0.04, gamma 0.8, psi 0.01, error variances 0.01."""
    return sem.SemParams(
        lambda_x=np.full(spec.q_x - 1, 0.5),
        lambda_y=np.full(spec.q_y - 1, 0.5),
        gamma=0.8,
        phi=0.04,
        psi=0.01,
        theta_x=np.full(spec.q_x, 0.01),
        theta_y=np.full(spec.q_y, 0.01),
    )


def random_params(spec, rng):
    return sem.SemParams(
        lambda_x=rng.uniform(-1.5, 1.5, spec.q_x - 1),
        lambda_y=rng.uniform(-1.5, 1.5, spec.q_y - 1),
        gamma=rng.uniform(-1, 1),
        phi=rng.uniform(0.05, 2),
        psi=rng.uniform(0.05, 2),
        theta_x=rng.uniform(0.05, 1, spec.q_x),
        theta_y=rng.uniform(0.05, 1, spec.q_y),
    )


def random_pd(rng, p):
    a = rng.normal(size=(p, p))
    return a @ a.T + 0.1 * np.eye(p)


def fd_gradient(f, u, h=1e-6):
    g = np.zeros_like(u)
    for k in range(len(u)):
        e = np.zeros_like(u)
        e[k] = h
        g[k] = (f(u + e) - f(u - e)) / (2 * h)
    return g
