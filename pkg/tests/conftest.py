import numpy as np

from agp.geometry import Ball, Box, Product, Simplex
from agp.objective import (Regime, make_bilinear, make_nc_sc_sine,
                           make_robust_svm_toy, make_sc_nc_sine,
                           random_quadratic)


def zoo_instances():
    """Canonical desk-scale instance list: every constructor, every regime."""
    rng = np.random.default_rng(2024)
    feats = rng.standard_normal((6, 2))
    labels = np.where(feats[:, 0] > 0, 1.0, -1.0)
    svm = make_robust_svm_toy(
        list(zip(feats, labels)),
        Ball(np.zeros(3), 1.0),
        Product((Ball(np.zeros(2), 1.0), Box([-1.0], [1.0]))))
    sine = make_nc_sc_sine(3, 2, 0.4 * rng.standard_normal((3, 2)), 1.0,
                           Box(-np.ones(3), np.ones(3)), Box(-np.ones(2), np.ones(2)))
    sine_d = make_sc_nc_sine(2, 3, 0.4 * rng.standard_normal((2, 3)), 0.8,
                             Box(-np.ones(2), np.ones(2)), Box(-np.ones(3), np.ones(3)))
    simplex_quad = random_quadratic(41, 3, 3, Regime.NC_SC)
    import dataclasses
    simplex_quad = dataclasses.replace(simplex_quad, Y=Simplex(3, scale=1.0))
    return [
        random_quadratic(1, 3, 2, Regime.NC_SC),
        random_quadratic(2, 2, 3, Regime.NC_C),
        random_quadratic(3, 3, 2, Regime.SC_NC),
        random_quadratic(4, 2, 2, Regime.C_NC),
        simplex_quad,
        make_bilinear([[1.0]], X=Box([-1], [1]), Y=Box([-1], [1])),
        make_bilinear(np.eye(2), X=Box(-np.ones(2), np.ones(2)),
                      Y=Box(-np.ones(2), np.ones(2))),
        sine, sine_d, svm,
    ]
