"""Radio channel: path loss, log-normal shadowing, Rayleigh block fading, AWGN.

Link-budget quantities are linear (watts, power gains) inside the package;
dB and dBm appear only at the I/O boundary.
"""
from dataclasses import dataclass

import numpy as np

from .errors import OutOfModelRange

SPEED_OF_LIGHT = 3e8

ROLES = ("placement", "shadowing", "fading", "noise", "data")


@dataclass(frozen=True)
class RadioParams:
    f_c: float = 3e9
    d0: float = 100.0
    gamma: float = 3.71
    sigma_psi: float = 3.16
    B_w: float = 2e7
    F0: float = 6.0
    T0: float = 290.0
    k0: float = 1.38e-23

    def __post_init__(self):
        for name in ("f_c", "d0", "gamma", "B_w", "T0", "k0"):
            if not getattr(self, name) > 0:
                raise ValueError(f"RadioParams.{name} must be positive")
        if self.sigma_psi < 0:
            raise ValueError("RadioParams.sigma_psi must be nonnegative")

    @property
    def wavelength(self):
        return SPEED_OF_LIGHT / self.f_c


@dataclass(frozen=True)
class FixedDistance:
    distance: float


@dataclass(frozen=True)
class UniformDisk:
    """Area-uniform placement in the annulus ``[d0, radius]``."""

    radius: float


@dataclass(frozen=True)
class ChannelRealization:
    G: np.ndarray  # (..., M, K) small-scale fading
    beta: np.ndarray  # (..., K) large-scale gains

    @property
    def H(self):
        return self.G * np.sqrt(self.beta)[..., None, :]


def dbm_to_watts(dbm):
    return 10.0 ** ((np.asarray(dbm, dtype=float) - 30.0) / 10.0)


def db_to_linear(db):
    return 10.0 ** (np.asarray(db, dtype=float) / 10.0)


def linear_to_db(x):
    return 10.0 * np.log10(x)


def stream(seed, role, *key):
    """Counter-based generator for ``(seed, role, *key)``.

    Streams are Philox generators keyed through ``SeedSequence`` so that any
    block range can be regenerated without replaying earlier ranges.
    """
    if role not in ROLES:
        raise ValueError(f"unknown stream role {role!r}")
    ss = np.random.SeedSequence(int(seed), spawn_key=(ROLES.index(role),) + tuple(int(k) for k in key))
    return np.random.Generator(np.random.Philox(ss))


def complex_normal(rng, shape, var=1.0):
    """Circularly symmetric complex Gaussian entries with variance ``var``."""
    scale = np.sqrt(var / 2.0)
    return scale * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))


def path_loss_db(dist, params=RadioParams(), psi=0.0):
    """Power gain in dB at distance ``dist`` metres with shadowing ``psi`` dB."""
    dist = np.asarray(dist, dtype=float)
    if np.any(dist < params.d0):
        raise OutOfModelRange(f"distance below reference distance d0={params.d0} m")
    free = 20.0 * np.log10(params.wavelength / (4.0 * np.pi * params.d0))
    return free - 10.0 * params.gamma * np.log10(dist / params.d0) - psi


def noise_power(params=RadioParams()):
    """Thermal noise power in watts over the bandwidth."""
    return params.k0 * params.T0 * 10.0 ** (params.F0 / 10.0) * params.B_w


def draw_distances(shape, placement, params, rng):
    if isinstance(placement, FixedDistance):
        if placement.distance < params.d0:
            raise OutOfModelRange(f"distance below reference distance d0={params.d0} m")
        return np.full(shape, float(placement.distance))
    if isinstance(placement, UniformDisk):
        if placement.radius < params.d0:
            raise OutOfModelRange("cell radius smaller than d0")
        u = rng.random(shape)
        r0, r1 = params.d0 ** 2, placement.radius ** 2
        return np.sqrt(r0 + u * (r1 - r0))
    raise TypeError(f"unknown placement policy {placement!r}")


def draw_large_scale(K, placement, params, rng, shadow_rng=None, batch=()):
    """Large-scale gains ``beta`` of shape ``batch + (K,)``.

    ``rng`` drives placement and ``shadow_rng`` (default: ``rng``) the
    shadowing, so the two can come from separate streams.
    """
    shape = tuple(batch) + (K,)
    dist = draw_distances(shape, placement, params, rng)
    shadow_rng = rng if shadow_rng is None else shadow_rng
    psi = params.sigma_psi * shadow_rng.standard_normal(shape)
    return db_to_linear(path_loss_db(dist, params, psi))


def draw_realization(M, beta, rng):
    beta = np.asarray(beta, dtype=float)
    G = complex_normal(rng, beta.shape[:-1] + (M, beta.shape[-1]))
    return ChannelRealization(G=G, beta=beta)


def apply_channel(X, realization, sigma2, rng=None, noise=None):
    """``Y = G D^(1/2) X + noise`` for one block or a batch of blocks.

    ``X`` is ``(..., K, T)``; the result is ``(..., M, T)``.  Noise is drawn
    from ``rng`` unless a pre-drawn unit-variance ``noise`` array is given.
    """
    X = np.asarray(X)
    G = realization.G
    if X.ndim < 2 or X.shape[-2] != G.shape[-1] or realization.beta.shape[-1] != G.shape[-1]:
        raise ValueError(f"dimension mismatch: X {X.shape}, G {G.shape}, beta {realization.beta.shape}")
    Y = G @ (np.sqrt(realization.beta)[..., :, None] * X)
    if sigma2 > 0:
        if noise is None:
            noise = complex_normal(rng, Y.shape)
        elif noise.shape != Y.shape:
            raise ValueError(f"noise shape {noise.shape} != output shape {Y.shape}")
        Y = Y + np.sqrt(sigma2) * noise
    return Y
