import numpy as np
from hypothesis import settings
from hypothesis import strategies as st

from warpalign import Curve, PLWarp, uniform_grid

__all__ = ["pl_warps", "smooth_curves", "fourier_values"]

# deterministic exploration: the suite doubles as an acceptance gate
settings.register_profile("ci", derandomize=True)
settings.load_profile("ci")


@st.composite
def pl_warps(draw, max_segments=6, min_increment=0.05):
    """Random PL warps with bounded slopes (increment-based construction).

    Raise ``min_increment`` to restrict to gentler warps where a test's
    tolerance is discretization-limited.
    """
    k = draw(st.integers(min_value=2, max_value=max_segments))
    dx = draw(st.lists(st.floats(min_increment, 1.0), min_size=k, max_size=k))
    dy = draw(st.lists(st.floats(min_increment, 1.0), min_size=k, max_size=k))
    x = np.concatenate(([0.0], np.cumsum(dx)))
    y = np.concatenate(([0.0], np.cumsum(dy)))
    x /= x[-1]
    y /= y[-1]
    x[-1] = y[-1] = 1.0
    return PLWarp(x, y)


def fourier_values(t: np.ndarray, coeffs) -> np.ndarray:
    """Smooth 1-d signal from a few Fourier coefficients."""
    out = np.zeros_like(t)
    for k, (a, b) in enumerate(coeffs, start=1):
        out += a * np.sin(2 * np.pi * k * t) + b * np.cos(2 * np.pi * k * t)
    return out


@st.composite
def smooth_curves(draw, m=80, dim=1, amplitude=1.0, max_harmonics=3):
    coeff = st.tuples(st.floats(-amplitude, amplitude),
                      st.floats(-amplitude, amplitude))
    t = uniform_grid(m)
    cols = []
    for _ in range(dim):
        coeffs = draw(st.lists(coeff, min_size=1, max_size=max_harmonics))
        cols.append(fourier_values(t, coeffs) + t)
    return Curve(t, np.column_stack(cols))
