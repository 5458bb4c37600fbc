"""Average channel-power math for grid-sized receivers and element arrays.

A receiver is not a point: coverage is judged on the average power over
a square grid of side ``grid_side``, and a reflecting panel aggregates a
rectangular array of elements.  The average of the squared channel
magnitude decomposes into a sum of per-path powers plus pairwise cross
terms.  Each cross term carries a spatial-average weight that depends
only on the arrival-direction pair, and that weight has a closed form
(a product of two half-argument sinc factors and a cosine); this module
evaluates those closed forms exactly, plus the element-array analogue
and the cascaded two-hop gain used by the deployment optimizer.

The grid square is parameterized from its reference corner: the local
offset of a point is (x, y) with x, y in [0, grid_side].  The planar
phase offset of a path with elevation ``phi`` and azimuth ``theta`` at
local offset (x, y) is ``x cos(phi) sin(theta) + y cos(phi) cos(theta)``.
For a vertical panel with element spacing ``spacing`` the offset of
element (a, b) is ``a*spacing*cos(phi)*cos(theta) + b*spacing*sin(phi)``
(horizontal index sweeps along the panel, vertical index up its height).
"""

from __future__ import annotations

import math

import numpy as np

# Below this argument magnitude sin(x/2)/(x/2) switches to its series.
_SMALL_ARG = 1e-6


def _half_sinc(x: float) -> float:
    """sin(x/2) / (x/2), stable through x = 0."""
    h = 0.5 * x
    if abs(h) < _SMALL_ARG:
        hh = h * h
        return 1.0 - hh / 6.0 + hh * hh / 120.0
    return math.sin(h) / h


def _plane_coeffs(phi: float, theta: float) -> tuple[float, float]:
    cp = math.cos(phi)
    return cp * math.sin(theta), cp * math.cos(theta)


def cross_term_rho(phi_l: float, theta_l: float,
                   phi_lp: float, theta_lp: float,
                   grid_side: float, wavelength: float) -> float:
    """Grid-average cross-term weight for one path pair.

    Equals the average over the grid square of
    ``cos(2*pi/wavelength * (offset_l - offset_lp))`` where ``offset_*``
    is the planar phase offset of each path.  Identical angles give 1.
    The magnitude never exceeds
    ``wavelength**2 / (pi**2 * grid_side**2 * |A*B|)`` where A and B are
    the differences of the two paths' planar direction cosines.

    Parameters
    ----------
    phi_l, theta_l : float
        Elevation/azimuth of the first path (radians).
    phi_lp, theta_lp : float
        Elevation/azimuth of the second path.
    grid_side : float
        Side of the receiver grid square (meters).
    wavelength : float
        Carrier wavelength (meters).
    """
    if grid_side <= 0.0 or wavelength <= 0.0:
        raise ValueError("grid_side and wavelength must be positive")
    a_l, b_l = _plane_coeffs(phi_l, theta_l)
    a_p, b_p = _plane_coeffs(phi_lp, theta_lp)
    u = 2.0 * math.pi * (a_l - a_p) * grid_side / wavelength
    v = 2.0 * math.pi * (b_l - b_p) * grid_side / wavelength
    # Average of cos over the square factors through complex 1-D means:
    # mean(e^{-i(ux' + vy')}) = e^{-i(u+v)/2} hsinc(u) hsinc(v).
    return math.cos(0.5 * (u + v)) * _half_sinc(u) * _half_sinc(v)


def _pair_mean(u: float, v: float) -> complex:
    """Complex grid average of e^{-i(u x' + v y')}, x', y' in [0, 1]."""
    mag = _half_sinc(u) * _half_sinc(v)
    ang = -0.5 * (u + v)
    return complex(mag * math.cos(ang), mag * math.sin(ang))


def exact_average_direct_gain(paths, grid_side: float, wavelength: float,
                              phases) -> float:
    """Average squared channel magnitude over a receiver grid square.

    ``paths`` is a sequence with ``amplitude``, ``elev_aoa`` and
    ``azim_aoa`` attributes (a traced path set works); ``phases`` gives
    each path's carrier phase at the grid reference corner.  The value
    is the sum of per-path powers plus every pairwise cross term with
    its closed-form spatial weight, so it equals the brute-force average
    of |sum of path responses|^2 over the square.
    """
    paths = list(paths)
    if len(phases) != len(paths):
        raise ValueError("need one phase per path (%d paths, %d phases)"
                         % (len(paths), len(phases)))
    amps = [abs(p.amplitude) for p in paths]
    total = sum(a * a for a in amps)
    scale = 2.0 * math.pi * grid_side / wavelength
    coeffs = [_plane_coeffs(p.elev_aoa, p.azim_aoa) for p in paths]
    for l in range(len(paths)):
        for lp in range(l + 1, len(paths)):
            u = scale * (coeffs[l][0] - coeffs[lp][0])
            v = scale * (coeffs[l][1] - coeffs[lp][1])
            rel = phases[l] - phases[lp]
            w = complex(math.cos(rel), math.sin(rel)) * _pair_mean(u, v)
            total += 2.0 * amps[l] * amps[lp] * w.real
    return total


def exact_average_incident_gain(paths, m_a: int, m_b: int, spacing: float,
                                wavelength: float, phases) -> float:
    """Average squared channel magnitude over an m_a x m_b element array.

    Evaluates the finite element sums directly: per element, the paths
    are summed coherently with their geometric phase offsets; the
    squared magnitudes are then averaged across elements.  With a single
    element this reduces to the coherent sum power; with one path it is
    exactly that path's power.
    """
    paths = list(paths)
    if len(phases) != len(paths):
        raise ValueError("need one phase per path (%d paths, %d phases)"
                         % (len(paths), len(phases)))
    if m_a < 1 or m_b < 1:
        raise ValueError("element counts must be at least 1")
    if not paths:
        return 0.0
    k = 2.0 * math.pi / wavelength
    ia = np.arange(m_a)
    ib = np.arange(m_b)
    field = np.zeros((m_a, m_b), dtype=complex)
    for p, psi in zip(paths, phases):
        cp = math.cos(p.elev_aoa)
        coef_a = cp * math.cos(p.azim_aoa)
        coef_b = math.sin(p.elev_aoa)
        pa = np.exp(-1j * k * spacing * coef_a * ia)
        pb = np.exp(-1j * k * spacing * coef_b * ib)
        field += abs(p.amplitude) * np.exp(1j * psi) * np.outer(pa, pb)
    return float(np.mean(np.abs(field) ** 2))


def kappa(incident: tuple[float, int], departing: tuple[float, int]) -> float:
    """Per-tile cascaded coupling of one surface state toward one grid.

    ``incident`` is (average received power at the panel in mW, path
    count); ``departing`` is (average panel-to-grid gain, path count).
    The value is the product of the two powers divided by the product of
    the path counts.
    """
    p_in, l_in = incident
    p_out, l_out = departing
    if p_in < 0.0 or p_out < 0.0:
        raise ValueError("powers must be non-negative")
    if (p_in > 0.0 and l_in < 1) or (p_out > 0.0 and l_out < 1):
        raise ValueError("positive power requires at least one path")
    if p_in == 0.0 or p_out == 0.0:
        return 0.0
    return (p_in * p_out) / (l_in * l_out)


def cascaded_gain(tiles: int, elements_sq: int, coupling: float) -> float:
    """Effective reflected power through ``tiles`` tiles of elements_sq
    elements each: tiles^2 * elements_sq^2 * coupling."""
    if tiles < 0:
        raise ValueError("tile count must be non-negative")
    return (tiles * tiles) * float(elements_sq * elements_sq) * coupling
