"""Compiled inner loops for the state-vector and two-level simulations.

State vectors are passed as the float64 view of a complex128 array
(real and imaginary parts interleaved); gates as ``(n_q, 8)`` float rows
holding ``re/im`` of ``g00, g01, g10, g11``. Qubit ``q`` (0-based here) acts
on bit ``q`` of the basis index.
"""

import math

import numba
import numpy as np


def pack_gates(gates):
    """Convert an ``(n_q, 2, 2)`` complex gate stack to kernel layout."""
    g = np.ascontiguousarray(gates, dtype=np.complex128).reshape(-1, 4)
    return g.view(np.float64).copy()


@numba.njit(cache=True, fastmath=True)
def apply_layer(v, g):
    n = v.shape[0] // 2
    for q in range(g.shape[0]):
        step = 1 << q
        ar = g[q, 0]
        ai = g[q, 1]
        br = g[q, 2]
        bi = g[q, 3]
        cr = g[q, 4]
        ci = g[q, 5]
        dr = g[q, 6]
        di = g[q, 7]
        for base in range(0, n, 2 * step):
            for k in range(base, base + step):
                i0 = 2 * k
                i1 = 2 * (k + step)
                xr = v[i0]
                xi = v[i0 + 1]
                yr = v[i1]
                yi = v[i1 + 1]
                v[i0] = ar * xr - ai * xi + br * yr - bi * yi
                v[i0 + 1] = ar * xi + ai * xr + br * yi + bi * yr
                v[i1] = cr * xr - ci * xi + dr * yr - di * yi
                v[i1 + 1] = cr * xi + ci * xr + dr * yi + di * yr


@numba.njit(cache=True)
def grover_step(v, j, g1, g2):
    # oracle, Hadamard layer, conditional phase shift, Hadamard layer
    v[2 * j] = -v[2 * j]
    v[2 * j + 1] = -v[2 * j + 1]
    apply_layer(v, g1)
    for i in range(2, v.shape[0]):
        v[i] = -v[i]
    apply_layer(v, g2)


@numba.njit(cache=True)
def stlm_evolve(c_m, c_n, gamma, omega, theta0, phases, sample_every, p_out, f_out):
    """Iterate the dissipative two-level map and record p, F at sampled t.

    ``phases`` has shape ``(t_max, 2)``: ``(phi_m, phi_n)`` for each step.
    Returns the final ``(c_m, c_n)``.
    """
    cw = math.cos(omega)
    sw = math.sin(omega)
    decay = math.exp(-gamma)
    t_max = phases.shape[0]
    s = 0
    for t in range(t_max + 1):
        if t % sample_every == 0:
            a = omega * t + theta0
            p_out[s] = c_n.real * c_n.real + c_n.imag * c_n.imag
            ov = c_m * math.cos(a) + c_n * math.sin(a)
            f_out[s] = ov.real * ov.real + ov.imag * ov.imag
            s += 1
        if t == t_max:
            break
        um = c_m * complex(math.cos(phases[t, 0]), math.sin(phases[t, 0]))
        un = c_n * complex(math.cos(phases[t, 1]), math.sin(phases[t, 1]))
        c_m = decay * (cw * um - sw * un)
        c_n = decay * (sw * um + cw * un)
    return c_m, c_n


@numba.njit(cache=True)
def walk_rows(times, theta0, omega, gamma, cum, phi, p_out, f_out):
    """Observables of the Gaussian angle walk for a block of realizations.

    ``cum[r, s]`` is the accumulated angle deviation and ``phi[r, s]`` the
    relative phase of realization ``r`` at sample ``s``.
    """
    for r in range(cum.shape[0]):
        for s in range(times.shape[0]):
            t = times[s]
            a = omega * t + theta0
            th = a + cum[r, s]
            env = math.exp(-2.0 * gamma * t)
            sth = math.sin(th)
            cth = math.cos(th)
            p_out[r, s] = env * sth * sth
            re = cth * math.cos(a) + math.cos(phi[r, s]) * sth * math.sin(a)
            im = math.sin(phi[r, s]) * sth * math.sin(a)
            f_out[r, s] = env * (re * re + im * im)


@numba.njit(cache=True)
def ga_run(v, j, gates, shared, sample_every, theta0, omega, p_out, f_out):
    """Full noisy Grover run; ``gates`` has shape ``(t_max, layers, n_q, 8)``.

    With ``shared`` the single stored layer is used for both Hadamard layers.
    """
    t_max = gates.shape[0]
    dim = v.shape[0] // 2
    inv = 1.0 / math.sqrt(dim - 1)
    s = 0
    for t in range(t_max + 1):
        if t % sample_every == 0:
            a = theta0 + omega * t
            jr = v[2 * j]
            ji = v[2 * j + 1]
            sr = 0.0
            si = 0.0
            for k in range(dim):
                sr += v[2 * k]
                si += v[2 * k + 1]
            sr -= jr
            si -= ji
            orr = math.sin(a) * jr + math.cos(a) * inv * sr
            oi = math.sin(a) * ji + math.cos(a) * inv * si
            p_out[s] = jr * jr + ji * ji
            f_out[s] = orr * orr + oi * oi
            s += 1
        if t == t_max:
            break
        if shared:
            grover_step(v, j, gates[t, 0], gates[t, 0])
        else:
            grover_step(v, j, gates[t, 0], gates[t, 1])
