"""Pure numpy versions of the kernels in ``_kernels.pyx``.

Same signatures and, for the integer kernels, bit-identical results.
"""
from __future__ import annotations

import numpy as np

_CHUNK = 1 << 15


def enumerate_qubo(core_lin, core_sym, free_lin, free_coup, core_pos, free_pos, n):
    """Exhaustive minimum over the core qubits with free qubits minimized in closed form.

    Free qubits have no couplings among themselves, so given the core
    assignment each contributes ``min(0, field)`` and is a tie when its field
    is 0. Returns ``(min_energy, n_optima, lex_first_assignment)``; energies
    are scaled integers.
    """
    c = core_lin.shape[0]
    upper = np.triu(core_sym, 1)
    shifts = np.arange(c, dtype=np.int64)
    best = None
    count = 0
    best_full = None
    total = 1 << c
    for lo in range(0, total, _CHUNK):
        idx = np.arange(lo, min(total, lo + _CHUNK), dtype=np.int64)
        bits = (idx[:, None] >> shifts) & 1
        energy = bits @ core_lin + np.einsum("ij,ij->i", bits @ upper, bits)
        if free_lin.shape[0]:
            fields = free_lin + bits @ free_coup.T
            energy = energy + np.minimum(fields, 0).sum(axis=1)
        chunk_min = int(energy.min())
        if best is not None and chunk_min > best:
            continue
        rows = np.flatnonzero(energy == chunk_min)
        full = np.zeros((rows.size, n), dtype=np.uint8)
        full[:, core_pos] = bits[rows]
        if free_lin.shape[0]:
            f = fields[rows]
            full[:, free_pos] = f < 0
            zeros = (f == 0).sum(axis=1)
            chunk_count = sum(1 << int(z) for z in zeros)
        else:
            chunk_count = rows.size
        order = np.lexsort(full.T[::-1])
        candidate = full[order[0]]
        if best is None or chunk_min < best:
            best, count, best_full = chunk_min, chunk_count, candidate
        else:
            count += chunk_count
            if tuple(candidate) < tuple(best_full):
                best_full = candidate
    return best, count, best_full.copy()


def sa_block(h, jsym, scale, betas, spins, uniforms):
    """Metropolis single-spin-flip sweeps on a block of independent chains, in place.

    ``spins`` is ``(shots, n)`` int8, ``uniforms`` is ``(shots, sweeps, n)``.
    Energies are the integer-scaled Ising energy divided by ``scale``.
    """
    n = h.shape[0]
    s = spins.astype(np.int64)
    for t, beta in enumerate(betas):
        for i in range(n):
            field = h[i] + s @ jsym[:, i]
            delta = 2 * s[:, i] * field
            accept = (delta <= 0) | (uniforms[:, t, i] < np.exp(-beta * np.maximum(delta, 0) / scale))
            s[accept, i] = -s[accept, i]
    spins[...] = s


def apply_x_rotations(psi, n, c, s):
    """Apply ``cos(t) I + i sin(t) X`` to every qubit of ``psi`` in place."""
    for q in range(n):
        stride = 1 << q
        v = psi.reshape(-1, 2, stride)
        a = v[:, 0, :].copy()
        b = v[:, 1, :]
        v[:, 0, :] = c * a + (1j * s) * b
        v[:, 1, :] = (1j * s) * a + c * b
