"""Standalone dense-matrix oracles.

Everything here is built directly from numpy Kronecker products so the
checks stay independent of the symbolic algebra they validate.
"""

import numpy as np

I2 = np.eye(2, dtype=complex)
X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
MATS = {"I": I2, "X": X, "Y": Y, "Z": Z}


def dense_pauli(letters):
    out = MATS[letters[0]]
    for s in letters[1:]:
        out = np.kron(out, MATS[s])
    return out


def dense_operator(n_sites, terms):
    """Dense matrix of a pattern -> coefficient map."""
    dim = 2 ** n_sites
    out = np.zeros((dim, dim), dtype=complex)
    for pat, c in terms.items():
        out += c * dense_pauli(pat)
    return out


def dense_ising(n, h, b, couplings):
    """-sum h_j X_j - sum b_j Z_j - sum J_jk Z_j Z_k, couplings as {(j, k): J}."""
    dim = 2 ** n
    out = np.zeros((dim, dim), dtype=complex)

    def site_op(j, mat):
        ops = [I2] * n
        ops[j] = mat
        full = ops[0]
        for o in ops[1:]:
            full = np.kron(full, o)
        return full

    for j in range(n):
        out -= h[j] * site_op(j, X)
        out -= b[j] * site_op(j, Z)
    for (j, k), val in couplings.items():
        out -= val * (site_op(j, Z) @ site_op(k, Z))
    return out


def gibbs_populations(energies, temperature):
    w = np.exp(-(np.asarray(energies) - np.min(energies)) / temperature)
    return w / w.sum()


def two_level_energies(h_xi, b_zf, t_cold, t_hot):
    """Closed-form cycle corner energies of the two-level medium."""
    e_a = -h_xi * np.tanh(h_xi / t_cold)
    e_b = -b_zf * np.tanh(h_xi / t_cold)
    e_c = -b_zf * np.tanh(b_zf / t_hot)
    e_d = -h_xi * np.tanh(b_zf / t_hot)
    return e_a, e_b, e_c, e_d
