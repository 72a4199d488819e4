"""Dense exact diagonalization for small chains.

Three independent constructions of the same Hamiltonian are provided:

* the spin form, built from the graded permutation operators ``S_ij``;
* the hopping form, built from fermion operators with a Jordan-Wigner
  parity string over lower-indexed sites;
* the mode form, whose spectrum is every subset sum of ``eps_N(l) - lam``.

Basis state ``|s_1 ... s_N>`` (``s_i = 1`` for a fermion) has index
``sum_i s_i 2^(N - i)``, i.e. site 1 is the most significant bit and the
ordering is lexicographic in the bitstring.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .entanglement import occupied_modes
from .errors import DegenerateGroundState, OracleMismatch, SizeCapExceeded
from .model import ChainSpec, couplings, mode_energy

MAX_SITES = 12
DEGENERACY_RTOL = 1e-10


def _check_size(n_sites):
    if n_sites is None:
        raise ValueError("exact diagonalization needs a finite chain")
    if n_sites > MAX_SITES:
        raise SizeCapExceeded(f"N={n_sites} exceeds the dense cap of {MAX_SITES} sites")


@dataclass(frozen=True)
class OccupationBasis:
    n_sites: int

    @property
    def dim(self):
        return 1 << self.n_sites

    @property
    def states(self):
        return np.arange(self.dim, dtype=np.int64)

    def bit(self, site):
        """Bit mask of ``site`` (0-based)."""
        return 1 << (self.n_sites - 1 - site)

    def occupations(self):
        """``(dim, N)`` array of ``s_i``."""
        s = self.states[:, None]
        shifts = self.n_sites - 1 - np.arange(self.n_sites)
        return (s >> shifts) & 1

    def label(self, index):
        return format(index, f"0{self.n_sites}b")


def number_operator(n_sites):
    basis = OccupationBasis(n_sites)
    return np.diag(basis.occupations().sum(axis=1).astype(float))


def _permutation_action(basis, i, j):
    """``S_ij`` on every basis state: ``(dst, src, sign)`` with ``i < j``."""
    occ = basis.occupations()
    si, sj = occ[:, i], occ[:, j]
    between = occ[:, i + 1:j].sum(axis=1)
    exponent = np.where(si == sj, si, between)
    src = basis.states
    dst = np.where(si == sj, src, src ^ (basis.bit(i) | basis.bit(j)))
    return dst, src, (-1.0) ** exponent


def permutation_operator(n_sites, i, j):
    """Graded exchange ``S_ij`` (0-based sites, ``i != j``) as a dense matrix."""
    if i == j:
        raise ValueError("S_ij needs two distinct sites")
    basis = OccupationBasis(n_sites)
    dst, src, sign = _permutation_action(basis, min(i, j), max(i, j))
    op = np.zeros((basis.dim, basis.dim))
    op[dst, src] = sign
    return op


def _coupling_at(h, n_sites, d):
    """``h_N(d)`` with ``h`` the array ``h_N(1..N-1)``.

    Always read from the lower half so that ``h(d)`` and ``h(-d)`` are the
    same float and the assembled matrices are exactly symmetric.
    """
    d = d % n_sites
    return h[min(d, n_sites - d) - 1]


def build_spin_hamiltonian(spec: ChainSpec):
    """``sum_{i<j} h(j-i)(1 - S_ij) - lam N_f`` as a dense matrix."""
    n_sites = spec.n_sites
    _check_size(n_sites)
    basis = OccupationBasis(n_sites)
    h = couplings(spec)
    ham = -spec.lam * number_operator(n_sites)
    diag = np.arange(basis.dim)
    for i in range(n_sites):
        for j in range(i + 1, n_sites):
            hij = _coupling_at(h, n_sites, j - i)
            dst, src, sign = _permutation_action(basis, i, j)
            ham[diag, diag] += hij
            np.add.at(ham, (dst, src), -hij * sign)
    return ham


def _string_sign(basis, states, site):
    """Jordan-Wigner parity ``(-1)^(occupied sites before site)``."""
    lower = states >> (basis.n_sites - site)
    return np.where(np.bitwise_count(lower) & 1, -1.0, 1.0)


def _annihilate(basis, states, site):
    """Apply ``a_site`` to basis states: returns ``(new_states, sign, alive)``."""
    occ = (states >> (basis.n_sites - 1 - site)) & 1
    return states ^ basis.bit(site), _string_sign(basis, states, site), occ == 1


def _create(basis, states, site):
    occ = (states >> (basis.n_sites - 1 - site)) & 1
    return states ^ basis.bit(site), _string_sign(basis, states, site), occ == 0


def _hopping_action(basis, i, j):
    src = basis.states
    mid, s1, ok1 = _annihilate(basis, src, j)
    dst, s2, ok2 = _create(basis, mid, i)
    ok = ok1 & ok2
    return dst[ok], src[ok], (s1 * s2)[ok]


def hopping_operator(n_sites, i, j):
    """``a_i^dag a_j`` in the occupation basis (0-based sites)."""
    basis = OccupationBasis(n_sites)
    dst, src, sign = _hopping_action(basis, i, j)
    op = np.zeros((basis.dim, basis.dim))
    op[dst, src] = sign
    return op


def build_fermion_hamiltonian(spec: ChainSpec):
    """``-sum_{i,j} h(i-j) a_i^dag a_j - lam sum_i a_i^dag a_i`` with ``h(0) = -sum_j h(j)``."""
    n_sites = spec.n_sites
    _check_size(n_sites)
    basis = OccupationBasis(n_sites)
    h = couplings(spec)
    h0 = -float(np.sum(h))
    ham = np.zeros((basis.dim, basis.dim))
    for i in range(n_sites):
        for j in range(n_sites):
            amp = h0 + spec.lam if i == j else _coupling_at(h, n_sites, i - j)
            dst, src, sign = _hopping_action(basis, i, j)
            np.add.at(ham, (dst, src), -amp * sign)
    return ham


def mode_subset_spectrum(spec: ChainSpec):
    """Sorted subset sums of ``eps_N(l) - lam`` over all ``2^N`` mode occupations."""
    n_sites = spec.n_sites
    _check_size(n_sites)
    shifted = [mode_energy(spec, l) - spec.lam for l in range(n_sites)]
    sums = np.zeros(1)
    for e in shifted:
        sums = np.concatenate([sums, sums + e])
    return np.sort(sums)


@dataclass(frozen=True)
class SpectrumReport:
    n_sites: int
    worst: float
    tol: float
    ground_energy: float

    @property
    def ok(self):
        return self.worst <= self.tol


def spectrum_vs_modes(spec: ChainSpec, tol=1e-10, ham=None, raise_on_mismatch=False) -> SpectrumReport:
    """Compare the dense spectrum with the mode subset sums."""
    ham = build_spin_hamiltonian(spec) if ham is None else ham
    dense = np.linalg.eigvalsh(ham)
    modes = mode_subset_spectrum(spec)
    worst = float(np.max(np.abs(dense - modes)))
    rep = SpectrumReport(spec.n_sites, worst, tol, float(dense[0]))
    if raise_on_mismatch and not rep.ok:
        raise OracleMismatch(f"dense and mode spectra differ by {worst:.3e}", worst)
    return rep


@dataclass(frozen=True)
class FermionizationReport:
    n_sites: int
    entrywise: float
    spin_vs_modes: float
    fermion_vs_modes: float
    commutator: float

    def ok(self, tol=1e-10):
        return max(self.entrywise, self.spin_vs_modes, self.fermion_vs_modes, self.commutator) <= tol


def fermionization_report(spec: ChainSpec) -> FermionizationReport:
    spin = build_spin_hamiltonian(spec)
    ferm = build_fermion_hamiltonian(spec)
    nf = number_operator(spec.n_sites)
    return FermionizationReport(
        spec.n_sites,
        float(np.max(np.abs(spin - ferm))),
        spectrum_vs_modes(spec, ham=spin).worst,
        spectrum_vs_modes(spec, ham=ferm).worst,
        float(np.max(np.abs(spin @ nf - nf @ spin))),
    )


def ground_state(ham):
    """Lowest eigenvector of a dense symmetric matrix; raises on a degenerate minimum."""
    vals, vecs = np.linalg.eigh(ham)
    scale = max(1.0, float(np.max(np.abs(vals))))
    if len(vals) > 1 and vals[1] - vals[0] < DEGENERACY_RTOL * scale:
        raise DegenerateGroundState(None, float(vals[1] - vals[0]))
    return vals[0], vecs[:, 0]


def reduced_density_matrix(psi, n_sites, L):
    """Trace out sites ``L+1..N`` of a pure state."""
    m = np.asarray(psi).reshape(1 << L, 1 << (n_sites - L))
    return m @ m.conj().T


def _entropy_from_probabilities(p, q):
    p = p[p > 1e-300]
    if abs(q - 1.0) < 1e-6:
        return float(-np.sum(p * np.log(p)))
    return float(math.log(np.sum(p**q)) / (1.0 - q))


def ed_block_entropy(spec: ChainSpec, L, q=1.0, reverse=False):
    """Entropy of the first ``L`` sites in the ground state of ``H`` (or of ``-H`` if ``reverse``)."""
    n_sites = spec.n_sites
    _check_size(n_sites)
    if not 1 <= L <= n_sites:
        raise ValueError(f"block length must be in 1..{n_sites}")
    occupied_modes(spec)
    ham = build_spin_hamiltonian(spec)
    _, psi = ground_state(-ham if reverse else ham)
    rho = reduced_density_matrix(psi, n_sites, L)
    p = np.clip(np.linalg.eigvalsh(rho), 0.0, 1.0)
    return _entropy_from_probabilities(p, q)
