"""
Matrix amplification ``x~ = sum_j A_j (x) x_j`` over Fock-realized families.

``B = M_k(C)`` acts on ``C^k (x) F`` through the first tensor factor. The
block conditional expectation ``id (x) phi`` takes an operator on
``C^k (x) F`` to the ``k x k`` matrix of vacuum expectations of its blocks.

The ``verify_*`` procedures draw seeded random matrix coefficients and
check the amplification statements numerically:

* :func:`verify_semicircular_amplification` / :func:`verify_theorem1_forward`:
  amplifying a semicircular family with selfadjoint coefficients gives an
  element whose operator-valued cumulants vanish off order two.
* :func:`detect_nonsemicircular`: with coefficient size ``p + 1`` a nonzero
  scalar cumulant of order ``p + 1`` shows up as a nonzero ``xi_p``; no
  polynomial identity of degree ``p + 1`` holds on ``M_{p+1}``.
* :func:`verify_theorem2_chain`: block vacuum expectations of products of
  amplified elements equal the non-crossing pairing expansion.
* :func:`complex_semicircular_check`: real and imaginary parts of a
  complex amplification, and selfadjoint combinations of them, are
  ``B``-semicircular.
"""

from __future__ import annotations

import time
from itertools import product

import numpy as np
import scipy.linalg
import scipy.sparse as sp

from .exceptions import DimensionError, TruncationError
from .fock import FockOperator, free_family
from .matrices import (
    DEFAULT_TOL,
    as_square,
    imag_part,
    is_selfadjoint,
    max_abs,
    random_complex,
    random_selfadjoint,
    real_part,
    trial_rng,
)
from .mcx import CumulantFunction, OpWord, xi_functional
from .report import FAIL, INCONCLUSIVE, PASS, Report, digest
from .wick import free_wick_moment

__all__ = [
    "AmplifiedElement",
    "BlockOperator",
    "AmplifiedMomentSource",
    "amplify",
    "block_expectation",
    "opvalued_moment",
    "opvalued_cumulant",
    "verify_semicircular_amplification",
    "verify_theorem1_forward",
    "detect_nonsemicircular",
    "verify_theorem2_chain",
    "complex_semicircular_check",
    "SEMICIRCULAR_ORDERS",
]

# xi_p vanishes for these p on a B-semicircular element (checked range)
SEMICIRCULAR_ORDERS = (0, 2, 3, 4)


class BlockOperator:
    """Sparse operator on ``C^k (x) F``; block ``(r, s)`` is rows ``r*D..``."""

    def __init__(self, matrix, dim, basis, degree=0):
        matrix = sp.csr_matrix(matrix, dtype=complex)
        if matrix.shape != (dim * basis.size,) * 2:
            raise DimensionError(
                f"block operator of shape {matrix.shape} for k={dim}, basis size {basis.size}"
            )
        self.matrix = matrix
        self.dim = dim
        self.basis = basis
        self.degree = degree

    @classmethod
    def coefficient(cls, b, basis):
        """``b (x) 1``."""
        b = as_square(b)
        return cls(sp.kron(b, sp.identity(basis.size)), b.shape[0], basis, 0)

    @classmethod
    def lift(cls, op: FockOperator, dim):
        """``1_k (x) op``."""
        return cls(sp.kron(sp.identity(dim), op.matrix), dim, op.basis, op.degree)

    def _check(self, other):
        if self.dim != other.dim or self.basis != other.basis:
            raise DimensionError("block operators on different spaces")

    def __matmul__(self, other):
        self._check(other)
        return BlockOperator(self.matrix @ other.matrix, self.dim, self.basis,
                             self.degree + other.degree)

    def __add__(self, other):
        self._check(other)
        return BlockOperator(self.matrix + other.matrix, self.dim, self.basis,
                             max(self.degree, other.degree))

    def adjoint(self):
        return BlockOperator(self.matrix.conj().T, self.dim, self.basis, self.degree)

    def is_selfadjoint(self, tol=1e-12):
        diff = self.matrix - self.matrix.conj().T
        return (abs(diff).max() if diff.nnz else 0.0) <= tol


class AmplifiedElement:
    """The formal sum ``sum_j A_j (x) x_j`` with ``A_j`` in ``M_k(C)``."""

    def __init__(self, coeffs, xs):
        coeffs = [as_square(a) for a in coeffs]
        xs = list(xs)
        if len(coeffs) != len(xs):
            raise DimensionError(f"{len(coeffs)} coefficients for {len(xs)} operators")
        if not xs:
            raise DimensionError("an amplified element needs at least one term")
        k = coeffs[0].shape[0]
        for a in coeffs:
            if a.shape != (k, k):
                raise DimensionError("coefficient matrices must share one dimension")
        basis = xs[0].basis
        for x in xs:
            if x.basis != basis:
                raise DimensionError("operators must share one Fock basis")
        self.coeffs = coeffs
        self.xs = xs
        self.dim = k
        self.basis = basis
        self._op = None

    @property
    def degree(self):
        return max(x.degree for x in self.xs)

    def operator(self) -> BlockOperator:
        """Assembled block operator with blocks ``sum_j (A_j)_rs x_j``."""
        if self._op is None:
            m = sp.csr_matrix((self.dim * self.basis.size,) * 2, dtype=complex)
            for a, x in zip(self.coeffs, self.xs):
                if a.any():
                    m = m + sp.kron(a, x.matrix, format="csr")
            self._op = BlockOperator(m, self.dim, self.basis, self.degree)
        return self._op

    def is_selfadjoint(self, tol=1e-12):
        return self.operator().is_selfadjoint(tol)

    def coefficients_selfadjoint(self, tol=1e-12):
        """Sufficient condition: every ``A_j`` and every ``x_j`` selfadjoint."""
        return all(is_selfadjoint(a, tol) for a in self.coeffs) and all(
            x.is_selfadjoint(tol) for x in self.xs
        )

    def left_mul(self, b):
        """``b x~ = sum_j (b A_j) x_j``."""
        b = as_square(b, self.dim)
        return AmplifiedElement([b @ a for a in self.coeffs], self.xs)

    def __add__(self, other):
        return AmplifiedElement(self.coeffs + other.coeffs, self.xs + other.xs)

    def adjoint(self):
        return AmplifiedElement([a.conj().T for a in self.coeffs], [x.adjoint() for x in self.xs])

    def __repr__(self):
        return f"AmplifiedElement(k={self.dim}, terms={len(self.xs)})"


def amplify(coeffs, xs) -> AmplifiedElement:
    """Form ``sum_j A_j (x) x_j``."""
    return AmplifiedElement(coeffs, xs)


def _vacuum_columns(dim, basis):
    v = np.zeros((dim * basis.size, dim), dtype=complex)
    v[np.arange(dim) * basis.size, np.arange(dim)] = 1.0
    return v


def _left_coeff(b, v, dim, size):
    # (b (x) 1) v without forming the Kronecker product
    return np.einsum("rs,sdc->rdc", b, v.reshape(dim, size, -1)).reshape(dim * size, -1)


def block_expectation(T: BlockOperator) -> np.ndarray:
    """``(id (x) phi)(T)``: entry ``(r, s)`` is ``<Omega, T_rs Omega>``."""
    if T.degree > T.basis.depth:
        raise TruncationError(
            f"operator of degree {T.degree} exceeds truncation depth {T.basis.depth}"
        )
    v = T.matrix @ _vacuum_columns(T.dim, T.basis)
    return v.reshape(T.dim, T.basis.size, T.dim)[:, 0, :].copy()


class AmplifiedMomentSource:
    """Moments ``phi_k(x~_i0 b_1 x~_i1 ... b_p x~_ip)`` of amplified elements.

    Element handles in an :class:`OpWord` index into ``elements``. The
    product is applied to the ``k`` vacuum columns right to left, so no
    block operator product is ever formed.
    """

    def __init__(self, elements):
        elements = list(elements)
        if isinstance(elements[0], AmplifiedElement) is False:
            raise TypeError("expected AmplifiedElement instances")
        self.elements = elements
        self.dim = elements[0].dim
        self.basis = elements[0].basis
        for e in elements:
            if e.dim != self.dim or e.basis != self.basis:
                raise DimensionError("amplified elements must share k and the Fock basis")
        self._ops = [e.operator().matrix for e in elements]
        self.calls = 0

    def __call__(self, word: OpWord) -> np.ndarray:
        if word.dim != self.dim:
            raise DimensionError(f"word over M_{word.dim} applied to M_{self.dim} elements")
        total = sum(self.elements[i].degree for i in word.elements)
        if total > self.basis.depth:
            raise TruncationError(
                f"moment of total degree {total} exceeds truncation depth {self.basis.depth}"
            )
        self.calls += 1
        k, size = self.dim, self.basis.size
        v = _vacuum_columns(k, self.basis)
        n = len(word)
        for pos in range(n - 1, -1, -1):
            v = self._ops[word.elements[pos]] @ v
            if pos > 0:
                v = _left_coeff(word.coeffs[pos - 1], v, k, size)
        return v.reshape(k, size, k)[:, 0, :].copy()

    evaluate = __call__


def opvalued_moment(x: AmplifiedElement, b_args) -> np.ndarray:
    """``eta_p(B_1..B_p) = phi_k(x~ B_1 x~ ... B_p x~)``."""
    b_args = list(b_args)
    return AmplifiedMomentSource([x])(OpWord((0,) * (len(b_args) + 1), b_args, x.dim))


def opvalued_cumulant(x: AmplifiedElement, b_args, cumulant_fn=None) -> np.ndarray:
    """``xi_p(B_1..B_p) = k^(p+1)(x~ (x) B_1 x~ (x) ... (x) B_p x~)``.

    Pass a :class:`CumulantFunction` over ``AmplifiedMomentSource([x])`` to
    share its cache across calls.
    """
    b_args = list(b_args)
    if cumulant_fn is None:
        cumulant_fn = CumulantFunction(AmplifiedMomentSource([x]), x.dim)
    return xi_functional(len(b_args), (0,) * (len(b_args) + 1), b_args, cumulant_fn)


def _environment(**kw):
    return {k: (list(v) if isinstance(v, tuple) else v) for k, v in kw.items()}


def _xi_norms(x, p_values, rng, tol):
    """Max-entry norms of ``xi_p`` at random selfadjoint ``B``'s."""
    cf = CumulantFunction(AmplifiedMomentSource([x]), x.dim)
    out = {}
    for p in p_values:
        bs = [random_selfadjoint(rng, x.dim) for _ in range(p)]
        out[p] = max_abs(opvalued_cumulant(x, bs, cf))
    return out


def verify_semicircular_amplification(family, coeff_dim=3, p_values=SEMICIRCULAR_ORDERS,
                                      trials=50, seed=0, tol=DEFAULT_TOL,
                                      suite="semicircular-amplification", cov=None):
    """Check ``xi_p(B_1..B_p) = 0`` for ``x~ = sum_j A_j (x) x_j``.

    ``family`` is a list of selfadjoint Fock operators; ``A_j`` and ``B_i``
    are seeded random selfadjoint ``coeff_dim x coeff_dim`` matrices. When
    the family covariance ``cov`` is given, ``xi_1(B)`` is also compared
    with ``sum_ij A_i B A_j cov[i, j]``.
    """
    t0 = time.perf_counter()
    p_values = tuple(p_values)
    report = Report(suite, environment=_environment(
        seed=seed, tol=tol, trials=trials, coeff_dim=coeff_dim, p_values=p_values,
        depth=family[0].basis.depth, family_size=len(family)))
    worst = {p: (0.0, None) for p in p_values}
    digests = {p: [] for p in p_values}
    worst_xi1 = (0.0, None)
    for t in range(trials):
        rng = trial_rng(seed, t)
        coeffs = [random_selfadjoint(rng, coeff_dim) for _ in family]
        x = amplify(coeffs, family)
        norms = _xi_norms(x, p_values, rng, tol)
        for p, v in norms.items():
            digests[p].append(digest(seed, t, *coeffs))
            if v >= worst[p][0]:
                worst[p] = (v, t)
        if cov is not None:
            b = random_selfadjoint(rng, coeff_dim)
            got = opvalued_cumulant(x, [b])
            want = sum(
                coeffs[i] @ b @ coeffs[j] * cov[i][j]
                for i in range(len(family)) for j in range(len(family))
            )
            err = max_abs(got - want)
            if err >= worst_xi1[0]:
                worst_xi1 = (err, t)
    for p in p_values:
        report.add_bound(f"xi_{p} vanishes", worst[p][0], tol, digest(*digests[p]),
                         worst_trial=worst[p][1])
    if cov is not None and trials:
        report.add_bound("xi_1 bilinear form", worst_xi1[0], tol, digest(seed, trials),
                         worst_trial=worst_xi1[1])
    report.wall_time = time.perf_counter() - t0
    return report


def verify_theorem1_forward(spec, coeff_dim=3, p_max=4, trials=50, seed=0,
                            tol=DEFAULT_TOL, depth=None):
    """Amplify a semicircular family with covariance ``spec`` and check that
    ``xi_p`` vanishes for ``p`` in ``{0, 2, .., p_max}``."""
    depth = p_max + 1 if depth is None else depth
    if depth < p_max + 1:
        raise TruncationError(f"depth {depth} too small for p_max={p_max}")
    family = free_family(spec, depth)
    p_values = tuple(p for p in range(p_max + 1) if p != 1)
    return verify_semicircular_amplification(
        family, coeff_dim, p_values, trials, seed, tol, suite="thm1-forward", cov=spec.cov)


def detect_nonsemicircular(family, p=2, trials=50, seed=0, matrix_size=None,
                           threshold_ratio=0.5, tol=DEFAULT_TOL):
    """Look for a nonzero ``xi_p(I..I)`` of ``sum_j A_j (x) x_j``.

    Coefficients are random selfadjoint ``(p + 1) x (p + 1)`` matrices by
    default. ``xi_p(I..I)`` is homogeneous of degree ``p + 1`` in the
    ``A_j``, so each trial compares its spectral norm with
    ``threshold_ratio * (sum_j ||A_j||)^(p + 1)``. The report passes iff
    at least one trial detects.
    """
    t0 = time.perf_counter()
    m = p + 1 if matrix_size is None else matrix_size
    report = Report("thm1-converse", environment=_environment(
        seed=seed, tol=tol, trials=trials, p=p, matrix_size=m,
        threshold_ratio=threshold_ratio, depth=family[0].basis.depth, family_size=len(family)))
    detections, max_norm, ratios = 0, 0.0, []
    eye = np.eye(m, dtype=complex)
    for t in range(trials):
        rng = trial_rng(seed, t)
        coeffs = [random_selfadjoint(rng, m) for _ in family]
        x = amplify(coeffs, family)
        xi = opvalued_cumulant(x, [eye] * p)
        norm = float(np.linalg.norm(xi, 2))
        scale = sum(float(np.linalg.norm(a, 2)) for a in coeffs) ** (p + 1)
        ratio = norm / scale if scale > 0 else 0.0
        ratios.append(ratio)
        max_norm = max(max_norm, norm)
        if ratio > threshold_ratio:
            detections += 1
    status = PASS if detections >= 1 else FAIL
    report.add(f"xi_{p}(I..I) detected", status, float(max_norm), threshold_ratio,
               digest(seed, trials, m), detections=detections, trials=trials,
               min_ratio=min(ratios) if ratios else None,
               max_ratio=max(ratios) if ratios else None)
    report.wall_time = time.perf_counter() - t0
    return report


def wick_expansion(coeff_lists, spec):
    """``sum_{j_1..j_m} A_{1,j_1} ... A_{m,j_m} * sum_NCPP prod cov``."""
    k = coeff_lists[0][0].shape[0]
    total = np.zeros((k, k), dtype=complex)
    for js in product(*(range(len(c)) for c in coeff_lists)):
        w = free_wick_moment(js, spec)
        if w == 0.0:
            continue
        prod_ = np.eye(k, dtype=complex)
        for c, j in zip(coeff_lists, js):
            prod_ = prod_ @ c[j]
        total += w * prod_
    return total


def verify_theorem2_chain(spec, max_length=4, coeff_dims=(1, 2, 3), trials=25, seed=0,
                          tol=DEFAULT_TOL, depth=None):
    """Operator-side block vacuum expectations of ``x~_1 ... x~_m`` against
    the combinatorial non-crossing pairing expansion, ``m <= max_length``."""
    t0 = time.perf_counter()
    depth = max_length if depth is None else depth
    if depth < max_length:
        raise TruncationError(f"depth {depth} too small for words of length {max_length}")
    family = free_family(spec, depth)
    coeff_dims = tuple(coeff_dims)
    report = Report("thm2-chain", environment=_environment(
        seed=seed, tol=tol, trials=trials, max_length=max_length, coeff_dims=coeff_dims,
        depth=depth, family_size=len(family)))
    for m in range(1, max_length + 1):
        for k in coeff_dims:
            worst, worst_t, ds = 0.0, None, []
            for t in range(trials):
                rng = trial_rng(seed, t * 1000 + m * 10 + k)
                coeff_lists = [[random_selfadjoint(rng, k) for _ in family] for _ in range(m)]
                elements = [amplify(c, family) for c in coeff_lists]
                operator_side = AmplifiedMomentSource(elements)(OpWord(range(m), dim=k))
                combinatorial = wick_expansion(coeff_lists, spec)
                err = max_abs(operator_side - combinatorial)
                ds.append(digest(seed, t, m, k))
                if err >= worst:
                    worst, worst_t = err, t
            if trials:
                report.add_bound(f"chain m={m} k={k}", worst, tol, digest(*ds), worst_trial=worst_t)
    report.wall_time = time.perf_counter() - t0
    return report


def _commutant_selfadjoint(mats, rng, tol=1e-9):
    """A random selfadjoint element of the commutant of ``mats`` that is not
    a multiple of the identity, or None when the commutant is trivial."""
    k = mats[0].shape[0]
    eye = np.eye(k)
    rows = [np.kron(eye, c) - np.kron(c.T, eye) for c in mats]
    basis = scipy.linalg.null_space(np.vstack(rows), rcond=tol)
    if basis.shape[1] <= 1:
        return None
    coeffs = rng.standard_normal(basis.shape[1]) + 1j * rng.standard_normal(basis.shape[1])
    x = (basis @ coeffs).reshape(k, k, order="F")
    return real_part(x)


def complex_semicircular_check(real_parts, imag_parts, coeff_dim=2, p_values=(0, 2, 3),
                               trials=10, seed=0, tol=DEFAULT_TOL, combinations=3):
    """Check that ``c~ = sum_j A_j c_j`` with ``c_j = real_j + i imag_j`` and
    random complex ``A_j`` is complex ``M_k``-semicircular.

    ``c~ = s~_1 + i s~_2`` with ``s~_1``, ``s~_2`` collecting the selfadjoint
    real and imaginary parts of the coefficients. Both must be
    ``B``-semicircular, and so must every sampled selfadjoint combination
    ``b_1 s~_1 + b_2 s~_2``: real scalar pairs ``(beta I, gamma I)`` and, when
    the commutant of all coefficients is larger than the scalars, pairs
    ``(B, B)`` with ``B`` selfadjoint in that commutant. No selfadjoint
    combination at all makes the report inconclusive.
    """
    t0 = time.perf_counter()
    real_parts, imag_parts = list(real_parts), list(imag_parts)
    if len(real_parts) != len(imag_parts):
        raise DimensionError("need one imaginary part per real part")
    gens = real_parts + imag_parts
    n = len(real_parts)
    k = coeff_dim
    p_values = tuple(p_values)
    report = Report("cor43", environment=_environment(
        seed=seed, tol=tol, trials=trials, coeff_dim=k, p_values=p_values,
        combinations=combinations, depth=gens[0].basis.depth, family_size=n))
    worst_parts, worst_combo, worst_decomp = 0.0, 0.0, 0.0
    n_combos, ds = 0, []
    for t in range(trials):
        rng = trial_rng(seed, t)
        A = [random_complex(rng, k) for _ in range(n)]
        ds.append(digest(seed, t, *A))
        C = A + [1j * a for a in A]
        s1 = amplify([real_part(c) for c in C], gens)
        s2 = amplify([imag_part(c) for c in C], gens)
        c_tilde = amplify(A, [r + 1j * i for r, i in zip(real_parts, imag_parts)])
        lhs = c_tilde.operator().matrix
        rhs = s1.operator().matrix + 1j * s2.operator().matrix
        diff = lhs - rhs
        worst_decomp = max(worst_decomp, abs(diff).max() if diff.nnz else 0.0)
        for s in (s1, s2):
            worst_parts = max(worst_parts, max(_xi_norms(s, p_values, rng, tol).values()))
        pairs = []
        for _ in range(combinations):
            beta, gamma = rng.standard_normal(2)
            pairs.append((beta * np.eye(k), gamma * np.eye(k)))
        b = _commutant_selfadjoint([real_part(c) for c in C] + [imag_part(c) for c in C], rng)
        if b is not None:
            pairs.append((b, b))
        for b1, b2 in pairs:
            combo = amplify([b1 @ real_part(c) + b2 @ imag_part(c) for c in C], gens)
            if not all(is_selfadjoint(a, 1e-12) for a in combo.coeffs):
                continue
            n_combos += 1
            worst_combo = max(worst_combo, max(_xi_norms(combo, p_values, rng, tol).values()))
    d = digest(*ds)
    report.add_bound("c~ = s~1 + i s~2", worst_decomp, tol, d)
    report.add_bound("s~1, s~2 semicircular", worst_parts, tol, d)
    if trials and n_combos == 0:
        report.add("selfadjoint combinations semicircular", INCONCLUSIVE, None, tol, d,
                   combinations=0)
    else:
        report.add("selfadjoint combinations semicircular",
                   PASS if worst_combo <= tol else FAIL, worst_combo, tol, d,
                   combinations=n_combos)
    report.wall_time = time.perf_counter() - t0
    return report
