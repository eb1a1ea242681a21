"""Bounded cochain complexes over an exact field, chain maps, cohomology.

A complex stores dims per degree and differentials d^n : C^n -> C^(n+1) of
shape dims(n+1) x dims(n).  Complexes may carry a `certified_degree`: the
largest degree whose cohomology is guaranteed complete (total complexes of
truncated cosimplicial objects are only trustworthy below the truncation).
"""

from __future__ import annotations

from .errors import FieldMismatch, InvariantError
from .exactlin import Field, Matrix, Subspace, subquotient


class CochainComplex:
    """A bounded complex of finite-dimensional vector spaces."""

    __slots__ = ("field", "lower", "upper", "dims", "differentials", "certified_degree", "_cohomology")

    def __init__(self, field: Field, dims: dict, differentials: dict,
                 lower: int | None = None, certified_degree: int | None = None,
                 check: bool = True):
        self.field = field
        self.dims = {n: d for n, d in dims.items() if d > 0}
        nonzero = sorted(self.dims)
        if lower is None:
            lower = nonzero[0] if nonzero else 0
        self.lower = lower
        self.upper = nonzero[-1] if nonzero else lower
        self.differentials = {
            n: m for n, m in differentials.items()
            if self.dim(n) > 0 and self.dim(n + 1) > 0 and not m.is_zero()
        }
        self.certified_degree = certified_degree
        self._cohomology = None
        if check:
            self.validate()

    def validate(self):
        if self.dims and min(self.dims) < self.lower:
            raise InvariantError(f"dimension in degree {min(self.dims)} below lower bound {self.lower}")
        for n, m in self.differentials.items():
            if m.shape != (self.dim(n + 1), self.dim(n)):
                raise InvariantError(f"differential in degree {n} has shape {m.shape}, "
                                     f"expected {(self.dim(n + 1), self.dim(n))}")
            if m.field != self.field:
                raise FieldMismatch(f"differential in degree {n}: {m.field} vs {self.field}")
        for n in list(self.differentials):
            m2 = self.d(n + 1) @ self.d(n)
            if not m2.is_zero():
                raise InvariantError(f"d∘d != 0 in degree {n}")

    def dim(self, n: int) -> int:
        return self.dims.get(n, 0)

    def d(self, n: int) -> Matrix:
        m = self.differentials.get(n)
        if m is None:
            return Matrix.zeros(self.field, self.dim(n + 1), self.dim(n))
        return m

    def degrees(self):
        """Degrees from lower to upper, inclusive."""
        return range(self.lower, self.upper + 1)

    def total_dim(self) -> int:
        return sum(self.dims.values())

    def euler_characteristic(self) -> int:
        return sum((-1) ** n * d for n, d in self.dims.items())

    def is_zero_complex(self) -> bool:
        return not self.dims

    def __eq__(self, other):
        if not isinstance(other, CochainComplex):
            return NotImplemented
        if self.field != other.field or self.dims != other.dims:
            return False
        degs = set(self.differentials) | set(other.differentials)
        return all(self.d(n) == other.d(n) for n in degs)

    def __repr__(self):
        ds = ", ".join(f"{n}:{d}" for n, d in sorted(self.dims.items()))
        return f"CochainComplex({self.field}, {{{ds}}})"

    # ---- cohomology ---------------------------------------------------

    def cohomology(self) -> "CohomologyData":
        if self._cohomology is None:
            self._cohomology = CohomologyData(self)
        return self._cohomology

    def betti(self, up_to: int | None = None) -> dict:
        h = self.cohomology()
        hi = self.upper if up_to is None else up_to
        if self.certified_degree is not None:
            hi = min(hi, self.certified_degree)
        return {n: h.betti[n] for n in range(self.lower, hi + 1) if h.betti.get(n, 0)}


class CohomologyData:
    """Cycles, betti numbers and quotient coordinates of a complex.

    One elimination per degree: the reduced form of d^n yields both its rank
    and the kernel basis, and the pivot columns of d^{n-1} give a basis of
    the coboundaries.  Quotient coordinates (projection/section) are only
    computed when actually requested.
    """

    __slots__ = ("complex", "betti", "cycles", "ranks", "boundaries", "_quotients")

    def __init__(self, C: CochainComplex):
        self.complex = C
        self.betti = {}
        self.cycles = {}
        self.ranks = {}
        self.boundaries = {}
        self._quotients = {}
        for n in C.degrees():
            d = C.d(n)
            R, pivots = d.rref()
            self.ranks[n] = len(pivots)
            self.cycles[n] = Subspace(C.field, C.dim(n),
                                      d.kernel_matrix(reduced=(R, pivots)), canonical=True)
            self.boundaries[n + 1] = d.take_columns(pivots)
        for n in C.degrees():
            self.betti[n] = C.dim(n) - self.ranks.get(n, 0) - self.ranks.get(n - 1, 0)

    def boundary_matrix(self, n: int) -> Matrix:
        b = self.boundaries.get(n)
        if b is None:
            return Matrix.zeros(self.complex.field, self.complex.dim(n), 0)
        return b

    def quotient(self, n: int):
        """(dim, projection, section) of H^n = cycles/boundaries."""
        if n not in self._quotients:
            Z = self.cycles.get(n)
            if Z is None:
                Z = Subspace.zero(self.complex.field, self.complex.dim(n))
            B = Subspace.spanned_by(self.complex.field, self.complex.dim(n),
                                    self.boundary_matrix(n))
            self._quotients[n] = subquotient(Z, B)
        return self._quotients[n]

    @property
    def proj(self):
        return _QuotientView(self, 1)

    @property
    def section(self):
        return _QuotientView(self, 2)

    def class_representatives(self, n: int) -> Matrix:
        """Ambient-coordinate representatives of a basis of H^n."""
        Z = self.cycles.get(n)
        if Z is None:
            return Matrix.zeros(self.complex.field, self.complex.dim(n), 0)
        return Z.basis @ self.quotient(n)[2]


class _QuotientView:
    """Dict-like access to the lazy quotient projections/sections."""

    __slots__ = ("data", "idx")

    def __init__(self, data, idx):
        self.data = data
        self.idx = idx

    def __getitem__(self, n):
        return self.data.quotient(n)[self.idx]


class ChainMap:
    """A degreewise linear map commuting with the differentials."""

    __slots__ = ("source", "target", "components")

    def __init__(self, source: CochainComplex, target: CochainComplex, components: dict, check: bool = True):
        if source.field != target.field:
            raise FieldMismatch(f"{source.field} vs {target.field}")
        self.source = source
        self.target = target
        self.components = {
            n: m for n, m in components.items()
            if source.dim(n) > 0 and target.dim(n) > 0 and not m.is_zero()
        }
        if check:
            self.validate()

    def validate(self):
        for n, m in self.components.items():
            if m.shape != (self.target.dim(n), self.source.dim(n)):
                raise InvariantError(f"component in degree {n} has shape {m.shape}, "
                                     f"expected {(self.target.dim(n), self.source.dim(n))}")
        lo = min(self.source.lower, self.target.lower)
        hi = max(self.source.upper, self.target.upper)
        for n in range(lo, hi + 1):
            lhs = self.target.d(n) @ self.component(n)
            rhs = self.component(n + 1) @ self.source.d(n)
            if lhs != rhs:
                raise InvariantError(f"chain map does not commute with d in degree {n}")

    def component(self, n: int) -> Matrix:
        m = self.components.get(n)
        if m is None:
            return Matrix.zeros(self.source.field, self.target.dim(n), self.source.dim(n))
        return m

    def compose(self, other: "ChainMap") -> "ChainMap":
        """self ∘ other."""
        if other.target is not self.source and other.target != self.source:
            raise InvariantError("composition of non-matching chain maps")
        degs = set(self.components) | set(other.components)
        return ChainMap(other.source, self.target,
                        {n: self.component(n) @ other.component(n) for n in degs}, check=False)

    def __add__(self, other: "ChainMap") -> "ChainMap":
        degs = set(self.components) | set(other.components)
        return ChainMap(self.source, self.target,
                        {n: self.component(n) + other.component(n) for n in degs}, check=False)

    def scale(self, c) -> "ChainMap":
        return ChainMap(self.source, self.target,
                        {n: m.scale(c) for n, m in self.components.items()}, check=False)

    def __eq__(self, other):
        if not isinstance(other, ChainMap):
            return NotImplemented
        if self.source.dims != other.source.dims or self.target.dims != other.target.dims:
            return False
        degs = set(self.components) | set(other.components)
        return all(self.component(n) == other.component(n) for n in degs)

    @staticmethod
    def identity(C: CochainComplex) -> "ChainMap":
        return ChainMap(C, C, {n: Matrix.identity(C.field, C.dim(n)) for n in C.dims}, check=False)

    @staticmethod
    def zero(source: CochainComplex, target: CochainComplex) -> "ChainMap":
        return ChainMap(source, target, {}, check=False)

    def __repr__(self):
        return f"ChainMap({self.source!r} -> {self.target!r})"


def zero_complex(field: Field) -> CochainComplex:
    return CochainComplex(field, {}, {}, lower=0)


def single_complex(field: Field, degree: int = 0, dim: int = 1) -> CochainComplex:
    """The complex with one space in one degree and zero differential."""
    return CochainComplex(field, {degree: dim}, {})


def truncate(C: CochainComplex, N: int) -> CochainComplex:
    """Brutal truncation to degrees <= N; certifies degrees <= N-1."""
    if C.upper <= N:
        return C
    dims = {n: d for n, d in C.dims.items() if n <= N}
    diffs = {n: m for n, m in C.differentials.items() if n < N}
    cert = N - 1 if C.certified_degree is None else min(C.certified_degree, N - 1)
    return CochainComplex(C.field, dims, diffs, lower=C.lower, certified_degree=cert, check=False)


def shift_degrees(C: CochainComplex, k: int) -> CochainComplex:
    """Reindex C placing degree n in degree n+k (no sign changes)."""
    return CochainComplex(
        C.field,
        {n + k: d for n, d in C.dims.items()},
        {n + k: m for n, m in C.differentials.items()},
        lower=C.lower + k,
        certified_degree=None if C.certified_degree is None else C.certified_degree + k,
        check=False,
    )


def biproduct(C1: CochainComplex, C2: CochainComplex):
    """Degreewise direct sum with block-diagonal differentials.

    Returns (C, (i1, i2), (p1, p2)); p_k ∘ i_k are identities.
    """
    if C1.field != C2.field:
        raise FieldMismatch(f"{C1.field} vs {C2.field}")
    field = C1.field
    lo = min(C1.lower, C2.lower)
    hi = max(C1.upper, C2.upper)
    dims = {n: C1.dim(n) + C2.dim(n) for n in range(lo, hi + 1)}
    diffs = {}
    for n in range(lo, hi + 1):
        d1, d2 = C1.d(n), C2.d(n)
        top = d1.hstack(Matrix.zeros(field, d1.rows, d2.cols))
        bot = Matrix.zeros(field, d2.rows, d1.cols).hstack(d2)
        diffs[n] = top.vstack(bot)
    cert = None
    for c in (C1.certified_degree, C2.certified_degree):
        if c is not None:
            cert = c if cert is None else min(cert, c)
    C = CochainComplex(field, dims, diffs, lower=lo, certified_degree=cert, check=False)
    incl1, incl2, proj1, proj2 = {}, {}, {}, {}
    for n in range(lo, hi + 1):
        a, b = C1.dim(n), C2.dim(n)
        i_n = Matrix.identity(field, a + b)
        incl1[n] = i_n.take_columns(range(a))
        incl2[n] = i_n.take_columns(range(a, a + b))
        proj1[n] = i_n.take_rows(range(a))
        proj2[n] = i_n.take_rows(range(a, a + b))
    return C, (ChainMap(C1, C, incl1, check=False), ChainMap(C2, C, incl2, check=False)), \
        (ChainMap(C, C1, proj1, check=False), ChainMap(C, C2, proj2, check=False))


class QuisReport:
    """Per-degree record of whether a chain map induces isos on cohomology."""

    __slots__ = ("flag", "per_degree", "certified_degree")

    def __init__(self, flag: bool, per_degree: dict, certified_degree: int | None):
        self.flag = flag
        self.per_degree = per_degree
        self.certified_degree = certified_degree

    def __bool__(self):
        return self.flag

    def failures(self):
        return sorted(n for n, ok in self.per_degree.items() if not ok)

    def __repr__(self):
        return f"QuisReport({self.flag}, failures={self.failures()}, certified={self.certified_degree})"


def induced_map(f: ChainMap, n: int) -> Matrix:
    """The matrix of H^n(f) in the chosen cohomology coordinates."""
    hs = f.source.cohomology()
    ht = f.target.cohomology()
    reps = hs.class_representatives(n)
    imgs = f.component(n) @ reps
    Zt = ht.cycles.get(n)
    if Zt is None or Zt.dim == 0:
        return Matrix.zeros(f.source.field, ht.betti.get(n, 0), hs.betti.get(n, 0))
    coords = Zt.coords_of(imgs)
    return ht.quotient(n)[1] @ coords


def is_quis(f: ChainMap, up_to: int | None = None) -> QuisReport:
    """Does f induce an isomorphism on cohomology in every (certified) degree?

    H^n(f) is an isomorphism iff the betti numbers agree and the map is
    surjective, i.e. f(Z^n) together with the target coboundaries spans the
    target cycles; that is a single rank computation per degree.
    """
    lo = min(f.source.lower, f.target.lower)
    hi = max(f.source.upper, f.target.upper)
    cert = None
    for c in (f.source.certified_degree, f.target.certified_degree, up_to):
        if c is not None:
            cert = c if cert is None else min(cert, c)
    if cert is not None:
        hi = min(hi, cert)
    per = {}
    hs = f.source.cohomology()
    ht = f.target.cohomology()
    for n in range(lo, hi + 1):
        bs, bt = hs.betti.get(n, 0), ht.betti.get(n, 0)
        if bs != bt:
            per[n] = False
            continue
        if bs == 0:
            per[n] = True
            continue
        Zs = hs.cycles[n]
        Zt = ht.cycles[n]
        span = (f.component(n) @ Zs.basis).hstack(ht.boundary_matrix(n))
        per[n] = span.rank() == Zt.dim
    return QuisReport(all(per.values()), per, cert)


# ---- randomized instances ----------------------------------------------


def random_complex(field: Field, rng, lower: int = 0, span: int = 3, max_dim: int = 3,
                   scramble: bool = True) -> CochainComplex:
    """Random bounded complex with d∘d = 0 by construction.

    Built as a sum of cohomology classes and contractible two-term pieces in
    a canonical basis, then conjugated degreewise by random invertibles.
    """
    degs = list(range(lower, lower + span))
    betti = {n: rng.randint(0, max_dim - 1) for n in degs}
    pairs = {n: rng.randint(0, max_dim - 1) for n in degs[:-1]} if span > 1 else {}
    dims = {}
    for n in degs:
        dims[n] = betti.get(n, 0) + pairs.get(n, 0) + pairs.get(n - 1, 0)
    diffs = {}
    for n in degs[:-1]:
        rows, cols = dims.get(n + 1, 0), dims.get(n, 0)
        m = Matrix.zeros(field, rows, cols).rows_list()
        # identity block: the pairs born in degree n die into degree n+1
        r0 = betti.get(n + 1, 0) + pairs.get(n + 1, 0)
        c0 = betti.get(n, 0)
        for k in range(pairs.get(n, 0)):
            m[r0 + k][c0 + k] = 1
        diffs[n] = Matrix(field, rows, cols, m)
    C = CochainComplex(field, dims, diffs, lower=lower, check=False)
    if not scramble:
        return C
    from .exactlin import random_invertible
    P = {n: random_invertible(field, dims.get(n, 0), rng) for n in degs}
    new_diffs = {n: P[n + 1] @ C.d(n) @ P[n].inverse() for n in degs[:-1]}
    return CochainComplex(field, dims, new_diffs, lower=lower, check=False)


def random_chain_map(C: CochainComplex, D: CochainComplex, rng) -> ChainMap:
    """Uniformly random chain map C -> D, sampled from the solution space
    of the commutation constraints."""
    if C.field != D.field:
        raise FieldMismatch(f"{C.field} vs {D.field}")
    field = C.field
    lo = min(C.lower, D.lower)
    hi = max(C.upper, D.upper)
    slots = [(n, D.dim(n), C.dim(n)) for n in range(lo, hi + 1) if D.dim(n) and C.dim(n)]
    total = sum(r * c for _, r, c in slots)
    if total == 0:
        return ChainMap.zero(C, D)
    offsets = {}
    off = 0
    for n, r, c in slots:
        offsets[n] = off
        off += r * c

    def unknown_index(n, i, j):
        _, r, c = next(s for s in slots if s[0] == n)
        return offsets[n] + i * c + j

    rows = []
    for n in range(lo, hi + 1):
        dD, dC = D.d(n), C.d(n)
        rdim, cdim = D.dim(n + 1), C.dim(n)
        if rdim == 0 or cdim == 0:
            continue
        has_n = D.dim(n) and C.dim(n)
        has_n1 = D.dim(n + 1) and C.dim(n + 1)
        if not has_n and not has_n1:
            continue
        for i in range(rdim):
            for j in range(cdim):
                row = [field.element(0)] * total
                if has_n:
                    for k in range(D.dim(n)):
                        v = dD.entry(i, k)
                        if v:
                            row[unknown_index(n, k, j)] += v
                if has_n1:
                    for k in range(C.dim(n + 1)):
                        v = dC.entry(k, j)
                        if v:
                            row[unknown_index(n + 1, i, k)] -= v
                rows.append([field.element(x) for x in row])
    if rows:
        sys = Matrix.from_rows(field, rows)
        K = sys.kernel_matrix()
    else:
        K = Matrix.identity(field, total)
    coeffs = Matrix(field, K.cols, 1, [[field.random_element(rng)] for _ in range(K.cols)])
    vec = K @ coeffs
    comps = {}
    for n, r, c in slots:
        m = Matrix.zeros(field, r, c).rows_list()
        for i in range(r):
            for j in range(c):
                m[i][j] = vec.entry(offsets[n] + i * c + j, 0)
        comps[n] = Matrix(field, r, c, m)
    return ChainMap(C, D, comps)
