"""Sparse exterior algebra over exact coefficients.

Blades are stored as integer bitmasks (bit ``i`` set <=> basis vector ``e_i``
present). Coefficients can be anything supporting ``+``, ``*`` and comparison
with ``0``: ``int``, ``Fraction``, ``float`` (inexact path) or the formal
:class:`~spinekit.moments.MomentPoly`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Iterable, Mapping

MAX_DIM = 64


class ContractError(ValueError):
    """Raised when an operation is called outside its contract."""


class BudgetError(RuntimeError):
    """Raised when a computation would exceed its configured size budget."""


def to_scalar(value) -> Fraction | int | float | complex:
    """Coerce user input (int, str, Fraction, float, complex) to an exact scalar when possible."""
    if isinstance(value, (int, Fraction, float, complex)):
        return value
    return Fraction(value)


def mask_of(indices: Iterable[int]) -> int:
    mask = 0
    for i in indices:
        if mask >> i & 1:
            raise ContractError(f"repeated index {i}")
        mask |= 1 << i
    return mask


def indices_of(mask: int) -> tuple[int, ...]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return tuple(out)


def wedge_sign(a: int, b: int) -> int:
    """Sign of ``e_a ^ e_b`` relative to the sorted blade ``e_{a|b}``.

    Returns 0 when the blades share an index, otherwise ``(-1)**inv`` where
    ``inv`` counts pairs ``(i in a, j in b)`` with ``i > j``.
    """
    if a & b:
        return 0
    inv = 0
    while b:
        low = b & -b
        inv += (a & ~((low << 1) - 1)).bit_count()
        b ^= low
    return -1 if inv & 1 else 1


@dataclass(frozen=True)
class Blade:
    indices: tuple[int, ...]
    dim: int
    dual: bool = False

    def __post_init__(self):
        idx = tuple(self.indices)
        object.__setattr__(self, "indices", idx)
        if not 0 <= self.dim <= MAX_DIM:
            raise ContractError(f"dim must be in [0, {MAX_DIM}], got {self.dim}")
        if any(b <= a for a, b in zip(idx, idx[1:])):
            raise ContractError(f"blade indices must be strictly increasing: {idx}")
        if idx and (idx[0] < 0 or idx[-1] >= self.dim):
            raise ContractError(f"blade indices out of range for dim {self.dim}: {idx}")

    @classmethod
    def from_mask(cls, mask: int, dim: int, dual: bool = False) -> "Blade":
        return cls(indices_of(mask), dim, dual)

    @property
    def key(self) -> int:
        return mask_of(self.indices)

    @property
    def degree(self) -> int:
        return len(self.indices)


def DualBlade(indices, dim) -> Blade:
    """A blade of the dual space ``V*`` (``e_S^*``)."""
    return Blade(tuple(indices), dim, dual=True)


def wedge_blades(a: Blade, b: Blade) -> tuple[int, Blade | None]:
    if a.dim != b.dim:
        raise ContractError(f"dimension mismatch: {a.dim} vs {b.dim}")
    ka, kb = a.key, b.key
    s = wedge_sign(ka, kb)
    if s == 0:
        return 0, None
    return s, Blade.from_mask(ka | kb, a.dim, a.dual)


@dataclass(frozen=True)
class SparseForm:
    """Homogeneous element of the exterior algebra of a ``dim``-dimensional space.

    ``terms`` maps blade masks to nonzero coefficients. ``dual`` marks forms on
    ``V*``; they wedge among themselves exactly like primal forms and act on
    primal forms through :func:`contract`.
    """

    degree: int
    dim: int
    terms: Mapping[int, Any] = field(default_factory=dict)
    dual: bool = False

    def __post_init__(self):
        if not 0 <= self.degree <= self.dim <= MAX_DIM:
            raise ContractError(f"bad degree/dim: {self.degree}/{self.dim}")
        clean = {}
        for k, v in self.terms.items():
            if v != 0:
                clean[k] = v
        object.__setattr__(self, "terms", clean)

    @classmethod
    def zero(cls, degree: int, dim: int, dual: bool = False) -> "SparseForm":
        return cls(degree, dim, {}, dual)

    @classmethod
    def blade(cls, indices: Iterable[int], dim: int, coeff=1, dual: bool = False) -> "SparseForm":
        idx = tuple(indices)
        return cls(len(idx), dim, {mask_of(idx): coeff}, dual)

    @classmethod
    def scalar(cls, value, dim: int) -> "SparseForm":
        return cls(0, dim, {0: value})

    def __len__(self) -> int:
        return len(self.terms)

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __eq__(self, other) -> bool:
        if isinstance(other, int) and other == 0:
            return not self.terms
        if not isinstance(other, SparseForm):
            return NotImplemented
        return (
            self.dim == other.dim
            and self.dual == other.dual
            and (self.degree == other.degree or not (self.terms or other.terms))
            and self.terms == other.terms
        )

    __hash__ = None

    def coeff(self, indices: Iterable[int]):
        return self.terms.get(mask_of(indices), 0)

    def items(self):
        """(indices, coefficient) pairs in blade-key order."""
        return [(indices_of(k), self.terms[k]) for k in sorted(self.terms)]

    def _check_compatible(self, other: "SparseForm"):
        if self.dim != other.dim:
            raise ContractError(f"dimension mismatch: {self.dim} vs {other.dim}")
        if self.dual != other.dual:
            raise ContractError("cannot combine primal and dual forms here")

    def __add__(self, other: "SparseForm") -> "SparseForm":
        if isinstance(other, int) and other == 0:
            return self
        self._check_compatible(other)
        if self.degree != other.degree and self.terms and other.terms:
            raise ContractError("sum of forms of different degree")
        acc = dict(self.terms)
        for k, v in other.terms.items():
            acc[k] = acc.get(k, 0) + v
        deg = self.degree if self.terms else other.degree
        return SparseForm(deg, self.dim, acc, self.dual)

    __radd__ = __add__

    def __neg__(self) -> "SparseForm":
        return SparseForm(self.degree, self.dim, {k: -v for k, v in self.terms.items()}, self.dual)

    def __sub__(self, other: "SparseForm") -> "SparseForm":
        return self + (-other)

    def scale(self, c) -> "SparseForm":
        if c == 0:
            return SparseForm.zero(self.degree, self.dim, self.dual)
        return SparseForm(self.degree, self.dim, {k: c * v for k, v in self.terms.items()}, self.dual)

    def map_coeffs(self, fn) -> "SparseForm":
        return SparseForm(self.degree, self.dim, {k: fn(v) for k, v in self.terms.items()}, self.dual)

    def __xor__(self, other: "SparseForm") -> "SparseForm":
        return wedge(self, other)


def wedge(f: SparseForm, g: SparseForm, keep=None) -> SparseForm:
    """Exterior product ``f ^ g``.

    ``keep``, if given, is a predicate on result masks; rejected blades are
    never accumulated (used for momentum pruning).
    """
    f._check_compatible(g)
    deg = f.degree + g.degree
    if deg > f.dim:
        raise ContractError(f"degree overflow: {f.degree} + {g.degree} > {f.dim}")
    acc: dict[int, Any] = {}
    get = acc.get
    gitems = list(g.terms.items())
    for ka, ca in f.terms.items():
        for kb, cb in gitems:
            if ka & kb:
                continue
            k = ka | kb
            if keep is not None and not keep(k):
                continue
            s = wedge_sign(ka, kb)
            prod = ca * cb
            acc[k] = get(k, 0) + (prod if s > 0 else -prod)
    return SparseForm(deg, f.dim, acc, f.dual)


def hodge_star(f: SparseForm):
    """Coefficient of ``e_0 ^ ... ^ e_{dim-1}`` in a top-degree form."""
    if f.degree != f.dim:
        raise ContractError(f"hodge_star needs a top-degree form, got degree {f.degree} in dim {f.dim}")
    return f.terms.get((1 << f.dim) - 1, 0)


def top_pairing(f: SparseForm, g: SparseForm):
    """``hodge_star(f ^ g)`` without materialising the product."""
    f._check_compatible(g)
    if f.degree + g.degree != f.dim:
        raise ContractError("top_pairing needs complementary degrees")
    full = (1 << f.dim) - 1
    total = 0
    small, big, flip = (f, g, False) if len(f) <= len(g) else (g, f, True)
    for ka, ca in small.terms.items():
        kb = full ^ ka
        cb = big.terms.get(kb)
        if cb is None:
            continue
        s = wedge_sign(kb, ka) if flip else wedge_sign(ka, kb)
        total += s * ca * cb
    return total


def pairing(f: SparseForm, g: SparseForm):
    """Coefficientwise pairing ``<f, g>`` (``e_S`` orthonormal)."""
    if f.dim != g.dim:
        raise ContractError("dimension mismatch")
    small, big = (f, g) if len(f) <= len(g) else (g, f)
    total = 0
    for k, v in small.terms.items():
        w = big.terms.get(k)
        if w is not None:
            total += v * w
    return total


def contract(d: SparseForm | Blade, f: SparseForm) -> SparseForm:
    """Interior product ``iota_d f`` of a dual form into a primal form.

    Sign convention is the adjoint of left wedging:
    ``<e_S ^ A, B> = <A, iota_{e_S^*} B>``, so
    ``iota_{e_S^*} e_T = sign(S, T\\S) e_{T\\S}`` when ``S`` is a subset of ``T``.
    """
    if isinstance(d, Blade):
        d = SparseForm(d.degree, d.dim, {d.key: 1}, dual=True)
    if d.dim != f.dim:
        raise ContractError(f"dimension mismatch: {d.dim} vs {f.dim}")
    if f.dual:
        raise ContractError("contract expects a primal form as second argument")
    if d.degree > f.degree:
        raise ContractError("contraction degree exceeds form degree")
    acc: dict[int, Any] = {}
    for ks, cs in d.terms.items():
        for kt, ct in f.terms.items():
            if ks & kt != ks:
                continue
            rest = kt ^ ks
            s = wedge_sign(ks, rest)
            prod = cs * ct
            acc[rest] = acc.get(rest, 0) + (prod if s > 0 else -prod)
    return SparseForm(f.degree - d.degree, f.dim, acc)


def as_primal(d: SparseForm) -> SparseForm:
    """Identify ``e_S^*`` with ``e_S``."""
    return SparseForm(d.degree, d.dim, d.terms, dual=False)


def as_dual(f: SparseForm) -> SparseForm:
    return SparseForm(f.degree, f.dim, f.terms, dual=True)


@dataclass
class LaurentPoly:
    """Finite Laurent polynomial in a formal variable ``z``."""

    terms: dict[int, Any] = field(default_factory=dict)

    def __post_init__(self):
        self.terms = {k: v for k, v in self.terms.items() if v != 0}

    @classmethod
    def constant(cls, c) -> "LaurentPoly":
        return cls({0: c})

    @classmethod
    def monomial(cls, power: int, c=1) -> "LaurentPoly":
        return cls({power: c})

    def __getitem__(self, power: int):
        return self.terms.get(power, 0)

    def coefficient(self, power: int):
        return self.terms.get(power, 0)

    @property
    def support(self) -> tuple[int, int] | None:
        if not self.terms:
            return None
        return min(self.terms), max(self.terms)

    def __eq__(self, other) -> bool:
        if isinstance(other, LaurentPoly):
            return self.terms == other.terms
        if other == 0:
            return not self.terms
        return self.terms == {0: other} if other != 0 else not self.terms

    __hash__ = None

    def __bool__(self) -> bool:
        return bool(self.terms)

    def _coerce(self, other) -> "LaurentPoly":
        return other if isinstance(other, LaurentPoly) else LaurentPoly.constant(other)

    def __add__(self, other) -> "LaurentPoly":
        other = self._coerce(other)
        acc = dict(self.terms)
        for k, v in other.terms.items():
            acc[k] = acc.get(k, 0) + v
        return LaurentPoly(acc)

    __radd__ = __add__

    def __neg__(self) -> "LaurentPoly":
        return LaurentPoly({k: -v for k, v in self.terms.items()})

    def __sub__(self, other) -> "LaurentPoly":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "LaurentPoly":
        return self._coerce(other) - self

    def __mul__(self, other) -> "LaurentPoly":
        if not isinstance(other, LaurentPoly):
            return LaurentPoly({k: v * other for k, v in self.terms.items()})
        acc: dict[int, Any] = {}
        for a, ca in self.terms.items():
            for b, cb in other.terms.items():
                acc[a + b] = acc.get(a + b, 0) + ca * cb
        return LaurentPoly(acc)

    def __rmul__(self, other) -> "LaurentPoly":
        return LaurentPoly({k: other * v for k, v in self.terms.items()})

    def shift(self, power: int) -> "LaurentPoly":
        """Multiply by ``z**power``."""
        return LaurentPoly({k + power: v for k, v in self.terms.items()})

    def truncate_below(self, power: int) -> "LaurentPoly":
        """Drop every term ``z**k`` with ``k < power``."""
        return LaurentPoly({k: v for k, v in self.terms.items() if k >= power})

    def __call__(self, z):
        return sum((v * z**k for k, v in self.terms.items()), 0)

    def __repr__(self) -> str:
        if not self.terms:
            return "LaurentPoly(0)"
        body = " + ".join(f"({self.terms[k]})z^{k}" for k in sorted(self.terms))
        return f"LaurentPoly({body})"
