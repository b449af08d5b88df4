"""Scale-multiplicative cone subsemigroups of a flat group.

A sign pattern assigns each component j either to J+ (elements of the
cone must have rho_j >= 0) or to J- (rho_j <= 0).  The cone

    P = { x : rho_j(x) >= 0 on J+,  rho_j(x) <= 0 on J- }

is the maximal subsemigroup with those expansion directions, and the
scale function is multiplicative on it.  This module decides which full
patterns actually occur (admissibility), computes the unique minimal
generating set of an admissible cone by layered search over the flipped
coordinate order, and runs the maximality and quasi-lattice-order
diagnostics.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from itertools import product

from . import _intlinalg
from .errors import CertificationFailed, KernelNotTrivial, NotApplicable, NotInSemigroup
from .flat_core import FlatGroupSpec, GroupElement, rho, uniscalar_kernel

_PATTERN_RE = re.compile(r"^(?:[+-]\d+)+$")


@dataclass(frozen=True)
class SignPattern:
    """Disjoint index sets J+ (expanding) and J- (contracting), 1-based."""

    j_plus: frozenset[int]
    j_minus: frozenset[int]

    def __post_init__(self):
        if self.j_plus & self.j_minus:
            raise ValueError("j_plus and j_minus must be disjoint")
        for j in self.j_plus | self.j_minus:
            if j < 1:
                raise ValueError("component indices are 1-based")

    def is_full(self, components: int) -> bool:
        return self.j_plus | self.j_minus == set(range(1, components + 1))

    def require_full(self, components: int) -> None:
        if not self.is_full(components):
            raise NotApplicable(
                f"pattern {self} does not cover all {components} components"
            )

    @classmethod
    def of(cls, j_plus=(), j_minus=()) -> "SignPattern":
        return cls(frozenset(j_plus), frozenset(j_minus))

    @classmethod
    def parse(cls, text: str) -> "SignPattern":
        """Parse strings like '+1+2-3' (signed 1-based component indices)."""
        if not _PATTERN_RE.match(text):
            raise ValueError(f"bad pattern {text!r}; expected e.g. '+1+2-3'")
        plus, minus = set(), set()
        for sign, digits in re.findall(r"([+-])(\d+)", text):
            j = int(digits)
            (plus if sign == "+" else minus).add(j)
        return cls(frozenset(plus), frozenset(minus))

    def __str__(self) -> str:
        parts = []
        for j in sorted(self.j_plus | self.j_minus):
            parts.append(f"+{j}" if j in self.j_plus else f"-{j}")
        return "".join(parts)


@dataclass(frozen=True)
class ConeSemigroup:
    """The cone of all elements respecting a sign pattern."""

    spec: FlatGroupSpec
    pattern: SignPattern

    def __post_init__(self):
        ok = set(range(1, self.spec.components + 1))
        if not (self.pattern.j_plus | self.pattern.j_minus) <= ok:
            raise ValueError("pattern indices exceed the number of components")

    def contains(self, x: GroupElement) -> bool:
        r = rho(self.spec, x)
        return all(r[j - 1] >= 0 for j in self.pattern.j_plus) and all(
            r[j - 1] <= 0 for j in self.pattern.j_minus
        )

    def flipped_rho(self, x: GroupElement) -> tuple[int, ...]:
        """rho with J- components negated; x is in the cone iff this is >= 0.

        Only defined for full patterns, where the flipped image lands in
        N^q for cone elements and the component-wise order on it is the
        divisibility order of the cone.
        """
        self.pattern.require_full(self.spec.components)
        r = rho(self.spec, x)
        return tuple(
            -r[j - 1] if j in self.pattern.j_minus else r[j - 1]
            for j in range(1, self.spec.components + 1)
        )

    def flipped_rows(self) -> tuple[GroupElement, ...]:
        self.pattern.require_full(self.spec.components)
        return tuple(
            _intlinalg.vneg(row) if (j + 1) in self.pattern.j_minus else row
            for j, row in enumerate(self.spec.weights)
        )


def contains(P: ConeSemigroup, x: GroupElement) -> bool:
    return P.contains(x)


def extension_closure(P: ConeSemigroup, z: GroupElement) -> bool:
    """Whether adjoining z keeps the semigroup scale-multiplicative.

    True iff rho_j(z) >= 0 on J+ and <= 0 on J-; components outside the
    pattern are unconstrained.
    """
    r = rho(P.spec, z)
    return all(r[j - 1] >= 0 for j in P.pattern.j_plus) and all(
        r[j - 1] <= 0 for j in P.pattern.j_minus
    )


# ---------------------------------------------------------------------------
# Admissibility


@dataclass(frozen=True)
class AdmissibilityResult:
    """Outcome of the bounded search for an indicator element.

    witness          -- element with strictly correct sign on every
                        component, or None if not found
    exact_infeasible -- True when a rational-cone certificate proves no
                        witness exists at any bound
    search_bound     -- the box radius that was searched
    """

    witness: GroupElement | None
    exact_infeasible: bool
    search_bound: int

    @property
    def admissible(self) -> bool:
        return self.witness is not None


def default_search_bound(spec: FlatGroupSpec) -> int:
    return 8 * spec.rank


def is_admissible(
    spec: FlatGroupSpec, pattern: SignPattern, search_bound: int | None = None
) -> AdmissibilityResult:
    """Search the integer box for an indicator element of the pattern.

    The pattern must be full.  A Gordan certificate (0 in the convex hull
    of the flipped weight rows) makes a negative answer exact; otherwise
    a miss only means "not found within bound".
    """
    pattern.require_full(spec.components)
    bound = default_search_bound(spec) if search_bound is None else search_bound
    P = ConeSemigroup(spec, pattern)
    flipped = P.flipped_rows()
    if _intlinalg.zero_in_convex_hull(flipped):
        return AdmissibilityResult(None, True, bound)
    for radius in range(1, bound + 1):
        for x in product(range(-radius, radius + 1), repeat=spec.rank):
            if max(abs(c) for c in x) != radius:
                continue
            if all(_intlinalg.dot(row, x) > 0 for row in flipped):
                return AdmissibilityResult(tuple(x), False, bound)
    return AdmissibilityResult(None, False, bound)


def enumerate_admissible(
    spec: FlatGroupSpec, search_bound: int | None = None
) -> list[SignPattern]:
    """All admissible full sign patterns, lexicographic on sorted J+."""
    q = spec.components
    found = []
    for bits in product((False, True), repeat=q):
        plus = frozenset(j + 1 for j in range(q) if bits[j])
        minus = frozenset(range(1, q + 1)) - plus
        pattern = SignPattern(plus, minus)
        if is_admissible(spec, pattern, search_bound).admissible:
            found.append(pattern)
    found.sort(key=lambda p: tuple(sorted(p.j_plus)))
    return found


# ---------------------------------------------------------------------------
# Minimal generating set


@dataclass(frozen=True)
class GeneratorSet:
    """The unique minimal generating set of a cone, split by sign behaviour.

    sigma_plus  -- generators with every rho_j >= 0
    sigma_minus -- generators with every rho_j <= 0
    sigma_zero  -- generators with mixed signs
    max_layer       -- largest flipped-rho layer norm among generators
    certified_layer -- every cone point up to this layer norm was shown
                       to be a sum of generators
    """

    sigma: tuple[GroupElement, ...]
    sigma_plus: tuple[GroupElement, ...]
    sigma_zero: tuple[GroupElement, ...]
    sigma_minus: tuple[GroupElement, ...]
    max_layer: int = field(default=0, compare=False)
    certified_layer: int = field(default=0, compare=False)


def _compositions(total: int, parts: int):
    """All tuples of `parts` nonnegative ints summing to `total`, lex order."""
    if parts == 1:
        yield (total,)
        return
    for head in range(total + 1):
        for tail in _compositions(total - head, parts - 1):
            yield (head,) + tail


def _layer_images(solver: _intlinalg.ImageSolver, m: int, q: int):
    """Cone points whose flipped rho has 1-norm m, as (image, point) pairs."""
    out = []
    for v in _compositions(m, q):
        x = solver.preimage(v)
        if x is not None:
            out.append((v, x))
    return out


def _dominates(v: tuple[int, ...], w: tuple[int, ...]) -> bool:
    return all(a >= b for a, b in zip(v, w))


def minimal_generators(P: ConeSemigroup, norm_bound: int = 16) -> GeneratorSet:
    """Minimal generating set of the cone by layered breadth search.

    Enumerates cone points layer by layer in the 1-norm of the flipped
    rho image up to norm_bound, keeps the minimal ones in the flipped
    component-wise order, then certifies completeness: every cone point
    with layer norm <= 2 * (max generator layer) must decompose as a sum
    of the generators found.  Raises CertificationFailed when the bound
    is too small for that certificate.
    """
    if uniscalar_kernel(P.spec):
        raise KernelNotTrivial("weight matrix has nontrivial kernel")
    adm = is_admissible(P.spec, P.pattern)
    if not adm.admissible:
        raise NotApplicable(f"pattern {P.pattern} is not admissible")
    q = P.spec.components
    solver = _intlinalg.ImageSolver(P.flipped_rows(), P.spec.rank)

    minimals: list[tuple[tuple[int, ...], GroupElement]] = []
    images: list[tuple[int, ...]] = []
    for m in range(1, norm_bound + 1):
        for v, x in _layer_images(solver, m, q):
            images.append(v)
            if not any(_dominates(v, w) for w, _ in minimals):
                minimals.append((v, x))
    if not minimals:
        raise CertificationFailed(norm_bound, "no generators found within bound")

    max_layer = max(sum(v) for v, _ in minimals)
    certify_to = 2 * max_layer
    for m in range(norm_bound + 1, certify_to + 1):
        for v, x in _layer_images(solver, m, q):
            images.append(v)
            if not any(_dominates(v, w) for w, _ in minimals):
                raise CertificationFailed(norm_bound)

    gen_images = [v for v, _ in minimals]
    decomposable: dict[tuple[int, ...], bool] = {}

    def decomposes(v: tuple[int, ...]) -> bool:
        if all(c == 0 for c in v):
            return True
        known = decomposable.get(v)
        if known is not None:
            return known
        decomposable[v] = False  # cycle guard; layers strictly decrease anyway
        ok = any(
            _dominates(v, g) and decomposes(_intlinalg.vsub(v, g)) for g in gen_images
        )
        decomposable[v] = ok
        return ok

    for v in images:
        if sum(v) <= certify_to and not decomposes(v):
            raise CertificationFailed(norm_bound)

    sigma = sorted(x for _, x in minimals)
    plus, zero, minus = [], [], []
    for x in sigma:
        r = rho(P.spec, x)
        if all(c >= 0 for c in r):
            plus.append(x)
        elif all(c <= 0 for c in r):
            minus.append(x)
        else:
            zero.append(x)
    return GeneratorSet(
        sigma=tuple(sigma),
        sigma_plus=tuple(plus),
        sigma_zero=tuple(zero),
        sigma_minus=tuple(minus),
        max_layer=max_layer,
        certified_layer=certify_to,
    )


# ---------------------------------------------------------------------------
# Maximality diagnostics


def absorption_steps(
    P: ConeSemigroup, y: GroupElement, indicator: GroupElement | None = None
) -> int:
    """Smallest n >= 0 with y + n * indicator in the cone."""
    if indicator is None:
        adm = is_admissible(P.spec, P.pattern)
        if not adm.admissible:
            raise NotApplicable(f"pattern {P.pattern} has no indicator element")
        indicator = adm.witness
    fy = P.flipped_rho(y)
    fi = P.flipped_rho(indicator)
    n = 0
    for a, b in zip(fy, fi):
        if a < 0:
            if b <= 0:
                raise NotApplicable("indicator element is not strictly expanding")
            n = max(n, (-a + b - 1) // b)  # ceil(-a / b)
    assert P.contains(tuple(c + n * d for c, d in zip(y, indicator)))
    return n


@dataclass(frozen=True)
class MaximalityReport:
    """Sample evidence that the cone is maximal among multiplicative cones."""

    samples_checked: int
    max_absorption_steps: int
    absorption_failures: tuple[GroupElement, ...]
    inverse_pair_failures: tuple[GroupElement, ...]

    @property
    def ok(self) -> bool:
        return not self.absorption_failures and not self.inverse_pair_failures


def check_maximality(P: ConeSemigroup, sample_bound: int = 4) -> MaximalityReport:
    """Exhaustively test the box ||y||_inf <= sample_bound for the two
    maximality signatures: every y is absorbed into the cone by the
    indicator element, and elements with both signs in the cone lie in
    the kernel lattice."""
    P.pattern.require_full(P.spec.components)
    adm = is_admissible(P.spec, P.pattern)
    if not adm.admissible:
        raise NotApplicable(f"pattern {P.pattern} is not admissible")
    indicator = adm.witness
    absorb_fail, inverse_fail = [], []
    max_steps = 0
    count = 0
    for y in product(range(-sample_bound, sample_bound + 1), repeat=P.spec.rank):
        count += 1
        try:
            max_steps = max(max_steps, absorption_steps(P, y, indicator))
        except (NotApplicable, AssertionError):
            absorb_fail.append(y)
        if P.contains(y) and P.contains(_intlinalg.vneg(y)):
            if any(c != 0 for c in rho(P.spec, y)):
                inverse_fail.append(y)
    return MaximalityReport(
        samples_checked=count,
        max_absorption_steps=max_steps,
        absorption_failures=tuple(absorb_fail),
        inverse_pair_failures=tuple(inverse_fail),
    )


# ---------------------------------------------------------------------------
# Quasi-lattice-order diagnostics


def minimal_common_upper_bounds(
    P: ConeSemigroup, a: GroupElement, b: GroupElement, bound: int = 8
) -> list[GroupElement]:
    """Minimal elements of {u : u - a in P and u - b in P}, in the cone
    order x <= y iff y - x in P.

    The search covers flipped-rho images up to `bound` above the
    component-wise maximum of the inputs; two or more results certify a
    quasi-lattice-order failure for the pair, a single result is the
    least upper bound.
    """
    if not (P.contains(a) and P.contains(b)):
        raise NotInSemigroup("both inputs must lie in the cone")
    if uniscalar_kernel(P.spec):
        raise KernelNotTrivial("cone order is not antisymmetric")
    solver = _intlinalg.ImageSolver(P.flipped_rows(), P.spec.rank)
    fa, fb = P.flipped_rho(a), P.flipped_rho(b)
    base = tuple(max(x, y) for x, y in zip(fa, fb))
    candidates: list[tuple[tuple[int, ...], GroupElement]] = []
    for off in product(range(bound + 1), repeat=P.spec.components):
        v = _intlinalg.vadd(base, off)
        x = solver.preimage(v)
        if x is not None:
            candidates.append((v, x))
    result = [
        x
        for v, x in candidates
        if not any(w != v and _dominates(v, w) for w, _ in candidates)
    ]
    return sorted(result)


# ---------------------------------------------------------------------------
# Scale on the cone, as exponent data


def scale_exponent_forms(
    spec: FlatGroupSpec, pattern: SignPattern
) -> tuple[tuple[int, tuple[int, ...]], ...]:
    """Exponent of each relative-scale base in the scale restricted to the
    cone: scale(x) = prod over (base, coeffs) of base ** <coeffs, x>.

    Only J+ components contribute; components sharing a base are merged.
    """
    forms: dict[int, list[int]] = {}
    for j in sorted(pattern.j_plus):
        base = spec.relative_scales[j - 1]
        acc = forms.setdefault(base, [0] * spec.rank)
        for i, c in enumerate(spec.weights[j - 1]):
            acc[i] += c
    return tuple(
        (base, tuple(coeffs)) for base, coeffs in sorted(forms.items()) if any(coeffs)
    )


def format_linear_form(coeffs: tuple[int, ...], var: str = "n") -> str:
    """Render e.g. (2, -1) as '2n1-n2'; the zero form renders as '0'."""
    parts = []
    for i, c in enumerate(coeffs, start=1):
        if c == 0:
            continue
        sign = "-" if c < 0 else ("+" if parts else "")
        mag = abs(c)
        parts.append(f"{sign}{'' if mag == 1 else mag}{var}{i}")
    return "".join(parts) or "0"


def format_scale(forms: tuple[tuple[int, tuple[int, ...]], ...]) -> str:
    if not forms:
        return "1"
    return "*".join(f"{base}^({format_linear_form(coeffs)})" for base, coeffs in forms)
