"""Ray realizations of contextuality hypergraphs and their Born-rule statistics.

Two numeric backends share one :class:`Ray` type.  The exact backend keeps
amplitudes as Gaussian rationals and never normalizes: a ray is an
unnormalized vector together with its squared norm, so inner products,
orthogonality and Born probabilities stay radical-free.  The float backend
stores unit complex vectors and compares against a tolerance.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np

from .hypergraph import KSHypergraph, MeasurementEvent

DEFAULT_TOL = 1e-10


@dataclass(frozen=True)
class GaussianRational:
    re: Fraction
    im: Fraction = Fraction(0)

    def __post_init__(self) -> None:
        object.__setattr__(self, "re", Fraction(self.re))
        object.__setattr__(self, "im", Fraction(self.im))

    def __add__(self, other: "GaussianRational") -> "GaussianRational":
        return GaussianRational(self.re + other.re, self.im + other.im)

    def __sub__(self, other: "GaussianRational") -> "GaussianRational":
        return GaussianRational(self.re - other.re, self.im - other.im)

    def __mul__(self, other: "GaussianRational") -> "GaussianRational":
        return GaussianRational(
            self.re * other.re - self.im * other.im, self.re * other.im + self.im * other.re
        )

    def __truediv__(self, other: "GaussianRational") -> "GaussianRational":
        den = other.abs2()
        num = self * other.conjugate()
        return GaussianRational(num.re / den, num.im / den)

    def __neg__(self) -> "GaussianRational":
        return GaussianRational(-self.re, -self.im)

    def __bool__(self) -> bool:
        return bool(self.re) or bool(self.im)

    def conjugate(self) -> "GaussianRational":
        return GaussianRational(self.re, -self.im)

    def abs2(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    def __complex__(self) -> complex:
        return complex(float(self.re), float(self.im))

    def __str__(self) -> str:
        if not self.im:
            return str(self.re)
        if not self.re:
            return f"{self.im}i"
        sign = "+" if self.im > 0 else "-"
        return f"{self.re}{sign}{abs(self.im)}i"


_ZERO = GaussianRational(Fraction(0))
_ONE = GaussianRational(Fraction(1))


def parse_complex(text: str) -> GaussianRational:
    """Parse ``"a/b+c/di"`` style literals: ``"1"``, ``"-1/2"``, ``"i"``, ``"1/2-1/3i"``."""
    s = text.replace(" ", "")
    try:
        if not s.endswith("i"):
            return GaussianRational(Fraction(s))
        body = s[:-1]
        split = max(body.rfind("+"), body.rfind("-"))
        if split <= 0:
            re_text, im_text = "", body
        else:
            re_text, im_text = body[:split], body[split:]
        if im_text in ("", "+", "-"):
            im_text += "1"
        return GaussianRational(Fraction(re_text) if re_text else Fraction(0), Fraction(im_text))
    except (ValueError, ZeroDivisionError):
        raise ValueError(f"cannot parse complex rational {text!r}") from None


@dataclass(frozen=True)
class Ray:
    """A ray in C^d.

    ``amplitudes`` is a tuple of :class:`GaussianRational` (exact backend,
    unnormalized) or a unit-norm complex numpy vector (float backend).
    """

    amplitudes: tuple | np.ndarray
    exact: bool
    norm2: Fraction | float = field(default=None)

    @classmethod
    def from_exact(cls, amplitudes: Sequence) -> "Ray":
        amps = tuple(a if isinstance(a, GaussianRational) else _as_gaussian(a) for a in amplitudes)
        n2 = sum((a.abs2() for a in amps), Fraction(0))
        if n2 == 0:
            raise ValueError("a ray cannot be the zero vector")
        return cls(amps, True, n2)

    @classmethod
    def from_float(cls, amplitudes: Sequence[complex]) -> "Ray":
        v = np.asarray(amplitudes, dtype=complex)
        n = float(np.linalg.norm(v))
        if n == 0:
            raise ValueError("a ray cannot be the zero vector")
        v = v / n
        v.setflags(write=False)
        return cls(v, False, 1.0)

    @property
    def dimension(self) -> int:
        return len(self.amplitudes)

    def as_float(self) -> "Ray":
        if not self.exact:
            return self
        return Ray.from_float([complex(a) for a in self.amplitudes])

    def vector(self) -> np.ndarray:
        """Unit-norm complex vector."""
        if self.exact:
            return self.as_float().amplitudes
        return self.amplitudes

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Ray) or other.exact != self.exact:
            return NotImplemented
        if self.exact:
            return self.amplitudes == other.amplitudes
        return bool(np.array_equal(self.amplitudes, other.amplitudes))

    def __hash__(self) -> int:
        if self.exact:
            return hash(self.amplitudes)
        return hash(self.amplitudes.tobytes())


def _as_gaussian(x) -> GaussianRational:
    if isinstance(x, str):
        return parse_complex(x)
    if isinstance(x, (int, Fraction)):
        return GaussianRational(Fraction(x))
    raise TypeError(f"exact amplitudes must be rationals or strings, got {x!r}")


def _exact_inner(a: Ray, b: Ray) -> GaussianRational:
    """<a|b> on unnormalized exact vectors."""
    total = _ZERO
    for x, y in zip(a.amplitudes, b.amplitudes):
        if x and y:
            total = total + x.conjugate() * y
    return total


def overlap(a: Ray, b: Ray) -> Fraction | float:
    """|<a|b>|^2 for the normalized rays; exact when both rays are exact."""
    if a.dimension != b.dimension:
        raise ValueError(f"dimension mismatch: {a.dimension} vs {b.dimension}")
    if a.exact and b.exact:
        return _exact_inner(a, b).abs2() / (a.norm2 * b.norm2)
    return float(abs(np.vdot(a.vector(), b.vector())) ** 2)


def born_probability(state: Ray, effect: Ray) -> Fraction | float:
    """Probability of the rank-1 effect |effect><effect| on the pure state |state>."""
    return overlap(effect, state)


@dataclass(frozen=True)
class RayRealization:
    rays: Mapping[int, Ray]
    dimension: int
    event_rays: Mapping[MeasurementEvent, Ray] | None = None

    @property
    def exact(self) -> bool:
        return all(r.exact for r in self.rays.values())


@dataclass
class ValidationReport:
    orthogonality_failures: list[tuple[str, float]] = field(default_factory=list)
    completeness_failures: list[tuple[str, float]] = field(default_factory=list)
    equivalence_failures: list[tuple[str, float]] = field(default_factory=list)

    @property
    def valid(self) -> bool:
        return not (self.orthogonality_failures or self.completeness_failures or self.equivalence_failures)


def realization_from_events(
    h: KSHypergraph, event_rays: Mapping[MeasurementEvent, Ray], dimension: int
) -> RayRealization:
    """Assign each node the ray of the first event (measurement-major order) in its class."""
    rays: dict[int, Ray] = {}
    for i, ctx in enumerate(h.contexts):
        for k, v in enumerate(ctx):
            ev = h.event_of(i, k)
            if ev not in event_rays:
                raise ValueError(f"no ray given for event {ev}")
            rays.setdefault(v, event_rays[ev])
    return RayRealization(rays, dimension, dict(event_rays))


def _deviation(value: Fraction | float) -> float:
    return float(abs(value))


def validate_realization(h: KSHypergraph, r: RayRealization, tol: float = DEFAULT_TOL) -> ValidationReport:
    """Check orthogonality within contexts, context size = dimension, norms and shared rays.

    Exact rays are checked with zero tolerance.  Failures are reported as
    ``(location, deviation)`` pairs.
    """
    missing = [v for v in h.nodes if v not in r.rays]
    if missing:
        raise ValueError(f"no ray for nodes {missing}")
    report = ValidationReport()

    for v in h.nodes:
        ray = r.rays[v]
        if ray.dimension != r.dimension:
            report.completeness_failures.append((f"node {v} has dimension {ray.dimension}", float(abs(ray.dimension - r.dimension))))
        elif not ray.exact:
            dev = abs(float(np.linalg.norm(ray.amplitudes)) - 1.0)
            if dev > tol:
                report.completeness_failures.append((f"node {v} is not unit norm", dev))

    for i, ctx in enumerate(h.contexts, start=1):
        if len(ctx) != r.dimension:
            report.completeness_failures.append(
                (f"context {i} has {len(ctx)} rays in dimension {r.dimension}", float(abs(len(ctx) - r.dimension)))
            )
        for a_pos in range(len(ctx)):
            for b_pos in range(a_pos + 1, len(ctx)):
                a, b = r.rays[ctx[a_pos]], r.rays[ctx[b_pos]]
                if a.dimension != b.dimension:
                    continue
                ov = overlap(a, b)
                exact = a.exact and b.exact
                if (ov != 0) if exact else (ov > tol):
                    report.orthogonality_failures.append(
                        (f"context {i}: nodes {ctx[a_pos]} and {ctx[b_pos]}", _deviation(ov))
                    )

    if r.event_rays is not None:
        for i, ctx in enumerate(h.contexts):
            for k, v in enumerate(ctx):
                ev = h.event_of(i, k)
                ray = r.event_rays.get(ev)
                if ray is None:
                    report.equivalence_failures.append((f"{ev} has no ray", 1.0))
                    continue
                node_ray = r.rays[v]
                if ray.dimension != node_ray.dimension:
                    report.equivalence_failures.append((f"{ev} vs node {v}: dimension mismatch", 1.0))
                    continue
                dev = 1 - overlap(ray, node_ray)
                exact = ray.exact and node_ray.exact
                if (dev != 0) if exact else (dev > tol):
                    report.equivalence_failures.append((f"{ev} differs from the ray of node {v}", _deviation(dev)))
    return report


def context_statistics(h: KSHypergraph, r: RayRealization) -> list[list]:
    """p(k|M_i, P_{i,k}) with P_{i,k} the pure state of the k-th ray of context i."""
    return [[born_probability(r.rays[v], r.rays[v]) for v in ctx] for ctx in h.contexts]


def ideal_quantum_A(h: KSHypergraph, r: RayRealization, tol: float = DEFAULT_TOL):
    """A for noiseless preparations and measurements: rho_{i,k} = E_{k|M_i} = the k-th projector."""
    from .polytope import evaluate_A

    report = validate_realization(h, r, tol)
    if not report.valid:
        raise ValueError(f"invalid realization: {report}")
    return evaluate_A(context_statistics(h, r), h)


def complete_basis(rays: Sequence[Ray], d: int, tol: float = DEFAULT_TOL) -> list[Ray]:
    """Extend mutually orthogonal rays to an orthogonal basis of C^d.

    Each step projects every standard basis vector onto the orthogonal
    complement of the rays so far and keeps the residual of largest norm,
    lowest index on ties.  Exact input gives exact (unnormalized) output.
    """
    rays = list(rays)
    if len(rays) > d:
        raise ValueError(f"{len(rays)} rays cannot be orthogonal in dimension {d}")
    for ray in rays:
        if ray.dimension != d:
            raise ValueError(f"ray of dimension {ray.dimension} given for d = {d}")
    for a in range(len(rays)):
        for b in range(a + 1, len(rays)):
            ov = overlap(rays[a], rays[b])
            exact = rays[a].exact and rays[b].exact
            if (ov != 0) if exact else (ov > tol):
                raise ValueError(f"input rays {a} and {b} are not orthogonal (overlap {float(ov):.3g})")

    if all(r.exact for r in rays):
        return _complete_exact(rays, d)
    return _complete_float(rays, d, tol)


def _complete_exact(rays: list[Ray], d: int) -> list[Ray]:
    basis = list(rays)
    added = []
    while len(basis) < d:
        best = None
        best_norm = Fraction(0)
        for j in range(d):
            v = [_ONE if i == j else _ZERO for i in range(d)]
            for q in basis:
                # v -= (<q|e_j> / <q|q>) q ; <q|e_j> = conj(q_j)
                coef = q.amplitudes[j].conjugate()
                if not coef:
                    continue
                scale = coef / GaussianRational(q.norm2)
                v = [x - scale * y for x, y in zip(v, q.amplitudes)]
            n2 = sum((x.abs2() for x in v), Fraction(0))
            if n2 > best_norm:
                best, best_norm = v, n2
        ray = Ray.from_exact(best)
        basis.append(ray)
        added.append(ray)
    return added


def _complete_float(rays: list[Ray], d: int, tol: float) -> list[Ray]:
    basis = [r.vector() for r in rays]
    added = []
    while len(basis) < d:
        best = None
        best_norm = 0.0
        for j in range(d):
            v = np.zeros(d, dtype=complex)
            v[j] = 1.0
            for q in basis:
                v = v - np.vdot(q, v) * q
            n = float(np.linalg.norm(v))
            if n > best_norm + tol:
                best, best_norm = v, n
        ray = Ray.from_float(best)
        basis.append(ray.amplitudes)
        added.append(ray)
    return added
