"""Certification pipeline: the origin ideal of the center, its minimal primes,
heights, coprimality of tail arrows, per-prime localisation data and the
final verdict.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Optional

from .config import RunConfig
from .contraction import (
    CANCELLATIVE,
    NON_CANCELLATIVE,
    ContractionError,
    check_assumption_B,
    contract,
    is_cancellative,
    star_arrows,
    tail_arrows,
)
from .impression import (
    Center,
    Impression,
    ImpressionError,
    build_impression,
    center,
    cycle_algebra,
    default_length_bound,
    full_corners,
    path_images,
    search_paths,
)
from .matchings import require_valid
from .monomial import (
    DEFAULT_TRUNCATION,
    DivisibilityIdeal,
    Monomial,
    MonomialModule,
    PrimalityDisagreement,
    canonical_order,
    divisibility_ideal,
    format_monomial,
    height_of_divisibility_prime,
    is_prime_divisibility_ideal,
    module_generators,
    multiply,
    normality_gaps,
)
from .quiver import DimerQuiver, Path

SCHEMA_VERSION = 1
DIM_R = 3

NONNOETHERIAN_NCCR = "NonnoetherianNCCR"
DESINGULARIZATION = "NoncommutativeDesingularization"
ASSUMPTIONS_FAIL = "AssumptionsFail"
INCONCLUSIVE = "Inconclusive"

EXIT_CODES = {NONNOETHERIAN_NCCR: 0, DESINGULARIZATION: 1, ASSUMPTIONS_FAIL: 1, INCONCLUSIVE: 2}


class NotApplicable(ValueError):
    pass


class EntryGeneratorError(RuntimeError):
    pass


def _var(imp: Impression, q) -> int:
    """Variable index of a prime given as an index or a divisibility ideal q_D."""
    if isinstance(q, DivisibilityIdeal):
        if q.g.degree != 1:
            raise ValueError("expected a prime q_D with g a single variable")
        return q.g.support()[0]
    return int(q)


def _bounds(imp: Impression, truncation, length_bound):
    return truncation or DEFAULT_TRUNCATION, length_bound or default_length_bound(imp.quiver)


# -- m_a and the origin ideal -------------------------------------------------

@dataclass(frozen=True)
class ArrowIdeal:
    arrow: int
    module: MonomialModule
    matches_divisibility_ideal: bool


def ideal_m_a(imp: Impression, a: int, truncation: int | None = None,
              length_bound: int | None = None) -> ArrowIdeal:
    """Images of cycles at t(a) whose first traversed arrow is ``a``."""
    if a in star_arrows(imp.quiver):
        raise ValueError(f"arrow {a} is contracted")
    t, ell = _bounds(imp, truncation, length_bound)
    arrow = imp.quiver.arrow(a)
    img = imp.image(a)
    s = cycle_algebra(imp, ell, t)
    elements = [multiply(img, m) for m in path_images(imp, arrow.head, arrow.tail, t, ell)
                if m.degree + img.degree <= t]
    module = MonomialModule.from_elements(elements, s)
    expected = divisibility_ideal(s, img)
    return ArrowIdeal(a, module, module.elements == expected.elements)


@dataclass(frozen=True)
class OriginIdeal:
    m0: MonomialModule
    arrow_ideals: dict[int, ArrowIdeal]
    primes: tuple[tuple[int, DivisibilityIdeal], ...]
    decomposition_verified: bool
    matches_center: bool
    truncation: int

    def prime(self, d: int) -> DivisibilityIdeal:
        return dict(self.primes)[d]

    def to_dict(self, fmt) -> dict:
        return {
            "m0_generators": [fmt(g) for g in self.m0.generators],
            "m_a": {str(a): {"generators": [fmt(g) for g in ai.module.generators],
                             "equals_divisibility_ideal": ai.matches_divisibility_ideal}
                    for a, ai in sorted(self.arrow_ideals.items())},
            "minimal_primes": [{"variable": d, "g": fmt(q.g),
                                "generators": [fmt(g) for g in q.generators.generators]}
                               for d, q in self.primes],
            "intersection_of_primes_equals_m0": self.decomposition_verified,
            "m0_equals_center_maximal_ideal": self.matches_center,
            "truncation": self.truncation,
        }


def origin_ideal(imp: Impression, truncation: int | None = None,
                 length_bound: int | None = None) -> OriginIdeal:
    t, ell = _bounds(imp, truncation, length_bound)
    tails = sorted(tail_arrows(imp.quiver))
    if not tails:
        raise NotApplicable("no arrow has a tail of indegree 1; the origin ideal pipeline does not apply")
    s = cycle_algebra(imp, ell, t)
    ideals = {a: ideal_m_a(imp, a, t, ell) for a in tails}
    elements = frozenset.intersection(*(ai.module.elements for ai in ideals.values()))
    m0 = MonomialModule.from_elements(elements, s)
    ds = sorted({d for a in tails for d in imp.image(a).support()})
    primes = tuple((d, divisibility_ideal(s, imp.var(d))) for d in ds)
    meet = frozenset.intersection(*(q.elements for _, q in primes))
    r = center(imp, ell, t)
    return OriginIdeal(m0, ideals, primes, meet == m0.elements,
                       r.maximal.elements == m0.elements, t)


# -- heights ------------------------------------------------------------------

@dataclass(frozen=True)
class HeightsReport:
    prime_heights: dict[int, int]
    primes_pass_oracle: dict[int, bool]
    ht_S_m0: Optional[int]
    ght_m0: Optional[int]
    ht_R_m0: Optional[int]
    normality_gaps: tuple[Monomial, ...]

    def to_dict(self, fmt) -> dict:
        return {
            "ht_S_q_D": {str(d): h for d, h in sorted(self.prime_heights.items())},
            "q_D_prime_by_oracle": {str(d): ok for d, ok in sorted(self.primes_pass_oracle.items())},
            "ht_S_m0": self.ht_S_m0,
            "ght_m0": self.ght_m0,
            "ht_R_m0": self.ht_R_m0,
            "ht_R_m0_source": "theoretical constant dim R = 3, not computed",
            "ght_m0_source": "ht_S of a minimal prime, via the depiction argument",
            "S_normality_gaps_at_truncation": [fmt(m) for m in self.normality_gaps],
        }


def heights_report(imp: Impression, oi: OriginIdeal) -> HeightsReport:
    if not oi.primes:
        return HeightsReport({}, {}, None, None, None, ())
    s = oi.primes[0][1].ambient
    heights, prime_ok = {}, {}
    for d, q in oi.primes:
        heights[d] = height_of_divisibility_prime(s, q)
        try:
            prime_ok[d] = is_prime_divisibility_ideal(q)[0]
        except PrimalityDisagreement:
            prime_ok[d] = False
    h = min(heights.values())
    return HeightsReport(heights, prime_ok, h, h, DIM_R, tuple(normality_gaps(s)))


# -- tail arrows and per-prime data --------------------------------------------

def pairwise_coprime(imp: Impression, tails=None) -> tuple[bool, Optional[tuple[int, int]]]:
    tails = sorted(tail_arrows(imp.quiver) if tails is None else tails)
    for i, a in enumerate(tails):
        for b in tails[i + 1:]:
            if set(imp.image(a).support()) & set(imp.image(b).support()):
                return False, (a, b)
    return True, None


def marked_tail_arrows(imp: Impression, q) -> list[int]:
    """Tail arrows whose image is divisible by x_D."""
    d = _var(imp, q)
    return sorted(a for a in tail_arrows(imp.quiver) if imp.image(a)[d])


def epsilon_D(imp: Impression, q) -> frozenset[int]:
    excluded = {imp.quiver.arrow(a).tail for a in marked_tail_arrows(imp, q)}
    return frozenset(v for v in imp.quiver.vertices if v not in excluded)


def _delta_of(imp: Impression, a: int) -> int:
    """The contracted arrow entering the tail of tail-arrow ``a``."""
    (delta,) = imp.quiver.in_arrows[imp.quiver.arrow(a).tail]
    return delta.id


def vertex_invertible(imp: Impression, q, p: Path) -> bool:
    d = _var(imp, q)
    img = Monomial.unit(imp.nvars)
    for a in p.arrows:
        img = multiply(img, imp.image(a))
    if img[d]:
        return False
    if p.is_trivial:
        return True
    leftmost = p.arrows[0]
    return not any(_delta_of(imp, a) == leftmost for a in marked_tail_arrows(imp, q))


def simple_count(imp: Impression, q) -> int:
    return 1 + len(marked_tail_arrows(imp, q))


def _avoiding_walk(imp: Impression, d: int, i: int, j: int, length_bound: int) -> Optional[tuple[int, ...]]:
    """Shortest walk i -> j using only arrows whose image is not divisible by x_d."""
    q = imp.quiver
    allowed = {a.id for a in q.arrows if not imp.image(a.id)[d]}
    parent = {i: None}
    todo = deque([(i, 0)])
    while todo:
        v, n = todo.popleft()
        if v == j:
            break
        if n >= length_bound:
            continue
        for a in q.out_arrows[v]:
            if a.id in allowed and a.head not in parent:
                parent[a.head] = (v, a.id)
                todo.append((a.head, n + 1))
    if j not in parent:
        return None
    walk = []
    v = j
    while parent[v] is not None:
        v, a = parent[v]
        walk.append(a)
    return tuple(reversed(walk))


def entry_generator(imp: Impression, q, i: int, j: int, length_bound: int | None = None) -> Path:
    """A single path generating e_j A_q e_i over the localised cycle algebra."""
    d = _var(imp, q)
    if i not in epsilon_D(imp, q):
        raise ValueError(f"vertex {i} is the tail of a tail arrow marked by x{d}")
    ell = length_bound or default_length_bound(imp.quiver)
    if i == j:
        return Path.trivial(i)
    marked = {imp.quiver.arrow(a).tail: a for a in marked_tail_arrows(imp, q)}
    if j in marked:
        delta = imp.quiver.arrow(_delta_of(imp, marked[j]))
        walk = _avoiding_walk(imp, d, i, delta.tail, ell)
        if walk is None:
            raise EntryGeneratorError(f"no x{d}-avoiding path from {i} to {delta.tail}")
        return imp.quiver.walk_path(walk + (delta.id,), i)
    walk = _avoiding_walk(imp, d, i, j, ell)
    if walk is None:
        raise EntryGeneratorError(f"no x{d}-avoiding path from {i} to {j}")
    return imp.quiver.walk_path(walk, i)


def entry_generator_admissible(imp: Impression, q, j: int, p: Path) -> bool:
    """Re-check an entry generator: vertex invertible, or a contracted arrow after one."""
    d = _var(imp, q)
    marked = {imp.quiver.arrow(a).tail: a for a in marked_tail_arrows(imp, q)}
    if j not in marked:
        return vertex_invertible(imp, d, p)
    if p.is_trivial or p.arrows[0] != _delta_of(imp, marked[j]):
        return False
    rest = Path(p.tail, imp.quiver.arrow(p.arrows[0]).tail, p.arrows[1:])
    return vertex_invertible(imp, d, rest) and not vertex_invertible(imp, d, p)


# -- the principal check ------------------------------------------------------

@dataclass(frozen=True)
class PrincipalFactor:
    """``g * image(tb) == sigma * image(tp)`` for a cycle s = p a with image g."""
    g: Monomial
    s: tuple[int, ...]
    a: tuple[int, ...]
    p: tuple[int, ...]
    b: tuple[int, ...]
    t: tuple[int, ...]
    image_tb: Monomial
    image_tp: Monomial
    ok: bool

    def to_dict(self, fmt) -> dict:
        return {"g": fmt(self.g), "cycle": list(self.s), "a": list(self.a), "p": list(self.p),
                "b": list(self.b), "t": list(self.t), "image_tb": fmt(self.image_tb),
                "image_tp": fmt(self.image_tp), "identity_holds": self.ok,
                "order": "traversal"}


def _walk_image(imp: Impression, walk) -> Monomial:
    out = Monomial.unit(imp.nvars)
    for a in walk:
        out = multiply(out, imp.image(a))
    return out


def _split_cycle(imp: Impression, d: int, walk: tuple[int, ...]):
    """Rotate a cycle so that it starts with the factor ``a`` and return (a, p)."""
    star, tails = star_arrows(imp.quiver), tail_arrows(imp.quiver)
    n = len(walk)
    for k in range(n):
        w = walk[k:] + walk[:k]
        if w[0] not in star and w[0] not in tails and imp.image(w[0])[d]:
            return w[:1], w[1:]
        if n >= 2 and w[0] in star and w[1] in tails and imp.image(w[1])[d]:
            return w[:2], w[2:]
    return None


def _face_remainder(imp: Impression, a: tuple[int, ...]) -> Optional[tuple[int, ...]]:
    for f in imp.quiver.faces:
        b = f.boundary
        n = len(b)
        for k in range(n):
            w = b[k:] + b[:k]
            if w[:len(a)] == a:
                return w[len(a):]
    return None


def principal_check(imp: Impression, q: DivisibilityIdeal, truncation: int | None = None,
                    length_bound: int | None = None) -> list[PrincipalFactor]:
    t_bound, ell = _bounds(imp, truncation, length_bound)
    d = _var(imp, q)
    cycles = {}
    for v in imp.quiver.vertices:
        search = search_paths(imp.quiver, imp.arrow_images, v, t_bound, ell)
        for img, walk in search.found.get(v, {}).items():
            cycles.setdefault(img, walk)
    out = []
    for g in q.generators.generators:
        walk = cycles.get(g)
        split = _split_cycle(imp, d, walk) if walk else None
        if split is None:
            out.append(PrincipalFactor(g, walk or (), (), (), (), (), g, g, False))
            continue
        a, p = split
        b = _face_remainder(imp, a)
        tail_a = imp.quiver.arrow(a[0]).tail
        head_a = imp.quiver.arrow(a[-1]).head
        t = _avoiding_walk(imp, d, tail_a, head_a, ell)
        if b is None or t is None:
            out.append(PrincipalFactor(g, walk, a, p, b or (), t or (), g, g, False))
            continue
        itb = _walk_image(imp, b + t)
        itp = _walk_image(imp, p + t)
        ok = multiply(g, itb) == multiply(imp.sigma, itp) and not itb[d]
        # both products must be genuine cycles
        imp.quiver.walk_path(b + t)
        imp.quiver.walk_path(p + t)
        out.append(PrincipalFactor(g, walk, a, p, b, t, itb, itp, ok))
    return out


# -- tiled presentation -------------------------------------------------------

@dataclass(frozen=True)
class TiledEntry:
    row: int
    col: int
    shape: str
    generators: tuple[Monomial, ...]
    closed_under_S: bool

    def to_dict(self, fmt) -> dict:
        return {"row": self.row, "col": self.col, "shape": self.shape,
                "generators": [fmt(g) for g in self.generators], "closed_under_S": self.closed_under_S}


def tiled_presentation(imp: Impression, truncation: int | None = None,
                       length_bound: int | None = None) -> list[list[TiledEntry]]:
    """Entry (j, i) lists S-module generators of the images of paths i -> j."""
    t, ell = _bounds(imp, truncation, length_bound)
    s = cycle_algebra(imp, ell, t)
    n = imp.quiver.num_vertices
    rows = []
    for j in range(n):
        row = []
        for i in range(n):
            images = path_images(imp, i, j, t, ell)
            if i == j and images == s.elements:
                shape, elems = "S", images
            elif i == j:
                shape, elems = "k+M", frozenset(m for m in images if not m.is_unit)
            else:
                shape, elems = "module", images
            gens = tuple(canonical_order(module_generators(elems, s.elements)))
            closed = MonomialModule.from_generators(gens, s).elements == elems
            row.append(TiledEntry(j, i, shape, (Monomial.unit(imp.nvars),) if shape == "S" else gens, closed))
        rows.append(row)
    return rows


# -- certification ------------------------------------------------------------

@dataclass(frozen=True)
class PrimeData:
    variable: int
    epsilon: frozenset[int]
    simple_count: int
    entry_generators: dict[tuple[int, int], Path]
    entries_vertex_invertible: bool
    principal: list[PrincipalFactor]

    def to_dict(self, fmt) -> dict:
        return {
            "variable": self.variable,
            "epsilon_D": sorted(self.epsilon),
            "simple_count": self.simple_count,
            "entry_generators": [{"from": i, "to": j, "path": list(p.arrows), "localized_at": f"q_{self.variable}"}
                                 for (i, j), p in sorted(self.entry_generators.items())],
            "entry_generators_vertex_invertible": self.entries_vertex_invertible,
            "principal_check": [f.to_dict(fmt) for f in self.principal],
            "principal_check_passes": all(f.ok for f in self.principal),
        }


@dataclass
class CertificationReport:
    verdict: str
    reason: str
    bounds: dict
    assumption_A: str = "unknown"
    assumption_B: Optional[bool] = None
    star_arrows: tuple[int, ...] = ()
    tail_arrows: tuple[int, ...] = ()
    target_cancellativity: Optional[dict] = None
    source_cancellativity: Optional[dict] = None
    impression: Optional[Impression] = None
    cycle_algebra: tuple[Monomial, ...] = ()
    center: Optional[Center] = None
    origin: Optional[OriginIdeal] = None
    heights: Optional[HeightsReport] = None
    coprime: Optional[bool] = None
    coprime_failure: Optional[tuple[int, int]] = None
    primes: list[PrimeData] = field(default_factory=list)
    checks: dict[str, bool] = field(default_factory=dict)

    @property
    def exit_code(self) -> int:
        return EXIT_CODES[self.verdict]

    def to_dict(self, aliases=None) -> dict:
        fmt: Callable = lambda m: format_monomial(m, aliases)
        return {
            "schema_version": SCHEMA_VERSION,
            "verdict": self.verdict,
            "reason": self.reason,
            "bounds": self.bounds,
            "assumption_A": self.assumption_A,
            "assumption_B": self.assumption_B,
            "nonnoetherian_evidence": {
                "contracted_arrows": list(self.star_arrows),
                "cancellativity_of_source": self.source_cancellativity,
            },
            "tail_arrows": list(self.tail_arrows),
            "target_cancellativity": self.target_cancellativity,
            "impression": self.impression.to_dict(fmt) if self.impression else None,
            "cycle_algebra_generators": [fmt(g) for g in self.cycle_algebra],
            "center": self.center.to_dict(fmt) if self.center else None,
            "origin_ideal": self.origin.to_dict(fmt) if self.origin else None,
            "heights": self.heights.to_dict(fmt) if self.heights else None,
            "tail_arrows_pairwise_coprime": self.coprime,
            "coprime_failure": list(self.coprime_failure) if self.coprime_failure else None,
            "primes": [p.to_dict(fmt) for p in self.primes],
            "consistency_checks": dict(sorted(self.checks.items())),
            "theoretical_constants": {"dim_R": DIM_R, "gldim_A_q": 1,
                                      "note": "cited, not computed"},
        }


def certify(q: DimerQuiver, config: RunConfig | None = None) -> CertificationReport:
    require_valid(q)
    cfg = (config or RunConfig()).resolved(q)
    t, ell = cfg.truncation, cfg.cycle_bound
    report = CertificationReport(ASSUMPTIONS_FAIL, "", cfg.bounds())
    report.star_arrows = tuple(sorted(star_arrows(q)))
    report.tail_arrows = tuple(sorted(tail_arrows(q)))
    report.assumption_B = check_assumption_B(q)
    if not report.star_arrows:
        report.reason = "already cancellative / Q1* empty"
        return report
    if not report.assumption_B:
        report.reason = "assumption B fails: an arrow has head and tail of indegree 1"
        return report
    try:
        c = contract(q)
    except ContractionError as exc:
        report.assumption_A = "fails"
        report.reason = f"contraction invalid: {exc}"
        return report
    target_verdict = is_cancellative(c.target, cfg.path_bound, cfg.rewrite_bound)
    report.target_cancellativity = target_verdict.to_dict()
    report.assumption_A = {CANCELLATIVE: "holds", NON_CANCELLATIVE: "fails"}.get(target_verdict.kind, "unknown")
    if report.assumption_A == "fails":
        report.reason = "assumption A fails: contracted quiver is not cancellative"
        return report
    try:
        imp = build_impression(c)
    except ImpressionError as exc:
        report.reason = f"impression undefined: {exc}"
        return report
    report.impression = imp
    source_verdict = is_cancellative(q, cfg.path_bound, cfg.rewrite_bound)
    report.source_cancellativity = source_verdict.to_dict()

    checks = report.checks
    try:
        s = cycle_algebra(imp, ell, t)
        checks["contracted_corners_agree"] = True
    except ImpressionError:
        checks["contracted_corners_agree"] = False
        report.verdict, report.reason = INCONCLUSIVE, "corner rings of the contracted quiver disagree"
        return report
    report.cycle_algebra = s.generators
    checks["cycle_algebra_saturated"] = s.is_saturated()
    checks["full_corners_at_indegree_ge_2"] = all(full_corners(imp, ell, t).values())
    r = center(imp, ell, t)
    report.center = r
    checks["center_maximal_ideal_is_S_ideal"] = r.is_ideal_of_S
    checks["length_bound_not_binding"] = not r.length_binding

    oi = origin_ideal(imp, t, ell)
    report.origin = oi
    checks["m_a_equals_divisibility_ideal"] = all(ai.matches_divisibility_ideal for ai in oi.arrow_ideals.values())
    checks["primes_intersect_to_m0"] = oi.decomposition_verified
    checks["m0_equals_center_maximal_ideal"] = oi.matches_center
    checks["m0_contained_in_each_prime"] = all(oi.m0.elements <= p.elements for _, p in oi.primes)
    report.heights = heights_report(imp, oi)
    checks["primes_pass_oracle"] = all(report.heights.primes_pass_oracle.values())
    checks["prime_heights_are_1"] = all(h == 1 for h in report.heights.prime_heights.values())
    report.coprime, report.coprime_failure = pairwise_coprime(imp)

    entries_ok = True
    for d, prime in oi.primes:
        eps = epsilon_D(imp, d)
        gens = {}
        for i in sorted(eps):
            for j in q.vertices:
                try:
                    gens[(i, j)] = entry_generator(imp, d, i, j, ell)
                except EntryGeneratorError:
                    entries_ok = False
        invertible = all(entry_generator_admissible(imp, d, j, p) for (_, j), p in gens.items())
        report.primes.append(PrimeData(d, eps, simple_count(imp, d), gens, invertible,
                                       principal_check(imp, prime, t, ell)))
    checks["entry_generators_found"] = entries_ok
    checks["entry_generators_vertex_invertible"] = all(p.entries_vertex_invertible for p in report.primes)

    # the principal check is reported but does not gate the verdict
    gating = {k: v for k, v in checks.items()}
    if source_verdict.kind != NON_CANCELLATIVE:
        gating["source_non_cancellative"] = False
        checks["source_non_cancellative"] = False
    if report.assumption_A == "unknown":
        report.verdict = INCONCLUSIVE
        report.reason = "cancellativity of the contracted quiver undecided within bounds"
    elif not all(gating.values()):
        report.verdict = INCONCLUSIVE
        failed = sorted(k for k, v in gating.items() if not v)
        report.reason = "consistency checks failed at the given bounds: " + ", ".join(failed)
    elif report.coprime:
        report.verdict = NONNOETHERIAN_NCCR
        report.reason = "assumptions A and B hold, Q1* nonempty, tail arrows pairwise coprime"
    else:
        report.verdict = DESINGULARIZATION
        report.reason = "assumptions A and B hold; tail arrows not pairwise coprime"
    return report
