"""The seeded verification battery behind ``hypersheaf suite``.

Every check is a pure function of the seed and the size limits, and the
report contains no timings, so two runs with the same arguments produce
identical JSON.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Callable, List

from .algebra import INTEGERS, RATIONALS, CoefficientRing, integers_mod
from .engine import (
    REPORT_SCHEMA,
    check_descent,
    compare,
    default_depth,
    enumerate_covers,
    is_cohomologically_locally_connected,
    stalkwise_unit_is_quasi_iso,
)
from .sheaves import ConstantPresheaf, GodementPresheaf, GodementTower, SingularModelPresheaf, constant_sheaf
from .spaces import FinitePoset, OpenCover, all_opens, catalog, min_open, random_poset

CATALOG_SPACES = ("point", "sierpinski", "pseudocircle", "pseudo_torus", "rp2_face_poset")
SUITE_RINGS = (INTEGERS, RATIONALS, integers_mod(2), integers_mod(4))
EDGE_PROBS = (0.3, 0.4, 0.5)


@dataclass
class Check:
    group: str
    name: str
    passed: bool
    detail: str = ""

    def to_json(self) -> dict:
        return {"group": self.group, "name": self.name,
                "status": "pass" if self.passed else "fail", "detail": self.detail}


@dataclass
class SuiteReport:
    seed: int
    max_points: int
    checks: List[Check] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_json(self) -> dict:
        groups = {}
        for c in self.checks:
            g = groups.setdefault(c.group, {"pass": 0, "fail": 0})
            g["pass" if c.passed else "fail"] += 1
        return {
            "schema": REPORT_SCHEMA,
            "seed": self.seed,
            "max_points": self.max_points,
            "passed": self.passed,
            "summary": groups,
            "checks": [c.to_json() for c in self.checks],
        }


def random_spaces(seed: int, count: int, max_points: int) -> List[FinitePoset]:
    """``count`` random posets with 1 to ``max_points`` points, drawn from ``seed``."""
    rng = random.Random(seed)
    out = []
    for _ in range(count):
        n = rng.randint(1, max_points)
        p = rng.choice(EDGE_PROBS)
        out.append(random_poset(rng.randrange(2 ** 31), n, p))
    return out


def run_suite(seed: int = 0, max_points: int = 8, count: int = 10, max_covers: int = 200,
              rings: tuple[CoefficientRing, ...] = SUITE_RINGS,
              progress: Callable[[Check], None] | None = None) -> SuiteReport:
    """Comparison, stalk criterion, CLC and descent checks.

    Descent uses at most ``max_covers`` covers per space, taken in canonical
    order, with at most three pieces each.
    """
    report = SuiteReport(seed, max_points)

    def record(check: Check):
        report.checks.append(check)
        if progress is not None:
            progress(check)

    randoms = random_spaces(seed, count, max_points)

    for name in CATALOG_SPACES:
        X = catalog(name)
        for R in rings:
            r = compare(X, R)
            record(Check("compare", f"{name} over {R}", r.isomorphic,
                         f"singular {r.singular}; sheaf {r.sheaf}"))
    for X in randoms:
        r = compare(X, INTEGERS)
        record(Check("compare", f"{X.name} over Z", r.isomorphic,
                     f"singular {r.singular}; sheaf {r.sheaf}"))

    for X in [catalog(n) for n in CATALOG_SPACES] + randoms:
        bad = sorted(str(x) for x, ok in stalkwise_unit_is_quasi_iso(X).items() if not ok)
        record(Check("stalk", X.name, not bad, "failing points: " + ", ".join(bad) if bad else ""))

    for X in [catalog(n) for n in CATALOG_SPACES] + randoms:
        minimal = is_cohomologically_locally_connected(X, INTEGERS, 4, "minimal")
        detail = ""
        agree = True
        if len(X) <= 10:
            exhaustive = is_cohomologically_locally_connected(X, INTEGERS, 4, "exhaustive")
            agree = exhaustive.failures == minimal.failures
            detail = "exhaustive mode agrees" if agree else "exhaustive and minimal disagree"
        record(Check("clc", X.name, minimal.passed and agree, detail))

    small = [catalog(n) for n in ("point", "sierpinski", "pseudocircle", "discrete(2)")]
    small += [X for X in randoms if len(X) <= max_points]
    for X in small:
        covers = enumerate_covers(X.whole, 3, all_opens(X))[:max_covers]
        S = SingularModelPresheaf(X, INTEGERS)
        G = GodementPresheaf(GodementTower(constant_sheaf(X, INTEGERS), default_depth(X)))
        for label, F in (("singular", S), ("godement", G)):
            failing = [c for c in covers if not check_descent(F, c).passed]
            record(Check("descent", f"{label} on {X.name} ({len(covers)} covers)", not failing,
                         f"{len(failing)} covers fail" if failing else ""))

    D = catalog("discrete(2)")
    cover = OpenCover(D.whole, [min_open(D, x) for x in D.elements])
    v = check_descent(ConstantPresheaf(D, INTEGERS), cover)
    record(Check("descent", "constant presheaf on discrete(2) fails (negative control)",
                 not v.passed, f"cone cohomology {v.cone_cohomology}"))
    return report
