"""Family transformations: down-shift compression, symmetrization, and
the link-equality partition with its auxiliary pattern family.

All operations are pure functions on immutable :class:`SetFamily`
values.  The two workhorse guarantees, proven by the accompanying test
suite rather than assumed, are:

* ``downset_compress`` preserves family size, lands on a down-set, and
  never increases any trace;
* ``symmetrize`` preserves the no-big-trace property "no a-set carries
  a trace of size >= b" on down-sets whenever 3 * 2^(a-2) < b.
"""

from __future__ import annotations

from .setcore import (
    FamilyError,
    PartitionStructure,
    SetFamily,
    elements_of,
    is_downset,
    link,
)


def downshift(fam: SetFamily, i: int) -> SetFamily:
    """Compress at element i: each member F containing i is replaced by
    F - {i} unless F - {i} already belongs to the family.

    Preserves family size exactly; never increases |trace(., Y)| for any Y.
    """
    if not 1 <= i <= fam.n:
        raise FamilyError(f"element {i} outside ground set [1..{fam.n}]")
    bit = 1 << (i - 1)
    out = []
    for m in fam.members:
        if m & bit and (m ^ bit) not in fam:
            out.append(m ^ bit)
        else:
            out.append(m)
    return SetFamily.from_masks(fam.n, out)


def downset_compress(fam: SetFamily) -> SetFamily:
    """Iterate downshift over i = 1..n until a full pass changes nothing.

    Terminates because the total member size strictly drops on every
    effective shift; the fixpoint is a down-set of the same size.
    """
    cur = fam
    while True:
        changed = False
        for i in range(1, fam.n + 1):
            nxt = downshift(cur, i)
            if nxt.members != cur.members:
                cur = nxt
                changed = True
        if not changed:
            return cur


def symmetrize(fam: SetFamily, x: int, y: int) -> SetFamily:
    """Replace the y-side of a down-set by a copy of the x-side:
    drop every member containing y, then add {y} | G for each G in the
    link of x among y-avoiders.

    The result is again a down-set of size |fam(no y)| + |fam(x, no y)|.
    """
    if x == y:
        raise FamilyError("symmetrize needs two distinct elements")
    if not (1 <= x <= fam.n and 1 <= y <= fam.n):
        raise FamilyError(f"elements {x},{y} outside ground set [1..{fam.n}]")
    if not is_downset(fam):
        raise FamilyError("symmetrize requires a down-set")
    bx, by = 1 << (x - 1), 1 << (y - 1)
    kept = [m for m in fam.members if not m & by]
    grafted = [(m ^ bx) | by for m in fam.members if m & bx and not m & by]
    return SetFamily.from_masks(fam.n, kept + grafted)


def symmetrize_if_profitable(fam: SetFamily, x: int, y: int) -> SetFamily:
    """Symmetrize with roles oriented so the family never shrinks.

    Precondition: ``fam`` is a down-set and no member contains both x
    and y.  Afterwards link(result, x) == link(result, y) and
    |result| >= |fam|.
    """
    if x == y:
        raise FamilyError("symmetrize needs two distinct elements")
    bx, by = 1 << (x - 1), 1 << (y - 1)
    both = bx | by
    for m in fam.members:
        if m & both == both:
            raise FamilyError(
                f"member {set(elements_of(m))} contains both {x} and {y}; "
                "symmetrization would not preserve traces"
            )
    if len(link(fam, x)) >= len(link(fam, y)):
        return symmetrize(fam, x, y)
    return symmetrize(fam, y, x)


def partition_classes(fam: SetFamily) -> PartitionStructure:
    """Partition [n] into classes of the equivalence link(x) == link(y),
    with the family of class-incidence patterns on ground set [r].

    Classes are ordered by size descending, then by smallest element.
    """
    if not is_downset(fam):
        raise FamilyError("partition_classes requires a down-set")
    n = fam.n
    links = [frozenset(link(fam, i).members) for i in range(1, n + 1)]
    class_of: dict[frozenset, int] = {}
    masks: list[int] = []
    for b, lk in enumerate(links):
        if lk in class_of:
            masks[class_of[lk]] |= 1 << b
        else:
            class_of[lk] = len(masks)
            masks.append(1 << b)
    masks.sort(key=lambda z: (-z.bit_count(), z & -z))
    r = len(masks)
    patterns = set()
    for m in fam.members:
        pat = 0
        for ci, z in enumerate(masks):
            if m & z:
                pat |= 1 << ci
        patterns.add(pat)
    return PartitionStructure(tuple(masks), SetFamily.from_masks(max(r, 1), patterns))


def aux_triples_linear(ps: PartitionStructure) -> bool:
    """True iff every two distinct 3-sets in the pattern family meet in
    at most one class."""
    triples = [m for m in ps.aux.members if m.bit_count() == 3]
    for i, a in enumerate(triples):
        for b in triples[i + 1 :]:
            if (a & b).bit_count() > 1:
                return False
    return True
