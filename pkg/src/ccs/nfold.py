"""Block-structured integer programs and a desk-scale feasibility solver.

A program with N bricks has the constraint matrix

    [ A_1  A_2 ... A_N ]
    [ B_1              ]
    [      B_2         ]
    [           ...    ]
    [              B_N ]

with r rows shared by all bricks (top blocks A_i, each r x t) and s rows
private to each brick (diagonal blocks B_i, each s x t). The right-hand
side stacks the r shared entries first, then the s entries of each brick
in brick order. Variables carry finite integer bounds; the objective is
stored but ignored (the schemes built on top only need feasibility).

solve_feasible exploits the structure directly: given the running sum of
the shared rows, bricks decouple, so a dynamic program sweeps brick by
brick over reachable shared-row sums, enumerating per brick the vectors
satisfying its private rows. When the enumeration outgrows its caps the
solver falls back to a mixed-integer solve whose result is re-verified in
exact integer arithmetic. solve_exhaustive is the independent ground
truth: plain enumeration of the whole variable box.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Optional, Sequence

from .core import CCSError, EnumerationCapError

# solve_exhaustive refuses boxes with more points than this
EXHAUSTIVE_CAP = 10**7

# dynamic-program resource caps; beyond them the MILP fallback takes over
LOCAL_SOLUTION_CAP = 50_000
FRONTIER_CAP = 200_000
# the per-brick enumeration recurses once per column, so wide bricks go
# straight to the fallback instead of risking the recursion limit
LOCAL_WIDTH_CAP = 200


class InvalidProgramError(CCSError):
    """The program's dimensions or bounds are inconsistent."""


class SparseRow:
    """Immutable integer row stored by its nonzero entries.

    Quacks like a length-``width`` tuple of ints (indexing, len, iteration,
    equality against sequences), while construction, evaluation and the
    solver paths stay proportional to the nonzero count. The scheme
    builders produce rows with tens of thousands of columns and a handful
    of nonzeros; materializing those densely would cost gigabytes.
    """

    __slots__ = ("width", "entries")

    def __init__(self, width: int, entries: Mapping):
        if not isinstance(width, int) or isinstance(width, bool) or width < 0:
            raise InvalidProgramError(f"bad row width {width!r}")
        cleaned = {}
        for j, v in entries.items():
            if not isinstance(j, int) or isinstance(j, bool) or not 0 <= j < width:
                raise InvalidProgramError(f"column {j!r} outside row of width {width}")
            if not isinstance(v, int) or isinstance(v, bool):
                raise InvalidProgramError(f"row entry {v!r} is not an integer")
            if v:
                cleaned[j] = v
        object.__setattr__(self, "width", width)
        object.__setattr__(self, "entries", cleaned)

    def __setattr__(self, name, value):
        raise AttributeError("SparseRow is immutable")

    def __len__(self) -> int:
        return self.width

    def __getitem__(self, j):
        if isinstance(j, slice):
            return tuple(self[i] for i in range(*j.indices(self.width)))
        if j < 0:
            j += self.width
        if not 0 <= j < self.width:
            raise IndexError(j)
        return self.entries.get(j, 0)

    def __iter__(self):
        for j in range(self.width):
            yield self.entries.get(j, 0)

    def items(self):
        """Sorted (column, coefficient) pairs of the nonzeros."""
        return sorted(self.entries.items())

    def __eq__(self, other) -> bool:
        if isinstance(other, SparseRow):
            return self.width == other.width and self.entries == other.entries
        if isinstance(other, (tuple, list)):
            return len(other) == self.width and all(
                a == b for a, b in zip(self, other)
            )
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.width, tuple(self.items())))

    def __repr__(self) -> str:
        return f"SparseRow({self.width}, {dict(self.items())!r})"


def _row_items(row):
    """(column, coefficient) pairs of a row's nonzeros, any storage."""
    if isinstance(row, SparseRow):
        return row.items()
    return [(j, v) for j, v in enumerate(row) if v]


@dataclass(frozen=True)
class NFoldProgram:
    """Immutable block-structured integer program.

    top_blocks[i] and diag_blocks[i] are the blocks of brick i as tuples
    of row tuples (possibly zero rows). rhs lists the shared rows first,
    then each brick's private rows. lower/upper/objective have one entry
    per variable, brick by brick.
    """

    brick_count: int
    top_block_rows: int
    diag_block_rows: int
    brick_width: int
    top_blocks: tuple
    diag_blocks: tuple
    rhs: tuple
    lower: tuple
    upper: tuple
    objective: tuple

    @property
    def total_rows(self) -> int:
        return self.top_block_rows + self.brick_count * self.diag_block_rows

    @property
    def total_columns(self) -> int:
        return self.brick_count * self.brick_width

    @property
    def delta(self) -> int:
        """Largest absolute matrix entry (at least 1 by convention)."""
        best = 1
        for blocks in (self.top_blocks, self.diag_blocks):
            for block in blocks:
                for row in block:
                    for _j, v in _row_items(row):
                        best = max(best, abs(v))
        return best

    @property
    def encoding_length(self) -> int:
        """Bit length of the largest magnitude anywhere in the program."""
        best = 1
        for group in (self.rhs, self.lower, self.upper, self.objective):
            for v in group:
                best = max(best, abs(v).bit_length())
        return max(best, self.delta.bit_length())

    def brick_bounds(self, i: int) -> tuple:
        """(lower, upper) slices of brick i (0-based)."""
        t = self.brick_width
        return self.lower[i * t : (i + 1) * t], self.upper[i * t : (i + 1) * t]

    def brick_rhs(self, i: int) -> tuple:
        """Private-row right-hand side of brick i (0-based)."""
        r, s = self.top_block_rows, self.diag_block_rows
        return self.rhs[r + i * s : r + (i + 1) * s]


@dataclass(frozen=True)
class NFoldSolution:
    """A feasible point, partitioned into bricks."""

    x: tuple
    brick_width: int

    @property
    def bricks(self) -> tuple:
        t = self.brick_width
        return tuple(
            self.x[i : i + t] for i in range(0, len(self.x), t)
        )


@dataclass(frozen=True)
class StructureReport:
    """validate_structure's verdict on a well-formed program."""

    rows: int
    columns: int
    delta: int
    encoding_length: int


def _check_block(block, rows: int, width: int, what: str) -> None:
    if len(block) != rows:
        raise InvalidProgramError(f"{what} has {len(block)} rows, expected {rows}")
    for row in block:
        if len(row) != width:
            raise InvalidProgramError(
                f"{what} row has {len(row)} entries, expected {width}"
            )
        if isinstance(row, SparseRow):
            continue  # entries were validated at construction
        for v in row:
            if not isinstance(v, int) or isinstance(v, bool):
                raise InvalidProgramError(f"{what} entry {v!r} is not an integer")


def validate_structure(program: NFoldProgram) -> StructureReport:
    """Check dimensions and bound finiteness; report the largest matrix
    entry and the encoding length. Raises InvalidProgramError on any
    inconsistency."""
    n, r, s, t = (
        program.brick_count,
        program.top_block_rows,
        program.diag_block_rows,
        program.brick_width,
    )
    if n < 1 or r < 0 or s < 0 or t < 1:
        raise InvalidProgramError("brick_count and brick_width must be positive")
    if len(program.top_blocks) != n or len(program.diag_blocks) != n:
        raise InvalidProgramError("need one top and one diagonal block per brick")
    for i in range(n):
        _check_block(program.top_blocks[i], r, t, f"top block {i}")
        _check_block(program.diag_blocks[i], s, t, f"diagonal block {i}")
    if len(program.rhs) != r + n * s:
        raise InvalidProgramError(
            f"rhs has length {len(program.rhs)}, expected {r + n * s}"
        )
    for name, vec in (
        ("rhs", program.rhs),
        ("lower", program.lower),
        ("upper", program.upper),
        ("objective", program.objective),
    ):
        for v in vec:
            # bool is an int subclass; floats (inf, nan) are rejected here
            if not isinstance(v, int) or isinstance(v, bool):
                raise InvalidProgramError(f"{name} entry {v!r} is not a finite integer")
    for name, vec in (
        ("lower", program.lower),
        ("upper", program.upper),
        ("objective", program.objective),
    ):
        if len(vec) != n * t:
            raise InvalidProgramError(
                f"{name} has length {len(vec)}, expected {n * t}"
            )
    for lo, hi in zip(program.lower, program.upper):
        if lo > hi:
            raise InvalidProgramError(f"empty variable range [{lo}, {hi}]")
    return StructureReport(
        rows=program.total_rows,
        columns=program.total_columns,
        delta=program.delta,
        encoding_length=program.encoding_length,
    )


# ---------------------------------------------------------------------------
# evaluation


def constraint_violations(program: NFoldProgram, x: Sequence) -> list:
    """All violated constraints and bounds of the candidate point, as
    human-readable strings; empty means feasible. Exact arithmetic."""
    n, r, s, t = (
        program.brick_count,
        program.top_block_rows,
        program.diag_block_rows,
        program.brick_width,
    )
    out = []
    if len(x) != n * t:
        return [f"point has length {len(x)}, expected {n * t}"]
    for j, (v, lo, hi) in enumerate(zip(x, program.lower, program.upper)):
        if not isinstance(v, int) or isinstance(v, bool):
            out.append(f"x[{j}] = {v!r} is not an integer")
        elif not lo <= v <= hi:
            out.append(f"x[{j}] = {v} outside [{lo}, {hi}]")
    if out:
        return out
    for k in range(r):
        total = sum(
            sum(a * x[i * t + j] for j, a in _row_items(program.top_blocks[i][k]))
            for i in range(n)
        )
        if total != program.rhs[k]:
            out.append(f"shared row {k}: {total} != {program.rhs[k]}")
    for i in range(n):
        base = i * t
        target = program.brick_rhs(i)
        for k in range(s):
            total = sum(
                a * x[base + j] for j, a in _row_items(program.diag_blocks[i][k])
            )
            if total != target[k]:
                out.append(f"brick {i} row {k}: {total} != {target[k]}")
    return out


def _row_interval(row, lower, upper):
    """Min/max of row . x over the variable box."""
    lo = hi = 0
    for j, a in _row_items(row):
        if a >= 0:
            lo += a * lower[j]
            hi += a * upper[j]
        else:
            lo += a * upper[j]
            hi += a * lower[j]
    return lo, hi


# ---------------------------------------------------------------------------
# exhaustive oracle


def solve_exhaustive(program: NFoldProgram) -> Optional[NFoldSolution]:
    """Ground truth by full enumeration of the variable box, in ascending
    lexicographic order. None means infeasible. Raises EnumerationCapError
    when the box holds more than 10^7 points."""
    validate_structure(program)
    size = 1
    for lo, hi in zip(program.lower, program.upper):
        size *= hi - lo + 1
        if size > EXHAUSTIVE_CAP:
            raise EnumerationCapError(
                f"variable box exceeds {EXHAUSTIVE_CAP} points"
            )
    cols = program.total_columns
    x = list(program.lower)
    while True:
        if not constraint_violations(program, tuple(x)):
            return NFoldSolution(x=tuple(x), brick_width=program.brick_width)
        j = cols - 1
        while j >= 0 and x[j] == program.upper[j]:
            x[j] = program.lower[j]
            j -= 1
        if j < 0:
            return None
        x[j] += 1


# ---------------------------------------------------------------------------
# structured solver


def _brick_solutions(program: NFoldProgram, i: int) -> list:
    """All vectors of brick i satisfying its private rows and bounds, in
    ascending lexicographic order. Raises EnumerationCapError beyond the
    local cap."""
    t = program.brick_width
    if t > LOCAL_WIDTH_CAP:
        raise EnumerationCapError(f"brick width {t} beyond the structured sweep")
    s = program.diag_block_rows
    lower, upper = program.brick_bounds(i)
    target = program.brick_rhs(i)
    block = program.diag_blocks[i]
    # columns no private row touches (slacks of shared rows, mostly) blow up
    # the solution count multiplicatively; bail before walking them
    supported = set()
    for k in range(s):
        supported.update(j for j, _a in _row_items(block[k]))
    loose = 1
    for j in range(t):
        if j not in supported:
            loose *= upper[j] - lower[j] + 1
            if loose > LOCAL_SOLUTION_CAP:
                raise EnumerationCapError(
                    "unconstrained brick columns beyond the local cap"
                )
    # suffix contribution intervals per private row
    suffix = [[(0, 0)] * (t + 1) for _ in range(s)]
    for k in range(s):
        for j in range(t - 1, -1, -1):
            a = block[k][j]
            step = (
                (a * lower[j], a * upper[j])
                if a >= 0
                else (a * upper[j], a * lower[j])
            )
            prev = suffix[k][j + 1]
            suffix[k][j] = (prev[0] + step[0], prev[1] + step[1])
    out: list = []
    partial = [0] * s
    point = [0] * t

    def descend(j: int) -> None:
        if j == t:
            if all(partial[k] == target[k] for k in range(s)):
                if len(out) >= LOCAL_SOLUTION_CAP:
                    raise EnumerationCapError("too many brick solutions")
                out.append(tuple(point))
            return
        for v in range(lower[j], upper[j] + 1):
            ok = True
            for k in range(s):
                acc = partial[k] + block[k][j] * v
                lo, hi = suffix[k][j + 1]
                if not acc + lo <= target[k] <= acc + hi:
                    ok = False
                    break
            if not ok:
                continue
            point[j] = v
            for k in range(s):
                partial[k] += block[k][j] * v
            descend(j + 1)
            for k in range(s):
                partial[k] -= block[k][j] * v
        point[j] = 0

    descend(0)
    return out


def _top_contribution(program: NFoldProgram, i: int, point) -> tuple:
    return tuple(
        sum(a * point[j] for j, a in _row_items(row))
        for row in program.top_blocks[i]
    )


def _solve_dynamic(program: NFoldProgram) -> Optional[NFoldSolution]:
    """Brick-by-brick sweep over reachable shared-row sums. Exact; raises
    EnumerationCapError when local enumerations or the frontier outgrow
    their caps."""
    n, r = program.brick_count, program.top_block_rows
    top_target = program.rhs[:r]
    locals_per_brick = [_brick_solutions(program, i) for i in range(n)]
    # interval of shared-row sums still contributable by bricks > i
    rest_lo = [[0] * r for _ in range(n + 1)]
    rest_hi = [[0] * r for _ in range(n + 1)]
    for i in range(n - 1, -1, -1):
        lower, upper = program.brick_bounds(i)
        for k in range(r):
            lo, hi = _row_interval(program.top_blocks[i][k], lower, upper)
            rest_lo[i][k] = rest_lo[i + 1][k] + lo
            rest_hi[i][k] = rest_hi[i + 1][k] + hi
    frontier: dict = {(0,) * r: None}
    trails: list = []
    for i in range(n):
        nxt: dict = {}
        for reached, _parent in frontier.items():
            for point in locals_per_brick[i]:
                summed = tuple(
                    a + b
                    for a, b in zip(reached, _top_contribution(program, i, point))
                )
                if summed in nxt:
                    continue
                ok = True
                for k in range(r):
                    need = top_target[k] - summed[k]
                    if not rest_lo[i + 1][k] <= need <= rest_hi[i + 1][k]:
                        ok = False
                        break
                if not ok:
                    continue
                if len(nxt) >= FRONTIER_CAP:
                    raise EnumerationCapError("shared-row frontier overflow")
                nxt[summed] = (reached, point)
        trails.append(nxt)
        frontier = nxt
        if not frontier:
            return None
    if top_target not in frontier:
        return None
    bricks = []
    cursor = top_target
    for i in range(n - 1, -1, -1):
        parent, point = trails[i][cursor]
        bricks.append(point)
        cursor = parent
    bricks.reverse()
    x = tuple(v for brick in bricks for v in brick)
    return NFoldSolution(x=x, brick_width=program.brick_width)


def _row_maps(program: NFoldProgram):
    """Nonzero maps of the full equality system: per row a {col: coeff}
    dict and per column the list of rows touching it. Row order matches
    constraint_violations: shared rows first, then each brick's rows."""
    n, r, s, t = (
        program.brick_count,
        program.top_block_rows,
        program.diag_block_rows,
        program.brick_width,
    )
    rows: list = [dict() for _ in range(r + n * s)]
    for i in range(n):
        base = i * t
        for k in range(r):
            row = rows[k]
            for j, entry in _row_items(program.top_blocks[i][k]):
                row[base + j] = entry
        for k in range(s):
            row = rows[r + i * s + k]
            for j, entry in _row_items(program.diag_blocks[i][k]):
                row[base + j] = entry
    col_rows: dict = {}
    for ridx, row in enumerate(rows):
        for j in row:
            col_rows.setdefault(j, []).append(ridx)
    return rows, col_rows


_INFEASIBLE = object()


def _presolve_fix(program: NFoldProgram, rows, col_rows):
    """Iterated exact fixing of pinned variables.

    Rules per equality row over its unfixed columns: residual outside the
    row's interval is infeasible; a single unfixed column is pinned; a
    residual touching either end of the interval pins every column at the
    matching bound. Returns (fixed: {col: value}, residual rhs list) or
    _INFEASIBLE. Pure integer arithmetic throughout.
    """
    resid = list(program.rhs)
    fixed: dict = {}
    unfixed_in_row = [set(row) for row in rows]

    def fix(col: int, value: int):
        fixed[col] = value
        for ridx in col_rows.get(col, ()):
            if col in unfixed_in_row[ridx]:
                resid[ridx] -= rows[ridx][col] * value
                unfixed_in_row[ridx].discard(col)
                dirty.add(ridx)

    dirty = set(range(len(rows)))
    for j, (lo, hi) in enumerate(zip(program.lower, program.upper)):
        if lo == hi:
            fix(j, lo)
    while dirty:
        ridx = dirty.pop()
        cols_here = unfixed_in_row[ridx]
        lo_sum = hi_sum = 0
        for j in cols_here:
            a = rows[ridx][j]
            if a > 0:
                lo_sum += a * program.lower[j]
                hi_sum += a * program.upper[j]
            else:
                lo_sum += a * program.upper[j]
                hi_sum += a * program.lower[j]
        target = resid[ridx]
        if not lo_sum <= target <= hi_sum:
            return _INFEASIBLE
        if not cols_here:
            continue
        if len(cols_here) == 1:
            (j,) = cols_here
            a = rows[ridx][j]
            value, rem = divmod(target, a)
            if rem or not program.lower[j] <= value <= program.upper[j]:
                return _INFEASIBLE
            fix(j, value)
        elif target == lo_sum:
            for j in sorted(cols_here):
                a = rows[ridx][j]
                fix(j, program.lower[j] if a > 0 else program.upper[j])
        elif target == hi_sum:
            for j in sorted(cols_here):
                a = rows[ridx][j]
                fix(j, program.upper[j] if a > 0 else program.lower[j])
    return fixed, resid


def _solve_milp(program: NFoldProgram) -> Optional[NFoldSolution]:
    """Mixed-integer fallback; the returned point is rounded and
    re-verified exactly, so float arithmetic can never leak through.

    Before handing off, the program shrinks by exact presolve: variables
    pinned by equalities are fixed, and columns identical in every row and
    in the objective are aggregated into one variable with summed bounds
    (cross-brick duplicates: x- and slack columns have zero coefficients
    in the private rows, so their copies collapse)."""
    import numpy as np
    from scipy.optimize import Bounds, LinearConstraint, milp
    from scipy.sparse import coo_matrix

    rows, col_rows = _row_maps(program)
    state = _presolve_fix(program, rows, col_rows)
    if state is _INFEASIBLE:
        return None
    fixed, resid = state
    cols_total = program.total_columns

    def compose(values: dict) -> Optional[NFoldSolution]:
        x = tuple(
            fixed[j] if j in fixed else values[j] for j in range(cols_total)
        )
        if constraint_violations(program, x):
            raise CCSError("mixed-integer solver returned an infeasible point")
        return NFoldSolution(x=x, brick_width=program.brick_width)

    free = [j for j in range(cols_total) if j not in fixed]
    live_rows = [ridx for ridx, row in enumerate(rows)
                 if any(j not in fixed for j in row)]
    if not free:
        # every variable pinned; the fixing loop already checked each row
        return compose({})

    # aggregate columns sharing every row coefficient and the objective
    groups: dict = {}
    for j in free:
        signature = (
            tuple((ridx, rows[ridx][j]) for ridx in col_rows.get(j, ())),
            program.objective[j],
        )
        groups.setdefault(signature, []).append(j)
    ordered = sorted(groups.values(), key=lambda g: g[0])

    # the solver is handed variables shifted to start at zero: the bundled
    # engine has been seen returning bound-violating "optimal" points when
    # lower bounds are negative, and the shift is an exact identity
    row_of = {ridx: pos for pos, ridx in enumerate(live_rows)}
    row_idx: list = []
    col_idx: list = []
    data: list = []
    base: list = []
    span: list = []
    cost: list = []
    shifted = {ridx: resid[ridx] for ridx in live_rows}
    for gpos, members in enumerate(ordered):
        head = members[0]
        glo = sum(program.lower[j] for j in members)
        gup = sum(program.upper[j] for j in members)
        for ridx in col_rows.get(head, ()):
            if ridx in row_of:
                row_idx.append(row_of[ridx])
                col_idx.append(gpos)
                data.append(float(rows[ridx][head]))
                shifted[ridx] -= rows[ridx][head] * glo
        base.append(glo)
        span.append(gup - glo)
        cost.append(float(program.objective[head] * len(members)))
    matrix = coo_matrix(
        (data, (row_idx, col_idx)), shape=(len(live_rows), len(ordered))
    ).tocsr()
    rhs = np.array([float(shifted[ridx]) for ridx in live_rows])
    # the engine's own presolve has returned bound- and equality-violating
    # "optimal" points and segfaulted on tiny integer-infeasible systems;
    # exact fixing and aggregation above already cover its useful work
    result = milp(
        c=np.array(cost),
        constraints=LinearConstraint(matrix, rhs, rhs),
        integrality=np.ones(len(ordered)),
        bounds=Bounds(
            np.zeros(len(ordered)), np.array(span, dtype=float)
        ),
        options={"presolve": False},
    )
    if result.status == 2:  # proven infeasible
        return None
    if result.x is None:
        raise CCSError(f"mixed-integer solver failed: {result.message}")
    values: dict = {}
    for gpos, members in enumerate(ordered):
        amount = base[gpos] + int(round(result.x[gpos]))
        amount = max(min(amount, base[gpos] + span[gpos]), base[gpos])
        rest_lo = base[gpos]
        for j in members:
            rest_lo -= program.lower[j]
            take = max(min(amount - rest_lo, program.upper[j]), program.lower[j])
            values[j] = take
            amount -= take
    return compose(values)


def solve_feasible(
    program: NFoldProgram, *, method: str = "auto"
) -> Optional[NFoldSolution]:
    """Any feasible point, or None. Deterministic: identical programs give
    identical solutions. method picks the engine: "dynamic" forces the
    structured sweep, "milp" the mixed-integer fallback, "auto" tries the
    sweep and falls back when it overflows its caps."""
    validate_structure(program)
    if method == "dynamic":
        solution = _solve_dynamic(program)
    elif method == "milp":
        solution = _solve_milp(program)
    elif method == "auto":
        try:
            solution = _solve_dynamic(program)
        except EnumerationCapError:
            solution = _solve_milp(program)
    else:
        raise ValueError(f"unknown method {method!r}")
    if solution is not None:
        leftover = constraint_violations(program, solution.x)
        assert not leftover, leftover
    return solution


# ---------------------------------------------------------------------------
# inequality helper and debug dump


def with_top_row_slacks(
    program: NFoldProgram, slack_max: Mapping[int, int]
) -> NFoldProgram:
    """Convert the given shared rows from <= into equalities.

    Each row in slack_max gains one slack column per brick: coefficient 1 in
    that shared row of every top block, zeros in the diagonal blocks,
    bounds [0, slack_max[row]], zero objective. Splitting the slack across
    bricks keeps the blocks uniform in width.
    """
    rows = sorted(slack_max)
    for k in rows:
        if not 0 <= k < program.top_block_rows:
            raise InvalidProgramError(f"no shared row {k}")
        if slack_max[k] < 0:
            raise InvalidProgramError("slack bound must be nonnegative")
    extra = len(rows)
    width = program.brick_width

    def widen(row, slack_at=None):
        if isinstance(row, SparseRow):
            entries = dict(row.entries)
            if slack_at is not None:
                entries[width + slack_at] = 1
            return SparseRow(width + extra, entries)
        tail = [0] * extra
        if slack_at is not None:
            tail[slack_at] = 1
        return tuple(row) + tuple(tail)

    slack_of_row = {k: e for e, k in enumerate(rows)}
    top_blocks = []
    diag_blocks = []
    for i in range(program.brick_count):
        top_blocks.append(
            tuple(
                widen(row, slack_of_row.get(k))
                for k, row in enumerate(program.top_blocks[i])
            )
        )
        diag_blocks.append(
            tuple(widen(row) for row in program.diag_blocks[i])
        )
    lower = []
    upper = []
    objective = []
    t = program.brick_width
    for i in range(program.brick_count):
        lower.extend(program.lower[i * t : (i + 1) * t])
        lower.extend([0] * extra)
        upper.extend(program.upper[i * t : (i + 1) * t])
        upper.extend(slack_max[k] for k in rows)
        objective.extend(program.objective[i * t : (i + 1) * t])
        objective.extend([0] * extra)
    return NFoldProgram(
        brick_count=program.brick_count,
        top_block_rows=program.top_block_rows,
        diag_block_rows=program.diag_block_rows,
        brick_width=t + extra,
        top_blocks=tuple(top_blocks),
        diag_blocks=tuple(diag_blocks),
        rhs=program.rhs,
        lower=tuple(lower),
        upper=tuple(upper),
        objective=tuple(objective),
    )


def dump_program(program: NFoldProgram) -> str:
    """Textual debug format: `N r s t` header, the top blocks then the
    diagonal blocks row-major in brick order, then rhs, lower, upper and
    objective — one integer per token."""
    lines = [
        f"{program.brick_count} {program.top_block_rows} "
        f"{program.diag_block_rows} {program.brick_width}"
    ]
    for blocks in (program.top_blocks, program.diag_blocks):
        for block in blocks:
            for row in block:
                lines.append(" ".join(str(v) for v in row))
    for vec in (program.rhs, program.lower, program.upper, program.objective):
        lines.append(" ".join(str(v) for v in vec))
    return "\n".join(lines) + "\n"
