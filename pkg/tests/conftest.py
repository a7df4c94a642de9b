"""Shared hypothesis strategies, random generators, and fixtures."""

from hypothesis import strategies as st

from ccs import Instance
from ccs.nfold import NFoldProgram


@st.composite
def instances(
    draw,
    max_jobs: int = 8,
    max_machines: int = 4,
    max_budget: int = 3,
    max_size: int = 20,
    machines_at_most_n: bool = False,
):
    """Structurally feasible instances (C <= m*c by construction) with
    integer processing times."""
    m = draw(st.integers(1, max_machines))
    c = draw(st.integers(1, max_budget))
    min_jobs = m if machines_at_most_n else 1
    n = draw(st.integers(min_jobs, max(max_jobs, min_jobs)))
    sizes = draw(st.lists(st.integers(1, max_size), min_size=n, max_size=n))
    palette = min(n, m * c)
    labels = draw(st.lists(st.integers(1, palette), min_size=n, max_size=n))
    return Instance(tuple(sizes), tuple(labels), m, c)


@st.composite
def oracle_instances(draw, max_size: int = 20):
    """Instances small enough for every exact oracle: class->machine
    eligibility patterns (2^m - 1)^C stay under 10^6 and m^n under 10^7."""
    m = draw(st.integers(1, 4))
    max_classes = {1: 8, 2: 8, 3: 7, 4: 5}[m]
    c = draw(st.integers(1, 3))
    n = draw(st.integers(max(1, -(-m // c)), 8))
    sizes = draw(st.lists(st.integers(1, max_size), min_size=n, max_size=n))
    palette = min(n, m * c, max_classes)
    labels = draw(st.lists(st.integers(1, palette), min_size=n, max_size=n))
    return Instance(tuple(sizes), tuple(labels), m, c)


@st.composite
def instances_with_assignment(draw, **kwargs):
    """An instance plus a random feasible job->machine map built by placing
    whole classes onto machines, never more than c classes per machine."""
    instance = draw(instances(**kwargs))
    m = instance.machine_count
    c = instance.slot_budget
    slots_used = [0] * m
    class_machine = {}
    for u in range(1, instance.class_count + 1):
        open_machines = [i for i in range(m) if slots_used[i] < c]
        i = draw(st.sampled_from(open_machines))
        class_machine[u] = i
        slots_used[i] += 1
    assignment = {
        j: class_machine[instance.class_labels[j]]
        for j in range(instance.job_count)
    }
    return instance, assignment


def random_nfold_program(rng, max_bricks: int = 4, max_width: int = 5):
    """Random small block program for solver cross-checks: entries in
    [-3, 3], bounds within [-4, 4], and a variable box kept under 10^4
    points so the exhaustive oracle stays cheap. Half the programs get a
    right-hand side planted from a random in-box point, so feasible and
    infeasible cases both appear often."""
    n = rng.randint(1, max_bricks)
    t = rng.randint(1, max_width)
    r = rng.randint(1, 2)
    s = rng.randint(0, 2)

    def entry():
        return rng.choice((-3, -2, -1, -1, 0, 0, 0, 0, 1, 1, 2, 3))

    top = tuple(
        tuple(tuple(entry() for _ in range(t)) for _ in range(r)) for _ in range(n)
    )
    diag = tuple(
        tuple(tuple(entry() for _ in range(t)) for _ in range(s)) for _ in range(n)
    )
    lower = []
    upper = []
    box = 1
    for _ in range(n * t):
        lo = rng.randint(-2, 1)
        width = rng.randint(0, 3)
        while width and box * (width + 1) > 10_000:
            width -= 1
        box *= width + 1
        lower.append(lo)
        upper.append(lo + width)
    if rng.random() < 0.5:
        seed_point = [rng.randint(lo, hi) for lo, hi in zip(lower, upper)]
        rhs = []
        for k in range(r):
            rhs.append(
                sum(
                    top[i][k][j] * seed_point[i * t + j]
                    for i in range(n)
                    for j in range(t)
                )
            )
        for i in range(n):
            for k in range(s):
                rhs.append(
                    sum(diag[i][k][j] * seed_point[i * t + j] for j in range(t))
                )
    else:
        rhs = [rng.randint(-6, 6) for _ in range(r + n * s)]
    return NFoldProgram(
        brick_count=n,
        top_block_rows=r,
        diag_block_rows=s,
        brick_width=t,
        top_blocks=top,
        diag_blocks=diag,
        rhs=tuple(rhs),
        lower=tuple(lower),
        upper=tuple(upper),
        objective=(0,) * (n * t),
    )
