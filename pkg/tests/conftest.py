from hypothesis import strategies as st

from freedl.sampling import Profile, Sampler
from freedl.semantics import Frame, Interpretation

NAMES = ("A", "B")
ROLES = ("r",)
INDS = ("a", "b")


@st.composite
def concepts(draw, profile=None):
    seed = draw(st.integers(0, 10**6))
    return Sampler(seed, profile or Profile(inds=INDS)).concept()


@st.composite
def models(draw, max_worlds=3, max_domain=3, modalities=(1,), constant=False):
    """Random interpretation over NAMES/ROLES/INDS with partial designation."""
    k = draw(st.integers(1, max_worlds))
    rels = {}
    for i in modalities:
        pairs = [(w, v) for w in range(k) for v in range(k)]
        rels[i] = frozenset(p for p in pairs if draw(st.booleans()))
    elems = list(range(max_domain))
    doms = []
    for w in range(k):
        if constant and doms:
            doms.append(doms[0])
        else:
            doms.append(frozenset(draw(st.sets(st.sampled_from(elems), min_size=1))))
    concepts_, roles_, inds_ = [], [], []
    for w in range(k):
        d = sorted(doms[w])
        concepts_.append({a: frozenset(draw(st.sets(st.sampled_from(d)))) for a in NAMES})
        pairs = [(x, y) for x in d for y in d]
        roles_.append({r: frozenset(draw(st.sets(st.sampled_from(pairs)))) for r in ROLES})
        iw = {}
        for a in INDS:
            v = draw(st.one_of(st.none(), st.sampled_from(d)))
            if v is not None:
                iw[a] = v
        inds_.append(iw)
    return Interpretation(Frame(k, rels), tuple(doms), tuple(concepts_), tuple(roles_), tuple(inds_))


# one line per acceptance criterion, printed after the run
ACCEPTANCE_LINES = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[k])
