"""Hypothesis strategies for random expression trees."""

from hypothesis import strategies as st

from pqtwistor.expr import FUNCTIONS, Binary, Const, Coord, Func, Neg, Pow

COORDS = ["x", "y", "u", "v"]

consts = st.one_of(
    st.integers(min_value=0, max_value=9).map(float),
    st.floats(min_value=0, max_value=1e3, allow_nan=False, allow_infinity=False),
).map(Const)
coords = st.integers(min_value=0, max_value=len(COORDS) - 1).map(lambda k: Coord(index=k, name=COORDS[k]))
leaves = st.one_of(consts, coords)


def _extend(children):
    return st.one_of(
        children.map(lambda a: Neg(arg=a)),
        st.tuples(children, children, st.sampled_from("+-*/")).map(lambda t: Binary(left=t[0], right=t[1], op=t[2])),
        st.tuples(children, st.integers(min_value=-3, max_value=4)).map(lambda t: Pow(base=t[0], exponent=t[1])),
        st.tuples(st.sampled_from(FUNCTIONS), children).map(lambda t: Func(name=t[0], arg=t[1])),
    )


def depth(e):
    kids = [getattr(e, a) for a in ("arg", "left", "right", "base") if hasattr(e, a)]
    return 1 + max((depth(k) for k in kids), default=0)


exprs = st.recursive(leaves, _extend, max_leaves=24).filter(lambda e: depth(e) <= 8)

# smoother trees for derivative comparisons: no division, no log/sqrt, small powers
_smooth_leaves = st.one_of(
    st.floats(min_value=0, max_value=2, allow_nan=False).map(Const),
    coords,
)


def _extend_smooth(children):
    return st.one_of(
        children.map(lambda a: Neg(arg=a)),
        st.tuples(children, children, st.sampled_from("+-*")).map(lambda t: Binary(left=t[0], right=t[1], op=t[2])),
        st.tuples(children, st.integers(min_value=0, max_value=3)).map(lambda t: Pow(base=t[0], exponent=t[1])),
        st.tuples(st.sampled_from(("sin", "cos", "tanh", "exp")), children).map(lambda t: Func(name=t[0], arg=t[1])),
    )


smooth_exprs = st.recursive(_smooth_leaves, _extend_smooth, max_leaves=10)

points = st.lists(st.floats(min_value=-1, max_value=1, allow_nan=False), min_size=4, max_size=4)
