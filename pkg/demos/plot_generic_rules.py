"""
Generic rules on a single cell
==============================

A rule is written ``state lhs -> target rhs | promoters`` and carries an
instantiation/application mode.  Free variables are bound against the
cell contents, so one generic rule stands for many ground rules.
"""

from simplex_fssp import CellState, Multiset, Program, Rule, apply_cell, sym

# a cell in state S holding three depth reports and a cell ID
contents = Multiset([sym("n", 2), sym("n", 3), sym("n", 3), sym("iota", 7)])
cell = CellState(7, "S", contents)

# max.max: every binding of k is used, each as often as possible
keep_id = Rule.parse("echo", "S n(k) -> S m(k) | iota(i)", "max.max")
new, _ = apply_cell(cell, Program([keep_id]))
print(new.contents)

# min.min: one binding, applied once; the lowest ground instance wins
# when no seed is given
once = Rule.parse("pick", "S n(k) -> T p(k)", "min.min")
new, _ = apply_cell(cell, Program([once]))
print(new.state, new.contents)

# weak priority: the first applicable rule fixes the target state and a
# later rule only joins in if it moves to the same state
prog = Program([
    Rule.parse("first", "S n(k) -> T p(k)", "min.min"),
    Rule.parse("elsewhere", "S iota(i) -> U", "min.min"),
    Rule.parse("along", "S iota(i) -> T q(i)", "min.min"),
])
log = []
new, _ = apply_cell(cell, prog, log=log)
print(new.state, [e.ground.rule.name for e in log])
