import io
import itertools
import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from bitthermo import (BitString, InfeasibleError, Macrostate, MacroTransition,
                       TransformationTable, brute_force_feasible, carnot_efficiency, carnot_run,
                       check_first_law, check_second_law, enumerate_microstates, macro_feasible)
from bitthermo.processes import (ASYMPTOTIC, OUTSIDE_REGIME, POSITIVE_BRANCH, TableEntry,
                                 format_table, parse_table)

B = BitString.from_str


def _pairs(n, k1, k2):
    return [(a, b) for a in enumerate_microstates(Macrostate(n, k1))
            for b in enumerate_microstates(Macrostate(n, k2))]


def test_first_law_examples():
    states = enumerate_microstates(Macrostate(4, 2))
    assert check_first_law(TransformationTable.from_mapping({s: s for s in states})).holds
    bad = check_first_law(TransformationTable.from_mapping({B("01"): B("11")}))
    assert not bad.holds and bad.witness == ((B("01"),), (B("11"),))
    pairs = _pairs(3, 1, 2)
    assert check_first_law(TransformationTable.from_mapping({p: p[::-1] for p in pairs})).holds


def test_second_law_examples():
    states = enumerate_microstates(Macrostate(4, 2))
    perm = dict(zip(states, states[1:] + states[:1]))
    assert check_second_law(TransformationTable.from_mapping(perm)).holds
    const = check_second_law(TransformationTable.from_mapping({s: states[0] for s in states}))
    assert not const.holds and const.witness == ((states[0],), (states[1],))
    into_five = {s: states[i % 5] for i, s in enumerate(states)}
    assert not check_second_law(TransformationTable.from_mapping(into_five)).holds


def test_table_validation():
    with pytest.raises(ValueError):
        TransformationTable([TableEntry((B("01"),), (B("011"),))])
    with pytest.raises(ValueError):
        TransformationTable([TableEntry((B("01"),), (B("10"),)),
                             TableEntry((B("01"),), (B("01"),))])
    with pytest.raises(ValueError):
        TransformationTable([TableEntry((B("01"),), (B("00"),), -1)])


def test_table_text_round_trip():
    text = "# a comment\n01,10 -> 10,01\n11,00 -> 01,00 | extracted=1\n"
    tt = parse_table(io.StringIO(text))
    assert len(tt) == 2 and tt.entries[1].extracted == 1
    assert check_first_law(tt).holds
    assert parse_table(io.StringIO(format_table(tt))) == tt
    with pytest.raises(ValueError):
        parse_table(io.StringIO("01 => 10\n"))


def test_work_register_balances_first_law():
    tt = parse_table(io.StringIO("1 -> 0 | extracted=1\n"))
    assert check_first_law(tt).holds


def test_clausius_scenario():
    n = 1000
    mt = MacroTransition.between(n, [400, 200], [450, 150])
    r = macro_feasible(mt)
    assert not r.feasible and r.slack_bits < 0
    assert not macro_feasible(mt, ASYMPTOTIC).feasible


def test_kelvin_scenario():
    mt = MacroTransition.between(1000, [300], [250])
    assert mt.extracted == 50
    assert not macro_feasible(mt).feasible


def test_identity_transition():
    mt = MacroTransition.between(50, [10, 20], [10, 20])
    r = macro_feasible(mt)
    assert r.feasible and r.slack_bits == 0
    assert brute_force_feasible(MacroTransition.between(6, [3, 1], [3, 1])).feasible


def test_transition_validation():
    with pytest.raises(ValueError):
        MacroTransition((Macrostate(6, 3),), (Macrostate(6, 4),))
    with pytest.raises(ValueError):
        MacroTransition((Macrostate(6, 3),), (Macrostate(7, 3),))
    with pytest.raises(ValueError):
        macro_feasible(MacroTransition.between(6, [1], [1]), "approx")
    assert MacroTransition.between(10, [4, 2], [3, 2]).deltas() == (Fraction(-1, 10), 0)


def test_brute_force_examples():
    r = brute_force_feasible(MacroTransition.between(6, [3, 1], [2, 2]))
    assert r.feasible and (r.before_count, r.after_count) == (120, 225)
    assert check_second_law(r.table).holds and check_first_law(r.table).holds
    back = brute_force_feasible(MacroTransition.between(6, [2, 2], [3, 1]))
    assert not back.feasible and back.table is None


def test_brute_force_table_is_rank_pairing():
    r = brute_force_feasible(MacroTransition.between(4, [2], [1]))
    assert not r.feasible
    r = brute_force_feasible(MacroTransition.between(4, [1, 2], [2, 1]))
    # r-th source pair in lexicographic product order -> r-th target pair
    first = [(str(e.source[0]), str(e.source[1]), str(e.image[0]), str(e.image[1]))
             for e in r.table.entries[:5]]
    assert first[0] == ("0001", "0011", "0011", "0001")
    assert first[1] == ("0001", "0101", "0011", "0010")
    assert first[4] == ("0001", "1010", "0101", "0001")


@given(st.integers(1, 9), st.integers(1, 9), st.data())
def test_oracle_agreement_mixed_lengths(n1, n2, data):
    k1, k2 = data.draw(st.integers(0, n1)), data.draw(st.integers(0, n2))
    tot = k1 + k2
    j1 = data.draw(st.integers(max(0, tot - n2 - 10), min(n1, tot)))
    j2 = data.draw(st.integers(0, min(n2, tot - j1)))
    mt = MacroTransition((Macrostate(n1, k1), Macrostate(n2, k2)),
                         (Macrostate(n1, j1), Macrostate(n2, j2)), tot - j1 - j2)
    brute = brute_force_feasible(mt)
    assert brute.feasible == macro_feasible(mt).feasible
    if brute.table is not None:
        assert check_second_law(brute.table).holds and check_first_law(brute.table).holds


def test_exact_tie_resolved_in_integers():
    # C(10,3) * C(10,3) = 14400 = C(10,3) * C(10,7): equal counts are feasible
    mt = MacroTransition((Macrostate(10, 3), Macrostate(10, 3)),
                         (Macrostate(10, 3), Macrostate(10, 3)))
    assert macro_feasible(mt).feasible
    mt = MacroTransition.between(10, [5, 5], [3, 7])
    assert macro_feasible(mt).feasible == (math.comb(10, 3) * math.comb(10, 7)
                                           >= math.comb(10, 5) ** 2)


def test_carnot_closed_form():
    assert carnot_efficiency(0.4, 0.2) == pytest.approx(1 - math.log2(1.5) / math.log2(4))
    assert carnot_efficiency(0.3, 0.3) == 0.0
    assert carnot_efficiency(0.5, 0.2) is None


def test_carnot_reference_run():
    out = carnot_run(10**6, 0.4, 0.2, 100)
    assert out.d2_min == 30 and out.eta_exact == Fraction(7, 10)
    assert abs(float(out.eta_exact) - 0.70752) <= 0.02
    assert out.branch == POSITIVE_BRANCH and not out.work_deficit
    assert out.d2_min - 1 < out.d2_crossing <= out.d2_min
    # the found d2 is feasible and one less is not
    before = [out.k1, out.k2]
    assert macro_feasible(MacroTransition.between(10**6, before,
                                                  [out.k1 - 100, out.k2 + 30])).feasible
    assert not macro_feasible(MacroTransition.between(10**6, before,
                                                      [out.k1 - 100, out.k2 + 29])).feasible


def test_carnot_equal_temperatures():
    out = carnot_run(10**6, 0.3, 0.3, 100)
    assert out.eta_asymptotic == 0.0
    # log-concavity of C(n, k) makes exact equality impossible: one extra 1 is needed
    assert out.d2_min == 101 and out.work_deficit and out.eta_exact < 0


@pytest.mark.parametrize("t1,t2", [(0.4, 0.2), (0.45, 0.1), (0.3, 0.25)])
def test_carnot_crossing_gap_halves_with_d1(t1, t2):
    g100 = carnot_run(10**6, t1, t2, 100).gap_crossing
    g50 = carnot_run(10**6, t1, t2, 50).gap_crossing
    assert abs(g100) / abs(g50) == pytest.approx(2.0, rel=0.1)


def test_carnot_converges_in_n():
    gaps = [abs(carnot_run(n, 0.4, 0.2, n // 10**4).gap_crossing) for n in (10**5, 10**6, 10**7)]
    assert gaps[0] > gaps[1] > gaps[2]


def test_carnot_monotone_in_cold_fraction():
    etas = [carnot_efficiency(0.4, t2) for t2 in (0.05, 0.1, 0.2, 0.3, 0.35)]
    assert all(a > b for a, b in zip(etas, etas[1:]))
    runs = [float(carnot_run(10**6, 0.4, t2, 100).eta_exact) for t2 in (0.05, 0.2, 0.35)]
    assert runs[0] > runs[1] > runs[2]


def test_carnot_asymptotic_mode_and_regimes():
    out = carnot_run(10**6, 0.4, 0.2, 100, mode=ASYMPTOTIC)
    assert abs(out.gap) <= 0.02 and out.mode == ASYMPTOTIC
    assert carnot_run(10**5, 0.7, 0.2, 50).branch == OUTSIDE_REGIME
    with pytest.raises(InfeasibleError):
        carnot_run(1000, 0.4, 0.7, 5)
    with pytest.raises(ValueError):
        carnot_run(10, 0.4, 0.2, 5)
