import math
import random
import sys

import pytest

from syntaxprobe import beamsearch as bs
from syntaxprobe.errors import (
    DeadBeamError,
    FormatError,
    GrammarError,
    InputError,
    OracleInfeasibleError,
)

from conftest import random_pcfg, sample_sentence

TWO_PARSE_TEXT = """
0.3 S -> A
0.2 S -> B
0.5 S -> C
1.0 A -> a
1.0 B -> a
1.0 C -> c
"""

DOG_TEXT = """
1.0 S -> NP VP
0.6 NP -> D N
0.4 NP -> NX
1.0 NX -> D N
1.0 VP -> V
1.0 D -> the
1.0 N -> dog
1.0 V -> barks
"""


@pytest.fixture(scope="module")
def two_parse_model():
    return bs.PCFGActionModel(bs.parse_grammar(TWO_PARSE_TEXT))


@pytest.fixture(scope="module")
def dog_model():
    return bs.PCFGActionModel(bs.parse_grammar(DOG_TEXT))


# ---------------------------------------------------------------------------
# Grammar plumbing


def test_grammar_round_trip(tmp_path):
    g = bs.parse_grammar(DOG_TEXT)
    path = tmp_path / "g.pcfg"
    bs.write_grammar(g, path)
    again = bs.read_grammar(path)
    assert again.rules == g.rules and again.start == g.start


def test_grammar_validation():
    with pytest.raises(GrammarError):
        bs.parse_grammar("0.5 S -> a\n0.4 S -> b\n")
    with pytest.raises(GrammarError):
        bs.parse_grammar("1.0 S -> a\n-1.0 T -> b\n2.0 T -> c\n")
    with pytest.raises(FormatError):
        bs.parse_grammar("S -> a\n")


def test_action_serialization_round_trip():
    for action in (bs.nt("NP"), bs.gen("dog"), bs.REDUCE):
        assert bs.parse_action(bs.serialize_action(action)) == action
    with pytest.raises(FormatError):
        bs.parse_action("SHIFT")


# ---------------------------------------------------------------------------
# PCFG action model


def test_action_scores_normalize(dog_model):
    # Walk every state reachable while parsing the one sentence.
    state = dog_model.initial_state()
    stack = [state]
    seen = 0
    while stack:
        st = stack.pop()
        actions = dog_model.actions(st)
        if actions:
            total = math.fsum(2.0 ** lp for _, lp in actions)
            assert abs(total - 1.0) <= 1e-9
            seen += 1
        for action, lp in actions:
            if action[0] == bs.GEN and action[1] not in ("the", "dog", "barks"):
                continue
            stack.append(bs.apply_action(st, action, lp))
    assert seen > 5


def test_derivation_probability_is_rule_product():
    g = bs.parse_grammar("1.0 S -> A B\n0.7 A -> a\n0.3 A -> a a\n1.0 B -> b\n")
    model = bs.PCFGActionModel(g)
    result = bs.exact_marginal(model, ["a", "b"])
    assert result.parses == [("(S (A a) (B b))", pytest.approx(math.log2(0.7)))]


def test_two_parse_hand_example(two_parse_model):
    # Parses of "a" carry 0.3 and 0.2: 0.6 and 0.4 of the sentence mass.
    result = bs.exact_marginal(two_parse_model, ["a"])
    assert result.marginals == [pytest.approx(math.log2(0.5))]
    assert result.complete_logprob == pytest.approx(math.log2(0.5))
    assert [p for _, p in result.parses] == [
        pytest.approx(math.log2(0.3)), pytest.approx(math.log2(0.2))]

    beam = bs.word_sync_beam(two_parse_model, ["a"], word_beam_k=16, validate=True)
    assert beam.marginals[0] == pytest.approx(math.log2(0.5))
    assert beam.top_parse == "(S (A a))"
    assert beam.top_parse_logprob == pytest.approx(math.log2(0.3))
    assert beam.surprisals[0] == pytest.approx(1.0)  # log2(0.5) = -1 bit


def test_single_parse_surprisals_are_chain_probabilities(dog_model):
    g = bs.parse_grammar("1.0 S -> X Y\n0.25 X -> a\n0.75 X -> b\n1.0 Y -> c\n")
    model = bs.PCFGActionModel(g)
    result = bs.word_sync_beam(model, ["a", "c"], word_beam_k=8)
    assert result.surprisals[0] == pytest.approx(-math.log2(0.25))
    assert result.surprisals[1] == pytest.approx(0.0)


def test_beam_equals_exact_when_all_states_fit(dog_model):
    sent = ["the", "dog", "barks"]
    exact = bs.exact_marginal(dog_model, sent)
    beam = bs.word_sync_beam(dog_model, sent, word_beam_k=1000, validate=True)
    for a, b in zip(exact.marginals, beam.marginals):
        assert abs(a - b) <= 1e-9
    assert beam.complete_logprob == pytest.approx(exact.complete_logprob)


def test_narrow_beam_lower_bounds_exact(dog_model):
    sent = ["the", "dog", "barks"]
    exact = bs.exact_marginal(dog_model, sent)
    narrow = bs.word_sync_beam(dog_model, sent, word_beam_k=1, fast_track_k=1)
    for a, b in zip(exact.marginals, narrow.marginals):
        assert b <= a + 1e-12


def test_monotone_convergence(two_parse_model, dog_model):
    for model, sent in ((two_parse_model, ["a"]), (dog_model, ["the", "dog", "barks"])):
        prev = None
        for k in (1, 2, 4, 8, 16):
            got = bs.word_sync_beam(model, sent, word_beam_k=k).marginals
            if prev is not None:
                for a, b in zip(prev, got):
                    assert b >= a - 1e-12
            prev = got
        exact = bs.exact_marginal(model, sent).marginals
        for a, b in zip(exact, prev):
            assert b == pytest.approx(a, abs=1e-9)


def test_surprisal_additivity(dog_model):
    result = bs.word_sync_beam(dog_model, ["the", "dog", "barks"], word_beam_k=64)
    assert math.fsum(result.surprisals) == pytest.approx(-result.marginals[-1])


def test_dead_beam_reports_word_index(two_parse_model):
    with pytest.raises(DeadBeamError) as err:
        bs.word_sync_beam(two_parse_model, ["a", "a"])
    assert err.value.word_index == 1


def test_exact_marginal_out_of_language(two_parse_model):
    result = bs.exact_marginal(two_parse_model, ["b"])
    assert result.marginals == [float("-inf")]
    assert result.complete_logprob == float("-inf")
    assert result.parses == []


def test_exact_marginal_depth_bound():
    g = bs.parse_grammar("0.5 S -> S S\n0.5 S -> a\n")
    model = bs.PCFGActionModel(g)
    with pytest.raises(OracleInfeasibleError):
        bs.exact_marginal(model, ["a", "a"], max_actions=12)


def test_empty_sentence_and_bad_parameters(dog_model):
    with pytest.raises(InputError):
        bs.word_sync_beam(dog_model, [])
    with pytest.raises(InputError):
        bs.word_sync_beam(dog_model, ["the"], word_beam_k=0)
    with pytest.raises(InputError):
        bs.exact_marginal(dog_model, [])


def test_validator_rejects_illegal_actions():
    state = bs.INITIAL_STATE
    assert bs.action_is_legal(state, bs.nt("S"))
    assert not bs.action_is_legal(state, bs.gen("a"))
    assert not bs.action_is_legal(state, bs.REDUCE)
    opened = bs.apply_action(state, bs.nt("S"), 0.0)
    assert not bs.action_is_legal(opened, bs.REDUCE)  # no completed child yet
    with pytest.raises(InputError):
        bs.apply_action(opened, bs.REDUCE, 0.0, validate=True)
    shifted = bs.apply_action(opened, bs.gen("a"), -1.0)
    assert bs.action_is_legal(shifted, bs.REDUCE)
    done = bs.apply_action(shifted, bs.REDUCE, 0.0)
    assert done.is_complete
    assert bs.bracket(done.stack[0]) == "(S a)"


def test_random_grammars_beam_equals_exact():
    for seed in range(6):
        grammar = random_pcfg(seed)
        model = bs.PCFGActionModel(grammar)
        sent = sample_sentence(grammar, random.Random(1000 + seed))
        exact = bs.exact_marginal(model, sent, max_actions=2000)
        beam = bs.word_sync_beam(model, sent, word_beam_k=10000, validate=True)
        for a, b in zip(exact.marginals, beam.marginals):
            assert abs(a - b) <= 1e-9


# ---------------------------------------------------------------------------
# Subprocess scorer protocol


def test_subprocess_scorer_matches_in_process(tmp_path):
    path = tmp_path / "g.pcfg"
    bs.write_grammar(bs.parse_grammar(DOG_TEXT), path)
    direct = bs.word_sync_beam(
        bs.PCFGActionModel(bs.read_grammar(path)), ["the", "dog", "barks"],
        word_beam_k=32)
    argv = [sys.executable, "-m", "syntaxprobe.pcfg_scorer", str(path)]
    with bs.SubprocessActionModel(argv) as remote:
        via_proc = bs.word_sync_beam(remote, ["the", "dog", "barks"],
                                     word_beam_k=32)
    assert via_proc.marginals == pytest.approx(direct.marginals)
    assert via_proc.top_parse == direct.top_parse


def test_subprocess_scorer_bad_header():
    argv = [sys.executable, "-c", "print('hello')"]
    with pytest.raises(FormatError):
        bs.SubprocessActionModel(argv)
