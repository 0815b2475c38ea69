import numpy as np
import pytest
from hypothesis import given, strategies as st

from padicgrn.network import (DatasetMissingError, NetworkFormatError, TransitionMap,
                              build_transition_map, builtin_dataset, constant_map, format_network,
                              identity_map, labels_by_encoding, network_from_table, parse_expression,
                              parse_network)
from padicgrn.fixed_points import find_fixed_points

TOY = [0, 1, 4, 9, 0, 9, 4, 1, 0, 1, 4, 9, 0, 9, 4, 1]


def rules_net(rules, names=None):
    names = names or [f"g{i}" for i in range(len(rules))]
    body = "\n".join(f"rule {g} := {r}" for g, r in zip(names, rules))
    return parse_network(f"network t\np 2\ngenes {' '.join(names)}\n{body}\n")


def test_not_rule():
    assert list(build_transition_map(rules_net(["NOT g0"])).images) == [1, 0]


def test_swap_rules_synchronous():
    f = build_transition_map(rules_net(["g1", "g0"]))
    assert list(f.images) == [0, 2, 1, 3]
    assert f(1) == 2  # (1,0) -> (0,1)


def test_identity_and_constant_rules():
    f = build_transition_map(rules_net(["g0", "g1", "g2"]))
    assert list(f.images) == list(range(8))
    g = build_transition_map(rules_net(["0", "0", "0"]))
    assert not g.images.any()


def test_precedence_and_operators():
    names = ["a", "b", "c"]
    e1 = parse_expression("a | b & !c", names)
    e2 = parse_expression("a OR (b AND (NOT c))", names)
    e3 = parse_expression("a or b and ~c", names)
    states = np.array([[x >> i & 1 for i in range(3)] for x in range(8)])
    from padicgrn.network import evaluate
    want = states[:, 0] | (states[:, 1] & (1 - states[:, 2]))
    for e in (e1, e2, e3):
        assert list(evaluate(e, states)) == list(want)


def test_parse_errors_carry_position():
    with pytest.raises(NetworkFormatError) as ei:
        parse_network("network t\np 2\ngenes a b\nrule a := a & zz\nrule b := b\n")
    assert ei.value.line == 4
    with pytest.raises(NetworkFormatError):
        parse_network("network t\np 2\ngenes a b\nrule a := (a & b\nrule b := b\n")
    with pytest.raises(NetworkFormatError):
        parse_network("network t\np 4\ngenes a\ntable\n0 0\n1 1\n2 2\n3 3\n")
    with pytest.raises(NetworkFormatError):
        parse_network("network t\np 2\ngenes a b\ntable\n0 0\n1 1\n2 2\n")
    with pytest.raises(NetworkFormatError):
        parse_network("network t\np 2\ngenes a\ntable\n0 0\n0 1\n")
    with pytest.raises(NetworkFormatError):
        parse_network("network t\np 2\ngenes a\ntable\n0 0\n1 2\n")


def test_table_any_row_order_and_crlf():
    text = "# c\r\nnetwork t\r\np 3\r\ngenes a\r\ntable\r\n2 0\r\n0 1 # tail\r\n1 2\r\n"
    f = build_transition_map(parse_network(text))
    assert list(f.images) == [1, 2, 0]


def test_toy_builtin():
    net = builtin_dataset("toy4")
    f = build_transition_map(net)
    assert (net.N, net.p) == (4, 2)
    assert list(f.images) == TOY
    assert f(0) == 0 and f(15) == 1 and f(3) == 9 and f(10) == 4


def test_athaliana_builtin(ath_net, ath):
    assert (ath_net.N, ath_net.p) == (13, 2)
    assert len(find_fixed_points(ath)) == 10
    assert set(ath_net.orderings) >= {"pi_star", "source"}
    labels = labels_by_encoding(ath_net)
    assert set(labels) == find_fixed_points(ath)


def test_missing_dataset(monkeypatch, tmp_path):
    monkeypatch.setenv("GRN_PADIC_DATA", str(tmp_path))
    with pytest.raises(DatasetMissingError):
        builtin_dataset("athaliana13")


def test_rules_equal_their_table(ath_net, ath):
    table_net = network_from_table("x", 2, ath_net.gene_names, ath.images.tolist())
    assert build_transition_map(table_net) == ath


def test_format_round_trip(ath_net):
    again = parse_network(format_network(ath_net))
    assert build_transition_map(again) == build_transition_map(ath_net)
    assert again.orderings == ath_net.orderings
    assert again.labels == ath_net.labels


@given(st.integers(1, 5), st.integers(0, 2 ** 31), st.permutations(range(5)))
def test_relabel_is_digit_permutation(N, seed, perm5):
    rng = np.random.default_rng(seed)
    f = TransitionMap(2, N, rng.integers(0, 2 ** N, 2 ** N))
    perm = [k for k in perm5 if k < N]
    g = f.relabel(perm)
    from padicgrn.padic_core import decode, encode
    for m in range(2 ** N):
        cfg = decode(m, N, 2)
        img = decode(f(m), N, 2)
        assert g(encode(cfg, perm, 2)) == encode(img, perm, 2)


def test_map_helpers():
    assert identity_map(3, 3).size == 27
    assert set(constant_map(3, 2, 5).images) == {5}
    with pytest.raises(ValueError):
        TransitionMap(2, 2, [0, 1, 2, 4])
