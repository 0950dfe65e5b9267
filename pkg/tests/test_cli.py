import json
import random
from pathlib import Path

import pytest

from tfab.arith import INF
from tfab.cli import run_command
from tfab.dsl import (
    ParseError,
    UnknownIdentifier,
    document_from_group,
    parse_element,
    parse_presentation,
    print_presentation,
)
from tfab.groups import equal_subgroups
from tfab.typesys import Characteristic

GOLDEN = Path(__file__).parent / "golden"

SIMPLE = "group G { rank 2; base e1 : 2^inf; base e2 : Z; rel (e1+e2)/3; }"
POCKET = "group P { rank 2; base e1 : 2^inf; base e2 : 3^inf; rel (e1+e2)/5; }"


@pytest.fixture
def gfile(tmp_path):
    p = tmp_path / "g.tfab"
    p.write_text(SIMPLE)
    return str(p)


@pytest.fixture
def pocketfile(tmp_path):
    p = tmp_path / "pocket.tfab"
    p.write_text(POCKET)
    return str(p)


# -- grammar ------------------------------------------------------------------

def test_parse_example():
    doc = parse_presentation(SIMPLE)
    g = doc.to_group()
    assert g.prime_universe == {2, 3}
    assert doc.name == "G" and doc.rank == 2


def test_parse_missing_semicolon():
    with pytest.raises(ParseError) as exc:
        parse_presentation("group G { rank 2; base e1 : 2^inf base e2 : Z; }")
    assert exc.value.line == 1 and exc.value.col > 0


def test_parse_unknown_identifier():
    with pytest.raises(UnknownIdentifier):
        parse_presentation(
            "group G { rank 2; base e1 : Z; base e2 : Z; rel (e1+e3)/3; }"
        )


def test_parse_comments_and_whitespace():
    text = """
    # a comment
    group   G {
      rank 1;   # inline too
      base x : 3^2 * 2^inf;
    }
    """
    doc = parse_presentation(text)
    assert doc.base[0][1] == Characteristic({2: INF, 3: 2})


def test_rank_mismatch():
    with pytest.raises(ParseError):
        parse_presentation("group G { rank 3; base e1 : Z; }")


# -- round trip ----------------------------------------------------------------

def _random_document(rng):
    n = rng.randrange(1, 5)
    primes = [2, 3, 5, 7, 11, 13]
    base = []
    for i in range(n):
        entries = {}
        for p in rng.sample(primes, rng.randrange(0, 3)):
            entries[p] = INF if rng.random() < 0.5 else rng.randrange(1, 4)
        base.append((f"g{i+1}", Characteristic(entries)))
    rels = []
    for _ in range(rng.randrange(0, 3)):
        coeffs = {}
        for i in rng.sample(range(n), rng.randrange(1, n + 1)):
            c = rng.choice([-2, -1, 1, 2, 3])
            coeffs[f"g{i+1}"] = c
        m = rng.choice([2, 3, 4, 5, 6, 7])
        rels.append((coeffs, m))
    from tfab.dsl import PresentationDocument

    return PresentationDocument("R", n, base, rels)


def test_round_trip_corpus():
    rng = random.Random(515)
    corpus = [parse_presentation(SIMPLE), parse_presentation(POCKET)]
    # the classical example families at small sizes
    from tfab.cornerlab import (
        Example1Config,
        Example2Config,
        Example3Config,
        build_example1,
        build_example2,
        build_example3,
    )

    for g in (
        build_example1(Example1Config.default(2)).G,
        build_example1(Example1Config.default(3)).G,
        build_example2(Example2Config.default(1)).G,
        build_example3(Example3Config.default(2)).G,
        build_example3(Example3Config.default(3)).G,
    ):
        corpus.append(document_from_group(g))
    while len(corpus) < 55:
        corpus.append(_random_document(rng))
    for doc in corpus:
        text = print_presentation(doc)
        doc2 = parse_presentation(text)
        assert print_presentation(doc2) == text
        assert equal_subgroups(doc.to_group(), doc2.to_group())


def test_json_round_trip():
    from tfab.dsl import PresentationDocument

    doc = parse_presentation(SIMPLE)
    data = json.loads(json.dumps(doc.to_jsonable()))
    doc2 = PresentationDocument.from_jsonable(data)
    assert equal_subgroups(doc.to_group(), doc2.to_group())


# -- exit codes -------------------------------------------------------------------

def test_exit_member(gfile):
    assert run_command(["member", gfile, "--elt", "(e1+e2)/3"]) == 0
    assert run_command(["member", gfile, "--elt", "(e1-e2)/3"]) == 1


def test_exit_parse_error(tmp_path):
    p = tmp_path / "bad.tfab"
    p.write_text("group X { rank 1; base e1 : 2^inf }")
    assert run_command(["validate", str(p)]) == 3


def test_exit_usage():
    assert run_command(["no-such-command"]) == 2
    assert run_command(["member"]) == 2


def test_exit_clipped(pocketfile, gfile):
    assert run_command(["clipped", pocketfile, "--bound", "5"]) == 0  # exact
    assert run_command(["clipped", gfile]) == 1  # rank-one found


def test_exit_clipped_inconclusive(tmp_path):
    # rank-3 block with a 2-dimensional divisible subspace: the exactness
    # argument does not apply, so a clipped verdict is bounded (exit 4)
    text = (
        "group W { rank 3; base a : 2^inf; base b : 2^inf; base c : 3^inf; "
        "rel (a+c)/5; rel (b+c)/7; }"
    )
    p = tmp_path / "w.tfab"
    p.write_text(text)
    code = run_command(["clipped", str(p), "--bound", "2"])
    assert code in (1, 4)


def test_height_and_type(gfile):
    assert run_command(["height", gfile, "--elt", "e1", "--prime", "2"]) == 0
    assert run_command(["type", gfile, "--elt", "e1+e2"]) == 0
    assert run_command(["height", gfile, "--elt", "e1/5", "--prime", "2"]) == 1


def test_missing_file():
    assert run_command(["validate", "/nonexistent/x.tfab"]) == 2


def test_stein_and_end(gfile, pocketfile):
    assert run_command(["stein", gfile, "--type", "2"]) == 0
    assert run_command(["end", pocketfile]) == 0


def test_decompose_seed_env(gfile, monkeypatch):
    monkeypatch.setenv("TFAB_SEED", "7")
    assert run_command(["decompose", gfile]) == 0


# -- golden files -------------------------------------------------------------------

@pytest.mark.parametrize(
    "family,n",
    [("1", 3), ("2", 1), ("3", 2)],
)
def test_example_verify_golden(tmp_path, family, n):
    out = tmp_path / "report.json"
    code = run_command(
        ["example", family, "verify", "--n", str(n), "--json", "--out", str(out)]
    )
    assert code == 0
    got = out.read_text()
    golden = GOLDEN / f"example{family}_verify_n{n}.json"
    assert golden.exists(), f"golden file missing: {golden}"
    assert got == golden.read_text()


def test_example_verify_deterministic(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    run_command(["example", "1", "verify", "--n", "2", "--json", "--out", str(a)])
    run_command(["example", "1", "verify", "--n", "2", "--json", "--out", str(b)])
    assert a.read_text() == b.read_text()


# -- fuzzing (a lighter copy lives in the acceptance suite) -------------------------

def _mutate(rng, text: str) -> str:
    ops = rng.randrange(1, 4)
    s = list(text)
    for _ in range(ops):
        kind = rng.randrange(3)
        pos = rng.randrange(len(s)) if s else 0
        if kind == 0 and s:
            del s[pos]
        elif kind == 1:
            s.insert(pos, rng.choice("{}();/^*+-# abzZ019"))
        elif s:
            s[pos] = rng.choice("{}();/^*+-# abzZ019")
    return "".join(s)


def test_fuzz_never_crashes(tmp_path):
    rng = random.Random(99)
    base = SIMPLE
    p = tmp_path / "fuzz.tfab"
    for _ in range(200):
        text = _mutate(rng, base)
        p.write_text(text)
        code = run_command(["validate", str(p)])
        assert code in (0, 1, 2, 3, 4)
        try:
            parse_presentation(text)
        except ParseError:
            assert code == 3
        except Exception as e:  # no other exception class may escape
            pytest.fail(f"parser raised {type(e).__name__}: {e}")
