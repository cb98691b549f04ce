import pytest

import stmtc

PROBE = (
    "class Probe {\n  void run(Node node) {\n"
    "    NodeList children = node.getChildNodes();\n    int len = "
)


@pytest.fixture(scope="module")
def corpus(tmp_path_factory):
    root = tmp_path_factory.mktemp("corpus")
    assert stmtc.gen_corpus(str(root), seed=7, files=30) > 30
    return str(root)


@pytest.fixture(scope="module")
def engine(corpus):
    return stmtc.Engine(corpus)


def test_engine_loads(engine):
    assert engine.files > 30
    assert engine.excode_vocab > 10 and engine.lexical_vocab > 10


def test_motivating_completion(engine):
    top = engine.complete(PROBE, len(PROBE), top=5)
    assert "children . getLength ( ) ;" in [text for text, _ in top]
    scores = [score for _, score in top]
    assert scores == sorted(scores, reverse=True)
    assert engine.complete(PROBE, len(PROBE), top=5) == top


def test_get_length_shape_occurs_six_times(engine):
    needle = ["TYPE(int)", "VAR(int)", "OP(ASSIGN)", "VAR(NodeList)", "OP(ACC)",
              "CALL(NodeList,getLength,0,int)", "LP", "RP"]
    assert engine.occurrences(needle) == 6


def test_errors_carry_codes(engine, tmp_path):
    with pytest.raises(stmtc.StmtcError) as err:
        engine.complete(PROBE, 2)
    assert err.value.code == "CursorOutsideMethod"
    with pytest.raises(ValueError):
        stmtc.Engine(str(tmp_path / "missing"))


def test_save_writes_both_models(engine, tmp_path):
    engine.save(str(tmp_path))
    assert (tmp_path / "excode.sclm").exists()
    assert (tmp_path / "lexical.sclm").exists()


def test_evaluate(corpus):
    report = stmtc.evaluate(corpus, system="autosc", folds=3, max_points=40)
    assert report["points"] == 40
    tops = [report["top"][k] for k in range(1, 11)]
    assert tops == sorted(tops)
    with pytest.raises(stmtc.StmtcError):
        stmtc.evaluate(corpus, folds=1)
