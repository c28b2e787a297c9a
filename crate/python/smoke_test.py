"""Smoke test for the sentiparse_py extension module.

Build and install first:
    pip install --no-build-isolation -e crates/python
"""

import os
import tempfile

import sentiparse_py as sp


def main():
    assert sp.tokenize("It's GOOD!") == ["it", "'", "s", "good", "!"]

    train = sp.Corpus.synthetic(2000, seed=1, mix="training")
    test = sp.Corpus.synthetic(200, seed=2, mix="compositional")
    grammar = sp.learn_grammar(train, seed=1)
    rules = {rid: kind for rid, kind, _ in grammar.combination_rules()}
    assert rules.get("N→not [P]") == "negation", rules
    assert rules.get("P→very [P]") == "strengthen", rules

    weights = sp.train_ranker(grammar, train, epochs=2, seed=1)
    assert len(weights) > 0

    d = sp.decode(grammar, weights, "the movie is not good")
    assert d.label == "neg" and not d.no_evidence, d
    assert d.tree.startswith("(S (N"), d.tree
    assert abs(d.p_neg + d.p_pos - 1.0) < 1e-9

    oov = sp.decode(grammar, weights, "zzz qqq", fallback="pos")
    assert oov.label == "pos" and oov.no_evidence

    correct = sum(sp.classify(grammar, weights, text) == label for label, text in test.pairs())
    accuracy = correct / len(test)
    assert accuracy >= 0.95, accuracy

    with tempfile.TemporaryDirectory() as tmp:
        gpath, wpath = os.path.join(tmp, "g.txt"), os.path.join(tmp, "w.txt")
        grammar.save(gpath)
        weights.save(wpath)
        g2, w2 = sp.Grammar.load(gpath), sp.Weights.load(wpath)
        assert g2.combination_rules() == grammar.combination_rules()
        assert w2.items() == weights.items()

    try:
        sp.Corpus([("maybe", "fine")])
    except ValueError:
        pass
    else:
        raise AssertionError("bad label accepted")

    print(f"ok: {grammar.dictionary_size()} dictionary rules, "
          f"{len(rules)} combination rules, held-out accuracy {accuracy:.3f}")


if __name__ == "__main__":
    main()
