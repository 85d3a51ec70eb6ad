"""Smoke test for the python bindings: one pass over every exposed surface.

Usage: python3 test_smoke.py [path-to-synthetic-data-dir]
"""

import json
import math
import os
import sys
import tempfile

import tbsa


def data_dir():
    if len(sys.argv) > 1:
        return sys.argv[1]
    here = os.path.dirname(os.path.abspath(__file__))
    return os.path.join(here, "..", "..", "data", "synthetic")


def check_tags():
    assert tbsa.make_unified(tbsa.BoundaryTag.B, tbsa.Sentiment.POS) == tbsa.UnifiedTag.B_POS
    assert tbsa.unified_tag_name(tbsa.UnifiedTag.B_POS) == "B-POS"
    assert tbsa.parse_unified_tag("S-NEU") == tbsa.UnifiedTag.S_NEU
    assert tbsa.boundary_of(tbsa.UnifiedTag.E_NEG) == tbsa.BoundaryTag.E
    assert tbsa.sentiment_of(tbsa.UnifiedTag.E_NEG) == tbsa.Sentiment.NEG
    assert tbsa.sentiment_of(tbsa.UnifiedTag.O) is None
    assert tbsa.parse_boundary_tag("O") == tbsa.BoundaryTag.O
    assert tbsa.sentiment_name(tbsa.Sentiment.NEU) == "NEU"


def check_encode_decode():
    spans = [tbsa.TargetSpan(1, 2, tbsa.Sentiment.POS)]
    tags = tbsa.encode_unified(4, spans)
    assert [tbsa.unified_tag_name(t) for t in tags] == ["O", "B-POS", "E-POS", "O"]
    assert tbsa.decode_unified(tags) == spans

    # the decoder is lenient: a bare I still produces a span
    bare = [tbsa.parse_unified_tag(n) for n in ["O", "I-NEG", "O"]]
    decoded = tbsa.decode_unified(bare)
    assert decoded == [tbsa.TargetSpan(1, 1, tbsa.Sentiment.NEG)]

    btags = tbsa.encode_boundary(3, [tbsa.TargetSpan(0, 1)])
    assert [tbsa.boundary_tag_name(t) for t in btags] == ["B", "E", "O"]
    assert tbsa.decode_boundary(btags) == [tbsa.TargetSpan(0, 1)]

    # invalid spans surface as the mapped exception type
    try:
        tbsa.encode_unified(3, [tbsa.TargetSpan(0, 1, tbsa.Sentiment.POS),
                                tbsa.TargetSpan(1, 2, tbsa.Sentiment.NEG)])
    except tbsa.DataError:
        pass
    else:
        raise AssertionError("overlapping spans must raise DataError")


def check_corpus(d):
    text = "the\tO\nscreen\tB-POS\nshines\tE-POS\n\nok\tS-NEU\n"
    sents = tbsa.parse_conll(text)
    assert len(sents) == 2
    assert sents[0].tokens == ["the", "screen", "shines"]
    assert sents[0].spans == [tbsa.TargetSpan(1, 2, tbsa.Sentiment.POS)]
    assert tbsa.to_conll(sents, "unified") == text

    lex = tbsa.parse_lexicon("# comment\nGreat\nbad\n")
    assert len(lex) == 2
    assert lex.contains("great") and lex.contains("GREAT") and lex.contains("bad")

    sent = tbsa.Sentence("x", ["it", "is", "great"], [])
    assert tbsa.oe_labels(sent, lex, 1) == [0, 1, 0]

    corpus = tbsa.load_conll(os.path.join(d, "train.conll"))
    assert len(corpus) == 20
    lexicon = tbsa.load_lexicon(os.path.join(d, "lexicon.txt"))
    assert len(lexicon) > 0

    train, dev = tbsa.split_dev(corpus, 0.2, tbsa.derive_seed(7, 6))
    assert len(dev) == 4 and len(train) == 16
    ids = sorted(s.id for s in train + dev)
    assert ids == sorted(s.id for s in corpus)
    return corpus, lexicon


def check_model_cycle(corpus, lexicon):
    cfg = tbsa.ModelConfig()
    cfg.embedding_dim = 8
    cfg.boundary_hidden = 6
    cfg.unified_hidden = 6
    cfg.dropout = 0.2
    cfg.window = 2
    cfg.seed = 7
    cfg.validate()

    tcfg = tbsa.TrainConfig()
    tcfg.epochs = 2
    tcfg.lr0 = 0.01
    tcfg.validate()

    train_set, dev_set = corpus[:16], corpus[16:]
    vocab = tbsa.Vocabulary.from_sentences(train_set, dev_set)
    assert len(vocab) > 1 and vocab.lookup("zzz-unseen") == 0
    table = tbsa.load_embeddings("", vocab, cfg.embedding_dim, tbsa.derive_seed(cfg.seed, 1))
    assert table.dim == cfg.embedding_dim

    model = tbsa.make_model(cfg, table)
    history = tbsa.train(model, train_set, dev_set, lexicon, tcfg)
    assert len(history.epochs) == 2
    assert history.epochs[0].epoch == 1
    assert all(math.isfinite(r.loss_unified) for r in history.epochs)
    assert 0 <= history.best_epoch < 2

    tokens = corpus[0].tokens
    pred = model.predict(tokens)
    assert len(pred.unified) == len(tokens)
    assert len(pred.tags) == len(tokens)
    assert all(isinstance(t, str) for t in pred.tags)
    assert pred.spans == tbsa.decode_unified(pred.unified)

    ev = tbsa.evaluate_corpus(model, dev_set)
    assert 0.0 <= ev.unified.f1 <= 1.0
    assert ev.unified.n_gold == sum(len(s.spans) for s in dev_set)

    prf = tbsa.exact_match([tbsa.TargetSpan(0, 1, tbsa.Sentiment.POS)],
                           [tbsa.TargetSpan(0, 1, tbsa.Sentiment.POS)])
    prf.finalize()
    assert prf.tp == 1 and prf.f1 == 1.0

    with tempfile.TemporaryDirectory() as tmp:
        ckpt = os.path.join(tmp, "model.bin")
        model.save(ckpt)
        loaded = tbsa.load_model(ckpt)
        assert loaded.config.seed == cfg.seed
        assert loaded.predict(tokens).tags == pred.tags

        hist_path = os.path.join(tmp, "history.jsonl")
        tbsa.write_history_jsonl(history, cfg, tcfg, hist_path)
        with open(hist_path) as fh:
            lines = [json.loads(line) for line in fh if line.strip()]
        assert len(lines) == 3
        assert lines[0]["config"]["model"]["seed"] == cfg.seed
        assert lines[1]["epoch"] == 1

    try:
        tbsa.load_model(os.path.join("/nonexistent", "nope.bin"))
    except tbsa.DataError:
        pass
    else:
        raise AssertionError("a missing checkpoint must raise DataError")


def check_grad():
    cfg = tbsa.ModelConfig()
    cfg.embedding_dim = 4
    cfg.boundary_hidden = 4
    cfg.unified_hidden = 4
    cfg.window = 1
    cfg.dropout = 0.25
    cfg.seed = 11

    tokens = ["t0", "t1", "t2", "t3", "t4", "t5"]
    sent = tbsa.Sentence("probe", tokens,
                         [tbsa.TargetSpan(0, 1, tbsa.Sentiment.POS),
                          tbsa.TargetSpan(5, 5, tbsa.Sentiment.NEG)])
    vocab = tbsa.Vocabulary.from_sentences([sent])
    table = tbsa.load_embeddings("", vocab, cfg.embedding_dim, tbsa.derive_seed(cfg.seed, 1))
    model = tbsa.make_model(cfg, table)
    lex = tbsa.OpinionLexicon(["t3"])

    report = tbsa.grad_check(model, sent, lex, tolerance=1e-4)
    assert bool(report)
    assert report.pass_
    assert report.max_rel_error < 1e-4
    assert len(report.groups) == 55


def main():
    d = data_dir()
    check_tags()
    check_encode_decode()
    corpus, lexicon = check_corpus(d)
    check_model_cycle(corpus, lexicon)
    check_grad()
    print("python smoke test passed")


if __name__ == "__main__":
    main()
