import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import T, brute_force_select, random_stores
from neurovectors import (
    CostCounters,
    EnergyParams,
    FallbackPolicy,
    NeurovectorRecord,
    NeurovectorStore,
    Task,
    Tokenizer,
    energy,
    make_token,
    predict_one,
    select_neurovector,
    tokenize_instance,
)
from neurovectors.data import Column, ColumnKind, Schema
from neurovectors.errors import (
    MissingValueError,
    NoMatchError,
    NoModelError,
    StoreCorruptionError,
    TokenError,
)

CLS = Task.CLASSIFICATION
REG = Task.REGRESSION


def schema_of(*cols, target="y", task=CLS):
    columns = tuple(Column(n, k) for n, k in cols) + (Column(target, ColumnKind.CATEGORICAL),)
    return Schema(columns, target, task)


class TestMakeToken:
    def test_concatenates_with_separator(self):
        assert make_token("alcohol", "9.4") == "alcohol\x1f9.4"

    def test_no_cross_feature_collision(self):
        assert make_token("x1", "23") != make_token("x12", "3")

    def test_categorical_passthrough(self):
        assert make_token("diagnosis", "M") == "diagnosis\x1fM"

    @pytest.mark.parametrize("name", ["", "a\x1fb"])
    def test_rejects_bad_feature_names(self, name):
        with pytest.raises(TokenError):
            make_token(name, "1")

    def test_rejects_separator_in_value(self):
        with pytest.raises(TokenError):
            make_token("a", "1\x1f2")

    @given(st.text(min_size=1).filter(lambda s: "\x1f" not in s), st.text().filter(lambda s: "\x1f" not in s))
    def test_exactly_one_separator_and_invertible(self, name, value):
        tok = make_token(name, value)
        assert tok.count("\x1f") == 1
        assert tok.split("\x1f") == [name, value]


class TestTokenizeInstance:
    def test_three_features_in_schema_order(self):
        schema = schema_of(("a", ColumnKind.NUMERIC), ("b", ColumnKind.CATEGORICAL), ("c", ColumnKind.NUMERIC))
        row = {"c": "2.5", "a": "1", "b": "x", "y": "t"}
        assert tokenize_instance(row, schema) == [T("a", 1), T("b", "x"), T("c", 2.5)]

    def test_single_feature(self):
        schema = schema_of(("a", ColumnKind.NUMERIC))
        assert len(tokenize_instance({"a": "3", "y": "t"}, schema)) == 1

    def test_missing_value_rejected_by_default(self):
        schema = schema_of(("a", ColumnKind.NUMERIC), ("b", ColumnKind.NUMERIC))
        with pytest.raises(MissingValueError):
            tokenize_instance({"a": "1", "b": " ", "y": "t"}, schema)

    def test_missing_value_skipped_when_configured(self):
        schema = schema_of(("a", ColumnKind.NUMERIC), ("b", ColumnKind.NUMERIC))
        toks = tokenize_instance({"a": "1", "b": "", "y": "t"}, schema, Tokenizer(skip_missing=True))
        assert toks == [T("a", 1)]

    def test_numeric_forms_collapse(self):
        schema = schema_of(("a", ColumnKind.NUMERIC))
        forms = {tuple(tokenize_instance({"a": v, "y": "t"}, schema)) for v in ("2", "2.0", "2.00", " 2 ")}
        assert len(forms) == 1

    def test_quantization(self):
        schema = schema_of(("a", ColumnKind.NUMERIC))
        tk = Tokenizer(decimals=1)
        assert tokenize_instance({"a": "0.123", "y": "t"}, schema, tk) == [T("a", 0.1)]

    def test_counts_hash_ops(self):
        schema = schema_of(("a", ColumnKind.NUMERIC), ("b", ColumnKind.NUMERIC))
        c = CostCounters()
        tokenize_instance({"a": "1", "b": "2", "y": "t"}, schema, counters=c)
        assert c.hash_ops == 2


class TestInsert:
    def test_first_insert(self):
        store = NeurovectorStore(CLS)
        nv = store.insert([T("a", 1), T("b", 2), T("c", 3)], "pos")
        assert nv == 0
        assert len(store.index) == 3
        assert all(ids == [0] for ids in store.index.values())
        rec = store.records[0]
        assert (rec.use, rec.success, rec.cum_abs_error) == (0, 0, 0.0)

    def test_shared_token_posting_order(self):
        store = NeurovectorStore(CLS)
        store.insert([T("a", 1), T("b", 2)], "x")
        store.insert([T("a", 1), T("b", 3)], "y")
        assert store.index[T("a", 1)] == [0, 1]

    def test_ids_are_dense(self):
        store = NeurovectorStore(CLS)
        ids = [store.insert([T("a", i)], "x") for i in range(456)]
        assert ids[-1] == 455

    def test_target_variant_mismatch(self):
        with pytest.raises(StoreCorruptionError):
            NeurovectorStore(CLS).insert([T("a", 1)], 1.0)
        with pytest.raises(StoreCorruptionError):
            NeurovectorStore(REG).insert([T("a", 1)], "x")

    def test_empty_tokens(self):
        with pytest.raises(StoreCorruptionError):
            NeurovectorStore(CLS).insert([], "x")

    def test_counts_creations(self):
        c = CostCounters()
        NeurovectorStore(CLS).insert([T("a", 1)], "x", counters=c)
        assert c.nv_creations == 1


class TestCandidateSet:
    def test_single_nv(self):
        store = NeurovectorStore(CLS)
        store.insert([T("a", 1), T("b", 2)], "x")
        assert store.candidate_set([T("a", 1), T("b", 2), T("c", 3)]) == {0: 2}

    def test_no_hits(self, three_nv_store):
        assert three_nv_store.candidate_set([T("q", 1)]) == {}

    def test_three_nv_example(self, three_nv_store):
        query = [T("a", 1), T("b", 2), T("c", 3)]
        oracle = {r.id: len(set(query) & set(r.tokens)) for r in three_nv_store.records}
        oracle = {k: v for k, v in oracle.items() if v}
        assert oracle == {0: 2, 1: 2, 2: 1}
        assert three_nv_store.candidate_set(query) == oracle

    def test_one_lookup_per_token(self, three_nv_store):
        c = CostCounters()
        three_nv_store.candidate_set([T("a", 1), T("zz", 0), T("c", 3)], c)
        assert c.index_lookups == 3
        assert c.searches == 1


class TestEnergy:
    def rec(self, use, success, err=0.0):
        return NeurovectorRecord(0, "x", (T("a", 1),), use, success, err)

    def test_all_successes(self):
        assert energy(self.rec(5, 5), CLS) == 5.0

    def test_half_successes(self):
        assert energy(self.rec(4, 2), CLS) == 1.0

    def test_regression_without_error(self):
        assert energy(self.rec(1, 1, 0.0), REG, EnergyParams(alpha=1.0)) == 1.0

    def test_regression_damped(self):
        assert energy(self.rec(1, 1, 2.0), REG, EnergyParams(alpha=0.5)) == pytest.approx(0.3679, abs=1e-4)

    def test_unused_is_zero(self):
        assert energy(self.rec(0, 0), CLS) == 0.0
        assert energy(self.rec(0, 0), REG) == 0.0

    @given(st.integers(1, 1000), st.data())
    def test_identities(self, use, data):
        success = data.draw(st.integers(0, use))
        err = data.draw(st.floats(0, 50))
        alpha = data.draw(st.floats(0.01, 5))
        p = EnergyParams(alpha=alpha)
        e_cls = energy(self.rec(use, success), CLS, p)
        e_reg = energy(self.rec(use, success, err), REG, p)
        if success == use:
            assert e_cls == success
        assert e_reg <= e_cls
        if err == 0:
            assert e_reg == e_cls
        elif success > 0 and math.exp(-alpha * err) < 1.0:
            assert e_reg < e_cls
        more_err = data.draw(st.floats(0, 50))
        assert energy(self.rec(use, success, err + more_err), REG, p) <= e_reg
        if success < use:
            assert energy(self.rec(use, success + 1), CLS, p) >= e_cls

    def test_invalid_params(self):
        with pytest.raises(ValueError):
            EnergyParams(alpha=0)
        with pytest.raises(ValueError):
            EnergyParams(tolerance=-1)


class TestSelect:
    def test_count_winner(self, three_nv_store):
        assert select_neurovector({0: 2, 1: 1}, three_nv_store).id == 0

    def test_energy_breaks_count_tie(self, three_nv_store):
        r0, r1 = three_nv_store.records[:2]
        r0.use, r0.success = 1, 1  # E = 1
        r1.use, r1.success = 4, 4  # E = 4
        chosen = select_neurovector({0: 2, 1: 2}, three_nv_store)
        assert (chosen.id, chosen.energy) == (1, 4.0)

    def test_lowest_id_breaks_full_tie(self, three_nv_store):
        assert select_neurovector({1: 2, 0: 2}, three_nv_store).id == 0

    def test_empty(self, three_nv_store):
        assert select_neurovector({}, three_nv_store) is None


class TestPredictOne:
    def test_exact_match(self):
        store = NeurovectorStore(CLS)
        store.insert([T("a", 1), T("b", 2)], "pos")
        out = predict_one(store, [T("a", 1), T("b", 2)])
        assert (out.predicted, out.match_count, out.used_fallback) == ("pos", 2, False)

    def test_fallback(self):
        store = NeurovectorStore(CLS)
        store.insert([T("a", 1)], "pos")
        out = predict_one(store, [T("a", 2)], fallback=FallbackPolicy("value", "neg"))
        assert out.predicted == "neg"
        assert out.used_fallback and out.selected_id is None

    def test_three_nv_full_tie(self, three_nv_store):
        query = [T("a", 1), T("b", 2), T("c", 3)]
        expected = brute_force_select(three_nv_store, query, CLS)
        assert expected == 0
        out = predict_one(three_nv_store, query)
        assert out.selected_id == expected
        assert out.predicted == "x"
        assert out.candidate_count == 3

    def test_empty_store_without_fallback(self):
        with pytest.raises(NoModelError):
            predict_one(NeurovectorStore(CLS), [T("a", 1)])

    def test_no_match_without_fallback(self, three_nv_store):
        with pytest.raises(NoMatchError):
            predict_one(three_nv_store, [T("q", 1)])


class TestRecordOutcome:
    def test_classification_correct(self, three_nv_store):
        rec = three_nv_store.records[0]
        rec.use, rec.success = 3, 2
        three_nv_store.record_outcome(0, "x", EnergyParams())
        assert (rec.use, rec.success) == (4, 3)

    def test_classification_wrong(self, three_nv_store):
        rec = three_nv_store.records[0]
        rec.use, rec.success = 3, 2
        three_nv_store.record_outcome(0, "y", EnergyParams())
        assert (rec.use, rec.success) == (4, 2)
        assert rec.cum_abs_error == 0.0

    def test_regression_error_accumulates(self):
        store = NeurovectorStore(REG)
        store.insert([T("a", 1)], 5.0)
        rec = store.record_outcome(0, 7.5, EnergyParams(tolerance=0.0))
        assert (rec.use, rec.success, rec.cum_abs_error) == (1, 0, 2.5)

    def test_regression_tolerance(self):
        store = NeurovectorStore(REG)
        store.insert([T("a", 1)], 5.0)
        rec = store.record_outcome(0, 5.25, EnergyParams(tolerance=0.5))
        assert (rec.use, rec.success, rec.cum_abs_error) == (1, 1, 0.25)

    def test_unknown_id(self, three_nv_store):
        with pytest.raises(StoreCorruptionError):
            three_nv_store.record_outcome(7, "x", EnergyParams())

    @given(st.lists(st.tuples(st.integers(0, 2), st.sampled_from("xyz")), max_size=60))
    def test_success_never_exceeds_use(self, events):
        store = NeurovectorStore(CLS)
        for label in "xyz":
            store.insert([T("a", label)], label)
        before = [(r.use, r.success) for r in store.records]
        for nv, actual in events:
            store.record_outcome(nv, actual, EnergyParams())
            after = [(r.use, r.success) for r in store.records]
            assert all(u1 >= u0 and s1 >= s0 for (u0, s0), (u1, s1) in zip(before, after))
            assert all(s <= u for u, s in after)
            before = after


class TestProperties:
    @settings(max_examples=150, deadline=None)
    @given(random_stores())
    def test_matches_brute_force_classification(self, case):
        store, query = case
        expected = brute_force_select(store, query, CLS)
        if expected is None:
            assert store.candidate_set(query) == {}
        else:
            assert predict_one(store, query).selected_id == expected

    @settings(max_examples=150, deadline=None)
    @given(random_stores(task=REG), st.sampled_from([0.1, 1.0, 3.0]))
    def test_matches_brute_force_regression(self, case, alpha):
        store, query = case
        expected = brute_force_select(store, query, REG, alpha)
        chosen = store.select(store.candidate_set(query), EnergyParams(alpha=alpha))
        assert (chosen.id if chosen else None) == expected

    @settings(max_examples=100, deadline=None)
    @given(random_stores())
    def test_lookup_budget_and_count_bounds(self, case):
        store, query = case
        c = CostCounters()
        cands = store.candidate_set(query, c)
        assert c.index_lookups == len(query)
        assert all(0 < m <= len(query) for m in cands.values())
        for rec in store.records[:5]:
            assert store.candidate_set(list(rec.tokens))[rec.id] == len(rec.tokens)

    @settings(max_examples=50, deadline=None)
    @given(random_stores(max_nvs=40), st.randoms(use_true_random=False))
    def test_determinism_under_equivalent_histories(self, case, rnd):
        store, query = case
        # same records, posting lists built in a different interleaving
        clone = NeurovectorStore(CLS, records=[NeurovectorRecord(**vars(r)) for r in store.records])
        toks = list(clone.index.items())
        rnd.shuffle(toks)
        clone.index = {k: v for k, v in toks}
        fb = FallbackPolicy("value", "a")
        assert predict_one(store, query, fallback=fb) == predict_one(clone, query, fallback=fb)
