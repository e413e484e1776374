import json
import logging
import random

import pytest

from contextjoin.config import EngineConfig
from contextjoin.errors import BuildError, QueryNotFoundError
from contextjoin.ingest import ColumnRef
from contextjoin.search import (
    IndexBundle,
    SearchEngine,
    SearchRequest,
    build_indexes,
    make_provider,
    result_to_dict,
)

from conftest import make_catalog
from stub_embed import StubServer

CONFIG = EngineConfig(seed=11)


def engine_for(catalog, provider=None, config=None):
    config = config or catalog.config
    provider = provider or make_provider(config)
    return SearchEngine(build_indexes(catalog, provider, config), provider, config)


def dominated_lake():
    """One candidate shares values, metadata wording, and value text with q."""
    return make_catalog(
        {
            "q": {"city": ["austin", "dallas", "houston", "waco"]},
            "twin": {"city": ["austin", "dallas", "houston", "waco"]},
            "off": {"city": ["paris", "lyon"]},
        },
        metadata={
            "q": {"table_name": "city census", "tags": ["texas", "cities"]},
            "twin": {"table_name": "city census copy", "tags": ["texas", "cities"]},
            "off": {"table_name": "france towns", "tags": ["france"]},
        },
        config=CONFIG,
    )


class TestBuildIndexes:
    def test_bundle_round_trip_byte_identical(self, tmp_path):
        catalog = dominated_lake()
        bundle = build_indexes(catalog, make_provider(CONFIG), CONFIG)
        first = tmp_path / "idx1"
        second = tmp_path / "idx2"
        bundle.save(first)
        IndexBundle.load(first).save(second)
        for name in ("catalog.json", "inverted.cjii", "minhash.cjmh", "metadata.cjem", "values.cjem"):
            assert (first / name).read_bytes() == (second / name).read_bytes()

    def test_rebuild_idempotent(self, tmp_path):
        catalog = dominated_lake()
        a = build_indexes(catalog, make_provider(CONFIG), CONFIG)
        b = build_indexes(catalog, make_provider(CONFIG), CONFIG)
        da, db = tmp_path / "a", tmp_path / "b"
        a.save(da)
        b.save(db)
        assert (da / "minhash.cjmh").read_bytes() == (db / "minhash.cjmh").read_bytes()
        assert (da / "catalog.json").read_bytes() == (db / "catalog.json").read_bytes()

    def test_adding_table_grows_postings(self):
        small = make_catalog({"a": {"c": ["x", "y"]}}, config=CONFIG)
        grown = make_catalog({"a": {"c": ["x", "y"]}, "b": {"c": ["y", "z"]}}, config=CONFIG)
        provider = make_provider(CONFIG)
        postings_small = build_indexes(small, provider, CONFIG).inverted.postings
        postings_grown = build_indexes(grown, provider, CONFIG).inverted.postings
        assert set(postings_small) <= set(postings_grown)

    def test_minhash_store_size_formula(self, tmp_path):
        catalog = dominated_lake()
        bundle = build_indexes(catalog, make_provider(CONFIG), CONFIG)
        sizes = bundle.save(tmp_path)
        per_record = sum(
            (4 + len(r.table_id)) + (4 + len(r.column_name)) + 800
            for r in bundle.minhash.refs
        )
        assert sizes["minhash.cjmh"] == 5 + 8 + 4 + per_record

    def test_remote_down_without_fallback_is_build_error(self):
        catalog = dominated_lake()
        config = CONFIG.replace(provider="remote", embed_url="http://127.0.0.1:9", embed_timeout=0.2)
        with pytest.raises(BuildError):
            build_indexes(catalog, make_provider(config), config)

    def test_remote_down_with_fallback_builds(self):
        catalog = dominated_lake()
        config = CONFIG.replace(
            provider="remote",
            embed_url="http://127.0.0.1:9",
            embed_timeout=0.2,
            fallback_local=True,
        )
        bundle = build_indexes(catalog, make_provider(config), config)
        assert len(bundle.value_vectors) > 0


class TestSearch:
    def test_dominant_twin_ranks_first_with_all_sources(self):
        engine = engine_for(dominated_lake())
        results = engine.search(SearchRequest(query=ColumnRef("q", "city"), k=5))
        top = results[0]
        assert top.candidate == ColumnRef("twin", "city")
        assert top.sources == {"Syntactic", "Metadata", "ValueSemantics"}
        assert top.rank == 1

    def test_all_results_have_sources(self):
        engine = engine_for(dominated_lake())
        results = engine.search(SearchRequest(query=ColumnRef("q", "city"), k=10))
        assert results
        assert all(r.sources for r in results)

    def test_query_never_in_results(self):
        engine = engine_for(dominated_lake())
        results = engine.search(SearchRequest(query=ColumnRef("q", "city"), k=10))
        assert ColumnRef("q", "city") not in [r.candidate for r in results]

    def test_closeness_non_increasing_and_ranks_sequential(self):
        engine = engine_for(dominated_lake())
        results = engine.search(SearchRequest(query=ColumnRef("q", "city"), k=10))
        closenesses = [r.closeness for r in results]
        assert closenesses == sorted(closenesses, reverse=True)
        assert [r.rank for r in results] == list(range(1, len(results) + 1))

    def test_random_hex_lake_no_crash(self):
        rng = random.Random(5)
        tables = {
            f"t{i}": {"c": [f"{rng.getrandbits(64):016x}" for _ in range(10)]}
            for i in range(6)
        }
        tables["q"] = {"c": [f"{rng.getrandbits(64):016x}" for _ in range(10)]}
        engine = engine_for(make_catalog(tables, config=CONFIG))
        results = engine.search(SearchRequest(query=ColumnRef("q", "c"), k=5))
        assert all(r.sources for r in results)  # may be empty or weak, never broken

    def test_deterministic_across_engines(self):
        a = engine_for(dominated_lake())
        b = engine_for(dominated_lake())
        request = SearchRequest(query=ColumnRef("q", "city"), k=10)
        ra = [(r.candidate, r.closeness) for r in a.search(request)]
        rb = [(r.candidate, r.closeness) for r in b.search(request)]
        assert ra == rb

    def test_ad_hoc_query_table(self, tmp_path):
        engine = engine_for(dominated_lake())
        query_csv = tmp_path / "adhoc.csv"
        query_csv.write_text("city\naustin\ndallas\nhouston\n", encoding="utf-8")
        results = engine.search(
            SearchRequest(query_table=query_csv, query_column="city", k=3)
        )
        assert results[0].candidate in (ColumnRef("twin", "city"), ColumnRef("q", "city"))

    def test_unknown_query_raises_with_suggestions(self):
        engine = engine_for(dominated_lake())
        with pytest.raises(QueryNotFoundError) as err:
            engine.search(SearchRequest(query=ColumnRef("q", "town"), k=3))
        assert "q.city" in str(err.value)

    def test_unknown_adhoc_column_suggests(self, tmp_path):
        engine = engine_for(dominated_lake())
        query_csv = tmp_path / "adhoc.csv"
        query_csv.write_text("city\naustin\n", encoding="utf-8")
        with pytest.raises(QueryNotFoundError) as err:
            engine.search(SearchRequest(query_table=query_csv, query_column="ciyt", k=3))
        assert "city" in str(err.value)

    def test_minhash_mode_runs_without_inverted(self):
        engine = engine_for(dominated_lake())
        results = engine.search(
            SearchRequest(query=ColumnRef("q", "city"), k=5, minhash_mode=True)
        )
        assert results[0].candidate == ColumnRef("twin", "city")

    def test_budget_smaller_than_k_warns(self, caplog):
        with caplog.at_level(logging.WARNING):
            SearchRequest(query=ColumnRef("q", "c"), k=10, budget=5)
        assert any("budget" in rec.message for rec in caplog.records)

    def test_config_minhash_intersection_mode(self):
        # full strategy set, but the intersection criterion estimated
        # from signatures instead of posting lists
        config = CONFIG.replace(intersection_mode="minhash")
        engine = engine_for(dominated_lake(), config=config)
        results = engine.search(SearchRequest(query=ColumnRef("q", "city"), k=5))
        assert results[0].candidate == ColumnRef("twin", "city")
        assert results[0].per_criterion.intersection == 1.0  # identical sets estimate 1

    def test_ablation_only_changes_ranking_basis(self):
        engine = engine_for(dominated_lake())
        full = engine.search(SearchRequest(query=ColumnRef("q", "city"), k=5))
        only = engine.search(
            SearchRequest(query=ColumnRef("q", "city"), k=5, only="unique_values")
        )
        assert {r.candidate for r in full} == {r.candidate for r in only}

    def test_result_json_shape(self):
        engine = engine_for(dominated_lake())
        results = engine.search(SearchRequest(query=ColumnRef("q", "city"), k=1))
        doc = result_to_dict(results[0])
        assert set(doc) == {"rank", "table", "column", "closeness", "criteria", "sources"}
        assert set(doc["criteria"]) == set(
            (
                "unique_values",
                "intersection",
                "join_size",
                "reverse_join_size",
                "value_semantics",
                "disjoint_value_semantics",
                "metadata_semantics",
            )
        )
        explained = result_to_dict(results[0], explain=True)
        assert "contributions" in explained
        json.dumps(doc)  # serializable


class TestProviderDegradation:
    class FlakyProvider:
        """Healthy at build time, dead at search time."""

        def __init__(self, dims=384):
            from contextjoin.embedding import LocalHashEmbedder

            self.dims = dims
            self._inner = LocalHashEmbedder(dims)
            self.dead = False

        def embed(self, texts):
            if self.dead:
                from contextjoin.errors import ProviderUnavailableError

                raise ProviderUnavailableError("gone")
            return self._inner.embed(texts)

    def test_search_survives_provider_death(self):
        provider = self.FlakyProvider()
        catalog = dominated_lake()
        engine = engine_for(catalog, provider=provider)
        provider.dead = True
        results = engine.search(SearchRequest(query=ColumnRef("q", "city"), k=5))
        # syntactic strategy alone still proposes the twin
        assert results
        assert results[0].candidate == ColumnRef("twin", "city")
        assert results[0].sources == {"Syntactic"}
        top = results[0].per_criterion
        assert not top.applicability["value_semantics"]
        assert not top.applicability["metadata_semantics"]


@pytest.fixture(scope="module")
def stub():
    server = StubServer().start()
    yield server
    server.stop()


class TestRemoteInterchangeability:
    def test_pipeline_valid_under_remote_provider(self, stub):
        from contextjoin.embedding import RemoteEmbedder

        catalog = dominated_lake()
        config = CONFIG.replace(provider="remote", embed_url=stub.url, dims=64)
        provider = RemoteEmbedder(stub.url)
        engine = engine_for(catalog, provider=provider, config=config)
        results = engine.search(SearchRequest(query=ColumnRef("q", "city"), k=5))
        assert results
        assert [r.rank for r in results] == list(range(1, len(results) + 1))
        closenesses = [r.closeness for r in results]
        assert closenesses == sorted(closenesses, reverse=True)
        assert all(r.sources for r in results)
        # exact-overlap criteria are provider-independent
        twin = next(r for r in results if r.candidate == ColumnRef("twin", "city"))
        assert twin.per_criterion.intersection == 1.0
