#include <doctest.h>

#include <fstream>

#include "skillrec/embeddings.hpp"
#include "skillrec/random.hpp"
#include "support.hpp"

using namespace skillrec;

namespace {

VectorX<double> vec(std::initializer_list<double> xs) {
  VectorX<double> v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

TextVector tv(VectorX<double> v) { return {std::move(v), 1.0}; }

WordVectorStore small_store() {
  WordVectorStore store(3);
  store.insert("sql", vec({1, 0, 0}));
  store.insert("python", vec({0, 1, 0}));
  store.insert("query", vec({1, 1, 0}));
  return store;
}

VectorX<double> random_vec(Rng& rng, int dim) {
  VectorX<double> v(dim);
  for (int i = 0; i < dim; ++i) v[i] = rng.uniform(-1.0, 1.0);
  return v;
}

}  // namespace

TEST_SUITE("embeddings") {
  TEST_CASE("mean of in-vocabulary vectors") {
    const auto store = small_store();
    const auto one = embed_text(store, {"sql"});
    CHECK(one.values == vec({1, 0, 0}));
    CHECK(one.coverage == 1.0);

    const auto two = embed_text(store, {"sql", "python"});
    CHECK(two.values == vec({0.5, 0.5, 0}));

    const auto partial = embed_text(store, {"sql", "cobol", "fortran", "python"});
    CHECK(partial.values == vec({0.5, 0.5, 0}));
    CHECK(partial.coverage == 0.5);

    const auto none = embed_text(store, {"cobol"});
    CHECK(none.values == vec({0, 0, 0}));
    CHECK(none.coverage == 0.0);
    CHECK(embed_text(store, {}).values.size() == 3);
  }

  TEST_CASE("cosine examples") {
    CHECK(cosine(tv(vec({1, 2, 3})), tv(vec({1, 2, 3}))) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(cosine(tv(vec({1, 0, 0})), tv(vec({0, 1, 0}))) == 0.0);
    CHECK(cosine(tv(vec({0, 0, 0})), tv(vec({1, 1, 1}))) == 0.0);
    CHECK(cosine(tv(vec({1, 0})), tv(vec({-2, 0}))) == doctest::Approx(-1.0));
    CHECK(testing::error_of([] { cosine(tv(vec({1, 0})), tv(vec({1, 0, 0}))); }) == ErrorCode::kDimensionMismatch);
  }

  TEST_CASE("cosine symmetry and scale invariance") {
    Rng rng(3);
    for (int i = 0; i < 200; ++i) {
      const auto a = random_vec(rng, 7), b = random_vec(rng, 7);
      const double k = rng.uniform(0.01, 100.0);
      const double c = cosine(tv(a), tv(b));
      CHECK(std::abs(c - cosine(tv(b), tv(a))) <= 1e-12);
      CHECK(std::abs(c - cosine(tv(k * a), tv(b))) <= 1e-9);
      CHECK(c >= -1.0);
      CHECK(c <= 1.0);
      const double oracle = a.dot(b) / (a.norm() * b.norm());
      CHECK(std::abs(c - oracle) <= 1e-12);
    }
  }

  TEST_CASE("embedding ignores token order") {
    const auto store = small_store();
    Rng rng(8);
    std::vector<std::string> tokens{"sql", "python", "query", "sql", "unknown", "python"};
    const auto base = embed_text(store, tokens);
    for (int i = 0; i < 20; ++i) {
      rng.shuffle(tokens);
      CHECK((embed_text(store, tokens).values - base.values).norm() <= 1e-12);
    }
  }

  TEST_CASE("text similarity") {
    const auto store = small_store();
    CHECK(text_similarity(store, "SQL and Python", "python, sql!") == doctest::Approx(1.0));
    CHECK(text_similarity(store, "SQL", "Python") == 0.0);
    CHECK(text_similarity(store, "", "Python") == 0.0);
    CHECK(text_similarity(store, "Queries", "SQL") == 0.0);  // surface forms, no stemming
  }

  TEST_CASE("vector file loading") {
    testing::TempDir dir;
    {
      std::ofstream f(dir / "v.txt");
      f << "sql 1 0 0\n\npython 0 1 0.5\nunused 1 1 1\n";
      std::ofstream bad(dir / "bad.txt");
      bad << "sql 1 0 0\npython 0 1\n";
      std::ofstream nan(dir / "nan.txt");
      nan << "sql 1 x 0\n";
    }
    WordVectorStore store(3);
    store = WordVectorStore::load(dir / "v.txt");
    CHECK(store.dim() == 3);
    CHECK(store.size() == 3);
    CHECK(*store.find("python") == vec({0, 1, 0.5}));

    const std::unordered_set<std::string> vocab{"sql"};
    CHECK(WordVectorStore::load(dir / "v.txt", &vocab).size() == 1);

    try {
      WordVectorStore::load(dir / "bad.txt");
      FAIL("expected a parse error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kParseError);
      CHECK(std::string(e.what()).find(":2") != std::string::npos);
    }
    CHECK(testing::error_of([&] { WordVectorStore::load(dir / "nan.txt"); }) == ErrorCode::kParseError);

    WordVectorStore wrong(3);
    CHECK(testing::error_of([&] { wrong.insert("x", vec({1, 2})); }) == ErrorCode::kDimensionMismatch);
  }

  TEST_CASE("saved vectors reload exactly") {
    testing::TempDir dir;
    Rng rng(12);
    WordVectorStore store(5);
    for (int i = 0; i < 30; ++i) store.insert("w" + std::to_string(i), random_vec(rng, 5));
    store.save(dir / "v.txt");
    const auto loaded = WordVectorStore::load(dir / "v.txt");
    REQUIRE(loaded.size() == store.size());
    for (int i = 0; i < 30; ++i) {
      const auto key = "w" + std::to_string(i);
      CHECK(*loaded.find(key) == *store.find(key));
    }
  }
}
