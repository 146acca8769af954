#include <doctest.h>

#include <cmath>
#include <fstream>

#include "archsage/dataset.hpp"
#include "test_util.hpp"

using namespace archsage;
using namespace archsage::data;

namespace {

space::CellSpec minimal_chain() {
  space::CellSpec s = space::CellSpec::empty(3);
  s.ops = {space::kInput, space::kConv3x3, space::kOutput};
  s.set_edge(0, 1, true);
  s.set_edge(1, 2, true);
  return s;
}

}  // namespace

TEST_CASE("oracle: deterministic and clamped") {
  space::SpaceParams params;
  OracleParams oracle;
  RngStream rng(404);
  for (int i = 0; i < 10000; ++i) {
    space::CellSpec s = space::sample_random(rng, params);
    const double a = synth_performance(s, oracle, params);
    const double b = synth_performance(s, oracle, params);
    REQUIRE(a == b);
    REQUIRE(a >= 0.0);
    REQUIRE(a <= 1.0);
  }
}

TEST_CASE("oracle: hand value for the minimal chain without noise") {
  space::SpaceParams params;
  OracleParams oracle;
  oracle.noise_std = 0.0;
  // One interior CONV3X3 on the only path: 0.80 + 0.10 * (1.0/5) = 0.82;
  // no skip edge, no excess edges, no pooling.
  CHECK(synth_performance(minimal_chain(), oracle, params) == doctest::Approx(0.82).epsilon(1e-12));
}

TEST_CASE("oracle: different seeds move the noise") {
  space::SpaceParams params;
  OracleParams a, b;
  a.seed = 1;
  b.seed = 2;
  int diffs = 0;
  RngStream rng(11);
  for (int i = 0; i < 50; ++i) {
    space::CellSpec s = space::sample_random(rng, params);
    diffs += synth_performance(s, a, params) != synth_performance(s, b, params);
  }
  CHECK(diffs > 40);
}

TEST_CASE("oracle: adding a skip edge never hurts (noise off)") {
  space::SpaceParams params;
  OracleParams oracle;
  oracle.noise_std = 0.0;
  RngStream rng(2024);
  int tested = 0;
  for (int i = 0; i < 2000 && tested < 500; ++i) {
    space::CellSpec s = space::sample_random(rng, params);
    if (s.edge(0, s.n - 1)) continue;
    space::CellSpec with_skip = s;
    with_skip.set_edge(0, s.n - 1, true);
    if (!space::validate(with_skip, params).ok()) continue;  // e.g. edge budget hit
    ++tested;
    REQUIRE(synth_performance(with_skip, oracle, params) >=
            synth_performance(s, oracle, params));
  }
  CHECK(tested >= 100);
}

TEST_CASE("build_dataset: boundary, determinism, label consistency") {
  space::SpaceParams params;
  OracleParams oracle;

  ArchDataset full = build_dataset(100, 100, 5, params, oracle);
  CHECK(full.n_unlabeled() == 0);
  CHECK(full.n_labeled() == 100);

  ArchDataset ds = build_dataset(300, 40, 7, params, oracle);
  CHECK(ds.size() == 300);
  CHECK(ds.n_labeled() == 40);
  CHECK(ds.n_labeled() + ds.n_unlabeled() == ds.size());
  for (int i : ds.labeled_idx) {
    REQUIRE(ds.labels[static_cast<size_t>(i)].has_value());
    CHECK(*ds.labels[static_cast<size_t>(i)] ==
          synth_performance(ds.specs[static_cast<size_t>(i)], oracle, params));
  }
  for (int i : ds.unlabeled_idx) REQUIRE_FALSE(ds.labels[static_cast<size_t>(i)].has_value());

  testutil::TempDir tmp;
  ArchDataset again = build_dataset(300, 40, 7, params, oracle);
  save_dataset(ds, tmp.file("a.jsonl"));
  save_dataset(again, tmp.file("b.jsonl"));
  CHECK(testutil::slurp(tmp.file("a.jsonl")) == testutil::slurp(tmp.file("b.jsonl")));

  CHECK(testutil::thrown_code([&] { build_dataset(10, 0, 1, params, oracle); }) ==
        ErrorCode::InvalidArgument);
  CHECK(testutil::thrown_code([&] { build_dataset(10, 11, 1, params, oracle); }) ==
        ErrorCode::InvalidArgument);
}

TEST_CASE("dataset save/load round trip") {
  space::SpaceParams params;
  OracleParams oracle;
  ArchDataset ds = build_dataset(50, 9, 3, params, oracle);
  testutil::TempDir tmp;
  const std::string path = tmp.file("ds.jsonl");
  save_dataset(ds, path);
  ArchDataset loaded = load_dataset(path);
  CHECK(loaded == ds);

  // Partition invariant survives the round trip.
  CHECK(loaded.n_labeled() + loaded.n_unlabeled() == loaded.size());
}

TEST_CASE("dataset load errors") {
  testutil::TempDir tmp;
  CHECK(testutil::thrown_code([&] { load_dataset(tmp.file("missing.jsonl")); }) ==
        ErrorCode::IoError);

  space::SpaceParams params;
  const std::string chain_json = space::cell_to_json(minimal_chain(), params);

  const std::string out_of_range = tmp.file("range.jsonl");
  {
    std::ofstream os(out_of_range);
    std::string rec = chain_json;
    rec.pop_back();  // drop '}'
    os << rec << ",\"accuracy\":1.2}\n";
  }
  CHECK(testutil::thrown_code([&] { load_dataset(out_of_range); }) == ErrorCode::SchemaError);

  const std::string truncated = tmp.file("trunc.jsonl");
  {
    std::ofstream os(truncated);
    std::string rec = chain_json;
    rec.pop_back();
    os << rec << ",\"accuracy\":0.9}\n";
    os << "{\"adjacency\": [[0,1";  // cut mid-record
  }
  auto code = testutil::thrown_code([&] { load_dataset(truncated); });
  REQUIRE(code == ErrorCode::ParseError);
  try {
    load_dataset(truncated);
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find(":2") != std::string::npos);  // names line 2
  }
}
