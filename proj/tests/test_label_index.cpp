#include <doctest.h>

#include <cmath>
#include <vector>

#include "vccgm/label_index.hpp"

using namespace vccgm;

TEST_CASE("build_index normalizes and merges duplicates") {
  std::vector<double> labels{10.0, 10.0, 20.0};
  LabelIndex idx = build_index(labels, 0.0, 100.0);
  REQUIRE(idx.num_distinct() == 2);
  CHECK(idx.distinct()[0] == doctest::Approx(0.1));
  CHECK(idx.distinct()[1] == doctest::Approx(0.2));
  CHECK(idx.counts()[0] == 2);
  CHECK(idx.counts()[1] == 1);
  CHECK(idx.total() == 3);
  CHECK(idx.prefix_counts()[1] == 3);
  CHECK(idx.denormalize(idx.normalize(17.5)) == doctest::Approx(17.5));
}

TEST_CASE("singleton dataset") {
  std::vector<double> labels{5.0};
  LabelIndex idx = build_index(labels, 0.0, 10.0);
  REQUIRE(idx.num_distinct() == 1);
  CHECK(idx.distinct()[0] == doctest::Approx(0.5));
  CHECK(idx.counts()[0] == 1);
}

TEST_CASE("chair-angle-sized index: 44051 labels, 899 distinct") {
  std::vector<double> labels;
  labels.reserve(44051);
  for (int a = 1; a <= 899; ++a) {
    double angle = 0.1 * a;
    for (int k = 0; k < 49; ++k) labels.push_back(angle);
  }
  REQUIRE(labels.size() == 44051);
  LabelIndex idx = build_index(labels, 0.0, 90.0);
  CHECK(idx.num_distinct() == 899);
  CHECK(idx.total() == 44051);
  for (auto c : idx.counts()) CHECK(c == 49);
}

TEST_CASE("build_index rejects bad input") {
  std::vector<double> empty;
  CHECK_THROWS_AS(build_index(empty, 0.0, 1.0), EmptyDataset);
  std::vector<double> labels{0.5, 1.5};
  CHECK_THROWS_AS(build_index(labels, 0.0, 1.0), OutOfRange);
  std::vector<double> one{0.5};
  CHECK_THROWS_AS(build_index(one, 1.0, 1.0), OutOfRange);
}

TEST_CASE("index invariants: sorted strictly increasing, prefix sums consistent") {
  Rng rng(3);
  std::vector<double> labels;
  for (int i = 0; i < 500; ++i) labels.push_back(std::floor(rng.uniform() * 50.0));
  LabelIndex idx = build_index(labels, 0.0, 50.0);
  auto d = idx.distinct();
  for (std::size_t i = 1; i < d.size(); ++i) CHECK(d[i] > d[i - 1]);
  std::int64_t run = 0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    CHECK(idx.counts()[i] >= 1);
    run += idx.counts()[i];
    CHECK(idx.prefix_counts()[i] == run);
  }
  CHECK(run == idx.total());
}

TEST_CASE("rebuilding from the expanded form is idempotent") {
  std::vector<double> labels{1.0, 2.0, 2.0, 7.0, 7.0, 7.0};
  LabelIndex a = build_index(labels, 0.0, 10.0);
  std::vector<double> expanded;
  for (std::int64_t i = 0; i < a.num_distinct(); ++i)
    for (std::int64_t k = 0; k < a.counts()[static_cast<std::size_t>(i)]; ++k)
      expanded.push_back(a.denormalize(a.distinct()[static_cast<std::size_t>(i)]));
  LabelIndex b = build_index(expanded, 0.0, 10.0);
  REQUIRE(a.num_distinct() == b.num_distinct());
  for (std::int64_t i = 0; i < a.num_distinct(); ++i) {
    CHECK(a.distinct()[static_cast<std::size_t>(i)] ==
          doctest::Approx(b.distinct()[static_cast<std::size_t>(i)]).epsilon(1e-12));
    CHECK(a.counts()[static_cast<std::size_t>(i)] == b.counts()[static_cast<std::size_t>(i)]);
  }
}

TEST_CASE("nav_heuristic worked example") {
  std::vector<double> labels;
  for (int k = 0; k < 5; ++k) labels.push_back(0.1);
  for (int k = 0; k < 10; ++k) labels.push_back(0.2);
  for (int k = 0; k < 2; ++k) labels.push_back(0.3);
  LabelIndex idx = build_index(labels, 0.0, 1.0);
  NavHeuristic h = nav_heuristic(idx);
  CHECK(h.s_bar == doctest::Approx(13.5));
  CHECK(h.suggested == 14);
}

TEST_CASE("nav_heuristic uniform counts give exactly 2c") {
  for (int c : {1, 7, 25}) {
    std::vector<double> labels;
    for (int i = 0; i < 9; ++i)
      for (int k = 0; k < c; ++k) labels.push_back(0.1 * (i + 1));
    LabelIndex idx = build_index(labels, 0.0, 1.0);
    CHECK(nav_heuristic(idx).s_bar == doctest::Approx(2.0 * c));
  }
}

TEST_CASE("nav_heuristic depends only on counts and order") {
  std::vector<double> a{1, 1, 2, 2, 2, 5};
  std::vector<double> b{10, 10, 40, 40, 40, 41};  // order-preserving value change
  NavHeuristic ha = nav_heuristic(build_index(a, 0.0, 50.0));
  NavHeuristic hb = nav_heuristic(build_index(b, 0.0, 50.0));
  CHECK(ha.s_bar == hb.s_bar);
  CHECK(ha.suggested == hb.suggested);
}

TEST_CASE("nav_heuristic requires two distinct labels") {
  std::vector<double> labels{0.5, 0.5};
  LabelIndex idx = build_index(labels, 0.0, 1.0);
  CHECK_THROWS_AS(nav_heuristic(idx), InsufficientLabels);
  CHECK_THROWS_AS(rule_of_thumb(idx), InsufficientLabels);
}

TEST_CASE("rule_of_thumb kappa_base is the maximum gap") {
  std::vector<double> a{0.0, 0.5, 1.0};
  CHECK(rule_of_thumb(build_index(a, 0.0, 1.0)).kappa_base == doctest::Approx(0.5));

  std::vector<double> grid;
  for (int i = 0; i <= 10; ++i) grid.push_back(i * 0.1);
  CHECK(rule_of_thumb(build_index(grid, 0.0, 1.0)).kappa_base == doctest::Approx(0.1));

  std::vector<double> two{0.1, 0.9};
  CHECK(rule_of_thumb(build_index(two, 0.0, 1.0)).kappa_base == doctest::Approx(0.8));
}

TEST_CASE("rule_of_thumb kappa_base bounds every gap") {
  Rng rng(11);
  std::vector<double> labels;
  for (int i = 0; i < 40; ++i) labels.push_back(rng.uniform());
  LabelIndex idx = build_index(labels, 0.0, 1.0);
  double kb = rule_of_thumb(idx).kappa_base;
  auto d = idx.distinct();
  double min_gap = 1.0, max_gap = 0.0;
  for (std::size_t i = 1; i < d.size(); ++i) {
    min_gap = std::min(min_gap, d[i] - d[i - 1]);
    max_gap = std::max(max_gap, d[i] - d[i - 1]);
  }
  CHECK(kb >= min_gap);
  CHECK(kb == doctest::Approx(max_gap));
}

TEST_CASE("rule_of_thumb sigma shrinks with sample count") {
  std::vector<double> small, large;
  Rng rng(5);
  for (int i = 0; i < 50; ++i) small.push_back(rng.uniform());
  for (int i = 0; i < 5000; ++i) large.push_back(rng.uniform());
  double s_small = rule_of_thumb(build_index(small, 0.0, 1.0)).sigma;
  double s_large = rule_of_thumb(build_index(large, 0.0, 1.0)).sigma;
  CHECK(s_small > 0.0);
  CHECK(s_large > 0.0);
  CHECK(s_large < s_small);
  // N^(-1/5) scaling against the direct formula
  LabelIndex idx = build_index(large, 0.0, 1.0);
  CHECK(rule_of_thumb(idx).sigma ==
        doctest::Approx(idx.expanded_std() * std::pow(5000.0, -0.2)));
}

TEST_CASE("pick_sample_label weights by counts") {
  std::vector<double> labels;
  for (int k = 0; k < 90; ++k) labels.push_back(0.2);
  for (int k = 0; k < 10; ++k) labels.push_back(0.8);
  LabelIndex idx = build_index(labels, 0.0, 1.0);
  Rng rng(17);
  int hits = 0;
  const int draws = 20000;
  for (int i = 0; i < draws; ++i)
    if (idx.pick_sample_label(rng) == idx.distinct()[0]) ++hits;
  CHECK(static_cast<double>(hits) / draws == doctest::Approx(0.9).epsilon(0.02));
}
