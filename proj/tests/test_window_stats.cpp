#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <chrono>

#include "cqm/window_stats.hpp"
#include "test_support.hpp"

using namespace cqm;
using cqm::test::enumerate_window_qualities;
using cqm::test::near;
using cqm::test::trace_of;

namespace {

const QualityScale kScale{};

std::shared_ptr<const WindowQualityModel> mean_model() {
  return make_window_quality_model(WqmConfig{}, kScale);
}

MultiKTracker tracker_for(std::span<const int> sizes_s, double duration_s = 1.0) {
  return MultiKTracker(kScale, duration_s, sizes_s, mean_model());
}

}  // namespace

TEST_CASE("window_segments converts seconds to whole segment counts") {
  CHECK(window_segments(50, 1.0) == 50);
  CHECK(window_segments(10, 2.0) == 5);
  CHECK(window_segments(60, 0.5) == 120);
  CHECK_THROWS_AS(window_segments(50, 7.0), CqmError);
  CHECK_THROWS_AS(window_segments(0, 1.0), CqmError);
}

TEST_CASE("push_segment tracks the documented example stream") {
  // K=3, qualities 1..5: window means 2, 3, 4
  const std::array<int, 1> sizes{3};
  MultiKTracker tracker = tracker_for(sizes);
  for (double q : {1.0, 2.0, 3.0, 4.0, 5.0}) tracker.push_segment(q);

  auto stats = tracker.stats_snapshot(3);
  REQUIRE(stats.has_value());
  CHECK(stats->n_windows == 3);
  CHECK(near(stats->first, 2.0, 1e-12));
  CHECK(near(stats->last, 4.0, 1e-12));
  CHECK(near(stats->average, 3.0, 1e-12));
  CHECK(near(stats->minimum, 2.0, 1e-12));
  CHECK(near(stats->maximum, 4.0, 1e-12));
}

TEST_CASE("push_segment handles a quality collapse") {
  // K=3, [5,5,5,1,1,1]: window means 5, 11/3, 7/3, 1
  const std::array<int, 1> sizes{3};
  MultiKTracker tracker = tracker_for(sizes);
  for (double q : {5.0, 5.0, 5.0, 1.0, 1.0, 1.0}) tracker.push_segment(q);

  auto stats = tracker.stats_snapshot(3);
  REQUIRE(stats.has_value());
  CHECK(near(stats->first, 5.0, 1e-12));
  CHECK(near(stats->last, 1.0, 1e-12));
  CHECK(near(stats->average, 3.0, 1e-12));
  CHECK(near(stats->minimum, 1.0, 1e-12));
  CHECK(near(stats->maximum, 5.0, 1e-12));
}

TEST_CASE("constant stream collapses all statistics to the constant") {
  const std::array<int, 2> sizes{4, 7};
  MultiKTracker tracker = tracker_for(sizes);
  for (int i = 0; i < 25; ++i) {
    tracker.push_segment(3.5);
    for (int k : sizes) {
      auto stats = tracker.stats_snapshot(k);
      if (tracker.segments_seen() >= k) {
        REQUIRE(stats.has_value());
        CHECK(stats->first == 3.5);
        CHECK(stats->last == 3.5);
        CHECK(stats->average == 3.5);
        CHECK(stats->minimum == 3.5);
        CHECK(stats->maximum == 3.5);
      } else {
        CHECK(!stats.has_value());
      }
    }
  }
}

TEST_CASE("stats_snapshot availability boundary") {
  const std::array<int, 1> sizes{60};
  MultiKTracker tracker = tracker_for(sizes);
  for (int i = 0; i < 59; ++i) tracker.push_segment(3.0);
  CHECK(!tracker.stats_snapshot(60).has_value());
  tracker.push_segment(3.0);
  auto stats = tracker.stats_snapshot(60);
  REQUIRE(stats.has_value());
  CHECK(stats->n_windows == 1);
  CHECK(stats->first == stats->last);
  CHECK(stats->first == stats->average);
  CHECK(stats->first == stats->minimum);
  CHECK(stats->first == stats->maximum);

  try {
    tracker.stats_snapshot(35);
    FAIL("expected UnknownWindowSize");
  } catch (const CqmError& e) {
    CHECK(e.code() == ErrorCode::UnknownWindowSize);
  }
}

TEST_CASE("push_segment rejects out-of-scale qualities") {
  const std::array<int, 1> sizes{3};
  MultiKTracker tracker = tracker_for(sizes);
  try {
    tracker.push_segment(5.5);
    FAIL("expected QualityOutOfRange");
  } catch (const CqmError& e) {
    CHECK(e.code() == ErrorCode::QualityOutOfRange);
  }
}

TEST_CASE("batch_stats equals the incremental path on the examples") {
  SessionTrace trace = trace_of({1, 2, 3, 4, 5});
  WindowStats batch = batch_stats(trace, 3, *mean_model());
  CHECK(near(batch.first, 2.0, 1e-12));
  CHECK(near(batch.last, 4.0, 1e-12));
  CHECK(near(batch.average, 3.0, 1e-12));
  CHECK(batch.n_windows == 3);

  // single window: N == K
  SessionTrace single = trace_of({2, 4, 3});
  WindowStats one = batch_stats(single, 3, *mean_model());
  CHECK(one.n_windows == 1);
  CHECK(one.first == one.last);
  CHECK(one.first == one.average);
  CHECK(near(one.first, 3.0, 1e-12));

  try {
    batch_stats(trace_of({1, 2}), 3, *mean_model());
    FAIL("expected TraceTooShort");
  } catch (const CqmError& e) {
    CHECK(e.code() == ErrorCode::TraceTooShort);
  }
}

TEST_CASE("incremental statistics match the batch oracle on random traces") {
  Rng rng(101);
  const std::array<int, 6> sizes{10, 20, 30, 40, 50, 60};
  for (int round = 0; round < 200; ++round) {
    const std::size_t n = 10 + rng.next_below(391);
    std::vector<double> q = cqm::test::random_qualities(rng, n);
    SessionTrace trace = trace_of(q);

    MultiKTracker tracker = tracker_for(sizes);
    for (double v : q) tracker.push_segment(v);

    for (int k : sizes) {
      auto incremental = tracker.stats_snapshot(k);
      if (n < static_cast<std::size_t>(k)) {
        CHECK(!incremental.has_value());
        continue;
      }
      REQUIRE(incremental.has_value());
      WindowStats batch = batch_stats(trace, k, *mean_model());
      CHECK(incremental->n_windows == batch.n_windows);
      CHECK(near(incremental->first, batch.first, 1e-9));
      CHECK(near(incremental->last, batch.last, 1e-9));
      CHECK(near(incremental->average, batch.average, 1e-9));
      CHECK(near(incremental->minimum, batch.minimum, 1e-9));
      CHECK(near(incremental->maximum, batch.maximum, 1e-9));
    }
  }
}

TEST_CASE("oracle equivalence holds for every plug-in model") {
  Rng rng(102);
  const std::array<int, 2> sizes{10, 30};
  const auto models = {
      make_window_quality_model(WqmConfig{"mean_std", 1.0, 0.5, {}}, kScale),
      make_window_quality_model(WqmConfig{"switch_penalty", 1.0, 0.5, {}}, kScale),
      make_window_quality_model(WqmConfig{"histogram", 1.0, 0.5, {}}, kScale),
  };
  for (const auto& model : models) {
    for (int round = 0; round < 30; ++round) {
      const std::size_t n = 30 + rng.next_below(100);
      std::vector<double> q = cqm::test::random_qualities(rng, n);
      SessionTrace trace = trace_of(q);
      MultiKTracker tracker(kScale, 1.0, sizes, model);
      for (double v : q) tracker.push_segment(v);
      for (int k : sizes) {
        auto incremental = tracker.stats_snapshot(k);
        REQUIRE(incremental.has_value());
        WindowStats batch = batch_stats(trace, k, *model);
        CHECK(near(incremental->first, batch.first, 1e-9));
        CHECK(near(incremental->last, batch.last, 1e-9));
        CHECK(near(incremental->average, batch.average, 1e-9));
        CHECK(near(incremental->minimum, batch.minimum, 1e-9));
        CHECK(near(incremental->maximum, batch.maximum, 1e-9));
      }
    }
  }
}

TEST_CASE("minimum never rises, maximum never falls, first never changes") {
  Rng rng(103);
  const std::array<int, 1> sizes{10};
  MultiKTracker tracker = tracker_for(sizes);
  double best_min = kScale.hi;
  double best_max = kScale.lo;
  double first_seen = 0.0;
  for (int i = 0; i < 300; ++i) {
    tracker.push_segment(rng.next_range(kScale.lo, kScale.hi));
    auto stats = tracker.stats_snapshot(10);
    if (!stats) continue;
    if (stats->n_windows == 1) first_seen = stats->first;
    CHECK(stats->first == first_seen);
    CHECK(stats->minimum <= best_min + 1e-15);
    CHECK(stats->maximum >= best_max - 1e-15);
    best_min = stats->minimum;
    best_max = stats->maximum;
    CHECK(stats->minimum <= stats->average);
    CHECK(stats->average <= stats->maximum);
    CHECK(stats->minimum <= stats->last);
    CHECK(stats->last <= stats->maximum);
  }
}

TEST_CASE("running average telescopes to the mean of all window qualities") {
  Rng rng(104);
  for (int round = 0; round < 20; ++round) {
    const std::size_t n = 40 + rng.next_below(200);
    std::vector<double> q = cqm::test::random_qualities(rng, n);

    const std::array<int, 1> sizes{20};
    MultiKTracker tracker = tracker_for(sizes);
    for (double v : q) tracker.push_segment(v);

    const std::vector<double> windows =
        enumerate_window_qualities(q, 20, *mean_model());
    double sum = 0.0;
    for (double w : windows) sum += w;
    auto stats = tracker.stats_snapshot(20);
    REQUIRE(stats.has_value());
    CHECK(near(stats->average, sum / static_cast<double>(windows.size()), 1e-9));
  }
}

TEST_CASE("per-push cost does not grow with session length") {
  const std::array<int, 2> sizes{50, 60};
  auto time_per_push = [&](std::size_t n) {
    MultiKTracker tracker = tracker_for(sizes);
    Rng rng(105);
    std::vector<double> q = cqm::test::random_qualities(rng, n);
    const auto start = std::chrono::steady_clock::now();
    for (double v : q) tracker.push_segment(v);
    const auto stop = std::chrono::steady_clock::now();
    return std::chrono::duration<double>(stop - start).count() /
           static_cast<double>(n);
  };
  // warm caches, then compare a short and a long session; generous slack
  // against scheduler noise
  (void)time_per_push(1000);
  double short_run = time_per_push(1000);
  double long_run = time_per_push(10000);
  CHECK(long_run <= 2.0 * short_run + 1e-6);
}

TEST_CASE("non-unit segment durations convert window sizes") {
  const std::array<int, 1> sizes{10};
  MultiKTracker tracker = tracker_for(sizes, 2.0);  // 10 s -> 5 segments
  for (int i = 0; i < 5; ++i) {
    CHECK(!tracker.stats_snapshot(10).has_value());
    tracker.push_segment(2.0 + 0.5 * i);
  }
  auto stats = tracker.stats_snapshot(10);
  REQUIRE(stats.has_value());
  CHECK(stats->k_segments == 5);
  CHECK(stats->n_windows == 1);
  CHECK(near(stats->first, 3.0, 1e-12));
}
