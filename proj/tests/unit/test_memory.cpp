#include "doctest.h"
#include "oracles.hpp"
#include "rpcf/memory.hpp"

using namespace rpcf;

namespace {

TrainingSample sample(int frame, int depth = 2, int rows = 3, int cols = 4) {
  TrainingSample t;
  t.x_hat.assign(depth, Spectrum::Constant(rows, cols, std::complex<double>(frame, 0.0)));
  t.frame_index = frame;
  return t;
}

}  // namespace

TEST_SUITE("memory") {

TEST_CASE("insertion weights") {
  SampleMemory m;
  m.insert(sample(1));
  REQUIRE(m.size() == 1);
  CHECK(m.samples()[0].weight == 1.0);
  m.insert(sample(2));
  CHECK(m.samples()[0].weight == doctest::Approx(0.98));
  CHECK(m.samples()[1].weight == doctest::Approx(0.02));
}

TEST_CASE("recency ordering without eviction") {
  SampleMemory m;
  for (int k = 1; k <= 30; ++k) {
    m.insert(sample(k));
    CHECK(m.weight_sum() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(m.samples().front().weight == doctest::Approx(std::pow(0.98, k - 1)).epsilon(1e-12));
    if (k > 1) CHECK(m.samples().back().weight == doctest::Approx(0.02));
  }
}

TEST_CASE("eviction drops the lightest sample but never the newest") {
  std::vector<TrainingSample> s{sample(1), sample(2), sample(3)};
  s[0].weight = 0.5;
  s[1].weight = 0.3;
  s[2].weight = 0.2;
  SampleMemory m = SampleMemory::from_samples({3, 0.02, 6}, s);
  m.insert(sample(4));
  REQUIRE(m.size() == 3);
  CHECK(m.samples()[0].frame_index == 1);
  CHECK(m.samples()[1].frame_index == 2);
  CHECK(m.samples()[2].frame_index == 4);
  CHECK(m.samples()[0].weight == doctest::Approx(0.49 / 0.804));
  CHECK(m.samples()[1].weight == doctest::Approx(0.294 / 0.804));
  CHECK(m.samples()[2].weight == doctest::Approx(0.02 / 0.804));
}

TEST_CASE("normalization over long runs at capacity") {
  SampleMemory m({5, 0.3, 6});
  for (int k = 1; k <= 200; ++k) {
    m.insert(sample(k));
    CHECK(m.size() <= 5);
    CHECK(std::abs(m.weight_sum() - 1.0) < 1e-9);
    CHECK(m.samples().back().frame_index == k);
    for (const auto& t : m.samples()) CHECK(t.weight >= 0.0);
  }
}

TEST_CASE("update schedule") {
  const SampleMemory m;
  CHECK(m.should_update(1));
  CHECK_FALSE(m.should_update(7));
  CHECK(m.should_update(12));
  CHECK_FALSE(m.should_update(2));
}

TEST_CASE("errors") {
  SampleMemory m;
  m.insert(sample(1));
  CHECK_THROWS(m.insert(sample(2, 3)));
  CHECK_THROWS(m.insert(sample(2, 2, 4, 4)));
  CHECK_THROWS(m.insert(TrainingSample{}));
  CHECK_THROWS(SampleMemory({0, 0.02, 6}));
  CHECK_THROWS(SampleMemory({5, 0.0, 6}));

  std::vector<TrainingSample> bad{sample(1), sample(2)};
  bad[0].weight = 0.7;
  bad[1].weight = 0.2;
  CHECK_THROWS(SampleMemory::from_samples({}, bad));
  bad[1].weight = 0.3;
  CHECK_NOTHROW(SampleMemory::from_samples({}, bad));
  CHECK_THROWS(SampleMemory::from_samples({1, 0.02, 6}, bad));
  bad[0].weight = 1.1;
  bad[1].weight = -0.1;
  CHECK_THROWS(SampleMemory::from_samples({}, bad));
}

}
