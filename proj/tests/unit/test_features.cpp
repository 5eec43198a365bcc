#include <random>

#include "doctest.h"
#include "overload/features.hpp"
#include "support/oracles.hpp"

using namespace overload;
using features::EdaAccumulator;
using features::PointerAccumulator;
using features::TrialAccumulator;

namespace {

PointerAccumulator feed(const std::vector<PointerEvent>& ev, features::PointerParams p = {}) {
  PointerAccumulator acc(p);
  for (const auto& e : ev) acc.update(e);
  return acc;
}

}  // namespace

TEST_CASE("flips over the 0 -> 120 -> -10 -> 150 path") {
  const auto acc = feed({{0, 0, 0}, {100, 0, 120}, {200, 0, -10}, {300, 0, 150}});
  CHECK(acc.flips() == 2);
}

TEST_CASE("short runs do not count as flips") {
  const auto acc = feed({{0, 0, 0}, {100, 0, 99}, {200, 0, 0}, {300, 0, 99}});
  CHECK(acc.flips() == 0);
}

TEST_CASE("a run that reaches the threshold in several steps qualifies") {
  const auto acc = feed({{0, 0, 0}, {10, 0, 60}, {20, 0, 60}, {30, 0, 110}, {40, 0, 50}, {50, 0, 5}});
  CHECK(acc.flips() == 1);
}

TEST_CASE("stationary 600 ms then moves gives one hover") {
  const auto acc = feed({{0, 10, 10}, {600, 30, 10}});
  CHECK(acc.hovers(600) == 1);
  CHECK(acc.hover_time_ms(600) == 600);
}

TEST_CASE("stationary 400 ms is not a hover") {
  const auto acc = feed({{0, 10, 10}, {400, 30, 10}});
  CHECK(acc.hovers(400) == 0);
  CHECK(acc.hover_time_ms(400) == 0);
}

TEST_CASE("repeated events at the same point keep the hover clock running") {
  const auto acc = feed({{0, 10, 10}, {300, 10, 10}, {450, 10, 10}, {800, 11, 10}});
  CHECK(acc.hovers(800) == 1);
  CHECK(acc.hover_time_ms(800) == 800);
}

TEST_CASE("two events 10 ms apart with 5 px displacement") {
  const std::vector<PointerEvent> ev{{0, 0, 0}, {10, 3, 4}};
  const auto acc = feed(ev);
  const auto want = oracle::pointer(ev, ev.size(), 10, 100.0, 500);
  CHECK(acc.flips() == want.flips);
  CHECK(acc.hovers(10) == want.hovers);
  CHECK(acc.hovers(10) == 0);
  CHECK(acc.flips() == 0);
}

TEST_CASE("hover tolerance absorbs jitter") {
  features::PointerParams p;
  p.hover_tolerance_px = 3.0;
  const auto acc = feed({{0, 10, 10}, {200, 11, 11}, {400, 12, 10}, {700, 20, 10}}, p);
  CHECK(acc.hovers(700) == 1);
  CHECK(acc.hover_time_ms(700) == 700);
  const auto strict = feed({{0, 10, 10}, {200, 11, 11}, {400, 12, 10}, {700, 20, 10}});
  CHECK(strict.hovers(700) == 0);
}

TEST_CASE("eda tonic difference examples") {
  auto run = [](std::optional<double> baseline, std::vector<double> values) {
    EdaAccumulator acc;
    if (baseline) acc.arm_baseline(*baseline);
    TimeMs t = 0;
    for (double v : values) acc.update({t += 10, v});
    return acc.tonic_difference();
  };
  CHECK(run(2.0, {2.0}) == doctest::Approx(0.0));
  CHECK(run(2.0, {2.0, 2.5, 3.0}) == doctest::Approx(0.5));
  CHECK(run(3.0, {2.0, 2.0}) == doctest::Approx(-1.0));
  CHECK(run(std::nullopt, {2.0, 2.5, 3.0}) == doctest::Approx(0.5));
}

TEST_CASE("first eda sample arms the baseline") {
  EdaAccumulator acc;
  CHECK_FALSE(acc.has_baseline());
  acc.update({0, 2.00});
  CHECK(acc.baseline() == 2.00);
  acc.update({10, 4.00});
  CHECK(acc.baseline() == 2.00);
  CHECK(acc.coverage_ms() == 10);
}

TEST_CASE("snapshot of an empty accumulator") {
  TrialAccumulator acc;
  const auto f = acc.snapshot(1, 0);
  CHECK(f == TrialFeatures{0, 0, 0, 0.0, 1});
}

TEST_CASE("snapshot does not reset") {
  TrialAccumulator acc;
  acc.update_pointer({0, 0, 0});
  acc.update_pointer({100, 0, 200});
  acc.update_eda({0, 1.0});
  CHECK(acc.snapshot(0, 900) == acc.snapshot(0, 900));
}

TEST_CASE("snapshot mid-hover at 700 ms") {
  TrialAccumulator acc;
  const std::vector<PointerEvent> ev{{0, 50, 50}, {300, 50, 50}};
  for (const auto& e : ev) acc.update_pointer(e);
  const auto f = acc.snapshot(0, 700);
  const auto want = oracle::pointer(ev, ev.size(), 700, 100.0, 500);
  CHECK(f.hovers == 1);
  CHECK(f.hover_time_ms == 700);
  CHECK(f.hovers == want.hovers);
  CHECK(f.hover_time_ms == want.hover_time_ms);
}

TEST_CASE("streaming equals batch at every tenth prefix") {
  std::mt19937_64 rng(11);
  for (int k = 0; k < 50; ++k) {
    const auto ev = oracle::random_pointer_trace(rng, 300);
    PointerAccumulator acc;
    for (std::size_t i = 0; i < ev.size(); ++i) {
      acc.update(ev[i]);
      if (i % 10 != 0) continue;
      const TimeMs now = ev[i].t_ms + 250;
      const auto want = oracle::pointer(ev, i + 1, now, 100.0, 500);
      REQUIRE(acc.flips() == want.flips);
      REQUIRE(acc.hovers(now) == want.hovers);
      REQUIRE(acc.hover_time_ms(now) == want.hover_time_ms);
    }
  }
}

TEST_CASE("flips ignore horizontal movement and hovers ignore time translation") {
  std::mt19937_64 rng(5);
  for (int k = 0; k < 50; ++k) {
    auto ev = oracle::random_pointer_trace(rng, 200);
    const TimeMs now = ev.back().t_ms + 100;
    const auto base = feed(ev);
    auto shifted = ev;
    for (auto& e : shifted) e.t_ms += 12345;
    const auto s = feed(shifted);
    CHECK(s.hovers(now + 12345) == base.hovers(now));
    CHECK(s.hover_time_ms(now + 12345) == base.hover_time_ms(now));
    auto moved = ev;
    std::uniform_real_distribution<double> dx(-300, 300);
    for (auto& e : moved) e.x += dx(rng);
    CHECK(feed(moved).flips() == base.flips());
  }
}
