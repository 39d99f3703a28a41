#include <cmath>

#include "doctest.h"
#include "envsynth/extract/extraction.hpp"
#include "envsynth/extract/trace_io.hpp"
#include "testutil.hpp"

using namespace envsynth;
using namespace envsynth::extract;

namespace {

ExtractionConfig default_cfg() {
  return ExtractionConfig{};  // 5 m segments, threshold 50, 10 m clamp
}

}  // namespace

TEST_CASE("stationary robot yields no scenarios") {
  std::vector<Pose> poses(1000, Pose{2.0, 3.0, 0.1});
  const auto traj = testutil::trajectory_from_poses(poses);
  CHECK(segment_trajectory(traj, default_cfg()).empty());
}

TEST_CASE("12 m straight line yields two chained scenarios and a discarded tail") {
  const auto traj =
      testutil::trajectory_from_poses(testutil::straight_line(0.0, 12.0, 0.5));
  const auto scenarios = segment_trajectory(traj, default_cfg());
  REQUIRE(scenarios.size() == 2);
  // First step strictly beyond 5 m from x=0 is x=5.5 (index 11).
  CHECK(scenarios[0].initial_index == 0);
  CHECK(scenarios[0].final_index == 11);
  CHECK(scenarios[0].steps.front().pose.x == doctest::Approx(0.0));
  CHECK(scenarios[0].steps.back().pose.x == doctest::Approx(5.5));
  // Boundary chaining: the closing step opens the next scenario.
  CHECK(scenarios[1].initial_index == 11);
  CHECK(scenarios[1].final_index == 22);
  CHECK(scenarios[1].steps.back().pose.x == doctest::Approx(11.0));
}

TEST_CASE("a small loop never fires the segment condition") {
  std::vector<Pose> poses;
  for (int k = 0; k < 720; ++k) {
    const double a = 2.0 * M_PI * k / 360.0;
    poses.push_back(Pose{2.0 * std::cos(a), 2.0 * std::sin(a), 0.0});
  }
  const auto traj = testutil::trajectory_from_poses(poses);
  CHECK(segment_trajectory(traj, default_cfg()).empty());
}

TEST_CASE("scenario invariants hold on random walks") {
  SeededRng rng(31);
  const auto cfg = default_cfg();
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<Pose> poses{Pose{0, 0, 0}};
    for (int k = 0; k < 400; ++k) {
      const double step = 0.3 * rng.next_double();
      const double ang = 2 * M_PI * rng.next_double();
      poses.push_back(Pose{poses.back().x + step * std::cos(ang),
                           poses.back().y + step * std::sin(ang), 0.0});
    }
    const auto traj = testutil::trajectory_from_poses(poses);
    const auto scenarios = segment_trajectory(traj, cfg);
    for (std::size_t s = 0; s < scenarios.size(); ++s) {
      const auto& sc = scenarios[s];
      CHECK(euclidean(sc.steps.front().pose, sc.steps.back().pose) > cfg.segment_length);
      for (std::size_t i = 0; i + 1 < sc.steps.size(); ++i) {
        CHECK(euclidean(sc.steps[i].pose, sc.steps.front().pose) <= cfg.segment_length);
      }
      if (s > 0) {
        CHECK(scenarios[s - 1].final_index == sc.initial_index);
      }
      long long total = 0;
      for (const auto& st : sc.steps) total += st.suboptimal;
      CHECK(sc.suboptimal_total == total);
    }
  }
}

TEST_CASE("aggregate_suboptimal sums flags and rejects empty scenarios") {
  Scenario s;
  CHECK_THROWS_AS(aggregate_suboptimal(s), std::invalid_argument);
  for (int flag : {1, 0, 1, 1}) {
    StepRecord r;
    r.suboptimal = flag;
    s.steps.push_back(r);
  }
  CHECK(aggregate_suboptimal(s) == 3);
  Scenario all_flagged;
  for (int i = 0; i < 60; ++i) {
    StepRecord r;
    r.suboptimal = 1;
    all_flagged.steps.push_back(r);
  }
  CHECK(aggregate_suboptimal(all_flagged) == 60);
}

namespace {

// Scenario whose first step sits at `start` looking along `theta`, with a
// single lidar hit placed exactly at world point (hx, hy); the last step is
// the goal pose with an all-clear scan.
Scenario scenario_with_hit(Pose start, Pose goal, double hx, double hy, int beams = 8) {
  Scenario sc;
  sc.beam_count = beams;
  sc.sensor_max_range = 10.0;
  StepRecord first;
  const double r = std::hypot(hx - start.x, hy - start.y);
  first.pose = start;
  first.pose.theta = std::atan2(hy - start.y, hx - start.x);  // beam 0 hits the point
  first.scan.assign(beams, 10.0);
  first.scan[0] = r;
  StepRecord last;
  last.pose = goal;
  last.scan.assign(beams, 10.0);
  sc.steps = {first, last};
  return sc;
}

}  // namespace

TEST_CASE("rasterization with no hits yields an all-free grid") {
  const Scenario sc = scenario_with_hit(Pose{0, 0, 0}, Pose{5.2, 0, 0}, 3.0, 0.5);
  Scenario clear = sc;
  clear.steps[0].scan.assign(clear.beam_count, 10.0);
  const OccupancyGrid g = rasterize_scenario(clear, default_cfg());
  CHECK(g.occupied_count() == 0);
}

TEST_CASE("rasterization rotates a +x scenario onto +y") {
  // start (0,0), goal (5,0): the rotation maps (1,0) to (0,1); world point
  // (2.5, 1) lands at scenario frame (1.5, 2.5) -> column 8, row 14.
  const Scenario sc = scenario_with_hit(Pose{0, 0, 0}, Pose{5, 0, 0}, 2.5, 1.0);
  const auto frame = scenario_frame(sc);
  const auto [sx, sy] = frame.to_frame(2.5, 1.0);
  CHECK(sx == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(sy == doctest::Approx(2.5).epsilon(1e-12));
  const OccupancyGrid g = rasterize_scenario(sc, default_cfg());
  CHECK(g.occupied_count() == 1);
  CHECK(g.at(14, 8) == 1);
}

TEST_CASE("rasterization keeps an already-aligned scenario in place") {
  // start (0,0), goal (0,5): identity rotation; obstacle (0.1, 2.5) maps to
  // x offset 2.6 from the left edge -> column 15, row 14.
  const Scenario sc = scenario_with_hit(Pose{0, 0, 0}, Pose{0, 5, 0}, 0.1, 2.5);
  const OccupancyGrid g = rasterize_scenario(sc, default_cfg());
  CHECK(g.occupied_count() == 1);
  CHECK(g.at(14, 15) == 1);
}

TEST_CASE("degenerate scenario start==goal is rejected") {
  Scenario sc = scenario_with_hit(Pose{1, 1, 0}, Pose{1, 1, 0}, 2.0, 2.0);
  CHECK_THROWS_AS(rasterize_scenario(sc, default_cfg()), std::invalid_argument);
}

TEST_CASE("scenario frame preserves pairwise distances") {
  SeededRng rng(41);
  for (int trial = 0; trial < 100; ++trial) {
    Scenario sc;
    StepRecord a, b;
    a.pose = Pose{rng.next_double() * 10 - 5, rng.next_double() * 10 - 5, 0};
    b.pose = Pose{a.pose.x + 3 + 4 * rng.next_double(),
                  a.pose.y + 3 + 4 * rng.next_double(), 0};
    sc.steps = {a, b};
    const auto frame = scenario_frame(sc);
    double px = 0, py = 0;
    bool first = true;
    for (int i = 0; i < 12; ++i) {
      const double wx = rng.next_double() * 12 - 6;
      const double wy = rng.next_double() * 12 - 6;
      const auto [fx, fy] = frame.to_frame(wx, wy);
      if (!first) {
        const double world_d = std::hypot(wx - px, wy - py);
        const auto [pfx, pfy] = frame.to_frame(px, py);
        CHECK(std::hypot(fx - pfx, fy - pfy) == doctest::Approx(world_d).epsilon(1e-9));
      }
      px = wx;
      py = wy;
      first = false;
    }
    // Start maps to the bottom-middle, goal onto the +y axis above it.
    const auto [sx, sy] = frame.to_frame(a.pose.x, a.pose.y);
    CHECK(sx == doctest::Approx(2.5).epsilon(1e-9));
    CHECK(sy == doctest::Approx(0.0).epsilon(1e-9));
    const auto [gx, gy] = frame.to_frame(b.pose.x, b.pose.y);
    CHECK(gx == doctest::Approx(2.5).epsilon(1e-9));
    CHECK(gy == doctest::Approx(euclidean(a.pose, b.pose)).epsilon(1e-9));
  }
}

TEST_CASE("filter_challenging keeps strictly-greater entries in order") {
  EnvironmentSet envs;
  envs.kind = SetKind::raw;
  for (long long c : {0LL, 50LL, 51LL, 200LL}) {
    envs.entries.push_back(EnvEntry{OccupancyGrid{}, c, "t", 0, 1});
  }
  const auto cfg = default_cfg();
  const auto kept = filter_challenging(envs, cfg);
  CHECK(kept.kind == SetKind::challenging);
  REQUIRE(kept.entries.size() == 2);
  CHECK(kept.entries[0].suboptimal_total == 51);
  CHECK(kept.entries[1].suboptimal_total == 200);

  EnvironmentSet zeros;
  zeros.kind = SetKind::raw;
  for (int i = 0; i < 4; ++i) zeros.entries.push_back(EnvEntry{OccupancyGrid{}, 0, "t", 0, 1});
  CHECK(filter_challenging(zeros, cfg).entries.empty());

  ExtractionConfig zero_threshold = cfg;
  zero_threshold.difficulty_threshold = 0;
  EnvironmentSet pair;
  pair.kind = SetKind::raw;
  pair.entries.push_back(EnvEntry{OccupancyGrid{}, 0, "t", 0, 1});
  pair.entries.push_back(EnvEntry{OccupancyGrid{}, 1, "t", 0, 1});
  CHECK(filter_challenging(pair, zero_threshold).entries.size() == 1);
}

TEST_CASE("extract_domain concatenates per-trajectory results in order") {
  const auto line = testutil::trajectory_from_poses(testutil::straight_line(0, 12, 0.5));
  const auto result = extract_domain({line, line}, default_cfg());
  CHECK(result.raw.entries.size() == 4);
  CHECK(result.challenging.entries.empty());  // all-clear scans, zero flags
  CHECK(result.scenarios_skipped == 0);

  const auto stationary =
      testutil::trajectory_from_poses(std::vector<Pose>(100, Pose{0, 0, 0}));
  const auto empty = extract_domain({stationary}, default_cfg());
  CHECK(empty.raw.entries.empty());
  CHECK(empty.challenging.entries.empty());
}

TEST_CASE("trace JSONL round-trips and reports malformed lines") {
  const auto dir = testutil::scratch_dir("trace_io");
  auto traj = testutil::trajectory_from_poses(testutil::straight_line(0, 3, 0.4), 6, 8.0);
  traj.steps[2].suboptimal = 1;
  write_trace(traj, dir / "t.jsonl");
  const Trajectory back = read_trace(dir / "t.jsonl");
  REQUIRE(back.steps.size() == traj.steps.size());
  CHECK(back.deployment_id == traj.deployment_id);
  CHECK(back.map_id == traj.map_id);
  CHECK(back.beam_count == traj.beam_count);
  CHECK(back.max_range == traj.max_range);
  CHECK(back.steps[2].suboptimal == 1);
  for (std::size_t i = 0; i < back.steps.size(); ++i) {
    CHECK(back.steps[i].pose.x == doctest::Approx(traj.steps[i].pose.x));
    CHECK(back.steps[i].scan == traj.steps[i].scan);
  }

  // Corrupt line 4 (header + 3 steps in) and expect its number in the error.
  {
    std::ifstream in(dir / "t.jsonl");
    std::vector<std::string> lines;
    std::string l;
    while (std::getline(in, l)) lines.push_back(l);
    lines[3] = "{ not json";
    std::ofstream out(dir / "bad.jsonl");
    for (const auto& s : lines) out << s << "\n";
  }
  CHECK_THROWS_WITH_AS(read_trace(dir / "bad.jsonl"), doctest::Contains(":4"),
                       std::runtime_error);
}
