#include <stdexcept>

#include "doctest.h"
#include "envsynth/core/grid.hpp"
#include "envsynth/core/grid_io.hpp"
#include "envsynth/core/types.hpp"
#include "testutil.hpp"

using namespace envsynth;

TEST_CASE("all-zero matrix builds an empty grid with fixed endpoints") {
  const std::vector<std::vector<std::uint8_t>> cells(30, std::vector<std::uint8_t>(30, 0));
  const OccupancyGrid g = grid_from_cells(cells);
  CHECK(g.occupied_count() == 0);
  CHECK(OccupancyGrid::start_cell() == GridCell{0, 15});
  CHECK(OccupancyGrid::goal_cell() == GridCell{29, 15});
}

TEST_CASE("start and goal cells are forced free") {
  std::vector<std::vector<std::uint8_t>> cells(30, std::vector<std::uint8_t>(30, 0));
  cells[0][15] = 1;
  cells[29][15] = 1;
  const OccupancyGrid g = grid_from_cells(cells);
  CHECK(g.at(0, 15) == 0);
  CHECK(g.at(29, 15) == 0);
}

TEST_CASE("wrong dimensions and non-binary values are rejected") {
  std::vector<std::vector<std::uint8_t>> short_rows(29, std::vector<std::uint8_t>(30, 0));
  CHECK_THROWS_WITH_AS(grid_from_cells(short_rows),
                       doctest::Contains("dimension"), std::invalid_argument);
  std::vector<std::vector<std::uint8_t>> bad_value(30, std::vector<std::uint8_t>(30, 0));
  bad_value[3][4] = 2;
  CHECK_THROWS_WITH_AS(grid_from_cells(bad_value),
                       doctest::Contains("value"), std::invalid_argument);
}

TEST_CASE("bitvector flattening is row-major") {
  std::vector<std::uint8_t> flat(900, 0);
  flat[2 * 30 + 3] = 1;
  const OccupancyGrid g = grid_from_flat(flat);
  const auto bits = grid_to_bitvector(g);
  for (int i = 0; i < 900; ++i) {
    CHECK(bits[i] == (i == 63 ? 1 : 0));
  }
}

TEST_CASE("bitvector round-trips random grids") {
  SeededRng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const OccupancyGrid g = testutil::random_grid(rng);
    CHECK(grid_from_flat(grid_to_bitvector(g)) == g);
  }
}

TEST_CASE("euclidean distance examples") {
  CHECK(euclidean(Pose{0, 0, 0}, Pose{3, 4, 0}) == doctest::Approx(5.0));
  CHECK(euclidean(Pose{1, 1, 0.3}, Pose{1, 1, -0.7}) == doctest::Approx(0.0));
  CHECK(euclidean(Pose{-2, 0, 0}, Pose{2, 3, 0}) == doctest::Approx(5.0));
}

TEST_CASE("euclidean is a metric on random pose triples") {
  SeededRng rng(17);
  for (int trial = 0; trial < 200; ++trial) {
    auto draw = [&rng]() {
      return Pose{rng.next_double() * 20 - 10, rng.next_double() * 20 - 10, 0};
    };
    const Pose a = draw(), b = draw(), c = draw();
    CHECK(euclidean(a, b) == doctest::Approx(euclidean(b, a)));
    CHECK(euclidean(a, b) >= 0.0);
    CHECK(euclidean(a, c) <= euclidean(a, b) + euclidean(b, c) + 1e-12);
  }
}

TEST_CASE("normalize_angle maps into (-pi, pi]") {
  CHECK(normalize_angle(M_PI) == doctest::Approx(M_PI));
  CHECK(normalize_angle(-M_PI) == doctest::Approx(M_PI));
  CHECK(normalize_angle(3 * M_PI) == doctest::Approx(M_PI));
  CHECK(normalize_angle(0.5) == doctest::Approx(0.5));
  CHECK(normalize_angle(-7.0) == doctest::Approx(-7.0 + 2 * M_PI));
}

TEST_CASE("grid PGM and line formats round-trip") {
  const auto dir = testutil::scratch_dir("grid_io");
  SeededRng rng(11);
  const OccupancyGrid g = testutil::random_grid(rng);

  save_grid_pgm(g, dir / "g.pgm");
  CHECK(load_grid_pgm(dir / "g.pgm") == g);

  const std::string line = grid_to_line(g);
  CHECK(line.size() == 900);
  CHECK(grid_from_line(line) == g);
}

TEST_CASE("grid PGM writes the bottom row last") {
  std::vector<std::uint8_t> flat(900, 0);
  flat[0] = 1;  // bottom-left corner occupied
  const OccupancyGrid g = grid_from_flat(flat);
  const auto dir = testutil::scratch_dir("grid_pgm_order");
  save_grid_pgm(g, dir / "g.pgm");
  const PgmImage img = read_pgm(dir / "g.pgm");
  CHECK(img.maxval == 1);
  // File order is top row first, so the occupied bottom-left cell is the
  // first value of the LAST file row.
  CHECK(img.values[29 * 30 + 0] == 1);
  CHECK(img.values[0] == 0);
}

TEST_CASE("environment set directory round-trips") {
  const auto dir = testutil::scratch_dir("env_set");
  SeededRng rng(23);
  EnvironmentSet set;
  set.kind = SetKind::challenging;
  for (int i = 0; i < 5; ++i) {
    set.entries.push_back(
        EnvEntry{testutil::random_grid(rng), 50 + i, "traj_" + std::to_string(i), i, i + 10});
  }
  save_environment_set(set, dir / "out");
  const EnvironmentSet loaded = load_environment_set(dir / "out");
  REQUIRE(loaded.entries.size() == set.entries.size());
  CHECK(loaded.kind == SetKind::challenging);
  for (std::size_t i = 0; i < set.entries.size(); ++i) {
    CHECK(loaded.entries[i].grid == set.entries[i].grid);
    CHECK(loaded.entries[i].suboptimal_total == set.entries[i].suboptimal_total);
    CHECK(loaded.entries[i].source == set.entries[i].source);
    CHECK(loaded.entries[i].initial_index == set.entries[i].initial_index);
    CHECK(loaded.entries[i].final_index == set.entries[i].final_index);
  }
}
