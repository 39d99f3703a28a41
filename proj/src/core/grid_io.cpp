#include "envsynth/core/grid_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace envsynth {

namespace fs = std::filesystem;

PgmImage read_pgm(const fs::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open PGM file: " + path.string());
  }
  // P2 with optional '#' comment lines between tokens.
  auto next_token = [&in, &path]() -> std::string {
    std::string tok;
    while (in >> tok) {
      if (tok[0] == '#') {
        std::string rest;
        std::getline(in, rest);
        continue;
      }
      return tok;
    }
    throw std::runtime_error("truncated PGM file: " + path.string());
  };
  const std::string magic = next_token();
  if (magic != "P2") {
    throw std::runtime_error("unsupported PGM magic '" + magic + "' in " + path.string());
  }
  PgmImage img;
  img.width = std::stoi(next_token());
  img.height = std::stoi(next_token());
  img.maxval = std::stoi(next_token());
  if (img.width <= 0 || img.height <= 0 || img.maxval <= 0) {
    throw std::runtime_error("invalid PGM header in " + path.string());
  }
  img.values.resize(static_cast<std::size_t>(img.width) * img.height);
  for (auto& v : img.values) {
    v = std::stoi(next_token());
    if (v < 0 || v > img.maxval) {
      throw std::runtime_error("PGM value out of range in " + path.string());
    }
  }
  return img;
}

void write_pgm(const PgmImage& img, const fs::path& path) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot write PGM file: " + path.string());
  }
  out << "P2\n" << img.width << " " << img.height << "\n" << img.maxval << "\n";
  for (int r = 0; r < img.height; ++r) {
    for (int c = 0; c < img.width; ++c) {
      out << img.values[static_cast<std::size_t>(r) * img.width + c]
          << (c + 1 == img.width ? '\n' : ' ');
    }
  }
  if (!out) {
    throw std::runtime_error("write failed: " + path.string());
  }
}

void save_grid_pgm(const OccupancyGrid& grid, const fs::path& path) {
  PgmImage img;
  img.width = OccupancyGrid::kSize;
  img.height = OccupancyGrid::kSize;
  img.maxval = 1;
  img.values.resize(OccupancyGrid::kCellCount);
  for (int r = 0; r < OccupancyGrid::kSize; ++r) {
    const int file_row = OccupancyGrid::kSize - 1 - r;  // bottom row last
    for (int c = 0; c < OccupancyGrid::kSize; ++c) {
      img.values[static_cast<std::size_t>(file_row) * OccupancyGrid::kSize + c] =
          grid.at(r, c);
    }
  }
  write_pgm(img, path);
}

OccupancyGrid load_grid_pgm(const fs::path& path) {
  const PgmImage img = read_pgm(path);
  if (img.width != OccupancyGrid::kSize || img.height != OccupancyGrid::kSize) {
    throw std::runtime_error("scenario grid PGM must be 30x30: " + path.string());
  }
  if (img.maxval != 1) {
    throw std::runtime_error("scenario grid PGM must have maxval 1: " + path.string());
  }
  std::vector<std::uint8_t> flat(OccupancyGrid::kCellCount);
  for (int r = 0; r < OccupancyGrid::kSize; ++r) {
    const int file_row = OccupancyGrid::kSize - 1 - r;
    for (int c = 0; c < OccupancyGrid::kSize; ++c) {
      flat[static_cast<std::size_t>(r) * OccupancyGrid::kSize + c] = static_cast<std::uint8_t>(
          img.values[static_cast<std::size_t>(file_row) * OccupancyGrid::kSize + c]);
    }
  }
  return grid_from_flat(flat);
}

std::string grid_to_line(const OccupancyGrid& grid) {
  std::string line(OccupancyGrid::kCellCount, '0');
  for (int i = 0; i < OccupancyGrid::kCellCount; ++i) {
    if (grid.cells()[i]) line[i] = '1';
  }
  return line;
}

OccupancyGrid grid_from_line(const std::string& line) {
  if (line.size() != OccupancyGrid::kCellCount) {
    throw std::invalid_argument("grid line must be exactly 900 characters, got " +
                                std::to_string(line.size()));
  }
  std::vector<std::uint8_t> flat(OccupancyGrid::kCellCount);
  for (int i = 0; i < OccupancyGrid::kCellCount; ++i) {
    if (line[i] == '0') {
      flat[i] = 0;
    } else if (line[i] == '1') {
      flat[i] = 1;
    } else {
      throw std::invalid_argument("grid line may contain only '0'/'1'");
    }
  }
  return grid_from_flat(flat);
}

namespace {

std::string entry_id(std::size_t i) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "env_%05zu", i);
  return buf;
}

}  // namespace

void save_environment_set(const EnvironmentSet& set, const fs::path& dir) {
  fs::create_directories(dir);
  nlohmann::json meta;
  meta["kind"] = to_string(set.kind);
  meta["count"] = set.entries.size();
  {
    std::ofstream out(dir / "set.json");
    out << meta.dump(2) << "\n";
  }
  std::ofstream manifest(dir / "manifest.csv");
  manifest << "id,suboptimal_total,source,initial_index,final_index\n";
  for (std::size_t i = 0; i < set.entries.size(); ++i) {
    const auto& e = set.entries[i];
    const std::string id = entry_id(i);
    manifest << id << "," << e.suboptimal_total << "," << e.source << ","
             << e.initial_index << "," << e.final_index << "\n";
    save_grid_pgm(e.grid, dir / (id + ".pgm"));
    std::ofstream line(dir / (id + ".txt"));
    line << grid_to_line(e.grid) << "\n";
  }
  if (!manifest) {
    throw std::runtime_error("write failed: " + (dir / "manifest.csv").string());
  }
}

EnvironmentSet load_environment_set(const fs::path& dir) {
  std::ifstream meta_in(dir / "set.json");
  if (!meta_in) {
    throw std::runtime_error("missing environment set metadata: " +
                             (dir / "set.json").string());
  }
  nlohmann::json meta = nlohmann::json::parse(meta_in);
  EnvironmentSet set;
  set.kind = set_kind_from_string(meta.at("kind").get<std::string>());
  const std::size_t count = meta.at("count").get<std::size_t>();

  std::ifstream manifest(dir / "manifest.csv");
  if (!manifest) {
    throw std::runtime_error("missing manifest: " + (dir / "manifest.csv").string());
  }
  std::string line;
  std::getline(manifest, line);  // header
  while (std::getline(manifest, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string id, subopt, source, init, fin;
    if (!std::getline(ss, id, ',') || !std::getline(ss, subopt, ',') ||
        !std::getline(ss, source, ',') || !std::getline(ss, init, ',') ||
        !std::getline(ss, fin, ',')) {
      throw std::runtime_error("malformed manifest row in " + dir.string() + ": " + line);
    }
    EnvEntry entry;
    entry.grid = load_grid_pgm(dir / (id + ".pgm"));
    entry.suboptimal_total = std::stoll(subopt);
    entry.source = source;
    entry.initial_index = std::stoll(init);
    entry.final_index = std::stoll(fin);
    set.entries.push_back(std::move(entry));
  }
  if (set.entries.size() != count) {
    throw std::runtime_error("environment set count mismatch in " + dir.string());
  }
  return set;
}

}  // namespace envsynth
