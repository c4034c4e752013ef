#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

namespace sphparisi {

// Binary chain dump: "SPHCHAIN", uint64 count, uint64 N, then count * N float64, all little-endian.
struct ChainDump {
  std::uint64_t count = 0;
  std::uint64_t n = 0;
  std::vector<double> samples;
};

void write_chain_dump(const std::filesystem::path& path, const ChainDump& dump);
ChainDump read_chain_dump(const std::filesystem::path& path);  // throws std::runtime_error on a bad file

}  // namespace sphparisi
