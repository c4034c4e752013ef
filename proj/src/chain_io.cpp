#include "sphparisi/chain_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace sphparisi {

namespace {

constexpr char kMagic[8] = {'S', 'P', 'H', 'C', 'H', 'A', 'I', 'N'};

std::uint64_t to_little(std::uint64_t v) {
  if constexpr (std::endian::native == std::endian::big) {
    std::uint64_t r = 0;
    for (int i = 0; i < 8; ++i) r |= ((v >> (8 * i)) & 0xffU) << (8 * (7 - i));
    return r;
  }
  return v;
}

void put(std::ofstream& out, std::uint64_t v) {
  v = to_little(v);
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

std::uint64_t get(std::ifstream& in) {
  std::uint64_t v = 0;
  in.read(reinterpret_cast<char*>(&v), sizeof v);
  if (!in) throw std::runtime_error("chain dump truncated");
  return to_little(v);
}

}  // namespace

void write_chain_dump(const std::filesystem::path& path, const ChainDump& dump) {
  if (dump.samples.size() != dump.count * dump.n) throw std::invalid_argument("chain dump: size mismatch");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  out.write(kMagic, sizeof kMagic);
  put(out, dump.count);
  put(out, dump.n);
  for (double x : dump.samples) put(out, std::bit_cast<std::uint64_t>(x));
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

ChainDump read_chain_dump(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  char magic[8];
  in.read(magic, sizeof magic);
  if (!in || std::memcmp(magic, kMagic, sizeof kMagic) != 0) throw std::runtime_error("not a SPHCHAIN file");
  ChainDump d;
  d.count = get(in);
  d.n = get(in);
  d.samples.resize(d.count * d.n);
  for (double& x : d.samples) x = std::bit_cast<double>(get(in));
  return d;
}

}  // namespace sphparisi
