#include "dendrofield/snapshot_io.hpp"

#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <sstream>

#include "dendrofield/error.hpp"

namespace dendrofield {

namespace {

constexpr const char* kFormatTag = "dendrofield-snapshots-1";

std::filesystem::path with_suffix(const std::filesystem::path& stem, const char* ext) {
  return std::filesystem::path(stem.string() + ext);
}

void put_le(std::ostream& os, double v) {
  auto bits = std::bit_cast<std::uint64_t>(v);
  unsigned char bytes[8];
  for (int b = 0; b < 8; ++b) bytes[b] = static_cast<unsigned char>(bits >> (8 * b));
  os.write(reinterpret_cast<const char*>(bytes), 8);
}

double get_le(const unsigned char* bytes) {
  std::uint64_t bits = 0;
  for (int b = 0; b < 8; ++b) bits |= static_cast<std::uint64_t>(bytes[b]) << (8 * b);
  return std::bit_cast<double>(bits);
}

double to_double(const std::string& key, const std::string& s) {
  double v = 0.0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size())
    throw ValidationError("snapshot header: bad value for " + key + ": '" + s + "'");
  return v;
}

}  // namespace

SnapshotHeader make_snapshot_header(const SimulationConfig& config,
                                    const std::vector<FieldState>& snapshots) {
  SnapshotHeader h;
  h.n_snapshots = static_cast<int>(snapshots.size());
  h.n_xi = config.grid.n_xi;
  h.n_x = config.grid.n_x;
  h.stride = config.snapshot_stride;
  h.tau = config.tau;
  h.L_x = config.grid.L_x;
  h.L_xi = config.grid.L_xi;
  h.params = config.model.params;
  for (const auto& s : snapshots) h.times.push_back(s.time);
  return h;
}

void write_snapshots(const std::filesystem::path& stem, const SnapshotHeader& header,
                     const std::vector<FieldState>& snapshots) {
  if (static_cast<int>(snapshots.size()) != header.n_snapshots)
    throw ValidationError("snapshot count does not match header");

  std::ofstream hdr(with_suffix(stem, ".hdr"));
  if (!hdr) throw NumericalError("cannot write " + with_suffix(stem, ".hdr").string());
  hdr << std::setprecision(std::numeric_limits<double>::max_digits10);
  hdr << "format = " << kFormatTag << "\n"
      << "n_snapshots = " << header.n_snapshots << "\n"
      << "n_xi = " << header.n_xi << "\n"
      << "n_x = " << header.n_x << "\n"
      << "stride = " << header.stride << "\n"
      << "tau = " << header.tau << "\n"
      << "L_x = " << header.L_x << "\n"
      << "L_xi = " << header.L_xi << "\n"
      << "gamma = " << header.params.gamma << "\n"
      << "nu = " << header.params.nu << "\n"
      << "xi_0 = " << header.params.xi_0 << "\n"
      << "eps = " << header.params.eps << "\n"
      << "times =";
  for (std::size_t k = 0; k < header.times.size(); ++k) hdr << (k ? ", " : " ") << header.times[k];
  hdr << "\n"
      << "payload = float64 little-endian; snapshot, row i (xi), column j (x)\n";

  std::ofstream bin(with_suffix(stem, ".bin"), std::ios::binary);
  if (!bin) throw NumericalError("cannot write " + with_suffix(stem, ".bin").string());
  for (const auto& s : snapshots) {
    if (s.values.rows() != header.n_xi || s.values.cols() != header.n_x)
      throw ValidationError("snapshot shape does not match header");
    for (int i = 0; i < header.n_xi; ++i)
      for (int j = 0; j < header.n_x; ++j) put_le(bin, s.values(i, j));
  }
  if (!bin) throw NumericalError("write failed for " + with_suffix(stem, ".bin").string());
}

SnapshotFile read_snapshots(const std::filesystem::path& stem) {
  std::ifstream hdr(with_suffix(stem, ".hdr"));
  if (!hdr) throw ValidationError("cannot open " + with_suffix(stem, ".hdr").string());
  std::map<std::string, std::string> kv;
  std::string line;
  while (std::getline(hdr, line)) {
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    auto trim = [](std::string s) {
      s.erase(0, s.find_first_not_of(" \t\r"));
      s.erase(s.find_last_not_of(" \t\r") + 1);
      return s;
    };
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  if (kv["format"] != kFormatTag) throw ValidationError("snapshot header: unknown format");
  auto need = [&](const std::string& key) {
    auto it = kv.find(key);
    if (it == kv.end()) throw ValidationError("snapshot header: missing " + key);
    return to_double(key, it->second);
  };

  SnapshotFile f;
  auto& h = f.header;
  h.n_snapshots = static_cast<int>(need("n_snapshots"));
  h.n_xi = static_cast<int>(need("n_xi"));
  h.n_x = static_cast<int>(need("n_x"));
  h.stride = static_cast<int>(need("stride"));
  h.tau = need("tau");
  h.L_x = need("L_x");
  h.L_xi = need("L_xi");
  h.params.gamma = need("gamma");
  h.params.nu = need("nu");
  h.params.xi_0 = need("xi_0");
  h.params.eps = need("eps");
  {
    std::stringstream ss(kv["times"]);
    std::string item;
    while (std::getline(ss, item, ',')) {
      item.erase(0, item.find_first_not_of(' '));
      if (!item.empty()) h.times.push_back(to_double("times", item));
    }
  }
  if (h.n_snapshots < 0 || h.n_xi < 0 || h.n_x < 0)
    throw ValidationError("snapshot header: negative dimension");

  const auto bin_path = with_suffix(stem, ".bin");
  std::ifstream bin(bin_path, std::ios::binary);
  if (!bin) throw ValidationError("cannot open " + bin_path.string());
  const std::uintmax_t expected =
      static_cast<std::uintmax_t>(h.n_snapshots) * h.n_xi * h.n_x * 8u;
  const std::uintmax_t actual = std::filesystem::file_size(bin_path);
  if (actual != expected) {
    std::ostringstream msg;
    msg << "snapshot payload is " << actual << " bytes, header implies " << expected;
    throw NumericalError(msg.str());
  }
  std::vector<unsigned char> buf(static_cast<std::size_t>(h.n_xi) * h.n_x * 8);
  for (int s = 0; s < h.n_snapshots; ++s) {
    bin.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    Eigen::MatrixXd m(h.n_xi, h.n_x);
    std::size_t k = 0;
    for (int i = 0; i < h.n_xi; ++i)
      for (int j = 0; j < h.n_x; ++j, k += 8) m(i, j) = get_le(&buf[k]);
    f.frames.push_back(std::move(m));
  }
  return f;
}

}  // namespace dendrofield
