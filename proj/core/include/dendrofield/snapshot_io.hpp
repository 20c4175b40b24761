#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "dendrofield/model.hpp"
#include "dendrofield/stepper.hpp"

namespace dendrofield {

/// Text sidecar describing a snapshot payload.
struct SnapshotHeader {
  int n_snapshots = 0;
  int n_xi = 0;
  int n_x = 0;
  /// Steps between consecutive snapshots (0 if only the final state is stored).
  int stride = 0;
  double tau = 0.0;
  double L_x = 0.0;
  double L_xi = 0.0;
  PhysicalParams params;
  std::vector<double> times;
  bool operator==(const SnapshotHeader&) const = default;
};

struct SnapshotFile {
  SnapshotHeader header;
  std::vector<Eigen::MatrixXd> frames;
};

/// Writes <stem>.hdr and <stem>.bin. The payload is little-endian float64,
/// snapshot-major, then row i = 0..n_xi-1, then column j = 0..n_x-1.
void write_snapshots(const std::filesystem::path& stem, const SnapshotHeader& header,
                     const std::vector<FieldState>& snapshots);

/// Reads both files back. Throws NumericalError if the payload length is not
/// exactly n_snapshots n_xi n_x 8 bytes, ValidationError for a malformed header.
SnapshotFile read_snapshots(const std::filesystem::path& stem);

SnapshotHeader make_snapshot_header(const SimulationConfig& config,
                                    const std::vector<FieldState>& snapshots);

}  // namespace dendrofield
