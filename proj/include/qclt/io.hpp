#pragma once

#include "qclt/bogoliubov.hpp"
#include "qclt/hartree.hpp"

#include <string>
#include <vector>

namespace qclt {

struct MomentReport; // clt.hpp

/// FNV-1a 64-bit content hash, hex-encoded. Integrity checking only, not
/// cryptographic.
std::string fnv64_hex(const std::string& bytes);

/// Fixed 17-significant-digit rendering used by every tabular writer.
std::string format_g17(double v);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

/// Creates the run directory; an existing non-empty directory is refused
/// unless `force` is set.
void ensure_run_dir(const std::string& dir, bool force);

std::string trajectory_csv(const HartreeTrajectory& traj);

/// Binary sidecar: per sample one row of M little-endian complex doubles
/// (re, im interleaved), rows in time order, no header.
std::string trajectory_sidecar(const HartreeTrajectory& traj);

/// Pair dump: u64 M, then U then V row-major as little-endian complex doubles.
std::string pair_binary(const BogoliubovPair& pair);

std::string reports_csv(const std::vector<MomentReport>& reports);
std::string reports_json(const std::vector<MomentReport>& reports);

/// Writes `files` (name -> content) plus manifest.json holding the config
/// snapshot and per-file FNV-1a hashes.
void write_run_directory(const std::string& dir, bool force, const std::string& config_json,
                         const std::vector<std::pair<std::string, std::string>>& files);

/// Re-reads a run directory, verifying every manifest hash; returns the
/// manifest JSON text. Hash mismatch raises an integrity error naming the file.
std::string verify_run_directory(const std::string& dir);

} // namespace qclt
