#pragma once

#include <string>
#include <vector>

namespace qclt {

/// Dispatches a full command line (without the program name):
/// hartree | bogoliubov | fock-selftest | combinatorics-selftest | clt | report.
/// Returns the process exit status; errors are printed as one-line JSON
/// records on stderr.
int run_subcommand(const std::vector<std::string>& argv);

/// Renders the consolidated human-readable summary of a finished run
/// directory after verifying its manifest hashes.
std::string emit_report(const std::string& run_dir);

} // namespace qclt
