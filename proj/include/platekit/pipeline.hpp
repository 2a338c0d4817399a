#pragma once

#include <ostream>
#include <string>

#include "platekit/config.hpp"
#include "platekit/evalkit.hpp"

namespace platekit {

// Subcommand bodies. Each validates the config keys it needs, does its work
// under <out>, logs progress, and throws (ConfigError, DataError,
// ValidationError) on failure; the CLI maps exceptions to exit codes.
void run_merge(const RunConfig& cfg, std::ostream& log);
void run_import_masks(const RunConfig& cfg, std::ostream& log);
void run_tile(const RunConfig& cfg, std::ostream& log);
void run_build(const RunConfig& cfg, std::ostream& log);
void run_eval(const RunConfig& cfg, std::ostream& log);
void run_crossval(const RunConfig& cfg, std::ostream& log);
void run_synth(const RunConfig& cfg, std::ostream& log);

// Ground truth loader shared by eval and crossval: one image path per list
// line, read verbatim, with labels in the sibling .txt file (a missing label
// file means no objects).
GtBundle load_gt_bundle(const std::string& list_path, const ClassSet& classes);

} // namespace platekit
