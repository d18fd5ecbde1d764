// Subcommand implementations behind the CLI; callable in-process for tests.

#pragma once

#include <string>

#include "hylam/config.hpp"

namespace hylam::cli {

// Writes trace.csv, snapshots/<k>.csv and manifest.json under out_dir;
// prints one convergence log line per increment at verbosity >= 1.
int command_run(const RunConfig& config, const std::string& out_dir);

int command_check_law(const RunConfig& config, const std::string& out_dir);

int command_check_condition(const RunConfig& config,
                            const std::string& out_dir);

// Re-derives every checkable residual from an exported trace (plus
// snapshots when present) and writes report.txt; nonzero when any check
// fails or the recorded columns are inconsistent with the data.
int command_verify(const std::string& trace_path, const RunConfig& config,
                   const std::string& out_dir);

// axis: "dotted.key=v1,v2,..." applied to the config; one run per value,
// outputs under out_dir/point_<i>, merged into sweep.csv by point index.
int command_sweep(const RunConfig& config, const std::string& axis,
                  const std::string& out_dir);

// Shared trace writer (exposed for the determinism test).
void write_trace_csv(const std::string& path, const EvolutionTrace& trace);
void write_snapshot_csv(const std::string& path, const Mesh& mesh,
                        const SystemState& state,
                        const LayerMaterials& materials);

}  // namespace hylam::cli
