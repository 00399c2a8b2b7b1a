#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "qtwt/pipeline.hpp"
#include "qtwt/scheduling.hpp"

namespace qtwt {

/// An instance file: a JSON object {"name": ..., "tasks": [{"t","d","w"}...]}.
/// Values may be JSON numbers or decimal strings; either way they are read as
/// exact decimals.
struct NamedInstance {
  std::string name;
  Instance instance;
};

NamedInstance parse_instance(std::istream& in);
NamedInstance parse_instance_file(const std::filesystem::path& path);

void write_instance(std::ostream& out, const NamedInstance& named);
void write_instance_file(const std::filesystem::path& path, const NamedInstance& named);

/// Distribution CSV with the fixed header
/// basis,slots,feasible,cost,amp_re,amp_im,p_joint,p_conditional — one row per
/// basis state, sorted by conditional probability descending then basis
/// ascending. Streams; does not materialize rows.
void write_distribution_csv(std::ostream& out, const PipelineResult& result,
                            const Instance& inst, const PipelineConfig& cfg);

/// Run summary as deterministic JSON (sorted keys, shortest-round-trip
/// numbers).
std::string summary_json(const PipelineResult& result, const NamedInstance& named,
                         const PipelineConfig& cfg);

void write_sweep_csv(std::ostream& out, SweepParameter parameter,
                     const std::vector<SweepRow>& rows);

/// Grid spec: "start:stop:step" (inclusive, step > 0) or a comma list.
std::vector<double> parse_grid(const std::string& spec);

/// Writes through a temporary file and renames on success, so failed runs
/// leave no partial output behind.
void atomic_write_file(const std::filesystem::path& path, const std::string& contents);

/// Same contract for content too large to buffer: the writer receives the
/// temporary file's stream.
void atomic_write_stream(const std::filesystem::path& path,
                         const std::function<void(std::ostream&)>& writer);

/// 1-based rendering of a schedule, e.g. "[2, 3, 1]".
std::string format_schedule(const Schedule& s);

/// Shortest decimal that round-trips the double exactly.
std::string format_double(double value);

}  // namespace qtwt
