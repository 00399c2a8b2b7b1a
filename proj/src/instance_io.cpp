#include "qtwt/instance_io.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <vector>

#include <json.hpp>

#include "qtwt/errors.hpp"

namespace qtwt {

namespace {

using nlohmann::json;

std::pair<int, int> line_column_of(const std::string& text, std::size_t byte) {
  int line = 1;
  int column = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return {line, column};
}

Rational rational_field(const json& j, const char* field) {
  if (!j.contains(field)) {
    throw ParseError(std::string("task is missing field '") + field + "'");
  }
  const json& v = j.at(field);
  if (v.is_number_integer()) return Rational(v.get<long long>());
  if (v.is_number_unsigned()) return Rational(static_cast<long long>(v.get<std::uint64_t>()));
  // dump() emits the shortest decimal that round-trips the double, which is
  // the literal the file carried for any reasonably written number.
  if (v.is_number_float()) return Rational::from_decimal(v.dump());
  if (v.is_string()) return Rational::from_decimal(v.get<std::string>());
  throw ParseError(std::string("task field '") + field + "' must be a number");
}

json rational_to_json(const Rational& r) {
  if (r.den() == 1 && r.num() <= 0x1fffffffffffffll && r.num() >= -0x1fffffffffffffll) {
    return json(static_cast<long long>(r.num()));
  }
  return json(r.to_decimal());
}

std::string csv_slots(const DistributionRow& row) {
  if (!row.feasible) return "-";
  std::string out;
  for (std::size_t i = 0; i < row.slots.size(); ++i) {
    if (i > 0) out += ' ';
    out += std::to_string(row.slots[i] + 1);
  }
  return out;
}

}  // namespace

std::string format_double(double value) {
  if (value == 0.0) value = 0.0;  // fold -0 into 0
  std::array<char, 40> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  if (ec != std::errc()) return "nan";
  return std::string(buf.data(), end);
}

std::string format_schedule(const Schedule& s) {
  std::string out = "[";
  for (std::size_t i = 0; i < s.slots.size(); ++i) {
    if (i > 0) out += ", ";
    out += std::to_string(s.slots[i] + 1);
  }
  return out + "]";
}

NamedInstance parse_instance(std::istream& in) {
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    auto [line, column] = line_column_of(text, e.byte > 0 ? e.byte - 1 : 0);
    throw ParseError(std::string("invalid JSON: ") + e.what(), line, column);
  }

  try {
    if (!doc.is_object()) throw ParseError("instance file must be a JSON object");
    if (!doc.contains("name") || !doc.at("name").is_string()) {
      throw ParseError("instance file needs a string field 'name'");
    }
    if (!doc.contains("tasks") || !doc.at("tasks").is_array() || doc.at("tasks").empty()) {
      throw ParseError("instance file needs a nonempty array field 'tasks'");
    }
    std::vector<Task> tasks;
    tasks.reserve(doc.at("tasks").size());
    for (const json& jt : doc.at("tasks")) {
      if (!jt.is_object()) throw ParseError("each task must be an object with t, d, w");
      Task task;
      task.length = rational_field(jt, "t");
      task.deadline = rational_field(jt, "d");
      task.weight = rational_field(jt, "w");
      tasks.push_back(std::move(task));
    }
    const int count = static_cast<int>(tasks.size());
    return NamedInstance{doc.at("name").get<std::string>(), Instance(std::move(tasks), count)};
  } catch (const std::invalid_argument& e) {
    throw ParseError(e.what());
  }
}

NamedInstance parse_instance_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open instance file: " + path.string());
  return parse_instance(in);
}

void write_instance(std::ostream& out, const NamedInstance& named) {
  json tasks = json::array();
  for (int i = 0; i < named.instance.original_count(); ++i) {
    const Task& task = named.instance.task(i);
    tasks.push_back(json{{"t", rational_to_json(task.length)},
                         {"d", rational_to_json(task.deadline)},
                         {"w", rational_to_json(task.weight)}});
  }
  json doc{{"name", named.name}, {"tasks", std::move(tasks)}};
  out << doc.dump(2) << '\n';
}

void write_instance_file(const std::filesystem::path& path, const NamedInstance& named) {
  std::ostringstream out;
  write_instance(out, named);
  atomic_write_file(path, out.str());
}

void write_distribution_csv(std::ostream& out, const PipelineResult& result,
                            const Instance& inst, const PipelineConfig& cfg) {
  const int m = inst.size();
  const int bits = slot_bits(m);
  const CostSpec spec = cfg.cost_spec();
  const auto dim = result.state.dimension();
  const Eigen::ArrayXd conditional = probabilities(result.state);

  // Sort an index array, then emit rows on the fly; the register can be far
  // larger than anything worth holding as row objects.
  std::vector<std::uint64_t> order(static_cast<std::size_t>(dim));
  std::iota(order.begin(), order.end(), std::uint64_t{0});
  std::sort(order.begin(), order.end(), [&conditional](std::uint64_t a, std::uint64_t b) {
    const double ca = conditional[static_cast<Eigen::Index>(a)];
    const double cb = conditional[static_cast<Eigen::Index>(b)];
    if (ca != cb) return ca > cb;
    return a < b;
  });

  out << "basis,slots,feasible,cost,amp_re,amp_im,p_joint,p_conditional\n";
  for (std::uint64_t basis : order) {
    DistributionRow row;
    row.basis = basis;
    row.feasible = is_feasible(basis, m, bits);
    if (row.feasible) row.slots = decode_basis(BasisIndex{basis, m});
    row.cost = cost_of_basis(basis, inst, spec);
    row.amplitude = result.state.amplitude(basis);
    row.conditional = conditional[static_cast<Eigen::Index>(basis)];
    row.joint = row.conditional * result.report.p0;

    out << basis << ',' << csv_slots(row) << ',' << (row.feasible ? 1 : 0) << ','
        << row.cost.to_decimal() << ',' << format_double(row.amplitude.real()) << ','
        << format_double(row.amplitude.imag()) << ',' << format_double(row.joint) << ','
        << format_double(row.conditional) << '\n';
  }
}

std::string summary_json(const PipelineResult& result, const NamedInstance& named,
                         const PipelineConfig& cfg) {
  const RunReport& report = result.report;

  json argmax{{"basis", report.argmax_basis},
              {"cost", report.argmax_cost.to_decimal()},
              {"conditional", report.argmax_conditional},
              {"joint", report.argmax_joint}};
  if (report.argmax_schedule.has_value()) {
    json slots = json::array();
    for (int v : report.argmax_schedule->slots) slots.push_back(v + 1);
    argmax["schedule"] = std::move(slots);
  } else {
    argmax["schedule"] = nullptr;
  }

  json config{{"rounds", cfg.rounds.has_value() ? json(*cfg.rounds) : json("auto")},
              {"normalization",
               cfg.normalization == NormalizationSpec::Kind::kMinMax ? "minmax" : "sigmoid"},
              {"bounds",
               cfg.bounds_mode == BoundsMode::kExact ? "exact" : "conservative"},
              {"clamp", cfg.clamp_lateness},
              {"mode", cfg.mode == RunMode::kExact
                           ? json("exact")
                           : json("shots:" + std::to_string(cfg.shots))},
              {"seed", cfg.seed},
              {"retry_budget", cfg.retry_budget},
              {"phase_rounds", cfg.phase_rounds}};

  json normalization_used;
  if (report.normalization_used.kind == NormalizationSpec::Kind::kMinMax) {
    normalization_used = {{"kind", "minmax"},
                          {"lower", report.normalization_used.lower},
                          {"upper", report.normalization_used.upper}};
  } else {
    normalization_used = {{"kind", "sigmoid"},
                          {"alpha", report.normalization_used.alpha},
                          {"beta", report.normalization_used.beta}};
  }

  json doc{{"instance",
            {{"name", named.name},
             {"original_tasks", named.instance.original_count()},
             {"padded_tasks", report.task_count},
             {"qubits", report.qubits}}},
           {"config", std::move(config)},
           {"argmax", std::move(argmax)},
           {"p0", report.p0},
           {"rounds_used", report.rounds_used},
           {"rounds_clamped", report.rounds_clamped},
           {"retries_used", report.retries_used},
           {"feasible_mass_after_grover", report.feasible_mass_after_grover},
           {"normalization_used", std::move(normalization_used)},
           {"oracle", {{"agrees", report.oracle_optimal},
                       {"optimal_cost", report.optimal_cost.to_decimal()}}},
           {"warnings", report.warnings}};
  if (!report.counts.empty()) {
    json counts = json::object();
    for (const auto& [basis, count] : report.counts) {
      counts[std::to_string(basis)] = count;
    }
    doc["counts"] = std::move(counts);
  }
  return doc.dump(2) + "\n";
}

void write_sweep_csv(std::ostream& out, SweepParameter parameter,
                     const std::vector<SweepRow>& rows) {
  const char* name = parameter == SweepParameter::kRounds  ? "rounds"
                     : parameter == SweepParameter::kBeta  ? "beta"
                                                           : "alpha";
  out << "param,value,p0,p_opt_conditional,p_opt_joint,optimum_rank,"
         "feasible_mass_after_grover\n";
  for (const SweepRow& row : rows) {
    out << name << ',' << format_double(row.parameter) << ',' << format_double(row.p0) << ','
        << format_double(row.optimum_conditional) << ',' << format_double(row.optimum_joint)
        << ',' << row.optimum_rank << ',' << format_double(row.feasible_mass_after_grover)
        << '\n';
  }
}

std::vector<double> parse_grid(const std::string& spec) {
  auto parse_number = [&spec](const std::string& token) {
    try {
      std::size_t used = 0;
      const double v = std::stod(token, &used);
      if (used != token.size() || !std::isfinite(v)) throw std::invalid_argument(token);
      return v;
    } catch (const std::exception&) {
      throw ParseError("malformed grid spec: '" + spec + "'");
    }
  };

  std::vector<double> grid;
  if (spec.find(':') != std::string::npos) {
    std::istringstream in(spec);
    std::string start_s, stop_s, step_s;
    if (!std::getline(in, start_s, ':') || !std::getline(in, stop_s, ':') ||
        !std::getline(in, step_s) || step_s.empty()) {
      throw ParseError("grid range must look like start:stop:step, got '" + spec + "'");
    }
    const double start = parse_number(start_s);
    const double stop = parse_number(stop_s);
    const double step = parse_number(step_s);
    if (step <= 0 || stop < start) {
      throw ParseError("grid range needs step > 0 and stop >= start: '" + spec + "'");
    }
    for (double v = start; v <= stop + 1e-9 * step; v += step) grid.push_back(v);
    return grid;
  }

  std::istringstream in(spec);
  std::string token;
  while (std::getline(in, token, ',')) {
    if (token.empty()) throw ParseError("empty entry in grid list: '" + spec + "'");
    grid.push_back(parse_number(token));
  }
  if (grid.empty()) throw ParseError("empty grid spec");
  return grid;
}

void atomic_write_file(const std::filesystem::path& path, const std::string& contents) {
  atomic_write_stream(path, [&contents](std::ostream& out) { out << contents; });
}

void atomic_write_stream(const std::filesystem::path& path,
                         const std::function<void(std::ostream&)>& writer) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  try {
    std::ofstream out;
    std::vector<char> buffer(std::size_t{1} << 20);  // registers can emit gigabytes
    out.rdbuf()->pubsetbuf(buffer.data(), static_cast<std::streamsize>(buffer.size()));
    out.open(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write to " + tmp.string());
    writer(out);
    out.flush();
    if (!out) throw std::runtime_error("short write to " + tmp.string());
  } catch (...) {
    std::error_code ec;
    std::filesystem::remove(tmp, ec);
    throw;
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace qtwt
