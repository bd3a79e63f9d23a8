#include "srwin/cli.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <optional>
#include <set>
#include <sstream>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "srwin/analytics.hpp"
#include "srwin/validate.hpp"

namespace srwin::cli {

namespace {

using Json = nlohmann::ordered_json;

const std::set<std::string, std::less<>> kKnownKeys{
    "protocol", "W",       "B",    "p",    "pa",  "R",      "C",      "copies", "horizon",
    "warmup",   "seed",    "reps", "payload", "axis", "values", "out", "format", "grid",
    "tol-scale"};

std::string canonical_key(std::string_view key) {
  if (key == "p_a") return "pa";
  if (key == "replications") return "reps";
  if (key == "tol_scale") return "tol-scale";
  return std::string(key);
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

template <typename T>
T parse_number(const std::string& key, std::string_view text) {
  T value{};
  const char* begin = text.data();
  const char* end = begin + text.size();
  if (!text.empty() && text.front() == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (text.empty() || ec != std::errc{} || ptr != end) {
    throw ConfigError(key, "cannot parse '" + std::string(text) + "' as a number");
  }
  return value;
}

std::vector<double> parse_values(std::string_view text) {
  std::vector<double> values;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    const auto piece = trim(text.substr(start, comma == std::string_view::npos ? text.npos : comma - start));
    values.push_back(parse_number<double>("values", piece));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return values;
}

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

Json json_num(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

// ---------------------------------------------------------------------------
// Output tables

const std::vector<std::string> kSimulateColumns{
    "protocol",      "W",          "B",          "p",
    "p_a",           "R",          "C",          "copies",
    "seed",          "replication", "throughput", "mean_occupancy",
    "mean_delay",    "window_max_tx", "wasted_tx", "littles_residual",
    "mean_block_tx", "delivered",  "measured_slots"};

std::vector<std::string> simulate_row(const sim::ExperimentConfig& c, const sim::MetricsReport& r,
                                      const std::string& replication, bool summary_row) {
  return {std::string(sim::to_string(c.protocol)),
          std::to_string(c.window),
          c.protocol == sim::Protocol::kArq ? std::string() : std::to_string(c.block_size),
          num(c.loss),
          num(c.ack_loss),
          std::to_string(c.rtt),
          std::to_string(c.capacity),
          std::to_string(c.copies),
          summary_row ? std::to_string(c.seed) : std::to_string(r.seed),
          replication,
          num(r.throughput),
          num(r.mean_occupancy),
          num(r.mean_delay),
          num(r.window_max_tx),
          summary_row ? num(static_cast<double>(r.wasted_tx)) : std::to_string(r.wasted_tx),
          num(r.littles_residual),
          num(r.mean_block_tx),
          summary_row ? num(static_cast<double>(r.delivered)) : std::to_string(r.delivered),
          summary_row ? num(static_cast<double>(r.measured_slots)) : std::to_string(r.measured_slots)};
}

void write_csv_row(std::ostream& out, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i > 0) out << ',';
    out << csv_field(fields[i]);
  }
  out << "\r\n";
}

Json config_json(const sim::ExperimentConfig& c) {
  return Json{{"protocol", sim::to_string(c.protocol)},
              {"W", c.window},
              {"B", c.block_size},
              {"p", c.loss},
              {"p_a", c.ack_loss},
              {"R", c.rtt},
              {"C", c.capacity},
              {"copies", c.copies},
              {"horizon", c.horizon},
              {"warmup", c.warmup},
              {"seed", c.seed},
              {"reps", c.replications},
              {"payload", c.payload_length}};
}

Json report_json(const sim::MetricsReport& r) {
  return Json{{"replication", r.replication},
              {"seed", r.seed},
              {"throughput", json_num(r.throughput)},
              {"mean_occupancy", json_num(r.mean_occupancy)},
              {"mean_delay", json_num(r.mean_delay)},
              {"window_max_tx", json_num(r.window_max_tx)},
              {"mean_block_tx", json_num(r.mean_block_tx)},
              {"littles_residual", json_num(r.littles_residual)},
              {"wasted_tx", r.wasted_tx},
              {"delivered", r.delivered},
              {"measured_slots", r.measured_slots},
              {"cohorts", r.cohorts},
              {"blocks", r.blocks},
              {"transmissions", r.transmissions}};
}

Json summary_json(const sim::MetricsReport& r) {
  Json j = report_json(r);
  j.erase("replication");
  j.erase("seed");
  return j;
}

Json result_json(const sim::RunResult& result) {
  Json reps = Json::array();
  for (const auto& r : result.replications) reps.push_back(report_json(r));
  return Json{{"config", config_json(result.config)},
              {"replications", std::move(reps)},
              {"mean", summary_json(result.mean)},
              {"stderr", summary_json(result.stderr_)}};
}

void write_result_csv(std::ostream& out, const sim::RunResult& result,
                      const std::vector<std::string>& prefix) {
  const auto emit = [&](std::vector<std::string> row) {
    row.insert(row.begin(), prefix.begin(), prefix.end());
    write_csv_row(out, row);
  };
  for (const auto& r : result.replications) {
    emit(simulate_row(result.config, r, std::to_string(r.replication), false));
  }
  emit(simulate_row(result.config, result.mean, "mean", true));
  emit(simulate_row(result.config, result.stderr_, "stderr", true));
}

// ---------------------------------------------------------------------------
// analyze

struct Quantity {
  std::string name;
  std::optional<double> value;  // empty when the formula is outside its domain
};

std::optional<double> guarded(const std::function<double()>& f) {
  try {
    return f();
  } catch (const std::domain_error&) {
    return std::nullopt;
  } catch (const std::invalid_argument&) {
    return std::nullopt;
  }
}

struct Analysis {
  std::vector<Quantity> quantities;
  analytics::ComparisonSummary table;
};

Analysis analyze(const sim::ExperimentConfig& c) {
  using namespace analytics;
  ProtocolParams params;
  params.window = c.window;
  params.loss = c.loss;
  params.ack_loss = c.ack_loss;
  params.rtt = static_cast<double>(c.rtt);
  params.capacity = c.capacity;
  params.block_size = c.block_size;
  params.validate();

  const auto w = c.window;
  const auto b = c.block_size;
  const double p = c.loss;
  const double r = params.rtt;
  Analysis a;
  auto& q = a.quantities;
  const auto add = [&q](std::string name, std::optional<double> v) { q.push_back({std::move(name), v}); };

  add("W", w);
  add("B", b);
  add("M", params.blocks());
  add("p", p);
  add("p_a", c.ack_loss);
  add("R", r);
  add("C", params.capacity);
  add("copies", c.copies);
  add("arq_max_retx_exact", arq_max_retx_exact(w, p));
  add("arq_max_retx_alternating",
      w <= 64 ? guarded([&] { return arq_max_retx_alternating(w, p); }) : std::nullopt);
  add("arq_max_retx_series", arq_max_retx_series(w, p));
  add("arq_max_retx_asymptotic", guarded([&] { return arq_max_retx_asymptotic(w, p); }));
  add("arq_buffer_lower", guarded([&] { return buffer_bounds_arq(w, p).lower; }));
  add("arq_buffer_upper", guarded([&] { return buffer_bounds_arq(w, p).upper; }));
  if (p > 0.0) {
    const auto k = asymptotic_constants(p);
    add("lambda", k.lambda);
    add("eps_geom", k.eps_geom);
  } else {
    add("lambda", std::nullopt);
    add("eps_geom", std::nullopt);
  }
  add("fec_max_retx_regime1", guarded([&] { return fec_max_retx_asymptotic_regime1(w, b, p); }));
  const auto reg2 = fec_retx_regime2(b, p);
  add("fec_retx_per_block", reg2.per_block);
  add("fec_retx_per_packet", reg2.per_packet);
  add("fec_buffer_regime2", fec_buffer_regime2(w, p));
  add("fec_delay_regime2", littles_delay(fec_buffer_regime2(w, p), w, p, r));
  add("dependent_tx_expected", dependent_tx_expected(b, p));
  add("dependent_extra_per_block", dependent_tx_expected(b, p) * (1.0 - p) - b);
  const auto budget = extra_packet_budget(b);
  add("extra_packet_budget", budget);
  add("decode_success_prob", decode_success_prob(b, budget));
  add("decode_success_lower_bound", decode_success_lower_bound(budget));
  add("throughput_loss_dependent", throughput_loss_dependent(b, w, p, r));
  add("throughput", (1.0 - p) * params.capacity);
  add("lossy_feedback_throughput", lossy_feedback_throughput(p, c.ack_loss, c.copies, params.capacity));
  add("redundant_ack_count",
      guarded([&] { return static_cast<double>(redundant_ack_count(w, 0.0)); }));

  a.table = comparison_summary(params);
  return a;
}

void write_analysis(std::ostream& out, const Analysis& a, bool json) {
  if (json) {
    Json quantities = Json::object();
    for (const auto& q : a.quantities) {
      quantities[q.name] = q.value ? json_num(*q.value) : Json(nullptr);
    }
    Json rows = Json::array();
    for (const auto& row : a.table.rows) {
      rows.push_back(Json{{"protocol", row.protocol},
                          {"throughput_class", row.throughput_class},
                          {"buffer_class", row.buffer_class},
                          {"delay_class", row.delay_class},
                          {"feedback_class", row.feedback_class},
                          {"throughput", json_num(row.throughput)},
                          {"retx_estimate", json_num(row.retx_estimate)},
                          {"buffer_estimate", json_num(row.buffer_estimate)},
                          {"delay_estimate", json_num(row.delay_estimate)},
                          {"ack_header_bits", json_num(row.ack_header_bits)}});
    }
    Json doc{{"command", "analyze"},
             {"quantities", std::move(quantities)},
             {"comparison", std::move(rows)},
             {"comparison_fec_row", a.table.fec_row}};
    out << doc.dump(2) << '\n';
    return;
  }
  write_csv_row(out, {"quantity", "value"});
  for (const auto& q : a.quantities) write_csv_row(out, {q.name, q.value ? num(*q.value) : ""});
  for (std::size_t i = 0; i < a.table.rows.size(); ++i) {
    const auto& row = a.table.rows[i];
    const std::string prefix = "comparison[" + row.protocol + "].";
    write_csv_row(out, {prefix + "throughput_class", row.throughput_class});
    write_csv_row(out, {prefix + "buffer_class", row.buffer_class});
    write_csv_row(out, {prefix + "delay_class", row.delay_class});
    write_csv_row(out, {prefix + "feedback_class", row.feedback_class});
    write_csv_row(out, {prefix + "throughput", num(row.throughput)});
    write_csv_row(out, {prefix + "retx_estimate", num(row.retx_estimate)});
    write_csv_row(out, {prefix + "buffer_estimate", num(row.buffer_estimate)});
    write_csv_row(out, {prefix + "delay_estimate", num(row.delay_estimate)});
    write_csv_row(out, {prefix + "ack_header_bits", num(row.ack_header_bits)});
  }
  write_csv_row(out, {"comparison.fec_row", a.table.rows[a.table.fec_row].protocol});
}

// ---------------------------------------------------------------------------
// validate

void write_checks(std::ostream& out, const std::vector<validate::Check>& checks, bool all_pass,
                  bool json) {
  if (json) {
    Json list = Json::array();
    for (const auto& c : checks) {
      list.push_back(Json{{"criterion", c.criterion},
                          {"name", c.name},
                          {"simulated", json_num(c.simulated)},
                          {"analytic", json_num(c.analytic)},
                          {"tolerance", json_num(c.tolerance)},
                          {"verdict", c.pass ? "PASS" : "FAIL"}});
    }
    out << Json{{"command", "validate"}, {"pass", all_pass}, {"checks", std::move(list)}}.dump(2)
        << '\n';
    return;
  }
  write_csv_row(out, {"criterion", "name", "simulated", "analytic", "tolerance", "verdict"});
  for (const auto& c : checks) {
    write_csv_row(out, {c.criterion, c.name, num(c.simulated), num(c.analytic), num(c.tolerance),
                        c.pass ? "PASS" : "FAIL"});
  }
}

// ---------------------------------------------------------------------------

bool read_file(const std::string& path, std::string& text) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return false;
  std::ostringstream buf;
  buf << in.rdbuf();
  text = buf.str();
  return !in.bad();
}

struct Sink {
  std::ostringstream buffer;
  // Writes the buffered document to `path` or `out`; false on I/O failure.
  bool flush(const std::string& path, std::ostream& out) const {
    if (path.empty() || path == "-") {
      out << buffer.str();
      return static_cast<bool>(out);
    }
    std::ofstream file(path, std::ios::binary | std::ios::trunc);
    if (!file) return false;
    file << buffer.str();
    file.close();
    return !file.fail();
  }
};

std::string setting(const Settings& s, const std::string& key, std::string fallback) {
  const auto it = s.find(key);
  return it == s.end() ? std::move(fallback) : it->second;
}

}  // namespace

std::string csv_field(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
  std::string quoted = "\"";
  for (char ch : field) {
    if (ch == '"') quoted += '"';
    quoted += ch;
  }
  quoted += '"';
  return quoted;
}

Settings parse_config_text(std::string_view text) {
  Settings settings;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start < text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    auto line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError(std::string(line), "line " + std::to_string(line_no) + " is not 'key = value'");
    }
    const auto key = canonical_key(trim(line.substr(0, eq)));
    if (!kKnownKeys.contains(key)) throw ConfigError(key, "unknown key");
    settings[key] = std::string(trim(line.substr(eq + 1)));
  }
  return settings;
}

sim::ExperimentConfig build_config(const Settings& settings) {
  sim::ExperimentConfig cfg;
  for (const auto& [key, value] : settings) {
    if (!kKnownKeys.contains(key)) throw ConfigError(key, "unknown key");
  }
  const auto get = [&settings](const char* key) -> const std::string* {
    const auto it = settings.find(key);
    return it == settings.end() ? nullptr : &it->second;
  };
  if (const auto* v = get("protocol")) {
    try {
      cfg.protocol = sim::parse_protocol(*v);
    } catch (const std::invalid_argument& e) {
      throw ConfigError("protocol", e.what());
    }
  }
  if (const auto* v = get("W")) cfg.window = parse_number<std::uint32_t>("W", *v);
  cfg.block_size = cfg.window;
  const auto* block = get("B");
  if (block != nullptr) cfg.block_size = parse_number<std::uint32_t>("B", *block);
  if (const auto* v = get("p")) cfg.loss = parse_number<double>("p", *v);
  if (const auto* v = get("pa")) cfg.ack_loss = parse_number<double>("pa", *v);
  if (const auto* v = get("R")) cfg.rtt = parse_number<Slot>("R", *v);
  if (const auto* v = get("C")) cfg.capacity = parse_number<std::uint32_t>("C", *v);
  if (const auto* v = get("copies")) cfg.copies = parse_number<std::uint32_t>("copies", *v);
  if (const auto* v = get("horizon")) cfg.horizon = parse_number<Slot>("horizon", *v);
  if (const auto* v = get("warmup")) cfg.warmup = parse_number<std::int64_t>("warmup", *v);
  if (const auto* v = get("seed")) cfg.seed = parse_number<std::uint64_t>("seed", *v);
  if (const auto* v = get("reps")) cfg.replications = parse_number<std::uint32_t>("reps", *v);
  if (const auto* v = get("payload")) cfg.payload_length = parse_number<std::size_t>("payload", *v);

  if (cfg.window < 1) throw ConfigError("W", "must be at least 1");
  if (!(cfg.loss >= 0.0 && cfg.loss < 1.0)) throw ConfigError("p", "must lie in [0, 1)");
  if (!(cfg.ack_loss >= 0.0 && cfg.ack_loss < 1.0)) throw ConfigError("pa", "must lie in [0, 1)");
  if (cfg.block_size < 1 || cfg.block_size > cfg.window || cfg.window % cfg.block_size != 0) {
    throw ConfigError("B", "W is an integer multiple of B (got W=" + std::to_string(cfg.window) +
                               ", B=" + std::to_string(cfg.block_size) + ")");
  }
  if (cfg.warmup < -1) throw ConfigError("warmup", "must be -1 (automatic) or non-negative");
  try {
    (void)cfg.resolved();
  } catch (const std::invalid_argument& e) {
    const std::string msg = e.what();
    const auto colon = msg.find(':');
    throw ConfigError(colon == std::string::npos ? "config" : msg.substr(0, colon),
                      colon == std::string::npos ? msg : std::string(trim(msg.substr(colon + 1))));
  }
  return cfg;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Selective-repeat ARQ / fountain-coded SR simulator and analytics"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  Settings flags;
  std::string config_path;
  std::string trace_path;
  int verbosity = 0;
  std::vector<std::pair<std::string, CLI::Option*>> flag_options;

  const auto add_experiment_flags = [&](CLI::App* sub) {
    const auto opt = [&](const std::string& key, const std::string& help) {
      flag_options.emplace_back(key, sub->add_option("--" + key, flags[key], help));
    };
    opt("protocol", "arq | fec-ideal | fec-oblivious (default arq)");
    opt("W", "window size in packets (default 64)");
    opt("B", "coding block size, must divide W (default W)");
    opt("p", "forward loss probability in [0,1) (default 0.1)");
    opt("pa", "feedback loss probability in [0,1) (default 0)");
    opt("R", "round-trip time in slots (default W/C)");
    opt("C", "transmissions per slot (default W/R, or 1)");
    opt("copies", "ACK copies per feedback (default 1)");
    opt("seed", "master seed (default $SRWIN_SEED or 1)");
    opt("out", "output path (default stdout)");
    opt("format", "csv | json (default csv)");
    sub->add_option("--config", config_path, "key = value settings file");
    sub->add_flag("-v,--verbose", verbosity, "progress on stderr");
  };
  const auto add_run_flags = [&](CLI::App* sub) {
    const auto opt = [&](const std::string& key, const std::string& help) {
      flag_options.emplace_back(key, sub->add_option("--" + key, flags[key], help));
    };
    opt("horizon", "slots per replication (default derived)");
    opt("warmup", "slots discarded before measuring, -1 automatic (default -1)");
    opt("reps", "replications (default 10)");
    opt("payload", "payload bytes per coded packet, oblivious mode (default 0)");
  };

  auto* analyze_cmd = app.add_subcommand("analyze", "evaluate every closed-form quantity");
  add_experiment_flags(analyze_cmd);
  auto* simulate_cmd = app.add_subcommand("simulate", "run replications of one configuration");
  add_experiment_flags(simulate_cmd);
  add_run_flags(simulate_cmd);
  simulate_cmd->add_option("--trace", trace_path, "event trace CSV of the first replication");
  auto* sweep_cmd = app.add_subcommand("sweep", "run replications along one parameter axis");
  add_experiment_flags(sweep_cmd);
  add_run_flags(sweep_cmd);
  flag_options.emplace_back("axis", sweep_cmd->add_option("--axis", flags["axis"], "W | p | B | p_a | copies"));
  flag_options.emplace_back("values",
                            sweep_cmd->add_option("--values", flags["values"], "comma-separated axis values"));
  auto* validate_cmd = app.add_subcommand("validate", "paired simulation / analytic checks");
  add_experiment_flags(validate_cmd);
  flag_options.emplace_back("grid", validate_cmd->add_option("--grid", flags["grid"], "quick | full (default quick)"));
  flag_options.emplace_back(
      "tol-scale", validate_cmd->add_option("--tol-scale", flags["tol-scale"], "tolerance multiplier (default 1)"));

  try {
    app.parse(argc, const_cast<char**>(argv));
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  Settings settings;
  if (const char* env = std::getenv("SRWIN_SEED"); env != nullptr && *env != '\0') {
    settings["seed"] = env;
  }
  if (!config_path.empty()) {
    std::string text;
    if (!read_file(config_path, text)) {
      err << "error: cannot read config file '" << config_path << "'\n";
      return kExitIo;
    }
    try {
      for (auto& [k, v] : parse_config_text(text)) settings[k] = v;
    } catch (const ConfigError& e) {
      err << "error: " << e.what() << '\n';
      return kExitUsage;
    }
  }
  for (const auto& [key, option] : flag_options) {
    if (option->count() > 0) settings[key] = flags[key];
  }

  const std::string format = setting(settings, "format", "csv");
  const std::string out_path = setting(settings, "out", "");
  if (format != "csv" && format != "json") {
    err << "error: format: expected csv or json, got '" << format << "'\n";
    return kExitUsage;
  }
  const bool json = format == "json";

  sim::ExperimentConfig cfg;
  try {
    Settings experiment = settings;
    for (const char* key : {"axis", "values", "out", "format", "grid", "tol-scale"}) experiment.erase(key);
    cfg = build_config(experiment);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  Sink sink;
  int status = kExitOk;
  try {
    if (analyze_cmd->parsed()) {
      const auto resolved = cfg.resolved();
      write_analysis(sink.buffer, analyze(resolved), json);
    } else if (simulate_cmd->parsed()) {
      if (!trace_path.empty()) {
        std::ofstream trace_file(trace_path, std::ios::binary | std::ios::trunc);
        if (!trace_file) {
          err << "error: cannot open trace file '" << trace_path << "'\n";
          return kExitIo;
        }
        sim::TraceSink trace(trace_file);
        (void)sim::simulate(cfg.resolved(), cfg.seed + 1, &trace);
        if (!trace_file) {
          err << "error: failed writing trace file '" << trace_path << "'\n";
          return kExitIo;
        }
      }
      const auto result = sim::run(cfg);
      if (verbosity > 0) {
        err << "simulated " << result.replications.size() << " replications of "
            << result.config.horizon << " slots\n";
      }
      if (json) {
        Json doc{{"command", "simulate"}};
        doc.update(result_json(result));
        sink.buffer << doc.dump(2) << '\n';
      } else {
        write_csv_row(sink.buffer, kSimulateColumns);
        write_result_csv(sink.buffer, result, {});
      }
    } else if (sweep_cmd->parsed()) {
      const std::string axis = setting(settings, "axis", "");
      const std::string values_text = setting(settings, "values", "");
      if (axis.empty() || values_text.empty()) {
        err << "error: " << (axis.empty() ? "axis" : "values") << ": required for sweep\n";
        return kExitUsage;
      }
      std::vector<double> values;
      std::vector<sim::SweepPoint> points;
      try {
        values = parse_values(values_text);
        for (double v : values) {
          // Every point must be a valid configuration on its own.
          Settings point = settings;
          for (const char* key : {"axis", "values", "out", "format"}) point.erase(key);
          const std::string axis_key = axis == "p_a" ? "pa" : axis;
          if (!kKnownKeys.contains(axis_key) ||
              (axis_key != "W" && axis_key != "p" && axis_key != "B" && axis_key != "pa" &&
               axis_key != "copies")) {
            throw ConfigError("axis", "expected W, p, B, p_a or copies, got '" + axis + "'");
          }
          point[axis_key] = num(v);
          if (axis_key == "W" && !settings.contains("B")) point.erase("B");
          if (axis_key == "W" && settings.contains("R") && settings.contains("C")) point.erase("R");
          (void)build_config(point);
        }
        points = sim::sweep(cfg, axis, values);
      } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
      } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
      }
      if (json) {
        Json list = Json::array();
        for (const auto& point : points) {
          Json j{{"value", point.value}};
          j.update(result_json(point.result));
          list.push_back(std::move(j));
        }
        sink.buffer << Json{{"command", "sweep"}, {"axis", axis}, {"points", std::move(list)}}.dump(2)
                    << '\n';
      } else {
        std::vector<std::string> header{"axis", "value"};
        header.insert(header.end(), kSimulateColumns.begin(), kSimulateColumns.end());
        write_csv_row(sink.buffer, header);
        for (const auto& point : points) write_result_csv(sink.buffer, point.result, {axis, num(point.value)});
      }
    } else if (validate_cmd->parsed()) {
      validate::Options options;
      const std::string grid = setting(settings, "grid", "quick");
      if (grid != "quick" && grid != "full") {
        err << "error: grid: expected quick or full, got '" << grid << "'\n";
        return kExitUsage;
      }
      options.full = grid == "full";
      try {
        options.tol_scale = parse_number<double>("tol-scale", setting(settings, "tol-scale", "1"));
      } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
      }
      if (!(options.tol_scale >= 0.0)) {
        err << "error: tol-scale: must be non-negative\n";
        return kExitUsage;
      }
      options.seed = cfg.seed;
      if (settings.contains("W")) options.window = cfg.window;
      if (settings.contains("p")) options.loss = cfg.loss;
      validate::Validator validator(options);
      const auto checks = validator.run_all();
      bool all_pass = true;
      for (const auto& c : checks) {
        all_pass = all_pass && c.pass;
        if (verbosity > 0) err << (c.pass ? "PASS " : "FAIL ") << c.criterion << ' ' << c.name << '\n';
      }
      write_checks(sink.buffer, checks, all_pass, json);
      if (!all_pass) status = kExitValidationFailed;
    }
  } catch (const sim::SimulationError& e) {
    err << "error: simulation invariant violated: " << e.what() << '\n';
    return kExitSimulation;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::domain_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  if (!sink.flush(out_path, out)) {
    err << "error: cannot write output '" << out_path << "'\n";
    return kExitIo;
  }
  return status;
}

}  // namespace srwin::cli
