#include "vvkrr/cli/config.hpp"

#include <cmath>
#include <functional>
#include <map>
#include <sstream>

#include "vvkrr/textio.hpp"

namespace vvkrr::cli {
namespace {

using text::format_double;
using text::format_double_list;

std::size_t parse_count(std::string_view v) {
  const long long n = text::parse_integer(v);
  if (n < 0) throw std::invalid_argument("expected a nonnegative integer");
  return static_cast<std::size_t>(n);
}

std::uint64_t parse_seed(std::string_view v) {
  const long long n = text::parse_integer(v);
  if (n < 0) throw std::invalid_argument("expected a nonnegative integer");
  return static_cast<std::uint64_t>(n);
}

std::vector<std::size_t> parse_count_list(std::string_view v) {
  std::vector<std::size_t> out;
  for (double d : text::parse_double_list(v)) {
    if (!(d >= 0.0) || d != std::floor(d)) throw std::invalid_argument("expected a list of nonnegative integers");
    out.push_back(static_cast<std::size_t>(d));
  }
  return out;
}

std::string format_count_list(const std::vector<std::size_t>& v) {
  std::string out;
  for (std::size_t k = 0; k < v.size(); ++k) out += (k ? ", " : "") + std::to_string(v[k]);
  return out;
}

struct Field {
  std::function<void(ExperimentConfig&, std::string_view)> set;
  std::function<std::optional<std::string>(const ExperimentConfig&)> get;
};

template <class T>
Field real_field(T ExperimentConfig::*member) {
  return {[member](ExperimentConfig& c, std::string_view v) { c.*member = text::parse_double(v); },
          [member](const ExperimentConfig& c) -> std::optional<std::string> { return format_double(c.*member); }};
}

Field optional_real_field(std::optional<double> ExperimentConfig::*member) {
  return {[member](ExperimentConfig& c, std::string_view v) { c.*member = text::parse_double(v); },
          [member](const ExperimentConfig& c) -> std::optional<std::string> {
            if (!(c.*member)) return std::nullopt;
            return format_double(*(c.*member));
          }};
}

Field count_field(std::size_t ExperimentConfig::*member) {
  return {[member](ExperimentConfig& c, std::string_view v) { c.*member = parse_count(v); },
          [member](const ExperimentConfig& c) -> std::optional<std::string> { return std::to_string(c.*member); }};
}

Field seed_field(std::uint64_t ExperimentConfig::*member) {
  return {[member](ExperimentConfig& c, std::string_view v) { c.*member = parse_seed(v); },
          [member](const ExperimentConfig& c) -> std::optional<std::string> { return std::to_string(c.*member); }};
}

Field list_field(std::vector<double> ExperimentConfig::*member) {
  return {[member](ExperimentConfig& c, std::string_view v) { c.*member = text::parse_double_list(v); },
          [member](const ExperimentConfig& c) -> std::optional<std::string> {
            if ((c.*member).empty()) return std::nullopt;
            return format_double_list(c.*member);
          }};
}

Field string_field(std::string ExperimentConfig::*member) {
  return {[member](ExperimentConfig& c, std::string_view v) {
            if (v.empty()) throw std::invalid_argument("value must not be empty");
            c.*member = std::string(v);
          },
          [member](const ExperimentConfig& c) -> std::optional<std::string> { return c.*member; }};
}

const std::map<std::string, Field, std::less<>>& fields() {
  static const std::map<std::string, Field, std::less<>> table = [] {
    std::map<std::string, Field, std::less<>> t;
    t["id"] = string_field(&ExperimentConfig::config_id);

    t["spectral.size"] = count_field(&ExperimentConfig::spectral_size);
    t["spectral.p"] = real_field(&ExperimentConfig::p);
    t["spectral.scale"] = real_field(&ExperimentConfig::decay_scale);
    t["spectral.eigenvalues"] = list_field(&ExperimentConfig::eigenvalues);

    t["target.beta"] = real_field(&ExperimentConfig::beta);
    t["target.bound"] = real_field(&ExperimentConfig::bound);
    t["target.d_y"] = count_field(&ExperimentConfig::d_y);
    t["target.kind"] = {
        [](ExperimentConfig& c, std::string_view v) { c.target_kind = target_kind_from_string(v); },
        [](const ExperimentConfig& c) -> std::optional<std::string> { return std::string(to_string(c.target_kind)); }};
    t["target.seed"] = seed_field(&ExperimentConfig::target_seed);

    t["noise.kind"] = {
        [](ExperimentConfig& c, std::string_view v) { c.noise_kind = noise_kind_from_string(v); },
        [](const ExperimentConfig& c) -> std::optional<std::string> { return std::string(to_string(c.noise_kind)); }};
    t["noise.sigma_bar"] = real_field(&ExperimentConfig::sigma_bar);
    t["noise.direction"] = list_field(&ExperimentConfig::noise_direction);

    t["kernel.family"] = {
        [](ExperimentConfig& c, std::string_view v) { c.kernel_family = kernel_family_from_string(v); },
        [](const ExperimentConfig& c) -> std::optional<std::string> {
          return std::string(to_string(c.kernel_family));
        }};
    t["kernel.lengthscale"] = real_field(&ExperimentConfig::lengthscale);
    t["kernel.nu"] = real_field(&ExperimentConfig::matern_nu);
    t["kernel.nodes"] = count_field(&ExperimentConfig::section_nodes);

    t["schedule.gamma"] = real_field(&ExperimentConfig::gamma);
    t["schedule.alpha"] = optional_real_field(&ExperimentConfig::alpha);
    t["schedule.theta"] = real_field(&ExperimentConfig::theta);
    t["schedule.c0"] = real_field(&ExperimentConfig::c0);
    t["schedule.lambda"] = optional_real_field(&ExperimentConfig::fixed_lambda);

    t["experiment.ns"] = {
        [](ExperimentConfig& c, std::string_view v) { c.ns = parse_count_list(v); },
        [](const ExperimentConfig& c) -> std::optional<std::string> { return format_count_list(c.ns); }};
    t["experiment.n_seeds"] = count_field(&ExperimentConfig::n_seeds);
    t["experiment.tolerance"] = optional_real_field(&ExperimentConfig::tolerance);
    t["experiment.theory_exponent"] = optional_real_field(&ExperimentConfig::theory_exponent);
    t["experiment.master_seed"] = seed_field(&ExperimentConfig::master_seed);
    t["experiment.n_test"] = count_field(&ExperimentConfig::n_test);
    t["experiment.output_dir"] = string_field(&ExperimentConfig::output_dir);

    t["sweep.lambda_min"] = real_field(&ExperimentConfig::lambda_min);
    t["sweep.lambda_max"] = real_field(&ExperimentConfig::lambda_max);
    t["sweep.points"] = count_field(&ExperimentConfig::lambda_points);

    t["lowerbound.trials"] = count_field(&ExperimentConfig::trials);
    t["lowerbound.pairs"] = count_field(&ExperimentConfig::pairs);
    t["lowerbound.mc_draws"] = count_field(&ExperimentConfig::mc_draws);
    t["lowerbound.sigmas"] = list_field(&ExperimentConfig::kl_sigmas);

    t["nystrom.points"] = count_field(&ExperimentConfig::nystrom_points);
    return t;
  }();
  return table;
}

std::string range(const char* key, const std::string& value, const char* rule) {
  return std::string(key) + " = " + value + ": " + rule;
}

void validate(const ExperimentConfig& c, std::vector<std::string>& diag) {
  const auto d = [](double v) { return format_double(v); };
  if (c.eigenvalues.empty()) {
    if (c.spectral_size < 1) diag.push_back(range("spectral.size", std::to_string(c.spectral_size), "must be >= 1"));
    if (!(c.decay_scale > 0.0)) diag.push_back(range("spectral.scale", d(c.decay_scale), "must be positive"));
  } else {
    for (std::size_t i = 0; i < c.eigenvalues.size(); ++i) {
      if (!(c.eigenvalues[i] > 0.0) || (i > 0 && c.eigenvalues[i] > c.eigenvalues[i - 1])) {
        diag.push_back("spectral.eigenvalues: must be positive and nonincreasing");
        break;
      }
    }
  }
  if (!(c.p > 0.0 && c.p <= 1.0)) diag.push_back(range("spectral.p", d(c.p), "admissible range is (0, 1]"));
  if (!(c.beta > 0.0 && c.beta <= 2.0)) diag.push_back(range("target.beta", d(c.beta), "admissible range is (0, 2]"));
  if (!(c.bound > 0.0)) diag.push_back(range("target.bound", d(c.bound), "must be positive"));
  if (c.d_y < 1) diag.push_back(range("target.d_y", std::to_string(c.d_y), "must be >= 1"));
  if (!(c.sigma_bar >= 0.0) || !std::isfinite(c.sigma_bar)) {
    diag.push_back(range("noise.sigma_bar", d(c.sigma_bar), "must be finite and >= 0"));
  }
  if (!c.noise_direction.empty()) {
    if (c.noise_direction.size() != c.d_y) diag.push_back("noise.direction: length must equal target.d_y");
    double norm = 0.0;
    for (double v : c.noise_direction) norm += v * v;
    if (!(norm > 0.0)) diag.push_back("noise.direction: must be nonzero");
  }
  if (!(c.lengthscale > 0.0)) diag.push_back(range("kernel.lengthscale", d(c.lengthscale), "must be positive"));
  if (c.matern_nu != 0.5 && c.matern_nu != 1.5 && c.matern_nu != 2.5) {
    diag.push_back(range("kernel.nu", d(c.matern_nu), "supported orders are 0.5, 1.5, 2.5"));
  }
  if (c.section_nodes < 1) diag.push_back(range("kernel.nodes", std::to_string(c.section_nodes), "must be >= 1"));
  if (!(c.gamma >= 0.0 && c.gamma <= 1.0 && c.gamma < c.beta)) {
    diag.push_back(range("schedule.gamma", d(c.gamma), "must lie in [0, 1] and below target.beta"));
  }
  const double alpha = c.alpha_or_default();
  if (!(alpha >= c.p && alpha <= 1.0)) diag.push_back(range("schedule.alpha", d(alpha), "admissible range is [p, 1]"));
  if (!(c.theta > 1.0)) diag.push_back(range("schedule.theta", d(c.theta), "must exceed 1"));
  if (!(c.c0 > 0.0)) diag.push_back(range("schedule.c0", d(c.c0), "must be positive"));
  if (c.fixed_lambda && !(*c.fixed_lambda > 0.0)) {
    diag.push_back(range("schedule.lambda", d(*c.fixed_lambda), "must be positive"));
  }
  bool ns_ok = c.ns.size() >= 4;
  for (std::size_t k = 0; k < c.ns.size(); ++k) {
    if (c.ns[k] < 2 || (k > 0 && c.ns[k] <= c.ns[k - 1])) ns_ok = false;
  }
  if (!ns_ok) diag.push_back("experiment.ns: need >= 4 strictly increasing sizes, each >= 2");
  if (c.n_seeds < 1) diag.push_back(range("experiment.n_seeds", std::to_string(c.n_seeds), "must be >= 1"));
  if (c.tolerance && !(*c.tolerance > 0.0)) {
    diag.push_back(range("experiment.tolerance", d(*c.tolerance), "must be positive"));
  }
  if (c.n_test < 1) diag.push_back(range("experiment.n_test", std::to_string(c.n_test), "must be >= 1"));
  if (!(c.lambda_min > 0.0 && c.lambda_min < c.lambda_max)) {
    diag.push_back("sweep.lambda_min, sweep.lambda_max: need 0 < lambda_min < lambda_max");
  }
  if (c.lambda_points < 4) diag.push_back(range("sweep.points", std::to_string(c.lambda_points), "must be >= 4"));
  if (c.pairs < 1) diag.push_back(range("lowerbound.pairs", std::to_string(c.pairs), "must be >= 1"));
  if (c.mc_draws < 2) diag.push_back(range("lowerbound.mc_draws", std::to_string(c.mc_draws), "must be >= 2"));
  for (double s : c.kl_sigmas) {
    if (!(s > 0.0)) {
      diag.push_back("lowerbound.sigmas: every noise level must be positive");
      break;
    }
  }
  if (c.nystrom_points < 2) diag.push_back(range("nystrom.points", std::to_string(c.nystrom_points), "must be >= 2"));
}

std::string join(const std::vector<std::string>& lines) {
  std::string out = "invalid configuration:";
  for (const auto& l : lines) out += "\n  " + l;
  return out;
}

}  // namespace

double ExperimentConfig::tolerance_or_default() const {
  if (tolerance) return *tolerance;
  const bool relaxed = beta < 1.0 || target_kind == TargetKind::boundary || gamma > 0.0 ||
                       kernel_family != KernelFamily::designed_mercer;
  return relaxed ? 0.15 : 0.12;
}

ConfigError::ConfigError(std::vector<std::string> diagnostics)
    : std::invalid_argument(join(diagnostics)), diagnostics_(std::move(diagnostics)) {}

Override parse_override(std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos) throw std::invalid_argument("override '" + std::string(assignment) + "' lacks '='");
  return {std::string(text::trim(assignment.substr(0, eq))), std::string(text::trim(assignment.substr(eq + 1)))};
}

ExperimentConfig parse_config(std::string_view body, const std::vector<Override>& overrides) {
  std::vector<std::string> diag;
  std::vector<text::KeyValue> entries;
  try {
    entries = text::parse_key_values(body);
  } catch (const std::invalid_argument& e) {
    throw ConfigError({e.what()});
  }
  for (const auto& [k, v] : overrides) entries.push_back({k, v, 0});

  ExperimentConfig config;
  std::map<std::string, int, std::less<>> seen;
  for (const auto& kv : entries) {
    const std::string where = kv.line > 0 ? "line " + std::to_string(kv.line) + ": " : "override: ";
    const auto it = fields().find(kv.key);
    if (it == fields().end()) {
      diag.push_back(where + "unknown key '" + kv.key + "'");
      continue;
    }
    if (kv.line > 0) {
      if (const auto prev = seen.find(kv.key); prev != seen.end()) {
        diag.push_back(where + "duplicate key '" + kv.key + "' (first set on line " + std::to_string(prev->second) + ")");
        continue;
      }
      seen.emplace(kv.key, kv.line);
    }
    try {
      it->second.set(config, kv.value);
    } catch (const std::invalid_argument& e) {
      diag.push_back(where + kv.key + " = '" + kv.value + "': " + e.what());
    }
  }
  validate(config, diag);
  if (!diag.empty()) throw ConfigError(std::move(diag));
  return config;
}

std::string echo_config(const ExperimentConfig& config) {
  std::ostringstream out;
  for (const auto& [key, field] : fields()) {
    if (key.find('.') != std::string::npos) continue;
    if (const auto value = field.get(config)) out << key << " = " << *value << '\n';
  }
  std::string section;
  for (const auto& [key, field] : fields()) {
    if (key.find('.') == std::string::npos) continue;
    const auto value = field.get(config);
    if (!value) continue;
    const auto dot = key.find('.');
    const std::string sec = dot == std::string::npos ? "" : key.substr(0, dot);
    const std::string name = dot == std::string::npos ? key : key.substr(dot + 1);
    if (sec != section) {
      out << '[' << sec << "]\n";
      section = sec;
    }
    out << name << " = " << *value << '\n';
  }
  return out.str();
}

}  // namespace vvkrr::cli
