#include "chiprobe/config.hpp"

#include <charconv>
#include <cmath>
#include <functional>
#include <map>
#include <sstream>

#include "chiprobe/error.hpp"
#include "chiprobe/states.hpp"

namespace chiprobe {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

double real_value(const std::string& text) {
  double v = 0.0;
  try {
    v = parse_real(text);
  } catch (const std::exception&) {
    fail(ErrorCode::kConfig, "'" + text + "' is not a number");
  }
  if (!std::isfinite(v)) fail(ErrorCode::kConfig, "'" + text + "' is not finite");
  return v;
}

template <typename Int>
Int integer_value(const std::string& text) {
  Int v{};
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc{} || ptr != end) fail(ErrorCode::kConfig, "'" + text + "' is not a valid integer");
  return v;
}

std::vector<double> real_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(real_value(item));
  }
  return out;
}

std::string real_text(double v) {
  char buffer[40];
  std::snprintf(buffer, sizeof buffer, "%.17g", v);
  return buffer;
}

std::string join(const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) out += (i ? "," : "") + real_text(values[i]);
  return out;
}

Command command_value(const std::string& text) {
  static const std::map<std::string, Command> names{{"scan", Command::kScan},
                                                    {"reconstruct", Command::kReconstruct},
                                                    {"moments", Command::kMoments},
                                                    {"cat", Command::kCat},
                                                    {"oracle-check", Command::kOracleCheck},
                                                    {"budget", Command::kBudget}};
  const auto it = names.find(text);
  if (it == names.end()) {
    fail(ErrorCode::kConfig, "unknown command '" + text + "' (scan, reconstruct, moments, cat, oracle-check, budget)");
  }
  return it->second;
}

ShotPolicy shots_value(const std::string& text) {
  if (text == "infinite") return ShotPolicy::infinite();
  if (text.rfind("budget:", 0) == 0) {
    const double eps = real_value(text.substr(7));
    if (!(eps > 0.0 && eps <= 1.0)) fail(ErrorCode::kConfig, "budget target must lie in (0, 1]");
    return ShotPolicy::budgeted(eps);
  }
  if (text.rfind("fixed:", 0) == 0) {
    const auto m = integer_value<std::uint64_t>(text.substr(6));
    if (m == 0) fail(ErrorCode::kConfig, "fixed shot count must be >= 1");
    return ShotPolicy::fixed(m);
  }
  fail(ErrorCode::kConfig, "expected infinite, budget:<eps> or fixed:<M>");
}

int sign_value(const std::string& text) {
  if (text == "+" || text == "+1" || text == "1") return 1;
  if (text == "-" || text == "-1") return -1;
  fail(ErrorCode::kConfig, "sign must be + or -");
}

std::string shots_text(const ShotPolicy& s) {
  switch (s.kind) {
    case ShotPolicy::Kind::kInfinite:
      return "infinite";
    case ShotPolicy::Kind::kBudgeted:
      return "budget:" + real_text(s.target_rel_error);
    case ShotPolicy::Kind::kFixed:
      return "fixed:" + std::to_string(s.shots);
  }
  return {};
}

void check(bool cond, const std::string& message) {
  if (!cond) fail(ErrorCode::kConfig, message);
}

struct Entry {
  std::string value;
  std::string where;
};

using Setter = std::function<void(RunConfig&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  auto positive = [](double v, const char* what) {
    check(v > 0.0, std::string(what) + " must be > 0");
    return v;
  };
  auto rate = [](RunConfig& c, const std::string& v) {
    const double w = parse_rate(v, c.omega);
    check(w >= 0.0, "rate must be >= 0");
    return w;
  };
  static const std::map<std::string, Setter> table{
      {"command", [](RunConfig& c, const std::string& v) { c.command = command_value(v); }},
      {"state",
       [](RunConfig& c, const std::string& v) {
         try {
           (void)OscillatorState::parse(v);
         } catch (const std::exception& e) {
           fail(ErrorCode::kConfig, e.what());
         }
         c.state = v;
       }},
      {"r0", [](RunConfig& c, const std::string& v) { c.r0 = real_value(v); }},
      {"r_max", [positive](RunConfig& c, const std::string& v) { c.r_max = positive(real_value(v), "r_max"); }},
      {"n_max",
       [](RunConfig& c, const std::string& v) {
         c.n_max = integer_value<int>(v);
         check(c.n_max >= 1, "n_max must be >= 1");
       }},
      {"omega",
       [](RunConfig& c, const std::string& v) {
         check(lower(v).find("omega") == std::string::npos, "omega cannot be given in units of itself");
         c.omega = parse_rate(v, 0.0);
         check(c.omega > 0.0, "omega must be > 0");
       }},
      {"kappa", [rate](RunConfig& c, const std::string& v) { c.kappa = rate(c, v); }},
      {"gamma1", [rate](RunConfig& c, const std::string& v) { c.gamma1 = rate(c, v); }},
      {"gamma2", [rate](RunConfig& c, const std::string& v) { c.gamma2 = rate(c, v); }},
      {"n_m",
       [](RunConfig& c, const std::string& v) {
         c.n_m = real_value(v);
         check(c.n_m >= 0.0, "n_m must be >= 0");
       }},
      {"n_q",
       [](RunConfig& c, const std::string& v) {
         c.n_q = real_value(v);
         check(c.n_q >= 0.0, "n_q must be >= 0");
       }},
      {"grid_extent",
       [](RunConfig& c, const std::string& v) {
         c.grid_extent = real_value(v);
         check(c.grid_extent >= 0.0, "grid_extent must be >= 0");
       }},
      {"grid_resolution",
       [](RunConfig& c, const std::string& v) {
         c.grid_resolution = integer_value<int>(v);
         check(c.grid_resolution >= 1 && c.grid_resolution <= 4001, "grid_resolution must lie in [1, 4001]");
       }},
      {"grid_shape",
       [](RunConfig& c, const std::string& v) {
         check(v == "square" || v == "disk", "grid_shape must be square or disk");
         c.grid_shape = v == "disk" ? GridShape::kDisk : GridShape::kSquare;
       }},
      {"shots", [](RunConfig& c, const std::string& v) { c.shots = shots_value(v); }},
      {"seed", [](RunConfig& c, const std::string& v) { c.seed = integer_value<std::uint64_t>(v); }},
      {"output",
       [](RunConfig& c, const std::string& v) {
         check(!v.empty(), "output must not be empty");
         c.output = v;
       }},
      {"engine",
       [](RunConfig& c, const std::string& v) {
         check(v == "analytic" || v == "oracle", "engine must be analytic or oracle");
         c.engine = v == "oracle" ? Engine::kOracle : Engine::kAnalytic;
       }},
      {"f_mode",
       [](RunConfig& c, const std::string& v) {
         check(v == "exact" || v == "first-order", "f_mode must be exact or first-order");
         c.f_mode = v == "exact" ? DampingMode::kExact : DampingMode::kFirstOrder;
       }},
      {"dim",
       [](RunConfig& c, const std::string& v) {
         c.dim = integer_value<int>(v);
         check(c.dim >= 2 && c.dim <= 400, "dim must lie in [2, 400]");
       }},
      {"threads", [](RunConfig& c, const std::string& v) { c.threads = integer_value<unsigned>(v); }},
      {"moment_thetas",
       [](RunConfig& c, const std::string& v) {
         c.moment_thetas = real_list(v);
         check(!c.moment_thetas.empty(), "moment_thetas needs at least one angle");
       }},
      {"moment_order",
       [](RunConfig& c, const std::string& v) {
         c.moment_order = integer_value<int>(v);
         check(c.moment_order >= 2 && c.moment_order <= 12, "moment_order must lie in [2, 12]");
       }},
      {"moment_r_max",
       [positive](RunConfig& c, const std::string& v) { c.moment_r_max = positive(real_value(v), "moment_r_max"); }},
      {"moment_radii",
       [](RunConfig& c, const std::string& v) {
         c.moment_radii = integer_value<int>(v);
         check(c.moment_radii >= 1, "moment_radii must be >= 1");
       }},
      {"cat_r", [positive](RunConfig& c, const std::string& v) { c.cat_r = positive(real_value(v), "cat_r"); }},
      {"cat_phi", [](RunConfig& c, const std::string& v) { c.cat_phi = real_value(v); }},
      {"cat_n",
       [](RunConfig& c, const std::string& v) {
         c.cat_n = integer_value<int>(v);
         check(c.cat_n >= 1, "cat_n must be >= 1");
       }},
      {"cat_varphi", [](RunConfig& c, const std::string& v) { c.cat_varphi = real_value(v); }},
      {"cat_sign", [](RunConfig& c, const std::string& v) { c.cat_sign = sign_value(v); }},
      {"budget_f",
       [](RunConfig& c, const std::string& v) {
         c.budget_f = real_list(v);
         for (double f : c.budget_f) check(f >= 0.0, "budget_f values must be >= 0");
       }},
      {"budget_epsilon",
       [](RunConfig& c, const std::string& v) {
         c.budget_epsilon = real_value(v);
         check(c.budget_epsilon > 0.0 && c.budget_epsilon <= 1.0, "budget_epsilon must lie in (0, 1]");
       }},
      {"oracle_points",
       [](RunConfig& c, const std::string& v) {
         c.oracle_points = integer_value<int>(v);
         check(c.oracle_points >= 1, "oracle_points must be >= 1");
       }},
  };
  return table;
}

void add_line(std::map<std::string, Entry>& entries, std::vector<std::string>& order, std::vector<ConfigIssue>& issues,
              const std::string& raw, const std::string& where) {
  std::string line = raw;
  const auto hash = line.find('#');
  if (hash != std::string::npos) line.erase(hash);
  line = trim(line);
  if (line.empty()) return;
  const auto eq = line.find('=');
  if (eq == std::string::npos) {
    issues.push_back({where, "", "expected key = value"});
    return;
  }
  const std::string key = trim(line.substr(0, eq));
  const std::string value = trim(line.substr(eq + 1));
  if (setters().count(key) == 0) {
    issues.push_back({where, key, "unknown key"});
    return;
  }
  if (entries.count(key) == 0) order.push_back(key);
  entries[key] = {value, where};
}

double max_grid_radius(const RunConfig& c) {
  if (c.grid_resolution == 1) return 0.0;
  return c.grid_shape == GridShape::kDisk ? c.grid_extent : c.grid_extent * std::sqrt(2.0);
}

}  // namespace

const char* to_string(Command command) {
  switch (command) {
    case Command::kScan:
      return "scan";
    case Command::kReconstruct:
      return "reconstruct";
    case Command::kMoments:
      return "moments";
    case Command::kCat:
      return "cat";
    case Command::kOracleCheck:
      return "oracle-check";
    case Command::kBudget:
      return "budget";
  }
  return "?";
}

double parse_rate(const std::string& input, double omega) {
  std::string text = trim(input);
  bool marked = false;
  const std::string l = lower(text);
  if (l.rfind("2pi*", 0) == 0) {
    marked = true;
    text = trim(text.substr(4));
  } else if (l.size() > 4 && l.compare(l.size() - 4, 4, "*2pi") == 0) {
    marked = true;
    text = trim(text.substr(0, text.size() - 4));
  }
  const auto split = text.find_first_of(" \t");
  std::string number, unit;
  if (split == std::string::npos) {
    // Allow a unit glued to the number, e.g. "100MHz".
    const auto pos = text.find_first_of("HhkKMGro");
    if (pos == std::string::npos || pos == 0) {
      fail(ErrorCode::kConfig, "rate '" + input + "' needs a unit (Hz, kHz, MHz, GHz, rad/s or omega)");
    }
    number = text.substr(0, pos);
    unit = text.substr(pos);
  } else {
    number = trim(text.substr(0, split));
    unit = trim(text.substr(split));
  }
  const double value = real_value(number);
  static const std::map<std::string, double> cyclic{{"Hz", 1.0}, {"kHz", 1e3}, {"MHz", 1e6}, {"GHz", 1e9}};
  if (const auto it = cyclic.find(unit); it != cyclic.end()) return kTwoPi * value * it->second;
  if (marked) fail(ErrorCode::kConfig, "the 2pi marker applies to Hz-family units only");
  if (unit == "rad/s") return value;
  if (unit == "omega") {
    if (!(omega > 0.0)) fail(ErrorCode::kConfig, "unit 'omega' needs omega to be set");
    return value * omega;
  }
  fail(ErrorCode::kConfig, "unknown rate unit '" + unit + "'");
}

std::string ConfigParseResult::describe() const {
  std::string out;
  for (const auto& issue : issues) {
    out += issue.where + ": " + (issue.field.empty() ? "" : issue.field + ": ") + issue.message + "\n";
  }
  return out;
}

ConfigParseResult parse_config(const std::string& text, const std::vector<std::string>& overrides) {
  ConfigParseResult result;
  std::map<std::string, Entry> entries;
  std::vector<std::string> order;
  std::stringstream ss(text);
  std::string line;
  for (int number = 1; std::getline(ss, line); ++number) {
    add_line(entries, order, result.issues, line, "line " + std::to_string(number));
  }
  for (std::size_t i = 0; i < overrides.size(); ++i) {
    add_line(entries, order, result.issues, overrides[i], "--set " + std::to_string(i + 1));
  }

  RunConfig& c = result.config;
  auto apply = [&](const std::string& key) {
    const Entry& e = entries.at(key);
    try {
      setters().at(key)(c, e.value);
    } catch (const std::exception& ex) {
      result.issues.push_back({e.where, key, ex.what()});
    }
  };
  // Rates given in units of omega need omega first.
  if (entries.count("omega")) apply("omega");
  for (const auto& key : order) {
    if (key != "omega") apply(key);
  }
  if (!entries.count("command")) result.issues.push_back({"config", "command", "missing"});
  if (!result.ok()) return result;

  auto where = [&](const std::string& key) { return entries.count(key) ? entries.at(key).where : "defaults"; };
  try {
    (void)c.params();
  } catch (const std::exception& e) {
    result.issues.push_back({"config", "rates", e.what()});
  }
  const double reach = c.n_max * c.r_max;
  const bool grid_command =
      c.command == Command::kScan || c.command == Command::kReconstruct || c.command == Command::kOracleCheck;
  if (grid_command && max_grid_radius(c) >= reach) {
    result.issues.push_back({where("grid_extent"), "grid_extent",
                             "grid reaches |beta| = " + real_text(max_grid_radius(c)) +
                                 " but n_max * r_max = " + real_text(reach) + " (plan reach is |beta| < that product)"});
  }
  if (c.command == Command::kMoments) {
    if (c.moment_r_max >= reach) {
      result.issues.push_back({where("moment_r_max"), "moment_r_max", "exceeds n_max * r_max = " + real_text(reach)});
    }
    if (c.moment_radii < c.moment_order / 2 + 2) {
      result.issues.push_back({where("moment_radii"), "moment_radii",
                               "order " + std::to_string(c.moment_order) + " needs at least " +
                                   std::to_string(c.moment_order / 2 + 2) + " radii"});
    }
  }
  if (c.command == Command::kCat && c.n_q != 0.0) {
    result.issues.push_back({where("n_q"), "n_q", "cat preparation assumes n_q = 0"});
  }
  if (c.command == Command::kBudget && c.budget_f.empty()) {
    result.issues.push_back({where("budget_f"), "budget_f", "budget command needs at least one f value"});
  }
  return result;
}

std::string to_text(const RunConfig& c) {
  std::ostringstream out;
  auto rate = [](double w) { return real_text(w) + " rad/s"; };
  out << "command = " << to_string(c.command) << '\n'
      << "state = " << c.state << '\n'
      << "r0 = " << real_text(c.r0) << '\n'
      << "r_max = " << real_text(c.r_max) << '\n'
      << "n_max = " << c.n_max << '\n'
      << "omega = " << rate(c.omega) << '\n'
      << "kappa = " << rate(c.kappa) << '\n'
      << "gamma1 = " << rate(c.gamma1) << '\n'
      << "gamma2 = " << rate(c.gamma2) << '\n'
      << "n_m = " << real_text(c.n_m) << '\n'
      << "n_q = " << real_text(c.n_q) << '\n'
      << "grid_extent = " << real_text(c.grid_extent) << '\n'
      << "grid_resolution = " << c.grid_resolution << '\n'
      << "grid_shape = " << (c.grid_shape == GridShape::kDisk ? "disk" : "square") << '\n'
      << "shots = " << shots_text(c.shots) << '\n'
      << "seed = " << c.seed << '\n'
      << "output = " << c.output << '\n'
      << "engine = " << to_string(c.engine) << '\n'
      << "f_mode = " << (c.f_mode == DampingMode::kExact ? "exact" : "first-order") << '\n'
      << "dim = " << c.dim << '\n'
      << "threads = " << c.threads << '\n'
      << "moment_thetas = " << join(c.moment_thetas) << '\n'
      << "moment_order = " << c.moment_order << '\n'
      << "moment_r_max = " << real_text(c.moment_r_max) << '\n'
      << "moment_radii = " << c.moment_radii << '\n'
      << "cat_r = " << real_text(c.cat_r) << '\n'
      << "cat_phi = " << real_text(c.cat_phi) << '\n'
      << "cat_n = " << c.cat_n << '\n'
      << "cat_varphi = " << real_text(c.cat_varphi) << '\n'
      << "cat_sign = " << (c.cat_sign > 0 ? "+" : "-") << '\n'
      << "budget_f = " << join(c.budget_f) << '\n'
      << "budget_epsilon = " << real_text(c.budget_epsilon) << '\n'
      << "oracle_points = " << c.oracle_points << '\n';
  return out.str();
}

}  // namespace chiprobe
