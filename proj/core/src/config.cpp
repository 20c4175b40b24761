#include "dendrofield/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>

#include "dendrofield/error.hpp"

namespace dendrofield {

namespace {

struct KeySpec {
  const char* section;
  const char* key;
};

// Sections whose keys may be written bare even when the name recurs elsewhere.
const std::set<std::string> kPrimarySections{"run", "grid", "model", "time"};

const std::vector<KeySpec>& key_table() {
  static const std::vector<KeySpec> table{
      {"run", "experiment"},       {"run", "output_dir"},    {"run", "seed"},
      {"run", "evaluator"},        {"run", "check_bound"},   {"grid", "n_x"},
      {"grid", "n_xi"},            {"grid", "L_x"},          {"grid", "L_xi"},
      {"model", "gamma"},          {"model", "nu"},          {"model", "xi_0"},
      {"model", "eps"},            {"model", "firing_rate"}, {"model", "beta"},
      {"model", "theta"},          {"model", "kernel"},      {"model", "kappa"},
      {"model", "a1"},             {"model", "b1"},          {"model", "a2"},
      {"model", "b2"},             {"model", "delta"},       {"model", "kappa_d"},
      {"time", "tau"},             {"time", "n_t"},          {"time", "snapshot_stride"},
      {"time", "row_stride"},      {"initial", "type"},      {"initial", "value"},
      {"initial", "amplitude"},    {"initial", "wavenumber"}, {"initial", "center_x"},
      {"initial", "center_xi"},    {"initial", "width_x"},   {"initial", "width_xi"},
      {"forcing", "type"},         {"forcing", "amplitude"}, {"forcing", "center_x"},
      {"forcing", "center_xi"},    {"forcing", "width_x"},   {"forcing", "width_xi"},
      {"forcing", "t_on"},         {"forcing", "t_off"},     {"wave", "thetas"},
      {"wave", "fit_start"},       {"wave", "fit_end"},      {"turing", "betas"},
      {"turing", "n_x"},           {"turing", "n_xi"},       {"turing", "tau"},
      {"turing", "t_final"},       {"turing", "amplitude"},  {"converge", "axis"},
      {"converge", "levels"},      {"converge", "t_final"},  {"bench", "n_x"},
      {"bench", "n_xi"},           {"bench", "reference_sizes"}, {"bench", "steps"},
  };
  return table;
}

bool known_section(const std::string& s) {
  return std::any_of(key_table().begin(), key_table().end(),
                     [&](const KeySpec& k) { return s == k.section; });
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

struct Entry {
  std::string value;
  int line = 0;
  bool used = false;
};

/// Resolved assignments keyed by "section.key".
class Entries {
 public:
  explicit Entries(std::string source) : source_(std::move(source)) {}

  [[noreturn]] void fail(int line, const std::string& what) const {
    std::ostringstream msg;
    msg << source_ << ":" << line << ": " << what;
    throw ValidationError(msg.str());
  }

  void add(const std::string& section, const std::string& key, const std::string& value,
           int line) {
    std::string qualified;
    if (!section.empty()) {
      const bool ok = std::any_of(key_table().begin(), key_table().end(), [&](const KeySpec& k) {
        return section == k.section && key == k.key;
      });
      if (!ok) fail(line, "unknown key '" + key + "' in section [" + section + "]");
      qualified = section + "." + key;
    } else {
      std::vector<std::string> all, primary;
      for (const auto& k : key_table()) {
        if (key != k.key) continue;
        all.push_back(std::string(k.section) + "." + k.key);
        if (kPrimarySections.count(k.section)) primary.push_back(all.back());
      }
      if (all.empty()) fail(line, "unknown key '" + key + "'");
      if (primary.size() == 1)
        qualified = primary.front();
      else if (all.size() == 1)
        qualified = all.front();
      else
        fail(line, "key '" + key + "' is ambiguous; place it under a [section]");
    }
    if (map_.count(qualified))
      fail(line, "duplicate key '" + qualified + "' (first set on line " +
                     std::to_string(map_[qualified].line) + ")");
    map_[qualified] = Entry{value, line, false};
  }

  Entry* find(const std::string& qualified) {
    auto it = map_.find(qualified);
    if (it == map_.end()) return nullptr;
    it->second.used = true;
    return &it->second;
  }

  double number(const std::string& q, double fallback) {
    Entry* e = find(q);
    return e ? parse_double(*e, q) : fallback;
  }

  int integer(const std::string& q, int fallback) {
    Entry* e = find(q);
    return e ? parse_int(*e, q) : fallback;
  }

  std::string word(const std::string& q, const std::string& fallback) {
    Entry* e = find(q);
    return e ? e->value : fallback;
  }

  bool boolean(const std::string& q, bool fallback) {
    Entry* e = find(q);
    if (!e) return fallback;
    if (e->value == "true" || e->value == "1") return true;
    if (e->value == "false" || e->value == "0") return false;
    fail(e->line, q + " must be true or false");
  }

  std::vector<double> numbers(const std::string& q, std::vector<double> fallback) {
    Entry* e = find(q);
    if (!e) return fallback;
    std::vector<double> out;
    for (const auto& item : split_list(e->value)) out.push_back(parse_double(*e, q, item));
    return out;
  }

  std::vector<int> integers(const std::string& q, std::vector<int> fallback) {
    Entry* e = find(q);
    if (!e) return fallback;
    std::vector<int> out;
    for (const auto& item : split_list(e->value)) out.push_back(parse_int(*e, q, item));
    return out;
  }

  /// Any assignment never consumed does not apply to the selected variants.
  void reject_unused() const {
    for (const auto& [q, e] : map_)
      if (!e.used) fail(e.line, "key '" + q + "' does not apply to the selected model variants");
  }

 private:
  static std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> items;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
      item = trim(item);
      if (!item.empty()) items.push_back(item);
    }
    return items;
  }

  double parse_double(const Entry& e, const std::string& q, std::string text = {}) const {
    if (text.empty()) text = e.value;
    // "24pi", "24*pi" and "pi" multiply by pi
    double factor = 1.0;
    if (text.size() >= 2 && text.compare(text.size() - 2, 2, "pi") == 0) {
      factor = std::numbers::pi;
      text = trim(text.substr(0, text.size() - 2));
      if (!text.empty() && text.back() == '*') text = trim(text.substr(0, text.size() - 1));
      if (text.empty()) text = "1";
    }
    double v = 0.0;
    const char* first = text.data();
    const char* last = first + text.size();
    if (*first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last)
      fail(e.line, q + ": expected a number, got '" + e.value + "'");
    return v * factor;
  }

  int parse_int(const Entry& e, const std::string& q, std::string text = {}) const {
    if (text.empty()) text = e.value;
    long v = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size() ||
        v > std::numeric_limits<int>::max() || v < std::numeric_limits<int>::min())
      fail(e.line, q + ": expected an integer, got '" + e.value + "'");
    return static_cast<int>(v);
  }

  std::string source_;
  std::map<std::string, Entry> map_;
};

FiringRate read_rate(Entries& in) {
  const std::string kind = in.word("model.firing_rate", "sigmoid");
  if (kind == "sigmoid") {
    Sigmoid s;
    s.beta = in.number("model.beta", s.beta);
    s.theta = in.number("model.theta", s.theta);
    return s;
  }
  if (kind == "shifted_sigmoid") {
    ShiftedSigmoid s;
    s.beta = in.number("model.beta", s.beta);
    return s;
  }
  if (kind == "heaviside") {
    Heaviside h;
    h.theta = in.number("model.theta", h.theta);
    return h;
  }
  throw ValidationError("firing_rate must be sigmoid, shifted_sigmoid or heaviside (got '" +
                        kind + "')");
}

SomaticKernel read_kernel(Entries& in) {
  const std::string kind = in.word("model.kernel", "exp_decay");
  if (kind == "exp_decay") {
    ExpDecay k;
    k.kappa = in.number("model.kappa", k.kappa);
    return k;
  }
  if (kind == "mexican_hat") {
    MexicanHat k;
    k.a1 = in.number("model.a1", k.a1);
    k.b1 = in.number("model.b1", k.b1);
    k.a2 = in.number("model.a2", k.a2);
    k.b2 = in.number("model.b2", k.b2);
    return k;
  }
  throw ValidationError("kernel must be exp_decay or mexican_hat (got '" + kind + "')");
}

DendriticDelta read_delta(Entries& in, double eps) {
  const std::string kind = in.word("model.delta", "gaussian");
  if (kind == "gaussian") return GaussianDelta{eps};
  if (kind == "truncated_gaussian") return TruncatedGaussianDelta{eps, in.number("model.kappa_d", 1.0)};
  throw ValidationError("delta must be gaussian or truncated_gaussian (got '" + kind + "')");
}

InitialCondition read_initial(Entries& in) {
  const std::string kind = in.word("initial.type", "gaussian_bump");
  if (kind == "zero") return ZeroInitial{};
  if (kind == "constant") return ConstantInitial{in.number("initial.value", 0.0)};
  if (kind == "cosine") {
    CosineInX c;
    c.amplitude = in.number("initial.amplitude", c.amplitude);
    c.wavenumber = in.number("initial.wavenumber", c.wavenumber);
    return c;
  }
  if (kind == "gaussian_bump") {
    GaussianBump g;
    g.amplitude = in.number("initial.amplitude", g.amplitude);
    g.center_x = in.number("initial.center_x", g.center_x);
    g.center_xi = in.number("initial.center_xi", g.center_xi);
    g.width_x = in.number("initial.width_x", g.width_x);
    g.width_xi = in.number("initial.width_xi", g.width_xi);
    return g;
  }
  throw ValidationError("initial type must be zero, constant, cosine or gaussian_bump (got '" +
                        kind + "')");
}

ForcingSpec read_forcing(Entries& in) {
  const std::string kind = in.word("forcing.type", "zero");
  if (kind == "zero") return NoForcing{};
  if (kind == "gaussian_pulse") {
    GaussianPulse p;
    p.amplitude = in.number("forcing.amplitude", p.amplitude);
    p.center_x = in.number("forcing.center_x", p.center_x);
    p.center_xi = in.number("forcing.center_xi", p.center_xi);
    p.width_x = in.number("forcing.width_x", p.width_x);
    p.width_xi = in.number("forcing.width_xi", p.width_xi);
    p.t_on = in.number("forcing.t_on", p.t_on);
    p.t_off = in.number("forcing.t_off", p.t_off);
    return p;
  }
  throw ValidationError("forcing type must be zero or gaussian_pulse (got '" + kind + "')");
}

template <class T>
std::string join(const std::vector<T>& v) {
  std::ostringstream os;
  os << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (std::size_t k = 0; k < v.size(); ++k) os << (k ? ", " : "") << v[k];
  return os.str();
}

void require(bool ok, const std::string& what) {
  if (!ok) throw ValidationError(what);
}

}  // namespace

void RunConfig::validate() const {
  static const std::set<std::string> experiments{"simulate", "wave-speed", "turing", "converge",
                                                 "bench"};
  require(experiments.count(experiment) == 1,
          "experiment must be one of simulate, wave-speed, turing, converge, bench");
  require(!output_dir.empty(), "output_dir must not be empty");
  sim.validate();
  require(delta_width(sim.model.delta) == sim.model.params.eps,
          "eps of the delta profile must equal model eps");

  require(!thetas.empty(), "thetas must list at least one threshold");
  for (double t : thetas) require(std::isfinite(t) && t > 0.0, "thetas must be > 0");
  require(fit_end > fit_start && fit_start >= 0.0, "fit_end must exceed fit_start >= 0");

  for (double b : betas) require(std::isfinite(b) && b > 0.0, "betas must be > 0");
  require(turing.n_x >= 2, "turing n_x must be >= 2");
  require(turing.n_xi >= 3, "turing n_xi must be >= 3");
  require(turing.tau > 0.0, "turing tau must be > 0");
  require(turing.t_final > 0.0, "turing t_final must be > 0");
  require(std::isfinite(turing.amplitude), "turing amplitude must be finite");

  static const std::set<std::string> axes{"tau", "h", "eps", "beta"};
  require(axes.count(converge_axis) == 1, "converge axis must be one of tau, h, eps, beta");
  require(converge_t_final > 0.0, "converge t_final must be > 0");
  for (double l : converge_levels) require(std::isfinite(l) && l > 0.0, "converge levels must be > 0");

  require(!bench_n_x.empty(), "bench n_x must list at least one size");
  for (int n : bench_n_x) require(n >= 2, "bench n_x entries must be >= 2");
  require(bench_n_xi >= 3, "bench n_xi must be >= 3");
  for (int n : bench_reference_sizes)
    require(n >= 3 && n <= 64, "bench reference_sizes entries must lie in [3, 64]");
  require(bench_steps >= 1, "bench steps must be >= 1");
}

RunConfig parse_config_text(const std::string& text, const std::string& source) {
  Entries in(source);
  std::istringstream is(text);
  std::string raw;
  std::string section;
  int line = 0;
  while (std::getline(is, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string s = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') in.fail(line, "unterminated section header");
      section = trim(s.substr(1, s.size() - 2));
      if (!known_section(section)) in.fail(line, "unknown section [" + section + "]");
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) in.fail(line, "expected 'key = value'");
    const std::string key = trim(s.substr(0, eq));
    const std::string value = trim(s.substr(eq + 1));
    if (key.empty()) in.fail(line, "missing key before '='");
    if (value.empty()) in.fail(line, "missing value for '" + key + "'");
    in.add(section, key, value, line);
  }

  RunConfig c;
  c.experiment = in.word("run.experiment", c.experiment);
  c.output_dir = in.word("run.output_dir", c.output_dir);
  {
    const double seed = in.number("run.seed", 0.0);
    require(seed >= 0.0 && seed == std::floor(seed), "seed must be a non-negative integer");
    c.seed = static_cast<std::uint64_t>(seed);
  }
  c.sim.evaluator = parse_evaluator(in.word("run.evaluator", to_string(c.sim.evaluator)));
  c.sim.check_bound = in.boolean("run.check_bound", c.sim.check_bound);

  auto& g = c.sim.grid;
  g.n_x = in.integer("grid.n_x", g.n_x);
  g.n_xi = in.integer("grid.n_xi", g.n_xi);
  g.L_x = in.number("grid.L_x", g.L_x);
  g.L_xi = in.number("grid.L_xi", g.L_xi);

  auto& m = c.sim.model;
  m.params.gamma = in.number("model.gamma", m.params.gamma);
  m.params.nu = in.number("model.nu", m.params.nu);
  m.params.xi_0 = in.number("model.xi_0", m.params.xi_0);
  m.params.eps = in.number("model.eps", m.params.eps);
  m.rate = read_rate(in);
  m.kernel = read_kernel(in);
  m.delta = read_delta(in, m.params.eps);

  c.sim.tau = in.number("time.tau", c.sim.tau);
  c.sim.n_t = in.integer("time.n_t", c.sim.n_t);
  c.sim.snapshot_stride = in.integer("time.snapshot_stride", c.sim.snapshot_stride);
  c.sim.row_stride = in.integer("time.row_stride", c.sim.row_stride);
  c.sim.initial = read_initial(in);
  c.sim.forcing = read_forcing(in);

  c.thetas = in.numbers("wave.thetas", c.thetas);
  c.fit_start = in.number("wave.fit_start", c.fit_start);
  c.fit_end = in.number("wave.fit_end", c.fit_end);

  c.betas = in.numbers("turing.betas", c.betas);
  c.turing.n_x = in.integer("turing.n_x", c.turing.n_x);
  c.turing.n_xi = in.integer("turing.n_xi", c.turing.n_xi);
  c.turing.tau = in.number("turing.tau", c.turing.tau);
  c.turing.t_final = in.number("turing.t_final", c.turing.t_final);
  c.turing.amplitude = in.number("turing.amplitude", c.turing.amplitude);

  c.converge_axis = in.word("converge.axis", c.converge_axis);
  c.converge_levels = in.numbers("converge.levels", c.converge_levels);
  c.converge_t_final = in.number("converge.t_final", c.converge_t_final);

  c.bench_n_x = in.integers("bench.n_x", c.bench_n_x);
  c.bench_n_xi = in.integer("bench.n_xi", c.bench_n_xi);
  c.bench_reference_sizes = in.integers("bench.reference_sizes", c.bench_reference_sizes);
  c.bench_steps = in.integer("bench.steps", c.bench_steps);

  in.reject_unused();
  try {
    c.validate();
  } catch (const ValidationError& e) {
    throw ValidationError(source + ": " + e.what());
  }
  return c;
}

RunConfig parse_config(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw ValidationError("cannot open config file " + path.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_config_text(ss.str(), path.string());
}

std::string write_config(const RunConfig& c) {
  std::ostringstream os;
  os << std::setprecision(std::numeric_limits<double>::max_digits10);
  const auto& m = c.sim.model;

  os << "[run]\n"
     << "experiment = " << c.experiment << "\n"
     << "output_dir = " << c.output_dir << "\n"
     << "seed = " << c.seed << "\n"
     << "evaluator = " << to_string(c.sim.evaluator) << "\n"
     << "check_bound = " << (c.sim.check_bound ? "true" : "false") << "\n\n";

  os << "[grid]\n"
     << "n_x = " << c.sim.grid.n_x << "\n"
     << "n_xi = " << c.sim.grid.n_xi << "\n"
     << "L_x = " << c.sim.grid.L_x << "\n"
     << "L_xi = " << c.sim.grid.L_xi << "\n\n";

  os << "[model]\n"
     << "gamma = " << m.params.gamma << "\n"
     << "nu = " << m.params.nu << "\n"
     << "xi_0 = " << m.params.xi_0 << "\n"
     << "eps = " << m.params.eps << "\n";
  if (const auto* s = std::get_if<Sigmoid>(&m.rate))
    os << "firing_rate = sigmoid\nbeta = " << s->beta << "\ntheta = " << s->theta << "\n";
  else if (const auto* s = std::get_if<ShiftedSigmoid>(&m.rate))
    os << "firing_rate = shifted_sigmoid\nbeta = " << s->beta << "\n";
  else
    os << "firing_rate = heaviside\ntheta = " << std::get<Heaviside>(m.rate).theta << "\n";
  if (const auto* k = std::get_if<ExpDecay>(&m.kernel))
    os << "kernel = exp_decay\nkappa = " << k->kappa << "\n";
  else {
    const auto& h = std::get<MexicanHat>(m.kernel);
    os << "kernel = mexican_hat\na1 = " << h.a1 << "\nb1 = " << h.b1 << "\na2 = " << h.a2
       << "\nb2 = " << h.b2 << "\n";
  }
  if (const auto* t = std::get_if<TruncatedGaussianDelta>(&m.delta))
    os << "delta = truncated_gaussian\nkappa_d = " << t->kappa_d << "\n";
  else
    os << "delta = gaussian\n";
  os << "\n";

  os << "[time]\n"
     << "tau = " << c.sim.tau << "\n"
     << "n_t = " << c.sim.n_t << "\n"
     << "snapshot_stride = " << c.sim.snapshot_stride << "\n"
     << "row_stride = " << c.sim.row_stride << "\n\n";

  os << "[initial]\n";
  std::visit(
      [&](const auto& ic) {
        using T = std::decay_t<decltype(ic)>;
        if constexpr (std::is_same_v<T, ZeroInitial>) {
          os << "type = zero\n";
        } else if constexpr (std::is_same_v<T, ConstantInitial>) {
          os << "type = constant\nvalue = " << ic.value << "\n";
        } else if constexpr (std::is_same_v<T, CosineInX>) {
          os << "type = cosine\namplitude = " << ic.amplitude << "\nwavenumber = " << ic.wavenumber
             << "\n";
        } else {
          os << "type = gaussian_bump\namplitude = " << ic.amplitude << "\ncenter_x = "
             << ic.center_x << "\ncenter_xi = " << ic.center_xi << "\nwidth_x = " << ic.width_x
             << "\nwidth_xi = " << ic.width_xi << "\n";
        }
      },
      c.sim.initial);
  os << "\n[forcing]\n";
  if (const auto* p = std::get_if<GaussianPulse>(&c.sim.forcing))
    os << "type = gaussian_pulse\namplitude = " << p->amplitude << "\ncenter_x = " << p->center_x
       << "\ncenter_xi = " << p->center_xi << "\nwidth_x = " << p->width_x
       << "\nwidth_xi = " << p->width_xi << "\nt_on = " << p->t_on << "\nt_off = " << p->t_off
       << "\n";
  else
    os << "type = zero\n";

  os << "\n[wave]\n"
     << "thetas = " << join(c.thetas) << "\n"
     << "fit_start = " << c.fit_start << "\n"
     << "fit_end = " << c.fit_end << "\n";

  os << "\n[turing]\n";
  if (!c.betas.empty()) os << "betas = " << join(c.betas) << "\n";
  os << "n_x = " << c.turing.n_x << "\n"
     << "n_xi = " << c.turing.n_xi << "\n"
     << "tau = " << c.turing.tau << "\n"
     << "t_final = " << c.turing.t_final << "\n"
     << "amplitude = " << c.turing.amplitude << "\n";

  os << "\n[converge]\n"
     << "axis = " << c.converge_axis << "\n";
  if (!c.converge_levels.empty()) os << "levels = " << join(c.converge_levels) << "\n";
  os << "t_final = " << c.converge_t_final << "\n";

  os << "\n[bench]\n"
     << "n_x = " << join(c.bench_n_x) << "\n"
     << "n_xi = " << c.bench_n_xi << "\n";
  if (!c.bench_reference_sizes.empty())
    os << "reference_sizes = " << join(c.bench_reference_sizes) << "\n";
  os << "steps = " << c.bench_steps << "\n";
  return os.str();
}

std::vector<std::string> known_config_keys() {
  std::vector<std::string> out;
  for (const auto& k : key_table()) out.push_back(std::string(k.section) + "." + k.key);
  return out;
}

}  // namespace dendrofield
