#include "fiberdyn/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>

#include "fiberdyn/error.hpp"
#include "json.hpp"

namespace fiberdyn {

namespace {

enum class Type {
  Enum, Uint, Int, Real, IntList, RealList, Matrix, Matrices, Fourier, Terms,
  Intervals, Path,
};

struct Field {
  std::string key;
  Type type;
  std::vector<std::string> choices;  // Enum only; "auto" is always allowed
  std::string default_value;         // "auto" when derived at resolution
  std::string meaning;
};

const std::vector<Field> &schema() {
  static const std::vector<Field> fields = {
      {"task", Type::Enum, {"pressure", "spectrum", "shadow", "katok", "crosscheck"},
       "pressure", "experiment to run"},
      {"seed", Type::Uint, {}, "1", "seed for every random draw"},
      {"budget", Type::Uint, {}, "10000000", "fiber-step budget"},
      {"base.kind", Type::Enum, {"rotation", "sturmian", "point"}, "auto",
       "driving system; point for the doubling fiber, rotation otherwise"},
      {"base.alpha", Type::Real, {}, "0.41421356237309503",
       "rotation number of the base (irrational)"},
      {"fiber.kind", Type::Enum, {"doubling", "affine", "cocycle"}, "doubling",
       "fiber map family"},
      {"fiber.matrix", Type::Matrix, {}, "", "hyperbolic matrix (affine)"},
      {"fiber.generators", Type::Matrices, {}, "",
       "matrices for symbols 1 and 2 (cocycle)"},
      {"fiber.h1", Type::Fourier, {}, "0", "forcing of the first coordinate"},
      {"fiber.h2", Type::Fourier, {}, "0", "forcing of the second coordinate"},
      {"observable.kind", Type::Enum,
       {"zero", "constant", "trig", "product", "digit"}, "zero", "potential"},
      {"observable.constant", Type::Real, {}, "0", "constant part"},
      {"observable.terms", Type::Terms, {}, "", "fiber trigonometric terms"},
      {"observable.base", Type::Fourier, {}, "1", "base factor (product)"},
      {"observable.v0", Type::Real, {}, "0", "value on digit 0 (digit)"},
      {"observable.v1", Type::Real, {}, "1", "value on digit 1 (digit)"},
      {"method", Type::Enum, {"grid", "cylinder"}, "auto",
       "cylinder for the doubling fiber with a digit-type potential, else grid"},
      {"epsilon", Type::Real, {}, "auto",
       "Bowen scale; 0.05 for counting, 0.1 for shadow, katok also takes eta"},
      {"n_values", Type::IntList, {}, "auto", "orbit lengths"},
      {"omega_samples", Type::Int, {}, "1", "base points per estimate"},
      {"max_candidates", Type::Uint, {}, "200000", "grid cap per base point"},
      {"q_grid", Type::RealList, {}, "-3:3:1", "pressure curve abscissae"},
      {"alpha_grid", Type::RealList, {}, "auto", "spectrum abscissae"},
      {"delta_schedule", Type::RealList, {}, "0.1 0.05 0.03",
       "decreasing level-set tolerances"},
      {"omega", Type::Real, {}, "0.3", "base point (katok)"},
      {"delta", Type::Real, {}, "0.1", "uncovered sample fraction (katok)"},
      {"sample_size", Type::Uint, {}, "auto", "sample points (katok)"},
      {"sampler", Type::Enum, {"haar", "uniform_circle"}, "auto",
       "sample measure (katok)"},
      {"spec.file", Type::Path, {}, "", "specification file (shadow)"},
      {"spec.omega", Type::Real, {}, "0.3", "base point (shadow)"},
      {"spec.spacing", Type::Int, {}, "auto", "gap m; auto is mixing_gap"},
      {"spec.intervals", Type::Intervals, {}, "auto",
       "segments; auto draws three from the seed"},
  };
  return fields;
}

const Field *find_field(const std::string &key) {
  for (const Field &f : schema()) {
    if (f.key == key) return &f;
  }
  return nullptr;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(const std::string &s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(trim(cur));
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

std::vector<std::string> tokens(const std::string &s) {
  std::string t = s;
  std::replace(t.begin(), t.end(), ',', ' ');
  std::istringstream in(t);
  std::vector<std::string> out;
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

double parse_real(const std::string &key, const std::string &tok) {
  double v = 0.0;
  const char *end = tok.data() + tok.size();
  auto [p, ec] = std::from_chars(tok.data(), end, v);
  if (ec != std::errc() || p != end || !std::isfinite(v)) {
    throw ConfigError(key, "'" + tok + "' is not a number");
  }
  return v;
}

std::int64_t parse_int(const std::string &key, const std::string &tok) {
  std::int64_t v = 0;
  const char *end = tok.data() + tok.size();
  auto [p, ec] = std::from_chars(tok.data(), end, v);
  if (ec != std::errc() || p != end) {
    throw ConfigError(key, "'" + tok + "' is not an integer");
  }
  return v;
}

std::uint64_t parse_uint(const std::string &key, const std::string &tok) {
  std::uint64_t v = 0;
  const char *end = tok.data() + tok.size();
  auto [p, ec] = std::from_chars(tok.data(), end, v);
  if (ec != std::errc() || p != end) {
    throw ConfigError(key, "'" + tok + "' is not a non-negative integer");
  }
  return v;
}

std::vector<double> parse_reals(const std::string &key, const std::string &s) {
  std::vector<double> out;
  for (const std::string &tok : tokens(s)) {
    if (tok.find(':') != std::string::npos) {
      const std::vector<std::string> parts = split(tok, ':');
      if (parts.size() < 2 || parts.size() > 3) {
        throw ConfigError(key, "range '" + tok + "' must be from:to[:step]");
      }
      const double from = parse_real(key, parts[0]);
      const double to = parse_real(key, parts[1]);
      const double step = parts.size() == 3 ? parse_real(key, parts[2]) : 1.0;
      if (!(step > 0.0) || to < from) {
        throw ConfigError(key, "range '" + tok + "' is empty or has step <= 0");
      }
      const auto count =
          static_cast<std::int64_t>(std::floor((to - from) / step + 1e-9));
      if (count > 100000) throw ConfigError(key, "range '" + tok + "' is too long");
      for (std::int64_t i = 0; i <= count; ++i) {
        const double v = from + static_cast<double>(i) * step;
        out.push_back(std::abs(v) < 1e-12 * step ? 0.0 : v);
      }
    } else {
      out.push_back(parse_real(key, tok));
    }
  }
  return out;
}

std::vector<int> parse_ints(const std::string &key, const std::string &s) {
  std::vector<int> out;
  for (std::string tok : tokens(s)) {
    const auto dots = tok.find("..");
    if (dots != std::string::npos) tok.replace(dots, 2, ":");
    if (tok.find(':') != std::string::npos) {
      const std::vector<std::string> parts = split(tok, ':');
      if (parts.size() < 2 || parts.size() > 3) {
        throw ConfigError(key, "range '" + tok + "' must be from..to or from:to:step");
      }
      const std::int64_t from = parse_int(key, parts[0]);
      const std::int64_t to = parse_int(key, parts[1]);
      const std::int64_t step = parts.size() == 3 ? parse_int(key, parts[2]) : 1;
      if (step <= 0 || to < from || (to - from) / step > 100000) {
        throw ConfigError(key, "range '" + tok + "' is empty or malformed");
      }
      for (std::int64_t v = from; v <= to; v += step) {
        out.push_back(static_cast<int>(v));
      }
    } else {
      out.push_back(static_cast<int>(parse_int(key, tok)));
    }
  }
  return out;
}

IntMatrix2 parse_matrix(const std::string &key, const std::string &s) {
  const std::vector<std::string> t = tokens(s);
  if (t.size() != 4) throw ConfigError(key, "a matrix needs four integers a b c d");
  return {parse_int(key, t[0]), parse_int(key, t[1]), parse_int(key, t[2]),
          parse_int(key, t[3])};
}

std::vector<IntMatrix2> parse_matrices(const std::string &key,
                                       const std::string &s) {
  std::vector<IntMatrix2> out;
  for (const std::string &part : split(s, ';')) {
    out.push_back(parse_matrix(key, part));
  }
  return out;
}

FourierSeries parse_fourier(const std::string &key, const std::string &s) {
  const std::vector<std::string> parts = split(s, ';');
  if (parts.empty() || parts.size() > 3) {
    throw ConfigError(key, "expected 'c; cos coefficients; sin coefficients'");
  }
  FourierSeries f;
  const std::vector<double> c = parse_reals(key, parts[0]);
  if (c.size() > 1) throw ConfigError(key, "the constant part is one number");
  f.constant = c.empty() ? 0.0 : c[0];
  if (parts.size() > 1) f.cos_coeffs = parse_reals(key, parts[1]);
  if (parts.size() > 2) f.sin_coeffs = parse_reals(key, parts[2]);
  return f;
}

std::vector<TrigTerm> parse_terms(const std::string &key, const std::string &s) {
  std::vector<TrigTerm> out;
  if (trim(s).empty()) return out;
  for (const std::string &part : split(s, ';')) {
    const std::vector<std::string> t = tokens(part);
    if (t.size() != 4) throw ConfigError(key, "a term is 'm1 m2 a b'");
    out.push_back({static_cast<int>(parse_int(key, t[0])),
                   static_cast<int>(parse_int(key, t[1])),
                   parse_real(key, t[2]), parse_real(key, t[3])});
  }
  return out;
}

std::vector<SpecInterval> parse_intervals(const std::string &key,
                                          const std::string &s) {
  std::vector<SpecInterval> out;
  for (const std::string &part : split(s, ';')) {
    const std::vector<std::string> t = tokens(part);
    if (t.size() != 4) throw ConfigError(key, "an interval is 'a b x1 x2'");
    SpecInterval iv;
    iv.a = parse_int(key, t[0]);
    iv.b = parse_int(key, t[1]);
    iv.anchor = make_point(parse_real(key, t[2]), parse_real(key, t[3]));
    out.push_back(iv);
  }
  return out;
}

void check_value(const Field &f, const std::string &value) {
  if (value == "auto" && f.default_value == "auto") return;
  switch (f.type) {
    case Type::Enum:
      if (std::find(f.choices.begin(), f.choices.end(), value) ==
          f.choices.end()) {
        std::string allowed;
        for (const std::string &c : f.choices) allowed += " " + c;
        throw ConfigError(f.key, "'" + value + "' is not one of" + allowed);
      }
      break;
    case Type::Uint: parse_uint(f.key, value); break;
    case Type::Int: parse_int(f.key, value); break;
    case Type::Real:
      if (!(f.key == "epsilon" && value == "eta")) parse_real(f.key, value);
      break;
    case Type::IntList: parse_ints(f.key, value); break;
    case Type::RealList: parse_reals(f.key, value); break;
    case Type::Matrix: parse_matrix(f.key, value); break;
    case Type::Matrices: parse_matrices(f.key, value); break;
    case Type::Fourier: parse_fourier(f.key, value); break;
    case Type::Terms: parse_terms(f.key, value); break;
    case Type::Intervals: parse_intervals(f.key, value); break;
    case Type::Path: break;
  }
}

std::string format_real(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

std::string format_reals(const std::vector<double> &v) {
  std::string out;
  for (double x : v) out += (out.empty() ? "" : " ") + format_real(x);
  return out;
}

bool is_pressure_task(Task t) {
  return t == Task::Pressure || t == Task::Spectrum || t == Task::Crosscheck;
}

Task parse_task(const std::string &s) {
  if (s == "pressure") return Task::Pressure;
  if (s == "spectrum") return Task::Spectrum;
  if (s == "shadow") return Task::Shadow;
  if (s == "katok") return Task::Katok;
  if (s == "crosscheck") return Task::Crosscheck;
  throw ConfigError("task", "unknown task '" + s + "'");
}

// Which keys a resolved config of this shape carries.
bool applies(const std::string &key, const std::map<std::string, std::string> &v) {
  const Task task = parse_task(v.at("task"));
  const std::string &fiber = v.at("fiber.kind");
  const auto get = [&](const std::string &k) -> std::string {
    auto it = v.find(k);
    return it == v.end() ? std::string() : it->second;
  };
  if (key == "task" || key == "seed" || key == "budget" || key == "base.kind" ||
      key == "fiber.kind") {
    return true;
  }
  if (key == "base.alpha") return get("base.kind") != "point";
  if (key == "fiber.matrix" || key == "fiber.h1" || key == "fiber.h2") {
    return fiber == "affine";
  }
  if (key == "fiber.generators") return fiber == "cocycle";
  if (key.rfind("observable.", 0) == 0) {
    if (!is_pressure_task(task)) return false;
    const std::string kind = get("observable.kind");
    if (key == "observable.kind") return true;
    if (key == "observable.constant") {
      return kind == "constant" || kind == "trig" || kind == "product";
    }
    if (key == "observable.terms") return kind == "trig" || kind == "product";
    if (key == "observable.base") return kind == "product";
    return kind == "digit";
  }
  if (key == "epsilon") return true;
  if (key == "n_values") return task != Task::Shadow;
  if (key == "method" || key == "q_grid") return is_pressure_task(task);
  if (key == "omega_samples" || key == "max_candidates") {
    return is_pressure_task(task) && get("method") == "grid";
  }
  if (key == "alpha_grid") return task == Task::Spectrum || task == Task::Crosscheck;
  if (key == "delta_schedule") return task == Task::Crosscheck;
  if (key == "omega" || key == "delta" || key == "sample_size" || key == "sampler") {
    return task == Task::Katok;
  }
  if (key == "spec.omega" || key == "spec.spacing" || key == "spec.intervals") {
    return task == Task::Shadow;
  }
  return false;  // spec.file is folded into the spec.* fields
}

SkewSystem system_from(const std::map<std::string, std::string> &v) {
  const std::string &base_kind = v.at("base.kind");
  const std::string &fiber = v.at("fiber.kind");
  if (fiber == "doubling") return SkewSystem::doubling();

  std::optional<DrivingSystem> base;
  try {
    const double alpha = parse_real("base.alpha", v.at("base.alpha"));
    if (base_kind == "rotation") base = DrivingSystem::rotation(alpha);
    else if (base_kind == "sturmian") base = DrivingSystem::sturmian(alpha);
    else base = DrivingSystem::point();
  } catch (const ConfigError &) {
    throw;
  } catch (const Error &e) {
    throw ConfigError("base.alpha", e.what());
  }

  if (fiber == "affine") {
    auto it = v.find("fiber.matrix");
    if (it == v.end() || trim(it->second).empty()) {
      throw ConfigError("fiber.matrix", "required when fiber.kind = affine");
    }
    const IntMatrix2 m = parse_matrix("fiber.matrix", it->second);
    const Forcing forcing{parse_fourier("fiber.h1", v.at("fiber.h1")),
                          parse_fourier("fiber.h2", v.at("fiber.h2"))};
    try {
      return SkewSystem::affine_toral(*base, m, forcing);
    } catch (const Error &e) {
      throw ConfigError("fiber.matrix", e.what());
    }
  }
  auto it = v.find("fiber.generators");
  if (it == v.end() || trim(it->second).empty()) {
    throw ConfigError("fiber.generators", "required when fiber.kind = cocycle");
  }
  try {
    return SkewSystem::matrix_cocycle(
        *base, parse_matrices("fiber.generators", it->second));
  } catch (const ConfigError &) {
    throw;
  } catch (const Error &e) {
    throw ConfigError("fiber.generators", e.what());
  }
}

Observable observable_from(const std::map<std::string, std::string> &v,
                           const SkewSystem &sys) {
  const std::string &kind = v.at("observable.kind");
  const auto real = [&](const std::string &k) { return parse_real(k, v.at(k)); };
  // On the doubling fiber constants are stored as digit potentials with equal
  // values, which is the same function and keeps exact cylinder sums usable.
  if (kind == "zero") {
    return sys.kind() == FiberKind::Doubling ? Observable::digit(0.0, 0.0)
                                             : Observable::constant(0.0);
  }
  if (kind == "constant") {
    const double c = real("observable.constant");
    return sys.kind() == FiberKind::Doubling ? Observable::digit(c, c)
                                             : Observable::constant(c);
  }
  if (kind == "digit") {
    if (sys.kind() != FiberKind::Doubling) {
      throw ConfigError("observable.kind", "digit needs fiber.kind = doubling");
    }
    return Observable::digit(real("observable.v0"), real("observable.v1"));
  }
  const std::vector<TrigTerm> terms =
      parse_terms("observable.terms", v.at("observable.terms"));
  if (sys.dimension() == 1) {
    for (const TrigTerm &t : terms) {
      if (t.m2 != 0) {
        throw ConfigError("observable.terms", "m2 must be 0 on a circle fiber");
      }
    }
  }
  if (kind == "trig") return Observable::fiber_trig(real("observable.constant"), terms);
  return Observable::product(parse_fourier("observable.base", v.at("observable.base")),
                             real("observable.constant"), terms);
}

std::string random_intervals(const SkewSystem &sys, std::uint64_t seed,
                             int spacing) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> length(0, 6);
  std::string out;
  std::int64_t t = 0;
  for (int k = 0; k < 3; ++k) {
    const std::int64_t a = t;
    const std::int64_t b = a + length(rng);
    const double x1 = static_cast<double>(rng() >> 11) * 0x1p-53;
    const double x2 = sys.dimension() == 2
                          ? static_cast<double>(rng() >> 11) * 0x1p-53
                          : 0.0;
    if (!out.empty()) out += "; ";
    out += std::to_string(a) + " " + std::to_string(b) + " " + format_real(x1) +
           " " + format_real(x2);
    t = b + spacing + 1;
  }
  return out;
}

}  // namespace

std::string task_name(Task task) {
  switch (task) {
    case Task::Pressure: return "pressure";
    case Task::Spectrum: return "spectrum";
    case Task::Shadow: return "shadow";
    case Task::Katok: return "katok";
    case Task::Crosscheck: return "crosscheck";
  }
  return "?";
}

ExperimentConfig ExperimentConfig::parse(std::string_view text) {
  std::vector<std::string> lines;
  bool embedded = false;
  {
    std::istringstream in{std::string(text)};
    std::string line;
    while (std::getline(in, line)) {
      lines.push_back(line);
      const std::string t = trim(line);
      if (t.rfind("#@", 0) == 0 || t.rfind("<!--#@", 0) == 0) embedded = true;
    }
  }
  ExperimentConfig out;
  int number = 0;
  for (const std::string &raw : lines) {
    ++number;
    std::string t = trim(raw);
    if (embedded) {
      if (t.rfind("<!--", 0) == 0) t = trim(t.substr(4));
      if (t.rfind("#@", 0) != 0) continue;
      t = trim(t.substr(2));
      if (t.size() >= 3 && t.compare(t.size() - 3, 3, "-->") == 0) {
        t = trim(t.substr(0, t.size() - 3));
      }
    } else if (t.empty() || t[0] == '#') {
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(number),
                        "expected 'key = value'");
    }
    const std::string key = trim(t.substr(0, eq));
    if (out.has(key)) throw ConfigError(key, "given twice");
    out.set(key, trim(t.substr(eq + 1)));
  }
  return out;
}

ExperimentConfig ExperimentConfig::load(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  const std::string text = ss.str();
  if (!text.empty() && text.front() == '{') {
    // JSON artifacts carry the echo as provenance.config, one "key = value"
    // string per field.
    std::string lines;
    try {
      const nlohmann::json doc = nlohmann::json::parse(text);
      for (const auto &entry : doc.at("provenance").at("config")) {
        lines += "#@ " + entry.get<std::string>() + "\n";
      }
    } catch (const nlohmann::json::exception &e) {
      throw ConfigError("config", std::string("JSON file: ") + e.what());
    }
    return parse(lines);
  }
  return parse(text);
}

void ExperimentConfig::set(const std::string &key, const std::string &value) {
  const Field *f = find_field(key);
  if (f == nullptr) throw ConfigError(key, "unknown key");
  check_value(*f, value);
  values_[key] = value;
}

bool ExperimentConfig::has(const std::string &key) const {
  return values_.count(key) != 0;
}

ExperimentConfig ExperimentConfig::resolved() const {
  std::map<std::string, std::string> v = values_;
  const auto fill = [&](const std::string &key, const std::string &value) {
    auto it = v.find(key);
    if (it == v.end() || it->second == "auto") v[key] = value;
  };
  for (const Field &f : schema()) {
    if (!f.default_value.empty()) v.emplace(f.key, f.default_value);
  }
  const Task task = parse_task(v.at("task"));
  const std::string fiber = v.at("fiber.kind");
  fill("base.kind", fiber == "doubling" ? "point" : "rotation");
  if (fiber == "doubling" && v.at("base.kind") != "point") {
    throw ConfigError("base.kind", "the doubling fiber runs over the point base");
  }
  if (fiber != "doubling" && v.at("base.kind") == "point") {
    throw ConfigError("base.kind", "torus fibers need a rotation or sturmian base");
  }
  const SkewSystem sys = system_from(v);
  const std::uint64_t seed = parse_uint("seed", v.at("seed"));

  if (is_pressure_task(task)) {
    const Observable phi = observable_from(v, sys);
    const bool exact = sys.kind() == FiberKind::Doubling &&
                       phi.kind() == ObservableKind::Digit;
    fill("method", exact ? "cylinder" : "grid");
    if (v.at("method") == "cylinder" && !exact) {
      throw ConfigError("method",
                        "cylinder sums need the doubling fiber and a digit, "
                        "zero or constant potential");
    }
    const bool cylinder = v.at("method") == "cylinder";
    fill("epsilon", "0.05");
    if (cylinder) {
      fill("n_values", task == Task::Crosscheck ? "40:80:5" : "8..16");
    } else {
      fill("n_values", sys.dimension() == 1 ? "4..10" : "6..12");
    }
    if (task != Task::Pressure) {
      const double s = phi.sup_norm();
      double lo = -s, hi = s;
      if (phi.kind() == ObservableKind::Digit) {
        lo = std::min(phi.digit_value(0), phi.digit_value(1));
        hi = std::max(phi.digit_value(0), phi.digit_value(1));
      }
      std::vector<double> grid;
      for (int i = 1; i <= 5; ++i) grid.push_back(lo + (hi - lo) * i / 6.0);
      fill("alpha_grid", format_reals(grid));
    }
    if (parse_int("omega_samples", v.at("omega_samples")) < 1) {
      throw ConfigError("omega_samples", "must be >= 1");
    }
    if (parse_ints("n_values", v.at("n_values")).size() < 4) {
      throw ConfigError("n_values", "need at least four orbit lengths");
    }
  } else if (task == Task::Katok) {
    fill("epsilon", sys.dimension() == 1 ? "0.2" : "0.1");
    if (v.at("epsilon") == "eta") {
      v["epsilon"] = format_real(expansivity_constants(sys, 0.01).eta);
    }
    fill("n_values", sys.dimension() == 1 ? "6..12" : "2..7");
    fill("sample_size", sys.dimension() == 1 ? "60000" : "100000");
    fill("sampler", sys.dimension() == 1 ? "uniform_circle" : "haar");
    if (parse_ints("n_values", v.at("n_values")).size() < 2) {
      throw ConfigError("n_values", "need at least two orbit lengths");
    }
    const double delta = parse_real("delta", v.at("delta"));
    if (!(delta > 0.0 && delta < 1.0)) {
      throw ConfigError("delta", "must lie in (0, 1)");
    }
  } else {
    fill("epsilon", "0.1");
    auto file = v.find("spec.file");
    if (file != v.end() && !file->second.empty()) {
      for (const ConfigField &f : read_specification_file(file->second)) {
        v[f.key] = f.value;
      }
    }
    if (!sys.globally_affine_hyperbolic()) {
      throw ConfigError("fiber.kind", "shadow needs fiber.kind = affine");
    }
    const double eps = parse_real("epsilon", v.at("epsilon"));
    if (v.at("spec.spacing") == "auto") {
      try {
        v["spec.spacing"] = std::to_string(mixing_gap(sys, eps));
      } catch (const Error &e) {
        throw ConfigError("epsilon", e.what());
      }
    }
    const int spacing = static_cast<int>(parse_int("spec.spacing", v.at("spec.spacing")));
    fill("spec.intervals", random_intervals(sys, seed, spacing));
  }
  if (v.at("epsilon") == "eta") {
    throw ConfigError("epsilon", "eta is only accepted by the katok task");
  }
  if (!(parse_real("epsilon", v.at("epsilon")) > 0.0)) {
    throw ConfigError("epsilon", "must be > 0");
  }

  ExperimentConfig out;
  for (const Field &f : schema()) {
    auto it = v.find(f.key);
    if (it != v.end() && applies(f.key, v)) out.values_[f.key] = it->second;
  }
  return out;
}

std::vector<ConfigField> ExperimentConfig::fields() const {
  std::vector<ConfigField> out;
  for (const Field &f : schema()) {
    auto it = values_.find(f.key);
    if (it != values_.end()) out.push_back({f.key, it->second});
  }
  return out;
}

std::string ExperimentConfig::echo(std::string_view prefix) const {
  std::string out;
  for (const ConfigField &f : fields()) {
    out += std::string(prefix) + f.key + " = " + f.value + "\n";
  }
  return out;
}

std::string ExperimentConfig::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : echo("")) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

Task ExperimentConfig::task() const { return parse_task(text("task")); }
std::uint64_t ExperimentConfig::seed() const { return parse_uint("seed", text("seed")); }
std::uint64_t ExperimentConfig::budget() const {
  return parse_uint("budget", text("budget"));
}

const std::string &ExperimentConfig::text(const std::string &key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError(key, "missing");
  return it->second;
}

double ExperimentConfig::real(const std::string &key) const {
  return parse_real(key, text(key));
}

std::int64_t ExperimentConfig::integer(const std::string &key) const {
  return parse_int(key, text(key));
}

std::vector<double> ExperimentConfig::reals(const std::string &key) const {
  return parse_reals(key, text(key));
}

std::vector<int> ExperimentConfig::integers(const std::string &key) const {
  return parse_ints(key, text(key));
}

SkewSystem build_system(const ExperimentConfig &config) {
  std::map<std::string, std::string> v;
  for (const ConfigField &f : config.fields()) v[f.key] = f.value;
  return system_from(v);
}

Observable build_observable(const ExperimentConfig &config,
                            const SkewSystem &sys) {
  std::map<std::string, std::string> v;
  for (const ConfigField &f : config.fields()) v[f.key] = f.value;
  return observable_from(v, sys);
}

PressureOptions build_pressure_options(const ExperimentConfig &config) {
  PressureOptions o;
  o.epsilon = config.real("epsilon");
  o.n_values = config.integers("n_values");
  o.seed = config.seed();
  o.method = config.text("method") == "cylinder" ? CountMethod::Cylinder
                                                 : CountMethod::Grid;
  if (o.method == CountMethod::Grid) {
    o.omega_samples = static_cast<int>(config.integer("omega_samples"));
    o.max_candidates = static_cast<std::size_t>(config.integer("max_candidates"));
  }
  return o;
}

KatokOptions build_katok_options(const ExperimentConfig &config) {
  KatokOptions o;
  o.epsilon = config.real("epsilon");
  o.delta = config.real("delta");
  o.n_values = config.integers("n_values");
  o.sample_size = static_cast<std::size_t>(config.integer("sample_size"));
  return o;
}

MeasureSampler build_sampler(const ExperimentConfig &config,
                             const SkewSystem &sys) {
  const SamplerKind kind = config.text("sampler") == "haar"
                               ? SamplerKind::Haar
                               : SamplerKind::UniformCircle;
  if ((kind == SamplerKind::Haar) != (sys.dimension() == 2)) {
    throw ConfigError("sampler", "does not match the fiber dimension");
  }
  return {kind, config.seed()};
}

OmegaSpecification build_specification(const ExperimentConfig &config) {
  try {
    return OmegaSpecification(
        BasePoint::at(config.real("spec.omega")),
        parse_intervals("spec.intervals", config.text("spec.intervals")),
        static_cast<int>(config.integer("spec.spacing")));
  } catch (const ConfigError &) {
    throw;
  } catch (const Error &e) {
    throw ConfigError("spec.intervals", e.what());
  }
}

std::vector<ConfigField> read_specification_file(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("spec.file", "cannot read '" + path + "'");
  std::vector<ConfigField> out;
  std::string intervals;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::vector<std::string> t = tokens(line);
    if (t.empty()) continue;
    const std::string where = "spec.file:" + std::to_string(number);
    if (t[0] == "omega" && t.size() == 2) {
      parse_real(where, t[1]);
      out.push_back({"spec.omega", t[1]});
    } else if (t[0] == "spacing" && t.size() == 2) {
      parse_int(where, t[1]);
      out.push_back({"spec.spacing", t[1]});
    } else if (t[0] == "interval" && t.size() == 5) {
      std::string iv = t[1] + " " + t[2] + " " + t[3] + " " + t[4];
      parse_intervals(where, iv);
      intervals += (intervals.empty() ? "" : "; ") + iv;
    } else {
      throw ConfigError(where, "expected omega W, spacing M or interval A B X1 X2");
    }
  }
  if (intervals.empty()) throw ConfigError("spec.file", "no interval lines");
  out.push_back({"spec.intervals", intervals});
  return out;
}

const std::vector<SchemaEntry> &config_schema() {
  static const std::vector<SchemaEntry> entries = [] {
    std::vector<SchemaEntry> out;
    for (const Field &f : schema()) {
      out.push_back({f.key, f.default_value.empty() ? "(none)" : f.default_value,
                     f.meaning});
    }
    return out;
  }();
  return entries;
}

}  // namespace fiberdyn
