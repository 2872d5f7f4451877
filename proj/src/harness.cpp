#include "fiberdyn/harness.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>

#include "fiberdyn/counting.hpp"
#include "fiberdyn/katok.hpp"
#include "fiberdyn/pressure.hpp"
#include "fiberdyn/shadowing.hpp"
#include "json.hpp"

namespace fiberdyn {

namespace {

using Json = nlohmann::ordered_json;

Json provenance_json(const ExperimentConfig &config) {
  Json p;
  p["version"] = kVersion;
  p["config_hash"] = config.hash();
  p["seed"] = config.seed();
  Json lines = Json::array();
  for (const ConfigField &f : config.fields()) lines.push_back(f.key + " = " + f.value);
  p["config"] = lines;
  return p;
}

std::string dump(const Json &j) { return j.dump(2) + "\n"; }

class Csv {
 public:
  Csv(const ExperimentConfig &config, const std::string &columns)
      : text_(provenance_header(config, "# ") + columns + "\n") {}

  template <class... Cells>
  void row(const Cells &...cells) {
    std::string line;
    bool first = true;
    ((line += first ? "" : ",", line += cell(cells), first = false), ...);
    text_ += line + "\n";
  }

  const std::string &text() const { return text_; }

 private:
  static std::string cell(double v) { return format_number(v); }
  static std::string cell(int v) { return std::to_string(v); }
  static std::string cell(std::int64_t v) { return std::to_string(v); }
  static std::string cell(std::size_t v) { return std::to_string(v); }
  static std::string cell(const std::string &v) { return v; }
  static std::string cell(const char *v) { return v; }

  std::string text_;
};

std::string curve_csv(const ExperimentConfig &config, const PressureCurve &c) {
  Csv csv(config, "q,pressure,stderr,n_min,n_max,epsilon");
  for (std::size_t i = 0; i < c.q.size(); ++i) {
    csv.row(c.q[i], c.pressure[i], c.stderr_slope[i], c.n_min, c.n_max,
            c.epsilon);
  }
  return csv.text();
}

Json curve_json(const PressureCurve &c) {
  Json j;
  j["method"] = count_method_name(c.method);
  j["epsilon"] = c.epsilon;
  j["n_min"] = c.n_min;
  j["n_max"] = c.n_max;
  j["entropy"] = c.entropy;
  j["convexity_defect"] = c.convexity_defect;
  j["q"] = c.q;
  j["pressure"] = c.pressure;
  j["stderr"] = c.stderr_slope;
  j["omega_spread"] = c.omega_spread;
  if (c.method == CountMethod::Grid) {
    j["note"] =
        "one greedy maximal separated set per (omega, n); the sup over all "
        "maximal sets is approximated by it";
  }
  return j;
}

std::string flag_of(bool boundary, bool out_of_range) {
  if (boundary && out_of_range) return "boundary+out_of_range";
  if (boundary) return "boundary";
  if (out_of_range) return "out_of_range";
  return "interior";
}

std::vector<Artifact> run_pressure_like(const ExperimentConfig &config,
                                        int threads, std::string &summary) {
  const SkewSystem sys = build_system(config);
  const Observable phi = build_observable(config, sys);
  PressureOptions options = build_pressure_options(config);
  options.threads = threads;
  StepBudget budget(config.budget());
  const std::vector<double> q_grid = config.reals("q_grid");
  const Task task = config.task();
  const std::string header = provenance_header(config, "# ");

  std::vector<Artifact> out;
  Json summary_json;
  summary_json["provenance"] = provenance_json(config);

  PressureCurve curve;
  std::optional<SpectrumCurve> spectrum;
  std::optional<CrosscheckReport> cross;
  if (task == Task::Crosscheck) {
    cross = spectrum_crosscheck(sys, phi, config.reals("alpha_grid"), q_grid,
                                config.reals("delta_schedule"), options, budget);
    curve = cross->curve;
    spectrum = cross->spectrum;
  } else {
    curve = pressure_curve(sys, phi, q_grid, options, budget);
    if (task == Task::Spectrum) {
      spectrum = legendre_conjugate(curve, config.reals("alpha_grid"));
    }
  }
  out.push_back({"pressure.csv", curve_csv(config, curve)});
  summary_json["curve"] = curve_json(curve);

  std::vector<ChartSeries> chart;
  if (spectrum) {
    std::string columns = "alpha,legendre,counting_rate,flag";
    if (cross) columns += ",omega_index,discrepancy";
    Csv csv(config, columns);
    ChartSeries legendre{"legendre", spectrum->alpha, spectrum->value};
    ChartSeries rate{"counting rate", {}, {}};
    if (cross) {
      for (const CrosscheckRow &r : cross->rows) {
        csv.row(r.alpha, r.legendre, r.counting_rate,
                flag_of(r.boundary, r.out_of_range), r.omega_index,
                r.discrepancy);
        if (r.omega_index == 0 && !r.out_of_range) {
          rate.x.push_back(r.alpha);
          rate.y.push_back(r.counting_rate);
        }
      }
    } else {
      for (std::size_t i = 0; i < spectrum->alpha.size(); ++i) {
        csv.row(spectrum->alpha[i], spectrum->value[i], std::string(),
                flag_of(spectrum->boundary[i], false));
      }
    }
    out.push_back({"spectrum.csv", csv.text()});
    chart.push_back(legendre);
    if (!rate.x.empty()) chart.push_back(rate);

    Json s;
    s["alpha"] = spectrum->alpha;
    s["legendre"] = spectrum->value;
    s["argmin_q"] = spectrum->argmin_q;
    s["boundary"] = spectrum->boundary;
    s["concavity_defect"] = spectrum->concavity_defect;
    summary_json["spectrum"] = s;
    if (cross) {
      summary_json["max_interior_discrepancy"] = cross->max_interior_discrepancy;
    }
    out.push_back({task_name(task) + ".svg",
                   svg_line_chart(task_name(task) + ": Legendre conjugate and "
                                  "counting rate",
                                  "alpha", "rate", chart, header)});
  } else if (curve.q.size() >= 2) {
    out.push_back({"pressure.svg",
                   svg_line_chart("pressure curve", "q", "pressure",
                                  {{"pressure", curve.q, curve.pressure}},
                                  header)});
  }
  summary_json["steps_used"] = budget.used();
  out.push_back({task_name(task) + ".json", dump(summary_json)});

  std::ostringstream line;
  line << task_name(task) << ": entropy " << format_number(curve.entropy)
       << " over " << curve.q.size() << " q values";
  if (cross) {
    line << ", max interior discrepancy "
         << format_number(cross->max_interior_discrepancy);
  }
  summary = line.str();
  return out;
}

std::vector<Artifact> run_katok(const ExperimentConfig &config, int threads,
                                std::string &summary) {
  const SkewSystem sys = build_system(config);
  const MeasureSampler sampler = build_sampler(config, sys);
  KatokOptions options = build_katok_options(config);
  options.threads = threads;
  StepBudget budget(config.budget());
  const KatokEstimate e = katok_entropy_estimate(
      sys, sampler, BasePoint::at(config.real("omega")), options, budget);

  Csv csv(config, "n,spanning_count,epsilon,delta");
  for (std::size_t i = 0; i < e.counts.size(); ++i) {
    csv.row(e.n_values[i], e.counts[i], e.epsilon, e.delta);
  }
  Json j;
  j["provenance"] = provenance_json(config);
  j["slope"] = e.entropy;
  j["stderr"] = e.stderr_slope;
  j["epsilon"] = e.epsilon;
  j["delta"] = e.delta;
  j["sample_size"] = e.sample_size;
  j["sampler"] = sampler_kind_name(sampler.kind);
  j["sampler_invariant"] = e.sampler_invariant;
  j["note"] = e.note;
  j["steps_used"] = budget.used();
  summary = "katok: slope " + format_number(e.entropy) + " +- " +
            format_number(e.stderr_slope);
  return {{"katok.csv", csv.text()}, {"katok.json", dump(j)}};
}

std::string wide_hex(const WideTurn &w) {
  std::ostringstream s;
  s << std::hex << w;
  return s.str();
}

std::vector<Artifact> run_shadow(const ExperimentConfig &config,
                                 std::string &summary) {
  const SkewSystem sys = build_system(config);
  const OmegaSpecification spec = build_specification(config);
  const double eps = config.real("epsilon");
  const ShadowResult r = shadow(sys, spec, eps);

  Csv cert(config, "t,distance,interval");
  for (const CertificateEntry &c : r.certificate.distances) {
    cert.row(c.t, c.distance, c.interval);
  }
  Csv ledger(config, "interval,unstable_offset,stable_offset,bound");
  for (const LedgerEntry &l : r.ledger) {
    ledger.row(l.interval, l.unstable_offset, l.stable_offset, l.bound);
  }
  Json j;
  j["provenance"] = provenance_json(config);
  j["passed"] = r.certificate.passed;
  j["max_distance"] = r.certificate.max_distance;
  j["worst_t"] = r.certificate.worst_t;
  j["epsilon"] = eps;
  j["mixing_gap"] = r.mixing_gap;
  j["gamma"] = r.gamma;
  j["ledger_ok"] = r.ledger_ok;
  j["interval_max"] = r.certificate.interval_max;
  const Vec2 p = to_doubles(r.rounded);
  j["point"] = {p[0], p[1]};
  j["point_fixed_hex"] = {wide_hex(r.point.c[0]), wide_hex(r.point.c[1])};
  summary = std::string("shadow: ") + (r.certificate.passed ? "verified" : "FAILED") +
            ", max distance " + format_number(r.certificate.max_distance) +
            " for epsilon " + format_number(eps);
  return {{"certificate.csv", cert.text()},
          {"ledger.csv", ledger.text()},
          {"shadow.json", dump(j)}};
}

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string escape_xml(const std::string &s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

std::string provenance_header(const ExperimentConfig &config,
                              const std::string &comment) {
  return comment + "fiberdyn " + kVersion + "\n" + comment +
         "config_hash = " + config.hash() + "\n" + comment +
         "seed = " + std::to_string(config.seed()) + "\n" + config.echo("#@ ");
}

int exit_code_for(const Error &error) {
  switch (error.kind()) {
    case ErrorKind::InvalidConfig:
    case ErrorKind::InvalidArgument:
      return kExitInvalid;
    default:
      return kExitRefused;
  }
}

std::string error_json(const Error &error, const ExperimentConfig *resolved) {
  Json j;
  if (resolved != nullptr) j["provenance"] = provenance_json(*resolved);
  Json e;
  e["kind"] = std::string(error.kind_name());
  if (const auto *c = dynamic_cast<const ConfigError *>(&error)) {
    e["field"] = c->field();
  }
  e["message"] = error.what();
  j["error"] = e;
  j["exit_code"] = exit_code_for(error);
  return dump(j);
}

std::string svg_line_chart(const std::string &title, const std::string &x_label,
                           const std::string &y_label,
                           const std::vector<ChartSeries> &series,
                           const std::string &header) {
  const double width = 640, height = 420, left = 70, right = 20, top = 40,
               bottom = 60;
  double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
  for (const ChartSeries &s : series) {
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      x0 = std::min(x0, s.x[i]);
      x1 = std::max(x1, s.x[i]);
      y0 = std::min(y0, s.y[i]);
      y1 = std::max(y1, s.y[i]);
    }
  }
  if (!(x0 <= x1)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (x1 - x0 < 1e-12) x0 -= 0.5, x1 += 0.5;
  if (y1 - y0 < 1e-12) y0 -= 0.5, y1 += 0.5;
  const double pad = 0.05 * (y1 - y0);
  y0 -= pad;
  y1 += pad;
  const auto px = [&](double x) {
    return left + (x - x0) / (x1 - x0) * (width - left - right);
  };
  const auto py = [&](double y) {
    return height - bottom - (y - y0) / (y1 - y0) * (height - top - bottom);
  };
  static const char *colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd"};

  std::ostringstream s;
  s << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<!--\n" << header
    << "-->\n";
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
    << "\" height=\"" << height << "\" font-family=\"sans-serif\" "
    << "font-size=\"12\">\n";
  s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s << "<text x=\"" << width / 2 << "\" y=\"22\" text-anchor=\"middle\" "
    << "font-size=\"14\">" << escape_xml(title) << "</text>\n";
  s << "<g stroke=\"#444\" fill=\"none\">\n<line x1=\"" << left << "\" y1=\""
    << height - bottom << "\" x2=\"" << width - right << "\" y2=\""
    << height - bottom << "\"/>\n<line x1=\"" << left << "\" y1=\"" << top
    << "\" x2=\"" << left << "\" y2=\"" << height - bottom << "\"/>\n</g>\n";
  for (int k = 0; k <= 4; ++k) {
    const double xv = x0 + (x1 - x0) * k / 4.0;
    const double yv = y0 + (y1 - y0) * k / 4.0;
    s << "<text x=\"" << fixed(px(xv), 1) << "\" y=\"" << height - bottom + 18
      << "\" text-anchor=\"middle\">" << fixed(xv, 3) << "</text>\n";
    s << "<text x=\"" << left - 6 << "\" y=\"" << fixed(py(yv) + 4, 1)
      << "\" text-anchor=\"end\">" << fixed(yv, 3) << "</text>\n";
  }
  s << "<text x=\"" << (left + width - right) / 2 << "\" y=\"" << height - 18
    << "\" text-anchor=\"middle\">" << escape_xml(x_label) << "</text>\n";
  s << "<text x=\"16\" y=\"" << (top + height - bottom) / 2
    << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
    << (top + height - bottom) / 2 << ")\">" << escape_xml(y_label)
    << "</text>\n";
  for (std::size_t k = 0; k < series.size(); ++k) {
    const ChartSeries &c = series[k];
    const char *color = colors[k % 4];
    s << "<polyline fill=\"none\" stroke=\"" << color
      << "\" stroke-width=\"2\" points=\"";
    for (std::size_t i = 0; i < c.x.size(); ++i) {
      if (!std::isfinite(c.x[i]) || !std::isfinite(c.y[i])) continue;
      s << fixed(px(c.x[i]), 2) << "," << fixed(py(c.y[i]), 2) << " ";
    }
    s << "\"/>\n";
    for (std::size_t i = 0; i < c.x.size(); ++i) {
      if (!std::isfinite(c.x[i]) || !std::isfinite(c.y[i])) continue;
      s << "<circle cx=\"" << fixed(px(c.x[i]), 2) << "\" cy=\""
        << fixed(py(c.y[i]), 2) << "\" r=\"3\" fill=\"" << color << "\"/>\n";
    }
    const double ly = top + 8 + 16.0 * static_cast<double>(k);
    s << "<line x1=\"" << width - right - 150 << "\" y1=\"" << ly << "\" x2=\""
      << width - right - 130 << "\" y2=\"" << ly << "\" stroke=\"" << color
      << "\" stroke-width=\"2\"/>\n<text x=\"" << width - right - 124
      << "\" y=\"" << ly + 4 << "\">" << escape_xml(c.label) << "</text>\n";
  }
  s << "</svg>\n";
  return s.str();
}

RunResult run(const ExperimentConfig &config, int threads) {
  RunResult out;
  std::optional<ExperimentConfig> resolved;
  try {
    resolved = config.resolved();
    switch (resolved->task()) {
      case Task::Pressure:
      case Task::Spectrum:
      case Task::Crosscheck:
        out.artifacts = run_pressure_like(*resolved, threads, out.summary);
        break;
      case Task::Katok:
        out.artifacts = run_katok(*resolved, threads, out.summary);
        break;
      case Task::Shadow:
        out.artifacts = run_shadow(*resolved, out.summary);
        break;
    }
  } catch (const Error &e) {
    out.exit_code = exit_code_for(e);
    out.artifacts = {{"error.json", error_json(e, resolved ? &*resolved : nullptr)}};
    out.summary = std::string(e.kind_name()) + ": " + e.what();
  } catch (const std::exception &e) {
    const Error wrapped(ErrorKind::InvalidArgument, e.what());
    out.exit_code = kExitInvalid;
    out.artifacts = {{"error.json", error_json(wrapped, resolved ? &*resolved : nullptr)}};
    out.summary = std::string("error: ") + e.what();
  }
  return out;
}

void write_artifacts(const std::vector<Artifact> &artifacts,
                     const std::string &dir) {
  std::filesystem::create_directories(dir);
  for (const Artifact &a : artifacts) {
    const std::filesystem::path path = std::filesystem::path(dir) / a.name;
    std::ofstream f(path, std::ios::binary);
    f << a.content;
    if (!f) {
      throw Error(ErrorKind::InvalidArgument, "cannot write " + path.string());
    }
  }
}

}  // namespace fiberdyn
