#include "quadent/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace quadent {

namespace {

using nlohmann::ordered_json;

ordered_json number(double v) {
  if (std::isfinite(v)) return v;
  return format_double(v);
}

ordered_json fit_json(const std::optional<LinearFit>& f) {
  if (!f) return nullptr;
  return ordered_json{{"slope", number(f->slope)},
                      {"intercept", number(f->intercept)},
                      {"slope_stderr", number(f->slope_stderr)},
                      {"points", f->points}};
}

ordered_json exponent_json(const std::optional<ExponentReport>& e) {
  if (!e) return nullptr;
  ordered_json out{{"lambda_a", number(e->lambda_a)}, {"method", to_string(e->method)}};
  if (e->method == ExponentMethod::Algebraic) {
    out["indices"] = e->indices;
    ordered_json margins = ordered_json::array();
    for (double m : e->margins) margins.push_back(number(m));
    out["margins"] = margins;
    out["generic_sum"] = number(e->generic_sum);
    out["generic_agrees"] = e->generic_agrees;
  } else {
    out["slope_stderr"] = number(e->slope_stderr);
    out["fit"] = fit_json(e->fit);
  }
  return out;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::ConfigError, path + ": cannot open for writing");
  out << text;
  if (!out) throw Error(ErrorCode::ConfigError, path + ": write failed");
}

std::string short_num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.8g", v);
  return buf;
}

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_text(const RunReport& report) {
  std::string out = "t,S_vn_A,S2_A,S_as_A,I_AB,lambda_A_alg,lambda_A_vol,bound_lower,bound_upper,source,trusted\n";
  for (const auto& r : report.rows) {
    for (double v : {r.t, r.s_vn_a, r.s2_a, r.s_as_a, r.i_ab, r.lambda_alg, r.lambda_vol, r.bound_lower, r.bound_upper}) {
      out += format_double(v);
      out += ',';
    }
    out += r.source;
    out += r.trusted ? ",1\n" : ",0\n";
  }
  return out;
}

std::string text_report(const RunReport& report) {
  std::ostringstream os;
  os << "scenario  " << report.scenario << "\n";
  os << "config    " << report.config_hash << "\n";
  os << "modes     " << report.modes << ", subsystem A = {";
  for (size_t i = 0; i < report.subsystem.size(); ++i) os << (i ? ", " : "") << report.subsystem[i];
  os << "}\n";
  os << "horizon   " << short_num(report.horizon) << ", max symplectic defect " << short_num(report.max_defect) << "\n\n";

  if (report.lyapunov) {
    const auto& l = *report.lyapunov;
    os << "[lyapunov]\n  exponents ";
    for (double e : l.exponents) os << ' ' << short_num(e);
    os << "\n  residual " << short_num(l.residual) << " (threshold " << short_num(l.threshold) << "), "
       << (l.converged ? "converged" : "NOT converged") << "\n";
    if (report.regularity) {
      os << "  pairing violation " << short_num(report.regularity->max_violation) << "\n";
    }
  }
  if (!report.floquet_exponents.empty()) {
    os << "[floquet]\n  stroboscopic exponents";
    for (double e : report.floquet_exponents) os << ' ' << short_num(e);
    os << "\n";
    if (report.floquet_lambda) os << "  Lambda_A " << short_num(*report.floquet_lambda) << "\n";
  }
  if (report.algebraic || report.volumetric) {
    os << "[subsystem exponent]\n";
    if (report.algebraic) {
      os << "  algebraic  " << short_num(report.algebraic->lambda_a) << "  indices";
      for (int i : report.algebraic->indices) os << ' ' << i;
      os << "  generic sum " << short_num(report.algebraic->generic_sum)
         << (report.algebraic->generic_agrees ? " (agrees)" : " (differs)") << "\n";
    }
    if (report.volumetric) {
      os << "  volumetric " << short_num(report.volumetric->lambda_a) << " +- "
         << short_num(report.volumetric->slope_stderr) << "\n";
    }
  }
  if (report.entropy_fit || report.log_fit) {
    os << "[entropy]\n";
    if (report.entropy_fit) {
      os << "  S_vn(A) slope " << short_num(report.entropy_fit->slope) << " +- "
         << short_num(report.entropy_fit->slope_stderr) << " over " << report.entropy_fit->points << " samples\n";
    }
    if (report.log_fit) {
      os << "  slope against ln t " << short_num(report.log_fit->slope) << " +- " << short_num(report.log_fit->slope_stderr)
         << "\n";
    }
  }
  if (report.lower_fit || !report.gss.empty()) {
    os << "[bounds]\n";
    if (report.lower_fit && report.upper_fit) {
      os << "  squashed lower slope " << short_num(report.lower_fit->slope) << ", upper slope "
         << short_num(report.upper_fit->slope) << "\n";
    }
    for (const auto& g : report.gss) {
      os << "  GSS rhs min at t=" << short_num(g.t) << ": " << short_num(g.value) << " (" << to_string(g.status)
         << ", start " << g.start << ", " << g.iterations << " iterations)\n";
    }
  }
  if (report.oracle) {
    const auto& o = *report.oracle;
    os << "[oracle]\n  trusted until t=" << short_num(o.trusted_end) << ", window [" << short_num(o.window_begin) << ", "
       << short_num(o.window_end) << "]\n  slope " << short_num(o.fit.slope) << " +- " << short_num(o.fit.slope_stderr)
       << " vs " << short_num(o.reference_rate) << " (relative error " << short_num(o.relative_error) << ")\n"
       << "  max excess over the Gaussian bound " << short_num(o.max_bound_excess) << "\n";
  }
  os << "\n[checks]\n";
  for (const auto& c : report.checks) {
    os << "  " << (c.passed ? "PASS " : "FAIL ") << c.name << ": " << c.detail << "\n";
  }
  if (!report.warnings.empty()) {
    os << "[warnings]\n";
    for (const auto& w : report.warnings) os << "  " << w.stage << " " << w.code << ": " << w.message << "\n";
  }
  os << "\nverdict   " << (report.passed() ? "PASS" : "FAIL") << "\n";
  return os.str();
}

std::string json_report(const RunReport& report) {
  ordered_json j;
  j["scenario"] = report.scenario;
  j["config_hash"] = report.config_hash;
  j["modes"] = report.modes;
  j["subsystem"] = report.subsystem;
  j["horizon"] = number(report.horizon);
  j["max_defect"] = number(report.max_defect);
  if (report.lyapunov) {
    const auto& l = *report.lyapunov;
    ordered_json ex = ordered_json::array();
    for (double e : l.exponents) ex.push_back(number(e));
    j["lyapunov"] = {{"exponents", ex},
                     {"horizon", number(l.horizon)},
                     {"residual", number(l.residual)},
                     {"threshold", number(l.threshold)},
                     {"converged", l.converged}};
    if (report.regularity) {
      j["lyapunov"]["regular"] = report.regularity->regular;
      j["lyapunov"]["pairing_violation"] = number(report.regularity->max_violation);
    }
  } else {
    j["lyapunov"] = nullptr;
  }
  ordered_json fl = ordered_json::array();
  for (double e : report.floquet_exponents) fl.push_back(number(e));
  j["floquet"] = {{"exponents", fl},
                  {"lambda_a", report.floquet_lambda ? number(*report.floquet_lambda) : ordered_json(nullptr)}};
  j["exponent"] = {{"algebraic", exponent_json(report.algebraic)}, {"volumetric", exponent_json(report.volumetric)}};
  j["fits"] = {{"entropy", fit_json(report.entropy_fit)},
               {"log_growth", fit_json(report.log_fit)},
               {"bound_lower", fit_json(report.lower_fit)},
               {"bound_upper", fit_json(report.upper_fit)}};
  ordered_json gss = ordered_json::array();
  for (const auto& g : report.gss) {
    gss.push_back({{"t", number(g.t)},
                   {"value", number(g.value)},
                   {"status", to_string(g.status)},
                   {"start", g.start},
                   {"iterations", g.iterations}});
  }
  j["gss"] = gss;
  if (report.oracle) {
    const auto& o = *report.oracle;
    j["oracle"] = {{"fit", fit_json(o.fit)},
                   {"window", {number(o.window_begin), number(o.window_end)}},
                   {"trusted_end", number(o.trusted_end)},
                   {"reference_rate", number(o.reference_rate)},
                   {"relative_error", number(o.relative_error)},
                   {"within_tolerance", o.within_tolerance},
                   {"gaussian_bound_respected", o.gaussian_bound_respected},
                   {"max_bound_excess", number(o.max_bound_excess)}};
  } else {
    j["oracle"] = nullptr;
  }
  ordered_json checks = ordered_json::array();
  for (const auto& c : report.checks) checks.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
  j["checks"] = checks;
  ordered_json warnings = ordered_json::array();
  for (const auto& w : report.warnings) warnings.push_back({{"stage", w.stage}, {"code", w.code}, {"message", w.message}});
  j["warnings"] = warnings;
  j["passed"] = report.passed();
  return j.dump(2) + "\n";
}

void write_outputs(const RunReport& report, const OutputSpec& paths) {
  if (!paths.csv.empty()) write_file(paths.csv, csv_text(report));
  if (!paths.report.empty()) write_file(paths.report, text_report(report));
  if (!paths.json.empty()) write_file(paths.json, json_report(report));
}

}  // namespace quadent
