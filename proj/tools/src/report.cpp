#include "fuzzy/app/report.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "fuzzy/variational.hpp"

#ifndef FUZZY_VERSION
#define FUZZY_VERSION "unknown"
#endif

namespace fuzzy::app {

namespace {

nlohmann::json opt(const std::optional<double>& x) { return x ? nlohmann::json(*x) : nlohmann::json(nullptr); }

std::optional<double> opt_from(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<double>();
}

std::string fixed(const std::optional<double>& x, int digits = 6) {
  if (!x) return "-";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, *x);
  return buf;
}

bool relative_match(double a, double b, double rel) { return std::abs(a - b) <= rel * std::abs(b); }

ReportRow moment_row(const MomentReport& m) {
  ReportRow row;
  row.name = m.name;
  row.published = m.reference;
  row.tolerance = m.reference_tolerance;
  row.closed_form = m.closed_form;
  row.quadrature = m.quadrature.value;
  if (m.monte_carlo) {
    row.mc_mean = m.monte_carlo->mean;
    row.mc_error = m.monte_carlo->std_error;
  }
  const bool ok = m.reference_agrees() && m.closed_form_agrees(1e-4) && (!m.monte_carlo || m.monte_carlo_agrees(3.0));
  row.status = ok ? Status::match : Status::flagged;
  std::ostringstream note;
  if (!m.reference_agrees() && m.reference) {
    note << "quadrature differs from the published value by " << fixed(m.quadrature.value - *m.reference);
  }
  for (const auto& d : m.diagnostics) {
    if (note.tellp() > 0) note << "; ";
    note << d.label << " = " << fixed(d.value);
  }
  row.note = note.str();
  return row;
}

}  // namespace

double printed_energy(double kappa) { return std::pow(kappa, -1.0 / 3.0) * 3.0 * std::cbrt(0.75); }

bool VerificationReport::any_flagged() const {
  for (const auto& r : rows)
    if (r.status == Status::flagged) return true;
  return false;
}

const ReportRow* VerificationReport::find(const std::string& name) const {
  for (const auto& r : rows)
    if (r.name == name) return &r;
  return nullptr;
}

VerificationReport build_report(const RunConfig& cfg) {
  validate(cfg);
  VerificationReport rep;
  rep.kappa = cfg.kappa;
  rep.seed = cfg.seed;
  rep.tol = cfg.tol;
  rep.mc_samples = cfg.mc_samples;
  rep.version = FUZZY_VERSION;
#ifdef __VERSION__
  rep.compiler = __VERSION__;
#endif

  const GroundStateModel model = minimize_closed(cfg.kappa);
  const VariationalParams numeric = minimize_numeric(cfg.kappa, {1.0, 0.5});
  const double printed_mu = std::cbrt(cfg.kappa) * std::cbrt(0.75);
  const double printed_nu = (std::numbers::sqrt2 - 1.0) * printed_mu;

  SampleBatch batch;
  const SampleBatch* batch_ptr = nullptr;
  if (cfg.mc_samples > 0) {
    batch = sample_uv_parallel(model, cfg.mc_samples, cfg.seed, cfg.workers);
    batch_ptr = &batch;
    rep.mc_acceptance = batch.acceptance_rate;
  }

  auto param_row = [&](const char* name, double printed, double closed, double num) {
    ReportRow row;
    row.name = name;
    row.published = printed;
    row.closed_form = closed;
    row.quadrature = num;
    row.tolerance = 1e-6 * std::abs(closed);
    const bool ok = relative_match(closed, printed, 1e-12) && relative_match(num, closed, 1e-6);
    row.status = ok ? Status::match : Status::flagged;
    row.note = "quadrature column holds the numeric minimizer";
    return row;
  };
  rep.rows.push_back(param_row("mu_m", printed_mu, model.params.mu, numeric.mu));
  rep.rows.push_back(param_row("nu_m", printed_nu, model.params.nu, numeric.nu));

  {
    ReportRow row;
    row.name = "energy";
    row.published = printed_energy(cfg.kappa);
    row.closed_form = model.energy;
    row.quadrature = energy_quadrature(model.params, cfg.kappa, cfg.tol).value;
    row.tolerance = 1e-6 * model.energy;
    if (batch_ptr) {
      const auto mc = mc_moment(*batch_ptr, [&](double U, double V) {
        return trial_local_energy(model.params, cfg.kappa, U, std::sqrt(V));
      });
      row.mc_mean = mc.mean;
      row.mc_error = mc.std_error;
    }
    const bool printed_ok = relative_match(*row.published, model.energy, 1e-6);
    const bool quad_ok = relative_match(*row.quadrature, model.energy, 1e-6);
    row.status = printed_ok && quad_ok ? Status::match : Status::flagged;
    if (!printed_ok) {
      row.note = "published expression carries kappa^(-1/3); closed form and quadrature give 3 (3/4)^(1/3) kappa^(1/3)";
      rep.flags.push_back({"energy-kappa-exponent",
                           "published kappa^(-1/3) x 3(3/4)^(1/3) = " + fixed(*row.published) +
                               "; minimized energy 3 mu_m = " + fixed(model.energy) + " (exponent +1/3)"});
    }
    rep.rows.push_back(row);
  }

  const MomentOptions opts{cfg.tol, batch_ptr};
  const MomentReport area = expected_area(model, opts);
  const MomentReport e3 = expected_e3(model, opts);
  const MomentReport perimeter = expected_perimeter(model, opts);
  const MomentReport shape = expected_shape(model, opts);
  for (const auto* m : {&area, &e3, &perimeter, &shape}) {
    rep.rows.push_back(moment_row(*m));
    if (m->reference && !m->reference_agrees()) {
      rep.flags.push_back({m->name + "-published-value",
                           "published " + fixed(*m->reference) + " vs quadrature " + fixed(m->quadrature.value) +
                               " (closed form " + fixed(m->closed_form) + ")"});
    }
    for (const auto& v : m->variants) {
      if (!std::isfinite(v.value) || !relative_match(v.value, m->quadrature.value, 1e-4)) {
        rep.flags.push_back({m->name + "-closed-form-reading",
                             v.label + " = " + fixed(v.value) + ", gap to quadrature " +
                                 fixed(v.value - m->quadrature.value)});
      }
    }
  }
  return rep;
}

nlohmann::json to_json(const VerificationReport& report) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : report.rows) {
    rows.push_back({{"name", r.name},
                    {"published", opt(r.published)},
                    {"closed_form", opt(r.closed_form)},
                    {"quadrature", opt(r.quadrature)},
                    {"mc_mean", opt(r.mc_mean)},
                    {"mc_error", opt(r.mc_error)},
                    {"tolerance", r.tolerance},
                    {"status", r.status == Status::match ? "match" : "flagged"},
                    {"note", r.note}});
  }
  nlohmann::json flags = nlohmann::json::array();
  for (const auto& f : report.flags) flags.push_back({{"name", f.name}, {"detail", f.detail}});
  return {{"rows", rows},
          {"flags", flags},
          {"environment",
           {{"version", report.version},
            {"compiler", report.compiler},
            {"kappa", report.kappa},
            {"seed", report.seed},
            {"tol", report.tol},
            {"mc_samples", report.mc_samples},
            {"mc_acceptance", report.mc_acceptance}}}};
}

VerificationReport report_from_json(const nlohmann::json& j) {
  VerificationReport rep;
  for (const auto& r : j.at("rows")) {
    ReportRow row;
    row.name = r.at("name").get<std::string>();
    row.published = opt_from(r, "published");
    row.closed_form = opt_from(r, "closed_form");
    row.quadrature = opt_from(r, "quadrature");
    row.mc_mean = opt_from(r, "mc_mean");
    row.mc_error = opt_from(r, "mc_error");
    row.tolerance = r.at("tolerance").get<double>();
    const auto status = r.at("status").get<std::string>();
    if (status != "match" && status != "flagged") throw std::invalid_argument("report: bad status " + status);
    row.status = status == "match" ? Status::match : Status::flagged;
    row.note = r.at("note").get<std::string>();
    rep.rows.push_back(std::move(row));
  }
  for (const auto& f : j.at("flags")) rep.flags.push_back({f.at("name"), f.at("detail")});
  const auto& env = j.at("environment");
  rep.version = env.at("version");
  rep.compiler = env.at("compiler");
  rep.kappa = env.at("kappa");
  rep.seed = env.at("seed");
  rep.tol = env.at("tol");
  rep.mc_samples = env.at("mc_samples");
  rep.mc_acceptance = env.at("mc_acceptance");
  return rep;
}

std::string render_table(const VerificationReport& report) {
  std::ostringstream os;
  char line[256];
  std::snprintf(line, sizeof line, "%-14s %12s %12s %12s %22s  %s\n", "quantity", "published", "closed form",
                "quadrature", "monte carlo", "status");
  os << line;
  for (const auto& r : report.rows) {
    std::string mc = "-";
    if (r.mc_mean) mc = fixed(r.mc_mean) + " +- " + fixed(r.mc_error);
    std::snprintf(line, sizeof line, "%-14s %12s %12s %12s %22s  %s\n", r.name.c_str(), fixed(r.published).c_str(),
                  fixed(r.closed_form).c_str(), fixed(r.quadrature).c_str(), mc.c_str(),
                  r.status == Status::match ? "match" : "FLAGGED");
    os << line;
  }
  if (!report.flags.empty()) {
    os << "\nflags:\n";
    for (const auto& f : report.flags) os << "  [" << f.name << "] " << f.detail << '\n';
  }
  std::snprintf(line, sizeof line, "\nkappa = %.12g, seed = %llu, tol = %.3g, mc samples = %zu\n", report.kappa,
                static_cast<unsigned long long>(report.seed), report.tol, report.mc_samples);
  os << line;
  return os.str();
}

}  // namespace fuzzy::app
