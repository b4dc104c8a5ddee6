#include "chernoff/cli_runner.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <thread>

#include "chernoff/errors.hpp"
#include "chernoff/photon_sim.hpp"

#ifndef CHERNOFF_SCOPE_VERSION
#define CHERNOFF_SCOPE_VERSION "0.0.0"
#endif

namespace chernoff {
namespace {

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c == '\n' ? ' ' : c;
  }
  return out + "\"";
}

using Row = std::vector<std::string>;

class Csv {
 public:
  Csv(const RunConfig& cfg, std::vector<std::string> columns) : columns_(std::move(columns)) {
    char hash[32];
    std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(fnv1a64(cfg.canonical)));
    out_ << "# chernoff_scope " << CHERNOFF_SCOPE_VERSION << "\n# config_hash " << hash << "\n";
    add(columns_);
  }
  void add(const Row& row) {
    for (size_t i = 0; i < row.size(); ++i) out_ << (i ? "," : "") << quote(row[i]);
    out_ << "\n";
  }
  void add_all(const std::vector<Row>& rows) {
    for (const auto& r : rows) add(r);
  }
  size_t width() const { return columns_.size(); }
  void write(const std::string& dir, const std::string& name) const {
    std::filesystem::create_directories(dir);
    std::ofstream f(dir + "/" + name, std::ios::binary);
    if (!f) throw Error(ErrorCode::Io, "cannot write " + dir + "/" + name);
    f << out_.str();
  }

 private:
  std::vector<std::string> columns_;
  std::ostringstream out_;
};

std::string error_text(const std::exception& e) { return std::string(e.what()); }

// Runs tasks on a small pool; results keep task order.
std::vector<std::vector<Row>> run_tasks(const std::vector<std::function<std::vector<Row>()>>& tasks, int threads) {
  std::vector<std::vector<Row>> out(tasks.size());
  const int workers = std::max(1, std::min<int>(threads, static_cast<int>(tasks.size())));
  auto work = [&](int w) {
    for (size_t k = static_cast<size_t>(w); k < tasks.size(); k += static_cast<size_t>(workers)) out[k] = tasks[k]();
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work, w);
    for (auto& t : pool) t.join();
  }
  return out;
}

bool has_error(const std::vector<std::vector<Row>>& groups) {
  for (const auto& g : groups)
    for (const auto& r : g)
      if (!r.back().empty()) return true;
  return false;
}

int cmd_exponent(const RunConfig& cfg, const RunOptions& opts) {
  const PsfModel& psf = *cfg.psf;
  const PsfScalars scalars = psf_scalars(psf);
  const PadBasis basis = build_pad_basis(psf, cfg.basis_order);
  const ObjectModel& o1 = cfg.objects[0];
  const ObjectModel& o2 = cfg.objects[1];
  const MomentTable t1 = moments(o1, 2), t2 = moments(o2, 2);
  const bool want_direct_form =
      scalars.separable && !scalars.has_zeros &&
      std::any_of(cfg.measurements.begin(), cfg.measurements.end(),
                  [](const MeasurementSpec& m) { return std::holds_alternative<DirectImaging>(m); });

  std::vector<std::function<std::vector<Row>()>> tasks;
  for (double gamma : cfg.gammas) {
    tasks.push_back([&, gamma] {
      std::vector<Row> rows;
      auto emit = [&](const std::string& method, const std::string& meas, const std::function<ExponentResult()>& f) {
        try {
          const ExponentResult r = f();
          rows.push_back({num(gamma), method, meas, num(r.xi), num(r.s_star), to_string(r.diagnostics.region),
                          num(std::max(r.diagnostics.trace_deficit_1, r.diagnostics.trace_deficit_2)), ""});
        } catch (const std::exception& e) {
          rows.push_back({num(gamma), method, meas, "", "", "", "", error_text(e)});
        }
      };
      std::optional<DensityMatrix> r1, r2;
      std::string state_error;
      try {
        r1 = assemble_exact(o1, psf, basis, gamma);
        r2 = assemble_exact(o2, psf, basis, gamma);
      } catch (const std::exception& e) {
        state_error = error_text(e);
      }
      auto need_states = [&] {
        if (!r1) throw Error(ErrorCode::QuadratureNotConverged, state_error);
      };
      emit("exact-quantum", "none", [&] {
        need_states();
        return qce_exact(*r1, *r2);
      });
      emit("bhattacharyya", "none", [&] {
        need_states();
        return bhattacharyya(*r1, *r2);
      });
      emit("closed-form-quantum", "none", [&] { return qce_lowest_order(t1, t2, scalars, gamma); });
      for (const auto& m : cfg.measurements) {
        emit("exact-measurement", measurement_name(m), [&] {
          if (!is_modal(m) || !is_aligned(m)) return ce_measurement_exact(o1, o2, psf, basis, gamma, m);
          need_states();
          return ce_measurement_exact(*r1, *r2, m, basis);
        });
      }
      if (want_direct_form)
        emit("closed-form-direct", "direct", [&] { return ce_direct_lowest_order(t1, t2, scalars, gamma); });
      return rows;
    });
  }
  const auto groups = run_tasks(tasks, opts.threads);
  Csv csv(cfg, {"gamma", "method", "measurement", "xi", "s_star", "search_region", "trace_deficit", "error"});
  for (const auto& g : groups) csv.add_all(g);
  csv.write(opts.out_dir, "exponent.csv");
  return has_error(groups) ? 2 : 0;
}

double threshold_at(const RunConfig& cfg, const PsfScalars& scalars, double gamma) {
  if (!cfg.threshold_relative) return cfg.threshold;
  DatabaseSpec tight = cfg.database;
  tight.packing = Packing::Quadratic;
  tight.mx = tight.my = 2;
  return cfg.threshold * closed_form_mary(tight, scalars, gamma, Receiver::Quantum);
}

int cmd_mary(const RunConfig& cfg, const RunOptions& opts) {
  const PsfScalars scalars = psf_scalars(*cfg.psf);
  const DatabaseSpec& spec = cfg.database;
  std::vector<Row> rows;
  auto row = [&](const std::string& section, double gamma, int mx, const std::string& q, const std::string& v,
                 const std::string& err) {
    rows.push_back({section, std::isnan(gamma) ? "" : num(gamma), mx > 0 ? std::to_string(mx) : "", q, v, err});
  };
  bool failed = false;
  auto guarded = [&](const std::string& section, double gamma, int mx, const std::string& q,
                     const std::function<double()>& f) {
    try {
      row(section, gamma, mx, q, num(f()), "");
    } catch (const std::exception& e) {
      failed = true;
      row(section, gamma, mx, q, "", error_text(e));
    }
  };

  for (double gamma : cfg.gammas) {
    const double thr = threshold_at(cfg, scalars, gamma);
    for (int mx : cfg.mx_values) {
      DatabaseSpec s = spec;
      s.mx = s.my = mx;
      try {
        const double xq = closed_form_mary(s, scalars, gamma, Receiver::Quantum);
        const double xd = closed_form_mary(s, scalars, gamma, Receiver::Direct);
        row("region", gamma, mx, "xi_trispade", num(xq), "");
        row("region", gamma, mx, "xi_direct", num(xd), "");
        row("region", gamma, mx, "advantage", xq > xd ? "1" : "0", "");
        row("region", gamma, mx, "above_threshold", xq > thr ? "1" : "0", "");
      } catch (const std::exception& e) {
        failed = true;
        row("region", gamma, mx, "xi", "", error_text(e));
      }
    }
  }
  try {
    const AdvantageMap map = advantage_regions(cfg.gammas, cfg.mx_values, spec, scalars, cfg.threshold);
    const double lo = spec.packing == Packing::Quadratic ? spec.mx2_min : spec.mx2_max;
    for (size_t i = 0; i < map.mx_values.size(); ++i) {
      row("boundary", std::nan(""), map.mx_values[i], "gamma_boundary", num(map.boundary[i]), "");
      row("boundary", std::nan(""), map.mx_values[i], "gamma_asymptote", num(1.0 / std::sqrt(2.0 * lo)), "");
    }
  } catch (const std::exception& e) {
    failed = true;
    row("boundary", std::nan(""), 0, "gamma_boundary", "", error_text(e));
  }

  const auto db = generate_database(spec);
  for (double gamma : cfg.gammas) {
    guarded("compare", gamma, spec.mx, "closed_form_quantum",
            [&] { return closed_form_mary(spec, scalars, gamma, Receiver::Quantum); });
    guarded("compare", gamma, spec.mx, "brute_force_quantum", [&] {
      return mary_exponent(db, [&](const MomentTable& a, const MomentTable& b) {
               return qce_lowest_order(a, b, scalars, gamma).xi;
             }, false, opts.threads).xi;
    });
    guarded("compare", gamma, spec.mx, "closed_form_direct",
            [&] { return closed_form_mary(spec, scalars, gamma, Receiver::Direct); });
    guarded("compare", gamma, spec.mx, "brute_force_direct", [&] {
      return mary_exponent(db, [&](const MomentTable& a, const MomentTable& b) {
               return ce_direct_lowest_order(a, b, scalars, gamma).xi;
             }, false, opts.threads).xi;
    });
  }
  Csv csv(cfg, {"section", "gamma", "mx", "quantity", "value", "error"});
  csv.add_all(rows);
  csv.write(opts.out_dir, "mary.csv");
  return failed ? 2 : 0;
}

int cmd_capacity(const RunConfig& cfg, const RunOptions& opts) {
  const PsfScalars scalars = psf_scalars(*cfg.psf);
  std::vector<Row> rows;
  bool failed = false;
  for (double gamma : cfg.gammas) {
    const double thr = threshold_at(cfg, scalars, gamma);
    for (Receiver which : {Receiver::Quantum, Receiver::Direct}) {
      const std::string name = which == Receiver::Quantum ? "trispade" : "direct";
      try {
        const CapacityResult c = capacity(gamma, thr, cfg.database, which, scalars);
        rows.push_back({num(gamma), name, num(thr), std::to_string(c.m), std::to_string(c.mx), num(c.xi), ""});
      } catch (const Error& e) {
        if (e.code() != ErrorCode::ThresholdUnreachable) failed = true;
        rows.push_back({num(gamma), name, num(thr), "", "", "", error_text(e)});
      }
    }
  }
  Csv csv(cfg, {"gamma", "measurement", "threshold", "m_max", "mx", "xi", "error"});
  csv.add_all(rows);
  csv.write(opts.out_dir, "capacity.csv");
  return failed ? 2 : 0;
}

int cmd_simulate(const RunConfig& cfg, const RunOptions& opts) {
  const PsfModel& psf = *cfg.psf;
  const PadBasis basis = build_pad_basis(psf, cfg.basis_order);
  std::vector<Row> points, fits;
  bool failed = false;
  std::uint64_t cell = 0;
  for (double gamma : cfg.gammas) {
    for (const auto& m : cfg.measurements) {
      const std::string name = measurement_name(m);
      const std::uint64_t seed = cfg.seed + 0x9E3779B97F4A7C15ULL * cell++;
      double analytic = std::nan(""), binned = std::nan("");
      try {
        analytic = ce_measurement_exact(cfg.objects[0], cfg.objects[1], psf, basis, gamma, m).xi;
        const OutcomeModel model = outcome_model(cfg.objects[0], cfg.objects[1], psf, basis, gamma, m, cfg.llr_bins);
        binned = classical_chernoff(model.p1, model.p2).xi;
        TrialConfig tc;
        tc.trials = cfg.trials;
        tc.seed = seed;
        tc.epsilon = cfg.epsilon;
        tc.threads = opts.threads;
        tc.photons = cfg.photons;
        if (tc.photons.empty()) {
          if (!(binned > 0.0))
            throw Error(ErrorCode::InvalidArgument, "zero exponent; give photons explicitly");
          for (int i = 0; i < cfg.photons_count; ++i) {
            const double x = cfg.photons_xi_min +
                             (cfg.photons_xi_max - cfg.photons_xi_min) * i / static_cast<double>(cfg.photons_count - 1);
            const long n = std::max(1L, std::lround(x / binned));
            if (tc.photons.empty() || n > tc.photons.back()) tc.photons.push_back(n);
          }
        }
        std::optional<ErrorEstimate> est;
        std::string fit_error;
        try {
          est = run_trials(tc, model);
        } catch (const Error& e) {
          if (e.code() != ErrorCode::DegenerateRates) throw;
          fit_error = error_text(e);
        }
        if (!est) {
          failed = true;
          fits.push_back({num(gamma), name, num(analytic), num(binned), "", "", "", fit_error});
          continue;
        }
        for (const auto& p : est->points)
          points.push_back({num(gamma), name, std::to_string(p.n), num(p.temporal_modes), num(p.errors),
                            std::to_string(p.trials), num(p.rate), num(p.ci_low), num(p.ci_high),
                            p.in_window ? "1" : "0"});
        fits.push_back({num(gamma), name, num(analytic), num(binned), num(est->fitted_exponent), num(est->raw_slope),
                        num(est->fit_residual), ""});
      } catch (const std::exception& e) {
        failed = true;
        fits.push_back({num(gamma), name, num(analytic), num(binned), "", "", "", error_text(e)});
      }
    }
  }
  Csv pc(cfg, {"gamma", "measurement", "n", "temporal_modes", "errors", "trials", "rate", "ci_low", "ci_high",
               "in_window"});
  pc.add_all(points);
  pc.write(opts.out_dir, "simulate.csv");
  Csv fc(cfg, {"gamma", "measurement", "analytic_ce", "binned_ce", "fitted_exponent", "raw_slope", "fit_residual",
               "error"});
  fc.add_all(fits);
  fc.write(opts.out_dir, "simulate_fit.csv");
  return failed ? 2 : 0;
}

}  // namespace

int run_command(const RunOptions& opts, std::ostream& log) {
  RunConfig cfg;
  try {
    std::ifstream f(opts.config_path);
    if (!f) throw Error(ErrorCode::Config, "cannot read config file " + opts.config_path);
    std::stringstream ss;
    ss << f.rdbuf();
    cfg = parse_config(ss.str(), opts.command, opts.seed);
  } catch (const std::exception& e) {
    log << "config error: " << e.what() << "\n";
    return 1;
  }
  try {
    if (opts.command == "exponent") return cmd_exponent(cfg, opts);
    if (opts.command == "mary") return cmd_mary(cfg, opts);
    if (opts.command == "capacity") return cmd_capacity(cfg, opts);
    if (opts.command == "simulate") return cmd_simulate(cfg, opts);
    log << "unknown command '" << opts.command << "'\n";
    return 1;
  } catch (const std::exception& e) {
    log << "error: " << e.what() << "\n";
    return 2;
  }
}

int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Chernoff exponents for sub-Rayleigh object discrimination"};
  app.set_version_flag("--version", std::string("chernoff_scope ") + CHERNOFF_SCOPE_VERSION);
  RunOptions opts;
  std::optional<int> threads;
  std::optional<std::uint64_t> seed;
  app.require_subcommand(1);
  const std::pair<const char*, const char*> commands[] = {
      {"exponent", "binary exponents over a gamma sweep"},
      {"mary", "database exponents, advantage regions and boundaries"},
      {"capacity", "largest database above an exponent threshold"},
      {"simulate", "Monte Carlo error rates and fitted exponents"}};
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", opts.config_path, "JSON configuration")->required();
    sub->add_option("--out", opts.out_dir, "output directory");
    sub->add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--seed", seed, "RNG seed (overrides the config)");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    std::stringstream o, er;
    const int code = app.exit(e, o, er);
    out << o.str();
    err << er.str();
    return code == 0 ? 0 : 1;
  }
  opts.command = app.get_subcommands().front()->get_name();
  if (threads) {
    opts.threads = *threads;
  } else if (const char* env = std::getenv("CHERNOFF_SCOPE_THREADS")) {
    opts.threads = std::max(1, std::atoi(env));
  }
  opts.seed = seed;
  const int code = run_command(opts, err);
  if (code == 0) out << "wrote " << opts.command << " results to " << opts.out_dir << "\n";
  return code;
}

}  // namespace chernoff
