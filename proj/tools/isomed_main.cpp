// Command-line front end: fit / calibrate / med / simulate.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "isomed/calibration.hpp"
#include "isomed/csv.hpp"
#include "isomed/errors.hpp"
#include "isomed/isotonic.hpp"
#include "isomed/json_io.hpp"
#include "isomed/med.hpp"
#include "isomed/simulate.hpp"
#include "isomed/summary.hpp"

namespace {

std::string fmt(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

void print_table(const std::vector<std::vector<std::string>>& rows, std::ostream& out) {
  std::vector<std::size_t> widths;
  for (const auto& row : rows) {
    if (widths.size() < row.size()) widths.resize(row.size(), 0);
    for (std::size_t c = 0; c < row.size(); ++c)
      widths[c] = std::max(widths[c], row[c].size());
  }
  for (const auto& row : rows) {
    std::string line;
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) line += "  ";
      line += row[c];
      if (c + 1 < row.size()) line.append(widths[c] - row[c].size(), ' ');
    }
    out << line << "\n";
  }
}

void write_output(const isomed::json& j, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw isomed::DataError("cannot open '" + path + "' for writing");
  out << j.dump(2) << "\n";
}

struct CommonOpts {
  std::string format = "table";
  int digits = 3;
  int threads = 0;
};

int cmd_fit(const std::string& input, const std::string& method, const CommonOpts& opts) {
  const isomed::DoseResponseData data = isomed::load_dose_response(input);
  const isomed::WeightedMeans wm = data.treatment_means();
  isomed::IsotonicFit fit;
  if (method == "sdmmsa")
    fit = isomed::sdmmsa_fit(wm);
  else if (method == "pava")
    fit = isomed::pava_fit(wm);
  else
    fit = isomed::oracle_fit(wm);

  if (opts.format == "json") {
    isomed::json groups = isomed::json::array();
    for (int i = 1; i <= data.k(); ++i) {
      const auto& g = data.treatments[i - 1];
      groups.push_back({{"index", i},
                        {"label", g.label},
                        {"n", g.n},
                        {"mean", g.mean},
                        {"fitted", fit.fitted[i - 1]},
                        {"block", fit.block_ordinal(i)}});
    }
    isomed::json partition = isomed::json::array();
    for (const auto& b : fit.blocks_left_to_right()) partition.push_back({b.lo, b.hi});
    std::vector<double> block_means(fit.block_means.rbegin(), fit.block_means.rend());
    const isomed::json j{{"method", method},
                         {"control", {{"label", data.control.label},
                                      {"n", data.control.n},
                                      {"mean", data.control.mean}}},
                         {"groups", groups},
                         {"partition", partition},
                         {"block_means", block_means},
                         {"s", data.s},
                         {"nu", data.nu}};
    std::cout << j.dump(2) << "\n";
    return 0;
  }

  std::vector<std::vector<std::string>> rows;
  rows.push_back({"index", "label", "n", "mean", "fitted", "block"});
  rows.push_back({"0", data.control.label, std::to_string(data.control.n),
                  fmt(data.control.mean, opts.digits), "-", "-"});
  for (int i = 1; i <= data.k(); ++i) {
    const auto& g = data.treatments[i - 1];
    rows.push_back({std::to_string(i), g.label, std::to_string(g.n), fmt(g.mean, opts.digits),
                    fmt(fit.fitted[i - 1], opts.digits),
                    std::to_string(fit.block_ordinal(i))});
  }
  print_table(rows, std::cout);
  std::cout << "s = " << fmt(data.s, opts.digits) << "  nu = " << data.nu
            << "  method = " << method << "\n";
  return 0;
}

void print_critical_values(const isomed::CriticalValues& cv, const CommonOpts& opts) {
  std::vector<std::vector<std::string>> rows;
  rows.push_back({"i", "c", "se"});
  for (std::size_t i = 0; i < cv.c.size(); ++i)
    rows.push_back({std::to_string(i + 1), fmt(cv.c[i], opts.digits),
                    fmt(cv.standard_errors[i], opts.digits)});
  print_table(rows, std::cout);
  std::cout << "alpha = " << cv.config.alpha << "  delta = " << cv.config.delta
            << "  nu = " << cv.config.nu << "  replicates = " << cv.config.replicates
            << "  seed = " << cv.config.seed << "\n";
}

int cmd_calibrate(const std::string& input, const std::vector<long>& sizes, double alpha,
                  double delta, std::size_t replicates, std::uint64_t seed,
                  const std::string& out_path, const CommonOpts& opts) {
  isomed::CalibrationConfig cfg;
  cfg.alpha = alpha;
  cfg.delta = delta;
  cfg.replicates = replicates;
  cfg.seed = seed;
  if (!input.empty()) {
    const isomed::DoseResponseData data = isomed::load_dose_response(input);
    cfg.sizes = data.sizes();
    cfg.nu = data.nu;
  } else if (!sizes.empty()) {
    cfg.sizes = sizes;
    long total = 0;
    for (long n : sizes) total += n;
    cfg.nu = total - static_cast<long>(sizes.size());
  } else {
    throw isomed::ArgumentError("calibrate: need --input or --sizes");
  }

  const isomed::CriticalValues cv = isomed::calibrate(cfg, opts.threads);
  if (!out_path.empty()) isomed::save_critical_values(cv, out_path);
  if (opts.format == "json")
    std::cout << isomed::to_json(cv).dump(2) << "\n";
  else
    print_critical_values(cv, opts);
  return 0;
}

void print_decision(const isomed::MedDecision& d, const CommonOpts& opts) {
  std::vector<std::vector<std::string>> rows;
  rows.push_back({"step", "statistic", "cutoff", "reject"});
  for (std::size_t i = 0; i < d.statistics.size(); ++i)
    rows.push_back({std::to_string(i + 1), fmt(d.statistics[i], opts.digits),
                    fmt(d.cutoffs[i], opts.digits),
                    d.statistics[i] > d.cutoffs[i] ? "yes" : "no"});
  print_table(rows, std::cout);
  if (d.med)
    std::cout << "MED = " << *d.med << " (doses " << *d.med << ".."
              << d.statistics.size() << " effective)\n";
  else
    std::cout << "no MED identified\n";
}

int cmd_med(const std::string& input, const std::string& cv_path, double delta, double alpha,
            std::size_t replicates, std::optional<std::uint64_t> seed, bool with_hb,
            const CommonOpts& opts) {
  const isomed::DoseResponseData data = isomed::load_dose_response(input);
  isomed::CriticalValues cv;
  if (!cv_path.empty()) {
    cv = isomed::load_critical_values(cv_path);
  } else {
    if (!seed)
      throw isomed::ArgumentError("med: need --cv or an explicit --seed for inline calibration");
    isomed::CalibrationConfig cfg;
    cfg.alpha = alpha;
    cfg.delta = delta;
    cfg.sizes = data.sizes();
    cfg.nu = data.nu;
    cfg.replicates = replicates;
    cfg.seed = *seed;
    cv = isomed::calibrate(cfg, opts.threads);
  }
  isomed::check_design_match(data, cv, delta, alpha);
  const isomed::MedDecision su = isomed::step_up_identify_med(data, cv, delta);
  std::optional<isomed::MedDecision> hb;
  if (with_hb) hb = isomed::hsu_berger_med(data, delta, alpha);

  if (opts.format == "json") {
    isomed::json j{{"delta", delta}, {"alpha", alpha}, {"step_up", isomed::to_json(su)}};
    if (hb) j["hsu_berger"] = isomed::to_json(*hb);
    std::cout << j.dump(2) << "\n";
    return 0;
  }
  std::cout << "step-up procedure (delta = " << delta << ", alpha = " << alpha << ")\n";
  print_decision(su, opts);
  if (hb) {
    std::cout << "\nstep-down comparator\n";
    print_decision(*hb, opts);
  }
  return 0;
}

int cmd_simulate(const std::string& scenario_path, const std::string& study,
                 const std::string& cv_path, std::size_t cal_replicates, int bump_index,
                 const std::vector<double>& bumps, const std::string& out_path,
                 const CommonOpts& opts) {
  const isomed::ScenarioConfig sc = isomed::load_scenario(scenario_path);

  isomed::json report;
  if (study == "ordering") {
    const isomed::OrderingReport r =
        isomed::run_ordering_study(sc, bump_index, bumps, opts.threads);
    report = isomed::to_json(r);
    report["study"] = "ordering";
    if (opts.format != "json") {
      std::cout << "ordering study: bump index " << r.bump_index << ", "
                << r.replicates << " replicates\n"
                << "pathwise violations: " << r.pathwise_violations << "\n"
                << "dominance on grid:   " << (r.dominance_ok ? "ok" : "VIOLATED") << "\n";
    }
  } else {
    isomed::CriticalValues cv;
    if (!cv_path.empty()) {
      cv = isomed::load_critical_values(cv_path);
    } else {
      isomed::CalibrationConfig cfg;
      cfg.alpha = sc.alpha;
      cfg.delta = sc.delta;
      cfg.sizes = sc.sizes;
      cfg.nu = sc.nu();
      cfg.replicates = cal_replicates;
      cfg.seed = sc.seed;
      cv = isomed::calibrate(cfg, opts.threads);
    }
    const isomed::StudyResult r = study == "power"
                                      ? isomed::run_power_study(sc, cv, opts.threads)
                                      : isomed::run_error_study(sc, cv, opts.threads);
    report = isomed::to_json(r);
    report["study"] = study;
    report["seed"] = sc.seed;
    if (opts.format != "json") {
      std::cout << study << " study: " << r.replicates << " replicates, true MED = ";
      if (r.true_med > 0)
        std::cout << r.true_med << "\n";
      else
        std::cout << "none\n";
      std::vector<std::vector<std::string>> rates;
      rates.push_back({"method", "error_rate", "se", "correct_med_rate", "se"});
      std::vector<std::vector<std::string>> mass;
      std::vector<std::string> head{"method", "none"};
      for (int j = 1; j <= sc.k(); ++j) head.push_back(std::to_string(j));
      mass.push_back(head);
      auto add = [&](const char* name, const isomed::MethodStudyResult& m) {
        rates.push_back({name, fmt(m.error_rate.estimate, opts.digits),
                         fmt(m.error_rate.standard_error, opts.digits),
                         fmt(m.correct_med_rate.estimate, opts.digits),
                         fmt(m.correct_med_rate.standard_error, opts.digits)});
        std::vector<std::string> row{name};
        for (double v : m.med_mass) row.push_back(fmt(v, opts.digits));
        mass.push_back(row);
      };
      add("step_up", r.step_up);
      if (r.hsu_berger) add("hsu_berger", *r.hsu_berger);
      print_table(rates, std::cout);
      std::cout << "\nasserted MED distribution\n";
      print_table(mass, std::cout);
    }
  }
  if (!out_path.empty()) write_output(report, out_path);
  if (opts.format == "json") std::cout << report.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Order-restricted normal-means estimation and minimum effective dose testing"};
  app.require_subcommand(1);

  CommonOpts opts;

  // fit
  std::string fit_input, fit_method = "sdmmsa";
  auto* fit = app.add_subcommand("fit", "Isotonic fit of the treatment means");
  fit->add_option("--input", fit_input, "CSV file (summary or raw form)")->required();
  fit->add_option("--method", fit_method, "sdmmsa, pava or oracle")
      ->check(CLI::IsMember({"sdmmsa", "pava", "oracle"}));
  fit->add_option("--format", opts.format)->check(CLI::IsMember({"table", "json"}));
  fit->add_option("--digits", opts.digits)->check(CLI::Range(0, 17));

  // calibrate
  std::string cal_input, cal_out;
  std::vector<long> cal_sizes;
  double cal_alpha = 0.05, cal_delta = 0.0;
  std::size_t cal_replicates = 100000;
  std::uint64_t cal_seed = 0;
  auto* cal = app.add_subcommand("calibrate", "Monte Carlo critical values for the step-up test");
  cal->add_option("--input", cal_input, "CSV file supplying the design");
  cal->add_option("--sizes", cal_sizes, "group sizes n_0..n_k")->delimiter(',');
  cal->add_option("--alpha", cal_alpha);
  cal->add_option("--delta", cal_delta);
  cal->add_option("--replicates", cal_replicates);
  cal->add_option("--seed", cal_seed)->required();
  cal->add_option("--threads", opts.threads);
  cal->add_option("--out", cal_out, "write the critical values as JSON");
  cal->add_option("--format", opts.format)->check(CLI::IsMember({"table", "json"}));
  cal->add_option("--digits", opts.digits)->check(CLI::Range(0, 17));

  // med
  std::string med_input, med_cv, med_comparator;
  double med_delta = 0.0, med_alpha = 0.05;
  std::size_t med_replicates = 100000;
  std::optional<std::uint64_t> med_seed;
  auto* med = app.add_subcommand("med", "Identify the minimum effective dose");
  med->add_option("--input", med_input)->required();
  med->add_option("--cv", med_cv, "critical-values JSON from calibrate");
  med->add_option("--delta", med_delta);
  med->add_option("--alpha", med_alpha);
  med->add_option("--replicates", med_replicates, "replicates for inline calibration");
  med->add_option("--seed",
                  [&med_seed](const std::vector<std::string>& v) {
                    med_seed = std::stoull(v[0]);
                    return true;
                  },
                  "seed for inline calibration")
      ->expected(1);
  med->add_option("--comparator", med_comparator, "also run the named comparator (hb)")
      ->check(CLI::IsMember({"hb"}));
  med->add_option("--threads", opts.threads);
  med->add_option("--format", opts.format)->check(CLI::IsMember({"table", "json"}));
  med->add_option("--digits", opts.digits)->check(CLI::Range(0, 17));

  // simulate
  std::string sim_scenario, sim_study = "error", sim_cv, sim_out;
  std::size_t sim_cal_replicates = 100000;
  int sim_bump_index = 1;
  std::vector<double> sim_bumps{0.0, 0.001, 0.1, 1.0, 10.0};
  auto* sim = app.add_subcommand("simulate", "Monte Carlo error, power or ordering study");
  sim->add_option("--scenario", sim_scenario, "scenario JSON file")->required();
  sim->add_option("--study", sim_study)->check(CLI::IsMember({"error", "power", "ordering"}));
  sim->add_option("--cv", sim_cv, "critical-values JSON; omitted = inline calibration");
  sim->add_option("--cal-replicates", sim_cal_replicates, "replicates for inline calibration");
  sim->add_option("--bump-index", sim_bump_index, "dose shifted in the ordering study");
  sim->add_option("--bumps", sim_bumps, "nondecreasing shifts for the ordering study")
      ->delimiter(',');
  sim->add_option("--threads", opts.threads);
  sim->add_option("--out", sim_out, "write the report as JSON");
  sim->add_option("--format", opts.format)->check(CLI::IsMember({"table", "json"}));
  sim->add_option("--digits", opts.digits)->check(CLI::Range(0, 17));

  CLI11_PARSE(app, argc, argv);

  try {
    if (fit->parsed()) return cmd_fit(fit_input, fit_method, opts);
    if (cal->parsed())
      return cmd_calibrate(cal_input, cal_sizes, cal_alpha, cal_delta, cal_replicates, cal_seed,
                           cal_out, opts);
    if (med->parsed())
      return cmd_med(med_input, med_cv, med_delta, med_alpha, med_replicates, med_seed,
                     med_comparator == "hb", opts);
    if (sim->parsed())
      return cmd_simulate(sim_scenario, sim_study, sim_cv, sim_cal_replicates, sim_bump_index,
                          sim_bumps, sim_out, opts);
  } catch (const isomed::DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const isomed::DesignMismatchError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 5;
  } catch (const isomed::CalibrationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const isomed::CapacityError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const isomed::ArgumentError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
