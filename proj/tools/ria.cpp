#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "ria/csv.hpp"
#include "ria/dfa.hpp"
#include "ria/error.hpp"
#include "ria/events.hpp"
#include "ria/histogram.hpp"
#include "ria/pipeline.hpp"
#include "ria/powerlaw.hpp"
#include "ria/risk.hpp"
#include "ria/series.hpp"
#include "ria/synth.hpp"

using json = nlohmann::ordered_json;

namespace {

double round12(double v) {
  return std::isfinite(v) ? std::stod(ria::format_number(v)) : v;
}

void write_json(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw ria::DataError("cannot write " + path);
  out << j.dump(2) << "\n";
}

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ria::DataError("cannot open " + path);
  json j;
  in >> j;
  return j;
}

ria::RecurrenceIntervalSeries load_intervals(const std::string& csv_path) {
  const ria::Table t = ria::read_table(csv_path, {"interval"});
  std::string meta_path = csv_path;
  const auto pos = meta_path.rfind(".csv");
  if (pos != std::string::npos) meta_path.replace(pos, 4, ".meta.json");
  const json meta = read_json(meta_path);

  ria::RecurrenceIntervalSeries iv;
  for (double v : t.data[0]) iv.intervals.push_back(static_cast<std::int64_t>(v));
  iv.n_returns = meta.at("n_returns").get<std::size_t>();
  iv.n_events = meta.at("n_events").get<std::size_t>();
  iv.mean_interval = meta.at("mean_interval").get<double>();
  return iv;
}

void save_intervals(const std::string& base, double q,
                    const ria::RecurrenceIntervalSeries& iv) {
  ria::Table t;
  t.columns = {"interval"};
  t.data.resize(1);
  for (std::int64_t tau : iv.intervals)
    t.data[0].push_back(static_cast<double>(tau));
  ria::write_table(base + ".csv", t);
  json meta;
  meta["schema_version"] = ria::kSchemaVersion;
  meta["q"] = round12(q);
  meta["n_returns"] = iv.n_returns;
  meta["n_events"] = iv.n_events;
  meta["mean_interval"] = round12(iv.mean_interval);
  write_json(base + ".meta.json", meta);
}

void save_pdf(const std::string& path, const ria::EmpiricalPdf& pdf) {
  ria::Table t;
  t.columns = {"x", "density", "count"};
  t.data.resize(3);
  for (std::size_t i = 0; i < pdf.bin_centers.size(); ++i) {
    t.data[0].push_back(pdf.bin_centers[i]);
    t.data[1].push_back(pdf.densities[i]);
    t.data[2].push_back(static_cast<double>(pdf.counts[i]));
  }
  ria::write_table(path, t);
}

void save_dfa(const std::string& base, const ria::DfaResult& dfa) {
  ria::Table t;
  t.columns = {"l", "F"};
  t.data.resize(2);
  for (std::size_t i = 0; i < dfa.window_sizes.size(); ++i) {
    t.data[0].push_back(static_cast<double>(dfa.window_sizes[i]));
    t.data[1].push_back(dfa.fluctuations[i]);
  }
  ria::write_table(base + ".csv", t);
  ria::Table s;
  s.columns = {"alpha", "alpha_se"};
  s.data = {{dfa.alpha}, {dfa.alpha_se}};
  ria::write_table(base + "_alpha.csv", s);
}

json fit_to_json(const ria::PowerLawFit& fit) {
  json j;
  j["x_min"] = round12(fit.x_min);
  j["delta"] = round12(fit.delta);
  j["delta_se"] = round12(fit.delta_se);
  j["c"] = round12(fit.c);
  j["ks"] = round12(fit.ks);
  j["n_tail"] = fit.n_tail;
  j["n_total"] = fit.n_total;
  return j;
}

ria::PowerLawFit fit_from_json(const json& j) {
  ria::PowerLawFit fit;
  fit.x_min = j.at("x_min").get<double>();
  fit.delta = j.at("delta").get<double>();
  fit.delta_se = j.at("delta_se").get<double>();
  fit.c = j.at("c").get<double>();
  fit.ks = j.at("ks").get<double>();
  fit.n_tail = j.at("n_tail").get<std::size_t>();
  fit.n_total = j.at("n_total").get<std::size_t>();
  return fit;
}

std::vector<double> gather_samples(const std::string& samples_path,
                                   const std::vector<std::string>& interval_csvs) {
  if (!samples_path.empty()) {
    const ria::Table t = ria::read_table(samples_path, {"x"});
    return t.data[0];
  }
  std::vector<ria::RecurrenceIntervalSeries> sets;
  for (const auto& p : interval_csvs) sets.push_back(load_intervals(p));
  return ria::aggregate_scaled_samples(sets);
}

ria::NormalizedReturnSeries load_returns(const std::string& prices_csv,
                                         bool keep_overnight) {
  const ria::PriceSeries prices = ria::read_price_csv(prices_csv);
  return ria::normalize_returns(ria::compute_log_returns(prices, keep_overnight));
}

std::vector<double> log_grid(double lo, double hi, std::size_t n) {
  std::vector<double> g(n);
  for (std::size_t i = 0; i < n; ++i)
    g[i] = lo * std::pow(hi / lo, static_cast<double>(i) /
                                      static_cast<double>(n - 1));
  return g;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Recurrence-interval analysis of threshold exceedances"};
  app.require_subcommand(1);

  // run
  auto* run = app.add_subcommand("run", "Run the full pipeline");
  std::string config_path;
  ria::PipelineConfig cfg;
  std::uint64_t seed_override = 0;
  run->add_option("--config", config_path, "key=value config file");
  run->add_option("--input", cfg.inputs, "price CSV (repeatable)");
  run->add_option("--output-dir", cfg.output_dir, "output directory");
  std::vector<double> thresholds_override;
  run->add_option("--thresholds", thresholds_override, "threshold list");
  int nboot_override = -1;
  run->add_option("--n-bootstrap", nboot_override, "bootstrap replicas");
  run->add_option("--seed", seed_override, "RNG seed (mandatory)");
  bool keep_overnight = false, reset_sessions = false;
  run->add_flag("--keep-overnight", keep_overnight,
                "keep returns spanning session boundaries");
  run->add_flag("--reset-sessions", reset_sessions,
                "restart interval counting at session starts");
  std::int64_t delta_t_override = -1;
  run->add_option("--delta-t", delta_t_override, "hazard window (minutes)");
  int bpd_override = -1;
  run->add_option("--bins-per-decade", bpd_override, "log-bin resolution");

  // intervals
  auto* sc_iv = app.add_subcommand("intervals", "Extract recurrence intervals");
  std::string iv_input, iv_out;
  double iv_q = 0.0;
  bool iv_keep = false, iv_reset = false;
  sc_iv->add_option("--input", iv_input, "price CSV")->required();
  sc_iv->add_option("--q", iv_q, "threshold")->required();
  sc_iv->add_option("--out", iv_out, "output base path")->required();
  sc_iv->add_flag("--keep-overnight", iv_keep, "");
  sc_iv->add_flag("--reset-sessions", iv_reset, "");

  // pdf
  auto* sc_pdf = app.add_subcommand("pdf", "Scaled interval PDF");
  std::string pdf_in, pdf_out;
  int pdf_bpd = 10;
  int pdf_cond = -1;
  sc_pdf->add_option("--intervals", pdf_in, "intervals CSV")->required();
  sc_pdf->add_option("--out", pdf_out, "output CSV")->required();
  sc_pdf->add_option("--bins-per-decade", pdf_bpd, "");
  sc_pdf->add_option("--quartile-bin", pdf_cond,
                     "conditional PDF for this preceding-interval quartile");

  // fit
  auto* sc_fit = app.add_subcommand("fit", "Power-law tail fit");
  std::string fit_samples, fit_out;
  std::vector<std::string> fit_intervals;
  sc_fit->add_option("--samples", fit_samples, "samples CSV (column x)");
  sc_fit->add_option("--intervals", fit_intervals, "intervals CSVs");
  sc_fit->add_option("--out", fit_out, "output JSON")->required();

  // gof
  auto* sc_gof = app.add_subcommand("gof", "Bootstrap goodness of fit");
  std::string gof_samples, gof_fit, gof_out;
  std::vector<std::string> gof_intervals;
  int gof_nboot = 1000;
  std::uint64_t gof_seed = 0;
  bool gof_seed_set = false;
  sc_gof->add_option("--samples", gof_samples, "samples CSV (column x)");
  sc_gof->add_option("--intervals", gof_intervals, "intervals CSVs");
  sc_gof->add_option("--fit", gof_fit, "fit JSON")->required();
  sc_gof->add_option("--n-bootstrap", gof_nboot, "");
  sc_gof->add_option("--seed", gof_seed, "")->each([&](const std::string&) {
    gof_seed_set = true;
  });
  sc_gof->add_option("--out", gof_out, "output JSON")->required();

  // dfa
  auto* sc_dfa = app.add_subcommand("dfa", "Detrended fluctuation analysis");
  std::string dfa_in, dfa_col = "value", dfa_out;
  sc_dfa->add_option("--series", dfa_in, "CSV with the series")->required();
  sc_dfa->add_option("--column", dfa_col, "column name (default: value)");
  sc_dfa->add_option("--out", dfa_out, "output base path")->required();

  // hazard
  auto* sc_hz = app.add_subcommand("hazard", "Hazard probability W(dt|t)");
  std::string hz_intervals, hz_fit, hz_out;
  std::int64_t hz_dt = 10;
  sc_hz->add_option("--intervals", hz_intervals, "intervals CSV")->required();
  sc_hz->add_option("--fit", hz_fit, "fit JSON for the theoretical curve");
  sc_hz->add_option("--delta-t", hz_dt, "");
  sc_hz->add_option("--out", hz_out, "output CSV")->required();

  // risk
  auto* sc_rk = app.add_subcommand("risk", "Tail fit, conditional mean, loss surfaces");
  std::string rk_input, rk_outdir;
  std::vector<double> rk_thresholds = {-5, -4, -3, -2};
  bool rk_keep = false;
  int rk_bpd = 10;
  sc_rk->add_option("--input", rk_input, "price CSV")->required();
  sc_rk->add_option("--thresholds", rk_thresholds, "negative thresholds");
  sc_rk->add_option("--out-dir", rk_outdir, "output directory")->required();
  sc_rk->add_flag("--keep-overnight", rk_keep, "");
  sc_rk->add_option("--bins-per-decade", rk_bpd, "");

  // synth
  auto* sc_sy = app.add_subcommand("synth", "Synthetic series generators");
  std::string sy_kind, sy_out;
  std::size_t sy_n = 0;
  std::uint64_t sy_seed = 0;
  double sy_delta = 2.5, sy_xmin = 1.0, sy_alpha = 0.8, sy_beta = 3.0;
  sc_sy->add_option("--kind", sy_kind, "powerlaw | corr-gauss | student")
      ->required();
  sc_sy->add_option("--n", sy_n, "")->required();
  sc_sy->add_option("--seed", sy_seed, "")->required();
  sc_sy->add_option("--delta", sy_delta, "power-law exponent");
  sc_sy->add_option("--xmin", sy_xmin, "power-law lower bound");
  sc_sy->add_option("--alpha", sy_alpha, "DFA target exponent");
  sc_sy->add_option("--beta", sy_beta, "Student tail exponent");
  sc_sy->add_option("--out", sy_out, "output CSV")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      ria::PipelineConfig base =
          config_path.empty() ? ria::PipelineConfig{} : ria::parse_config_file(config_path);
      // flags win over the config file
      if (!cfg.inputs.empty()) base.inputs = cfg.inputs;
      if (!cfg.output_dir.empty()) base.output_dir = cfg.output_dir;
      if (!thresholds_override.empty()) base.thresholds = thresholds_override;
      if (nboot_override >= 0) base.n_bootstrap = nboot_override;
      if (run->count("--seed") > 0) {
        base.seed = seed_override;
        base.seed_set = true;
      }
      if (keep_overnight) base.keep_overnight = true;
      if (reset_sessions) base.reset_sessions = true;
      if (delta_t_override >= 0) base.delta_t = delta_t_override;
      if (bpd_override > 0) base.bins_per_decade = bpd_override;

      const auto failures = ria::run_pipeline(base);
      for (const auto& f : failures)
        std::cerr << "stage '" << f.stage << "' failed for instrument '"
                  << f.instrument << "': " << f.message << "\n";
      return failures.empty() ? 0 : 3;
    }

    if (sc_iv->parsed()) {
      const auto returns = load_returns(iv_input, iv_keep);
      ria::RecurrenceIntervalSeries iv;
      if (iv_reset) {
        const ria::PriceSeries prices = ria::read_price_csv(iv_input);
        const ria::ReturnSeries raw = ria::compute_log_returns(prices, iv_keep);
        std::vector<std::size_t> starts;
        for (std::size_t i = 1; i < raw.values.size(); ++i)
          if (prices.session_ids[raw.alignment[i - 1]] !=
              prices.session_ids[raw.alignment[i]])
            starts.push_back(i);
        iv = ria::extract_intervals_sessioned(returns, ria::ThresholdSpec{iv_q},
                                              starts);
      } else {
        iv = ria::extract_intervals(returns, ria::ThresholdSpec{iv_q});
      }
      save_intervals(iv_out, iv_q, iv);
      return 0;
    }

    if (sc_pdf->parsed()) {
      const auto iv = load_intervals(pdf_in);
      if (pdf_cond >= 0) {
        const auto part = ria::partition_quartiles(iv);
        save_pdf(pdf_out, ria::conditional_pdf(iv, part, pdf_cond, pdf_bpd));
      } else {
        save_pdf(pdf_out, ria::scaled_pdf(iv, pdf_bpd));
      }
      return 0;
    }

    if (sc_fit->parsed()) {
      if (fit_samples.empty() && fit_intervals.empty())
        throw ria::ConfigError("fit: need --samples or --intervals");
      const auto x = gather_samples(fit_samples, fit_intervals);
      const ria::PowerLawFit fit = ria::fit_power_law(x);
      json j;
      j["schema_version"] = ria::kSchemaVersion;
      j["fit"] = fit_to_json(fit);
      write_json(fit_out, j);
      return 0;
    }

    if (sc_gof->parsed()) {
      if (!gof_seed_set) throw ria::ConfigError("gof: --seed is mandatory");
      if (gof_samples.empty() && gof_intervals.empty())
        throw ria::ConfigError("gof: need --samples or --intervals");
      const auto x = gather_samples(gof_samples, gof_intervals);
      const json jf = read_json(gof_fit);
      const ria::PowerLawFit fit =
          fit_from_json(jf.contains("fit") ? jf.at("fit") : jf);
      std::vector<double> tail;
      for (double v : x)
        if (v >= fit.x_min) tail.push_back(v);
      const ria::GofReport gof =
          ria::bootstrap_gof(tail, fit, gof_nboot, gof_seed);
      json j;
      j["schema_version"] = ria::kSchemaVersion;
      j["ks"] = round12(gof.ks);
      j["p_ks"] = round12(gof.p_ks);
      j["ksw"] = round12(gof.ksw);
      j["p_ksw"] = round12(gof.p_ksw);
      j["w2"] = round12(gof.w2);
      j["cvm_reject_1pct"] = gof.cvm_reject_1pct;
      j["n_bootstrap"] = gof.n_bootstrap;
      write_json(gof_out, j);
      return 0;
    }

    if (sc_dfa->parsed()) {
      const ria::Table t = ria::read_table(dfa_in, {dfa_col});
      save_dfa(dfa_out, ria::dfa_analyze(t.data[0]));
      return 0;
    }

    if (sc_hz->parsed()) {
      const auto iv = load_intervals(hz_intervals);
      const double max_tau = static_cast<double>(
          *std::max_element(iv.intervals.begin(), iv.intervals.end()));
      const auto t_grid = log_grid(1.0, max_tau, 40);
      const ria::HazardCurve emp = ria::hazard_empirical(iv, hz_dt, t_grid);
      ria::Table t;
      if (!hz_fit.empty()) {
        const json jf = read_json(hz_fit);
        const ria::PowerLawFit fit =
            fit_from_json(jf.contains("fit") ? jf.at("fit") : jf);
        const ria::HazardCurve theo = ria::hazard_theoretical(
            fit, iv.mean_interval, hz_dt, emp.t_values);
        t.columns = {"t", "w_empirical", "w_theoretical", "valid"};
        t.data.resize(4);
        for (std::size_t i = 0; i < emp.t_values.size(); ++i) {
          t.data[0].push_back(emp.t_values[i]);
          t.data[1].push_back(emp.w_empirical[i]);
          t.data[2].push_back(theo.w_theoretical[i]);
          t.data[3].push_back(theo.valid[i]);
        }
      } else {
        t.columns = {"t", "w_empirical"};
        t.data.resize(2);
        t.data[0] = emp.t_values;
        t.data[1] = emp.w_empirical;
      }
      ria::write_table(hz_out, t);
      return 0;
    }

    if (sc_rk->parsed()) {
      namespace fs = std::filesystem;
      fs::create_directories(rk_outdir);
      const auto returns = load_returns(rk_input, rk_keep);
      const ria::TailFit tail = ria::fit_return_tail(returns, ria::TailSide::negative);
      json jt;
      jt["schema_version"] = ria::kSchemaVersion;
      jt["negative"] = {{"beta", round12(tail.beta)},
                        {"k", round12(tail.k)},
                        {"cutoff", round12(tail.cutoff)},
                        {"n_tail", tail.n_tail},
                        {"n_total", tail.n_total}};
      write_json((fs::path(rk_outdir) / "tail.json").string(), jt);

      std::vector<std::pair<double, double>> scaled_pairs;
      for (double q : rk_thresholds) {
        const auto iv = ria::extract_intervals(returns, ria::ThresholdSpec{q});
        for (const auto& pr : ria::successor_pairs(iv))
          scaled_pairs.emplace_back(
              static_cast<double>(pr.tau0) / iv.mean_interval,
              static_cast<double>(pr.tau) / iv.mean_interval);
      }
      const ria::ConditionalMeanFit cmf =
          ria::fit_conditional_mean_scaled(scaled_pairs, rk_bpd);
      json jc;
      jc["schema_version"] = ria::kSchemaVersion;
      jc["gamma"] = round12(cmf.gamma);
      jc["mu"] = round12(cmf.mu);
      jc["nu"] = round12(cmf.nu);
      jc["residual_rms"] = round12(cmf.residual_rms);
      write_json((fs::path(rk_outdir) / "condmean.json").string(), jc);

      std::vector<double> q_grid;
      for (double q : rk_thresholds)
        if (q <= -2.0) q_grid.push_back(q);
      std::sort(q_grid.begin(), q_grid.end());
      const auto tau0_grid = log_grid(0.01, 100.0, 25);
      const auto write_surface = [&](const std::string& name,
                                     const ria::LossSurface& surf) {
        std::ofstream f((fs::path(rk_outdir) / name).string());
        f << "q,tau0_scaled,p_star,kind,missing\n";
        const char* kind = surf.kind == ria::LossSurface::Kind::empirical
                               ? "empirical"
                               : "theoretical";
        for (std::size_t iq = 0; iq < surf.q_grid.size(); ++iq)
          for (std::size_t it = 0; it < surf.tau0_grid.size(); ++it)
            f << ria::format_number(surf.q_grid[iq]) << ","
              << ria::format_number(surf.tau0_grid[it]) << ","
              << ria::format_number(surf.at(iq, it)) << "," << kind << ","
              << (surf.is_missing(iq, it) ? 1 : 0) << "\n";
      };
      write_surface("loss_surface_theoretical.csv",
                    ria::conditional_loss_surface(tail, cmf, q_grid, tau0_grid));
      write_surface("loss_surface_empirical.csv",
                    ria::empirical_loss_surface(returns, q_grid, tau0_grid));
      return 0;
    }

    if (sc_sy->parsed()) {
      ria::Table t;
      if (sy_kind == "powerlaw") {
        ria::PowerLawFit fit;
        fit.x_min = sy_xmin;
        fit.delta = sy_delta;
        t.columns = {"x"};
        t.data = {ria::sample_power_law(fit, sy_n, sy_seed)};
      } else if (sy_kind == "corr-gauss") {
        t.columns = {"value"};
        t.data = {ria::synth_correlated_gaussian(sy_n, sy_alpha, sy_seed).values};
      } else if (sy_kind == "student") {
        t.columns = {"r"};
        t.data = {ria::synth_student_returns(sy_n, sy_beta, sy_seed).values};
      } else {
        throw ria::ConfigError("unknown synth kind '" + sy_kind + "'");
      }
      ria::write_table(sy_out, t);
      return 0;
    }
  } catch (const ria::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const ria::DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 3;
  } catch (const ria::NumericError& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
