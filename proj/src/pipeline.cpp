#include "ria/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <nlohmann/json.hpp>

#include "ria/csv.hpp"
#include "ria/dfa.hpp"
#include "ria/error.hpp"
#include "ria/events.hpp"
#include "ria/histogram.hpp"
#include "ria/powerlaw.hpp"
#include "ria/risk.hpp"
#include "ria/series.hpp"
#include "ria/synth.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace ria {

namespace {

// Round to the emitted precision so JSON and CSV agree digit for digit.
double round12(double v) {
  if (!std::isfinite(v)) return v;
  return std::stod(format_number(v));
}

void write_json(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path);
  out << j.dump(2) << "\n";
}

std::string threshold_tag(double q) {
  std::string s = format_number(q);
  for (char& ch : s)
    if (ch == '-') ch = 'm';
  for (char& ch : s)
    if (ch == '.') ch = 'p';
  return s;
}

struct Outputs {
  std::vector<std::string> files;
  std::string dir;

  std::string path(const std::string& name) {
    const std::string p = (fs::path(dir) / name).string();
    files.push_back(p);
    return p;
  }
};

void write_pdf_csv(Outputs& out, const std::string& name,
                   const EmpiricalPdf& pdf) {
  Table t;
  t.columns = {"x", "density", "count"};
  t.data.resize(3);
  for (std::size_t i = 0; i < pdf.bin_centers.size(); ++i) {
    t.data[0].push_back(pdf.bin_centers[i]);
    t.data[1].push_back(pdf.densities[i]);
    t.data[2].push_back(static_cast<double>(pdf.counts[i]));
  }
  write_table(out.path(name), t);
}

void write_intervals_csv(Outputs& out, const std::string& base, double q,
                         const RecurrenceIntervalSeries& intervals) {
  Table t;
  t.columns = {"interval"};
  t.data.resize(1);
  for (std::int64_t tau : intervals.intervals)
    t.data[0].push_back(static_cast<double>(tau));
  write_table(out.path(base + ".csv"), t);

  json meta;
  meta["schema_version"] = kSchemaVersion;
  meta["q"] = round12(q);
  meta["n_returns"] = intervals.n_returns;
  meta["n_events"] = intervals.n_events;
  meta["mean_interval"] = round12(intervals.mean_interval);
  write_json(out.path(base + ".meta.json"), meta);
}

void write_dfa_csv(Outputs& out, const std::string& base,
                   const DfaResult& dfa) {
  Table t;
  t.columns = {"l", "F"};
  t.data.resize(2);
  for (std::size_t i = 0; i < dfa.window_sizes.size(); ++i) {
    t.data[0].push_back(static_cast<double>(dfa.window_sizes[i]));
    t.data[1].push_back(dfa.fluctuations[i]);
  }
  write_table(out.path(base + ".csv"), t);

  Table s;
  s.columns = {"alpha", "alpha_se"};
  s.data = {{dfa.alpha}, {dfa.alpha_se}};
  write_table(out.path(base + "_alpha.csv"), s);
}

void write_surface_csv(Outputs& out, const std::string& name,
                       const LossSurface& surf) {
  std::ofstream f(out.path(name));
  if (!f) throw DataError("cannot write " + name);
  f << "q,tau0_scaled,p_star,kind,missing\n";
  const char* kind =
      surf.kind == LossSurface::Kind::empirical ? "empirical" : "theoretical";
  for (std::size_t iq = 0; iq < surf.q_grid.size(); ++iq)
    for (std::size_t it = 0; it < surf.tau0_grid.size(); ++it)
      f << format_number(surf.q_grid[iq]) << ","
        << format_number(surf.tau0_grid[it]) << ","
        << format_number(surf.at(iq, it)) << "," << kind << ","
        << (surf.is_missing(iq, it) ? 1 : 0) << "\n";
}

json fit_to_json(const PowerLawFit& fit) {
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

json gof_to_json(const GofReport& gof) {
  json j;
  j["ks"] = round12(gof.ks);
  j["p_ks"] = round12(gof.p_ks);
  j["ksw"] = round12(gof.ksw);
  j["p_ksw"] = round12(gof.p_ksw);
  j["w2"] = round12(gof.w2);
  j["cvm_reject_1pct"] = gof.cvm_reject_1pct;
  j["n_bootstrap"] = gof.n_bootstrap;
  return j;
}

std::vector<double> log_grid(double lo, double hi, std::size_t n) {
  std::vector<double> g(n);
  for (std::size_t i = 0; i < n; ++i)
    g[i] = lo * std::pow(hi / lo, static_cast<double>(i) /
                                      static_cast<double>(n - 1));
  return g;
}

std::vector<std::size_t> session_start_returns(const PriceSeries& prices,
                                               const ReturnSeries& returns) {
  std::vector<std::size_t> starts;
  for (std::size_t i = 1; i < returns.values.size(); ++i) {
    const std::size_t a = returns.alignment[i - 1];
    const std::size_t b = returns.alignment[i];
    if (prices.session_ids[a] != prices.session_ids[b]) starts.push_back(i);
  }
  return starts;
}

struct InstrumentContext {
  std::string name;
  NormalizedReturnSeries returns;
  std::vector<std::size_t> session_starts;
  std::map<double, RecurrenceIntervalSeries> intervals_by_q;
};

}  // namespace

void PipelineConfig::validate() const {
  if (inputs.empty()) throw ConfigError("no input files given");
  if (!seed_set) throw ConfigError("seed is mandatory for reproducibility");
  if (output_dir.empty()) throw ConfigError("output directory not set");
  if (n_bootstrap < 100) throw ConfigError("n_bootstrap must be >= 100");
  if (bins_per_decade < 1) throw ConfigError("bins_per_decade must be >= 1");
  if (delta_t < 0) throw ConfigError("delta_t must be >= 0");
  for (double q : thresholds)
    if (std::abs(q) < 1.0)
      throw ConfigError("threshold magnitude must be >= 1, got " +
                        format_number(q));
}

PipelineConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  PipelineConfig cfg;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    while (!line.empty() && std::isspace(static_cast<unsigned char>(line.back())))
      line.pop_back();
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(path + ":" + std::to_string(line_no) +
                        ": expected key=value");
    const std::string key = line.substr(0, eq);
    const std::string value = line.substr(eq + 1);
    try {
      if (key == "input") {
        cfg.inputs.push_back(value);
      } else if (key == "thresholds") {
        cfg.thresholds.clear();
        std::size_t pos = 0;
        while (pos < value.size()) {
          std::size_t next = value.find(',', pos);
          if (next == std::string::npos) next = value.size();
          cfg.thresholds.push_back(std::stod(value.substr(pos, next - pos)));
          pos = next + 1;
        }
      } else if (key == "n_bootstrap") {
        cfg.n_bootstrap = std::stoi(value);
      } else if (key == "seed") {
        cfg.seed = std::stoull(value);
        cfg.seed_set = true;
      } else if (key == "keep_overnight") {
        cfg.keep_overnight = value == "true" || value == "1";
      } else if (key == "reset_sessions") {
        cfg.reset_sessions = value == "true" || value == "1";
      } else if (key == "output_dir") {
        cfg.output_dir = value;
      } else if (key == "delta_t") {
        cfg.delta_t = std::stoll(value);
      } else if (key == "bins_per_decade") {
        cfg.bins_per_decade = std::stoi(value);
      } else {
        throw ConfigError(path + ":" + std::to_string(line_no) +
                          ": unknown key '" + key + "'");
      }
    } catch (const ConfigError&) {
      throw;
    } catch (...) {
      throw ConfigError(path + ":" + std::to_string(line_no) +
                        ": bad value for '" + key + "'");
    }
  }
  return cfg;
}

namespace {

void run_instrument(const PipelineConfig& cfg, const std::string& input,
                    Outputs& out, std::vector<StageFailure>& failures) {
  const std::string name = fs::path(input).stem().string();
  const auto fail = [&](const std::string& stage, const std::exception& e) {
    failures.push_back({name, stage, e.what()});
  };

  InstrumentContext ctx;
  ctx.name = name;
  try {
    const PriceSeries prices = read_price_csv(input);
    const ReturnSeries raw = compute_log_returns(prices, cfg.keep_overnight);
    ctx.returns = normalize_returns(raw);
    ctx.session_starts = session_start_returns(prices, raw);
  } catch (const std::exception& e) {
    fail("ingest", e);
    return;
  }

  // intervals + scaled/conditional PDFs per threshold
  for (double q : cfg.thresholds) {
    try {
      const RecurrenceIntervalSeries intervals =
          cfg.reset_sessions
              ? extract_intervals_sessioned(ctx.returns, ThresholdSpec{q},
                                            ctx.session_starts)
              : extract_intervals(ctx.returns, ThresholdSpec{q});
      ctx.intervals_by_q.emplace(q, intervals);
      const std::string tag = threshold_tag(q);
      write_intervals_csv(out, "intervals_q" + tag, q, intervals);
      write_pdf_csv(out, "pdf_q" + tag + ".csv",
                    scaled_pdf(intervals, cfg.bins_per_decade));
      if (intervals.intervals.size() >= 8) {
        const QuartilePartition part = partition_quartiles(intervals);
        for (int b = 0; b < 4; ++b) {
          try {
            write_pdf_csv(out,
                          "condpdf_q" + tag + "_bin" + std::to_string(b) + ".csv",
                          conditional_pdf(intervals, part, b, cfg.bins_per_decade));
          } catch (const DataError&) {
            // too few successor pairs in this quartile; skip the file
          }
        }
      }
    } catch (const std::exception& e) {
      fail("intervals(q=" + format_number(q) + ")", e);
    }
  }
  if (ctx.intervals_by_q.empty()) return;

  // aggregated power-law fit + goodness of fit
  PowerLawFit fit;
  bool have_fit = false;
  try {
    std::vector<RecurrenceIntervalSeries> sets;
    for (const auto& [q, iv] : ctx.intervals_by_q) sets.push_back(iv);
    const std::vector<double> x = aggregate_scaled_samples(sets);
    fit = fit_power_law(x);
    have_fit = true;
    std::vector<double> tail;
    for (double v : x)
      if (v >= fit.x_min) tail.push_back(v);
    const GofReport gof = bootstrap_gof(tail, fit, cfg.n_bootstrap, cfg.seed);
    json j;
    j["schema_version"] = kSchemaVersion;
    j["instrument"] = name;
    j["fit"] = fit_to_json(fit);
    j["gof"] = gof_to_json(gof);
    write_json(out.path("fit.json"), j);

    // one-row summary for easy concatenation across instruments
    std::ofstream row(out.path("fit_row.csv"));
    row << "code,x_min,delta,delta_se,c,ks,p_ks,p_ksw,w2\n"
        << name << "," << format_number(fit.x_min) << ","
        << format_number(fit.delta) << "," << format_number(fit.delta_se)
        << "," << format_number(fit.c) << "," << format_number(fit.ks) << ","
        << format_number(gof.p_ks) << "," << format_number(gof.p_ksw) << ","
        << format_number(gof.w2) << "\n";
  } catch (const std::exception& e) {
    fail("fit", e);
  }

  // DFA: masked negative-return series, intervals per q, shuffled surrogate
  try {
    const NormalizedReturnSeries masked = mask_positive_returns(ctx.returns);
    write_dfa_csv(out, "dfa_negative_returns", dfa_analyze(masked.values));
    const NormalizedReturnSeries shuffled =
        shuffle_surrogate(ctx.returns, cfg.seed);
    for (const auto& [q, intervals] : ctx.intervals_by_q) {
      const std::string tag = threshold_tag(q);
      std::vector<double> tau(intervals.intervals.begin(),
                              intervals.intervals.end());
      if (tau.size() >= 64)
        write_dfa_csv(out, "dfa_intervals_q" + tag, dfa_analyze(tau));
      try {
        const RecurrenceIntervalSeries shuffled_iv =
            extract_intervals(shuffled, ThresholdSpec{q});
        std::vector<double> stau(shuffled_iv.intervals.begin(),
                                 shuffled_iv.intervals.end());
        if (stau.size() >= 64)
          write_dfa_csv(out, "dfa_shuffled_q" + tag, dfa_analyze(stau));
      } catch (const DataError&) {
      }
    }
  } catch (const std::exception& e) {
    fail("dfa", e);
  }

  // hazard curves per threshold
  if (have_fit) {
    for (const auto& [q, intervals] : ctx.intervals_by_q) {
      try {
        const double max_tau = static_cast<double>(*std::max_element(
            intervals.intervals.begin(), intervals.intervals.end()));
        const std::vector<double> t_grid = log_grid(1.0, max_tau, 40);
        const HazardCurve emp =
            hazard_empirical(intervals, cfg.delta_t, t_grid);
        const HazardCurve theo = hazard_theoretical(
            fit, intervals.mean_interval, cfg.delta_t, emp.t_values);
        Table t;
        t.columns = {"t", "w_empirical", "w_theoretical", "valid"};
        t.data.resize(4);
        for (std::size_t i = 0; i < emp.t_values.size(); ++i) {
          t.data[0].push_back(emp.t_values[i]);
          t.data[1].push_back(emp.w_empirical[i]);
          t.data[2].push_back(theo.w_theoretical[i]);
          t.data[3].push_back(theo.valid[i]);
        }
        write_table(out.path("hazard_q" + threshold_tag(q) + ".csv"), t);
      } catch (const std::exception& e) {
        fail("hazard(q=" + format_number(q) + ")", e);
      }
    }
  }

  // return-tail fits, conditional-mean fit, loss surfaces
  try {
    const TailFit tail_neg = fit_return_tail(ctx.returns, TailSide::negative);
    json jt;
    jt["schema_version"] = kSchemaVersion;
    jt["negative"] = {{"beta", round12(tail_neg.beta)},
                      {"k", round12(tail_neg.k)},
                      {"cutoff", round12(tail_neg.cutoff)},
                      {"n_tail", tail_neg.n_tail},
                      {"n_total", tail_neg.n_total}};
    try {
      const TailFit tail_pos = fit_return_tail(ctx.returns, TailSide::positive);
      jt["positive"] = {{"beta", round12(tail_pos.beta)},
                        {"k", round12(tail_pos.k)},
                        {"cutoff", round12(tail_pos.cutoff)},
                        {"n_tail", tail_pos.n_tail},
                        {"n_total", tail_pos.n_total}};
    } catch (const DataError&) {
    }
    write_json(out.path("tail.json"), jt);

    // pooled scaled successor pairs over negative thresholds
    std::vector<std::pair<double, double>> scaled_pairs;
    for (const auto& [q, intervals] : ctx.intervals_by_q) {
      if (q >= 0.0) continue;
      for (const auto& pr : successor_pairs(intervals))
        scaled_pairs.emplace_back(
            static_cast<double>(pr.tau0) / intervals.mean_interval,
            static_cast<double>(pr.tau) / intervals.mean_interval);
    }
    const ConditionalMeanFit cmf =
        fit_conditional_mean_scaled(scaled_pairs, cfg.bins_per_decade);
    json jc;
    jc["schema_version"] = kSchemaVersion;
    jc["gamma"] = round12(cmf.gamma);
    jc["mu"] = round12(cmf.mu);
    jc["nu"] = round12(cmf.nu);
    jc["residual_rms"] = round12(cmf.residual_rms);
    jc["region_lo"] = round12(cmf.region_lo);
    jc["region_hi"] = round12(cmf.region_hi);
    write_json(out.path("condmean.json"), jc);

    std::vector<double> q_grid;
    for (double q : cfg.thresholds)
      if (q <= -2.0) q_grid.push_back(q);
    std::sort(q_grid.begin(), q_grid.end());
    if (!q_grid.empty()) {
      const std::vector<double> tau0_grid = log_grid(0.01, 100.0, 25);
      write_surface_csv(out, "loss_surface_theoretical.csv",
                        conditional_loss_surface(tail_neg, cmf, q_grid, tau0_grid));
      write_surface_csv(out, "loss_surface_empirical.csv",
                        empirical_loss_surface(ctx.returns, q_grid, tau0_grid));
    }
  } catch (const std::exception& e) {
    fail("risk", e);
  }
}

}  // namespace

std::vector<StageFailure> run_pipeline(const PipelineConfig& cfg) {
  cfg.validate();
  fs::create_directories(cfg.output_dir);

  std::vector<StageFailure> failures;
  std::vector<std::string> all_files;
  for (const std::string& input : cfg.inputs) {
    const std::string name = fs::path(input).stem().string();
    Outputs out;
    out.dir = (fs::path(cfg.output_dir) / name).string();
    fs::create_directories(out.dir);
    run_instrument(cfg, input, out, failures);
    all_files.insert(all_files.end(), out.files.begin(), out.files.end());
  }

  // manifest: config echo, seed, sorted per-file checksums, failures
  json manifest;
  manifest["schema_version"] = kSchemaVersion;
  manifest["config"] = {{"inputs", cfg.inputs},
                        {"thresholds", cfg.thresholds},
                        {"n_bootstrap", cfg.n_bootstrap},
                        {"seed", cfg.seed},
                        {"keep_overnight", cfg.keep_overnight},
                        {"reset_sessions", cfg.reset_sessions},
                        {"output_dir", cfg.output_dir},
                        {"delta_t", cfg.delta_t},
                        {"bins_per_decade", cfg.bins_per_decade}};
  std::sort(all_files.begin(), all_files.end());
  json files = json::array();
  for (const std::string& f : all_files)
    files.push_back(
        {{"path", fs::path(f).lexically_relative(cfg.output_dir).generic_string()},
         {"fnv1a64", file_checksum(f)}});
  manifest["files"] = files;
  json jfail = json::array();
  for (const auto& f : failures)
    jfail.push_back({{"instrument", f.instrument},
                     {"stage", f.stage},
                     {"message", f.message}});
  manifest["failures"] = jfail;
  write_json((fs::path(cfg.output_dir) / "manifest.json").string(), manifest);
  return failures;
}

}  // namespace ria
