/**
 * Copyright 2026 The heraldswap Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <exception>
#include <functional>
#include <iomanip>
#include <limits>
#include <locale>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "heraldswap/distill.hpp"
#include "heraldswap/errors.hpp"
#include "heraldswap/herald.hpp"
#include "heraldswap/link_params.hpp"
#include "heraldswap/metrics.hpp"
#include "heraldswap/optimize.hpp"
#include "heraldswap/verify.hpp"

namespace heraldswap::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

using Json = nlohmann::ordered_json;

/// 12 significant digits, '.' decimal separator.
inline std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::ostringstream os;
  os.imbue(std::locale::classic());
  os << std::setprecision(12) << v;
  return os.str();
}

/// JSON number rounded to 12 significant digits; null when not finite.
inline Json json_number(double v) {
  if (!std::isfinite(v)) return nullptr;
  return std::stod(format_number(v));
}

/// Rows of named cells, written as CSV or as a JSON array of objects.
class Table {
 public:
  explicit Table(std::vector<std::string> columns) : columns_(std::move(columns)) {}

  void add_row(std::vector<Json> cells) {
    if (cells.size() != columns_.size()) throw std::logic_error("row width does not match header");
    rows_.push_back(std::move(cells));
  }

  void write(std::ostream& out, const std::string& format) const {
    if (format == "json") {
      Json arr = Json::array();
      for (const auto& r : rows_) {
        Json obj = Json::object();
        for (std::size_t i = 0; i < columns_.size(); ++i) obj[columns_[i]] = r[i].is_number() ? json_number(r[i].get<double>()) : r[i];
        arr.push_back(obj);
      }
      out << arr.dump(2) << '\n';
      return;
    }
    for (std::size_t i = 0; i < columns_.size(); ++i) out << (i ? "," : "") << columns_[i];
    out << '\n';
    for (const auto& r : rows_) {
      for (std::size_t i = 0; i < r.size(); ++i) {
        out << (i ? "," : "");
        if (r[i].is_number())
          out << format_number(r[i].get<double>());
        else if (r[i].is_null())
          out << "nan";
        else
          out << r[i].get<std::string>();
      }
      out << '\n';
    }
  }

 private:
  std::vector<std::string> columns_;
  std::vector<std::vector<Json>> rows_;
};

/// Evaluates f(0..n-1) on up to `jobs` threads; results keep index order.
template <class T>
std::vector<T> parallel_map(std::size_t n, int jobs, const std::function<T(std::size_t)>& f) {
  std::vector<T> out(n);
  const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(static_cast<std::size_t>(jobs), n));
  std::vector<std::exception_ptr> errors(workers);
  auto run = [&](std::size_t w) {
    try {
      for (std::size_t i = w; i < n; i += workers) out[i] = f(i);
    } catch (...) {
      errors[w] = std::current_exception();
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(run, w);
  run(0);
  for (auto& t : pool) t.join();
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

// ---------------------------------------------------------------------------
// Shared link flags.

struct LinkFlags {
  std::string encoding = "single";
  std::optional<double> eta, eta_db, eta_half_db, eta_a, eta_b, gamma, target_fidelity;
  double eta_d = 1.0, pd = 0.0, vis = 1.0, eps = 0.0;
  bool gamma_opt = false;
  int parity = 0;
  std::string format;
  std::string config;  // consumed by detail::expand_config before parsing
  CLI::Option* encoding_opt = nullptr;

  bool optimizing() const { return gamma_opt || target_fidelity.has_value(); }

  GammaPolicy policy() const {
    return target_fidelity ? GammaPolicy::target(*target_fidelity) : GammaPolicy::maximize_rate();
  }

  /// Gamma choice for range scans.
  GammaChoice gamma_choice() const {
    if (gamma) return GammaChoice::Given;
    if (gamma_opt) return GammaChoice::MaximizeMetric;
    return GammaChoice::Auto;
  }

  LinkParams params() const {
    LinkParams p;
    p.encoding = parse_encoding(encoding);
    double total = 1.0;
    if (eta) total = *eta;
    if (eta_db) total = db_to_eta(*eta_db);
    if (eta_half_db) total = db_to_eta(2.0 * *eta_half_db);
    if (!(total >= 0.0 && total <= 1.0)) throw ParameterError("total transmissivity outside [0,1]");
    p = p.with_total_eta(total);
    if (eta_a) p.eta_a = *eta_a;
    if (eta_b) p.eta_b = *eta_b;
    p.eta_d = eta_d;
    p.p_d = pd;
    p.vis = vis;
    p.eps = eps;
    p = p.with_gamma(gamma.value_or(0.5));
    p.parity = parity;
    p.validate();
    return p;
  }
};

inline void add_link_flags(CLI::App* app, LinkFlags& f, const std::string& default_format) {
  f.format = default_format;
  app->add_option("--config", f.config, "Flat key=value file mirroring these flags; flags override it");
  f.encoding_opt = app->add_option("--encoding", f.encoding, "single or dual")->check(CLI::IsMember({"single", "dual"}));
  auto* eta = app->add_option("--eta", f.eta, "Total transmissivity (linear)");
  auto* eta_db = app->add_option("--eta-db", f.eta_db, "Total loss in dB");
  auto* eta_half = app->add_option("--eta-half-db", f.eta_half_db, "Half-channel loss in dB");
  eta->excludes(eta_db)->excludes(eta_half);
  eta_db->excludes(eta_half);
  app->add_option("--eta-a", f.eta_a, "Half-channel transmissivity, side A (overrides)");
  app->add_option("--eta-b", f.eta_b, "Half-channel transmissivity, side B (overrides)");
  app->add_option("--eta-d", f.eta_d, "Detector efficiency");
  app->add_option("--pd", f.pd, "Excess-noise probability per detector per slot");
  app->add_option("--vis", f.vis, "Mode overlap |V|");
  app->add_option("--eps", f.eps, "Carrier-phase variance per side");
  auto* gamma = app->add_option("--gamma", f.gamma, "Emitter weight, both sides (single rail)");
  auto* gopt = app->add_flag("--gamma-opt", f.gamma_opt, "Optimize gamma for rate");
  auto* tf = app->add_option("--target-fidelity", f.target_fidelity, "Optimize gamma subject to F >= target");
  gamma->excludes(gopt)->excludes(tf);
  gopt->excludes(tf);
  app->add_option("--parity", f.parity, "Heralded parity m")->check(CLI::IsMember({0, 1}));
  app->add_option("--format", f.format, "Output format")->check(CLI::IsMember({"text", "csv", "json"}));
}

inline double half_db(double total_eta) { return eta_to_db(total_eta) / 2.0; }

struct Evaluated {
  double gamma = 0.5;
  LinkMetrics metrics;
  bool feasible = true;
  std::string note;
};

/// Link metrics with gamma fixed or optimized per the flags.
inline Evaluated evaluate_point(const LinkParams& p, const LinkFlags& f, bool optimize) {
  Evaluated e;
  try {
    if (optimize && p.encoding == Encoding::SingleRail) {
      const auto o = optimize_gamma(p, f.policy());
      e.gamma = o.gamma;
      e.metrics = o.metrics;
    } else {
      e.gamma = p.encoding == Encoding::DualRail ? 0.5 : p.gamma_a;
      e.metrics = evaluate(p);
    }
  } catch (const Infeasible& ex) {
    e.feasible = false;
    e.note = ex.what();
  } catch (const NoHerald& ex) {
    e.feasible = false;
    e.note = ex.what();
  }
  return e;
}

// ---------------------------------------------------------------------------
// herald

inline int cmd_herald(const LinkFlags& f, std::ostream& out, std::ostream& err) {
  LinkParams p = f.params();
  const Evaluated e = evaluate_point(p, f, f.optimizing());
  if (!e.feasible) {
    err << "herald: " << e.note << '\n';
    return kExitFailure;
  }
  p = p.with_gamma(e.gamma);
  const HeraldOutcome h = herald(p);
  const Matrix4& rho = h.state.matrix();
  const double teta = p.total_eta();
  const LinkMetrics& m = e.metrics;

  if (f.format == "json") {
    Json j;
    j["encoding"] = to_string(p.encoding);
    j["eta_total_db"] = json_number(eta_to_db(teta));
    j["eta_half_db"] = json_number(half_db(teta));
    j["gamma"] = json_number(e.gamma);
    j["parity"] = p.parity;
    j["p_succ"] = json_number(m.p_succ);
    j["fidelity"] = json_number(m.fidelity);
    j["hashing"] = json_number(m.hashing);
    j["rate"] = json_number(m.rate);
    j["d2"] = json_number(m.d2_bound);
    Json re = Json::array(), im = Json::array();
    for (int r = 0; r < 4; ++r) {
      Json rr = Json::array(), ii = Json::array();
      for (int c = 0; c < 4; ++c) {
        rr.push_back(json_number(rho(r, c).real()));
        ii.push_back(json_number(rho(r, c).imag()));
      }
      re.push_back(rr);
      im.push_back(ii);
    }
    j["rho_re"] = re;
    j["rho_im"] = im;
    out << j.dump(2) << '\n';
    return kExitOk;
  }
  if (f.format == "csv") {
    std::vector<std::string> cols{"encoding", "eta_total_db", "eta_half_db", "gamma", "parity", "p_succ",
                                  "fidelity", "hashing",      "rate",        "d2"};
    std::vector<Json> row{to_string(p.encoding), eta_to_db(teta), half_db(teta), e.gamma, double(p.parity),
                          m.p_succ, m.fidelity, m.hashing, m.rate, m.d2_bound};
    for (const char* part : {"re", "im"})
      for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) {
          cols.push_back(std::string("rho_") + part + "_" + std::to_string(r) + std::to_string(c));
          row.push_back(part[0] == 'r' ? rho(r, c).real() : rho(r, c).imag());
        }
    Table t(cols);
    t.add_row(row);
    t.write(out, "csv");
    return kExitOk;
  }
  out << "encoding      " << to_string(p.encoding) << '\n'
      << "eta_total_db  " << format_number(eta_to_db(teta)) << '\n'
      << "eta_half_db   " << format_number(half_db(teta)) << '\n'
      << "gamma         " << format_number(e.gamma) << '\n'
      << "parity        " << p.parity << '\n'
      << "p_succ        " << format_number(m.p_succ) << '\n'
      << "fidelity      " << format_number(m.fidelity) << '\n'
      << "hashing       " << format_number(m.hashing) << '\n'
      << "rate          " << format_number(m.rate) << '\n'
      << "d2            " << format_number(m.d2_bound) << '\n'
      << "rho (basis |1,1>, |1,0>, |0,1>, |0,0>; re, im)\n";
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c)
      out << (c ? "  " : "") << format_number(rho(r, c).real()) << (rho(r, c).imag() < 0 ? "-" : "+")
          << format_number(std::abs(rho(r, c).imag())) << "i";
    out << '\n';
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// sweep

struct SweepFlags {
  std::string axis = "total_eta_db";
  double start = 0.0, stop = 60.0;
  int points = 61;
  std::string scale = "linear";
  std::vector<std::string> outputs{"p_succ", "fidelity", "hashing", "rate", "d2"};
  int jobs = 1;
};

inline std::vector<double> sweep_values(const SweepFlags& s) {
  if (s.points < 1) throw ParameterError("a sweep needs at least 1 point");
  if (s.scale == "log") {
    if (!(s.start > 0.0 && s.stop > 0.0)) throw ParameterError("log scale needs positive bounds");
    return numerics::logspace(s.start, s.stop, s.points);
  }
  if (s.scale == "db" && s.axis != "total_eta_db" && s.axis != "half_eta_db")
    throw ParameterError("db scale applies to the loss axes only");
  return numerics::linspace(s.start, s.stop, s.points);
}

inline LinkParams apply_axis(LinkParams p, const std::string& axis, double v) {
  if (axis == "total_eta_db") return p.with_total_eta(db_to_eta(v));
  if (axis == "half_eta_db") return p.with_total_eta(db_to_eta(2.0 * v));
  if (axis == "p_d") p.p_d = v;
  if (axis == "vis") p.vis = v;
  if (axis == "eps") p.eps = v;
  if (axis == "gamma") p = p.with_gamma(v);
  p.validate();
  return p;
}

inline int cmd_sweep(const LinkFlags& f, const SweepFlags& s, std::ostream& out, std::ostream& err) {
  const LinkParams base = f.params();
  const auto values = sweep_values(s);
  for (double v : values) apply_axis(base, s.axis, v);
  const bool optimize = f.optimizing() && s.axis != "gamma";

  std::vector<std::string> cols{s.axis, "eta_total_db", "eta_half_db", "gamma"};
  if (s.axis == "total_eta_db" || s.axis == "half_eta_db") cols.erase(cols.begin());
  cols.insert(cols.end(), s.outputs.begin(), s.outputs.end());
  if (optimize) cols.push_back("gamma_opt");

  const auto evals = parallel_map<Evaluated>(values.size(), s.jobs, [&](std::size_t i) {
    return evaluate_point(apply_axis(base, s.axis, values[i]), f, optimize);
  });
  Table t(cols);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t i = 0; i < values.size(); ++i) {
    const LinkParams p = apply_axis(base, s.axis, values[i]);
    const Evaluated& e = evals[i];
    if (!e.feasible) err << "sweep: " << s.axis << " = " << format_number(values[i]) << ": " << e.note << '\n';
    std::vector<Json> row;
    if (s.axis != "total_eta_db" && s.axis != "half_eta_db") row.push_back(values[i]);
    row.push_back(eta_to_db(p.total_eta()));
    row.push_back(half_db(p.total_eta()));
    row.push_back(e.gamma);
    for (const auto& o : s.outputs) {
      double v = nan;
      if (e.feasible) {
        if (o == "p_succ") v = e.metrics.p_succ;
        if (o == "fidelity") v = e.metrics.fidelity;
        if (o == "hashing") v = e.metrics.hashing;
        if (o == "rate") v = e.metrics.rate;
      }
      if (o == "d2") v = repeaterless_bound(p.total_eta());
      row.push_back(v);
    }
    if (optimize) row.push_back(e.feasible ? e.gamma : nan);
    t.add_row(row);
  }
  t.write(out, f.format);
  return kExitOk;
}

// ---------------------------------------------------------------------------
// distill

struct DistillFlags {
  int rounds = 3;
  std::string engine = "exact";
  double start = 0.0, stop = 60.0;
  int points = 61;
  bool max_range = false;
  int jobs = 1;
};

inline int cmd_distill(const LinkFlags& f, const DistillFlags& d, std::ostream& out, std::ostream& err) {
  const LinkParams base = f.params();
  const DistillEngine engine = parse_engine(d.engine);
  if (d.rounds < 0 || d.rounds > 15) throw ParameterError("rounds must lie in [0, 15]");

  if (d.max_range) {
    RangeOptions opts;
    opts.gamma_choice = f.gamma_choice();
    Table t({"encoding", "rounds", "max_range_db", "status", "eta_lim_db", "eta_lim_status"});
    double lim = std::numeric_limits<double>::quiet_NaN();
    std::string lim_status = "ok";
    try {
      lim = distillation_limit(base, opts).eta_max_db;
    } catch (const NoRoot&) {
      lim_status = "unbounded within scan";
    }
    const auto ranges = parallel_map<double>(static_cast<std::size_t>(d.rounds) + 1, d.jobs, [&](std::size_t k) {
      try {
        return distilled_max_range(base, static_cast<int>(k), engine, opts).eta_max_db;
      } catch (const NoRoot&) {
        return std::numeric_limits<double>::quiet_NaN();
      }
    });
    for (int k = 0; k <= d.rounds; ++k) {
      const double r = ranges[static_cast<std::size_t>(k)];
      t.add_row({to_string(base.encoding), double(k), r, std::isnan(r) ? "unbounded within scan" : "ok", lim, lim_status});
    }
    t.write(out, f.format);
    return kExitOk;
  }

  const auto losses = numerics::linspace(d.start, d.stop, d.points);
  if (d.points < 1) throw ParameterError("points must be >= 1");
  struct Cell {
    double gamma = 0.5;
    std::vector<PumpingSchedule> per_k;
    std::string note;
  };
  const auto cells = parallel_map<Cell>(losses.size(), d.jobs, [&](std::size_t i) {
    Cell c;
    LinkParams p = base.with_total_eta(db_to_eta(losses[i]));
    const Evaluated e = evaluate_point(p, f, f.optimizing());
    if (!e.feasible) {
      c.note = e.note;
      return c;
    }
    c.gamma = e.gamma;
    p = p.with_gamma(e.gamma);
    try {
      const HeraldOutcome h = herald(p);
      for (int k = 0; k <= d.rounds; ++k) c.per_k.push_back(pump(h, k, engine, p.parity));
    } catch (const Error& ex) {
      c.note = ex.what();
    }
    return c;
  });
  Table t({"eta_total_db", "eta_half_db", "rounds", "gamma", "fidelity", "hashing", "rate", "p_round", "approximate"});
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t i = 0; i < losses.size(); ++i) {
    const Cell& c = cells[i];
    if (!c.note.empty()) err << "distill: eta_total_db = " << format_number(losses[i]) << ": " << c.note << '\n';
    for (int k = 0; k <= d.rounds; ++k) {
      const bool have = static_cast<std::size_t>(k) < c.per_k.size();
      const PumpingSchedule* s = have ? &c.per_k[static_cast<std::size_t>(k)] : nullptr;
      const double p_round = s && k > 0 ? s->per_round.back().p_round : nan;
      t.add_row({losses[i], losses[i] / 2.0, double(k), c.gamma, s ? s->fidelity : nan, s ? s->hashing : nan,
                 s ? s->cumulative_rate : nan, p_round, s && s->approximate ? "true" : "false"});
    }
  }
  t.write(out, f.format);
  return kExitOk;
}

// ---------------------------------------------------------------------------
// range

struct RangeFlags {
  int grid = 0;
  double vis_min = 0.9;
  double pd_min = 1e-4, pd_max = 1e-1;
  int jobs = 1;
};

inline int cmd_range(const LinkFlags& f, const RangeFlags& r, std::ostream& out, std::ostream&) {
  const LinkParams base = f.params();
  RangeOptions opts;
  opts.gamma_choice = f.gamma_choice();
  std::vector<Encoding> encs{Encoding::SingleRail, Encoding::DualRail};
  if (f.encoding_opt && f.encoding_opt->count() > 0) encs = {base.encoding};
  const double nan = std::numeric_limits<double>::quiet_NaN();

  if (r.grid > 0) {
    if (r.grid < 2) throw ParameterError("contour grid needs at least 2 points per axis");
    const auto pds = numerics::logspace(r.pd_min, r.pd_max, r.grid);
    const auto viss = numerics::linspace(r.vis_min, 1.0, r.grid);
    Table t({"encoding", "p_d", "vis", "eta_lim_db", "status"});
    for (Encoding e : encs) {
      const std::size_t n = pds.size() * viss.size();
      const auto lims = parallel_map<double>(n, r.jobs, [&](std::size_t i) {
        LinkParams p = base;
        p.encoding = e;
        p.p_d = pds[i / viss.size()];
        p.vis = viss[i % viss.size()];
        try {
          return eta_lim(p, opts).eta_max_db;
        } catch (const NoRoot&) {
          return nan;
        }
      });
      for (std::size_t i = 0; i < n; ++i)
        t.add_row({to_string(e), pds[i / viss.size()], viss[i % viss.size()], lims[i],
                   std::isnan(lims[i]) ? "unbounded within scan" : "ok"});
    }
    t.write(out, f.format == "text" ? "csv" : f.format);
    return kExitOk;
  }

  Table t({"encoding", "max_range_db", "max_range_status", "eta_lim_db", "eta_lim_status"});
  for (Encoding e : encs) {
    LinkParams p = base;
    p.encoding = e;
    std::vector<Json> row{to_string(e)};
    for (int which = 0; which < 2; ++which) {
      try {
        const RangeResult res = which == 0 ? max_range(p, opts) : eta_lim(p, opts);
        row.push_back(res.eta_max_db);
        row.push_back("ok");
      } catch (const NoRoot&) {
        row.push_back(nan);
        row.push_back("unbounded within scan");
      }
    }
    t.add_row(row);
  }
  t.write(out, f.format == "text" ? "csv" : f.format);
  return kExitOk;
}

// ---------------------------------------------------------------------------
// verify

inline Json params_json(const LinkParams& p) {
  return Json{{"encoding", to_string(p.encoding)}, {"eta_a", json_number(p.eta_a)}, {"eta_b", json_number(p.eta_b)},
              {"eta_d", json_number(p.eta_d)},     {"p_d", json_number(p.p_d)},     {"vis", json_number(p.vis)},
              {"eps", json_number(p.eps)},         {"gamma_a", json_number(p.gamma_a)},
              {"gamma_b", json_number(p.gamma_b)}, {"parity", p.parity}};
}

inline int cmd_verify(const VerifyOptions& v, const std::string& format, std::ostream& out, std::ostream& err) {
  const VerifyReport rep = verify_oracle(v);
  if (format == "json") {
    Json j;
    j["tolerance"] = v.tolerance;
    j["points"] = v.points;
    j["seed"] = v.seed;
    j["pass"] = rep.pass;
    for (const auto& e : rep.encodings)
      j["encodings"].push_back({{"encoding", to_string(e.encoding)},
                                {"max_state_deviation", e.max_state_deviation},
                                {"max_p_deviation", e.max_p_deviation},
                                {"worst", params_json(e.worst.params)}});
    out << j.dump(2) << '\n';
  } else {
    Table t({"encoding", "points", "max_state_deviation", "max_p_deviation", "status"});
    for (const auto& e : rep.encodings)
      t.add_row({to_string(e.encoding), double(v.points), e.max_state_deviation, e.max_p_deviation,
                 e.worst.deviation() <= v.tolerance ? "pass" : "fail"});
    t.write(out, "csv");
  }
  if (!rep.pass) {
    for (const auto& e : rep.encodings)
      if (e.worst.deviation() > v.tolerance)
        err << "verify: " << to_string(e.encoding) << " deviation " << format_number(e.worst.deviation())
            << " above tolerance at " << params_json(e.worst.params).dump() << '\n';
    return kExitFailure;
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// bound

inline int cmd_bound(const LinkFlags& f, std::ostream& out) {
  const LinkParams p = f.params();
  const double eta = p.total_eta();
  Table t({"eta_total_db", "eta_half_db", "d2"});
  t.add_row({eta_to_db(eta), half_db(eta), repeaterless_bound(eta)});
  t.write(out, f.format == "text" ? "csv" : f.format);
  return kExitOk;
}

// ---------------------------------------------------------------------------

namespace detail {

/// Options that exclude one another; a command-line member of a group masks
/// every config-file member of it.
inline const std::vector<std::vector<std::string>>& exclusive_groups() {
  static const std::vector<std::vector<std::string>> groups{{"eta", "eta-db", "eta-half-db"},
                                                             {"gamma", "gamma-opt", "target-fidelity"}};
  return groups;
}

inline bool given_on_command_line(const std::vector<std::string>& args, const std::string& key) {
  std::vector<std::string> keys{key};
  for (const auto& g : exclusive_groups())
    if (std::find(g.begin(), g.end(), key) != g.end()) keys = g;
  for (const auto& a : args)
    for (const auto& k : keys)
      if (a == "--" + k || a.rfind("--" + k + "=", 0) == 0) return true;
  return false;
}

/// `args` starts at the subcommand. Replaces `--config <path>` with the file's key=value
/// pairs, placed ahead of the explicit flags and skipped where a flag is given.
inline std::vector<std::string> expand_config(std::vector<std::string> args) {
  auto it = std::find_if(args.begin(), args.end(), [](const std::string& a) {
    return a == "--config" || a.rfind("--config=", 0) == 0;
  });
  if (it == args.end() || it == args.begin()) return args;
  std::string path;
  if (*it == "--config") {
    if (it + 1 == args.end()) return args;
    path = *(it + 1);
    it = args.erase(it, it + 2);
  } else {
    path = it->substr(std::string("--config=").size());
    args.erase(it);
  }
  std::vector<CLI::ConfigItem> items;
  try {
    items = CLI::ConfigINI().from_file(path);
  } catch (const CLI::FileError& e) {
    throw ParameterError(std::string("cannot read config: ") + e.what());
  }
  std::vector<std::string> injected;
  for (const auto& item : items) {
    if (item.name.empty() || item.name == "++" || item.name == "--") continue;
    const std::string key = item.name;
    if (given_on_command_line(args, key)) continue;
    if (item.inputs.size() == 1 && (item.inputs[0] == "true" || item.inputs[0] == "false")) {
      if (item.inputs[0] == "true") injected.push_back("--" + key);
      continue;
    }
    injected.push_back("--" + key);
    injected.insert(injected.end(), item.inputs.begin(), item.inputs.end());
  }
  args.insert(args.begin() + 1, injected.begin(), injected.end());
  return args;
}

}  // namespace detail

/// Entry point. Returns the process exit code: 0 success, 1 quantitative or
/// verification failure, 2 usage error.
inline int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Heralded two-memory entanglement from a midpoint photonic Bell measurement"};
  app.require_subcommand(1);

  LinkFlags herald_f, sweep_f, distill_f, range_f, bound_f;
  SweepFlags sweep_s;
  DistillFlags distill_d;
  RangeFlags range_r;
  VerifyOptions verify_v;
  std::string verify_format = "csv";

  auto* herald_cmd = app.add_subcommand("herald", "Heralded state and metrics at one parameter point");
  add_link_flags(herald_cmd, herald_f, "text");

  auto* sweep_cmd = app.add_subcommand("sweep", "Metrics along one parameter axis (CSV)");
  add_link_flags(sweep_cmd, sweep_f, "csv");
  sweep_cmd->add_option("--axis", sweep_s.axis)
      ->check(CLI::IsMember({"total_eta_db", "half_eta_db", "p_d", "vis", "eps", "gamma"}))
      ->description("Swept parameter");
  sweep_cmd->add_option("--start", sweep_s.start, "First axis value");
  sweep_cmd->add_option("--stop", sweep_s.stop, "Last axis value");
  sweep_cmd->add_option("--points", sweep_s.points, "Number of grid points");
  sweep_cmd->add_option("--scale", sweep_s.scale, "Grid spacing")->check(CLI::IsMember({"linear", "log", "db"}));
  sweep_cmd->add_option("--outputs", sweep_s.outputs, "Comma-separated metric columns")
      ->delimiter(',')
      ->check(CLI::IsMember({"p_succ", "fidelity", "hashing", "rate", "d2"}));
  sweep_cmd->add_option("--jobs", sweep_s.jobs, "Worker threads")->check(CLI::PositiveNumber);

  auto* distill_cmd = app.add_subcommand("distill", "Entanglement pumping versus loss (CSV)");
  add_link_flags(distill_cmd, distill_f, "csv");
  distill_cmd->add_option("--rounds", distill_d.rounds, "Pumping rounds k")->check(CLI::Range(0, 15));
  distill_cmd->add_option("--engine", distill_d.engine, "Exact circuit or Bell-diagonal map")->check(CLI::IsMember({"exact", "map"}));
  distill_cmd->add_option("--start", distill_d.start, "First total loss in dB");
  distill_cmd->add_option("--stop", distill_d.stop, "Last total loss in dB");
  distill_cmd->add_option("--points", distill_d.points, "Number of loss points")->check(CLI::PositiveNumber);
  distill_cmd->add_flag("--max-range", distill_d.max_range, "Report the distilled max range per round count");
  distill_cmd->add_option("--jobs", distill_d.jobs, "Worker threads")->check(CLI::PositiveNumber);

  auto* range_cmd = app.add_subcommand("range", "Max range and fidelity-limited range in dB");
  add_link_flags(range_cmd, range_f, "csv");
  range_cmd->add_option("--grid", range_r.grid, "Emit an N x N (p_d, vis) grid of eta_lim");
  range_cmd->add_option("--vis-min", range_r.vis_min, "Lowest visibility on the grid");
  range_cmd->add_option("--pd-min", range_r.pd_min, "Lowest p_d on the grid");
  range_cmd->add_option("--pd-max", range_r.pd_max, "Highest p_d on the grid");
  range_cmd->add_option("--jobs", range_r.jobs, "Worker threads")->check(CLI::PositiveNumber);

  auto* verify_cmd = app.add_subcommand("verify", "Analytic herald against the Fock-space oracle");
  std::string verify_config;
  verify_cmd->add_option("--config", verify_config, "Flat key=value file mirroring these flags; flags override it");
  verify_cmd->add_option("--grid", verify_v.points, "Latin-hypercube points per encoding")->check(CLI::PositiveNumber);
  verify_cmd->add_option("--seed", verify_v.seed, "Grid seed");
  verify_cmd->add_option("--jobs", verify_v.jobs, "Worker threads")->check(CLI::PositiveNumber);
  verify_cmd->add_option("--quadrature-order", verify_v.quadrature_order, "Gauss-Hermite nodes")->check(CLI::Range(8, 200));
  verify_cmd->add_option("--tolerance", verify_v.tolerance, "Maximum elementwise deviation");
  verify_cmd->add_option("--inject-error", verify_v.inject_error, "Negative control")->group("");
  verify_cmd->add_option("--format", verify_format, "Output format")->check(CLI::IsMember({"csv", "json"}));

  auto* bound_cmd = app.add_subcommand("bound", "Repeaterless bound at the given loss");
  add_link_flags(bound_cmd, bound_f, "csv");

  std::vector<std::string> args(argv + std::min(argc, 1), argv + argc);
  try {
    args = detail::expand_config(args);
  } catch (const ParameterError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*herald_cmd) return cmd_herald(herald_f, out, err);
    if (*sweep_cmd) return cmd_sweep(sweep_f, sweep_s, out, err);
    if (*distill_cmd) return cmd_distill(distill_f, distill_d, out, err);
    if (*range_cmd) return cmd_range(range_f, range_r, out, err);
    if (*verify_cmd) return cmd_verify(verify_v, verify_format, out, err);
    if (*bound_cmd) return cmd_bound(bound_f, out);
  } catch (const ParameterError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace heraldswap::cli
