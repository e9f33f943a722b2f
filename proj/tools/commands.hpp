#pragma once

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "estlab/bilinear.hpp"
#include "estlab/clebsch_gordan.hpp"
#include "estlab/lattice.hpp"
#include "estlab/stats.hpp"
#include "estlab/strichartz.hpp"

namespace estlab::cli {

using json = nlohmann::json;

inline constexpr const char* kVersion = "0.1.0";

/// Bad arguments or config: exit code 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Outcome {
  std::string table;  // CSV, or JSON for cg-table --format json
  std::string table_ext = ".csv";
  json summary;
  bool breach = false;
};

inline std::string g17(double v) { return format_g17(v); }

/// ISO-8601 UTC time from SOURCE_DATE_EPOCH when set, otherwise the clock.
inline std::string manifest_timestamp() {
  std::time_t t = std::time(nullptr);
  if (const char* e = std::getenv("SOURCE_DATE_EPOCH"); e && *e) t = std::time_t(std::strtoll(e, nullptr, 10));
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

inline void write_file(const std::filesystem::path& p, const std::string& s) {
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream os(p, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + p.string());
  os << s;
}

/// Output stem: --out with its extension dropped, else $ESTLAB_OUT_DIR (or .) / subcommand.
inline std::filesystem::path output_stem(const std::string& out, const std::string& sub) {
  if (!out.empty()) {
    std::filesystem::path p(out);
    return p.parent_path() / p.stem();
  }
  const char* dir = std::getenv("ESTLAB_OUT_DIR");
  return std::filesystem::path(dir && *dir ? dir : ".") / sub;
}

template <class T>
T param(const json& p, const char* key) {
  if (!p.contains(key)) throw UsageError(std::string("missing parameter '") + key + "'");
  try {
    return p.at(key).get<T>();
  } catch (const json::exception& e) {
    throw UsageError(std::string("bad parameter '") + key + "': " + e.what());
  }
}

// ---- cg-table ----

inline Outcome run_cg_table(const json& p) {
  const int m = param<int>(p, "m"), n = param<int>(p, "n");
  const auto format = param<std::string>(p, "format");
  if (!(m >= n && n >= 0 && m + n <= 200)) throw UsageError("cg-table: require m >= n >= 0 and m + n <= 200");
  if (format != "csv" && format != "json") throw UsageError("cg-table: --format must be csv or json");
  const CGTable t = cg_decompose(m, n);
  const OrthogonalityReport rep = verify_orthogonality(t);
  Outcome o;
  std::ostringstream os;
  if (format == "csv") {
    write_csv(t, os);
  } else {
    write_json(t, os);
    o.table_ext = ".json";
  }
  o.table = os.str();
  o.summary = {{"rows", t.records().size()},
               {"max_row_defect", rep.max_row_defect},
               {"max_col_defect", rep.max_col_defect},
               {"ks", t.ks()}};
  o.breach = rep.max_row_defect > 1e-9 || rep.max_col_defect > 1e-9;
  o.summary["defects_within_1e-9"] = !o.breach;
  return o;
}

// ---- bilinear-verify ----

inline std::vector<int> dyadic_upto(int lo, int hi) {
  std::vector<int> v;
  for (int x = lo; x <= hi; x *= 2) v.push_back(x);
  return v;
}

inline Outcome run_bilinear_verify(const json& p) {
  const int m_max = param<int>(p, "m_max"), n_max = param<int>(p, "n_max"), seeds = param<int>(p, "seeds");
  const auto seed = param<std::uint64_t>(p, "seed");
  const auto grid = param<std::string>(p, "grid");
  const bool cross = param<bool>(p, "cross_check"), zonal_mode = param<bool>(p, "zonal");
  if (m_max < 0 || n_max < 0 || seeds < 1 || m_max > 128) throw UsageError("bilinear-verify: need 0 <= m-max <= 128, n-max >= 0, seeds >= 1");
  if (grid != "full" && grid != "dyadic") throw UsageError("bilinear-verify: --grid must be full or dyadic");

  Outcome o;
  std::ostringstream os;
  std::map<int, double> max_per_n;
  double max_ratio = 0.0, max_cross = 0.0, n0_defect = 0.0;
  if (zonal_mode) {
    os << "m,n,ratio\n";
    std::map<int, double> floor_per_n;
    for (int n = 0; n <= n_max; ++n)
      for (int m = n; m <= m_max; ++m) {
        const double r = bilinear_ratio(zonal(m), zonal(n));
        os << m << ',' << n << ',' << g17(r) << '\n';
        floor_per_n.try_emplace(n, r);
        floor_per_n[n] = std::min(floor_per_n[n], r);
        max_ratio = std::max(max_ratio, r);
      }
    json sat = json::object();
    for (auto [n, r] : floor_per_n) sat[std::to_string(n)] = r;
    o.summary["saturation_per_n"] = sat;
  } else {
    os << "m,n,seed,ratio" << (cross ? ",exact_norm,quadrature_norm,rel_diff" : "") << '\n';
    const std::vector<int> ms = grid == "full" ? [&] { std::vector<int> v; for (int i = 0; i <= m_max; ++i) v.push_back(i); return v; }()
                                               : dyadic_upto(8, m_max);
    for (int m : ms) {
      std::vector<int> ns;
      if (grid == "full")
        for (int n = 0; n <= std::min(m, n_max); ++n) ns.push_back(n);
      else
        ns = dyadic_upto(4, std::min(m, n_max));
      for (int n : ns) {
        const CGTable table = cg_decompose(m, n);
        const int L = quadrature_levels(m, n);
        std::unique_ptr<HaarQuadrature> q;
        if (cross) q = std::make_unique<HaarQuadrature>(haar_quadrature(L, L, L));
        for (const auto& row : bilinear_scan(m, n, seeds, seed)) {
          max_ratio = std::max(max_ratio, row.ratio);
          max_per_n[n] = std::max(max_per_n[n], row.ratio);
          os << m << ',' << n << ',' << row.seed << ',' << g17(row.ratio);
          if (cross) {
            Rng rng(row.seed);
            const Eigenfunction f = random_eigenfunction(m, rng), g = random_eigenfunction(n, rng);
            const double ex = product_l2_exact(f, g, table), qv = product_l2_quadrature(f, g, *q).value;
            const double rd = std::abs(qv - ex) / ex;
            max_cross = std::max(max_cross, rd);
            os << ',' << g17(ex) << ',' << g17(qv) << ',' << g17(rd);
          }
          os << '\n';
        }
      }
    }
    for (int m = 0; m <= m_max; ++m) {
      const Eigenfunction f = random_eigenfunction(m, derive_seed(seed, {m, -1}));
      n0_defect = std::max(n0_defect, std::abs(bilinear_ratio(f, constant_function(1.0)) - 1.0));
    }
    std::vector<double> x, y;
    json per_n = json::object();
    for (auto [n, r] : max_per_n) {
      per_n[std::to_string(n)] = r;
      x.push_back(std::log(n + 1.0));
      y.push_back(r);
    }
    const double slope = x.size() >= 2 ? fit_line(x, y).slope : 0.0;
    o.summary["max_ratio_per_n"] = per_n;
    o.summary["slope_vs_log_n_plus_1"] = slope;
    o.summary["no_growth"] = slope <= 0.05;
    o.summary["constant_factor_max_defect"] = n0_defect;
    if (cross) o.summary["cross_check_max_rel_diff"] = max_cross;
    o.breach = slope > 0.05 || n0_defect > 1e-9 || (cross && max_cross > 1e-4);
  }
  o.summary["max_ratio"] = max_ratio;
  o.summary["recorded_constant"] = 1.0;
  o.breach = o.breach || max_ratio > 1.0 + 1e-9;
  o.table = os.str();
  return o;
}

// ---- lattice-scan ----

inline Outcome run_lattice_scan(const json& p) {
  const auto lemma = param<std::string>(p, "lemma");
  const auto seed = param<std::uint64_t>(p, "seed");
  const int trials = param<int>(p, "trials");
  const auto Ns = param<std::vector<std::int64_t>>(p, "N");
  if (trials < 1) throw UsageError("lattice-scan: trials must be >= 1");
  for (auto N : Ns)
    if (N < 1 || N > 4096) throw UsageError("lattice-scan: N must lie in [1, 4096]");
  Outcome o;
  std::ostringstream os;
  if (lemma == "5.1") {
    const double constant = param<double>(p, "constant");
    const AnnulusScan s = scan_annulus(trials, seed);
    os << "c_decade,k_decade,queries,max_measure,max_ratio\n";
    for (const auto& b : s.buckets)
      os << b.c_decade << ',' << b.k_decade << ',' << b.queries << ',' << g17(b.max_measure) << ',' << g17(b.max_ratio) << '\n';
    o.summary = {{"max_ratio", s.max_ratio},
                 {"recorded_constant", constant},
                 {"argmax", {{"C", s.argmax.C}, {"K", s.argmax.K}, {"xi1", s.argmax.xi1}, {"xi2", s.argmax.xi2}}}};
    o.breach = s.max_ratio > constant;
  } else if (lemma == "5.2a" || lemma == "5.2b") {
    const bool quad = lemma == "5.2a";
    const CountScan s = quad ? scan_quadric(Ns, trials, seed) : scan_hyperbola(Ns, trials, seed);
    os << "N,max_count,k,C,exact_sup_k0\n";
    std::vector<double> x, y;
    for (const auto& r : s.rows) {
      const auto ex = quad ? exact_sup_quadric_k0(r.N) : exact_sup_hyperbola_k0(r.N);
      os << r.N << ',' << r.max_count << ',' << r.k << ',' << r.C << ',' << ex << '\n';
      x.push_back(double(r.N));
      y.push_back(double(ex));
    }
    o.summary = {{"fitted_exponent", s.fitted_exponent},
                 {"exact_k0_exponent", x.size() >= 2 ? fit_exponent(x, y) : 0.0},
                 {"exponent_bound", 0.3}};
    o.breach = s.fitted_exponent > 0.3;
  } else if (lemma == "5.3") {
    const double delta = param<double>(p, "delta");
    if (!(delta > 0.0 && delta < 0.125)) throw UsageError("lattice-scan: delta must lie in (0, 1/8)");
    const SetBScan s = scan_setB(Ns, delta, trials, seed);
    os << "N,M,regime,l,k,C,measure,ratio\n";
    for (const auto& r : s.rows)
      os << g17(r.query.N) << ',' << g17(r.query.M) << ',' << r.regime << ',' << g17(r.query.l) << ',' << r.query.k << ','
         << g17(r.query.C) << ',' << g17(r.measure) << ',' << g17(r.ratio) << '\n';
    o.summary = {{"max_ratio", s.max_ratio},
                 {"max_ratio_per_N", s.max_ratio_per_N},
                 {"N", s.Ns},
                 {"slope", s.slope},
                 {"loglog_slope", s.loglog_slope}};
    o.breach = s.loglog_slope > 0.05;
  } else {
    throw UsageError("lattice-scan: --lemma must be one of 5.1, 5.2a, 5.2b, 5.3");
  }
  o.summary["assertion_holds"] = !o.breach;
  o.table = os.str();
  return o;
}

// ---- strichartz ----

struct StrichartzConfig {
  SlabSpec slab;
  std::optional<FrequencyGrid> grid;
  double h = 0.125;
  TimeRule rule;
  double delta = 0.1;
  int trials = 1;
  std::uint64_t seed = 0;
  Dispersion dispersion = Dispersion::elliptic;
  std::int64_t k = 0;
  std::vector<std::int64_t> scan_N;
};

inline StrichartzConfig parse_strichartz_config(const json& c) {
  StrichartzConfig s;
  try {
    if (c.contains("slab")) {
      const json& sl = c.at("slab");
      const auto xi0 = sl.value("xi0", std::vector<double>{0.0, 0.0});
      const auto a = sl.value("a", std::vector<double>{1.0, 0.0});
      if (xi0.size() != 2 || a.size() != 2) throw UsageError("config: slab.xi0 and slab.a need two entries");
      if (xi0[1] != std::floor(xi0[1])) throw UsageError("config: slab.xi0[1] must be an integer");
      s.slab.xi0_1 = xi0[0];
      s.slab.xi0_2 = std::int64_t(xi0[1]);
      s.slab.a1 = a[0];
      s.slab.a2 = a[1];
      s.slab.c = sl.value("c", s.slab.a1 * xi0[0] + s.slab.a2 * xi0[1]);
      s.slab.M = sl.value("M", 1.0);
      s.slab.N = sl.value("N", 1.0);
    }
    if (c.contains("grid")) {
      const json& g = c.at("grid");
      s.h = g.value("h", 0.125);
      if (g.contains("extent") || g.contains("xi2_range")) {
        FrequencyGrid fg = covering_grid(s.slab, s.h);
        fg.xi1_extent = g.value("extent", fg.xi1_extent);
        if (g.contains("xi2_range")) {
          const auto r = g.at("xi2_range").get<std::vector<std::int64_t>>();
          if (r.size() != 2) throw UsageError("config: grid.xi2_range needs two entries");
          fg.xi2_min = r[0], fg.xi2_max = r[1];
        }
        s.grid = fg;
      }
    }
    if (!(s.h > 0.0)) throw UsageError("config: grid.h must be positive");
    const std::string rule = c.value("time_rule", std::string("window"));
    if (rule == "full_line") {
      s.rule = TimeRule::full_line();
    } else if (rule == "window") {
      const json w = c.value("window", json::object());
      s.rule = TimeRule::window(w.value("t_min", -60.0), w.value("t_max", 60.0), w.value("n_t", 1024L));
    } else {
      throw UsageError("config: time_rule must be window or full_line");
    }
    s.delta = c.value("delta", 0.1);
    s.trials = c.value("trials", 1);
    s.seed = c.value("seed", std::uint64_t(0));
    s.k = c.value("k", std::int64_t(0));
    const std::string d = c.value("dispersion", std::string("elliptic"));
    if (d != "elliptic" && d != "hyperbolic") throw UsageError("config: dispersion must be elliptic or hyperbolic");
    s.dispersion = d == "elliptic" ? Dispersion::elliptic : Dispersion::hyperbolic;
    s.scan_N = c.value("scan_N", std::vector<std::int64_t>{});
  } catch (const json::exception& e) {
    throw UsageError(std::string("config: ") + e.what());
  }
  if (s.trials < 1) throw UsageError("config: trials must be >= 1");
  if (!(s.delta > 0.0 && s.delta < 0.125)) throw UsageError("config: delta must lie in (0, 1/8)");
  return s;
}

inline WavePacket config_packet(const StrichartzConfig& c, std::uint64_t seed) {
  const FrequencyGrid g = c.grid ? *c.grid : covering_grid(c.slab, c.h);
  return sample_slab_packet(c.slab, g, PacketMode::gaussian, seed);
}

inline double loglog_slope(const std::vector<double>& N, const std::vector<double>& v) {
  return N.size() >= 2 ? fit_exponent(N, v) : 0.0;
}

inline Outcome run_strichartz(const json& p) {
  const auto mode = param<std::string>(p, "mode");
  const StrichartzConfig c = parse_strichartz_config(param<json>(p, "config"));
  Outcome o;
  std::ostringstream os;
  bool flags = false;
  try {
    if (mode == "elliptic" && c.scan_N.empty()) {
      c.slab.validate();
      const FrequencyGrid g = c.grid ? *c.grid : covering_grid(c.slab, c.h);
      os << "trial,nodes,norm,quotient,truncation_flag\n";
      double mx = 0.0;
      for (int t = 0; t < c.trials; ++t) {
        const WavePacket pk = sample_slab_packet(c.slab, g, PacketMode::gaussian, derive_seed(c.seed, {t}));
        const L4Result r = evolve_l4_norm(pk, c.k, Dispersion::elliptic, c.rule);
        const double q = r.norm / (strichartz_scale(c.slab.M, c.slab.N, c.delta) * std::sqrt(pk.mass()));
        os << t << ',' << pk.nodes.size() << ',' << g17(r.norm) << ',' << g17(q) << ',' << int(r.truncation_flag) << '\n';
        mx = std::max(mx, q);
        flags = flags || r.truncation_flag;
      }
      o.summary["max_quotient"] = mx;
    } else if (mode == "elliptic") {
      os << "N,M,trial,nodes,a1,a2,norm,quotient,truncation_flag\n";
      std::vector<double> Ns, mx;
      for (auto N : c.scan_N) {
        double best = 0.0;
        for (double M : {1.0, std::sqrt(double(N)), double(N)}) {
          const QuotientReport r =
              strichartz_quotient_random_slabs(double(N), M, c.h, c.delta, c.trials, derive_seed(c.seed, {N, std::int64_t(M * 1000)}), c.rule);
          for (const auto& t : r.trials)
            os << N << ',' << g17(M) << ',' << t.trial << ',' << t.nodes << ',' << g17(t.slab.a1) << ',' << g17(t.slab.a2) << ','
               << g17(t.norm) << ',' << g17(t.quotient) << ',' << int(t.truncation_flag) << '\n';
          best = std::max(best, r.max_quotient);
          flags = flags || r.any_flag;
        }
        Ns.push_back(double(N));
        mx.push_back(best);
      }
      const double sl = loglog_slope(Ns, mx);
      o.summary["max_quotient_per_N"] = mx;
      o.summary["N"] = Ns;
      o.summary["loglog_slope"] = sl;
      o.summary["no_growth"] = sl <= 0.05;
    } else if (mode == "hyperbolic") {
      const auto Nlist = c.scan_N.empty() ? std::vector<std::int64_t>{4, 8, 16} : c.scan_N;
      os << "N,trial,nodes,norm,quotient,truncation_flag\n";
      std::vector<double> Ns, mx;
      for (auto N : Nlist) {
        const QuotientReport r = hyperbolic_l4_quotient(N, c.h, c.trials, c.seed, c.rule);
        for (const auto& t : r.trials)
          os << N << ',' << t.trial << ',' << t.nodes << ',' << g17(t.norm) << ',' << g17(t.quotient) << ',' << int(t.truncation_flag) << '\n';
        Ns.push_back(double(N));
        mx.push_back(r.max_quotient);
        flags = flags || r.any_flag;
      }
      const double sl = loglog_slope(Ns, mx);
      o.summary["max_quotient_per_N"] = mx;
      o.summary["N"] = Ns;
      o.summary["loglog_slope"] = sl;
      o.summary["no_growth"] = sl <= 0.05;
    } else if (mode == "quadrilinear") {
      os << "trial,nodes,frequency_side,time_side,rel_diff\n";
      double worst = 0.0;
      for (int t = 0; t < c.trials; ++t) {
        const WavePacket pk = config_packet(c, derive_seed(c.seed, {t}));
        const double f = quadrilinear_form_frequency(pk, c.k).value;
        const L4Result r = evolve_l4_norm(pk, c.k, Dispersion::elliptic, c.rule);
        const double rd = std::abs(r.norm4 - f) / f;
        os << t << ',' << pk.nodes.size() << ',' << g17(f) << ',' << g17(r.norm4) << ',' << g17(rd) << '\n';
        worst = std::max(worst, rd);
        flags = flags || r.truncation_flag;
      }
      o.summary["max_rel_diff"] = worst;
      o.summary["tolerance"] = 0.02;
      o.breach = worst > 0.02;
    } else if (mode == "kernel-split") {
      os << "trial,nodes,gamma_tuples,k1_tuples,k2_tuples,cover_violations,gamma_total,k1_part,k2_part\n";
      long violations = 0;
      for (int t = 0; t < c.trials; ++t) {
        const WavePacket pk = config_packet(c, derive_seed(c.seed, {t}));
        const KernelSplitReport r = kernel_split_diagnostics(pk, c.k);
        os << t << ',' << pk.nodes.size() << ',' << r.gamma_tuples << ',' << r.k1_tuples << ',' << r.k2_tuples << ','
           << r.cover_violations << ',' << g17(r.gamma_total) << ',' << g17(r.k1_part) << ',' << g17(r.k2_part) << '\n';
        violations += r.cover_violations;
      }
      o.summary["cover_violations"] = violations;
      o.breach = violations > 0;
    } else if (mode == "box-scaling") {
      const auto Nlist = c.scan_N.empty() ? std::vector<std::int64_t>{4, 8, 16} : c.scan_N;
      os << "N,nodes,norm,norm_over_N_quarter,truncation_flag\n";
      double lo = 1e300, hi = 0.0;
      for (auto N : Nlist) {
        const WavePacket pk = box_packet(N, c.h);
        const L4Result r = evolve_l4_norm(pk, c.k, c.dispersion, c.rule);
        const double q = r.norm / std::pow(double(N), 0.25);
        os << N << ',' << pk.nodes.size() << ',' << g17(r.norm) << ',' << g17(q) << ',' << int(r.truncation_flag) << '\n';
        lo = std::min(lo, q), hi = std::max(hi, q);
        flags = flags || r.truncation_flag;
      }
      o.summary["ratio_spread"] = hi / lo;
      o.summary["within_factor_2"] = hi / lo <= 2.0;
    } else {
      throw UsageError("strichartz: --mode must be elliptic, hyperbolic, quadrilinear, kernel-split or box-scaling");
    }
  } catch (const std::domain_error& e) {
    throw UsageError(e.what());
  } catch (const std::length_error& e) {
    throw UsageError(e.what());
  }
  o.summary["truncation_flag"] = flags;
  o.table = os.str();
  return o;
}

// ---- dispatch ----

inline Outcome dispatch(const std::string& sub, const json& params) {
  if (sub == "cg-table") return run_cg_table(params);
  if (sub == "bilinear-verify") return run_bilinear_verify(params);
  if (sub == "lattice-scan") return run_lattice_scan(params);
  if (sub == "strichartz") return run_strichartz(params);
  throw UsageError("unknown subcommand '" + sub + "'");
}

/// Runs a subcommand and writes <stem><ext>, <stem>.summary.json and <stem>.manifest.json.
inline int execute(const std::string& sub, const json& params, const std::string& out) {
  Outcome o;
  try {
    o = dispatch(sub, params);
  } catch (const UsageError& e) {
    std::cerr << "estlab: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "estlab: " << sub << " failed: " << e.what() << '\n';
    return 1;
  }
  const auto stem = output_stem(out, sub);
  const std::string s = stem.string();
  json summary = o.summary;
  summary["subcommand"] = sub;
  summary["assertion_breach"] = o.breach;
  json manifest = {{"subcommand", sub},
                   {"params", params},
                   {"seed", params.value("seed", params.contains("config") ? params["config"].value("seed", json(0)) : json(0))},
                   {"version", kVersion},
                   {"timestamp", manifest_timestamp()},
                   {"outputs", {std::filesystem::path(s + o.table_ext).filename().string(),
                                std::filesystem::path(s + ".summary.json").filename().string()}}};
  try {
    write_file(s + o.table_ext, o.table);
    write_file(s + ".summary.json", summary.dump(2) + "\n");
    write_file(s + ".manifest.json", manifest.dump(2) + "\n");
  } catch (const std::exception& e) {
    std::cerr << "estlab: " << e.what() << '\n';
    return 1;
  }
  std::cout << s + o.table_ext << '\n';
  if (o.breach) {
    std::cerr << "estlab: assertion breach, see " << s << ".summary.json\n";
    return 1;
  }
  return 0;
}

inline int main(int argc, char** argv) {
  CLI::App app{"estlab: numerical experiments for eigenfunction and Strichartz estimates"};
  app.set_version_flag("--version", kVersion);
  std::string manifest, out;
  app.add_option("--manifest", manifest, "re-run a recorded manifest")->check(CLI::ExistingFile);
  app.add_option("--out", out, "output path (stem is reused for summary and manifest)");
  app.require_subcommand(0, 1);

  auto* c1 = app.add_subcommand("cg-table", "Clebsch–Gordan table with orthogonality report");
  int cm = 0, cn = 0;
  std::string cfmt = "csv";
  c1->add_option("m", cm)->required();
  c1->add_option("n", cn)->required();
  c1->add_option("--format", cfmt)->check(CLI::IsMember({"csv", "json"}));
  c1->add_option("--out", out);

  auto* c2 = app.add_subcommand("bilinear-verify", "bilinear ratio scan over random eigenfunction pairs");
  int mmax = 8, nmax = 8, seeds = 50;
  std::uint64_t bseed = 1;
  std::string bgrid = "full";
  bool cross = false, zon = false;
  c2->add_option("--m-max", mmax);
  c2->add_option("--n-max", nmax);
  c2->add_option("--seeds", seeds);
  c2->add_option("--seed", bseed);
  c2->add_option("--grid", bgrid)->check(CLI::IsMember({"full", "dyadic"}));
  c2->add_flag("--cross-check", cross);
  c2->add_flag("--zonal", zon);
  c2->add_option("--out", out);

  auto* c3 = app.add_subcommand("lattice-scan", "lattice counting and measure scans");
  std::string lemma;
  std::uint64_t lseed = 1;
  int ltrials = 0;
  std::vector<std::int64_t> lN;
  double delta = 0.1, lconst = 8.0;
  c3->add_option("--lemma", lemma)->required()->check(CLI::IsMember({"5.1", "5.2a", "5.2b", "5.3"}));
  c3->add_option("--seed", lseed);
  c3->add_option("--trials", ltrials, "queries (5.1) or trials per cell");
  c3->add_option("--N", lN, "N values");
  c3->add_option("--delta", delta);
  c3->add_option("--constant", lconst, "recorded constant for 5.1");
  c3->add_option("--out", out);

  auto* c4 = app.add_subcommand("strichartz", "space-time L4 experiments");
  std::string smode = "elliptic", config;
  c4->add_option("--mode", smode)->check(CLI::IsMember({"elliptic", "hyperbolic", "quadrilinear", "kernel-split", "box-scaling"}));
  c4->add_option("--config", config)->required()->check(CLI::ExistingFile);
  c4->add_option("--out", out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  if (!manifest.empty()) {
    if (!app.get_subcommands().empty()) {
      std::cerr << "estlab: --manifest cannot be combined with a subcommand\n";
      return 2;
    }
    json m;
    try {
      std::ifstream is(manifest);
      m = json::parse(is);
      return execute(m.at("subcommand").get<std::string>(), m.at("params"), out);
    } catch (const json::exception& e) {
      std::cerr << "estlab: bad manifest: " << e.what() << '\n';
      return 2;
    }
  }
  if (app.get_subcommands().empty()) {
    std::cerr << app.help();
    return 2;
  }

  json params;
  std::string sub = app.get_subcommands()[0]->get_name();
  if (sub == "cg-table") {
    params = {{"m", cm}, {"n", cn}, {"format", cfmt}};
  } else if (sub == "bilinear-verify") {
    params = {{"m_max", mmax}, {"n_max", nmax}, {"seeds", seeds}, {"seed", bseed}, {"grid", bgrid}, {"cross_check", cross}, {"zonal", zon}};
  } else if (sub == "lattice-scan") {
    if (lN.empty()) lN = lemma == "5.3" ? std::vector<std::int64_t>{64, 128, 256, 512, 1024} : std::vector<std::int64_t>{64, 128, 256, 512};
    if (ltrials == 0) ltrials = lemma == "5.1" ? 10000 : (lemma == "5.3" ? 200 : 2000);
    params = {{"lemma", lemma}, {"seed", lseed}, {"trials", ltrials}, {"N", lN}, {"delta", delta}, {"constant", lconst}};
  } else {
    json cfg;
    try {
      std::ifstream is(config);
      cfg = json::parse(is);
    } catch (const json::exception& e) {
      std::cerr << "estlab: bad config: " << e.what() << '\n';
      return 2;
    }
    params = {{"mode", smode}, {"config", cfg}};
  }
  return execute(sub, params, out);
}

}  // namespace estlab::cli
