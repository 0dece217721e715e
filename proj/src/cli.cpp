#include "chanstab/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>
#include <iostream>
#include <json.hpp>
#include <optional>
#include <sstream>
#include <thread>

#include "chanstab/dispersion.hpp"
#include "chanstab/errors.hpp"
#include "chanstab/spectrum.hpp"

namespace chanstab {

namespace {

std::string fmt_real(Real x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// One flat record; kept as ordered (key, value) string pairs so CSV and JSON
// share field names and ordering.
struct Record {
  std::vector<std::pair<std::string, std::string>> fields;
  void add(const std::string& key, Real v) { fields.push_back({key, fmt_real(v)}); }
  void add(const std::string& key, const std::string& v) { fields.push_back({key, v}); }
  void add_complex(const std::string& key, Complex v) {
    add("re_" + key, v.real());
    add("im_" + key, v.imag());
  }
};

void write_csv(std::ostream& os, const std::vector<Record>& records,
               const std::vector<std::string>& trailers) {
  if (!records.empty()) {
    for (size_t i = 0; i < records[0].fields.size(); ++i)
      os << (i ? "," : "") << records[0].fields[i].first;
    os << "\n";
    for (const Record& r : records) {
      for (size_t i = 0; i < r.fields.size(); ++i) os << (i ? "," : "") << r.fields[i].second;
      os << "\n";
    }
  }
  for (const std::string& t : trailers) os << "# " << t << "\n";
}

void write_json(std::ostream& os, const std::vector<Record>& records,
                const std::vector<std::string>& trailers) {
  nlohmann::json arr = nlohmann::json::array();
  for (const Record& r : records) {
    nlohmann::json obj = nlohmann::json::object();
    for (const auto& [k, v] : r.fields) {
      try {
        size_t pos = 0;
        double num = std::stod(v, &pos);
        if (pos == v.size()) {
          obj[k] = num;
          continue;
        }
      } catch (...) {
      }
      obj[k] = v;
    }
    arr.push_back(obj);
  }
  for (const std::string& t : trailers) {
    nlohmann::json obj = nlohmann::json::object();
    obj["kind"] = "fit";
    std::istringstream is(t);
    std::string item;
    while (std::getline(is, item, ',')) {
      auto eq = item.find('=');
      if (eq == std::string::npos) continue;
      std::string key = item.substr(0, eq), val = item.substr(eq + 1);
      try {
        obj[key] = std::stod(val);
      } catch (...) {
        obj[key] = val;
      }
    }
    arr.push_back(obj);
  }
  os << arr.dump(1) << "\n";
}

void emit(const RunConfig& cfg, const std::vector<Record>& records,
          const std::vector<std::string>& trailers) {
  std::ostringstream os;
  if (cfg.format == "json")
    write_json(os, records, trailers);
  else
    write_csv(os, records, trailers);
  if (cfg.out_path.empty()) {
    std::cout << os.str();
  } else {
    std::ofstream f(cfg.out_path, std::ios::binary);
    if (!f) throw ConfigError("cannot open output path: " + cfg.out_path);
    f << os.str();
  }
}

struct Tuple {
  Real eps, mach, lambda, t0;
};

std::vector<Tuple> tuples_of(const RunConfig& cfg) {
  std::vector<Tuple> out;
  for (Real e : cfg.eps)
    for (Real m : cfg.mach)
      for (Real l : cfg.lambda)
        for (Real t : cfg.t0) out.push_back({e, m, l, t});
  return out;
}

struct RootOutcome {
  Tuple t;
  int grid_n = 0;
  std::optional<DispersionResult> result;
  std::string status = "ok";
};

RootOutcome root_one(const Tuple& t, int grid_n, Real tol) {
  RootOutcome out;
  out.t = t;
  out.grid_n = grid_n > 0 ? grid_n : default_grid_n(t.eps);
  Params p = Params::make(t.eps, t.mach, t.lambda, t.t0);
  ChebGrid grid = cheb_grid(out.grid_n);
  BaseFlow flow = make_poiseuille(grid);
  try {
    out.result = find_root(p, flow, grid, tol);
  } catch (const NoRootInDisk&) {
    out.status = "no_root_in_disk";
  } catch (const NewtonDivergence&) {
    out.status = "newton_divergence";
  } catch (const NumericalError& e) {
    out.status = std::string("numerical_failure");
  }
  return out;
}

Record root_record(const RootOutcome& o) {
  Params p = Params::make(o.t.eps, o.t.mach, o.t.lambda, o.t.t0);
  PredictedRoot pr;
  {
    ChebGrid g = cheb_grid(32);
    BaseFlow flow = make_poiseuille(g);
    pr = predicted_root(p, flow);
  }
  Record r;
  r.add("eps", o.t.eps);
  r.add("mach", o.t.mach);
  r.add("lambda", o.t.lambda);
  r.add("t0", o.t.t0);
  r.add("k", p.k);
  r.add("grid_n", static_cast<Real>(o.grid_n));
  const DispersionResult* d = o.result ? &*o.result : nullptr;
  r.add_complex("c_star", d ? d->c_star : Complex(NAN, NAN));
  r.add_complex("c0", pr.c0);
  r.add("winding", d ? d->winding : 0.0);
  r.add("residual", d ? d->residual : NAN);
  r.add("growth_rate", d ? d->growth_rate : NAN);
  r.add("in_disk", d ? (d->in_disk ? 1.0 : 0.0) : 0.0);
  r.add("status", o.status);
  return r;
}

// least-squares slope with a 2-sigma half width
std::pair<Real, Real> slope_with_halfwidth(const std::vector<Real>& x,
                                           const std::vector<Real>& y) {
  const int n = static_cast<int>(x.size());
  Real sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < n; ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  Real denom = n * sxx - sx * sx;
  Real slope = (n * sxy - sx * sy) / denom;
  Real icept = (sy - slope * sx) / n;
  Real ss = 0;
  for (int i = 0; i < n; ++i) {
    Real rres = y[i] - slope * x[i] - icept;
    ss += rres * rres;
  }
  Real se = (n > 2) ? std::sqrt(ss / (n - 2) * n / denom) : 0.0;
  return {slope, 2.0 * se};
}

template <typename F>
auto run_pool(const std::vector<Tuple>& tuples, F&& fn) {
  using R = decltype(fn(tuples[0]));
  std::vector<R> results(tuples.size());
  unsigned workers = std::max(1u, std::thread::hardware_concurrency());
  std::vector<std::future<void>> futs;
  std::atomic<size_t> next{0};
  for (unsigned w = 0; w < workers; ++w) {
    futs.push_back(std::async(std::launch::async, [&] {
      for (;;) {
        size_t i = next.fetch_add(1);
        if (i >= tuples.size()) return;
        results[i] = fn(tuples[i]);
      }
    }));
  }
  for (auto& f : futs) f.get();
  return results;
}

int cmd_root(const RunConfig& cfg, bool with_fits) {
  std::vector<Tuple> tuples = tuples_of(cfg);
  if (tuples.empty()) throw ConfigError("empty sweep list");
  auto outcomes =
      run_pool(tuples, [&](const Tuple& t) { return root_one(t, cfg.grid_n, cfg.tol); });
  std::vector<Record> records;
  for (const auto& o : outcomes) records.push_back(root_record(o));

  std::vector<std::string> trailers;
  if (with_fits) {
    // slope fits per (mach, lambda, t0) group along the eps axis
    for (Real m : cfg.mach)
      for (Real l : cfg.lambda)
        for (Real t : cfg.t0) {
          std::vector<Real> lx, ly_im, ly_gr;
          for (const auto& o : outcomes) {
            if (o.t.mach != m || o.t.lambda != l || o.t.t0 != t || !o.result) continue;
            lx.push_back(std::log(o.t.eps));
            ly_im.push_back(std::log(std::max(o.result->c_star.imag(), 1e-300)));
            ly_gr.push_back(std::log(std::max(o.result->growth_rate, 1e-300)));
          }
          std::ostringstream os;
          os << "fit,mach=" << fmt_real(m) << ",lambda=" << fmt_real(l) << ",t0=" << fmt_real(t)
             << ",points=" << lx.size();
          if (lx.size() >= 2) {
            auto [s_im, hw_im] = slope_with_halfwidth(lx, ly_im);
            auto [s_gr, hw_gr] = slope_with_halfwidth(lx, ly_gr);
            os << ",slope_im_c=" << fmt_real(s_im) << ",halfwidth_im_c=" << fmt_real(hw_im)
               << ",slope_growth=" << fmt_real(s_gr) << ",halfwidth_growth=" << fmt_real(hw_gr);
          }
          trailers.push_back(os.str());
        }
  }
  emit(cfg, records, trailers);
  bool any_fail = false;
  for (const auto& o : outcomes) any_fail = any_fail || !o.result;
  return any_fail ? 2 : 0;
}

int cmd_eig(const RunConfig& cfg, bool dump_modes) {
  std::vector<Tuple> tuples = tuples_of(cfg);
  if (tuples.empty()) throw ConfigError("empty sweep list");
  std::vector<Record> records;
  bool any_fail = false;
  for (const Tuple& t : tuples) {
    Params p = Params::make(t.eps, t.mach, t.lambda, t.t0);
    int n = cfg.grid_n > 0 ? cfg.grid_n : default_grid_n(t.eps);
    ChebGrid grid = cheb_grid(n);
    BaseFlow flow = make_poiseuille(grid);
    PredictedRoot pr = predicted_root(p, flow);
    Complex center = cfg.have_window_center ? cfg.window_center : pr.c0;
    Real radius = cfg.window_radius > 0.0
                      ? cfg.window_radius
                      : 10.0 * std::pow(t.t0, -2.0) * std::pow(t.eps, 2.0 / 7.0);
    try {
      Spectrum spec = direct_spectrum(p, flow, grid, center, radius);
      if (!dump_modes) {
        for (size_t i = 0; i < spec.eigenvalues.size(); ++i) {
          Record r;
          r.add("eps", t.eps);
          r.add("mach", t.mach);
          r.add("lambda", t.lambda);
          r.add("t0", t.t0);
          r.add("grid_n", static_cast<Real>(n));
          r.add_complex("c", spec.eigenvalues[i]);
          r.add("physical", spec.physical[i] ? 1.0 : 0.0);
          r.add("drift", spec.drift[i]);
          const ModeBundle& b = spec.eigenvectors[i];
          Real scale = std::max(b.u.cwiseAbs().maxCoeff(), b.v.cwiseAbs().maxCoeff());
          Real bc = std::max({std::abs(b.boundary.u_top), std::abs(b.boundary.u_bottom),
                              std::abs(b.boundary.v_top), std::abs(b.boundary.v_bottom)});
          r.add("bc_residual", scale > 0 ? bc / scale : 0.0);
          records.push_back(r);
        }
      } else {
        // closest flagged-physical eigenvector, normalized to max|u| = 1
        int pick = -1;
        for (size_t i = 0; i < spec.eigenvalues.size(); ++i)
          if (spec.physical[i]) {
            pick = static_cast<int>(i);
            break;
          }
        if (pick < 0) pick = 0;
        ModeBundle b = spec.eigenvectors[pick];
        Complex norm = 0.0;
        Real best = 0.0;
        for (int j = 0; j < b.u.size(); ++j)
          if (std::abs(b.u[j]) > best) {
            best = std::abs(b.u[j]);
            norm = b.u[j];
          }
        for (int j = 0; j < b.u.size(); ++j) {
          Record r;
          r.add("y", grid.nodes[j]);
          r.add_complex("rho", b.rho[j] / norm);
          r.add_complex("u", b.u[j] / norm);
          r.add_complex("v", b.v[j] / norm);
          records.push_back(r);
        }
      }
    } catch (const NumericalError&) {
      any_fail = true;
    }
  }
  emit(cfg, records, {});
  return any_fail ? 2 : 0;
}

int cmd_validate(const RunConfig& cfg) {
  int n = cfg.grid_n > 0 ? cfg.grid_n : 64;
  ChebGrid grid = cheb_grid(n);
  BaseFlow flow = make_poiseuille(grid);
  ValidationReport rep = validate_profile(flow);
  std::vector<Record> records;
  for (const auto& item : rep.items) {
    Record r;
    r.add("check", item.name);
    r.add("pass", item.pass ? 1.0 : 0.0);
    r.add("value", item.value);
    records.push_back(r);
  }
  for (Real e : cfg.eps)
    for (Real m : cfg.mach)
      for (Real l : cfg.lambda)
        for (Real t : cfg.t0) {
          Record r;
          std::ostringstream os;
          os << "params(" << fmt_real(e) << "," << fmt_real(m) << "," << fmt_real(l) << ","
             << fmt_real(t) << ")";
          bool ok = true;
          try {
            Params::make(e, m, l, t);
          } catch (const ConfigError&) {
            ok = false;
          }
          r.add("check", os.str());
          r.add("pass", ok ? 1.0 : 0.0);
          r.add("value", 0.0);
          records.push_back(r);
        }
  emit(cfg, records, {});
  return rep.all_pass ? 0 : 1;
}

}  // namespace

int default_grid_n(Real eps) { return eps >= 1e-5 ? 192 : 384; }

std::vector<Real> parse_sweep_list(const std::string& text) {
  std::vector<Real> out;
  auto parse_one = [](const std::string& s) {
    try {
      size_t pos = 0;
      Real v = std::stod(s, &pos);
      if (pos != s.size()) throw ConfigError("bad number: " + s);
      return v;
    } catch (const std::exception&) {
      throw ConfigError("bad number: " + s);
    }
  };
  if (text.find(':') != std::string::npos) {
    std::istringstream is(text);
    std::string a, b, c;
    if (!std::getline(is, a, ':') || !std::getline(is, b, ':') || !std::getline(is, c))
      throw ConfigError("sweep range needs start:stop:count");
    Real start = parse_one(a), stop = parse_one(b);
    int count = static_cast<int>(parse_one(c));
    if (count < 1 || start <= 0.0 || stop <= 0.0)
      throw ConfigError("sweep range needs positive bounds and count >= 1");
    if (count == 1) return {start};
    for (int i = 0; i < count; ++i)
      out.push_back(std::exp(std::log(start) + (std::log(stop) - std::log(start)) * i /
                                                   (count - 1)));
    return out;
  }
  std::istringstream is(text);
  std::string item;
  while (std::getline(is, item, ',')) {
    if (item.empty()) continue;
    out.push_back(parse_one(item));
  }
  if (out.empty()) throw ConfigError("empty sweep list");
  for (Real v : out)
    if (v <= 0.0 && v != 0.0) throw ConfigError("sweep values must be positive");
  return out;
}

void load_config_file(const std::string& path, RunConfig* cfg) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot read config file: " + path);
  std::string line;
  while (std::getline(f, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    auto notspace = [](unsigned char ch) { return !std::isspace(ch); };
    line.erase(line.begin(), std::find_if(line.begin(), line.end(), notspace));
    line.erase(std::find_if(line.rbegin(), line.rend(), notspace).base(), line.end());
    if (line.empty()) continue;
    if (line.front() == '[') continue;  // sections only group keys
    auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("config line needs key = value: " + line);
    std::string key = line.substr(0, eq), val = line.substr(eq + 1);
    auto trim = [&](std::string s) {
      s.erase(s.begin(), std::find_if(s.begin(), s.end(), notspace));
      s.erase(std::find_if(s.rbegin(), s.rend(), notspace).base(), s.end());
      return s;
    };
    key = trim(key);
    val = trim(val);
    if (key == "command")
      cfg->command = val;
    else if (key == "eps")
      cfg->eps = parse_sweep_list(val);
    else if (key == "mach")
      cfg->mach = parse_sweep_list(val);
    else if (key == "lambda")
      cfg->lambda = parse_sweep_list(val);
    else if (key == "t0")
      cfg->t0 = parse_sweep_list(val);
    else if (key == "grid-n" || key == "grid_n")
      cfg->grid_n = std::stoi(val);
    else if (key == "tol")
      cfg->tol = std::stod(val);
    else if (key == "out")
      cfg->out_path = val;
    else if (key == "format")
      cfg->format = val;
    else if (key == "window-center" || key == "window_center") {
      auto comma = val.find(',');
      if (comma == std::string::npos) throw ConfigError("window-center needs re,im");
      cfg->window_center = Complex(std::stod(val.substr(0, comma)), std::stod(val.substr(comma + 1)));
      cfg->have_window_center = true;
    } else if (key == "window-radius" || key == "window_radius")
      cfg->window_radius = std::stod(val);
    else
      throw ConfigError("unknown config key: " + key);
  }
}

RunConfig parse_cli(int argc, const char* const* argv) {
  RunConfig cfg;
  CLI::App app{"compressible channel-flow instability toolkit"};
  std::string eps_s, mach_s, lambda_s, t0_s, wc_s;
  app.add_option("command", cfg.command, "one of: root, eig, sweep, modes, validate")
      ->required();
  app.add_option("--config", cfg.config_path, "config file (key = value, optional [sweep])");
  app.add_option("--eps", eps_s, "viscosity parameter (value, list, or start:stop:count)");
  app.add_option("--mach", mach_s, "Mach number");
  app.add_option("--lambda", lambda_s, "bulk viscosity ratio");
  app.add_option("--t0", t0_s, "frequency amplitude");
  app.add_option("--grid-n", cfg.grid_n, "collocation degree (0: default by eps)");
  app.add_option("--tol", cfg.tol, "dispersion root tolerance");
  app.add_option("--out", cfg.out_path, "output path (default stdout)");
  app.add_option("--format", cfg.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--window-center", wc_s, "eigenvalue window center re,im");
  app.add_option("--window-radius", cfg.window_radius, "eigenvalue window radius");

  std::vector<std::string> args(argv + 1, argv + argc);
  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    throw ConfigError(e.what());
  }
  if (!cfg.config_path.empty()) {
    RunConfig file_cfg;
    file_cfg.command = cfg.command;
    load_config_file(cfg.config_path, &file_cfg);
    std::swap(cfg, file_cfg);
  }
  if (!eps_s.empty()) cfg.eps = parse_sweep_list(eps_s);
  if (!mach_s.empty()) cfg.mach = parse_sweep_list(mach_s);
  if (!lambda_s.empty()) cfg.lambda = parse_sweep_list(lambda_s);
  if (!t0_s.empty()) cfg.t0 = parse_sweep_list(t0_s);
  if (!wc_s.empty()) {
    auto comma = wc_s.find(',');
    if (comma == std::string::npos) throw ConfigError("window-center needs re,im");
    cfg.window_center =
        Complex(std::stod(wc_s.substr(0, comma)), std::stod(wc_s.substr(comma + 1)));
    cfg.have_window_center = true;
  }
  static const char* kCommands[] = {"root", "eig", "sweep", "modes", "validate"};
  bool known = false;
  for (const char* c : kCommands) known = known || cfg.command == c;
  if (!known) throw ConfigError("unknown command: " + cfg.command);
  if (cfg.format != "csv" && cfg.format != "json")
    throw ConfigError("format must be csv or json");
  return cfg;
}

int run_config(const RunConfig& cfg) {
  // validate all parameter tuples up front so config errors exit with 1
  for (Real e : cfg.eps)
    for (Real m : cfg.mach)
      for (Real l : cfg.lambda)
        for (Real t : cfg.t0) Params::make(e, m, l, t);
  if (cfg.command == "root") return cmd_root(cfg, /*with_fits=*/false);
  if (cfg.command == "sweep") return cmd_root(cfg, /*with_fits=*/true);
  if (cfg.command == "eig") return cmd_eig(cfg, /*dump_modes=*/false);
  if (cfg.command == "modes") return cmd_eig(cfg, /*dump_modes=*/true);
  if (cfg.command == "validate") return cmd_validate(cfg);
  throw ConfigError("unknown command: " + cfg.command);
}

int run_cli(int argc, const char* const* argv) {
  try {
    RunConfig cfg = parse_cli(argc, argv);
    return run_config(cfg);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace chanstab
