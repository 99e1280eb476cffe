// nhbloch: data-emitting CLI. Plots are left to external tools; every
// subcommand writes CSV/JSON artifacts (or stdout when --out is not given).

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "nhbloch/bands.hpp"
#include "nhbloch/bloch.hpp"
#include "nhbloch/eig.hpp"
#include "nhbloch/ep.hpp"
#include "nhbloch/gauge.hpp"
#include "nhbloch/potential.hpp"

using json = nlohmann::json;
using namespace nhbloch;
namespace fs = std::filesystem;

namespace {

// exit codes: 1 usage, 2 malformed config/input, 3 ineligible potential,
// 4 computation failure
struct CliError : std::runtime_error {
  int code;
  CliError(int c, const std::string& msg) : std::runtime_error(msg), code(c) {}
};

std::string g17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

json complex_json(const cxd& z) { return json{{"re", z.real()}, {"im", z.imag()}}; }

// ---- options shared across subcommands ---------------------------------

struct Opts {
  std::string potential = "V1:1,0.8";
  std::string k = "0";
  double tau = std::numeric_limits<double>::quiet_NaN();
  int M = 32;
  int bands = 3;
  std::string out;
  std::string format = "csv";
  int fd_points = 1024;
  int threads = 0;  // 0 = resolve from NHBLOCH_THREADS, else 1
  std::string config;
  // same key registered on every subcommand; only the parsed one has counts
  std::map<std::string, std::vector<CLI::Option*>> opt;
  bool given(const std::string& key) const {
    for (const auto* op : opt.at(key))
      if (op->count()) return true;
    return false;
  }
};

void add_common(CLI::App* cmd, Opts& o) {
  o.opt["potential"].push_back(
      cmd->add_option("--potential", o.potential,
                      "shorthand (V1:V0,tau | V1+V2:V0,tau | fig5:V0,tau) "
                      "or a JSON file path"));
  o.opt["k"].push_back(cmd->add_option("--k", o.k, "k value or grid min:max:count"));
  o.opt["tau"].push_back(cmd->add_option("--tau", o.tau, "gain/loss ratio"));
  o.opt["M"].push_back(cmd->add_option("-M,--truncation", o.M, "plane-wave truncation"));
  o.opt["bands"].push_back(cmd->add_option("--bands", o.bands, "number of bands"));
  o.opt["out"].push_back(cmd->add_option("--out", o.out, "output file or directory"));
  o.opt["format"].push_back(cmd->add_option("--format", o.format, "csv or json")
                                ->check(CLI::IsMember({"csv", "json"})));
  o.opt["fd_points"].push_back(cmd->add_option("--fd-points", o.fd_points, "FD grid size"));
  o.opt["threads"].push_back(cmd->add_option("--threads", o.threads, "worker threads"));
  cmd->add_option("--config", o.config, "JSON config file (flags take precedence)");
}

// flags > config > defaults
void apply_config(Opts& o) {
  if (o.config.empty()) return;
  std::ifstream in(o.config);
  if (!in) throw CliError(2, "cannot open config file: " + o.config);
  json cfg;
  try {
    in >> cfg;
  } catch (const std::exception& e) {
    throw CliError(2, std::string("malformed config: ") + e.what());
  }
  auto take = [&](const char* key, auto& slot) {
    if (cfg.contains(key) && !o.given(key))
      slot = cfg.at(key).get<std::decay_t<decltype(slot)>>();
  };
  take("potential", o.potential);
  take("k", o.k);
  take("tau", o.tau);
  take("M", o.M);
  take("bands", o.bands);
  take("out", o.out);
  take("format", o.format);
  take("fd_points", o.fd_points);
  take("threads", o.threads);
}

int resolve_threads(int flag_value) {
  if (flag_value > 0) return flag_value;
  if (const char* env = std::getenv("NHBLOCH_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return 1;
}

// ---- potential / grid parsing ------------------------------------------

struct NamedPotential {
  std::string name;  // empty when loaded from a file
  double v0 = 0, tau = 0;
  PotentialSpec spec{PotentialSpec::CoeffMap{}};
};

NamedPotential parse_potential(const std::string& text, std::optional<double> tau_override) {
  NamedPotential r;
  const auto colon = text.find(':');
  const std::string head = text.substr(0, colon);
  if (head == "V1" || head == "V1+V2" || head == "fig5") {
    if (colon == std::string::npos) throw CliError(2, "shorthand needs parameters: " + text);
    double v0, tau;
    char comma;
    std::istringstream ss(text.substr(colon + 1));
    if (!(ss >> v0 >> comma >> tau) || comma != ',')
      throw CliError(2, "malformed potential shorthand: " + text);
    if (tau_override) tau = *tau_override;
    r.name = head;
    r.v0 = v0;
    r.tau = tau;
    if (head == "V1")
      r.spec = PotentialSpec::v1(v0, tau);
    else if (head == "V1+V2")
      r.spec = PotentialSpec::v1_plus_v2(v0, tau);
    else
      r.spec = PotentialSpec::v1_nnn_matched(v0, tau);
    return r;
  }
  std::ifstream in(text);
  if (!in) throw CliError(2, "unknown potential shorthand or unreadable file: " + text);
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    r.spec = PotentialSpec::from_json(buf.str());
  } catch (const std::exception& e) {
    throw CliError(2, std::string("malformed potential file: ") + e.what());
  }
  return r;
}

PotentialFamily family_of(const NamedPotential& p) {
  if (p.name.empty())
    throw CliError(2, "this subcommand needs a named potential shorthand (V1, V1+V2, fig5)");
  const double v0 = p.v0;
  if (p.name == "V1") return [v0](double t) { return PotentialSpec::v1(v0, t); };
  if (p.name == "V1+V2") return [v0](double t) { return PotentialSpec::v1_plus_v2(v0, t); };
  return [v0](double t) { return PotentialSpec::v1_nnn_matched(v0, t); };
}

std::vector<double> parse_grid(const std::string& text) {
  const auto c1 = text.find(':');
  if (c1 == std::string::npos) {
    try {
      return {std::stod(text)};
    } catch (...) {
      throw CliError(2, "malformed grid spec: " + text);
    }
  }
  const auto c2 = text.find(':', c1 + 1);
  if (c2 == std::string::npos) throw CliError(2, "grid spec needs min:max:count: " + text);
  double lo, hi;
  long count;
  try {
    lo = std::stod(text.substr(0, c1));
    hi = std::stod(text.substr(c1 + 1, c2 - c1 - 1));
    count = std::stol(text.substr(c2 + 1));
  } catch (...) {
    throw CliError(2, "malformed grid spec: " + text);
  }
  if (count < 1) throw CliError(2, "grid count must be positive: " + text);
  std::vector<double> g(count);
  for (long i = 0; i < count; ++i)
    g[i] = count == 1 ? lo : lo + (hi - lo) * double(i) / double(count - 1);
  return g;
}

// ---- output plumbing ----------------------------------------------------

class Sink {
 public:
  explicit Sink(const std::string& out) : path_(out) {
    if (!path_.empty()) {
      file_.open(path_);
      if (!file_) throw CliError(2, "cannot open output file: " + path_);
    }
  }
  std::ostream& stream() { return path_.empty() ? std::cout : file_; }

 private:
  std::string path_;
  std::ofstream file_;
};

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream f(p);
  if (!f) throw CliError(2, "cannot open output file: " + p.string());
  f << text;
}

std::string bands_csv(const BandStructure& bs) {
  std::string s = "k,band,re_omega,im_omega\n";
  for (size_t ik = 0; ik < bs.k_grid.size(); ++ik)
    for (int b = 0; b < bs.band_count; ++b)
      s += g17(bs.k_grid[ik]) + "," + std::to_string(b + 1) + "," +
           g17(bs.energies[ik][b].real()) + "," + g17(bs.energies[ik][b].imag()) + "\n";
  return s;
}

json bands_json(const BandStructure& bs) {
  json j;
  j["k_grid"] = bs.k_grid;
  j["band_count"] = bs.band_count;
  j["energies"] = json::array();
  for (const auto& row : bs.energies) {
    json jr = json::array();
    for (const cxd& w : row) jr.push_back(complex_json(w));
    j["energies"].push_back(jr);
  }
  return j;
}

json report_json(const EpReport& r) {
  json j;
  j["k"] = r.k;
  j["tau"] = r.tau;
  j["band_lo"] = r.band_lo;
  j["min_gap"] = r.min_gap;
  j["overlap_at_min"] = r.overlap_at_min;
  j["phase_rigidity_at_min"] = r.phase_rigidity_at_min;
  j["classification"] = to_string(r.classification);
  if (r.dispersion) {
    j["dispersion"] = {{"exponent", r.dispersion->exponent},
                       {"std_error", r.dispersion->std_error},
                       {"points", r.dispersion->points}};
  }
  return j;
}

json fit_json(const DispersionFit& f) {
  return json{{"exponent", f.exponent}, {"std_error", f.std_error}, {"points", f.points}};
}

// ---- leaf subcommands ---------------------------------------------------

int cmd_bands(Opts& o) {
  apply_config(o);
  const auto p = parse_potential(
      o.potential, o.given("tau") ? std::optional<double>(o.tau) : std::nullopt);
  const auto bs = band_sweep(p.spec, parse_grid(o.k), o.M, o.bands, false,
                             resolve_threads(o.threads));
  Sink sink(o.out);
  if (o.format == "csv")
    sink.stream() << bands_csv(bs);
  else
    sink.stream() << bands_json(bs).dump(2) << "\n";
  return 0;
}

int cmd_fdcheck(Opts& o) {
  apply_config(o);
  const auto p = parse_potential(
      o.potential, o.given("tau") ? std::optional<double>(o.tau) : std::nullopt);
  std::string csv = "k,band,re_pw,im_pw,re_fd,im_fd,abs_dev\n";
  json rows = json::array();
  for (double k : parse_grid(o.k)) {
    const cvec pw = eig_values_only(build_bloch(p.spec, k, o.M).entries);
    const cvec fd = fd_band_oracle(p.spec, k, o.fd_points, o.bands);
    for (int b = 0; b < o.bands; ++b) {
      const double dev = std::abs(pw[b] - fd[b]);
      csv += g17(k) + "," + std::to_string(b + 1) + "," + g17(pw[b].real()) + "," +
             g17(pw[b].imag()) + "," + g17(fd[b].real()) + "," + g17(fd[b].imag()) + "," +
             g17(dev) + "\n";
      rows.push_back({{"k", k},
                      {"band", b + 1},
                      {"momentum", complex_json(pw[b])},
                      {"fd", complex_json(fd[b])},
                      {"abs_dev", dev}});
    }
  }
  Sink sink(o.out);
  if (o.format == "csv")
    sink.stream() << csv;
  else
    sink.stream() << rows.dump(2) << "\n";
  return 0;
}

int cmd_gauge(Opts& o) {
  apply_config(o);
  const auto p = parse_potential(
      o.potential, o.given("tau") ? std::optional<double>(o.tau) : std::nullopt);
  if (!symmetrizable(p.spec))
    throw CliError(3, "potential is not symmetrizable by an imaginary gauge transform");
  const auto form = off_diagonal_form(p.spec);
  const auto angle = gauge_angle(form.nn_minus, form.nn_plus);
  const auto eq = hermitian_equivalent(p.spec);
  json j;
  j["theta"] = complex_json(angle.theta);
  j["regime"] = to_string(angle.regime);
  j["eligible"] = eq.eligible;
  j["character"] = to_string(eq.character);
  j["equivalent_potential"] = json::parse(eq.transformed_potential->to_json());
  Sink sink(o.out);
  sink.stream() << j.dump(2) << "\n";
  return 0;
}

int cmd_pr(Opts& o) {
  apply_config(o);
  const auto p = parse_potential(
      o.potential, o.given("tau") ? std::optional<double>(o.tau) : std::nullopt);
  const double k = parse_grid(o.k).front();
  const auto h = build_bloch(p.spec, k, o.M);
  const auto d = eig(h.entries);
  const bool can_gauge = symmetrizable(p.spec);
  cvec factors;
  if (can_gauge) {
    const auto form = off_diagonal_form(p.spec);
    factors = gauge_factors(o.M, gauge_angle(form.nn_minus, form.nn_plus));
  }
  std::string csv = "band,pr,pr_gauged\n";
  json rows = json::array();
  for (int b = 0; b < o.bands; ++b) {
    const double pr = participation_ratio(d.right_eigenvectors[b]);
    double pr_g = pr;
    if (can_gauge) {
      cvec gv = d.right_eigenvectors[b];
      for (size_t i = 0; i < gv.size(); ++i) gv[i] *= factors[i];
      pr_g = participation_ratio(gv);
    }
    csv += std::to_string(b + 1) + "," + g17(pr) + "," + g17(pr_g) + "\n";
    rows.push_back({{"band", b + 1}, {"pr", pr}, {"pr_gauged", pr_g}});
  }
  Sink sink(o.out);
  if (o.format == "csv")
    sink.stream() << csv;
  else
    sink.stream() << rows.dump(2) << "\n";
  return 0;
}

std::string wavefunction_csv(const cvec& coeffs, double k, double period, int samples) {
  std::string csv = "x,re_psi,im_psi,abs_psi\n";
  std::vector<double> xg(samples);
  for (int i = 0; i < samples; ++i) xg[i] = period * i / (samples - 1);
  const cvec psi = reconstruct_wavefunction(coeffs, k, xg);
  for (int i = 0; i < samples; ++i)
    csv += g17(xg[i]) + "," + g17(psi[i].real()) + "," + g17(psi[i].imag()) + "," +
           g17(std::abs(psi[i])) + "\n";
  return csv;
}

int cmd_wavefunction(Opts& o, int band, int samples) {
  apply_config(o);
  const auto p = parse_potential(
      o.potential, o.given("tau") ? std::optional<double>(o.tau) : std::nullopt);
  if (band < 1) throw CliError(2, "band index is 1-based");
  const double k = parse_grid(o.k).front();
  const auto d = eig(build_bloch(p.spec, k, o.M).entries);
  if (band > static_cast<int>(d.eigenvalues.size()))
    throw CliError(2, "band index exceeds the spectrum size");
  Sink sink(o.out);
  sink.stream() << wavefunction_csv(d.right_eigenvectors[band - 1], k, p.spec.period(),
                                    samples);
  return 0;
}

int cmd_ep_scan(Opts& o, int band_lo, double tau_min, double tau_max) {
  apply_config(o);
  const auto p = parse_potential(o.potential, std::nullopt);
  EpOptions ep;
  ep.truncation = o.M;
  const auto r = ep_scan(family_of(p), parse_grid(o.k).front(), band_lo, tau_min, tau_max, ep);
  Sink sink(o.out);
  sink.stream() << report_json(r).dump(2) << "\n";
  return 0;
}

int cmd_ep_classify(Opts& o, int band_lo, double tau_ep) {
  apply_config(o);
  const auto p = parse_potential(o.potential, std::nullopt);
  EpOptions ep;
  ep.truncation = o.M;
  const auto cls = classify_ep(family_of(p), parse_grid(o.k).front(), band_lo, tau_ep, ep);
  json j{{"k", parse_grid(o.k).front()},
         {"tau", tau_ep},
         {"band_lo", band_lo},
         {"classification", to_string(cls)}};
  Sink sink(o.out);
  sink.stream() << j.dump(2) << "\n";
  return 0;
}

int cmd_dispersion(Opts& o, int band_lo, double tau_ep, int side, bool im_gap) {
  apply_config(o);
  const auto p = parse_potential(o.potential, std::nullopt);
  EpOptions ep;
  ep.truncation = o.M;
  const auto fit =
      dispersion_exponent(family_of(p), parse_grid(o.k).front(), band_lo, tau_ep, side, im_gap, ep);
  Sink sink(o.out);
  sink.stream() << fit_json(fit).dump(2) << "\n";
  return 0;
}

int cmd_encircle(Opts& o, const std::string& center, const std::string& radius, int steps,
                 const std::string& track) {
  apply_config(o);
  const auto p = parse_potential(o.potential, std::nullopt);
  const auto family = family_of(p);
  double k0, tau0, rk, rtau;
  char c1, c2;
  std::istringstream sc(center), sr(radius);
  if (!(sc >> k0 >> c1 >> tau0) || c1 != ',') throw CliError(2, "malformed --center k,tau");
  if (!(sr >> rk >> c2 >> rtau) || c2 != ',') throw CliError(2, "malformed --radius rk,rtau");
  std::vector<std::pair<double, double>> loop;
  const int segs = 64;
  for (int i = 0; i < segs; ++i) {
    const double a = 2.0 * M_PI * i / segs;
    loop.push_back({k0 + rk * std::cos(a), tau0 + rtau * std::sin(a)});
  }
  std::vector<int> tracked;
  if (!track.empty()) {
    std::istringstream ts(track);
    std::string tok;
    while (std::getline(ts, tok, ',')) tracked.push_back(std::stoi(tok));
  }
  const int M = o.M;
  const auto r = encircle(
      [&family, M](double k, double tau) { return build_bloch(family(tau), k, M).entries; },
      loop, steps, tracked);
  json j{{"permutation", r.permutation},
         {"continuity_floor", r.continuity_floor},
         {"steps_used", r.steps_used},
         {"is_identity", [&] {
            for (size_t i = 0; i < r.permutation.size(); ++i)
              if (r.permutation[i] != static_cast<int>(i)) return false;
            return true;
          }()}};
  Sink sink(o.out);
  sink.stream() << j.dump(2) << "\n";
  return 0;
}

int cmd_riemann(Opts& o, const std::string& dspec, const std::string& gspec, double t) {
  apply_config(o);
  const auto dg = parse_grid(dspec), gg = parse_grid(gspec);
  const auto mesh = riemann_sheet_grid(dg.front(), dg.back(), gg.front(), gg.back(), t,
                                       static_cast<int>(dg.size()), static_cast<int>(gg.size()));
  std::string csv = "delta,g,re_eplus,im_eplus,re_eminus,im_eminus\n";
  for (size_t ig = 0; ig < mesh.gs.size(); ++ig)
    for (size_t id = 0; id < mesh.deltas.size(); ++id) {
      const cxd ep = mesh.e_plus[ig][id], em = mesh.e_minus[ig][id];
      csv += g17(mesh.deltas[id]) + "," + g17(mesh.gs[ig]) + "," + g17(ep.real()) + "," +
             g17(ep.imag()) + "," + g17(em.real()) + "," + g17(em.imag()) + "\n";
    }
  Sink sink(o.out);
  sink.stream() << csv;
  return 0;
}

int cmd_truncated(Opts& o, const std::string& model, double v0, double tau,
                  std::optional<double> omega, std::optional<double> omega_prime) {
  apply_config(o);
  TruncatedModel m;
  if (model == "H2")
    m = TruncatedModel::H2;
  else if (model == "H3")
    m = TruncatedModel::H3;
  else if (model == "H3nnn")
    m = TruncatedModel::H3_nnn;
  else if (model == "H4")
    m = TruncatedModel::H4;
  else
    throw CliError(2, "unknown model (H2, H3, H3nnn, H4): " + model);
  const auto r = truncated_model(m, v0, tau, omega, omega_prime);
  json j;
  j["model"] = model;
  j["matrix"] = json::array();
  for (int i = 0; i < r.matrix.rows(); ++i) {
    json row = json::array();
    for (int jj = 0; jj < r.matrix.cols(); ++jj) row.push_back(complex_json(r.matrix(i, jj)));
    j["matrix"].push_back(row);
  }
  j["numeric"] = json::array();
  for (const cxd& z : r.numeric) j["numeric"].push_back(complex_json(z));
  j["closed_form"] = json::array();
  for (const cxd& z : r.closed_form) j["closed_form"].push_back(complex_json(z));
  Sink sink(o.out);
  sink.stream() << j.dump(2) << "\n";
  return 0;
}

// ---- figure bundles -----------------------------------------------------

struct Bundle {
  fs::path dir;
  json manifest;
  explicit Bundle(const fs::path& d, const std::string& title) : dir(d) {
    fs::create_directories(dir);
    manifest["bundle"] = title;
    manifest["files"] = json::array();
  }
  void add(const std::string& file, const std::string& content, const std::string& columns,
           const std::string& panel) {
    write_text(dir / file, content);
    manifest["files"].push_back({{"name", file}, {"columns", columns}, {"panel", panel}});
  }
  void finish() { write_text(dir / "manifest.json", manifest.dump(2) + "\n"); }
};

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = n == 1 ? a : a + (b - a) * i / (n - 1);
  return v;
}

std::string surface_csv(const PotentialFamily& family, const std::vector<double>& kg,
                        const std::vector<double>& tg, int M, int nb, int threads) {
  std::string csv = "k,tau,band,re_omega,im_omega\n";
  for (double tau : tg) {
    const auto bs = band_sweep(family(tau), kg, M, nb, false, threads);
    for (size_t ik = 0; ik < kg.size(); ++ik)
      for (int b = 0; b < nb; ++b)
        csv += g17(kg[ik]) + "," + g17(tau) + "," + std::to_string(b + 1) + "," +
               g17(bs.energies[ik][b].real()) + "," + g17(bs.energies[ik][b].imag()) + "\n";
  }
  return csv;
}

std::string tau_sweep_csv(const PotentialFamily& family, double k,
                          const std::vector<double>& tg, int M, int nb) {
  std::string csv = "tau,band,re_omega,im_omega\n";
  for (double tau : tg) {
    const cvec w = eig_values_only(build_bloch(family(tau), k, M).entries);
    for (int b = 0; b < nb; ++b)
      csv += g17(tau) + "," + std::to_string(b + 1) + "," + g17(w[b].real()) + "," +
             g17(w[b].imag()) + "\n";
  }
  return csv;
}

// side-by-side band comparison of a potential and its Hermitian equivalent
void equivalence_bundle(Bundle& bundle, const PotentialSpec& original,
                        const std::string& panel, int M, int nb, int threads) {
  const auto eq = hermitian_equivalent(original);
  const auto kg = linspace(-0.5, 0.5, 101);
  const auto bs_orig = band_sweep(original, kg, M, nb, false, threads);
  const auto bs_eq = band_sweep(*eq.transformed_potential, kg, M, nb, false, threads);
  bundle.add("bands_original.csv", bands_csv(bs_orig), "k,band,re_omega,im_omega",
             panel + ": complex potential");
  bundle.add("bands_equivalent.csv", bands_csv(bs_eq), "k,band,re_omega,im_omega",
             panel + ": Hermitian-equivalent potential");
  double dev = 0;
  for (size_t ik = 0; ik < kg.size(); ++ik)
    for (int b = 0; b < nb; ++b)
      dev = std::max(dev, std::abs(bs_orig.energies[ik][b] - bs_eq.energies[ik][b]));
  json j{{"max_band_deviation", dev},
         {"equivalent_potential", json::parse(eq.transformed_potential->to_json())}};
  bundle.add("equivalence.json", j.dump(2) + "\n", "json report", panel + ": max deviation");
}

int cmd_figure(Opts& o, const std::string& name) {
  apply_config(o);
  const int threads = resolve_threads(o.threads);
  const fs::path dir = o.out.empty() ? fs::path(name + "_data") : fs::path(o.out);
  Bundle bundle(dir, name);

  if (name == "fig1") {
    const auto p = PotentialSpec::v1(1.0, 0.8);
    equivalence_bundle(bundle, p, "unbroken-phase bands", o.M, 3, threads);
    // k=0 band-1 wavefunction, gauged vs equivalent
    const auto d = eig(build_bloch(p, 0.0, o.M).entries);
    const auto form = off_diagonal_form(p);
    const cvec f = gauge_factors(o.M, gauge_angle(form.nn_minus, form.nn_plus));
    cvec gv = d.right_eigenvectors[0];
    for (size_t i = 0; i < gv.size(); ++i) gv[i] *= f[i];
    const auto eq = hermitian_equivalent(p);
    const auto de = eig(build_bloch(*eq.transformed_potential, 0.0, o.M).entries);
    const auto xg = linspace(0.0, p.period(), 257);
    const cvec pg = reconstruct_wavefunction(gv, 0.0, xg);
    const cvec pe = reconstruct_wavefunction(de.right_eigenvectors[0], 0.0, xg);
    double mg = 0, me = 0;
    for (const cxd& z : pg) mg = std::max(mg, std::abs(z));
    for (const cxd& z : pe) me = std::max(me, std::abs(z));
    std::string csv = "x,abs_psi_gauged,abs_psi_equivalent\n";
    for (size_t i = 0; i < xg.size(); ++i)
      csv += g17(xg[i]) + "," + g17(std::abs(pg[i]) / mg) + "," + g17(std::abs(pe[i]) / me) + "\n";
    bundle.add("wavefunction_k0.csv", csv, "x,abs_psi_gauged,abs_psi_equivalent",
               "k=0 band-1 wavefunction moduli (normalized)");
    // participation ratios before/after the gauge
    const double pr = participation_ratio(d.right_eigenvectors[0]);
    const double pr_g = participation_ratio(gv);
    bundle.add("participation.json",
               json{{"pr", pr}, {"pr_gauged", pr_g}}.dump(2) + "\n", "json report",
               "band-1 participation ratios");
  } else if (name == "fig2") {
    equivalence_bundle(bundle, PotentialSpec::v1(1.0, 1.1), "broken-phase bands", o.M, 3,
                       threads);
  } else if (name == "fig3" || name == "fig4") {
    const bool swapped = name == "fig4";
    const PotentialFamily family =
        swapped ? PotentialFamily([](double t) { return PotentialSpec::v1_plus_v2(1.0, t); })
                : PotentialFamily([](double t) { return PotentialSpec::v1(1.0, t); });
    const auto kg = linspace(-0.5, 0.5, 101);
    bundle.add("bands_tau1.csv", bands_csv(band_sweep(family(1.0), kg, o.M, 5, false, threads)),
               "k,band,re_omega,im_omega", "bands at tau=1");
    bundle.add("surface.csv",
               surface_csv(family, linspace(-0.5, 0.5, 41), linspace(0.9, 1.1, 41), 16, 5,
                           threads),
               "k,tau,band,re_omega,im_omega", "(k, tau) band surfaces");
    EpOptions ep;
    ep.truncation = o.M;
    bundle.add("ep_k0.json", report_json(ep_scan(family, 0.0, 2, 0.9, 1.1, ep)).dump(2) + "\n",
               "json EpReport", "EP at k=0, bands 2-3");
    bundle.add("ep_k05.json", report_json(ep_scan(family, 0.5, 1, 0.9, 1.1, ep)).dump(2) + "\n",
               "json EpReport", "EP at k=0.5, bands 1-2");
    const auto tg = linspace(0.9, 1.1, 81);
    bundle.add("tau_sweep_k0.csv", tau_sweep_csv(family, 0.0, tg, o.M, 5),
               "tau,band,re_omega,im_omega", "tau sweep at k=0");
    bundle.add("tau_sweep_k05.csv", tau_sweep_csv(family, 0.5, tg, o.M, 5),
               "tau,band,re_omega,im_omega", "tau sweep at k=0.5");
  } else if (name == "fig5") {
    equivalence_bundle(bundle, PotentialSpec::v1_nnn_matched(1.0, 0.5),
                       "NNN-matched potential bands", o.M, 3, threads);
  } else if (name == "s1") {
    const auto p = PotentialSpec::v1(1.0, 0.8);
    for (double k : {0.0, 0.5}) {
      const auto d = eig(build_bloch(p, k, o.M).entries);
      const cvec& a = d.right_eigenvectors[0];
      std::string csv = "m,ln_abs_a\n";
      for (int i = 0; i < static_cast<int>(a.size()); ++i)
        if (std::abs(a[i]) > 1e-300)
          csv += std::to_string(i - o.M) + "," + g17(std::log(std::abs(a[i]))) + "\n";
      const std::string file = k == 0.0 ? "tail_k0.csv" : "tail_k05.csv";
      bundle.add(file, csv, "m,ln_abs_a",
                 "band-1 coefficient profile at k=" + g17(k) +
                     " (the k=0.5 peak sits displaced by -0.5)");
    }
  } else if (name == "s3" || name == "s4") {
    const int band_lo = name == "s3" ? 2 : 4;
    const PotentialFamily family = [](double t) { return PotentialSpec::v1(1.0, t); };
    EpOptions ep;
    ep.truncation = o.M;
    std::string csv = "dtau,gap\n";
    for (int i = 0; i < 24; ++i) {
      const double dtau = std::pow(10.0, -4.0 + 3.0 * i / 23.0);
      const cvec w = eig_values_only(build_bloch(family(1.0 + dtau), 0.0, o.M).entries);
      csv += g17(dtau) + "," + g17(std::abs(w[band_lo] - w[band_lo - 1])) + "\n";
    }
    bundle.add("gap_vs_dtau.csv", csv, "dtau,gap",
               "splitting of bands " + std::to_string(band_lo) + "-" +
                   std::to_string(band_lo + 1) + " near tau=1, k=0");
    const auto fit = dispersion_exponent(family, 0.0, band_lo, 1.0, +1, false, ep);
    bundle.add("fit.json", fit_json(fit).dump(2) + "\n", "json DispersionFit",
               "log-log dispersion exponent");
  } else {
    throw CliError(2, "unknown figure name: " + name);
  }
  bundle.finish();
  std::cout << (dir / "manifest.json").string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"non-Hermitian Bloch band toolkit"};
  app.require_subcommand(1);

  Opts opts;
  int band = 1, band_lo = 2, samples = 257, steps = 256, side = +1;
  double tau_min = 0.9, tau_max = 1.1, tau_ep = 1.0, t_param = 1.0;
  bool im_gap = false;
  std::string center = "0,1", radius = "0.1,0.05", track, dspec = "-1:1:41", gspec = "0:2:41";
  std::string model = "H2", figure_name;
  double v0 = 1.0, tau_model = 0.8;
  std::optional<double> omega, omega_prime;

  auto* c_bands = app.add_subcommand("bands", "band structure over a k grid");
  auto* c_fd = app.add_subcommand("fdcheck", "momentum-space vs finite-difference bands");
  auto* c_gauge = app.add_subcommand("gauge", "gauge angle and Hermitian equivalent");
  auto* c_pr = app.add_subcommand("pr", "participation ratios before/after the gauge");
  auto* c_wf = app.add_subcommand("wavefunction", "real-space Bloch wavefunction CSV");
  auto* c_scan = app.add_subcommand("ep-scan", "locate and classify an EP in tau");
  auto* c_cls = app.add_subcommand("ep-classify", "classify a known EP");
  auto* c_disp = app.add_subcommand("dispersion", "log-log dispersion exponent near an EP");
  auto* c_enc = app.add_subcommand("encircle", "track eigenstates around a (k, tau) loop");
  auto* c_rie = app.add_subcommand("riemann", "two-level Riemann sheet mesh CSV");
  auto* c_tru = app.add_subcommand("truncated", "few-mode truncated models");
  auto* c_fig = app.add_subcommand("figure", "figure-reproduction bundles");

  for (CLI::App* c : {c_bands, c_fd, c_gauge, c_pr, c_wf, c_scan, c_cls, c_disp, c_enc,
                      c_rie, c_tru, c_fig})
    add_common(c, opts);

  c_wf->add_option("--band", band, "1-based band index");
  c_wf->add_option("--samples", samples, "number of x samples");
  for (CLI::App* c : {c_scan, c_cls, c_disp})
    c->add_option("--band-lo", band_lo, "lower band of the pair (1-based)");
  c_scan->add_option("--tau-min", tau_min);
  c_scan->add_option("--tau-max", tau_max);
  c_cls->add_option("--tau-ep", tau_ep);
  c_disp->add_option("--tau-ep", tau_ep);
  c_disp->add_option("--side", side, "+1 or -1");
  c_disp->add_flag("--im-gap", im_gap, "fit |Im| splitting instead of the gap");
  c_enc->add_option("--center", center, "loop center k,tau");
  c_enc->add_option("--radius", radius, "loop radii rk,rtau");
  c_enc->add_option("--steps", steps, "continuation steps");
  c_enc->add_option("--track", track, "comma-separated 1-based band indices");
  c_rie->add_option("--delta", dspec, "detuning grid min:max:count");
  c_rie->add_option("--g", gspec, "gain grid min:max:count");
  c_rie->add_option("--t", t_param, "coupling");
  c_tru->add_option("--model", model, "H2 | H3 | H3nnn | H4");
  c_tru->add_option("--v0", v0);
  c_tru->add_option("--tau-model", tau_model);
  c_tru->add_option("--omega", [&omega](const std::vector<std::string>& v) {
    omega = std::stod(v[0]);
    return true;
  }, "diagonal offset");
  c_tru->add_option("--omega-prime", [&omega_prime](const std::vector<std::string>& v) {
    omega_prime = std::stod(v[0]);
    return true;
  }, "outer diagonal offset");
  c_fig->add_option("name", figure_name, "fig1..fig5, s1, s3, s4")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    std::cerr << json{{"code", 1}, {"error", e.what()}}.dump() << "\n";
    return 1;
  }

  try {
    if (*c_bands) return cmd_bands(opts);
    if (*c_fd) return cmd_fdcheck(opts);
    if (*c_gauge) return cmd_gauge(opts);
    if (*c_pr) return cmd_pr(opts);
    if (*c_wf) return cmd_wavefunction(opts, band, samples);
    if (*c_scan) return cmd_ep_scan(opts, band_lo, tau_min, tau_max);
    if (*c_cls) return cmd_ep_classify(opts, band_lo, tau_ep);
    if (*c_disp) return cmd_dispersion(opts, band_lo, tau_ep, side, im_gap);
    if (*c_enc) return cmd_encircle(opts, center, radius, steps, track);
    if (*c_rie) return cmd_riemann(opts, dspec, gspec, t_param);
    if (*c_tru) return cmd_truncated(opts, model, v0, tau_model, omega, omega_prime);
    if (*c_fig) return cmd_figure(opts, figure_name);
  } catch (const CliError& e) {
    std::cerr << json{{"code", e.code}, {"error", e.what()}}.dump() << "\n";
    return e.code;
  } catch (const std::exception& e) {
    std::cerr << json{{"code", 4}, {"error", e.what()}}.dump() << "\n";
    return 4;
  }
  std::cerr << json{{"code", 1}, {"error", "unknown subcommand"}}.dump() << "\n";
  return 1;
}
