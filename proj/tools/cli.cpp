#include "cli.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <memory>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "mfd/billiard.hpp"
#include "mfd/crossover.hpp"
#include "mfd/eigen_cache.hpp"
#include "mfd/ensembles.hpp"
#include "mfd/errors.hpp"
#include "mfd/estimators.hpp"
#include "mfd/parallel.hpp"
#include "mfd/qkr.hpp"
#include "mfd/spin_chain.hpp"
#include "mfd/version.hpp"
#include "output.hpp"

namespace mfd::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const std::vector<std::string> kCommands = {"analytic", "rmt", "qkr", "billiard", "spinchain", "fit"};

json analysis_defaults() {
  return {{"analyses", {"hist", "qsweep", "profile", "fit"}},
          {"q", {1, 2, 3, 4, 5, 6}},
          {"mid_fraction", 1.0},
          {"hist_bins", 81},
          {"y_lo", -12.0},
          {"y_hi", 3.0},
          {"fit_samples", 1000000},
          {"eps_lo", 1e-3},
          {"eps_hi", 1e5}};
}

// ---------------------------------------------------------------------------
// Member pipeline: per-member partial accumulators, merged in member order.

struct Analyses {
  bool hist = false, qsweep = false, profile = false, fit = false;
};

Analyses parse_analyses(const json& list) {
  Analyses a;
  for (const auto& item : list) {
    const auto name = item.get<std::string>();
    if (name == "hist") a.hist = true;
    else if (name == "qsweep") a.qsweep = true;
    else if (name == "profile") a.profile = true;
    else if (name == "fit") a.fit = true;
    else throw DomainError("unknown analysis: " + name);
  }
  return a;
}

struct Window {
  int lo;
  int count;
};

/// The central `fraction` of the sorted states.
Window mid_window(int n, double fraction) {
  detail::require_domain(fraction > 0.0 && fraction <= 1.0, "mid_fraction must lie in (0, 1]");
  const int count = std::clamp(static_cast<int>(std::lround(fraction * n)), 1, n);
  return {(n - count) / 2, count};
}

struct MemberPartial {
  std::optional<MomentAccumulator> moments;
  std::optional<ProfileAccumulator> profile;
  std::optional<HistogramAccumulator> hist;
  std::vector<double> fit_x;
};

struct PipelineResult {
  std::optional<std::vector<DqEstimate>> qsweep;
  std::optional<SpectralProfile> profile;
  std::optional<ComponentHistogram> hist;
  std::optional<EpsilonFit> fit;
  std::string fit_error;
};

using MemberFn = std::function<ComplexEigenSystem(int)>;
using SinkFn = std::function<void(int, const ComplexEigenSystem&)>;

/// Keeps component g of the selected set when g % stride == 0.
std::uint64_t fit_stride(std::uint64_t total, long cap) {
  detail::require_domain(cap >= 1, "fit_samples must be >= 1");
  return std::max<std::uint64_t>(1, (total + cap - 1) / static_cast<std::uint64_t>(cap));
}

void collect_fit_samples(const Eigen::VectorXd& x, std::uint64_t first_global, std::uint64_t stride,
                         std::vector<double>& out) {
  for (Eigen::Index i = 0; i < x.size(); ++i)
    if ((first_global + i) % stride == 0 && x(i) > 0.0) out.push_back(x(i));
}

FitOptions fit_options(const json& p) {
  FitOptions o;
  o.eps_lo = p.at("eps_lo").get<double>();
  o.eps_hi = p.at("eps_hi").get<double>();
  return o;
}

PipelineResult run_pipeline(const json& p, int n_members, int n_dim, const MemberFn& member, int threads,
                            const SinkFn& sink = {}) {
  const Analyses an = parse_analyses(p.at("analyses"));
  const auto q_grid = p.at("q").get<std::vector<double>>();
  const Window win = mid_window(n_dim, p.at("mid_fraction").get<double>());
  const int bins = p.at("hist_bins").get<int>();
  const double y_lo = p.at("y_lo").get<double>(), y_hi = p.at("y_hi").get<double>();
  const std::uint64_t total = static_cast<std::uint64_t>(n_members) * win.count * n_dim;
  const std::uint64_t stride = fit_stride(total, p.at("fit_samples").get<long>());

  auto partial_of = [&](int m, const ComplexEigenSystem& sys) {
    if (sys.dim() != n_dim) throw DataError("member dimension mismatch");
    MemberPartial part;
    if (an.qsweep) part.moments.emplace(q_grid, n_dim);
    if (an.profile) {
      part.profile.emplace(n_dim);
      part.profile->add(sys);
    }
    if (an.hist) part.hist.emplace(bins, y_lo, y_hi);
    for (int jj = 0; jj < win.count; ++jj) {
      const auto col = sys.eigenvectors.col(win.lo + jj);
      if (an.qsweep) part.moments->add_state(col);
      if (an.hist || an.fit) {
        const Eigen::VectorXd x = scaled_components(col);
        if (an.hist) part.hist->add_components(x);
        if (an.fit)
          collect_fit_samples(x, (static_cast<std::uint64_t>(m) * win.count + jj) * n_dim, stride, part.fit_x);
      }
    }
    return part;
  };

  std::optional<MemberPartial> acc;
  std::vector<double> fit_x;
  auto absorb = [&](MemberPartial&& part) {
    fit_x.insert(fit_x.end(), part.fit_x.begin(), part.fit_x.end());
    part.fit_x.clear();
    if (!acc) {
      acc = std::move(part);
      return;
    }
    if (acc->moments) acc->moments->merge(*part.moments);
    if (acc->profile) acc->profile->merge(*part.profile);
    if (acc->hist) acc->hist->merge(*part.hist);
  };

  auto wrap = [](int m, const std::exception& e) {
    return std::runtime_error("member " + std::to_string(m) + ": " + e.what());
  };

  if (sink) {
    // Batches keep the in-order sink and bounded memory.
    const int batch = std::max(threads, 1);
    for (int start = 0; start < n_members; start += batch) {
      const int len = std::min(batch, n_members - start);
      auto systems = parallel_map(len, threads, [&](int k) {
        try {
          return member(start + k);
        } catch (const std::exception& e) {
          throw wrap(start + k, e);
        }
      });
      for (int k = 0; k < len; ++k) sink(start + k, systems[k]);
      auto parts = parallel_map(len, threads, [&](int k) { return partial_of(start + k, systems[k]); });
      for (auto& part : parts) absorb(std::move(part));
    }
  } else {
    auto parts = parallel_map(n_members, threads, [&](int m) {
      try {
        return partial_of(m, member(m));
      } catch (const std::exception& e) {
        throw wrap(m, e);
      }
    });
    for (auto& part : parts) absorb(std::move(part));
  }

  PipelineResult r;
  if (an.qsweep) r.qsweep = acc->moments->result();
  if (an.profile) r.profile = acc->profile->result();
  if (an.hist) r.hist = acc->hist->result();
  if (an.fit) {
    try {
      r.fit = fit_epsilon(fit_x, fit_options(p));
    } catch (const std::exception& e) {
      r.fit_error = e.what();
    }
  }
  return r;
}

json fit_json(const EpsilonFit& f, const FitOptions& o) {
  return {{"eps_hat", f.eps_hat},
          {"nll", f.neg_log_likelihood},
          {"n_samples", f.n_samples},
          {"converged", f.converged},
          {"boundary_hit", f.boundary_hit},
          {"evaluations", f.evaluations},
          {"eps_lo", o.eps_lo},
          {"eps_hi", o.eps_hi}};
}

void write_pipeline(const PipelineResult& r, const json& p, const RunConfig& cfg, const Stamp& stamp,
                    const std::string& suffix, CommandReport& report) {
  if (r.qsweep) {
    TableWriter t(cfg.out, "qsweep" + suffix, cfg.format, {"q", "Dq", "Sq"}, stamp);
    for (const auto& e : *r.qsweep) t.row({e.q, e.d_q, e.s_q});
    report.files.push_back(t.close());
  }
  if (r.profile) {
    TableWriter t(cfg.out, "profile" + suffix, cfg.format, {"index", "eigenvalue", "D1", "D2", "S1", "S2"}, stamp);
    const auto& pr = *r.profile;
    for (Eigen::Index j = 0; j < pr.eigenvalue.size(); ++j)
      t.row({static_cast<long>(j), pr.eigenvalue(j), pr.d1(j), pr.d2(j), pr.s1(j), pr.s2(j)});
    report.files.push_back(t.close());
  }
  if (r.hist) {
    TableWriter t(cfg.out, "hist" + suffix, cfg.format, {"y", "density"}, stamp);
    const auto& h = *r.hist;
    for (size_t b = 0; b < h.density.size(); ++b) t.row({0.5 * (h.edges[b] + h.edges[b + 1]), h.density[b]});
    report.files.push_back(t.close());
  }
  if (r.fit) {
    report.files.push_back(write_json(cfg.out, "fit" + suffix, fit_json(*r.fit, fit_options(p)), stamp));
  } else if (!r.fit_error.empty()) {
    report.failures.push_back("fit" + suffix + ": " + r.fit_error);
  }
}

// ---------------------------------------------------------------------------
// Subcommands.

void cmd_analytic(const RunConfig& cfg, const Stamp& stamp, CommandReport& report) {
  const json& p = cfg.params;
  const auto qs = p.at("q").get<std::vector<double>>();
  const auto ns = p.at("n").get<std::vector<int>>();
  const auto epss = p.at("eps").get<std::vector<double>>();

  TableWriter t(cfg.out, "analytic_dq", cfg.format, {"family", "eps", "q", "N", "Dq", "Sq"}, stamp);
  auto closed_form = [&](const std::string& family, const Cell& eps_cell, auto&& dq) {
    for (double q : qs) {
      for (int n : ns) {
        try {
          const double d = dq(q, n);
          t.row({family, eps_cell, q, static_cast<long>(n), d, std::log(static_cast<double>(n)) * (1.0 - d)});
        } catch (const std::exception& e) {
          report.failures.push_back(family + " q=" + format_double(q) + " N=" + std::to_string(n) + ": " + e.what());
        }
      }
    }
  };
  closed_form("OE", 0.0, [](double q, int n) { return d_q_oe(q, n).value; });
  closed_form("UE", std::string("inf"), [](double q, int n) { return d_q_ue(q, n).value; });

  // D_q = 1 - S_q^inf / ln N: one quadrature per (eps, q), shared by all N.
  struct Job {
    double eps, q;
  };
  std::vector<Job> jobs;
  for (double e : epss)
    for (double q : qs) jobs.push_back({e, q});
  auto s_inf = parallel_map(static_cast<int>(jobs.size()), cfg.threads, [&](int k) -> std::pair<double, std::string> {
    try {
      return {s_q_inf_crossover(CrossoverParam(jobs[k].eps), jobs[k].q), ""};
    } catch (const std::exception& e) {
      return {std::numeric_limits<double>::quiet_NaN(), e.what()};
    }
  });
  for (size_t k = 0; k < jobs.size(); ++k) {
    const auto& [s, err] = s_inf[k];
    if (!err.empty()) {
      report.failures.push_back("crossover eps=" + format_double(jobs[k].eps) + " q=" + format_double(jobs[k].q) +
                                ": " + err);
      continue;
    }
    for (int n : ns) {
      const double ln_n = std::log(static_cast<double>(n));
      t.row({std::string("crossover"), jobs[k].eps, jobs[k].q, static_cast<long>(n), 1.0 - s / ln_n, s});
    }
  }
  report.files.push_back(t.close());
}

void cmd_rmt(const RunConfig& cfg, const Stamp& stamp, CommandReport& report) {
  const json& p = cfg.params;
  EnsembleSpec spec;
  spec.n_dim = p.at("n_dim").get<int>();
  spec.alpha = p.at("alpha").get<double>();
  spec.v2 = p.at("v2").get<double>();
  spec.n_members = p.at("n_members").get<int>();
  spec.seed = cfg.seed;
  spec.validate();

  std::unique_ptr<EigenCacheWriter> cache;
  SinkFn sink;
  if (const auto path = p.at("cache").get<std::string>(); !path.empty()) {
    cache = std::make_unique<EigenCacheWriter>(path, spec);
    sink = [&](int, const ComplexEigenSystem& s) { cache->append(s); };
  }
  const auto r = run_pipeline(p, spec.n_members, spec.n_dim, [&](int m) { return generate_member(spec, m); },
                              cfg.threads, sink);
  if (cache) cache->close();
  write_pipeline(r, p, cfg, stamp, "", report);
}

void cmd_qkr(const RunConfig& cfg, const Stamp& stamp, CommandReport& report) {
  const json& p = cfg.params;
  QkrSpec spec;
  spec.n_dim = p.at("n_dim").get<int>();
  spec.kick_strength = p.at("kick").get<double>();
  spec.trs_gamma = p.at("gamma").get<double>();
  if (!p.at("theta0").is_null()) spec.theta0 = p.at("theta0").get<double>();
  spec.n_members = p.at("n_members").get<int>();
  spec.kick_jitter = p.at("jitter").get<double>();
  spec.seed = cfg.seed;
  spec.validate();
  const auto r = run_pipeline(p, spec.n_members, spec.n_dim, [&](int m) { return qkr_member(spec, m); }, cfg.threads);
  write_pipeline(r, p, cfg, stamp, "", report);
}

ComplexEigenSystem as_complex(RealEigenSystem&& s) {
  ComplexEigenSystem out;
  out.eigenvalues = std::move(s.eigenvalues);
  out.eigenvectors = s.eigenvectors.cast<cdouble>();
  return out;
}

/// Real solver when the matrix has no imaginary part.
ComplexEigenSystem hermitian_eigs(const Eigen::MatrixXcd& h) {
  if (h.imag().cwiseAbs().maxCoeff() == 0.0) return as_complex(eigh(Eigen::MatrixXd(h.real())));
  return eigh(h);
}

void cmd_billiard(const RunConfig& cfg, const Stamp& stamp, CommandReport& report) {
  const json& p = cfg.params;
  BilliardSpec spec;
  spec.rect_width = p.at("width").get<int>();
  spec.rect_height = p.at("height").get<int>();
  spec.ellipse_a = p.at("semi_a").get<int>();
  spec.ellipse_b = p.at("semi_b").get<int>();
  spec.onsite = p.at("onsite").get<double>();
  spec.hopping = p.at("hopping").get<double>();
  spec.b_field = p.at("b_field").get<double>();
  const double bin = p.at("dos_bin").get<double>();
  detail::require_domain(bin > 0.0 && bin <= 8.0, "dos_bin must lie in (0, 8]");

  const BilliardModel model = billiard_hamiltonian(spec);
  if (p.at("sites").get<bool>()) {
    TableWriter t(cfg.out, "sites", cfg.format, {"site_index", "x", "y"}, stamp);
    for (size_t i = 0; i < model.sites.size(); ++i)
      t.row({static_cast<long>(i), static_cast<long>(model.sites[i].x), static_cast<long>(model.sites[i].y)});
    report.files.push_back(t.close());
  }
  const Eigen::MatrixXcd h(model.hamiltonian);
  const bool vectors = p.at("vectors").get<bool>();
  std::optional<ComplexEigenSystem> sys;
  Eigen::VectorXd energies;
  if (vectors) {
    sys = hermitian_eigs(h);
    energies = sys->eigenvalues;
  } else {
    energies = spec.b_field == 0.0 ? eigvalsh(Eigen::MatrixXd(h.real())) : eigvalsh(h);
  }

  const int n_bins = static_cast<int>(std::ceil(8.0 / bin - 1e-9));
  std::vector<long> counts(n_bins, 0);
  for (Eigen::Index i = 0; i < energies.size(); ++i) {
    const int b = static_cast<int>(std::floor(energies(i) / bin));
    if (b >= 0 && b < n_bins) ++counts[b];
  }
  TableWriter dos(cfg.out, "dos", cfg.format, {"E", "rho_emp", "rho_theory"}, stamp);
  for (int b = 0; b < n_bins; ++b) {
    const double e = (b + 0.5) * bin;
    dos.row({e, counts[b] / (bin * energies.size()), billiard_dos_theory(e)});
  }
  report.files.push_back(dos.close());

  if (vectors) {
    const auto r = run_pipeline(p, 1, model.dim(), [&](int) { return *sys; }, 1);
    write_pipeline(r, p, cfg, stamp, "", report);
  }
}

std::string k_label(double k) {
  std::ostringstream s;
  s << k;
  return s.str();
}

void cmd_spinchain(const RunConfig& cfg, const Stamp& stamp, CommandReport& report) {
  const json& p = cfg.params;
  SpinChainSpec spec;
  spec.length = p.at("length").get<int>();
  spec.j_coupling = p.at("coupling").get<double>();
  spec.h_strength = p.at("field").get<double>();
  spec.sz_sector = p.at("sz").get<double>();
  spec.seed = cfg.seed;
  spec.validate();
  const int realizations = p.at("realizations").get<int>();
  detail::require_domain(realizations >= 1, "realizations must be >= 1");
  const auto basis = spin_basis(spec.length, spec.n_up());

  if (p.at("basis").get<bool>()) {
    TableWriter t(cfg.out, "basis", cfg.format, {"state_index", "bitstring"}, stamp);
    for (size_t i = 0; i < basis.size(); ++i) t.row({static_cast<long>(i), spin_bitstring(basis[i], spec.length)});
    report.files.push_back(t.close());
  }
  for (double k : p.at("k_list").get<std::vector<double>>()) {
    SpinChainSpec sk = spec;
    sk.k_chirality = k;
    try {
      const auto r = run_pipeline(p, realizations, static_cast<int>(basis.size()),
                                  [&](int m) { return hermitian_eigs(spin_chain_block(sk, m)); }, cfg.threads);
      write_pipeline(r, p, cfg, stamp, "_K" + k_label(k), report);
    } catch (const std::exception& e) {
      report.failures.push_back("K=" + k_label(k) + ": " + e.what());
    }
  }
}

std::vector<double> read_samples(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  std::vector<double> x;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    const auto field = line.substr(0, line.find(','));
    size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(field, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0) {
      if (x.empty()) continue;  // header row
      throw DataError(path + ":" + std::to_string(line_no) + ": not a number");
    }
    x.push_back(v);
  }
  return x;
}

void cmd_fit(const RunConfig& cfg, const Stamp& stamp, CommandReport& report) {
  const json& p = cfg.params;
  const auto input = p.at("input").get<std::string>();
  const auto cache_path = p.at("cache").get<std::string>();
  if (input.empty() == cache_path.empty()) throw DomainError("fit: give exactly one of --input or --cache");
  std::vector<double> x;
  if (!input.empty()) {
    const auto all = read_samples(input);
    const std::uint64_t stride = fit_stride(all.size(), p.at("fit_samples").get<long>());
    for (size_t i = 0; i < all.size(); i += stride) x.push_back(all[i]);
  } else {
    EigenCacheReader reader(cache_path);
    const int n = static_cast<int>(reader.header().n_dim);
    const Window win = mid_window(n, p.at("mid_fraction").get<double>());
    const std::uint64_t stride =
        fit_stride(reader.header().n_members * win.count * static_cast<std::uint64_t>(n), p.at("fit_samples").get<long>());
    ComplexEigenSystem sys;
    for (std::uint64_t m = 0; reader.next(sys); ++m)
      for (int jj = 0; jj < win.count; ++jj)
        collect_fit_samples(scaled_components(sys.eigenvectors.col(win.lo + jj)), (m * win.count + jj) * n, stride, x);
  }
  const FitOptions opts = fit_options(p);
  const EpsilonFit f = fit_epsilon(x, opts);
  report.files.push_back(write_json(cfg.out, "fit", fit_json(f, opts), stamp));
}

}  // namespace

// ---------------------------------------------------------------------------

json default_params(const std::string& command) {
  if (command == "analytic")
    return {{"q", {1, 2, 3, 4, 5, 6}},
            {"n", {10, 30, 100, 300, 1000, 3000, 10000, 100000}},
            {"eps", {0.1, 1, 4, 10, 100}}};
  json p = analysis_defaults();
  if (command == "rmt") {
    p.update({{"n_dim", 1000}, {"alpha", 0.0}, {"v2", 0.0}, {"n_members", 200}, {"cache", ""}});
  } else if (command == "qkr") {
    p.update({{"n_dim", 201}, {"kick", 20000.0}, {"gamma", 0.0}, {"theta0", nullptr}, {"n_members", 500},
              {"jitter", 250.0}});
  } else if (command == "billiard") {
    p.update({{"width", 80}, {"height", 90}, {"semi_a", 45}, {"semi_b", 35}, {"onsite", 4.0}, {"hopping", -1.0},
              {"b_field", 0.0}, {"dos_bin", 0.1}, {"vectors", true}, {"sites", false}});
  } else if (command == "spinchain") {
    p.update({{"length", 13}, {"coupling", 1.0}, {"field", 0.2}, {"k_list", {0.0, 0.01, 0.6}}, {"sz", 0.5},
              {"realizations", 1}, {"basis", false}, {"mid_fraction", 0.2}});
  } else if (command == "fit") {
    p = {{"input", ""}, {"cache", ""}, {"fit_samples", 1000000}, {"eps_lo", 1e-3}, {"eps_hi", 1e5},
         {"mid_fraction", 1.0}};
  } else {
    throw DomainError("unknown command: " + command);
  }
  return p;
}

RunConfig make_config(const std::string& command, const json& overrides) {
  RunConfig cfg;
  cfg.command = command;
  cfg.params = default_params(command);
  if (!overrides.is_object()) throw DomainError("params must be a JSON object");
  for (const auto& [key, value] : overrides.items()) {
    if (!cfg.params.contains(key)) throw DomainError(command + ": unknown parameter '" + key + "'");
    cfg.params[key] = value;
  }
  return cfg;
}

json RunConfig::replayable() const {
  return {{"command", command}, {"seed", seed}, {"format", format}, {"params", params}};
}

std::string RunConfig::hash() const { return fnv1a_hex(replayable().dump()); }

CommandReport run_command(const RunConfig& cfg) {
  if (cfg.format != "csv" && cfg.format != "json") throw DomainError("format must be csv or json");
  fs::create_directories(cfg.out);
  const Stamp stamp{cfg.hash(), cfg.seed};
  CommandReport report;
  report.files.push_back(write_json(cfg.out, "run_config", cfg.replayable(), stamp));
  if (cfg.command == "analytic") cmd_analytic(cfg, stamp, report);
  else if (cfg.command == "rmt") cmd_rmt(cfg, stamp, report);
  else if (cfg.command == "qkr") cmd_qkr(cfg, stamp, report);
  else if (cfg.command == "billiard") cmd_billiard(cfg, stamp, report);
  else if (cfg.command == "spinchain") cmd_spinchain(cfg, stamp, report);
  else if (cfg.command == "fit") cmd_fit(cfg, stamp, report);
  else throw DomainError("unknown command: " + cfg.command);
  return report;
}

// ---------------------------------------------------------------------------
// argv front end.

namespace {

/// Flags that write into the params object only when given explicitly.
class ParamFlags {
public:
  template <class T>
  void option(CLI::App* sub, const std::string& flag, const std::string& key, const std::string& help) {
    auto value = std::make_shared<T>();
    CLI::Option* opt = sub->add_option(flag, *value, help);
    if constexpr (requires { value->push_back(value->front()); }) opt->delimiter(',');
    apply_.push_back([=](json& p) {
      if (opt->count() > 0) p[key] = *value;
    });
  }

  void flag(CLI::App* sub, const std::string& flag, const std::string& key, bool when_set, const std::string& help) {
    CLI::Option* opt = sub->add_flag(flag, help);
    apply_.push_back([=](json& p) {
      if (opt->count() > 0) p[key] = when_set;
    });
  }

  void analysis(CLI::App* sub) {
    option<std::vector<std::string>>(sub, "--analyses", "analyses", "subset of hist,qsweep,profile,fit");
    option<std::vector<double>>(sub, "--q", "q", "q grid (comma separated)");
    option<double>(sub, "--mid-fraction", "mid_fraction", "central fraction of states used by qsweep/hist/fit");
    option<int>(sub, "--hist-bins", "hist_bins", "histogram bins in y = ln x");
    option<double>(sub, "--y-lo", "y_lo", "histogram lower edge");
    option<double>(sub, "--y-hi", "y_hi", "histogram upper edge");
    option<long>(sub, "--fit-samples", "fit_samples", "cap on components used by the fit");
    option<double>(sub, "--eps-lo", "eps_lo", "fit bracket lower end");
    option<double>(sub, "--eps-hi", "eps_hi", "fit bracket upper end");
  }

  void apply(json& p) const {
    for (const auto& f : apply_) f(p);
  }

private:
  std::vector<std::function<void(json&)>> apply_;
};

}  // namespace

int run_main(int argc, char** argv) {
  CLI::App app{"Multifractal dimensions of random-matrix and quantum-chaos eigenvectors"};
  app.set_version_flag("--version", std::string("mfd ") + kVersion);
  app.require_subcommand(1);
  app.fallthrough();

  std::uint64_t seed = 0;
  std::string out = ".", format = "csv", config_path;
  int threads = default_thread_count();
  auto* seed_opt = app.add_option("--seed", seed, "base RNG seed");
  app.add_option("--out", out, "output directory");
  auto* format_opt = app.add_option("--format", format, "table format")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--threads", threads, "worker threads (results do not depend on it)")->check(CLI::PositiveNumber);
  app.add_option("--config", config_path, "JSON RunConfig; explicit flags override it")->check(CLI::ExistingFile);

  std::map<std::string, ParamFlags> flags;
  auto* analytic = app.add_subcommand("analytic", "closed-form and crossover D_q tables");
  flags["analytic"].option<std::vector<double>>(analytic, "--q", "q", "q grid");
  flags["analytic"].option<std::vector<int>>(analytic, "--n", "n", "matrix dimensions");
  flags["analytic"].option<std::vector<double>>(analytic, "--eps", "eps", "crossover parameters");

  auto* rmt = app.add_subcommand("rmt", "Pandey-Mehta ensemble statistics");
  auto& fr = flags["rmt"];
  fr.option<int>(rmt, "--n", "n_dim", "matrix dimension");
  fr.option<double>(rmt, "--alpha", "alpha", "crossover mixing alpha in [0,1]");
  fr.option<double>(rmt, "--v2", "v2", "element variance (0 = default)");
  fr.option<int>(rmt, "--members", "n_members", "ensemble size");
  fr.option<std::string>(rmt, "--cache", "cache", "also write eigen-systems to this binary file");
  fr.analysis(rmt);

  auto* qkr = app.add_subcommand("qkr", "quantum kicked rotor Floquet eigenvectors");
  auto& fq = flags["qkr"];
  fq.option<int>(qkr, "--n", "n_dim", "odd matrix dimension");
  fq.option<double>(qkr, "--kick", "kick", "kick strength");
  fq.option<double>(qkr, "--gamma", "gamma", "time-reversal breaking gamma");
  fq.option<double>(qkr, "--theta0", "theta0", "parity breaking phase (default pi/2N)");
  fq.option<int>(qkr, "--members", "n_members", "ensemble size");
  fq.option<double>(qkr, "--jitter", "jitter", "half-width of kick variation across members");
  fq.analysis(qkr);

  auto* bil = app.add_subcommand("billiard", "tight-binding quarter Sinai billiard");
  auto& fb = flags["billiard"];
  fb.option<int>(bil, "--width", "width", "rectangle width");
  fb.option<int>(bil, "--height", "height", "rectangle height");
  fb.option<int>(bil, "--semi-a", "semi_a", "ellipse semi-axis along x");
  fb.option<int>(bil, "--semi-b", "semi_b", "ellipse semi-axis along y");
  fb.option<double>(bil, "--onsite", "onsite", "onsite energy");
  fb.option<double>(bil, "--hopping", "hopping", "hopping amplitude");
  fb.option<double>(bil, "--b-field", "b_field", "flux per plaquette (radians)");
  fb.option<double>(bil, "--dos-bin", "dos_bin", "DOS bin width");
  fb.flag(bil, "--no-vectors", "vectors", false, "eigenvalues only (DOS)");
  fb.flag(bil, "--sites", "sites", true, "write sites table");
  fb.analysis(bil);

  auto* spin = app.add_subcommand("spinchain", "chiral spin chain S^z block");
  auto& fs_ = flags["spinchain"];
  fs_.option<int>(spin, "--length", "length", "chain length L");
  fs_.option<double>(spin, "--coupling", "coupling", "exchange J");
  fs_.option<double>(spin, "--field", "field", "std of random fields");
  fs_.option<std::vector<double>>(spin, "--chirality", "k_list", "chirality strengths K");
  fs_.option<double>(spin, "--sz", "sz", "S^z sector");
  fs_.option<int>(spin, "--realizations", "realizations", "field realizations averaged");
  fs_.flag(spin, "--basis", "basis", true, "write basis table");
  fs_.analysis(spin);

  auto* fit = app.add_subcommand("fit", "maximum-likelihood eps from x samples");
  auto& ff = flags["fit"];
  ff.option<std::string>(fit, "--input", "input", "text/CSV file, x in the first column");
  ff.option<std::string>(fit, "--cache", "cache", "eigen cache written by rmt --cache");
  ff.option<long>(fit, "--fit-samples", "fit_samples", "cap on samples used");
  ff.option<double>(fit, "--eps-lo", "eps_lo", "bracket lower end");
  ff.option<double>(fit, "--eps-hi", "eps_hi", "bracket upper end");
  ff.option<double>(fit, "--mid-fraction", "mid_fraction", "central fraction of states (cache input)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    const std::string command = app.get_subcommands().front()->get_name();
    json overrides = json::object();
    std::optional<std::uint64_t> file_seed;
    std::optional<std::string> file_format;
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      const json file = json::parse(in);
      if (file.contains("command") && file.at("command").get<std::string>() != command)
        throw DomainError("config is for command '" + file.at("command").get<std::string>() + "'");
      if (file.contains("params")) overrides = file.at("params");
      if (file.contains("seed")) file_seed = file.at("seed").get<std::uint64_t>();
      if (file.contains("format")) file_format = file.at("format").get<std::string>();
    }
    flags[command].apply(overrides);
    RunConfig cfg = make_config(command, overrides);
    cfg.seed = seed_opt->count() > 0 ? seed : file_seed.value_or(seed);
    cfg.format = format_opt->count() > 0 ? format : file_format.value_or(format);
    cfg.threads = threads;
    cfg.out = out;

    const CommandReport report = run_command(cfg);
    for (const auto& f : report.files) std::cout << f.string() << "\n";
    for (const auto& msg : report.failures) std::cerr << "mfd: failed: " << msg << "\n";
    return report.ok() ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "mfd: error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace mfd::cli
