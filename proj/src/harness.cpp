#include "gepce/harness.hpp"

#include "gepce/l1solver.hpp"
#include "gepce/parallel.hpp"
#include "gepce/sampling.hpp"

#include <json.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace gepce {

namespace {

template <class E>
struct Names {
  E value;
  const char* name;
};

constexpr Names<ExperimentKind> kKindNames[] = {{ExperimentKind::MicSweep, "mic-sweep"},
                                                {ExperimentKind::RecoveryVsN, "recovery-vs-N"},
                                                {ExperimentKind::RecoveryVsS, "recovery-vs-s"},
                                                {ExperimentKind::Rmse, "rmse"},
                                                {ExperimentKind::Diagnose, "diagnose"}};
constexpr Names<Mode> kModeNames[] = {{Mode::Standard, "standard"},
                                      {Mode::GradientEnhanced, "gradient-enhanced"},
                                      {Mode::StandardDouble, "standard-double"}};
constexpr Names<TargetFunction> kTargetNames[] = {
    {TargetFunction::F1, "f1"}, {TargetFunction::F2, "f2"}, {TargetFunction::F3, "f3"}};

template <class E, std::size_t K>
std::string name_of(const Names<E> (&table)[K], E value) {
  for (const auto& entry : table) {
    if (entry.value == value) return entry.name;
  }
  throw std::logic_error("unnamed enum value");
}

template <class E, std::size_t K>
E value_of(const Names<E> (&table)[K], const std::string& name, const char* what) {
  for (const auto& entry : table) {
    if (name == entry.name) return entry.value;
  }
  throw std::invalid_argument(std::string("unknown ") + what + " '" + name + "'");
}

// Stream for repetition `rep` at grid point `grid` of an experiment.
std::uint64_t trial_stream(std::uint64_t seed, std::size_t grid, int rep) {
  return split_stream(split_stream(seed, grid), static_cast<std::uint64_t>(rep));
}

constexpr std::uint64_t kValidationSalt = 0x76616c6964617465ULL;

SampleBatch head(const SampleBatch& batch, Eigen::Index rows) {
  return {batch.measure, batch.points.topRows(rows), batch.seed};
}

Eigen::VectorXd target_values(TargetFunction target, const SampleBatch& batch) {
  Eigen::VectorXd out(batch.count());
  std::vector<double> x(static_cast<std::size_t>(batch.dim()));
  for (Eigen::Index i = 0; i < batch.count(); ++i) {
    for (int a = 0; a < batch.dim(); ++a) x[static_cast<std::size_t>(a)] = batch.points(i, a);
    out(i) = target_value(target, x);
  }
  return out;
}

Eigen::MatrixXd target_gradients(TargetFunction target, const SampleBatch& batch) {
  Eigen::MatrixXd out(batch.count(), batch.dim());
  std::vector<double> x(static_cast<std::size_t>(batch.dim()));
  std::vector<double> g(static_cast<std::size_t>(batch.dim()));
  for (Eigen::Index i = 0; i < batch.count(); ++i) {
    for (int a = 0; a < batch.dim(); ++a) x[static_cast<std::size_t>(a)] = batch.points(i, a);
    target_gradient(target, x, g);
    for (int a = 0; a < batch.dim(); ++a) out(i, a) = g[static_cast<std::size_t>(a)];
  }
  return out;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t k = v.size();
  return k % 2 == 1 ? v[k / 2] : 0.5 * (v[k / 2 - 1] + v[k / 2]);
}

bool has_mode(const ExperimentConfig& c, Mode m) { return std::find(c.modes.begin(), c.modes.end(), m) != c.modes.end(); }

// A linear system and the map from its solution to PCE coefficients.
struct System {
  Eigen::MatrixXd A;
  Eigen::VectorXd b;
  Eigen::VectorXd scale;  // c = scale .* x; empty means identity
  double f_norm = 0.0;    // ||f_tilde||_2 of the unweighted data
};

System standard_system(const ExperimentConfig& config, const PceBasis& basis, const SampleBatch& batch,
                       const Eigen::VectorXd& f) {
  StandardDesign sd = assemble_standard(basis, batch, config.precondition_standard);
  return {std::move(sd.matrix), sd.weights.cwiseProduct(f), {}, f.norm()};
}

System gradient_system(const PceBasis& basis, const SampleBatch& batch, const SampleData& data,
                       const std::vector<int>& dirs) {
  GradientDesign g = assemble_gradient_enhanced(basis, batch, data, dirs);
  return {std::move(g.phi_hat), std::move(g.f_hat), std::move(g.P), g.f_tilde.norm()};
}

// Solves and maps back; throws whatever the solver throws.
Eigen::VectorXd recover(const ExperimentConfig& config, const System& sys) {
  SolveOptions opt;
  opt.epsilon = config.epsilon * sys.f_norm;
  opt.opt_tol = config.opt_tol;
  opt.max_iters = config.max_iters;
  const RecoveryResult r = solve(sys.A, sys.b, opt);
  return sys.scale.size() == 0 ? r.c : Eigen::VectorXd(sys.scale.cwiseProduct(r.c));
}

std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string cell_text(const Table::Cell& cell, bool json) {
  if (const auto* s = std::get_if<std::string>(&cell)) return json ? nlohmann::json(*s).dump() : *s;
  if (const auto* i = std::get_if<long long>(&cell)) return std::to_string(*i);
  const double v = std::get<double>(cell);
  if (json && !std::isfinite(v)) return "null";
  return format_real(v);
}

}  // namespace

std::string to_string(ExperimentKind kind) { return name_of(kKindNames, kind); }
std::string to_string(Mode mode) { return name_of(kModeNames, mode); }
std::string to_string(TargetFunction target) { return name_of(kTargetNames, target); }
ExperimentKind parse_kind(const std::string& name) { return value_of(kKindNames, name, "experiment kind"); }
Mode parse_mode(const std::string& name) { return value_of(kModeNames, name, "mode"); }
TargetFunction parse_target(const std::string& name) { return value_of(kTargetNames, name, "target function"); }

ExperimentConfig ExperimentConfig::defaults(ExperimentKind kind) {
  ExperimentConfig c;
  c.kind = kind;
  switch (kind) {
    case ExperimentKind::RecoveryVsN:
      c.N_values = {10, 20, 30, 40, 50, 60, 70, 80};
      break;
    case ExperimentKind::RecoveryVsS:
      c.s_values = {2, 4, 6, 8, 10, 12, 14, 16, 18, 20};
      break;
    case ExperimentKind::MicSweep:
      c.n = 30;
      c.N_values = {50, 100, 150, 200, 250, 300, 350, 400};
      break;
    case ExperimentKind::Rmse:
      c.N_values = {10, 20, 30, 40, 50, 60, 70, 80};
      c.epsilon = 1e-8;
      c.opt_tol = 1e-10;
      c.max_iters = 20'000;
      break;
    case ExperimentKind::Diagnose:
      break;
  }
  return c;
}

PceBasis ExperimentConfig::make_basis() const { return make_basis(n); }

PceBasis ExperimentConfig::make_basis(int degree) const {
  if (basis == "legendre") return PceBasis::legendre(d, degree);
  if (basis == "hermite") return PceBasis::hermite(d, degree);
  if (basis == "chebyshev") return PceBasis::isotropic(PolynomialFamily::chebyshev(degree), d, degree);
  const Measure m = Measure::parse(basis);
  if (!m.is_jacobi()) throw std::invalid_argument("unknown basis '" + basis + "'");
  return PceBasis::isotropic(PolynomialFamily::jacobi(m.params(), degree), d, degree);
}

Measure ExperimentConfig::sampling_measure() const { return Measure::parse(measure); }

int ExperimentConfig::direction_count() const {
  return static_cast<int>(std::ceil(gradient_fraction * d - 1e-9));
}

void ExperimentConfig::validate() const {
  auto fail = [](const std::string& msg) { throw std::invalid_argument("config: " + msg); };
  if (d < 1) fail("d must be >= 1");
  if (n < 0) fail("n must be >= 0");
  if (trials < 1) fail("trials must be >= 1");
  if (seeds < 1) fail("seeds must be >= 1");
  if (!(gradient_fraction >= 0.0 && gradient_fraction <= 1.0)) fail("gradient_fraction must lie in [0, 1]");
  if (modes.empty()) fail("modes must be non-empty");
  if (std::set<Mode>(modes.begin(), modes.end()).size() != modes.size()) fail("modes contain a duplicate");
  if (!(epsilon >= 0.0)) fail("epsilon must be >= 0");
  if (!(opt_tol > 0.0)) fail("opt_tol must be > 0");
  if (max_iters < 1) fail("max_iters must be >= 1");
  if (validation_points < 1) fail("validation_points must be >= 1");
  if (N < 1) fail("N must be >= 1");
  if (s < 0) fail("s must be >= 0");

  const Measure m = sampling_measure();
  const bool hermite = basis == "hermite";
  if (!hermite && basis != "legendre" && basis != "chebyshev") {
    if (basis.rfind("jacobi(", 0) != 0) fail("unknown basis '" + basis + "'");
    (void)Measure::parse(basis);
  }
  if (hermite && m.kind() != Measure::Kind::Gaussian) fail("a hermite basis needs the gaussian measure");
  if (!hermite && !m.is_chebyshev()) fail("a jacobi basis needs the chebyshev measure");

  const bool sweep_M = kind == ExperimentKind::MicSweep && !n_values.empty();
  const bool needs_N = kind == ExperimentKind::RecoveryVsN || kind == ExperimentKind::Rmse ||
                       (kind == ExperimentKind::MicSweep && !sweep_M);
  if (needs_N && N_values.empty()) fail("N_values must be non-empty");
  if (kind == ExperimentKind::RecoveryVsS && s_values.empty()) fail("s_values must be non-empty");
  for (int v : N_values) {
    if (v < 1) fail("N_values entries must be >= 1");
  }
  for (int v : n_values) {
    if (v < 0) fail("n_values entries must be >= 0");
  }
  const std::size_t M = MultiIndexSet::total_degree_size(d, n);
  if (M > MultiIndexSet::kDefaultMaxSize) fail("basis too large");
  for (int v : s_values) {
    if (v < 0 || static_cast<std::size_t>(v) > M) fail("s_values entries must lie in [0, M]");
  }
  if (kind == ExperimentKind::RecoveryVsN && static_cast<std::size_t>(s) > M) fail("s exceeds M");
  if (kind == ExperimentKind::Rmse && hermite) fail("rmse targets live on [-1,1]^d and need a jacobi basis");
}

ExperimentConfig parse_config(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }
  if (!j.is_object()) throw std::invalid_argument("config: expected a JSON object");
  ExperimentConfig c = ExperimentConfig::defaults(parse_kind(j.value("kind", std::string("recovery-vs-N"))));
  try {
    for (const auto& [key, v] : j.items()) {
      if (key == "kind") continue;
      else if (key == "d") c.d = v.get<int>();
      else if (key == "n") c.n = v.get<int>();
      else if (key == "N_values") c.N_values = v.get<std::vector<int>>();
      else if (key == "s_values") c.s_values = v.get<std::vector<int>>();
      else if (key == "n_values") c.n_values = v.get<std::vector<int>>();
      else if (key == "N") c.N = v.get<int>();
      else if (key == "s") c.s = v.get<int>();
      else if (key == "trials") c.trials = v.get<int>();
      else if (key == "seeds") c.seeds = v.get<int>();
      else if (key == "gradient_fraction") c.gradient_fraction = v.get<double>();
      else if (key == "modes") {
        c.modes.clear();
        for (const auto& m : v) c.modes.push_back(parse_mode(m.get<std::string>()));
      } else if (key == "seed") c.seed = v.get<std::uint64_t>();
      else if (key == "basis") c.basis = v.get<std::string>();
      else if (key == "measure") c.measure = v.get<std::string>();
      else if (key == "target") c.target = parse_target(v.get<std::string>());
      else if (key == "epsilon") c.epsilon = v.get<double>();
      else if (key == "opt_tol") c.opt_tol = v.get<double>();
      else if (key == "max_iters") c.max_iters = v.get<int>();
      else if (key == "validation_points") c.validation_points = v.get<int>();
      else if (key == "precondition_standard") c.precondition_standard = v.get<bool>();
      else if (key == "threads") c.threads = v.get<unsigned>();
      else throw std::invalid_argument("config: unknown key '" + key + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }
  return c;
}

std::string config_to_json(const ExperimentConfig& c) {
  nlohmann::ordered_json j;
  j["kind"] = to_string(c.kind);
  j["d"] = c.d;
  j["n"] = c.n;
  j["N_values"] = c.N_values;
  j["s_values"] = c.s_values;
  j["n_values"] = c.n_values;
  j["N"] = c.N;
  j["s"] = c.s;
  j["trials"] = c.trials;
  j["seeds"] = c.seeds;
  j["gradient_fraction"] = c.gradient_fraction;
  std::vector<std::string> modes;
  for (Mode m : c.modes) modes.push_back(to_string(m));
  j["modes"] = modes;
  j["seed"] = c.seed;
  j["basis"] = c.basis;
  j["measure"] = c.measure;
  j["target"] = to_string(c.target);
  j["epsilon"] = c.epsilon;
  j["opt_tol"] = c.opt_tol;
  j["max_iters"] = c.max_iters;
  j["validation_points"] = c.validation_points;
  j["precondition_standard"] = c.precondition_standard;
  j["threads"] = c.threads;
  return j.dump(2);
}

void Table::write_csv(std::ostream& os) const {
  for (std::size_t k = 0; k < columns.size(); ++k) os << (k ? "," : "") << columns[k];
  os << '\n';
  for (const auto& row : rows) {
    for (std::size_t k = 0; k < row.size(); ++k) os << (k ? "," : "") << cell_text(row[k], false);
    os << '\n';
  }
}

void Table::write_json(std::ostream& os) const {
  os << "[";
  for (std::size_t r = 0; r < rows.size(); ++r) {
    os << (r ? ",\n  {" : "\n  {");
    for (std::size_t k = 0; k < columns.size(); ++k) {
      os << (k ? ", " : "") << nlohmann::json(columns[k]).dump() << ": " << cell_text(rows[r][k], true);
    }
    os << "}";
  }
  os << (rows.empty() ? "]\n" : "\n]\n");
}

std::string Table::to_csv() const {
  std::ostringstream os;
  write_csv(os);
  return os.str();
}

std::vector<int> choose_directions(SplitMix64& rng, int d, int count) {
  if (count < 0 || count > d) throw std::invalid_argument("choose_directions: count must lie in [0, d]");
  std::vector<int> axes(static_cast<std::size_t>(d));
  std::iota(axes.begin(), axes.end(), 0);
  for (int j = 0; j < count; ++j) {
    const auto pick = j + static_cast<int>(rng.below(static_cast<std::uint64_t>(d - j)));
    std::swap(axes[static_cast<std::size_t>(j)], axes[static_cast<std::size_t>(pick)]);
  }
  axes.resize(static_cast<std::size_t>(count));
  std::sort(axes.begin(), axes.end());
  return axes;
}

std::vector<TrialOutcome> run_recovery_trial(const ExperimentConfig& config, const PceBasis& basis,
                                             std::uint64_t stream, int N, int s) {
  const auto M = static_cast<Eigen::Index>(basis.size());
  if (s < 0 || s > M) throw std::invalid_argument("run_recovery_trial: s must lie in [0, M]");
  SplitMix64 rng(stream);
  std::vector<Eigen::Index> order(static_cast<std::size_t>(M));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  Eigen::VectorXd truth = Eigen::VectorXd::Zero(M);
  for (int j = 0; j < s; ++j) {
    const auto pick = j + static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(M - j)));
    std::swap(order[static_cast<std::size_t>(j)], order[static_cast<std::size_t>(pick)]);
    truth(order[static_cast<std::size_t>(j)]) = rng.normal();
  }
  const std::vector<int> dirs = choose_directions(rng, basis.dim(), config.direction_count());
  const std::uint64_t point_seed = rng();
  const int k = static_cast<int>(dirs.size());
  const Eigen::Index total = static_cast<Eigen::Index>(N) * (has_mode(config, Mode::StandardDouble) ? 1 + k : 1);
  const SampleBatch all = sample(config.sampling_measure(), basis.dim(), total, point_seed);
  const SampleBatch first = head(all, N);

  std::vector<TrialOutcome> out;
  for (Mode mode : config.modes) {
    TrialOutcome t{mode, N, s};
    try {
      System sys;
      if (mode == Mode::GradientEnhanced) {
        const GradientDesign g = assemble_gradient_enhanced(basis, first, dirs);
        const Eigen::VectorXd f_tilde = g.phi_tilde * truth;
        sys = {g.phi_hat, g.W.cwiseProduct(f_tilde), g.P, f_tilde.norm()};
      } else {
        const SampleBatch& pts = mode == Mode::Standard ? first : all;
        const Eigen::VectorXd f = assemble_standard(basis, pts, false).matrix * truth;
        sys = standard_system(config, basis, pts, f);
      }
      t.error_inf = (recover(config, sys) - truth).lpNorm<Eigen::Infinity>();
      t.success = t.error_inf <= kSuccessThreshold;
    } catch (const std::exception&) {
      t.success = false;
    }
    out.push_back(t);
  }
  return out;
}

Table run_recovery_benchmark(const ExperimentConfig& config) {
  config.validate();
  const bool vs_N = config.kind != ExperimentKind::RecoveryVsS;
  const PceBasis basis = config.make_basis();
  const std::size_t grid = vs_N ? config.N_values.size() : config.s_values.size();
  const auto trials = static_cast<std::size_t>(config.trials);
  std::vector<std::vector<TrialOutcome>> outcomes(grid * trials);
  parallel_for(outcomes.size(), config.threads, [&](std::size_t item) {
    const std::size_t g = item / trials;
    const int trial = static_cast<int>(item % trials);
    const int N = vs_N ? config.N_values[g] : config.N;
    const int s = vs_N ? config.s : config.s_values[g];
    outcomes[item] = run_recovery_trial(config, basis, trial_stream(config.seed, g, trial), N, s);
  });

  Table t{{"mode", "N", "s", "success_fraction"}, {}};
  for (std::size_t m = 0; m < config.modes.size(); ++m) {
    for (std::size_t g = 0; g < grid; ++g) {
      long long hits = 0;
      for (std::size_t r = 0; r < trials; ++r) hits += outcomes[g * trials + r][m].success ? 1 : 0;
      const int N = vs_N ? config.N_values[g] : config.N;
      const int s = vs_N ? config.s : config.s_values[g];
      t.rows.push_back({to_string(config.modes[m]), static_cast<long long>(N), static_cast<long long>(s),
                        static_cast<double>(hits) / static_cast<double>(trials)});
    }
  }
  return t;
}

Table run_mic_sweep(const ExperimentConfig& config) {
  config.validate();
  const bool sweep_M = !config.n_values.empty();
  const std::size_t grid = sweep_M ? config.n_values.size() : config.N_values.size();
  const auto seeds = static_cast<std::size_t>(config.seeds);
  std::vector<PceBasis> bases;
  for (std::size_t g = 0; g < grid; ++g) bases.push_back(config.make_basis(sweep_M ? config.n_values[g] : config.n));
  std::vector<std::array<double, 3>> mics(grid * seeds);
  parallel_for(mics.size(), config.threads, [&](std::size_t item) {
    const std::size_t g = item / seeds;
    const PceBasis& basis = bases[g];
    const int N = sweep_M ? config.N : config.N_values[g];
    SplitMix64 rng(trial_stream(config.seed, g, static_cast<int>(item % seeds)));
    const std::vector<int> dirs = choose_directions(rng, basis.dim(), config.direction_count());
    const SampleBatch pts = sample(config.sampling_measure(), basis.dim(), N, rng());
    const GradientDesign design = assemble_gradient_enhanced(basis, pts, dirs);
    mics[item] = {mic(design.phi), mic(design.phi_tilde), mic(design.phi_hat)};
  });

  Table t{{"matrix", "N", "M", "mic"}, {}};
  const char* ids[] = {"phi", "phi_tilde", "phi_hat"};
  for (int which = 0; which < 3; ++which) {
    for (std::size_t g = 0; g < grid; ++g) {
      double sum = 0.0;
      for (std::size_t r = 0; r < seeds; ++r) sum += mics[g * seeds + r][static_cast<std::size_t>(which)];
      const int N = sweep_M ? config.N : config.N_values[g];
      t.rows.push_back({std::string(ids[which]), static_cast<long long>(N), static_cast<long long>(bases[g].size()),
                        sum / static_cast<double>(seeds)});
    }
  }
  return t;
}

Table run_rmse_benchmark(const ExperimentConfig& config) {
  config.validate();
  const PceBasis basis = config.make_basis();
  const int d = basis.dim();
  const SampleBatch validation =
      sample(Measure::uniform(), d, config.validation_points, split_stream(config.seed ^ kValidationSalt, 0));
  const Eigen::MatrixXd V = assemble_standard(basis, validation, false, config.threads).matrix;
  const Eigen::VectorXd y = target_values(config.target, validation);
  const double root_k = std::sqrt(static_cast<double>(validation.count()));

  const std::size_t grid = config.N_values.size();
  const auto seeds = static_cast<std::size_t>(config.seeds);
  const std::size_t nm = config.modes.size();
  std::vector<double> rmse(grid * seeds * nm, std::numeric_limits<double>::infinity());
  parallel_for(grid * seeds, config.threads, [&](std::size_t item) {
    const std::size_t g = item / seeds;
    const int N = config.N_values[g];
    SplitMix64 rng(trial_stream(config.seed, g, static_cast<int>(item % seeds)));
    const std::vector<int> dirs = choose_directions(rng, d, config.direction_count());
    const int k = static_cast<int>(dirs.size());
    const Eigen::Index total = static_cast<Eigen::Index>(N) * (has_mode(config, Mode::StandardDouble) ? 1 + k : 1);
    const SampleBatch all = sample(config.sampling_measure(), d, total, rng());
    const SampleBatch first = head(all, N);
    const Eigen::VectorXd f_all = target_values(config.target, all);
    for (std::size_t m = 0; m < nm; ++m) {
      try {
        System sys;
        switch (config.modes[m]) {
          case Mode::Standard:
            sys = standard_system(config, basis, first, f_all.head(N));
            break;
          case Mode::StandardDouble:
            sys = standard_system(config, basis, all, f_all);
            break;
          case Mode::GradientEnhanced:
            sys = gradient_system(basis, first, {f_all.head(N), target_gradients(config.target, first)}, dirs);
            break;
        }
        rmse[item * nm + m] = (V * recover(config, sys) - y).norm() / root_k;
      } catch (const std::exception&) {
        // counted as an infinite error
      }
    }
  });

  Table t{{"mode", "N", "rmse"}, {}};
  for (std::size_t m = 0; m < nm; ++m) {
    for (std::size_t g = 0; g < grid; ++g) {
      std::vector<double> v;
      for (std::size_t r = 0; r < seeds; ++r) v.push_back(rmse[(g * seeds + r) * nm + m]);
      t.rows.push_back({to_string(config.modes[m]), static_cast<long long>(config.N_values[g]), median(v)});
    }
  }
  return t;
}

Table run_diagnose(const ExperimentConfig& config) {
  config.validate();
  const PceBasis basis = config.make_basis();
  SplitMix64 rng(trial_stream(config.seed, 0, 0));
  const std::vector<int> dirs = choose_directions(rng, basis.dim(), config.direction_count());
  const SampleBatch pts = sample(config.sampling_measure(), basis.dim(), config.N, rng());
  const GradientDesign design = assemble_gradient_enhanced(basis, pts, dirs, config.threads);
  const CoherenceReport r = coherence_params(basis, design);
  Table t{{"N", "M", "directions", "mic", "mu_L", "beta_L", "theorem_bound", "C_constant", "beta_bound",
           "isotropy_gap"},
          {}};
  t.rows.push_back({static_cast<long long>(config.N), static_cast<long long>(basis.size()),
                    static_cast<long long>(dirs.size()), r.mic, r.mu_L, r.beta_L, r.theorem_bound, r.C_constant,
                    r.beta_bound(), isotropy_gap(design)});
  return t;
}

Table run_experiment(const ExperimentConfig& config) {
  switch (config.kind) {
    case ExperimentKind::MicSweep:
      return run_mic_sweep(config);
    case ExperimentKind::RecoveryVsN:
    case ExperimentKind::RecoveryVsS:
      return run_recovery_benchmark(config);
    case ExperimentKind::Rmse:
      return run_rmse_benchmark(config);
    case ExperimentKind::Diagnose:
      return run_diagnose(config);
  }
  throw std::logic_error("run_experiment: unknown kind");
}

double target_value(TargetFunction target, std::span<const double> x) {
  double sum = 0.0;
  switch (target) {
    case TargetFunction::F1:
      for (double v : x) sum += v * v;
      return sum;
    case TargetFunction::F2:
      for (double v : x) {
        const double u = 0.5 * (v + 1.0) - 0.375;
        sum += 0.01 * u * u;
      }
      return std::exp(-sum);
    case TargetFunction::F3:
      for (double v : x) {
        const double s = std::sin(16.0 / 15.0 * v - 0.7);
        sum += 0.3 + s + s * s;
      }
      return sum;
  }
  throw std::logic_error("target_value: unknown target");
}

void target_gradient(TargetFunction target, std::span<const double> x, std::span<double> grad) {
  if (grad.size() != x.size()) throw std::invalid_argument("target_gradient: size mismatch");
  const double f2 = target == TargetFunction::F2 ? target_value(target, x) : 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double v = x[i];
    switch (target) {
      case TargetFunction::F1:
        grad[i] = 2.0 * v;
        break;
      case TargetFunction::F2:
        grad[i] = -0.01 * (0.5 * (v + 1.0) - 0.375) * f2;
        break;
      case TargetFunction::F3: {
        const double u = 16.0 / 15.0 * v - 0.7;
        grad[i] = 16.0 / 15.0 * std::cos(u) * (1.0 + 2.0 * std::sin(u));
        break;
      }
    }
  }
}

}  // namespace gepce
