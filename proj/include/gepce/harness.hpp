#pragma once

// Experiment driver: recovery-probability benchmarks, MIC sweeps and RMSE
// studies comparing standard, gradient-enhanced and standard-double recovery.

#include "gepce/design.hpp"
#include "gepce/pce.hpp"
#include "gepce/polynomials.hpp"

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace gepce {

enum class ExperimentKind { MicSweep, RecoveryVsN, RecoveryVsS, Rmse, Diagnose };
enum class Mode { Standard, GradientEnhanced, StandardDouble };
enum class TargetFunction { F1, F2, F3 };

std::string to_string(ExperimentKind kind);
std::string to_string(Mode mode);
std::string to_string(TargetFunction target);
ExperimentKind parse_kind(const std::string& name);
Mode parse_mode(const std::string& name);
TargetFunction parse_target(const std::string& name);

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::RecoveryVsN;
  int d = 2;
  int n = 20;
  std::vector<int> N_values;  // grid for recovery-vs-N, rmse and mic-sweep over N
  std::vector<int> s_values;  // grid for recovery-vs-s
  std::vector<int> n_values;  // mic-sweep over M when non-empty (N fixed)
  int N = 50;                 // sample count where N is not swept
  int s = 8;                  // sparsity where s is not swept
  int trials = 100;
  int seeds = 10;  // repetitions per grid point for mic-sweep and rmse
  double gradient_fraction = 1.0;
  std::vector<Mode> modes{Mode::Standard, Mode::GradientEnhanced, Mode::StandardDouble};
  std::uint64_t seed = 1;
  std::string basis = "legendre";  // legendre, chebyshev, hermite or jacobi(a,b)
  std::string measure = "chebyshev";
  TargetFunction target = TargetFunction::F1;
  double epsilon = 0.0;  // residual bound relative to ||f_tilde||_2
  double opt_tol = 1e-6;
  int max_iters = 10'000;
  int validation_points = 10'000;
  bool precondition_standard = true;
  unsigned threads = 0;

  /// Grids and tolerances used when a config file leaves them out.
  static ExperimentConfig defaults(ExperimentKind kind);

  /// Throws std::invalid_argument describing the first violated constraint.
  void validate() const;

  PceBasis make_basis() const;
  PceBasis make_basis(int degree) const;
  Measure sampling_measure() const;
  /// ceil(gradient_fraction * d), the number of derivative directions per trial.
  int direction_count() const;
};

/// Reads a JSON object. "kind" selects the defaults; every other key
/// overrides one field. Unknown keys are an error.
ExperimentConfig parse_config(const std::string& json_text);
std::string config_to_json(const ExperimentConfig& config);

struct TrialOutcome {
  Mode mode;
  int N;
  int s;
  bool success = false;
  double error_inf = std::numeric_limits<double>::infinity();
  double rmse = std::numeric_limits<double>::quiet_NaN();
};

inline constexpr double kSuccessThreshold = 1e-3;

/// A result table; cells are strings, integers or reals.
struct Table {
  using Cell = std::variant<std::string, long long, double>;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  /// Header row, then one line per row; reals with 17 significant digits.
  void write_csv(std::ostream& os) const;
  /// An array of objects keyed by column name; non-finite reals become null.
  void write_json(std::ostream& os) const;
  std::string to_csv() const;
};

/// Uniform sample of `count` distinct directions out of d, sorted.
std::vector<int> choose_directions(SplitMix64& rng, int d, int count);

/// One recovery trial for every configured mode. The trial's stream fixes
/// support, coefficients, directions and points, so the modes share them and
/// standard-double extends the standard point set.
std::vector<TrialOutcome> run_recovery_trial(const ExperimentConfig& config, const PceBasis& basis,
                                             std::uint64_t stream, int N, int s);

/// mode,N,s,success_fraction
Table run_recovery_benchmark(const ExperimentConfig& config);
/// matrix,N,M,mic with matrix in {phi, phi_tilde, phi_hat}, mean over seeds.
Table run_mic_sweep(const ExperimentConfig& config);
/// mode,N,rmse, the median over seeds.
Table run_rmse_benchmark(const ExperimentConfig& config);
/// One row with the coherence report of a single draw at config.N.
Table run_diagnose(const ExperimentConfig& config);
Table run_experiment(const ExperimentConfig& config);

double target_value(TargetFunction target, std::span<const double> x);
/// Analytic gradient into `grad` (size d).
void target_gradient(TargetFunction target, std::span<const double> x, std::span<double> grad);

}  // namespace gepce
