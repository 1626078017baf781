#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>

#include "citegrowth/common.hpp"

namespace citegrowth {

enum class ModelKind { BA, AdditiveFitness, MultiplicativeFitness, LBM, LBMG };

/// Which degree feeds the attachment weights.
enum class DegreeMode {
  InPlusOne, // in-degree + 1
  Total,     // in-degree + out-degree
};

struct GammaRegime {
  enum class Kind { Const, Linear, Sqrt, Log };
  Kind kind = Kind::Log;
  double constant = 1.0; // used by Const only

  static GammaRegime constant_value(double c) { return {Kind::Const, c}; }
  static GammaRegime linear() { return {Kind::Linear, 1.0}; }
  static GammaRegime sqrt() { return {Kind::Sqrt, 1.0}; }
  static GammaRegime log() { return {Kind::Log, 1.0}; }

  friend bool operator==(const GammaRegime&, const GammaRegime&) = default;
};

struct ShiftPolicy {
  enum class Unit { Months, Nodes };
  Unit unit = Unit::Months;
  int every = 1;

  friend bool operator==(const ShiftPolicy&, const ShiftPolicy&) = default;
};

/// Pareto(alpha, xm) fitness law.
struct FitnessParams {
  double alpha = 2.0;
  double xm = 1.0;
  friend bool operator==(const FitnessParams&, const FitnessParams&) = default;
};

struct LocationParams {
  int dim = 2;
  GammaRegime gamma = GammaRegime::log();
  friend bool operator==(const LocationParams&, const LocationParams&) = default;
};

struct SubspaceParams {
  double sigma = 2.0;
  double rho = 2.0;
  ShiftPolicy shift{};
  friend bool operator==(const SubspaceParams&, const SubspaceParams&) = default;
};

/// Attachment model plus the hyper-parameters relevant to it. Optional blocks
/// are present exactly when the model uses them.
struct ModelSpec {
  ModelKind kind = ModelKind::BA;
  DegreeMode degree = DegreeMode::InPlusOne;
  std::optional<FitnessParams> fitness;
  std::optional<LocationParams> location;
  std::optional<SubspaceParams> subspace;

  static ModelSpec ba();
  static ModelSpec additive(FitnessParams f = {});
  static ModelSpec multiplicative(FitnessParams f = {});
  static ModelSpec lbm(LocationParams loc = {}, FitnessParams f = {});
  static ModelSpec lbm_g(SubspaceParams sub = {}, LocationParams loc = {}, FitnessParams f = {});

  bool uses_fitness() const { return kind != ModelKind::BA; }
  bool uses_location() const { return kind == ModelKind::LBM || kind == ModelKind::LBMG; }

  /// Throws std::invalid_argument naming the offending parameter.
  void validate() const;

  friend bool operator==(const ModelSpec&, const ModelSpec&) = default;
};

std::string to_string(ModelKind kind);
std::string to_string(GammaRegime::Kind kind);
std::string to_string(const GammaRegime& regime); // e.g. "const(1)", "log"
ModelKind parse_model_kind(const std::string& s);       // ba|af|mf|lbm|lbm-g
GammaRegime::Kind parse_gamma_kind(const std::string& s); // const|linear|sqrt|log
ShiftPolicy::Unit parse_shift_unit(const std::string& s); // months|nodes

/// Flat `key = value` configuration (keys: model, alpha, xm, dim, gamma_regime,
/// gamma_const, sigma, rho, shift_unit, shift_every, degree). Lines starting
/// with '#' are comments. Unset keys take the model defaults; `rho` defaults
/// to `sigma`.
ModelSpec read_model_config(std::istream& in);
void write_model_config(std::ostream& out, const ModelSpec& spec);

/// Read-only snapshot of the candidate nodes seen by an incoming node.
struct AttachmentView {
  Eigen::Ref<const Eigen::ArrayXd> degree;      // effective degree per node
  Eigen::Ref<const Eigen::ArrayXd> fitness;     // xi per node
  Eigen::Ref<const Eigen::MatrixXd> locations;  // dim x n; may be 0 x 0 for non-location models
};

/// Unnormalised attachment weight of every node in `view` for an entrant at
/// `incoming_location`. `node_count` sets gamma for location models.
Weights compute_weights(const ModelSpec& model, const AttachmentView& view,
                        const Location& incoming_location, Eigen::Index node_count);

/// Natural log of compute_weights (-inf where the weight is zero). Used by the
/// simulator so that extreme gamma values do not underflow every weight.
Weights compute_log_weights(const ModelSpec& model, const AttachmentView& view,
                            const Location& incoming_location, Eigen::Index node_count);

/// Distance-decay factor for a graph of `node_count` nodes.
double gamma_value(const GammaRegime& regime, Eigen::Index node_count);

double sample_fitness(Rng& rng, double alpha, double xm);
Location sample_location_uniform(Rng& rng, int dim);
double standard_normal(Rng& rng);

/// Single Gaussian region that generates entrant locations.
struct ActiveSubspace {
  Location mu;
  double sigma = 1.0;
  long shifts_applied = 0;
};

Location sample_location_active(Rng& rng, const ActiveSubspace& subspace);
/// Random-walk step of the mean: mu' ~ N(mu, rho^2 I).
ActiveSubspace shift_subspace(const ActiveSubspace& subspace, double rho, Rng& rng);

/// Whether the subspace is due to move. `years_since_shift` is simulated time
/// elapsed since the previous shift.
bool shift_due(const ShiftPolicy& policy, double years_since_shift, long nodes_since_shift);

/// Exact shift scheduler for the simulation loop. Month-based shifts fall on
/// a fixed grid of S-month steps starting at the first scheduled year, and a
/// node at time year + j/m triggers every grid point at or before it.
/// Comparisons use integer arithmetic on (year, j, m).
class ShiftClock {
public:
  ShiftClock(ShiftPolicy policy, int start_year);

  /// Shifts to apply before inserting node j of m in `year`.
  long shifts_before(int year, long j, long m);
  /// Records that a node was inserted.
  void node_inserted() { ++nodes_since_shift_; }

private:
  ShiftPolicy policy_;
  int start_year_;
  long grid_index_ = 1;
  long nodes_since_shift_ = 0;
  bool first_ = true;
};

} // namespace citegrowth
