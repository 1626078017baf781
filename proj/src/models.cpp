#include "citegrowth/models.hpp"

#include <cmath>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>

namespace citegrowth {

ModelSpec ModelSpec::ba() { return ModelSpec{}; }

ModelSpec ModelSpec::additive(FitnessParams f) {
  ModelSpec m;
  m.kind = ModelKind::AdditiveFitness;
  m.fitness = f;
  return m;
}

ModelSpec ModelSpec::multiplicative(FitnessParams f) {
  ModelSpec m;
  m.kind = ModelKind::MultiplicativeFitness;
  m.fitness = f;
  return m;
}

ModelSpec ModelSpec::lbm(LocationParams loc, FitnessParams f) {
  ModelSpec m;
  m.kind = ModelKind::LBM;
  m.fitness = f;
  m.location = loc;
  return m;
}

ModelSpec ModelSpec::lbm_g(SubspaceParams sub, LocationParams loc, FitnessParams f) {
  ModelSpec m;
  m.kind = ModelKind::LBMG;
  m.fitness = f;
  m.location = loc;
  m.subspace = sub;
  return m;
}

void ModelSpec::validate() const {
  if (uses_fitness() != fitness.has_value())
    throw std::invalid_argument("fitness parameters must be present exactly for fitness models");
  if (uses_location() != location.has_value())
    throw std::invalid_argument("location parameters must be present exactly for location models");
  if ((kind == ModelKind::LBMG) != subspace.has_value())
    throw std::invalid_argument("subspace parameters must be present exactly for lbm-g");
  if (fitness) {
    if (!(fitness->alpha > 0.0) || !std::isfinite(fitness->alpha))
      throw std::invalid_argument("alpha must be positive");
    if (!(fitness->xm > 0.0) || !std::isfinite(fitness->xm))
      throw std::invalid_argument("xm must be positive");
  }
  if (location) {
    if (location->dim < 1)
      throw std::invalid_argument("dim must be at least 1");
    if (location->gamma.kind == GammaRegime::Kind::Const &&
        (!(location->gamma.constant >= 0.0) || !std::isfinite(location->gamma.constant)))
      throw std::invalid_argument("gamma_const must be a non-negative number");
  }
  if (subspace) {
    if (!(subspace->sigma > 0.0) || !std::isfinite(subspace->sigma))
      throw std::invalid_argument("sigma must be positive");
    if (!(subspace->rho >= 0.0) || !std::isfinite(subspace->rho))
      throw std::invalid_argument("rho must be non-negative");
    if (subspace->shift.every < 1)
      throw std::invalid_argument("shift_every must be at least 1");
  }
}

std::string to_string(ModelKind kind) {
  switch (kind) {
  case ModelKind::BA: return "ba";
  case ModelKind::AdditiveFitness: return "af";
  case ModelKind::MultiplicativeFitness: return "mf";
  case ModelKind::LBM: return "lbm";
  case ModelKind::LBMG: return "lbm-g";
  }
  return "?";
}

std::string to_string(GammaRegime::Kind kind) {
  switch (kind) {
  case GammaRegime::Kind::Const: return "const";
  case GammaRegime::Kind::Linear: return "linear";
  case GammaRegime::Kind::Sqrt: return "sqrt";
  case GammaRegime::Kind::Log: return "log";
  }
  return "?";
}

std::string to_string(const GammaRegime& regime) {
  if (regime.kind != GammaRegime::Kind::Const)
    return to_string(regime.kind);
  std::ostringstream s;
  s << "const(" << regime.constant << ")";
  return s.str();
}

ModelKind parse_model_kind(const std::string& s) {
  if (s == "ba") return ModelKind::BA;
  if (s == "af") return ModelKind::AdditiveFitness;
  if (s == "mf") return ModelKind::MultiplicativeFitness;
  if (s == "lbm") return ModelKind::LBM;
  if (s == "lbm-g" || s == "lbmg") return ModelKind::LBMG;
  throw std::invalid_argument("unknown model '" + s + "' (expected ba|af|mf|lbm|lbm-g)");
}

GammaRegime::Kind parse_gamma_kind(const std::string& s) {
  if (s == "const") return GammaRegime::Kind::Const;
  if (s == "linear") return GammaRegime::Kind::Linear;
  if (s == "sqrt") return GammaRegime::Kind::Sqrt;
  if (s == "log") return GammaRegime::Kind::Log;
  throw std::invalid_argument("unknown gamma regime '" + s + "' (expected const|linear|sqrt|log)");
}

ShiftPolicy::Unit parse_shift_unit(const std::string& s) {
  if (s == "months") return ShiftPolicy::Unit::Months;
  if (s == "nodes") return ShiftPolicy::Unit::Nodes;
  throw std::invalid_argument("unknown shift unit '" + s + "' (expected months|nodes)");
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos)
    return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_number(const std::string& key, const std::string& value) {
  std::size_t used = 0;
  double x = 0.0;
  try {
    x = std::stod(value, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != value.size())
    throw InputError("config key '" + key + "': '" + value + "' is not a number");
  return x;
}

} // namespace

ModelSpec read_model_config(std::istream& in) {
  static const char* known[] = {"model", "alpha", "xm", "dim", "gamma_regime", "gamma_const",
                                "sigma", "rho", "shift_unit", "shift_every", "degree"};
  std::map<std::string, std::string> kv;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto t = trim(line);
    if (t.empty() || t[0] == '#')
      continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw InputError("config line " + std::to_string(lineno) + ": expected key = value");
    const auto key = trim(t.substr(0, eq));
    if (std::find(std::begin(known), std::end(known), key) == std::end(known))
      throw InputError("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    kv[key] = trim(t.substr(eq + 1));
  }
  if (!kv.contains("model"))
    throw InputError("config is missing required key 'model'");

  ModelSpec spec;
  spec.kind = parse_model_kind(kv["model"]);
  if (spec.uses_fitness()) {
    FitnessParams f;
    if (kv.contains("alpha")) f.alpha = parse_number("alpha", kv["alpha"]);
    if (kv.contains("xm")) f.xm = parse_number("xm", kv["xm"]);
    spec.fitness = f;
  }
  if (spec.uses_location()) {
    LocationParams loc;
    if (kv.contains("dim")) loc.dim = static_cast<int>(parse_number("dim", kv["dim"]));
    if (kv.contains("gamma_regime")) loc.gamma.kind = parse_gamma_kind(kv["gamma_regime"]);
    if (kv.contains("gamma_const")) loc.gamma.constant = parse_number("gamma_const", kv["gamma_const"]);
    spec.location = loc;
  }
  if (spec.kind == ModelKind::LBMG) {
    SubspaceParams sub;
    if (kv.contains("sigma")) sub.sigma = parse_number("sigma", kv["sigma"]);
    sub.rho = kv.contains("rho") ? parse_number("rho", kv["rho"]) : sub.sigma;
    if (kv.contains("shift_unit")) sub.shift.unit = parse_shift_unit(kv["shift_unit"]);
    if (kv.contains("shift_every"))
      sub.shift.every = static_cast<int>(parse_number("shift_every", kv["shift_every"]));
    spec.subspace = sub;
  }
  if (kv.contains("degree")) {
    if (kv["degree"] == "in_plus_one") spec.degree = DegreeMode::InPlusOne;
    else if (kv["degree"] == "total") spec.degree = DegreeMode::Total;
    else throw InputError("config key 'degree': expected in_plus_one|total");
  }
  spec.validate();
  return spec;
}

void write_model_config(std::ostream& out, const ModelSpec& spec) {
  out << "model = " << to_string(spec.kind) << '\n';
  out << "degree = " << (spec.degree == DegreeMode::InPlusOne ? "in_plus_one" : "total") << '\n';
  const auto old = out.precision(17);
  if (spec.fitness)
    out << "alpha = " << spec.fitness->alpha << "\nxm = " << spec.fitness->xm << '\n';
  if (spec.location) {
    out << "dim = " << spec.location->dim << '\n';
    out << "gamma_regime = " << to_string(spec.location->gamma.kind) << '\n';
    if (spec.location->gamma.kind == GammaRegime::Kind::Const)
      out << "gamma_const = " << spec.location->gamma.constant << '\n';
  }
  if (spec.subspace) {
    out << "sigma = " << spec.subspace->sigma << "\nrho = " << spec.subspace->rho << '\n';
    out << "shift_unit = " << (spec.subspace->shift.unit == ShiftPolicy::Unit::Months ? "months" : "nodes")
        << "\nshift_every = " << spec.subspace->shift.every << '\n';
  }
  out.precision(old);
}

double gamma_value(const GammaRegime& regime, Eigen::Index node_count) {
  const auto n = static_cast<double>(node_count);
  switch (regime.kind) {
  case GammaRegime::Kind::Const:
    return regime.constant;
  case GammaRegime::Kind::Linear:
    return n;
  case GammaRegime::Kind::Sqrt:
    return std::sqrt(n);
  case GammaRegime::Kind::Log:
    if (node_count <= 1)
      throw std::invalid_argument("log gamma needs at least 2 nodes, got " + std::to_string(node_count));
    return std::log(n);
  }
  throw std::invalid_argument("unknown gamma regime");
}

namespace {

Eigen::ArrayXd distances(const AttachmentView& view, const Location& incoming) {
  const auto n = view.degree.size();
  if (view.locations.cols() != n || view.locations.rows() == 0 || view.locations.rows() != incoming.size())
    throw std::invalid_argument("location model invoked on nodes without matching locations");
  return (view.locations.colwise() - incoming).colwise().norm().transpose().array();
}

void check_sizes(const AttachmentView& view) {
  if (view.fitness.size() != view.degree.size())
    throw std::invalid_argument("attachment view: fitness and degree sizes differ");
}

} // namespace

Weights compute_weights(const ModelSpec& model, const AttachmentView& view,
                        const Location& incoming_location, Eigen::Index node_count) {
  check_sizes(view);
  switch (model.kind) {
  case ModelKind::BA:
    return view.degree;
  case ModelKind::AdditiveFitness:
    return view.degree + view.fitness;
  case ModelKind::MultiplicativeFitness:
    return view.degree * view.fitness;
  case ModelKind::LBM:
  case ModelKind::LBMG: {
    const double gamma = gamma_value(model.location->gamma, node_count);
    return (-gamma * distances(view, incoming_location)).exp() * view.fitness * view.degree;
  }
  }
  throw std::invalid_argument("unknown model kind");
}

Weights compute_log_weights(const ModelSpec& model, const AttachmentView& view,
                            const Location& incoming_location, Eigen::Index node_count) {
  check_sizes(view);
  switch (model.kind) {
  case ModelKind::BA:
    return view.degree.log();
  case ModelKind::AdditiveFitness:
    return (view.degree + view.fitness).log();
  case ModelKind::MultiplicativeFitness:
    return view.degree.log() + view.fitness.log();
  case ModelKind::LBM:
  case ModelKind::LBMG: {
    const double gamma = gamma_value(model.location->gamma, node_count);
    Weights lw = view.degree.log() + view.fitness.log();
    if (gamma != 0.0)
      lw -= gamma * distances(view, incoming_location);
    else
      distances(view, incoming_location); // still validates the view
    return lw;
  }
  }
  throw std::invalid_argument("unknown model kind");
}

double sample_fitness(Rng& rng, double alpha, double xm) {
  if (!(alpha > 0.0) || !(xm > 0.0))
    throw std::invalid_argument("Pareto parameters must be positive");
  // inverse CDF on (0, 1]
  const double u = 1.0 - uniform01(rng);
  return xm * std::pow(u, -1.0 / alpha);
}

Location sample_location_uniform(Rng& rng, int dim) {
  if (dim < 1)
    throw std::invalid_argument("location dimension must be at least 1");
  Location x(dim);
  for (int j = 0; j < dim; ++j)
    x[j] = uniform01(rng);
  return x;
}

double standard_normal(Rng& rng) {
  // Marsaglia polar method; the second variate is discarded.
  for (;;) {
    const double u = 2.0 * uniform01(rng) - 1.0;
    const double v = 2.0 * uniform01(rng) - 1.0;
    const double s = u * u + v * v;
    if (s > 0.0 && s < 1.0)
      return u * std::sqrt(-2.0 * std::log(s) / s);
  }
}

Location sample_location_active(Rng& rng, const ActiveSubspace& subspace) {
  Location x = subspace.mu;
  if (subspace.sigma == 0.0)
    return x;
  for (Eigen::Index j = 0; j < x.size(); ++j)
    x[j] += subspace.sigma * standard_normal(rng);
  return x;
}

ActiveSubspace shift_subspace(const ActiveSubspace& subspace, double rho, Rng& rng) {
  if (!(rho >= 0.0))
    throw std::invalid_argument("rho must be non-negative");
  ActiveSubspace next = subspace;
  if (rho > 0.0)
    for (Eigen::Index j = 0; j < next.mu.size(); ++j)
      next.mu[j] += rho * standard_normal(rng);
  ++next.shifts_applied;
  return next;
}

bool shift_due(const ShiftPolicy& policy, double years_since_shift, long nodes_since_shift) {
  if (policy.every <= 0)
    throw std::invalid_argument("shift period must be positive");
  if (policy.unit == ShiftPolicy::Unit::Nodes)
    return nodes_since_shift >= policy.every;
  // tolerance absorbs rounding in j/m year fractions
  return years_since_shift * 12.0 >= static_cast<double>(policy.every) - 1e-9;
}

ShiftClock::ShiftClock(ShiftPolicy policy, int start_year) : policy_(policy), start_year_(start_year) {
  if (policy_.every <= 0)
    throw std::invalid_argument("shift period must be positive");
}

long ShiftClock::shifts_before(int year, long j, long m) {
  if (policy_.unit == ShiftPolicy::Unit::Nodes) {
    if (first_) {
      first_ = false;
      return 0;
    }
    if (nodes_since_shift_ >= policy_.every) {
      nodes_since_shift_ = 0;
      return 1;
    }
    return 0;
  }
  // grid point k sits at k*S months; the node sits at 12*(year-start) + 12*j/m months
  const long node_scaled = 12L * (year - start_year_) * m + 12L * j;
  long shifts = 0;
  while (grid_index_ * policy_.every * m <= node_scaled) {
    ++grid_index_;
    ++shifts;
  }
  first_ = false;
  return shifts;
}

} // namespace citegrowth
