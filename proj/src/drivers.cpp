#include "rcdim/drivers.hpp"

#include <cmath>
#include <sstream>

#include "rcdim/errors.hpp"
#include "rcdim/random.hpp"

namespace rcdim {

Eigen::Vector3d OdeSystem::rhs(const Eigen::Vector3d& u) const {
  const auto& p = parameters;
  switch (kind) {
    case OdeKind::Lorenz:
      return {p[0] * (u[1] - u[0]), u[0] * (p[1] - u[2]) - u[1], u[0] * u[1] - p[2] * u[2]};
    case OdeKind::Rossler:
      return {-u[1] - u[2], u[0] + p[0] * u[1], p[1] + u[2] * (u[0] - p[2])};
  }
  throw std::logic_error("unknown ODE kind");
}

Eigen::Matrix3d OdeSystem::jacobian(const Eigen::Vector3d& u) const {
  const auto& p = parameters;
  Eigen::Matrix3d j;
  switch (kind) {
    case OdeKind::Lorenz:
      j << -p[0], p[0], 0.0,
           p[1] - u[2], -1.0, -u[0],
           u[1], u[0], -p[2];
      return j;
    case OdeKind::Rossler:
      j << 0.0, -1.0, -1.0,
           1.0, p[0], 0.0,
           u[2], 0.0, u[0] - p[2];
      return j;
  }
  throw std::logic_error("unknown ODE kind");
}

std::string to_string(OdeKind kind) {
  return kind == OdeKind::Lorenz ? "lorenz" : "rossler";
}

OdeKind parse_ode_kind(const std::string& name) {
  if (name == "lorenz") return OdeKind::Lorenz;
  if (name == "rossler") return OdeKind::Rossler;
  throw std::invalid_argument("unknown ODE system '" + name + "' (expected lorenz|rossler)");
}

namespace {

Eigen::Vector3d rk4_step(const OdeSystem& sys, const Eigen::Vector3d& x, double dt) {
  const Eigen::Vector3d k1 = sys.rhs(x);
  const Eigen::Vector3d k2 = sys.rhs(x + 0.5 * dt * k1);
  const Eigen::Vector3d k3 = sys.rhs(x + 0.5 * dt * k2);
  const Eigen::Vector3d k4 = sys.rhs(x + dt * k3);
  return x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

}  // namespace

Trajectory rk4_integrate(const OdeSystem& system, const Eigen::Vector3d& initial, double dt,
                         double t_end, double t_transient) {
  if (!(dt > 0.0)) throw std::invalid_argument("rk4_integrate: dt must be > 0");
  if (!(t_transient < t_end)) throw std::invalid_argument("rk4_integrate: t_transient must be < t_end");
  if (!initial.allFinite()) throw std::invalid_argument("rk4_integrate: initial state not finite");

  // Step counts are rounded so that t = k dt lands on the grid exactly.
  const auto total = static_cast<std::size_t>(std::llround(t_end / dt));
  const auto first_kept =
      static_cast<std::size_t>(std::max<long long>(0, std::llround(std::ceil(t_transient / dt - 1e-9))));

  Trajectory out;
  out.dt = dt;
  out.t_start = static_cast<double>(first_kept) * dt;
  out.points.reserve(total >= first_kept ? total - first_kept : 0);

  Eigen::Vector3d x = initial;
  // Samples t = first_kept*dt ... (total-1)*dt, i.e. t in [t_transient, t_end).
  for (std::size_t k = 0; k < total; ++k) {
    if (k >= first_kept) out.points.push_back(x);
    x = rk4_step(system, x, dt);
    if (!x.allFinite() || x.cwiseAbs().maxCoeff() > 1e6) {
      std::ostringstream msg;
      msg << "rk4_integrate: numerical blowup at step " << k + 1;
      throw BlowupError(k + 1, msg.str());
    }
  }
  return out;
}

Eigen::Vector3d rk4_variational_step(const OdeSystem& sys, const Eigen::Vector3d& x, double dt,
                                     Eigen::Matrix3d& tangent) {
  const Eigen::Vector3d k1 = sys.rhs(x);
  const Eigen::Vector3d x2 = x + 0.5 * dt * k1;
  const Eigen::Vector3d k2 = sys.rhs(x2);
  const Eigen::Vector3d x3 = x + 0.5 * dt * k2;
  const Eigen::Vector3d k3 = sys.rhs(x3);
  const Eigen::Vector3d x4 = x + dt * k3;
  const Eigen::Vector3d k4 = sys.rhs(x4);

  const Eigen::Matrix3d& v = tangent;
  const Eigen::Matrix3d l1 = sys.jacobian(x) * v;
  const Eigen::Matrix3d l2 = sys.jacobian(x2) * (v + 0.5 * dt * l1);
  const Eigen::Matrix3d l3 = sys.jacobian(x3) * (v + 0.5 * dt * l2);
  const Eigen::Matrix3d l4 = sys.jacobian(x4) * (v + dt * l3);
  tangent = v + (dt / 6.0) * (l1 + 2.0 * l2 + 2.0 * l3 + l4);
  return x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

Eigen::Vector3d perturbed_initial(const OdeSystem& system, std::uint64_t master_seed,
                                  std::uint64_t index, double spread) {
  Rng rng = Rng::stream(master_seed, Stream::InitialCondition,
                        {static_cast<std::uint64_t>(system.kind), index});
  Eigen::Vector3d x = system.base_point();
  for (int i = 0; i < 3; ++i) x[i] += rng.uniform(-spread, spread);
  return x;
}

InputWindow<double> observe(const Trajectory& trajectory, std::span<const int> coordinates,
                            double scale) {
  if (coordinates.empty()) throw std::invalid_argument("observe: empty coordinate list");
  for (int c : coordinates)
    if (c < 0 || c > 2) throw std::invalid_argument("observe: coordinate index out of range");
  MatrixX<double> v(static_cast<Eigen::Index>(coordinates.size()),
                    static_cast<Eigen::Index>(trajectory.size()));
  for (std::size_t k = 0; k < trajectory.size(); ++k)
    for (std::size_t i = 0; i < coordinates.size(); ++i)
      v(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) =
          scale * trajectory.points[k][coordinates[i]];
  return InputWindow<double>(std::move(v));
}

InputWindow<double> random_periodic_block(std::uint64_t seed, Eigen::Index period,
                                          Eigen::Index input_dim, double lo, double hi) {
  if (period < 1 || input_dim < 1)
    throw std::invalid_argument("random_periodic_block: period and input_dim must be >= 1");
  Rng rng(seed);
  MatrixX<double> v(input_dim, period);
  // Column-major: one input vector at a time.
  for (Eigen::Index k = 0; k < period; ++k)
    for (Eigen::Index i = 0; i < input_dim; ++i) v(i, k) = rng.uniform(lo, hi);
  return InputWindow<double>(std::move(v), period);
}

}  // namespace rcdim
