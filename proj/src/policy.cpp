#include "hrc/policy.hpp"

#include <cmath>
#include <stdexcept>

namespace hrc {

PolicyParams PolicyParams::from_scenario(const ScenarioConfig& scenario) {
  PolicyParams p;
  p.k = scenario.spring_constant;
  p.m_H = scenario.human_mass;
  return p;
}

double estimate_force(double v, double m_R, const PolicyParams& params) {
  if (!(v >= 0.0)) throw std::invalid_argument("estimate_force: speed must be non-negative");
  if (!(m_R > 0.0)) throw std::invalid_argument("estimate_force: robot mass must be positive");
  const double m = std::min(m_R, params.m_R_ceiling);
  return v * std::sqrt(params.k) / std::sqrt(1.0 / m + 1.0 / params.m_H);
}

Reaction decide(ContactClass contact_class, double estimated_force, const PolicyParams& params) {
  return estimated_force >= params.limit(contact_class) ? Reaction::STOP : Reaction::CONTINUE;
}

double max_safe_velocity(double m_R, ContactClass contact_class, const PolicyParams& params) {
  if (!(m_R > 0.0)) throw std::invalid_argument("max_safe_velocity: robot mass must be positive");
  const double m = std::min(m_R, params.m_R_ceiling);
  return params.limit(contact_class) / std::sqrt(params.k) * std::sqrt(1.0 / m + 1.0 / params.m_H);
}

PolicyDecision evaluate_contact(PolicyKind policy, const RobotModel& model, const RobotState& state,
                                const ContactEvent& contact, const PolicyParams& params) {
  PolicyDecision d;
  if (policy == PolicyKind::FACTORY) {
    d.reaction = Reaction::STOP;
    d.mass_model = MassModel::none;
    return d;
  }

  const Eigen::Vector3d v = link_point_velocity(model, state, contact.link, contact.point_link);
  d.speed = v.norm();

  const bool use_effective = policy == PolicyKind::ADAPTIVE_MASS && d.speed >= kMinDirectionSpeed;
  if (use_effective) {
    const double m_u = effective_mass(model, state.frames(), contact.link, contact.point_link, v / d.speed);
    d.m_R_used = std::min(m_u, params.m_R_ceiling);
    d.mass_model = MassModel::effective_mass;
  } else {
    d.m_R_used = std::min(half_mass(model, contact.link), params.m_R_ceiling);
    d.mass_model = MassModel::half_mass;
  }
  if (d.m_R_used > 0.0) {
    d.estimated_force = estimate_force(d.speed, d.m_R_used, params);
  } else {
    d.estimated_force = 0.0;  // massless links carry no impact
  }
  d.reaction = decide(contact.contact_class, d.estimated_force, params);
  return d;
}

const char* to_string(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::FACTORY: return "FACTORY";
    case PolicyKind::FIXED_MASS: return "FIXED_MASS";
    case PolicyKind::ADAPTIVE_MASS: return "ADAPTIVE_MASS";
  }
  return "?";
}

const char* to_string(Reaction r) { return r == Reaction::STOP ? "STOP" : "CONTINUE"; }

const char* to_string(MassModel m) {
  switch (m) {
    case MassModel::none: return "none";
    case MassModel::half_mass: return "half_mass";
    case MassModel::effective_mass: return "effective_mass";
  }
  return "?";
}

std::optional<PolicyKind> parse_policy(std::string_view text) {
  if (text == "factory" || text == "FACTORY") return PolicyKind::FACTORY;
  if (text == "fixed" || text == "FIXED_MASS") return PolicyKind::FIXED_MASS;
  if (text == "adaptive" || text == "ADAPTIVE_MASS") return PolicyKind::ADAPTIVE_MASS;
  return std::nullopt;
}

}  // namespace hrc
