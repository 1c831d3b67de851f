// Collision reaction strategies: impact-force estimate from robot speed and
// mass (power-and-force-limiting model) and the STOP/CONTINUE threshold rule.
#pragma once

#include "hrc/dynamics.hpp"
#include "hrc/model.hpp"
#include "hrc/sensing.hpp"

#include <optional>
#include <string_view>

namespace hrc {

enum class PolicyKind { FACTORY, FIXED_MASS, ADAPTIVE_MASS };
enum class Reaction { STOP, CONTINUE };
enum class MassModel { none, half_mass, effective_mass };

struct PolicyParams {
  double k = kDefaultSpringConstant;  // N/m
  double m_H = kDefaultHumanMass;     // kg
  double f_limit_transient = 280.0;   // N
  double f_limit_quasistatic = 140.0; // N
  double m_R_ceiling = 100.0;         // kg

  static PolicyParams from_scenario(const ScenarioConfig& scenario);
  double limit(ContactClass c) const {
    return c == ContactClass::transient ? f_limit_transient : f_limit_quasistatic;
  }
};

struct PolicyDecision {
  Reaction reaction = Reaction::STOP;
  double estimated_force = 0.0;  // N
  double m_R_used = 0.0;         // kg, 0 when no mass model applies
  MassModel mass_model = MassModel::none;
  double speed = 0.0;            // contact-point speed used, m/s
};

/// F = v·√k / √(1/m_R + 1/m_H). Infinite m_R is clamped to the ceiling.
/// Throws std::invalid_argument for negative v or non-positive m_R.
double estimate_force(double v, double m_R, const PolicyParams& params);

/// STOP iff force >= the class threshold.
Reaction decide(ContactClass contact_class, double estimated_force, const PolicyParams& params);

/// Largest speed whose estimated force stays at the class threshold.
double max_safe_velocity(double m_R, ContactClass contact_class, const PolicyParams& params);

/// Representative contact point (link frame) used for the mass and speed
/// lookup: pad patch midpoint in skin mode, given point otherwise.
PolicyDecision evaluate_contact(PolicyKind policy, const RobotModel& model, const RobotState& state,
                                const ContactEvent& contact, const PolicyParams& params);

const char* to_string(PolicyKind kind);
const char* to_string(Reaction r);
const char* to_string(MassModel m);
std::optional<PolicyKind> parse_policy(std::string_view text);

}  // namespace hrc
